//! Reader and printer for the TPTP CNF subset used throughout the crate.
//!
//! Accepted input: a sequence of `cnf(name, role, formula).` statements with
//! role one of axiom, hypothesis, negated_conjecture. A formula is a
//! disjunction of possibly negated atoms joined by `|`, optionally wrapped
//! in parentheses. Identifiers start lowercase (or are all digits),
//! variables start uppercase or underscore, `~` negates, `%` starts a line
//! comment, and `$false` stands for the empty disjunction.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::clause::{Clause, ClauseId, Origin};
use super::term::{Literal, SymbolKind, SymbolTable, Term};
use super::{LogicError, Problem};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Pipe,
    Tilde,
    False,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> LogicError {
        LogicError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Next token with its start position, or None at end of input.
    fn next_tok(&mut self) -> Result<Option<(Tok, usize, usize)>, LogicError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
            }
        }
        let line = self.line;
        let column = self.column;
        let c = self.bump().expect("peeked above");
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '|' => Tok::Pipe,
            '~' => Tok::Tilde,
            '$' => {
                let word = self.take_word(String::new());
                if word == "false" {
                    Tok::False
                } else {
                    return Err(self.error(format!("unknown defined symbol `${word}`")));
                }
            }
            c if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                Tok::Ident(self.take_word(c.to_string()))
            }
            c if c.is_ascii_uppercase() || c == '_' => Tok::Var(self.take_word(c.to_string())),
            c => return Err(self.error(format!("unexpected character `{c}`"))),
        };
        Ok(Some((tok, line, column)))
    }

    fn take_word(&mut self, mut word: String) -> String {
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                word.push(c);
                self.bump();
            } else {
                break;
            }
        }
        word
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<(Tok, usize, usize)>,
    symbols: SymbolTable,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, LogicError> {
        Self::with_symbols(text, SymbolTable::new())
    }

    fn with_symbols(text: &'a str, symbols: SymbolTable) -> Result<Self, LogicError> {
        let mut lexer = Lexer::new(text);
        let lookahead = lexer.next_tok()?;
        Ok(Parser {
            lexer,
            lookahead,
            symbols,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.lookahead.as_ref().map(|(t, _, _)| t)
    }

    fn advance(&mut self) -> Result<Option<(Tok, usize, usize)>, LogicError> {
        let cur = self.lookahead.take();
        self.lookahead = self.lexer.next_tok()?;
        Ok(cur)
    }

    fn error_at(&self, message: impl Into<String>) -> LogicError {
        let (line, column) = self
            .lookahead
            .as_ref()
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((self.lexer.line, self.lexer.column));
        LogicError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, label: &str) -> Result<(), LogicError> {
        match self.advance()? {
            Some((tok, _, _)) if tok == want => Ok(()),
            Some((tok, line, column)) => Err(LogicError::Syntax {
                line,
                column,
                message: format!("expected {label}, found {tok:?}"),
            }),
            None => Err(self.error_at(format!("expected {label}, found end of input"))),
        }
    }

    fn expect_ident(&mut self, label: &str) -> Result<String, LogicError> {
        match self.advance()? {
            Some((Tok::Ident(s), _, _)) => Ok(s),
            Some((tok, line, column)) => Err(LogicError::Syntax {
                line,
                column,
                message: format!("expected {label}, found {tok:?}"),
            }),
            None => Err(self.error_at(format!("expected {label}, found end of input"))),
        }
    }

    /// Parse one `cnf(name, role, formula).` statement. Returns the role and
    /// literal list; the caller builds the clause.
    fn statement(&mut self) -> Result<(String, Vec<Literal>), LogicError> {
        let kw = self.expect_ident("`cnf`")?;
        if kw != "cnf" {
            return Err(self.error_at(format!("expected `cnf`, found `{kw}`")));
        }
        self.expect(Tok::LParen, "`(`")?;
        // Clause name: identifier or variable-shaped word, unused beyond
        // syntax checking.
        match self.advance()? {
            Some((Tok::Ident(_), _, _)) | Some((Tok::Var(_), _, _)) => {}
            Some((tok, line, column)) => {
                return Err(LogicError::Syntax {
                    line,
                    column,
                    message: format!("expected clause name, found {tok:?}"),
                })
            }
            None => return Err(self.error_at("expected clause name, found end of input")),
        }
        self.expect(Tok::Comma, "`,`")?;
        let role = self.expect_ident("role")?;
        self.expect(Tok::Comma, "`,`")?;
        let mut vars: HashMap<String, u32> = HashMap::new();
        let literals = self.disjunction(&mut vars)?;
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        Ok((role, literals))
    }

    fn disjunction(&mut self, vars: &mut HashMap<String, u32>) -> Result<Vec<Literal>, LogicError> {
        // Allow one level of parentheses around the whole disjunction.
        let wrapped = if self.peek() == Some(&Tok::LParen) {
            self.advance()?;
            true
        } else {
            false
        };
        let mut literals = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::False) => {
                    self.advance()?;
                }
                _ => literals.push(self.literal(vars)?),
            }
            if self.peek() == Some(&Tok::Pipe) {
                self.advance()?;
            } else {
                break;
            }
        }
        if wrapped {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(literals)
    }

    fn literal(&mut self, vars: &mut HashMap<String, u32>) -> Result<Literal, LogicError> {
        let positive = if self.peek() == Some(&Tok::Tilde) {
            self.advance()?;
            false
        } else {
            true
        };
        let atom = self.term(vars, SymbolKind::Predicate)?;
        Ok(Literal::new(positive, atom))
    }

    fn term(
        &mut self,
        vars: &mut HashMap<String, u32>,
        kind: SymbolKind,
    ) -> Result<Term, LogicError> {
        match self.advance()? {
            Some((Tok::Var(name), line, column)) => {
                if kind == SymbolKind::Predicate {
                    return Err(LogicError::Syntax {
                        line,
                        column,
                        message: format!("variable `{name}` cannot head an atom"),
                    });
                }
                let next = vars.len() as u32;
                Ok(Term::Var(*vars.entry(name).or_insert(next)))
            }
            Some((Tok::Ident(name), _, _)) => {
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.advance()?;
                    loop {
                        args.push(self.term(vars, SymbolKind::Function)?);
                        if self.peek() == Some(&Tok::Comma) {
                            self.advance()?;
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                }
                let sym = self.symbols.intern(&name, args.len(), kind)?;
                Ok(Term::App(sym, args))
            }
            Some((tok, line, column)) => Err(LogicError::Syntax {
                line,
                column,
                message: format!("expected a term, found {tok:?}"),
            }),
            None => Err(self.error_at("expected a term, found end of input")),
        }
    }
}

/// Parse a TPTP CNF problem. Clause ids are assigned in file order starting
/// at 0; axiom and hypothesis roles land in `axioms`, negated_conjecture in
/// `neg_conjecture`.
pub fn parse_tptp_cnf(text: &str) -> Result<Problem, LogicError> {
    let mut parser = Parser::new(text)?;
    let mut problem = Problem::default();
    let mut next_id = 0u64;
    while parser.peek().is_some() {
        let (role, literals) = parser.statement()?;
        let origin = match role.as_str() {
            "axiom" => Origin::Axiom,
            "hypothesis" => Origin::Hypothesis,
            "negated_conjecture" => Origin::NegatedConjecture,
            other => return Err(LogicError::UnknownRole { role: other.to_string() }),
        };
        let clause = Clause::new(ClauseId(next_id), literals, origin);
        next_id += 1;
        match clause.origin {
            Origin::NegatedConjecture => problem.neg_conjecture.push(clause),
            _ => problem.axioms.push(clause),
        }
    }
    problem.symbols = parser.symbols;
    Ok(problem)
}

/// Print one clause body in the accepted subset (no surrounding `cnf(...)`)
pub fn format_clause(clause: &Clause, symbols: &SymbolTable) -> String {
    clause.display(symbols).to_string()
}

/// Parse a bare disjunction (`p(X) | ~q(a)` or `$false`) against an existing
/// symbol table, preserving literal order. Variables are shared across the
/// whole disjunction.
pub fn parse_clause_body(
    text: &str,
    symbols: &mut SymbolTable,
) -> Result<Vec<Literal>, LogicError> {
    let mut parser = Parser::with_symbols(text, std::mem::take(symbols))?;
    let mut vars = HashMap::new();
    let literals = parser.disjunction(&mut vars)?;
    if parser.peek().is_some() {
        return Err(parser.error_at("trailing input after clause body"));
    }
    *symbols = parser.symbols;
    Ok(literals)
}

/// Print a whole problem; `parse_tptp_cnf` reads the output back.
pub fn print_problem(problem: &Problem) -> String {
    let mut out = String::new();
    for clause in problem.axioms.iter().chain(&problem.neg_conjecture) {
        let role = match clause.origin {
            Origin::Hypothesis => "hypothesis",
            Origin::NegatedConjecture => "negated_conjecture",
            _ => "axiom",
        };
        let _ = writeln!(
            out,
            "cnf(c{}, {}, {}).",
            clause.id.0,
            role,
            format_clause(clause, &problem.symbols)
        );
    }
    out
}
