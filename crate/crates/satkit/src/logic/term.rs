//! Terms, literals, and the interned symbol table.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use super::LogicError;

/// Interned symbol identifier. The table stores name, arity, and kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sym(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Function,
    Predicate,
}

#[derive(Debug, Clone)]
struct SymbolInfo {
    name: String,
    arity: usize,
    kind: SymbolKind,
}

/// Maps symbol names to ids and enforces arity consistency across a problem.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    infos: Vec<SymbolInfo>,
    by_name: HashMap<String, Sym>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern a symbol, checking arity and kind against earlier occurrences.
    pub fn intern(&mut self, name: &str, arity: usize, kind: SymbolKind) -> Result<Sym, LogicError> {
        if let Some(&sym) = self.by_name.get(name) {
            let info = &self.infos[sym.0 as usize];
            if info.arity != arity {
                return Err(LogicError::ArityClash {
                    symbol: name.to_string(),
                    first: info.arity,
                    second: arity,
                });
            }
            if info.kind != kind {
                return Err(LogicError::KindClash {
                    symbol: name.to_string(),
                });
            }
            return Ok(sym);
        }
        let sym = Sym(self.infos.len() as u32);
        self.infos.push(SymbolInfo {
            name: name.to_string(),
            arity,
            kind,
        });
        self.by_name.insert(name.to_string(), sym);
        Ok(sym)
    }

    pub fn name(&self, sym: Sym) -> &str {
        &self.infos[sym.0 as usize].name
    }

    pub fn arity(&self, sym: Sym) -> usize {
        self.infos[sym.0 as usize].arity
    }

    pub fn kind(&self, sym: Sym) -> SymbolKind {
        self.infos[sym.0 as usize].kind
    }

    pub fn len(&self) -> usize {
        self.infos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infos.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.by_name.get(name).copied()
    }
}

/// First-order term: a variable or a functor applied to arguments.
/// Constants are zero-arity applications. Variable ids are clause-local.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(id: u32) -> Term {
        Term::Var(id)
    }

    pub fn app(sym: Sym, args: Vec<Term>) -> Term {
        Term::App(sym, args)
    }

    pub fn constant(sym: Sym) -> Term {
        Term::App(sym, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Head symbol, if this is an application.
    pub fn head(&self) -> Option<Sym> {
        match self {
            Term::Var(_) => None,
            Term::App(sym, _) => Some(*sym),
        }
    }

    pub fn occurs(&self, var: u32) -> bool {
        match self {
            Term::Var(v) => *v == var,
            Term::App(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn vars(&self, out: &mut Vec<u32>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::App(_, args) => {
                for a in args {
                    a.vars(out);
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Total node count (symbols plus variables).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Rename every variable through `map`, extending the map with fresh
    /// consecutive ids (starting at `next`) on first sight.
    pub fn rename_vars(&self, map: &mut HashMap<u32, u32>, next: &mut u32) -> Term {
        match self {
            Term::Var(v) => {
                let id = *map.entry(*v).or_insert_with(|| {
                    let id = *next;
                    *next += 1;
                    id
                });
                Term::Var(id)
            }
            Term::App(sym, args) => Term::App(
                *sym,
                args.iter().map(|a| a.rename_vars(map, next)).collect(),
            ),
        }
    }

    /// Shift every variable id by `offset` (used to rename clauses apart).
    pub fn shift_vars(&self, offset: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(v + offset),
            Term::App(sym, args) => {
                Term::App(*sym, args.iter().map(|a| a.shift_vars(offset)).collect())
            }
        }
    }

    /// Structural key with all variables collapsed to one placeholder.
    /// Used to sort literals independently of variable naming.
    pub fn shape_key(&self, out: &mut String) {
        match self {
            Term::Var(_) => out.push('*'),
            Term::App(sym, args) => {
                out.push('f');
                out.push_str(&sym.0.to_string());
                if !args.is_empty() {
                    out.push('(');
                    for a in args {
                        a.shape_key(out);
                        out.push(',');
                    }
                    out.push(')');
                }
            }
        }
    }

    pub fn display<'a>(&'a self, symbols: &'a SymbolTable) -> TermDisplay<'a> {
        TermDisplay { term: self, symbols }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    symbols: &'a SymbolTable,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => write!(f, "X{v}"),
            Term::App(sym, args) => {
                write!(f, "{}", self.symbols.name(*sym))?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", a.display(self.symbols))?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A literal: an atom with a polarity. The atom's head is a predicate symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Term,
}

impl Literal {
    pub fn new(positive: bool, atom: Term) -> Literal {
        Literal { positive, atom }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }

    /// Predicate symbol of the atom.
    pub fn head(&self) -> Sym {
        self.atom
            .head()
            .expect("literal atom is always an application")
    }

    pub fn shape_key(&self) -> String {
        let mut s = String::new();
        s.push(if self.positive { '+' } else { '-' });
        self.atom.shape_key(&mut s);
        s
    }

    pub fn display<'a>(&'a self, symbols: &'a SymbolTable) -> LiteralDisplay<'a> {
        LiteralDisplay { lit: self, symbols }
    }
}

pub struct LiteralDisplay<'a> {
    lit: &'a Literal,
    symbols: &'a SymbolTable,
}

impl fmt::Display for LiteralDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.lit.positive {
            write!(f, "~")?;
        }
        write!(f, "{}", self.lit.atom.display(self.symbols))
    }
}
