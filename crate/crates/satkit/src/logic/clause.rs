//! Clauses: normalized disjunctions of literals with provenance metadata.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use super::term::{Literal, SymbolTable, Term};

/// Identifier of a clause within a derivation. Ids are unique per run;
/// parallel component runs carve disjoint ranges out of the u64 space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClauseId(pub u64);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where a clause came from: an input role or an inference rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    Axiom,
    Hypothesis,
    NegatedConjecture,
    /// Binary resolution of the two parents; positions are the resolved
    /// literal indices in each parent's normalized literal list.
    Resolution {
        parents: [ClauseId; 2],
        positions: [usize; 2],
    },
    /// Factoring of one parent; positions are the two unified literal indices.
    Factoring {
        parent: ClauseId,
        positions: [usize; 2],
    },
}

impl Origin {
    pub fn parents(&self) -> Vec<ClauseId> {
        match self {
            Origin::Axiom | Origin::Hypothesis | Origin::NegatedConjecture => Vec::new(),
            Origin::Resolution { parents, .. } => parents.to_vec(),
            Origin::Factoring { parent, .. } => vec![*parent],
        }
    }

    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Origin::Axiom | Origin::Hypothesis | Origin::NegatedConjecture
        )
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            Origin::Axiom => "axiom",
            Origin::Hypothesis => "hypothesis",
            Origin::NegatedConjecture => "negated_conjecture",
            Origin::Resolution { .. } => "resolution",
            Origin::Factoring { .. } => "factoring",
        }
    }
}

/// A clause in normalized form: literals sorted by a variable-blind
/// structural key, variables renamed to X0,X1,... in order of first
/// occurrence, and exact duplicate literals removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub id: ClauseId,
    pub literals: Vec<Literal>,
    pub origin: Origin,
}

impl Clause {
    /// Build a clause, normalizing the literal list.
    pub fn new(id: ClauseId, literals: Vec<Literal>, origin: Origin) -> Clause {
        let literals = normalize_literals(literals);
        Clause { id, literals, origin }
    }

    /// Build a clause without normalizing. Used when reloading serialized
    /// derivations, where recorded literal positions must stay valid.
    pub fn from_parts(id: ClauseId, literals: Vec<Literal>, origin: Origin) -> Clause {
        Clause { id, literals, origin }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    /// Total symbol-and-variable count across literals.
    pub fn weight(&self) -> usize {
        self.literals.iter().map(|l| l.atom.size()).sum()
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for lit in &self.literals {
            lit.atom.vars(&mut out);
        }
        out
    }

    pub fn max_var(&self) -> Option<u32> {
        self.vars().into_iter().max()
    }

    /// The clause body with all variables shifted up by `offset`.
    pub fn shifted_literals(&self, offset: u32) -> Vec<Literal> {
        self.literals
            .iter()
            .map(|l| Literal::new(l.positive, l.atom.shift_vars(offset)))
            .collect()
    }

    /// True when some literal and its negation both occur (syntactically,
    /// after normalization).
    pub fn is_tautology(&self) -> bool {
        for (i, a) in self.literals.iter().enumerate() {
            for b in &self.literals[i + 1..] {
                if a.positive != b.positive && a.atom == b.atom {
                    return true;
                }
            }
        }
        false
    }

    /// Body-only equality key: literal list without id or origin.
    pub fn body_key(&self) -> &[Literal] {
        &self.literals
    }

    pub fn display<'a>(&'a self, symbols: &'a SymbolTable) -> ClauseDisplay<'a> {
        ClauseDisplay { clause: self, symbols }
    }
}

/// Sort literals by variable-blind structure, rename variables in order of
/// first occurrence, and drop exact duplicates. Renaming runs twice so the
/// final order does not depend on the input's variable names: the first pass
/// fixes literal order by shape plus renamed tiebreak, the second assigns
/// the definitive variable numbering along that order.
pub fn normalize_literals(mut literals: Vec<Literal>) -> Vec<Literal> {
    // First pass: canonical per-literal renaming used only as a sort key.
    let keyed: Vec<(String, Literal)> = literals
        .drain(..)
        .map(|lit| {
            let mut map = HashMap::new();
            let mut next = 0;
            let solo = lit.atom.rename_vars(&mut map, &mut next);
            let mut key = lit.shape_key();
            key.push('|');
            // Append the locally-renamed form to break ties among literals
            // with equal shape but different variable patterns.
            let mut tail = String::new();
            write_term_key(&solo, &mut tail);
            key.push_str(&tail);
            (key, lit)
        })
        .collect();
    let mut keyed = keyed;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));

    // Second pass: global renaming along the sorted order.
    let mut map = HashMap::new();
    let mut next = 0;
    let mut out: Vec<Literal> = Vec::with_capacity(keyed.len());
    for (_, lit) in keyed {
        let renamed = Literal::new(lit.positive, lit.atom.rename_vars(&mut map, &mut next));
        if !out.contains(&renamed) {
            out.push(renamed);
        }
    }
    out
}

fn write_term_key(term: &Term, out: &mut String) {
    match term {
        Term::Var(v) => {
            out.push('v');
            out.push_str(&v.to_string());
        }
        Term::App(sym, args) => {
            out.push('f');
            out.push_str(&sym.0.to_string());
            if !args.is_empty() {
                out.push('(');
                for a in args {
                    write_term_key(a, out);
                    out.push(',');
                }
                out.push(')');
            }
        }
    }
}

pub struct ClauseDisplay<'a> {
    clause: &'a Clause,
    symbols: &'a SymbolTable,
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clause.literals.is_empty() {
            return write!(f, "$false");
        }
        for (i, lit) in self.clause.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{}", lit.display(self.symbols))?;
        }
        Ok(())
    }
}
