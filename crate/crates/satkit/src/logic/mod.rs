//! Clausal first-order logic core: terms, clauses, unification, binary
//! resolution with factoring, subsumption, TPTP-CNF input/output, and
//! derivation recording with independent proof verification.

pub mod clause;
pub mod derivation;
pub mod infer;
pub mod term;
pub mod tptp;
pub mod unify;

pub use clause::{Clause, ClauseId, Origin};
pub use derivation::{DerivationGraph, VerifiedProof};
pub use term::{Literal, Sym, SymbolKind, SymbolTable, Term};
pub use unify::{unify, Subst};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("symbol `{symbol}` used with arity {first} and again with arity {second}")]
    ArityClash {
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("symbol `{symbol}` used both as a predicate and as a function")]
    KindClash { symbol: String },
    #[error("unknown role `{role}` (expected axiom, hypothesis, or negated_conjecture)")]
    UnknownRole { role: String },
    #[error("literal index {index} out of range for clause of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("factoring requires two distinct literal indices, got {index} twice")]
    FactorSameIndex { index: usize },
    #[error("derivation step {id} does not follow from its recorded parents")]
    StepMismatch { id: ClauseId },
    #[error("derivation references missing parent {parent} of clause {id}")]
    MissingParent { id: ClauseId, parent: ClauseId },
    #[error("derivation graph contains a cycle through clause {id}")]
    Cycle { id: ClauseId },
    #[error("derivation claims no empty clause")]
    NoEmptyClause,
    #[error("duplicate clause id {id} in derivation")]
    DuplicateId { id: ClauseId },
}

/// A parsed problem: axioms (including hypotheses) plus the negated
/// conjecture, over a shared symbol table.
#[derive(Debug, Clone, Default)]
pub struct Problem {
    pub symbols: SymbolTable,
    pub axioms: Vec<Clause>,
    pub neg_conjecture: Vec<Clause>,
}

impl Problem {
    /// All input clauses, axioms first, in id order within each group.
    pub fn clauses(&self) -> Vec<Clause> {
        let mut out = self.axioms.clone();
        out.extend(self.neg_conjecture.iter().cloned());
        out
    }

    pub fn len(&self) -> usize {
        self.axioms.len() + self.neg_conjecture.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty() && self.neg_conjecture.is_empty()
    }
}
