//! Derivation recording and independent proof checking.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use super::clause::{Clause, ClauseId, Origin};
use super::infer::{factor, is_variant, resolve};
use super::term::SymbolTable;
use super::tptp::{format_clause, parse_clause_body};
use super::LogicError;

/// Every clause seen during one or more saturation runs, dead ends
/// included, keyed by id. Parent edges live in each clause's `origin`.
/// When a refutation is found, `proof_ids` holds the empty clause and its
/// ancestor closure.
#[derive(Debug, Clone, Default)]
pub struct DerivationGraph {
    nodes: BTreeMap<ClauseId, Clause>,
    proof_ids: BTreeSet<ClauseId>,
}

/// Result of `verify`: the checked refutation.
#[derive(Debug, Clone)]
pub struct VerifiedProof {
    pub empty_clause: ClauseId,
    /// The empty clause plus all its ancestors.
    pub proof_ids: BTreeSet<ClauseId>,
    /// Input clauses the proof rests on.
    pub leaf_ids: BTreeSet<ClauseId>,
    /// Inference steps re-executed across the whole graph.
    pub steps_checked: usize,
}

impl DerivationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, clause: Clause) -> Result<(), LogicError> {
        if self.nodes.contains_key(&clause.id) {
            return Err(LogicError::DuplicateId { id: clause.id });
        }
        self.nodes.insert(clause.id, clause);
        Ok(())
    }

    pub fn get(&self, id: ClauseId) -> Option<&Clause> {
        self.nodes.get(&id)
    }

    pub fn contains(&self, id: ClauseId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Clauses in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &Clause> {
        self.nodes.values()
    }

    pub fn proof_ids(&self) -> &BTreeSet<ClauseId> {
        &self.proof_ids
    }

    /// The recorded proof clauses in id order, if a refutation was marked.
    pub fn proof_clauses(&self) -> Vec<&Clause> {
        self.proof_ids
            .iter()
            .filter_map(|id| self.nodes.get(id))
            .collect()
    }

    /// First empty clause in id order, if any.
    pub fn find_empty(&self) -> Option<ClauseId> {
        self.nodes
            .values()
            .find(|c| c.is_empty())
            .map(|c| c.id)
    }

    /// Ancestor closure of `id`, including `id` itself.
    pub fn ancestors(&self, id: ClauseId) -> BTreeSet<ClauseId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur) {
                continue;
            }
            if let Some(clause) = self.nodes.get(&cur) {
                stack.extend(clause.origin.parents());
            }
        }
        seen
    }

    /// Record the proof closure from the given empty clause.
    pub fn mark_proof(&mut self, empty_id: ClauseId) {
        self.proof_ids = self.ancestors(empty_id);
    }

    /// Absorb another graph's nodes (id spaces must be disjoint except for
    /// identical shared input clauses). Proof marks from `other` carry over
    /// when this graph has none.
    pub fn merge(&mut self, other: DerivationGraph) -> Result<(), LogicError> {
        for (id, clause) in other.nodes {
            match self.nodes.get(&id) {
                None => {
                    self.nodes.insert(id, clause);
                }
                Some(existing) => {
                    if existing.literals != clause.literals {
                        return Err(LogicError::DuplicateId { id });
                    }
                }
            }
        }
        if self.proof_ids.is_empty() {
            self.proof_ids = other.proof_ids;
        }
        Ok(())
    }

    /// Re-execute every recorded inference and check the proof closure.
    ///
    /// Each Inferred clause is recomputed from its parents at the recorded
    /// literal positions; the recorded conclusion must be a variant of the
    /// recomputed one (equal up to variable renaming), which both certifies
    /// entailment and makes the record tamper-evident. The graph must be
    /// acyclic with all parents present and must contain an empty clause.
    pub fn verify(&self) -> Result<VerifiedProof, LogicError> {
        self.check_acyclic()?;
        let mut steps_checked = 0;
        for clause in self.nodes.values() {
            match &clause.origin {
                Origin::Axiom | Origin::Hypothesis | Origin::NegatedConjecture => {}
                Origin::Resolution { parents, positions } => {
                    let p1 = self.parent(clause.id, parents[0])?;
                    let p2 = self.parent(clause.id, parents[1])?;
                    let recomputed = resolve(p1, p2, positions[0], positions[1], clause.id)
                        .map_err(|_| LogicError::StepMismatch { id: clause.id })?
                        .ok_or(LogicError::StepMismatch { id: clause.id })?;
                    if !is_variant(&recomputed, clause) {
                        return Err(LogicError::StepMismatch { id: clause.id });
                    }
                    steps_checked += 1;
                }
                Origin::Factoring { parent, positions } => {
                    let p = self.parent(clause.id, *parent)?;
                    let recomputed = factor(p, positions[0], positions[1], clause.id)
                        .map_err(|_| LogicError::StepMismatch { id: clause.id })?
                        .ok_or(LogicError::StepMismatch { id: clause.id })?;
                    if !is_variant(&recomputed, clause) {
                        return Err(LogicError::StepMismatch { id: clause.id });
                    }
                    steps_checked += 1;
                }
            }
        }
        let empty_clause = self.find_empty().ok_or(LogicError::NoEmptyClause)?;
        let proof_ids = self.ancestors(empty_clause);
        let leaf_ids = proof_ids
            .iter()
            .copied()
            .filter(|id| self.nodes[id].origin.is_input())
            .collect();
        Ok(VerifiedProof {
            empty_clause,
            proof_ids,
            leaf_ids,
            steps_checked,
        })
    }

    fn parent(&self, child: ClauseId, parent: ClauseId) -> Result<&Clause, LogicError> {
        self.nodes
            .get(&parent)
            .ok_or(LogicError::MissingParent { id: child, parent })
    }

    fn check_acyclic(&self) -> Result<(), LogicError> {
        // Iterative three-color depth-first search over parent edges.
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color: BTreeMap<ClauseId, u8> = BTreeMap::new();
        for &start in self.nodes.keys() {
            if color.get(&start).copied().unwrap_or(WHITE) != WHITE {
                continue;
            }
            let mut stack = vec![(start, false)];
            while let Some((id, expanded)) = stack.pop() {
                if expanded {
                    color.insert(id, BLACK);
                    continue;
                }
                match color.get(&id).copied().unwrap_or(WHITE) {
                    BLACK => continue,
                    GRAY => return Err(LogicError::Cycle { id }),
                    _ => {}
                }
                color.insert(id, GRAY);
                stack.push((id, true));
                if let Some(clause) = self.nodes.get(&id) {
                    for parent in clause.origin.parents() {
                        match color.get(&parent).copied().unwrap_or(WHITE) {
                            WHITE => stack.push((parent, false)),
                            GRAY => return Err(LogicError::Cycle { id: parent }),
                            _ => {}
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// One serialized derivation line.
#[derive(Debug, Serialize, Deserialize)]
pub struct DerivationRecord {
    pub id: u64,
    pub literals: Vec<String>,
    pub rule: String,
    #[serde(default)]
    pub parents: Vec<u64>,
    #[serde(default)]
    pub positions: Vec<usize>,
    #[serde(default)]
    pub in_proof: bool,
}

impl DerivationGraph {
    /// Serialize as JSON-lines, one clause per line in id order.
    pub fn to_jsonl(&self, symbols: &SymbolTable) -> String {
        let mut out = String::new();
        for clause in self.nodes.values() {
            let record = DerivationRecord {
                id: clause.id.0,
                literals: clause
                    .literals
                    .iter()
                    .map(|l| l.display(symbols).to_string())
                    .collect(),
                rule: clause.origin.rule_name().to_string(),
                parents: clause.origin.parents().iter().map(|p| p.0).collect(),
                positions: match &clause.origin {
                    Origin::Resolution { positions, .. } => positions.to_vec(),
                    Origin::Factoring { positions, .. } => positions.to_vec(),
                    _ => Vec::new(),
                },
                in_proof: self.proof_ids.contains(&clause.id),
            };
            out.push_str(&serde_json::to_string(&record).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Read a graph back from JSON-lines. Literal order inside each clause
    /// is preserved so recorded positions stay meaningful.
    pub fn from_jsonl(text: &str) -> Result<(DerivationGraph, SymbolTable), LogicError> {
        let mut graph = DerivationGraph::new();
        let mut symbols = SymbolTable::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: DerivationRecord =
                serde_json::from_str(line).map_err(|e| LogicError::Syntax {
                    line: lineno + 1,
                    column: 1,
                    message: format!("bad derivation record: {e}"),
                })?;
            let body = if record.literals.is_empty() {
                "$false".to_string()
            } else {
                record.literals.join(" | ")
            };
            let literals = parse_clause_body(&body, &mut symbols)?;
            let origin = origin_from_record(&record, lineno + 1)?;
            let clause = Clause::from_parts(ClauseId(record.id), literals, origin);
            if record.in_proof {
                graph.proof_ids.insert(clause.id);
            }
            graph.insert(clause)?;
        }
        Ok((graph, symbols))
    }
}

fn origin_from_record(record: &DerivationRecord, line: usize) -> Result<Origin, LogicError> {
    let bad = |message: String| LogicError::Syntax {
        line,
        column: 1,
        message,
    };
    match record.rule.as_str() {
        "axiom" => Ok(Origin::Axiom),
        "hypothesis" => Ok(Origin::Hypothesis),
        "negated_conjecture" => Ok(Origin::NegatedConjecture),
        "resolution" => {
            if record.parents.len() != 2 || record.positions.len() != 2 {
                return Err(bad(format!(
                    "resolution record {} needs 2 parents and 2 positions",
                    record.id
                )));
            }
            Ok(Origin::Resolution {
                parents: [ClauseId(record.parents[0]), ClauseId(record.parents[1])],
                positions: [record.positions[0], record.positions[1]],
            })
        }
        "factoring" => {
            if record.parents.len() != 1 || record.positions.len() != 2 {
                return Err(bad(format!(
                    "factoring record {} needs 1 parent and 2 positions",
                    record.id
                )));
            }
            Ok(Origin::Factoring {
                parent: ClauseId(record.parents[0]),
                positions: [record.positions[0], record.positions[1]],
            })
        }
        other => Err(bad(format!("unknown rule `{other}`"))),
    }
}

/// Pretty, human-readable proof listing.
pub fn format_proof(graph: &DerivationGraph, symbols: &SymbolTable) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for clause in graph.proof_clauses() {
        let provenance = match &clause.origin {
            Origin::Resolution { parents, positions } => format!(
                "resolution({},{} at {},{})",
                parents[0], parents[1], positions[0], positions[1]
            ),
            Origin::Factoring { parent, positions } => {
                format!("factoring({} at {},{})", parent, positions[0], positions[1])
            }
            other => other.rule_name().to_string(),
        };
        let _ = writeln!(
            out,
            "[{}] {}  <- {}",
            clause.id,
            format_clause(clause, symbols),
            provenance
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::{Literal, SymbolKind, Term};

    /// Two-step refutation of {p(a), ~p(X)}.
    fn tiny_refutation() -> (DerivationGraph, SymbolTable) {
        let mut symbols = SymbolTable::new();
        let p = symbols.intern("p", 1, SymbolKind::Predicate).unwrap();
        let a = symbols.intern("a", 0, SymbolKind::Function).unwrap();
        let c0 = Clause::new(
            ClauseId(0),
            vec![Literal::new(true, Term::app(p, vec![Term::constant(a)]))],
            Origin::Axiom,
        );
        let c1 = Clause::new(
            ClauseId(1),
            vec![Literal::new(false, Term::app(p, vec![Term::var(0)]))],
            Origin::NegatedConjecture,
        );
        let empty = resolve(&c0, &c1, 0, 0, ClauseId(2)).unwrap().unwrap();
        assert!(empty.is_empty());
        let mut graph = DerivationGraph::new();
        graph.insert(c0).unwrap();
        graph.insert(c1).unwrap();
        graph.insert(empty).unwrap();
        graph.mark_proof(ClauseId(2));
        (graph, symbols)
    }

    #[test]
    fn verifies_two_step_refutation() {
        let (graph, _symbols) = tiny_refutation();
        let proof = graph.verify().unwrap();
        assert_eq!(proof.empty_clause, ClauseId(2));
        assert_eq!(proof.proof_ids.len(), 3);
        assert_eq!(proof.leaf_ids.len(), 2);
        assert_eq!(proof.steps_checked, 1);
    }

    #[test]
    fn tampered_conclusion_is_rejected() {
        let (mut graph, symbols) = tiny_refutation();
        // Replace the empty clause with a nonempty conclusion claiming the
        // same parents.
        let p = symbols.lookup("p").unwrap();
        let fake = Clause::from_parts(
            ClauseId(2),
            vec![Literal::new(true, Term::app(p, vec![Term::var(0)]))],
            Origin::Resolution {
                parents: [ClauseId(0), ClauseId(1)],
                positions: [0, 0],
            },
        );
        graph.nodes.insert(ClauseId(2), fake);
        let err = graph.verify().unwrap_err();
        assert!(matches!(err, LogicError::StepMismatch { id } if id == ClauseId(2)));
    }

    #[test]
    fn missing_parent_is_rejected() {
        let (mut graph, _symbols) = tiny_refutation();
        graph.nodes.remove(&ClauseId(0));
        let err = graph.verify().unwrap_err();
        assert!(matches!(err, LogicError::MissingParent { .. }));
    }

    #[test]
    fn cycle_is_rejected() {
        let (mut graph, _symbols) = tiny_refutation();
        // Rewire clause 0 to descend from the empty clause.
        let mut c0 = graph.nodes[&ClauseId(0)].clone();
        c0.origin = Origin::Factoring {
            parent: ClauseId(2),
            positions: [0, 1],
        };
        graph.nodes.insert(ClauseId(0), c0);
        let err = graph.verify().unwrap_err();
        assert!(matches!(err, LogicError::Cycle { .. }));
    }

    #[test]
    fn jsonl_roundtrip_preserves_verification() {
        let (graph, symbols) = tiny_refutation();
        let text = graph.to_jsonl(&symbols);
        let (loaded, _syms) = DerivationGraph::from_jsonl(&text).unwrap();
        assert_eq!(loaded.len(), graph.len());
        assert_eq!(loaded.proof_ids(), graph.proof_ids());
        let proof = loaded.verify().unwrap();
        assert_eq!(proof.proof_ids.len(), 3);
    }

    #[test]
    fn no_empty_clause_reported() {
        let mut symbols = SymbolTable::new();
        let p = symbols.intern("p", 0, SymbolKind::Predicate).unwrap();
        let mut graph = DerivationGraph::new();
        graph
            .insert(Clause::new(
                ClauseId(0),
                vec![Literal::new(true, Term::constant(p))],
                Origin::Axiom,
            ))
            .unwrap();
        assert!(matches!(graph.verify(), Err(LogicError::NoEmptyClause)));
    }
}
