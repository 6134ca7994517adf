//! Binary resolution, factoring, and subsumption.

use super::clause::{Clause, ClauseId, Origin};
use super::term::Literal;
use super::unify::{match_term, unify, Subst};
use super::LogicError;

/// Resolve literal `i` of `c1` against literal `j` of `c2`. The clauses are
/// renamed apart internally; the resolvent gets `new_id` and records both
/// parents with the literal positions. Returns Ok(None) when the literals
/// have equal polarity or their atoms do not unify.
pub fn resolve(
    c1: &Clause,
    c2: &Clause,
    i: usize,
    j: usize,
    new_id: ClauseId,
) -> Result<Option<Clause>, LogicError> {
    if i >= c1.len() {
        return Err(LogicError::IndexOutOfRange { index: i, len: c1.len() });
    }
    if j >= c2.len() {
        return Err(LogicError::IndexOutOfRange { index: j, len: c2.len() });
    }
    let offset = c1.max_var().map_or(0, |v| v + 1);
    let c2_lits = c2.shifted_literals(offset);
    let l1 = &c1.literals[i];
    let l2 = &c2_lits[j];
    if l1.positive == l2.positive {
        return Ok(None);
    }
    let Some(mgu) = unify(&l1.atom, &l2.atom) else {
        return Ok(None);
    };
    let mut literals: Vec<Literal> = Vec::with_capacity(c1.len() + c2.len() - 2);
    for (k, lit) in c1.literals.iter().enumerate() {
        if k != i {
            literals.push(mgu.apply_literal(lit));
        }
    }
    for (k, lit) in c2_lits.iter().enumerate() {
        if k != j {
            literals.push(mgu.apply_literal(lit));
        }
    }
    Ok(Some(Clause::new(
        new_id,
        literals,
        Origin::Resolution {
            parents: [c1.id, c2.id],
            positions: [i, j],
        },
    )))
}

/// Factor literals `i` and `j` of `c` (same polarity, unifiable atoms):
/// apply the mgu and drop literal `j`.
pub fn factor(
    c: &Clause,
    i: usize,
    j: usize,
    new_id: ClauseId,
) -> Result<Option<Clause>, LogicError> {
    if i >= c.len() {
        return Err(LogicError::IndexOutOfRange { index: i, len: c.len() });
    }
    if j >= c.len() {
        return Err(LogicError::IndexOutOfRange { index: j, len: c.len() });
    }
    if i == j {
        return Err(LogicError::FactorSameIndex { index: i });
    }
    let l1 = &c.literals[i];
    let l2 = &c.literals[j];
    if l1.positive != l2.positive {
        return Ok(None);
    }
    let Some(mgu) = unify(&l1.atom, &l2.atom) else {
        return Ok(None);
    };
    let literals: Vec<Literal> = c
        .literals
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != j)
        .map(|(_, lit)| mgu.apply_literal(lit))
        .collect();
    Ok(Some(Clause::new(
        new_id,
        literals,
        Origin::Factoring {
            parent: c.id,
            positions: [i, j],
        },
    )))
}

/// All resolvents of `c1` with `c2` over every literal pair, ids drawn
/// consecutively from `next_id`.
pub fn all_resolvents(c1: &Clause, c2: &Clause, next_id: &mut u64) -> Vec<Clause> {
    let mut out = Vec::new();
    for i in 0..c1.len() {
        for j in 0..c2.len() {
            if let Ok(Some(r)) = resolve(c1, c2, i, j, ClauseId(*next_id)) {
                *next_id += 1;
                out.push(r);
            }
        }
    }
    out
}

/// All factors of `c` over every ordered literal pair.
pub fn all_factors(c: &Clause, next_id: &mut u64) -> Vec<Clause> {
    let mut out = Vec::new();
    for i in 0..c.len() {
        for j in 0..c.len() {
            if i == j {
                continue;
            }
            if let Ok(Some(f)) = factor(c, i, j, ClauseId(*next_id)) {
                *next_id += 1;
                out.push(f);
            }
        }
    }
    out
}

/// True iff the clauses subsume each other, i.e. are equal up to variable
/// renaming (multiset inclusion both ways forces equal literal counts).
pub fn is_variant(c1: &Clause, c2: &Clause) -> bool {
    c1.len() == c2.len() && subsumes(c1, c2) && subsumes(c2, c1)
}

/// Multiset subsumption: true iff some substitution σ maps every literal of
/// `c1` onto a distinct literal of `c2` (c1σ ⊆ c2 as multisets).
pub fn subsumes(c1: &Clause, c2: &Clause) -> bool {
    if c1.len() > c2.len() {
        return false;
    }
    let mut used = vec![false; c2.len()];
    subsume_from(&c1.literals, 0, &c2.literals, &mut used, &Subst::new())
}

fn subsume_from(
    pat: &[Literal],
    k: usize,
    target: &[Literal],
    used: &mut [bool],
    subst: &Subst,
) -> bool {
    if k == pat.len() {
        return true;
    }
    let lit = &pat[k];
    for (t, tlit) in target.iter().enumerate() {
        if used[t] || tlit.positive != lit.positive {
            continue;
        }
        if let Some(next) = match_term(subst, &lit.atom, &tlit.atom) {
            used[t] = true;
            if subsume_from(pat, k + 1, target, used, &next) {
                used[t] = false;
                return true;
            }
            used[t] = false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::{SymbolKind, SymbolTable, Term};

    struct Sig {
        tab: SymbolTable,
        p: crate::logic::term::Sym,
        q: crate::logic::term::Sym,
        a: crate::logic::term::Sym,
        b: crate::logic::term::Sym,
    }

    fn sig() -> Sig {
        let mut tab = SymbolTable::new();
        let p = tab.intern("p", 1, SymbolKind::Predicate).unwrap();
        let q = tab.intern("q", 1, SymbolKind::Predicate).unwrap();
        let a = tab.intern("a", 0, SymbolKind::Function).unwrap();
        let b = tab.intern("b", 0, SymbolKind::Function).unwrap();
        Sig { tab, p, q, a, b }
    }

    fn lit(s: &Sig, positive: bool, pred: crate::logic::term::Sym, arg: Term) -> Literal {
        let _ = &s.tab;
        Literal::new(positive, Term::app(pred, vec![arg]))
    }

    #[test]
    fn resolves_to_instance() {
        // p(X) | q(X)  with  ~p(a)  gives  q(a).
        let s = sig();
        let c1 = Clause::new(
            ClauseId(1),
            vec![
                lit(&s, true, s.p, Term::var(0)),
                lit(&s, true, s.q, Term::var(0)),
            ],
            Origin::Axiom,
        );
        let c2 = Clause::new(
            ClauseId(2),
            vec![lit(&s, false, s.p, Term::constant(s.a))],
            Origin::Axiom,
        );
        // Find the p-literal index in the normalized c1.
        let i = c1.literals.iter().position(|l| l.head() == s.p).unwrap();
        let r = resolve(&c1, &c2, i, 0, ClauseId(3)).unwrap().unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.display(&s.tab).to_string(), "q(a)");
        assert_eq!(r.origin.parents(), vec![ClauseId(1), ClauseId(2)]);
    }

    #[test]
    fn resolves_complementary_units_to_empty() {
        let s = sig();
        let c1 = Clause::new(
            ClauseId(1),
            vec![lit(&s, true, s.p, Term::var(0))],
            Origin::Axiom,
        );
        let c2 = Clause::new(
            ClauseId(2),
            vec![lit(&s, false, s.p, Term::var(0))],
            Origin::Axiom,
        );
        let r = resolve(&c1, &c2, 0, 0, ClauseId(3)).unwrap().unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn same_polarity_does_not_resolve() {
        let s = sig();
        let c1 = Clause::new(
            ClauseId(1),
            vec![lit(&s, true, s.p, Term::var(0))],
            Origin::Axiom,
        );
        assert!(resolve(&c1, &c1, 0, 0, ClauseId(2)).unwrap().is_none());
    }

    #[test]
    fn index_out_of_range_is_reported() {
        let s = sig();
        let c1 = Clause::new(
            ClauseId(1),
            vec![lit(&s, true, s.p, Term::var(0))],
            Origin::Axiom,
        );
        assert!(resolve(&c1, &c1, 0, 5, ClauseId(2)).is_err());
        assert!(factor(&c1, 0, 0, ClauseId(2)).is_err());
    }

    #[test]
    fn factoring_collapses_unifiable_literals() {
        // p(X) | p(a)  factors to  p(a).
        let s = sig();
        let c = Clause::new(
            ClauseId(1),
            vec![
                lit(&s, true, s.p, Term::var(0)),
                lit(&s, true, s.p, Term::constant(s.a)),
            ],
            Origin::Axiom,
        );
        let mut next = 10;
        let fs = all_factors(&c, &mut next);
        assert!(fs
            .iter()
            .any(|f| f.len() == 1 && f.display(&s.tab).to_string() == "p(a)"));
    }

    #[test]
    fn opposite_polarity_does_not_factor() {
        let s = sig();
        let c = Clause::new(
            ClauseId(1),
            vec![
                lit(&s, true, s.p, Term::var(0)),
                lit(&s, false, s.p, Term::constant(s.a)),
            ],
            Origin::Axiom,
        );
        let i = c.literals.iter().position(|l| l.positive).unwrap();
        let j = c.literals.iter().position(|l| !l.positive).unwrap();
        assert!(factor(&c, i, j, ClauseId(2)).unwrap().is_none());
    }

    #[test]
    fn subsumption_basics() {
        let s = sig();
        // p(X) subsumes p(a) | q(b).
        let gen = Clause::new(
            ClauseId(1),
            vec![lit(&s, true, s.p, Term::var(0))],
            Origin::Axiom,
        );
        let spec = Clause::new(
            ClauseId(2),
            vec![
                lit(&s, true, s.p, Term::constant(s.a)),
                lit(&s, true, s.q, Term::constant(s.b)),
            ],
            Origin::Axiom,
        );
        assert!(subsumes(&gen, &spec));
        assert!(!subsumes(&spec, &gen));
        // p(a) does not subsume p(X): matching is one-way.
        let ground = Clause::new(
            ClauseId(3),
            vec![lit(&s, true, s.p, Term::constant(s.a))],
            Origin::Axiom,
        );
        assert!(!subsumes(&ground, &gen));
        // Reflexive.
        assert!(subsumes(&spec, &spec));
    }

    #[test]
    fn multiset_subsumption_needs_distinct_targets() {
        // p(X) | p(Y) must not subsume the single-literal clause p(a),
        // even though each pattern literal matches it individually.
        let s = sig();
        let two = Clause::new(
            ClauseId(1),
            vec![
                lit(&s, true, s.p, Term::var(0)),
                lit(&s, true, s.p, Term::var(1)),
            ],
            Origin::Axiom,
        );
        let one = Clause::new(
            ClauseId(2),
            vec![lit(&s, true, s.p, Term::constant(s.a))],
            Origin::Axiom,
        );
        assert!(!subsumes(&two, &one));
        // With two distinct ground targets it does subsume.
        let pair = Clause::new(
            ClauseId(3),
            vec![
                lit(&s, true, s.p, Term::constant(s.a)),
                lit(&s, true, s.p, Term::constant(s.b)),
            ],
            Origin::Axiom,
        );
        assert!(subsumes(&two, &pair));
    }

    #[test]
    fn variant_detection() {
        let s = sig();
        let c1 = Clause::new(
            ClauseId(1),
            vec![
                lit(&s, true, s.p, Term::var(3)),
                lit(&s, false, s.q, Term::var(3)),
            ],
            Origin::Axiom,
        );
        let c2 = Clause::new(
            ClauseId(2),
            vec![
                lit(&s, false, s.q, Term::var(8)),
                lit(&s, true, s.p, Term::var(8)),
            ],
            Origin::Axiom,
        );
        assert!(is_variant(&c1, &c2));
        let ground = Clause::new(
            ClauseId(3),
            vec![
                lit(&s, true, s.p, Term::constant(s.a)),
                lit(&s, false, s.q, Term::constant(s.a)),
            ],
            Origin::Axiom,
        );
        assert!(!is_variant(&c1, &ground));
        assert!(subsumes(&c1, &ground));
    }

    #[test]
    fn subsumption_backtracks_over_target_choice() {
        let s = sig();
        // p(X) | q(X) vs p(a) | p(b) | q(b): must map p-literal to p(b).
        let pat = Clause::new(
            ClauseId(1),
            vec![
                lit(&s, true, s.p, Term::var(0)),
                lit(&s, true, s.q, Term::var(0)),
            ],
            Origin::Axiom,
        );
        let tgt = Clause::new(
            ClauseId(2),
            vec![
                lit(&s, true, s.p, Term::constant(s.a)),
                lit(&s, true, s.p, Term::constant(s.b)),
                lit(&s, true, s.q, Term::constant(s.b)),
            ],
            Origin::Axiom,
        );
        assert!(subsumes(&pat, &tgt));
    }
}
