//! Syntactic unification and matching over terms.

use std::collections::HashMap;

use super::term::{Literal, Term};

/// A substitution from variable ids to terms. Bindings are kept fully
/// applied on lookup via path compression in `resolve`.
#[derive(Debug, Clone, Default)]
pub struct Subst {
    map: HashMap<u32, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, var: u32) -> Option<&Term> {
        self.map.get(&var)
    }

    fn bind(&mut self, var: u32, term: Term) {
        self.map.insert(var, term);
    }

    /// Follow variable bindings until a non-variable or unbound variable.
    fn resolve<'a>(&'a self, term: &'a Term) -> &'a Term {
        let mut cur = term;
        while let Term::Var(v) = cur {
            match self.map.get(v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur
    }

    /// Apply the substitution to a term, replacing bound variables
    /// recursively.
    pub fn apply(&self, term: &Term) -> Term {
        match term {
            Term::Var(v) => match self.map.get(v) {
                Some(t) => self.apply(t),
                None => term.clone(),
            },
            Term::App(sym, args) => {
                Term::App(*sym, args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    pub fn apply_literal(&self, lit: &Literal) -> Literal {
        Literal::new(lit.positive, self.apply(&lit.atom))
    }
}

/// Occurs check under the current substitution.
fn occurs(subst: &Subst, var: u32, term: &Term) -> bool {
    match subst.resolve(term) {
        Term::Var(v) => *v == var,
        Term::App(_, args) => args.iter().any(|a| occurs(subst, var, a)),
    }
}

fn unify_into(subst: &mut Subst, a: &Term, b: &Term) -> bool {
    let a = subst.resolve(a).clone();
    let b = subst.resolve(b).clone();
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), _) => {
            if occurs(subst, *x, &b) {
                false
            } else {
                subst.bind(*x, b);
                true
            }
        }
        (_, Term::Var(y)) => {
            if occurs(subst, *y, &a) {
                false
            } else {
                subst.bind(*y, a);
                true
            }
        }
        (Term::App(f, fa), Term::App(g, ga)) => {
            if f != g || fa.len() != ga.len() {
                return false;
            }
            fa.iter().zip(ga).all(|(x, y)| unify_into(subst, x, y))
        }
    }
}

/// Most general unifier of two terms, with occurs check. Returns None when
/// the terms do not unify.
pub fn unify(a: &Term, b: &Term) -> Option<Subst> {
    let mut subst = Subst::new();
    if unify_into(&mut subst, a, b) {
        Some(subst)
    } else {
        None
    }
}

/// Extend an existing substitution by unifying two more terms.
pub fn unify_with(subst: &Subst, a: &Term, b: &Term) -> Option<Subst> {
    let mut out = subst.clone();
    if unify_into(&mut out, a, b) {
        Some(out)
    } else {
        None
    }
}

/// One-way matching: find a substitution over `pattern`'s variables only
/// such that pattern[subst] == target. `target`'s variables are treated as
/// constants. Used by subsumption.
pub fn match_term(subst: &Subst, pattern: &Term, target: &Term) -> Option<Subst> {
    let mut out = subst.clone();
    if match_into(&mut out, pattern, target) {
        Some(out)
    } else {
        None
    }
}

fn match_into(subst: &mut Subst, pattern: &Term, target: &Term) -> bool {
    match pattern {
        Term::Var(v) => match subst.get(*v) {
            Some(bound) => bound == target,
            None => {
                subst.bind(*v, target.clone());
                true
            }
        },
        Term::App(f, fa) => match target {
            Term::App(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga).all(|(p, t)| match_into(subst, p, t))
            }
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::{SymbolKind, SymbolTable};

    fn syms() -> (
        SymbolTable,
        crate::logic::term::Sym,
        crate::logic::term::Sym,
        crate::logic::term::Sym,
    ) {
        let mut tab = SymbolTable::new();
        let f = tab.intern("f", 1, SymbolKind::Function).unwrap();
        let g = tab.intern("g", 2, SymbolKind::Function).unwrap();
        let a = tab.intern("a", 0, SymbolKind::Function).unwrap();
        (tab, f, g, a)
    }

    #[test]
    fn unifies_var_with_term() {
        let (_t, f, _g, a) = syms();
        let left = Term::var(0);
        let right = Term::app(f, vec![Term::constant(a)]);
        let s = unify(&left, &right).unwrap();
        assert_eq!(s.apply(&left), right);
    }

    #[test]
    fn occurs_check_rejects_cyclic() {
        let (_t, f, _g, _a) = syms();
        let left = Term::var(0);
        let right = Term::app(f, vec![Term::var(0)]);
        assert!(unify(&left, &right).is_none());
    }

    #[test]
    fn unifier_is_most_general() {
        // g(X, f(Y)) with g(f(Z), W): mgu keeps a free variable.
        let (_t, f, g, _a) = syms();
        let left = Term::app(g, vec![Term::var(0), Term::app(f, vec![Term::var(1)])]);
        let right = Term::app(g, vec![Term::app(f, vec![Term::var(2)]), Term::var(3)]);
        let s = unify(&left, &right).unwrap();
        let lhs = s.apply(&left);
        let rhs = s.apply(&right);
        assert_eq!(lhs, rhs);
        // The result must still contain variables (no over-instantiation).
        let mut vars = Vec::new();
        lhs.vars(&mut vars);
        assert!(!vars.is_empty());
    }

    #[test]
    fn chain_of_bindings_resolves() {
        let (_t, _f, g, a) = syms();
        // X = Y, Y = a, check through g wrapper.
        let left = Term::app(g, vec![Term::var(0), Term::var(1)]);
        let right = Term::app(g, vec![Term::var(1), Term::constant(a)]);
        let s = unify(&left, &right).unwrap();
        assert_eq!(s.apply(&Term::var(0)), Term::constant(a));
        assert_eq!(s.apply(&Term::var(1)), Term::constant(a));
    }

    #[test]
    fn matching_is_one_way() {
        let (_t, f, _g, a) = syms();
        let pattern = Term::app(f, vec![Term::var(0)]);
        let target = Term::app(f, vec![Term::constant(a)]);
        assert!(match_term(&Subst::new(), &pattern, &target).is_some());
        // Reverse direction must fail: target variable is a constant here.
        let s = match_term(&Subst::new(), &target, &pattern);
        assert!(s.is_none());
    }

    #[test]
    fn matching_respects_existing_bindings() {
        let (_t, _f, g, a) = syms();
        let pattern = Term::app(g, vec![Term::var(0), Term::var(0)]);
        let ok = Term::app(g, vec![Term::constant(a), Term::constant(a)]);
        let bad = Term::app(g, vec![Term::constant(a), Term::var(7)]);
        assert!(match_term(&Subst::new(), &pattern, &ok).is_some());
        assert!(match_term(&Subst::new(), &pattern, &bad).is_none());
    }
}
