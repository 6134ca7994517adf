//! Benchmark problem generators.
//!
//! Four families of CNF problems in the dialect `logic::tptp` parses, each
//! written with a `% status unsat|sat` header line so benchmark runs can
//! check outcomes against the construction:
//!
//! * `pigeonhole` - PHP(n): n+1 pigeons into n holes, always unsatisfiable.
//! * `coloring` - 2-coloring of the cycle C_n, unsatisfiable iff n is odd.
//! * `group` - group-theory theorems (right identity, right inverse) from
//!   left identity, left inverse, and associativity over a product
//!   predicate; always unsatisfiable, with optional distractor axioms.
//! * `chain` - transitive reachability along an r-chain with competing
//!   distractor relations; always unsatisfiable, difficulty set by chain
//!   length and distractor count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::saturation::ProofStatus;

/// Expected outcome a generator stamps into a problem file header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedStatus {
    Unsat,
    Sat,
}

impl ExpectedStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ExpectedStatus::Unsat => "unsat",
            ExpectedStatus::Sat => "sat",
        }
    }

    pub fn proof_status(self) -> ProofStatus {
        match self {
            ExpectedStatus::Unsat => ProofStatus::Unsatisfiable,
            ExpectedStatus::Sat => ProofStatus::Satisfiable,
        }
    }
}

/// One generated problem: file stem, expected status, and TPTP CNF text.
#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub stem: String,
    pub expected: ExpectedStatus,
    pub text: String,
}

fn header(stem: &str, family: &str, expected: ExpectedStatus) -> String {
    format!(
        "% status {}\n% family {}\n% problem {}\n",
        expected.as_str(),
        family,
        stem
    )
}

/// PHP(n): pigeons 1..=n+1, holes 1..=n. Each pigeon sits somewhere; no
/// hole hosts two pigeons. The last pigeon's placement clause is the
/// negated conjecture. Unsatisfiable for every n >= 1.
pub fn pigeonhole(n: usize) -> GeneratedProblem {
    assert!(n >= 1, "pigeonhole needs at least one hole");
    let stem = format!("pigeonhole_{:02}", n);
    let mut text = header(&stem, "pigeonhole", ExpectedStatus::Unsat);
    for pigeon in 1..=n + 1 {
        let atoms: Vec<String> = (1..=n)
            .map(|hole| format!("occ_{}_{}", pigeon, hole))
            .collect();
        let role = if pigeon == n + 1 {
            "negated_conjecture"
        } else {
            "axiom"
        };
        let _ = writeln!(
            text,
            "cnf(pigeon_{}, {}, ({})).",
            pigeon,
            role,
            atoms.join(" | ")
        );
    }
    for hole in 1..=n {
        for first in 1..=n + 1 {
            for second in first + 1..=n + 1 {
                let _ = writeln!(
                    text,
                    "cnf(hole_{}_{}_{}, axiom, (~occ_{}_{} | ~occ_{}_{})).",
                    hole, first, second, first, hole, second, hole
                );
            }
        }
    }
    GeneratedProblem {
        stem,
        expected: ExpectedStatus::Unsat,
        text,
    }
}

/// 2-coloring of the cycle C_n (n >= 3): every vertex takes a color, and
/// adjacent vertices never share one. The closing edge's constraints form
/// the negated conjecture. Unsatisfiable iff n is odd.
pub fn coloring_cycle(n: usize) -> GeneratedProblem {
    assert!(n >= 3, "a cycle needs at least three vertices");
    let expected = if n % 2 == 1 {
        ExpectedStatus::Unsat
    } else {
        ExpectedStatus::Sat
    };
    let stem = format!("coloring_c{:02}", n);
    let mut text = header(&stem, "coloring", expected);
    for v in 0..n {
        let _ = writeln!(
            text,
            "cnf(vertex_{}, axiom, (col_{}_1 | col_{}_2)).",
            v, v, v
        );
    }
    for v in 0..n {
        let u = (v + 1) % n;
        let role = if u == 0 { "negated_conjecture" } else { "axiom" };
        for color in 1..=2 {
            let _ = writeln!(
                text,
                "cnf(edge_{}_{}_c{}, {}, (~col_{}_{} | ~col_{}_{})).",
                v, u, color, role, v, color, u, color
            );
        }
    }
    GeneratedProblem {
        stem,
        expected,
        text,
    }
}

/// Which group-theory theorem a `group` problem refutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupGoal {
    /// product(a, e, a)
    RightIdentity,
    /// product(a, inv(a), e)
    RightInverse,
}

/// Group-theory theorem as a refutation task: left identity, left inverse,
/// and both associativity clauses over product/3, plus `distractors`
/// irrelevant chained axioms that enlarge the search space. Always
/// unsatisfiable.
pub fn group_theorem(goal: GroupGoal, distractors: usize) -> GeneratedProblem {
    let (tag, conjecture) = match goal {
        GroupGoal::RightIdentity => ("right_identity", "~product(a, e, a)"),
        GroupGoal::RightInverse => ("right_inverse", "~product(a, inv(a), e)"),
    };
    let stem = format!("group_{}_d{:02}", tag, distractors);
    let mut text = header(&stem, "group", ExpectedStatus::Unsat);
    let _ = writeln!(text, "cnf(left_identity, axiom, product(e, X, X)).");
    let _ = writeln!(text, "cnf(left_inverse, axiom, product(inv(X), X, e)).");
    let _ = writeln!(
        text,
        "cnf(assoc_forward, axiom, (~product(X, Y, U) | ~product(Y, Z, V) | ~product(U, Z, W) | product(X, V, W)))."
    );
    let _ = writeln!(
        text,
        "cnf(assoc_backward, axiom, (~product(X, Y, U) | ~product(Y, Z, V) | ~product(X, V, W) | product(U, Z, W)))."
    );
    for k in 0..distractors {
        let _ = writeln!(
            text,
            "cnf(noise_base_{}, axiom, spin_{}(b, g(b))).",
            k, k
        );
        let _ = writeln!(
            text,
            "cnf(noise_step_{}, axiom, (~spin_{}(X, Y) | spin_{}(Y, g(Y)))).",
            k, k, k
        );
    }
    let _ = writeln!(text, "cnf(goal, negated_conjecture, {}).", conjecture);
    GeneratedProblem {
        stem,
        expected: ExpectedStatus::Unsat,
        text,
    }
}

/// Knobs for the `chain` family.
#[derive(Debug, Clone, Copy)]
pub struct ChainSpec {
    /// Number of links in the target r-chain (goal spans the whole chain).
    pub length: usize,
    /// Competing transitive relations, each with its own chain.
    pub distractors: usize,
    /// Links per distractor chain.
    pub distractor_length: usize,
}

/// Transitive-closure reachability: an r-chain c0 -> .. -> cL with
/// transitivity, asked to derive r(c0, cL), drowned in `distractors`
/// unrelated transitive relations. Always unsatisfiable; difficulty grows
/// with both the chain length and the distractor count.
pub fn chain(spec: ChainSpec, index: usize) -> GeneratedProblem {
    assert!(spec.length >= 1, "chain needs at least one link");
    let stem = format!(
        "chain_l{:02}_d{:02}_x{:02}_{:02}",
        spec.length, spec.distractors, spec.distractor_length, index
    );
    let mut text = header(&stem, "chain", ExpectedStatus::Unsat);
    let _ = writeln!(
        text,
        "cnf(r_transitive, axiom, (~r(X, Y) | ~r(Y, Z) | r(X, Z)))."
    );
    for i in 0..spec.length {
        let _ = writeln!(
            text,
            "cnf(r_link_{}, axiom, r(c{}_{}, c{}_{})).",
            i,
            index,
            i,
            index,
            i + 1
        );
    }
    for d in 0..spec.distractors {
        let _ = writeln!(
            text,
            "cnf(s{}_transitive, axiom, (~s{}(X, Y) | ~s{}(Y, Z) | s{}(X, Z))).",
            d, d, d, d
        );
        for i in 0..spec.distractor_length {
            let _ = writeln!(
                text,
                "cnf(s{}_link_{}, axiom, s{}(d{}_{}, d{}_{})).",
                d,
                i,
                d,
                d,
                i,
                d,
                i + 1
            );
        }
    }
    let _ = writeln!(
        text,
        "cnf(goal, negated_conjecture, ~r(c{}_0, c{}_{})).",
        index, index, spec.length
    );
    GeneratedProblem {
        stem,
        expected: ExpectedStatus::Unsat,
        text,
    }
}

/// The default mixed benchmark suite: pigeonhole 1..=sizes, coloring cycles
/// (alternating sat/unsat), both group theorems at increasing distractor
/// counts, and a spread of chain instances.
pub fn default_suite() -> Vec<GeneratedProblem> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(pigeonhole(n));
    }
    for n in [3, 4, 5, 6, 7, 8] {
        out.push(coloring_cycle(n));
    }
    for d in [0, 2] {
        out.push(group_theorem(GroupGoal::RightIdentity, d));
        out.push(group_theorem(GroupGoal::RightInverse, d));
    }
    for (i, (len, dis)) in [(3, 2), (4, 3), (5, 4), (6, 5)].iter().enumerate() {
        out.push(chain(
            ChainSpec {
                length: *len,
                distractors: *dis,
                distractor_length: 4,
            },
            i,
        ));
    }
    out
}

/// Write a set of generated problems under `dir` as `<stem>.p` files and
/// return the paths written.
pub fn write_suite(
    dir: &Path,
    problems: &[GeneratedProblem],
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(problems.len());
    for p in problems {
        let path = dir.join(format!("{}.p", p.stem));
        std::fs::write(&path, &p.text)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Read the `% status ...` header a generator stamped into a file.
pub fn expected_status(text: &str) -> Option<ExpectedStatus> {
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("% status ") {
            return match rest.trim() {
                "unsat" => Some(ExpectedStatus::Unsat),
                "sat" => Some(ExpectedStatus::Sat),
                _ => None,
            };
        }
        if !line.is_empty() && !line.starts_with('%') {
            break;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::tptp::parse_tptp_cnf;
    use crate::saturation::{saturate, SaturationLimit, Selector};

    fn prove(text: &str, limit: usize) -> ProofStatus {
        let problem = parse_tptp_cnf(text).expect("generated text parses");
        let outcome = saturate(
            &problem,
            SaturationLimit::processed(limit),
            &Selector::AgeWeight {
                ratio: (1, 4),
                jitter: 0.0,
            },
            0,
        );
        if outcome.status == ProofStatus::Unsatisfiable {
            outcome
                .derivation
                .verify()
                .expect("generated refutation verifies");
        }
        outcome.status
    }

    #[test]
    fn every_generated_problem_parses() {
        for p in default_suite() {
            let parsed = parse_tptp_cnf(&p.text).expect("parses");
            assert!(!parsed.neg_conjecture.is_empty(), "{} has a goal", p.stem);
            assert_eq!(expected_status(&p.text), Some(p.expected), "{}", p.stem);
        }
    }

    #[test]
    fn pigeonhole_instances_are_refutable() {
        assert_eq!(prove(&pigeonhole(1).text, 50), ProofStatus::Unsatisfiable);
        assert_eq!(prove(&pigeonhole(2).text, 400), ProofStatus::Unsatisfiable);
    }

    #[test]
    fn odd_cycles_refute_and_even_cycles_saturate() {
        assert_eq!(
            prove(&coloring_cycle(3).text, 500),
            ProofStatus::Unsatisfiable
        );
        assert_eq!(
            prove(&coloring_cycle(5).text, 2000),
            ProofStatus::Unsatisfiable
        );
        assert_eq!(prove(&coloring_cycle(4).text, 4000), ProofStatus::Satisfiable);
        assert_eq!(prove(&coloring_cycle(6).text, 8000), ProofStatus::Satisfiable);
    }

    #[test]
    fn group_theorems_are_refutable() {
        assert_eq!(
            prove(&group_theorem(GroupGoal::RightInverse, 0).text, 3000),
            ProofStatus::Unsatisfiable
        );
        assert_eq!(
            prove(&group_theorem(GroupGoal::RightIdentity, 0).text, 3000),
            ProofStatus::Unsatisfiable
        );
    }

    #[test]
    fn chains_are_refutable_and_sensitive_to_distractors() {
        let easy = chain(
            ChainSpec {
                length: 3,
                distractors: 0,
                distractor_length: 0,
            },
            0,
        );
        assert_eq!(prove(&easy.text, 200), ProofStatus::Unsatisfiable);
        let noisy = chain(
            ChainSpec {
                length: 4,
                distractors: 6,
                distractor_length: 5,
            },
            0,
        );
        assert_eq!(prove(&noisy.text, 4000), ProofStatus::Unsatisfiable);
    }

    #[test]
    fn suite_writes_to_disk_with_headers() {
        let dir = tempfile::tempdir().expect("tempdir");
        let suite = default_suite();
        let paths = write_suite(dir.path(), &suite).expect("writes");
        assert_eq!(paths.len(), suite.len());
        for (path, p) in paths.iter().zip(&suite) {
            let text = std::fs::read_to_string(path).expect("readable");
            assert_eq!(expected_status(&text), Some(p.expected));
        }
    }
}
