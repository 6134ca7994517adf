//! Parse a small TPTP CNF problem, saturate it, and print the verified
//! refutation.
//!
//! ```bash
//! cargo run --example prove_basic
//! ```

use satkit::logic::derivation::format_proof;
use satkit::logic::tptp::parse_tptp_cnf;
use satkit::orchestrate::szs_line;
use satkit::saturation::{saturate, ProofStatus, SaturationLimit, Selector};

const PROBLEM: &str = "
cnf(mortal_rule, axiom, (~human(X) | mortal(X))).
cnf(socrates_is_human, axiom, human(socrates)).
cnf(goal, negated_conjecture, ~mortal(socrates)).
";

fn main() {
    let problem = parse_tptp_cnf(PROBLEM).expect("problem parses");
    println!(
        "{} axioms, {} negated-conjecture clause(s)",
        problem.axioms.len(),
        problem.neg_conjecture.len()
    );

    let outcome = saturate(
        &problem,
        SaturationLimit::processed(100),
        &Selector::default(),
        0,
    );
    println!("{}", szs_line(outcome.status));
    println!(
        "picked {} given clauses, generated {} resolvents",
        outcome.stats.picked, outcome.stats.generated
    );

    assert_eq!(outcome.status, ProofStatus::Unsatisfiable);
    let mut graph = outcome.derivation;
    let empty = graph.find_empty().expect("refutation recorded");
    graph.mark_proof(empty);

    // The checker re-executes every recorded inference independently of
    // the prover that produced it.
    let checked = graph.verify().expect("proof verifies");
    println!(
        "\nverified: {} proof clauses over {} input leaves\n",
        checked.proof_ids.len(),
        checked.leaf_ids.len()
    );
    print!("{}", format_proof(&graph, &problem.symbols));
}
