//! Round-trip a derivation through its JSON-lines dump and show that the
//! independent checker accepts the genuine proof but rejects a tampered
//! one.
//!
//! ```bash
//! cargo run --example verify_proof
//! ```

use satkit::logic::derivation::DerivationGraph;
use satkit::logic::tptp::parse_tptp_cnf;
use satkit::saturation::{saturate, ProofStatus, SaturationLimit, Selector};

const PROBLEM: &str = "
cnf(left, axiom, (p(X) | q(X))).
cnf(no_p, axiom, ~p(a)).
cnf(no_q, axiom, ~q(a)).
";

fn main() {
    let problem = parse_tptp_cnf(PROBLEM).expect("problem parses");
    let outcome = saturate(
        &problem,
        SaturationLimit::processed(50),
        &Selector::default(),
        0,
    );
    assert_eq!(outcome.status, ProofStatus::Unsatisfiable);

    let mut graph = outcome.derivation;
    let empty = graph.find_empty().expect("refutation recorded");
    graph.mark_proof(empty);

    // Serialize the full derivation (dead ends included) and reload it.
    let dump = graph.to_jsonl(&problem.symbols);
    println!("derivation dump: {} lines", dump.lines().count());
    let (mut reloaded, _symbols) = DerivationGraph::from_jsonl(&dump).expect("dump parses");
    let empty = reloaded.find_empty().expect("empty clause survives");
    reloaded.mark_proof(empty);
    let checked = reloaded.verify().expect("reloaded proof verifies");
    println!(
        "reloaded proof verifies: {} steps re-executed, leaves {:?}",
        checked.steps_checked,
        checked.leaf_ids.iter().map(|id| id.0).collect::<Vec<_>>()
    );

    // Corrupt one clause body; the checker re-derives every step, so the
    // edit cannot slip through.
    let tampered_text = dump.replacen("q(a)", "q(b)", 1);
    let (mut tampered, _) = DerivationGraph::from_jsonl(&tampered_text).expect("still parses");
    let empty = tampered.find_empty().expect("empty clause still there");
    tampered.mark_proof(empty);
    match tampered.verify() {
        Ok(_) => unreachable!("tampering must be caught"),
        Err(err) => println!("tampered dump rejected: {}", err),
    }
}
