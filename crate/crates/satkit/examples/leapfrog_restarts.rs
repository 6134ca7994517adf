//! Restarted saturation on a distractor-heavy chain problem.
//!
//! A single bounded run drowns in clauses derived from the distractor
//! relations before it reaches the goal chain. Leapfrogging reruns the
//! search from the processed set of the failed round: survivors become
//! age-zero inputs, the age-weighted queue revisits them first, and the
//! refutation closes within a per-round budget that the flat run blows.

use satkit::harness::generate::{chain, ChainSpec};
use satkit::logic::tptp::parse_tptp_cnf;
use satkit::orchestrate::{
    leapfrog, szs_line, EngineSaturator, LeapfrogSchedule, Phase, SelectorMode,
};
use satkit::saturation::{saturate, ProofStatus, SaturationLimit, Selector};

fn main() {
    let generated = chain(
        ChainSpec {
            length: 6,
            distractors: 5,
            distractor_length: 4,
        },
        0,
    );
    let problem = parse_tptp_cnf(&generated.text).expect("generated problem parses");
    println!(
        "problem {}: {} axioms, {} conjecture clauses",
        generated.stem,
        problem.axioms.len(),
        problem.neg_conjecture.len()
    );

    // A flat run at the per-round budget stalls.
    let budget = 40;
    let flat = saturate(
        &problem,
        SaturationLimit::processed(budget),
        &Selector::default(),
        0,
    );
    println!(
        "flat run, {} processed: {}",
        budget,
        szs_line(flat.status)
    );
    assert_eq!(flat.status, ProofStatus::Unknown);

    // Three rounds, each restarted from the previous processed set.
    let schedule = LeapfrogSchedule {
        limits: vec![
            SaturationLimit::processed(budget),
            SaturationLimit::processed(2 * budget),
            SaturationLimit::processed(10 * budget),
        ],
        iteration_limit: 3,
        mode: SelectorMode::PassThrough,
        carry_initial: false,
    };
    let mut saturator = EngineSaturator {
        selector: Selector::default(),
    };
    let result = leapfrog(&problem, &schedule, &mut saturator, None, 0);

    println!("leapfrog rounds:");
    for event in &result.trace {
        let phase = match event.phase {
            Phase::Saturate => "saturate",
            Phase::Select => "select",
            Phase::Component(_) => "component",
            Phase::Merge => "merge",
        };
        let status = event
            .status
            .map_or(String::new(), |s| format!("  [{}]", szs_line(s)));
        println!(
            "  round {} {:<8} {:>3} -> {:<3} clauses{}",
            event.iteration, phase, event.input_size, event.output_size, status
        );
    }

    assert_eq!(result.status, ProofStatus::Unsatisfiable);
    assert!(
        result.saturate_calls >= 2,
        "the refutation should need at least one restart"
    );
    let proof = result.proof.expect("refutation carries a verified proof");
    println!(
        "{} after {} saturation calls; merged proof: {} clauses over {} input leaves, {} steps re-checked",
        szs_line(result.status),
        result.saturate_calls,
        proof.proof_ids.len(),
        proof.leaf_ids.len(),
        proof.steps_checked
    );
}
