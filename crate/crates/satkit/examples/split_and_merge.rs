//! Split-and-merge on an odd colouring cycle.
//!
//! When the first bounded round stalls, the processed set is split into
//! components, each component saturates on its own, and the survivors are
//! merged back through premise selection for the next round. The run
//! below shows the characteristic shape: every component is satisfiable
//! in isolation, yet their merged survivors refute in the next round.

use satkit::harness::default_model;
use satkit::harness::generate::coloring_cycle;
use satkit::logic::tptp::parse_tptp_cnf;
use satkit::orchestrate::{
    split_merge, szs_line, EngineSaturator, HeadSymbolSplitter, ModelSplitter, Phase,
    SplitMergeConfig, SplitMethod,
};
use satkit::premise::SelectionPolicy;
use satkit::saturation::{ProofStatus, SaturationLimit, Selector};

fn print_trace(trace: &[satkit::orchestrate::TraceEvent]) {
    for event in trace {
        let phase = match event.phase {
            Phase::Saturate => "saturate".to_string(),
            Phase::Select => "select".to_string(),
            Phase::Component(i) => format!("component {}", i),
            Phase::Merge => "merge".to_string(),
        };
        let status = event
            .status
            .map_or(String::new(), |s| format!("  [{}]", szs_line(s)));
        println!(
            "  round {} {:<12} {:>3} -> {:<3} clauses{}",
            event.iteration, phase, event.input_size, event.output_size, status
        );
    }
}

fn main() {
    let generated = coloring_cycle(5);
    let problem = parse_tptp_cnf(&generated.text).expect("generated problem parses");
    println!(
        "problem {}: {} clauses, expected {}",
        generated.stem,
        problem.len(),
        generated.expected.as_str()
    );

    let cfg = SplitMergeConfig {
        // Small enough that the first round stalls and a split happens.
        limit: SaturationLimit::processed(40),
        iteration_limit: 3,
        merge_policy: SelectionPolicy::Threshold(0.5),
    };
    // The merge step scores clauses pairwise, so even untrained splitters
    // need a model file; an untrained default keeps the run self-contained.
    let model = default_model();

    println!("fuzzy c-means splitter (overlapping components):");
    let mut saturator = EngineSaturator {
        selector: Selector::default(),
    };
    let mut splitter = ModelSplitter {
        model: model.clone(),
        method: SplitMethod::Fcm {
            k: 3,
            m: 2.0,
            cutoff: 0.3,
        },
    };
    let result = split_merge(&problem, &cfg, &mut saturator, &mut splitter, &model, 0);
    print_trace(&result.trace);
    assert_eq!(result.status, ProofStatus::Unsatisfiable);
    let split_rounds = result
        .trace
        .iter()
        .filter(|e| matches!(e.phase, Phase::Component(_)))
        .count();
    assert!(split_rounds >= 2, "the first round should have split");
    let proof = result.proof.expect("refutation carries a verified proof");
    println!(
        "{}: proof uses {} clauses over {} leaves, {} steps re-checked",
        szs_line(result.status),
        proof.proof_ids.len(),
        proof.leaf_ids.len(),
        proof.steps_checked
    );

    println!("head-symbol splitter (structural baseline):");
    let mut saturator = EngineSaturator {
        selector: Selector::default(),
    };
    let mut splitter = HeadSymbolSplitter;
    let result = split_merge(&problem, &cfg, &mut saturator, &mut splitter, &model, 0);
    print_trace(&result.trace);
    println!("{}", szs_line(result.status));
    assert_eq!(result.status, ProofStatus::Unsatisfiable);
}
