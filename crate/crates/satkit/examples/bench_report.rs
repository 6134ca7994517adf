//! Corpus benchmark: baseline strategy versus a restarting challenger.
//!
//! Generates a small mixed corpus, runs two strategies over it in
//! parallel, verifies and stores every refutation, and prints the
//! solved-count comparison table including how many extra problems the
//! challenger closed.

use std::error::Error;

use satkit::harness::generate::{chain, coloring_cycle, pigeonhole, write_suite, ChainSpec};
use satkit::harness::{bench, parse_strategy, report, report_table, BenchConfig, RunSettings};
use satkit::saturation::ProofStatus;

fn main() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let mut corpus = vec![
        pigeonhole(2),
        pigeonhole(3),
        coloring_cycle(3),
        coloring_cycle(5),
    ];
    for (length, distractors) in [(4, 3), (6, 5)] {
        corpus.push(chain(
            ChainSpec {
                length,
                distractors,
                distractor_length: 4,
            },
            0,
        ));
    }
    let files = write_suite(dir.path(), &corpus)?;
    println!("corpus: {} problems", files.len());

    let baseline = "single@100";
    let challenger = "leapfrog@40-80-320";
    let proof_dir = dir.path().join("proofs");
    let cfg = BenchConfig {
        strategies: vec![
            (baseline.to_string(), parse_strategy(baseline)?),
            (challenger.to_string(), parse_strategy(challenger)?),
        ],
        settings: RunSettings::default(),
        workers: 4,
        proof_dir: Some(proof_dir),
    };
    let records = bench(&files, &cfg)?;
    assert_eq!(records.len(), files.len() * 2);

    println!("{:<24} {:<20} {:<14} {:>9} {:>8}", "problem", "strategy", "status", "processed", "ms");
    for r in &records {
        println!(
            "{:<24} {:<20} {:<14} {:>9} {:>8}",
            r.problem,
            r.strategy,
            format!("{:?}", r.status),
            r.processed,
            r.wall_ms
        );
        // Refutations always come with a stored, already-verified proof.
        assert_eq!(
            r.proof_path.is_some(),
            r.status == ProofStatus::Unsatisfiable
        );
    }

    let summary = report(&records, baseline, challenger)?;
    println!("{}", report_table(&summary));
    let best = summary
        .per_strategy
        .iter()
        .map(|(_, n)| *n)
        .max()
        .unwrap_or(0);
    assert!(summary.union_count >= best, "union covers every strategy");
    Ok(())
}
