//! The full learning loop: generate problems, prove them while recording
//! derivations, extract labeled clause pairs (parents of proof-path
//! inferences are positive), train the pairwise scorer, and check the
//! bilinear reduction on the result.
//!
//! ```bash
//! cargo run --example train_interaction_scorer
//! ```

use satkit::harness::generate::{default_suite, write_suite};
use satkit::harness::{extract_training, train_from_derivations, TrainPipelineConfig};
use satkit::saturation::{SaturationLimit, Selector};
use satkit::scorer::{score_pair, to_bilinear, Arch};

fn main() {
    let dir = tempfile::tempdir().expect("tempdir");
    let suite = default_suite();
    let files = write_suite(dir.path(), &suite).expect("suite written");
    println!("generated {} problems", files.len());

    // Solve what a budget of 800 given clauses allows, dumping a full
    // derivation per solved problem and given-clause prefixes otherwise.
    let training_dir = dir.path().join("training");
    let summary = extract_training(
        &files,
        &training_dir,
        SaturationLimit::processed(800),
        &Selector::default(),
        0,
        100,
    )
    .expect("extraction runs");
    println!(
        "solved {} / {}; {} positive pairs, {} negative pairs",
        summary.solved,
        summary.solved + summary.unsolved,
        summary.positive_pairs,
        summary.negative_pairs
    );

    let derivations: Vec<_> = summary
        .files
        .iter()
        .filter(|f| f.ends_with(".derivation.jsonl"))
        .map(std::path::PathBuf::from)
        .collect();

    // Architecture 2 scores a pair by <d_i, reverse(d_j)>; unlike the
    // symmetric architecture it can rank complementary (resolvable)
    // clauses above similar ones, which is what this label needs.
    let cfg = TrainPipelineConfig {
        arch: Arch::Arch2,
        lr: 1.0,
        epochs: 150,
        neg_ratio: 2,
        ..TrainPipelineConfig::default()
    };
    let (model, report) = train_from_derivations(&derivations, &cfg).expect("training runs");
    println!(
        "trained on {} problems / {} pairs: loss {:.4} -> {:.4}, train AUC {:.3}",
        report.problems, report.pairs, report.initial_loss, report.final_loss, report.train_auc
    );

    // Both architectures reduce to a bilinear form c_i^T A c_j + b^T(c_i +
    // c_j) + c; the reduction must agree with the direct scorer exactly.
    let bilinear = to_bilinear(&model.params);
    let x: Vec<f64> = (0..model.params.d).map(|i| (i as f64 * 0.37).sin()).collect();
    let y: Vec<f64> = (0..model.params.d).map(|i| (i as f64 * 0.21).cos()).collect();
    let direct = score_pair(&x, &y, &model.params);
    let reduced = bilinear.evaluate(&x, &y);
    println!(
        "bilinear reduction check: direct {:.12}, reduced {:.12}",
        direct, reduced
    );
    assert!((direct - reduced).abs() <= 1e-9 * (1.0 + direct.abs()));

    let out = dir.path().join("model.json");
    std::fs::write(&out, model.to_json()).expect("model written");
    println!("model written to {}", out.display());
}
