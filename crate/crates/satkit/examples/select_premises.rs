//! Premise selection against the negated conjecture.
//!
//! Trains a small interaction scorer on easy chain refutations, then
//! scores the axioms of a distractor-heavy chain problem against its
//! conjecture. Sweeping the standard probability thresholds shows the
//! kept set shrinking as the bar rises; `premise_select` additionally
//! guarantees the conjecture clauses always survive.

use std::error::Error;

use satkit::harness::generate::{chain, write_suite, ChainSpec};
use satkit::harness::{extract_training, train_from_derivations, TrainPipelineConfig};
use satkit::logic::tptp::{format_clause, parse_tptp_cnf};
use satkit::logic::Origin;
use satkit::premise::{
    apply_policy, premise_select, score_premises, SelectionPolicy, DEFAULT_THRESHOLDS,
};
use satkit::saturation::{SaturationLimit, Selector};
use satkit::scorer::Arch;

fn main() -> Result<(), Box<dyn Error>> {
    // Training corpus: six easy chains, solved and dumped as derivations.
    let dir = tempfile::tempdir()?;
    let corpus: Vec<_> = (0..6)
        .map(|i| {
            chain(
                ChainSpec {
                    length: 3 + i % 3,
                    distractors: 2,
                    distractor_length: 3,
                },
                i,
            )
        })
        .collect();
    let files = write_suite(dir.path(), &corpus)?;
    let summary = extract_training(
        &files,
        dir.path(),
        SaturationLimit::processed(400),
        &Selector::default(),
        0,
        50,
    )?;
    let derivations: Vec<std::path::PathBuf> = summary
        .files
        .iter()
        .filter(|p| p.ends_with(".derivation.jsonl"))
        .map(std::path::PathBuf::from)
        .collect();
    println!(
        "training corpus: {} solved problems, {} positive / {} negative pairs",
        summary.solved, summary.positive_pairs, summary.negative_pairs
    );

    let cfg = TrainPipelineConfig {
        arch: Arch::Arch2,
        lr: 1.0,
        epochs: 80,
        neg_ratio: 2,
        ..TrainPipelineConfig::default()
    };
    let (model, report) = train_from_derivations(&derivations, &cfg)?;
    println!(
        "scorer trained: loss {:.4} -> {:.4}, train AUC {:.3}",
        report.initial_loss, report.final_loss, report.train_auc
    );

    // Target: a chain buried under distractor relations.
    let generated = chain(
        ChainSpec {
            length: 4,
            distractors: 6,
            distractor_length: 4,
        },
        99,
    );
    let problem = parse_tptp_cnf(&generated.text)?;
    println!(
        "target {}: {} axioms, {} conjecture clauses",
        generated.stem,
        problem.axioms.len(),
        problem.neg_conjecture.len()
    );

    let scored = score_premises(
        &problem.axioms,
        &problem.neg_conjecture,
        &problem.symbols,
        &model,
    );
    let mut ranked: Vec<_> = scored.iter().collect();
    ranked.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    println!("top five premises by conjecture-interaction score:");
    for s in ranked.iter().take(5) {
        let clause = problem
            .axioms
            .iter()
            .find(|c| c.id.0 == s.id)
            .expect("scored id comes from the pool");
        println!(
            "  p={:.3}  {}",
            s.probability,
            format_clause(clause, &problem.symbols)
        );
    }

    // The standard threshold ladder: higher bars keep fewer clauses.
    let mut previous = usize::MAX;
    for t in DEFAULT_THRESHOLDS {
        let kept = apply_policy(&scored, SelectionPolicy::Threshold(t)).len();
        println!("  threshold {:.2}: keep {} of {}", t, kept, scored.len());
        assert!(kept <= previous, "raising the bar cannot keep more");
        previous = kept;
    }

    // Selection proper: even a brutal threshold keeps the conjecture.
    let selected = premise_select(
        &problem.axioms,
        &problem.neg_conjecture,
        &problem.symbols,
        &model,
        SelectionPolicy::Threshold(0.99),
        true,
    );
    let conjecture_kept = selected
        .iter()
        .filter(|c| c.origin == Origin::NegatedConjecture)
        .count();
    assert_eq!(conjecture_kept, problem.neg_conjecture.len());
    println!(
        "threshold 0.99 with conjecture pinning: {} clauses selected ({} conjecture)",
        selected.len(),
        conjecture_kept
    );

    // Ranking policies are exact-size: top-k keeps k.
    let top5 = apply_policy(&scored, SelectionPolicy::TopK(5));
    assert_eq!(top5.len(), 5.min(scored.len()));
    println!("top-5 ids: {:?}", top5);
    Ok(())
}
