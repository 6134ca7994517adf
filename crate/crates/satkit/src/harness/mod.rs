//! Benchmark runner, training-data extraction, and comparison reports.
//!
//! The pieces here glue the prover, the orchestrators, and the scorer into
//! file-level pipelines: run a directory of problems under several
//! strategies ([`bench`]), dump derivations and labeled pairs for training
//! ([`extract_training`]), fit a scorer from those dumps
//! ([`train_from_derivations`]), and compare strategies by solved-set
//! algebra ([`report`]). The `cli` submodule exposes all of it as
//! subcommands; `generate` writes the benchmark corpus.

pub mod cli;
pub mod generate;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{embed_clauses, EmbedderConfig};
use crate::logic::clause::{Clause, Origin};
use crate::logic::derivation::DerivationGraph;
use crate::logic::tptp::{format_clause, parse_tptp_cnf};
use crate::logic::Problem;
use crate::orchestrate::{
    leapfrog, split_merge, ComponentSplitter, EngineSaturator, HeadSymbolSplitter,
    LeapfrogSchedule, ModelSplitter, Phase, SelectorMode, SplitMergeConfig, SplitMethod,
};
use crate::premise::SelectionPolicy;
use crate::saturation::{
    saturate, ProofStatus, SaturationLimit, SaturationOutcome, Selector,
};
use crate::scorer::{
    auc, extract_pairs, resolve_pairs, score_pair, subsample_negatives, train, Arch, IndexPair,
    ModelFile, TrainConfig,
};

/// One benchmark measurement: a problem run under one strategy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub strategy: String,
    pub status: ProofStatus,
    pub processed: usize,
    pub wall_ms: u64,
    /// Written derivation containing the refutation; present iff the
    /// status is Unsatisfiable and a proof directory was configured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof_path: Option<String>,
}

impl RunRecord {
    /// A proof path may accompany only an Unsatisfiable record.
    pub fn validate(&self) -> Result<(), String> {
        if self.proof_path.is_some() && self.status != ProofStatus::Unsatisfiable {
            return Err(format!(
                "{} / {}: proof path on a {:?} record",
                self.problem, self.strategy, self.status
            ));
        }
        Ok(())
    }
}

/// A benchmark strategy, parsed from a spec string which doubles as the
/// strategy id in records and reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// `single@LIMIT`: one saturation run with a processed-clause limit.
    Single { limit: usize },
    /// `leapfrog@L1-L2-..`: restart schedule, one iteration per limit,
    /// carrying the processed set over verbatim.
    Leapfrog { limits: Vec<usize> },
    /// `splitmerge@LIMITxITERS`: split-and-merge rounds with a shared
    /// per-call limit.
    SplitMerge { limit: usize, iterations: usize },
}

/// Parse a strategy spec like `single@300`, `leapfrog@100-200-400`, or
/// `splitmerge@300x3`.
pub fn parse_strategy(spec: &str) -> Result<Strategy, String> {
    let (name, rest) = spec
        .split_once('@')
        .ok_or_else(|| format!("strategy `{}` is missing an @parameter part", spec))?;
    let bad = |what: &str| format!("strategy `{}`: {}", spec, what);
    match name {
        "single" => {
            let limit: usize = rest.parse().map_err(|_| bad("limit must be an integer"))?;
            if limit == 0 {
                return Err(bad("limit must be at least 1"));
            }
            Ok(Strategy::Single { limit })
        }
        "leapfrog" => {
            let limits: Result<Vec<usize>, _> =
                rest.split('-').map(|p| p.parse::<usize>()).collect();
            let limits = limits.map_err(|_| bad("limits must be dash-separated integers"))?;
            if limits.is_empty() || limits.contains(&0) {
                return Err(bad("every limit must be at least 1"));
            }
            Ok(Strategy::Leapfrog { limits })
        }
        "splitmerge" => {
            let (limit, iters) = rest
                .split_once('x')
                .ok_or_else(|| bad("expected LIMITxITERS"))?;
            let limit: usize = limit.parse().map_err(|_| bad("limit must be an integer"))?;
            let iterations: usize =
                iters.parse().map_err(|_| bad("iterations must be an integer"))?;
            if limit == 0 || iterations == 0 {
                return Err(bad("limit and iterations must be at least 1"));
            }
            Ok(Strategy::SplitMerge { limit, iterations })
        }
        other => Err(format!(
            "unknown strategy `{}` (expected single, leapfrog, or splitmerge)",
            other
        )),
    }
}

/// Shared knobs for running strategies over problems.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub selector: Selector,
    pub seed: u64,
    /// Scorer used for split-merge clustering and merge selection; absent,
    /// split-merge falls back to a head-symbol splitter and an untrained
    /// default model for the merge.
    pub model: Option<ModelFile>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            selector: Selector::default(),
            seed: 0,
            model: None,
        }
    }
}

/// An untrained scorer over the default embedder, for model-free runs of
/// pipelines that structurally need one.
pub fn default_model() -> ModelFile {
    let embedder = EmbedderConfig::default();
    ModelFile {
        params: crate::scorer::ScorerParams::init(Arch::Arch1, 16, embedder.d, 0),
        embedder,
    }
}

/// Outcome of one strategy run, reduced to what records and proof files
/// need.
pub struct StrategyOutcome {
    pub status: ProofStatus,
    /// Total clauses processed across every saturation call.
    pub processed: usize,
    /// Full derivation graph (merged across iterations for orchestrated
    /// strategies), with the proof marked when status is Unsatisfiable.
    pub graph: DerivationGraph,
}

/// Run one strategy on a parsed problem.
pub fn run_strategy(
    problem: &Problem,
    strategy: &Strategy,
    settings: &RunSettings,
) -> StrategyOutcome {
    match strategy {
        Strategy::Single { limit } => {
            let outcome: SaturationOutcome = saturate(
                problem,
                SaturationLimit::processed(*limit),
                &settings.selector,
                settings.seed,
            );
            let mut graph = outcome.derivation;
            if outcome.status == ProofStatus::Unsatisfiable {
                let empty = graph.find_empty().expect("unsat run derived the empty clause");
                graph.mark_proof(empty);
            }
            StrategyOutcome {
                status: outcome.status,
                processed: outcome.processed.len(),
                graph,
            }
        }
        Strategy::Leapfrog { limits } => {
            let sched = LeapfrogSchedule {
                limits: limits.iter().map(|&l| SaturationLimit::processed(l)).collect(),
                iteration_limit: limits.len(),
                mode: SelectorMode::PassThrough,
                carry_initial: false,
            };
            let mut sat = EngineSaturator {
                selector: settings.selector.clone(),
            };
            let result = leapfrog(problem, &sched, &mut sat, settings.model.as_ref(), settings.seed);
            StrategyOutcome {
                processed: processed_from_trace(&result.trace),
                status: result.status,
                graph: result.graph,
            }
        }
        Strategy::SplitMerge { limit, iterations } => {
            let cfg = SplitMergeConfig {
                limit: SaturationLimit::processed(*limit),
                iteration_limit: *iterations,
                merge_policy: SelectionPolicy::TopFraction(0.75),
            };
            let mut sat = EngineSaturator {
                selector: settings.selector.clone(),
            };
            let owned_default;
            let model = match settings.model.as_ref() {
                Some(m) => m,
                None => {
                    owned_default = default_model();
                    &owned_default
                }
            };
            let mut head_splitter;
            let mut model_splitter;
            let splitter: &mut dyn ComponentSplitter = if settings.model.is_some() {
                model_splitter = ModelSplitter {
                    model: model.clone(),
                    method: SplitMethod::default(),
                };
                &mut model_splitter
            } else {
                head_splitter = HeadSymbolSplitter;
                &mut head_splitter
            };
            let result = split_merge(problem, &cfg, &mut sat, splitter, model, settings.seed);
            StrategyOutcome {
                processed: processed_from_trace(&result.trace),
                status: result.status,
                graph: result.graph,
            }
        }
    }
}

fn processed_from_trace(trace: &[crate::orchestrate::TraceEvent]) -> usize {
    trace
        .iter()
        .filter(|e| matches!(e.phase, Phase::Saturate | Phase::Component(_)))
        .map(|e| e.output_size)
        .sum()
}

/// File stem without extension, for output naming.
fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into())
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Benchmark a list of problem files under several strategies.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// (id, strategy) pairs; the id is the spec string verbatim.
    pub strategies: Vec<(String, Strategy)>,
    pub settings: RunSettings,
    /// Worker threads; 1 means fully sequential.
    pub workers: usize,
    /// Where refutation derivations are written (skipped when None).
    pub proof_dir: Option<PathBuf>,
}

/// Run every (problem, strategy) pair and return one record each, in
/// (file, strategy) order. Problems run in parallel when `workers` > 1;
/// records are bit-reproducible for a fixed seed, apart from wall times.
pub fn bench(files: &[PathBuf], cfg: &BenchConfig) -> anyhow::Result<Vec<RunRecord>> {
    if let Some(dir) = &cfg.proof_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut tasks: Vec<(&PathBuf, &(String, Strategy))> = Vec::new();
    for file in files {
        for pair in &cfg.strategies {
            tasks.push((file, pair));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()?;
    let records: Result<Vec<RunRecord>, anyhow::Error> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(file, (id, strategy))| run_bench_task(file, id, strategy, cfg))
            .collect()
    });
    records
}

fn run_bench_task(
    file: &Path,
    strategy_id: &str,
    strategy: &Strategy,
    cfg: &BenchConfig,
) -> anyhow::Result<RunRecord> {
    let text = std::fs::read_to_string(file)?;
    let problem = parse_tptp_cnf(&text)
        .map_err(|e| anyhow::anyhow!("{}: {}", file.display(), e))?;
    let started = Instant::now();
    let outcome = run_strategy(&problem, strategy, &cfg.settings);
    let wall_ms = started.elapsed().as_millis() as u64;
    let problem_id = stem_of(file);
    let mut proof_path = None;
    if outcome.status == ProofStatus::Unsatisfiable {
        outcome
            .graph
            .verify()
            .map_err(|e| anyhow::anyhow!("{} under {}: bad proof: {}", problem_id, strategy_id, e))?;
        if let Some(dir) = &cfg.proof_dir {
            let path = dir.join(format!(
                "{}__{}.derivation.jsonl",
                problem_id,
                sanitize(strategy_id)
            ));
            std::fs::write(&path, outcome.graph.to_jsonl(&problem.symbols))?;
            proof_path = Some(path.to_string_lossy().into_owned());
        }
    }
    let record = RunRecord {
        problem: problem_id,
        strategy: strategy_id.to_string(),
        status: outcome.status,
        processed: outcome.processed,
        wall_ms,
        proof_path,
    };
    record.validate().map_err(|e| anyhow::anyhow!(e))?;
    Ok(record)
}

/// The first `keep` processed clauses in pick order, one JSON object per
/// line with the clause id and its printed form.
pub fn processed_jsonl(
    clauses: &[Clause],
    symbols: &crate::logic::SymbolTable,
    keep: usize,
) -> String {
    let mut lines = String::new();
    for clause in clauses.iter().take(keep) {
        let line = serde_json::json!({
            "id": clause.id,
            "clause": format_clause(clause, symbols),
        });
        lines.push_str(&line.to_string());
        lines.push('\n');
    }
    lines
}

/// Summary of one `extract_training` sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ExtractSummary {
    pub solved: usize,
    pub unsolved: usize,
    pub positive_pairs: usize,
    pub negative_pairs: usize,
    pub files: Vec<String>,
}

/// For each solved problem write the full derivation and its labeled
/// parent pairs; for each unsolved problem write the first
/// `min(keep, processed)` given clauses in pick order.
pub fn extract_training(
    files: &[PathBuf],
    out_dir: &Path,
    limit: SaturationLimit,
    selector: &Selector,
    seed: u64,
    keep: usize,
) -> anyhow::Result<ExtractSummary> {
    assert!(keep >= 1, "keep must be at least 1");
    std::fs::create_dir_all(out_dir)?;
    let mut summary = ExtractSummary {
        solved: 0,
        unsolved: 0,
        positive_pairs: 0,
        negative_pairs: 0,
        files: Vec::new(),
    };
    for file in files {
        let text = std::fs::read_to_string(file)?;
        let problem = parse_tptp_cnf(&text)
            .map_err(|e| anyhow::anyhow!("{}: {}", file.display(), e))?;
        let outcome = saturate(&problem, limit, selector, seed);
        let stem = stem_of(file);
        if outcome.status == ProofStatus::Unsatisfiable {
            let mut graph = outcome.derivation;
            let empty = graph.find_empty().expect("unsat run derived the empty clause");
            graph.mark_proof(empty);
            graph.verify().map_err(|e| anyhow::anyhow!("{}: {}", stem, e))?;
            let dpath = out_dir.join(format!("{}.derivation.jsonl", stem));
            std::fs::write(&dpath, graph.to_jsonl(&problem.symbols))?;
            let pairs = extract_pairs(&graph).map_err(|e| anyhow::anyhow!("{}: {}", stem, e))?;
            let mut lines = String::new();
            for pair in &pairs {
                lines.push_str(&serde_json::to_string(pair).expect("pair serializes"));
                lines.push('\n');
            }
            let ppath = out_dir.join(format!("{}.pairs.jsonl", stem));
            std::fs::write(&ppath, lines)?;
            summary.solved += 1;
            summary.positive_pairs += pairs.iter().filter(|p| p.positive).count();
            summary.negative_pairs += pairs.iter().filter(|p| !p.positive).count();
            summary.files.push(dpath.to_string_lossy().into_owned());
            summary.files.push(ppath.to_string_lossy().into_owned());
        } else {
            let path = out_dir.join(format!("{}.processed.jsonl", stem));
            std::fs::write(
                &path,
                processed_jsonl(&outcome.processed, &problem.symbols, keep),
            )?;
            summary.unsolved += 1;
            summary.files.push(path.to_string_lossy().into_owned());
        }
    }
    Ok(summary)
}

/// Knobs for fitting a scorer from derivation dumps.
#[derive(Debug, Clone)]
pub struct TrainPipelineConfig {
    pub arch: Arch,
    pub n: usize,
    pub embedder: EmbedderConfig,
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub l2: f64,
    /// Keep at most this many negatives per positive (0 keeps all).
    pub neg_ratio: usize,
    pub seed: u64,
}

impl Default for TrainPipelineConfig {
    fn default() -> Self {
        TrainPipelineConfig {
            arch: Arch::Arch1,
            n: 16,
            embedder: EmbedderConfig::default(),
            lr: 0.05,
            epochs: 40,
            batch: 64,
            l2: 0.0,
            neg_ratio: 4,
            seed: 0,
        }
    }
}

/// What `train_from_derivations` reports alongside the model.
#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    pub problems: usize,
    pub pairs: usize,
    pub positives: usize,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub train_auc: f64,
}

/// Fit a pairwise scorer from `.derivation.jsonl` dumps: rebuild each
/// graph, embed its clauses (conjecture = negated-conjecture inputs),
/// extract labeled parent pairs, pool everything, and run minibatch SGD.
pub fn train_from_derivations(
    files: &[PathBuf],
    cfg: &TrainPipelineConfig,
) -> anyhow::Result<(ModelFile, TrainReport)> {
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut pooled: Vec<IndexPair> = Vec::new();
    let mut problems = 0usize;
    for file in files {
        let text = std::fs::read_to_string(file)?;
        let (mut graph, symbols) = DerivationGraph::from_jsonl(&text)
            .map_err(|e| anyhow::anyhow!("{}: {}", file.display(), e))?;
        let empty = graph.find_empty().ok_or_else(|| {
            anyhow::anyhow!("{}: no empty clause; not a refutation dump", file.display())
        })?;
        graph.mark_proof(empty);
        let clauses: Vec<Clause> = graph.iter().cloned().collect();
        let conjecture: Vec<Clause> = clauses
            .iter()
            .filter(|c| c.origin == Origin::NegatedConjecture)
            .cloned()
            .collect();
        let embeddings = embed_clauses(&clauses, &conjecture, &symbols, &cfg.embedder);
        let pairs = extract_pairs(&graph).map_err(|e| anyhow::anyhow!("{}: {}", file.display(), e))?;
        let pairs = if cfg.neg_ratio > 0 {
            subsample_negatives(&pairs, cfg.neg_ratio, cfg.seed)
        } else {
            pairs
        };
        let indexed = resolve_pairs(&embeddings, &pairs)
            .map_err(|e| anyhow::anyhow!("{}: {}", file.display(), e))?;
        let offset = vectors.len();
        pooled.extend(indexed.into_iter().map(|(i, j, y)| (i + offset, j + offset, y)));
        vectors.extend(embeddings.vectors().iter().cloned());
        problems += 1;
    }
    if pooled.is_empty() {
        anyhow::bail!("no training pairs found across {} file(s)", files.len());
    }
    let train_cfg = TrainConfig {
        arch: cfg.arch,
        n: cfg.n,
        lr: cfg.lr,
        epochs: cfg.epochs,
        batch: cfg.batch,
        seed: cfg.seed,
        l2: cfg.l2,
    };
    let outcome = train(&vectors, &pooled, cfg.embedder.d, &train_cfg)
        .map_err(|e| anyhow::anyhow!("training failed: {}", e))?;
    let scores: Vec<f64> = pooled
        .iter()
        .map(|&(i, j, _)| score_pair(&vectors[i], &vectors[j], &outcome.params))
        .collect();
    let labels: Vec<bool> = pooled.iter().map(|&(_, _, y)| y).collect();
    let report = TrainReport {
        problems,
        pairs: pooled.len(),
        positives: labels.iter().filter(|&&y| y).count(),
        initial_loss: *outcome.loss_trace.first().expect("trace nonempty"),
        final_loss: *outcome.loss_trace.last().expect("trace nonempty"),
        train_auc: auc(&scores, &labels),
    };
    let model = ModelFile {
        params: outcome.params,
        embedder: cfg.embedder.clone(),
    };
    Ok((model, report))
}

/// Solved-set comparison between a baseline and a challenger strategy.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub baseline: String,
    pub challenger: String,
    /// (strategy id, conclusive-outcome count) for every strategy present.
    pub per_strategy: Vec<(String, usize)>,
    pub union_count: usize,
    /// Problems the challenger concluded that the baseline did not.
    pub added_by_challenger: usize,
}

/// A record counts as solved when the run was conclusive (refutation or
/// saturation), mirroring the exit-code convention.
fn solved(status: ProofStatus) -> bool {
    status != ProofStatus::Unknown
}

/// Compare strategies over a record set. Errors when either strategy id
/// has no records.
pub fn report(records: &[RunRecord], baseline: &str, challenger: &str) -> Result<Report, String> {
    let ids: BTreeSet<&str> = records.iter().map(|r| r.strategy.as_str()).collect();
    for wanted in [baseline, challenger] {
        if !ids.contains(wanted) {
            return Err(format!("no records for strategy `{}`", wanted));
        }
    }
    let solved_set = |id: &str| -> BTreeSet<&str> {
        records
            .iter()
            .filter(|r| r.strategy == id && solved(r.status))
            .map(|r| r.problem.as_str())
            .collect()
    };
    let per_strategy: Vec<(String, usize)> = ids
        .iter()
        .map(|id| (id.to_string(), solved_set(id).len()))
        .collect();
    let base = solved_set(baseline);
    let chal = solved_set(challenger);
    Ok(Report {
        baseline: baseline.to_string(),
        challenger: challenger.to_string(),
        per_strategy,
        union_count: base.union(&chal).count(),
        added_by_challenger: chal.difference(&base).count(),
    })
}

/// Render a report as an aligned text table.
pub fn report_table(report: &Report) -> String {
    let mut out = String::new();
    let width = report
        .per_strategy
        .iter()
        .map(|(id, _)| id.len())
        .max()
        .unwrap_or(8)
        .max("strategy".len());
    out.push_str(&format!("{:<width$}  solved\n", "strategy", width = width));
    for (id, count) in &report.per_strategy {
        out.push_str(&format!("{:<width$}  {}\n", id, count, width = width));
    }
    out.push_str(&format!(
        "\nunion({}, {}) = {}\nadded by {} = {}\n",
        report.baseline,
        report.challenger,
        report.union_count,
        report.challenger,
        report.added_by_challenger
    ));
    out
}
