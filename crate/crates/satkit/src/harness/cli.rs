//! Command-line interface.
//!
//! One subcommand per pipeline stage: `prove` (single saturation),
//! `leapfrog` and `splitmerge` (orchestrated restarts), `extract-training`
//! and `train-scorer` (learning pipeline), `cluster` and `select`
//! (standalone clustering and premise selection), `verify` (independent
//! proof checking), `bench` and `report` (strategy comparison), and
//! `generate` (benchmark corpus).
//!
//! Exit codes: 0 when the outcome is conclusive (and matches `--expect`
//! when given), 1 when the outcome is Unknown or contradicts `--expect`,
//! 2 on usage or input errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cluster::{
    fuzzy_cmeans, graph_from_l, kmeans, louvain, overlap_by_hubs, soft_clusters, Clustering,
    PointSet,
};
use crate::embedding::{embed_clauses, EmbedderConfig};
use crate::harness::{
    bench, default_model, extract_training, parse_strategy, processed_jsonl, report, report_table,
    train_from_derivations, BenchConfig, RunRecord, RunSettings, TrainPipelineConfig,
};
use crate::harness::generate::{
    self, chain, coloring_cycle, expected_status, group_theorem, pigeonhole, write_suite,
    ChainSpec, GeneratedProblem, GroupGoal,
};
use crate::logic::derivation::{format_proof, DerivationGraph};
use crate::logic::tptp::{format_clause, parse_tptp_cnf};
use crate::logic::Problem;
use crate::orchestrate::{
    leapfrog, split_merge, split_merge_portfolio, szs_line, trace_to_jsonl, ComponentSplitter,
    EngineSaturator, FinalResult, HeadSymbolSplitter, LeapfrogSchedule, ModelSplitter, Saturator,
    SelectorMode, SplitMergeConfig, SplitMethod,
};
use crate::premise::{apply_policy, premise_select, score_premises, scores_to_jsonl, SelectionPolicy};
use crate::saturation::{
    saturate, ProofStatus, SaturationLimit, SaturationOutcome, Selector,
};
use crate::scorer::{interaction_matrix, Arch, ModelFile};

#[derive(Parser, Debug)]
#[command(
    name = "satkit",
    version,
    about = "Saturation proving workbench: clause-interaction learning, clustering, and restart orchestration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one saturation loop on a TPTP CNF problem.
    Prove(ProveArgs),
    /// Restart saturation on its own processed clauses (optionally
    /// filtered by premise selection) with growing limits.
    Leapfrog(LeapfrogArgs),
    /// Saturate, split the processed set into components, run each, and
    /// merge the survivors by premise selection.
    Splitmerge(SplitmergeArgs),
    /// Run problems and dump derivations (solved) or given-clause
    /// prefixes (unsolved) as training data.
    ExtractTraining(ExtractArgs),
    /// Fit a pairwise clause scorer from derivation dumps.
    TrainScorer(TrainArgs),
    /// Cluster a problem's clauses (or exported embeddings).
    Cluster(ClusterArgs),
    /// Rank a problem's axioms against its conjecture and select premises.
    Select(SelectArgs),
    /// Check a derivation dump independently and report the proof.
    Verify(VerifyArgs),
    /// Run a directory of problems under several strategies.
    Bench(BenchArgs),
    /// Compare two strategies from a bench record file.
    Report(ReportArgs),
    /// Write benchmark problem families to a directory.
    Generate(GenerateArgs),
}

/// Entry point: parse `std::env::args`, dispatch, and return the process
/// exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Testable entry point over explicit arguments.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here with a zero exit code.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {:#}", err);
            2
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Prove(args) => cmd_prove(args),
        Command::Leapfrog(args) => cmd_leapfrog(args),
        Command::Splitmerge(args) => cmd_splitmerge(args),
        Command::ExtractTraining(args) => cmd_extract(args),
        Command::TrainScorer(args) => cmd_train(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Select(args) => cmd_select(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Report(args) => cmd_report(args),
        Command::Generate(args) => cmd_generate(args),
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExpectArg {
    Unsat,
    Sat,
}

impl ExpectArg {
    fn status(self) -> ProofStatus {
        match self {
            ExpectArg::Unsat => ProofStatus::Unsatisfiable,
            ExpectArg::Sat => ProofStatus::Satisfiable,
        }
    }
}

/// Exit code for a proof run: 0 when conclusive (and matching `--expect`
/// if given), 1 otherwise.
fn status_exit(status: ProofStatus, expect: Option<ExpectArg>) -> i32 {
    match expect {
        None => {
            if status == ProofStatus::Unknown {
                1
            } else {
                0
            }
        }
        Some(e) => {
            if status == e.status() {
                0
            } else {
                1
            }
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SelectorKind {
    /// Age/weight interleaving.
    AgeWeight,
    /// Model-scored batches with age interleaving.
    Scored,
}

#[derive(Args, Clone, Debug)]
struct SelectorOpts {
    /// Clause selection strategy.
    #[arg(long, value_enum, default_value_t = SelectorKind::AgeWeight)]
    selector: SelectorKind,
    /// Pick cycle AGE:OTHER (weight picks, or scored picks).
    #[arg(long, default_value = "1:4")]
    ratio: String,
    /// Multiplicative weight jitter in [0, 1); makes trajectories
    /// seed-dependent.
    #[arg(long, default_value_t = 0.2)]
    jitter: f64,
    /// Scored selector: processed clauses forming the scoring context.
    #[arg(long, default_value_t = 32)]
    context_size: usize,
    /// Scored selector: waiting clauses scored per batch.
    #[arg(long, default_value_t = 16)]
    query_size: usize,
    /// Scored selector: context slides to the most recent processed
    /// clauses instead of the earliest.
    #[arg(long)]
    sliding_context: bool,
}

impl SelectorOpts {
    fn build(&self, model: Option<&ModelFile>) -> anyhow::Result<Selector> {
        let ratio = parse_ratio(&self.ratio)?;
        let selector = match self.selector {
            SelectorKind::AgeWeight => Selector::AgeWeight {
                ratio,
                jitter: self.jitter,
            },
            SelectorKind::Scored => {
                let model = model.ok_or_else(|| {
                    anyhow::anyhow!("--selector scored needs --model (or SATKIT_MODEL)")
                })?;
                Selector::Scored {
                    model: model.clone(),
                    context_size: self.context_size,
                    query_size: self.query_size,
                    age_interleave: ratio,
                    sliding_context: self.sliding_context,
                }
            }
        };
        selector.validate().map_err(|e| anyhow::anyhow!(e))?;
        Ok(selector)
    }
}

fn parse_ratio(text: &str) -> anyhow::Result<(u32, u32)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| anyhow::anyhow!("ratio `{}` is not of the form A:B", text))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn parse_policy(text: &str) -> anyhow::Result<SelectionPolicy> {
    let (kind, value) = text
        .split_once(':')
        .ok_or_else(|| anyhow::anyhow!("policy `{}` is not of the form KIND:VALUE", text))?;
    let policy = match kind {
        "topk" => SelectionPolicy::TopK(value.parse()?),
        "threshold" => SelectionPolicy::Threshold(value.parse()?),
        "fraction" => SelectionPolicy::TopFraction(value.parse()?),
        other => anyhow::bail!("unknown policy `{}` (topk, threshold, or fraction)", other),
    };
    policy.validate().map_err(|e| anyhow::anyhow!(e))?;
    Ok(policy)
}

#[derive(Args, Clone, Debug)]
struct ModelOpt {
    /// Scorer model JSON; defaults to the SATKIT_MODEL environment
    /// variable when set.
    #[arg(long, env = "SATKIT_MODEL")]
    model: Option<PathBuf>,
}

impl ModelOpt {
    fn load(&self) -> anyhow::Result<Option<ModelFile>> {
        match &self.model {
            None => Ok(None),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))?;
                let model = ModelFile::from_json(&text)
                    .map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))?;
                Ok(Some(model))
            }
        }
    }

    fn load_required(&self) -> anyhow::Result<ModelFile> {
        self.load()?
            .ok_or_else(|| anyhow::anyhow!("this command needs --model (or SATKIT_MODEL)"))
    }
}

fn load_problem(path: &Path) -> anyhow::Result<Problem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))?;
    parse_tptp_cnf(&text).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))
}

/// Expand files and directories into a sorted list of files with the
/// given extension suffix.
fn expand_inputs(inputs: &[PathBuf], suffix: &str) -> anyhow::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            for entry in std::fs::read_dir(input)? {
                let path = entry?.path();
                if path.is_file() && path.to_string_lossy().ends_with(suffix) {
                    files.push(path);
                }
            }
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    if files.is_empty() {
        anyhow::bail!("no input files matching *{} found", suffix);
    }
    Ok(files)
}

// ---------------------------------------------------------------- prove

#[derive(Args, Debug)]
struct ProveArgs {
    /// Problem file (TPTP CNF subset).
    file: PathBuf,
    /// Stop after this many processed (given) clauses.
    #[arg(long, default_value_t = 1000)]
    processed_limit: usize,
    /// Optional wall-clock cutoff in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[command(flatten)]
    selector: SelectorOpts,
    #[command(flatten)]
    model: ModelOpt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expected outcome; the exit code reports a mismatch.
    #[arg(long, value_enum)]
    expect: Option<ExpectArg>,
    /// Write the full derivation graph here (JSON lines).
    #[arg(long)]
    derivation_out: Option<PathBuf>,
    /// Write processed clauses in pick order here (JSON lines).
    #[arg(long)]
    processed_out: Option<PathBuf>,
    /// Print the refutation steps when one is found.
    #[arg(long)]
    print_proof: bool,
    /// Machine-readable JSON summary on stdout.
    #[arg(long)]
    json: bool,
}

fn cmd_prove(args: ProveArgs) -> anyhow::Result<i32> {
    let model = args.model.load()?;
    let selector = args.selector.build(model.as_ref())?;
    let problem = load_problem(&args.file)?;
    let mut limit = SaturationLimit::processed(args.processed_limit);
    if let Some(seconds) = args.timeout {
        limit = limit.with_seconds(seconds);
    }
    let outcome: SaturationOutcome = saturate(&problem, limit, &selector, args.seed);
    let mut graph = outcome.derivation;
    if outcome.status == ProofStatus::Unsatisfiable {
        let empty = graph.find_empty().expect("refutation recorded");
        graph.mark_proof(empty);
        graph.verify().map_err(|e| anyhow::anyhow!("internal proof check failed: {}", e))?;
    }
    if let Some(path) = &args.derivation_out {
        std::fs::write(path, graph.to_jsonl(&problem.symbols))?;
    }
    if let Some(path) = &args.processed_out {
        std::fs::write(
            path,
            processed_jsonl(&outcome.processed, &problem.symbols, outcome.processed.len()),
        )?;
    }
    if args.json {
        let proof = (outcome.status == ProofStatus::Unsatisfiable).then(|| {
            let checked = graph.verify().expect("verified above");
            serde_json::json!({
                "empty_clause": checked.empty_clause,
                "proof_clauses": checked.proof_ids.len(),
                "leaves": checked.leaf_ids.iter().copied().collect::<Vec<_>>(),
                "steps_checked": checked.steps_checked,
            })
        });
        println!(
            "{}",
            serde_json::json!({
                "status": outcome.status,
                "stop": outcome.stop,
                "processed": outcome.processed.len(),
                "stats": outcome.stats,
                "proof": proof,
            })
        );
    } else {
        println!("{}", szs_line(outcome.status));
        println!(
            "processed {} clauses (limit {}), stop: {:?}",
            outcome.processed.len(),
            args.processed_limit,
            outcome.stop
        );
        let s = &outcome.stats;
        println!(
            "picked {}, generated {}, forward-subsumed {}, tautologies {}, duplicates {}",
            s.picked, s.generated, s.forward_subsumed, s.tautologies_dropped, s.duplicates_dropped
        );
        if outcome.status == ProofStatus::Unsatisfiable {
            let checked = graph.verify().expect("verified above");
            println!(
                "proof: {} clauses over {} leaves, {} steps checked",
                checked.proof_ids.len(),
                checked.leaf_ids.len(),
                checked.steps_checked
            );
            if args.print_proof {
                print!("{}", format_proof(&graph, &problem.symbols));
            }
        }
    }
    Ok(status_exit(outcome.status, args.expect))
}

// ------------------------------------------------------------- leapfrog

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    /// Carry the processed set into the next restart unchanged.
    Passthrough,
    /// Premise-select the processed set against the conjecture.
    Select,
}

#[derive(Args, Debug)]
struct LeapfrogArgs {
    file: PathBuf,
    /// Per-iteration processed limits; the last one repeats.
    #[arg(long, value_delimiter = ',', default_value = "300,500,2000")]
    limits: Vec<usize>,
    /// Iteration count (defaults to the number of limits).
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Passthrough)]
    mode: ModeArg,
    /// Selection policy for --mode select (topk:K, threshold:T, fraction:F).
    #[arg(long, default_value = "threshold:0.5")]
    policy: String,
    /// Union the original clause set into every restart.
    #[arg(long)]
    carry_initial: bool,
    #[command(flatten)]
    selector: SelectorOpts,
    #[command(flatten)]
    model: ModelOpt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    expect: Option<ExpectArg>,
    /// Write the orchestration trace here (JSON lines).
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Write the merged derivation graph here (JSON lines).
    #[arg(long)]
    derivation_out: Option<PathBuf>,
    #[arg(long)]
    print_proof: bool,
    #[arg(long)]
    json: bool,
}

fn cmd_leapfrog(args: LeapfrogArgs) -> anyhow::Result<i32> {
    let model = args.model.load()?;
    let selector = args.selector.build(model.as_ref())?;
    let problem = load_problem(&args.file)?;
    let mode = match args.mode {
        ModeArg::Passthrough => SelectorMode::PassThrough,
        ModeArg::Select => {
            if model.is_none() {
                anyhow::bail!("--mode select needs --model (or SATKIT_MODEL)");
            }
            SelectorMode::PremiseSelect(parse_policy(&args.policy)?)
        }
    };
    if args.limits.is_empty() || args.limits.contains(&0) {
        anyhow::bail!("every limit must be at least 1");
    }
    let sched = LeapfrogSchedule {
        limits: args
            .limits
            .iter()
            .map(|&l| SaturationLimit::processed(l))
            .collect(),
        iteration_limit: args.iterations.unwrap_or(args.limits.len()),
        mode,
        carry_initial: args.carry_initial,
    };
    let mut saturator = EngineSaturator { selector };
    let result = leapfrog(&problem, &sched, &mut saturator, model.as_ref(), args.seed);
    finish_orchestrated(
        &problem,
        &result,
        args.trace_out.as_deref(),
        args.derivation_out.as_deref(),
        args.print_proof,
        args.json,
        None,
    )?;
    Ok(status_exit(result.status, args.expect))
}

// ----------------------------------------------------------- splitmerge

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    /// Louvain communities on the thresholded interaction graph.
    Graph,
    /// Louvain with shared hub clauses added to every component.
    Hubs,
    /// k-means on interaction-matrix rows.
    Kmeans,
    /// Fuzzy c-means with soft membership cutoff (overlapping components).
    Fcm,
    /// Group clauses by their first literal's head symbol (model-free).
    Head,
}

#[derive(Args, Debug)]
struct SplitmergeArgs {
    file: PathBuf,
    /// Processed-clause limit per saturation call.
    #[arg(long, default_value_t = 300)]
    limit: usize,
    #[arg(long, default_value_t = 3)]
    iterations: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Graph)]
    method: MethodArg,
    /// Cluster count for kmeans/fcm.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Fuzzifier for fcm (> 1).
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    /// Soft-membership cutoff for fcm, in (0, 1].
    #[arg(long, default_value_t = 0.3)]
    cutoff: f64,
    /// Interaction-probability threshold for graph edges.
    #[arg(long, default_value_t = 0.5)]
    edge_threshold: f64,
    /// Soft cap on community count for graph methods (0 = uncapped).
    #[arg(long, default_value_t = 4)]
    target_k: usize,
    /// Hub fraction for --method hubs, in [0, 0.5].
    #[arg(long, default_value_t = 0.1)]
    hub_fraction: f64,
    /// Merge selection policy (topk:K, threshold:T, fraction:F).
    #[arg(long, default_value = "threshold:0.5")]
    policy: String,
    /// Try every default threshold sequentially and keep the first
    /// conclusive result.
    #[arg(long)]
    portfolio: bool,
    #[command(flatten)]
    selector: SelectorOpts,
    #[command(flatten)]
    model: ModelOpt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    expect: Option<ExpectArg>,
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long)]
    derivation_out: Option<PathBuf>,
    #[arg(long)]
    print_proof: bool,
    #[arg(long)]
    json: bool,
}

fn cmd_splitmerge(args: SplitmergeArgs) -> anyhow::Result<i32> {
    let loaded = args.model.load()?;
    let selector = args.selector.build(loaded.as_ref())?;
    let problem = load_problem(&args.file)?;
    let model = match &loaded {
        Some(m) => m.clone(),
        None => {
            if !args.json {
                eprintln!("note: no model given; using an untrained default scorer");
            }
            default_model()
        }
    };
    let target_k = (args.target_k > 0).then_some(args.target_k);
    // None means the model-free head-symbol splitter.
    let split_method = match args.method {
        MethodArg::Graph => Some(SplitMethod::Graph {
            edge_threshold: args.edge_threshold,
            target_k,
            hub_fraction: 0.0,
        }),
        MethodArg::Hubs => Some(SplitMethod::Graph {
            edge_threshold: args.edge_threshold,
            target_k,
            hub_fraction: args.hub_fraction,
        }),
        MethodArg::Kmeans => Some(SplitMethod::KMeans { k: args.k }),
        MethodArg::Fcm => Some(SplitMethod::Fcm {
            k: args.k,
            m: args.m,
            cutoff: args.cutoff,
        }),
        MethodArg::Head => None,
    };
    let cfg = SplitMergeConfig {
        limit: SaturationLimit::processed(args.limit),
        iteration_limit: args.iterations,
        merge_policy: parse_policy(&args.policy)?,
    };
    let (result, threshold) = if args.portfolio {
        let selector_for = selector.clone();
        let model_for = model.clone();
        let mut make_saturator = move || -> Box<dyn Saturator> {
            Box::new(EngineSaturator {
                selector: selector_for.clone(),
            })
        };
        let model_split = model_for.clone();
        let mut make_splitter = move || -> Box<dyn ComponentSplitter> {
            match split_method {
                Some(method) => Box::new(ModelSplitter {
                    model: model_split.clone(),
                    method,
                }),
                None => Box::new(HeadSymbolSplitter),
            }
        };
        let (result, threshold) = split_merge_portfolio(
            &problem,
            &cfg,
            &mut make_saturator,
            &mut make_splitter,
            &model,
            args.seed,
        );
        (result, threshold)
    } else {
        let mut saturator = EngineSaturator { selector };
        let mut head_splitter;
        let mut model_splitter;
        let splitter: &mut dyn ComponentSplitter = match split_method {
            Some(method) => {
                model_splitter = ModelSplitter {
                    model: model.clone(),
                    method,
                };
                &mut model_splitter
            }
            None => {
                head_splitter = HeadSymbolSplitter;
                &mut head_splitter
            }
        };
        let result = split_merge(&problem, &cfg, &mut saturator, splitter, &model, args.seed);
        (result, None)
    };
    finish_orchestrated(
        &problem,
        &result,
        args.trace_out.as_deref(),
        args.derivation_out.as_deref(),
        args.print_proof,
        args.json,
        threshold,
    )?;
    Ok(status_exit(result.status, args.expect))
}

/// Shared output handling for leapfrog and split-merge results.
fn finish_orchestrated(
    problem: &Problem,
    result: &FinalResult,
    trace_out: Option<&Path>,
    derivation_out: Option<&Path>,
    print_proof: bool,
    json: bool,
    portfolio_threshold: Option<f64>,
) -> anyhow::Result<()> {
    if let Some(path) = trace_out {
        std::fs::write(path, trace_to_jsonl(&result.trace))?;
    }
    if let Some(path) = derivation_out {
        std::fs::write(path, result.graph.to_jsonl(&problem.symbols))?;
    }
    if json {
        let proof = result.proof.as_ref().map(|p| {
            serde_json::json!({
                "empty_clause": p.empty_clause,
                "proof_clauses": p.proof_ids.len(),
                "leaves": p.leaf_ids.iter().copied().collect::<Vec<_>>(),
                "steps_checked": p.steps_checked,
            })
        });
        println!(
            "{}",
            serde_json::json!({
                "status": result.status,
                "saturate_calls": result.saturate_calls,
                "trace": result.trace,
                "proof": proof,
                "portfolio_threshold": portfolio_threshold,
            })
        );
    } else {
        println!("{}", szs_line(result.status));
        println!("saturation calls: {}", result.saturate_calls);
        if let Some(t) = portfolio_threshold {
            println!("portfolio threshold: {}", t);
        }
        for event in &result.trace {
            println!(
                "  iter {} {:?}: {} -> {} clauses{}",
                event.iteration,
                event.phase,
                event.input_size,
                event.output_size,
                match event.status {
                    Some(s) => format!(" ({:?})", s),
                    None => String::new(),
                }
            );
        }
        if let Some(p) = &result.proof {
            println!(
                "proof: {} clauses over {} leaves, {} steps checked",
                p.proof_ids.len(),
                p.leaf_ids.len(),
                p.steps_checked
            );
            if print_proof {
                print!("{}", format_proof(&result.graph, &problem.symbols));
            }
        }
    }
    Ok(())
}

// ----------------------------------------------------- extract-training

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Problem files or directories of .p files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output directory for derivation/pair/processed dumps.
    #[arg(long, default_value = "training")]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    processed_limit: usize,
    /// Given clauses kept per unsolved problem.
    #[arg(long, default_value_t = 1000)]
    keep: usize,
    #[command(flatten)]
    selector: SelectorOpts,
    #[command(flatten)]
    model: ModelOpt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn cmd_extract(args: ExtractArgs) -> anyhow::Result<i32> {
    let model = args.model.load()?;
    let selector = args.selector.build(model.as_ref())?;
    let files = expand_inputs(&args.inputs, ".p")?;
    let summary = extract_training(
        &files,
        &args.out,
        SaturationLimit::processed(args.processed_limit),
        &selector,
        args.seed,
        args.keep,
    )?;
    if args.json {
        println!("{}", serde_json::to_string(&summary)?);
    } else {
        println!(
            "{} solved, {} unsolved; {} positive and {} negative pairs",
            summary.solved, summary.unsolved, summary.positive_pairs, summary.negative_pairs
        );
        for file in &summary.files {
            println!("  {}", file);
        }
    }
    Ok(0)
}

// ----------------------------------------------------------- train-scorer

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ArchArg {
    #[value(name = "1")]
    Arch1,
    #[value(name = "2")]
    Arch2,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Derivation dumps (.derivation.jsonl) or directories of them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Where the model JSON is written.
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = ArchArg::Arch1)]
    arch: ArchArg,
    /// Scorer output dimension.
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Embedding dimension.
    #[arg(long, default_value_t = 32)]
    dim: usize,
    /// Message-passing rounds in the embedder.
    #[arg(long, default_value_t = 3)]
    layers: usize,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 40)]
    epochs: usize,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 0.0)]
    l2: f64,
    /// Negatives kept per positive (0 keeps all).
    #[arg(long, default_value_t = 4)]
    neg_ratio: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random basis seed for the fixed embedder.
    #[arg(long, default_value_t = 0)]
    embedder_seed: u64,
    #[arg(long)]
    json: bool,
}

fn cmd_train(args: TrainArgs) -> anyhow::Result<i32> {
    let files = expand_inputs(&args.inputs, ".derivation.jsonl")?;
    let cfg = TrainPipelineConfig {
        arch: match args.arch {
            ArchArg::Arch1 => Arch::Arch1,
            ArchArg::Arch2 => Arch::Arch2,
        },
        n: args.n,
        embedder: EmbedderConfig {
            layers: args.layers,
            d: args.dim,
            seed: args.embedder_seed,
        },
        lr: args.lr,
        epochs: args.epochs,
        batch: args.batch,
        l2: args.l2,
        neg_ratio: args.neg_ratio,
        seed: args.seed,
    };
    let (model, report) = train_from_derivations(&files, &cfg)?;
    std::fs::write(&args.out, model.to_json())?;
    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "model": args.out.to_string_lossy(),
                "report": report,
            })
        );
    } else {
        println!(
            "trained on {} problems, {} pairs ({} positive)",
            report.problems, report.pairs, report.positives
        );
        println!(
            "loss {:.4} -> {:.4}, train AUC {:.4}",
            report.initial_loss, report.final_loss, report.train_auc
        );
        println!("model written to {}", args.out.display());
    }
    Ok(0)
}

// --------------------------------------------------------------- cluster

#[derive(Args, Debug)]
struct ClusterArgs {
    /// Problem file (.p), or clause embeddings JSON exported with
    /// --embeddings-out.
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Graph)]
    method: MethodArg,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    #[arg(long, default_value_t = 0.3)]
    cutoff: f64,
    #[arg(long, default_value_t = 0.5)]
    edge_threshold: f64,
    /// Soft cap on community count for graph methods (0 = uncapped).
    #[arg(long, default_value_t = 0)]
    target_k: usize,
    #[arg(long, default_value_t = 0.1)]
    hub_fraction: f64,
    #[command(flatten)]
    model: ModelOpt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Export the clause embeddings as JSON keyed by clause id.
    #[arg(long)]
    embeddings_out: Option<PathBuf>,
    /// Also print the thresholded interaction graph as an edge list.
    #[arg(long)]
    edges: bool,
}

fn read_embeddings_json(path: &Path) -> anyhow::Result<(Vec<u64>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let map: std::collections::BTreeMap<String, Vec<f64>> = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))?;
    let mut entries: Vec<(u64, Vec<f64>)> = Vec::with_capacity(map.len());
    for (key, vector) in map {
        let id: u64 = key
            .parse()
            .map_err(|_| anyhow::anyhow!("embedding key `{}` is not a clause id", key))?;
        entries.push((id, vector));
    }
    entries.sort_by_key(|(id, _)| *id);
    Ok(entries.into_iter().unzip())
}

fn embeddings_json(ids: &[u64], vectors: &[Vec<f64>]) -> String {
    let map: std::collections::BTreeMap<String, &Vec<f64>> = ids
        .iter()
        .zip(vectors)
        .map(|(id, v)| (id.to_string(), v))
        .collect();
    serde_json::to_string(&map).expect("embeddings serialize")
}

fn cmd_cluster(args: ClusterArgs) -> anyhow::Result<i32> {
    if args.method == MethodArg::Head {
        anyhow::bail!("--method head is only available inside splitmerge");
    }
    let model = args.model.load()?.unwrap_or_else(default_model);
    let (ids, vectors) = if args.file.extension().is_some_and(|e| e == "json") {
        read_embeddings_json(&args.file)?
    } else {
        let problem = load_problem(&args.file)?;
        let clauses = problem.clauses();
        let embeddings = embed_clauses(
            &clauses,
            &problem.neg_conjecture,
            &problem.symbols,
            &model.embedder,
        );
        (
            embeddings.ids().iter().map(|id| id.0).collect(),
            embeddings.vectors().to_vec(),
        )
    };
    if vectors.is_empty() {
        anyhow::bail!("nothing to cluster");
    }
    if vectors[0].len() != model.params.d {
        anyhow::bail!(
            "embedding dimension {} does not match the model's {}",
            vectors[0].len(),
            model.params.d
        );
    }
    if let Some(path) = &args.embeddings_out {
        std::fs::write(path, embeddings_json(&ids, &vectors))?;
    }
    let l = interaction_matrix(&vectors, &model.params);
    let target_k = (args.target_k > 0).then_some(args.target_k);
    let clustering: Clustering = match args.method {
        MethodArg::Kmeans => {
            let ps = PointSet::from_interaction_rows(&l);
            let k = args.k.min(ps.len()).max(1);
            kmeans(&ps, k, args.seed, 200)
                .map_err(|e| anyhow::anyhow!("{}", e))?
                .0
        }
        MethodArg::Fcm => {
            let ps = PointSet::from_interaction_rows(&l);
            let k = args.k.min(ps.len()).max(1);
            let out = fuzzy_cmeans(&ps, k, args.m, args.seed)
                .map_err(|e| anyhow::anyhow!("{}", e))?;
            soft_clusters(&out.memberships, args.cutoff).map_err(|e| anyhow::anyhow!("{}", e))?
        }
        MethodArg::Graph => {
            let g = graph_from_l(&l, args.edge_threshold);
            if args.edges {
                print!("{}", g.to_edge_list());
            }
            louvain(&g, args.seed, target_k)
        }
        MethodArg::Hubs => {
            let g = graph_from_l(&l, args.edge_threshold);
            if args.edges {
                print!("{}", g.to_edge_list());
            }
            overlap_by_hubs(&g, args.hub_fraction, args.seed, target_k)
                .map_err(|e| anyhow::anyhow!("{}", e))?
        }
        MethodArg::Head => unreachable!("rejected above"),
    };
    println!("{}", clustering.to_json(&ids));
    Ok(0)
}

// ---------------------------------------------------------------- select

#[derive(Args, Debug)]
struct SelectArgs {
    /// Problem file; axioms are ranked against the negated conjecture.
    file: PathBuf,
    /// topk:K, threshold:T, or fraction:F.
    #[arg(long, default_value = "threshold:0.5")]
    policy: String,
    /// Leave the conjecture clauses out of the output.
    #[arg(long)]
    no_conjecture: bool,
    #[command(flatten)]
    model: ModelOpt,
    /// Write per-axiom scores as JSON lines.
    #[arg(long)]
    scores_out: Option<PathBuf>,
    /// Print selected clause ids as JSON instead of TPTP clauses.
    #[arg(long)]
    json: bool,
}

fn cmd_select(args: SelectArgs) -> anyhow::Result<i32> {
    let model = args.model.load_required()?;
    let policy = parse_policy(&args.policy)?;
    let problem = load_problem(&args.file)?;
    let scored = score_premises(
        &problem.axioms,
        &problem.neg_conjecture,
        &problem.symbols,
        &model,
    );
    if let Some(path) = &args.scores_out {
        std::fs::write(path, scores_to_jsonl(&scored))?;
    }
    let selected = premise_select(
        &problem.axioms,
        &problem.neg_conjecture,
        &problem.symbols,
        &model,
        policy,
        !args.no_conjecture,
    );
    if args.json {
        let ids: Vec<u64> = selected.iter().map(|c| c.id.0).collect();
        println!(
            "{}",
            serde_json::json!({
                "selected": ids,
                "pool": problem.axioms.len(),
                "kept": apply_policy(&scored, policy).len(),
            })
        );
    } else {
        for clause in &selected {
            println!("{}", format_clause(clause, &problem.symbols));
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------- verify

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Derivation dump (.derivation.jsonl).
    file: PathBuf,
    /// Print the refutation steps after checking.
    #[arg(long)]
    print_proof: bool,
    #[arg(long)]
    json: bool,
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| anyhow::anyhow!("{}: {}", args.file.display(), e))?;
    let (mut graph, symbols) = DerivationGraph::from_jsonl(&text)
        .map_err(|e| anyhow::anyhow!("{}: {}", args.file.display(), e))?;
    let Some(empty) = graph.find_empty() else {
        eprintln!("no empty clause recorded; nothing to verify");
        return Ok(1);
    };
    graph.mark_proof(empty);
    match graph.verify() {
        Ok(checked) => {
            if args.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "valid": true,
                        "empty_clause": checked.empty_clause,
                        "proof_clauses": checked.proof_ids.len(),
                        "leaves": checked.leaf_ids.iter().copied().collect::<Vec<_>>(),
                        "steps_checked": checked.steps_checked,
                    })
                );
            } else {
                println!(
                    "valid refutation: {} proof clauses, {} leaves, {} steps checked",
                    checked.proof_ids.len(),
                    checked.leaf_ids.len(),
                    checked.steps_checked
                );
                if args.print_proof {
                    print!("{}", format_proof(&graph, &symbols));
                }
            }
            Ok(0)
        }
        Err(err) => {
            if args.json {
                println!(
                    "{}",
                    serde_json::json!({ "valid": false, "error": err.to_string() })
                );
            } else {
                eprintln!("invalid derivation: {}", err);
            }
            Ok(1)
        }
    }
}

// ----------------------------------------------------------------- bench

#[derive(Args, Debug)]
struct BenchArgs {
    /// Problem files or directories of .p files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Strategy specs: single@LIMIT, leapfrog@L1-L2-.., splitmerge@LIMITxITERS.
    #[arg(long, value_delimiter = ',', default_value = "single@1000,leapfrog@300-500-2000")]
    strategies: Vec<String>,
    #[command(flatten)]
    selector: SelectorOpts,
    #[command(flatten)]
    model: ModelOpt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallel problem runners.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the records as JSON here (consumed by `report`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for refutation derivation dumps.
    #[arg(long)]
    proof_dir: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<i32> {
    let model = args.model.load()?;
    let selector = args.selector.build(model.as_ref())?;
    let files = expand_inputs(&args.inputs, ".p")?;
    let mut strategies = Vec::new();
    for spec in &args.strategies {
        let strategy = parse_strategy(spec).map_err(|e| anyhow::anyhow!(e))?;
        strategies.push((spec.clone(), strategy));
    }
    let cfg = BenchConfig {
        strategies,
        settings: RunSettings {
            selector,
            seed: args.seed,
            model,
        },
        workers: args.workers,
        proof_dir: args.proof_dir.clone(),
    };
    let records = bench(&files, &cfg)?;
    // Cross-check conclusive outcomes against generator headers.
    let mut mismatches = 0usize;
    for file in &files {
        let Ok(text) = std::fs::read_to_string(file) else {
            continue;
        };
        let Some(expected) = expected_status(&text) else {
            continue;
        };
        let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned());
        for record in records
            .iter()
            .filter(|r| Some(&r.problem) == stem.as_ref())
        {
            if record.status != ProofStatus::Unknown
                && record.status != expected.proof_status()
            {
                eprintln!(
                    "MISMATCH: {} under {} concluded {:?}, header says {}",
                    record.problem,
                    record.strategy,
                    record.status,
                    expected.as_str()
                );
                mismatches += 1;
            }
        }
    }
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&records)?)?;
    }
    if args.json {
        println!("{}", serde_json::to_string(&records)?);
    } else {
        let width = records
            .iter()
            .map(|r| r.problem.len())
            .max()
            .unwrap_or(8)
            .max("problem".len());
        println!("{:<width$}  {:<24}  {:<14}  {:>9}  {:>7}", "problem", "strategy", "status", "processed", "ms", width = width);
        for r in &records {
            println!(
                "{:<width$}  {:<24}  {:<14}  {:>9}  {:>7}",
                r.problem,
                r.strategy,
                format!("{:?}", r.status),
                r.processed,
                r.wall_ms,
                width = width
            );
        }
        let solved_by: std::collections::BTreeMap<&str, usize> = cfg
            .strategies
            .iter()
            .map(|(id, _)| {
                (
                    id.as_str(),
                    records
                        .iter()
                        .filter(|r| r.strategy == *id && r.status != ProofStatus::Unknown)
                        .count(),
                )
            })
            .collect();
        println!();
        for (id, solved) in solved_by {
            println!("{}: {} of {} conclusive", id, solved, files.len());
        }
    }
    Ok(if mismatches > 0 { 1 } else { 0 })
}

// ---------------------------------------------------------------- report

#[derive(Args, Debug)]
struct ReportArgs {
    /// Records JSON written by `bench --out`.
    records: PathBuf,
    #[arg(long)]
    baseline: String,
    #[arg(long)]
    challenger: String,
    #[arg(long)]
    json: bool,
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.records)
        .map_err(|e| anyhow::anyhow!("{}: {}", args.records.display(), e))?;
    let records: Vec<RunRecord> = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{}: {}", args.records.display(), e))?;
    for record in &records {
        record.validate().map_err(|e| anyhow::anyhow!(e))?;
    }
    let rep = report(&records, &args.baseline, &args.challenger)
        .map_err(|e| anyhow::anyhow!(e))?;
    if args.json {
        println!("{}", serde_json::to_string(&rep)?);
    } else {
        print!("{}", report_table(&rep));
    }
    Ok(0)
}

// -------------------------------------------------------------- generate

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    /// The default mixed suite.
    All,
    Pigeonhole,
    Coloring,
    Group,
    Chain,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::All)]
    family: FamilyArg,
    /// Output directory for .p files.
    #[arg(long, default_value = "problems")]
    out: PathBuf,
    /// Size parameters: holes for pigeonhole, cycle lengths for coloring.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Distractor count (group axioms or chain relations).
    #[arg(long)]
    distractors: Option<usize>,
    /// Target chain length for the chain family.
    #[arg(long, default_value_t = 4)]
    chain_length: usize,
    /// Links per distractor chain.
    #[arg(long, default_value_t = 4)]
    distractor_length: usize,
    /// Instances per configuration (chain family).
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    json: bool,
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<i32> {
    let problems: Vec<GeneratedProblem> = match args.family {
        FamilyArg::All => generate::default_suite(),
        FamilyArg::Pigeonhole => {
            let sizes = if args.sizes.is_empty() {
                vec![1, 2, 3]
            } else {
                args.sizes.clone()
            };
            sizes.into_iter().map(pigeonhole).collect()
        }
        FamilyArg::Coloring => {
            let sizes = if args.sizes.is_empty() {
                vec![3, 4, 5, 6, 7, 8]
            } else {
                args.sizes.clone()
            };
            sizes.into_iter().map(coloring_cycle).collect()
        }
        FamilyArg::Group => {
            let counts = match args.distractors {
                Some(d) => vec![d],
                None => vec![0, 2],
            };
            counts
                .into_iter()
                .flat_map(|d| {
                    [
                        group_theorem(GroupGoal::RightIdentity, d),
                        group_theorem(GroupGoal::RightInverse, d),
                    ]
                })
                .collect()
        }
        FamilyArg::Chain => {
            let spec = ChainSpec {
                length: args.chain_length,
                distractors: args.distractors.unwrap_or(3),
                distractor_length: args.distractor_length,
            };
            (0..args.count.max(1)).map(|i| chain(spec, i)).collect()
        }
    };
    let paths = write_suite(&args.out, &problems)?;
    if args.json {
        let list: Vec<String> = paths
            .iter()
            .map(|p| p.to_string_lossy().into_owned())
            .collect();
        println!("{}", serde_json::to_string(&list)?);
    } else {
        for path in &paths {
            println!("{}", path.display());
        }
    }
    Ok(0)
}
