//! Top-level proof search orchestration: restarted saturation with premise
//! selection between rounds (leapfrogging), and cluster-split component
//! runs with a merge phase (split-and-merge).

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::cluster::{
    fuzzy_cmeans, graph_from_l, kmeans, louvain, overlap_by_hubs, soft_clusters, Clustering,
    PointSet,
};
use crate::embedding::embed_clauses;
use crate::logic::{Clause, ClauseId, DerivationGraph, Origin, Problem, SymbolTable, VerifiedProof};
use crate::premise::{premise_select, SelectionPolicy, DEFAULT_THRESHOLDS};
use crate::saturation::{
    saturate_from, ProofStatus, SaturationLimit, SaturationOutcome, Selector,
};
use crate::scorer::{interaction_matrix, ModelFile};

/// Id range reserved for each component saturation within one split round.
const COMPONENT_ID_STRIDE: u64 = 1 << 24;

/// Anything that can run one saturation round. The engine implementation
/// wraps the real given-clause loop; tests script outcomes instead.
pub trait Saturator {
    fn saturate(
        &mut self,
        inputs: &[Clause],
        symbols: &SymbolTable,
        limit: SaturationLimit,
        seed: u64,
        first_fresh_id: Option<u64>,
    ) -> SaturationOutcome;
}

/// The real given-clause loop behind the `Saturator` interface.
pub struct EngineSaturator {
    pub selector: Selector,
}

impl Saturator for EngineSaturator {
    fn saturate(
        &mut self,
        inputs: &[Clause],
        symbols: &SymbolTable,
        limit: SaturationLimit,
        seed: u64,
        first_fresh_id: Option<u64>,
    ) -> SaturationOutcome {
        saturate_from(inputs, symbols, limit, &self.selector, seed, first_fresh_id)
    }
}

/// Scripted saturation double for control-flow tests. Each call consumes
/// the next scripted status (the last entry repeats once the script runs
/// out). Unsatisfiable entries produce a genuine refutation by resolving a
/// complementary unit pair from the inputs, so proofs still verify.
pub struct MockSaturator {
    script: Vec<ProofStatus>,
    cursor: usize,
    /// Input sizes seen, one per call.
    pub calls: Vec<usize>,
}

impl MockSaturator {
    pub fn new(script: Vec<ProofStatus>) -> MockSaturator {
        assert!(!script.is_empty(), "mock script must be nonempty");
        MockSaturator {
            script,
            cursor: 0,
            calls: Vec::new(),
        }
    }
}

impl Saturator for MockSaturator {
    fn saturate(
        &mut self,
        inputs: &[Clause],
        _symbols: &SymbolTable,
        _limit: SaturationLimit,
        _seed: u64,
        first_fresh_id: Option<u64>,
    ) -> SaturationOutcome {
        let status = self.script[self.cursor.min(self.script.len() - 1)];
        self.cursor += 1;
        self.calls.push(inputs.len());
        let max_input = inputs.iter().map(|c| c.id.0).max().unwrap_or(0);
        let mut next_id = first_fresh_id.unwrap_or(max_input + 1);
        let mut graph = DerivationGraph::new();
        for c in inputs {
            graph.insert(c.clone()).expect("unique input ids");
        }
        if status == ProofStatus::Unsatisfiable {
            let pair = complementary_unit_pair(inputs)
                .expect("mock Unsatisfiable needs a complementary unit pair in the inputs");
            let empty = crate::logic::infer::resolve(pair.0, pair.1, 0, 0, ClauseId(next_id))
                .unwrap()
                .expect("complementary units resolve");
            assert!(empty.is_empty());
            next_id += 1;
            let empty_id = empty.id;
            graph.insert(empty).unwrap();
            graph.mark_proof(empty_id);
        }
        SaturationOutcome {
            status,
            stop: match status {
                ProofStatus::Unsatisfiable => crate::saturation::StopReason::Refuted,
                ProofStatus::Satisfiable => crate::saturation::StopReason::QueueEmptied,
                ProofStatus::Unknown => crate::saturation::StopReason::ProcessedLimit,
            },
            processed: inputs.to_vec(),
            derivation: graph,
            next_id,
            stats: Default::default(),
        }
    }
}

fn complementary_unit_pair(inputs: &[Clause]) -> Option<(&Clause, &Clause)> {
    for (i, a) in inputs.iter().enumerate() {
        if a.len() != 1 {
            continue;
        }
        for b in &inputs[i + 1..] {
            if b.len() != 1 && b.len() != a.len() {
                continue;
            }
            if b.len() == 1
                && a.literals[0].positive != b.literals[0].positive
                && crate::logic::unify(&a.literals[0].atom, &b.literals[0].atom).is_some()
            {
                return Some((a, b));
            }
        }
    }
    None
}

/// How the clause set for the next iteration is chosen from the processed
/// set of this one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SelectorMode {
    /// Score-based premise selection against the conjecture.
    PremiseSelect(SelectionPolicy),
    /// Carry the processed set over unchanged.
    PassThrough,
}

/// Per-iteration limits and selection mode for leapfrogging.
#[derive(Debug, Clone)]
pub struct LeapfrogSchedule {
    /// Limit for iteration i is `limits[min(i, limits.len() - 1)]`.
    pub limits: Vec<SaturationLimit>,
    pub iteration_limit: usize,
    pub mode: SelectorMode,
    /// Also union the original clause set into every restart.
    pub carry_initial: bool,
}

impl LeapfrogSchedule {
    pub fn validate(&self) -> Result<(), String> {
        if self.limits.is_empty() {
            return Err("schedule needs at least one limit".into());
        }
        if self.iteration_limit < 1 {
            return Err("iteration limit must be >= 1".into());
        }
        if let SelectorMode::PremiseSelect(policy) = &self.mode {
            policy.validate()?;
        }
        Ok(())
    }

    /// The default restart schedule: two bounded rounds then a longer
    /// final one.
    pub fn standard(mode: SelectorMode) -> LeapfrogSchedule {
        LeapfrogSchedule {
            limits: vec![
                SaturationLimit::processed(300),
                SaturationLimit::processed(500),
                SaturationLimit::processed(2000),
            ],
            iteration_limit: 3,
            mode,
            carry_initial: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Saturate,
    Component(usize),
    Select,
    Merge,
}

/// One orchestration event, serializable as a JSON line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEvent {
    pub iteration: usize,
    pub phase: Phase,
    pub status: Option<ProofStatus>,
    pub input_size: usize,
    pub output_size: usize,
    pub elapsed_ms: f64,
}

pub fn trace_to_jsonl(trace: &[TraceEvent]) -> String {
    let mut out = String::new();
    for event in trace {
        out.push_str(&serde_json::to_string(event).expect("trace serializes"));
        out.push('\n');
    }
    out
}

/// Final outcome of an orchestrated search. The graph merges every
/// saturation round, so a refutation found in any round expands back to
/// the original input clauses.
#[derive(Debug)]
pub struct FinalResult {
    pub status: ProofStatus,
    pub proof: Option<VerifiedProof>,
    pub graph: DerivationGraph,
    pub trace: Vec<TraceEvent>,
    pub saturate_calls: usize,
}

pub fn szs_line(status: ProofStatus) -> &'static str {
    match status {
        ProofStatus::Unsatisfiable => "SZS status Unsatisfiable",
        ProofStatus::Satisfiable => "SZS status Satisfiable",
        ProofStatus::Unknown => "SZS status Unknown",
    }
}

fn dedup_by_id(clauses: Vec<Clause>) -> Vec<Clause> {
    let mut seen = std::collections::BTreeSet::new();
    clauses
        .into_iter()
        .filter(|c| seen.insert(c.id))
        .collect()
}

struct Run {
    graph: DerivationGraph,
    trace: Vec<TraceEvent>,
    calls: usize,
    started: Instant,
}

impl Run {
    fn new() -> Run {
        Run {
            graph: DerivationGraph::new(),
            trace: Vec::new(),
            calls: 0,
            started: Instant::now(),
        }
    }

    fn event(&mut self, iteration: usize, phase: Phase, status: Option<ProofStatus>, input: usize, output: usize) {
        self.trace.push(TraceEvent {
            iteration,
            phase,
            status,
            input_size: input,
            output_size: output,
            elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn finish(self, status: ProofStatus, proof: Option<VerifiedProof>) -> FinalResult {
        FinalResult {
            status,
            proof,
            graph: self.graph,
            trace: self.trace,
            saturate_calls: self.calls,
        }
    }

    fn refuted(mut self, empty_id: ClauseId) -> FinalResult {
        self.graph.mark_proof(empty_id);
        let proof = self
            .graph
            .verify()
            .expect("merged refutation must verify");
        self.finish(ProofStatus::Unsatisfiable, Some(proof))
    }
}

/// Restarted saturation: run to the limit, select the premises worth
/// keeping, and start over from the smaller set. Satisfiable is only
/// trusted from the first round (later rounds may have dropped clauses a
/// model would need).
pub fn leapfrog(
    problem: &Problem,
    sched: &LeapfrogSchedule,
    saturator: &mut dyn Saturator,
    model: Option<&ModelFile>,
    seed: u64,
) -> FinalResult {
    sched.validate().expect("leapfrog schedule");
    if matches!(sched.mode, SelectorMode::PremiseSelect(_)) {
        assert!(model.is_some(), "premise selection needs a model");
    }
    let initial = problem.clauses();
    let mut run = Run::new();
    let mut current = initial.clone();
    let mut next_fresh: Option<u64> = None;
    for iteration in 0..sched.iteration_limit {
        if current.is_empty() {
            run.event(iteration, Phase::Saturate, None, 0, 0);
            return run.finish(ProofStatus::Unknown, None);
        }
        let limit = sched.limits[iteration.min(sched.limits.len() - 1)];
        let outcome = saturator.saturate(&current, &problem.symbols, limit, seed, next_fresh);
        run.calls += 1;
        next_fresh = Some(outcome.next_id);
        run.event(
            iteration,
            Phase::Saturate,
            Some(outcome.status),
            current.len(),
            outcome.processed.len(),
        );
        let status = outcome.status;
        let empty_id = outcome.derivation.find_empty();
        let processed = outcome.processed;
        run.graph
            .merge(outcome.derivation)
            .expect("iteration graphs share only input clauses");
        match status {
            ProofStatus::Unsatisfiable => {
                return run.refuted(empty_id.expect("unsatisfiable outcome contains the empty clause"));
            }
            ProofStatus::Satisfiable => {
                let status = if iteration == 0 {
                    ProofStatus::Satisfiable
                } else {
                    ProofStatus::Unknown
                };
                return run.finish(status, None);
            }
            ProofStatus::Unknown => {
                if iteration + 1 == sched.iteration_limit {
                    return run.finish(ProofStatus::Unknown, None);
                }
                let processed_len = processed.len();
                let selected = match &sched.mode {
                    SelectorMode::PassThrough => processed,
                    SelectorMode::PremiseSelect(policy) => premise_select(
                        &processed,
                        &problem.neg_conjecture,
                        &problem.symbols,
                        model.unwrap(),
                        *policy,
                        true,
                    ),
                };
                let mut next = selected;
                if sched.carry_initial {
                    next.extend(initial.iter().cloned());
                }
                let next = dedup_by_id(next);
                run.event(iteration, Phase::Select, None, processed_len, next.len());
                current = next;
            }
        }
    }
    run.finish(ProofStatus::Unknown, None)
}

/// Splits a processed clause set into components for independent runs.
pub trait ComponentSplitter {
    fn split(&mut self, processed: &[Clause], symbols: &SymbolTable, seed: u64) -> Vec<Vec<Clause>>;
}

/// Clustering strategy over an interaction matrix of the processed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitMethod {
    /// k-means on rows of the interaction matrix.
    KMeans { k: usize },
    /// Fuzzy c-means with a membership cutoff (overlapping components).
    Fcm { k: usize, m: f64, cutoff: f64 },
    /// Thresholded interaction graph, modularity clustering, optional hub
    /// sharing and component cap.
    Graph {
        edge_threshold: f64,
        target_k: Option<usize>,
        hub_fraction: f64,
    },
}

impl Default for SplitMethod {
    fn default() -> Self {
        SplitMethod::Graph {
            edge_threshold: 0.5,
            target_k: Some(4),
            hub_fraction: 0.0,
        }
    }
}

/// Model-driven splitter: embeds the processed clauses, scores all pairs,
/// and clusters by the configured method.
pub struct ModelSplitter {
    pub model: ModelFile,
    pub method: SplitMethod,
}

impl ModelSplitter {
    fn clustering(&self, processed: &[Clause], symbols: &SymbolTable, seed: u64) -> Clustering {
        let conjecture: Vec<Clause> = processed
            .iter()
            .filter(|c| c.origin == Origin::NegatedConjecture)
            .cloned()
            .collect();
        let embeddings = embed_clauses(processed, &conjecture, symbols, &self.model.embedder);
        let vectors: Vec<Vec<f64>> = processed
            .iter()
            .map(|c| {
                embeddings
                    .get(c.id)
                    .expect("processed clause embedded")
                    .to_vec()
            })
            .collect();
        let l = interaction_matrix(&vectors, &self.model.params);
        match self.method {
            SplitMethod::KMeans { k } => {
                let ps = PointSet::from_interaction_rows(&l);
                let k = k.min(ps.len()).max(1);
                kmeans(&ps, k, seed, 200).expect("valid k").0
            }
            SplitMethod::Fcm { k, m, cutoff } => {
                let ps = PointSet::from_interaction_rows(&l);
                let k = k.min(ps.len()).max(1);
                let out = fuzzy_cmeans(&ps, k, m, seed).expect("valid fcm parameters");
                soft_clusters(&out.memberships, cutoff).expect("valid cutoff")
            }
            SplitMethod::Graph {
                edge_threshold,
                target_k,
                hub_fraction,
            } => {
                let g = graph_from_l(&l, edge_threshold);
                if hub_fraction > 0.0 {
                    overlap_by_hubs(&g, hub_fraction, seed, target_k).expect("valid hub fraction")
                } else {
                    louvain(&g, seed, target_k)
                }
            }
        }
    }
}

impl ComponentSplitter for ModelSplitter {
    fn split(&mut self, processed: &[Clause], symbols: &SymbolTable, seed: u64) -> Vec<Vec<Clause>> {
        let clustering = self.clustering(processed, symbols, seed);
        clustering
            .clusters
            .iter()
            .map(|cluster| cluster.iter().map(|&v| processed[v].clone()).collect())
            .collect()
    }
}

/// Test splitter: group clauses by the head symbol of their first literal.
pub struct HeadSymbolSplitter;

impl ComponentSplitter for HeadSymbolSplitter {
    fn split(&mut self, processed: &[Clause], _symbols: &SymbolTable, _seed: u64) -> Vec<Vec<Clause>> {
        let mut groups: std::collections::BTreeMap<u32, Vec<Clause>> =
            std::collections::BTreeMap::new();
        for c in processed {
            let key = c.literals.first().map_or(u32::MAX, |l| l.head().0);
            groups.entry(key).or_default().push(c.clone());
        }
        groups.into_values().collect()
    }
}

#[derive(Debug, Clone)]
pub struct SplitMergeConfig {
    pub limit: SaturationLimit,
    pub iteration_limit: usize,
    pub merge_policy: SelectionPolicy,
}

impl SplitMergeConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.iteration_limit < 1 {
            return Err("iteration limit must be >= 1".into());
        }
        self.merge_policy.validate()
    }
}

/// Saturate; when stuck, split the processed set into components, run each
/// independently, and merge the survivors through premise selection into
/// the next round's clause set. A refutation in any component is a global
/// refutation (components contain only input-or-derived clauses); the
/// lowest component index wins when several refute.
pub fn split_merge(
    problem: &Problem,
    cfg: &SplitMergeConfig,
    saturator: &mut dyn Saturator,
    splitter: &mut dyn ComponentSplitter,
    model: &ModelFile,
    seed: u64,
) -> FinalResult {
    cfg.validate().expect("split-merge config");
    let mut run = Run::new();
    let mut current = problem.clauses();
    let mut next_fresh: Option<u64> = None;
    for iteration in 0..cfg.iteration_limit {
        if current.is_empty() {
            run.event(iteration, Phase::Saturate, None, 0, 0);
            return run.finish(ProofStatus::Unknown, None);
        }
        let outcome = saturator.saturate(&current, &problem.symbols, cfg.limit, seed, next_fresh);
        run.calls += 1;
        run.event(
            iteration,
            Phase::Saturate,
            Some(outcome.status),
            current.len(),
            outcome.processed.len(),
        );
        let status = outcome.status;
        let empty_id = outcome.derivation.find_empty();
        let processed = outcome.processed;
        let base = outcome.next_id;
        run.graph
            .merge(outcome.derivation)
            .expect("round graphs share only carried clauses");
        match status {
            ProofStatus::Unsatisfiable => {
                return run.refuted(empty_id.expect("refutation"));
            }
            ProofStatus::Satisfiable => {
                let status = if iteration == 0 {
                    ProofStatus::Satisfiable
                } else {
                    ProofStatus::Unknown
                };
                return run.finish(status, None);
            }
            ProofStatus::Unknown => {}
        }
        // Split into components and run each independently.
        let components = splitter.split(&processed, &problem.symbols, seed);
        let mut component_processed: Vec<Vec<Clause>> = Vec::new();
        let mut refutation: Option<ClauseId> = None;
        for (j, component) in components.iter().enumerate() {
            if component.is_empty() {
                run.event(iteration, Phase::Component(j), None, 0, 0);
                continue;
            }
            let fresh = base + j as u64 * COMPONENT_ID_STRIDE;
            let sub = saturator.saturate(
                component,
                &problem.symbols,
                cfg.limit,
                seed,
                Some(fresh),
            );
            run.calls += 1;
            assert!(
                sub.next_id <= fresh + COMPONENT_ID_STRIDE,
                "component overflowed its id range"
            );
            run.event(
                iteration,
                Phase::Component(j),
                Some(sub.status),
                component.len(),
                sub.processed.len(),
            );
            if sub.status == ProofStatus::Unsatisfiable && refutation.is_none() {
                refutation = Some(sub.derivation.find_empty().expect("refutation"));
            }
            // Component Satisfiable only says the subset has a model, so it
            // contributes its processed set like an Unknown does.
            component_processed.push(sub.processed);
            run.graph
                .merge(sub.derivation)
                .expect("component graphs share only component inputs");
        }
        next_fresh = Some(base + components.len().max(1) as u64 * COMPONENT_ID_STRIDE);
        if let Some(empty_id) = refutation {
            return run.refuted(empty_id);
        }
        if iteration + 1 == cfg.iteration_limit {
            return run.finish(ProofStatus::Unknown, None);
        }
        // Merge: premise-select over the union of component survivors.
        let union = dedup_by_id(component_processed.into_iter().flatten().collect());
        let union_size = union.len();
        let merged = premise_select(
            &union,
            &problem.neg_conjecture,
            &problem.symbols,
            model,
            cfg.merge_policy,
            true,
        );
        run.event(iteration, Phase::Merge, None, union_size, merged.len());
        current = merged;
    }
    run.finish(ProofStatus::Unknown, None)
}

/// Sequential portfolio over the default premise-selection thresholds: run
/// split-and-merge once per threshold and return the first conclusive
/// result (reporting which threshold closed the proof via the trace).
pub fn split_merge_portfolio(
    problem: &Problem,
    cfg: &SplitMergeConfig,
    make_saturator: &mut dyn FnMut() -> Box<dyn Saturator>,
    make_splitter: &mut dyn FnMut() -> Box<dyn ComponentSplitter>,
    model: &ModelFile,
    seed: u64,
) -> (FinalResult, Option<f64>) {
    let mut last: Option<FinalResult> = None;
    for &threshold in DEFAULT_THRESHOLDS.iter() {
        let member = SplitMergeConfig {
            limit: cfg.limit,
            iteration_limit: cfg.iteration_limit,
            merge_policy: SelectionPolicy::Threshold(threshold),
        };
        let mut saturator = make_saturator();
        let mut splitter = make_splitter();
        let result = split_merge(
            problem,
            &member,
            saturator.as_mut(),
            splitter.as_mut(),
            model,
            seed,
        );
        match result.status {
            ProofStatus::Unsatisfiable | ProofStatus::Satisfiable => {
                return (result, Some(threshold));
            }
            ProofStatus::Unknown => last = Some(result),
        }
    }
    (last.expect("at least one portfolio member ran"), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbedderConfig;
    use crate::logic::tptp::parse_tptp_cnf;
    use crate::scorer::{Arch, ScorerParams};
    use ProofStatus::{Satisfiable as S, Unknown as K, Unsatisfiable as U};

    fn refutable_units() -> Problem {
        parse_tptp_cnf("cnf(a, axiom, p).\ncnf(g, negated_conjecture, ~p).").unwrap()
    }

    fn two_pair_problem() -> Problem {
        parse_tptp_cnf(
            "cnf(a1, axiom, p).\ncnf(a2, axiom, ~p).\n\
             cnf(b1, axiom, q).\ncnf(g, negated_conjecture, ~q).",
        )
        .unwrap()
    }

    fn model() -> ModelFile {
        let mut params = ScorerParams::init(Arch::Arch1, 8, 16, 3);
        for (k, b) in params.beta.iter_mut().enumerate() {
            *b = 0.04 * (k as f64 + 1.0) * if k % 2 == 0 { 1.0 } else { -1.0 };
        }
        ModelFile {
            params,
            embedder: EmbedderConfig {
                layers: 2,
                d: 16,
                seed: 2,
            },
        }
    }

    fn passthrough(iterations: usize) -> LeapfrogSchedule {
        LeapfrogSchedule {
            limits: vec![SaturationLimit::processed(10)],
            iteration_limit: iterations,
            mode: SelectorMode::PassThrough,
            carry_initial: false,
        }
    }

    #[test]
    fn mock_unsat_at_first_iteration_returns_unsat() {
        let problem = refutable_units();
        let mut mock = MockSaturator::new(vec![U]);
        let result = leapfrog(&problem, &passthrough(3), &mut mock, None, 0);
        assert_eq!(result.status, U);
        assert_eq!(result.saturate_calls, 1);
        let proof = result.proof.unwrap();
        assert!(proof.leaf_ids.iter().all(|id| id.0 <= 1));
    }

    #[test]
    fn mock_satisfiable_semantics_depend_on_iteration() {
        let problem = refutable_units();
        let mut first = MockSaturator::new(vec![S]);
        let result = leapfrog(&problem, &passthrough(3), &mut first, None, 0);
        assert_eq!(result.status, S);
        assert_eq!(result.saturate_calls, 1);

        let mut second = MockSaturator::new(vec![K, S]);
        let result = leapfrog(&problem, &passthrough(3), &mut second, None, 0);
        assert_eq!(result.status, K, "Satisfiable after selection is Unknown");
        assert_eq!(result.saturate_calls, 2);
    }

    #[test]
    fn mock_unknowns_exhaust_the_iteration_limit() {
        let problem = refutable_units();
        let mut mock = MockSaturator::new(vec![K, K, K]);
        let result = leapfrog(&problem, &passthrough(3), &mut mock, None, 0);
        assert_eq!(result.status, K);
        assert_eq!(result.saturate_calls, 3);
        assert_eq!(mock.calls, vec![2, 2, 2], "PassThrough carries both units");
    }

    #[test]
    fn leapfrog_with_premise_selection_keeps_the_conjecture() {
        let problem = refutable_units();
        let mut mock = MockSaturator::new(vec![K, K]);
        let sched = LeapfrogSchedule {
            limits: vec![SaturationLimit::processed(10)],
            iteration_limit: 2,
            mode: SelectorMode::PremiseSelect(SelectionPolicy::Threshold(1.1)),
            carry_initial: false,
        };
        let result = leapfrog(&problem, &sched, &mut mock, Some(&model()), 0);
        assert_eq!(result.status, K);
        // Second call sees only the force-included conjecture.
        assert_eq!(mock.calls, vec![2, 1]);
    }

    #[test]
    fn carry_initial_restores_the_original_set() {
        let problem = refutable_units();
        let mut mock = MockSaturator::new(vec![K, K]);
        let sched = LeapfrogSchedule {
            limits: vec![SaturationLimit::processed(10)],
            iteration_limit: 2,
            mode: SelectorMode::PremiseSelect(SelectionPolicy::Threshold(1.1)),
            carry_initial: true,
        };
        let result = leapfrog(&problem, &sched, &mut mock, Some(&model()), 0);
        assert_eq!(result.status, K);
        assert_eq!(mock.calls, vec![2, 2]);
    }

    #[test]
    fn leapfrog_with_the_real_engine_solves_and_verifies() {
        let problem = parse_tptp_cnf(
            "cnf(a1, axiom, ~p(X) | p(f(X))).\n\
             cnf(a2, axiom, p(a)).\n\
             cnf(g, negated_conjecture, ~p(f(f(f(a))))).",
        )
        .unwrap();
        // Age-only picks process the inputs first, so the small round's
        // processed set still carries the conjecture into the restart.
        let mut engine = EngineSaturator {
            selector: Selector::AgeWeight {
                ratio: (1, 0),
                jitter: 0.0,
            },
        };
        let sched = LeapfrogSchedule {
            limits: vec![SaturationLimit::processed(4), SaturationLimit::processed(50)],
            iteration_limit: 3,
            mode: SelectorMode::PassThrough,
            carry_initial: false,
        };
        let result = leapfrog(&problem, &sched, &mut engine, None, 0);
        assert_eq!(result.status, U);
        let proof = result.proof.unwrap();
        let input_ids: Vec<ClauseId> = problem.clauses().iter().map(|c| c.id).collect();
        for leaf in &proof.leaf_ids {
            assert!(input_ids.contains(leaf), "proof leaf {leaf:?} is not an input");
        }
        assert!(result.trace.len() >= result.saturate_calls);
    }

    #[test]
    fn split_merge_component_refutation_wins() {
        let problem = two_pair_problem();
        // Top-level run Unknown, then the components (split by head symbol:
        // {p, ~p} and {q, ~q}) each get scripted statuses; component 0
        // refutes.
        let mut mock = MockSaturator::new(vec![K, U]);
        let cfg = SplitMergeConfig {
            limit: SaturationLimit::processed(10),
            iteration_limit: 3,
            merge_policy: SelectionPolicy::TopK(10),
        };
        let mut splitter = HeadSymbolSplitter;
        let result = split_merge(&problem, &cfg, &mut mock, &mut splitter, &model(), 0);
        assert_eq!(result.status, U);
        let proof = result.proof.unwrap();
        assert_eq!(proof.leaf_ids.len(), 2);
        // Top-level call plus both components ran before the refutation was
        // collected deterministically.
        assert_eq!(result.saturate_calls, 3);
    }

    #[test]
    fn split_merge_merges_and_iterates_when_components_stall() {
        let problem = two_pair_problem();
        let mut mock = MockSaturator::new(vec![K]);
        let cfg = SplitMergeConfig {
            limit: SaturationLimit::processed(10),
            iteration_limit: 2,
            merge_policy: SelectionPolicy::TopK(10),
        };
        let mut splitter = HeadSymbolSplitter;
        let result = split_merge(&problem, &cfg, &mut mock, &mut splitter, &model(), 0);
        assert_eq!(result.status, K);
        // Both iterations run the top-level round plus 2 components; only
        // the first is followed by a merge.
        assert_eq!(result.saturate_calls, 6);
        let merges: Vec<&TraceEvent> = result
            .trace
            .iter()
            .filter(|e| e.phase == Phase::Merge)
            .collect();
        assert_eq!(merges.len(), 1);
        // Merged set is the union of component survivors plus conjecture.
        assert!(merges[0].output_size <= 4 && merges[0].output_size >= 1);
    }

    #[test]
    fn split_merge_satisfiable_only_from_iteration_zero() {
        let problem = two_pair_problem();
        let mut mock = MockSaturator::new(vec![S]);
        let cfg = SplitMergeConfig {
            limit: SaturationLimit::processed(10),
            iteration_limit: 3,
            merge_policy: SelectionPolicy::TopK(10),
        };
        let result = split_merge(
            &problem,
            &cfg,
            &mut mock,
            &mut HeadSymbolSplitter,
            &model(),
            0,
        );
        assert_eq!(result.status, S);

        let mut mock = MockSaturator::new(vec![K, K, K, S]);
        let result = split_merge(
            &problem,
            &cfg,
            &mut mock,
            &mut HeadSymbolSplitter,
            &model(),
            0,
        );
        assert_eq!(result.status, K, "late Satisfiable is Unknown");
    }

    #[test]
    fn split_merge_with_the_real_engine_and_model_splitter() {
        // Two independent subproblems: an implication chain to refute and
        // inert relational padding.
        let problem = parse_tptp_cnf(
            "cnf(a1, axiom, ~p(X) | p(f(X))).\n\
             cnf(a2, axiom, p(a)).\n\
             cnf(b1, axiom, r(b,c)).\n\
             cnf(b2, axiom, r(c,d)).\n\
             cnf(g, negated_conjecture, ~p(f(f(a)))).",
        )
        .unwrap();
        let mut engine = EngineSaturator {
            selector: Selector::default(),
        };
        let cfg = SplitMergeConfig {
            limit: SaturationLimit::processed(3),
            iteration_limit: 4,
            merge_policy: SelectionPolicy::TopFraction(1.0),
        };
        let mut splitter = ModelSplitter {
            model: model(),
            method: SplitMethod::default(),
        };
        let result = split_merge(&problem, &cfg, &mut engine, &mut splitter, &model(), 0);
        // With a tiny per-round limit the top-level run stalls, so the
        // search must go through at least one split round; whatever the
        // final status, every trace event stays coherent.
        assert!(result.saturate_calls >= 2);
        for event in &result.trace {
            assert!(event.input_size > 0 || event.status.is_none());
        }
        if result.status == U {
            let proof = result.proof.unwrap();
            let input_ids: Vec<ClauseId> = problem.clauses().iter().map(|c| c.id).collect();
            for leaf in &proof.leaf_ids {
                assert!(input_ids.contains(leaf));
            }
        }
    }

    #[test]
    fn split_merge_call_count_respects_the_bound() {
        let problem = two_pair_problem();
        for iteration_limit in 1..=3 {
            let mut mock = MockSaturator::new(vec![K]);
            let cfg = SplitMergeConfig {
                limit: SaturationLimit::processed(10),
                iteration_limit,
                merge_policy: SelectionPolicy::TopK(10),
            };
            let result = split_merge(
                &problem,
                &cfg,
                &mut mock,
                &mut HeadSymbolSplitter,
                &model(),
                0,
            );
            // K components with K = 2 here.
            assert!(result.saturate_calls <= iteration_limit * 3);
        }
    }

    #[test]
    fn portfolio_returns_first_conclusive_threshold() {
        let problem = two_pair_problem();
        let cfg = SplitMergeConfig {
            limit: SaturationLimit::processed(10),
            iteration_limit: 2,
            merge_policy: SelectionPolicy::Threshold(0.5),
        };
        let m = model();
        let (result, threshold) = split_merge_portfolio(
            &problem,
            &cfg,
            &mut || Box::new(MockSaturator::new(vec![K, U])),
            &mut || Box::new(HeadSymbolSplitter),
            &m,
            0,
        );
        assert_eq!(result.status, U);
        assert_eq!(threshold, Some(DEFAULT_THRESHOLDS[0]));

        let (result, threshold) = split_merge_portfolio(
            &problem,
            &cfg,
            &mut || Box::new(MockSaturator::new(vec![K])),
            &mut || Box::new(HeadSymbolSplitter),
            &m,
            0,
        );
        assert_eq!(result.status, K);
        assert_eq!(threshold, None);
    }

    #[test]
    fn trace_serializes_to_json_lines() {
        let problem = refutable_units();
        let mut mock = MockSaturator::new(vec![K, U]);
        let result = leapfrog(&problem, &passthrough(3), &mut mock, None, 0);
        assert_eq!(result.status, U);
        let jsonl = trace_to_jsonl(&result.trace);
        for line in jsonl.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["iteration"].is_u64());
        }
        assert_eq!(szs_line(result.status), "SZS status Unsatisfiable");
    }
}
