//! The given-clause saturation loop with a processed-clause limit and
//! pluggable clause selection, including batched contextual ranking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

use crate::embedding::{embed_clauses, EmbedderConfig};
use crate::logic::infer::{all_factors, resolve, subsumes};
use crate::logic::{Clause, ClauseId, DerivationGraph, Sym, SymbolTable};
use crate::scorer::{score_pair, ModelFile, ScorerParams};

/// Stop bounds for one saturation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationLimit {
    /// Nontrivial processed clauses allowed (clauses that survive
    /// tautology deletion and forward subsumption).
    pub max_processed: usize,
    /// Optional wall-clock budget in seconds.
    pub max_seconds: Option<f64>,
}

impl SaturationLimit {
    pub fn processed(max_processed: usize) -> SaturationLimit {
        assert!(max_processed >= 1, "processed limit must be >= 1");
        SaturationLimit {
            max_processed,
            max_seconds: None,
        }
    }

    pub fn with_seconds(mut self, seconds: f64) -> SaturationLimit {
        self.max_seconds = Some(seconds);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofStatus {
    Unsatisfiable,
    Satisfiable,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Refuted,
    QueueEmptied,
    ProcessedLimit,
    Deadline,
}

/// Clause selection strategy for the given-clause loop.
#[derive(Debug, Clone)]
pub enum Selector {
    /// Classic age/weight interleaving: `ratio = (a, w)` processes a picks
    /// by age then w picks by symbol-count weight, cyclically. `jitter`
    /// perturbs weights multiplicatively (deterministic per seed and
    /// clause id), so different seeds explore different trajectories.
    AgeWeight { ratio: (u32, u32), jitter: f64 },
    /// Batched contextual ranking: unevaluated clauses accumulate until
    /// `query_size` are waiting, the batch is scored against the pooled
    /// conjecture embedding in the context of the first `context_size`
    /// processed clauses, and picks drain the batch in descending score.
    /// `age_interleave = (a, s)` mixes in age picks as with AgeWeight.
    Scored {
        model: ModelFile,
        context_size: usize,
        query_size: usize,
        age_interleave: (u32, u32),
        /// When set, the context is the most recent `context_size`
        /// processed clauses instead of the first ones.
        sliding_context: bool,
    },
}

impl Default for Selector {
    fn default() -> Self {
        Selector::AgeWeight {
            ratio: (1, 4),
            jitter: 0.2,
        }
    }
}

impl Selector {
    fn cycle(&self) -> (u32, u32) {
        match self {
            Selector::AgeWeight { ratio, .. } => *ratio,
            Selector::Scored { age_interleave, .. } => *age_interleave,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let (a, b) = self.cycle();
        if a + b == 0 {
            return Err("selector ratio must have at least one nonzero side".into());
        }
        if let Selector::Scored {
            context_size,
            query_size,
            ..
        } = self
        {
            if *context_size < 1 || *query_size < 1 {
                return Err("context and query sizes must be >= 1".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct SaturationStats {
    pub picked: usize,
    pub generated: usize,
    pub tautologies_dropped: usize,
    pub forward_subsumed: usize,
    pub duplicates_dropped: usize,
    pub batches_scored: usize,
}

/// Result of one saturation run. The derivation graph holds every clause
/// generated, dead ends included; on refutation its proof closure is
/// marked and verifies.
#[derive(Debug, Clone)]
pub struct SaturationOutcome {
    pub status: ProofStatus,
    pub stop: StopReason,
    /// The set L: processed clauses in processing order.
    pub processed: Vec<Clause>,
    pub derivation: DerivationGraph,
    /// First clause id not used by this run.
    pub next_id: u64,
    pub stats: SaturationStats,
}

impl SaturationOutcome {
    /// The derivation graph when a refutation was found.
    pub fn proof(&self) -> Option<&DerivationGraph> {
        (self.status == ProofStatus::Unsatisfiable).then_some(&self.derivation)
    }
}

struct WaitEntry {
    clause: Clause,
    seq: u64,
    weight: f64,
    score: Option<f64>,
    alive: bool,
}

struct Engine<'a> {
    selector: &'a Selector,
    symbols: &'a SymbolTable,
    limit: SaturationLimit,
    rng: ChaCha8Rng,
    waiting: Vec<WaitEntry>,
    alive: usize,
    processed: Vec<Clause>,
    /// (predicate, polarity) -> positions among processed literals.
    head_index: HashMap<(Sym, bool), Vec<(usize, usize)>>,
    /// Bodies of queued-or-processed clauses, for exact-duplicate dropping.
    seen_bodies: std::collections::HashSet<Vec<crate::logic::Literal>>,
    graph: DerivationGraph,
    next_id: u64,
    next_seq: u64,
    pick_counter: u64,
    stats: SaturationStats,
    conjecture: Vec<Clause>,
    deadline: Option<Instant>,
}

impl<'a> Engine<'a> {
    fn weight_of(&mut self, clause: &Clause) -> f64 {
        let base = clause.weight() as f64;
        match self.selector {
            Selector::AgeWeight { jitter, .. } if *jitter > 0.0 => {
                // Deterministic per-clause perturbation derived from the
                // run seed stream.
                let u: f64 = self.rng.gen_range(0.0..1.0);
                base * (1.0 + jitter * u)
            }
            _ => base,
        }
    }

    fn enqueue(&mut self, clause: Clause) {
        let weight = self.weight_of(&clause);
        self.waiting.push(WaitEntry {
            clause,
            seq: self.next_seq,
            weight,
            score: None,
            alive: true,
        });
        self.next_seq += 1;
        self.alive += 1;
    }

    fn take(&mut self, idx: usize) -> Clause {
        let entry = &mut self.waiting[idx];
        entry.alive = false;
        self.alive -= 1;
        entry.clause.clone()
    }

    fn pop_by_age(&mut self) -> Option<Clause> {
        let idx = self
            .waiting
            .iter()
            .enumerate()
            .filter(|(_, e)| e.alive)
            .min_by_key(|(_, e)| e.seq)
            .map(|(i, _)| i)?;
        Some(self.take(idx))
    }

    fn pop_by_weight(&mut self) -> Option<Clause> {
        let idx = self
            .waiting
            .iter()
            .enumerate()
            .filter(|(_, e)| e.alive)
            .min_by(|(_, a), (_, b)| {
                a.weight
                    .total_cmp(&b.weight)
                    .then(a.clause.id.cmp(&b.clause.id))
            })
            .map(|(i, _)| i)?;
        Some(self.take(idx))
    }

    /// Highest-scored entry of the current batch; scores a fresh batch of
    /// the oldest unevaluated clauses when the batch is drained.
    fn pop_by_score(&mut self) -> Option<Clause> {
        let Selector::Scored {
            model,
            context_size,
            query_size,
            sliding_context,
            ..
        } = self.selector
        else {
            return self.pop_by_weight();
        };
        if !self.waiting.iter().any(|e| e.alive && e.score.is_some()) {
            // Form the next batch from the oldest unevaluated clauses.
            let mut batch: Vec<usize> = self
                .waiting
                .iter()
                .enumerate()
                .filter(|(_, e)| e.alive && e.score.is_none())
                .map(|(i, _)| i)
                .collect();
            batch.sort_by_key(|&i| self.waiting[i].seq);
            batch.truncate(*query_size);
            if batch.is_empty() {
                return None;
            }
            let query: Vec<Clause> = batch
                .iter()
                .map(|&i| self.waiting[i].clause.clone())
                .collect();
            let context: Vec<Clause> = if *sliding_context {
                let start = self.processed.len().saturating_sub(*context_size);
                self.processed[start..].to_vec()
            } else {
                let end = self.processed.len().min(*context_size);
                self.processed[..end].to_vec()
            };
            let scores = rank_batch(
                &query,
                &context,
                &self.conjecture,
                &model.params,
                &model.embedder,
                self.symbols,
            );
            for (&i, s) in batch.iter().zip(scores) {
                self.waiting[i].score = Some(s);
            }
            self.stats.batches_scored += 1;
        }
        let idx = self
            .waiting
            .iter()
            .enumerate()
            .filter(|(_, e)| e.alive && e.score.is_some())
            .max_by(|(_, a), (_, b)| {
                a.score
                    .unwrap()
                    .total_cmp(&b.score.unwrap())
                    .then(b.clause.id.cmp(&a.clause.id))
            })
            .map(|(i, _)| i)?;
        Some(self.take(idx))
    }

    fn pick(&mut self) -> Option<Clause> {
        let (age_picks, other_picks) = self.selector.cycle();
        let phase = self.pick_counter % (age_picks + other_picks) as u64;
        self.pick_counter += 1;
        if phase < age_picks as u64 {
            self.pop_by_age()
        } else {
            match self.selector {
                Selector::AgeWeight { .. } => self.pop_by_weight(),
                Selector::Scored { .. } => self.pop_by_score(),
            }
        }
    }

    fn forward_redundant(&mut self, clause: &Clause) -> bool {
        if clause.is_tautology() {
            self.stats.tautologies_dropped += 1;
            return true;
        }
        let redundant = self
            .processed
            .iter()
            .any(|p| p.len() <= clause.len() && p.weight() <= clause.weight() && subsumes(p, clause));
        if redundant {
            self.stats.forward_subsumed += 1;
        }
        redundant
    }

    fn add_to_processed(&mut self, clause: Clause) {
        let pos = self.processed.len();
        for (li, lit) in clause.literals.iter().enumerate() {
            self.head_index
                .entry((lit.head(), lit.positive))
                .or_default()
                .push((pos, li));
        }
        self.processed.push(clause);
    }

    /// All resolvents of the given clause against processed clauses (the
    /// given clause included) plus its factors. Returns the refuting empty
    /// clause id as soon as one appears.
    fn generate(&mut self, given: &Clause) -> Option<ClauseId> {
        let mut fresh: Vec<Clause> = Vec::new();
        for f in all_factors(given, &mut self.next_id) {
            fresh.push(f);
        }
        let given_pos = self.processed.len() - 1;
        for (li, lit) in given.literals.iter().enumerate() {
            let Some(partners) = self.head_index.get(&(lit.head(), !lit.positive)) else {
                continue;
            };
            for &(pj, lj) in partners {
                // given resolves against processed[pj]; positions are
                // (li in given, lj in partner). Self-resolution happens
                // when pj is the given clause itself.
                let partner = &self.processed[pj];
                if pj == given_pos && lj == li {
                    continue;
                }
                if let Ok(Some(r)) = resolve(given, partner, li, lj, ClauseId(self.next_id)) {
                    self.next_id += 1;
                    fresh.push(r);
                }
            }
        }
        for clause in fresh {
            self.stats.generated += 1;
            let is_empty = clause.is_empty();
            let id = clause.id;
            let tautology = clause.is_tautology();
            let body_new = self.seen_bodies.insert(clause.literals.clone());
            self.graph.insert(clause.clone()).expect("fresh ids are unique");
            if is_empty {
                return Some(id);
            }
            if tautology {
                self.stats.tautologies_dropped += 1;
                continue;
            }
            if !body_new {
                self.stats.duplicates_dropped += 1;
                continue;
            }
            self.enqueue(clause);
        }
        None
    }

    fn finish(self, status: ProofStatus, stop: StopReason) -> SaturationOutcome {
        SaturationOutcome {
            status,
            stop,
            processed: self.processed,
            derivation: self.graph,
            next_id: self.next_id,
            stats: self.stats,
        }
    }
}

/// Run the given-clause loop over `inputs` until refutation, exhaustion,
/// or the limit. Clause ids in `inputs` must be unique; fresh clauses get
/// ids starting at `first_fresh_id` when given, else after the maximum
/// input id. Deterministic for fixed selector and seed.
pub fn saturate_from(
    inputs: &[Clause],
    symbols: &SymbolTable,
    limit: SaturationLimit,
    selector: &Selector,
    seed: u64,
    first_fresh_id: Option<u64>,
) -> SaturationOutcome {
    assert!(!inputs.is_empty(), "saturation needs at least one clause");
    selector.validate().expect("selector configuration");
    let max_input = inputs.iter().map(|c| c.id.0).max().unwrap_or(0);
    let next_id = match first_fresh_id {
        Some(base) => {
            assert!(base > max_input, "fresh id base must exceed input ids");
            base
        }
        None => max_input + 1,
    };
    let deadline = limit
        .max_seconds
        .map(|s| Instant::now() + std::time::Duration::from_secs_f64(s));
    let conjecture: Vec<Clause> = inputs
        .iter()
        .filter(|c| c.origin == crate::logic::Origin::NegatedConjecture)
        .cloned()
        .collect();
    let mut engine = Engine {
        selector,
        symbols,
        limit,
        rng: ChaCha8Rng::seed_from_u64(seed),
        waiting: Vec::new(),
        alive: 0,
        processed: Vec::new(),
        head_index: HashMap::new(),
        seen_bodies: std::collections::HashSet::new(),
        graph: DerivationGraph::new(),
        next_id,
        next_seq: 0,
        pick_counter: 0,
        stats: SaturationStats::default(),
        conjecture,
        deadline,
    };
    for clause in inputs {
        engine
            .graph
            .insert(clause.clone())
            .expect("input clause ids must be unique");
        engine.seen_bodies.insert(clause.literals.clone());
        engine.enqueue(clause.clone());
    }
    loop {
        if engine.alive == 0 {
            return engine.finish(ProofStatus::Satisfiable, StopReason::QueueEmptied);
        }
        if engine.processed.len() >= engine.limit.max_processed {
            return engine.finish(ProofStatus::Unknown, StopReason::ProcessedLimit);
        }
        if let Some(deadline) = engine.deadline {
            if Instant::now() >= deadline {
                return engine.finish(ProofStatus::Unknown, StopReason::Deadline);
            }
        }
        let Some(given) = engine.pick() else {
            return engine.finish(ProofStatus::Satisfiable, StopReason::QueueEmptied);
        };
        if given.is_empty() {
            engine.graph.mark_proof(given.id);
            return engine.finish(ProofStatus::Unsatisfiable, StopReason::Refuted);
        }
        if engine.forward_redundant(&given) {
            continue;
        }
        engine.stats.picked += 1;
        engine.add_to_processed(given.clone());
        if let Some(empty_id) = engine.generate(&given) {
            engine.graph.mark_proof(empty_id);
            return engine.finish(ProofStatus::Unsatisfiable, StopReason::Refuted);
        }
    }
}

/// Saturate a parsed problem (axioms plus negated conjecture).
pub fn saturate(
    problem: &crate::logic::Problem,
    limit: SaturationLimit,
    selector: &Selector,
    seed: u64,
) -> SaturationOutcome {
    saturate_from(&problem.clauses(), &problem.symbols, limit, selector, seed, None)
}

/// Score each query clause against the pooled conjecture embedding, in the
/// context of the given processed clauses. The union graph of query,
/// context, and conjecture is embedded jointly, so context changes can
/// shift query scores. Higher score = process earlier.
pub fn rank_batch(
    query: &[Clause],
    context: &[Clause],
    conjecture: &[Clause],
    head: &ScorerParams,
    embedder: &EmbedderConfig,
    symbols: &SymbolTable,
) -> Vec<f64> {
    assert!(!query.is_empty(), "rank_batch needs a nonempty query");
    let mut non_conjecture: Vec<Clause> = Vec::with_capacity(query.len() + context.len());
    non_conjecture.extend_from_slice(query);
    non_conjecture.extend_from_slice(context);
    let embeddings = embed_clauses(&non_conjecture, conjecture, symbols, embedder);
    let pool = crate::premise::pool_conjecture(
        &conjecture
            .iter()
            .filter_map(|c| embeddings.get(c.id))
            .collect::<Vec<_>>(),
        embedder.d,
    );
    query
        .iter()
        .map(|c| {
            let v = embeddings.get(c.id).expect("query clause embedded");
            score_pair(v, &pool, head)
        })
        .collect()
}
