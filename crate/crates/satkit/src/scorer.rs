//! Pairwise clause-interaction scoring, its bilinear closed form, training
//! pair extraction from derivations, and gradient-descent training of the
//! head under sigmoid + binary cross-entropy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{EmbedderConfig, EmbeddingSet};
use crate::linalg::{dot, Matrix};
use crate::logic::{ClauseId, DerivationGraph, Origin};

const SIGMA_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arch {
    /// d_i = W c_i + β with output dim n; l = ⟨d_i, d_j⟩ / √n.
    Arch1,
    /// Output dim 2n; l = ⟨d_i, reverse(d_j)⟩ / √n.
    Arch2,
}

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("dimension mismatch: {context} expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("derivation has no recorded proof; cannot label pairs")]
    NoProof,
    #[error("training diverged at step {step} (loss {loss})")]
    Diverged { step: usize, loss: f64 },
    #[error("training needs at least one positive and one negative pair")]
    DegenerateLabels,
    #[error("no embedding for clause {0}")]
    MissingEmbedding(ClauseId),
    #[error("bad model file: {0}")]
    BadModel(String),
}

/// Trainable scoring head. `w` has n rows (Arch1) or 2n rows (Arch2) and d
/// columns; `beta` matches the row count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerParams {
    pub arch: Arch,
    pub n: usize,
    pub d: usize,
    pub w: Matrix,
    pub beta: Vec<f64>,
}

impl ScorerParams {
    pub fn out_dim(&self) -> usize {
        match self.arch {
            Arch::Arch1 => self.n,
            Arch::Arch2 => 2 * self.n,
        }
    }

    pub fn validate(&self) -> Result<(), ScorerError> {
        let out = self.out_dim();
        if self.w.rows != out {
            return Err(ScorerError::DimensionMismatch {
                context: "W rows",
                expected: out,
                got: self.w.rows,
            });
        }
        if self.w.cols != self.d {
            return Err(ScorerError::DimensionMismatch {
                context: "W cols",
                expected: self.d,
                got: self.w.cols,
            });
        }
        if self.beta.len() != out {
            return Err(ScorerError::DimensionMismatch {
                context: "beta",
                expected: out,
                got: self.beta.len(),
            });
        }
        Ok(())
    }

    /// Seeded initialization: W uniform in ±1/√d, β zero.
    pub fn init(arch: Arch, n: usize, d: usize, seed: u64) -> ScorerParams {
        let out = match arch {
            Arch::Arch1 => n,
            Arch::Arch2 => 2 * n,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (d as f64).sqrt();
        ScorerParams {
            arch,
            n,
            d,
            w: Matrix::random_uniform(&mut rng, out, d, scale),
            beta: vec![0.0; out],
        }
    }
}

/// ⟨a, reverse(b)⟩ computed so that swapping the arguments gives the exact
/// same floating-point result: mirrored index pairs are added together
/// before joining the accumulator.
fn rev_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let m = a.len();
    let mut sum = 0.0;
    for k in 0..m / 2 {
        let r = m - 1 - k;
        sum += a[k] * b[r] + a[r] * b[k];
    }
    if m % 2 == 1 {
        let mid = m / 2;
        sum += a[mid] * b[mid];
    }
    sum
}

fn transformed(p: &ScorerParams, c: &[f64]) -> Vec<f64> {
    let mut d = p.w.matvec(c);
    for (di, bi) in d.iter_mut().zip(&p.beta) {
        *di += bi;
    }
    d
}

/// Interaction logit for one clause pair.
pub fn score_pair(c_i: &[f64], c_j: &[f64], p: &ScorerParams) -> f64 {
    assert_eq!(c_i.len(), p.d, "c_i dimension");
    assert_eq!(c_j.len(), p.d, "c_j dimension");
    let d_i = transformed(p, c_i);
    let d_j = transformed(p, c_j);
    let raw = match p.arch {
        Arch::Arch1 => dot(&d_i, &d_j),
        Arch::Arch2 => rev_dot(&d_i, &d_j),
    };
    raw / (p.n as f64).sqrt()
}

/// Closed form of the head: l = cᵢᵀ A cⱼ + vᵀ(cᵢ+cⱼ) + b.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilinearForm {
    pub a: Matrix,
    pub v: Vec<f64>,
    pub b: f64,
    /// True for Arch1, whose A = WᵀW/√n is positive semidefinite.
    pub psd_guaranteed: bool,
}

impl BilinearForm {
    pub fn evaluate(&self, c_i: &[f64], c_j: &[f64]) -> f64 {
        let acj = self.a.matvec(c_j);
        dot(c_i, &acj) + dot(&self.v, c_i) + dot(&self.v, c_j) + self.b
    }
}

/// Reversal permutation matrix of size m.
fn reversal(m: usize) -> Matrix {
    let mut r = Matrix::zeros(m, m);
    for i in 0..m {
        r.set(i, m - 1 - i, 1.0);
    }
    r
}

/// Expand the head into its bilinear form. Arch1: A = WᵀW/√n (PSD);
/// Arch2: A = WᵀRW/√n with R the reversal permutation (symmetric, possibly
/// indefinite). v and b follow the same pattern.
pub fn to_bilinear(p: &ScorerParams) -> BilinearForm {
    let inv_sqrt_n = 1.0 / (p.n as f64).sqrt();
    let wt = p.w.transpose();
    let (mut a, v, b) = match p.arch {
        Arch::Arch1 => {
            let a = wt.matmul(&p.w);
            let v = p.w.t_matvec(&p.beta);
            let b = dot(&p.beta, &p.beta);
            (a, v, b)
        }
        Arch::Arch2 => {
            let r = reversal(p.out_dim());
            let rw = r.matmul(&p.w);
            let a = wt.matmul(&rw);
            let rbeta = r.matvec(&p.beta);
            let v = p.w.t_matvec(&rbeta);
            let b = dot(&p.beta, &rbeta);
            (a, v, b)
        }
    };
    a.scale_in_place(inv_sqrt_n);
    let a = a.symmetrized();
    BilinearForm {
        a,
        v: v.iter().map(|x| x * inv_sqrt_n).collect(),
        b: b * inv_sqrt_n,
        psd_guaranteed: p.arch == Arch::Arch1,
    }
}

/// Full symmetric interaction matrix over a clause list.
pub fn interaction_matrix(vectors: &[Vec<f64>], p: &ScorerParams) -> Matrix {
    let n = vectors.len();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s = score_pair(&vectors[i], &vectors[j], p);
            l.set(i, j, s);
            l.set(j, i, s);
        }
    }
    l
}

/// One labeled parent pair. Resolution yields i ≠ j; factoring records a
/// self-pair i = j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub i: ClauseId,
    pub j: ClauseId,
    pub positive: bool,
}

/// Parent pairs of every binary inference in the graph, labeled positive
/// iff the inferred clause lies on the recorded proof. Pairs are
/// deduplicated (unordered) with positive taking priority, and returned in
/// ascending (i, j) order.
pub fn extract_pairs(graph: &DerivationGraph) -> Result<Vec<LabeledPair>, ScorerError> {
    if graph.proof_ids().is_empty() {
        return Err(ScorerError::NoProof);
    }
    let mut seen: std::collections::BTreeMap<(ClauseId, ClauseId), bool> =
        std::collections::BTreeMap::new();
    for clause in graph.iter() {
        let (pair, positive) = match &clause.origin {
            Origin::Resolution { parents, .. } => {
                let key = if parents[0] <= parents[1] {
                    (parents[0], parents[1])
                } else {
                    (parents[1], parents[0])
                };
                (key, graph.proof_ids().contains(&clause.id))
            }
            Origin::Factoring { parent, .. } => {
                ((*parent, *parent), graph.proof_ids().contains(&clause.id))
            }
            _ => continue,
        };
        let entry = seen.entry(pair).or_insert(false);
        *entry = *entry || positive;
    }
    Ok(seen
        .into_iter()
        .map(|((i, j), positive)| LabeledPair { i, j, positive })
        .collect())
}

/// Cap negatives at `ratio` times the positive count, keeping a seeded
/// uniform subsample. Positives always survive. Output is sorted by (i, j).
pub fn subsample_negatives(pairs: &[LabeledPair], ratio: usize, seed: u64) -> Vec<LabeledPair> {
    let positives: Vec<LabeledPair> = pairs.iter().copied().filter(|p| p.positive).collect();
    let mut negatives: Vec<LabeledPair> = pairs.iter().copied().filter(|p| !p.positive).collect();
    let cap = positives.len().saturating_mul(ratio);
    if negatives.len() > cap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        negatives.shuffle(&mut rng);
        negatives.truncate(cap);
    }
    let mut out = positives;
    out.extend(negatives);
    out.sort_by_key(|p| (p.i, p.j));
    out
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn bce_term(logit: f64, positive: bool) -> f64 {
    let p = sigmoid(logit).clamp(SIGMA_EPS, 1.0 - SIGMA_EPS);
    if positive {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Index-level pair used by the training loop: embedding indices plus label.
pub type IndexPair = (usize, usize, bool);

/// Mean binary cross-entropy of σ(l) over index pairs.
pub fn bce_loss_indexed(p: &ScorerParams, vectors: &[Vec<f64>], pairs: &[IndexPair]) -> f64 {
    assert!(!pairs.is_empty(), "bce_loss over empty pair list");
    let total: f64 = pairs
        .iter()
        .map(|&(i, j, y)| bce_term(score_pair(&vectors[i], &vectors[j], p), y))
        .sum();
    total / pairs.len() as f64
}

/// Mean binary cross-entropy over id-level pairs resolved through an
/// embedding set.
pub fn bce_loss(
    p: &ScorerParams,
    embeddings: &EmbeddingSet,
    pairs: &[LabeledPair],
) -> Result<f64, ScorerError> {
    let indexed = resolve_pairs(embeddings, pairs)?;
    Ok(bce_loss_indexed(p, embeddings.vectors(), &indexed))
}

/// Map id-level pairs to embedding indices.
pub fn resolve_pairs(
    embeddings: &EmbeddingSet,
    pairs: &[LabeledPair],
) -> Result<Vec<IndexPair>, ScorerError> {
    let ids = embeddings.ids();
    let index: std::collections::HashMap<ClauseId, usize> = ids
        .iter()
        .enumerate()
        .map(|(k, &id)| (id, k))
        .collect();
    pairs
        .iter()
        .map(|p| {
            let i = *index.get(&p.i).ok_or(ScorerError::MissingEmbedding(p.i))?;
            let j = *index.get(&p.j).ok_or(ScorerError::MissingEmbedding(p.j))?;
            Ok((i, j, p.positive))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub arch: Arch,
    pub n: usize,
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            arch: Arch::Arch1,
            n: 16,
            lr: 0.05,
            epochs: 40,
            batch: 64,
            seed: 0,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ScorerParams,
    /// Full-dataset loss before training, then after each epoch.
    pub loss_trace: Vec<f64>,
}

/// Analytic gradient of the mean batch loss (plus L2) with respect to W
/// and β, accumulated into `gw`/`gbeta`.
fn accumulate_pair_gradient(
    p: &ScorerParams,
    c_i: &[f64],
    c_j: &[f64],
    positive: bool,
    weight: f64,
    gw: &mut Matrix,
    gbeta: &mut [f64],
) {
    let d_i = transformed(p, c_i);
    let d_j = transformed(p, c_j);
    let m = d_i.len();
    // r_i = R d_i for Arch2, d_i itself for Arch1.
    let (r_i, r_j): (Vec<f64>, Vec<f64>) = match p.arch {
        Arch::Arch1 => (d_i.clone(), d_j.clone()),
        Arch::Arch2 => (
            (0..m).map(|k| d_i[m - 1 - k]).collect(),
            (0..m).map(|k| d_j[m - 1 - k]).collect(),
        ),
    };
    let logit = match p.arch {
        Arch::Arch1 => dot(&d_i, &d_j),
        Arch::Arch2 => rev_dot(&d_i, &d_j),
    } / (p.n as f64).sqrt();
    let y = if positive { 1.0 } else { 0.0 };
    let g = weight * (sigmoid(logit) - y) / (p.n as f64).sqrt();
    // ∂l/∂W = (r_j c_iᵀ + r_i c_jᵀ) / √n, chain-ruled through g.
    for row in 0..m {
        let a = g * r_j[row];
        let b = g * r_i[row];
        for col in 0..p.d {
            gw.data[row * p.d + col] += a * c_i[col] + b * c_j[col];
        }
        gbeta[row] += a + b;
    }
}

/// Minibatch SGD on the BCE loss with analytic gradients. Deterministic for
/// a fixed config. Requires both label classes to be present.
pub fn train(
    vectors: &[Vec<f64>],
    pairs: &[IndexPair],
    d: usize,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, ScorerError> {
    if !pairs.iter().any(|&(_, _, y)| y) || !pairs.iter().any(|&(_, _, y)| !y) {
        return Err(ScorerError::DegenerateLabels);
    }
    let mut params = ScorerParams::init(cfg.arch, cfg.n, d, cfg.seed);
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut loss_trace = vec![bce_loss_indexed(&params, vectors, pairs)];
    let mut step = 0usize;
    let batch = cfg.batch.max(1);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let weight = 1.0 / chunk.len() as f64;
            let mut gw = Matrix::zeros(params.w.rows, params.w.cols);
            let mut gbeta = vec![0.0; params.beta.len()];
            for &k in chunk {
                let (i, j, y) = pairs[k];
                accumulate_pair_gradient(
                    &params,
                    &vectors[i],
                    &vectors[j],
                    y,
                    weight,
                    &mut gw,
                    &mut gbeta,
                );
            }
            if cfg.l2 > 0.0 {
                gw.add_in_place(&params.w, cfg.l2);
                for (gb, b) in gbeta.iter_mut().zip(&params.beta) {
                    *gb += cfg.l2 * b;
                }
            }
            params.w.add_in_place(&gw, -cfg.lr);
            for (b, gb) in params.beta.iter_mut().zip(&gbeta) {
                *b -= cfg.lr * gb;
            }
            step += 1;
            if params.w.data.iter().any(|x| !x.is_finite())
                || params.beta.iter().any(|x| !x.is_finite())
            {
                return Err(ScorerError::Diverged {
                    step,
                    loss: f64::NAN,
                });
            }
        }
        let loss = bce_loss_indexed(&params, vectors, pairs);
        if !loss.is_finite() {
            return Err(ScorerError::Diverged { step, loss });
        }
        loss_trace.push(loss);
    }
    Ok(TrainOutcome { params, loss_trace })
}

/// Area under the ROC curve by the rank statistic, ties handled by average
/// rank. Needs both classes present.
pub fn auc(scores: &[f64], labels: &[bool]) -> f64 {
    assert_eq!(scores.len(), labels.len());
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k + 1;
        while end < order.len() && scores[order[end]] == scores[order[k]] {
            end += 1;
        }
        let avg = (k + 1 + end) as f64 / 2.0;
        for &idx in &order[k..end] {
            ranks[idx] = avg;
        }
        k = end;
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    assert!(pos > 0 && neg > 0, "auc needs both classes");
    let pos_rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(r, _)| r)
        .sum();
    (pos_rank_sum - (pos * (pos + 1)) as f64 / 2.0) / (pos as f64 * neg as f64)
}

/// On-disk model: head parameters plus the embedder configuration they
/// were trained against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub params: ScorerParams,
    pub embedder: EmbedderConfig,
}

impl ModelFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<ModelFile, ScorerError> {
        let model: ModelFile =
            serde_json::from_str(text).map_err(|e| ScorerError::BadModel(e.to_string()))?;
        model.params.validate()?;
        if model.params.d != model.embedder.d {
            return Err(ScorerError::DimensionMismatch {
                context: "model d vs embedder d",
                expected: model.embedder.d,
                got: model.params.d,
            });
        }
        Ok(model)
    }
}
