//! Conjecture-relative premise selection: score every clause of a set
//! against the pooled conjecture embedding and keep the most relevant.

use serde::{Deserialize, Serialize};

use crate::embedding::embed_clauses;
use crate::linalg::scale;
use crate::logic::{Clause, ClauseId, SymbolTable};
use crate::scorer::{score_pair, sigmoid, ModelFile};

/// Probability cutoffs used by the multi-threshold orchestration portfolio.
pub const DEFAULT_THRESHOLDS: [f64; 4] = [0.25, 0.5, 0.75, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SelectionPolicy {
    /// Keep the k highest-probability clauses (ties favor smaller ids).
    TopK(usize),
    /// Keep clauses whose selection probability is at least t.
    Threshold(f64),
    /// Keep the ceil(f * |input|) highest-probability clauses.
    TopFraction(f64),
}

impl SelectionPolicy {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            SelectionPolicy::TopK(_) => Ok(()),
            SelectionPolicy::Threshold(t) => {
                if t.is_finite() {
                    Ok(())
                } else {
                    Err("threshold must be finite".into())
                }
            }
            SelectionPolicy::TopFraction(f) => {
                if (0.0..=1.0).contains(f) {
                    Ok(())
                } else {
                    Err("fraction must lie in [0, 1]".into())
                }
            }
        }
    }
}

/// One clause's relevance to the conjecture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredClause {
    pub id: u64,
    pub logit: f64,
    pub probability: f64,
}

/// Coordinate-wise mean of the conjecture clause embeddings; the zero
/// vector when there is no conjecture.
pub fn pool_conjecture(vectors: &[&[f64]], d: usize) -> Vec<f64> {
    if vectors.is_empty() {
        return vec![0.0; d];
    }
    let mut sum = vec![0.0; d];
    for v in vectors {
        for (s, x) in sum.iter_mut().zip(*v) {
            *s += x;
        }
    }
    scale(&sum, 1.0 / vectors.len() as f64)
}

/// Score each clause of `pool` against the pooled conjecture embedding.
/// Pool and conjecture are embedded jointly (conjecture clauses flagged),
/// so the scores reflect the conjecture actually present. Output order
/// follows `pool`.
pub fn score_premises(
    pool: &[Clause],
    neg_conjecture: &[Clause],
    symbols: &SymbolTable,
    model: &ModelFile,
) -> Vec<ScoredClause> {
    let embeddings = embed_clauses(pool, neg_conjecture, symbols, &model.embedder);
    let conj_vectors: Vec<&[f64]> = neg_conjecture
        .iter()
        .filter_map(|c| embeddings.get(c.id))
        .collect();
    let pooled = pool_conjecture(&conj_vectors, model.embedder.d);
    pool.iter()
        .map(|c| {
            let v = embeddings.get(c.id).expect("pool clause embedded");
            let logit = score_pair(v, &pooled, &model.params);
            ScoredClause {
                id: c.id.0,
                logit,
                probability: sigmoid(logit),
            }
        })
        .collect()
}

/// Ids kept by a policy, given scored clauses. Ranking policies order by
/// probability descending with ties broken by smaller id.
pub fn apply_policy(scored: &[ScoredClause], policy: SelectionPolicy) -> Vec<u64> {
    policy.validate().expect("selection policy");
    match policy {
        SelectionPolicy::Threshold(t) => scored
            .iter()
            .filter(|s| s.probability >= t)
            .map(|s| s.id)
            .collect(),
        SelectionPolicy::TopK(k) => top_ids(scored, k),
        SelectionPolicy::TopFraction(f) => {
            let k = (f * scored.len() as f64).ceil() as usize;
            top_ids(scored, k)
        }
    }
}

fn top_ids(scored: &[ScoredClause], k: usize) -> Vec<u64> {
    let mut ranked: Vec<&ScoredClause> = scored.iter().collect();
    ranked.sort_by(|a, b| b.probability.total_cmp(&a.probability).then(a.id.cmp(&b.id)));
    ranked.truncate(k.min(scored.len()));
    let mut ids: Vec<u64> = ranked.iter().map(|s| s.id).collect();
    ids.sort_unstable();
    ids
}

/// Select premises from `pool` relative to the negated conjecture. The
/// result keeps the selected clauses in their `pool` order; when
/// `always_include_conjecture` is set (the orchestration default), the
/// negated-conjecture clauses are appended whether or not they were
/// selected on score.
pub fn premise_select(
    pool: &[Clause],
    neg_conjecture: &[Clause],
    symbols: &SymbolTable,
    model: &ModelFile,
    policy: SelectionPolicy,
    always_include_conjecture: bool,
) -> Vec<Clause> {
    let scored = score_premises(pool, neg_conjecture, symbols, model);
    let keep: std::collections::BTreeSet<u64> = apply_policy(&scored, policy).into_iter().collect();
    let mut out: Vec<Clause> = Vec::new();
    let mut present: std::collections::BTreeSet<ClauseId> = std::collections::BTreeSet::new();
    for c in pool {
        if keep.contains(&c.id.0) && present.insert(c.id) {
            out.push(c.clone());
        }
    }
    if always_include_conjecture {
        for c in neg_conjecture {
            if present.insert(c.id) {
                out.push(c.clone());
            }
        }
    }
    out
}

/// JSON-lines dump of premise scores, one object per pool clause in pool
/// order: {"id":..., "logit":..., "sigma":...}.
pub fn scores_to_jsonl(scored: &[ScoredClause]) -> String {
    let mut out = String::new();
    for s in scored {
        let line = serde_json::json!({
            "id": s.id,
            "logit": s.logit,
            "sigma": s.probability,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}
