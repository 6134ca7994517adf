//! Clause clustering: k-means and fuzzy c-means over point sets, weighted
//! interaction graphs with modularity-maximizing partitioning, and two
//! ways to make clusters overlap (membership cutoffs, hub sharing).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{squared_distance, Matrix};
use crate::scorer::sigmoid;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} exceeds the number of points {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("points have mixed dimensions: {first} vs {got}")]
    MixedDimensions { first: usize, got: usize },
    #[error("{0}")]
    BadParam(String),
}

/// Real vectors to cluster: either clause embeddings or rows of the
/// interaction matrix L.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<PointSet, ClusterError> {
        if points.is_empty() {
            return Err(ClusterError::EmptyPointSet);
        }
        let first = points[0].len();
        for p in &points {
            if p.len() != first {
                return Err(ClusterError::MixedDimensions { first, got: p.len() });
            }
        }
        Ok(PointSet { points })
    }

    /// Each row of the interaction matrix as a point (the default clause
    /// representation for distance-based clustering).
    pub fn from_interaction_rows(l: &Matrix) -> PointSet {
        PointSet {
            points: (0..l.rows).map(|i| l.row(i).to_vec()).collect(),
        }
    }

    /// Clause embeddings as points, in the embedding set's id order.
    pub fn from_embeddings(set: &crate::embedding::EmbeddingSet) -> PointSet {
        PointSet {
            points: set.vectors().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }
}

/// A set of vertex clusters over indices 0..n. Non-overlapping clusterings
/// are exact partitions; overlapping ones may share vertices but still
/// cover every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub clusters: Vec<Vec<usize>>,
    pub overlapping: bool,
}

impl Clustering {
    /// Check the structural invariants against a vertex count.
    pub fn validate(&self, n: usize) -> Result<(), String> {
        let mut seen = vec![0usize; n];
        for cluster in &self.clusters {
            if cluster.is_empty() {
                return Err("empty cluster".into());
            }
            for &v in cluster {
                if v >= n {
                    return Err(format!("vertex {v} out of range"));
                }
                seen[v] += 1;
            }
        }
        for (v, &count) in seen.iter().enumerate() {
            if count == 0 {
                return Err(format!("vertex {v} not covered"));
            }
            if !self.overlapping && count > 1 {
                return Err(format!("vertex {v} in {count} clusters of a partition"));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    /// Cluster index of each vertex for partitions (first containing
    /// cluster for overlapping clusterings).
    pub fn assignment(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (ci, cluster) in self.clusters.iter().enumerate() {
            for &v in cluster {
                if out[v] == usize::MAX {
                    out[v] = ci;
                }
            }
        }
        out
    }

    /// Serialize as JSON with vertex indices mapped through `ids`.
    pub fn to_json(&self, ids: &[u64]) -> String {
        let clusters: Vec<Vec<u64>> = self
            .clusters
            .iter()
            .map(|c| c.iter().map(|&v| ids[v]).collect())
            .collect();
        serde_json::json!({
            "overlapping": self.overlapping,
            "clusters": clusters,
        })
        .to_string()
    }
}

fn nearest_centroid(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (ci, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best_d {
            best_d = d;
            best = ci;
        }
    }
    best
}

fn kmeans_objective(ps: &PointSet, assignment: &[usize], centroids: &[Vec<f64>]) -> f64 {
    ps.points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| squared_distance(p, &centroids[c]))
        .sum()
}

/// Seeded k-means++ initialization: first centroid uniform, later ones
/// sampled proportionally to squared distance from the chosen set.
fn kmeans_pp_init(ps: &PointSet, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = ps.len();
    let mut centroids: Vec<Vec<f64>> = vec![ps.points[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = ps
        .points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total <= 0.0 {
            // All remaining points coincide with a centroid.
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        };
        centroids.push(ps.points[idx].clone());
        for (i, p) in ps.points.iter().enumerate() {
            let d = squared_distance(p, centroids.last().unwrap());
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

fn lloyd(ps: &PointSet, mut centroids: Vec<Vec<f64>>, max_iter: usize) -> (Vec<usize>, Vec<Vec<f64>>) {
    let k = centroids.len();
    let dim = ps.dim();
    let mut assignment: Vec<usize> = ps
        .points
        .iter()
        .map(|p| nearest_centroid(p, &centroids))
        .collect();
    for _ in 0..max_iter {
        // Means of the current clusters.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in ps.points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for s in sums[c].iter_mut() {
                    *s /= counts[c] as f64;
                }
                centroids[c] = sums[c].clone();
            }
        }
        // Empty-cluster repair: reseed with the point farthest from its
        // centroid (deterministic, smallest index on ties).
        for c in 0..k {
            if counts[c] == 0 {
                let (far, _) = ps
                    .points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, squared_distance(p, &centroids[assignment[i]])))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                centroids[c] = ps.points[far].clone();
                counts[c] = 1;
                assignment[far] = c;
            }
        }
        let next: Vec<usize> = ps
            .points
            .iter()
            .map(|p| nearest_centroid(p, &centroids))
            .collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }
    (assignment, centroids)
}

/// Single-point move refinement (Hartigan style): move a point to another
/// cluster whenever the exact objective change is negative, updating means
/// incrementally. Escapes Lloyd fixed points that are not move-optimal.
fn swap_refine(ps: &PointSet, assignment: &mut [usize], centroids: &mut [Vec<f64>]) -> bool {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &c in assignment.iter() {
        counts[c] += 1;
    }
    let mut improved_any = false;
    loop {
        let mut improved = false;
        for (i, point) in ps.points.iter().enumerate() {
            let a = assignment[i];
            if counts[a] <= 1 {
                continue;
            }
            let da = squared_distance(point, &centroids[a]);
            let leave_gain = counts[a] as f64 / (counts[a] - 1) as f64 * da;
            let mut best: Option<(f64, usize)> = None;
            for b in 0..k {
                if b == a {
                    continue;
                }
                let db = squared_distance(point, &centroids[b]);
                let delta = counts[b] as f64 / (counts[b] + 1) as f64 * db - leave_gain;
                if delta < -1e-12 && best.is_none_or(|(bd, _)| delta < bd) {
                    best = Some((delta, b));
                }
            }
            if let Some((_, b)) = best {
                for (d, x) in centroids[a].clone().iter().enumerate() {
                    centroids[a][d] = (x * counts[a] as f64 - point[d]) / (counts[a] - 1) as f64;
                }
                for (d, x) in centroids[b].clone().iter().enumerate() {
                    centroids[b][d] = (x * counts[b] as f64 + point[d]) / (counts[b] + 1) as f64;
                }
                counts[a] -= 1;
                counts[b] += 1;
                assignment[i] = b;
                improved = true;
                improved_any = true;
            }
        }
        if !improved {
            return improved_any;
        }
    }
}

const KMEANS_RESTARTS: usize = 16;

/// Lloyd's algorithm with seeded k-means++ initialization and move
/// refinement, restarted a fixed number of times with the best objective
/// kept. The returned state is a Lloyd fixed point: points sit with their
/// nearest centroid and centroids are cluster means.
pub fn kmeans(
    ps: &PointSet,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<(Clustering, Vec<Vec<f64>>), ClusterError> {
    let n = ps.len();
    if n == 0 {
        return Err(ClusterError::EmptyPointSet);
    }
    if k == 0 {
        return Err(ClusterError::BadParam("k must be >= 1".into()));
    }
    if k > n {
        return Err(ClusterError::KTooLarge { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>, Vec<Vec<f64>>)> = None;
    for _ in 0..KMEANS_RESTARTS {
        let init = kmeans_pp_init(ps, k, &mut rng);
        let (mut assignment, mut centroids) = lloyd(ps, init, max_iter);
        loop {
            if !swap_refine(ps, &mut assignment, &mut centroids) {
                break;
            }
            let (next_assignment, next_centroids) = lloyd(ps, centroids, max_iter);
            assignment = next_assignment;
            centroids = next_centroids;
        }
        let objective = kmeans_objective(ps, &assignment, &centroids);
        if best.as_ref().is_none_or(|(b, _, _)| objective < *b) {
            best = Some((objective, assignment, centroids));
        }
    }
    let (_, assignment, _) = best.unwrap();
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &c) in assignment.iter().enumerate() {
        clusters[c].push(v);
    }
    clusters.retain(|c| !c.is_empty());
    let centroids: Vec<Vec<f64>> = clusters
        .iter()
        .map(|cluster| {
            let mut mean = vec![0.0; ps.dim()];
            for &v in cluster {
                for (m, x) in mean.iter_mut().zip(&ps.points[v]) {
                    *m += x;
                }
            }
            for m in mean.iter_mut() {
                *m /= cluster.len() as f64;
            }
            mean
        })
        .collect();
    Ok((
        Clustering {
            clusters,
            overlapping: false,
        },
        centroids,
    ))
}

/// Fuzzy c-means outcome: membership matrix (rows = points, columns =
/// clusters, rows sum to 1), final centroids, and the objective after each
/// full update round.
#[derive(Debug, Clone)]
pub struct FcmOutcome {
    pub memberships: Matrix,
    pub centroids: Vec<Vec<f64>>,
    pub objective_trace: Vec<f64>,
}

/// Standard fuzzy c-means fixed-point iteration with fuzzifier m > 1.
/// Points coinciding with a centroid get full membership there (split
/// equally if several centroids coincide).
pub fn fuzzy_cmeans(ps: &PointSet, k: usize, m: f64, seed: u64) -> Result<FcmOutcome, ClusterError> {
    let n = ps.len();
    if n == 0 {
        return Err(ClusterError::EmptyPointSet);
    }
    if k == 0 || k > n {
        return Err(ClusterError::KTooLarge { k, n });
    }
    if !(m > 1.0) {
        return Err(ClusterError::BadParam("fuzzifier must be > 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = ps.dim();
    // Random memberships, rows normalized.
    let mut u = Matrix::zeros(n, k);
    for i in 0..n {
        let mut row: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = row.iter().sum();
        for x in row.iter_mut() {
            *x /= total;
        }
        for (j, x) in row.iter().enumerate() {
            u.set(i, j, *x);
        }
    }
    let mut centroids = vec![vec![0.0; dim]; k];
    let mut trace = Vec::new();
    for _ in 0..300 {
        // Centroids from memberships.
        for (j, centroid) in centroids.iter_mut().enumerate() {
            let mut num = vec![0.0; dim];
            let mut den = 0.0;
            for (i, p) in ps.points.iter().enumerate() {
                let w = u.get(i, j).powf(m);
                den += w;
                for (s, x) in num.iter_mut().zip(p) {
                    *s += w * x;
                }
            }
            if den > 0.0 {
                for (c, s) in centroid.iter_mut().zip(&num) {
                    *c = s / den;
                }
            }
        }
        // Memberships from centroids.
        let mut max_delta: f64 = 0.0;
        let exponent = 2.0 / (m - 1.0);
        for (i, p) in ps.points.iter().enumerate() {
            let d: Vec<f64> = centroids
                .iter()
                .map(|c| squared_distance(p, c).sqrt())
                .collect();
            let zeros: Vec<usize> = (0..k).filter(|&j| d[j] == 0.0).collect();
            let row: Vec<f64> = if !zeros.is_empty() {
                (0..k)
                    .map(|j| {
                        if zeros.contains(&j) {
                            1.0 / zeros.len() as f64
                        } else {
                            0.0
                        }
                    })
                    .collect()
            } else {
                (0..k)
                    .map(|j| {
                        let denom: f64 = (0..k).map(|l| (d[j] / d[l]).powf(exponent)).sum();
                        1.0 / denom
                    })
                    .collect()
            };
            for (j, x) in row.iter().enumerate() {
                max_delta = max_delta.max((u.get(i, j) - x).abs());
                u.set(i, j, *x);
            }
        }
        trace.push(fcm_objective(ps, &u, &centroids, m));
        if max_delta < 1e-10 {
            break;
        }
    }
    Ok(FcmOutcome {
        memberships: u,
        centroids,
        objective_trace: trace,
    })
}

/// The FCM objective: sum over points and clusters of u^m times squared
/// distance to the centroid.
pub fn fcm_objective(ps: &PointSet, u: &Matrix, centroids: &[Vec<f64>], m: f64) -> f64 {
    let mut total = 0.0;
    for (i, p) in ps.points.iter().enumerate() {
        for (j, c) in centroids.iter().enumerate() {
            total += u.get(i, j).powf(m) * squared_distance(p, c);
        }
    }
    total
}

/// Overlapping clusters from a membership matrix: a point joins every
/// cluster where its membership reaches the cutoff, and always joins its
/// argmax cluster. Empty clusters are dropped.
pub fn soft_clusters(u: &Matrix, cutoff: f64) -> Result<Clustering, ClusterError> {
    if !(cutoff > 0.0 && cutoff <= 1.0) {
        return Err(ClusterError::BadParam("cutoff must lie in (0, 1]".into()));
    }
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); u.cols];
    for i in 0..u.rows {
        let mut argmax = 0;
        for j in 1..u.cols {
            if u.get(i, j) > u.get(i, argmax) {
                argmax = j;
            }
        }
        for (j, cluster) in clusters.iter_mut().enumerate() {
            if u.get(i, j) >= cutoff || j == argmax {
                cluster.push(i);
            }
        }
    }
    clusters.retain(|c| !c.is_empty());
    Ok(Clustering {
        clusters,
        overlapping: true,
    })
}

/// Weighted clause-interaction graph. Vertices are indices aligned with
/// `ids`; edges are undirected with finite nonnegative weights and no
/// self-loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub n: usize,
    pub ids: Vec<u64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> WeightedGraph {
        let mut g = WeightedGraph {
            n,
            ids: (0..n as u64).collect(),
            edges: Vec::with_capacity(edges.len()),
        };
        for (i, j, w) in edges {
            assert!(i != j, "self-loops are not allowed");
            assert!(i < n && j < n, "edge endpoint out of range");
            assert!(w.is_finite() && w >= 0.0, "weights must be finite and >= 0");
            g.edges.push((i.min(j), i.max(j), w));
        }
        g
    }

    pub fn with_ids(mut self, ids: Vec<u64>) -> WeightedGraph {
        assert_eq!(ids.len(), self.n, "one id per vertex");
        self.ids = ids;
        self
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for &(i, j, w) in &self.edges {
            deg[i] += w;
            deg[j] += w;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, w) in &self.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    /// Plain-text edge list, one `id_i id_j weight` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(i, j, w) in &self.edges {
            out.push_str(&format!("{} {} {}\n", self.ids[i], self.ids[j], w));
        }
        out
    }
}

/// Build the clause-interaction graph from the logit matrix L: vertices
/// are clause indices, and (i, j) is an edge with weight sigma(L[i][j])
/// whenever that probability reaches the threshold.
pub fn graph_from_l(l: &Matrix, edge_threshold: f64) -> WeightedGraph {
    assert_eq!(l.rows, l.cols, "interaction matrix must be square");
    let mut edges = Vec::new();
    for i in 0..l.rows {
        for j in (i + 1)..l.cols {
            let w = sigmoid(l.get(i, j));
            if w >= edge_threshold {
                edges.push((i, j, w));
            }
        }
    }
    WeightedGraph::new(l.rows, edges)
}

/// Newman modularity of a partition: sum over clusters of
/// w_in/w_total - (deg/(2 w_total))^2. Zero for graphs without edges.
pub fn modularity(g: &WeightedGraph, clustering: &Clustering) -> f64 {
    assert!(!clustering.overlapping, "modularity needs a partition");
    clustering
        .validate(g.n)
        .expect("clustering must partition the vertices");
    let m = g.total_weight();
    if m <= 0.0 {
        return 0.0;
    }
    let assignment = clustering.assignment(g.n);
    let deg = g.weighted_degrees();
    let k = clustering.k();
    let mut w_in = vec![0.0; k];
    let mut deg_sum = vec![0.0; k];
    for &(i, j, w) in &g.edges {
        if assignment[i] == assignment[j] {
            w_in[assignment[i]] += w;
        }
    }
    for (v, &c) in assignment.iter().enumerate() {
        deg_sum[c] += deg[v];
    }
    (0..k)
        .map(|c| w_in[c] / m - (deg_sum[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Aggregated working graph for Louvain: adjacency map plus per-vertex
/// self-loop weight (internal weight of the community a vertex stands for).
struct WorkGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
}

impl WorkGraph {
    fn n(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loop[v]
    }
}

/// One vertex-move pass plus aggregation level; returns the community of
/// each vertex (community ids compacted) or None when nothing moved.
fn louvain_level(g: &WorkGraph, total_weight: f64, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = g.n();
    let m = total_weight;
    let mut community: Vec<usize> = (0..n).collect();
    let k_v: Vec<f64> = (0..n).map(|v| g.degree(v)).collect();
    let mut sigma_tot: Vec<f64> = k_v.clone();
    let mut moved_any = false;
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        let mut moved_this_pass = false;
        order.shuffle(rng);
        for &v in &order {
            let current = community[v];
            // Weights from v to each neighboring community.
            let mut to_comm: std::collections::HashMap<usize, f64> = std::collections::HashMap::new();
            to_comm.insert(current, 0.0);
            for &(u, w) in &g.adj[v] {
                *to_comm.entry(community[u]).or_insert(0.0) += w;
            }
            sigma_tot[current] -= k_v[v];
            let gain = |c: usize| {
                let k_in = to_comm.get(&c).copied().unwrap_or(0.0);
                k_in / m - sigma_tot[c] * k_v[v] / (2.0 * m * m)
            };
            let stay = gain(current);
            let mut best_comm = current;
            let mut best_gain = stay;
            let mut candidates: Vec<usize> = to_comm.keys().copied().collect();
            candidates.sort_unstable();
            for c in candidates {
                let gc = gain(c);
                if gc > best_gain + 1e-12 || (gc > best_gain && c < best_comm) {
                    best_gain = gc;
                    best_comm = c;
                }
            }
            sigma_tot[best_comm] += k_v[v];
            if best_comm != current {
                community[v] = best_comm;
                moved_this_pass = true;
                moved_any = true;
            }
        }
        if !moved_this_pass {
            break;
        }
    }
    if !moved_any {
        return None;
    }
    // Compact community ids preserving order of first appearance.
    let mut remap: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut compact = vec![0usize; n];
    for v in 0..n {
        let next = remap.len();
        let id = *remap.entry(community[v]).or_insert(next);
        compact[v] = id;
    }
    Some(compact)
}

fn aggregate(g: &WorkGraph, community: &[usize], k: usize) -> WorkGraph {
    let mut self_loop = vec![0.0; k];
    let mut edge_weight: std::collections::HashMap<(usize, usize), f64> =
        std::collections::HashMap::new();
    for (v, &cv) in community.iter().enumerate() {
        self_loop[cv] += g.self_loop[v];
        for &(u, w) in &g.adj[v] {
            if u < v {
                continue;
            }
            let (cu, cw) = (community[u], w);
            if cu == cv {
                self_loop[cv] += cw;
            } else {
                let key = (cv.min(cu), cv.max(cu));
                *edge_weight.entry(key).or_insert(0.0) += cw;
            }
        }
    }
    let mut adj = vec![Vec::new(); k];
    let mut keys: Vec<(usize, usize)> = edge_weight.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let w = edge_weight[&key];
        adj[key.0].push((key.1, w));
        adj[key.1].push((key.0, w));
    }
    WorkGraph { adj, self_loop }
}

/// Louvain outcome: the clustering plus the modularity after each
/// aggregation level (for monotonicity checks).
#[derive(Debug, Clone)]
pub struct LouvainOutcome {
    pub clustering: Clustering,
    pub q_trace: Vec<f64>,
}

/// Greedy modularity optimization (vertex-move passes plus graph
/// aggregation). With `target_k` set, cluster pairs are merged afterwards
/// until at most that many remain, each merge choosing the pair whose
/// union has the smallest external cut.
pub fn louvain_detailed(g: &WeightedGraph, seed: u64, target_k: Option<usize>) -> LouvainOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = WorkGraph {
        adj: g.adjacency(),
        self_loop: vec![0.0; g.n],
    };
    let m = g.total_weight();
    // membership[v] = current community of original vertex v.
    let mut membership: Vec<usize> = (0..g.n).collect();
    let mut q_trace = Vec::new();
    if m > 0.0 {
        loop {
            let Some(community) = louvain_level(&work, m, &mut rng) else {
                break;
            };
            let k = community.iter().copied().max().unwrap_or(0) + 1;
            for slot in membership.iter_mut() {
                *slot = community[*slot];
            }
            work = aggregate(&work, &community, k);
            q_trace.push(modularity(g, &partition_from(&membership, k)));
            if k == community.len() {
                break;
            }
        }
    }
    let k = membership.iter().copied().max().unwrap_or(0) + 1;
    let mut clustering = partition_from(&membership, k);
    if let Some(cap) = target_k {
        clustering = merge_to_target(g, clustering, cap.max(1));
    }
    LouvainOutcome { clustering, q_trace }
}

pub fn louvain(g: &WeightedGraph, seed: u64, target_k: Option<usize>) -> Clustering {
    louvain_detailed(g, seed, target_k).clustering
}

fn partition_from(membership: &[usize], k: usize) -> Clustering {
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &c) in membership.iter().enumerate() {
        clusters[c].push(v);
    }
    clusters.retain(|c| !c.is_empty());
    Clustering {
        clusters,
        overlapping: false,
    }
}

/// Soft cap on cluster count: repeatedly merge the pair of clusters whose
/// union would have the smallest cut to the rest of the graph (preferring
/// strongly interconnected pairs), until at most `target_k` remain.
fn merge_to_target(g: &WeightedGraph, clustering: Clustering, target_k: usize) -> Clustering {
    let mut clusters = clustering.clusters;
    let deg = g.weighted_degrees();
    while clusters.len() > target_k {
        let k = clusters.len();
        let mut assignment = vec![usize::MAX; g.n];
        for (ci, cluster) in clusters.iter().enumerate() {
            for &v in cluster {
                assignment[v] = ci;
            }
        }
        let mut internal = vec![0.0; k];
        let mut between = vec![vec![0.0; k]; k];
        for &(i, j, w) in &g.edges {
            let (ci, cj) = (assignment[i], assignment[j]);
            if ci == cj {
                internal[ci] += w;
            } else {
                between[ci.min(cj)][ci.max(cj)] += w;
            }
        }
        let external =
            |c: usize| -> f64 { clusters[c].iter().map(|&v| deg[v]).sum::<f64>() - 2.0 * internal[c] };
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..k {
            for b in (a + 1)..k {
                let cut = external(a) + external(b) - 2.0 * between[a][b];
                if best.is_none_or(|(bc, _, _)| cut < bc - 1e-12) {
                    best = Some((cut, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("at least two clusters to merge");
        let absorbed = clusters.remove(b);
        clusters[a].extend(absorbed);
        clusters[a].sort_unstable();
    }
    Clustering {
        clusters,
        overlapping: false,
    }
}

/// Overlapping clusters by hub sharing: remove the top `hub_fraction` of
/// vertices by weighted degree, cluster the remainder with Louvain, then
/// add every hub to all clusters.
pub fn overlap_by_hubs(
    g: &WeightedGraph,
    hub_fraction: f64,
    seed: u64,
    target_k: Option<usize>,
) -> Result<Clustering, ClusterError> {
    if !(0.0..=0.5).contains(&hub_fraction) {
        return Err(ClusterError::BadParam(
            "hub fraction must lie in [0, 0.5]".into(),
        ));
    }
    let n_hubs = (hub_fraction * g.n as f64).floor() as usize;
    if n_hubs == 0 {
        return Ok(louvain(g, seed, target_k));
    }
    let deg = g.weighted_degrees();
    let mut by_degree: Vec<usize> = (0..g.n).collect();
    by_degree.sort_by(|&a, &b| deg[b].total_cmp(&deg[a]).then(a.cmp(&b)));
    let hubs: Vec<usize> = by_degree[..n_hubs].to_vec();
    let is_hub: Vec<bool> = {
        let mut flags = vec![false; g.n];
        for &h in &hubs {
            flags[h] = true;
        }
        flags
    };
    // Induced subgraph on the remaining vertices.
    let rest: Vec<usize> = (0..g.n).filter(|&v| !is_hub[v]).collect();
    if rest.is_empty() {
        let mut cluster = hubs.clone();
        cluster.sort_unstable();
        return Ok(Clustering {
            clusters: vec![cluster],
            overlapping: true,
        });
    }
    let mut to_sub = vec![usize::MAX; g.n];
    for (si, &v) in rest.iter().enumerate() {
        to_sub[v] = si;
    }
    let sub_edges: Vec<(usize, usize, f64)> = g
        .edges
        .iter()
        .filter(|&&(i, j, _)| !is_hub[i] && !is_hub[j])
        .map(|&(i, j, w)| (to_sub[i], to_sub[j], w))
        .collect();
    let sub = WeightedGraph::new(rest.len(), sub_edges);
    let base = louvain(&sub, seed, target_k);
    let mut clusters: Vec<Vec<usize>> = base
        .clusters
        .iter()
        .map(|cluster| {
            let mut mapped: Vec<usize> = cluster.iter().map(|&si| rest[si]).collect();
            mapped.extend(hubs.iter().copied());
            mapped.sort_unstable();
            mapped
        })
        .collect();
    if clusters.is_empty() {
        let mut cluster = hubs.clone();
        cluster.sort_unstable();
        clusters.push(cluster);
    }
    Ok(Clustering {
        clusters,
        overlapping: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points_1d(xs: &[f64]) -> PointSet {
        PointSet::new(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn kmeans_separates_two_obvious_groups() {
        let ps = points_1d(&[0.0, 0.1, 10.0, 10.1]);
        let (clustering, centroids) = kmeans(&ps, 2, 0, 100).unwrap();
        clustering.validate(4).unwrap();
        let mut clusters = clustering.clusters.clone();
        clusters.sort();
        assert_eq!(clusters, vec![vec![0, 1], vec![2, 3]]);
        let mut cs: Vec<f64> = centroids.iter().map(|c| c[0]).collect();
        cs.sort_by(f64::total_cmp);
        assert!((cs[0] - 0.05).abs() < 1e-12);
        assert!((cs[1] - 10.05).abs() < 1e-12);
    }

    #[test]
    fn kmeans_with_one_cluster_returns_the_mean() {
        let ps = points_1d(&[1.0, 2.0, 6.0]);
        let (clustering, centroids) = kmeans(&ps, 1, 0, 100).unwrap();
        assert_eq!(clustering.clusters, vec![vec![0, 1, 2]]);
        assert!((centroids[0][0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kmeans_rejects_oversized_k() {
        let ps = points_1d(&[1.0, 2.0]);
        assert_eq!(
            kmeans(&ps, 3, 0, 100).unwrap_err(),
            ClusterError::KTooLarge { k: 3, n: 2 }
        );
    }

    /// Exhaustive 2-partition optimum of the k-means objective.
    fn brute_force_two_cluster_objective(ps: &PointSet) -> f64 {
        let n = ps.len();
        let dim = ps.dim();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << n) - 1 {
            let mut sums = [vec![0.0; dim], vec![0.0; dim]];
            let mut counts = [0usize; 2];
            for (i, p) in ps.points.iter().enumerate() {
                let side = ((mask >> i) & 1) as usize;
                counts[side] += 1;
                for (s, x) in sums[side].iter_mut().zip(p) {
                    *s += x;
                }
            }
            let mut objective = 0.0;
            for (i, p) in ps.points.iter().enumerate() {
                let side = ((mask >> i) & 1) as usize;
                let mean: Vec<f64> = sums[side].iter().map(|s| s / counts[side] as f64).collect();
                objective += squared_distance(p, &mean);
            }
            if objective < best {
                best = objective;
            }
        }
        best
    }

    #[test]
    fn kmeans_matches_the_exhaustive_two_cluster_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..20 {
            let ps = PointSet::new(
                (0..8)
                    .map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
                    .collect(),
            )
            .unwrap();
            let (clustering, centroids) = kmeans(&ps, 2, trial, 200).unwrap();
            let assignment = clustering.assignment(8);
            let got = kmeans_objective(&ps, &assignment, &centroids);
            let best = brute_force_two_cluster_objective(&ps);
            assert!(
                (got - best).abs() <= 1e-9 * (1.0 + best),
                "trial {trial}: kmeans {got} vs optimum {best}"
            );
        }
    }

    #[test]
    fn kmeans_post_state_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ps = PointSet::new(
            (0..12)
                .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
                .collect(),
        )
        .unwrap();
        let (clustering, centroids) = kmeans(&ps, 3, 1, 200).unwrap();
        clustering.validate(12).unwrap();
        // Every point sits in the cluster of its nearest centroid.
        let assignment = clustering.assignment(12);
        for (i, p) in ps.points.iter().enumerate() {
            assert_eq!(assignment[i], nearest_centroid(p, &centroids), "point {i}");
        }
        // Every centroid is the mean of its cluster.
        for (c, cluster) in clustering.clusters.iter().enumerate() {
            for (dimension, &value) in centroids[c].iter().enumerate() {
                let mean: f64 = cluster.iter().map(|&v| ps.points[v][dimension]).sum::<f64>()
                    / cluster.len() as f64;
                assert!((value - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fcm_two_points_two_clusters_is_crisp() {
        let ps = points_1d(&[0.0, 1.0]);
        let out = fuzzy_cmeans(&ps, 2, 2.0, 0).unwrap();
        let u = &out.memberships;
        // Identity up to cluster order.
        let first = u.get(0, 0) > 0.5;
        let big = |i: usize, j: usize| u.get(i, j) > 1.0 - 1e-6;
        if first {
            assert!(big(0, 0) && big(1, 1));
        } else {
            assert!(big(0, 1) && big(1, 0));
        }
    }

    #[test]
    fn fcm_equidistant_point_splits_evenly() {
        let ps = points_1d(&[0.0, 1.0, 0.5]);
        let out = fuzzy_cmeans(&ps, 2, 2.0, 4).unwrap();
        let u = &out.memberships;
        assert!((u.get(2, 0) - 0.5).abs() < 1e-6, "{}", u.get(2, 0));
        assert!((u.get(2, 1) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn fcm_rows_sum_to_one_and_objective_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ps = PointSet::new(
            (0..15)
                .map(|_| vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
                .collect(),
        )
        .unwrap();
        let out = fuzzy_cmeans(&ps, 3, 1.7, 2).unwrap();
        let u = &out.memberships;
        for i in 0..u.rows {
            let row_sum: f64 = (0..u.cols).map(|j| u.get(i, j)).sum();
            assert!((row_sum - 1.0).abs() < 1e-9, "row {i} sums to {row_sum}");
            for j in 0..u.cols {
                let x = u.get(i, j);
                assert!((0.0..=1.0).contains(&x));
            }
        }
        for w in out.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "objective rose: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn soft_clusters_cutoff_one_is_the_argmax_partition() {
        let ps = points_1d(&[0.0, 0.2, 5.0, 5.2]);
        let out = fuzzy_cmeans(&ps, 2, 2.0, 0).unwrap();
        let clustering = soft_clusters(&out.memberships, 1.0).unwrap();
        // With cutoff 1.0 only argmax membership applies, so clusters are
        // disjoint even though the type says overlapping.
        let mut seen = vec![0; 4];
        for cluster in &clustering.clusters {
            for &v in cluster {
                seen[v] += 1;
            }
        }
        assert_eq!(seen, vec![1, 1, 1, 1]);
    }

    #[test]
    fn soft_clusters_half_cutoff_shares_the_equidistant_point() {
        let u = Matrix::from_rows(vec![
            vec![0.9, 0.1],
            vec![0.1, 0.9],
            vec![0.5, 0.5],
        ]);
        let clustering = soft_clusters(&u, 0.5).unwrap();
        let in_both = clustering.clusters.iter().filter(|c| c.contains(&2)).count();
        assert_eq!(in_both, 2, "equidistant point joins both clusters");
        let mut clusters = clustering.clusters.clone();
        clusters.sort();
        assert_eq!(clusters, vec![vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn soft_cluster_sizes_match_a_membership_scan() {
        let ps = points_1d(&[0.0, 1.0, 0.45, 0.2, 0.9]);
        let out = fuzzy_cmeans(&ps, 2, 2.0, 4).unwrap();
        let u = &out.memberships;
        for cutoff in [0.3, 0.5, 0.7, 1.0] {
            let clustering = soft_clusters(u, cutoff).unwrap();
            let mut expected: Vec<usize> = (0..u.cols)
                .map(|j| {
                    (0..u.rows)
                        .filter(|&i| {
                            let argmax = (0..u.cols)
                                .max_by(|&a, &b| {
                                    u.get(i, a).total_cmp(&u.get(i, b)).then(b.cmp(&a))
                                })
                                .unwrap();
                            u.get(i, j) >= cutoff || argmax == j
                        })
                        .count()
                })
                .filter(|&size| size > 0)
                .collect();
            expected.sort_unstable();
            let mut got: Vec<usize> = clustering.clusters.iter().map(Vec::len).collect();
            got.sort_unstable();
            assert_eq!(got, expected, "cutoff {cutoff}");
        }
    }

    #[test]
    fn graph_from_l_thresholding() {
        let mut l = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    l.set(i, j, (i + j) as f64 - 2.5);
                }
            }
        }
        let edgeless = graph_from_l(&l, 1.0);
        assert!(edgeless.edges.is_empty(), "sigma < 1 always");
        let complete = graph_from_l(&l, 0.0);
        assert_eq!(complete.edges.len(), 6);
        // Edge count matches a direct scan and thresholds are monotone.
        let mut previous = usize::MAX;
        for threshold in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let g = graph_from_l(&l, threshold);
            let expect = (0..4)
                .flat_map(|i| ((i + 1)..4).map(move |j| (i, j)))
                .filter(|&(i, j)| sigmoid(l.get(i, j)) >= threshold)
                .count();
            assert_eq!(g.edges.len(), expect);
            assert!(g.edges.len() <= previous, "raising threshold added edges");
            previous = g.edges.len();
            for &(i, j, w) in &g.edges {
                assert!(i < j && w >= threshold);
            }
        }
    }

    /// Two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
    fn bridged_triangles() -> WeightedGraph {
        WeightedGraph::new(
            6,
            vec![
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
                (2, 3, 1.0),
            ],
        )
    }

    #[test]
    fn modularity_of_single_cluster_is_zero() {
        let g = bridged_triangles();
        let single = Clustering {
            clusters: vec![(0..6).collect()],
            overlapping: false,
        };
        assert!(modularity(&g, &single).abs() < 1e-12);
    }

    #[test]
    fn modularity_of_bridge_split_is_five_fourteenths() {
        let g = bridged_triangles();
        let split = Clustering {
            clusters: vec![vec![0, 1, 2], vec![3, 4, 5]],
            overlapping: false,
        };
        let q = modularity(&g, &split);
        assert!((q - 5.0 / 14.0).abs() < 1e-12, "got {q}");
        // No 2-partition scores higher (exhaustive check).
        for mask in 1u32..(1 << 6) - 1 {
            let a: Vec<usize> = (0..6).filter(|&v| mask & (1 << v) != 0).collect();
            let b: Vec<usize> = (0..6).filter(|&v| mask & (1 << v) == 0).collect();
            let clustering = Clustering {
                clusters: vec![a, b],
                overlapping: false,
            };
            assert!(modularity(&g, &clustering) <= q + 1e-12);
        }
    }

    #[test]
    fn modularity_stays_in_known_bounds_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let n = rng.gen_range(4..10);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((i, j, rng.gen_range(0.1..2.0)));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = WeightedGraph::new(n, edges);
            let clustering = louvain(&g, 0, None);
            let q = modularity(&g, &clustering);
            assert!((-0.5..1.0).contains(&q), "Q = {q} out of bounds");
        }
    }

    #[test]
    fn louvain_finds_two_disjoint_cliques() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j, 1.0));
                edges.push((i + 4, j + 4, 1.0));
            }
        }
        let g = WeightedGraph::new(8, edges);
        let clustering = louvain(&g, 0, None);
        let mut clusters = clustering.clusters.clone();
        clusters.sort();
        assert_eq!(clusters, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        // Disconnected graph: final Q must be nonnegative, and at least the
        // trivial baselines.
        let q = modularity(&g, &clustering);
        assert!(q >= 0.0);
        let singletons = Clustering {
            clusters: (0..8).map(|v| vec![v]).collect(),
            overlapping: false,
        };
        let single = Clustering {
            clusters: vec![(0..8).collect()],
            overlapping: false,
        };
        assert!(q >= modularity(&g, &singletons));
        assert!(q >= modularity(&g, &single));
    }

    #[test]
    fn louvain_splits_bridged_triangles_at_the_bridge() {
        let g = bridged_triangles();
        let outcome = louvain_detailed(&g, 0, None);
        let mut clusters = outcome.clustering.clusters.clone();
        clusters.sort();
        assert_eq!(clusters, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        for w in outcome.q_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "level decreased Q");
        }
    }

    #[test]
    fn louvain_is_deterministic_per_seed() {
        let g = bridged_triangles();
        for seed in 0..5 {
            let a = louvain(&g, seed, None);
            let b = louvain(&g, seed, None);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn target_k_caps_the_cluster_count() {
        // Four 3-cliques in a ring, weakly connected.
        let mut edges = Vec::new();
        for c in 0..4 {
            let base = 3 * c;
            edges.push((base, base + 1, 1.0));
            edges.push((base + 1, base + 2, 1.0));
            edges.push((base, base + 2, 1.0));
        }
        for c in 0..4 {
            edges.push((3 * c + 2, (3 * ((c + 1) % 4)) % 12, 0.1));
        }
        let g = WeightedGraph::new(12, edges);
        let free = louvain(&g, 0, None);
        assert_eq!(free.k(), 4);
        let capped = louvain(&g, 0, Some(2));
        assert_eq!(capped.k(), 2);
        capped.validate(12).unwrap();
        let loose = louvain(&g, 0, Some(10));
        assert_eq!(loose.k(), 4, "cap above the natural count changes nothing");
    }

    #[test]
    fn hub_overlap_zero_fraction_matches_base() {
        let g = bridged_triangles();
        let base = louvain(&g, 3, None);
        let overlapped = overlap_by_hubs(&g, 0.0, 3, None).unwrap();
        assert_eq!(base.clusters, overlapped.clusters);
    }

    #[test]
    fn hub_overlap_puts_the_star_center_everywhere() {
        // Star with center 0 and two attached pairs to give the remainder
        // some structure.
        let g = WeightedGraph::new(
            5,
            vec![
                (0, 1, 1.0),
                (0, 2, 1.0),
                (0, 3, 1.0),
                (0, 4, 1.0),
                (1, 2, 1.0),
                (3, 4, 1.0),
            ],
        );
        let clustering = overlap_by_hubs(&g, 0.2, 0, None).unwrap();
        assert!(clustering.overlapping);
        assert!(clustering.k() >= 2);
        for cluster in &clustering.clusters {
            assert!(cluster.contains(&0), "hub missing from {cluster:?}");
        }
        clustering.validate(5).unwrap();
    }

    #[test]
    fn every_hub_lands_in_every_cluster() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for trial in 0..10 {
            let n = rng.gen_range(6..12);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.5) {
                        edges.push((i, j, rng.gen_range(0.2..1.5)));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = WeightedGraph::new(n, edges);
            let fraction = 0.3;
            let clustering = overlap_by_hubs(&g, fraction, trial, None).unwrap();
            clustering.validate(n).unwrap();
            let n_hubs = (fraction * n as f64).floor() as usize;
            let deg = g.weighted_degrees();
            let mut by_degree: Vec<usize> = (0..n).collect();
            by_degree.sort_by(|&a, &b| deg[b].total_cmp(&deg[a]).then(a.cmp(&b)));
            for &hub in &by_degree[..n_hubs] {
                for cluster in &clustering.clusters {
                    assert!(cluster.contains(&hub));
                }
            }
        }
    }

    #[test]
    fn clustering_json_uses_clause_ids() {
        let clustering = Clustering {
            clusters: vec![vec![0, 2], vec![1]],
            overlapping: false,
        };
        let json = clustering.to_json(&[10, 20, 30]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["overlapping"], false);
        assert_eq!(v["clusters"][0][0], 10);
        assert_eq!(v["clusters"][0][1], 30);
        assert_eq!(v["clusters"][1][0], 20);
    }

    #[test]
    fn edge_list_roundtrips_ids() {
        let g = WeightedGraph::new(3, vec![(0, 1, 0.75), (1, 2, 0.5)]).with_ids(vec![7, 8, 9]);
        let text = g.to_edge_list();
        assert_eq!(text, "7 8 0.75\n8 9 0.5\n");
    }
}
