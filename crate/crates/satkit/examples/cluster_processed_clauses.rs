//! Clustering a processed clause set three ways.
//!
//! Saturates a group-theory problem to a budget, embeds the processed
//! clauses, scores every pairwise interaction, and compares hard k-means
//! on interaction rows, fuzzy c-means with a membership cutoff, and
//! Louvain modularity clustering on the thresholded interaction graph.

use satkit::cluster::{
    fuzzy_cmeans, graph_from_l, kmeans, louvain, modularity, soft_clusters, Clustering, PointSet,
};
use satkit::embedding::embed_clauses;
use satkit::harness::default_model;
use satkit::harness::generate::{group_theorem, GroupGoal};
use satkit::logic::tptp::parse_tptp_cnf;
use satkit::logic::Origin;
use satkit::saturation::{saturate, SaturationLimit, Selector};
use satkit::scorer::{interaction_matrix, sigmoid};

fn sizes(c: &Clustering) -> Vec<usize> {
    c.clusters.iter().map(Vec::len).collect()
}

fn main() {
    let generated = group_theorem(GroupGoal::RightIdentity, 2);
    let problem = parse_tptp_cnf(&generated.text).expect("generated problem parses");
    let outcome = saturate(
        &problem,
        SaturationLimit::processed(60),
        &Selector::default(),
        0,
    );
    let processed = &outcome.processed;
    println!(
        "{}: processed {} clauses before the budget ran out",
        generated.stem,
        processed.len()
    );

    // Embed the processed set jointly with its conjecture clauses, then
    // score all pairs with the (untrained) default model.
    let model = default_model();
    let conjecture: Vec<_> = processed
        .iter()
        .filter(|c| c.origin == Origin::NegatedConjecture)
        .cloned()
        .collect();
    let embeddings = embed_clauses(processed, &conjecture, &problem.symbols, &model.embedder);
    let vectors: Vec<Vec<f64>> = processed
        .iter()
        .map(|c| embeddings.get(c.id).expect("embedded").to_vec())
        .collect();
    let l = interaction_matrix(&vectors, &model.params);
    let n = processed.len();

    // Hard k-means on the rows of the interaction matrix.
    let ps = PointSet::from_interaction_rows(&l);
    let (hard, _centroids) = kmeans(&ps, 4, 0, 200).expect("k-means on processed set");
    hard.validate(n).expect("k-means returns a partition");
    println!("k-means (k=4) component sizes: {:?}", sizes(&hard));

    // Fuzzy c-means: memberships are a row-stochastic matrix, and a
    // cutoff turns them into overlapping components.
    let fcm = fuzzy_cmeans(&ps, 4, 2.0, 0).expect("fuzzy c-means on processed set");
    for i in 0..n {
        let row: f64 = (0..4).map(|j| fcm.memberships.get(i, j)).sum();
        assert!((row - 1.0).abs() < 1e-9, "membership row {} sums to {}", i, row);
    }
    let soft = soft_clusters(&fcm.memberships, 0.3).expect("cutoff in range");
    let shared: usize = soft.clusters.iter().map(Vec::len).sum::<usize>() - n;
    println!(
        "fuzzy c-means (k=4, cutoff 0.3) component sizes: {:?} ({} clauses sit in several)",
        sizes(&soft),
        shared
    );

    // Louvain on the sigmoid-thresholded interaction graph. An untrained
    // model scores every pair mildly positive, so a fixed 0.5 threshold
    // would keep the graph complete; take the 80th percentile of the
    // observed edge weights instead so only the strongest links survive.
    let mut weights: Vec<f64> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| sigmoid(l.get(i, j)))
        .collect();
    weights.sort_by(f64::total_cmp);
    let threshold = weights[(weights.len() as f64 * 0.8) as usize];
    let graph = graph_from_l(&l, threshold);
    println!(
        "interaction graph at threshold {:.3}: {} vertices, {} edges",
        threshold,
        n,
        graph.edges.len()
    );
    let communities = louvain(&graph, 0, None);
    communities.validate(n).expect("louvain returns a partition");
    let q = modularity(&graph, &communities);
    let whole = Clustering {
        clusters: vec![(0..n).collect()],
        overlapping: false,
    };
    println!(
        "louvain: {} communities, sizes {:?}, modularity {:.4}",
        communities.clusters.len(),
        sizes(&communities),
        q
    );
    assert!(
        q >= modularity(&graph, &whole),
        "louvain should not lose to the trivial partition"
    );
}
