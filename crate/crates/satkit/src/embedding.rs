//! Symbol-anonymized clause graphs and a fixed message-passing embedder.
//!
//! Clauses are turned into a graph with three node classes (term/subterm,
//! clause, symbol) and typed edges. Initial node vectors depend only on
//! node class, arity, an app/var or function/predicate tag, and the
//! conjecture flag, never on symbol names. A fixed number of mean-aggregate
//! message-passing rounds with seeded random linear maps produces one
//! vector per clause. Neighbor vectors are summed in sorted order, so two
//! isomorphic graphs embed bit-identically; consistently renaming symbols
//! therefore leaves every clause embedding unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::linalg::{axpy, Matrix};
use crate::logic::{Clause, ClauseId, Sym, SymbolKind, SymbolTable, Term};

/// Embedder settings. The seed fixes all random projection weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    pub layers: usize,
    pub d: usize,
    pub seed: u64,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        EmbedderConfig {
            layers: 3,
            d: 32,
            seed: 0,
        }
    }
}

impl EmbedderConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.layers < 1 {
            return Err("embedder layers must be >= 1".into());
        }
        if self.d < 2 {
            return Err("embedding dimension must be >= 2".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeClass {
    Term,
    Clause,
    Symbol,
}

#[derive(Debug, Clone, Copy)]
struct NodeInfo {
    class: NodeClass,
    arity: usize,
    /// Term: 0 application, 1 variable. Symbol: 0 function, 1 predicate.
    /// Clause: always 0.
    tag: u8,
    is_conjecture: bool,
}

/// Relation slots for typed message passing. Each undirected edge type is
/// split into its two directions so parents and children aggregate through
/// different learned-free maps.
const SLOT_COUNT: usize = 8;
const SLOT_TERM_CHILDREN: usize = 0; // parent term <- its argument subterms
const SLOT_TERM_PARENTS: usize = 1; // subterm <- terms it occurs under
const SLOT_CLAUSE_POS_ATOMS: usize = 2; // clause <- positive atoms
const SLOT_CLAUSE_NEG_ATOMS: usize = 3; // clause <- negative atoms
const SLOT_ATOM_POS_CLAUSES: usize = 4; // atom <- clauses with it positive
const SLOT_ATOM_NEG_CLAUSES: usize = 5; // atom <- clauses with it negative
const SLOT_SYMBOL_OCCURRENCES: usize = 6; // symbol <- application nodes
const SLOT_OCCURRENCE_SYMBOL: usize = 7; // application <- its symbol node

/// Shared-subterm graph over a clause list. Ground subterms are shared
/// globally; subterms containing variables are shared only within their
/// clause (variables are clause-scoped).
#[derive(Debug)]
pub struct ClauseGraph {
    nodes: Vec<NodeInfo>,
    adj: Vec<[Vec<u32>; SLOT_COUNT]>,
    /// Clause node ids aligned with the deduplicated input order.
    clause_nodes: Vec<(ClauseId, u32)>,
}

impl ClauseGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn term_node_count(&self) -> usize {
        self.count_class(NodeClass::Term)
    }

    pub fn clause_node_count(&self) -> usize {
        self.count_class(NodeClass::Clause)
    }

    pub fn symbol_node_count(&self) -> usize {
        self.count_class(NodeClass::Symbol)
    }

    fn count_class(&self, class: NodeClass) -> usize {
        self.nodes.iter().filter(|n| n.class == class).count()
    }

    pub fn clause_ids(&self) -> Vec<ClauseId> {
        self.clause_nodes.iter().map(|(id, _)| *id).collect()
    }
}

struct GraphBuilder {
    nodes: Vec<NodeInfo>,
    adj: Vec<[Vec<u32>; SLOT_COUNT]>,
    clause_nodes: Vec<(ClauseId, u32)>,
    /// (serialized term, clause scope for non-ground terms) -> node.
    term_index: HashMap<(String, Option<usize>), u32>,
    symbol_index: HashMap<Sym, u32>,
}

impl GraphBuilder {
    fn new() -> Self {
        GraphBuilder {
            nodes: Vec::new(),
            adj: Vec::new(),
            clause_nodes: Vec::new(),
            term_index: HashMap::new(),
            symbol_index: HashMap::new(),
        }
    }

    fn push_node(&mut self, info: NodeInfo) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(info);
        self.adj.push(Default::default());
        id
    }

    fn connect(&mut self, from_slot: usize, from: u32, to_slot: usize, to: u32) {
        self.adj[from as usize][from_slot].push(to);
        self.adj[to as usize][to_slot].push(from);
    }

    fn symbol_node(&mut self, sym: Sym, symbols: &SymbolTable) -> u32 {
        if let Some(&id) = self.symbol_index.get(&sym) {
            return id;
        }
        let info = NodeInfo {
            class: NodeClass::Symbol,
            arity: symbols.arity(sym),
            tag: match symbols.kind(sym) {
                SymbolKind::Function => 0,
                SymbolKind::Predicate => 1,
            },
            is_conjecture: false,
        };
        let id = self.push_node(info);
        self.symbol_index.insert(sym, id);
        id
    }

    /// Insert (or find) the node for a term. `scope` is the index of the
    /// clause being processed; it keys non-ground subterms.
    fn term_node(&mut self, term: &Term, scope: usize, symbols: &SymbolTable) -> u32 {
        let mut key = String::new();
        serialize_term(term, &mut key);
        let ground = is_ground(term);
        let scope_key = if ground { None } else { Some(scope) };
        if let Some(&id) = self.term_index.get(&(key.clone(), scope_key)) {
            return id;
        }
        let id = match term {
            Term::Var(_) => self.push_node(NodeInfo {
                class: NodeClass::Term,
                arity: 0,
                tag: 1,
                is_conjecture: false,
            }),
            Term::App(sym, args) => {
                let id = self.push_node(NodeInfo {
                    class: NodeClass::Term,
                    arity: args.len(),
                    tag: 0,
                    is_conjecture: false,
                });
                for arg in args {
                    let child = self.term_node(arg, scope, symbols);
                    self.connect(SLOT_TERM_CHILDREN, id, SLOT_TERM_PARENTS, child);
                }
                let sym_node = self.symbol_node(*sym, symbols);
                self.connect(SLOT_OCCURRENCE_SYMBOL, id, SLOT_SYMBOL_OCCURRENCES, sym_node);
                id
            }
        };
        self.term_index.insert((key, scope_key), id);
        id
    }

    fn add_clause(&mut self, clause: &Clause, scope: usize, conj: bool, symbols: &SymbolTable) {
        let node = self.push_node(NodeInfo {
            class: NodeClass::Clause,
            arity: clause.len(),
            tag: 0,
            is_conjecture: conj,
        });
        self.clause_nodes.push((clause.id, node));
        for lit in &clause.literals {
            let atom = self.term_node(&lit.atom, scope, symbols);
            if lit.positive {
                self.connect(SLOT_CLAUSE_POS_ATOMS, node, SLOT_ATOM_POS_CLAUSES, atom);
            } else {
                self.connect(SLOT_CLAUSE_NEG_ATOMS, node, SLOT_ATOM_NEG_CLAUSES, atom);
            }
        }
    }
}

fn serialize_term(term: &Term, out: &mut String) {
    match term {
        Term::Var(v) => {
            out.push('v');
            out.push_str(&v.to_string());
        }
        Term::App(sym, args) => {
            out.push('s');
            out.push_str(&sym.0.to_string());
            if !args.is_empty() {
                out.push('(');
                for a in args {
                    serialize_term(a, out);
                    out.push(',');
                }
                out.push(')');
            }
        }
    }
}

fn is_ground(term: &Term) -> bool {
    match term {
        Term::Var(_) => false,
        Term::App(_, args) => args.iter().all(is_ground),
    }
}

/// Build the shared-subterm graph over `clauses` plus `conjecture`, with
/// conjecture flags set on the latter. A clause id appearing in both lists
/// contributes one node, flagged as conjecture.
pub fn build_clause_graph(
    clauses: &[Clause],
    conjecture: &[Clause],
    symbols: &SymbolTable,
) -> ClauseGraph {
    let mut b = GraphBuilder::new();
    let mut seen: HashMap<ClauseId, ()> = HashMap::new();
    let mut scope = 0;
    for clause in conjecture {
        if seen.insert(clause.id, ()).is_none() {
            b.add_clause(clause, scope, true, symbols);
            scope += 1;
        }
    }
    for clause in clauses {
        if seen.insert(clause.id, ()).is_none() {
            b.add_clause(clause, scope, false, symbols);
            scope += 1;
        }
    }
    ClauseGraph {
        nodes: b.nodes,
        adj: b.adj,
        clause_nodes: b.clause_nodes,
    }
}

/// Per-clause embeddings, keyed by clause id.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingSet {
    pub d: usize,
    ids: Vec<ClauseId>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<ClauseId, usize>,
}

impl EmbeddingSet {
    pub fn new(d: usize) -> Self {
        EmbeddingSet {
            d,
            ids: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn push(&mut self, id: ClauseId, vector: Vec<f64>) {
        assert_eq!(vector.len(), self.d, "embedding dimension mismatch");
        self.index.insert(id, self.vectors.len());
        self.ids.push(id);
        self.vectors.push(vector);
    }

    pub fn get(&self, id: ClauseId) -> Option<&[f64]> {
        self.index.get(&id).map(|&i| self.vectors[i].as_slice())
    }

    pub fn ids(&self) -> &[ClauseId] {
        &self.ids
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClauseId, &[f64])> {
        self.ids
            .iter()
            .copied()
            .zip(self.vectors.iter().map(Vec::as_slice))
    }
}

fn mix(seed: u64, parts: &[u64]) -> u64 {
    // splitmix64-style stirring of the attribute tuple into one stream id.
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h ^= p.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

fn initial_vector(cfg: &EmbedderConfig, info: &NodeInfo) -> Vec<f64> {
    let class = match info.class {
        NodeClass::Term => 0u64,
        NodeClass::Clause => 1,
        NodeClass::Symbol => 2,
    };
    let arity = info.arity.min(15) as u64;
    let key = mix(
        cfg.seed,
        &[1, class, arity, info.tag as u64, info.is_conjecture as u64],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    (0..cfg.d).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

struct LayerWeights {
    w_self: Matrix,
    w_slot: Vec<Matrix>,
    bias: Vec<f64>,
}

fn layer_weights(cfg: &EmbedderConfig, layer: usize) -> LayerWeights {
    let scale = 1.0 / (cfg.d as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, &[2, layer as u64]));
    let w_self = Matrix::random_uniform(&mut rng, cfg.d, cfg.d, scale);
    let w_slot = (0..SLOT_COUNT)
        .map(|_| Matrix::random_uniform(&mut rng, cfg.d, cfg.d, scale))
        .collect();
    let bias = (0..cfg.d).map(|_| rng.gen_range(-0.1..=0.1)).collect();
    LayerWeights {
        w_self,
        w_slot,
        bias,
    }
}

/// Mean of neighbor vectors, summed in sorted order so the result depends
/// only on the multiset of vectors, not on neighbor numbering.
fn sorted_mean(neighbors: &[u32], h: &[Vec<f64>], d: usize) -> Option<Vec<f64>> {
    if neighbors.is_empty() {
        return None;
    }
    let mut rows: Vec<&Vec<f64>> = neighbors.iter().map(|&u| &h[u as usize]).collect();
    rows.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut sum = vec![0.0; d];
    for row in rows {
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
    }
    let inv = 1.0 / neighbors.len() as f64;
    for s in &mut sum {
        *s *= inv;
    }
    Some(sum)
}

/// Run the fixed message-passing embedder over a clause graph and return
/// one vector per clause node.
pub fn embed(graph: &ClauseGraph, cfg: &EmbedderConfig) -> EmbeddingSet {
    cfg.validate().expect("embedder config");
    let n = graph.nodes.len();
    let mut h: Vec<Vec<f64>> = graph
        .nodes
        .iter()
        .map(|info| initial_vector(cfg, info))
        .collect();
    for layer in 0..cfg.layers {
        let weights = layer_weights(cfg, layer);
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(n);
        for v in 0..n {
            let mut z = weights.w_self.matvec(&h[v]);
            axpy(&mut z, 1.0, &weights.bias);
            for slot in 0..SLOT_COUNT {
                if let Some(mean) = sorted_mean(&graph.adj[v][slot], &h, cfg.d) {
                    let m = weights.w_slot[slot].matvec(&mean);
                    axpy(&mut z, 1.0, &m);
                }
            }
            for zi in &mut z {
                if *zi < 0.0 {
                    *zi = 0.0;
                }
            }
            next.push(z);
        }
        h = next;
    }
    let mut out = EmbeddingSet::new(cfg.d);
    for &(clause_id, node) in &graph.clause_nodes {
        out.push(clause_id, h[node as usize].clone());
    }
    out
}

/// Convenience: graph construction plus embedding in one call.
pub fn embed_clauses(
    clauses: &[Clause],
    conjecture: &[Clause],
    symbols: &SymbolTable,
    cfg: &EmbedderConfig,
) -> EmbeddingSet {
    embed(&build_clause_graph(clauses, conjecture, symbols), cfg)
}

/// Cheap deterministic baseline embedder: a fixed vector of syntactic
/// counts, padded or truncated to `d`.
pub fn feature_embed(clause: &Clause, d: usize) -> Vec<f64> {
    let mut feats = Vec::with_capacity(16);
    let pos = clause.literals.iter().filter(|l| l.positive).count();
    feats.push(clause.len() as f64);
    feats.push(pos as f64);
    feats.push((clause.len() - pos) as f64);
    feats.push(
        clause
            .literals
            .iter()
            .map(|l| l.atom.depth())
            .max()
            .unwrap_or(0) as f64,
    );
    feats.push(clause.vars().len() as f64);
    let mut symbols: Vec<Sym> = Vec::new();
    let mut arity_hist = [0usize; 4];
    for lit in &clause.literals {
        collect_symbols(&lit.atom, &mut symbols, &mut arity_hist);
    }
    symbols.sort();
    symbols.dedup();
    feats.push(symbols.len() as f64);
    feats.extend(arity_hist.iter().map(|&c| c as f64));
    feats.resize(d, 0.0);
    feats.truncate(d);
    feats
}

fn collect_symbols(term: &Term, symbols: &mut Vec<Sym>, arity_hist: &mut [usize; 4]) {
    if let Term::App(sym, args) = term {
        symbols.push(*sym);
        arity_hist[args.len().min(3)] += 1;
        for a in args {
            collect_symbols(a, symbols, arity_hist);
        }
    }
}

/// Export an embedding set as JSON (clause id -> vector).
pub fn embeddings_to_json(set: &EmbeddingSet) -> String {
    let map: std::collections::BTreeMap<String, &Vec<f64>> = set
        .ids
        .iter()
        .zip(&set.vectors)
        .map(|(id, v)| (id.0.to_string(), v))
        .collect();
    serde_json::to_string_pretty(&map).expect("embedding export")
}
