//! A saturation-style theorem-proving workbench built around one idea:
//! treat the prover's processed clause set as a first-class object that
//! can be scored, clustered, filtered, and fed back into restarted
//! searches.
//!
//! The pieces, bottom up:
//!
//! * [`logic`] - terms, clauses, unification, binary resolution with
//!   factoring, subsumption, a TPTP CNF reader/printer, and derivation
//!   graphs with independent proof checking.
//! * [`saturation`] - the given-clause loop with age/weight and
//!   model-scored clause selection.
//! * [`embedding`] - a fixed, symbol-anonymized message-passing embedder
//!   mapping clauses to vectors.
//! * [`scorer`] - trainable pairwise clause-interaction scorers (two
//!   architectures, both reducible to a bilinear form) with analytic
//!   gradients and minibatch SGD.
//! * [`premise`] - conjecture-conditioned premise selection policies.
//! * [`cluster`] - k-means, fuzzy c-means, and Louvain community
//!   detection over clause-interaction graphs.
//! * [`orchestrate`] - leapfrogging restarts and split-and-merge search
//!   over the pieces above.
//! * [`harness`] - CLI, benchmark generators and runner, training-data
//!   extraction, and comparison reports.
//!
//! Every major capability has a runnable example under `examples/`; start
//! with `cargo run --example prove_basic`. The same functionality is
//! scriptable through the `satkit` binary (`cargo run -- help`).

pub mod cluster;
pub mod embedding;
pub mod harness;
pub mod linalg;
pub mod logic;
pub mod orchestrate;
pub mod premise;
pub mod saturation;
pub mod scorer;
