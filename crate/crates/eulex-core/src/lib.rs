//! Exact solvers, kernels and reductions for weighted Eulerian extension.
//!
//! The centre of the crate is the Eulerian extension problem: given a directed
//! multigraph and an arc weight function, find a cheapest arc multiset whose
//! addition makes the graph connected and balanced. Around that sit the
//! conjoining bipartite matching problem, the advice machinery that links the
//! two, a family of polynomial reductions (Hamiltonian cycle, rural postman,
//! 3-SAT, switch set cover, two-dimensional Eulerian extension) and exhaustive
//! oracles used to validate every solver on small instances.
//!
//! All weights are exact unsigned integers; `INF` encodes forbidden arcs and
//! is absorbing under addition. Every search and every reduction breaks ties
//! deterministically, so results are reproducible across runs and platforms.

pub mod advice;
pub mod cbm;
pub mod gen;
pub mod graph;
pub mod matching;
pub mod preprocess;
pub mod reductions;
pub mod solver;
pub mod ssc;
pub mod weight;

pub use graph::{EeInstance, Multigraph, WeightMatrix};
pub use weight::{Weight, INF, MAX_FINITE};
