//! Minimizing network coding resources in peer-to-peer overlay topologies.
//!
//! Random linear network coding lets interior overlay nodes mix packets so
//! every receiver of a multicast session reaches its max-flow rate, but each
//! mixing point costs CPU and buffer space. Only a few well-placed coding
//! nodes are usually necessary. This crate searches for small coding
//! assignments with a problem-specific genetic algorithm and validates them
//! in a discrete-time P2P content-distribution simulator with link churn.
//!
//! Module map:
//!
//! * [`gf`] - GF(2^q) arithmetic, matrices, rank, segment encode/decode and
//!   the incremental innovativeness-checking decoder.
//! * [`graph`] - overlay DAG model: construction, validation, random layered
//!   generation, max-flow, churn schedules and the graph text format.
//! * [`eval`] - coding assignments over a network, achieved-rate evaluation,
//!   the piecewise fitness objective, a sequential fitness estimator and an
//!   exhaustive minimal-resource oracle.
//! * [`ga`] - the genetic algorithm: genome codec, opposition-based
//!   initialization, elitist roulette selection, parameterized uniform
//!   crossover, mutation and the flow-aware gene improvement step.
//! * [`sim`] - round-based P2P swarm simulator with coding-node placement
//!   strategies and distribution metrics.
//! * [`app`] - experiment drivers shared by the `ncmin` binary: config
//!   files, CSV emission and SVG charts.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `ncmin` binary exposes the same drivers as subcommands
//! (`gen`, `optimize`, `simulate`, `compare`, `oracle`).

pub mod app;
pub mod eval;
pub mod ga;
pub mod gf;
pub mod graph;
pub(crate) mod rng;
pub mod sim;
