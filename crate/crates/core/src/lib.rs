//! Compiler and resource analyzer for early fault-tolerant quantum
//! architectures built on surface-code lattice surgery.
//!
//! The pipeline maps a Clifford+T circuit onto a 2D grid of logical qubits
//! whose ancilla budget is set by a routing-path count `r`, routes data
//! qubits and distilled magic states with penalty-weighted Dijkstra
//! heuristics, schedules every operation against distillation-factory
//! throughput, and reports execution time, the distillation lower bound
//! and spacetime volume.
//!
//! ```
//! use lsc_core::benchgen::{generate, LatticeModel, LatticeSpec};
//! use lsc_core::pipeline::{compile, CompileOptions};
//!
//! let circuit = generate(&LatticeSpec::new(LatticeModel::Ising2d, 2)).unwrap();
//! let out = compile(&circuit, &CompileOptions::new(3, 1)).unwrap();
//! assert!(out.validation.is_clean());
//! assert!(out.report.exec_time_d >= out.report.lower_bound_d);
//! ```
//!
//! The guide under `book/` walks through the layout family, the routing
//! heuristics, the scheduling model and the metrics; its code blocks are
//! compiled as doc-tests below.

pub mod benchgen;
pub mod circuit;
pub mod dag;
pub mod layout;
pub mod metrics;
pub mod occupancy;
pub mod pipeline;
pub mod qasm;
pub mod router;
pub mod scheduler;

/// Book chapters, included so `cargo test --doc` keeps every example in
/// the guide compiling against the current API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/layouts.md")]
    mod layouts {}
    #[doc = include_str!("../../../book/src/routing.md")]
    mod routing {}
    #[doc = include_str!("../../../book/src/scheduling.md")]
    mod scheduling {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
