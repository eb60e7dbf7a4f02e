//! Resource metrics and analytic block baselines.
//!
//! The central reference is the distillation-throughput lower bound
//! l = n_T * t_MSF / n_MSF: the execution time if producing magic states
//! were the only bottleneck. Spacetime volume multiplies qubit count
//! (optionally including factory footprints) by execution time; CPI divides
//! execution time by the input gate count.
//!
//! The block baselines model Pauli-product-rotation layouts after
//! constant-depth decomposition: a compact block uses 3n+3 qubits at 4d per
//! rotation, the intermediate and fast blocks 4n and 4n+6 qubits at 3d.

use crate::circuit::Circuit;
use crate::layout::GridLayout;
use crate::scheduler::Schedule;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mismatched inputs: {0}")]
    MismatchedInputs(String),
}

/// Execution time if distillation throughput were the only bottleneck.
pub fn lower_bound(n_t: usize, t_msf_d: f64, n_msf: usize) -> Result<f64, MetricsError> {
    if n_msf == 0 {
        return Err(MetricsError::InvalidArgument("n_msf must be >= 1".into()));
    }
    if !(t_msf_d > 0.0) {
        return Err(MetricsError::InvalidArgument("t_msf must be > 0".into()));
    }
    Ok(n_t as f64 * t_msf_d / n_msf as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub benchmark: String,
    pub n_qubits: usize,
    pub n_gates: usize,
    pub n_t: usize,
    pub r: usize,
    pub n_msf: usize,
    pub t_msf_d: f64,
    pub qubits_excl_factories: usize,
    pub qubits_incl_factories: usize,
    pub exec_time_d: f64,
    pub unit_cost_time_d: f64,
    pub lower_bound_d: f64,
    pub spacetime_excl: f64,
    pub spacetime_incl: f64,
    /// Per-gate normalized volumes (the plots default to these).
    pub spacetime_excl_per_op: f64,
    pub spacetime_incl_per_op: f64,
    pub cpi_d: f64,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Stable CSV column set; `error` is filled by sweep drivers on
    /// partial failures.
    pub const CSV_HEADER: &'static str = "benchmark,L,r,n_msf,t_msf_d,qubits_excl,qubits_incl,exec_time_d,unit_cost_time_d,lower_bound_d,spacetime_excl,spacetime_incl,cpi_d,error";

    pub fn csv_row(&self, side_length: usize) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},",
            self.benchmark,
            side_length,
            self.r,
            self.n_msf,
            self.t_msf_d,
            self.qubits_excl_factories,
            self.qubits_incl_factories,
            self.exec_time_d,
            self.unit_cost_time_d,
            self.lower_bound_d,
            self.spacetime_excl,
            self.spacetime_incl,
            self.cpi_d,
        )
    }
}

/// Derive the full report from a realistic schedule and its unit-cost
/// retiming on the same layout.
pub fn compute_metrics(
    exec: &Schedule,
    unit: &Schedule,
    layout: &GridLayout,
    circuit: &Circuit,
) -> Result<MetricsReport, MetricsError> {
    if exec.meta.circuit_name != circuit.name || exec.meta.n_gates != circuit.gates.len() {
        return Err(MetricsError::MismatchedInputs(
            "schedule was built from a different circuit".into(),
        ));
    }
    if exec.meta.rows != layout.rows
        || exec.meta.cols != layout.cols
        || exec.meta.r != layout.r
        || exec.meta.n_msf != layout.n_factories()
    {
        return Err(MetricsError::MismatchedInputs(
            "schedule was built for a different layout".into(),
        ));
    }
    if unit.meta.circuit_name != exec.meta.circuit_name
        || !unit.meta.unit_cost
        || unit.op_count() != exec.op_count()
    {
        return Err(MetricsError::MismatchedInputs(
            "unit schedule does not match the realistic one".into(),
        ));
    }

    let n_t = circuit.count_t_states();
    let t_msf_d = exec.meta.t_msf_ticks as f64 / 2.0;
    let n_msf = exec.meta.n_msf;
    let exec_time_d = exec.makespan_d();
    let unit_cost_time_d = unit.makespan_d();
    let lower_bound_d = lower_bound(n_t, t_msf_d, n_msf)?;
    let qubits_excl = layout.total_qubits(false);
    let qubits_incl = layout.total_qubits(true);
    let n_gates = circuit.gates.len();
    let spacetime_excl = qubits_excl as f64 * exec_time_d;
    let spacetime_incl = qubits_incl as f64 * exec_time_d;

    Ok(MetricsReport {
        benchmark: circuit.name.clone(),
        n_qubits: circuit.n_qubits,
        n_gates,
        n_t,
        r: layout.r,
        n_msf,
        t_msf_d,
        qubits_excl_factories: qubits_excl,
        qubits_incl_factories: qubits_incl,
        exec_time_d,
        unit_cost_time_d,
        lower_bound_d,
        spacetime_excl,
        spacetime_incl,
        spacetime_excl_per_op: spacetime_excl / n_gates.max(1) as f64,
        spacetime_incl_per_op: spacetime_incl / n_gates.max(1) as f64,
        cpi_d: exec_time_d / n_gates.max(1) as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Compact,
    Intermediate,
    Fast,
}

impl BlockKind {
    pub fn qubits(self, n: usize) -> usize {
        match self {
            BlockKind::Compact => 3 * n + 3,
            BlockKind::Intermediate => 4 * n,
            BlockKind::Fast => 4 * n + 6,
        }
    }

    /// Depth of one Pauli-product rotation after decomposition, in d.
    pub fn ppr_depth_d(self) -> f64 {
        match self {
            BlockKind::Compact => 4.0,
            BlockKind::Intermediate | BlockKind::Fast => 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockBaseline {
    pub kind: BlockKind,
    pub n: usize,
    pub qubits: usize,
    pub time_d: f64,
    pub spacetime: f64,
}

/// Analytic baseline: one serial PPR per non-Clifford rotation, so the time
/// is whichever dominates of the distillation bound and the PPR depths.
pub fn baseline_block(
    kind: BlockKind,
    n: usize,
    n_t: usize,
    n_msf: usize,
    t_msf_d: f64,
) -> Result<BlockBaseline, MetricsError> {
    if n == 0 {
        return Err(MetricsError::InvalidArgument("n must be >= 1".into()));
    }
    let lb = lower_bound(n_t, t_msf_d, n_msf)?;
    let qubits = kind.qubits(n);
    let time_d = lb.max(n_t as f64 * kind.ppr_depth_d());
    Ok(BlockBaseline {
        kind,
        n,
        qubits,
        time_d,
        spacetime: qubits as f64 * time_d,
    })
}
