//! Resource-constrained scheduling of a circuit onto a grid layout.
//!
//! Gates are dispatched greedily in (DAG depth, program index) order. Each
//! gate is planned against the current occupancy (placement moves, ancilla
//! clearing, magic-state transport) and committed; per-cell busy times
//! serialize reservations so the resulting schedule replays without
//! conflicts. Distillation factories produce one magic state per
//! `distill_period`, parking it on their boundary port until a T-type gate
//! routes it away, so qubit movement hides under the distillation window.
//!
//! All planning decisions are functions of occupancy alone (never of
//! committed times), which keeps schedules deterministic and makes the
//! unit-cost variant a pure retiming of the same operation sequence.

mod engine;
mod plan;
mod redundant;
mod trace;
mod validate;

pub use engine::{retime_schedule, schedule};
pub use plan::{plan_gate_placement, PlacementPlan, PlannedHop};
pub use redundant::remove_redundant_moves;
pub use trace::ascii_trace;
pub use validate::{validate_schedule, ValidationReport, Violation, ViolationKind};

use crate::circuit::GateKind;
use crate::layout::{Cell, LayoutError};
use crate::occupancy::{MappingMode, OccupantId};
use serde::Serialize;
use thiserror::Error;

/// Operation durations in ticks; one tick is half a code-distance step, so
/// the 2.5d magic-state consumption stays integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatencyModel {
    pub move_hop: u64,
    pub mzz: u64,
    pub mxx: u64,
    pub cnot: u64,
    pub h: u64,
    pub s_like: u64,
    pub t_consume: u64,
    pub pauli: u64,
    /// Ticks per distilled magic state (default 22 ticks = 11d).
    pub distill_period: u64,
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel {
            move_hop: 2,
            mzz: 2,
            mxx: 2,
            cnot: 4,
            h: 6,
            s_like: 3,
            t_consume: 5,
            pauli: 0,
            distill_period: 22,
        }
    }
}

impl LatencyModel {
    pub fn with_t_msf_d(t_msf_d: f64) -> Result<Self, String> {
        let ticks = t_msf_d * 2.0;
        if !(ticks.is_finite() && ticks > 0.0 && ticks.fract() == 0.0) {
            return Err(format!(
                "t_msf must be a positive multiple of 0.5d, got {t_msf_d}"
            ));
        }
        Ok(LatencyModel {
            distill_period: ticks as u64,
            ..Default::default()
        })
    }

    pub fn gate_duration(&self, kind: GateKind) -> u64 {
        match kind {
            GateKind::H => self.h,
            GateKind::Cnot => self.cnot,
            GateKind::S | GateKind::Sdg | GateKind::Sx => self.s_like,
            GateKind::T | GateKind::Tdg | GateKind::Rz => self.t_consume,
            GateKind::X | GateKind::Z => self.pauli,
        }
    }

    /// Like [`Self::gate_duration`] but angle-aware: a Clifford-angle RZ is
    /// an S-weight correction, not a magic-state consumption.
    pub fn duration_of(&self, gate: &crate::circuit::Gate) -> u64 {
        if gate.kind == GateKind::Rz && !gate.consumes_magic_state() {
            self.s_like
        } else {
            self.gate_duration(gate.kind)
        }
    }

    /// Consistency of the decomposition: T consumption is an M_ZZ merge
    /// followed by an S correction.
    pub fn is_consistent(&self) -> bool {
        self.t_consume == self.mzz + self.s_like
            && self.cnot == self.mzz + self.mxx
            && self.distill_period > 0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SchedulerConfig {
    pub n_msf: usize,
    pub latency: LatencyModel,
    /// Override every grid operation to 1d (2 ticks); distillation keeps
    /// its period. Isolates routing quality from the latency model.
    pub unit_cost: bool,
    pub mapping: MappingMode,
}

impl SchedulerConfig {
    pub fn new(n_msf: usize) -> Self {
        SchedulerConfig {
            n_msf,
            latency: LatencyModel::default(),
            unit_cost: false,
            mapping: MappingMode::Grid2d,
        }
    }
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("gate {gate} cannot be placed: {reason}")]
    Unplaceable { gate: usize, reason: String },
    #[error("scheduling deadlock at gate {gate}: {reason}")]
    Deadlock { gate: usize, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpKind {
    /// A Clifford gate body on its reserved cells.
    GateExec { gate: usize },
    /// One single-cell step of an occupant.
    MoveHop {
        occupant: OccupantId,
        from: Cell,
        to: Cell,
    },
    /// One distillation round; the state parks on the factory port at the end.
    Distill {
        factory: usize,
        magic: usize,
        port: Cell,
    },
    /// Magic-state consumption executing a T-type gate.
    MagicConsume { magic: usize, gate: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduledOp {
    #[serde(flatten)]
    pub kind: OpKind,
    /// Grid cells reserved for the whole duration. Canonical orders:
    /// CNOT [control, ancilla, target], H [qubit, ancilla],
    /// consume [target, landing], move [from, to].
    pub cells: Vec<Cell>,
    pub start_tick: u64,
    pub duration_ticks: u64,
}

impl ScheduledOp {
    pub fn end(&self) -> u64 {
        self.start_tick + self.duration_ticks
    }

    pub fn gate_index(&self) -> Option<usize> {
        match self.kind {
            OpKind::GateExec { gate } | OpKind::MagicConsume { gate, .. } => Some(gate),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleMeta {
    pub circuit_name: String,
    pub n_qubits: usize,
    pub n_gates: usize,
    pub rows: usize,
    pub cols: usize,
    pub r: usize,
    pub n_msf: usize,
    pub t_msf_ticks: u64,
    pub unit_cost: bool,
    pub mapping: MappingMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    /// Operations in commit order (starts need not be monotone).
    pub ops: Vec<ScheduledOp>,
    pub makespan_ticks: u64,
    pub meta: ScheduleMeta,
}

impl Schedule {
    pub fn makespan_d(&self) -> f64 {
        self.makespan_ticks as f64 / 2.0
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn move_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o.kind, OpKind::MoveHop { .. }))
            .count()
    }

    pub fn distill_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o.kind, OpKind::Distill { .. }))
            .count()
    }

    pub fn consume_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o.kind, OpKind::MagicConsume { .. }))
            .count()
    }

    /// One JSON object per line, ops in commit order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            out.push_str(&serde_json::to_string(op).expect("op serializes"));
            out.push('\n');
        }
        out
    }
}
