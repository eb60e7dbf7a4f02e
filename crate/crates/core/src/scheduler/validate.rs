//! Schedule replay validation.
//!
//! Replays a schedule tick-by-tick on a fresh occupancy and reports every
//! violation of the contract: overlapping cell reservations, dependency
//! order, lattice-surgery placement geometry (diagonal CNOT with vertical
//! M_ZZ and horizontal M_XX edges), move legality, and magic-state
//! conservation. Violations are report entries, never panics, so seeded
//! faults can be tested.

use super::{OpKind, Schedule};
use crate::circuit::{Circuit, GateKind};
use crate::dag::build_dag;
use crate::layout::{Cell, GridLayout};
use crate::occupancy::{initial_mapping, MappingMode, Occupant, OccupancyState, OccupantId};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    CellConflict,
    DagOrder,
    Placement,
    IllegalMove,
    MagicConservation,
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub kind: ViolationKind,
    pub op_index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op_index {
            Some(i) => write!(f, "[{:?}] op {}: {}", self.kind, i, self.message),
            None => write!(f, "[{:?}] {}", self.kind, self.message),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, op_index: Option<usize>, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            op_index,
            message: message.into(),
        });
    }

    pub fn count_of(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Replay `schedule` against the circuit and layout it claims to implement.
pub fn validate_schedule(
    schedule: &Schedule,
    circuit: &Circuit,
    layout: &GridLayout,
    mapping: MappingMode,
) -> ValidationReport {
    let mut report = ValidationReport::default();

    check_cell_exclusivity(schedule, &mut report);
    replay_positions(schedule, circuit, layout, mapping, &mut report);
    check_dag_order(schedule, circuit, &mut report);
    check_magic_conservation(schedule, circuit, &mut report);

    report
}

fn check_cell_exclusivity(schedule: &Schedule, report: &mut ValidationReport) {
    let mut per_cell: BTreeMap<Cell, Vec<(u64, u64, usize)>> = BTreeMap::new();
    for (i, op) in schedule.ops.iter().enumerate() {
        if op.duration_ticks == 0 {
            continue;
        }
        for &c in &op.cells {
            per_cell.entry(c).or_default().push((op.start_tick, op.end(), i));
        }
    }
    for (cell, mut iv) in per_cell {
        iv.sort();
        for w in iv.windows(2) {
            let ((_, end_a, a), (start_b, _, b)) = (w[0], w[1]);
            if start_b < end_a {
                report.push(
                    ViolationKind::CellConflict,
                    Some(b),
                    format!("cell {cell:?} reserved by ops {a} and {b} simultaneously"),
                );
            }
        }
    }
}

/// Step through ops in time order, maintaining occupant positions. Move
/// destinations must be empty when the hop starts; gate operands must sit
/// on the reserved cells; geometry must match the lattice-surgery rules.
fn replay_positions(
    schedule: &Schedule,
    circuit: &Circuit,
    layout: &GridLayout,
    mapping: MappingMode,
    report: &mut ValidationReport,
) -> bool {
    let Ok(mut state) = initial_mapping(circuit, layout, mapping) else {
        report.push(
            ViolationKind::Placement,
            None,
            "circuit does not fit the layout",
        );
        return false;
    };

    // (time, order-in-list) sorted starts; position updates apply at op end.
    // Simultaneous completions apply vacating moves before parks, matching
    // the half-open reservation windows.
    let mut order: Vec<usize> = (0..schedule.ops.len()).collect();
    order.sort_by_key(|&i| (schedule.ops[i].start_tick, i));
    let mut pending: Vec<(u64, u8, usize)> = Vec::new(); // (end, priority, op index)

    let apply_until = |state: &mut OccupancyState,
                       pending: &mut Vec<(u64, u8, usize)>,
                       now: u64| {
        while let Some(&(end, _, idx)) = pending.first() {
            if end > now {
                break;
            }
            pending.remove(0);
            match &schedule.ops[idx].kind {
                OpKind::MoveHop { from, to, .. } => {
                    if state.occupant(*to).is_empty() && !state.occupant(*from).is_empty() {
                        state.move_occupant(*from, *to);
                    }
                }
                OpKind::Distill { magic, port, .. } => {
                    if state.occupant(*port).is_empty() {
                        state.set(*port, Occupant::Magic(*magic));
                    }
                }
                OpKind::MagicConsume { .. } => {
                    let landing = schedule.ops[idx].cells[1];
                    state.remove(landing);
                }
                OpKind::GateExec { .. } => {}
            }
        }
    };

    let mut clean = true;
    for &i in &order {
        let op = &schedule.ops[i];
        apply_until(&mut state, &mut pending, op.start_tick);
        match &op.kind {
            OpKind::MoveHop { occupant, from, to } => {
                if !from.is_adjacent(*to) {
                    report.push(ViolationKind::IllegalMove, Some(i), "hop is not single-step");
                    clean = false;
                }
                let at_from = match (occupant, state.occupant(*from)) {
                    (OccupantId::Qubit(q), Occupant::Data(d)) => *q == d,
                    (OccupantId::Magic(m), Occupant::Magic(d)) => *m == d,
                    _ => false,
                };
                if !at_from {
                    report.push(
                        ViolationKind::IllegalMove,
                        Some(i),
                        format!("{occupant:?} is not at {from:?} when the hop starts"),
                    );
                    clean = false;
                }
                if !state.occupant(*to).is_empty() {
                    report.push(
                        ViolationKind::IllegalMove,
                        Some(i),
                        format!("hop destination {to:?} is occupied"),
                    );
                    clean = false;
                }
            }
            OpKind::Distill { .. } => {
                // parking is checked when applied: a blocked port leaves the
                // state unplaced and the consume check reports it
            }
            OpKind::GateExec { gate } => {
                clean &= check_gate_geometry(op, i, *gate, circuit, &state, report);
            }
            OpKind::MagicConsume { magic, gate } => {
                let g = &circuit.gates[*gate];
                if op.cells.len() != 2 {
                    report.push(ViolationKind::Placement, Some(i), "consume needs 2 cells");
                    clean = false;
                    continue;
                }
                let (target, landing) = (op.cells[0], op.cells[1]);
                if !landing.is_vertical_neighbour(target) {
                    report.push(
                        ViolationKind::Placement,
                        Some(i),
                        "magic-state landing must be a vertical neighbour (M_ZZ)",
                    );
                    clean = false;
                }
                if state.occupant(target) != Occupant::Data(g.operands[0]) {
                    report.push(
                        ViolationKind::Placement,
                        Some(i),
                        "target qubit is not on the consume cell",
                    );
                    clean = false;
                }
                if state.occupant(landing) != Occupant::Magic(*magic) {
                    report.push(
                        ViolationKind::MagicConservation,
                        Some(i),
                        format!("magic state {magic} is not parked on {landing:?}"),
                    );
                    clean = false;
                }
            }
        }
        let prio = match op.kind {
            OpKind::Distill { .. } => 1u8,
            _ => 0,
        };
        let pos = pending.partition_point(|&(e, p, _)| (e, p) <= (op.end(), prio));
        pending.insert(pos, (op.end(), prio, i));
    }
    clean
}

fn check_gate_geometry(
    op: &super::ScheduledOp,
    i: usize,
    gate: usize,
    circuit: &Circuit,
    state: &OccupancyState,
    report: &mut ValidationReport,
) -> bool {
    let g = &circuit.gates[gate];
    let mut clean = true;
    match g.kind {
        GateKind::Cnot => {
            if op.cells.len() != 3 {
                report.push(ViolationKind::Placement, Some(i), "CNOT needs 3 cells");
                return false;
            }
            let (cs, anc, ts) = (op.cells[0], op.cells[1], op.cells[2]);
            if !cs.is_vertical_neighbour(anc) {
                report.push(
                    ViolationKind::Placement,
                    Some(i),
                    "control-ancilla merge must be vertical (M_ZZ)",
                );
                clean = false;
            }
            if !ts.is_horizontal_neighbour(anc) {
                report.push(
                    ViolationKind::Placement,
                    Some(i),
                    "ancilla-target merge must be horizontal (M_XX)",
                );
                clean = false;
            }
            if cs.manhattan(ts) != 2 || cs.row == ts.row || cs.col == ts.col {
                report.push(
                    ViolationKind::Placement,
                    Some(i),
                    "control and target must be diagonal",
                );
                clean = false;
            }
            if state.occupant(cs) != Occupant::Data(g.operands[0])
                || state.occupant(ts) != Occupant::Data(g.operands[1])
            {
                report.push(
                    ViolationKind::Placement,
                    Some(i),
                    "CNOT operands are not on their cells",
                );
                clean = false;
            }
            if !state.occupant(anc).is_empty() {
                report.push(
                    ViolationKind::Placement,
                    Some(i),
                    "CNOT ancilla cell is occupied",
                );
                clean = false;
            }
        }
        GateKind::H => {
            if op.cells.len() != 2 {
                report.push(ViolationKind::Placement, Some(i), "H needs 2 cells");
                return false;
            }
            let (cell, anc) = (op.cells[0], op.cells[1]);
            if !cell.is_adjacent(anc) {
                report.push(ViolationKind::Placement, Some(i), "H ancilla must be adjacent");
                clean = false;
            }
            if state.occupant(cell) != Occupant::Data(g.operands[0]) {
                report.push(ViolationKind::Placement, Some(i), "H qubit not on its cell");
                clean = false;
            }
            if !state.occupant(anc).is_empty() {
                report.push(ViolationKind::Placement, Some(i), "H ancilla is occupied");
                clean = false;
            }
        }
        _ => {
            if op.cells.len() != 1 {
                report.push(ViolationKind::Placement, Some(i), "in-place gate needs 1 cell");
                return false;
            }
            if state.occupant(op.cells[0]) != Occupant::Data(g.operands[0]) {
                report.push(ViolationKind::Placement, Some(i), "qubit not on its cell");
                clean = false;
            }
        }
    }
    clean
}

fn check_dag_order(schedule: &Schedule, circuit: &Circuit, report: &mut ValidationReport) {
    let dag = build_dag(circuit);
    // effective end per gate: its op's end, or for frame-tracked Paulis the
    // max effective end of its predecessors
    let mut gate_op: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, op) in schedule.ops.iter().enumerate() {
        if let Some(g) = op.gate_index() {
            if gate_op.insert(g, i).is_some() {
                report.push(
                    ViolationKind::DagOrder,
                    Some(i),
                    format!("gate {g} executed more than once"),
                );
            }
        }
    }

    let mut eff_end = vec![0u64; circuit.gates.len()];
    for g in dag.dispatch_order() {
        let pred_end = dag
            .predecessors(g)
            .iter()
            .map(|&p| eff_end[p])
            .max()
            .unwrap_or(0);
        match gate_op.get(&g) {
            Some(&i) => {
                let op = &schedule.ops[i];
                if op.start_tick < pred_end {
                    report.push(
                        ViolationKind::DagOrder,
                        Some(i),
                        format!("gate {g} starts before a dependency finishes"),
                    );
                }
                eff_end[g] = op.end();
            }
            None => {
                if !circuit.gates[g].is_virtual() {
                    report.push(
                        ViolationKind::DagOrder,
                        None,
                        format!("gate {g} never executed"),
                    );
                }
                eff_end[g] = pred_end;
            }
        }
    }
}

fn check_magic_conservation(schedule: &Schedule, circuit: &Circuit, report: &mut ValidationReport) {
    let mut produced: BTreeMap<usize, u64> = BTreeMap::new();
    for op in &schedule.ops {
        if let OpKind::Distill { magic, .. } = op.kind {
            produced.insert(magic, op.end());
        }
    }
    let mut consumed: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, op) in schedule.ops.iter().enumerate() {
        if let OpKind::MagicConsume { magic, gate } = op.kind {
            *consumed.entry(magic).or_default() += 1;
            match produced.get(&magic) {
                None => report.push(
                    ViolationKind::MagicConservation,
                    Some(i),
                    format!("gate {gate} consumes state {magic} that was never distilled"),
                ),
                Some(&park) => {
                    if op.start_tick < park {
                        report.push(
                            ViolationKind::MagicConservation,
                            Some(i),
                            format!("state {magic} consumed before distillation finishes"),
                        );
                    }
                }
            }
        }
    }
    for (magic, n) in &consumed {
        if *n > 1 {
            report.push(
                ViolationKind::MagicConservation,
                None,
                format!("magic state {magic} consumed {n} times"),
            );
        }
    }
    // every T-type gate consumes exactly one state
    let mut per_gate: BTreeMap<usize, usize> = BTreeMap::new();
    for op in &schedule.ops {
        if let OpKind::MagicConsume { gate, .. } = op.kind {
            *per_gate.entry(gate).or_default() += 1;
        }
    }
    for (g, gate) in circuit.gates.iter().enumerate() {
        let n = per_gate.get(&g).copied().unwrap_or(0);
        if gate.consumes_magic_state() && n != 1 {
            report.push(
                ViolationKind::MagicConservation,
                None,
                format!("T-type gate {g} consumes {n} magic states"),
            );
        }
        if !gate.consumes_magic_state() && n != 0 {
            report.push(
                ViolationKind::MagicConservation,
                None,
                format!("Clifford gate {g} consumes a magic state"),
            );
        }
    }
}
