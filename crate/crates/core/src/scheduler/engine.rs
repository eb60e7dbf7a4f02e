//! The scheduling engine.
//!
//! Two phases. The spatial phase walks gates in (DAG depth, program index)
//! order, plans each against the live occupancy and emits the operation
//! sequence: clearing moves, qubit rearrangement, distillation rounds,
//! magic transports and gate bodies. No decision consults a clock, so the
//! sequence is a pure function of (circuit, layout, config).
//!
//! The temporal phase (`retime`) assigns start times by replaying that
//! sequence against per-cell busy times and per-occupant availability.
//! Factories park one state per distillation period, stalling while their
//! port is occupied: state k+1 parks at max(park_k + period, clear_k).
//! Retiming the same sequence with unit durations yields the unit-cost
//! schedule, which therefore never exceeds the realistic one.

use super::plan::{plan_gate_placement, route_with_clearing, PlannedHop};
use super::{
    LatencyModel, OpKind, Schedule, ScheduleError, ScheduledOp, ScheduleMeta, SchedulerConfig,
};
use crate::circuit::Circuit;
use crate::dag::{build_dag, DependencyGraph};
use crate::layout::{Cell, GridLayout};
use crate::occupancy::{initial_mapping, Occupant, OccupancyState, OccupantId};
use crate::router::{chain_push, space_search, AdjacencyRequirement};
use std::collections::{BTreeMap, BTreeSet};

struct FactoryState {
    port: Cell,
    parked: Option<usize>,
}

struct Engine<'a> {
    circuit: &'a Circuit,
    dag: &'a DependencyGraph,
    state: OccupancyState,
    ops: Vec<ScheduledOp>,
    factories: Vec<FactoryState>,
    n_t: usize,
    parks_made: usize,
    consume_counter: usize,
}

impl<'a> Engine<'a> {
    fn emit(&mut self, kind: OpKind, cells: Vec<Cell>) {
        self.ops.push(ScheduledOp {
            kind,
            cells,
            start_tick: 0,
            duration_ticks: 0,
        });
    }

    fn emit_hop(&mut self, hop: PlannedHop) {
        self.state.move_occupant(hop.from, hop.to);
        self.emit(
            OpKind::MoveHop {
                occupant: hop.occupant,
                from: hop.from,
                to: hop.to,
            },
            vec![hop.from, hop.to],
        );
    }

    fn park_state(&mut self, factory: usize) {
        let magic = self.parks_made;
        let port = self.factories[factory].port;
        debug_assert!(self.state.occupant(port).is_empty(), "port not free to park");
        self.state.set(port, Occupant::Magic(magic));
        self.factories[factory].parked = Some(magic);
        self.parks_made += 1;
        self.emit(
            OpKind::Distill {
                factory,
                magic,
                port,
            },
            Vec::new(),
        );
    }

    fn run(&mut self) -> Result<(), ScheduleError> {
        // Demand-driven production: only as many states as the circuit
        // consumes are ever distilled, so unused factories never park
        // permanent obstacles on the boundary.
        let active = self.factories.len().min(self.n_t);
        for f in 0..active {
            self.park_state(f);
        }

        for gate_idx in self.dag.dispatch_order() {
            let gate = &self.circuit.gates[gate_idx];
            if gate.is_virtual() {
                continue; // Pauli frame
            }
            if gate.consumes_magic_state() {
                self.commit_magic_gate(gate_idx, active)?;
            } else {
                self.commit_clifford(gate_idx)?;
            }
        }
        Ok(())
    }

    fn plan_with_escape(
        &mut self,
        gate_idx: usize,
    ) -> Result<super::plan::PlacementPlan, ScheduleError> {
        match plan_gate_placement(gate_idx, self.circuit, &self.state, self.dag) {
            Ok(plan) => Ok(plan),
            Err(first) => {
                // bounded escape: force-clear one neighbour of the first
                // operand, then re-plan once
                let q = self.circuit.gates[gate_idx].operands[0];
                let cell = self.state.qubit_cell(q);
                let mut cleared = false;
                for n in self.state.neighbours(cell) {
                    if self.state.occupant(n).is_data() {
                        if let Some(pushes) = chain_push(&self.state, n, &BTreeSet::from([cell])) {
                            for p in pushes {
                                self.emit_hop(PlannedHop {
                                    occupant: OccupantId::Qubit(p.qubit),
                                    from: p.from,
                                    to: p.to,
                                });
                            }
                            cleared = true;
                            break;
                        }
                    }
                }
                if !cleared {
                    return Err(ScheduleError::Deadlock {
                        gate: gate_idx,
                        reason: first.to_string(),
                    });
                }
                plan_gate_placement(gate_idx, self.circuit, &self.state, self.dag).map_err(|e| {
                    ScheduleError::Deadlock {
                        gate: gate_idx,
                        reason: e.to_string(),
                    }
                })
            }
        }
    }

    fn commit_clifford(&mut self, gate_idx: usize) -> Result<(), ScheduleError> {
        let plan = self.plan_with_escape(gate_idx)?;
        for hop in plan.moves {
            self.emit_hop(hop);
        }
        self.emit(OpKind::GateExec { gate: gate_idx }, plan.body_cells);
        Ok(())
    }

    fn commit_magic_gate(&mut self, gate_idx: usize, active: usize) -> Result<(), ScheduleError> {
        let q = self.circuit.gates[gate_idx].operands[0];
        let factory = self.consume_counter % active;
        self.consume_counter += 1;
        let port = self.factories[factory].port;
        let magic = self.factories[factory].parked.take().expect("state parked");

        let target_cell = self.state.qubit_cell(q);
        // When the chosen factory's port is already a vertical neighbour,
        // consume straight off the port.
        let landing = if port.is_vertical_neighbour(target_cell) {
            port
        } else {
            let (landing, clears) =
                space_search(&self.state, target_cell, AdjacencyRequirement::VerticalNeighbour)
                    .map_err(|e| ScheduleError::Unplaceable {
                        gate: gate_idx,
                        reason: e.to_string(),
                    })?;
            for m in clears {
                self.emit_hop(PlannedHop {
                    occupant: OccupantId::Qubit(m.qubit),
                    from: m.from,
                    to: m.to,
                });
            }
            landing
        };

        if landing != port {
            let mut moves = Vec::new();
            // the port stays protected so the next state can park on it
            let protect: BTreeSet<Cell> = [target_cell, landing, port].into();
            let mut scratch = self.state.clone();
            route_with_clearing(
                &mut scratch,
                OccupantId::Magic(magic),
                port,
                landing,
                &protect,
                &mut moves,
            )
            .map_err(|reason| ScheduleError::Unplaceable {
                gate: gate_idx,
                reason,
            })?;
            for hop in moves {
                self.emit_hop(hop);
            }
        }

        self.emit(
            OpKind::MagicConsume {
                magic,
                gate: gate_idx,
            },
            vec![target_cell, landing],
        );
        self.state.remove(landing);

        if self.parks_made < self.n_t {
            self.park_state(factory);
        }
        Ok(())
    }
}

/// Assign start times to an operation sequence. Shared by the scheduler,
/// the unit-cost variant and the redundant-move compaction, so all three
/// agree on the timing rules.
pub(super) fn retime(
    ops: &[ScheduledOp],
    circuit: &Circuit,
    latency: &LatencyModel,
    unit_cost: bool,
) -> (Vec<ScheduledOp>, u64) {
    let mut busy: BTreeMap<Cell, u64> = BTreeMap::new();
    let mut avail: BTreeMap<OccupantId, u64> = BTreeMap::new();
    // per factory: last park time and last port-clear time
    let mut last_park: BTreeMap<usize, u64> = BTreeMap::new();
    let mut last_clear: BTreeMap<usize, u64> = BTreeMap::new();
    let mut magic_factory: BTreeMap<usize, usize> = BTreeMap::new();
    let mut magic_uncleared: BTreeSet<usize> = BTreeSet::new();

    let body_duration = |gate: usize| -> u64 {
        if unit_cost {
            2
        } else {
            latency.duration_of(&circuit.gates[gate])
        }
    };

    let mut out = Vec::with_capacity(ops.len());
    let mut makespan = 0u64;
    for op in ops {
        let (start, duration) = match &op.kind {
            OpKind::Distill { factory, magic, .. } => {
                let period = latency.distill_period;
                let park = match last_park.get(factory) {
                    None => period,
                    Some(&prev) => {
                        (prev + period).max(last_clear.get(factory).copied().unwrap_or(0))
                    }
                };
                last_park.insert(*factory, park);
                magic_factory.insert(*magic, *factory);
                magic_uncleared.insert(*magic);
                avail.insert(OccupantId::Magic(*magic), park);
                (park - period, period)
            }
            OpKind::MoveHop { occupant, from, to } => {
                let start = busy
                    .get(from)
                    .copied()
                    .unwrap_or(0)
                    .max(busy.get(to).copied().unwrap_or(0))
                    .max(avail.get(occupant).copied().unwrap_or(0));
                let dur = if unit_cost { 2 } else { latency.move_hop };
                let end = start + dur;
                busy.insert(*from, end);
                busy.insert(*to, end);
                avail.insert(*occupant, end);
                if let OccupantId::Magic(m) = occupant {
                    if magic_uncleared.remove(m) {
                        last_clear.insert(magic_factory[m], end);
                    }
                }
                (start, dur)
            }
            OpKind::GateExec { gate } => {
                let mut start = 0u64;
                for c in &op.cells {
                    start = start.max(busy.get(c).copied().unwrap_or(0));
                }
                for &q in &circuit.gates[*gate].operands {
                    start = start.max(avail.get(&OccupantId::Qubit(q)).copied().unwrap_or(0));
                }
                let dur = body_duration(*gate);
                let end = start + dur;
                for c in &op.cells {
                    busy.insert(*c, end);
                }
                for &q in &circuit.gates[*gate].operands {
                    avail.insert(OccupantId::Qubit(q), end);
                }
                (start, dur)
            }
            OpKind::MagicConsume { magic, gate } => {
                let mut start = avail
                    .get(&OccupantId::Magic(*magic))
                    .copied()
                    .unwrap_or(0);
                for c in &op.cells {
                    start = start.max(busy.get(c).copied().unwrap_or(0));
                }
                for &q in &circuit.gates[*gate].operands {
                    start = start.max(avail.get(&OccupantId::Qubit(q)).copied().unwrap_or(0));
                }
                let dur = body_duration(*gate);
                let end = start + dur;
                for c in &op.cells {
                    busy.insert(*c, end);
                }
                for &q in &circuit.gates[*gate].operands {
                    avail.insert(OccupantId::Qubit(q), end);
                }
                // zero-hop transport: consuming off the port clears it
                if magic_uncleared.remove(magic) {
                    last_clear.insert(magic_factory[magic], end);
                }
                (start, dur)
            }
        };
        makespan = makespan.max(start + duration);
        out.push(ScheduledOp {
            kind: op.kind.clone(),
            cells: op.cells.clone(),
            start_tick: start,
            duration_ticks: duration,
        });
    }
    (out, makespan)
}

fn meta(circuit: &Circuit, layout: &GridLayout, cfg: &SchedulerConfig) -> ScheduleMeta {
    ScheduleMeta {
        circuit_name: circuit.name.clone(),
        n_qubits: circuit.n_qubits,
        n_gates: circuit.gates.len(),
        rows: layout.rows,
        cols: layout.cols,
        r: layout.r,
        n_msf: cfg.n_msf,
        t_msf_ticks: cfg.latency.distill_period,
        unit_cost: cfg.unit_cost,
        mapping: cfg.mapping,
    }
}

/// Compile a circuit onto a layout: map, route and schedule every gate.
pub fn schedule(
    circuit: &Circuit,
    layout: &GridLayout,
    cfg: &SchedulerConfig,
) -> Result<Schedule, ScheduleError> {
    circuit.check().map_err(ScheduleError::Invalid)?;
    if cfg.n_msf == 0 {
        return Err(ScheduleError::Invalid("factory count must be >= 1".into()));
    }
    if cfg.n_msf != layout.n_factories() {
        return Err(ScheduleError::Invalid(format!(
            "layout has {} factory ports, config wants {}",
            layout.n_factories(),
            cfg.n_msf
        )));
    }
    debug_assert!(cfg.latency.is_consistent());

    let dag = build_dag(circuit);
    let state = initial_mapping(circuit, layout, cfg.mapping)?;
    let mut engine = Engine {
        circuit,
        dag: &dag,
        state,
        ops: Vec::new(),
        factories: layout
            .factory_ports
            .iter()
            .map(|&(_, port)| FactoryState { port, parked: None })
            .collect(),
        n_t: circuit.count_t_states(),
        parks_made: 0,
        consume_counter: 0,
    };
    engine.run()?;

    let (ops, makespan_ticks) = retime(&engine.ops, circuit, &cfg.latency, cfg.unit_cost);
    Ok(Schedule {
        ops,
        makespan_ticks,
        meta: meta(circuit, layout, cfg),
    })
}

/// Re-derive a schedule from an existing one with a different cost model,
/// keeping the operation sequence fixed.
pub fn retime_schedule(
    base: &Schedule,
    circuit: &Circuit,
    latency: &LatencyModel,
    unit_cost: bool,
) -> Schedule {
    let (ops, makespan_ticks) = retime(&base.ops, circuit, latency, unit_cost);
    Schedule {
        ops,
        makespan_ticks,
        meta: ScheduleMeta {
            unit_cost,
            ..base.meta.clone()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, GateKind};
    use crate::layout::build_layout;
    use crate::occupancy::MappingMode;

    fn cfg(n_msf: usize, mapping: MappingMode) -> SchedulerConfig {
        SchedulerConfig {
            n_msf,
            latency: LatencyModel::default(),
            unit_cost: false,
            mapping,
        }
    }

    #[test]
    fn empty_circuit_has_zero_makespan() {
        let c = Circuit::new("empty", 4);
        let layout = build_layout(2, 2).unwrap().place_factories(1).unwrap();
        let s = schedule(&c, &layout, &cfg(1, MappingMode::Grid2d)).unwrap();
        assert_eq!(s.makespan_ticks, 0);
        assert!(s.ops.is_empty());
    }

    #[test]
    fn wait_free_cnot_takes_2d() {
        // snake1d on L=2 puts qubit 0 at (1,1) and qubit 2 at (2,2):
        // diagonal with the empty shared ancilla (2,1)
        let mut c = Circuit::new("cnot", 3);
        c.push(Gate::cnot(0, 2));
        let layout = build_layout(2, 2).unwrap().place_factories(1).unwrap();
        let s = schedule(&c, &layout, &cfg(1, MappingMode::Snake1d)).unwrap();
        assert_eq!(s.makespan_ticks, 4);
        assert_eq!(s.move_count(), 0);
    }

    #[test]
    fn single_t_gate_timeline() {
        // qubit 2 sits at (2,1); the only free vertical neighbour (1,1)
        // holds qubit 0, which is pushed aside during distillation; the
        // state then hops one cell from the port at (0,1).
        let mut c = Circuit::new("t", 3);
        c.push(Gate::t(2));
        let layout = build_layout(2, 2).unwrap().place_factories(1).unwrap();
        let s = schedule(&c, &layout, &cfg(1, MappingMode::Grid2d)).unwrap();
        // 22 distill + 2 move + 5 consume
        assert_eq!(s.makespan_ticks, 29);
        assert_eq!(s.distill_count(), 1);
        assert_eq!(s.consume_count(), 1);
        let consume = s
            .ops
            .iter()
            .find(|o| matches!(o.kind, OpKind::MagicConsume { .. }))
            .unwrap();
        assert_eq!(consume.start_tick, 24);
        assert_eq!(consume.duration_ticks, 5);
    }

    #[test]
    fn parallel_layer_shares_time_windows() {
        // Three H gates then three CNOTs on row-1 pairs of a 6x6 block:
        // each CNOT needs exactly one hop up to the top bus row, and the
        // three hops run in the same window.
        let mut c = Circuit::new("layer", 36);
        for q in [0, 2, 4] {
            c.push(Gate::h(q));
        }
        for q in [0, 2, 4] {
            c.push(Gate::cnot(q, q + 1));
        }
        let layout = build_layout(6, 4).unwrap().place_factories(1).unwrap();
        let s = schedule(&c, &layout, &cfg(1, MappingMode::Grid2d)).unwrap();

        let h_windows: Vec<(u64, u64)> = s
            .ops
            .iter()
            .filter(|o| matches!(o.kind, OpKind::GateExec { gate } if c.gates[gate].kind == GateKind::H))
            .map(|o| (o.start_tick, o.end()))
            .collect();
        assert_eq!(h_windows.len(), 3);
        assert!(h_windows.iter().all(|&w| w == h_windows[0]));

        let moves: Vec<&ScheduledOp> = s
            .ops
            .iter()
            .filter(|o| matches!(o.kind, OpKind::MoveHop { .. }))
            .collect();
        assert_eq!(moves.len(), 3);
        assert!(moves.iter().all(|m| m.start_tick == moves[0].start_tick));

        let cnot_windows: Vec<(u64, u64)> = s
            .ops
            .iter()
            .filter(|o| matches!(o.kind, OpKind::GateExec { gate } if c.gates[gate].kind == GateKind::Cnot))
            .map(|o| (o.start_tick, o.end()))
            .collect();
        assert_eq!(cnot_windows.len(), 3);
        assert!(cnot_windows.iter().all(|&w| w == cnot_windows[0]));
    }

    #[test]
    fn unit_cost_never_exceeds_realistic_time() {
        let mut c = Circuit::new("mix", 4);
        c.push(Gate::h(0));
        c.push(Gate::cnot(0, 1));
        c.push(Gate::rz(1, 0.1));
        c.push(Gate::cnot(2, 3));
        c.push(Gate::t(3));
        let layout = build_layout(2, 3).unwrap().place_factories(1).unwrap();
        let exec = schedule(&c, &layout, &cfg(1, MappingMode::Grid2d)).unwrap();
        let unit = retime_schedule(&exec, &c, &LatencyModel::default(), true);
        assert!(unit.makespan_ticks <= exec.makespan_ticks);
        assert_eq!(unit.op_count(), exec.op_count());
    }

    #[test]
    fn schedules_are_deterministic() {
        let mut c = Circuit::new("det", 4);
        c.push(Gate::h(0));
        c.push(Gate::cnot(0, 3));
        c.push(Gate::t(2));
        let layout = build_layout(2, 4).unwrap().place_factories(2).unwrap();
        let a = schedule(&c, &layout, &cfg(2, MappingMode::Grid2d)).unwrap();
        let b = schedule(&c, &layout, &cfg(2, MappingMode::Grid2d)).unwrap();
        assert_eq!(a.to_jsonl(), b.to_jsonl());
    }

    #[test]
    fn distill_and_consume_counts_match_t_states() {
        let mut c = Circuit::new("ts", 4);
        c.push(Gate::t(0));
        c.push(Gate::rz(1, 0.1));
        c.push(Gate::rz(2, std::f64::consts::PI)); // Clifford: free
        c.push(Gate::tdg(3));
        let layout = build_layout(2, 4).unwrap().place_factories(2).unwrap();
        let s = schedule(&c, &layout, &cfg(2, MappingMode::Grid2d)).unwrap();
        assert_eq!(s.consume_count(), 3);
        assert_eq!(s.distill_count(), 3);
        assert!(s.distill_count() >= s.consume_count());
    }
}
