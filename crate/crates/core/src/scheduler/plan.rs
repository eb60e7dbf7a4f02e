//! Gate placement planning.
//!
//! Plans are pure functions of the occupancy: a list of single-hop moves
//! (data-qubit rearrangement plus any chain-push clearing) followed by the
//! body cells the gate reserves. CNOT needs control and target diagonal
//! around a shared empty ancilla — the ancilla vertically adjacent to the
//! control (M_ZZ acts on Z edges, top/bottom) and horizontally adjacent to
//! the target (M_XX acts on X edges, left/right). H needs one adjacent
//! ancilla; T-type gates need a vertical neighbour reserved as the
//! magic-state landing cell; S-type gates run in place.

use super::ScheduleError;
use crate::circuit::{Circuit, GateKind};
use crate::dag::DependencyGraph;
use crate::layout::Cell;
use crate::occupancy::{Occupant, OccupancyState, OccupantId};
use crate::router::{chain_push, find_path, find_path_to_empty, space_search, AdjacencyRequirement};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannedHop {
    pub occupant: OccupantId,
    pub from: Cell,
    pub to: Cell,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlacementPlan {
    /// Single-hop moves in execution order; every hop lands on a cell that
    /// is empty once the preceding hops have been applied.
    pub moves: Vec<PlannedHop>,
    /// Cells the gate body reserves, in the canonical per-kind order.
    pub body_cells: Vec<Cell>,
    /// Landing cell reserved for the incoming magic state (T-type gates).
    pub landing: Option<Cell>,
}

fn unplaceable(gate: usize, reason: impl Into<String>) -> ScheduleError {
    ScheduleError::Unplaceable {
        gate,
        reason: reason.into(),
    }
}

/// Plan the moves and reservations needed to execute `gate_idx` on the
/// current occupancy. Pauli gates are frame-tracked and need nothing.
pub fn plan_gate_placement(
    gate_idx: usize,
    circuit: &Circuit,
    occ: &OccupancyState,
    dag: &DependencyGraph,
) -> Result<PlacementPlan, ScheduleError> {
    let gate = &circuit.gates[gate_idx];
    match gate.kind {
        GateKind::X | GateKind::Z => Ok(PlacementPlan {
            moves: Vec::new(),
            body_cells: Vec::new(),
            landing: None,
        }),
        GateKind::S | GateKind::Sdg | GateKind::Sx => Ok(PlacementPlan {
            moves: Vec::new(),
            body_cells: vec![occ.qubit_cell(gate.operands[0])],
            landing: None,
        }),
        // an RZ at a Clifford angle costs no magic state and runs in place
        GateKind::Rz if !gate.consumes_magic_state() => Ok(PlacementPlan {
            moves: Vec::new(),
            body_cells: vec![occ.qubit_cell(gate.operands[0])],
            landing: None,
        }),
        GateKind::H => {
            let cell = occ.qubit_cell(gate.operands[0]);
            let (anc, clears) = space_search(occ, cell, AdjacencyRequirement::AnyNeighbour)
                .map_err(|e| unplaceable(gate_idx, e.to_string()))?;
            Ok(PlacementPlan {
                moves: clears
                    .iter()
                    .map(|m| PlannedHop {
                        occupant: OccupantId::Qubit(m.qubit),
                        from: m.from,
                        to: m.to,
                    })
                    .collect(),
                body_cells: vec![cell, anc],
                landing: None,
            })
        }
        GateKind::T | GateKind::Tdg | GateKind::Rz => {
            let cell = occ.qubit_cell(gate.operands[0]);
            let (landing, clears) =
                space_search(occ, cell, AdjacencyRequirement::VerticalNeighbour)
                    .map_err(|e| unplaceable(gate_idx, e.to_string()))?;
            Ok(PlacementPlan {
                moves: clears
                    .iter()
                    .map(|m| PlannedHop {
                        occupant: OccupantId::Qubit(m.qubit),
                        from: m.from,
                        to: m.to,
                    })
                    .collect(),
                body_cells: vec![cell, landing],
                landing: Some(landing),
            })
        }
        GateKind::Cnot => plan_cnot(gate_idx, circuit, occ, dag),
    }
}

/// Move `occupant` from `from` to `to`, chain-pushing any data qubit on the
/// chosen path out of the way first. Pushed qubits may not come to rest on
/// `protect` cells or anywhere along the path. When a blocker cannot be
/// cleared the route is recomputed around it.
pub(super) fn route_with_clearing(
    scratch: &mut OccupancyState,
    occupant: OccupantId,
    from: Cell,
    to: Cell,
    protect: &BTreeSet<Cell>,
    moves: &mut Vec<PlannedHop>,
) -> Result<(), String> {
    if from == to {
        return Ok(());
    }
    let mut unclearable: BTreeSet<Cell> = BTreeSet::new();
    'retry: loop {
        let mut forbidden = protect.clone();
        forbidden.extend(unclearable.iter().copied());
        forbidden.remove(&to);
        forbidden.remove(&from);
        let path = find_path(scratch, from, to, &forbidden).map_err(|e| e.to_string())?;

        // Clearing interleaves with movement: a blocker is pushed just
        // before the mover steps onto its cell, so pushed qubits may park
        // on path cells already behind the mover.
        let mut trial = scratch.clone();
        let mut trial_moves = Vec::new();
        let mut ok = true;
        for i in 1..path.cells.len() {
            let cell = path.cells[i];
            if trial.occupant(cell).is_data() {
                let mut push_forbidden: BTreeSet<Cell> =
                    path.cells[i..].iter().copied().collect();
                push_forbidden.insert(path.cells[i - 1]); // the mover stands here
                push_forbidden.extend(protect.iter().copied());
                let Some(pushes) = chain_push(&trial, cell, &push_forbidden) else {
                    unclearable.insert(cell);
                    ok = false;
                    break;
                };
                for p in pushes {
                    trial_moves.push(PlannedHop {
                        occupant: OccupantId::Qubit(p.qubit),
                        from: p.from,
                        to: p.to,
                    });
                    trial.move_occupant(p.from, p.to);
                }
            }
            trial_moves.push(PlannedHop {
                occupant,
                from: path.cells[i - 1],
                to: cell,
            });
            trial.move_occupant(path.cells[i - 1], cell);
        }
        if !ok {
            continue 'retry;
        }
        *scratch = trial;
        moves.extend(trial_moves);
        return Ok(());
    }
}

/// Estimated clearing cost of taking over `cell`, in single-hop moves.
/// `None` means the cell cannot be cleared (magic state or no empty cell
/// reachable).
fn clear_estimate(
    occ: &OccupancyState,
    cell: Cell,
    vacated_by_config: &[Cell],
    protect: &BTreeSet<Cell>,
) -> Option<u64> {
    match occ.occupant(cell) {
        Occupant::Empty => Some(0),
        Occupant::Data(_) if vacated_by_config.contains(&cell) => Some(0),
        Occupant::Data(_) => {
            let path = find_path_to_empty(occ, cell, protect)?;
            Some(path.hops as u64)
        }
        _ => None,
    }
}

fn route_estimate(occ: &OccupancyState, from: Cell, to: Cell) -> Option<u64> {
    if from == to {
        return Some(0);
    }
    // crossings get chain-pushed at execution time; weight them like a
    // short displacement rather than the full search penalty
    let p = find_path(occ, from, to, &BTreeSet::new()).ok()?;
    Some(p.hops as u64 + 8 * p.occupied_crossed as u64)
}

/// Look-ahead tie-break: distance from a planned destination to the current
/// position of the qubit's next two-qubit partner in the DAG.
fn lookahead_metric(
    gate_idx: usize,
    circuit: &Circuit,
    occ: &OccupancyState,
    dag: &DependencyGraph,
    assignments: &[(usize, Cell)],
) -> u64 {
    let mut metric = 0u64;
    for &(q, dest) in assignments {
        if let Some(next) = dag.next_gate_on_qubit(circuit, gate_idx, q) {
            for &p in &circuit.gates[next].operands {
                if p != q {
                    metric += dest.manhattan(occ.qubit_cell(p)) as u64;
                }
            }
        }
    }
    metric
}

fn plan_cnot(
    gate_idx: usize,
    circuit: &Circuit,
    occ: &OccupancyState,
    dag: &DependencyGraph,
) -> Result<PlacementPlan, ScheduleError> {
    let control = circuit.gates[gate_idx].operands[0];
    let target = circuit.gates[gate_idx].operands[1];
    let c_pos = occ.qubit_cell(control);
    let t_pos = occ.qubit_cell(target);

    // Ancilla candidates ordered by combined distance to the pair; the
    // bound est >= md(a,c)+md(a,t)-2 lets the scan stop early.
    let mut candidates: Vec<Cell> = (0..occ.rows)
        .flat_map(|r| (0..occ.cols).map(move |c| Cell::new(r, c)))
        .collect();
    candidates.sort_by_key(|&a| (a.manhattan(c_pos) + a.manhattan(t_pos), a.row, a.col));

    let mut feasible: Vec<(u64, u64, Cell, Cell, Cell)> = Vec::new();
    for a in candidates {
        let lb = (a.manhattan(c_pos) + a.manhattan(t_pos)) as u64;
        if let Some(&(best_est, ..)) = feasible.iter().min() {
            if lb.saturating_sub(2) > best_est {
                break;
            }
        }
        let c_slots = [
            a.row.checked_sub(1).map(|r| Cell::new(r, a.col)),
            (a.row + 1 < occ.rows).then(|| Cell::new(a.row + 1, a.col)),
        ];
        let t_slots = [
            a.col.checked_sub(1).map(|c| Cell::new(a.row, c)),
            (a.col + 1 < occ.cols).then(|| Cell::new(a.row, a.col + 1)),
        ];
        for cs in c_slots.into_iter().flatten() {
            for ts in t_slots.into_iter().flatten() {
                // interlocked configurations (swapping the pair through each
                // other) are excluded
                if cs == t_pos || ts == c_pos {
                    continue;
                }
                let protect: BTreeSet<Cell> = [a, cs, ts, c_pos, t_pos].into();
                let vacated = [c_pos, t_pos];
                let Some(ca) = clear_estimate(occ, a, &vacated, &protect) else {
                    continue;
                };
                let (Some(ccs), Some(cts)) = (
                    if cs == c_pos {
                        Some(0)
                    } else {
                        clear_estimate(occ, cs, &vacated, &protect)
                    },
                    if ts == t_pos {
                        Some(0)
                    } else {
                        clear_estimate(occ, ts, &vacated, &protect)
                    },
                ) else {
                    continue;
                };
                let (Some(rc), Some(rt)) =
                    (route_estimate(occ, c_pos, cs), route_estimate(occ, t_pos, ts))
                else {
                    continue;
                };
                let est = ca + ccs + cts + rc + rt;
                let ahead = lookahead_metric(
                    gate_idx,
                    circuit,
                    occ,
                    dag,
                    &[(control, cs), (target, ts)],
                );
                feasible.push((est, ahead, a, cs, ts));
            }
        }
    }
    feasible.sort();

    // Execute the best configuration; estimates can go stale against the
    // clearing details, so fall through to the next candidates on failure.
    for &(_, _, a, cs, ts) in feasible.iter().take(20) {
        if let Some(plan) = execute_cnot_config(control, target, a, cs, ts, occ) {
            return Ok(plan);
        }
    }
    Err(unplaceable(gate_idx, "no feasible CNOT configuration"))
}

fn execute_cnot_config(
    control: usize,
    target: usize,
    a: Cell,
    cs: Cell,
    ts: Cell,
    occ: &OccupancyState,
) -> Option<PlacementPlan> {
    let mut scratch = occ.clone();
    let mut moves = Vec::new();
    let protect: BTreeSet<Cell> = [a, cs, ts].into();

    let mut legs = [(control, cs), (target, ts)];
    if a == occ.qubit_cell(target) {
        legs.swap(0, 1); // target vacates the ancilla cell first
    }
    for (q, dest) in legs {
        let from = scratch.qubit_cell(q);
        route_with_clearing(&mut scratch, OccupantId::Qubit(q), from, dest, &protect, &mut moves)
            .ok()?;
    }
    if scratch.occupant(a).is_data() {
        let forbidden: BTreeSet<Cell> = [cs, ts].into();
        let pushes = chain_push(&scratch, a, &forbidden)?;
        for p in pushes {
            moves.push(PlannedHop {
                occupant: OccupantId::Qubit(p.qubit),
                from: p.from,
                to: p.to,
            });
            scratch.move_occupant(p.from, p.to);
        }
    }
    if !scratch.occupant(a).is_empty() {
        return None;
    }
    if scratch.qubit_cell(control) != cs || scratch.qubit_cell(target) != ts {
        return None;
    }

    Some(PlacementPlan {
        moves,
        body_cells: vec![cs, a, ts],
        landing: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::dag::build_dag;

    fn setup(gates: Vec<Gate>, n: usize, data: &[(usize, usize)]) -> (Circuit, OccupancyState) {
        let mut c = Circuit::new("t", n);
        for g in gates {
            c.push(g);
        }
        let mut occ = OccupancyState::empty(6, 6);
        for (q, &(r, col)) in data.iter().enumerate() {
            occ.set(Cell::new(r, col), Occupant::Data(q));
        }
        (c, occ)
    }

    #[test]
    fn cnot_in_legal_configuration_needs_no_moves() {
        // control (1,1), target (2,2), empty ancilla (2,1): control above
        // the ancilla, target to its right
        let (c, occ) = setup(vec![Gate::cnot(0, 1)], 2, &[(1, 1), (2, 2)]);
        let dag = build_dag(&c);
        let plan = plan_gate_placement(0, &c, &occ, &dag).unwrap();
        assert!(plan.moves.is_empty());
        assert_eq!(plan.body_cells, vec![Cell::new(1, 1), Cell::new(2, 1), Cell::new(2, 2)]);
    }

    #[test]
    fn cnot_geometry_is_vertical_control_horizontal_target() {
        let (c, occ) = setup(vec![Gate::cnot(0, 1)], 2, &[(2, 2), (2, 4)]);
        let dag = build_dag(&c);
        let plan = plan_gate_placement(0, &c, &occ, &dag).unwrap();
        let (cs, a, ts) = (plan.body_cells[0], plan.body_cells[1], plan.body_cells[2]);
        assert!(cs.is_vertical_neighbour(a), "{cs:?} {a:?}");
        assert!(ts.is_horizontal_neighbour(a), "{ts:?} {a:?}");
    }

    #[test]
    fn adjacent_vertical_pair_needs_one_sideways_hop() {
        let (c, occ) = setup(vec![Gate::cnot(0, 1)], 2, &[(2, 2), (3, 2)]);
        let dag = build_dag(&c);
        let plan = plan_gate_placement(0, &c, &occ, &dag).unwrap();
        // a vertically adjacent pair cannot be diagonal without one of the
        // two stepping aside
        assert_eq!(plan.moves.len(), 1);
        let (cs, a, ts) = (plan.body_cells[0], plan.body_cells[1], plan.body_cells[2]);
        assert!(cs.is_vertical_neighbour(a));
        assert!(ts.is_horizontal_neighbour(a));
        assert_eq!(cs.manhattan(ts), 2);
    }

    #[test]
    fn t_gate_reserves_vertical_landing() {
        let (c, occ) = setup(vec![Gate::t(0)], 1, &[(2, 2)]);
        let dag = build_dag(&c);
        let plan = plan_gate_placement(0, &c, &occ, &dag).unwrap();
        let landing = plan.landing.unwrap();
        assert!(landing.is_vertical_neighbour(Cell::new(2, 2)));
        assert_eq!(plan.body_cells, vec![Cell::new(2, 2), landing]);
    }

    #[test]
    fn s_gate_runs_in_place() {
        let (c, occ) = setup(vec![Gate::s(0)], 1, &[(2, 2)]);
        let dag = build_dag(&c);
        let plan = plan_gate_placement(0, &c, &occ, &dag).unwrap();
        assert!(plan.moves.is_empty());
        assert_eq!(plan.body_cells, vec![Cell::new(2, 2)]);
    }

    #[test]
    fn pauli_gates_need_nothing() {
        let (c, occ) = setup(vec![Gate::x(0)], 1, &[(2, 2)]);
        let dag = build_dag(&c);
        let plan = plan_gate_placement(0, &c, &occ, &dag).unwrap();
        assert!(plan.moves.is_empty());
        assert!(plan.body_cells.is_empty());
    }

    #[test]
    fn saturated_neighbourhood_is_unplaceable() {
        let mut occ = OccupancyState::empty(3, 3);
        for r in 0..3 {
            for col in 0..3 {
                occ.set(Cell::new(r, col), Occupant::Data(r * 3 + col));
            }
        }
        let mut c = Circuit::new("h", 9);
        c.push(Gate::h(4));
        let dag = build_dag(&c);
        assert!(matches!(
            plan_gate_placement(0, &c, &occ, &dag),
            Err(ScheduleError::Unplaceable { .. })
        ));
    }

    #[test]
    fn plan_replays_cleanly() {
        // dense block: CNOT between interior qubits forces clearing
        let mut occ = OccupancyState::empty(6, 6);
        let mut k = 0;
        for r in 1..5 {
            for col in 1..5 {
                occ.set(Cell::new(r, col), Occupant::Data(k));
                k += 1;
            }
        }
        let mut c = Circuit::new("dense", 16);
        c.push(Gate::cnot(5, 6)); // (2,2) and (2,3)
        let dag = build_dag(&c);
        let plan = plan_gate_placement(0, &c, &occ, &dag).unwrap();
        let mut sim = occ.clone();
        for hop in &plan.moves {
            assert!(sim.occupant(hop.to).is_empty(), "{hop:?} lands on occupied");
            sim.move_occupant(hop.from, hop.to);
        }
        let (cs, a, ts) = (plan.body_cells[0], plan.body_cells[1], plan.body_cells[2]);
        assert_eq!(sim.qubit_cell(5), cs);
        assert_eq!(sim.qubit_cell(6), ts);
        assert!(sim.occupant(a).is_empty());
    }
}
