//! Redundant move elimination.
//!
//! Greedy placement frequently parks a qubit somewhere and fetches it
//! straight back. Two consecutive hops of the same occupant that invert
//! each other (A->B then B->A) cancel to the identity provided nothing in
//! between reserved A or B — per-cell reservations are serialized in op
//! order, so "in between" is list order. Cancellation repeats to a fixed
//! point and the surviving sequence is retimed, so the makespan never
//! increases.

use super::engine::retime;
use super::{OpKind, Schedule, ScheduledOp};
use crate::circuit::Circuit;
use crate::scheduler::LatencyModel;

fn hop_parts(op: &ScheduledOp) -> Option<(crate::occupancy::OccupantId, crate::layout::Cell, crate::layout::Cell)> {
    match op.kind {
        OpKind::MoveHop { occupant, from, to } => Some((occupant, from, to)),
        _ => None,
    }
}

/// One cancellation sweep; returns the reduced list and whether anything
/// was removed.
fn sweep(ops: &[ScheduledOp]) -> (Vec<ScheduledOp>, bool) {
    let mut remove = vec![false; ops.len()];
    'outer: for i in 0..ops.len() {
        if remove[i] {
            continue;
        }
        let Some((occ_i, a, b)) = hop_parts(&ops[i]) else {
            continue;
        };
        // find this occupant's next hop
        for j in i + 1..ops.len() {
            if remove[j] {
                continue;
            }
            let Some((occ_j, from, to)) = hop_parts(&ops[j]) else {
                // a gate body acting on the occupant's resting cell shows up
                // in the cell check below
                continue;
            };
            if occ_j != occ_i {
                continue;
            }
            if from == b && to == a {
                // candidate pair: nothing between may reserve a or b
                let blocked = ops[i + 1..j]
                    .iter()
                    .zip(&remove[i + 1..j])
                    .any(|(op, &r)| !r && op.cells.iter().any(|&c| c == a || c == b));
                if !blocked {
                    remove[i] = true;
                    remove[j] = true;
                    continue 'outer;
                }
            }
            break; // next hop exists but doesn't invert (or is blocked)
        }
    }
    let removed = remove.iter().any(|&r| r);
    let out = ops
        .iter()
        .zip(&remove)
        .filter(|(_, &r)| !r)
        .map(|(op, _)| op.clone())
        .collect();
    (out, removed)
}

/// Cancel inverse move pairs to exhaustion, then recompact start times.
pub fn remove_redundant_moves(
    schedule: &Schedule,
    circuit: &Circuit,
    latency: &LatencyModel,
) -> Schedule {
    let mut ops = schedule.ops.clone();
    loop {
        let (next, removed) = sweep(&ops);
        ops = next;
        if !removed {
            break;
        }
    }
    let (ops, makespan_ticks) = retime(&ops, circuit, latency, schedule.meta.unit_cost);
    Schedule {
        ops,
        makespan_ticks,
        meta: schedule.meta.clone(),
    }
}
