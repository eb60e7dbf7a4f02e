//! ASCII execution trace: one grid snapshot per code-distance step.

use super::{OpKind, Schedule};
use crate::circuit::Circuit;
use crate::layout::{Cell, CellKind, GridLayout};
use crate::occupancy::{initial_mapping, MappingMode, Occupant, OccupancyState};

/// Render the grid every `2` ticks (1d). `Q` data qubit, `M` magic state,
/// `#` cell reserved by an executing operation, `.` free bus, `d` free data
/// slot, `F` factory port.
pub fn ascii_trace(
    schedule: &Schedule,
    circuit: &Circuit,
    layout: &GridLayout,
    mapping: MappingMode,
) -> String {
    let Ok(mut state) = initial_mapping(circuit, layout, mapping) else {
        return String::from("(trace unavailable: circuit does not fit layout)\n");
    };

    let mut order: Vec<usize> = (0..schedule.ops.len()).collect();
    order.sort_by_key(|&i| (schedule.ops[i].start_tick, i));
    let mut cursor = 0;
    // (end, priority, op): vacating moves apply before parks on ties
    let mut pending: Vec<(u64, u8, usize)> = Vec::new();

    let mut out = String::new();
    let steps = schedule.makespan_ticks.div_ceil(2);
    for step in 0..=steps {
        let now = step * 2;
        // apply completions
        pending.sort();
        while let Some(&(end, _, idx)) = pending.first() {
            if end > now {
                break;
            }
            pending.remove(0);
            apply(&mut state, schedule, idx);
        }
        // start ops
        while cursor < order.len() && schedule.ops[order[cursor]].start_tick <= now {
            let idx = order[cursor];
            let prio = match schedule.ops[idx].kind {
                OpKind::Distill { .. } => 1u8,
                _ => 0,
            };
            pending.push((schedule.ops[idx].end(), prio, idx));
            cursor += 1;
        }

        out.push_str(&format!("t={}d\n", now / 2));
        for row in 0..layout.rows {
            for col in 0..layout.cols {
                let cell = Cell::new(row, col);
                let reserved = pending.iter().any(|&(_, _, idx)| {
                    let op = &schedule.ops[idx];
                    op.start_tick <= now && now < op.end() && op.cells.contains(&cell)
                });
                let ch = match state.occupant(cell) {
                    Occupant::Data(_) => 'Q',
                    Occupant::Magic(_) => 'M',
                    _ if reserved => '#',
                    _ if layout.factory_ports.iter().any(|&(_, p)| p == cell) => 'F',
                    _ if layout.kind(cell) == CellKind::DataSlot => 'd',
                    _ => '.',
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

fn apply(state: &mut OccupancyState, schedule: &Schedule, idx: usize) {
    match &schedule.ops[idx].kind {
        OpKind::MoveHop { from, to, .. } => {
            if !state.occupant(*from).is_empty() && state.occupant(*to).is_empty() {
                state.move_occupant(*from, *to);
            }
        }
        OpKind::Distill { magic, port, .. } => {
            if state.occupant(*port).is_empty() {
                state.set(*port, Occupant::Magic(*magic));
            }
        }
        OpKind::MagicConsume { .. } => {
            state.remove(schedule.ops[idx].cells[1]);
        }
        OpKind::GateExec { .. } => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::layout::build_layout;
    use crate::scheduler::{schedule, SchedulerConfig};

    #[test]
    fn trace_has_one_frame_per_d_step() {
        let mut c = Circuit::new("t", 2);
        c.push(Gate::h(0));
        let layout = build_layout(2, 2).unwrap().place_factories(1).unwrap();
        let cfg = SchedulerConfig::new(1);
        let s = schedule(&c, &layout, &cfg).unwrap();
        let trace = ascii_trace(&s, &c, &layout, cfg.mapping);
        assert_eq!(trace.matches("t=").count(), (s.makespan_ticks / 2 + 1) as usize);
        assert!(trace.contains('Q'));
    }
}
