//! Grid pathfinding and space search.
//!
//! Movement across the grid is planned with Dijkstra over 4-neighbour
//! hops. Entering a free cell costs 1; entering a cell occupied by a data
//! qubit costs 1 + PENALTY, so with a penalty larger than the grid area the
//! search returns a path crossing the fewest occupied cells, shortest among
//! those ("minimum disturbance"). Magic states and reserved cells are
//! impassable. The reported cost on the result keeps the multiplicative
//! hops x crossings bookkeeping used when comparing paths.

use crate::layout::Cell;
use crate::occupancy::{Occupant, OccupancyState};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use thiserror::Error;

/// Per-cell penalty for crossing a data qubit. Larger than any grid area
/// used here, so crossing counts dominate hop counts.
pub const DEFAULT_PENALTY: u64 = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum RouteError {
    #[error("no path from {0:?} to {1:?}")]
    NoPath(Cell, Cell),
    #[error("no clearable cell satisfies the adjacency requirement at {0:?}")]
    NoSpace(Cell),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    /// Cells from source to destination inclusive.
    pub cells: Vec<Cell>,
    pub hops: usize,
    /// Data-qubit cells entered along the way (source excluded).
    pub occupied_crossed: usize,
    /// hops x occupied_crossed; zero crossings report zero.
    pub reported_cost: u64,
    /// Additive search objective: hops + penalty * occupied_crossed.
    pub surrogate_cost: u64,
}

enum Target {
    Single(Cell),
    /// First empty cell popped, excluding the given set.
    AnyEmpty,
}

fn cell_weight(occ: &OccupancyState, cell: Cell, penalty: u64) -> Option<u64> {
    match occ.occupant(cell) {
        Occupant::Empty => Some(1),
        Occupant::Data(_) => Some(1 + penalty),
        Occupant::Magic(_) | Occupant::Reserved { .. } => None,
    }
}

fn run_dijkstra(
    occ: &OccupancyState,
    src: Cell,
    target: &Target,
    forbidden: &BTreeSet<Cell>,
    penalty: u64,
) -> Option<Vec<Cell>> {
    let ncells = occ.rows * occ.cols;
    let idx = |c: Cell| c.row * occ.cols + c.col;
    let mut dist = vec![u64::MAX; ncells];
    let mut parent = vec![usize::MAX; ncells];
    let mut done = vec![false; ncells];
    let mut heap = BinaryHeap::new();

    dist[idx(src)] = 0;
    heap.push(Reverse((0u64, src.row, src.col)));

    while let Some(Reverse((cost, row, col))) = heap.pop() {
        let cell = Cell::new(row, col);
        let i = idx(cell);
        if done[i] {
            continue;
        }
        done[i] = true;

        let hit = match target {
            Target::Single(dst) => cell == *dst,
            Target::AnyEmpty => {
                cell != src && occ.occupant(cell).is_empty() && !forbidden.contains(&cell)
            }
        };
        if hit {
            let mut path = vec![cell];
            let mut cur = i;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(Cell::new(cur / occ.cols, cur % occ.cols));
            }
            path.reverse();
            return Some(path);
        }

        for next in occ.neighbours(cell) {
            if forbidden.contains(&next) {
                continue;
            }
            let Some(w) = cell_weight(occ, next, penalty) else {
                continue;
            };
            let ni = idx(next);
            let nd = cost + w;
            if nd < dist[ni] {
                dist[ni] = nd;
                parent[ni] = i;
                heap.push(Reverse((nd, next.row, next.col)));
            }
        }
    }
    None
}

fn path_from_cells(occ: &OccupancyState, cells: Vec<Cell>, penalty: u64) -> Path {
    let hops = cells.len() - 1;
    let occupied_crossed = cells[1..]
        .iter()
        .filter(|&&c| occ.occupant(c).is_data())
        .count();
    Path {
        hops,
        occupied_crossed,
        reported_cost: (hops as u64) * (occupied_crossed as u64),
        surrogate_cost: hops as u64 + penalty * occupied_crossed as u64,
        cells,
    }
}

/// Minimum-disturbance path from `src` to `dst`, avoiding `forbidden`.
pub fn find_path(
    occ: &OccupancyState,
    src: Cell,
    dst: Cell,
    forbidden: &BTreeSet<Cell>,
) -> Result<Path, RouteError> {
    find_path_with_penalty(occ, src, dst, forbidden, DEFAULT_PENALTY)
}

pub fn find_path_with_penalty(
    occ: &OccupancyState,
    src: Cell,
    dst: Cell,
    forbidden: &BTreeSet<Cell>,
    penalty: u64,
) -> Result<Path, RouteError> {
    assert_ne!(src, dst, "find_path requires src != dst");
    assert!(!forbidden.contains(&dst), "destination is forbidden");
    // The destination is enterable even when it holds a data qubit (the
    // caller clears it); magic states stay impassable.
    let target_passable = !matches!(
        occ.occupant(dst),
        Occupant::Magic(_) | Occupant::Reserved { .. }
    );
    if !target_passable {
        return Err(RouteError::NoPath(src, dst));
    }
    run_dijkstra(occ, src, &Target::Single(dst), forbidden, penalty)
        .map(|cells| path_from_cells(occ, cells, penalty))
        .ok_or(RouteError::NoPath(src, dst))
}

/// Path from `src` to the nearest empty cell outside `forbidden`.
pub fn find_path_to_empty(
    occ: &OccupancyState,
    src: Cell,
    forbidden: &BTreeSet<Cell>,
) -> Option<Path> {
    run_dijkstra(occ, src, &Target::AnyEmpty, forbidden, DEFAULT_PENALTY)
        .map(|cells| path_from_cells(occ, cells, DEFAULT_PENALTY))
}

/// A single displacement hop produced by space search / path clearing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClearingMove {
    pub qubit: usize,
    pub from: Cell,
    pub to: Cell,
}

/// Moves that empty `cell` by chain-pushing its occupants toward the
/// nearest empty cell: walking the path backwards, each occupant steps into
/// the cell just vacated, so every hop lands on a momentarily empty cell.
/// Returns `None` when no empty cell is reachable.
pub fn chain_push(
    occ: &OccupancyState,
    cell: Cell,
    forbidden: &BTreeSet<Cell>,
) -> Option<Vec<ClearingMove>> {
    if occ.occupant(cell).is_empty() {
        return Some(Vec::new());
    }
    let path = find_path_to_empty(occ, cell, forbidden)?;
    let mut moves = Vec::new();
    for i in (0..path.cells.len() - 1).rev() {
        if let Occupant::Data(q) = occ.occupant(path.cells[i]) {
            moves.push(ClearingMove {
                qubit: q,
                from: path.cells[i],
                to: path.cells[i + 1],
            });
        }
    }
    Some(moves)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdjacencyRequirement {
    AnyNeighbour,
    VerticalNeighbour,
    HorizontalNeighbour,
    /// A diagonal partner slot plus the shared ancilla between it and the
    /// target; the ancilla must be a vertical neighbour of the target.
    DiagonalWithSharedAncilla,
}

/// Find the neighbour cell of `target` (per the requirement) that takes the
/// fewest single-hop moves to clear, together with those moves. Ties break
/// toward the lexicographically smallest cell.
pub fn space_search(
    occ: &OccupancyState,
    target: Cell,
    required: AdjacencyRequirement,
) -> Result<(Cell, Vec<ClearingMove>), RouteError> {
    let vertical: Vec<Cell> = [
        target.row.checked_sub(1).map(|r| Cell::new(r, target.col)),
        (target.row + 1 < occ.rows).then(|| Cell::new(target.row + 1, target.col)),
    ]
    .into_iter()
    .flatten()
    .collect();
    let horizontal: Vec<Cell> = [
        target.col.checked_sub(1).map(|c| Cell::new(target.row, c)),
        (target.col + 1 < occ.cols).then(|| Cell::new(target.row, target.col + 1)),
    ]
    .into_iter()
    .flatten()
    .collect();

    let mut forbidden = BTreeSet::new();
    forbidden.insert(target);

    let clear_cost = |cell: Cell, extra_forbidden: &BTreeSet<Cell>| -> Option<Vec<ClearingMove>> {
        match occ.occupant(cell) {
            Occupant::Empty => Some(Vec::new()),
            Occupant::Data(_) => {
                let mut f = forbidden.clone();
                f.extend(extra_forbidden.iter().copied());
                chain_push(occ, cell, &f)
            }
            _ => None,
        }
    };

    let mut best: Option<(usize, Cell, Vec<ClearingMove>)> = None;
    let mut consider = |cell: Cell, moves: Option<Vec<ClearingMove>>| {
        if let Some(moves) = moves {
            let cost = moves.len();
            let better = match &best {
                None => true,
                Some((bc, bcell, _)) => cost < *bc || (cost == *bc && cell < *bcell),
            };
            if better {
                best = Some((cost, cell, moves));
            }
        }
    };

    match required {
        AdjacencyRequirement::AnyNeighbour => {
            for cell in occ.neighbours(target) {
                consider(cell, clear_cost(cell, &BTreeSet::new()));
            }
        }
        AdjacencyRequirement::VerticalNeighbour => {
            for cell in vertical {
                consider(cell, clear_cost(cell, &BTreeSet::new()));
            }
        }
        AdjacencyRequirement::HorizontalNeighbour => {
            for cell in horizontal {
                consider(cell, clear_cost(cell, &BTreeSet::new()));
            }
        }
        AdjacencyRequirement::DiagonalWithSharedAncilla => {
            // ancilla vertically adjacent to target, partner slot
            // horizontally adjacent to the ancilla (the CNOT geometry)
            for anc in vertical {
                for slot in [
                    anc.col.checked_sub(1).map(|c| Cell::new(anc.row, c)),
                    (anc.col + 1 < occ.cols).then(|| Cell::new(anc.row, anc.col + 1)),
                ]
                .into_iter()
                .flatten()
                {
                    let anc_moves = clear_cost(anc, &BTreeSet::from([slot]));
                    let slot_moves = clear_cost(slot, &BTreeSet::from([anc]));
                    if let (Some(a), Some(b)) = (anc_moves, slot_moves) {
                        let mut all = a;
                        all.extend(b);
                        consider(anc, Some(all));
                    }
                }
            }
        }
    }

    best.map(|(_, cell, moves)| (cell, moves))
        .ok_or(RouteError::NoSpace(target))
}

/// DOT rendering of the Dijkstra decision tree rooted at `src`: every
/// settled cell with its cost and chosen parent edge.
pub fn decision_tree_dot(occ: &OccupancyState, src: Cell, forbidden: &BTreeSet<Cell>) -> String {
    let ncells = occ.rows * occ.cols;
    let idx = |c: Cell| c.row * occ.cols + c.col;
    let cell_of = |i: usize| Cell::new(i / occ.cols, i % occ.cols);
    let mut dist = vec![u64::MAX; ncells];
    let mut parent = vec![usize::MAX; ncells];
    let mut done = vec![false; ncells];
    let mut heap = BinaryHeap::new();
    dist[idx(src)] = 0;
    heap.push(Reverse((0u64, src.row, src.col)));
    while let Some(Reverse((cost, row, col))) = heap.pop() {
        let cell = Cell::new(row, col);
        if done[idx(cell)] {
            continue;
        }
        done[idx(cell)] = true;
        for next in occ.neighbours(cell) {
            if forbidden.contains(&next) {
                continue;
            }
            let Some(w) = cell_weight(occ, next, DEFAULT_PENALTY) else {
                continue;
            };
            let nd = cost + w;
            if nd < dist[idx(next)] {
                dist[idx(next)] = nd;
                parent[idx(next)] = idx(cell);
                heap.push(Reverse((nd, next.row, next.col)));
            }
        }
    }

    let mut out = String::from("digraph dijkstra {\n");
    for i in 0..ncells {
        if dist[i] == u64::MAX {
            continue;
        }
        let c = cell_of(i);
        out.push_str(&format!(
            "  n{}_{} [label=\"({},{}) c={}\"];\n",
            c.row, c.col, c.row, c.col, dist[i]
        ));
        if parent[i] != usize::MAX {
            let p = cell_of(parent[i]);
            out.push_str(&format!(
                "  n{}_{} -> n{}_{};\n",
                p.row, p.col, c.row, c.col
            ));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: usize, cols: usize, data: &[(usize, usize)]) -> OccupancyState {
        let mut occ = OccupancyState::empty(rows, cols);
        for (q, &(r, c)) in data.iter().enumerate() {
            occ.set(Cell::new(r, c), Occupant::Data(q));
        }
        occ
    }

    #[test]
    fn free_corridor_costs_nothing() {
        let occ = grid(5, 5, &[]);
        let p = find_path(&occ, Cell::new(0, 0), Cell::new(0, 3), &BTreeSet::new()).unwrap();
        assert_eq!(p.hops, 3);
        assert_eq!(p.occupied_crossed, 0);
        assert_eq!(p.reported_cost, 0);
        assert_eq!(p.surrogate_cost, 3);
        assert_eq!(
            p.cells,
            vec![
                Cell::new(0, 0),
                Cell::new(0, 1),
                Cell::new(0, 2),
                Cell::new(0, 3)
            ]
        );
    }

    #[test]
    fn enclosed_source_has_no_path() {
        let occ = grid(5, 5, &[]);
        let forbidden: BTreeSet<Cell> = [
            Cell::new(1, 2),
            Cell::new(3, 2),
            Cell::new(2, 1),
            Cell::new(2, 3),
        ]
        .into();
        assert_eq!(
            find_path(&occ, Cell::new(2, 2), Cell::new(0, 0), &forbidden),
            Err(RouteError::NoPath(Cell::new(2, 2), Cell::new(0, 0)))
        );
    }

    #[test]
    fn paths_avoid_forbidden_cells() {
        let occ = grid(4, 4, &[]);
        let forbidden: BTreeSet<Cell> = [Cell::new(0, 1), Cell::new(1, 1)].into();
        let p = find_path(&occ, Cell::new(0, 0), Cell::new(0, 3), &forbidden).unwrap();
        for c in &p.cells {
            assert!(!forbidden.contains(c));
        }
    }

    #[test]
    fn prefers_detour_over_crossing() {
        // a wall of qubits with a gap: the free detour wins over the
        // straight-line crossing
        let occ = grid(5, 5, &[(0, 2), (1, 2), (2, 2), (3, 2)]);
        let p = find_path(&occ, Cell::new(2, 0), Cell::new(2, 4), &BTreeSet::new()).unwrap();
        assert_eq!(p.occupied_crossed, 0);
        assert!(p.hops > 4);
        assert_eq!(p.reported_cost, 0);
    }

    #[test]
    fn crosses_when_fully_walled() {
        let occ = grid(3, 5, &[(0, 2), (1, 2), (2, 2)]);
        let p = find_path(&occ, Cell::new(1, 0), Cell::new(1, 4), &BTreeSet::new()).unwrap();
        assert_eq!(p.occupied_crossed, 1);
        assert_eq!(p.hops, 4);
        assert_eq!(p.reported_cost, 4);
        assert_eq!(p.surrogate_cost, 4 + DEFAULT_PENALTY);
    }

    #[test]
    fn magic_states_are_impassable() {
        let mut occ = grid(3, 3, &[]);
        occ.set(Cell::new(0, 1), Occupant::Magic(0));
        occ.set(Cell::new(1, 1), Occupant::Magic(1));
        occ.set(Cell::new(2, 1), Occupant::Magic(2));
        assert!(find_path(&occ, Cell::new(0, 0), Cell::new(0, 2), &BTreeSet::new()).is_err());
    }

    #[test]
    fn deterministic_across_runs() {
        let occ = grid(6, 6, &[(2, 2), (2, 3), (3, 1), (4, 4)]);
        let a = find_path(&occ, Cell::new(0, 0), Cell::new(5, 5), &BTreeSet::new()).unwrap();
        let b = find_path(&occ, Cell::new(0, 0), Cell::new(5, 5), &BTreeSet::new()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn space_search_prefers_already_empty_vertical_neighbour() {
        let occ = grid(4, 4, &[(2, 1), (2, 3)]);
        let (cell, moves) =
            space_search(&occ, Cell::new(2, 2), AdjacencyRequirement::VerticalNeighbour).unwrap();
        assert_eq!(cell, Cell::new(1, 2));
        assert!(moves.is_empty());
    }

    #[test]
    fn space_search_relocates_the_cheapest_neighbour() {
        // qubit 0 at the centre of a 5x5 grid; all four neighbours hold
        // qubits. Qubit 1 (above) has an empty cell right behind it, the
        // others sit in longer corridors, so clearing the top neighbour is
        // the single-move option.
        let mut occ = grid(
            5,
            5,
            &[
                (2, 2), // 0: the gate target
                (1, 2), // 1: above, one push frees it
                (2, 1), // 2: left
                (3, 2), // 3: below
                (2, 3), // 4: right
                (2, 0), // 5: blocks the left corridor
                (4, 2), // 6: blocks the bottom corridor
                (2, 4), // 7: blocks the right corridor
            ],
        );
        occ.set(Cell::new(0, 2), Occupant::Empty);
        let (cell, moves) =
            space_search(&occ, Cell::new(2, 2), AdjacencyRequirement::AnyNeighbour).unwrap();
        assert_eq!(cell, Cell::new(1, 2));
        assert_eq!(
            moves,
            vec![ClearingMove {
                qubit: 1,
                from: Cell::new(1, 2),
                to: Cell::new(0, 2)
            }]
        );
    }

    #[test]
    fn space_search_fails_on_saturated_grid() {
        let all: Vec<(usize, usize)> = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .collect();
        let occ = grid(3, 3, &all);
        assert_eq!(
            space_search(&occ, Cell::new(1, 1), AdjacencyRequirement::AnyNeighbour),
            Err(RouteError::NoSpace(Cell::new(1, 1)))
        );
    }

    #[test]
    fn chain_push_moves_land_on_momentarily_empty_cells() {
        // corridor of three qubits pushed toward the single empty end
        let occ = grid(1, 5, &[(0, 1), (0, 2), (0, 3)]);
        let moves = chain_push(&occ, Cell::new(0, 1), &BTreeSet::from([Cell::new(0, 0)])).unwrap();
        let mut sim = occ.clone();
        for m in &moves {
            assert!(sim.occupant(m.to).is_empty(), "{m:?} lands on occupied");
            sim.move_occupant(m.from, m.to);
        }
        assert!(sim.occupant(Cell::new(0, 1)).is_empty());
    }

    #[test]
    fn diagonal_requirement_clears_ancilla_and_slot() {
        let occ = grid(4, 4, &[(1, 1)]);
        let (anc, moves) = space_search(
            &occ,
            Cell::new(1, 1),
            AdjacencyRequirement::DiagonalWithSharedAncilla,
        )
        .unwrap();
        assert!(anc.is_vertical_neighbour(Cell::new(1, 1)));
        assert!(moves.is_empty());
    }

    #[test]
    fn dot_dump_lists_reachable_cells() {
        let occ = grid(2, 2, &[]);
        let dot = decision_tree_dot(&occ, Cell::new(0, 0), &BTreeSet::new());
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("label=").count(), 4);
        assert_eq!(dot.matches("->").count(), 3);
    }
}
