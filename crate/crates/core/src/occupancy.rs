//! Live grid occupancy: which cell holds which data qubit or magic state.
//!
//! The layout is immutable; this is the state the router reads and the
//! scheduler mutates. One scheduling run owns its `OccupancyState`
//! exclusively.

use crate::circuit::Circuit;
use crate::layout::{Cell, GridLayout, LayoutError};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occupant {
    Empty,
    Data(usize),
    Magic(usize),
    /// Cell claimed by an executing operation until the given tick.
    /// Only the replay validator materializes reservations this way.
    Reserved { until: u64 },
}

impl Occupant {
    pub fn is_empty(self) -> bool {
        self == Occupant::Empty
    }

    pub fn is_data(self) -> bool {
        matches!(self, Occupant::Data(_))
    }
}

/// Identifier for anything that can sit on (or move across) the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OccupantId {
    Qubit(usize),
    Magic(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MappingMode {
    Grid2d,
    Snake1d,
}

#[derive(Clone, Debug)]
pub struct OccupancyState {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<Occupant>,
    qubit_pos: Vec<Cell>,
}

impl OccupancyState {
    pub fn empty(rows: usize, cols: usize) -> Self {
        OccupancyState {
            rows,
            cols,
            cells: vec![Occupant::Empty; rows * cols],
            qubit_pos: Vec::new(),
        }
    }

    fn index(&self, cell: Cell) -> usize {
        debug_assert!(cell.row < self.rows && cell.col < self.cols);
        cell.row * self.cols + cell.col
    }

    pub fn occupant(&self, cell: Cell) -> Occupant {
        self.cells[self.index(cell)]
    }

    pub fn set(&mut self, cell: Cell, occ: Occupant) {
        let i = self.index(cell);
        self.cells[i] = occ;
        if let Occupant::Data(q) = occ {
            if q >= self.qubit_pos.len() {
                self.qubit_pos.resize(q + 1, cell);
            }
            self.qubit_pos[q] = cell;
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubit_pos.len()
    }

    pub fn qubit_cell(&self, q: usize) -> Cell {
        self.qubit_pos[q]
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    /// 4-neighbours in (row, col) lexicographic order.
    pub fn neighbours(&self, cell: Cell) -> Vec<Cell> {
        let mut out = Vec::with_capacity(4);
        if cell.row > 0 {
            out.push(Cell::new(cell.row - 1, cell.col));
        }
        if cell.col > 0 {
            out.push(Cell::new(cell.row, cell.col - 1));
        }
        if cell.col + 1 < self.cols {
            out.push(Cell::new(cell.row, cell.col + 1));
        }
        if cell.row + 1 < self.rows {
            out.push(Cell::new(cell.row + 1, cell.col));
        }
        out
    }

    /// Relocate whatever sits at `from` to the empty cell `to`.
    pub fn move_occupant(&mut self, from: Cell, to: Cell) {
        debug_assert!(self.occupant(to).is_empty(), "move into occupied cell");
        let occ = self.occupant(from);
        debug_assert!(!occ.is_empty(), "move from empty cell");
        let fi = self.index(from);
        self.cells[fi] = Occupant::Empty;
        self.set(to, occ);
    }

    pub fn remove(&mut self, cell: Cell) {
        let i = self.index(cell);
        self.cells[i] = Occupant::Empty;
    }

    /// Count of data-qubit-occupied cells (used by tests).
    pub fn data_count(&self) -> usize {
        self.cells.iter().filter(|o| o.is_data()).count()
    }
}

/// Assign circuit qubits to data slots.
///
/// `Grid2d` puts qubit i on the data slot with row-major rank i, which
/// preserves lattice adjacency for 2D-generated benchmarks on boundary-only
/// layouts. `Snake1d` walks the data slots boustrophedon (row 0 left to
/// right, row 1 right to left, ...), which keeps 1D chains contiguous.
pub fn initial_mapping(
    circuit: &Circuit,
    layout: &GridLayout,
    mode: MappingMode,
) -> Result<OccupancyState, LayoutError> {
    let slots = &layout.data_slots;
    if circuit.n_qubits > slots.len() {
        return Err(LayoutError::TooManyQubits {
            needed: circuit.n_qubits,
            available: slots.len(),
        });
    }

    let mut state = OccupancyState::empty(layout.rows, layout.cols);
    let l = layout.side_length;
    for q in 0..circuit.n_qubits {
        let slot = match mode {
            MappingMode::Grid2d => slots[q],
            MappingMode::Snake1d => {
                let (dr, dc) = (q / l, q % l);
                let dc = if dr % 2 == 0 { dc } else { l - 1 - dc };
                slots[dr * l + dc]
            }
        };
        state.set(slot, Occupant::Data(q));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{gen_ising2d, LatticeModel, LatticeSpec};
    use crate::circuit::Circuit;
    use crate::layout::build_layout;

    #[test]
    fn grid2d_places_qubits_in_rank_order() {
        let layout = build_layout(2, 2).unwrap();
        let c = Circuit::new("four", 4);
        let occ = initial_mapping(&c, &layout, MappingMode::Grid2d).unwrap();
        assert_eq!(occ.qubit_cell(0), Cell::new(1, 1));
        assert_eq!(occ.qubit_cell(1), Cell::new(1, 2));
        assert_eq!(occ.qubit_cell(2), Cell::new(2, 1));
        assert_eq!(occ.qubit_cell(3), Cell::new(2, 2));
    }

    #[test]
    fn snake1d_walks_boustrophedon() {
        let layout = build_layout(2, 2).unwrap();
        let c = Circuit::new("four", 4);
        let occ = initial_mapping(&c, &layout, MappingMode::Snake1d).unwrap();
        // data coordinates (0,0),(0,1),(1,1),(1,0)
        assert_eq!(occ.qubit_cell(0), Cell::new(1, 1));
        assert_eq!(occ.qubit_cell(1), Cell::new(1, 2));
        assert_eq!(occ.qubit_cell(2), Cell::new(2, 2));
        assert_eq!(occ.qubit_cell(3), Cell::new(2, 1));
    }

    #[test]
    fn too_many_qubits_rejected() {
        let layout = build_layout(2, 2).unwrap();
        let c = Circuit::new("five", 5);
        assert!(matches!(
            initial_mapping(&c, &layout, MappingMode::Grid2d),
            Err(LayoutError::TooManyQubits { .. })
        ));
    }

    #[test]
    fn grid2d_preserves_lattice_adjacency_on_boundary_layouts() {
        // Interior routing lines (r >= 5) necessarily separate data rows, so
        // the adjacency guarantee applies to boundary-only layouts.
        for r in [2usize, 3, 4] {
            let spec = LatticeSpec::new(LatticeModel::Ising2d, 10);
            let c = gen_ising2d(&spec);
            let layout = build_layout(10, r).unwrap();
            let occ = initial_mapping(&c, &layout, MappingMode::Grid2d).unwrap();
            for g in &c.gates {
                if g.operands.len() == 2 {
                    let a = occ.qubit_cell(g.operands[0]);
                    let b = occ.qubit_cell(g.operands[1]);
                    assert!(a.is_adjacent(b), "r={r}: {a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn unused_slots_stay_empty() {
        let layout = build_layout(3, 2).unwrap();
        let c = Circuit::new("partial", 5);
        let occ = initial_mapping(&c, &layout, MappingMode::Grid2d).unwrap();
        assert_eq!(occ.data_count(), 5);
        assert!(occ.occupant(layout.data_slots[8]).is_empty());
    }
}
