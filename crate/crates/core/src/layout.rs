//! Routing-path-parameterized qubit layouts.
//!
//! An L x L block of data slots is surrounded and interleaved by full rows
//! and columns of bus cells. The parameter `r` counts routing paths: the
//! first four are the top row, left column, bottom row and right column;
//! every further path alternates an interior vertical column and an
//! interior horizontal row, spread evenly between the data rows/columns.
//! A layout with h horizontal and v vertical lines has (L+h)(L+v) cells.

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        self.manhattan(other) == 1
    }

    pub fn is_vertical_neighbour(self, other: Cell) -> bool {
        self.col == other.col && self.row.abs_diff(other.row) == 1
    }

    pub fn is_horizontal_neighbour(self, other: Cell) -> bool {
        self.row == other.row && self.col.abs_diff(other.col) == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    DataSlot,
    Bus,
}

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("routing path count {r} outside [2, {max}]")]
    InvalidRoutingCount { r: usize, max: usize },
    #[error("circuit needs {needed} data slots but the layout has {available}")]
    TooManyQubits { needed: usize, available: usize },
    #[error("not enough boundary bus cells for {0} factory ports")]
    NoBoundaryBus(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Default magic-state factory footprint in logical tiles (15-to-1 layout).
pub const DEFAULT_FACTORY_FOOTPRINT: usize = 11;

#[derive(Clone, Debug)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
    /// Routing path count the grid was built with.
    pub r: usize,
    /// Data side length (the grid hosts an L x L block of data slots).
    pub side_length: usize,
    /// Row-major cell kinds.
    cells: Vec<CellKind>,
    /// Row-major list of data slot coordinates; slot rank = index.
    pub data_slots: Vec<Cell>,
    /// (factory id, boundary port cell).
    pub factory_ports: Vec<(usize, Cell)>,
    /// Logical tiles per off-grid factory, counted in qubit totals.
    pub factory_footprint: usize,
}

/// Positions for `k` interior lines between `l` data rows (or columns):
/// line i sits after data index `floor(i*l/(k+1))`, which spreads the lines
/// evenly with ties broken toward lower indices.
fn interior_breaks(l: usize, k: usize) -> Vec<usize> {
    (1..=k).map(|i| i * l / (k + 1)).collect()
}

/// Expand boundary flags and interior breaks into a row-major axis map.
/// Returns a vector of `true` for bus lines over `l + lines` entries.
fn axis(l: usize, leading: bool, trailing: bool, interior: &[usize]) -> Vec<bool> {
    let mut out = Vec::new();
    if leading {
        out.push(true);
    }
    let mut break_iter = interior.iter().peekable();
    for d in 0..l {
        out.push(false);
        while break_iter.peek() == Some(&&(d + 1)) {
            out.push(true);
            break_iter.next();
        }
    }
    if trailing {
        out.push(true);
    }
    out
}

pub fn max_routing_paths(side_length: usize) -> usize {
    2 * side_length + 2
}

pub fn build_layout(side_length: usize, r: usize) -> Result<GridLayout, LayoutError> {
    let max = max_routing_paths(side_length);
    if r < 2 || r > max {
        return Err(LayoutError::InvalidRoutingCount { r, max });
    }

    // Allocation order: top, left, bottom, right, then alternating interior
    // vertical / interior horizontal.
    let top = true;
    let left = r >= 2;
    let bottom = r >= 3;
    let right = r >= 4;
    let extra = r.saturating_sub(4);
    let interior_v = extra.div_ceil(2);
    let interior_h = extra / 2;

    let l = side_length;
    let row_is_bus = axis(l, top, bottom, &interior_breaks(l, interior_h));
    let col_is_bus = axis(l, left, right, &interior_breaks(l, interior_v));
    let (rows, cols) = (row_is_bus.len(), col_is_bus.len());

    let mut cells = Vec::with_capacity(rows * cols);
    let mut data_slots = Vec::with_capacity(l * l);
    for (ri, &rb) in row_is_bus.iter().enumerate() {
        for (ci, &cb) in col_is_bus.iter().enumerate() {
            if rb || cb {
                cells.push(CellKind::Bus);
            } else {
                cells.push(CellKind::DataSlot);
                data_slots.push(Cell::new(ri, ci));
            }
        }
    }
    debug_assert_eq!(data_slots.len(), l * l);

    Ok(GridLayout {
        rows,
        cols,
        r,
        side_length,
        cells,
        data_slots,
        factory_ports: Vec::new(),
        factory_footprint: DEFAULT_FACTORY_FOOTPRINT,
    })
}

impl GridLayout {
    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn kind(&self, cell: Cell) -> CellKind {
        self.cells[cell.row * self.cols + cell.col]
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    pub fn n_factories(&self) -> usize {
        self.factory_ports.len()
    }

    /// Cell count, plus factory footprints when requested.
    pub fn total_qubits(&self, include_factories: bool) -> usize {
        let factories = if include_factories {
            self.n_factories() * self.factory_footprint
        } else {
            0
        };
        self.cell_count() + factories
    }

    fn row_of_bus(&self, row: usize) -> bool {
        (0..self.cols).all(|c| self.kind(Cell::new(row, c)) == CellKind::Bus)
    }

    /// Candidate port positions along one boundary line: `m` evenly spaced
    /// cells at indices floor(len*k/(m+1)), deduplicated by probing right.
    fn spaced(len: usize, m: usize, taken: &mut Vec<usize>) -> Vec<usize> {
        let mut out = Vec::new();
        for k in 1..=m {
            let mut idx = len * k / (m + 1);
            let mut probed = 0;
            while (taken.contains(&idx) || out.contains(&idx)) && probed < len {
                idx = (idx + 1) % len;
                probed += 1;
            }
            if probed == len {
                break;
            }
            out.push(idx);
        }
        taken.extend(out.iter().copied());
        out
    }

    /// Place `n_msf` factory ports on boundary bus cells: evenly spaced along
    /// the top row first, spilling to the bottom row and then the left/right
    /// columns when a boundary fills up.
    pub fn place_factories(mut self, n_msf: usize) -> Result<GridLayout, LayoutError> {
        if n_msf == 0 {
            return Err(LayoutError::InvalidArgument(
                "factory count must be >= 1".into(),
            ));
        }
        let mut ports: Vec<Cell> = Vec::new();
        let mut remaining = n_msf;

        // Top row is always a bus line (r >= 2).
        let mut taken = Vec::new();
        for idx in Self::spaced(self.cols, remaining.min(self.cols), &mut taken) {
            ports.push(Cell::new(0, idx));
        }
        remaining = n_msf - ports.len();

        if remaining > 0 && self.row_of_bus(self.rows - 1) {
            let mut taken = Vec::new();
            for idx in Self::spaced(self.cols, remaining.min(self.cols), &mut taken) {
                ports.push(Cell::new(self.rows - 1, idx));
            }
            remaining = n_msf - ports.len();
        }

        for col in [0, self.cols - 1] {
            if remaining == 0 {
                break;
            }
            let free: Vec<usize> = (1..self.rows - 1)
                .filter(|&row| {
                    self.kind(Cell::new(row, col)) == CellKind::Bus
                        && !ports.contains(&Cell::new(row, col))
                })
                .collect();
            if free.is_empty() {
                continue;
            }
            let mut taken = Vec::new();
            for idx in Self::spaced(free.len(), remaining.min(free.len()), &mut taken) {
                ports.push(Cell::new(free[idx], col));
            }
            remaining = n_msf - ports.len();
        }

        if remaining > 0 {
            return Err(LayoutError::NoBoundaryBus(n_msf));
        }
        debug_assert!(ports.iter().all(|&p| self.kind(p) == CellKind::Bus));
        self.factory_ports = ports.into_iter().enumerate().collect();
        Ok(self)
    }

    /// ASCII rendering: `D` data slot, `.` bus, `F` factory port.
    pub fn ascii(&self) -> String {
        let mut out = String::new();
        for row in 0..self.rows {
            for col in 0..self.cols {
                let cell = Cell::new(row, col);
                let ch = if self.factory_ports.iter().any(|&(_, p)| p == cell) {
                    'F'
                } else {
                    match self.kind(cell) {
                        CellKind::DataSlot => 'D',
                        CellKind::Bus => '.',
                    }
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct LayoutJson<'a> {
            rows: usize,
            cols: usize,
            r: usize,
            /// Run-length encoded row-major cell kinds: [kind, count] pairs.
            cells: Vec<(char, usize)>,
            data_positions: &'a [Cell],
            factory_ports: &'a [(usize, Cell)],
            factory_footprint: usize,
        }

        let mut rle: Vec<(char, usize)> = Vec::new();
        for kind in &self.cells {
            let ch = match kind {
                CellKind::DataSlot => 'D',
                CellKind::Bus => 'B',
            };
            match rle.last_mut() {
                Some((c, n)) if *c == ch => *n += 1,
                _ => rle.push((ch, 1)),
            }
        }

        serde_json::to_string_pretty(&LayoutJson {
            rows: self.rows,
            cols: self.cols,
            r: self.r,
            cells: rle,
            data_positions: &self.data_slots,
            factory_ports: &self.factory_ports,
            factory_footprint: self.factory_footprint,
        })
        .expect("layout serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts_match_construction() {
        assert_eq!(build_layout(10, 4).unwrap().cell_count(), 144);
        assert_eq!(build_layout(10, 6).unwrap().cell_count(), 169);
        assert_eq!(build_layout(10, 22).unwrap().cell_count(), 441);
        assert_eq!(build_layout(4, 2).unwrap().cell_count(), 25);
    }

    #[test]
    fn routing_count_bounds() {
        assert!(matches!(
            build_layout(10, 1),
            Err(LayoutError::InvalidRoutingCount { .. })
        ));
        assert!(matches!(
            build_layout(10, 23),
            Err(LayoutError::InvalidRoutingCount { .. })
        ));
        assert!(build_layout(2, 6).is_ok());
        assert!(build_layout(2, 7).is_err());
    }

    #[test]
    fn cell_count_monotone_in_r() {
        for l in [2usize, 4, 6, 10] {
            let mut prev = 0;
            for r in 2..=max_routing_paths(l) {
                let n = build_layout(l, r).unwrap().cell_count();
                assert!(n >= prev, "L={l} r={r}: {n} < {prev}");
                prev = n;
            }
        }
    }

    #[test]
    fn data_to_ancilla_ratio_in_reported_range() {
        for r in [3usize, 4] {
            let g = build_layout(10, r).unwrap();
            let data = 100.0;
            let ancilla = (g.cell_count() - 100) as f64;
            let ratio = data / ancilla;
            assert!(
                (2.0..=3.2).contains(&ratio),
                "r={r}: ratio {ratio} outside [2.0, 3.2]"
            );
        }
    }

    #[test]
    fn routing_lines_span_the_grid() {
        for (l, r) in [(4usize, 2usize), (4, 5), (10, 6), (10, 13), (6, 14)] {
            let g = build_layout(l, r).unwrap();
            // every bus row/column flagged during construction is full; check
            // by scanning: a row is a line iff all its cells are bus
            let mut lines = 0;
            for row in 0..g.rows {
                let all = (0..g.cols).all(|c| g.kind(Cell::new(row, c)) == CellKind::Bus);
                let any = (0..g.cols).any(|c| g.kind(Cell::new(row, c)) == CellKind::Bus);
                if all {
                    lines += 1;
                } else {
                    // rows that are not lines still contain bus cells where
                    // vertical lines cross them
                    assert!(any == (g.cols > l));
                }
            }
            for col in 0..g.cols {
                if (0..g.rows).all(|r2| g.kind(Cell::new(r2, col)) == CellKind::Bus) {
                    lines += 1;
                }
            }
            assert_eq!(lines, r, "L={l} r={r}");
            assert_eq!(g.data_slots.len(), l * l);
        }
    }

    #[test]
    fn factory_ports_evenly_spaced_on_top() {
        let g = build_layout(10, 4).unwrap().place_factories(1).unwrap();
        assert_eq!(g.factory_ports, vec![(0, Cell::new(0, 6))]);

        let g = build_layout(10, 4).unwrap().place_factories(4).unwrap();
        let cols: Vec<usize> = g.factory_ports.iter().map(|&(_, p)| p.col).collect();
        assert_eq!(cols, vec![2, 4, 7, 9]);
        assert!(g.factory_ports.iter().all(|&(_, p)| p.row == 0));
    }

    #[test]
    fn factory_count_zero_is_invalid() {
        assert!(matches!(
            build_layout(10, 4).unwrap().place_factories(0),
            Err(LayoutError::InvalidArgument(_))
        ));
    }

    #[test]
    fn factory_ports_spill_to_other_boundaries() {
        // L=2, r=2: 3x3 grid, top row (3 cells) + left column are bus.
        let g = build_layout(2, 2).unwrap().place_factories(4).unwrap();
        assert_eq!(g.factory_ports.len(), 4);
        let cells: Vec<Cell> = g.factory_ports.iter().map(|&(_, p)| p).collect();
        let unique: std::collections::BTreeSet<_> = cells.iter().collect();
        assert_eq!(unique.len(), 4);
        for &p in &cells {
            assert_eq!(g.kind(p), CellKind::Bus);
            assert!(p.row == 0 || p.row == g.rows - 1 || p.col == 0 || p.col == g.cols - 1);
        }
    }

    #[test]
    fn total_qubits_with_factories() {
        let g = build_layout(10, 4).unwrap().place_factories(1).unwrap();
        assert_eq!(g.total_qubits(false), 144);
        assert_eq!(g.total_qubits(true), 155);
    }

    #[test]
    fn ascii_render_small() {
        let g = build_layout(2, 2).unwrap().place_factories(1).unwrap();
        assert_eq!(g.ascii(), ".F.\n.DD\n.DD\n");
    }

    #[test]
    fn json_roundtrips_rle() {
        let g = build_layout(2, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        let total: usize = v["cells"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p[1].as_u64().unwrap() as usize)
            .sum();
        assert_eq!(total, g.cell_count());
        assert_eq!(v["r"], 3);
    }
}
