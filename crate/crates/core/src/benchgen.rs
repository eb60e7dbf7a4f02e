//! Generators for the condensed-matter benchmark circuits.
//!
//! Each model is a single-Trotter-step circuit over an L x L spin grid with
//! row-major qubit indexing. Two-body exponentials use the standard CNOT
//! conjugation templates:
//!
//! - ZZ: CNOT, RZ, CNOT
//! - XX: H H, CNOT, RZ, CNOT, H H
//! - YY: Sdg Sdg, H H, CNOT, RZ, CNOT, H H, S S
//!
//! RZ angles are a fixed non-Clifford constant so every rotation consumes
//! exactly one magic state.

use crate::circuit::{Circuit, Gate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default rotation angle: non-Clifford, so it counts as a T-state consumer.
pub const DEFAULT_ANGLE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeModel {
    Ising2d,
    Heisenberg2d,
    FermiHubbard2d,
}

impl LatticeModel {
    pub fn name(self) -> &'static str {
        match self {
            LatticeModel::Ising2d => "ising",
            LatticeModel::Heisenberg2d => "heisenberg",
            LatticeModel::FermiHubbard2d => "fermihubbard",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ising" => Some(LatticeModel::Ising2d),
            "heisenberg" => Some(LatticeModel::Heisenberg2d),
            "fermihubbard" => Some(LatticeModel::FermiHubbard2d),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LatticeSpec {
    pub model: LatticeModel,
    pub side_length: usize,
    pub trotter_steps: usize,
}

impl LatticeSpec {
    pub fn new(model: LatticeModel, side_length: usize) -> Self {
        LatticeSpec {
            model,
            side_length,
            trotter_steps: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),
}

/// QASM file name convention for generated benchmarks.
pub fn file_name(spec: &LatticeSpec) -> String {
    format!("{}_{}x{}.qasm", spec.model.name(), spec.side_length, spec.side_length)
}

pub fn generate(spec: &LatticeSpec) -> Result<Circuit, BenchError> {
    if spec.side_length < 2 {
        return Err(BenchError::InvalidSpec("side length must be >= 2".into()));
    }
    if spec.trotter_steps < 1 {
        return Err(BenchError::InvalidSpec("trotter steps must be >= 1".into()));
    }
    match spec.model {
        LatticeModel::Ising2d => Ok(gen_ising2d(spec)),
        LatticeModel::Heisenberg2d => Ok(gen_heisenberg2d(spec)),
        LatticeModel::FermiHubbard2d => gen_fermi_hubbard2d(spec),
    }
}

fn qubit(l: usize, row: usize, col: usize) -> usize {
    row * l + col
}

/// Nearest-neighbour edges of the L x L grid: horizontal row-major, then
/// vertical row-major.
fn grid_edges(l: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(2 * l * (l - 1));
    for r in 0..l {
        for c in 0..l - 1 {
            edges.push((qubit(l, r, c), qubit(l, r, c + 1)));
        }
    }
    for r in 0..l - 1 {
        for c in 0..l {
            edges.push((qubit(l, r, c), qubit(l, r + 1, c)));
        }
    }
    edges
}

fn zz(c: &mut Circuit, a: usize, b: usize) {
    c.push(Gate::cnot(a, b));
    c.push(Gate::rz(b, DEFAULT_ANGLE));
    c.push(Gate::cnot(a, b));
}

fn xx(c: &mut Circuit, a: usize, b: usize) {
    c.push(Gate::h(a));
    c.push(Gate::h(b));
    zz(c, a, b);
    c.push(Gate::h(a));
    c.push(Gate::h(b));
}

fn yy(c: &mut Circuit, a: usize, b: usize) {
    c.push(Gate::sdg(a));
    c.push(Gate::sdg(b));
    xx(c, a, b);
    c.push(Gate::s(a));
    c.push(Gate::s(b));
}

/// Transverse-field Ising model: one state-preparation H layer, then per
/// Trotter step a ZZ term per edge and an H-RZ-H field term per qubit.
pub fn gen_ising2d(spec: &LatticeSpec) -> Circuit {
    let l = spec.side_length;
    let n = l * l;
    let mut c = Circuit::new(format!("ising_{l}x{l}"), n);
    for q in 0..n {
        c.push(Gate::h(q));
    }
    for _ in 0..spec.trotter_steps {
        for (a, b) in grid_edges(l) {
            zz(&mut c, a, b);
        }
        for q in 0..n {
            c.push(Gate::h(q));
            c.push(Gate::rz(q, DEFAULT_ANGLE));
            c.push(Gate::h(q));
        }
    }
    c
}

/// Heisenberg model: ZZ + XX + YY per edge.
pub fn gen_heisenberg2d(spec: &LatticeSpec) -> Circuit {
    let l = spec.side_length;
    let mut c = Circuit::new(format!("heisenberg_{l}x{l}"), l * l);
    for _ in 0..spec.trotter_steps {
        for (a, b) in grid_edges(l) {
            zz(&mut c, a, b);
            xx(&mut c, a, b);
            yy(&mut c, a, b);
        }
    }
    c
}

/// Fermi-Hubbard model. Hopping terms (XX + YY) act on horizontal pairs
/// (r, 2c)-(r, 2c+1); interaction terms (ZZ) act on vertical pairs
/// (2r, c)-(2r+1, c). Both families have exactly L^2/2 edges, so L must be
/// even.
pub fn gen_fermi_hubbard2d(spec: &LatticeSpec) -> Result<Circuit, BenchError> {
    let l = spec.side_length;
    if l % 2 != 0 {
        return Err(BenchError::InvalidSpec(
            "fermihubbard requires an even side length".into(),
        ));
    }
    let mut c = Circuit::new(format!("fermihubbard_{l}x{l}"), l * l);
    for _ in 0..spec.trotter_steps {
        for r in 0..l {
            for k in 0..l / 2 {
                let (a, b) = (qubit(l, r, 2 * k), qubit(l, r, 2 * k + 1));
                xx(&mut c, a, b);
                yy(&mut c, a, b);
            }
        }
        for k in 0..l / 2 {
            for col in 0..l {
                zz(&mut c, qubit(l, 2 * k, col), qubit(l, 2 * k + 1, col));
            }
        }
    }
    Ok(c)
}
