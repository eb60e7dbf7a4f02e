//! Clifford+T circuit representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over a single qubit
//! register. Gate order is program order and is what the dependency
//! graph is built from.

use serde::{Deserialize, Serialize};

/// Absolute tolerance (radians) when deciding whether an RZ angle is a
/// Clifford angle (an integer multiple of pi/2).
pub const CLIFFORD_ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Z,
    Sx,
    T,
    Tdg,
    Rz,
    Cnot,
}

impl GateKind {
    pub fn is_two_qubit(self) -> bool {
        self == GateKind::Cnot
    }

    /// Gates that consume a magic state when executed.
    /// RZ is handled separately because it depends on the angle.
    pub fn is_t_like(self) -> bool {
        matches!(self, GateKind::T | GateKind::Tdg)
    }

    pub fn qasm_name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::Sx => "sx",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rz => "rz",
            GateKind::Cnot => "cx",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    /// Qubit indices; two entries for CNOT (control, target), one otherwise.
    pub operands: Vec<usize>,
    /// Rotation angle in radians, present exactly when `kind == Rz`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl Gate {
    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q)
    }
    pub fn s(q: usize) -> Self {
        Self::one(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::one(GateKind::Sdg, q)
    }
    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q)
    }
    pub fn z(q: usize) -> Self {
        Self::one(GateKind::Z, q)
    }
    pub fn sx(q: usize) -> Self {
        Self::one(GateKind::Sx, q)
    }
    pub fn t(q: usize) -> Self {
        Self::one(GateKind::T, q)
    }
    pub fn tdg(q: usize) -> Self {
        Self::one(GateKind::Tdg, q)
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Gate {
            kind: GateKind::Rz,
            operands: vec![q],
            angle: Some(angle),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::Cnot,
            operands: vec![control, target],
            angle: None,
        }
    }

    fn one(kind: GateKind, q: usize) -> Self {
        Gate {
            kind,
            operands: vec![q],
            angle: None,
        }
    }

    /// True when executing this gate consumes one magic state: T, Tdg and
    /// any RZ whose angle is not a multiple of pi/2 within tolerance.
    pub fn consumes_magic_state(&self) -> bool {
        match self.kind {
            GateKind::T | GateKind::Tdg => true,
            GateKind::Rz => !is_clifford_angle(self.angle.unwrap_or(0.0)),
            _ => false,
        }
    }

    /// Pauli gates are tracked in the classical frame and never touch the grid.
    pub fn is_virtual(&self) -> bool {
        matches!(self.kind, GateKind::X | GateKind::Z)
    }

    pub fn check(&self, n_qubits: usize) -> Result<(), String> {
        let want = if self.kind.is_two_qubit() { 2 } else { 1 };
        if self.operands.len() != want {
            return Err(format!(
                "{:?} expects {} operand(s), got {}",
                self.kind,
                want,
                self.operands.len()
            ));
        }
        if self.operands.len() == 2 && self.operands[0] == self.operands[1] {
            return Err(format!("{:?} operands must be distinct", self.kind));
        }
        for &q in &self.operands {
            if q >= n_qubits {
                return Err(format!("qubit index {} out of range (n={})", q, n_qubits));
            }
        }
        match (self.kind, self.angle) {
            (GateKind::Rz, Some(a)) if a.is_finite() => Ok(()),
            (GateKind::Rz, _) => Err("rz requires a finite angle".into()),
            (_, Some(_)) => Err(format!("{:?} takes no angle", self.kind)),
            (_, None) => Ok(()),
        }
    }
}

/// `angle` is an integer multiple of pi/2 within [`CLIFFORD_ANGLE_TOL`].
pub fn is_clifford_angle(angle: f64) -> bool {
    let k = (angle / std::f64::consts::FRAC_PI_2).round();
    (angle - k * std::f64::consts::FRAC_PI_2).abs() <= CLIFFORD_ANGLE_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, n_qubits: usize) -> Self {
        Circuit {
            name: name.into(),
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert!(gate.check(self.n_qubits).is_ok(), "invalid gate");
        self.gates.push(gate);
    }

    pub fn check(&self) -> Result<(), String> {
        for (i, g) in self.gates.iter().enumerate() {
            g.check(self.n_qubits).map_err(|e| format!("gate {}: {}", i, e))?;
        }
        Ok(())
    }

    /// Number of magic states the circuit consumes: one per T/Tdg and one per
    /// non-Clifford RZ. Clifford RZ angles (multiples of pi/2) are free.
    pub fn count_t_states(&self) -> usize {
        self.gates.iter().filter(|g| g.consumes_magic_state()).count()
    }

    /// Gate counts keyed by kind, in a fixed kind order.
    pub fn gate_counts(&self) -> Vec<(GateKind, usize)> {
        let kinds = [
            GateKind::H,
            GateKind::S,
            GateKind::Sdg,
            GateKind::X,
            GateKind::Z,
            GateKind::Sx,
            GateKind::T,
            GateKind::Tdg,
            GateKind::Rz,
            GateKind::Cnot,
        ];
        kinds
            .iter()
            .map(|&k| (k, self.gates.iter().filter(|g| g.kind == k).count()))
            .filter(|&(_, n)| n > 0)
            .collect()
    }

    pub fn count_of(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Serialize back to OpenQASM 2.0 text.
    pub fn to_qasm(&self) -> String {
        let mut out = String::new();
        out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        out.push_str(&format!("qreg q[{}];\n", self.n_qubits));
        for g in &self.gates {
            match g.kind {
                GateKind::Cnot => {
                    out.push_str(&format!("cx q[{}],q[{}];\n", g.operands[0], g.operands[1]))
                }
                GateKind::Rz => out.push_str(&format!(
                    "rz({:.17}) q[{}];\n",
                    g.angle.unwrap(),
                    g.operands[0]
                )),
                k => out.push_str(&format!("{} q[{}];\n", k.qasm_name(), g.operands[0])),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }
}
