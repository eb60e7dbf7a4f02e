//! OpenQASM 2.0 subset parser.
//!
//! Accepts a single quantum register and the gate vocabulary
//! {h, s, sdg, x, z, sx, t, tdg, rz(theta), cx}. `barrier`, `creg`,
//! `measure` and comments are tolerated and ignored. RZ gates at Clifford
//! angles (integer multiples of pi/2) are lowered to {I, S, Z, Sdg} during
//! parsing so they never create spurious magic-state demand.

use crate::circuit::{is_clifford_angle, Circuit, Gate, GateKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported gate `{0}`")]
    UnsupportedGate(String),
    #[error("multiple quantum registers are not supported")]
    MultiRegister,
}

struct Statement {
    text: String,
    line: usize,
    col: usize,
}

/// Split source into `;`-terminated statements, stripping `//` comments.
fn statements(text: &str) -> Result<Vec<Statement>, ParseError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start: Option<(usize, usize)> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = match raw.find("//") {
            Some(i) => &raw[..i],
            None => raw,
        };
        for (cn, ch) in line.chars().enumerate() {
            if ch == ';' {
                let (l, c) = start.unwrap_or((ln + 1, cn + 1));
                out.push(Statement {
                    text: std::mem::take(&mut cur),
                    line: l,
                    col: c,
                });
                start = None;
            } else {
                if !ch.is_whitespace() && start.is_none() {
                    start = Some((ln + 1, cn + 1));
                }
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if let Some((l, c)) = start {
        if !cur.trim().is_empty() {
            return Err(ParseError::Syntax {
                line: l,
                col: c,
                msg: "statement missing terminating `;`".into(),
            });
        }
    }
    Ok(out)
}

/// Parse an OpenQASM 2.0 subset into a [`Circuit`].
pub fn parse_qasm(text: &str) -> Result<Circuit, ParseError> {
    parse_qasm_named(text, "qasm")
}

pub fn parse_qasm_named(text: &str, name: &str) -> Result<Circuit, ParseError> {
    let mut circuit = Circuit::new(name, 0);
    let mut reg: Option<(String, usize)> = None;

    for st in statements(text)? {
        let body = st.text.trim();
        if body.is_empty()
            || body.starts_with("OPENQASM")
            || body.starts_with("include")
            || body.starts_with("creg")
            || body.starts_with("barrier")
            || body.starts_with("measure")
        {
            continue;
        }
        if let Some(rest) = body.strip_prefix("qreg") {
            if reg.is_some() {
                return Err(ParseError::MultiRegister);
            }
            let (rname, size) = parse_register(rest, &st)?;
            circuit.n_qubits = size;
            reg = Some((rname, size));
            continue;
        }

        // Gate call: `name q[i];` / `name(arg) q[i];` / `name q[i],q[j];`
        let (head, args) = split_gate_call(body, &st)?;
        let (gname, param) = match head.find('(') {
            Some(i) => {
                let close = head.rfind(')').ok_or_else(|| syntax(&st, "missing `)`"))?;
                (head[..i].trim(), Some(head[i + 1..close].trim().to_string()))
            }
            None => (head, None),
        };

        let reg = reg
            .as_ref()
            .ok_or_else(|| syntax(&st, "gate before qreg declaration"))?;
        let qubits: Vec<usize> = args
            .iter()
            .map(|a| parse_qubit_ref(a, &reg.0, reg.1, &st))
            .collect::<Result<_, _>>()?;

        let kind = match gname {
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "x" => GateKind::X,
            "z" => GateKind::Z,
            "sx" => GateKind::Sx,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "rz" => GateKind::Rz,
            "cx" | "CX" => GateKind::Cnot,
            other => return Err(ParseError::UnsupportedGate(other.to_string())),
        };

        let gate = match kind {
            GateKind::Rz => {
                let expr = param.ok_or_else(|| syntax(&st, "rz requires an angle"))?;
                let angle = parse_angle(&expr, &st)?;
                if qubits.len() != 1 {
                    return Err(syntax(&st, "rz takes one qubit"));
                }
                if is_clifford_angle(angle) {
                    // D-F2 lowering: rz(k*pi/2) -> {I, S, Z, Sdg}.
                    let k = (angle / std::f64::consts::FRAC_PI_2).round() as i64;
                    match k.rem_euclid(4) {
                        0 => continue, // identity
                        1 => Gate::s(qubits[0]),
                        2 => Gate::z(qubits[0]),
                        _ => Gate::sdg(qubits[0]),
                    }
                } else {
                    Gate::rz(qubits[0], angle)
                }
            }
            GateKind::Cnot => {
                if qubits.len() != 2 {
                    return Err(syntax(&st, "cx takes two qubits"));
                }
                Gate::cnot(qubits[0], qubits[1])
            }
            k => {
                if param.is_some() {
                    return Err(syntax(&st, "unexpected parameter list"));
                }
                if qubits.len() != 1 {
                    return Err(syntax(&st, "single-qubit gate takes one qubit"));
                }
                Gate {
                    kind: k,
                    operands: qubits,
                    angle: None,
                }
            }
        };

        gate.check(circuit.n_qubits)
            .map_err(|e| syntax(&st, &e))?;
        circuit.gates.push(gate);
    }

    Ok(circuit)
}

fn syntax(st: &Statement, msg: &str) -> ParseError {
    ParseError::Syntax {
        line: st.line,
        col: st.col,
        msg: msg.to_string(),
    }
}

fn parse_register(rest: &str, st: &Statement) -> Result<(String, usize), ParseError> {
    let rest = rest.trim();
    let open = rest.find('[').ok_or_else(|| syntax(st, "qreg missing `[`"))?;
    let close = rest.find(']').ok_or_else(|| syntax(st, "qreg missing `]`"))?;
    let name = rest[..open].trim();
    if name.is_empty() {
        return Err(syntax(st, "qreg missing register name"));
    }
    let size: usize = rest[open + 1..close]
        .trim()
        .parse()
        .map_err(|_| syntax(st, "qreg size is not a number"))?;
    Ok((name.to_string(), size))
}

fn split_gate_call<'a>(body: &'a str, st: &Statement) -> Result<(&'a str, Vec<&'a str>), ParseError> {
    // Find the argument list: everything after the gate head (and optional
    // parameter parens) is a comma-separated list of qubit refs.
    let mut depth = 0usize;
    let mut head_end = None;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => {
                head_end = Some(i);
                break;
            }
            _ => {}
        }
    }
    let head_end = head_end.ok_or_else(|| syntax(st, "malformed gate statement"))?;
    let head = body[..head_end].trim();
    let args: Vec<&str> = body[head_end..]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if args.is_empty() {
        return Err(syntax(st, "gate call without qubit arguments"));
    }
    Ok((head, args))
}

fn parse_qubit_ref(arg: &str, reg: &str, size: usize, st: &Statement) -> Result<usize, ParseError> {
    let open = arg.find('[').ok_or_else(|| syntax(st, "qubit ref missing `[`"))?;
    let close = arg.find(']').ok_or_else(|| syntax(st, "qubit ref missing `]`"))?;
    let name = arg[..open].trim();
    if name != reg {
        return Err(syntax(st, &format!("unknown register `{}`", name)));
    }
    let idx: usize = arg[open + 1..close]
        .trim()
        .parse()
        .map_err(|_| syntax(st, "qubit index is not a number"))?;
    if idx >= size {
        return Err(syntax(
            st,
            &format!("qubit index {} out of range (size {})", idx, size),
        ));
    }
    Ok(idx)
}

/// Angles: float literals plus the usual `pi` expressions (`pi/2`, `3*pi/4`,
/// `-pi`, `0.5*pi`).
fn parse_angle(expr: &str, st: &Statement) -> Result<f64, ParseError> {
    let expr = expr.trim();
    if let Ok(v) = expr.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match expr.find('/') {
        Some(i) => (&expr[..i], Some(&expr[i + 1..])),
        None => (expr, None),
    };
    let num = num.trim();
    let (sign, num) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, num),
    };
    let mut value = match num.find('*') {
        Some(i) => {
            let factor: f64 = num[..i]
                .trim()
                .parse()
                .map_err(|_| syntax(st, "bad angle expression"))?;
            if num[i + 1..].trim() != "pi" {
                return Err(syntax(st, "bad angle expression"));
            }
            factor * std::f64::consts::PI
        }
        None => {
            if num == "pi" {
                std::f64::consts::PI
            } else {
                return Err(syntax(st, "bad angle expression"));
            }
        }
    };
    if let Some(d) = den {
        let d: f64 = d
            .trim()
            .parse()
            .map_err(|_| syntax(st, "bad angle denominator"))?;
        value /= d;
    }
    Ok(sign * value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn parses_basic_gates() {
        let c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.n_qubits, 2);
        assert_eq!(c.gates, vec![Gate::h(0), Gate::cnot(0, 1)]);
    }

    #[test]
    fn parses_rz_angle() {
        let c = parse_qasm("qreg q[1]; rz(0.785398) q[0];").unwrap();
        assert_eq!(c.n_qubits, 1);
        assert_eq!(c.gates.len(), 1);
        assert_eq!(c.gates[0].kind, GateKind::Rz);
        assert_eq!(c.gates[0].operands, vec![0]);
        assert!((c.gates[0].angle.unwrap() - 0.785398).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsupported_gate() {
        let err = parse_qasm("qreg q[2]; ccx q[0],q[1],q[0];").unwrap_err();
        assert_eq!(err, ParseError::UnsupportedGate("ccx".into()));
    }

    #[test]
    fn rejects_multiple_registers() {
        let err = parse_qasm("qreg q[2]; qreg r[2];").unwrap_err();
        assert_eq!(err, ParseError::MultiRegister);
    }

    #[test]
    fn lowers_clifford_rz() {
        let c = parse_qasm(
            "qreg q[1]; rz(0) q[0]; rz(pi/2) q[0]; rz(pi) q[0]; rz(-pi/2) q[0]; rz(3*pi/2) q[0];",
        )
        .unwrap();
        let kinds: Vec<GateKind> = c.gates.iter().map(|g| g.kind).collect();
        // rz(0) disappears, rz(3*pi/2) == rz(-pi/2) == Sdg
        assert_eq!(
            kinds,
            vec![GateKind::S, GateKind::Z, GateKind::Sdg, GateKind::Sdg]
        );
        assert_eq!(c.count_t_states(), 0);
    }

    #[test]
    fn tolerates_headers_measure_and_barrier() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// a comment\nqreg q[2];\ncreg c[2];\nh q[0];\nbarrier q[0],q[1];\nmeasure q[0] -> c[0];\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.gates, vec![Gate::h(0)]);
    }

    #[test]
    fn reports_line_and_col() {
        let err = parse_qasm("qreg q[2];\nh q[5];").unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 1);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_cnot_operands() {
        assert!(matches!(
            parse_qasm("qreg q[2]; cx q[1],q[1];"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn roundtrip_through_qasm_text() {
        let mut c = Circuit::new("rt", 3);
        c.push(Gate::h(0));
        c.push(Gate::rz(1, 0.1));
        c.push(Gate::cnot(0, 2));
        c.push(Gate::sx(2));
        c.push(Gate::tdg(1));
        let back = parse_qasm_named(&c.to_qasm(), "rt").unwrap();
        assert_eq!(back, c);
    }
}
