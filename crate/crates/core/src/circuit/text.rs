//! Line-oriented circuit files.
//!
//! ```text
//! # comments and blank lines are ignored
//! QUBITS 3
//! H 0
//! CX 0 1          # controls first, target last
//! MCX 0 1 2 3     # three controls, target 3
//! MEASURE 0 1 2
//! ```
//!
//! `QUBITS` must precede every gate. `MEASURE` is optional, may appear at
//! most once, and must be the last non-blank line. Gate names are
//! case-insensitive: H X Y Z S SDG T TDG CX CZ CCX CCZ MCX.

use std::fmt;
use std::str::FromStr;

use super::{Circuit, CircuitError, GateKind, GateOp};

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.num_qubits)?;
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        if !self.measured.is_empty() {
            write!(f, "MEASURE")?;
            for q in &self.measured {
                write!(f, " {q}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut num_qubits: Option<usize> = None;
        let mut ops = Vec::new();
        let mut measured: Option<Vec<usize>> = None;

        for (idx, raw) in s.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| CircuitError::Parse { line, message };
            if measured.is_some() {
                return Err(err("nothing may follow MEASURE".into()));
            }
            let mut words = content.split_whitespace();
            let head = words.next().unwrap_or_default();
            let args = words
                .map(|w| {
                    w.parse::<usize>()
                        .map_err(|_| err(format!("invalid qubit index `{w}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;

            match head.to_ascii_uppercase().as_str() {
                "QUBITS" => {
                    if num_qubits.is_some() {
                        return Err(err("duplicate QUBITS header".into()));
                    }
                    match args.as_slice() {
                        [n] if *n > 0 => num_qubits = Some(*n),
                        _ => return Err(err("QUBITS takes one positive integer".into())),
                    }
                }
                "MEASURE" => {
                    let n = num_qubits.ok_or_else(|| err("MEASURE before QUBITS".into()))?;
                    if args.is_empty() {
                        return Err(err("MEASURE needs at least one qubit".into()));
                    }
                    Circuit::new(n)
                        .and_then(|c| c.with_measured(args.clone()))
                        .map_err(|e| err(e.to_string()))?;
                    measured = Some(args);
                }
                name => {
                    let kind = GateKind::from_name(name)
                        .ok_or_else(|| err(format!("unknown gate `{head}`")))?;
                    let n = num_qubits.ok_or_else(|| err("gate before QUBITS header".into()))?;
                    let (target, controls) = args
                        .split_last()
                        .ok_or_else(|| err(format!("{kind} needs qubit arguments")))?;
                    let op = GateOp {
                        kind,
                        controls: controls.to_vec(),
                        target: *target,
                    };
                    op.validate(n).map_err(|e| err(e.to_string()))?;
                    ops.push(op);
                }
            }
        }

        let num_qubits = num_qubits.ok_or(CircuitError::Parse {
            line: 0,
            message: "missing QUBITS header".into(),
        })?;
        Circuit::from_parts(num_qubits, ops, measured.unwrap_or_default())
    }
}
