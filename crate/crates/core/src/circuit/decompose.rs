use super::{Circuit, GateKind, GateOp};

/// Rewrites a circuit over the elementary set {H, X, Y, Z, S, Sdg, T, Tdg, CX}.
///
/// * CZ becomes `H·CX·H` on the target.
/// * CCX uses the standard 6-CX / 9-single-qubit Clifford+T network.
/// * CCZ is the same network without the two target Hadamards (13 gates).
/// * MCX with k >= 3 controls splits the controls in two halves and recurses,
///   borrowing any idle qubit as a dirty ancilla (four half-size gates). A gate
///   that touches every qubit of the register has no idle qubit to borrow; in
///   that case one clean ancilla is appended to the register and the gate is
///   computed into it and uncomputed (three half-size gates).
///
/// The output always measures the same qubits as the input, so appended
/// ancillas never show up in outcomes.
pub fn decompose(circuit: &Circuit) -> Circuit {
    let original = circuit.num_qubits;
    let needs_ancilla = circuit
        .ops
        .iter()
        .any(|op| op.kind == GateKind::MCX && op.arity() == original);
    let num_qubits = original + usize::from(needs_ancilla);
    let clean_ancilla = needs_ancilla.then_some(original);

    let mut out = Vec::with_capacity(circuit.ops.len());
    for op in &circuit.ops {
        match op.kind {
            GateKind::CZ => {
                out.push(GateOp::h(op.target));
                out.push(GateOp::cx(op.controls[0], op.target));
                out.push(GateOp::h(op.target));
            }
            GateKind::CCX => emit_ccx(op.controls[0], op.controls[1], op.target, &mut out),
            GateKind::CCZ => emit_ccz(op.controls[0], op.controls[1], op.target, &mut out),
            GateKind::MCX => {
                let idle = (0..original).find(|&q| !op.touches(q));
                match (idle, clean_ancilla) {
                    (None, Some(anc)) => {
                        emit_mcx_clean(&op.controls, op.target, anc, num_qubits, &mut out)
                    }
                    _ => emit_mcx(&op.controls, op.target, num_qubits, &mut out),
                }
            }
            _ => out.push(op.clone()),
        }
    }

    Circuit {
        num_qubits,
        ops: out,
        measured: circuit.measured.clone(),
    }
}

fn emit_ccx(c0: usize, c1: usize, t: usize, out: &mut Vec<GateOp>) {
    out.push(GateOp::h(t));
    emit_ccz(c0, c1, t, out);
    out.push(GateOp::h(t));
}

fn emit_ccz(c0: usize, c1: usize, t: usize, out: &mut Vec<GateOp>) {
    out.extend([
        GateOp::cx(c1, t),
        GateOp::tdg(t),
        GateOp::cx(c0, t),
        GateOp::t(t),
        GateOp::cx(c1, t),
        GateOp::tdg(t),
        GateOp::cx(c0, t),
        GateOp::t(c1),
        GateOp::t(t),
        GateOp::cx(c0, c1),
        GateOp::t(c0),
        GateOp::tdg(c1),
        GateOp::cx(c0, c1),
    ]);
}

/// Multi-controlled X using an idle qubit of the register as a dirty ancilla.
///
/// With `a = AND(low)` and `b = AND(high)` and borrowed qubit `d`:
/// `t ^= b·(d ^ a) ^ b·d = a·b`, and `d` is restored.
fn emit_mcx(controls: &[usize], target: usize, num_qubits: usize, out: &mut Vec<GateOp>) {
    match controls.len() {
        0 => out.push(GateOp::x(target)),
        1 => out.push(GateOp::cx(controls[0], target)),
        2 => emit_ccx(controls[0], controls[1], target, out),
        k => {
            let borrowed = (0..num_qubits)
                .find(|q| *q != target && !controls.contains(q))
                .expect("recursive MCX always has an idle qubit");
            let (low, high) = controls.split_at(k.div_ceil(2));
            let mut high_and_borrowed = high.to_vec();
            high_and_borrowed.push(borrowed);
            for _ in 0..2 {
                emit_mcx(low, borrowed, num_qubits, out);
                emit_mcx(&high_and_borrowed, target, num_qubits, out);
            }
        }
    }
}

/// Compute-uncompute through an ancilla known to start (and end) in |0>.
fn emit_mcx_clean(
    controls: &[usize],
    target: usize,
    ancilla: usize,
    num_qubits: usize,
    out: &mut Vec<GateOp>,
) {
    let (low, high) = controls.split_at(controls.len().div_ceil(2));
    let mut high_and_ancilla = high.to_vec();
    high_and_ancilla.push(ancilla);
    emit_mcx(low, ancilla, num_qubits, out);
    emit_mcx(&high_and_ancilla, target, num_qubits, out);
    emit_mcx(low, ancilla, num_qubits, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(num_qubits: usize, op: GateOp) -> Circuit {
        Circuit::new(num_qubits)
            .unwrap()
            .append(op)
            .unwrap()
            .measure_all()
    }

    #[test]
    fn elementary_circuit_is_unchanged() {
        let c = Circuit::from_parts(
            2,
            vec![GateOp::h(0), GateOp::x(1), GateOp::cx(0, 1)],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(decompose(&c), c);
    }

    #[test]
    fn ccx_is_fifteen_gates() {
        let d = decompose(&single(3, GateOp::ccx(0, 1, 2)));
        assert_eq!(d.gate_count().unwrap().total(), 15);
        let cx = d.ops().iter().filter(|op| op.kind == GateKind::CX).count();
        assert_eq!(cx, 6);
    }

    #[test]
    fn ccz_is_thirteen_gates() {
        let d = decompose(&single(3, GateOp::ccz(0, 1, 2)));
        assert_eq!(d.gate_count().unwrap().total(), 13);
    }

    #[test]
    fn mcx_on_full_register_appends_one_ancilla() {
        let c = single(4, GateOp::mcx(vec![0, 1, 2], 3));
        let d = decompose(&c);
        assert_eq!(d.num_qubits(), 5);
        assert_eq!(d.measured(), c.measured());
        // three CCX through the clean ancilla
        assert_eq!(d.gate_count().unwrap().total(), 45);
    }

    #[test]
    fn mcx_with_idle_qubit_borrows_it() {
        let c = single(5, GateOp::mcx(vec![0, 1, 2], 3));
        let d = decompose(&c);
        assert_eq!(d.num_qubits(), 5);
        assert_eq!(d.gate_count().unwrap().total(), 60);
    }

    #[test]
    fn decompose_is_idempotent_on_mcx() {
        let c = single(6, GateOp::mcx(vec![0, 1, 2, 3, 4], 5));
        let once = decompose(&c);
        assert_eq!(decompose(&once), once);
    }
}
