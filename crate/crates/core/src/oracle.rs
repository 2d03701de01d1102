//! Dense reference semantics used by the tests and by the synthesis
//! soundness gate.

use num_complex::Complex64;

use crate::circuit::{Circuit, Operator};
use crate::linalg::Matrix;
use crate::pauli::PauliString;
use crate::weights::{pow2, ExactW, Scalar};

pub const MAX_QUBITS: usize = 10;

/// `U_C = U_{D^{d-1}} ⋯ U_{D^0}` over any scalar that can hold every gate
/// entry. `None` when some entry does not convert (a float gate for `ExactW`).
pub fn unitary_in<T: Scalar>(c: &Circuit) -> Option<Matrix<T>> {
    let n = c.num_qubits();
    assert!(n <= MAX_QUBITS, "dense oracle is limited to {MAX_QUBITS} qubits");
    let mut u = Matrix::<T>::identity(1 << n);
    for g in c.gates() {
        let m = g.kind.matrix();
        let mut conv = Matrix::<T>::zeros(m.dim());
        for (r, col, w) in m.entries() {
            conv.set(r, col, T::from_weight(w)?);
        }
        u.apply_left(&conv, &g.qubits, n);
    }
    Some(u)
}

pub fn circuit_unitary(c: &Circuit) -> Matrix<Complex64> {
    unitary_in(c).expect("complex entries always convert")
}

pub fn circuit_unitary_exact(c: &Circuit) -> Option<Matrix<ExactW>> {
    unitary_in(c)
}

pub fn operator_unitary(op: &Operator) -> Matrix<Complex64> {
    match op {
        Operator::Circuit(c) => circuit_unitary(c),
        Operator::Unitary(u) => u.to_complex(),
    }
}

/// `(1/2^n)·tr(P_out · U P_in U†)` in the scalar type of `u`.
pub fn pauli_coefficient_in<T: Scalar>(u: &Matrix<T>, p_in: &PauliString, p_out: &PauliString) -> T {
    let n = p_in.len();
    let conv = |p: &PauliString| p.matrix().map(|w| T::from_weight(w).expect("Pauli entries are exact"));
    let prod = conv(p_out).matmul(u).matmul(&conv(p_in)).matmul(&u.adjoint());
    prod.trace().mul(&T::from_weight(&pow2(-(n as i32))).expect("powers of two are exact"))
}

pub fn pauli_coefficient(u: &Matrix<Complex64>, p_in: &PauliString, p_out: &PauliString) -> f64 {
    let c = pauli_coefficient_in(u, p_in, p_out);
    debug_assert!(c.im.abs() < 1e-9, "Pauli coefficient with imaginary part {}", c.im);
    c.re
}

/// `|tr(U†V)|² / 4^n`, clamped to `[0, 1 + 1e-12]`.
pub fn jamiolkowski_fidelity(u: &Matrix<Complex64>, v: &Matrix<Complex64>) -> f64 {
    assert_eq!(u.dim(), v.dim());
    let tr: Complex64 = (0..u.dim())
        .flat_map(|i| (0..u.dim()).map(move |j| (i, j)))
        .map(|(i, j)| u.get(i, j).conj() * v.get(i, j))
        .sum();
    let d = u.dim() as f64;
    (tr.norm_sqr() / (d * d)).clamp(0.0, 1.0 + 1e-12)
}

/// `U = λV` entrywise within `tol` for some unit `λ`, with `λ` read off the
/// largest-magnitude entry of `V`.
pub fn equal_up_to_phase(u: &Matrix<Complex64>, v: &Matrix<Complex64>, tol: f64) -> bool {
    if u.dim() != v.dim() {
        return false;
    }
    let (r, c, pivot) = v
        .entries()
        .max_by(|a, b| a.2.norm().total_cmp(&b.2.norm()))
        .map(|(r, c, z)| (r, c, *z))
        .expect("non-empty matrix");
    if pivot.norm() < tol {
        return u.entries().all(|(_, _, z)| z.norm() <= tol);
    }
    let lambda = u.get(r, c) / pivot;
    if (lambda.norm() - 1.0).abs() > tol {
        return false;
    }
    u.entries().all(|(i, j, z)| (z - lambda * v.get(i, j)).norm() <= tol)
}

/// `⟨ψ|P|ψ⟩ / 2^n`: the coefficient of `P` in the Pauli expansion of `|ψ⟩⟨ψ|`.
pub fn state_pauli_coefficient<T: Scalar>(psi: &[T], p: &PauliString) -> T {
    let n = p.len();
    let pm = p.matrix().map(|w| T::from_weight(w).expect("Pauli entries are exact"));
    let ppsi = pm.mul_vec(psi);
    let inner = psi.iter().zip(&ppsi).fold(T::zero(), |acc, (a, b)| acc.add(&a.conj().mul(b)));
    inner.mul(&T::from_weight(&pow2(-(n as i32))).expect("powers of two are exact"))
}
