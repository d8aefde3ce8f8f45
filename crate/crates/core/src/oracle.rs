//! Dense-matrix reference implementations used only by unit tests. These build
//! operators from Kronecker products of 2x2 matrices and never touch the
//! bit-mask code paths they are used to check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{Pauli, PauliString, PauliSum};

pub(crate) type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn single(p: Pauli) -> CMat {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match p {
        Pauli::I => CMat::from_row_slice(2, 2, &[one, z, z, one]),
        Pauli::X => CMat::from_row_slice(2, 2, &[z, one, one, z]),
        Pauli::Y => CMat::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Pauli::Z => CMat::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

pub(crate) fn dense_pauli(p: &PauliString) -> CMat {
    // qubit n-1 is the leftmost Kronecker factor
    let n = p.n_qubits();
    let mut m = single(p.pauli_at(n - 1));
    for q in (0..n - 1).rev() {
        m = m.kronecker(&single(p.pauli_at(q)));
    }
    m * p.phase_factor()
}

pub(crate) fn dense_sum(s: &PauliSum) -> CMat {
    let dim = 1usize << s.n_qubits();
    let mut m = CMat::zeros(dim, dim);
    for (coef, p) in s.iter() {
        m += dense_pauli(p) * c(coef, 0.0);
    }
    m
}

pub(crate) fn mat_approx_eq(a: &CMat, b: &CMat, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() <= tol)
}
