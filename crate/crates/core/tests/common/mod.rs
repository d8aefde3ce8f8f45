#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qadapt::{Pauli, PauliString};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn letter(p: Pauli) -> DMatrix<Complex64> {
    let m = match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    DMatrix::from_row_slice(2, 2, &m)
}

/// Kronecker product with qubit 0 as the least significant bit.
pub fn dense(p: &PauliString) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(1, 1, p.phase_factor());
    for q in (0..p.n_qubits()).rev() {
        out = out.kronecker(&letter(p.pauli_at(q)));
    }
    out
}

pub fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-12)
}

/// Checks products, adjoints, involution and commutation of every pair of
/// n-qubit strings against dense matrices. Returns the first violation.
pub fn check_group_laws(n: usize) -> Result<(), String> {
    let strings: Vec<PauliString> = qadapt::pauli::all_strings(n).collect();
    let mats: Vec<_> = strings.iter().map(dense).collect();
    let id = DMatrix::<Complex64>::identity(1 << n, 1 << n);
    let two = Complex64::new(2.0, 0.0);
    for (a, ma) in strings.iter().zip(&mats) {
        if !close(&(ma * ma), &id) {
            return Err(format!("{a} squared is not the identity"));
        }
        if !close(&dense(&a.adjoint()), &ma.adjoint()) {
            return Err(format!("adjoint of {a}"));
        }
        for (b, mb) in strings.iter().zip(&mats) {
            let (ab, ba) = (ma * mb, mb * ma);
            if !close(&dense(&a.multiply(b).unwrap()), &ab) {
                return Err(format!("product {a} * {b}"));
            }
            let commute = close(&ab, &ba);
            if a.commutes_with(b) != commute {
                return Err(format!("commutation of {a}, {b}"));
            }
            let ok = match a.commutator(b).unwrap() {
                None => commute,
                Some(c) => close(&(dense(&c) * two), &(ab - ba)),
            };
            if !ok {
                return Err(format!("commutator [{a}, {b}]"));
            }
        }
    }
    Ok(())
}
