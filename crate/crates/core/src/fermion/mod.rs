//! Fermionic operators, the Jordan-Wigner mapping, spin-adapted excitation
//! generators and molecular Hamiltonian ingestion.
//!
//! Spin orbitals are interleaved: spatial orbital `k` with spin up is mode
//! `2k`, spin down is mode `2k + 1`. Mode `j` is qubit `j`.

mod excitations;
mod fcidump;
mod text;

pub use excitations::{
    canonical_double, spin_adapted_doubles, spin_adapted_singles, ExcitationKind,
    SpinAdaptedExcitation,
};
pub use fcidump::{
    build_molecular_hamiltonian, parse_fcidump, write_fcidump, MolecularHamiltonian,
};
pub use text::{parse_pauli_hamiltonian, write_pauli_hamiltonian};

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliString, PauliSum, DEFAULT_PRUNE, MAX_QUBITS};

/// Mode index of spatial orbital `k` with spin up.
pub fn spin_up(k: usize) -> usize {
    2 * k
}

/// Mode index of spatial orbital `k` with spin down.
pub fn spin_down(k: usize) -> usize {
    2 * k + 1
}

/// A single ladder operator: `(mode, dagger)`.
pub type Ladder = (usize, bool);

/// Real linear combination of products of ladder operators. Each product is
/// read left to right, so `[(0, true), (1, false)]` is `a†₀ a₁`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOperator {
    pub terms: Vec<(f64, Vec<Ladder>)>,
}

impl FermionOperator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<(f64, Vec<Ladder>)>) -> Self {
        FermionOperator { terms }
    }

    pub fn push(&mut self, coeff: f64, ops: Vec<Ladder>) {
        self.terms.push((coeff, ops));
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> FermionOperator {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|(c, ops)| (*c, ops.iter().rev().map(|&(i, d)| (i, !d)).collect()))
                .collect(),
        }
    }

    /// `self − self†`.
    pub fn anti_hermitian_part(&self) -> FermionOperator {
        let mut out = self.clone();
        for (c, ops) in self.adjoint().terms {
            out.push(-c, ops);
        }
        out
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(_, ops)| ops.iter().map(|o| o.0))
            .max()
    }

    /// Maps onto qubits with `a_i = Z_{<i} (X_i + iY_i)/2`.
    pub fn jordan_wigner(&self, n_modes: usize) -> Result<PauliSum> {
        if n_modes == 0 || n_modes > MAX_QUBITS {
            return Err(Error::invalid(format!("unsupported mode count {n_modes}")));
        }
        if let Some(max) = self.max_mode() {
            if max >= n_modes {
                return Err(Error::invalid(format!(
                    "mode {max} out of range for {n_modes} modes"
                )));
            }
        }
        let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
        for (c, ops) in &self.terms {
            jw_word(ops, n_modes, Complex64::new(*c, 0.0), &mut acc);
        }
        Ok(collect(n_modes, acc))
    }
}

/// Pauli expansion of one ladder operator as `[(coeff, string)]`.
fn ladder_terms(mode: usize, dagger: bool, n: usize) -> [(Complex64, PauliString); 2] {
    let below = (1u64 << mode) - 1;
    let bit = 1u64 << mode;
    let x = PauliString::from_masks(n, bit, below, 0).expect("mode in range");
    let y = PauliString::from_masks(n, bit, below | bit, 0).expect("mode in range");
    let sign = if dagger { -0.5 } else { 0.5 };
    [
        (Complex64::new(0.5, 0.0), x),
        (Complex64::new(0.0, sign), y),
    ]
}

pub(crate) fn jw_word(
    ops: &[Ladder],
    n: usize,
    coeff: Complex64,
    acc: &mut HashMap<(u64, u64), Complex64>,
) {
    let mut partial: Vec<(Complex64, PauliString)> = vec![(coeff, PauliString::identity(n))];
    for &(mode, dagger) in ops {
        let factors = ladder_terms(mode, dagger, n);
        let mut next = Vec::with_capacity(partial.len() * 2);
        for (c, p) in &partial {
            for (fc, f) in &factors {
                let prod = p.mul_unchecked(f);
                next.push((c * fc * i_pow(prod.phase_power()), prod.with_phase(0)));
            }
        }
        partial = next;
    }
    for (c, p) in partial {
        *acc.entry((p.x_mask(), p.z_mask())).or_default() += c;
    }
}

pub(crate) fn collect(n: usize, acc: HashMap<(u64, u64), Complex64>) -> PauliSum {
    let mut sum = PauliSum::new(n);
    for ((x, z), c) in acc {
        let p = PauliString::from_masks(n, x, z, 0).expect("masks in range");
        sum.add_complex(c, p).expect("same width");
    }
    sum.simplify(DEFAULT_PRUNE);
    sum
}

/// `Σ_k a†_k a_k = Σ_k (I − Z_k)/2`.
pub fn number_operator(n_modes: usize) -> PauliSum {
    let mut s = PauliSum::new(n_modes);
    for k in 0..n_modes {
        s.accumulate(0.5, PauliString::identity(n_modes));
        s.accumulate(
            -0.5,
            PauliString::from_masks(n_modes, 0, 1 << k, 0).unwrap(),
        );
    }
    s.simplified()
}

/// `S_z = ½ Σ_k (n_{k↑} − n_{k↓}) = ¼ Σ_k (Z_{2k+1} − Z_{2k})`.
pub fn sz_operator(n_modes: usize) -> PauliSum {
    let mut s = PauliSum::new(n_modes);
    for j in 0..n_modes {
        let sign = if j % 2 == 0 { -0.25 } else { 0.25 };
        s.accumulate(
            sign,
            PauliString::from_masks(n_modes, 0, 1 << j, 0).unwrap(),
        );
    }
    s.simplified()
}

#[cfg(test)]
pub(crate) mod fock {
    //! Dense ladder matrices built directly on occupation-number basis states,
    //! independent of the Pauli algebra.
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    use super::{FermionOperator, Ladder};

    pub fn ladder(mode: usize, dagger: bool, n: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let occupied = b >> mode & 1 == 1;
            if occupied == dagger {
                continue;
            }
            let parity = (b & ((1 << mode) - 1)).count_ones() % 2;
            let sign = if parity == 1 { -1.0 } else { 1.0 };
            m[(b ^ (1 << mode), b)] = Complex64::new(sign, 0.0);
        }
        m
    }

    pub fn word(ops: &[Ladder], n: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        let mut m = DMatrix::identity(dim, dim);
        for &(mode, dagger) in ops {
            m *= ladder(mode, dagger, n);
        }
        m
    }

    pub fn operator(op: &FermionOperator, n: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, ops) in &op.terms {
            m += word(ops, n) * Complex64::new(*c, 0.0);
        }
        m
    }
}
