//! Dense statevector simulation.
//!
//! Basis index bit `k` is the state of qubit `k`. Exponentials of Pauli
//! generators are applied analytically: for an anti-Hermitian string `τ`
//! (so `τ² = -1`), `exp(θτ) = cos θ + sin θ · τ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliString, PauliSum};

/// Largest register the simulator will allocate.
pub const MAX_SIM_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_sim_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SIM_QUBITS {
        return Err(Error::invalid(format!(
            "statevector width must be in 1..={MAX_SIM_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// `|0...0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::from_index(n_qubits, 0)
    }

    pub fn from_index(n_qubits: usize, index: usize) -> Result<Self> {
        check_sim_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Computational basis state from a bit string written with qubit 0 on
    /// the right, so `"10"` on two qubits is basis index 2.
    pub fn basis_state(n_qubits: usize, occupation: &str) -> Result<Self> {
        let bits = occupation.trim();
        if bits.chars().count() != n_qubits {
            return Err(Error::Dimension {
                expected: n_qubits,
                found: bits.chars().count(),
            });
        }
        let mut index = 0usize;
        for (pos, ch) in bits.chars().enumerate() {
            let q = n_qubits - 1 - pos;
            match ch {
                '0' => {}
                '1' => index |= 1 << q,
                _ => {
                    return Err(Error::parse(
                        1,
                        pos + 1,
                        format!("occupation must be 0/1, found '{ch}'"),
                    ))
                }
            }
        }
        Self::from_index(n_qubits, index)
    }

    /// Basis state with the listed qubits set to 1.
    pub fn from_occupied(n_qubits: usize, occupied: &[usize]) -> Result<Self> {
        let mut index = 0usize;
        for &q in occupied {
            if q >= n_qubits {
                return Err(Error::invalid(format!("qubit {q} out of range")));
            }
            index |= 1 << q;
        }
        Self::from_index(n_qubits, index)
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_sim_width(n_qubits)?;
        if amps.len() != 1usize << n_qubits {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                1usize << n_qubits,
                amps.len()
            )));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Normalised real state with independent standard-normal components.
    pub fn random_real<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_sim_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn random_real_seeded(n_qubits: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_real(n_qubits, &mut rng)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check(other.n_qubits)?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// Norm of the imaginary parts of the amplitudes.
    pub fn imag_norm(&self) -> f64 {
        self.amps.iter().map(|a| a.im * a.im).sum::<f64>().sqrt()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.imag_norm() <= tol
    }

    /// The real parts of the amplitudes.
    pub fn real_parts(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.re).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: n,
            });
        }
        Ok(())
    }

    /// `p|ψ⟩` as a new state.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        self.check(p.n_qubits())?;
        let action = PauliAction::new(p, 1.0);
        let mut out = vec![ZERO; self.amps.len()];
        action.apply_add(&self.amps, &mut out);
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// In place `ψ ← exp(θτ) ψ` for anti-Hermitian `τ`.
    pub fn apply_exp(&mut self, theta: f64, tau: &PauliString) -> Result<()> {
        self.check(tau.n_qubits())?;
        if !tau.is_anti_hermitian() {
            return Err(Error::NotAntiHermitian(tau.to_string()));
        }
        exp_in_place(&mut self.amps, theta, &PauliAction::new(tau, 1.0));
        Ok(())
    }

    pub fn exp_applied(&self, theta: f64, tau: &PauliString) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_exp(theta, tau)?;
        Ok(out)
    }
}

#[inline]
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A Pauli string with a complex weight, reduced to the action on basis states:
/// `w·P|b⟩ = factor · (-1)^{|z ∧ b|} |b ⊕ x⟩`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliAction {
    pub x: usize,
    pub z: usize,
    pub factor: Complex64,
}

impl PauliAction {
    pub fn new(p: &PauliString, weight: f64) -> Self {
        let phase = (p.phase_power() as usize + p.y_count()) % 4;
        PauliAction {
            x: p.x_mask() as usize,
            z: p.z_mask() as usize,
            factor: i_pow(phase as u8) * weight,
        }
    }

    #[inline]
    pub fn coeff(&self, b: usize) -> Complex64 {
        if (self.z & b).count_ones() % 2 == 1 {
            -self.factor
        } else {
            self.factor
        }
    }

    /// `out += w·P · input`.
    pub fn apply_add(&self, input: &[Complex64], out: &mut [Complex64]) {
        for (b, a) in input.iter().enumerate() {
            out[b ^ self.x] += self.coeff(b) * a;
        }
    }

    /// `⟨left| w·P |right⟩`.
    pub fn matrix_element(&self, left: &[Complex64], right: &[Complex64]) -> Complex64 {
        right
            .iter()
            .enumerate()
            .map(|(b, a)| left[b ^ self.x].conj() * self.coeff(b) * a)
            .sum()
    }
}

pub(crate) fn exp_in_place(amps: &mut [Complex64], theta: f64, tau: &PauliAction) {
    let (s, c) = theta.sin_cos();
    if tau.x == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= c + s * tau.coeff(b);
        }
        return;
    }
    let low = tau.x & tau.x.wrapping_neg();
    for b in 0..amps.len() {
        if b & low != 0 {
            continue;
        }
        let bp = b ^ tau.x;
        let (ab, abp) = (amps[b], amps[bp]);
        amps[bp] = c * abp + s * tau.coeff(b) * ab;
        amps[b] = c * ab + s * tau.coeff(bp) * abp;
    }
}

/// A Pauli sum compiled for repeated application to states.
#[derive(Clone, Debug)]
pub struct CompiledOperator {
    n_qubits: usize,
    actions: Vec<PauliAction>,
}

impl CompiledOperator {
    pub fn new(op: &PauliSum) -> Self {
        CompiledOperator {
            n_qubits: op.n_qubits(),
            actions: op.iter().map(|(c, p)| PauliAction::new(p, c)).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_terms(&self) -> usize {
        self.actions.len()
    }

    /// `H·input` into a fresh buffer.
    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; input.len()];
        self.apply_into(input, &mut out);
        out
    }

    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|a| *a = ZERO);
        let work = self.actions.len() * input.len();
        if work < 1 << 18 || self.actions.len() < 8 {
            for a in &self.actions {
                a.apply_add(input, out);
            }
            return;
        }
        // parallel over output blocks: each output index gathers from b = i ^ x
        let chunk = (input.len() / rayon::current_num_threads().max(1)).max(256);
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(ci, block)| {
                let base = ci * chunk;
                for a in &self.actions {
                    for (k, o) in block.iter_mut().enumerate() {
                        let b = (base + k) ^ a.x;
                        *o += a.coeff(b) * input[b];
                    }
                }
            });
    }

    /// `⟨ψ|H|ψ⟩` as a complex number (real for Hermitian H up to rounding).
    pub fn expectation_complex(&self, amps: &[Complex64]) -> Complex64 {
        if self.actions.len() * amps.len() >= 1 << 18 {
            // collect then sum in order so the result does not depend on scheduling
            let parts: Vec<Complex64> = self
                .actions
                .par_iter()
                .map(|a| a.matrix_element(amps, amps))
                .collect();
            parts.into_iter().sum()
        } else {
            self.actions
                .iter()
                .map(|a| a.matrix_element(amps, amps))
                .sum()
        }
    }
}

/// `⟨ψ|H|ψ⟩` for Hermitian `H`.
pub fn expectation(h: &PauliSum, psi: &StateVector) -> Result<f64> {
    if h.n_qubits() != psi.n_qubits() {
        return Err(Error::Dimension {
            expected: h.n_qubits(),
            found: psi.n_qubits(),
        });
    }
    if !h.is_hermitian() {
        return Err(Error::NotHermitian(
            "expectation requires a Hermitian Pauli sum".into(),
        ));
    }
    let e = CompiledOperator::new(h).expectation_complex(psi.amplitudes());
    let scale = 1.0 + h.one_norm();
    if e.im.abs() > 1e-10 * scale {
        return Err(Error::NotHermitian(format!(
            "expectation has imaginary part {:.3e}",
            e.im
        )));
    }
    Ok(e.re)
}

#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub energy: f64,
    pub state: StateVector,
    /// `‖Hψ − Eψ‖`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct GroundStateOptions {
    /// Restrict to basis states with this many set bits (fixed particle number).
    pub particle_number: Option<usize>,
    /// Dense diagonalisation is used up to this subspace dimension.
    pub dense_limit: usize,
    /// Krylov dimension before a restart.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions {
            particle_number: None,
            dense_limit: 1024,
            krylov_dim: 160,
            max_restarts: 30,
            seed: 7,
        }
    }
}

/// Lowest eigenpair of a Hermitian Pauli sum over the full register.
pub fn exact_ground_state(h: &PauliSum) -> Result<GroundStateResult> {
    exact_ground_state_with(h, &GroundStateOptions::default())
}

/// Lowest eigenpair within the sector `popcount(b) = n_particles`.
pub fn exact_ground_state_in_sector(h: &PauliSum, n_particles: usize) -> Result<GroundStateResult> {
    exact_ground_state_with(
        h,
        &GroundStateOptions {
            particle_number: Some(n_particles),
            ..GroundStateOptions::default()
        },
    )
}

struct Subspace {
    basis: Vec<usize>,
    position: Vec<usize>,
}

impl Subspace {
    fn new(n: usize, particles: Option<usize>) -> Self {
        let dim = 1usize << n;
        let basis: Vec<usize> = (0..dim)
            .filter(|b| particles.is_none_or(|k| b.count_ones() as usize == k))
            .collect();
        let mut position = vec![usize::MAX; dim];
        for (i, &b) in basis.iter().enumerate() {
            position[b] = i;
        }
        Subspace { basis, position }
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    /// `H v` restricted to the subspace; errors if H leaks out of it.
    fn apply(&self, op: &CompiledOperator, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        if self.basis.len() == self.position.len() {
            op.apply_into(v, out);
            return Ok(());
        }
        let mut full = vec![ZERO; self.position.len()];
        for a in &op.actions {
            for (i, &b) in self.basis.iter().enumerate() {
                full[b ^ a.x] += a.coeff(b) * v[i];
            }
        }
        let mut leak = 0.0;
        for (b, val) in full.iter().enumerate() {
            match self.position[b] {
                usize::MAX => leak += val.norm_sqr(),
                j => out[j] = *val,
            }
        }
        if leak > 1e-20 {
            return Err(Error::invalid(
                "Hamiltonian does not conserve the requested particle number",
            ));
        }
        Ok(())
    }

    fn embed(&self, n: usize, v: &[Complex64]) -> Vec<Complex64> {
        let mut full = vec![ZERO; 1usize << n];
        for (i, &b) in self.basis.iter().enumerate() {
            full[b] = v[i];
        }
        full
    }
}

pub fn exact_ground_state_with(
    h: &PauliSum,
    opts: &GroundStateOptions,
) -> Result<GroundStateResult> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian(
            "ground state requires a Hermitian sum".into(),
        ));
    }
    let n = h.n_qubits();
    if n > 14 {
        return Err(Error::invalid(format!(
            "exact diagonalisation supports at most 14 qubits, got {n}"
        )));
    }
    if let Some(k) = opts.particle_number {
        if k > n {
            return Err(Error::invalid(format!(
                "{k} particles do not fit in {n} modes"
            )));
        }
    }
    let op = CompiledOperator::new(h);
    let sub = Subspace::new(n, opts.particle_number);
    let (energy, vec) = if sub.len() <= opts.dense_limit {
        dense_lowest(&op, &sub)?
    } else {
        lanczos_lowest(&op, &sub, opts)?
    };
    let full = sub.embed(n, &vec);
    let hv = op.apply(&full);
    let residual = hv
        .iter()
        .zip(&full)
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(GroundStateResult {
        energy,
        state: StateVector {
            n_qubits: n,
            amps: full,
        },
        residual,
    })
}

fn dense_lowest(op: &CompiledOperator, sub: &Subspace) -> Result<(f64, Vec<Complex64>)> {
    let d = sub.len();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    let mut col = vec![ZERO; d];
    let mut unit = vec![ZERO; d];
    for j in 0..d {
        unit[j] = Complex64::new(1.0, 0.0);
        sub.apply(op, &unit, &mut col)?;
        unit[j] = ZERO;
        for i in 0..d {
            m[(i, j)] = col[i];
        }
    }
    let is_real = m.iter().all(|z| z.im.abs() < 1e-14);
    if is_real {
        let re = m.map(|z| z.re);
        let eig = SymmetricEigen::new(re);
        let k = argmin(eig.eigenvalues.as_slice());
        let v = eig.eigenvectors.column(k).map(|x| Complex64::new(x, 0.0));
        Ok((eig.eigenvalues[k], v.as_slice().to_vec()))
    } else {
        let eig = SymmetricEigen::new(m);
        let k = argmin(eig.eigenvalues.as_slice());
        Ok((
            eig.eigenvalues[k],
            eig.eigenvectors.column(k).as_slice().to_vec(),
        ))
    }
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

fn normalize_vec(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|a| *a /= n);
    }
    n
}

/// Restarted Lanczos with full reorthogonalisation.
fn lanczos_lowest(
    op: &CompiledOperator,
    sub: &Subspace,
    opts: &GroundStateOptions,
) -> Result<(f64, Vec<Complex64>)> {
    let d = sub.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    normalize_vec(&mut start);
    let kmax = opts.krylov_dim.min(d).max(2);
    let mut w = vec![ZERO; d];
    let mut last_residual = f64::INFINITY;
    let mut total_steps = 0;

    for _restart in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut ritz: Option<(f64, DVector<f64>)> = None;

        for k in 0..kmax {
            total_steps += 1;
            sub.apply(op, &basis[k], &mut w)?;
            let a = inner(&basis[k], &w).re;
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let proj = inner(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let b = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();

            let t = tridiagonal(&alpha, &beta);
            let eig = SymmetricEigen::new(t);
            let i = argmin(eig.eigenvalues.as_slice());
            let theta = eig.eigenvalues[i];
            let s = eig.eigenvectors.column(i).into_owned();
            let est = (b * s[k]).abs();
            let scale = theta.abs().max(1.0);
            ritz = Some((theta, s));
            if est <= 1e-10 * scale || b <= 1e-14 * scale || k + 1 == kmax {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }

        let (theta, s) = ritz.expect("at least one Lanczos step");
        let mut x = vec![ZERO; d];
        for (coef, v) in s.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += b * *coef);
        }
        normalize_vec(&mut x);
        sub.apply(op, &x, &mut w)?;
        let rayleigh = inner(&x, &w).re;
        let res = w
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b * rayleigh).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last_residual = res;
        if res <= 1e-9 * theta.abs().max(1.0) {
            return Ok((rayleigh, x));
        }
        start = x;
    }
    Err(Error::NoConvergence {
        iterations: total_steps,
        residual: last_residual,
    })
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_pauli, dense_sum};
    use nalgebra::DVector;

    fn ps(t: &str, n: usize) -> PauliString {
        PauliString::parse(t, n).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn basis_state_examples() {
        let s = StateVector::basis_state(3, "000").unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
        let s = StateVector::basis_state(2, "10").unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0));
        let s = StateVector::from_occupied(8, &[0, 1, 2, 3]).unwrap();
        assert_eq!(s.amplitudes()[0b1111], c(1.0));
        assert!(StateVector::basis_state(3, "01").is_err());
        assert!(StateVector::basis_state(2, "0a").is_err());
    }

    #[test]
    fn pauli_action_examples() {
        let s = StateVector::zero(2)
            .unwrap()
            .apply_pauli(&ps("X0", 2))
            .unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0));
        let s = StateVector::zero(1)
            .unwrap()
            .apply_pauli(&ps("i Y0", 1))
            .unwrap();
        assert!((s.amplitudes()[1] - c(-1.0)).norm() < 1e-15);
        assert!(StateVector::zero(1)
            .unwrap()
            .apply_pauli(&ps("X0", 2))
            .is_err());
    }

    #[test]
    fn pauli_action_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let amps: Vec<Complex64> = (0..8)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let psi = StateVector::from_amplitudes(3, amps.clone()).unwrap();
        for p in crate::pauli::all_strings(3) {
            for phase in 0..4 {
                let p = p.with_phase(phase);
                let got = psi.apply_pauli(&p).unwrap();
                let want = dense_pauli(&p) * DVector::from_vec(amps.clone());
                for (a, b) in got.amplitudes().iter().zip(want.iter()) {
                    assert!((a - b).norm() < 1e-14, "{p}");
                }
            }
        }
    }

    #[test]
    fn exp_examples() {
        let zero = StateVector::zero(1).unwrap();
        let tau = ps("i Y0", 1);
        assert_eq!(zero.exp_applied(0.0, &tau).unwrap(), zero);
        let th = 0.3f64;
        let s = zero.exp_applied(th, &tau).unwrap();
        assert!((s.amplitudes()[0] - c(th.cos())).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(-th.sin())).norm() < 1e-15);
        let s = zero.exp_applied(std::f64::consts::FRAC_PI_2, &tau).unwrap();
        assert!((s.amplitudes()[1] - c(-1.0)).norm() < 1e-15);
        assert!(zero.exp_applied(0.1, &ps("Y0", 1)).is_err());
    }

    #[test]
    fn exp_inverse_and_diagonal_generator() {
        let psi = StateVector::random_real_seeded(3, 11).unwrap();
        for t in ["i Z1", "-i Y0 X2", "i Y1 Z0", "i X0 Y1 Z2"] {
            let tau = ps(t, 3);
            let back = psi
                .exp_applied(0.7, &tau)
                .unwrap()
                .exp_applied(-0.7, &tau)
                .unwrap();
            for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(expectation(&ps("Z0", 1).into(), &zero).unwrap(), 1.0);
        assert_eq!(expectation(&ps("X0", 1).into(), &zero).unwrap(), 0.0);
        assert!(expectation(&ps("i Y0", 1).into(), &zero).is_err());
    }

    #[test]
    fn expectation_matches_dense_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut h = PauliSum::new(3);
        for p in crate::pauli::all_strings(3) {
            h.add_term(rng.random::<f64>() * 2.0 - 1.0, p).unwrap();
        }
        let amps: Vec<Complex64> = (0..8)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut psi = StateVector::from_amplitudes(3, amps).unwrap();
        psi.normalize();
        let v = DVector::from_vec(psi.amplitudes().to_vec());
        let want = (v.adjoint() * dense_sum(&h) * &v)[(0, 0)];
        let got = expectation(&h, &psi).unwrap();
        assert!((got - want.re).abs() < 1e-10);
        // global phase invariance
        let phased = StateVector::from_amplitudes(
            3,
            psi.amplitudes()
                .iter()
                .map(|a| a * Complex64::from_polar(1.0, 0.9))
                .collect(),
        )
        .unwrap();
        assert!((expectation(&h, &phased).unwrap() - got).abs() < 1e-12);
    }

    #[test]
    fn ground_state_single_qubit() {
        let r = exact_ground_state(&ps("- Z0", 1).into()).unwrap();
        assert!((r.energy + 1.0).abs() < 1e-12);
        assert!((r.state.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        let r = exact_ground_state(&ps("X0", 1).into()).unwrap();
        assert!((r.energy + 1.0).abs() < 1e-12);
        let a = r.state.amplitudes();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (|0⟩ − |1⟩)/√2 up to global phase
        let ratio = a[1] / a[0];
        assert!((ratio - c(-1.0)).norm() < 1e-10);
        assert!((a[0].norm() - s).abs() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut h = PauliSum::new(6);
        for p in crate::pauli::even_strings(6).take(400) {
            if rng.random::<f64>() < 0.3 {
                h.add_term(rng.random::<f64>() * 4.0 - 2.0, p).unwrap();
            }
        }
        let dense = exact_ground_state(&h).unwrap();
        let iter = exact_ground_state_with(
            &h,
            &GroundStateOptions {
                dense_limit: 0,
                krylov_dim: 40,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((dense.energy - iter.energy).abs() < 1e-9 * dense.energy.abs().max(1.0));
        assert!(iter.residual < 1e-8 * h.one_norm());
    }

    #[test]
    fn sector_restriction_rejects_non_conserving_operator() {
        assert!(exact_ground_state_in_sector(&ps("X0", 2).into(), 1).is_err());
        // Z0 + Z1 conserves particle number; one-particle sector energy is 0
        let h = PauliSum::from_terms(2, [(1.0, ps("Z0", 2)), (1.0, ps("Z1", 2))]).unwrap();
        let r = exact_ground_state_in_sector(&h, 1).unwrap();
        assert!(r.energy.abs() < 1e-12);
    }
}
