//! The ADAPT-VQE outer loop, the inner parameter optimisation and the
//! random-ordering baseline.
//!
//! An ansatz `[e_1, …, e_k]` prepares `e^{θ_k τ_k} ⋯ e^{θ_1 τ_1} |ref⟩`: the
//! first-added element acts first. Fermionic generators are applied as a
//! first-order Trotter product of their Pauli terms, ordered by formatted term.

use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optimize::{minimize, OptimizerSettings};
use crate::pauli::{PauliString, PauliSum};
use crate::pool::{Generator, OperatorPool, PoolOperator};
use crate::state::{exp_in_place, inner, CompiledOperator, PauliAction, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzElement {
    pub operator: PoolOperator,
    pub theta: f64,
}

impl AnsatzElement {
    pub fn new(operator: PoolOperator, theta: f64) -> Self {
        AnsatzElement { operator, theta }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TrotterOrder {
    /// Pauli factors sorted by their formatted text.
    #[default]
    Lexicographic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptConfig {
    pub grad_norm_eps: f64,
    pub max_iterations: usize,
    pub optimizer: OptimizerSettings,
    pub trotter_order: TrotterOrder,
    pub seed: u64,
    pub allow_operator_repeats: bool,
    /// Consecutive iterations with energy gain below `stall_tol` before the
    /// run is declared stalled; `None` disables the check.
    pub stall_patience: Option<usize>,
    pub stall_tol: f64,
    /// Exact ground energy used for the error column.
    pub exact_energy: Option<f64>,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            grad_norm_eps: 1e-3,
            max_iterations: 100,
            optimizer: OptimizerSettings::default(),
            trotter_order: TrotterOrder::Lexicographic,
            seed: 0,
            allow_operator_repeats: true,
            stall_patience: Some(3),
            stall_tol: 1e-12,
            exact_energy: None,
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grad_norm_eps.is_nan() || self.grad_norm_eps <= 0.0 {
            return Err(Error::invalid("grad_norm_eps must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    GradientConverged,
    MaxIterations,
    Stalled,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::GradientConverged => "gradient_converged",
            Termination::MaxIterations => "max_iterations",
            Termination::Stalled => "stalled",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub n_params: usize,
    pub pool_index: Option<usize>,
    pub label: Option<String>,
    pub selected_grad: Option<f64>,
    pub thetas: Vec<f64>,
    pub energy: f64,
    pub energy_error: Option<f64>,
    /// Pool gradient norm at this row's optimised state.
    pub grad_norm: f64,
    pub cnot_count: usize,
    pub evaluations: usize,
    pub optimizer_converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptTrace {
    pub rows: Vec<TraceRow>,
    pub termination: Termination,
    pub ansatz: Vec<AnsatzElement>,
}

impl AdaptTrace {
    pub const CSV_HEADER: &'static str =
        "iteration,n_params,label,selected_grad,energy,energy_error,grad_norm,cnot_count";

    pub fn final_row(&self) -> &TraceRow {
        self.rows
            .last()
            .expect("trace always holds the reference row")
    }

    pub fn final_energy(&self) -> f64 {
        self.final_row().energy
    }

    pub fn n_params(&self) -> usize {
        self.ansatz.len()
    }

    /// Number of parameters at the first row whose error is below `target`.
    pub fn params_to_reach(&self, target: f64) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.energy_error.is_some_and(|e| e.abs() < target))
            .map(|r| r.n_params)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.16e},{},{:.16e},{}",
                r.iteration,
                r.n_params,
                r.label.as_deref().unwrap_or(""),
                opt(r.selected_grad),
                r.energy,
                opt(r.energy_error),
                r.grad_norm,
                r.cnot_count
            );
        }
        out
    }
}

fn operator_qubits(op: &PoolOperator) -> usize {
    match &op.generator {
        Generator::Pauli(p) => p.n_qubits(),
        Generator::Fermionic { image, .. } => image.n_qubits(),
    }
}

/// Exponent factors `(τ_j, c_j)` with `e^{θτ} ≈ ∏_j e^{θ c_j τ_j}`, in
/// application order.
fn trotter_factors(op: &PoolOperator, order: TrotterOrder) -> Vec<(PauliAction, f64)> {
    match &op.generator {
        Generator::Pauli(p) => vec![(PauliAction::new(p, 1.0), 1.0)],
        Generator::Fermionic { image, .. } => {
            let mut terms: Vec<(f64, &PauliString)> = image.iter().collect();
            match order {
                TrotterOrder::Lexicographic => terms.sort_by_key(|(_, p)| p.format()),
            }
            terms
                .into_iter()
                .map(|(c, p)| (PauliAction::new(p, 1.0), c))
                .collect()
        }
    }
}

/// The generator as weighted actions, for gradient evaluation.
fn generator_actions(op: &PoolOperator) -> Vec<PauliAction> {
    match &op.generator {
        Generator::Pauli(p) => vec![PauliAction::new(p, 1.0)],
        Generator::Fermionic { image, .. } => {
            image.iter().map(|(c, p)| PauliAction::new(p, c)).collect()
        }
    }
}

struct Gate {
    action: PauliAction,
    scale: f64,
    param: usize,
}

/// An ansatz flattened into single-string exponentials.
struct Circuit {
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    fn new<'a>(
        ops: impl IntoIterator<Item = &'a PoolOperator>,
        n_qubits: usize,
        order: TrotterOrder,
    ) -> Result<Self> {
        let mut gates = Vec::new();
        let mut n_params = 0;
        for op in ops {
            let n = operator_qubits(op);
            if n != n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    found: n,
                });
            }
            for (action, scale) in trotter_factors(op, order) {
                gates.push(Gate {
                    action,
                    scale,
                    param: n_params,
                });
            }
            n_params += 1;
        }
        Ok(Circuit { gates, n_params })
    }

    fn push(&mut self, op: &PoolOperator, order: TrotterOrder) {
        for (action, scale) in trotter_factors(op, order) {
            self.gates.push(Gate {
                action,
                scale,
                param: self.n_params,
            });
        }
        self.n_params += 1;
    }

    fn prepare(&self, reference: &[Complex64], thetas: &[f64]) -> Vec<Complex64> {
        let mut psi = reference.to_vec();
        for g in &self.gates {
            exp_in_place(&mut psi, g.scale * thetas[g.param], &g.action);
        }
        psi
    }

    /// Energy and its parameter gradient from one forward and one backward
    /// sweep: `∂E/∂φ_g = 2 Re⟨λ_g| τ_g ψ_g⟩`.
    fn energy_and_gradient(
        &self,
        h: &CompiledOperator,
        reference: &[Complex64],
        thetas: &[f64],
    ) -> (f64, Vec<f64>) {
        let mut psi = self.prepare(reference, thetas);
        let mut lam = h.apply(&psi);
        let energy = inner(&psi, &lam).re;
        let mut grad = vec![0.0; self.n_params];
        for g in self.gates.iter().rev() {
            grad[g.param] += 2.0 * g.scale * g.action.matrix_element(&lam, &psi).re;
            let phi = g.scale * thetas[g.param];
            exp_in_place(&mut psi, -phi, &g.action);
            exp_in_place(&mut lam, -phi, &g.action);
        }
        (energy, grad)
    }
}

/// Applies the ansatz to `reference`, first-added element first.
pub fn prepare_state(ansatz: &[AnsatzElement], reference: &StateVector) -> Result<StateVector> {
    let circuit = Circuit::new(
        ansatz.iter().map(|e| &e.operator),
        reference.n_qubits(),
        TrotterOrder::Lexicographic,
    )?;
    let thetas: Vec<f64> = ansatz.iter().map(|e| e.theta).collect();
    let amps = circuit.prepare(reference.amplitudes(), &thetas);
    StateVector::from_amplitudes(reference.n_qubits(), amps)
}

fn check_hamiltonian(h: &PauliSum, n_qubits: usize) -> Result<()> {
    if h.n_qubits() != n_qubits {
        return Err(Error::Dimension {
            expected: n_qubits,
            found: h.n_qubits(),
        });
    }
    if !h.is_hermitian() {
        return Err(Error::NotHermitian("Hamiltonian".into()));
    }
    Ok(())
}

fn gradients_with(actions: &[Vec<PauliAction>], hpsi: &[Complex64], psi: &[Complex64]) -> Vec<f64> {
    actions
        .par_iter()
        .map(|acts| {
            let z: Complex64 = acts.iter().map(|a| a.matrix_element(hpsi, psi)).sum();
            2.0 * z.re
        })
        .collect()
}

/// `g_i = ⟨ψ|[H, τ_i]|ψ⟩ = 2 Re⟨Hψ|τ_i ψ⟩`, the slope of the energy when
/// `e^{θτ_i}` is appended at `θ = 0`.
pub fn pool_gradients(h: &PauliSum, pool: &OperatorPool, psi: &StateVector) -> Result<Vec<f64>> {
    check_hamiltonian(h, psi.n_qubits())?;
    if pool.n_qubits != psi.n_qubits() {
        return Err(Error::Dimension {
            expected: psi.n_qubits(),
            found: pool.n_qubits,
        });
    }
    let hpsi = CompiledOperator::new(h).apply(psi.amplitudes());
    let actions: Vec<Vec<PauliAction>> = pool.operators.iter().map(generator_actions).collect();
    Ok(gradients_with(&actions, &hpsi, psi.amplitudes()))
}

pub fn gradient_norm(g: &[f64]) -> f64 {
    g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub thetas: Vec<f64>,
    pub energy: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn optimize_circuit(
    circuit: &Circuit,
    h: &CompiledOperator,
    reference: &[Complex64],
    theta_init: &[f64],
    settings: &OptimizerSettings,
) -> Result<VqeResult> {
    let f = |x: &[f64]| Ok(circuit.energy_and_gradient(h, reference, x));
    let r = minimize(f, theta_init, settings)?;
    Ok(VqeResult {
        thetas: r.x,
        energy: r.value,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// Minimises `⟨ψ(θ)|H|ψ(θ)⟩` starting from the thetas stored in `ansatz`.
pub fn vqe_optimize(
    h: &PauliSum,
    ansatz: &[AnsatzElement],
    reference: &StateVector,
    settings: &OptimizerSettings,
) -> Result<VqeResult> {
    check_hamiltonian(h, reference.n_qubits())?;
    let circuit = Circuit::new(
        ansatz.iter().map(|e| &e.operator),
        reference.n_qubits(),
        TrotterOrder::Lexicographic,
    )?;
    let theta0: Vec<f64> = ansatz.iter().map(|e| e.theta).collect();
    optimize_circuit(
        &circuit,
        &CompiledOperator::new(h),
        reference.amplitudes(),
        &theta0,
        settings,
    )
}

/// Energy and analytic parameter gradient of an ansatz.
pub fn energy_and_gradient(
    h: &PauliSum,
    ansatz: &[AnsatzElement],
    reference: &StateVector,
) -> Result<(f64, Vec<f64>)> {
    check_hamiltonian(h, reference.n_qubits())?;
    let circuit = Circuit::new(
        ansatz.iter().map(|e| &e.operator),
        reference.n_qubits(),
        TrotterOrder::Lexicographic,
    )?;
    let thetas: Vec<f64> = ansatz.iter().map(|e| e.theta).collect();
    Ok(circuit.energy_and_gradient(&CompiledOperator::new(h), reference.amplitudes(), &thetas))
}

enum Selection {
    Gradient,
    Random(Box<ChaCha8Rng>),
}

struct Driver<'a> {
    pool: &'a OperatorPool,
    reference: &'a StateVector,
    config: &'a AdaptConfig,
    h: CompiledOperator,
    actions: Vec<Vec<PauliAction>>,
    circuit: Circuit,
    indices: Vec<usize>,
    thetas: Vec<f64>,
    cnots: usize,
}

impl Driver<'_> {
    fn gradients(&self) -> Vec<f64> {
        let psi = self
            .circuit
            .prepare(self.reference.amplitudes(), &self.thetas);
        let hpsi = self.h.apply(&psi);
        gradients_with(&self.actions, &hpsi, &psi)
    }

    fn energy(&self) -> f64 {
        let psi = self
            .circuit
            .prepare(self.reference.amplitudes(), &self.thetas);
        inner(&psi, &self.h.apply(&psi)).re
    }

    fn allowed(&self, i: usize) -> bool {
        self.config.allow_operator_repeats || !self.indices.contains(&i)
    }

    fn run(mut self, max_steps: usize, mut selection: Selection) -> Result<AdaptTrace> {
        let error = |e: f64| self.config.exact_energy.map(|x| e - x);
        let mut g = self.gradients();
        let mut gn = gradient_norm(&g);
        let mut energy = self.energy();
        let mut rows = vec![TraceRow {
            iteration: 0,
            n_params: 0,
            pool_index: None,
            label: None,
            selected_grad: None,
            thetas: vec![],
            energy,
            energy_error: error(energy),
            grad_norm: gn,
            cnot_count: 0,
            evaluations: 1,
            optimizer_converged: true,
        }];
        let mut flat = 0usize;
        let termination = loop {
            if gn < self.config.grad_norm_eps {
                break Termination::GradientConverged;
            }
            if self.config.stall_patience.is_some_and(|p| flat >= p.max(1)) {
                break Termination::Stalled;
            }
            if rows.len() > max_steps {
                break Termination::MaxIterations;
            }
            let candidates: Vec<usize> =
                (0..self.pool.len()).filter(|&i| self.allowed(i)).collect();
            let pick = match &mut selection {
                _ if candidates.is_empty() => None,
                // first maximum wins, so ties go to the lowest index
                Selection::Gradient => candidates.iter().copied().reduce(|best, i| {
                    if g[i].abs() > g[best].abs() {
                        i
                    } else {
                        best
                    }
                }),
                Selection::Random(rng) => Some(candidates[rng.random_range(0..candidates.len())]),
            };
            let Some(index) = pick else {
                break Termination::Stalled;
            };
            let op = &self.pool.operators[index];
            self.circuit.push(op, self.config.trotter_order);
            self.indices.push(index);
            self.thetas.push(0.0);
            self.cnots += op.cnot_cost;
            let r = optimize_circuit(
                &self.circuit,
                &self.h,
                self.reference.amplitudes(),
                &self.thetas,
                &self.config.optimizer,
            )?;
            self.thetas = r.thetas;
            if energy - r.energy < self.config.stall_tol {
                flat += 1;
            } else {
                flat = 0;
            }
            energy = r.energy;
            let selected = g[index];
            g = self.gradients();
            gn = gradient_norm(&g);
            rows.push(TraceRow {
                iteration: rows.len(),
                n_params: self.thetas.len(),
                pool_index: Some(index),
                label: Some(op.label.clone()),
                selected_grad: Some(selected),
                thetas: self.thetas.clone(),
                energy,
                energy_error: error(energy),
                grad_norm: gn,
                cnot_count: self.cnots,
                evaluations: r.evaluations,
                optimizer_converged: r.converged,
            });
        };
        let ansatz = self
            .indices
            .iter()
            .zip(&self.thetas)
            .map(|(&i, &t)| AnsatzElement::new(self.pool.operators[i].clone(), t))
            .collect();
        Ok(AdaptTrace {
            rows,
            termination,
            ansatz,
        })
    }
}

fn driver<'a>(
    h: &PauliSum,
    pool: &'a OperatorPool,
    reference: &'a StateVector,
    config: &'a AdaptConfig,
) -> Result<Driver<'a>> {
    config.validate()?;
    check_hamiltonian(h, reference.n_qubits())?;
    if pool.n_qubits != reference.n_qubits() {
        return Err(Error::Dimension {
            expected: reference.n_qubits(),
            found: pool.n_qubits,
        });
    }
    Ok(Driver {
        pool,
        reference,
        config,
        h: CompiledOperator::new(h),
        actions: pool.operators.iter().map(generator_actions).collect(),
        circuit: Circuit {
            gates: vec![],
            n_params: 0,
        },
        indices: vec![],
        thetas: vec![],
        cnots: 0,
    })
}

/// Grows the ansatz by the operator with the largest energy gradient until
/// the gradient norm drops below `grad_norm_eps`.
pub fn run_adapt(
    h: &PauliSum,
    pool: &OperatorPool,
    reference: &StateVector,
    config: &AdaptConfig,
) -> Result<AdaptTrace> {
    driver(h, pool, reference, config)?.run(config.max_iterations, Selection::Gradient)
}

/// Grows the ansatz by `n_ops` uniformly random pool picks.
pub fn run_random_ordering(
    h: &PauliSum,
    pool: &OperatorPool,
    reference: &StateVector,
    n_ops: usize,
    seed: u64,
    config: &AdaptConfig,
) -> Result<AdaptTrace> {
    let rng = ChaCha8Rng::seed_from_u64(seed);
    driver(h, pool, reference, config)?.run(n_ops, Selection::Random(Box::new(rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::spin_adapted_doubles;
    use crate::oracle::{dense_pauli, dense_sum, CMat};
    use crate::pool::minimal_pool_v;

    fn ps(t: &str, n: usize) -> PauliString {
        PauliString::parse(t, n).unwrap()
    }

    fn sum(n: usize, terms: &[(f64, &str)]) -> PauliSum {
        PauliSum::from_terms(n, terms.iter().map(|(c, t)| (*c, ps(t, n)))).unwrap()
    }

    fn single_pool(n: usize, tokens: &[&str]) -> OperatorPool {
        let strings: Vec<PauliString> = tokens.iter().map(|t| ps(t, n)).collect();
        OperatorPool::from_paulis(n, crate::pool::PoolFamily::Custom, strings, "test").unwrap()
    }

    #[test]
    fn empty_ansatz_is_identity() {
        let r = StateVector::basis_state(2, "01").unwrap();
        assert_eq!(prepare_state(&[], &r).unwrap(), r);
    }

    #[test]
    fn quarter_turn_flips_zero_to_minus_one() {
        let op = PoolOperator::pauli(ps("i Y0", 1)).unwrap();
        let out = prepare_state(
            &[AnsatzElement::new(op, std::f64::consts::FRAC_PI_2)],
            &StateVector::zero(1).unwrap(),
        )
        .unwrap();
        assert!((out.amplitudes()[1] + 1.0).norm() < 1e-15);
        assert!(out.amplitudes()[0].norm() < 1e-15);
    }

    #[test]
    fn spec_gradient_examples() {
        let pool = single_pool(1, &["i Y0"]);
        let zero = StateVector::zero(1).unwrap();
        let gx = pool_gradients(&sum(1, &[(1.0, "X0")]), &pool, &zero).unwrap();
        assert!((gx[0] + 2.0).abs() < 1e-15);
        let gz = pool_gradients(&sum(1, &[(1.0, "Z0")]), &pool, &zero).unwrap();
        assert_eq!(gz[0], 0.0);
        let commuting = single_pool(2, &["i Y0 Z1"]);
        let g = pool_gradients(
            &sum(2, &[(1.0, "Z1")]),
            &commuting,
            &StateVector::random_real_seeded(2, 3).unwrap(),
        )
        .unwrap();
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn gradient_norm_examples() {
        assert_eq!(gradient_norm(&[]), 0.0);
        assert_eq!(gradient_norm(&[0.0, 1.0]), 1.0);
        assert_eq!(gradient_norm(&[3.0, 4.0]), 5.0);
    }

    #[test]
    fn minus_z_converges_in_one_step() {
        let h = sum(1, &[(1.0, "Z0")]);
        let pool = single_pool(1, &["i Y0"]);
        let cfg = AdaptConfig {
            exact_energy: Some(-1.0),
            ..Default::default()
        };
        // the gradient vanishes at |0⟩, so start slightly off the pole
        let mut start = StateVector::zero(1).unwrap();
        start.apply_exp(0.1, &ps("i Y0", 1)).unwrap();
        let trace = run_adapt(&h, &pool, &start, &cfg).unwrap();
        assert_eq!(trace.termination, Termination::GradientConverged);
        assert_eq!(trace.n_params(), 1);
        assert!((trace.final_energy() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn vqe_rotates_to_minus_one() {
        let h = sum(1, &[(1.0, "Z0")]);
        let op = PoolOperator::pauli(ps("i Y0", 1)).unwrap();
        // θ = 0 is a stationary point of cos 2θ, so nudge off it
        let r = vqe_optimize(
            &h,
            &[AnsatzElement::new(op, 0.01)],
            &StateVector::zero(1).unwrap(),
            &OptimizerSettings::default(),
        )
        .unwrap();
        assert!((r.energy + 1.0).abs() < 1e-14);
        assert!(r.converged);
    }

    fn dense_exp(tau: &CMat, theta: f64) -> CMat {
        // τ is a sum of anti-Hermitian strings; exponentiate via eigen-decomposition of iτ
        let herm = tau * Complex64::new(0.0, 1.0);
        let dim = herm.nrows();
        let real = nalgebra::DMatrix::from_fn(2 * dim, 2 * dim, |r, c| {
            let (rb, cb) = (r / dim, c / dim);
            let z = herm[(r % dim, c % dim)];
            match (rb, cb) {
                (0, 0) | (1, 1) => z.re,
                (0, 1) => -z.im,
                _ => z.im,
            }
        });
        let eig = real.symmetric_eigen();
        // e^{θτ} = e^{-iθ·(iτ)}; build in the real embedding then fold back
        let mut out = CMat::zeros(dim, dim);
        for k in 0..2 * dim {
            let v = eig.eigenvectors.column(k);
            let phase = Complex64::new(0.0, -theta * eig.eigenvalues[k]).exp();
            let u: Vec<Complex64> = (0..dim).map(|i| Complex64::new(v[i], v[i + dim])).collect();
            for r in 0..dim {
                for c in 0..dim {
                    out[(r, c)] += 0.5 * phase * u[r] * u[c].conj();
                }
            }
        }
        out
    }

    #[test]
    fn trotterised_fermionic_element_tracks_exact_exponential() {
        let exc = spin_adapted_doubles(2)
            .into_iter()
            .find(|e| e.n_terms() > 1)
            .unwrap();
        let op = PoolOperator::fermionic(exc, 4).unwrap();
        let tau = dense_sum(&op.to_sum());
        let reference = StateVector::basis_state(4, "0011").unwrap();
        for theta in [1e-3, 1e-2, 5e-2] {
            let got = prepare_state(&[AnsatzElement::new(op.clone(), theta)], &reference).unwrap();
            let want = dense_exp(&tau, theta)
                * nalgebra::DVector::from_column_slice(reference.amplitudes());
            let diff: f64 = got
                .amplitudes()
                .iter()
                .zip(want.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 4.0 * theta * theta, "θ={theta} diff={diff}");
        }
    }

    #[test]
    fn dense_exponential_oracle_is_sane() {
        let tau = dense_pauli(&ps("i Y0", 1));
        let u = dense_exp(&tau, 0.3);
        assert!((u[(0, 0)].re - 0.3f64.cos()).abs() < 1e-12);
        assert!((u[(1, 0)].re + 0.3f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let h = sum(
            3,
            &[
                (0.7, "Z0 Z1"),
                (-0.4, "X1 X2"),
                (0.3, "Y0 Y2"),
                (0.9, "Z2"),
                (-0.2, "X0"),
            ],
        );
        let pool = minimal_pool_v(3, false).unwrap();
        let reference = StateVector::random_real_seeded(3, 5).unwrap();
        let ansatz: Vec<AnsatzElement> = pool
            .operators
            .iter()
            .zip([0.3, -0.8, 1.1, 0.45])
            .map(|(op, t)| AnsatzElement::new(op.clone(), t))
            .collect();
        let (_, grad) = energy_and_gradient(&h, &ansatz, &reference).unwrap();
        let step = 1e-5;
        for k in 0..ansatz.len() {
            let mut plus = ansatz.clone();
            let mut minus = ansatz.clone();
            plus[k].theta += step;
            minus[k].theta -= step;
            let fd = (energy_and_gradient(&h, &plus, &reference).unwrap().0
                - energy_and_gradient(&h, &minus, &reference).unwrap().0)
                / (2.0 * step);
            assert!(
                (fd - grad[k]).abs() < 1e-6 * grad[k].abs().max(1e-4),
                "{k}: {fd} vs {}",
                grad[k]
            );
        }
    }

    #[test]
    fn csv_has_reference_row() {
        let h = sum(1, &[(1.0, "Z0"), (0.5, "X0")]);
        let pool = single_pool(1, &["i Y0"]);
        let trace = run_adapt(
            &h,
            &pool,
            &StateVector::zero(1).unwrap(),
            &AdaptConfig::default(),
        )
        .unwrap();
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(AdaptTrace::CSV_HEADER));
        let row0: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row0[0], "0");
        assert_eq!(row0[2], "");
        assert_eq!(row0[3], "");
        assert_eq!(row0[5], "");
        let row1: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row1[2], "i Y0");
    }

    #[test]
    fn random_ordering_with_no_steps() {
        let h = sum(1, &[(1.0, "Z0"), (0.5, "X0")]);
        let pool = single_pool(1, &["i Y0"]);
        let t = run_random_ordering(
            &h,
            &pool,
            &StateVector::zero(1).unwrap(),
            0,
            1,
            &AdaptConfig::default(),
        )
        .unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.termination, Termination::MaxIterations);
    }

    #[test]
    fn rejects_nonpositive_eps() {
        let cfg = AdaptConfig {
            grad_norm_eps: 0.0,
            ..Default::default()
        };
        let h = sum(1, &[(1.0, "Z0")]);
        let pool = single_pool(1, &["i Y0"]);
        assert!(run_adapt(&h, &pool, &StateVector::zero(1).unwrap(), &cfg).is_err());
    }
}
