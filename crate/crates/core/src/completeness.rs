//! Pool completeness: commutator closure of Pauli generators and the rank of
//! their images on a random real state.
//!
//! A pool is complete when the closure `{A_i}` maps a generic real state onto
//! `2^n − 1` linearly independent vectors. Every image `A_iψ` of a real state
//! under a real antisymmetric `A_i` is orthogonal to `ψ`, so `2^n − 1` is the
//! largest attainable rank.

use std::collections::HashSet;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pauli::{count_odd_strings, PauliString};
use crate::pool::{minimal_pool_g, minimal_pool_v, random_odd_pool, OperatorPool};
use crate::state::StateVector;

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Commutator closure of a set of anti-Hermitian Pauli strings. Elements are
/// stored as `iR` and identified up to a real factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureSet {
    pub n_qubits: usize,
    pub generators: Vec<PauliString>,
    /// Generators first, then new elements in discovery order.
    pub elements: Vec<PauliString>,
    /// Number of commutator rounds until nothing new appeared.
    pub generation_depth: usize,
    pub truncated: bool,
}

impl ClosureSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.elements
            .iter()
            .any(|e| e.x_mask() == p.x_mask() && e.z_mask() == p.z_mask())
    }

    /// Full pass over all pairs; true if every commutator is in the set.
    pub fn is_closed(&self) -> bool {
        let keys: HashSet<(u64, u64)> = self.elements.iter().map(key).collect();
        self.elements.iter().enumerate().all(|(i, a)| {
            self.elements[..i].iter().all(|b| {
                a.commutes_with(b)
                    || keys.contains(&(a.x_mask() ^ b.x_mask(), a.z_mask() ^ b.z_mask()))
            })
        })
    }
}

fn key(p: &PauliString) -> (u64, u64) {
    (p.x_mask(), p.z_mask())
}

/// Closure under commutation, capped at `cap` elements (default: the number
/// of odd strings on `n` qubits, or `4^n − 1` if generators are not all odd).
pub fn lie_closure(generators: &[PauliString], cap: Option<usize>) -> Result<ClosureSet> {
    let n = generators
        .first()
        .map(|g| g.n_qubits())
        .ok_or_else(|| Error::invalid("closure needs at least one generator"))?;
    let mut elements: Vec<PauliString> = Vec::new();
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    for g in generators {
        if g.n_qubits() != n {
            return Err(Error::Dimension {
                expected: n,
                found: g.n_qubits(),
            });
        }
        if !g.is_anti_hermitian() {
            return Err(Error::NotAntiHermitian(g.to_string()));
        }
        if g.is_identity() {
            return Err(Error::invalid("identity has a trivial commutator algebra"));
        }
        if seen.insert(key(g)) {
            elements.push(g.with_phase(1));
        }
    }
    let all_odd = elements.iter().all(|p| p.is_odd());
    let cap = cap.unwrap_or_else(|| {
        if all_odd && n <= 16 {
            count_odd_strings(n).expect("n <= 16") as usize
        } else {
            usize::MAX
        }
    });

    let generator_list = elements.clone();
    let mut truncated = false;
    let mut depth = 0;
    // elements[..done] have been commuted with every element before them
    let mut done = 0;
    'outer: while done < elements.len() {
        let layer_end = elements.len();
        depth += 1;
        for i in done..layer_end {
            for j in 0..i {
                let (a, b) = (elements[i], elements[j]);
                if a.commutes_with(&b) {
                    continue;
                }
                let k = (a.x_mask() ^ b.x_mask(), a.z_mask() ^ b.z_mask());
                if seen.insert(k) {
                    if elements.len() >= cap {
                        truncated = true;
                        break 'outer;
                    }
                    elements.push(PauliString::from_masks(n, k.0, k.1, 1)?);
                }
            }
        }
        done = layer_end;
        if elements.len() == layer_end {
            break;
        }
    }
    Ok(ClosureSet {
        n_qubits: n,
        generators: generator_list,
        elements,
        generation_depth: depth,
        truncated,
    })
}

fn real_state(psi: &StateVector) -> Result<Vec<f64>> {
    if psi.imag_norm() > 1e-10 {
        return Err(Error::invalid("completeness test needs a real state"));
    }
    Ok(psi.real_parts())
}

/// Columns `A_i ψ` as a real `2^n × k` matrix.
fn image_matrix(ops: &[PauliString], psi: &StateVector) -> Result<DMatrix<f64>> {
    let _ = real_state(psi)?;
    let dim = psi.dim();
    let mut m = DMatrix::zeros(dim, ops.len());
    for (j, a) in ops.iter().enumerate() {
        let img = psi.apply_pauli(a)?;
        for (i, z) in img.amplitudes().iter().enumerate() {
            debug_assert!(z.im.abs() < 1e-12);
            m[(i, j)] = z.re;
        }
    }
    Ok(m)
}

/// `M_ij = ⟨ψ|A_i† A_j|ψ⟩` over the closure elements.
pub fn gram_matrix(ops: &ClosureSet, psi: &StateVector) -> Result<DMatrix<f64>> {
    let m = image_matrix(&ops.elements, psi)?;
    Ok(m.transpose() * m)
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    // the narrow side keeps the decomposition small
    let mut sv: Vec<f64> = if m.nrows() < m.ncols() {
        m.transpose().singular_values().iter().copied().collect()
    } else {
        m.singular_values().iter().copied().collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn rank_of(sv: &[f64], tol: f64) -> usize {
    let max = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > tol * max).count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessReport {
    pub n_qubits: usize,
    pub pool: String,
    pub pool_size: usize,
    pub closure_size: usize,
    pub gram_rank: usize,
    pub threshold: usize,
    pub complete: bool,
    /// The closure hit its cap, so the rank is only a lower bound.
    pub truncated: bool,
    pub singular_values: Vec<f64>,
    pub state_seed: u64,
}

impl CompletenessReport {
    pub const CSV_HEADER: &'static str = "n,pool_size,trial,closure_size,rank,complete";

    pub fn csv_row(&self, trial: usize) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n_qubits, self.pool_size, trial, self.closure_size, self.gram_rank, self.complete
        )
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "pool          : {}", self.pool);
        let _ = writeln!(s, "qubits        : {}", self.n_qubits);
        let _ = writeln!(s, "pool size     : {}", self.pool_size);
        let _ = writeln!(s, "closure size  : {}", self.closure_size);
        let _ = writeln!(s, "rank          : {}", self.gram_rank);
        let _ = writeln!(s, "threshold     : {}", self.threshold);
        let verdict = match (self.complete, self.truncated) {
            (true, _) => "complete",
            (false, false) => "incomplete",
            (false, true) => "incomplete (closure truncated; rank is a lower bound)",
        };
        let _ = writeln!(s, "verdict       : {verdict}");
        s
    }
}

/// Rank test for a list of Pauli generators against a seeded random real state.
pub fn completeness_of_strings(
    strings: &[PauliString],
    pool_name: &str,
    state_seed: u64,
    tol: f64,
) -> Result<CompletenessReport> {
    let closure = lie_closure(strings, None)?;
    let n = closure.n_qubits;
    if n > 16 {
        return Err(Error::invalid("rank test is limited to 16 qubits"));
    }
    let psi = StateVector::random_real_seeded(n, state_seed)?;
    let sv = singular_values(&image_matrix(&closure.elements, &psi)?);
    let rank = rank_of(&sv, tol);
    let threshold = (1usize << n) - 1;
    Ok(CompletenessReport {
        n_qubits: n,
        pool: pool_name.to_string(),
        pool_size: strings.len(),
        closure_size: closure.len(),
        gram_rank: rank,
        threshold,
        complete: rank >= threshold,
        truncated: closure.truncated,
        singular_values: sv,
        state_seed,
    })
}

pub fn completeness_rank(
    pool: &OperatorPool,
    state_seed: u64,
    tol: f64,
) -> Result<CompletenessReport> {
    let strings = pool.pauli_strings()?;
    if strings.is_empty() {
        let n = pool.n_qubits;
        if n == 0 || n > 16 {
            return Err(Error::invalid("rank test is limited to 1..=16 qubits"));
        }
        return Ok(CompletenessReport {
            n_qubits: n,
            pool: pool.description(),
            pool_size: 0,
            closure_size: 0,
            gram_rank: 0,
            threshold: (1usize << n) - 1,
            complete: false,
            truncated: false,
            singular_values: vec![],
            state_seed,
        });
    }
    completeness_of_strings(&strings, &pool.description(), state_seed, tol)
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub n_qubits: usize,
    pub pool_size: usize,
    pub fraction: f64,
    pub reports: Vec<CompletenessReport>,
}

impl ScanResult {
    pub fn csv(&self) -> String {
        let mut s = String::from(CompletenessReport::CSV_HEADER);
        s.push('\n');
        for (t, r) in self.reports.iter().enumerate() {
            s.push_str(&r.csv_row(t));
            s.push('\n');
        }
        s
    }
}

/// Fraction of `trials` random odd pools of `pool_size` that are complete.
/// Per-trial seeds are drawn from `seed` up front, so results do not depend
/// on thread scheduling.
pub fn completeness_fraction_scan(
    n: usize,
    pool_size: usize,
    trials: usize,
    seed: u64,
) -> Result<ScanResult> {
    if trials == 0 {
        return Err(Error::invalid("scan needs at least one trial"));
    }
    let total = count_odd_strings(n)? as usize;
    if pool_size == 0 || pool_size > total {
        return Err(Error::invalid(format!(
            "pool size must be in 1..={total} for {n} qubits, got {pool_size}"
        )));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<(u64, u64)> = (0..trials)
        .map(|_| (master.random(), master.random()))
        .collect();
    let reports = seeds
        .par_iter()
        .map(|&(pool_seed, state_seed)| {
            let pool = random_odd_pool(n, pool_size, pool_seed)?;
            completeness_rank(&pool, state_seed, DEFAULT_RANK_TOL)
        })
        .collect::<Result<Vec<_>>>()?;
    let complete = reports.iter().filter(|r| r.complete).count();
    Ok(ScanResult {
        n_qubits: n,
        pool_size,
        fraction: complete as f64 / trials as f64,
        reports,
    })
}

fn same_up_to_scalar(a: &PauliString, b: &PauliString) -> bool {
    key(a) == key(b)
}

fn product(ops: &[&PauliString]) -> PauliString {
    let n = ops[0].n_qubits();
    ops.iter()
        .fold(PauliString::identity(n), |acc, p| acc.mul_unchecked(p))
}

/// Checks that `V` lies in the closure of `G` and the product identities
/// between the two listings (1-based indices as in the listing):
/// `V_{n−1} = G_1`, `V_n = G_n`, `V_{2n−2} = G_{n+1}`,
/// `V_{n−k} ∝ G_1 ∏_{j=2..k} G_j G_{j+n−1}` and
/// `V_{2n−k} ∝ G_{k−1} G_k V_{n−k}` for `k = 3..n−1`.
pub fn check_pool_mapping(n: usize) -> Result<bool> {
    let v = minimal_pool_v(n, false)?.pauli_strings()?;
    let g = minimal_pool_g(n)?.pauli_strings()?;
    let closure = lie_closure(&g, None)?;
    if !v.iter().all(|p| closure.contains(p)) {
        return Ok(false);
    }
    let vi = |i: usize| &v[i - 1];
    let gi = |i: usize| &g[i - 1];
    let mut ok = same_up_to_scalar(vi(n - 1), gi(1)) && same_up_to_scalar(vi(n), gi(n));
    if n >= 3 {
        ok &= same_up_to_scalar(vi(2 * n - 2), gi(n + 1));
    }
    for k in 2..n {
        let mut factors = vec![gi(1)];
        for j in 2..=k {
            factors.push(gi(j));
            factors.push(gi(j + n - 1));
        }
        ok &= same_up_to_scalar(vi(n - k), &product(&factors));
    }
    for k in 3..n {
        ok &= same_up_to_scalar(vi(2 * n - k), &product(&[gi(k - 1), gi(k), vi(n - k)]));
    }
    Ok(ok)
}
