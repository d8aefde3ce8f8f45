//! Operator pools: spin-adapted fermionic generators, their Pauli fragments,
//! the minimal complete pools `V` and `G`, and random pools.
//!
//! In the minimal pools, qubit `k` (0-based) plays the role of qubit `k + 1`
//! in the usual 1-based listing, so `iZ₂Y₁` is `i Y0 Z1` here.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fermion::{spin_adapted_doubles, spin_adapted_singles, SpinAdaptedExcitation};
use crate::pauli::{count_odd_strings, odd_strings, parse_tokens, Pauli, PauliString, PauliSum};
use crate::resources::{cnot_count_generator, cnot_count_pauli_exp};

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// A single anti-Hermitian string `iP`.
    Pauli(PauliString),
    /// A spin-adapted excitation and its Jordan-Wigner image.
    Fermionic {
        excitation: SpinAdaptedExcitation,
        image: PauliSum,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoolOperator {
    pub label: String,
    pub generator: Generator,
    /// CNOTs to implement `exp(θτ)` (Trotterised for fermionic generators).
    pub cnot_cost: usize,
}

impl PoolOperator {
    pub fn pauli(p: PauliString) -> Result<Self> {
        if !p.is_anti_hermitian() {
            return Err(Error::NotAntiHermitian(p.to_string()));
        }
        Ok(PoolOperator {
            label: p.format(),
            cnot_cost: cnot_count_pauli_exp(&p),
            generator: Generator::Pauli(p),
        })
    }

    pub fn fermionic(excitation: SpinAdaptedExcitation, n_qubits: usize) -> Result<Self> {
        let image = excitation.jordan_wigner(n_qubits)?;
        Ok(PoolOperator {
            label: excitation.label(),
            cnot_cost: cnot_count_generator(&image),
            generator: Generator::Fermionic { excitation, image },
        })
    }

    pub fn as_pauli(&self) -> Option<&PauliString> {
        match &self.generator {
            Generator::Pauli(p) => Some(p),
            Generator::Fermionic { .. } => None,
        }
    }

    pub fn is_pauli(&self) -> bool {
        self.as_pauli().is_some()
    }

    /// The generator as a Pauli sum.
    pub fn to_sum(&self) -> PauliSum {
        match &self.generator {
            Generator::Pauli(p) => PauliSum::from(*p),
            Generator::Fermionic { image, .. } => image.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PoolFamily {
    Fermionic,
    Qubit,
    QubitWithZ,
    MinimalV,
    MinimalVReduced,
    MinimalG,
    RandomOdd,
    Subpool,
    Custom,
}

impl fmt::Display for PoolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PoolFamily::Fermionic => "fermionic",
            PoolFamily::Qubit => "qubit",
            PoolFamily::QubitWithZ => "qubit-with-z",
            PoolFamily::MinimalV => "v",
            PoolFamily::MinimalVReduced => "v-reduced",
            PoolFamily::MinimalG => "g",
            PoolFamily::RandomOdd => "random",
            PoolFamily::Subpool => "subpool",
            PoolFamily::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPool {
    pub n_qubits: usize,
    pub family: PoolFamily,
    pub operators: Vec<PoolOperator>,
    /// Construction parameters, e.g. `m=4` or `n=3 size=4 seed=7`.
    pub provenance: String,
}

impl OperatorPool {
    /// A pool of Pauli generators; duplicates up to sign are rejected.
    pub fn from_paulis(
        n_qubits: usize,
        family: PoolFamily,
        strings: impl IntoIterator<Item = PauliString>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut operators = Vec::new();
        for p in strings {
            if p.n_qubits() != n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    found: p.n_qubits(),
                });
            }
            if p.is_identity() {
                return Err(Error::invalid("identity is not a valid pool generator"));
            }
            if !seen.insert((p.x_mask(), p.z_mask())) {
                return Err(Error::invalid(format!("duplicate pool generator {p}")));
            }
            operators.push(PoolOperator::pauli(p)?);
        }
        Ok(OperatorPool {
            n_qubits,
            family,
            operators,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// The Pauli generators, or an error for a fermionic pool.
    pub fn pauli_strings(&self) -> Result<Vec<PauliString>> {
        self.operators
            .iter()
            .map(|op| {
                op.as_pauli()
                    .copied()
                    .ok_or_else(|| Error::invalid("pool contains fermionic generators"))
            })
            .collect()
    }

    pub fn description(&self) -> String {
        if self.provenance.is_empty() {
            self.family.to_string()
        } else {
            format!("{} {}", self.family, self.provenance)
        }
    }
}

/// Spin-adapted singles and doubles over `m` spatial orbitals, on `2m` qubits.
pub fn fermionic_pool(m: usize) -> Result<OperatorPool> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "fermionic pool needs m >= 2, got {m}"
        )));
    }
    let n = 2 * m;
    let operators = spin_adapted_singles(m)
        .into_iter()
        .chain(spin_adapted_doubles(m))
        .map(|e| PoolOperator::fermionic(e, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorPool {
        n_qubits: n,
        family: PoolFamily::Fermionic,
        operators,
        provenance: format!("m={m}"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitPoolOptions {
    /// Remove all Z factors from every fragment.
    pub strip_z: bool,
    /// Keep only one of each pair related by swapping X and Y on every qubit.
    pub dedupe_rotation_pairs: bool,
}

impl Default for QubitPoolOptions {
    fn default() -> Self {
        QubitPoolOptions {
            strip_z: true,
            dedupe_rotation_pairs: false,
        }
    }
}

/// Every distinct Pauli string in the fermionic generators, as `iP`.
pub fn qubit_pool(fp: &OperatorPool, opts: QubitPoolOptions) -> Result<OperatorPool> {
    if fp.family != PoolFamily::Fermionic {
        return Err(Error::invalid(
            "qubit pool must be derived from a fermionic pool",
        ));
    }
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    let mut strings = Vec::new();
    for op in &fp.operators {
        for (_, p) in op.to_sum().iter() {
            let q = if opts.strip_z { p.strip_z() } else { *p }.with_phase(1);
            if q.is_identity() || seen.contains(&(q.x_mask(), q.z_mask())) {
                continue;
            }
            if opts.dedupe_rotation_pairs {
                let r = q.swap_xy();
                if seen.contains(&(r.x_mask(), r.z_mask())) {
                    continue;
                }
            }
            seen.insert((q.x_mask(), q.z_mask()));
            strings.push(q);
        }
    }
    let family = if opts.strip_z {
        PoolFamily::Qubit
    } else {
        PoolFamily::QubitWithZ
    };
    let mut pool = OperatorPool::from_paulis(fp.n_qubits, family, strings, fp.provenance.clone())?;
    if opts.dedupe_rotation_pairs {
        pool.provenance.push_str(" dedupe-rotation-pairs");
    }
    Ok(pool)
}

fn check_minimal(n: usize) -> Result<()> {
    if !(1..=crate::pauli::MAX_QUBITS).contains(&n) {
        return Err(Error::invalid(format!(
            "minimal pools need n >= 1, got {n}"
        )));
    }
    Ok(())
}

fn string(n: usize, factors: &[(usize, Pauli)]) -> PauliString {
    PauliString::from_paulis(n, factors)
        .expect("indices in range")
        .with_phase(1)
}

/// `Y` on qubit `k` and `Z` on each qubit in `zs`.
fn y_with_zs(n: usize, k: usize, zs: impl IntoIterator<Item = usize>) -> PauliString {
    let mut f = vec![(k, Pauli::Y)];
    f.extend(zs.into_iter().map(|q| (q, Pauli::Z)));
    string(n, &f)
}

/// The minimal complete pool `V`, `2n − 2` operators in listing order:
/// `iY_k Z_{k+1}…Z_{n−1}` for `k = 0..n−2`, then `iY_{n−1}`, then
/// `iY_j Z_{j+2}…Z_{n−1}` for `j = 1..n−2`. With `reduced`, `iY_{n−1}` is
/// left out.
pub fn minimal_pool_v(n: usize, reduced: bool) -> Result<OperatorPool> {
    check_minimal(n)?;
    let mut strings = Vec::with_capacity(2 * n - 2);
    for k in 0..n - 1 {
        strings.push(y_with_zs(n, k, k + 1..n));
    }
    if !reduced {
        strings.push(y_with_zs(n, n - 1, []));
    }
    for j in 1..n - 1 {
        strings.push(y_with_zs(n, j, j + 2..n));
    }
    let family = if reduced {
        PoolFamily::MinimalVReduced
    } else {
        PoolFamily::MinimalV
    };
    OperatorPool::from_paulis(n, family, strings, format!("n={n}"))
}

/// The local minimal complete pool `G`: `iZ_{k+1}Y_k` from the top pair down,
/// then `iY_k` for `k = n−1` down to 1.
pub fn minimal_pool_g(n: usize) -> Result<OperatorPool> {
    check_minimal(n)?;
    let mut strings = Vec::with_capacity(2 * n - 2);
    for k in (0..n - 1).rev() {
        strings.push(y_with_zs(n, k, [k + 1]));
    }
    for k in (1..n).rev() {
        strings.push(y_with_zs(n, k, []));
    }
    OperatorPool::from_paulis(n, PoolFamily::MinimalG, strings, format!("n={n}"))
}

/// `size` distinct odd strings drawn uniformly without replacement.
pub fn random_odd_pool(n: usize, size: usize, seed: u64) -> Result<OperatorPool> {
    let total = count_odd_strings(n)? as usize;
    if size == 0 || size > total {
        return Err(Error::invalid(format!(
            "pool size must be in 1..={total} for {n} qubits, got {size}"
        )));
    }
    let all: Vec<PauliString> = odd_strings(n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, total, size);
    OperatorPool::from_paulis(
        n,
        PoolFamily::RandomOdd,
        picks.iter().map(|i| all[i].with_phase(1)),
        format!("n={n} size={size} seed={seed}"),
    )
}

/// Keeps `⌈fraction · len⌉` operators (at least one), sampled without
/// replacement and listed in their original order.
pub fn random_subpool(pool: &OperatorPool, fraction: f64, seed: u64) -> Result<OperatorPool> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    if pool.is_empty() {
        return Err(Error::invalid("cannot subsample an empty pool"));
    }
    let keep = ((fraction * pool.len() as f64).ceil() as usize).clamp(1, pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, pool.len(), keep).into_vec();
    picks.sort_unstable();
    Ok(OperatorPool {
        n_qubits: pool.n_qubits,
        family: PoolFamily::Subpool,
        operators: picks
            .into_iter()
            .map(|i| pool.operators[i].clone())
            .collect(),
        provenance: format!("{} fraction={fraction} seed={seed}", pool.description()),
    })
}

/// Pool file: `nqubits <n>` followed by one generator per line, e.g. `i Y0 Z1`.
pub fn write_pool(pool: &OperatorPool) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", pool.description());
    let _ = writeln!(out, "nqubits {}", pool.n_qubits);
    for p in pool.pauli_strings()? {
        let _ = writeln!(out, "{}", p.format());
    }
    Ok(out)
}

pub fn parse_pool(text: &str) -> Result<OperatorPool> {
    let mut n: Option<usize> = None;
    let mut strings = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match n {
            None => {
                let mut f = line.split_whitespace();
                let count = match (f.next(), f.next(), f.next()) {
                    (Some("nqubits"), Some(v), None) => v.parse::<usize>().ok(),
                    _ => None,
                };
                n = Some(count.ok_or_else(|| {
                    Error::parse(line_no, 1, "first data line must be 'nqubits <n>'")
                })?);
            }
            Some(n) => {
                let p = parse_tokens(line, n, line_no)?;
                if !p.is_anti_hermitian() {
                    return Err(Error::parse(
                        line_no,
                        1,
                        "pool generators must carry an 'i' prefix",
                    ));
                }
                strings.push(p);
            }
        }
    }
    let n = n.ok_or_else(|| Error::parse(1, 0, "missing 'nqubits <n>' line"))?;
    OperatorPool::from_paulis(n, PoolFamily::Custom, strings, "")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(t: &str, n: usize) -> PauliString {
        PauliString::parse(t, n).unwrap()
    }

    fn strings(pool: &OperatorPool) -> Vec<PauliString> {
        pool.pauli_strings().unwrap()
    }

    #[test]
    fn fermionic_pool_sizes() {
        assert_eq!(fermionic_pool(2).unwrap().len(), 4);
        assert_eq!(fermionic_pool(4).unwrap().len(), 66);
        for op in &fermionic_pool(3).unwrap().operators {
            let g = op.to_sum();
            assert!(g.is_anti_hermitian());
            assert!(g.iter().all(|(_, p)| p.is_odd()));
        }
    }

    #[test]
    fn qubit_pool_weights_and_parity() {
        for m in 2..=4 {
            let fp = fermionic_pool(m).unwrap();
            let qp = qubit_pool(&fp, QubitPoolOptions::default()).unwrap();
            for p in strings(&qp) {
                assert!(
                    p.weight() <= 4 && p.is_odd() && p.is_anti_hermitian(),
                    "{p}"
                );
                assert_eq!(p.z_mask() & !p.x_mask(), 0);
            }
            let with_z = qubit_pool(
                &fp,
                QubitPoolOptions {
                    strip_z: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(with_z.len() >= qp.len());
            let deduped = qubit_pool(
                &fp,
                QubitPoolOptions {
                    dedupe_rotation_pairs: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(deduped.len() < qp.len());
        }
    }

    #[test]
    fn strip_z_example() {
        assert_eq!(ps("i Y0 Z1 Z2", 3).strip_z(), ps("i Y0", 3));
    }

    #[test]
    fn v_pool_listing() {
        let v2 = strings(&minimal_pool_v(2, false).unwrap());
        assert_eq!(v2, vec![ps("i Y0 Z1", 2), ps("i Y1", 2)]);
        let v3 = strings(&minimal_pool_v(3, false).unwrap());
        assert_eq!(
            v3,
            vec![
                ps("i Y0 Z1 Z2", 3),
                ps("i Y1 Z2", 3),
                ps("i Y2", 3),
                ps("i Y1", 3)
            ]
        );
        assert_eq!(minimal_pool_v(5, false).unwrap().len(), 8);
        let red = strings(&minimal_pool_v(4, true).unwrap());
        assert_eq!(red.len(), 5);
        assert!(!red.contains(&ps("i Y3", 4)));
    }

    fn v_recursive(n: usize) -> HashSet<PauliString> {
        if n == 2 {
            return [ps("i Y0 Z1", 2), ps("i Y1", 2)].into_iter().collect();
        }
        let mut out: HashSet<PauliString> = v_recursive(n - 1)
            .into_iter()
            .map(|p| PauliString::from_masks(n, p.x_mask(), p.z_mask() | 1 << (n - 1), 1).unwrap())
            .collect();
        out.insert(y_with_zs(n, n - 1, []));
        out.insert(y_with_zs(n, n - 2, []));
        out
    }

    #[test]
    fn v_pool_matches_recursive_definition() {
        for n in 2..=8 {
            let listed: HashSet<PauliString> = strings(&minimal_pool_v(n, false).unwrap())
                .into_iter()
                .collect();
            assert_eq!(listed, v_recursive(n), "n={n}");
            assert_eq!(listed.len(), 2 * n - 2);
        }
    }

    #[test]
    fn g_pool_listing() {
        assert_eq!(
            strings(&minimal_pool_g(2).unwrap()),
            strings(&minimal_pool_v(2, false).unwrap())
        );
        let g4 = strings(&minimal_pool_g(4).unwrap());
        assert_eq!(
            g4,
            vec![
                ps("i Y2 Z3", 4),
                ps("i Y1 Z2", 4),
                ps("i Y0 Z1", 4),
                ps("i Y3", 4),
                ps("i Y2", 4),
                ps("i Y1", 4)
            ]
        );
        let g7 = strings(&minimal_pool_g(7).unwrap());
        assert_eq!(g7.len(), 12);
        assert!(g7.iter().all(|p| p.weight() <= 2 && p.is_odd()));
    }

    #[test]
    fn random_pools() {
        let full = random_odd_pool(2, 6, 1).unwrap();
        let all: HashSet<PauliString> = odd_strings(2).map(|p| p.with_phase(1)).collect();
        assert_eq!(strings(&full).into_iter().collect::<HashSet<_>>(), all);
        assert_eq!(
            random_odd_pool(3, 4, 9).unwrap(),
            random_odd_pool(3, 4, 9).unwrap()
        );
        assert_eq!(random_odd_pool(3, 4, 9).unwrap().len(), 4);
        assert!(random_odd_pool(2, 7, 1).is_err());
        assert!(random_odd_pool(2, 0, 1).is_err());
    }

    #[test]
    fn subpools() {
        let pool = random_odd_pool(4, 64, 3).unwrap();
        assert_eq!(
            random_subpool(&pool, 1.0, 5).unwrap().operators,
            pool.operators
        );
        assert_eq!(random_subpool(&pool, 0.25, 5).unwrap().len(), 16);
        assert_eq!(random_subpool(&pool, 1e-6, 5).unwrap().len(), 1);
        assert_eq!(
            random_subpool(&pool, 0.1, 5).unwrap(),
            random_subpool(&pool, 0.1, 5).unwrap()
        );
        assert!(random_subpool(&pool, 0.0, 5).is_err());
    }

    #[test]
    fn pool_file_round_trip() {
        let pool = minimal_pool_g(4).unwrap();
        let parsed = parse_pool(&write_pool(&pool).unwrap()).unwrap();
        assert_eq!(
            parsed.pauli_strings().unwrap(),
            pool.pauli_strings().unwrap()
        );
        assert!(parse_pool("nqubits 2\nY0\n").is_err());
        assert!(parse_pool("nqubits 2\ni Y0\ni Y0\n").is_err());
        assert!(write_pool(&fermionic_pool(2).unwrap()).is_err());
    }
}
