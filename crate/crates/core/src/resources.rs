//! CNOT counting for Pauli exponentials and built ansätze, and the
//! closed-form and enumerated averages for spin-adapted fermionic doubles.
//!
//! Averages follow the per-term counting model: a fermionic term
//! `a†_i a†_j a_k a_l − h.c.` on four distinct spin orbitals counts 8 Pauli
//! strings, one with a repeated spin orbital counts 2, and its Z-chain length
//! is the number of orbitals strictly inside the two outer index intervals of
//! its sorted spatial indices, counted as if all orbitals had the same spin.
//! The exact Jordan-Wigner string count is reported alongside.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::adapt::AnsatzElement;
use crate::error::{Error, Result};
use crate::fermion::{jw_word, spin_adapted_doubles, FermionOperator};
use crate::pauli::{PauliString, PauliSum, DEFAULT_PRUNE};

pub type Rational = Ratio<i128>;

/// CNOTs in the staircase circuit for `exp(θ·iP)`: `2(w − 1)` for weight `w`.
/// The identity costs nothing.
pub fn cnot_count_pauli_exp(p: &PauliString) -> usize {
    2 * p.weight().saturating_sub(1)
}

/// CNOTs for the first-order Trotter product over the terms of a generator.
pub fn cnot_count_generator(g: &PauliSum) -> usize {
    g.iter().map(|(_, p)| cnot_count_pauli_exp(p)).sum()
}

/// Total CNOTs to prepare the ansatz state.
pub fn ansatz_cnot_count(ansatz: &[AnsatzElement]) -> usize {
    ansatz.iter().map(|e| e.operator.cnot_cost).sum()
}

fn check_m(m: usize, max: usize) -> Result<()> {
    if m < 2 || m > max {
        return Err(Error::invalid(format!(
            "spatial orbital count must lie in 2..={max}, got {m}"
        )));
    }
    Ok(())
}

/// The three averages as exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Averages {
    /// Fermionic terms per spin-adapted double.
    pub n_spin: Rational,
    /// Pauli strings per fermionic term.
    pub n_pauli: Rational,
    /// Z-chain length per fermionic term.
    pub n_z: Rational,
}

impl Averages {
    /// `N̄_Pauli (6 + 2 N̄_Z) N̄_spin`.
    pub fn cnots_per_param(&self) -> Rational {
        self.n_pauli * (Rational::from(6) + Rational::from(2) * self.n_z) * self.n_spin
    }

    pub fn as_f64(&self) -> (f64, f64, f64) {
        (to_f64(self.n_spin), to_f64(self.n_pauli), to_f64(self.n_z))
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Closed forms of the averages for `m` spatial orbitals.
pub fn closed_form_averages(m: usize) -> Result<Averages> {
    check_m(m, 10_000)?;
    let m = m as i128;
    let (m2, m3) = (m * m, m * m * m);
    Ok(Averages {
        n_spin: Rational::new(5 * m2 - m - 8, m2 + m),
        n_pauli: Rational::new(
            8 * (5 * m3 - 15 * m2 + 14 * m - 4),
            5 * m3 - 6 * m2 - 7 * m + 8,
        ),
        n_z: Rational::new(12 * m3 - 30 * m2 + 34 * m - 20, 3 * (5 * m2 - m - 8)),
    })
}

pub fn cnots_per_param(m: usize) -> Result<f64> {
    Ok(to_f64(closed_form_averages(m)?.cnots_per_param()))
}

/// `n_params` times the per-parameter estimate.
pub fn estimate_total_cnots(m: usize, n_params: usize) -> Result<f64> {
    Ok(n_params as f64 * cnots_per_param(m)?)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroupCounts {
    pub combinations: u64,
    pub spin_groups: u64,
    pub fermi_ops: u64,
    pub pauli_strings: u64,
    pub z_length: u64,
}

impl std::ops::AddAssign for GroupCounts {
    fn add_assign(&mut self, o: GroupCounts) {
        self.combinations += o.combinations;
        self.spin_groups += o.spin_groups;
        self.fermi_ops += o.fermi_ops;
        self.pauli_strings += o.pauli_strings;
        self.z_length += o.z_length;
    }
}

impl GroupCounts {
    pub fn averages(&self) -> Averages {
        let fermi = self.fermi_ops as i128;
        Averages {
            n_spin: Rational::new(fermi, self.spin_groups as i128),
            n_pauli: Rational::new(self.pauli_strings as i128, fermi),
            n_z: Rational::new(self.z_length as i128, fermi),
        }
    }
}

fn binom(n: i128, k: i128) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn exact_int(r: Rational) -> u64 {
    assert!(r.is_integer(), "closed form {r} is not an integer");
    r.to_integer() as u64
}

/// The per-group table in closed form, groups 1 to 5.
pub fn closed_form_table(m: usize) -> Result<[GroupCounts; 5]> {
    check_m(m, 10_000)?;
    let mi = m as i128;
    let q = |n: i128, d: i128| exact_int(Rational::new(n, d));
    let g1 = binom(mi, 2) * binom(mi - 2, 2) / 2;
    let g2 = mi * binom(mi - 1, 2);
    let g4 = 2 * binom(mi, 2);
    let g5 = binom(mi, 2);
    let cubic = mi * (mi.pow(3) - 4 * mi.pow(2) + 5 * mi - 2);
    let u = |x: i128| x as u64;
    Ok([
        GroupCounts {
            combinations: u(g1),
            spin_groups: u(2 * g1),
            fermi_ops: u(10 * g1),
            pauli_strings: u(80 * g1),
            z_length: q(
                mi * (2 * mi.pow(4) - 15 * mi.pow(3) + 40 * mi.pow(2) - 45 * mi + 18),
                2,
            ),
        },
        GroupCounts {
            combinations: u(g2),
            spin_groups: u(2 * g2),
            fermi_ops: u(10 * g2),
            pauli_strings: u(44 * g2),
            z_length: q(10 * cubic, 3),
        },
        GroupCounts {
            combinations: u(g2),
            spin_groups: u(g2),
            fermi_ops: u(2 * g2),
            pauli_strings: u(16 * g2),
            z_length: q(2 * cubic, 3),
        },
        GroupCounts {
            combinations: u(g4),
            spin_groups: u(g4),
            fermi_ops: u(2 * g4),
            pauli_strings: u(4 * g4),
            z_length: q(2 * mi * (2 * mi * mi - 3 * mi + 1), 3),
        },
        GroupCounts {
            combinations: u(g5),
            spin_groups: u(g5),
            fermi_ops: u(g5),
            pauli_strings: u(8 * g5),
            z_length: 0,
        },
    ])
}

/// Enumerated counts with the model columns and exact Jordan-Wigner string
/// counts per group.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionicCountReport {
    pub m: usize,
    pub groups: [GroupCounts; 5],
    /// Exact strings summed over each `term − h.c.` image, per group.
    pub exact_term_strings: [u64; 5],
    /// Exact strings in each whole generator image, per group.
    pub exact_generator_strings: [u64; 5],
}

impl FermionicCountReport {
    pub const CSV_HEADER: &'static str =
        "group,combinations,spin_groups,fermi_ops,pauli_strings,z_length,exact_term_strings,exact_generator_strings";

    pub fn totals(&self) -> GroupCounts {
        let mut t = GroupCounts::default();
        for g in self.groups {
            t += g;
        }
        t
    }

    pub fn averages(&self) -> Averages {
        self.totals().averages()
    }

    pub fn cnots_per_param(&self) -> f64 {
        to_f64(self.averages().cnots_per_param())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let row = |out: &mut String, name: &str, g: GroupCounts, a: u64, b: u64| {
            let _ = writeln!(
                out,
                "{name},{},{},{},{},{},{a},{b}",
                g.combinations, g.spin_groups, g.fermi_ops, g.pauli_strings, g.z_length
            );
        };
        for (i, g) in self.groups.iter().enumerate() {
            row(
                &mut out,
                &(i + 1).to_string(),
                *g,
                self.exact_term_strings[i],
                self.exact_generator_strings[i],
            );
        }
        row(
            &mut out,
            "total",
            self.totals(),
            self.exact_term_strings.iter().sum(),
            self.exact_generator_strings.iter().sum(),
        );
        out
    }
}

fn gap(a: usize, b: usize) -> u64 {
    if a == b {
        0
    } else {
        (2 * (b - a) - 1) as u64
    }
}

fn exact_strings(op: &FermionOperator, n: usize) -> u64 {
    let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
    for (c, ops) in &op.anti_hermitian_part().terms {
        jw_word(ops, n, Complex64::new(*c, 0.0), &mut acc);
    }
    acc.values().filter(|c| c.norm() > DEFAULT_PRUNE).count() as u64
}

/// Enumerates every spin-adapted double on `m` spatial orbitals.
pub fn brute_force_counts(m: usize) -> Result<FermionicCountReport> {
    check_m(m, 8)?;
    let n = 2 * m;
    let mut groups = [GroupCounts::default(); 5];
    let mut exact_term_strings = [0u64; 5];
    let mut exact_generator_strings = [0u64; 5];
    let mut combos: [BTreeSet<Vec<usize>>; 5] = Default::default();
    for exc in spin_adapted_doubles(m) {
        let g = usize::from(exc.group) - 1;
        combos[g].insert(exc.spatial.clone());
        groups[g].spin_groups += 1;
        exact_generator_strings[g] += exc.jordan_wigner(n)?.len() as u64;
        for (c, ops) in &exc.forward.terms {
            let modes: BTreeSet<usize> = ops.iter().map(|o| o.0).collect();
            groups[g].fermi_ops += 1;
            groups[g].pauli_strings += if modes.len() == 4 { 8 } else { 2 };
            let mut spatial: Vec<usize> = ops.iter().map(|o| o.0 / 2).collect();
            spatial.sort_unstable();
            groups[g].z_length += gap(spatial[0], spatial[1]) + gap(spatial[2], spatial[3]);
            let term = FermionOperator::from_terms(vec![(*c, ops.clone())]);
            exact_term_strings[g] += exact_strings(&term, n);
        }
    }
    for (g, set) in combos.iter().enumerate() {
        groups[g].combinations = set.len() as u64;
    }
    Ok(FermionicCountReport {
        m,
        groups,
        exact_term_strings,
        exact_generator_strings,
    })
}
