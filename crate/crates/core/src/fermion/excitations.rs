use std::fmt;

use crate::error::Result;
use crate::pauli::PauliSum;

use super::{spin_down as dn, spin_up as up, FermionOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExcitationKind {
    Single,
    Triplet,
    Singlet,
}

/// One normal-ordered double `a†_i a†_j a_k a_l` with `i < j`, `k < l`.
type Quad = [usize; 4];

/// A spin-adapted generator, stored as its forward terms `Σ c_t T_t`; the
/// generator itself is `Σ c_t (T_t − T_t†)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinAdaptedExcitation {
    pub kind: ExcitationKind,
    /// 0 for singles, 1..=5 for the double-excitation orbital groups.
    pub group: u8,
    /// Spatial orbitals `(a, b)` for singles, `(p, q, r, s)` for doubles.
    pub spatial: Vec<usize>,
    /// Forward terms with a unit-norm coefficient vector.
    pub forward: FermionOperator,
}

impl SpinAdaptedExcitation {
    pub fn label(&self) -> String {
        let idx: Vec<String> = self.spatial.iter().map(|k| k.to_string()).collect();
        let head = match self.kind {
            ExcitationKind::Single => "s".to_string(),
            ExcitationKind::Triplet => format!("d{}t", self.group),
            ExcitationKind::Singlet => format!("d{}s", self.group),
        };
        format!("{head}_{}", idx.join("_"))
    }

    /// The anti-Hermitian generator.
    pub fn generator(&self) -> FermionOperator {
        self.forward.anti_hermitian_part()
    }

    pub fn jordan_wigner(&self, n_modes: usize) -> Result<PauliSum> {
        self.generator().jordan_wigner(n_modes)
    }

    pub fn n_terms(&self) -> usize {
        self.forward.len()
    }
}

impl fmt::Display for SpinAdaptedExcitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One singlet-adapted single per unordered spatial pair `a < b`.
pub fn spin_adapted_singles(m: usize) -> Vec<SpinAdaptedExcitation> {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let forward = FermionOperator::from_terms(vec![
                (c, vec![(up(a), true), (up(b), false)]),
                (c, vec![(dn(a), true), (dn(b), false)]),
            ]);
            out.push(SpinAdaptedExcitation {
                kind: ExcitationKind::Single,
                group: 0,
                spatial: vec![a, b],
                forward,
            });
        }
    }
    out
}

/// Brings `a†_i a†_j a_k a_l` to `i < j`, `k < l`; `None` if it vanishes.
pub fn canonical_double(i: usize, j: usize, k: usize, l: usize) -> Option<(f64, Quad)> {
    if i == j || k == l {
        return None;
    }
    let mut sign = 1.0;
    let mut quad = [i, j, k, l];
    if i > j {
        quad.swap(0, 1);
        sign = -sign;
    }
    if k > l {
        quad.swap(2, 3);
        sign = -sign;
    }
    Some((sign, quad))
}

#[derive(Default)]
struct TermBuilder {
    terms: Vec<(f64, Quad)>,
}

impl TermBuilder {
    fn add(&mut self, c: f64, (i, j, k, l): (usize, usize, usize, usize)) {
        let Some((sign, quad)) = canonical_double(i, j, k, l) else {
            return;
        };
        match self.terms.iter_mut().find(|t| t.1 == quad) {
            Some(t) => t.0 += sign * c,
            None => self.terms.push((sign * c, quad)),
        }
    }

    fn finish(self) -> FermionOperator {
        let kept: Vec<(f64, Quad)> = self
            .terms
            .into_iter()
            .filter(|t| t.0.abs() > 1e-12)
            .collect();
        let norm = kept.iter().map(|t| t.0 * t.0).sum::<f64>().sqrt();
        FermionOperator::from_terms(
            kept.into_iter()
                .map(|(c, [i, j, k, l])| {
                    (c / norm, vec![(i, true), (j, true), (k, false), (l, false)])
                })
                .collect(),
        )
    }
}

/// `|T⟩_pq ⟨T|_rs − h.c.` summed over the three triplet components.
fn triplet(p: usize, q: usize, r: usize, s: usize) -> FermionOperator {
    let mut b = TermBuilder::default();
    b.add(1.0, (up(p), up(q), up(r), up(s)));
    b.add(0.5, (up(p), dn(q), up(r), dn(s)));
    b.add(0.5, (up(p), dn(q), dn(r), up(s)));
    b.add(0.5, (dn(p), up(q), up(r), dn(s)));
    b.add(0.5, (dn(p), up(q), dn(r), up(s)));
    b.add(1.0, (dn(p), dn(q), dn(r), dn(s)));
    b.finish()
}

/// `|S⟩_pq ⟨S|_rs − h.c.`.
fn singlet(p: usize, q: usize, r: usize, s: usize) -> FermionOperator {
    let mut b = TermBuilder::default();
    b.add(0.5, (up(p), dn(q), up(r), dn(s)));
    b.add(-0.5, (up(p), dn(q), dn(r), up(s)));
    b.add(-0.5, (dn(p), up(q), up(r), dn(s)));
    b.add(0.5, (dn(p), up(q), dn(r), up(s)));
    b.finish()
}

/// Spin-adapted doubles over all five spatial-index groups, generalized (no
/// occupied/virtual split). Count: `m²(m²−1)/4`.
pub fn spin_adapted_doubles(m: usize) -> Vec<SpinAdaptedExcitation> {
    let mut out = Vec::new();
    let mut push = |kind, group, spatial: [usize; 4]| {
        let [p, q, r, s] = spatial;
        let forward = match kind {
            ExcitationKind::Triplet => triplet(p, q, r, s),
            _ => singlet(p, q, r, s),
        };
        if !forward.is_empty() {
            out.push(SpinAdaptedExcitation {
                kind,
                group,
                spatial: spatial.to_vec(),
                forward,
            });
        }
    };
    use ExcitationKind::{Singlet, Triplet};

    // group 1: four distinct orbitals, three pairings
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                for d in c + 1..m {
                    for pairing in [[a, b, c, d], [a, c, b, d], [a, d, b, c]] {
                        push(Triplet, 1, pairing);
                        push(Singlet, 1, pairing);
                    }
                }
            }
        }
    }
    // group 2: one orbital shared between the pairs
    for q in 0..m {
        for p in 0..m {
            for s in p + 1..m {
                if p == q || s == q {
                    continue;
                }
                push(Triplet, 2, [p, q, q, s]);
                push(Singlet, 2, [p, q, q, s]);
            }
        }
    }
    // group 3: doubly occupied pair into two distinct orbitals
    for q in 0..m {
        for p in 0..m {
            for s in p + 1..m {
                if p == q || s == q {
                    continue;
                }
                push(Singlet, 3, [q, q, p, s]);
            }
        }
    }
    // group 4: three equal indices
    for p in 0..m {
        for s in 0..m {
            if s != p {
                push(Singlet, 4, [p, p, p, s]);
            }
        }
    }
    // group 5: pair to pair
    for p in 0..m {
        for r in p + 1..m {
            push(Singlet, 5, [p, p, r, r]);
        }
    }
    out
}
