//! Symplectic Pauli algebra.
//!
//! A [`PauliString`] on `n` qubits is stored as two bit masks plus a power of
//! `i`. Bit `k` of `x` is set for X or Y on qubit `k`, bit `k` of `z` for Z or
//! Y. The operator is `i^phase * P_{n-1} ⊗ ... ⊗ P_0` where each `P_k` is the
//! literal Pauli matrix (Y is Y, not XZ). Qubit 0 is the rightmost tensor
//! factor and the least significant bit of a basis index.
//!
//! [`PauliSum`] is a real linear combination of strings whose phase is either
//! 0 (Hermitian term) or 1 (anti-Hermitian term `iP`), which is enough to hold
//! any operator with complex coefficients exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest register a mask-based string can describe.
pub const MAX_QUBITS: usize = 64;

/// Default pruning threshold for [`PauliSum::simplify`].
pub const DEFAULT_PRUNE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: u8,
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&n_qubits),
            "bad qubit count {n_qubits}"
        );
        PauliString {
            n_qubits,
            x: 0,
            z: 0,
            phase: 0,
        }
    }

    /// Builds a string from raw masks. Bits at or above `n_qubits` are rejected.
    pub fn from_masks(n_qubits: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        check_width(n_qubits)?;
        let mask = full_mask(n_qubits);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::invalid(format!(
                "mask has bits beyond qubit {}",
                n_qubits - 1
            )));
        }
        Ok(PauliString {
            n_qubits,
            x,
            z,
            phase: phase & 3,
        })
    }

    /// Builds a string from `(qubit, letter)` pairs; identity letters are ignored.
    pub fn from_paulis(n_qubits: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        check_width(n_qubits)?;
        let mut p = PauliString::identity(n_qubits);
        for &(q, letter) in factors {
            if q >= n_qubits {
                return Err(Error::invalid(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            let bit = 1u64 << q;
            if (p.x | p.z) & bit != 0 {
                return Err(Error::invalid(format!("qubit {q} listed twice")));
            }
            match letter {
                Pauli::I => {}
                Pauli::X => p.x |= bit,
                Pauli::Y => {
                    p.x |= bit;
                    p.z |= bit
                }
                Pauli::Z => p.z |= bit,
            }
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase_power(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(self, phase: u8) -> Self {
        PauliString {
            phase: phase & 3,
            ..self
        }
    }

    /// The same Pauli letters with phase 0.
    pub fn hermitian_part(self) -> Self {
        self.with_phase(0)
    }

    /// `i` times the phase-free letters: the canonical anti-Hermitian generator.
    pub fn as_generator(self) -> Self {
        self.with_phase(1)
    }

    pub fn pauli_at(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit;
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.phase % 2 == 1
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn y_count(&self) -> usize {
        (self.x & self.z).count_ones() as usize
    }

    pub fn y_parity(&self) -> Parity {
        if self.y_count() % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(&self) -> bool {
        self.y_parity() == Parity::Odd
    }

    /// Same-letter equality, ignoring the phase.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n_qubits == other.n_qubits && self.x == other.x && self.z == other.z
    }

    fn check_same_width(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }

    /// True when the two strings commute (even symplectic product).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (other.x & self.z).count_ones()).is_multiple_of(2)
    }

    /// Operator product `self * other` with the phase tracked exactly.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_same_width(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        let (xa, za, xb, zb) = (self.x, self.z, other.x, other.z);
        // cyclic products XY, YZ, ZX give +i; the reverse order gives -i
        let plus = (xa & !za & xb & zb) | (xa & za & !xb & zb) | (!xa & za & xb & !zb);
        let minus = (xa & za & xb & !zb) | (!xa & za & xb & zb) | (xa & !za & !xb & zb);
        let phase = (self.phase as i64 + other.phase as i64 + plus.count_ones() as i64
            - minus.count_ones() as i64)
            .rem_euclid(4) as u8;
        PauliString {
            n_qubits: self.n_qubits,
            x: xa ^ xb,
            z: za ^ zb,
            phase,
        }
    }

    /// `None` when the strings commute; otherwise `a·b`, which equals `[a, b] / 2`.
    pub fn commutator(&self, other: &PauliString) -> Result<Option<PauliString>> {
        self.check_same_width(other)?;
        if self.commutes_with(other) {
            Ok(None)
        } else {
            Ok(Some(self.mul_unchecked(other)))
        }
    }

    /// Hermitian adjoint: the letters are Hermitian, so only the phase conjugates.
    pub fn adjoint(&self) -> PauliString {
        self.with_phase((4 - self.phase) % 4)
    }

    /// Drops every Z factor, leaving X and Y factors in place.
    pub fn strip_z(&self) -> PauliString {
        PauliString {
            z: self.z & self.x,
            ..*self
        }
    }

    /// Swaps X and Y on every site (the global-rotation partner of a string).
    pub fn swap_xy(&self) -> PauliString {
        PauliString {
            z: self.z ^ self.x,
            ..*self
        }
    }

    /// Parses the token grammar: optional leading `i` (or `-`, `-i`) and then
    /// whitespace-separated `<letter><index>` tokens with letters X, Y, Z.
    pub fn parse(text: &str, n_qubits: usize) -> Result<PauliString> {
        parse_tokens(text, n_qubits, 1)
    }

    /// Canonical token form, ascending qubit index, e.g. `i X0 Y3`. The
    /// identity with phase 0 formats as an empty string.
    pub fn format(&self) -> String {
        let mut out = String::new();
        match self.phase {
            0 => {}
            1 => out.push('i'),
            2 => out.push('-'),
            _ => out.push_str("-i"),
        }
        for q in 0..self.n_qubits {
            let p = self.pauli_at(q);
            if p != Pauli::I {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push(p.letter());
                out.push_str(&q.to_string());
            }
        }
        out
    }

    /// Dense label with qubit `n-1` on the left, e.g. `ZYI` for Z2 Y1.
    pub fn label(&self) -> String {
        (0..self.n_qubits)
            .rev()
            .map(|q| self.pauli_at(q).letter())
            .collect()
    }

    /// `i^phase` as a complex number.
    pub fn phase_factor(&self) -> Complex64 {
        i_pow(self.phase)
    }
}

pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.format();
        if s.is_empty() {
            write!(f, "I")
        } else if self.is_identity() {
            write!(f, "{s} I")
        } else {
            write!(f, "{s}")
        }
    }
}

pub(crate) fn parse_tokens(text: &str, n_qubits: usize, line: usize) -> Result<PauliString> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::parse(
            line,
            0,
            format!("unsupported qubit count {n_qubits}"),
        ));
    }
    let mut p = PauliString::identity(n_qubits);
    for (pos, token) in text.split_whitespace().enumerate() {
        let position = pos + 1;
        if pos == 0 {
            let phase = match token {
                "i" => Some(1),
                "-" => Some(2),
                "-i" => Some(3),
                _ => None,
            };
            if let Some(phase) = phase {
                p.phase = phase;
                continue;
            }
        }
        let mut chars = token.chars();
        let letter = chars.next().unwrap();
        let bits = match letter {
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => {
                return Err(Error::parse(
                    line,
                    position,
                    format!("unknown Pauli letter in token '{token}'"),
                ))
            }
        };
        let index_text = chars.as_str();
        let q: usize = index_text.parse().map_err(|_| {
            Error::parse(
                line,
                position,
                format!("bad qubit index in token '{token}'"),
            )
        })?;
        if q >= n_qubits {
            return Err(Error::parse(
                line,
                position,
                format!("qubit index {q} out of range for {n_qubits} qubits"),
            ));
        }
        let bit = 1u64 << q;
        if (p.x | p.z) & bit != 0 {
            return Err(Error::parse(
                line,
                position,
                format!("duplicate qubit index {q}"),
            ));
        }
        if bits.0 {
            p.x |= bit;
        }
        if bits.1 {
            p.z |= bit;
        }
    }
    Ok(p)
}

/// `2^(n-1) (2^n - 1)`: the number of n-qubit strings with an odd number of Y.
pub fn count_odd_strings(n: usize) -> Result<u64> {
    if n == 0 || n > 16 {
        return Err(Error::invalid(format!(
            "odd-string count supported for 1 <= n <= 16, got {n}"
        )));
    }
    Ok((1u64 << (n - 1)) * ((1u64 << n) - 1))
}

/// Every phase-free n-qubit string, in mask order (x outer, z inner).
pub fn all_strings(n: usize) -> impl Iterator<Item = PauliString> {
    assert!((1..=16).contains(&n), "enumeration limited to 16 qubits");
    let dim = 1u64 << n;
    (0..dim).flat_map(move |x| {
        (0..dim).map(move |z| PauliString {
            n_qubits: n,
            x,
            z,
            phase: 0,
        })
    })
}

/// Every phase-free string with an odd number of Y factors.
pub fn odd_strings(n: usize) -> impl Iterator<Item = PauliString> {
    all_strings(n).filter(PauliString::is_odd)
}

/// Every phase-free string with an even number of Y factors, identity included.
pub fn even_strings(n: usize) -> impl Iterator<Item = PauliString> {
    all_strings(n).filter(|p| !p.is_odd())
}

/// A real Hermitian operator with a coefficient drawn from `U[-scale, scale]`
/// on every even-Y string, identity excluded. Even-Y strings are exactly the
/// real symmetric Pauli strings.
pub fn random_real_hamiltonian(n: usize, scale: f64, seed: u64) -> Result<PauliSum> {
    if n == 0 || n > 10 {
        return Err(Error::invalid(format!(
            "random Hamiltonians support 1..=10 qubits, got {n}"
        )));
    }
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::invalid("coefficient scale must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-scale, scale).expect("finite positive scale");
    let terms = even_strings(n)
        .filter(|p| !p.is_identity())
        .map(|p| (dist.sample(&mut rng), p));
    PauliSum::from_terms(n, terms)
}

/// Real combination of Pauli strings. Keys carry phase 0 (Hermitian term) or
/// phase 1 (anti-Hermitian term).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&n_qubits),
            "bad qubit count {n_qubits}"
        );
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut sum = PauliSum::new(n_qubits);
        for (c, p) in terms {
            sum.add_term(c, p)?;
        }
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in key order as `(coefficient, string)`; strings carry phase 0 or 1.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &PauliString)> + '_ {
        self.terms.iter().map(|(p, &c)| (c, p))
    }

    pub fn coefficient(&self, p: &PauliString) -> f64 {
        let (key, sign) = normalize_key(*p);
        self.terms.get(&key).map_or(0.0, |c| sign * c)
    }

    /// Adds `coeff * p`, folding the phase of `p` into the stored sign.
    pub fn add_term(&mut self, coeff: f64, p: PauliString) -> Result<()> {
        if p.n_qubits != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: p.n_qubits,
            });
        }
        self.accumulate(coeff, p);
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, coeff: f64, p: PauliString) {
        if coeff == 0.0 {
            return;
        }
        let (key, sign) = normalize_key(p);
        *self.terms.entry(key).or_insert(0.0) += sign * coeff;
    }

    /// Adds `c * p` for complex `c` by splitting into real and imaginary parts.
    pub fn add_complex(&mut self, c: Complex64, p: PauliString) -> Result<()> {
        self.add_term(c.re, p)?;
        self.add_term(
            c.im,
            p.mul_unchecked(&PauliString::identity(p.n_qubits).with_phase(1)),
        )
    }

    /// Removes terms with `|c| <= threshold`.
    pub fn simplify(&mut self, threshold: f64) {
        self.terms.retain(|_, c| c.abs() > threshold);
    }

    pub fn simplified(mut self) -> Self {
        self.simplify(DEFAULT_PRUNE);
        self
    }

    pub fn scale(&self, factor: f64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(p, c)| (*p, c * factor)).collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = self.clone();
        for (c, p) in other.iter() {
            out.accumulate(c, *p);
        }
        Ok(out.simplified())
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = PauliSum::new(self.n_qubits);
        for (ca, pa) in self.iter() {
            for (cb, pb) in other.iter() {
                out.accumulate(ca * cb, pa.mul_unchecked(pb));
            }
        }
        Ok(out.simplified())
    }

    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.sub(&ba)
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits);
        for (c, p) in self.iter() {
            out.accumulate(c, p.adjoint());
        }
        out
    }

    /// Every stored term is Hermitian (phase 0). Empty sums count as Hermitian.
    pub fn is_hermitian(&self) -> bool {
        self.terms.keys().all(|p| p.phase == 0)
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.terms.keys().all(|p| p.phase == 1)
    }

    /// Sum of absolute coefficients; an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Coefficient of the identity (phase 0) term.
    pub fn constant(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.n_qubits))
    }

    fn check(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }
}

/// Splits a string with arbitrary phase into a phase-0/1 key and a sign.
fn normalize_key(p: PauliString) -> (PauliString, f64) {
    match p.phase {
        0 => (p, 1.0),
        1 => (p, 1.0),
        2 => (p.with_phase(0), -1.0),
        _ => (p.with_phase(1), -1.0),
    }
}

impl From<PauliString> for PauliSum {
    fn from(p: PauliString) -> Self {
        let mut s = PauliSum::new(p.n_qubits);
        s.accumulate(1.0, p);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_pauli, mat_approx_eq};

    fn ps(text: &str, n: usize) -> PauliString {
        PauliString::parse(text, n).unwrap()
    }

    #[test]
    fn x_times_y_is_iz() {
        let p = ps("X0", 1).multiply(&ps("Y0", 1)).unwrap();
        assert_eq!(p, ps("i Z0", 1));
        assert_eq!(p.phase_power(), 1);
        assert_eq!(p.z_mask(), 1);
        assert_eq!(p.x_mask(), 0);
    }

    #[test]
    fn x_squared_is_identity() {
        let p = ps("X0", 1).multiply(&ps("X0", 1)).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.phase_power(), 0);
    }

    #[test]
    fn product_matches_dense_for_three_qubits() {
        // (iY2) (Z2 Y1)
        let a = ps("i Y2", 3);
        let b = ps("Y1 Z2", 3);
        let c = a.multiply(&b).unwrap();
        let dense = &dense_pauli(&a) * &dense_pauli(&b);
        assert!(mat_approx_eq(&dense_pauli(&c), &dense, 1e-14));
        // Y·Z = iX on qubit 2, then overall i·i = -1
        assert_eq!(c.format(), "- Y1 X2");
    }

    #[test]
    fn commutator_examples() {
        let c = ps("X0", 1).commutator(&ps("Y0", 1)).unwrap().unwrap();
        assert_eq!(c, ps("i Z0", 1));
        assert!(ps("Z0", 2).commutator(&ps("Z1", 2)).unwrap().is_none());
        // [iZ2Y1, iY2] on three qubits
        let a = ps("i Y1 Z2", 3);
        let b = ps("i Y2", 3);
        let c = a.commutator(&b).unwrap().unwrap();
        let da = dense_pauli(&a);
        let db = dense_pauli(&b);
        let comm = &da * &db - &db * &da;
        assert!(mat_approx_eq(
            &(dense_pauli(&c) * Complex64::new(2.0, 0.0)),
            &comm,
            1e-14
        ));
        assert!(c.is_anti_hermitian() && c.is_odd());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = ps("X0", 1).multiply(&ps("X0", 2)).unwrap_err();
        assert_eq!(
            err,
            Error::Dimension {
                expected: 1,
                found: 2
            }
        );
        assert!(ps("X0", 1).commutator(&ps("X0", 2)).is_err());
    }

    #[test]
    fn parity_and_weight() {
        assert_eq!(ps("X0 Y1 Y2 Y3", 4).y_parity(), Parity::Odd);
        assert_eq!(PauliString::identity(3).y_parity(), Parity::Even);
        assert_eq!(ps("Y0 Y1", 2).y_parity(), Parity::Even);
        assert_eq!(ps("Y0", 1).weight(), 1);
        assert_eq!(ps("X0 Y1 Z2", 3).weight(), 3);
    }

    #[test]
    fn parse_examples() {
        let p = ps("X0 Y3", 4);
        assert_eq!(p.x_mask(), 0b1001);
        assert_eq!(p.z_mask(), 0b1000);
        let g = ps("i Y1", 2);
        assert!(g.is_anti_hermitian());
        assert_eq!(PauliString::parse("", 3).unwrap(), PauliString::identity(3));
    }

    #[test]
    fn parse_errors_carry_position() {
        match PauliString::parse("Q5", 6).unwrap_err() {
            Error::Parse { position, .. } => assert_eq!(position, 1),
            e => panic!("unexpected {e:?}"),
        }
        match PauliString::parse("X0 Z0", 2).unwrap_err() {
            Error::Parse {
                position, message, ..
            } => {
                assert_eq!(position, 2);
                assert!(message.contains("duplicate"));
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(PauliString::parse("X4", 4).is_err());
        assert!(PauliString::parse("Xa", 4).is_err());
        assert!(PauliString::parse("X0 i", 4).is_err());
    }

    #[test]
    fn format_canonicalizes_order() {
        assert_eq!(ps("Z3 X0 Y1", 4).format(), "X0 Y1 Z3");
        assert_eq!(ps("i Y2 Z0", 3).label(), "YIZ");
    }

    #[test]
    fn strip_z_and_swap_xy() {
        assert_eq!(ps("i Y0 Z1 Z2", 3).strip_z(), ps("i Y0", 3));
        assert_eq!(ps("X0 Y1 Y2 Y3", 4).swap_xy(), ps("Y0 X1 X2 X3", 4));
        assert_eq!(ps("Z0 X1", 2).swap_xy(), ps("Z0 Y1", 2));
    }

    #[test]
    fn odd_counts_small() {
        assert_eq!(count_odd_strings(1).unwrap(), 1);
        assert_eq!(count_odd_strings(2).unwrap(), 6);
        assert_eq!(count_odd_strings(3).unwrap(), 28);
        assert!(count_odd_strings(17).is_err());
        assert!(count_odd_strings(0).is_err());
    }

    #[test]
    fn sum_folds_phases() {
        let mut s = PauliSum::new(2);
        s.add_term(0.5, ps("X0", 2)).unwrap();
        s.add_term(0.5, ps("- X0", 2)).unwrap();
        s.add_term(2.0, ps("-i Y1", 2)).unwrap();
        s.simplify(DEFAULT_PRUNE);
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&ps("i Y1", 2)), -2.0);
        assert!(s.is_anti_hermitian());
        assert!(!s.is_hermitian());
    }

    #[test]
    fn sum_product_matches_dense() {
        let a = PauliSum::from_terms(2, [(0.5, ps("X0", 2)), (-1.5, ps("i Y0 Z1", 2))]).unwrap();
        let b = PauliSum::from_terms(2, [(2.0, ps("Z0", 2)), (0.25, ps("Y1", 2))]).unwrap();
        let prod = a.multiply(&b).unwrap();
        let lhs = crate::oracle::dense_sum(&prod);
        let rhs = crate::oracle::dense_sum(&a) * crate::oracle::dense_sum(&b);
        assert!(mat_approx_eq(&lhs, &rhs, 1e-13));
    }
}
