use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, DEFAULT_PRUNE};

use super::{collect, jw_word, spin_down, spin_up};

const SYMMETRY_TOL: f64 = 1e-10;

/// Molecular integrals over `m` real spatial orbitals. The two-electron
/// integrals are stored in chemists' order `(pq|rs)`.
#[derive(Clone, Debug)]
pub struct MolecularHamiltonian {
    n_spatial: usize,
    n_electrons: Option<usize>,
    ms2: i64,
    nuclear_repulsion: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
    // which entries were set explicitly, to detect conflicting images
    one_set: Vec<bool>,
    two_set: Vec<bool>,
}

impl PartialEq for MolecularHamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.n_spatial == other.n_spatial
            && self.n_electrons == other.n_electrons
            && self.ms2 == other.ms2
            && self.nuclear_repulsion == other.nuclear_repulsion
            && self.one_body == other.one_body
            && self.two_body == other.two_body
    }
}

impl MolecularHamiltonian {
    pub fn new(n_spatial: usize) -> Result<Self> {
        if n_spatial == 0 || n_spatial > 32 {
            return Err(Error::invalid(format!(
                "spatial orbital count must be in 1..=32, got {n_spatial}"
            )));
        }
        let m = n_spatial;
        Ok(MolecularHamiltonian {
            n_spatial,
            n_electrons: None,
            ms2: 0,
            nuclear_repulsion: 0.0,
            one_body: vec![0.0; m * m],
            two_body: vec![0.0; m * m * m * m],
            one_set: vec![false; m * m],
            two_set: vec![false; m * m * m * m],
        })
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_electrons(&self) -> Option<usize> {
        self.n_electrons
    }

    pub fn set_n_electrons(&mut self, n: usize) {
        self.n_electrons = Some(n);
    }

    pub fn ms2(&self) -> i64 {
        self.ms2
    }

    pub fn set_ms2(&mut self, ms2: i64) {
        self.ms2 = ms2;
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        self.nuclear_repulsion
    }

    pub fn set_nuclear_repulsion(&mut self, e: f64) {
        self.nuclear_repulsion = e;
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_spatial + q]
    }

    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let m = self.n_spatial;
        ((p * m + q) * m + r) * m + s
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if let Some(&bad) = idx.iter().find(|&&k| k >= self.n_spatial) {
            return Err(Error::invalid(format!(
                "orbital {bad} out of range for {} orbitals",
                self.n_spatial
            )));
        }
        Ok(())
    }

    /// Sets `h_pq` and `h_qp`; conflicting earlier values are an error.
    pub fn set_one_body(&mut self, p: usize, q: usize, value: f64) -> Result<()> {
        self.check_index(&[p, q])?;
        let m = self.n_spatial;
        for k in [p * m + q, q * m + p] {
            if self.one_set[k] && (self.one_body[k] - value).abs() > SYMMETRY_TOL {
                return Err(Error::Symmetry(format!(
                    "h[{p},{q}] = {value} conflicts with stored {}",
                    self.one_body[k]
                )));
            }
            self.one_body[k] = value;
            self.one_set[k] = true;
        }
        Ok(())
    }

    /// Sets `(pq|rs)` and its seven symmetry images.
    pub fn set_two_body(
        &mut self,
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        value: f64,
    ) -> Result<()> {
        self.check_index(&[p, q, r, s])?;
        let images = [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ];
        for (a, b, c, d) in images {
            let k = self.idx4(a, b, c, d);
            if self.two_set[k] && (self.two_body[k] - value).abs() > SYMMETRY_TOL {
                return Err(Error::Symmetry(format!(
                    "({p}{q}|{r}{s}) = {value} conflicts with stored image ({a}{b}|{c}{d}) = {}",
                    self.two_body[k]
                )));
            }
            self.two_body[k] = value;
            self.two_set[k] = true;
        }
        Ok(())
    }

    /// Verifies the index symmetries of the stored arrays.
    pub fn check_symmetry(&self) -> Result<()> {
        let m = self.n_spatial;
        for p in 0..m {
            for q in 0..m {
                if (self.one_body(p, q) - self.one_body(q, p)).abs() > SYMMETRY_TOL {
                    return Err(Error::Symmetry(format!("h[{p},{q}] != h[{q},{p}]")));
                }
                for r in 0..m {
                    for s in 0..m {
                        let v = self.two_body(p, q, r, s);
                        let images = [
                            self.two_body(q, p, r, s),
                            self.two_body(p, q, s, r),
                            self.two_body(r, s, p, q),
                        ];
                        if images.iter().any(|w| (v - w).abs() > SYMMETRY_TOL) {
                            return Err(Error::Symmetry(format!(
                                "({p}{q}|{r}{s}) lacks 8-fold symmetry"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Occupied spin orbitals of the closed-shell reference: the lowest
    /// `NELEC` modes, alternating up and down.
    pub fn hf_occupation(&self) -> Result<Vec<usize>> {
        let n = self
            .n_electrons
            .ok_or_else(|| Error::invalid("electron count (NELEC) is not set"))?;
        if n % 2 != 0 || self.ms2 != 0 {
            return Err(Error::invalid(format!(
                "open-shell reference (NELEC={n}, MS2={}) is not supported",
                self.ms2
            )));
        }
        if n > self.n_qubits() {
            return Err(Error::invalid(format!(
                "{n} electrons do not fit in {} spin orbitals",
                self.n_qubits()
            )));
        }
        Ok((0..n).collect())
    }

    /// Bit string of the reference with qubit 0 on the right.
    pub fn hf_bitstring(&self) -> Result<String> {
        let occ = self.hf_occupation()?;
        Ok((0..self.n_qubits())
            .rev()
            .map(|q| if occ.contains(&q) { '1' } else { '0' })
            .collect())
    }
}

/// `H = E_nuc + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`, mapped by
/// Jordan-Wigner.
pub fn build_molecular_hamiltonian(mol: &MolecularHamiltonian) -> Result<PauliSum> {
    mol.check_symmetry()?;
    let m = mol.n_spatial();
    let n = mol.n_qubits();
    let spin = |k: usize, s: usize| if s == 0 { spin_up(k) } else { spin_down(k) };
    let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
    for p in 0..m {
        for q in 0..m {
            let h = mol.one_body(p, q);
            if h == 0.0 {
                continue;
            }
            for s in 0..2 {
                jw_word(
                    &[(spin(p, s), true), (spin(q, s), false)],
                    n,
                    Complex64::new(h, 0.0),
                    &mut acc,
                );
            }
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let g = mol.two_body(p, q, r, s);
                    if g == 0.0 {
                        continue;
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            let (i, j) = (spin(p, a), spin(r, b));
                            if i == j || spin(s, b) == spin(q, a) {
                                continue;
                            }
                            jw_word(
                                &[
                                    (i, true),
                                    (j, true),
                                    (spin(s, b), false),
                                    (spin(q, a), false),
                                ],
                                n,
                                Complex64::new(0.5 * g, 0.0),
                                &mut acc,
                            );
                        }
                    }
                }
            }
        }
    }
    let mut h = collect(n, acc);
    h.add_term(mol.nuclear_repulsion(), PauliString::identity(n))?;
    h.simplify(DEFAULT_PRUNE);
    if !h.is_hermitian() {
        return Err(Error::NotHermitian(
            "assembled molecular Hamiltonian has anti-Hermitian residue".into(),
        ));
    }
    Ok(h)
}

fn parse_number(token: &str, line: usize, position: usize) -> Result<f64> {
    token
        .replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| Error::parse(line, position, format!("not a number: '{token}'")))
}

fn parse_index(token: &str, line: usize, position: usize) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| Error::parse(line, position, format!("not an orbital index: '{token}'")))
}

/// Reads `KEY=value,...` pairs of the `&FCI ... &END` namelist.
fn parse_header(text: &str, first_line: usize) -> Result<HashMap<String, Vec<String>>> {
    let spaced = text.replace('=', " = ").replace(',', " ");
    let tokens: Vec<&str> = spaced.split_whitespace().collect();
    let mut out: HashMap<String, Vec<String>> = HashMap::new();
    let mut key: Option<String> = None;
    let mut i = 0;
    while i < tokens.len() {
        let t = tokens[i];
        if tokens.get(i + 1) == Some(&"=") {
            key = Some(t.to_ascii_uppercase());
            out.entry(t.to_ascii_uppercase()).or_default();
            i += 2;
            continue;
        }
        match &key {
            Some(k) => out.get_mut(k).expect("key inserted").push(t.to_string()),
            None => {
                return Err(Error::parse(
                    first_line,
                    i + 1,
                    format!("unexpected token '{t}' in header"),
                ))
            }
        }
        i += 1;
    }
    Ok(out)
}

fn header_int(h: &HashMap<String, Vec<String>>, key: &str, line: usize) -> Result<Option<i64>> {
    match h.get(key) {
        None => Ok(None),
        Some(v) => {
            let first = v
                .first()
                .ok_or_else(|| Error::parse(line, 0, format!("{key} has no value")))?;
            first
                .parse::<i64>()
                .map(Some)
                .map_err(|_| Error::parse(line, 0, format!("{key} is not an integer: '{first}'")))
        }
    }
}

/// Parses an FCIDUMP file (1-based indices, chemists' order).
pub fn parse_fcidump(text: &str) -> Result<MolecularHamiltonian> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| l.trim_start().to_ascii_uppercase().starts_with("&FCI"))
        .ok_or_else(|| Error::parse(1, 0, "missing &FCI header"))?;
    let end = (start..lines.len())
        .find(|&i| {
            let u = lines[i].trim().to_ascii_uppercase();
            u.ends_with("&END") || u == "/" || u.ends_with("/")
        })
        .ok_or_else(|| Error::parse(start + 1, 0, "unterminated header (no &END)"))?;
    let mut header_text = lines[start..=end].join(" ");
    let upper = header_text.to_ascii_uppercase();
    let open = upper.find("&FCI").expect("found above") + 4;
    let close = upper
        .rfind("&END")
        .or_else(|| upper.rfind('/'))
        .unwrap_or(upper.len());
    header_text = header_text[open..close.max(open)].to_string();
    let header = parse_header(&header_text, start + 1)?;

    let norb = header_int(&header, "NORB", start + 1)?
        .ok_or_else(|| Error::parse(start + 1, 0, "header lacks NORB"))?;
    let nelec = header_int(&header, "NELEC", start + 1)?
        .ok_or_else(|| Error::parse(start + 1, 0, "header lacks NELEC"))?;
    let ms2 = header_int(&header, "MS2", start + 1)?.unwrap_or(0);
    if norb <= 0 || nelec < 0 {
        return Err(Error::parse(
            start + 1,
            0,
            "NORB and NELEC must be positive",
        ));
    }
    let m = norb as usize;
    let mut mol =
        MolecularHamiltonian::new(m).map_err(|e| Error::parse(start + 1, 0, e.to_string()))?;
    mol.set_n_electrons(nelec as usize);
    mol.set_ms2(ms2);

    for (offset, raw) in lines[end + 1..].iter().enumerate() {
        let line_no = end + 2 + offset;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::parse(
                line_no,
                fields.len().min(5),
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let value = parse_number(fields[0], line_no, 1)?;
        let mut idx = [0usize; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            idx[k] = parse_index(f, line_no, k + 2)?;
            if idx[k] > m {
                return Err(Error::parse(
                    line_no,
                    k + 2,
                    format!("orbital index {} exceeds NORB={m}", idx[k]),
                ));
            }
        }
        let [i, j, k, l] = idx;
        let wrap = |e: Error| match e {
            Error::Symmetry(msg) => Error::Symmetry(format!("line {line_no}: {msg}")),
            other => Error::parse(line_no, 0, other.to_string()),
        };
        match (i, j, k, l) {
            (0, 0, 0, 0) => mol.set_nuclear_repulsion(value),
            (i, j, 0, 0) if i > 0 && j > 0 => {
                mol.set_one_body(i - 1, j - 1, value).map_err(wrap)?
            }
            (i, 0, 0, 0) if i > 0 => {} // orbital energy, not needed
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => mol
                .set_two_body(i - 1, j - 1, k - 1, l - 1, value)
                .map_err(wrap)?,
            _ => {
                return Err(Error::parse(
                    line_no,
                    2,
                    format!("unrecognised index pattern {i} {j} {k} {l}"),
                ))
            }
        }
    }
    Ok(mol)
}

/// Writes an FCIDUMP with one line per unique symmetry image; values use 17
/// significant digits so that a parse reproduces them exactly.
pub fn write_fcidump(mol: &MolecularHamiltonian) -> String {
    let m = mol.n_spatial();
    let mut out = String::new();
    let orbsym = vec!["1"; m].join(",");
    let _ = writeln!(
        out,
        " &FCI NORB={m},NELEC={},MS2={},",
        mol.n_electrons().unwrap_or(0),
        mol.ms2()
    );
    let _ = writeln!(out, "  ORBSYM={orbsym},");
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
    for i in 0..m {
        for j in 0..=i {
            for k in 0..m {
                for l in 0..=k {
                    if pair(i, j) < pair(k, l) {
                        continue;
                    }
                    let v = mol.two_body(i, j, k, l);
                    if v != 0.0 {
                        let _ = writeln!(out, "{v:.16e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..=i {
            let v = mol.one_body(i, j);
            if v != 0.0 {
                let _ = writeln!(out, "{v:.16e} {} {} 0 0", i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, "{:.16e} 0 0 0 0", mol.nuclear_repulsion());
    out
}
