//! Plain-text Pauli Hamiltonians:
//!
//! ```text
//! # comment
//! nqubits 2
//! -1.0 Z0
//! 0.5 X0 X1
//! 0.25
//! ```
//!
//! A line with only a coefficient is an identity term.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pauli::{parse_tokens, PauliString, PauliSum};

pub fn parse_pauli_hamiltonian(text: &str) -> Result<PauliSum> {
    let mut n_qubits: Option<usize> = None;
    let mut sum: Option<PauliSum> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(n) = n_qubits else {
            let mut fields = line.split_whitespace();
            if fields.next() != Some("nqubits") {
                return Err(Error::parse(
                    line_no,
                    1,
                    "first data line must be 'nqubits <n>'",
                ));
            }
            let n: usize = fields
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(line_no, 2, "invalid qubit count"))?;
            if fields.next().is_some() {
                return Err(Error::parse(
                    line_no,
                    3,
                    "trailing tokens after qubit count",
                ));
            }
            if n == 0 || n > crate::pauli::MAX_QUBITS {
                return Err(Error::parse(
                    line_no,
                    2,
                    format!("unsupported qubit count {n}"),
                ));
            }
            n_qubits = Some(n);
            sum = Some(PauliSum::new(n));
            continue;
        };
        let (coef_text, rest) = match line.split_once(char::is_whitespace) {
            Some((c, r)) => (c, r),
            None => (line, ""),
        };
        let coeff: f64 = coef_text
            .parse()
            .map_err(|_| Error::parse(line_no, 1, format!("invalid coefficient '{coef_text}'")))?;
        let p = parse_tokens(rest, n, line_no).map_err(|e| match e {
            Error::Parse {
                line,
                position,
                message,
            } => Error::parse(line, position + 1, message),
            other => other,
        })?;
        if p.is_anti_hermitian() {
            return Err(Error::NotHermitian(format!(
                "line {line_no}: term carries an explicit imaginary unit"
            )));
        }
        sum.as_mut()
            .expect("set with n_qubits")
            .add_term(coeff, p)?;
    }
    sum.ok_or_else(|| Error::parse(text.lines().count().max(1), 0, "missing 'nqubits <n>' line"))
}

/// Terms sorted by weight and then token text; 17 significant digits.
pub fn write_pauli_hamiltonian(h: &PauliSum) -> Result<String> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian(
            "only Hermitian sums can be written".into(),
        ));
    }
    let mut terms: Vec<(f64, &PauliString)> = h.iter().collect();
    terms.sort_by(|a, b| (a.1.weight(), a.1.format()).cmp(&(b.1.weight(), b.1.format())));
    let mut out = String::new();
    let _ = writeln!(out, "nqubits {}", h.n_qubits());
    for (c, p) in terms {
        let tokens = p.format();
        if tokens.is_empty() {
            let _ = writeln!(out, "{c:.16e}");
        } else {
            let _ = writeln!(out, "{c:.16e} {tokens}");
        }
    }
    Ok(out)
}
