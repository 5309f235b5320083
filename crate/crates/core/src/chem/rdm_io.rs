//! Plain-text RDM record:
//!
//! ```text
//! # spin-summed RDMs, chemists' order, 1-based indices
//! norb 2
//! weights 5.00000000000000e-1 5.00000000000000e-1
//! rdm1
//!   1   1  2.00000000000000e0
//!   2   2  0.00000000000000e0
//! rdm2
//!   1   1   1   1  2.00000000000000e0
//! end
//! ```
//!
//! Diagonal 1-RDM entries are always written; other entries below
//! [`SPARSITY_THRESHOLD`] in magnitude are omitted and read back as zero.

use std::fmt::Write as _;
use std::path::Path;

use super::ChemError;
use crate::solve::RdmPair;

pub const SPARSITY_THRESHOLD: f64 = 1e-14;

pub fn format_rdms(rdm: &RdmPair) -> String {
    let n = rdm.n_orbitals;
    let mut out = String::new();
    let _ = writeln!(out, "# spin-summed RDMs, chemists' order, 1-based indices");
    let _ = writeln!(out, "norb {n}");
    let weights: Vec<String> = rdm.weights.iter().map(|w| format!("{w:.14e}")).collect();
    let _ = writeln!(out, "weights {}", weights.join(" "));
    let _ = writeln!(out, "rdm1");
    for p in 0..n {
        for q in 0..n {
            let v = rdm.one_at(p, q);
            if p == q || v.abs() >= SPARSITY_THRESHOLD {
                let _ = writeln!(out, "{:>3} {:>3} {v:>22.14e}", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "rdm2");
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = rdm.two_at(p, q, r, s);
                    if v.abs() >= SPARSITY_THRESHOLD {
                        let _ = writeln!(out, "{:>3} {:>3} {:>3} {:>3} {v:>22.14e}", p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    let _ = writeln!(out, "end");
    out
}

pub fn write_rdms(rdm: &RdmPair, path: &Path) -> Result<(), ChemError> {
    std::fs::write(path, format_rdms(rdm)).map_err(|e| ChemError::io(path, e))
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    One,
    Two,
    Done,
}

pub fn parse_rdms(text: &str) -> Result<RdmPair, ChemError> {
    let mut rdm: Option<RdmPair> = None;
    let mut weights: Option<Vec<f64>> = None;
    let mut section = Section::Preamble;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| -> Result<f64, ChemError> {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ChemError::parse(line_no, format!("non-numeric value {t:?}")))
        };
        match (toks[0], &section) {
            ("norb", Section::Preamble) => {
                let n: usize = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| ChemError::parse(line_no, "norb needs a positive integer"))?;
                rdm = Some(RdmPair::zeros(n));
            }
            ("weights", Section::Preamble) => {
                weights = Some(toks[1..].iter().map(|t| num(t)).collect::<Result<_, _>>()?);
            }
            ("rdm1", Section::Preamble) => section = Section::One,
            ("rdm2", Section::One) => section = Section::Two,
            ("end", Section::Two) => section = Section::Done,
            (_, Section::One | Section::Two) => {
                let r = rdm.as_mut().ok_or_else(|| ChemError::parse(line_no, "entries before norb"))?;
                let n = r.n_orbitals;
                let arity = if section == Section::One { 2 } else { 4 };
                if toks.len() != arity + 1 {
                    return Err(ChemError::parse(line_no, format!("expected {arity} indices and a value")));
                }
                let mut flat = 0usize;
                for t in &toks[..arity] {
                    let i: usize = t.parse().map_err(|_| ChemError::parse(line_no, format!("bad index {t:?}")))?;
                    if i == 0 || i > n {
                        return Err(ChemError::parse(line_no, format!("index {i} outside 1..={n}")));
                    }
                    flat = flat * n + (i - 1);
                }
                let v = num(toks[arity])?;
                if section == Section::One {
                    r.one[flat] = v;
                } else {
                    r.two[flat] = v;
                }
            }
            _ => return Err(ChemError::parse(line_no, format!("unexpected line {line:?}"))),
        }
    }
    if section != Section::Done {
        return Err(ChemError::parse(text.lines().count(), "truncated RDM record (missing 'end')"));
    }
    let mut rdm = rdm.ok_or_else(|| ChemError::parse(0, "missing norb"))?;
    rdm.weights = weights.ok_or_else(|| ChemError::parse(0, "missing weights"))?;
    Ok(rdm)
}

pub fn read_rdms(path: &Path) -> Result<RdmPair, ChemError> {
    let text = std::fs::read_to_string(path).map_err(|e| ChemError::io(path, e))?;
    parse_rdms(&text)
}
