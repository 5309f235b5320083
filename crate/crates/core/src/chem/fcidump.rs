//! Molpro-style FCIDUMP files without point-group symmetry.
//!
//! ```text
//!  &FCI NORB=2,NELEC=2,MS2=0,
//!   ORBSYM=1,1,
//!   ISYM=1,
//!  &END
//!  -1.0  1 2 0 0
//!   2.0  1 1 1 1
//!   0.0  0 0 0 0
//! ```
//!
//! Indices are 1-based; `i j 0 0` is `h[i][j]`, `0 0 0 0` the core energy,
//! `i 0 0 0` an orbital energy (ignored) and anything else `(ij|kl)`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::ChemError;
use crate::qop::{ActiveSpaceIntegrals, SectorSpec, SYMMETRY_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub struct Fcidump {
    pub integrals: ActiveSpaceIntegrals,
    pub n_electrons: usize,
    /// Twice S_z.
    pub ms2: i64,
}

impl Fcidump {
    pub fn sector(&self) -> Result<SectorSpec, ChemError> {
        let s = SectorSpec::new(self.n_electrons, self.ms2).map_err(|e| ChemError::parse(0, e.to_string()))?;
        s.check_orbitals(self.integrals.n_orbitals)
            .map_err(|e| ChemError::parse(0, e.to_string()))?;
        Ok(s)
    }
}

fn parse_value(token: &str) -> Option<f64> {
    token.replace(['D', 'd'], "e").parse().ok()
}

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
}

fn parse_header(text: &str, end_line: usize) -> Result<Header, ChemError> {
    let mut fields: HashMap<String, Vec<String>> = HashMap::new();
    let mut key: Option<String> = None;
    let body = text.trim_start().get(4..).unwrap_or("");
    for token in body.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let upper = token.to_ascii_uppercase();
        if upper == "&END" || upper == "/" {
            break;
        }
        match upper.split_once('=') {
            Some((k, v)) => {
                let values = fields.entry(k.to_string()).or_default();
                if !v.is_empty() {
                    values.push(v.to_string());
                }
                key = Some(k.to_string());
            }
            None => match &key {
                Some(k) => fields.entry(k.clone()).or_default().push(upper),
                None => return Err(ChemError::parse(1, format!("unexpected header token {token:?}"))),
            },
        }
    }
    let single = |name: &str| -> Result<Option<i64>, ChemError> {
        match fields.get(name).map(|v| v.as_slice()) {
            None => Ok(None),
            Some([v]) => v
                .parse()
                .map(Some)
                .map_err(|_| ChemError::parse(end_line, format!("{name} is not an integer: {v:?}"))),
            Some(_) => Err(ChemError::parse(end_line, format!("{name} needs exactly one value"))),
        }
    };
    let norb = single("NORB")?.ok_or_else(|| ChemError::parse(end_line, "header lacks NORB"))?;
    let nelec = single("NELEC")?.ok_or_else(|| ChemError::parse(end_line, "header lacks NELEC"))?;
    let ms2 = single("MS2")?.unwrap_or(0);
    if norb <= 0 || norb > 64 {
        return Err(ChemError::parse(end_line, format!("NORB = {norb} outside 1..=64")));
    }
    if nelec < 0 {
        return Err(ChemError::parse(end_line, format!("NELEC = {nelec} is negative")));
    }
    if let Some(sym) = fields.get("ORBSYM") {
        if sym.iter().any(|s| s != "1") {
            return Err(ChemError::parse(end_line, "point-group symmetry labels other than 1 are not supported"));
        }
    }
    Ok(Header {
        norb: norb as usize,
        nelec: nelec as usize,
        ms2,
    })
}

/// Canonical representative of an index tuple under real-orbital symmetry.
fn canonical_two(p: usize, q: usize, r: usize, s: usize) -> (usize, usize, usize, usize) {
    let a = (p.max(q), p.min(q));
    let b = (r.max(s), r.min(s));
    let (x, y) = if a >= b { (a, b) } else { (b, a) };
    (x.0, x.1, y.0, y.1)
}

pub fn parse_fcidump_str(text: &str) -> Result<Fcidump, ChemError> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| l.trim_start().to_ascii_uppercase().starts_with("&FCI"))
        .ok_or_else(|| ChemError::parse(1, "missing &FCI header"))?;
    let end = (start..lines.len())
        .find(|&i| {
            let u = lines[i].to_ascii_uppercase();
            u.contains("&END") || u.trim() == "/"
        })
        .ok_or_else(|| ChemError::parse(lines.len(), "unterminated header (no &END)"))?;
    let header = parse_header(&lines[start..=end].join(" "), end + 1)?;
    let n = header.norb;
    let mut ints = ActiveSpaceIntegrals::zeros(n, 0.0);
    let mut one_seen: HashMap<(usize, usize), f64> = HashMap::new();
    let mut two_seen: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
    for (offset, raw) in lines[end + 1..].iter().enumerate() {
        let line_no = end + 2 + offset;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(ChemError::parse(line_no, format!("expected 'value i j k l', got {raw:?}")));
        }
        let value = parse_value(toks[0])
            .filter(|v| v.is_finite())
            .ok_or_else(|| ChemError::parse(line_no, format!("non-numeric value {:?}", toks[0])))?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let v: usize = tok
                .parse()
                .map_err(|_| ChemError::parse(line_no, format!("bad index {tok:?}")))?;
            if v > n {
                return Err(ChemError::parse(line_no, format!("index {v} exceeds NORB = {n}")));
            }
            *slot = v;
        }
        let conflict = |old: f64| (old - value).abs() > SYMMETRY_TOLERANCE;
        match idx {
            [0, 0, 0, 0] => ints.e_core = value,
            [_, 0, 0, 0] => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let key = (i.max(j) - 1, i.min(j) - 1);
                if one_seen.insert(key, value).is_some_and(conflict) {
                    return Err(ChemError::parse(line_no, format!("conflicting values for h[{i}][{j}]")));
                }
                ints.set_one(i - 1, j - 1, value);
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let key = canonical_two(i - 1, j - 1, k - 1, l - 1);
                if two_seen.insert(key, value).is_some_and(conflict) {
                    return Err(ChemError::parse(line_no, format!("conflicting values for ({i}{j}|{k}{l})")));
                }
                ints.set_two(i - 1, j - 1, k - 1, l - 1, value);
            }
            _ => return Err(ChemError::parse(line_no, format!("invalid index pattern {idx:?}"))),
        }
    }
    ints.validate().map_err(|e| ChemError::parse(0, e.to_string()))?;
    Ok(Fcidump {
        integrals: ints,
        n_electrons: header.nelec,
        ms2: header.ms2,
    })
}

pub fn parse_fcidump(path: &Path) -> Result<Fcidump, ChemError> {
    let text = std::fs::read_to_string(path).map_err(|e| ChemError::io(path, e))?;
    parse_fcidump_str(&text)
}

/// FCIDUMP text listing each symmetry-unique nonzero integral once, at full
/// round-trip precision.
pub fn format_fcidump(data: &Fcidump) -> String {
    let ints = &data.integrals;
    let n = ints.n_orbitals;
    let mut out = String::new();
    let _ = writeln!(out, " &FCI NORB={n},NELEC={},MS2={},", data.n_electrons, data.ms2);
    let _ = writeln!(out, "  ORBSYM={}", "1,".repeat(n));
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    let mut line = |v: f64, i: usize, j: usize, k: usize, l: usize| {
        let _ = writeln!(out, "{v:>25.16e} {i:>3} {j:>3} {k:>3} {l:>3}");
    };
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if (p, q) < (r, s) {
                        continue;
                    }
                    let v = ints.two(p, q, r, s);
                    if v != 0.0 {
                        line(v, p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = ints.one(p, q);
            if v != 0.0 {
                line(v, p + 1, q + 1, 0, 0);
            }
        }
    }
    line(ints.e_core, 0, 0, 0, 0);
    out
}

pub fn write_fcidump(data: &Fcidump, path: &Path) -> Result<(), ChemError> {
    std::fs::write(path, format_fcidump(data)).map_err(|e| ChemError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HUBBARD: &str = " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n -1.0 1 2 0 0\n 2.0 1 1 1 1\n 2.0 2 2 2 2\n 0.0 0 0 0 0\n";

    #[test]
    fn core_energy_only() {
        let d = parse_fcidump_str(" &FCI NORB=2,NELEC=2,MS2=0,\n &END\n 3.7 0 0 0 0\n").unwrap();
        assert_eq!(d.integrals.e_core, 3.7);
        assert!(d.integrals.h1.iter().chain(&d.integrals.h2).all(|v| *v == 0.0));
    }

    #[test]
    fn hubbard_file() {
        let d = parse_fcidump_str(HUBBARD).unwrap();
        assert_eq!(d.integrals.one(1, 0), -1.0);
        assert_eq!(d.integrals.two(1, 1, 1, 1), 2.0);
        assert_eq!(d.sector().unwrap(), SectorSpec::two_electron_singlet());
    }

    #[test]
    fn fortran_exponents_and_slash_terminator() {
        let d = parse_fcidump_str("&FCI NORB=1, NELEC=2,\n/\n 1.5D-01 1 1 1 1\n").unwrap();
        assert!((d.integrals.two(0, 0, 0, 0) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_index = " &FCI NORB=2,NELEC=2,\n &END\n 1.0 3 1 0 0\n";
        match parse_fcidump_str(bad_index) {
            Err(ChemError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let bad_value = " &FCI NORB=2,NELEC=2,\n &END\n 0.0 0 0 0 0\n abc 1 1 0 0\n";
        assert!(matches!(parse_fcidump_str(bad_value), Err(ChemError::Parse { line: 4, .. })));
        assert!(matches!(parse_fcidump_str(" &FCI NELEC=2,\n &END\n"), Err(ChemError::Parse { .. })));
        let conflict = " &FCI NORB=2,NELEC=2,\n &END\n 1.0 1 2 1 1\n 1.5 2 1 1 1\n";
        assert!(matches!(parse_fcidump_str(conflict), Err(ChemError::Parse { line: 4, .. })));
    }

    #[test]
    fn round_trip() {
        let mut ints = ActiveSpaceIntegrals::zeros(3, -78.123_456_789_012_35);
        ints.set_one(0, 0, -1.2345678901234567);
        ints.set_one(1, 2, 0.1 / 3.0);
        ints.set_two(0, 1, 2, 1, 1e-7 / 7.0);
        ints.set_two(2, 2, 2, 2, 0.71);
        let data = Fcidump {
            integrals: ints,
            n_electrons: 4,
            ms2: 0,
        };
        let back = parse_fcidump_str(&format_fcidump(&data)).unwrap();
        assert_eq!(back.n_electrons, 4);
        for (a, b) in data.integrals.h1.iter().chain(&data.integrals.h2).zip(back.integrals.h1.iter().chain(&back.integrals.h2)) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((back.integrals.e_core - data.integrals.e_core).abs() < 1e-12);
    }
}
