use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::ActiveHamiltonian;
use crate::chem::EriTensor;
use crate::error::{Error, Result};

/// Renders the Hamiltonian in FCIDUMP format. Only symmetry-unique
/// non-zero integrals are written.
pub fn write_fcidump_string(h: &ActiveHamiltonian) -> Result<String> {
    let n = h.n_orb;
    let finite = h.h_eff.iter().all(|v| v.is_finite()) && h.e_frozen.is_finite();
    if !finite {
        return Err(Error::Domain("cannot write non-finite integrals".into()));
    }
    let mut out = String::new();
    let orbsym = vec!["1"; n].join(",");
    let _ = writeln!(
        out,
        " &FCI NORB={n},NELEC={},MS2={},\n  ORBSYM={orbsym},\n  ISYM=1,\n &END",
        h.n_alpha + h.n_beta,
        h.n_alpha as i64 - h.n_beta as i64
    );
    let line = |out: &mut String, v: f64, i: usize, j: usize, k: usize, l: usize| {
        let _ = writeln!(out, "{v:>25.16e} {i:>4} {j:>4} {k:>4} {l:>4}");
    };
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                        continue;
                    }
                    let v = h.eri.get(i, j, k, l);
                    if !v.is_finite() {
                        return Err(Error::Domain("cannot write non-finite integrals".into()));
                    }
                    if v != 0.0 {
                        line(&mut out, v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = h.h_eff[(i, j)];
            if v != 0.0 {
                line(&mut out, v, i + 1, j + 1, 0, 0);
            }
        }
    }
    line(&mut out, h.e_frozen, 0, 0, 0, 0);
    Ok(out)
}

pub fn fcidump_write(h: &ActiveHamiltonian, path: &Path) -> Result<()> {
    std::fs::write(path, write_fcidump_string(h)?).map_err(|e| Error::io(path, e))
}

pub fn fcidump_read(path: &Path) -> Result<ActiveHamiltonian> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_fcidump_str(&text)
}

fn header_value(header: &str, key: &str) -> Option<String> {
    let upper = header.to_ascii_uppercase();
    let mut search = 0;
    while let Some(pos) = upper[search..].find(key) {
        let start = search + pos;
        let before = upper[..start].chars().last();
        let rest = upper[start + key.len()..].trim_start();
        if before.is_none_or(|c| !c.is_ascii_alphanumeric()) && rest.starts_with('=') {
            let value: String = rest[1..]
                .trim_start()
                .chars()
                .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
                .collect();
            return Some(value);
        }
        search = start + key.len();
    }
    None
}

pub fn read_fcidump_str(text: &str) -> Result<ActiveHamiltonian> {
    let mut header = String::new();
    let mut lines = text.lines().enumerate();
    let mut closed = false;
    for (_, line) in lines.by_ref() {
        header.push_str(line);
        header.push(' ');
        let t = line.trim().to_ascii_uppercase();
        if t.ends_with("&END") || t == "/" || t.ends_with("/") {
            closed = true;
            break;
        }
    }
    if !closed {
        return Err(Error::parse(text.lines().count().max(1), "FCIDUMP header is not terminated by &END"));
    }
    let int = |key: &str| -> Result<i64> {
        header_value(&header, key)
            .ok_or_else(|| Error::parse(1, format!("FCIDUMP header lacks {key}")))?
            .parse::<i64>()
            .map_err(|_| Error::parse(1, format!("invalid {key} in FCIDUMP header")))
    };
    let norb = int("NORB")?;
    let nelec = int("NELEC")?;
    let ms2 = header_value(&header, "MS2").map_or(Ok(0), |v| {
        v.parse::<i64>().map_err(|_| Error::parse(1, "invalid MS2 in FCIDUMP header"))
    })?;
    if norb <= 0 || nelec < 0 || (nelec + ms2) % 2 != 0 || ms2.abs() > nelec {
        return Err(Error::parse(1, format!("inconsistent FCIDUMP header NORB={norb} NELEC={nelec} MS2={ms2}")));
    }
    let n = norb as usize;
    let mut h = DMatrix::zeros(n, n);
    let mut eri = EriTensor::zeros(n);
    let mut e_core = 0.0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::parse(lineno, "expected `value i j k l`"));
        }
        let v: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid value {:?}", fields[0])))?;
        let mut ix = [0usize; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            let x: usize = f.parse().map_err(|_| Error::parse(lineno, format!("invalid index {f:?}")))?;
            if x > n {
                return Err(Error::parse(lineno, format!("index {x} exceeds NORB={n}")));
            }
            ix[k] = x;
        }
        match ix {
            [0, 0, 0, 0] => e_core = v,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                h[(i - 1, j - 1)] = v;
                h[(j - 1, i - 1)] = v;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => eri.set(i - 1, j - 1, k - 1, l - 1, v),
            // orbital energies (i 0 0 0) carry no Hamiltonian information
            [_, 0, 0, 0] => {}
            _ => return Err(Error::parse(lineno, "malformed index pattern")),
        }
    }
    let n_alpha = ((nelec + ms2) / 2) as usize;
    let n_beta = ((nelec - ms2) / 2) as usize;
    ActiveHamiltonian::new(n_alpha, n_beta, h, eri, e_core)
        .map_err(|e| Error::parse(1, format!("FCIDUMP describes an invalid Hamiltonian: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ActiveHamiltonian {
        let n = 3;
        let h = DMatrix::from_fn(n, n, |i, j| -1.0 / (1.0 + i as f64 + j as f64) + 1e-17 * (i * j) as f64);
        let eri = EriTensor::from_fn(n, |p, q, r, s| 0.1 * std::f64::consts::PI / (1 + p + q + r + s) as f64);
        ActiveHamiltonian::new(2, 1, h, eri, -7.123_456_789_012_345).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let h = toy();
        let text = write_fcidump_string(&h).unwrap();
        assert!(text.starts_with(" &FCI NORB=3,NELEC=3,MS2=1,"));
        let back = read_fcidump_str(&text).unwrap();
        assert_eq!(back, h);
        let last = text.lines().last().unwrap();
        assert!(last.trim_end().ends_with("0    0    0    0"));
    }

    #[test]
    fn header_variants_and_errors() {
        let text = "&FCI NORB = 2, NELEC = 2\n/\n  1.0D0 1 1 1 1\n -0.5 1 1 0 0\n 0.3 0 0 0 0\n 0.7 1 0 0 0\n";
        let h = read_fcidump_str(text).unwrap();
        assert_eq!((h.n_orb, h.n_alpha, h.n_beta), (2, 1, 1));
        assert_eq!(h.eri.get(0, 0, 0, 0), 1.0);
        assert_eq!(h.e_frozen, 0.3);

        let bad = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 1.0 3 1 1 1\n";
        assert!(matches!(read_fcidump_str(bad), Err(Error::Parse { line: 3, .. })));
        let bad = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 1.0 1 1 x 1\n";
        assert!(matches!(read_fcidump_str(bad), Err(Error::Parse { line: 3, .. })));
        let bad = "&FCI NELEC=2,\n&END\n";
        assert!(matches!(read_fcidump_str(bad), Err(Error::Parse { .. })));
        assert!(read_fcidump_str("&FCI NORB=2,NELEC=2\n").is_err());
    }
}
