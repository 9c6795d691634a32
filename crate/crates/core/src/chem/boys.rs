//! The Boys function F_m(t) = ∫₀¹ u^{2m} exp(−t u²) du.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest order needed by four-center integrals over d shells is 8; the
/// public entry point accepts up to 16.
pub const MAX_ORDER: usize = 16;

const SERIES_LIMIT: f64 = 25.0;

/// F_m(t) for m = 0..=m_max.
pub fn boys(m_max: usize, t: f64) -> Result<Vec<f64>> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("Boys argument must be finite and non-negative, got {t}")));
    }
    if m_max > MAX_ORDER {
        return Err(Error::Domain(format!("Boys order {m_max} exceeds {MAX_ORDER}")));
    }
    let mut out = vec![0.0; m_max + 1];
    boys_into(t, &mut out);
    Ok(out)
}

/// Fills `out[m] = F_m(t)`; `t` must be finite and non-negative.
pub(crate) fn boys_into(t: f64, out: &mut [f64]) {
    let m_max = out.len() - 1;
    if t < SERIES_LIMIT {
        let e = (-t).exp();
        let two_t = 2.0 * t;
        let mut term = 1.0 / (2 * m_max + 1) as f64;
        let mut sum = term;
        let mut k = 1;
        loop {
            term *= two_t / (2 * m_max + 2 * k + 1) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1;
        }
        out[m_max] = e * sum;
        for m in (1..=m_max).rev() {
            out[m - 1] = (two_t * out[m] + e) / (2 * m - 1) as f64;
        }
    } else {
        let e = (-t).exp();
        let x = t.sqrt();
        // erfc asymptotic series; for t >= 25 the correction is below 2e-12
        // relative, so four terms are far more than enough.
        let inv = 1.0 / (2.0 * t);
        let erfc = e / (x * PI.sqrt()) * (1.0 - inv + 3.0 * inv * inv - 15.0 * inv * inv * inv);
        out[0] = 0.5 * (PI / t).sqrt() * (1.0 - erfc);
        for m in 1..=m_max {
            out[m] = ((2 * m - 1) as f64 * out[m - 1] - e) / (2.0 * t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Gauss–Legendre nodes/weights on [-1, 1] via Newton iteration.
    fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    }

    fn quadrature(m: usize, t: f64) -> f64 {
        let rule = gauss_legendre(24);
        let panels = 400;
        let h = 1.0 / panels as f64;
        let mut s = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            for &(x, w) in &rule {
                let u = a + 0.5 * h * (x + 1.0);
                s += 0.5 * h * w * u.powi(2 * m as i32) * (-t * u * u).exp();
            }
        }
        s
    }

    #[test]
    fn zero_argument() {
        assert_eq!(boys(0, 0.0).unwrap(), vec![1.0]);
        let f = boys(2, 0.0).unwrap();
        for (m, v) in f.iter().enumerate() {
            assert!((v - 1.0 / (2 * m + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn f0_at_one_matches_quadrature() {
        let oracle = quadrature(0, 1.0);
        assert!((oracle - 0.7468241328).abs() < 1e-9);
        assert!((boys(0, 1.0).unwrap()[0] - oracle).abs() < 1e-9);
    }

    #[test]
    fn relative_accuracy_across_branches() {
        for &t in &[1e-8, 0.3, 2.0, 7.5, 15.0, 24.99, 25.0, 25.01, 31.0, 48.0, 80.0] {
            let f = boys(MAX_ORDER, t).unwrap();
            for (m, &v) in f.iter().enumerate() {
                let q = quadrature(m, t);
                assert!(((v - q) / q).abs() < 1e-12, "m={m} t={t}: {v} vs {q}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(boys(0, -1.0).is_err());
        assert!(boys(0, f64::NAN).is_err());
        assert!(boys(MAX_ORDER + 1, 1.0).is_err());
    }
}
