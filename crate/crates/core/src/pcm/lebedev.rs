//! Lebedev–Laikov angular quadrature on the unit sphere.
//!
//! Tables hold one representative per octahedral orbit; the full grid is
//! generated by all coordinate permutations and sign changes.

// tabulated values, kept digit for digit
#![allow(clippy::approx_constant)]

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Grid sizes shipped with the crate.
pub const SUPPORTED_GRIDS: [usize; 4] = [110, 194, 302, 590];

struct Orbit {
    rep: [f64; 3],
    weight: f64,
    size: usize,
}

const LEBEDEV_110: &[Orbit] = &[
    Orbit { rep: [0.0, 0.0, 1.0], weight: 0.0038282704949371615, size: 6 },
    Orbit { rep: [0.0, 0.4783690288121502, 0.8781589106040661], weight: 0.009694996361663029, size: 24 },
    Orbit { rep: [0.1851156353447362, 0.1851156353447362, 0.9651240350865941], weight: 0.008211737283191111, size: 24 },
    Orbit { rep: [0.21595729184584844, 0.6904210483822922, 0.6904210483822922], weight: 0.009942814891178103, size: 24 },
    Orbit { rep: [0.3956894730559419, 0.3956894730559419, 0.8287699812525923], weight: 0.009595471336070962, size: 24 },
    Orbit { rep: [0.5773502691896257, 0.5773502691896257, 0.5773502691896257], weight: 0.009793737512487513, size: 8 },
];
const LEBEDEV_194: &[Orbit] = &[
    Orbit { rep: [0.0, 0.0, 1.0], weight: 0.001782340447244611, size: 6 },
    Orbit { rep: [0.0, 0.3457702197611283, 0.9383192181375916], weight: 0.005051846064614808, size: 24 },
    Orbit { rep: [0.0, 0.7071067811865476, 0.7071067811865476], weight: 0.005716905949977102, size: 12 },
    Orbit { rep: [0.1299335447650067, 0.1299335447650067, 0.9829723027072532], weight: 0.004106777028169394, size: 24 },
    Orbit { rep: [0.159041710538353, 0.525118572443642, 0.8360360154824589], weight: 0.005530248916233094, size: 48 },
    Orbit { rep: [0.2892465627575439, 0.2892465627575439, 0.9125090968674737], weight: 0.005158237711805383, size: 24 },
    Orbit { rep: [0.3141969941825863, 0.6712973442695226, 0.6712973442695226], weight: 0.005608704082587997, size: 24 },
    Orbit { rep: [0.4446933178717437, 0.4446933178717437, 0.7774932193147671], weight: 0.005518771467273614, size: 24 },
    Orbit { rep: [0.5773502691896257, 0.5773502691896257, 0.5773502691896257], weight: 0.005573383178848737, size: 8 },
];
const LEBEDEV_302: &[Orbit] = &[
    Orbit { rep: [0.0, 0.0, 1.0], weight: 0.0008545911725128148, size: 6 },
    Orbit { rep: [0.0, 0.2644152887060663, 0.964408914879206], weight: 0.002982344963171804, size: 24 },
    Orbit { rep: [0.0, 0.5718955891878961, 0.8203264198277593], weight: 0.00360082093221646, size: 24 },
    Orbit { rep: [0.09618308522614784, 0.09618308522614784, 0.9907056213794081], weight: 0.002352101413689164, size: 24 },
    Orbit { rep: [0.1233548532583327, 0.4127724083168531, 0.9024425295330004], weight: 0.00339231220500617, size: 48 },
    Orbit { rep: [0.12923867271051442, 0.7011766416089545, 0.7011766416089545], weight: 0.003650045807677255, size: 24 },
    Orbit { rep: [0.2219645236294178, 0.2219645236294178, 0.9494543172264431], weight: 0.003108953122413675, size: 24 },
    Orbit { rep: [0.2510034751770465, 0.5448677372580774, 0.8000727494073951], weight: 0.003571540554273387, size: 48 },
    Orbit { rep: [0.3515640345570105, 0.3515640345570105, 0.8676436245440834], weight: 0.003449788424305883, size: 24 },
    Orbit { rep: [0.37103417838482095, 0.6566329410219612, 0.6566329410219612], weight: 0.003604822601419882, size: 24 },
    Orbit { rep: [0.4729054132581005, 0.4729054132581005, 0.7434520429875557], weight: 0.003576729661743367, size: 24 },
    Orbit { rep: [0.5773502691896257, 0.5773502691896257, 0.5773502691896257], weight: 0.003599119285025571, size: 8 },
];
const LEBEDEV_590: &[Orbit] = &[
    Orbit { rep: [0.0, 0.0, 1.0], weight: 0.0003095121295306187, size: 6 },
    Orbit { rep: [0.0, 0.1724782009907724, 0.9850133350280019], weight: 0.001300321685886048, size: 24 },
    Orbit { rep: [0.0, 0.3964755348199858, 0.918045287711454], weight: 0.0017051539963958643, size: 24 },
    Orbit { rep: [0.0, 0.6116843442009876, 0.791101929626902], weight: 0.001857161196774078, size: 24 },
    Orbit { rep: [0.06095034115507196, 0.06095034115507196, 0.9962781297540164], weight: 0.000976433116505105, size: 24 },
    Orbit { rep: [0.08213021581932511, 0.2778673190586244, 0.9571020743100725], weight: 0.001555213603396808, size: 48 },
    Orbit { rep: [0.08999205842074876, 0.5033564271075117, 0.8593798558907212], weight: 0.0018022391280085248, size: 48 },
    Orbit { rep: [0.09219040707689825, 0.7040954938227469, 0.7040954938227469], weight: 0.001871790639277744, size: 24 },
    Orbit { rep: [0.1459036449157763, 0.1459036449157763, 0.9784805837626939], weight: 0.001384737234851692, size: 24 },
    Orbit { rep: [0.1720795225656878, 0.3791035407695563, 0.9092134750923736], weight: 0.001713904507106709, size: 48 },
    Orbit { rep: [0.1816640840360209, 0.598412649788538, 0.7803207424799203], weight: 0.00184983056044366, size: 48 },
    Orbit { rep: [0.2384736701421887, 0.2384736701421887, 0.9414141582204025], weight: 0.001617210647254411, size: 24 },
    Orbit { rep: [0.263471665593795, 0.474239284255198, 0.8400474883590504], weight: 0.001802658934377451, size: 48 },
    Orbit { rep: [0.2703560883591648, 0.6807744066455244, 0.6807744066455244], weight: 0.001858812585438317, size: 24 },
    Orbit { rep: [0.3317920736472123, 0.3317920736472123, 0.8830787279341326], weight: 0.001749564657281154, size: 24 },
    Orbit { rep: [0.3518280927733519, 0.561026380862206, 0.7493106119041159], weight: 0.001842866472905286, size: 48 },
    Orbit { rep: [0.4215761784010967, 0.4215761784010967, 0.8028368773352738], weight: 0.001818471778162769, size: 24 },
    Orbit { rep: [0.4333738687771544, 0.6372546939258752, 0.6372546939258752], weight: 0.0018520288282962132, size: 24 },
    Orbit { rep: [0.5044419707800358, 0.5044419707800358, 0.700768575373573], weight: 0.001846715956151242, size: 24 },
    Orbit { rep: [0.5773502691896257, 0.5773502691896257, 0.5773502691896257], weight: 0.001852379698597489, size: 8 },
];

/// Unit vectors and weights (summing to 1) of the `n`-point grid.
pub fn lebedev_grid(n: usize) -> Result<Vec<(Vector3<f64>, f64)>> {
    let table = match n {
        110 => LEBEDEV_110,
        194 => LEBEDEV_194,
        302 => LEBEDEV_302,
        590 => LEBEDEV_590,
        _ => {
            return Err(Error::Config(format!(
                "unsupported angular grid {n}; choose one of {SUPPORTED_GRIDS:?}"
            )))
        }
    };
    let mut out = Vec::with_capacity(n);
    for orbit in table {
        let members = expand(orbit.rep);
        debug_assert_eq!(members.len(), orbit.size);
        out.extend(members.into_iter().map(|v| (v, orbit.weight)));
    }
    debug_assert_eq!(out.len(), n);
    Ok(out)
}

fn expand(rep: [f64; 3]) -> Vec<Vector3<f64>> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out: Vec<[f64; 3]> = Vec::new();
    for perm in PERMS {
        for signs in 0..8 {
            let mut v = [0.0; 3];
            for k in 0..3 {
                let x = rep[perm[k]];
                v[k] = if signs & (1 << k) != 0 { -x } else { x };
                if v[k] == 0.0 {
                    v[k] = 0.0;
                }
            }
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out.into_iter().map(Vector3::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: i64) -> f64 {
        if n <= 0 {
            1.0
        } else {
            n as f64 * double_factorial(n - 2)
        }
    }

    /// Sphere average of x^a y^b z^c for even exponents.
    fn monomial_average(a: i64, b: i64, c: i64) -> f64 {
        double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1) / double_factorial(a + b + c + 1)
    }

    #[test]
    fn sizes_norms_and_weights() {
        for n in SUPPORTED_GRIDS {
            let g = lebedev_grid(n).unwrap();
            assert_eq!(g.len(), n);
            let w: f64 = g.iter().map(|p| p.1).sum();
            assert!((w - 1.0).abs() < 1e-13);
            for (v, _) in &g {
                assert!((v.norm() - 1.0).abs() < 1e-14);
            }
            for i in 0..g.len() {
                for j in 0..i {
                    assert!((g[i].0 - g[j].0).norm() > 1e-3);
                }
            }
        }
    }

    #[test]
    fn integrates_even_monomials_exactly() {
        for (n, degree) in [(110, 17), (194, 23), (302, 29), (590, 41)] {
            let g = lebedev_grid(n).unwrap();
            for a in (0..=12).step_by(2) {
                for b in (0..=12).step_by(2) {
                    for c in (0..=12).step_by(2) {
                        if a + b + c > degree {
                            continue;
                        }
                        let q: f64 = g
                            .iter()
                            .map(|(v, w)| w * v.x.powi(a as i32) * v.y.powi(b as i32) * v.z.powi(c as i32))
                            .sum();
                        let exact = monomial_average(a, b, c);
                        assert!((q - exact).abs() < 1e-13, "n={n} x^{a}y^{b}z^{c}: {q} vs {exact}");
                    }
                }
            }
        }
    }

    #[test]
    fn odd_moments_vanish() {
        let g = lebedev_grid(302).unwrap();
        let m: Vector3<f64> = g.iter().map(|(v, w)| v * *w).sum();
        assert!(m.norm() < 1e-15);
    }

    #[test]
    fn rejects_unknown_size() {
        assert!(matches!(lebedev_grid(111), Err(Error::Config(_))));
    }
}
