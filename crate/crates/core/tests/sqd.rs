mod common;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

use common::{h2, water, WATER_EPSILON};
use solvaq::active::ActiveHamiltonian;
use solvaq::chem::EriTensor;
use solvaq::sampling::rng::generator;
use solvaq::sampling::{apply_noise, Configuration, NoiseModel, SampleSet};
use solvaq::sqd::strings::all_strings;
use solvaq::sqd::*;

const H2_FCI: f64 = -1.1372759436170439;
// geometry converted with 1.8897259886 bohr per angstrom, as the library does
const WATER_CASCI: f64 = -75.01250013541251;
const WATER_CASCI_PCM: f64 = -75.017319816914;
const WATER_CASCI_PCM_GSOLV: f64 = -0.005033349410759571;
const H2_CASCI_PCM: f64 = -1.137387321085343;
const H2_CASCI_PCM_GSOLV: f64 = -0.0001113935454949367;

// ---------------------------------------------------------------------------
// Second-quantized oracle: H applied term by term to occupation-number
// vectors over 2n spin orbitals (alpha p → mode p, beta p → mode n + p).

fn annihilate(state: u64, mode: usize) -> Option<(u64, f64)> {
    if state >> mode & 1 == 0 {
        return None;
    }
    let sign = if (state & ((1 << mode) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state & !(1 << mode), sign))
}

fn create(state: u64, mode: usize) -> Option<(u64, f64)> {
    if state >> mode & 1 == 1 {
        return None;
    }
    let sign = if (state & ((1 << mode) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state | (1 << mode), sign))
}

/// Applies a†_{ops[0]} … (rightmost operator first) given as (mode, is_creation).
fn apply_string(state: u64, ops: &[(usize, bool)]) -> Option<(u64, f64)> {
    let mut s = state;
    let mut sign = 1.0;
    for &(mode, dag) in ops.iter().rev() {
        let (t, f) = if dag { create(s, mode)? } else { annihilate(s, mode)? };
        s = t;
        sign *= f;
    }
    Some((s, sign))
}

fn fock_apply(h1: &DMatrix<f64>, eri: &EriTensor, constant: f64, n: usize, state: u64) -> HashMap<u64, f64> {
    let mut out: HashMap<u64, f64> = HashMap::new();
    *out.entry(state).or_default() += constant;
    for sigma in [0, n] {
        for p in 0..n {
            for q in 0..n {
                if let Some((t, s)) = apply_string(state, &[(p + sigma, true), (q + sigma, false)]) {
                    *out.entry(t).or_default() += s * h1[(p, q)];
                }
            }
        }
    }
    for sigma in [0, n] {
        for tau in [0, n] {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let ops = [(p + sigma, true), (r + tau, true), (s + tau, false), (q + sigma, false)];
                            if let Some((t, f)) = apply_string(state, &ops) {
                                *out.entry(t).or_default() += 0.5 * f * eri.get(p, q, r, s);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn oracle_matrix(h: &ActiveHamiltonian, one: &OneBody, basis: &SubspaceBasis) -> DMatrix<f64> {
    let n = h.n_orb;
    let dets: Vec<Configuration> = basis.determinants().collect();
    let index: HashMap<u64, usize> = dets.iter().enumerate().map(|(k, c)| (c.alpha | c.beta << n, k)).collect();
    let mut m = DMatrix::zeros(dets.len(), dets.len());
    for (k, c) in dets.iter().enumerate() {
        for (t, v) in fock_apply(&one.h, &h.eri, one.constant, n, c.alpha | c.beta << n) {
            if let Some(&j) = index.get(&t) {
                m[(j, k)] += v;
            }
        }
    }
    m
}

fn toy_hamiltonian(n: usize, n_el: usize, seed: u64) -> ActiveHamiltonian {
    let mut r = generator(seed);
    let mut h = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
    h = (&h + h.transpose()) * 0.5;
    for i in 0..n {
        h[(i, i)] -= 2.0 - 0.4 * i as f64;
    }
    let eri = EriTensor::from_fn(n, |_, _, _, _| r.random_range(-0.3..0.3));
    ActiveHamiltonian::new(n_el, n_el, h, eri, r.random_range(-5.0..5.0)).unwrap()
}

fn matvec_matrix(ham: &ProjectedHamiltonian, one: &OneBody) -> DMatrix<f64> {
    let d = ham.dimension();
    let diag = ham.diagonal(one);
    let mut m = DMatrix::zeros(d, d);
    let mut y = vec![0.0; d];
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        ham.apply(one, &diag, &e, &mut y);
        m.column_mut(k).copy_from_slice(&y);
    }
    m
}

fn random_subset(strings: &[u64], keep: &[bool]) -> Vec<u64> {
    let mut out: Vec<u64> = strings.iter().zip(keep.iter().cycle()).filter(|(_, &k)| k).map(|(s, _)| *s).collect();
    if out.is_empty() {
        out.push(strings[0]);
    }
    out
}

fn lowest(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

fn gas_solve(h: &ActiveHamiltonian, basis: SubspaceBasis) -> (ProjectedHamiltonian, SubspaceSolution) {
    let ham = ProjectedHamiltonian::new(h, basis).unwrap();
    let sol = scrf_subspace_solve(&ham, &OneBody::of(h), None, None, &ScrfSettings::default()).unwrap();
    (ham, sol)
}

#[test]
fn projected_hamiltonian_matches_second_quantized_oracle() {
    for (n, n_el, seed) in [(4, 2, 1), (5, 2, 2), (5, 3, 3), (3, 1, 4)] {
        let h = toy_hamiltonian(n, n_el, seed);
        let one = OneBody::of(&h);
        let full = SubspaceBasis::full(n, n_el).unwrap();
        let mut subsets = vec![full.strings().to_vec()];
        let mut r = generator(seed + 100);
        for _ in 0..3 {
            let keep: Vec<bool> = (0..full.n_strings()).map(|_| r.random_bool(0.6)).collect();
            subsets.push(random_subset(full.strings(), &keep));
        }
        for strings in subsets {
            let basis = SubspaceBasis::from_strings(n, n_el, strings).unwrap();
            let oracle = oracle_matrix(&h, &one, &basis);
            let ham = ProjectedHamiltonian::new(&h, basis).unwrap();
            let from_tables = matvec_matrix(&ham, &one);
            let slater_condon = ham.dense(&h, &one);
            assert!((&from_tables - &oracle).amax() < 1e-12, "n={n} N={n_el}");
            assert!((&slater_condon - &oracle).amax() < 1e-12, "n={n} N={n_el}");
        }
    }
}

#[test]
fn single_determinant_subspace() {
    let w = water(None);
    let c = Configuration::new(0b001111, 0b001111);
    let basis = build_subspace(&[c], 6, 4, 4).unwrap();
    let (ham, sol) = gas_solve(&w.hamiltonian, basis);
    assert_eq!(ham.dimension(), 1);
    assert_eq!(sol.vector.as_slice(), &[1.0]);
    let diag = determinant_element(&w.hamiltonian.eri, &OneBody::of(&w.hamiltonian), &c, &c);
    assert!((sol.energy - diag).abs() < 1e-12);
    // the aufbau determinant reproduces the RHF energy
    assert!((sol.energy - w.scf.energy).abs() < 1e-9);
}

#[test]
fn h2_full_space_equals_fci() {
    let s = h2(None);
    let (ham, sol) = gas_solve(&s.hamiltonian, SubspaceBasis::full(2, 1).unwrap());
    assert_eq!(ham.dimension(), 4);
    let dense = ham.dense(&s.hamiltonian, &OneBody::of(&s.hamiltonian));
    assert!((sol.energy - lowest(&dense)).abs() < 1e-10);
    assert!((sol.energy - H2_FCI).abs() < 1e-8, "{}", sol.energy);

    // natural occupations against the dense eigenvector and the Fock-space number operators
    let eig = SymmetricEigen::new(dense);
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k).into_owned();
    let dets: Vec<Configuration> = ham.basis().determinants().collect();
    let mut gamma = DMatrix::zeros(2, 2);
    for p in 0..2 {
        for q in 0..2 {
            for (i, ci) in dets.iter().enumerate() {
                for sigma in [0, 2] {
                    let st = ci.alpha | ci.beta << 2;
                    if let Some((t, f)) = apply_string(st, &[(p + sigma, true), (q + sigma, false)]) {
                        let j = dets.iter().position(|c| (c.alpha | c.beta << 2) == t).unwrap();
                        gamma[(p, q)] += v[j] * f * v[i];
                    }
                }
            }
        }
    }
    let rdm = one_rdm(&ham, &sol.vector);
    assert!((&rdm - &gamma).amax() < 1e-9);
    let mut occ: Vec<f64> = SymmetricEigen::new(rdm.clone()).eigenvalues.iter().copied().collect();
    occ.sort_by(|a, b| b.total_cmp(a));
    assert!((occ[0] - 1.96).abs() < 0.02 && (occ[1] - 0.04).abs() < 0.02, "{occ:?}");
    assert!((rdm.trace() - 2.0).abs() < 1e-10);

    // K copies of the same state average to the per-spin diagonal
    let spin = spin_rdm(&ham, &sol.vector);
    let copies: Vec<&SpinRdm> = std::iter::repeat_n(&spin, 10).collect();
    let n = update_occupations(&copies).unwrap();
    for p in 0..2 {
        assert!((n.n_up[p] - rdm[(p, p)] / 2.0).abs() < 1e-12);
        assert!((n.n_down[p] - n.n_up[p]).abs() < 1e-12);
    }
    assert!(n.n_up[0] > 0.97 && n.n_up[1] < 0.03);
}

#[test]
fn water_casci_matches_external_oracle() {
    let w = water(None);
    let r = casci(&w.hamiltonian, None, &ScrfSettings::default()).unwrap();
    assert_eq!(r.kind, ReferenceKind::Casci);
    assert_eq!(r.basis.dimension(), 225);
    assert!((r.solution.energy - WATER_CASCI).abs() < 1e-8, "{}", r.solution.energy);
    let ham = ProjectedHamiltonian::new(&w.hamiltonian, r.basis.clone()).unwrap();
    let dense = ham.dense(&w.hamiltonian, &OneBody::of(&w.hamiltonian));
    assert!((lowest(&dense) - r.solution.energy).abs() < 1e-9);
    let rdm = r.solution.rdm.total();
    assert!((rdm.trace() - 8.0).abs() < 1e-10);
    assert!((&rdm - rdm.transpose()).amax() < 1e-12);
}

#[test]
fn water_casci_pcm_matches_reference_implementation() {
    let w = water(Some(WATER_EPSILON));
    let ctx = w.pcm.as_ref().unwrap();
    let coupling = SolventCoupling::from_scf(ctx, &w.mos, &w.scf).unwrap();
    let r = casci(&w.hamiltonian, Some(&coupling), &ScrfSettings::default()).unwrap();
    let sol = &r.solution;
    assert!(sol.converged);
    assert!((sol.energy - WATER_CASCI_PCM).abs() < 1e-6, "{}", sol.energy);
    assert!((sol.solvation_energy - WATER_CASCI_PCM_GSOLV).abs() < 1e-6, "{}", sol.solvation_energy);
    assert!(sol.solvation_energy < 0.0);

    // G = ⟨ψ|H⁰|ψ⟩ + ½ q·φ rebuilt from the final state
    let ham = ProjectedHamiltonian::new(&w.hamiltonian, r.basis.clone()).unwrap();
    let h0 = expectation(&ham, &OneBody::of(&w.hamiltonian), &sol.vector);
    let response = coupling.response(&sol.rdm.total()).unwrap();
    assert!((h0 + response.polarization_energy - sol.energy).abs() < 1e-8);
    assert!((response.polarization_energy - sol.solvation_energy).abs() < 1e-12);
}

#[test]
fn h2_casci_pcm_matches_reference_implementation() {
    let s = h2(Some(WATER_EPSILON));
    let coupling = SolventCoupling::from_scf(s.pcm.as_ref().unwrap(), &s.mos, &s.scf).unwrap();
    let r = casci(&s.hamiltonian, Some(&coupling), &ScrfSettings::default()).unwrap();
    assert!((r.solution.energy - H2_CASCI_PCM).abs() < 1e-6, "{}", r.solution.energy);
    assert!((r.solution.solvation_energy - H2_CASCI_PCM_GSOLV).abs() < 1e-6);
}

#[test]
fn vacuum_dielectric_reproduces_gas_phase() {
    let w = water(Some(1.0));
    let gas = casci(&w.hamiltonian, None, &ScrfSettings::default()).unwrap();
    let coupling = SolventCoupling::from_scf(w.pcm.as_ref().unwrap(), &w.mos, &w.scf).unwrap();
    let solv = casci(&w.hamiltonian, Some(&coupling), &ScrfSettings::default()).unwrap();
    assert!((gas.solution.energy - solv.solution.energy).abs() < 1e-9);
    assert_eq!(solv.solution.solvation_energy, 0.0);
    assert!((gas.solution.energy - WATER_CASCI).abs() < 1e-8);
}

#[test]
fn nested_subspaces_are_monotone_and_variational() {
    let w = water(None);
    let e_casci = casci(&w.hamiltonian, None, &ScrfSettings::default()).unwrap().solution.energy;
    let strings = all_strings(6, 4);
    // grow U one string at a time in a fixed scrambled order
    let mut order: Vec<u64> = strings.clone();
    let mut r = generator(8);
    for i in (1..order.len()).rev() {
        order.swap(i, r.random_range(0..=i));
    }
    let start = order.iter().position(|&s| s == 0b001111).unwrap();
    order.swap(0, start);
    let mut prev = f64::INFINITY;
    for k in 1..=order.len() {
        let basis = SubspaceBasis::from_strings(6, 4, order[..k].to_vec()).unwrap();
        let (ham, sol) = gas_solve(&w.hamiltonian, basis);
        assert!(sol.energy <= prev + 1e-10, "k={k}");
        assert!(sol.energy >= e_casci - 1e-9);
        let dense = ham.dense(&w.hamiltonian, &OneBody::of(&w.hamiltonian));
        assert!((lowest(&dense) - sol.energy).abs() < 1e-9, "k={k}");
        prev = sol.energy;
    }
    assert!((prev - e_casci).abs() < 1e-10);
}

#[test]
fn solvated_batches_are_variational_against_solvated_casci() {
    let w = water(Some(WATER_EPSILON));
    let coupling = SolventCoupling::from_scf(w.pcm.as_ref().unwrap(), &w.mos, &w.scf).unwrap();
    let settings = ScrfSettings::default();
    let full = casci(&w.hamiltonian, Some(&coupling), &settings).unwrap().solution.energy;
    let strings = all_strings(6, 4);
    let mut r = generator(31);
    for _ in 0..4 {
        let keep: Vec<bool> = (0..strings.len()).map(|_| r.random_bool(0.5)).collect();
        let mut subset = random_subset(&strings, &keep);
        subset.push(0b001111);
        let ham = ProjectedHamiltonian::new(&w.hamiltonian, SubspaceBasis::from_strings(6, 4, subset).unwrap()).unwrap();
        let sol = scrf_subspace_solve(&ham, &OneBody::of(&w.hamiltonian), Some(&coupling), None, &settings).unwrap();
        assert!(sol.converged);
        assert!(sol.energy >= full - 1e-9, "{} < {full}", sol.energy);
        assert!(sol.solvation_energy < 0.0);
    }
}

fn exact_samples(w: &common::System, shots: u64, seed: u64) -> SampleSet {
    let r = reference_state(&w.hamiltonian, None, &ScrfSettings::default()).unwrap();
    r.sample(shots, seed).unwrap()
}

#[test]
fn full_coverage_sqd_equals_casci() {
    let w = water(None);
    let samples = exact_samples(&w, 2_000_000, 5);
    let config = SQDConfig { batches: 2, batch_size: samples.total() as usize, iterations: 1, seed: 3, ..Default::default() };
    let result = run_sqd(&w.hamiltonian, None, &samples, &config).unwrap();
    assert_eq!(result.best_batch().dimension(), 225);
    assert!((result.energy - WATER_CASCI).abs() < 1e-8);
    assert_eq!(result.hilbert_dimension, 225);
}

#[test]
fn noisy_sqd_is_variational_and_deterministic() {
    let w = water(None);
    let clean = exact_samples(&w, 4000, 1);
    let noisy = apply_noise(&clean, &NoiseModel::new(0.02, 2).unwrap());
    let base = SQDConfig { batches: 6, batch_size: 30, iterations: 3, seed: 17, workers: 1, ..Default::default() };
    let one = run_sqd(&w.hamiltonian, None, &noisy, &base).unwrap();
    let many = run_sqd(&w.hamiltonian, None, &noisy, &SQDConfig { workers: 4, ..base }).unwrap();
    assert_eq!(one.iterations, many.iterations);
    assert_eq!(one.energy.to_bits(), many.energy.to_bits());

    assert_eq!(one.iterations.len(), 3);
    let last = one.iterations.last().unwrap();
    let min = last.batches.iter().map(|b| b.energy).fold(f64::INFINITY, f64::min);
    assert_eq!(one.energy, min);
    for it in &one.iterations {
        assert!(it.failures.is_empty());
        for b in &it.batches {
            assert!(b.energy >= WATER_CASCI - 1e-9);
            assert!((b.vector.norm() - 1.0).abs() < 1e-10);
            assert_eq!(b.dimension(), b.strings.len().pow(2));
        }
    }
}

#[test]
fn identical_batches_give_identical_energies() {
    let w = water(None);
    let mut samples = SampleSet::new(6).unwrap();
    samples.add(Configuration::new(0b001111, 0b010111), 5).unwrap();
    let config = SQDConfig { batches: 10, batch_size: 3, iterations: 1, ..Default::default() };
    let r = run_sqd(&w.hamiltonian, None, &samples, &config).unwrap();
    let e0 = r.iterations[0].batches[0].energy;
    assert!(r.iterations[0].batches.iter().all(|b| (b.energy - e0).abs() < 1e-8));
    assert_eq!(r.best, 0);
}

#[test]
fn recovery_restores_symmetry_and_closure() {
    let w = water(None);
    let clean = exact_samples(&w, 100_000, 12);
    let noisy = apply_noise(&clean, &NoiseModel::new(0.05, 13).unwrap());
    assert!(noisy.iter().any(|(c, _)| c.weights() != (4, 4)));
    let occ = init_occupations(&noisy, 4, 4).unwrap();
    let rec = recover(&noisy, &occ, 4, 4, 14).unwrap();
    assert_eq!(rec.samples.total(), 100_000);
    assert!(rec.samples.iter().all(|(c, _)| c.weights() == (4, 4)));
    for (c, &n) in noisy.iter() {
        if c.weights() == (4, 4) {
            assert!(rec.samples.count(c) >= n);
        }
    }
    for batch in draw_batches(&rec, 5, 50, 15).unwrap() {
        let basis = build_subspace(&batch, 6, 4, 4).unwrap();
        assert_eq!(basis.dimension(), basis.n_strings().pow(2));
        for c in basis.determinants() {
            assert!(basis.contains(&Configuration::new(c.beta, c.alpha)));
        }
        for c in &batch {
            assert!(basis.contains(c));
        }
    }
}

#[test]
fn initial_occupations_ignore_corrupted_shots() {
    let n = 6;
    let mut r = generator(40);
    let mut s = SampleSet::new(n).unwrap();
    let strings = all_strings(n, 3);
    let mut kept = Vec::new();
    for _ in 0..1000 {
        let c = if r.random_bool(0.3) {
            Configuration::new(r.random::<u64>() & 0x3f, r.random::<u64>() & 0x3f)
        } else {
            Configuration::new(strings[r.random_range(0..strings.len())], strings[r.random_range(0..strings.len())])
        };
        s.add(c, 1).unwrap();
        if c.weights() == (3, 3) {
            kept.push(c);
        }
    }
    let occ = init_occupations(&s, 3, 3).unwrap();
    for p in 0..n {
        let up = kept.iter().filter(|c| c.alpha >> p & 1 == 1).count() as f64 / kept.len() as f64;
        let down = kept.iter().filter(|c| c.beta >> p & 1 == 1).count() as f64 / kept.len() as f64;
        assert!((occ.n_up[p] - up).abs() < 1e-12);
        assert!((occ.n_down[p] - down).abs() < 1e-12);
    }
}

#[test]
fn flip_selection_follows_the_proportional_law() {
    // weight 4 → 3: one occupied bit is removed
    let n = 6;
    let word = 0b011011u64;
    let occ = [0.9, 0.2, 0.0, 0.7, 0.4, 0.1];
    let eligible: Vec<usize> = (0..n).filter(|&p| word >> p & 1 == 1).collect();
    let weights: Vec<f64> = eligible.iter().map(|&p| 1.0 - occ[p]).collect();
    let total: f64 = weights.iter().sum();
    let shots = 100_000;
    let mut counts = vec![0usize; n];
    let mut r = generator(50);
    for _ in 0..shots {
        let (w, _) = correct_string(word, n, 3, &occ, &mut r);
        counts[(word ^ w).trailing_zeros() as usize] += 1;
    }
    for (&p, &wt) in eligible.iter().zip(&weights) {
        let prob = wt / total;
        let sigma = (prob * (1.0 - prob) / shots as f64).sqrt();
        let freq = counts[p] as f64 / shots as f64;
        assert!((freq - prob).abs() < 3.0 * sigma.max(1e-12), "bit {p}: {freq} vs {prob}");
    }
}

#[test]
fn batch_drawing() {
    let mut s = SampleSet::new(4).unwrap();
    for (k, &a) in all_strings(4, 2).iter().enumerate() {
        s.add(Configuration::new(a, 0b0011), k as u64 + 1).unwrap();
    }
    let rec = RecoveredSet { samples: s.clone(), n_alpha: 2, n_beta: 2, n_corrected: 0 };
    let total = s.total() as usize;
    let whole = draw_batches(&rec, 1, total, 3).unwrap().remove(0);
    let mut a = whole.clone();
    a.sort();
    assert_eq!(a, s.expand());
    let over = draw_batches(&rec, 2, 3 * total, 3).unwrap();
    assert!(over.iter().all(|b| b.len() == 3 * total));
    assert_eq!(draw_batches(&rec, 3, 5, 9).unwrap(), draw_batches(&rec, 3, 5, 9).unwrap());
}

#[test]
fn batches_overlap_like_hypergeometric_draws() {
    // 1000 distinct shots, batches of 100: pairwise overlap has mean 10
    let mut s = SampleSet::new(12).unwrap();
    let strings = all_strings(12, 6);
    for k in 0..1000 {
        s.add(Configuration::new(strings[k % 924], strings[k / 924]), 1).unwrap();
    }
    let rec = RecoveredSet { samples: s, n_alpha: 6, n_beta: 6, n_corrected: 0 };
    let batches = draw_batches(&rec, 10, 100, 21).unwrap();
    let mut overlaps = Vec::new();
    for i in 0..10 {
        for j in 0..i {
            assert_ne!(batches[i], batches[j]);
            overlaps.push(batches[i].iter().filter(|c| batches[j].contains(c)).count() as f64);
        }
    }
    let mean = overlaps.iter().sum::<f64>() / overlaps.len() as f64;
    // hypergeometric variance 100·0.1·0.9·900/999 ≈ 8.1 per pair; 45 pairs
    let sigma = (8.1f64 / 45.0).sqrt();
    assert!((mean - 10.0).abs() < 4.0 * sigma, "{mean}");
}

#[test]
fn rejects_open_shell_targets() {
    let h = toy_hamiltonian(4, 2, 1);
    let open = ActiveHamiltonian::new(2, 1, h.h_eff.clone(), h.eri.clone(), 0.0).unwrap();
    let mut s = SampleSet::new(4).unwrap();
    s.add(Configuration::new(0b0011, 0b0001), 1).unwrap();
    assert!(matches!(run_sqd(&open, None, &s, &SQDConfig::default()), Err(solvaq::Error::Unsupported(_))));
    assert!(matches!(casci(&open, None, &ScrfSettings::default()), Err(solvaq::Error::Unsupported(_))));
}

#[test]
fn casci_guard() {
    let n = 24;
    let h = ActiveHamiltonian::new(12, 12, DMatrix::zeros(n, n), EriTensor::zeros(n), 0.0).unwrap();
    assert!(matches!(casci(&h, None, &ScrfSettings::default()), Err(solvaq::Error::Capacity { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matvec_is_symmetric(seed in 0u64..1000, keep in proptest::collection::vec(any::<bool>(), 10)) {
        let h = toy_hamiltonian(5, 2, seed);
        let strings = random_subset(&all_strings(5, 2), &keep);
        let ham = ProjectedHamiltonian::new(&h, SubspaceBasis::from_strings(5, 2, strings).unwrap()).unwrap();
        let one = OneBody::of(&h);
        let d = ham.dimension();
        let mut r = generator(seed ^ 0xabc);
        let x: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
        let diag = ham.diagonal(&one);
        let (mut hx, mut hy) = (vec![0.0; d], vec![0.0; d]);
        ham.apply(&one, &diag, &x, &mut hx);
        ham.apply(&one, &diag, &y, &mut hy);
        let a: f64 = x.iter().zip(&hy).map(|(p, q)| p * q).sum();
        let b: f64 = hx.iter().zip(&y).map(|(p, q)| p * q).sum();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn rdm_trace_and_symmetry(seed in 0u64..1000, keep in proptest::collection::vec(any::<bool>(), 10)) {
        let h = toy_hamiltonian(5, 2, seed);
        let strings = random_subset(&all_strings(5, 2), &keep);
        let ham = ProjectedHamiltonian::new(&h, SubspaceBasis::from_strings(5, 2, strings).unwrap()).unwrap();
        let mut r = generator(seed);
        let mut psi = DVector::from_fn(ham.dimension(), |_, _| r.random_range(-1.0..1.0));
        psi.normalize_mut();
        let g = spin_rdm(&ham, &psi);
        prop_assert!((g.alpha.trace() - 2.0).abs() < 1e-10);
        prop_assert!((g.beta.trace() - 2.0).abs() < 1e-10);
        prop_assert!((&g.alpha - g.alpha.transpose()).amax() < 1e-12);
        // ⟨ψ|H|ψ⟩ one-body part equals tr(h γ) when the two-body part vanishes
        let bare = ActiveHamiltonian::new(2, 2, h.h_eff.clone(), EriTensor::zeros(5), 0.0).unwrap();
        let bare_ham = ProjectedHamiltonian::new(&bare, ham.basis().clone()).unwrap();
        let e = expectation(&bare_ham, &OneBody::of(&bare), &psi);
        prop_assert!((e - h.h_eff.component_mul(&g.total()).sum()).abs() < 1e-10);
    }
}
