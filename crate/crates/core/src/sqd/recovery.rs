//! Self-consistent configuration recovery and batch drawing.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sampling::rng::{self, child_seed, Purpose};
use crate::sampling::{Configuration, SampleSet};

const CHUNK: usize = 1 << 13;

/// Expected occupancy of each spatial orbital per spin.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OccupationDistribution {
    pub n_up: Vec<f64>,
    pub n_down: Vec<f64>,
}

impl OccupationDistribution {
    pub fn n_orb(&self) -> usize {
        self.n_up.len()
    }

    /// Occupancies of a single configuration.
    pub fn from_configuration(c: &Configuration, n_orb: usize) -> Self {
        let bits = |w: u64| (0..n_orb).map(|p| (w >> p & 1) as f64).collect();
        Self { n_up: bits(c.alpha), n_down: bits(c.beta) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_up.len() != self.n_down.len() {
            return Err(Error::Domain("alpha and beta occupations differ in length".into()));
        }
        if self.n_up.iter().chain(&self.n_down).any(|v| !(-1e-12..=1.0 + 1e-12).contains(v)) {
            return Err(Error::Domain("occupations must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Occupations averaged over the shots that already carry the target particle numbers.
pub fn init_occupations(samples: &SampleSet, n_alpha: usize, n_beta: usize) -> Result<OccupationDistribution> {
    let n = samples.n_orb();
    let mut up = vec![0.0; n];
    let mut down = vec![0.0; n];
    let mut total = 0u64;
    for (c, &count) in samples.iter() {
        if c.weights() != (n_alpha as u32, n_beta as u32) {
            continue;
        }
        total += count;
        for p in 0..n {
            up[p] += (c.alpha >> p & 1) as f64 * count as f64;
            down[p] += (c.beta >> p & 1) as f64 * count as f64;
        }
    }
    if total == 0 {
        return Err(Error::RecoveryBootstrap { n_alpha: n_alpha as u32, n_beta: n_beta as u32 });
    }
    let t = total as f64;
    Ok(OccupationDistribution { n_up: up.iter().map(|v| v / t).collect(), n_down: down.iter().map(|v| v / t).collect() })
}

/// Configurations that all carry the target particle numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredSet {
    pub samples: SampleSet,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Shots that needed at least one flip.
    pub n_corrected: u64,
}

/// Flips bits of one spin string until its weight is `target`. Each flip picks
/// among the bits whose flip moves the weight toward `target` with probability
/// proportional to |x_p − n_p|, or uniformly when all those weights vanish.
pub fn correct_string<R: Rng>(mut word: u64, n_orb: usize, target: usize, occ: &[f64], rng: &mut R) -> (u64, bool) {
    let mut uniform = false;
    loop {
        let w = word.count_ones() as usize;
        if w == target {
            return (word, uniform);
        }
        let remove = w > target;
        let eligible: Vec<usize> = (0..n_orb).filter(|&p| (word >> p & 1 == 1) == remove).collect();
        let weights: Vec<f64> = eligible
            .iter()
            .map(|&p| {
                let x = (word >> p & 1) as f64;
                (x - occ[p]).abs()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut k = eligible.len() - 1;
            for (i, &wt) in weights.iter().enumerate() {
                if u < wt {
                    k = i;
                    break;
                }
                u -= wt;
            }
            // never land on a zero-weight bit through rounding
            while weights[k] == 0.0 {
                k -= 1;
            }
            k
        } else {
            uniform = true;
            rng.random_range(0..eligible.len())
        };
        word ^= 1 << eligible[pick];
    }
}

/// Repairs every shot with wrong particle numbers; correct shots pass through.
pub fn recover(
    samples: &SampleSet,
    occ: &OccupationDistribution,
    n_alpha: usize,
    n_beta: usize,
    seed: u64,
) -> Result<RecoveredSet> {
    let n = samples.n_orb();
    occ.validate()?;
    if occ.n_orb() != n {
        return Err(Error::Domain(format!("occupations cover {} orbitals, samples {n}", occ.n_orb())));
    }
    if n_alpha > n || n_beta > n {
        return Err(Error::Domain(format!("({n_alpha}, {n_beta}) electrons exceed {n} orbitals")));
    }
    let target = (n_alpha as u32, n_beta as u32);
    let mut out = SampleSet::new(n)?;
    let mut broken = Vec::new();
    for (c, &count) in samples.iter() {
        if c.weights() == target {
            out.add(*c, count)?;
        } else {
            broken.extend(std::iter::repeat_n(*c, count as usize));
        }
    }
    let parts: Vec<(BTreeMap<Configuration, u64>, bool)> = broken
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(k, chunk)| {
            let mut r = rng::generator(child_seed(seed, Purpose::Recovery, k as u64, 0));
            let mut counts = BTreeMap::new();
            let mut uniform = false;
            for c in chunk {
                let (a, ua) = correct_string(c.alpha, n, n_alpha, &occ.n_up, &mut r);
                let (b, ub) = correct_string(c.beta, n, n_beta, &occ.n_down, &mut r);
                uniform |= ua || ub;
                *counts.entry(Configuration::new(a, b)).or_insert(0) += 1;
            }
            (counts, uniform)
        })
        .collect();
    let mut uniform = false;
    for (counts, u) in parts {
        uniform |= u;
        for (c, k) in counts {
            out.add(c, k)?;
        }
    }
    if uniform {
        log::info!("configuration recovery fell back to uniform bit selection (degenerate occupations)");
    }
    Ok(RecoveredSet { samples: out, n_alpha, n_beta, n_corrected: broken.len() as u64 })
}

/// `count` independent batches of `batch_size` shots each, drawn without
/// replacement from the recovered multiset (with replacement when the batch is
/// larger than the multiset).
pub fn draw_batches(recovered: &RecoveredSet, count: usize, batch_size: usize, seed: u64) -> Result<Vec<Vec<Configuration>>> {
    let shots = recovered.samples.expand();
    if shots.is_empty() {
        return Err(Error::Domain("cannot draw batches from an empty sample set".into()));
    }
    if count == 0 || batch_size == 0 {
        return Err(Error::Config("batch count and batch size must be positive".into()));
    }
    Ok((0..count)
        .map(|b| {
            let mut r = rng::generator(child_seed(seed, Purpose::Batch, b as u64, 0));
            if batch_size <= shots.len() {
                index::sample(&mut r, shots.len(), batch_size).into_iter().map(|i| shots[i]).collect()
            } else {
                (0..batch_size).map(|_| shots[r.random_range(0..shots.len())]).collect()
            }
        })
        .collect())
}
