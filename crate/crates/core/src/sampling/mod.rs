//! Measurement-outcome multisets: exact sampling from a CI vector, an i.i.d.
//! bit-flip channel, and a plain-text sample file format.
//!
//! A configuration holds one occupation word per spin. Bit `p` of a word is
//! orbital `p`; in text, orbital 0 is the rightmost character of its block.

pub mod rng;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use rng::{child_seed, Purpose};

/// Shots per independently seeded RNG chunk.
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub alpha: u64,
    pub beta: u64,
}

impl Configuration {
    pub fn new(alpha: u64, beta: u64) -> Self {
        Self { alpha, beta }
    }

    pub fn weights(&self) -> (u32, u32) {
        (self.alpha.count_ones(), self.beta.count_ones())
    }

    /// `"ALPHA BETA"` with orbital 0 rightmost in each block.
    pub fn to_bits(&self, n_orb: usize) -> String {
        format!("{} {}", word_to_bits(self.alpha, n_orb), word_to_bits(self.beta, n_orb))
    }
}

pub fn word_to_bits(word: u64, n_orb: usize) -> String {
    (0..n_orb).rev().map(|p| if word >> p & 1 == 1 { '1' } else { '0' }).collect()
}

fn bits_to_word(text: &str, n_orb: usize, line: usize) -> Result<u64> {
    if text.len() != n_orb {
        return Err(Error::parse(line, format!("bitstring {text:?} has length {}, expected {n_orb}", text.len())));
    }
    let mut w = 0u64;
    for (k, c) in text.chars().enumerate() {
        let bit = n_orb - 1 - k;
        match c {
            '0' => {}
            '1' => w |= 1 << bit,
            _ => return Err(Error::parse(line, format!("non-binary character {c:?} in {text:?}"))),
        }
    }
    Ok(w)
}

fn mask(n_orb: usize) -> u64 {
    if n_orb >= 64 {
        u64::MAX
    } else {
        (1u64 << n_orb) - 1
    }
}

/// Multiset of configurations over `n_orb` spatial orbitals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleSet {
    n_orb: usize,
    entries: BTreeMap<Configuration, u64>,
}

impl SampleSet {
    pub fn new(n_orb: usize) -> Result<Self> {
        if n_orb > 64 {
            return Err(Error::Capacity { what: "orbitals per spin string", value: n_orb as u128, limit: 64 });
        }
        Ok(Self { n_orb, entries: BTreeMap::new() })
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn add(&mut self, config: Configuration, count: u64) -> Result<()> {
        let m = !mask(self.n_orb);
        if config.alpha & m != 0 || config.beta & m != 0 {
            return Err(Error::Domain(format!("configuration has bits beyond orbital {}", self.n_orb)));
        }
        if count > 0 {
            *self.entries.entry(config).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn count(&self, config: &Configuration) -> u64 {
        self.entries.get(config).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn n_unique(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending configuration order.
    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, &u64)> {
        self.entries.iter()
    }

    /// Every shot as its own element, in entry order.
    pub fn expand(&self) -> Vec<Configuration> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (c, &n) in &self.entries {
            out.extend(std::iter::repeat_n(*c, n as usize));
        }
        out
    }

    fn merge(&mut self, other: BTreeMap<Configuration, u64>) {
        for (c, n) in other {
            *self.entries.entry(c).or_insert(0) += n;
        }
    }
}

/// Draws `shots` configurations i.i.d. from |c_I|².
pub fn sample_exact(
    determinants: &[Configuration],
    amplitudes: &[f64],
    n_orb: usize,
    shots: u64,
    seed: u64,
) -> Result<SampleSet> {
    if determinants.len() != amplitudes.len() || determinants.is_empty() {
        return Err(Error::Domain("determinant and amplitude lists must be non-empty and of equal length".into()));
    }
    let norm2: f64 = amplitudes.iter().map(|a| a * a).sum();
    if !((norm2.sqrt() - 1.0).abs() <= 1e-10) {
        return Err(Error::Domain(format!("CI vector is not normalized (norm {})", norm2.sqrt())));
    }
    let mut cdf = Vec::with_capacity(amplitudes.len());
    let mut acc = 0.0;
    for a in amplitudes {
        acc += a * a;
        cdf.push(acc);
    }
    let mut set = SampleSet::new(n_orb)?;
    for d in determinants {
        set.add(*d, 0)?;
    }
    let n_chunks = (shots as usize).div_ceil(CHUNK);
    let parts: Vec<BTreeMap<Configuration, u64>> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::generator(child_seed(seed, Purpose::Sample, k as u64, 0));
            let len = CHUNK.min(shots as usize - k * CHUNK);
            let mut counts = BTreeMap::new();
            for _ in 0..len {
                let u = r.random::<f64>() * acc;
                let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                *counts.entry(determinants[i]).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    for p in parts {
        set.merge(p);
    }
    Ok(set)
}

/// Independent bit flips with probability `p` on each of the 2·n_orb bits of every shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Config(format!("bit-flip probability must lie in [0, 1), got {p}")));
        }
        Ok(Self { p, seed })
    }
}

pub fn apply_noise(samples: &SampleSet, noise: &NoiseModel) -> SampleSet {
    if noise.p == 0.0 {
        return samples.clone();
    }
    let shots = samples.expand();
    let n = samples.n_orb;
    let parts: Vec<BTreeMap<Configuration, u64>> = shots
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(k, chunk)| {
            let mut r = rng::generator(child_seed(noise.seed, Purpose::Noise, k as u64, 0));
            let mut counts = BTreeMap::new();
            for c in chunk {
                let mut flip = [0u64; 2];
                for f in &mut flip {
                    for p in 0..n {
                        if r.random::<f64>() < noise.p {
                            *f |= 1 << p;
                        }
                    }
                }
                let noisy = Configuration::new(c.alpha ^ flip[0], c.beta ^ flip[1]);
                *counts.entry(noisy).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    let mut out = SampleSet { n_orb: n, entries: BTreeMap::new() };
    for p in parts {
        out.merge(p);
    }
    out
}

pub fn write_samples_string(samples: &SampleSet) -> String {
    let mut out = format!("n_orb={}\n", samples.n_orb);
    for (c, n) in &samples.entries {
        let _ = writeln!(out, "{} {n}", c.to_bits(samples.n_orb));
    }
    out
}

pub fn write_samples(samples: &SampleSet, path: &Path) -> Result<()> {
    std::fs::write(path, write_samples_string(samples)).map_err(|e| Error::io(path, e))
}

pub fn read_samples(path: &Path) -> Result<SampleSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_samples(&text)
}

/// Parses the `n_orb=N` header followed by `ALPHA BETA COUNT` records.
pub fn parse_samples(text: &str) -> Result<SampleSet> {
    let mut set: Option<SampleSet> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some(s) = set.as_mut() else {
            let n = content
                .strip_prefix("n_orb=")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::parse(line, format!("expected header `n_orb=N`, found {content:?}")))?;
            if n == 0 || n > 64 {
                return Err(Error::parse(line, format!("n_orb must lie in 1..=64, got {n}")));
            }
            set = Some(SampleSet::new(n)?);
            continue;
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(line, "expected `ALPHA BETA COUNT`"));
        }
        let alpha = bits_to_word(fields[0], s.n_orb, line)?;
        let beta = bits_to_word(fields[1], s.n_orb, line)?;
        let count: u64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid count {:?}", fields[2])))?;
        if count == 0 {
            return Err(Error::parse(line, "count must be at least 1"));
        }
        s.add(Configuration::new(alpha, beta), count)?;
    }
    Ok(set.unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_convention() {
        let s = parse_samples("n_orb=4\n0011 0011 17\n").unwrap();
        assert_eq!(s.n_unique(), 1);
        assert_eq!(s.count(&Configuration::new(0b0011, 0b0011)), 17);
        assert_eq!(word_to_bits(0b0001, 4), "0001");
        assert_eq!(Configuration::new(0b0101, 0b1000).to_bits(4), "0101 1000");
    }

    #[test]
    fn empty_and_comment_only_files() {
        let s = parse_samples("").unwrap();
        assert!(s.is_empty());
        assert_eq!(s.total(), 0);
        let s = parse_samples("# nothing\nn_orb=3 # header\n\n# still nothing\n").unwrap();
        assert_eq!((s.n_orb(), s.total()), (3, 0));
    }

    #[test]
    fn parse_errors_name_lines() {
        for (text, line) in [
            ("n_orb=4\n0011 0021 1\n", 2),
            ("n_orb=4\n0011 011 1\n", 2),
            ("n_orb=4\n# c\n0011 0011\n", 3),
            ("n_orb=4\n0011 0011 0\n", 2),
            ("0011 0011 1\n", 1),
            ("n_orb=70\n", 1),
        ] {
            match parse_samples(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn duplicates_aggregate() {
        let s = parse_samples("n_orb=2\n01 10 3\n01 10 4\n").unwrap();
        assert_eq!(s.total(), 7);
        assert_eq!(s.n_unique(), 1);
    }

    #[test]
    fn bits_beyond_n_orb_rejected() {
        let mut s = SampleSet::new(3).unwrap();
        assert!(s.add(Configuration::new(0b1000, 0), 1).is_err());
        assert!(SampleSet::new(65).is_err());
    }

    #[test]
    fn single_determinant_delta() {
        let c = Configuration::new(0b011, 0b011);
        let s = sample_exact(&[c], &[1.0], 3, 1000, 5).unwrap();
        assert_eq!(s.count(&c), 1000);
        assert_eq!(s.n_unique(), 1);
        assert!(sample_exact(&[c], &[0.9], 3, 10, 5).is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let mut s = SampleSet::new(4).unwrap();
        s.add(Configuration::new(0b0011, 0b0101), 12).unwrap();
        s.add(Configuration::new(0b1001, 0b0011), 3).unwrap();
        assert_eq!(apply_noise(&s, &NoiseModel::new(0.0, 9).unwrap()), s);
        assert!(NoiseModel::new(1.0, 0).is_err());
        assert!(NoiseModel::new(-0.1, 0).is_err());
    }
}
