//! Occupation strings: bit `p` set means spatial orbital `p` is occupied.

/// Sign of `a_q` acting on `s` (orbitals below `q` that are occupied).
#[inline]
pub(crate) fn annihilation_sign(s: u64, q: usize) -> f64 {
    let below = s & ((1u64 << q) - 1);
    if below.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `a†_p a_q |s⟩ = sign |t⟩`; requires `q ∈ s`, `p ∉ s ∖ {q}`.
#[inline]
pub(crate) fn excite(s: u64, p: usize, q: usize) -> (u64, f64) {
    let s1 = s & !(1u64 << q);
    let sign = annihilation_sign(s, q) * annihilation_sign(s1, p);
    (s1 | (1u64 << p), sign)
}

pub(crate) fn occupied(s: u64) -> impl Iterator<Item = usize> {
    let mut w = s;
    std::iter::from_fn(move || {
        if w == 0 {
            return None;
        }
        let p = w.trailing_zeros() as usize;
        w &= w - 1;
        Some(p)
    })
}

/// All `n_orb`-bit words of weight `n_el`, ascending.
pub fn all_strings(n_orb: usize, n_el: usize) -> Vec<u64> {
    if n_el > n_orb || n_orb > 64 {
        return Vec::new();
    }
    if n_el == 0 {
        return vec![0];
    }
    let first = u64::MAX >> (64 - n_el);
    let last = first << (n_orb - n_el);
    let mut out = Vec::new();
    let mut s = first;
    loop {
        out.push(s);
        if s == last {
            break;
        }
        // Gosper's hack: next word with the same popcount
        let c = s & s.wrapping_neg();
        let r = s.wrapping_add(c);
        if r == 0 {
            break;
        }
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

/// Strings within `level` orbital substitutions of the lowest `n_el` orbitals.
pub fn strings_within(n_orb: usize, n_el: usize, level: usize) -> Vec<u64> {
    let reference = if n_el == 0 { 0 } else { u64::MAX >> (64 - n_el) };
    all_strings(n_orb, n_el)
        .into_iter()
        .filter(|s| ((s & !reference).count_ones() as usize) <= level)
        .collect()
}

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}
