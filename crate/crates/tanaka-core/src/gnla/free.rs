//! Free nilpotent Lie algebras via a Hall basis, and the Witt dimension
//! formula.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{Gnla, GnlaError, Result};
use crate::fieldalg::Q;
use crate::linalg::IncrementalBasis;

pub const DEFAULT_FREE_CAP: usize = 256;

fn mobius(mut m: u32) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if m > 1 {
        mu = -mu;
    }
    mu
}

/// Dimension of the degree-`k` part of the free Lie algebra on `n`
/// generators, or `None` on overflow.
pub fn try_witt_dim(n: u32, k: u32) -> Option<u128> {
    if n == 0 || k == 0 {
        return Some(0);
    }
    let mut acc: i128 = 0;
    for m in (1..=k).filter(|m| k.is_multiple_of(*m)) {
        let term = (n as i128).checked_pow(k / m)?;
        acc = acc.checked_add(mobius(m) as i128 * term)?;
    }
    Some((acc / k as i128) as u128)
}

/// Panics on `u128` overflow; use [`try_witt_dim`] for untrusted input.
pub fn witt_dim(n: u32, k: u32) -> u128 {
    try_witt_dim(n, k).expect("witt_dim overflow")
}

/// `Σ_{j ≤ k} witt_dim(n, j)`, or `None` on overflow.
pub fn free_total_dim(n: u32, k: u32) -> Option<u128> {
    (1..=k).try_fold(0u128, |acc, j| acc.checked_add(try_witt_dim(n, j)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HallElement {
    Generator(usize),
    /// `[left, right]` with indices into the Hall list.
    Bracket(usize, usize),
}

/// Hall basis of the free Lie algebra on `n` generators up to weight `k`.
/// Elements are ordered by weight, then by construction; `[u, v]` is
/// admitted when `u < v` and, for `v = [v1, v2]`, `v1 ≤ u`.
pub fn hall_basis(n: usize, k: usize) -> Vec<(HallElement, usize)> {
    let mut out: Vec<(HallElement, usize)> = (0..n).map(|g| (HallElement::Generator(g), 1)).collect();
    for w in 2..=k {
        let mut batch = Vec::new();
        for u in 0..out.len() {
            for v in u + 1..out.len() {
                if out[u].1 + out[v].1 != w {
                    continue;
                }
                let ok = match out[v].0 {
                    HallElement::Generator(_) => true,
                    HallElement::Bracket(v1, _) => v1 <= u,
                };
                if ok {
                    batch.push((HallElement::Bracket(u, v), w));
                }
            }
        }
        out.extend(batch);
    }
    out
}

type Word = Vec<u16>;

fn expand(h: &[(HallElement, usize)], i: usize, memo: &mut Vec<Option<BTreeMap<Word, Q>>>) -> BTreeMap<Word, Q> {
    if let Some(e) = &memo[i] {
        return e.clone();
    }
    let e = match h[i].0 {
        HallElement::Generator(g) => BTreeMap::from([(vec![g as u16], Q::from_integer(1.into()))]),
        HallElement::Bracket(a, b) => {
            let ea = expand(h, a, memo);
            let eb = expand(h, b, memo);
            commutator(&ea, &eb)
        }
    };
    memo[i] = Some(e.clone());
    e
}

fn commutator(a: &BTreeMap<Word, Q>, b: &BTreeMap<Word, Q>) -> BTreeMap<Word, Q> {
    let mut out: BTreeMap<Word, Q> = BTreeMap::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let c = ca * cb;
            let mut ab = wa.clone();
            ab.extend(wb);
            *out.entry(ab).or_insert_with(Q::zero) += &c;
            let mut ba = wb.clone();
            ba.extend(wa);
            *out.entry(ba).or_insert_with(Q::zero) -= &c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn label(h: &[(HallElement, usize)], i: usize) -> String {
    match h[i].0 {
        HallElement::Generator(g) => format!("x{}", g + 1),
        HallElement::Bracket(a, b) => format!("[{},{}]", label(h, a), label(h, b)),
    }
}

pub fn free_gnla(n: usize, k: usize) -> Result<Gnla> {
    free_gnla_capped(n, k, DEFAULT_FREE_CAP)
}

/// Free nilpotent Lie algebra of step `k` on `n` generators.
pub fn free_gnla_capped(n: usize, k: usize, cap: usize) -> Result<Gnla> {
    if n < 2 || k < 1 {
        return Err(GnlaError::Parameters(format!("free algebra needs n >= 2, k >= 1 (got n={n}, k={k})")));
    }
    let total = free_total_dim(n as u32, k as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(GnlaError::SizeCap { dim: total, cap });
    }
    let h = hall_basis(n, k);
    let dim = h.len();
    let mut memo = vec![None; dim];
    let exps: Vec<BTreeMap<Word, Q>> = (0..dim).map(|i| expand(&h, i, &mut memo)).collect();
    let dims: Vec<usize> = (1..=k).map(|w| h.iter().filter(|e| e.1 == w).count()).collect();
    // per weight: word index and a basis of Hall expansions
    let mut spaces: HashMap<usize, (BTreeMap<Word, usize>, IncrementalBasis, usize)> = HashMap::new();
    let offsets: Vec<usize> = (0..=k).map(|s| dims[..s].iter().sum()).collect();
    for w in 1..=k {
        let mut words = BTreeMap::new();
        for e in &exps[offsets[w - 1]..offsets[w]] {
            for word in e.keys() {
                let next = words.len();
                words.entry(word.clone()).or_insert(next);
            }
        }
        let mut basis = IncrementalBasis::new(words.len());
        for e in &exps[offsets[w - 1]..offsets[w]] {
            let kept = basis.offer(&to_vec(e, &words));
            assert!(kept, "Hall expansions are independent");
        }
        spaces.insert(w, (words, basis, offsets[w - 1]));
    }
    let mut table = vec![vec![vec![Q::zero(); dim]; dim]; dim];
    for i in 0..dim {
        for j in i + 1..dim {
            let w = h[i].1 + h[j].1;
            if w > k {
                continue;
            }
            let (words, basis, off) = &spaces[&w];
            let c = commutator(&exps[i], &exps[j]);
            if c.keys().any(|word| !words.contains_key(word)) {
                return Err(GnlaError::Grading(i, j));
            }
            let coords = basis.coordinates(&to_vec(&c, words)).ok_or(GnlaError::Grading(i, j))?;
            for (t, v) in coords.into_iter().enumerate() {
                table[j][i][off + t] = -&v;
                table[i][j][off + t] = v;
            }
        }
    }
    let labels = (0..dim).map(|i| label(&h, i)).collect();
    Gnla::new(dims, labels, table)
}

fn to_vec(e: &BTreeMap<Word, Q>, words: &BTreeMap<Word, usize>) -> Vec<Q> {
    let mut v = vec![Q::zero(); words.len()];
    for (w, c) in e {
        v[words[w]] = c.clone();
    }
    v
}
