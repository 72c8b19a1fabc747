//! Emptiness of the complex characteristic variety: does the span of `h_0`
//! contain a rank-one matrix `q pᵀ`?
//!
//! With `B_α` spanning the annihilator of `h_0` under the trace pairing, the
//! condition is `qᵀ B_α p = 0` for all `α`. Witnesses are searched on a
//! grid and at seeded random covectors `p` (then `q` is a kernel vector).
//! The exact stage covers `P(p) × P(q)` by affine charts and decides
//! whether each chart ideal of bilinear equations is the unit ideal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::H0Subspace;
use crate::fieldalg::{self, Chart, Polynomial, Q};
use crate::groebner::{self, GroebnerBasis, MonomialOrder};
use crate::linalg;
use crate::par::{self, Exec};
use crate::quadext::{self, QuadExt};

#[derive(Clone, Debug, Serialize)]
pub struct CharVarietyConfig {
    /// Grid entries range over `-grid_bound..=grid_bound`.
    pub grid_bound: i64,
    pub random_samples: usize,
    pub seed: u64,
    /// Reduction budget for each chart.
    pub budget: usize,
    /// Try to read an explicit witness off a lex basis when the grid fails.
    pub extract_witness: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for CharVarietyConfig {
    fn default() -> Self {
        CharVarietyConfig {
            grid_bound: 2,
            random_samples: 32,
            seed: 0,
            budget: groebner::DEFAULT_BUDGET,
            extract_witness: true,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Empty,
    Nonempty,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Trivial,
    Grid,
    Random,
    Groebner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Rational witness `(p, q)`.
    Rational,
    /// Witness over a real or imaginary quadratic extension.
    Quadratic,
    /// A chart ideal is proper; no explicit witness was extracted.
    ProperIdeal,
    /// Every chart ideal contains 1.
    UnitIdeals,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharVarietyVerdict {
    pub verdict: Verdict,
    /// Stage that settled the verdict, or exhausted its budget.
    pub stage: Stage,
    pub certificate: Option<Certificate>,
    pub witness_p: Option<Vec<QuadExt>>,
    pub witness_q: Option<Vec<QuadExt>>,
    pub spent: usize,
    pub budget: usize,
}

impl CharVarietyVerdict {
    fn with_witness(stage: Stage, p: Vec<QuadExt>, q: Vec<QuadExt>, spent: usize, budget: usize) -> Self {
        let cert = if p.iter().chain(&q).all(QuadExt::is_rational) { Certificate::Rational } else { Certificate::Quadratic };
        CharVarietyVerdict {
            verdict: Verdict::Nonempty,
            stage,
            certificate: Some(cert),
            witness_p: Some(p),
            witness_q: Some(q),
            spent,
            budget,
        }
    }
}

fn rational_vec(v: &[Q]) -> Vec<QuadExt> {
    let one = BigInt::one();
    v.iter().map(|x| QuadExt::rational(x.clone(), &one)).collect()
}

/// Exact check that `q pᵀ` lies in the span of `h`, with `p, q ≠ 0`.
pub fn validate_witness(h: &H0Subspace, p: &[QuadExt], q: &[QuadExt]) -> bool {
    let n = h.n;
    if p.len() != n || q.len() != n || p.iter().all(QuadExt::is_zero) || q.iter().all(QuadExt::is_zero) {
        return false;
    }
    let mut rat = Vec::with_capacity(n * n);
    let mut irr = Vec::with_capacity(n * n);
    for qr in q {
        for pc in p {
            let e = qr.mul(pc);
            rat.push(e.a);
            irr.push(e.b);
        }
    }
    let cols: Vec<Vec<Q>> = h.basis.iter().map(|m| m.iter().flatten().cloned().collect()).collect();
    // 1 and √d are independent over Q, and the basis is rational
    let inside = |v: &[Q]| linalg::is_zero_vec(v) || linalg::solve_in_span(&cols, v).is_some();
    inside(&rat) && inside(&irr)
}

/// Matrices spanning the annihilator of `h` under `⟨A, B⟩ = Σ A_rc B_rc`.
fn annihilator(h: &H0Subspace) -> Vec<Vec<Vec<Q>>> {
    let n = h.n;
    let rows: Vec<Vec<Q>> = h.basis.iter().map(|m| m.iter().flatten().cloned().collect()).collect();
    linalg::nullspace(&rows, n * n).into_iter().map(|v| v.chunks(n).map(<[Q]>::to_vec).collect()).collect()
}

/// Kernel vectors `q` of `K(p)`, whose rows are `(B_α p)ᵀ`.
fn kernel_at(ann: &[Vec<Vec<Q>>], n: usize, p: &[Q]) -> Vec<Vec<Q>> {
    let rows: Vec<Vec<Q>> = ann.iter().map(|b| linalg::mat_vec(b, p)).collect();
    linalg::nullspace(&rows, n)
}

fn rank_one_split(m: &[Vec<Q>]) -> Option<(Vec<Q>, Vec<Q>)> {
    let n = m.len();
    if linalg::rank(m, n) != 1 {
        return None;
    }
    let j = (0..n).find(|&j| m.iter().any(|r| !r[j].is_zero()))?;
    let q: Vec<Q> = m.iter().map(|r| r[j].clone()).collect();
    let r = q.iter().position(|x| !x.is_zero())?;
    let p: Vec<Q> = m[r].iter().map(|x| x / &q[r]).collect();
    Some((p, q))
}

/// Nonzero vectors in `{-b..=b}^n` whose first nonzero entry is positive.
fn grid(n: usize, b: i64) -> Vec<Vec<Q>> {
    let side = (2 * b + 1) as usize;
    let total = side.checked_pow(n as u32).unwrap_or(usize::MAX).min(1 << 20);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push((code % side) as i64 - b);
            code /= side;
        }
        match v.iter().find(|x| **x != 0) {
            Some(&first) if first > 0 => out.push(v.into_iter().map(fieldalg::qi).collect()),
            _ => {}
        }
    }
    out
}

fn search(ann: &[Vec<Vec<Q>>], n: usize, points: &[Vec<Q>], exec: Exec) -> Option<(Vec<Q>, Vec<Q>)> {
    for chunk in points.chunks(256) {
        let hits = par::map(exec, chunk, |p| kernel_at(ann, n, p).into_iter().next());
        if let Some((p, q)) = chunk.iter().zip(hits).find_map(|(p, h)| h.map(|q| (p.clone(), q))) {
            return Some((p, q));
        }
    }
    None
}

pub fn char_variety(h: &H0Subspace, cfg: &CharVarietyConfig) -> CharVarietyVerdict {
    let n = h.n;
    let budget = cfg.budget;
    let settled = |verdict, stage, certificate| CharVarietyVerdict {
        verdict,
        stage,
        certificate,
        witness_p: None,
        witness_q: None,
        spent: 0,
        budget,
    };
    if h.basis.is_empty() || n == 0 {
        return settled(Verdict::Empty, Stage::Trivial, None);
    }
    for m in &h.basis {
        if let Some((p, q)) = rank_one_split(m) {
            return CharVarietyVerdict::with_witness(Stage::Trivial, rational_vec(&p), rational_vec(&q), 0, budget);
        }
    }
    let ann = annihilator(h);
    if let Some((p, q)) = search(&ann, n, &grid(n, cfg.grid_bound), cfg.exec) {
        return CharVarietyVerdict::with_witness(Stage::Grid, rational_vec(&p), rational_vec(&q), 0, budget);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random: Vec<Vec<Q>> = (0..cfg.random_samples)
        .map(|_| (0..n).map(|_| fieldalg::q(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect())
        .collect();
    if let Some((p, q)) = search(&ann, n, &random, cfg.exec) {
        return CharVarietyVerdict::with_witness(Stage::Random, rational_vec(&p), rational_vec(&q), 0, budget);
    }
    exact_stage(h, &ann, cfg)
}

fn incidence_chart(n: usize) -> Chart {
    Chart::new((0..n).map(|i| format!("p{i}")).chain((0..n).map(|j| format!("q{j}")))).expect("valid names")
}

/// Chart `p_i = 1, p_{<i} = 0, q_j = 1, q_{<j} = 0`: fixed values by variable.
fn chart_fixing(n: usize, i: usize, j: usize) -> Vec<Option<Q>> {
    let mut fixed = vec![None; 2 * n];
    for f in fixed.iter_mut().take(i) {
        *f = Some(Q::zero());
    }
    fixed[i] = Some(Q::one());
    for f in fixed.iter_mut().skip(n).take(j) {
        *f = Some(Q::zero());
    }
    fixed[n + j] = Some(Q::one());
    fixed
}

fn chart_equations(ann: &[Vec<Vec<Q>>], chart: &Chart, fixed: &[Option<Q>]) -> Vec<Polynomial> {
    let n = chart.len() / 2;
    let var = |k: usize| match &fixed[k] {
        Some(v) => Polynomial::constant(chart, v.clone()),
        None => Polynomial::var(chart, k),
    };
    let ps: Vec<Polynomial> = (0..n).map(var).collect();
    let qs: Vec<Polynomial> = (n..2 * n).map(var).collect();
    ann.iter()
        .map(|b| {
            let mut f = Polynomial::zero(chart);
            for (r, row) in b.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        f = &f + &(&qs[r] * &ps[c]).scale(x);
                    }
                }
            }
            f
        })
        .filter(|f| !f.is_zero())
        .collect()
}

enum ChartOutcome {
    Unit(usize),
    Proper(usize),
    Exhausted,
}

fn exact_stage(h: &H0Subspace, ann: &[Vec<Vec<Q>>], cfg: &CharVarietyConfig) -> CharVarietyVerdict {
    let n = h.n;
    let chart = incidence_chart(n);
    let charts: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let outcomes = par::map(cfg.exec, &charts, |&(i, j)| {
        let fixed = chart_fixing(n, i, j);
        let eqs = chart_equations(ann, &chart, &fixed);
        match groebner::groebner(&eqs, &chart, MonomialOrder::DegRevLex, cfg.budget) {
            Ok(gb) if gb.is_unit() => ChartOutcome::Unit(gb.spent),
            Ok(gb) => ChartOutcome::Proper(gb.spent),
            Err(_) => ChartOutcome::Exhausted,
        }
    });
    let mut spent = 0;
    let mut exhausted = false;
    let mut proper = None;
    for (idx, o) in outcomes.iter().enumerate() {
        match o {
            ChartOutcome::Unit(s) => spent += s,
            ChartOutcome::Proper(s) => {
                spent += s;
                proper.get_or_insert(idx);
            }
            ChartOutcome::Exhausted => {
                spent += cfg.budget;
                exhausted = true;
            }
        }
    }
    let base = CharVarietyVerdict {
        verdict: Verdict::Undecided,
        stage: Stage::Groebner,
        certificate: None,
        witness_p: None,
        witness_q: None,
        spent,
        budget: cfg.budget,
    };
    if let Some(idx) = proper {
        let (i, j) = charts[idx];
        if cfg.extract_witness {
            let fixed = chart_fixing(n, i, j);
            let eqs = chart_equations(ann, &chart, &fixed);
            if let Ok(gb) = groebner::groebner(&eqs, &chart, MonomialOrder::Lex, cfg.budget) {
                if let Some(sol) = extract_point(&gb, &fixed) {
                    let (p, q) = sol.split_at(n);
                    if validate_witness(h, p, q) {
                        let mut v = CharVarietyVerdict::with_witness(Stage::Groebner, p.to_vec(), q.to_vec(), spent + gb.spent, cfg.budget);
                        v.spent = spent + gb.spent;
                        return v;
                    }
                }
            }
        }
        return CharVarietyVerdict { verdict: Verdict::Nonempty, certificate: Some(Certificate::ProperIdeal), ..base };
    }
    if exhausted {
        return base;
    }
    CharVarietyVerdict { verdict: Verdict::Empty, certificate: Some(Certificate::UnitIdeals), ..base }
}

/// Univariate polynomial over `Q(√d)`, coefficients from degree 0 upward.
type Uni = Vec<QuadExt>;

fn trim(mut u: Uni) -> Uni {
    while u.last().is_some_and(QuadExt::is_zero) {
        u.pop();
    }
    u
}

fn uni_rem(a: &Uni, b: &Uni) -> Uni {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = b[db].inv();
    while r.len() > db {
        let c = r.last().unwrap().mul(&inv);
        let shift = r.len() - 1 - db;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] = r[shift + k].sub(&c.mul(bk));
        }
        r = trim(r);
    }
    r
}

/// Monic gcd; the empty polynomial stands for zero.
fn uni_gcd(a: Uni, b: Uni) -> Uni {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().map(QuadExt::inv) {
        a = a.iter().map(|c| c.mul(&l)).collect();
    }
    a
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n > BigInt::from(1_000_000_000_000i64) {
        return None;
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    Some(out)
}

fn uni_eval_q(u: &[Q], x: &Q) -> Q {
    u.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

/// Rational roots of a nonzero rational polynomial, via the rational root
/// theorem on the integer form.
fn rational_roots(u: &[Q]) -> Vec<Q> {
    let mut roots = Vec::new();
    let low = u.iter().take_while(|c| c.is_zero()).count();
    if low > 0 {
        roots.push(Q::zero());
    }
    let core = &u[low..];
    if core.len() <= 1 {
        return roots;
    }
    let l = core.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = core.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let (Some(num), Some(den)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) else {
        return roots;
    };
    let mut cands: Vec<Q> = Vec::new();
    for a in &num {
        for b in &den {
            for s in [1, -1] {
                let c = Q::new(a * s, b.clone());
                if !cands.contains(&c) {
                    cands.push(c);
                }
            }
        }
    }
    cands.sort();
    roots.extend(cands.into_iter().filter(|c| uni_eval_q(core, c).is_zero()));
    roots
}

/// Restricts `f` to the line where every variable except `v` is assigned.
fn specialize(f: &Polynomial, v: usize, values: &[Option<QuadExt>]) -> Uni {
    let one = BigInt::one();
    let mut out: Uni = Vec::new();
    for (m, c) in f.terms() {
        let mut coef = QuadExt::rational(c.clone(), &one);
        for (k, &e) in m.exponents().iter().enumerate() {
            if k == v || e == 0 {
                continue;
            }
            let val = values[k].as_ref().expect("assigned");
            for _ in 0..e {
                coef = coef.mul(val);
            }
        }
        let e = m.exponents()[v] as usize;
        if out.len() <= e {
            out.resize(e + 1, QuadExt::rational(Q::zero(), &one));
        }
        out[e] = out[e].add(&coef);
    }
    trim(out)
}

/// Smallest variable index occurring in `f`.
fn first_var(f: &Polynomial) -> Option<usize> {
    f.terms().filter_map(|(m, _)| m.exponents().iter().position(|&e| e > 0)).min()
}

const FREE_CHOICES: [i64; 4] = [0, 1, -1, 2];
const NODE_LIMIT: usize = 4096;

/// Back-substitution on a lex basis, from the last variable to the first.
/// Values are rational except for at most one quadratic irrationality;
/// the extension field is then fixed for the remaining steps.
fn extract_point(gb: &GroebnerBasis, fixed: &[Option<Q>]) -> Option<Vec<QuadExt>> {
    let nv = fixed.len();
    let by_var: Vec<Vec<&Polynomial>> =
        (0..nv).map(|v| gb.basis.iter().filter(|f| first_var(f) == Some(v)).collect()).collect();
    let one = BigInt::one();
    let mut values: Vec<Option<QuadExt>> = fixed.iter().map(|x| x.as_ref().map(|q| QuadExt::rational(q.clone(), &one))).collect();
    let mut nodes = 0;
    let sol = dfs(nv, &by_var, fixed, &mut values, None, &mut nodes)?;
    let d = sol.iter().find(|x| !x.is_rational()).map(|x| x.d.clone()).unwrap_or(one);
    Some(sol.into_iter().map(|x| if x.is_rational() { QuadExt::rational(x.a, &d) } else { x }).collect())
}

fn dfs(
    v: usize,
    by_var: &[Vec<&Polynomial>],
    fixed: &[Option<Q>],
    values: &mut Vec<Option<QuadExt>>,
    field: Option<&BigInt>,
    nodes: &mut usize,
) -> Option<Vec<QuadExt>> {
    *nodes += 1;
    if *nodes > NODE_LIMIT {
        return None;
    }
    if v == 0 {
        return Some(values.iter().map(|x| x.clone().expect("assigned")).collect());
    }
    let var = v - 1;
    let polys: Vec<Uni> = by_var[var].iter().map(|f| specialize(f, var, values)).collect();
    if fixed[var].is_some() {
        let val = values[var].clone().expect("fixed");
        let ok = polys.iter().all(|u| u.iter().rev().fold(QuadExt::rational(Q::zero(), &val.d), |acc, c| acc.mul(&val).add(c)).is_zero());
        return if ok { dfs(var, by_var, fixed, values, field, nodes) } else { None };
    }
    let g = polys.into_iter().fold(Vec::new(), uni_gcd);
    if g.len() == 1 {
        return None;
    }
    let one = BigInt::one();
    let mut candidates: Vec<(QuadExt, Option<BigInt>)> = Vec::new();
    if g.is_empty() {
        candidates.extend(FREE_CHOICES.iter().map(|&c| (QuadExt::rational(fieldalg::qi(c), &one), None)));
    } else if g.iter().all(QuadExt::is_rational) {
        let rat: Vec<Q> = g.iter().map(|c| c.a.clone()).collect();
        candidates.extend(rational_roots(&rat).into_iter().map(|r| (QuadExt::rational(r, &one), None)));
        if rat.len() == 3 {
            for root in quadext::monic_quadratic_roots(&rat[1], &rat[0]) {
                if !root.is_rational() && field.is_none_or(|d| *d == root.d) {
                    let d = root.d.clone();
                    candidates.push((root, Some(d)));
                }
            }
        }
    } else if g.len() == 2 {
        // monic linear: x + c0
        let root = g[0].neg();
        let d = root.d.clone();
        candidates.push((root, Some(d)));
    }
    for (c, new_field) in candidates {
        values[var] = Some(c);
        let f = new_field.as_ref().or(field);
        if let Some(sol) = dfs(var, by_var, fixed, values, f, nodes) {
            return Some(sol);
        }
    }
    values[var] = None;
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::qi;

    fn h(n: usize, mats: Vec<Vec<Vec<i64>>>) -> H0Subspace {
        H0Subspace {
            n,
            basis: mats.into_iter().map(|m| m.into_iter().map(|r| r.into_iter().map(qi).collect()).collect()).collect(),
        }
    }

    fn cfg() -> CharVarietyConfig {
        CharVarietyConfig { exec: Exec::Sequential, ..CharVarietyConfig::default() }
    }

    #[test]
    fn zero_h0_is_empty() {
        let v = char_variety(&h(3, vec![]), &cfg());
        assert_eq!((v.verdict, v.stage), (Verdict::Empty, Stage::Trivial));
    }

    #[test]
    fn sl2_has_rank_one_elements() {
        let sl2 = h(2, vec![vec![vec![1, 0], vec![0, -1]], vec![vec![0, 1], vec![0, 0]], vec![vec![0, 0], vec![1, 0]]]);
        let v = char_variety(&sl2, &cfg());
        assert_eq!(v.verdict, Verdict::Nonempty);
        let (p, q) = (v.witness_p.unwrap(), v.witness_q.unwrap());
        assert!(validate_witness(&sl2, &p, &q));
        assert_eq!(p.iter().map(|x| x.a.clone()).collect::<Vec<_>>(), vec![qi(0), qi(1)]);
        assert_eq!(q.iter().map(|x| x.a.clone()).collect::<Vec<_>>(), vec![qi(1), qi(0)]);
    }

    #[test]
    fn identity_and_rotations_are_empty() {
        for m in [
            vec![vec![vec![1, 0], vec![0, 1]]],
            vec![vec![vec![0, -1], vec![1, 0]]],
            vec![vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]],
        ] {
            let n = m[0].len();
            let v = char_variety(&h(n, m), &cfg());
            assert_eq!(v.verdict, Verdict::Empty);
            assert_eq!(v.stage, Stage::Groebner);
            assert_eq!(v.certificate, Some(Certificate::UnitIdeals));
        }
    }

    #[test]
    fn complex_witness_for_symmetric_pair() {
        // span{diag(1,-1), [[0,1],[1,0]]}: rank one iff a^2 + b^2 = 0
        let hs = h(2, vec![vec![vec![1, 0], vec![0, -1]], vec![vec![0, 1], vec![1, 0]]]);
        let v = char_variety(&hs, &cfg());
        assert_eq!(v.verdict, Verdict::Nonempty);
        assert_eq!(v.stage, Stage::Groebner);
        assert_eq!(v.certificate, Some(Certificate::Quadratic));
        let (p, q) = (v.witness_p.unwrap(), v.witness_q.unwrap());
        assert!(validate_witness(&hs, &p, &q));
        assert!(p.iter().chain(&q).any(|x| !x.is_rational()));
    }

    #[test]
    fn budget_exhaustion_is_undecided() {
        let hs = h(2, vec![vec![vec![1, 0], vec![0, 1]]]);
        let v = char_variety(&hs, &CharVarietyConfig { budget: 0, ..cfg() });
        assert_eq!((v.verdict, v.stage), (Verdict::Undecided, Stage::Groebner));
    }

    #[test]
    fn roots_and_gcd() {
        // (x - 1/2)(x + 3) = x^2 + 5/2 x - 3/2
        let u = vec![fieldalg::q(-3, 2), fieldalg::q(5, 2), qi(1)];
        assert_eq!(rational_roots(&u), vec![qi(-3), fieldalg::q(1, 2)]);
        let g = uni_gcd(rational_vec(&u), rational_vec(&[qi(3), qi(1)]));
        assert_eq!(g, rational_vec(&[qi(3), qi(1)]));
        assert_eq!(rational_roots(&[qi(0), qi(0), qi(1)]), vec![qi(0)]);
    }

    #[test]
    fn witnesses_fail_validation_when_wrong() {
        let sl2 = h(2, vec![vec![vec![1, 0], vec![0, -1]]]);
        assert!(!validate_witness(&sl2, &rational_vec(&[qi(1), qi(0)]), &rational_vec(&[qi(0), qi(1)])));
        assert!(!validate_witness(&sl2, &rational_vec(&[qi(0), qi(0)]), &rational_vec(&[qi(0), qi(1)])));
    }
}
