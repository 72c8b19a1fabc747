//! Weak derived flag `Δ_1 ⊂ Δ_2 ⊂ ...` with `Γ(Δ_{i+1}) = [Γ(Δ), Γ(Δ_i)]`,
//! growth vectors at rational points, regularity probing and Cauchy
//! characteristic spaces.
//!
//! Each `Δ_i` is kept as a spanning set of polynomial fields (a module
//! generating set, not a basis). Pointwise dimensions come from exact row
//! reduction of the evaluated spanning fields.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fieldalg::{self, Chart, FieldError, PointQ, VectorField, Q};
use crate::linalg::{self, IncrementalBasis};
use crate::par::{self, Exec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlagError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("empty frame")]
    EmptyFrame,
    #[error("kappa cap must be at least 1")]
    ZeroCap,
    #[error("level {level} outside the computed range 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("no probe points")]
    NoProbes,
}

pub type Result<T> = std::result::Result<T, FlagError>;

/// Default number of random probe points added to the base point.
pub const DEFAULT_PROBE_SAMPLES: usize = 8;

/// Origin (or `base`) followed by `samples` seeded pseudo-random rational
/// points with numerators in `-4..=4` and denominators in `1..=3`.
pub fn probe_points(chart: &Chart, base: Option<&PointQ>, samples: usize, seed: u64) -> Vec<PointQ> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![base.cloned().unwrap_or_else(|| PointQ::origin(chart))];
    for _ in 0..samples {
        let vals = (0..chart.len())
            .map(|_| fieldalg::q(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
            .collect();
        pts.push(PointQ::new(chart, vals).expect("arity"));
    }
    pts
}

#[derive(Clone, Debug)]
pub struct FlagOptions {
    pub kappa_cap: usize,
    /// Points at which pointwise ranks are compared to detect stabilization.
    pub probes: Vec<PointQ>,
    pub degree_cap: u32,
    pub exec: Exec,
}

impl FlagOptions {
    pub fn for_chart(chart: &Chart, kappa_cap: usize) -> Self {
        FlagOptions {
            kappa_cap,
            probes: probe_points(chart, None, DEFAULT_PROBE_SAMPLES, 0),
            degree_cap: fieldalg::DEFAULT_DEGREE_CAP,
            exec: Exec::default(),
        }
    }
}

/// Spanning sets of the weak derived flag.
#[derive(Clone, Debug)]
pub struct DerivedFlag {
    chart: Chart,
    /// `new_at[i]` holds the fields first added at level `i + 1`.
    new_at: Vec<Vec<VectorField>>,
    kappa_cap: usize,
    capped: bool,
}

impl DerivedFlag {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn frame(&self) -> &[VectorField] {
        &self.new_at[0]
    }

    /// Number of computed levels.
    pub fn depth(&self) -> usize {
        self.new_at.len()
    }

    pub fn kappa_cap(&self) -> usize {
        self.kappa_cap
    }

    /// True if the cap was reached before pointwise ranks stabilized.
    pub fn capped(&self) -> bool {
        self.capped
    }

    /// Fields first appearing at `level` (1-based).
    pub fn new_fields(&self, level: usize) -> &[VectorField] {
        &self.new_at[level - 1]
    }

    /// All spanning fields of `Δ_level` in insertion order.
    pub fn spanning(&self, level: usize) -> Vec<VectorField> {
        self.new_at[..level.min(self.depth())].iter().flatten().cloned().collect()
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.depth() {
            Err(FlagError::LevelOutOfRange { level, depth: self.depth() })
        } else {
            Ok(())
        }
    }
}

fn rank_at(fields: &[VectorField], p: &PointQ) -> usize {
    let rows: Vec<Vec<Q>> = fields.iter().map(|f| fieldalg::evaluate(f, p).expect("chart checked")).collect();
    linalg::rank(&rows, p.chart().len())
}

/// Derived flag with the default probe points (origin plus eight seeded
/// random points).
pub fn derived_flag(frame: &[VectorField], kappa_cap: usize) -> Result<DerivedFlag> {
    let chart = frame.first().ok_or(FlagError::EmptyFrame)?.chart().clone();
    derived_flag_with(frame, &FlagOptions::for_chart(&chart, kappa_cap))
}

pub fn derived_flag_with(frame: &[VectorField], opts: &FlagOptions) -> Result<DerivedFlag> {
    let chart = frame.first().ok_or(FlagError::EmptyFrame)?.chart().clone();
    if opts.kappa_cap == 0 {
        return Err(FlagError::ZeroCap);
    }
    if opts.probes.is_empty() {
        return Err(FlagError::NoProbes);
    }
    for f in frame {
        fieldalg::check_same_chart(&chart, f.chart())?;
    }
    for p in &opts.probes {
        fieldalg::check_same_chart(&chart, p.chart())?;
    }
    let n = chart.len();
    let mut seen: HashSet<VectorField> = HashSet::new();
    let mut level1 = Vec::new();
    for f in frame {
        if seen.insert(f.normalized()) {
            level1.push(f.clone());
        }
    }
    let mut new_at = vec![level1];
    let mut all: Vec<VectorField> = new_at[0].clone();
    let mut ranks: Vec<usize> = par::map(opts.exec, &opts.probes, |p| rank_at(&all, p));
    let mut capped = false;
    loop {
        if ranks.iter().all(|&r| r == n) {
            break;
        }
        if new_at.len() >= opts.kappa_cap {
            capped = true;
            break;
        }
        let last = new_at.last().expect("nonempty");
        let pairs: Vec<(&VectorField, &VectorField)> =
            frame.iter().flat_map(|f| last.iter().map(move |s| (f, s))).collect();
        let brackets = par::try_map(opts.exec, &pairs, |(f, s)| {
            fieldalg::lie_bracket_capped(f, s, opts.degree_cap)
        })?;
        let mut fresh = Vec::new();
        for b in brackets {
            if b.is_zero() {
                continue;
            }
            if seen.insert(b.normalized()) {
                fresh.push(b);
            }
        }
        let mut extended = all.clone();
        extended.extend(fresh.iter().cloned());
        let new_ranks: Vec<usize> = par::map(opts.exec, &opts.probes, |p| rank_at(&extended, p));
        if new_ranks == ranks {
            break;
        }
        new_at.push(fresh);
        all = extended;
        ranks = new_ranks;
    }
    Ok(DerivedFlag { chart, new_at, kappa_cap: opts.kappa_cap, capped })
}

/// The flag evaluated at a point, with an adapted basis chosen greedily
/// from the spanning fields in insertion order.
#[derive(Clone, Debug)]
pub struct FlagAtPoint {
    pub point: PointQ,
    /// Adapted basis vectors; the first `dims[i]` span `Δ_{i+1}(p)`.
    pub basis: Vec<Vec<Q>>,
    /// Cumulative dimensions `dim Δ_1(p), dim Δ_2(p), ...` per computed level.
    pub dims: Vec<usize>,
    /// Incremental growth vector (trailing zeros trimmed).
    pub growth: Vec<usize>,
    /// Degree of nonholonomy at the point, when bracket-generating.
    pub kappa: Option<usize>,
    /// Spanning field whose value is the matching basis vector.
    pub representatives: Vec<VectorField>,
    /// Flag level (1-based) each representative was taken from.
    pub rep_levels: Vec<usize>,
    ambient: usize,
}

impl FlagAtPoint {
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Adapted basis of `Δ_level(p)`; `Δ_s = 0` for `s <= 0` and the top
    /// computed level beyond the depth.
    pub fn basis_of(&self, level: isize) -> &[Vec<Q>] {
        if level <= 0 {
            return &[];
        }
        let i = (level as usize).min(self.dims.len());
        &self.basis[..self.dims[i - 1]]
    }

    pub fn dim_of(&self, level: isize) -> usize {
        self.basis_of(level).len()
    }

    /// Cumulative convention `(dim Δ_1, dim Δ_2, ...)` up to `κ`.
    pub fn growth_cumulative(&self) -> Vec<usize> {
        self.growth
            .iter()
            .scan(0, |acc, g| {
                *acc += g;
                Some(*acc)
            })
            .collect()
    }

    /// Smallest `s` with `v ∈ Δ_s(p)`, or `None` if `v` is outside the top
    /// level. Zero vectors report `Some(0)`.
    pub fn level_of(&self, v: &[Q]) -> Option<usize> {
        if linalg::is_zero_vec(v) {
            return Some(0);
        }
        let mut b = IncrementalBasis::new(self.ambient);
        let mut start = 0;
        for (lvl, &d) in self.dims.iter().enumerate() {
            for w in &self.basis[start..d] {
                b.offer(w);
            }
            start = d;
            if b.contains(v) {
                return Some(lvl + 1);
            }
        }
        None
    }

    /// Coordinates of `v` in the adapted basis, if `v` lies in the top level.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        let mut b = IncrementalBasis::new(self.ambient);
        for w in &self.basis {
            b.offer(w);
        }
        b.coordinates(v)
    }
}

pub fn flag_at(df: &DerivedFlag, p: &PointQ) -> Result<FlagAtPoint> {
    fieldalg::check_same_chart(df.chart(), p.chart())?;
    let n = df.chart().len();
    let mut b = IncrementalBasis::new(n);
    let mut reps = Vec::new();
    let mut rep_levels = Vec::new();
    let mut dims = Vec::new();
    for level in 1..=df.depth() {
        for f in df.new_fields(level) {
            let v = fieldalg::evaluate(f, p)?;
            if b.offer(&v) {
                reps.push(f.clone());
                rep_levels.push(level);
            }
        }
        dims.push(b.len());
    }
    let mut growth: Vec<usize> = dims
        .iter()
        .scan(0, |prev, &d| {
            let g = d - *prev;
            *prev = d;
            Some(g)
        })
        .collect();
    while growth.last() == Some(&0) {
        growth.pop();
    }
    let kappa = dims.iter().position(|&d| d == n).map(|i| i + 1);
    Ok(FlagAtPoint {
        point: p.clone(),
        basis: b.vectors().to_vec(),
        dims,
        growth,
        kappa,
        representatives: reps,
        rep_levels,
        ambient: n,
    })
}

pub fn is_bracket_generating(fp: &FlagAtPoint) -> bool {
    fp.dims.last().copied() == Some(fp.ambient)
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub growths: Vec<Vec<usize>>,
    pub regular_at_samples: bool,
    pub samples: usize,
}

/// Growth vectors at every probe point. Agreement across samples is all
/// this reports; it never certifies regularity globally.
pub fn regularity_probe(df: &DerivedFlag, points: &[PointQ], exec: Exec) -> Result<RegularityReport> {
    if points.is_empty() {
        return Err(FlagError::NoProbes);
    }
    let flags = par::try_map(exec, points, |p| flag_at(df, p))?;
    let growths: Vec<Vec<usize>> = flags.into_iter().map(|f| f.growth).collect();
    let regular = growths.windows(2).all(|w| w[0] == w[1]);
    Ok(RegularityReport { growths, regular_at_samples: regular, samples: points.len() })
}

/// Basis of the Cauchy characteristic space of `Δ_level` at `p`: the
/// vectors `v = ζ(p)`, `ζ ∈ Γ(Δ_level)`, with `[ζ, Γ(Δ_level)](p) ⊂ Δ_level(p)`.
///
/// The condition is tensorial in `ζ(p)` at points where `Δ_level` has locally
/// constant rank, so constant combinations of the spanning fields suffice.
pub fn cauchy_characteristic_space(df: &DerivedFlag, level: usize, p: &PointQ, exec: Exec) -> Result<Vec<Vec<Q>>> {
    df.check_level(level)?;
    fieldalg::check_same_chart(df.chart(), p.chart())?;
    let n = df.chart().len();
    let span = df.spanning(level);
    let values: Vec<Vec<Q>> = span.iter().map(|f| fieldalg::evaluate(f, p)).collect::<fieldalg::Result<_>>()?;
    let mut delta = IncrementalBasis::new(n);
    for v in &values {
        delta.offer(v);
    }
    // covectors annihilating Δ_level(p)
    let annihilator = linalg::nullspace(delta.vectors(), n);
    let m = span.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
    let brackets = par::try_map(exec, &pairs, |&(a, b)| -> Result<Vec<Q>> {
        if a == b {
            return Ok(vec![Q::default(); n]);
        }
        let br = fieldalg::lie_bracket(&span[a], &span[b])?;
        Ok(fieldalg::evaluate(&br, p)?)
    })?;
    // rows: for each (b, eta): sum_a c_a eta([S_a, S_b](p)) = 0
    let mut rows = Vec::new();
    for b in 0..m {
        for eta in &annihilator {
            rows.push((0..m).map(|a| linalg::dot(eta, &brackets[a * m + b])).collect::<Vec<Q>>());
        }
    }
    let combos = linalg::nullspace(&rows, m);
    let mut out = IncrementalBasis::new(n);
    for c in combos {
        let mut v = vec![Q::default(); n];
        for (ca, va) in c.iter().zip(&values) {
            for (x, y) in v.iter_mut().zip(va) {
                *x += ca * y;
            }
        }
        out.offer(&v);
    }
    Ok(out.vectors().to_vec())
}
