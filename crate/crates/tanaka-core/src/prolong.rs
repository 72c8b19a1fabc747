//! Tanaka prolongation `g = m ⊕ g_0 ⊕ g_1 ⊕ ...` of a fundamental GNLA.
//!
//! An element `u ∈ g_k` (`k ≥ 0`) is a tuple of maps `u_s : g_{-s} → g_{k-s}`
//! stored as one flat vector: for each GNLA basis element `e_i`, in global
//! order, the coordinates of `u(e_i)` in the basis of the target component.
//! Negative targets use the grade blocks of the GNLA, non-negative targets
//! use the computed basis of the lower prolongation level.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::fieldalg::{self, Q};
use crate::gnla::{check_fundamental, Gnla};
use crate::linalg;
use crate::par::{self, Exec};

pub const DEFAULT_MAX_DEGREE: usize = 10;
pub const DEFAULT_UNKNOWN_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProlongError {
    #[error("GNLA is not fundamental")]
    NotFundamental,
    #[error("step {degree} needs {unknowns} unknowns, above the cap {cap}")]
    UnknownCap { degree: usize, unknowns: usize, cap: usize },
    #[error("step {degree} needs levels 0..{degree}, only {have} given")]
    MissingLevels { degree: usize, have: usize },
    #[error("degree {0} is outside the computed range")]
    DegreeOutOfRange(isize),
    #[error("element has {got} coordinates, component of degree {degree} has dimension {expected}")]
    BadElement { degree: isize, expected: usize, got: usize },
    #[error("bracket restriction is not realized by any element of degree {0}")]
    Inconsistent(isize),
}

pub type Result<T> = std::result::Result<T, ProlongError>;

#[derive(Clone, Debug)]
pub struct ProlongOptions {
    pub max_degree: usize,
    pub unknown_cap: usize,
    pub exec: Exec,
}

impl Default for ProlongOptions {
    fn default() -> Self {
        ProlongOptions { max_degree: DEFAULT_MAX_DEGREE, unknown_cap: DEFAULT_UNKNOWN_CAP, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongationLevel {
    pub degree: usize,
    /// Basis of `g_degree` as flat vectors.
    pub basis: Vec<Vec<Q>>,
    /// `offsets[i]..offsets[i + 1]` is the slot of `u(e_i)`.
    pub offsets: Vec<usize>,
}

impl ProlongationLevel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Flat vector of `Σ c_b basis_b`.
    pub fn flat(&self, coords: &[Q]) -> Vec<Q> {
        let len = *self.offsets.last().unwrap_or(&0);
        let mut out = vec![Q::zero(); len];
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }

    /// Slot of `u(e_i)` in a flat vector.
    pub fn image<'a>(&self, flat: &'a [Q], i: usize) -> &'a [Q] {
        &flat[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Status {
    /// `g_at = 0`, so every higher level vanishes.
    Terminated { at: usize },
    /// `max_degree` reached with every level nonzero.
    Capped { max_degree: usize },
}

#[derive(Clone, Debug)]
pub struct Prolongation {
    gnla: Gnla,
    levels: Vec<ProlongationLevel>,
    status: Status,
}

/// Homogeneous element of the prolongation: coordinates in the grade block
/// (negative degree) or in the level basis (non-negative degree).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub degree: isize,
    pub coords: Vec<Q>,
}

impl Element {
    pub fn new(degree: isize, coords: Vec<Q>) -> Self {
        Element { degree, coords }
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero_vec(&self.coords)
    }

    fn add(&self, o: &Element) -> Element {
        Element { degree: self.degree, coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    fn neg(&self) -> Element {
        Element { degree: self.degree, coords: self.coords.iter().map(|a| -a).collect() }
    }
}

fn target_dim(a: &Gnla, levels: &[ProlongationLevel], d: isize) -> usize {
    if d < 0 {
        let s = (-d) as usize;
        if s > a.depth() {
            0
        } else {
            a.dims()[s - 1]
        }
    } else {
        levels[d as usize].dim()
    }
}

/// Computes `g_k` from `g_0, ..., g_{k-1}`.
pub fn prolong_step(a: &Gnla, previous: &[ProlongationLevel], k: usize, opts: &ProlongOptions) -> Result<ProlongationLevel> {
    if previous.len() < k {
        return Err(ProlongError::MissingLevels { degree: k, have: previous.len() });
    }
    let n = a.total_dim();
    let grade: Vec<usize> = (0..n).map(|i| a.grade(i)).collect();
    let mut offsets = vec![0usize];
    for &s in &grade {
        let d = k as isize - s as isize;
        offsets.push(offsets.last().unwrap() + target_dim(a, previous, d));
    }
    let unknowns = *offsets.last().unwrap();
    if unknowns > opts.unknown_cap {
        return Err(ProlongError::UnknownCap { degree: k, unknowns, cap: opts.unknown_cap });
    }
    if unknowns == 0 {
        return Ok(ProlongationLevel { degree: k, basis: Vec::new(), offsets });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let blocks = par::map(opts.exec, &pairs, |&(x, y)| constraint_block(a, previous, k, &grade, &offsets, x, y));
    let rows: Vec<Vec<Q>> = blocks.into_iter().flatten().collect();
    let basis = linalg::nullspace(&rows, unknowns);
    Ok(ProlongationLevel { degree: k, basis, offsets })
}

/// Rows of `u([e_x, e_y]) - [u(e_x), e_y] - [e_x, u(e_y)] = 0`.
fn constraint_block(
    a: &Gnla,
    levels: &[ProlongationLevel],
    k: usize,
    grade: &[usize],
    offsets: &[usize],
    x: usize,
    y: usize,
) -> Vec<Vec<Q>> {
    let (sx, sy) = (grade[x], grade[y]);
    let d = k as isize - (sx + sy) as isize;
    let rows_n = target_dim(a, levels, d);
    if rows_n == 0 {
        return Vec::new();
    }
    let unknowns = *offsets.last().unwrap();
    let mut rows = vec![vec![Q::zero(); unknowns]; rows_n];
    // u([e_x, e_y])
    for (c, t) in a.basis_bracket(x, y).iter().enumerate() {
        if t.is_zero() {
            continue;
        }
        for r in 0..rows_n {
            rows[r][offsets[c] + r] += t;
        }
    }
    // - [u(e_x), e_y] + [u(e_y), e_x]
    for (src, other, sign) in [(x, y, -1i64), (y, x, 1i64)] {
        let sign = fieldalg::qi(sign);
        let dsrc = k as isize - grade[src] as isize;
        let slot = offsets[src];
        if dsrc < 0 {
            let s = (-dsrc) as usize;
            if s > a.depth() {
                continue;
            }
            let range = a.range(s);
            let base = a.range((-d) as usize).start;
            for (t, g) in range.enumerate() {
                for (c, v) in a.basis_bracket(g, other).iter().enumerate() {
                    if !v.is_zero() {
                        rows[c - base][slot + t] += &sign * v;
                    }
                }
            }
        } else {
            let lvl = &levels[dsrc as usize];
            for (beta, b) in lvl.basis.iter().enumerate() {
                for (r, v) in lvl.image(b, other).iter().enumerate() {
                    if !v.is_zero() {
                        rows[r][slot + beta] += &sign * v;
                    }
                }
            }
        }
    }
    rows.retain(|r| !linalg::is_zero_vec(r));
    rows
}

pub fn tanaka_prolongation(a: &Gnla, max_degree: usize) -> Result<Prolongation> {
    tanaka_prolongation_with(a, &ProlongOptions { max_degree, ..ProlongOptions::default() })
}

pub fn tanaka_prolongation_with(a: &Gnla, opts: &ProlongOptions) -> Result<Prolongation> {
    if !check_fundamental(a) {
        return Err(ProlongError::NotFundamental);
    }
    let mut levels: Vec<ProlongationLevel> = Vec::new();
    let mut status = Status::Capped { max_degree: opts.max_degree };
    for k in 0..=opts.max_degree {
        let lvl = prolong_step(a, &levels, k, opts)?;
        let empty = lvl.dim() == 0;
        levels.push(lvl);
        if empty {
            status = Status::Terminated { at: k };
            break;
        }
    }
    Ok(Prolongation { gnla: a.clone(), levels, status })
}

impl Prolongation {
    pub fn gnla(&self) -> &Gnla {
        &self.gnla
    }

    pub fn levels(&self) -> &[ProlongationLevel] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Option<&ProlongationLevel> {
        self.levels.get(k)
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn terminated(&self) -> bool {
        matches!(self.status, Status::Terminated { .. })
    }

    /// `dim g_0, dim g_1, ...` as computed.
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(ProlongationLevel::dim).collect()
    }

    /// `dim m + Σ dim g_k`, defined only when terminated.
    pub fn total_dim(&self) -> Option<usize> {
        self.terminated().then(|| self.gnla.total_dim() + self.dims().iter().sum::<usize>())
    }

    /// Dimension of the degree-`d` component.
    pub fn component_dim(&self, d: isize) -> Result<usize> {
        if d < 0 {
            return Ok(target_dim(&self.gnla, &self.levels, d));
        }
        match self.levels.get(d as usize) {
            Some(l) => Ok(l.dim()),
            None if self.terminated() => Ok(0),
            None => Err(ProlongError::DegreeOutOfRange(d)),
        }
    }

    fn check(&self, e: &Element) -> Result<()> {
        let expected = self.component_dim(e.degree)?;
        if e.coords.len() != expected {
            return Err(ProlongError::BadElement { degree: e.degree, expected, got: e.coords.len() });
        }
        Ok(())
    }

    pub fn zero(&self, d: isize) -> Result<Element> {
        Ok(Element::new(d, vec![Q::zero(); self.component_dim(d)?]))
    }

    /// Basis element `b` of the degree-`d` component.
    pub fn basis_element(&self, d: isize, b: usize) -> Result<Element> {
        let mut e = self.zero(d)?;
        e.coords[b] = fieldalg::q_one();
        Ok(e)
    }

    /// Flat map vector of a non-negative element.
    pub fn flat(&self, u: &Element) -> Result<Vec<Q>> {
        self.check(u)?;
        let lvl = self.levels.get(u.degree as usize).ok_or(ProlongError::DegreeOutOfRange(u.degree))?;
        Ok(lvl.flat(&u.coords))
    }

    /// `u(X)` for `u` of non-negative degree and `X` of negative degree.
    fn apply(&self, u: &Element, x: &Element) -> Result<Element> {
        let d = u.degree + x.degree;
        let mut out = self.zero(d)?;
        if out.coords.is_empty() || u.coords.is_empty() {
            return Ok(out);
        }
        let lvl = &self.levels[u.degree as usize];
        let flat = lvl.flat(&u.coords);
        let start = self.gnla.range((-x.degree) as usize).start;
        for (c, xc) in x.coords.iter().enumerate() {
            if xc.is_zero() {
                continue;
            }
            for (o, v) in out.coords.iter_mut().zip(lvl.image(&flat, start + c)) {
                *o += xc * v;
            }
        }
        Ok(out)
    }

    fn embed_negative(&self, x: &Element) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.gnla.total_dim()];
        let start = self.gnla.range((-x.degree) as usize).start;
        v[start..start + x.coords.len()].clone_from_slice(&x.coords);
        v
    }

    /// Graded bracket on `m ⊕ g_0 ⊕ g_1 ⊕ ...`.
    pub fn bracket(&self, u: &Element, v: &Element) -> Result<Element> {
        self.check(u)?;
        self.check(v)?;
        let d = u.degree + v.degree;
        match (u.degree < 0, v.degree < 0) {
            (true, true) => {
                let mut out = self.zero(d)?;
                if out.coords.is_empty() {
                    return Ok(out);
                }
                let full = self.gnla.bracket(&self.embed_negative(u), &self.embed_negative(v));
                let r = self.gnla.range((-d) as usize);
                out.coords.clone_from_slice(&full[r]);
                Ok(out)
            }
            (false, true) => self.apply(u, v),
            (true, false) => Ok(self.apply(v, u)?.neg()),
            (false, false) => self.bracket_nonneg(u, v),
        }
    }

    fn bracket_nonneg(&self, u: &Element, v: &Element) -> Result<Element> {
        let d = u.degree + v.degree;
        let target = self.zero(d)?;
        let gens: Vec<Element> = (0..self.gnla.dims()[0]).map(|i| self.basis_element(-1, i)).collect::<Result<_>>()?;
        let mut rhs = Vec::new();
        for x in &gens {
            // [[u,v],X] = [[u,X],v] + [u,[v,X]]
            let ux = self.bracket(u, x)?;
            let vx = self.bracket(v, x)?;
            let w = self.bracket(&ux, v)?.add(&self.bracket(u, &vx)?);
            rhs.extend(w.coords);
        }
        if target.coords.is_empty() {
            return if linalg::is_zero_vec(&rhs) { Ok(target) } else { Err(ProlongError::Inconsistent(d)) };
        }
        let lvl = &self.levels[d as usize];
        let cols: Vec<Vec<Q>> = lvl.basis.iter().map(|b| self.restrict_flat(lvl, b)).collect();
        let coords = linalg::solve_in_span(&cols, &rhs).ok_or(ProlongError::Inconsistent(d))?;
        Ok(Element::new(d, coords))
    }

    fn restrict_flat(&self, lvl: &ProlongationLevel, flat: &[Q]) -> Vec<Q> {
        self.gnla.range(1).flat_map(|i| lvl.image(flat, i).to_vec()).collect()
    }

    /// Restriction of a degree-0 element to `g_{-1}` as a matrix `A` with
    /// column `j` equal to `u(e_j)`.
    pub fn g0_matrix(&self, u: &Element) -> Result<Vec<Vec<Q>>> {
        if u.degree != 0 {
            return Err(ProlongError::DegreeOutOfRange(u.degree));
        }
        let lvl = &self.levels[0];
        let flat = self.flat(u)?;
        let n = self.gnla.dims()[0];
        let cols: Vec<&[Q]> = (0..n).map(|j| lvl.image(&flat, j)).collect();
        Ok((0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect())
    }

    /// The grading element `E`, acting on `g_{-s}` by `-s`.
    pub fn grading_element(&self) -> Result<Element> {
        let lvl = self.levels.first().ok_or(ProlongError::DegreeOutOfRange(0))?;
        let mut flat = vec![Q::zero(); *lvl.offsets.last().unwrap()];
        for i in 0..self.gnla.total_dim() {
            let s = self.gnla.grade(i);
            let pos = lvl.offsets[i] + (i - self.gnla.range(s).start);
            flat[pos] = fieldalg::qi(-(s as i64));
        }
        let coords = linalg::solve_in_span(&lvl.basis, &flat).ok_or(ProlongError::Inconsistent(0))?;
        Ok(Element::new(0, coords))
    }

    /// Coordinates of a flat degree-`k` map in the level basis, if it is a
    /// member of `g_k`.
    pub fn member(&self, k: usize, flat: &[Q]) -> Option<Vec<Q>> {
        let lvl = self.levels.get(k)?;
        linalg::solve_in_span(&lvl.basis, flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnla::free_gnla;

    #[test]
    fn heisenberg_g0_is_gl2_and_capped() {
        let g = free_gnla(2, 2).unwrap();
        let p = tanaka_prolongation(&g, 6).unwrap();
        assert_eq!(p.dims()[0], 4);
        assert_eq!(p.status(), Status::Capped { max_degree: 6 });
        assert!(p.dims().iter().all(|&d| d > 0));
        assert_eq!(p.total_dim(), None);
    }

    #[test]
    fn g2_and_b3_totals() {
        let p = tanaka_prolongation(&free_gnla(2, 3).unwrap(), 10).unwrap();
        assert_eq!(p.total_dim(), Some(14));
        let p = tanaka_prolongation(&free_gnla(3, 2).unwrap(), 10).unwrap();
        assert_eq!(p.dims(), vec![9, 3, 3, 0]);
        assert_eq!(p.total_dim(), Some(21));
    }

    #[test]
    fn grading_element_acts_by_degree() {
        let p = tanaka_prolongation(&free_gnla(2, 3).unwrap(), 10).unwrap();
        let e = p.grading_element().unwrap();
        for depth in 1..=3usize {
            for b in 0..p.gnla().dims()[depth - 1] {
                let x = p.basis_element(-(depth as isize), b).unwrap();
                let ex = p.bracket(&e, &x).unwrap();
                let expect: Vec<Q> = x.coords.iter().map(|c| c * fieldalg::qi(-(depth as i64))).collect();
                assert_eq!(ex.coords, expect);
            }
        }
    }

    #[test]
    fn brackets_are_antisymmetric() {
        let p = tanaka_prolongation(&free_gnla(2, 3).unwrap(), 10).unwrap();
        for d1 in [-1isize, 0, 1] {
            for d2 in [-1isize, 0, 1] {
                for i in 0..p.component_dim(d1).unwrap() {
                    for j in 0..p.component_dim(d2).unwrap() {
                        let u = p.basis_element(d1, i).unwrap();
                        let v = p.basis_element(d2, j).unwrap();
                        let a = p.bracket(&u, &v).unwrap();
                        let b = p.bracket(&v, &u).unwrap();
                        assert_eq!(a.degree, d1 + d2);
                        assert_eq!(a.coords, b.neg().coords);
                    }
                }
            }
        }
    }

    #[test]
    fn non_fundamental_is_rejected() {
        let z = vec![vec![vec![Q::zero(); 3]; 3]; 3];
        let g = Gnla::new(vec![2, 1], vec!["a".into(), "b".into(), "c".into()], z).unwrap();
        assert_eq!(tanaka_prolongation(&g, 3).unwrap_err(), ProlongError::NotFundamental);
    }

    #[test]
    fn unknown_guard() {
        let g = free_gnla(3, 2).unwrap();
        let opts = ProlongOptions { unknown_cap: 10, ..ProlongOptions::default() };
        assert!(matches!(tanaka_prolongation_with(&g, &opts), Err(ProlongError::UnknownCap { degree: 0, .. })));
    }
}
