//! Certification of explicit symmetry fields, closure of a symmetry span,
//! the second filtration via `Ψ`-maps, and graded symbols.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::fieldalg::{self, FieldError, Monomial, PointQ, Polynomial, VectorField, Q};
use crate::flag::{self, DerivedFlag, FlagAtPoint, FlagError};
use crate::linalg::{self, IncrementalBasis};
use crate::par::{self, Exec};
use crate::prolong::{Element, ProlongError, Prolongation};

pub const DEFAULT_FILTRATION_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
    #[error("field {0} is not a symmetry of the distribution")]
    NotSymmetry(usize),
    #[error("value at the point is outside the top flag level")]
    OutsideFlag,
    #[error("empty frame")]
    EmptyFrame,
    #[error("prolongation does not match the flag at the point")]
    Mismatch,
    #[error("property violated: {0}")]
    Property(String),
}

pub type Result<T> = std::result::Result<T, SymError>;

/// Determinant of a small square polynomial matrix by cofactor expansion.
fn det(m: &[Vec<&Polynomial>], rows: &[usize], cols: &[usize]) -> Polynomial {
    let chart = m[0][0].chart();
    if rows.len() == 1 {
        return m[rows[0]][cols[0]].clone();
    }
    let mut acc = Polynomial::zero(chart);
    let r = rows[0];
    for (t, &c) in cols.iter().enumerate() {
        if m[r][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det(m, &rows[1..], &rest);
        let term = m[r][c] * &minor;
        acc = if t % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// True iff every `(r+1)`-minor of `[frame | v]` vanishes identically.
fn in_span_identically(frame: &[VectorField], v: &VectorField, exec: Exec) -> bool {
    if v.is_zero() {
        return true;
    }
    let r = frame.len();
    let dim = v.chart().len();
    if r + 1 > dim {
        return true;
    }
    // m[row][col]: component `row` of column field `col`
    let cols: Vec<&VectorField> = frame.iter().chain(std::iter::once(v)).collect();
    let m: Vec<Vec<&Polynomial>> = (0..dim).map(|i| cols.iter().map(|f| f.component(i)).collect()).collect();
    let all_cols: Vec<usize> = (0..=r).collect();
    let subsets = combinations(dim, r + 1);
    par::all(exec, &subsets, |rows| det(&m, rows, &all_cols).is_zero())
}

pub fn is_symmetry(x: &VectorField, frame: &[VectorField]) -> Result<bool> {
    is_symmetry_with(x, frame, Exec::default())
}

/// `[X, Y_i] ∈ span(frame)` as a polynomial identity, for every frame field.
pub fn is_symmetry_with(x: &VectorField, frame: &[VectorField], exec: Exec) -> Result<bool> {
    let Some(first) = frame.first() else {
        return Err(SymError::EmptyFrame);
    };
    fieldalg::check_same_chart(first.chart(), x.chart())?;
    for y in frame {
        let b = fieldalg::lie_bracket(x, y)?;
        if !in_span_identically(frame, &b, exec) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryAlgebra {
    #[serde(skip)]
    pub fields: Vec<VectorField>,
    /// `structure[i][j][k]`: coefficient of field `k` in `[F_i, F_j]`.
    #[serde(skip)]
    pub structure: Option<Vec<Vec<Vec<Q>>>>,
    pub closed: bool,
    /// First pair whose bracket is not a constant combination.
    pub offending: Option<(usize, usize)>,
    /// Rank of the fields over the constants.
    pub rank: usize,
}

impl SymmetryAlgebra {
    pub fn dim(&self) -> usize {
        self.rank
    }

    /// Jacobi identity on the structure constants.
    pub fn jacobi_holds(&self) -> bool {
        let Some(c) = &self.structure else {
            return false;
        };
        let n = self.fields.len();
        let br = |x: &[Q], y: &[Q]| -> Vec<Q> {
            let mut out = vec![Q::zero(); n];
            for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    for (o, t) in out.iter_mut().zip(&c[i][j]) {
                        *o += xi * yj * t;
                    }
                }
            }
            out
        };
        let unit = |i: usize| {
            let mut v = vec![Q::zero(); n];
            v[i] = fieldalg::q_one();
            v
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, d) = (unit(i), unit(j), unit(k));
                    let s1 = br(&br(&a, &b), &d);
                    let s2 = br(&br(&b, &d), &a);
                    let s3 = br(&br(&d, &a), &b);
                    if s1.iter().zip(&s2).zip(&s3).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn coefficient_vector(f: &VectorField, keys: &BTreeMap<(usize, Monomial), usize>) -> Option<Vec<Q>> {
    let mut v = vec![Q::zero(); keys.len()];
    for (i, c) in f.components().iter().enumerate() {
        for (m, q) in c.terms() {
            v[*keys.get(&(i, m.clone()))?] = q.clone();
        }
    }
    Some(v)
}

/// Pairwise brackets of `fields` resolved as constant combinations.
pub fn closure(fields: &[VectorField], frame: &[VectorField], exec: Exec) -> Result<SymmetryAlgebra> {
    for (i, f) in fields.iter().enumerate() {
        if !is_symmetry_with(f, frame, exec)? {
            return Err(SymError::NotSymmetry(i));
        }
    }
    let mut keys = BTreeMap::new();
    for f in fields {
        for (i, c) in f.components().iter().enumerate() {
            for (m, _) in c.terms() {
                let next = keys.len();
                keys.entry((i, m.clone())).or_insert(next);
            }
        }
    }
    let cols: Vec<Vec<Q>> = fields.iter().map(|f| coefficient_vector(f, &keys).expect("own keys")).collect();
    let rank = linalg::rank(&cols, keys.len());
    let n = fields.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let solved = par::try_map(exec, &pairs, |&(i, j)| -> Result<Option<Vec<Q>>> {
        let b = fieldalg::lie_bracket(&fields[i], &fields[j])?;
        Ok(coefficient_vector(&b, &keys).and_then(|v| linalg::solve_in_span(&cols, &v)))
    })?;
    let mut structure = vec![vec![vec![Q::zero(); n]; n]; n];
    let mut offending = None;
    for (&(i, j), s) in pairs.iter().zip(solved) {
        match s {
            Some(c) => {
                structure[j][i] = c.iter().map(|x| -x).collect();
                structure[i][j] = c;
            }
            None => {
                offending.get_or_insert((i, j));
            }
        }
    }
    let closed = offending.is_none();
    Ok(SymmetryAlgebra {
        fields: fields.to_vec(),
        structure: closed.then_some(structure),
        closed,
        offending,
        rank,
    })
}

/// True iff `Y_1 ⋯ Y_t (f)` vanishes at `p` for all frame words of length
/// `t ≤ k`, including `f(p)` itself.
pub fn vanishing_order_delta(f: &Polynomial, frame: &[VectorField], p: &PointQ, k: usize) -> Result<bool> {
    let mut level: HashSet<Polynomial> = HashSet::from([f.clone()]);
    for t in 0..=k {
        for g in &level {
            fieldalg::check_same_chart(g.chart(), p.chart())?;
            if !g.eval(p.values()).is_zero() {
                return Ok(false);
            }
        }
        if t == k {
            break;
        }
        let mut next = HashSet::new();
        for g in &level {
            for y in frame {
                let d = fieldalg::apply(y, g)?;
                if !d.is_zero() {
                    next.insert(d);
                }
            }
        }
        level = next;
    }
    Ok(true)
}

/// `[[..[X, Y_1], ..], Y_t]` evaluated at `p`.
pub fn psi(x: &VectorField, args: &[VectorField], p: &PointQ) -> Result<Vec<Q>> {
    let mut cur = x.clone();
    for y in args {
        cur = fieldalg::lie_bracket(&cur, y)?;
    }
    Ok(fieldalg::evaluate(&cur, p)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum FiltrationDegree {
    Exact(i64),
    /// `Ψ` vanished up to the cap; the degree is at least the cap.
    AtLeast(usize),
}

fn g_minus1_reps(fp: &FlagAtPoint) -> Vec<VectorField> {
    fp.representatives.iter().zip(&fp.rep_levels).filter(|(_, &l)| l == 1).map(|(f, _)| f.clone()).collect()
}

/// All nested brackets `[[..[X, Y_{a_1}], ..], Y_{a_t}]`, tuples in
/// lexicographic order.
fn nested(prev: &[VectorField], ys: &[VectorField], exec: Exec) -> Result<Vec<VectorField>> {
    let pairs: Vec<(usize, usize)> = (0..prev.len()).flat_map(|a| (0..ys.len()).map(move |b| (a, b))).collect();
    Ok(par::try_map(exec, &pairs, |&(a, b)| fieldalg::lie_bracket(&prev[a], &ys[b]))?)
}

/// Largest `i` with `X ∈ L(p)^i` in the second filtration.
pub fn filtration_degree(x: &VectorField, df: &DerivedFlag, p: &PointQ, cap: usize, exec: Exec) -> Result<FiltrationDegree> {
    if !is_symmetry_with(x, df.frame(), exec)? {
        return Err(SymError::NotSymmetry(0));
    }
    let fp = flag::flag_at(df, p)?;
    filtration_degree_at(x, &fp, p, cap, exec)
}

fn filtration_degree_at(x: &VectorField, fp: &FlagAtPoint, p: &PointQ, cap: usize, exec: Exec) -> Result<FiltrationDegree> {
    let v = fieldalg::evaluate(x, p)?;
    if !linalg::is_zero_vec(&v) {
        let s = fp.level_of(&v).ok_or(SymError::OutsideFlag)?;
        return Ok(FiltrationDegree::Exact(-(s as i64)));
    }
    let ys = g_minus1_reps(fp);
    let mut cur = vec![x.clone()];
    for i in 0..cap {
        cur = nested(&cur, &ys, exec)?;
        let vanish = par::try_map(exec, &cur, |f| fieldalg::evaluate(f, p))?.iter().all(|v| linalg::is_zero_vec(v));
        if !vanish {
            return Ok(FiltrationDegree::Exact(i as i64));
        }
        cur.retain(|f| !f.is_zero());
        if cur.is_empty() {
            return Ok(FiltrationDegree::AtLeast(cap));
        }
    }
    Ok(FiltrationDegree::AtLeast(cap))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSymbol {
    pub degree: FiltrationDegree,
    /// Negative degree: coordinates of the class of `X(p)` in `g_degree`.
    pub class: Option<Vec<Q>>,
    /// Non-negative degree `i`: `Ψ^{i+1}` on tuples of the adapted `g_{-1}`
    /// basis (lexicographic), each value in `g_{-1}` coordinates.
    pub tensor: Option<Vec<Vec<Q>>>,
    /// Coordinates in the computed basis of `g_i` of the element `u` with
    /// `[..[u, e_{i+1}], …, e_1] = (−1)^i Ψ(Y_1, …, Y_{i+1})`.
    pub certificate: Option<Vec<Q>>,
}

/// Symbol of `X` in `gr L_p`, with a membership certificate in `g_i` for
/// non-negative degrees. `pro` must be the prolongation of the symbol
/// algebra of `df` at `p`.
pub fn graded_symbol(x: &VectorField, df: &DerivedFlag, pro: &Prolongation, p: &PointQ, exec: Exec) -> Result<GradedSymbol> {
    if !is_symmetry_with(x, df.frame(), exec)? {
        return Err(SymError::NotSymmetry(0));
    }
    let fp = flag::flag_at(df, p)?;
    if fp.growth != pro.gnla().dims() {
        return Err(SymError::Mismatch);
    }
    let degree = filtration_degree_at(x, &fp, p, DEFAULT_FILTRATION_CAP, exec)?;
    let i = match degree {
        FiltrationDegree::Exact(i) => i,
        FiltrationDegree::AtLeast(_) => {
            return Ok(GradedSymbol { degree, class: None, tensor: None, certificate: None });
        }
    };
    if i < 0 {
        let s = (-i) as usize;
        let v = fieldalg::evaluate(x, p)?;
        let coords = fp.coordinates(&v).ok_or(SymError::OutsideFlag)?;
        let r = pro.gnla().range(s);
        return Ok(GradedSymbol { degree, class: Some(coords[r].to_vec()), tensor: None, certificate: None });
    }
    let i = i as usize;
    let ys = g_minus1_reps(&fp);
    let n1 = ys.len();
    let mut cur = vec![x.clone()];
    for _ in 0..=i {
        cur = nested(&cur, &ys, exec)?;
    }
    let mut tensor = Vec::with_capacity(cur.len());
    for f in &cur {
        let v = fieldalg::evaluate(f, p)?;
        let c = fp.coordinates(&v).ok_or(SymError::OutsideFlag)?;
        if c[n1..].iter().any(|x| !x.is_zero()) {
            return Err(SymError::Property(format!("Ψ^{} leaves Δ(p)", i + 1)));
        }
        tensor.push(c[..n1].to_vec());
    }
    // the same tensor for each basis element of g_i
    let dim_i = pro.component_dim(i as isize)?;
    let tuples = tuples(n1, i + 1);
    let mut cols = Vec::with_capacity(dim_i);
    for b in 0..dim_i {
        let u = pro.basis_element(i as isize, b)?;
        let mut col = Vec::with_capacity(tuples.len() * n1);
        for t in &tuples {
            // Ψ(Y_1, …, Y_{i+1}) pairs with the last argument first
            let mut e = u.clone();
            for &a in t.iter().rev() {
                e = pro.bracket(&e, &pro.basis_element(-1, a)?)?;
            }
            col.extend(e.coords);
        }
        cols.push(col);
    }
    let sign = if i.is_multiple_of(2) { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
    let target: Vec<Q> = tensor.iter().flatten().map(|v| v * &sign).collect();
    let certificate = if linalg::is_zero_vec(&target) {
        Some(vec![Q::zero(); dim_i])
    } else {
        linalg::solve_in_span(&cols, &target)
    };
    match certificate {
        Some(c) => Ok(GradedSymbol { degree, class: None, tensor: Some(tensor), certificate: Some(c) }),
        None => Err(SymError::Property(format!("symbol of degree {i} is not in the computed g_{i}"))),
    }
}

fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..n).map(move |a| {
            let mut t = t.clone();
            t.push(a);
            t
        })).collect();
    }
    out
}

/// Checks `Ψ^j_X(Y_1, …, Y_j)(p) ∈ Δ_{s_1+…+s_j−i}(p)` for all `j`-tuples of
/// adapted representatives, `Y_t` of level `s_t`, where `i` is the
/// filtration degree of `X`. Levels `≤ 0` mean the zero space.
pub fn psi_ranges_hold(x: &VectorField, degree: i64, df: &DerivedFlag, p: &PointQ, j: usize, exec: Exec) -> Result<bool> {
    let fp = flag::flag_at(df, p)?;
    let reps = &fp.representatives;
    let levels = &fp.rep_levels;
    let mut cur: Vec<(VectorField, usize)> = vec![(x.clone(), 0)];
    for _ in 0..j {
        let pairs: Vec<(usize, usize)> = (0..cur.len()).flat_map(|a| (0..reps.len()).map(move |b| (a, b))).collect();
        cur = par::try_map(exec, &pairs, |&(a, b)| -> Result<(VectorField, usize)> {
            Ok((fieldalg::lie_bracket(&cur[a].0, &reps[b])?, cur[a].1 + levels[b]))
        })?;
    }
    for (f, s) in &cur {
        let v = fieldalg::evaluate(f, p)?;
        let target = *s as i64 - degree;
        let ok = if target <= 0 {
            linalg::is_zero_vec(&v)
        } else {
            let mut b = IncrementalBasis::new(fp.ambient_dim());
            for w in fp.basis_of(target as isize) {
                b.offer(w);
            }
            b.contains(&v)
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The bracket of two fields, as an element of the prolongation at `p`, is
/// compared with the prolonged bracket of their symbols. Returns `None` when
/// a degree is not exact.
pub fn symbol_of_bracket_matches(
    x: &VectorField,
    y: &VectorField,
    df: &DerivedFlag,
    pro: &Prolongation,
    p: &PointQ,
    exec: Exec,
) -> Result<Option<bool>> {
    let sx = graded_symbol(x, df, pro, p, exec)?;
    let sy = graded_symbol(y, df, pro, p, exec)?;
    let (FiltrationDegree::Exact(i), FiltrationDegree::Exact(j)) = (sx.degree, sy.degree) else {
        return Ok(None);
    };
    let ex = symbol_element(&sx, i)?;
    let ey = symbol_element(&sy, j)?;
    let prod = pro.bracket(&ex, &ey)?;
    let b = fieldalg::lie_bracket(x, y)?;
    let sb = graded_symbol(&b, df, pro, p, exec)?;
    match sb.degree {
        FiltrationDegree::Exact(k) if k == i + j => Ok(Some(symbol_element(&sb, k)?.coords == prod.coords)),
        FiltrationDegree::Exact(k) if k < i + j => Ok(Some(false)),
        _ => Ok(Some(prod.is_zero())),
    }
}

/// Image under the graded homomorphism `gr L_p → g`. Symmetries bracket
/// with the opposite sign to frame fields, so negative classes flip sign.
fn symbol_element(s: &GradedSymbol, deg: i64) -> Result<Element> {
    let coords = match (&s.class, &s.certificate) {
        (Some(c), _) => c.iter().map(|v| -v).collect(),
        (None, Some(c)) => c.clone(),
        _ => return Err(SymError::Mismatch),
    };
    Ok(Element::new(deg as isize, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::{qi, Chart};

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names.iter().map(|s| s.to_string())).unwrap()
    }

    fn heisenberg() -> (Chart, Vec<VectorField>) {
        let c = chart(&["x", "y", "z"]);
        let x = Polynomial::var(&c, 0);
        (c.clone(), vec![VectorField::basis(&c, 0), VectorField::basis(&c, 1).add(&VectorField::basis(&c, 2).scale_poly(&x))])
    }

    #[test]
    fn contact_symmetries() {
        let (c, frame) = heisenberg();
        // ∂_z and ∂_y are symmetries, x∂_y is not
        assert!(is_symmetry(&VectorField::basis(&c, 2), &frame).unwrap());
        assert!(is_symmetry(&VectorField::basis(&c, 1), &frame).unwrap());
        let bad = VectorField::basis(&c, 1).scale_poly(&Polynomial::var(&c, 0));
        assert!(!is_symmetry(&bad, &frame).unwrap());
    }

    #[test]
    fn closure_of_translations() {
        let (c, frame) = heisenberg();
        let alg = closure(&[VectorField::basis(&c, 2), VectorField::basis(&c, 1)], &frame, Exec::Sequential).unwrap();
        assert!(alg.closed && alg.jacobi_holds());
        assert_eq!(alg.dim(), 2);
    }

    #[test]
    fn vanishing_orders() {
        let c = chart(&["x", "y"]);
        let x2 = Polynomial::var(&c, 0).pow(2);
        let frame = [VectorField::basis(&c, 0)];
        let o = PointQ::origin(&c);
        assert!(vanishing_order_delta(&x2, &frame, &o, 1).unwrap());
        assert!(!vanishing_order_delta(&x2, &frame, &o, 2).unwrap());
        assert!(vanishing_order_delta(&Polynomial::zero(&c), &frame, &o, 5).unwrap());
    }

    #[test]
    fn psi_of_translation() {
        let (c, _) = heisenberg();
        let p = PointQ::new(&c, vec![qi(1), qi(2), qi(3)]).unwrap();
        assert_eq!(psi(&VectorField::basis(&c, 0), &[], &p).unwrap(), vec![qi(1), qi(0), qi(0)]);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(6, 3).len(), 20);
        assert_eq!(tuples(2, 3).len(), 8);
    }
}
