//! Graded nilpotent Lie algebras `m = g_{-1} ⊕ ... ⊕ g_{-κ}` with exact
//! structure constants.
//!
//! Basis elements are numbered globally, grade `-1` first. An element is a
//! coordinate vector of length [`Gnla::total_dim`].

mod free;

pub use free::{free_gnla, free_gnla_capped, free_total_dim, hall_basis, try_witt_dim, witt_dim, HallElement, DEFAULT_FREE_CAP};

use num_traits::Zero;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::fieldalg::{self, PointQ, Q};
use crate::flag::{self, DerivedFlag, FlagError};
use crate::linalg::{self, IncrementalBasis};
use crate::par::{self, Exec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GnlaError {
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error("distribution is not bracket-generating at {0}")]
    NotBracketGenerating(String),
    #[error("structure constants are not antisymmetric at ({0}, {1})")]
    Antisymmetry(usize, usize),
    #[error("bracket of {0} and {1} leaves the expected grade")]
    Grading(usize, usize),
    #[error("Jacobi identity fails on ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("bracket of representatives {0} and {1} is outside the flag level")]
    FlagInconsistent(usize, usize),
    #[error("free algebra of dimension {dim} exceeds the cap {cap}")]
    SizeCap { dim: u128, cap: usize },
    #[error("invalid parameters: {0}")]
    Parameters(String),
}

pub type Result<T> = std::result::Result<T, GnlaError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gnla {
    dims: Vec<usize>,
    labels: Vec<String>,
    /// `table[i][j]` = coordinates of `[e_i, e_j]`.
    table: Vec<Vec<Vec<Q>>>,
}

impl Gnla {
    /// Validates antisymmetry, grading and the Jacobi identity.
    pub fn new(dims: Vec<usize>, labels: Vec<String>, table: Vec<Vec<Vec<Q>>>) -> Result<Self> {
        let g = Gnla { dims, labels, table };
        let n = g.total_dim();
        if g.labels.len() != n || g.table.len() != n || g.table.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return Err(GnlaError::Parameters("table shape does not match dims".into()));
        }
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let n = self.total_dim();
        for i in 0..n {
            for j in 0..n {
                let a = &self.table[i][j];
                let b = &self.table[j][i];
                if a.iter().zip(b).any(|(x, y)| *x != -y) {
                    return Err(GnlaError::Antisymmetry(i, j));
                }
                let target = self.grade(i) + self.grade(j);
                if a.iter().enumerate().any(|(k, c)| !c.is_zero() && self.grade(k) != target) {
                    return Err(GnlaError::Grading(i, j));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if !self.jacobi_holds(i, j, k) {
                        return Err(GnlaError::Jacobi(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    fn unit(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::default(); self.total_dim()];
        v[i] = fieldalg::q_one();
        v
    }

    fn jacobi_holds(&self, i: usize, j: usize, k: usize) -> bool {
        let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
        let a = self.bracket(&self.bracket(&ei, &ej), &ek);
        let b = self.bracket(&self.bracket(&ej, &ek), &ei);
        let c = self.bracket(&self.bracket(&ek, &ei), &ej);
        a.iter().zip(&b).zip(&c).all(|((x, y), z)| (x + y + z).is_zero())
    }

    /// `(dim g_{-1}, ..., dim g_{-κ})`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn depth(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// First global index of grade `-depth`.
    pub fn offset(&self, depth: usize) -> usize {
        self.dims[..depth - 1].iter().sum()
    }

    /// Global indices of grade `-depth`; empty outside `1..=κ`.
    pub fn range(&self, depth: usize) -> std::ops::Range<usize> {
        if depth == 0 || depth > self.depth() {
            return 0..0;
        }
        let o = self.offset(depth);
        o..o + self.dims[depth - 1]
    }

    /// Depth `s` of basis element `i`, which lies in `g_{-s}`.
    pub fn grade(&self, i: usize) -> usize {
        let mut acc = 0;
        for (s, d) in self.dims.iter().enumerate() {
            acc += d;
            if i < acc {
                return s + 1;
            }
        }
        panic!("basis index {i} out of range")
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> &[Q] {
        &self.table[i][j]
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.total_dim();
        let mut out = vec![Q::default(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    /// Deterministic digest of dims and structure constants, used to compare
    /// algebras built by the same frame procedure at different points.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |s: &str| {
            for b in s.bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        feed(&format!("{:?}", self.dims));
        for (i, row) in self.table.iter().enumerate() {
            for (j, v) in row.iter().enumerate().skip(i + 1) {
                for (k, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        feed(&format!("{i},{j},{k}:{c};"));
                    }
                }
            }
        }
        format!("{h:016x}")
    }
}

impl Serialize for Gnla {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Brackets<'a>(&'a Gnla);
        impl Serialize for Brackets<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let g = self.0;
                let mut m = s.serialize_map(None)?;
                for i in 0..g.total_dim() {
                    for j in i + 1..g.total_dim() {
                        let v = &g.table[i][j];
                        if linalg::is_zero_vec(v) {
                            continue;
                        }
                        let terms: Vec<String> = v
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(k, c)| format!("{c} {}", g.labels[k]))
                            .collect();
                        m.serialize_entry(&format!("[{}, {}]", g.labels[i], g.labels[j]), &terms.join(" + "))?;
                    }
                }
                m.end()
            }
        }
        let mut st = s.serialize_struct("Gnla", 3)?;
        st.serialize_field("dims", &self.dims)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("brackets", &Brackets(self))?;
        st.end()
    }
}

/// True iff iterated brackets of `g_{-1}` span the whole algebra.
pub fn check_fundamental(a: &Gnla) -> bool {
    let n = a.total_dim();
    let mut span = IncrementalBasis::new(n);
    let gens: Vec<Vec<Q>> = a.range(1).map(|i| a.unit(i)).collect();
    let mut frontier = Vec::new();
    for g in &gens {
        if span.offer(g) {
            frontier.push(g.clone());
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &gens {
            for f in &frontier {
                let b = a.bracket(g, f);
                if span.offer(&b) {
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    span.len() == n
}

/// The symbol algebra at `p` with the adapted frame of [`flag::flag_at`].
pub fn gnla_at(df: &DerivedFlag, p: &PointQ, exec: Exec) -> Result<Gnla> {
    let fp = flag::flag_at(df, p)?;
    if !flag::is_bracket_generating(&fp) {
        return Err(GnlaError::NotBracketGenerating(p.to_string()));
    }
    let dims = fp.growth.clone();
    let kappa = dims.len();
    let n = fp.ambient_dim();
    let reps = &fp.representatives;
    let levels = &fp.rep_levels;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let offsets: Vec<usize> = (0..=kappa).map(|s| dims[..s].iter().sum()).collect();
    let rows = par::try_map(exec, &pairs, |&(i, j)| -> Result<Vec<Q>> {
        let s = levels[i] + levels[j];
        let mut out = vec![Q::default(); n];
        if s > kappa {
            return Ok(out);
        }
        let br = fieldalg::lie_bracket(&reps[i], &reps[j]).map_err(FlagError::from)?;
        let v = fieldalg::evaluate(&br, p).map_err(FlagError::from)?;
        let coords = fp.coordinates(&v).ok_or(GnlaError::FlagInconsistent(i, j))?;
        if coords[offsets[s]..].iter().any(|c| !c.is_zero()) {
            return Err(GnlaError::FlagInconsistent(i, j));
        }
        out[offsets[s - 1]..offsets[s]].clone_from_slice(&coords[offsets[s - 1]..offsets[s]]);
        Ok(out)
    })?;
    let mut table = vec![vec![vec![Q::default(); n]; n]; n];
    for (&(i, j), v) in pairs.iter().zip(rows) {
        table[j][i] = v.iter().map(|c| -c).collect();
        table[i][j] = v;
    }
    let mut labels = Vec::with_capacity(n);
    for (s, &d) in dims.iter().enumerate() {
        for l in 0..d {
            labels.push(format!("e{}_{}", s + 1, l + 1));
        }
    }
    Gnla::new(dims, labels, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::{qi, Chart, Polynomial, VectorField};
    use crate::flag::derived_flag;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names.iter().map(|s| s.to_string())).unwrap()
    }

    #[test]
    fn heisenberg_symbol() {
        let c = chart(&["x", "y", "z"]);
        let x = Polynomial::var(&c, 0);
        let frame = [VectorField::basis(&c, 0), VectorField::basis(&c, 1).add(&VectorField::basis(&c, 2).scale_poly(&x))];
        let df = derived_flag(&frame, 6).unwrap();
        let g = gnla_at(&df, &PointQ::origin(&c), Exec::Sequential).unwrap();
        assert_eq!(g.dims(), &[2, 1]);
        assert_eq!(g.basis_bracket(0, 1), &[qi(0), qi(0), qi(1)]);
        assert_eq!(g.basis_bracket(1, 0), &[qi(0), qi(0), qi(-1)]);
        assert_eq!(g.basis_bracket(0, 2), &[qi(0), qi(0), qi(0)]);
        assert!(check_fundamental(&g));
    }

    #[test]
    fn integrable_plane_is_abelian() {
        let c = chart(&["x", "y"]);
        let df = derived_flag(&[VectorField::basis(&c, 0), VectorField::basis(&c, 1)], 6).unwrap();
        let g = gnla_at(&df, &PointQ::origin(&c), Exec::Sequential).unwrap();
        assert_eq!(g.dims(), &[2]);
        assert!(linalg::is_zero_vec(g.basis_bracket(0, 1)));
    }

    #[test]
    fn non_bracket_generating_is_rejected() {
        let c = chart(&["x", "y"]);
        let df = derived_flag(&[VectorField::basis(&c, 0)], 6).unwrap();
        assert!(matches!(
            gnla_at(&df, &PointQ::origin(&c), Exec::Sequential),
            Err(GnlaError::NotBracketGenerating(_))
        ));
    }

    #[test]
    fn abelian_with_two_grades_is_not_fundamental() {
        let z = vec![vec![vec![Q::default(); 3]; 3]; 3];
        let g = Gnla::new(vec![2, 1], vec!["a".into(), "b".into(), "c".into()], z).unwrap();
        assert!(!check_fundamental(&g));
    }

    #[test]
    fn bad_tables_are_rejected() {
        let mut t = vec![vec![vec![Q::default(); 3]; 3]; 3];
        t[0][1][2] = qi(1);
        let labels = vec!["a".to_string(), "b".into(), "c".into()];
        assert_eq!(Gnla::new(vec![2, 1], labels.clone(), t.clone()), Err(GnlaError::Antisymmetry(0, 1)));
        t[1][0][2] = qi(-1);
        t[0][1][0] = qi(1);
        t[1][0][0] = qi(-1);
        assert_eq!(Gnla::new(vec![2, 1], labels, t), Err(GnlaError::Grading(0, 1)));
    }

    #[test]
    fn serializes_nonzero_brackets() {
        let c = chart(&["x", "y", "z"]);
        let x = Polynomial::var(&c, 0);
        let frame = [VectorField::basis(&c, 0), VectorField::basis(&c, 1).add(&VectorField::basis(&c, 2).scale_poly(&x))];
        let df = derived_flag(&frame, 6).unwrap();
        let g = gnla_at(&df, &PointQ::origin(&c), Exec::Sequential).unwrap();
        let js = serde_json::to_value(&g).unwrap();
        assert_eq!(js["dims"], serde_json::json!([2, 1]));
        assert_eq!(js["brackets"]["[e1_1, e1_2]"], "1 e2_1");
    }
}
