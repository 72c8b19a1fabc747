//! Exact linear algebra over `Q`.
//!
//! Elimination is fraction-free: rows are scaled to primitive integer
//! vectors and combined with integer multipliers, dividing out the row
//! content after every step. Pivots are taken column by column from the
//! first eligible row, so results are deterministic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::fieldalg::Q;

/// Reduced row echelon form with integer rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub ncols: usize,
    /// Nonzero rows, one per pivot, in pivot-column order.
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

fn primitive_integer_row(row: &[Q]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for v in row {
        if !v.is_zero() {
            lcm = lcm.lcm(v.denom());
        }
    }
    let mut out: Vec<BigInt> = row.iter().map(|v| (v * Q::from_integer(lcm.clone())).to_integer()).collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        if !v.is_zero() {
            g = g.gcd(v);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.iter_mut() {
        *v = &*v / &g;
    }
}

/// Row-reduces `rows` (each of length `ncols`).
pub fn echelon(rows: &[Vec<Q>], ncols: usize) -> Echelon {
    let mut work: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "row length");
            primitive_integer_row(r)
        })
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut done = 0usize;
    for col in 0..ncols {
        if done == work.len() {
            break;
        }
        let Some(pr) = (done..work.len()).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(done, pr);
        if work[done][col].is_negative() {
            for v in work[done].iter_mut() {
                *v = -&*v;
            }
        }
        let pivot_row = work[done].clone();
        let a = pivot_row[col].clone();
        let eliminate = |row: &mut Vec<BigInt>| {
            let b = row[col].clone();
            if b.is_zero() {
                return;
            }
            let g = a.gcd(&b);
            let (ma, mb) = (&a / &g, &b / &g);
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v = &*v * &ma - p * &mb;
            }
            make_primitive(row);
        };
        work.iter_mut()
            .enumerate()
            .filter(|(r, _)| *r != done)
            .for_each(|(_, row)| eliminate(row));
        pivots.push(col);
        done += 1;
    }
    work.truncate(done);
    work.retain(|r| r.iter().any(|v| !v.is_zero()));
    Echelon { ncols, rows: work, pivots }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column with that
    /// coordinate set to 1.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![Q::zero(); self.ncols];
                x[free] = Q::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !row[free].is_zero() {
                        x[p] = -Q::new(row[free].clone(), row[p].clone());
                    }
                }
                x
            })
            .collect()
    }
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    echelon(rows, ncols).rank()
}

pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    echelon(rows, ncols).nullspace()
}

/// Solves `sum_j x_j columns[j] = target`; `None` if inconsistent. Free
/// variables are set to zero.
pub fn solve_in_span(columns: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let n = target.len();
    let m = columns.len();
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r: Vec<Q> = columns.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let ech = echelon(&rows, m + 1);
    if ech.pivots.last() == Some(&m) {
        return None;
    }
    let mut x = vec![Q::zero(); m];
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        x[p] = Q::new(row[m].clone(), row[p].clone());
    }
    Some(x)
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn mat_vec(m: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Greedy basis builder: vectors are offered in order and kept if
/// independent of those already kept. Keeps enough bookkeeping to express
/// any vector of the span in coordinates of the kept vectors.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    dim: usize,
    kept: Vec<Vec<Q>>,
    /// Reduced rows with their pivot column and the combination of kept
    /// vectors that produces them.
    reduced: Vec<(usize, Vec<Q>, Vec<Q>)>,
}

impl IncrementalBasis {
    pub fn new(dim: usize) -> Self {
        IncrementalBasis { dim, kept: Vec::new(), reduced: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Q>] {
        &self.kept
    }

    /// Reduces `v`; returns the remainder and the combination (in kept
    /// coordinates) that was subtracted.
    fn reduce(&self, v: &[Q]) -> (Vec<Q>, Vec<Q>) {
        let mut rem = v.to_vec();
        let mut comb = vec![Q::zero(); self.kept.len()];
        for (p, row, rc) in &self.reduced {
            if rem[*p].is_zero() {
                continue;
            }
            let f = &rem[*p] / &row[*p];
            for (r, x) in rem.iter_mut().zip(row) {
                if !x.is_zero() {
                    *r -= &f * x;
                }
            }
            for (c, x) in comb.iter_mut().zip(rc) {
                if !x.is_zero() {
                    *c += &f * x;
                }
            }
        }
        (rem, comb)
    }

    /// Adds `v` if independent; returns whether it was kept.
    pub fn offer(&mut self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let (rem, comb) = self.reduce(v);
        let Some(p) = rem.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        // rem = v - sum comb_k kept_k
        let mut rc: Vec<Q> = comb.into_iter().map(|c| -c).collect();
        rc.push(Q::one());
        for (_, _, other) in self.reduced.iter_mut() {
            other.push(Q::zero());
        }
        self.kept.push(v.to_vec());
        self.reduced.push((p, rem, rc));
        true
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        is_zero_vec(&self.reduce(v).0)
    }

    /// Coordinates of `v` in the kept vectors, or `None` outside the span.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        let (rem, comb) = self.reduce(v);
        is_zero_vec(&rem).then_some(comb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::{q, qi};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect()
    }

    #[test]
    fn nullspace_small() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(is_zero_vec(&mat_vec(&a, v)));
        }
        assert_eq!(ns[0], vec![qi(-2), qi(1), qi(0)]);
    }

    #[test]
    fn rank_with_fractions() {
        let a = vec![vec![q(1, 2), q(1, 3)], vec![qi(3), qi(2)]];
        assert_eq!(rank(&a, 2), 1);
        assert_eq!(rank(&m(&[&[0, 0]]), 2), 0);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let cols = vec![vec![qi(1), qi(0), qi(1)], vec![qi(0), qi(1), qi(1)]];
        assert_eq!(solve_in_span(&cols, &[qi(2), qi(3), qi(5)]), Some(vec![qi(2), qi(3)]));
        assert_eq!(solve_in_span(&cols, &[qi(2), qi(3), qi(4)]), None);
    }

    #[test]
    fn incremental_basis_coordinates() {
        let mut b = IncrementalBasis::new(3);
        assert!(b.offer(&[qi(1), qi(1), qi(0)]));
        assert!(!b.offer(&[qi(2), qi(2), qi(0)]));
        assert!(b.offer(&[qi(0), qi(1), qi(0)]));
        assert_eq!(b.coordinates(&[qi(3), qi(5), qi(0)]), Some(vec![qi(3), qi(2)]));
        assert_eq!(b.coordinates(&[qi(0), qi(0), qi(1)]), None);
    }

    proptest::proptest! {
        #[test]
        fn nullspace_vectors_are_annihilated(
            entries in proptest::collection::vec(-4i64..=4, 12)
        ) {
            let a: Vec<Vec<Q>> = entries.chunks(4).map(|r| r.iter().map(|&v| qi(v)).collect()).collect();
            let ech = echelon(&a, 4);
            let ns = ech.nullspace();
            proptest::prop_assert_eq!(ns.len() + ech.rank(), 4);
            for v in &ns {
                proptest::prop_assert!(is_zero_vec(&mat_vec(&a, v)));
            }
        }
    }
}
