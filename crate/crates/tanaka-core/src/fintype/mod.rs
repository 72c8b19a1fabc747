//! Finite-dimensionality criteria: `h_0`, the characteristic variety, the
//! growth-vector criterion, free-algebra bounds and the combined report.

mod charvar;
mod report;

pub use charvar::{char_variety, validate_witness, Certificate, CharVarietyConfig, CharVarietyVerdict, Stage, Verdict};
pub use report::{finiteness_report, AnalysisConfig, FinitenessReport, FinitenessVerdict, ReportError, TanakaSummary};

use num_traits::Zero;
use serde::Serialize;

use crate::fieldalg::Q;
use crate::gnla::free_total_dim;
use crate::linalg;
use crate::prolong::{Element, Prolongation};

/// `h_0 ⊂ gl(g_{-1})`: elements of `g_0` acting trivially on grades below
/// `-1`, as matrices whose column `j` is the image of `e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H0Subspace {
    pub n: usize,
    pub basis: Vec<Vec<Vec<Q>>>,
}

impl H0Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn h0(pro: &Prolongation) -> H0Subspace {
    let a = pro.gnla();
    let n = a.dims()[0];
    let Some(lvl) = pro.level(0) else {
        return H0Subspace { n, basis: Vec::new() };
    };
    let start = a.range(2).start;
    let positions: Vec<usize> = (start..a.total_dim()).flat_map(|i| lvl.offsets[i]..lvl.offsets[i + 1]).collect();
    let rows: Vec<Vec<Q>> = positions.iter().map(|&pos| lvl.basis.iter().map(|b| b[pos].clone()).collect()).collect();
    let combos = if rows.is_empty() {
        (0..lvl.dim())
            .map(|b| {
                let mut c = vec![Q::zero(); lvl.dim()];
                c[b] = crate::fieldalg::q_one();
                c
            })
            .collect()
    } else {
        linalg::nullspace(&rows, lvl.dim())
    };
    let basis = combos
        .into_iter()
        .map(|c| pro.g0_matrix(&Element::new(0, c)).expect("degree 0"))
        .collect();
    H0Subspace { n, basis }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem2Status {
    Finite,
    Inconclusive,
    /// The growth vector ends before the entries the criterion reads.
    TooShort,
}

pub fn theorem2_status(growth: &[usize]) -> Theorem2Status {
    let Some(&n) = growth.first() else {
        return Theorem2Status::TooShort;
    };
    let need = match n {
        0 | 1 => return Theorem2Status::Inconclusive,
        2 => 3,
        _ => 2,
    };
    if growth.len() < need {
        return Theorem2Status::TooShort;
    }
    let finite = if n == 2 {
        growth[..3].iter().sum::<usize>() == 5
    } else {
        growth[0] + growth[1] > n * (n - 1) / 2 + 2
    };
    if finite {
        Theorem2Status::Finite
    } else {
        Theorem2Status::Inconclusive
    }
}

/// Growth-vector sufficient condition for finite-dimensional symmetries.
/// `false` means inconclusive, never infinite.
pub fn theorem2_finite(growth: &[usize]) -> bool {
    theorem2_status(growth) == Theorem2Status::Finite
}

/// Upper bound on `dim sym(Δ)` when the symbol is free of step `k` on `n`
/// generators; `None` in the contact case `n = k = 2` (and for `n < 2` or
/// `k < 2`, where no bound applies).
pub fn symmetry_bound_free(n: u32, k: u32) -> Option<u128> {
    let n128 = n as u128;
    match (n, k) {
        (n, k) if n < 2 || k < 2 => None,
        (2, 2) => None,
        (2, 3) => Some(14),
        (_, 2) => Some(2 * n128 * n128 + n128),
        _ => free_total_dim(n, k)?.checked_add(n128 * n128),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnla::free_gnla;
    use crate::prolong::tanaka_prolongation;

    #[test]
    fn h0_of_free_algebras() {
        let p = tanaka_prolongation(&free_gnla(3, 2).unwrap(), 10).unwrap();
        assert_eq!(h0(&p).dim(), 0);
        let p = tanaka_prolongation(&free_gnla(2, 2).unwrap(), 4).unwrap();
        let h = h0(&p);
        assert_eq!(h.dim(), 3);
        for m in &h.basis {
            assert!((&m[0][0] + &m[1][1]).is_zero(), "trace free");
        }
    }

    #[test]
    fn theorem2_table() {
        assert!(theorem2_finite(&[4, 6, 1]));
        assert!(theorem2_finite(&[2, 1, 2, 1]));
        assert!(theorem2_finite(&[3, 3]));
        assert!(!theorem2_finite(&[2, 1, 1, 1]));
        assert!(!theorem2_finite(&[3, 2, 1]));
        assert_eq!(theorem2_status(&[2, 1]), Theorem2Status::TooShort);
        assert_eq!(theorem2_status(&[]), Theorem2Status::TooShort);
        assert_eq!(theorem2_status(&[1, 1]), Theorem2Status::Inconclusive);
    }

    #[test]
    fn free_bounds() {
        assert_eq!(symmetry_bound_free(3, 2), Some(21));
        assert_eq!(symmetry_bound_free(2, 3), Some(14));
        assert_eq!(symmetry_bound_free(2, 4), Some(12));
        assert_eq!(symmetry_bound_free(3, 3), Some(23));
        assert_eq!(symmetry_bound_free(2, 2), None);
    }
}
