use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Chart, FieldError, Result, Q};

/// Exponent vector. Ordered by graded reverse lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Pure lexicographic comparison (x_0 > x_1 > ...).
    pub fn cmp_lex(&self, other: &Monomial) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        // rightmost differing exponent: smaller exponent wins
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over `Q` on a fixed chart.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    chart: Chart,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(chart: &Chart) -> Self {
        Polynomial { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, Q::one())
    }

    pub fn constant(chart: &Chart, c: Q) -> Self {
        Self::term(chart, Monomial::one(chart.len()), c)
    }

    pub fn var(chart: &Chart, i: usize) -> Self {
        let mut e = vec![0; chart.len()];
        e[i] = 1;
        Self::term(chart, Monomial(e), Q::one())
    }

    pub fn term(chart: &Chart, m: Monomial, c: Q) -> Self {
        assert_eq!(m.0.len(), chart.len(), "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { chart: chart.clone(), terms }
    }

    /// Builds from `(monomial, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(chart: &Chart, it: I) -> Self {
        let mut p = Self::zero(chart);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        debug_assert_eq!(m.0.len(), self.chart.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&Monomial::one(self.chart.len())).cloned().unwrap_or_else(Q::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending term order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn check_degree(&self, cap: u32) -> Result<()> {
        match self.total_degree() {
            Some(d) if d > cap => Err(FieldError::DegreeCap { degree: d, cap }),
            _ => Ok(()),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        Polynomial {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        Polynomial {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(&self.chart);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Multiplication that fails when the product exceeds `cap`.
    pub fn checked_mul(&self, other: &Self, cap: u32) -> Result<Self> {
        let d = self.total_degree().unwrap_or(0) + other.total_degree().unwrap_or(0);
        if !self.is_zero() && !other.is_zero() && d > cap {
            return Err(FieldError::DegreeCap { degree: d, cap });
        }
        Ok(self * other)
    }

    /// Partial derivative with respect to coordinate `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, c * Q::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, values: &[Q]) -> Q {
        assert_eq!(values.len(), self.chart.len(), "point arity");
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in values.iter().zip(&m.0) {
                if e > 0 {
                    if v.is_zero() {
                        t = Q::zero();
                        break;
                    }
                    t *= num_traits::pow(v.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `images[i]` for coordinate `i`. All images share a
    /// target chart, which becomes the chart of the result.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.chart.len(), "substitution arity");
        let target = images[0].chart().clone();
        let mut out = Polynomial::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(&target, c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &img.pow(e);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// `p(x + shift)`.
    pub fn translate(&self, shift: &[Q]) -> Polynomial {
        let images: Vec<Polynomial> = (0..self.chart.len())
            .map(|i| &Polynomial::var(&self.chart, i) + &Polynomial::constant(&self.chart, shift[i].clone()))
            .collect();
        self.substitute(&images)
    }

    /// Re-expresses the polynomial on a chart that contains every coordinate
    /// of the current one (by name).
    pub fn embed(&self, target: &Chart) -> Option<Polynomial> {
        let map: Option<Vec<usize>> = self.chart.names().iter().map(|n| target.index_of(n)).collect();
        let map = map?;
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in map.iter().enumerate() {
                e[k] = m.0[i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        Some(out)
    }

    /// Divides every coefficient by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&(Q::one() / c)),
            None => self.clone(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.chart, rhs.chart, "chart mismatch in polynomial addition");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.chart, rhs.chart, "chart mismatch in polynomial subtraction");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.chart, rhs.chart, "chart mismatch in polynomial product");
        let mut out = Polynomial::zero(&self.chart);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

fn fmt_monomial(chart: &Chart, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(chart.name(i).to_string()),
            _ => parts.push(format!("{}^{}", chart.name(i), e)),
        }
    }
    parts.join(" ")
}

impl Polynomial {
    /// Renders as a signed sum, leading term first. `suffix` is appended to
    /// every term (used for `d/dx` basis tokens); when present, unit
    /// coefficients are omitted even on the constant monomial.
    pub(crate) fn render_terms(&self, suffix: Option<&str>) -> Vec<(bool, String)> {
        let mut out = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            let mono = fmt_monomial(&self.chart, m);
            let mut body = Vec::new();
            if !abs.is_one() || (mono.is_empty() && suffix.is_none()) {
                body.push(abs.to_string());
            }
            if !mono.is_empty() {
                body.push(mono);
            }
            if let Some(s) = suffix {
                body.push(s.to_string());
            }
            out.push((neg, body.join(" ")));
        }
        out
    }
}

pub(crate) fn join_signed(parts: &[(bool, String)]) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (neg, body)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(body);
    }
    s
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&self.render_terms(None)))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::{q, qi};

    fn chart() -> Chart {
        Chart::new(["x", "y", "z"]).unwrap()
    }

    #[test]
    fn grevlex_order() {
        let m = |v: [u32; 3]| Monomial(v.to_vec());
        // degree first
        assert!(m([0, 0, 2]) > m([1, 0, 0]));
        // x > y > z among variables
        assert!(m([1, 0, 0]) > m([0, 1, 0]));
        assert!(m([0, 1, 0]) > m([0, 0, 1]));
        // classic grevlex vs lex distinction: x*z^2 < y^3? grevlex: compare last
        // exponent, y^3 has smaller z-exponent so it is larger
        assert!(m([0, 3, 0]) > m([1, 0, 2]));
        assert!(m([1, 1, 1]) > m([0, 2, 1]));
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let c = chart();
        let x = Polynomial::var(&c, 0);
        let y = Polynomial::var(&c, 1);
        let s = &x + &y;
        let d = &x - &y;
        let prod = &s * &d;
        assert_eq!(prod, &(&x * &x) - &(&y * &y));
        assert!((&s - &s).is_zero());
        assert_eq!(prod.total_degree(), Some(2));
    }

    #[test]
    fn derivative_and_eval() {
        let c = chart();
        let x = Polynomial::var(&c, 0);
        let z = Polynomial::var(&c, 2);
        let p = &(&x.pow(3) * &z).scale(&q(1, 3)) + &Polynomial::constant(&c, qi(5));
        assert_eq!(p.derivative(0), &(&x * &x) * &z);
        assert_eq!(p.eval(&[qi(3), qi(7), qi(2)]), qi(23));
    }

    #[test]
    fn translation_shifts_arguments() {
        let c = chart();
        let x = Polynomial::var(&c, 0);
        let p = &x * &x;
        let t = p.translate(&[qi(1), qi(0), qi(0)]);
        assert_eq!(t.eval(&[qi(0), qi(0), qi(0)]), qi(1));
        assert_eq!(t.eval(&[qi(2), qi(0), qi(0)]), qi(9));
    }

    #[test]
    fn display_is_leading_term_first() {
        let c = chart();
        let x = Polynomial::var(&c, 0);
        let y = Polynomial::var(&c, 1);
        let p = &(&(&x * &x).scale(&q(-3, 2)) + &y) - &Polynomial::one(&c);
        assert_eq!(p.to_string(), "-3/2 x^2 + y - 1");
        assert_eq!(Polynomial::zero(&c).to_string(), "0");
    }
}
