//! Buchberger's algorithm over `Q` with a reduction budget.
//!
//! Pairs are selected by the normal strategy (smallest lcm first). The
//! coprime-leading-monomial criterion and the chain criterion prune pairs.
//! The computation stops as soon as a nonzero constant appears, since then
//! the ideal is the whole ring.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::fieldalg::{Chart, Monomial, Polynomial, Q};

pub const DEFAULT_BUDGET: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    DegRevLex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::DegRevLex => a.cmp(b),
            MonomialOrder::Lex => a.cmp_lex(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("Groebner budget of {budget} reductions exhausted")]
pub struct BudgetExhausted {
    pub budget: usize,
}

/// Terms sorted by decreasing monomial under the ambient order.
#[derive(Clone, Debug)]
struct Terms(Vec<(Monomial, Q)>);

impl Terms {
    fn from_poly(p: &Polynomial, order: MonomialOrder) -> Terms {
        let mut v: Vec<(Monomial, Q)> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Terms(v)
    }

    fn lm(&self) -> &Monomial {
        &self.0[0].0
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.0.first() {
            let inv = Q::one() / c;
            for t in &mut self.0 {
                t.1 = &t.1 * &inv;
            }
        }
    }

    /// `self - c * m * other`, merged in order.
    fn sub_scaled(&self, c: &Q, m: &Monomial, other: &Terms, order: MonomialOrder) -> Terms {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let (mm, cc) = b.next().unwrap();
                    out.push((mm, -cc));
                }
                (Some(x), Some(y)) => match order.cmp(&x.0, &y.0) {
                    Ordering::Greater => out.push(a.next().unwrap().clone()),
                    Ordering::Less => {
                        let (mm, cc) = b.next().unwrap();
                        out.push((mm, -cc));
                    }
                    Ordering::Equal => {
                        let (mm, cc) = b.next().unwrap();
                        let s = &a.next().unwrap().1 - cc;
                        if !s.is_zero() {
                            out.push((mm, s));
                        }
                    }
                },
            }
        }
        Terms(out)
    }

    fn to_poly(&self, chart: &Chart) -> Polynomial {
        Polynomial::from_terms(chart, self.0.iter().cloned())
    }
}

struct Reducer<'a> {
    order: MonomialOrder,
    budget: usize,
    spent: &'a mut usize,
}

impl Reducer<'_> {
    fn tick(&mut self) -> Result<(), BudgetExhausted> {
        *self.spent += 1;
        if *self.spent > self.budget {
            Err(BudgetExhausted { budget: self.budget })
        } else {
            Ok(())
        }
    }

    /// Full reduction of `f` modulo monic `g`s.
    fn reduce(&mut self, f: &Terms, basis: &[Terms]) -> Result<Terms, BudgetExhausted> {
        let mut rem: Vec<(Monomial, Q)> = Vec::new();
        let mut cur = f.clone();
        while !cur.is_zero() {
            let (lm, lc) = cur.0[0].clone();
            match basis.iter().find(|g| g.lm().divides(&lm)) {
                Some(g) => {
                    self.tick()?;
                    let m = lm.div(g.lm()).expect("divides");
                    cur = cur.sub_scaled(&lc, &m, g, self.order);
                }
                None => {
                    rem.push((lm, lc));
                    cur.0.remove(0);
                }
            }
        }
        Ok(Terms(rem))
    }
}

/// A reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub order: MonomialOrder,
    pub chart: Chart,
    pub basis: Vec<Polynomial>,
    /// Reduction steps spent.
    pub spent: usize,
}

impl GroebnerBasis {
    /// True iff the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant() && !self.basis[0].is_zero()
    }

    pub fn leading_monomial(&self, i: usize) -> Monomial {
        Terms::from_poly(&self.basis[i], self.order).lm().clone()
    }

    /// Normal form of `f`.
    pub fn reduce(&self, f: &Polynomial) -> Polynomial {
        let basis: Vec<Terms> = self.basis.iter().map(|g| Terms::from_poly(g, self.order)).collect();
        let mut spent = 0;
        let mut r = Reducer { order: self.order, budget: usize::MAX, spent: &mut spent };
        r.reduce(&Terms::from_poly(f, self.order), &basis).expect("unbounded").to_poly(&self.chart)
    }
}

fn lcm_key(order: MonomialOrder) -> impl Fn(&(Monomial, usize, usize), &(Monomial, usize, usize)) -> Ordering {
    move |a, b| order.cmp(&a.0, &b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner(
    gens: &[Polynomial],
    chart: &Chart,
    order: MonomialOrder,
    budget: usize,
) -> Result<GroebnerBasis, BudgetExhausted> {
    let mut spent = 0usize;
    let mut red = Reducer { order, budget, spent: &mut spent };
    let unit = |chart: &Chart, spent: usize| GroebnerBasis {
        order,
        chart: chart.clone(),
        basis: vec![Polynomial::one(chart)],
        spent,
    };
    let mut g: Vec<Terms> = Vec::new();
    for p in gens {
        let mut t = red.reduce(&Terms::from_poly(p, order), &g)?;
        if t.is_zero() {
            continue;
        }
        t.make_monic();
        if t.lm().is_one() {
            let s = *red.spent;
            return Ok(unit(chart, s));
        }
        g.push(t);
    }
    let mut pairs: Vec<(Monomial, usize, usize)> = Vec::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push((g[i].lm().lcm(g[j].lm()), i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let key = lcm_key(order);
    while !pairs.is_empty() {
        let best = (0..pairs.len()).min_by(|&a, &b| key(&pairs[a], &pairs[b])).expect("nonempty");
        let (lcm, i, j) = pairs.swap_remove(best);
        done.insert((i, j));
        if g[i].lm().is_coprime(g[j].lm()) {
            continue;
        }
        let pending = |a: usize, b: usize| {
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            !done.contains(&(a, b))
        };
        let chain = (0..g.len())
            .any(|k| k != i && k != j && g[k].lm().divides(&lcm) && !pending(i, k) && !pending(j, k));
        if chain {
            continue;
        }
        let mi = lcm.div(g[i].lm()).expect("lcm");
        let mj = lcm.div(g[j].lm()).expect("lcm");
        let si = Terms(g[i].0.iter().map(|(m, c)| (m.mul(&mi), c.clone())).collect());
        let s = si.sub_scaled(&Q::one(), &mj, &g[j], order);
        let mut h = red.reduce(&s, &g)?;
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if h.lm().is_one() {
            let s = *red.spent;
            return Ok(unit(chart, s));
        }
        let k = g.len();
        for (a, ga) in g.iter().enumerate() {
            pairs.push((ga.lm().lcm(h.lm()), a, k));
        }
        g.push(h);
    }
    // minimize
    let mut keep: Vec<Terms> = Vec::new();
    for (a, ga) in g.iter().enumerate() {
        let redundant = g.iter().enumerate().any(|(b, gb)| {
            b != a && gb.lm().divides(ga.lm()) && (gb.lm() != ga.lm() || b < a)
        });
        if !redundant {
            keep.push(ga.clone());
        }
    }
    // inter-reduce
    let mut reduced = Vec::with_capacity(keep.len());
    for a in 0..keep.len() {
        let others: Vec<Terms> = keep.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, t)| t.clone()).collect();
        let head = Terms(vec![keep[a].0[0].clone()]);
        let tail = Terms(keep[a].0[1..].to_vec());
        let mut r = red.reduce(&tail, &others)?;
        r.0.insert(0, head.0[0].clone());
        r.make_monic();
        reduced.push(r);
    }
    reduced.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    let spent = *red.spent;
    Ok(GroebnerBasis { order, chart: chart.clone(), basis: reduced.iter().map(|t| t.to_poly(chart)).collect(), spent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::qi;

    fn chart(n: &[&str]) -> Chart {
        Chart::new(n.iter().map(|s| s.to_string())).unwrap()
    }

    fn v(c: &Chart, i: usize) -> Polynomial {
        Polynomial::var(c, i)
    }

    fn k(c: &Chart, n: i64) -> Polynomial {
        Polynomial::constant(c, qi(n))
    }

    #[test]
    fn inconsistent_system_gives_unit_ideal() {
        let c = chart(&["x", "y"]);
        let f = &(&v(&c, 0) * &v(&c, 1)) - &k(&c, 1);
        let g = v(&c, 0);
        let gb = groebner(&[f, g], &c, MonomialOrder::DegRevLex, DEFAULT_BUDGET).unwrap();
        assert!(gb.is_unit());
    }

    #[test]
    fn sum_of_squares_is_proper_over_q() {
        // x^2 + 1 has no rational root, but the ideal is proper
        let c = chart(&["x"]);
        let f = &(&v(&c, 0) * &v(&c, 0)) + &k(&c, 1);
        let gb = groebner(std::slice::from_ref(&f), &c, MonomialOrder::DegRevLex, DEFAULT_BUDGET).unwrap();
        assert!(!gb.is_unit());
        assert_eq!(gb.basis, vec![f]);
    }

    #[test]
    fn lex_basis_is_triangular() {
        // x^2 + y^2 - 1, x - y
        let c = chart(&["x", "y"]);
        let (x, y) = (v(&c, 0), v(&c, 1));
        let f = &(&(&x * &x) + &(&y * &y)) - &k(&c, 1);
        let g = &x - &y;
        let gb = groebner(&[f, g], &c, MonomialOrder::Lex, DEFAULT_BUDGET).unwrap();
        assert_eq!(gb.basis.len(), 2);
        // 2y^2 - 1 made monic
        let expect = &(&y * &y) - &Polynomial::constant(&c, crate::fieldalg::q(1, 2));
        assert!(gb.basis.contains(&expect));
        assert!(gb.basis.contains(&(&x - &y)));
        assert!(gb.reduce(&(&(&x * &x) - &(&y * &y))).is_zero());
    }

    #[test]
    fn budget_is_enforced() {
        let c = chart(&["x", "y", "z"]);
        let (x, y, z) = (v(&c, 0), v(&c, 1), v(&c, 2));
        let gens = [&(&x * &x) - &(&y * &z), &(&y * &y) - &(&x * &z), &(&z * &z) - &(&x * &y)];
        assert!(groebner(&gens, &c, MonomialOrder::DegRevLex, 1).is_err());
        assert!(groebner(&gens, &c, MonomialOrder::DegRevLex, DEFAULT_BUDGET).is_ok());
    }

    #[test]
    fn membership_after_reduction() {
        let c = chart(&["x", "y", "z"]);
        let (x, y, z) = (v(&c, 0), v(&c, 1), v(&c, 2));
        let f1 = &(&x * &y) - &z;
        let f2 = &(&y * &z) - &x;
        let gb = groebner(&[f1.clone(), f2.clone()], &c, MonomialOrder::DegRevLex, DEFAULT_BUDGET).unwrap();
        let combo = &(&f1 * &(&z + &x)) - &(&f2 * &y);
        assert!(gb.reduce(&combo).is_zero());
        assert!(!gb.reduce(&x).is_zero());
    }
}
