//! Elements `a + b√d` of a quadratic extension `Q(√d)`, `d` a squarefree
//! integer other than 0 and 1.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::fieldalg::Q;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    pub a: Q,
    pub b: Q,
    pub d: BigInt,
}

/// Splits a nonzero rational `r` as `s^2 * d` with `d` a squarefree
/// integer and `s` rational. Returns `(s, d)`.
pub fn squarefree_part(r: &Q) -> (Q, BigInt) {
    assert!(!r.is_zero(), "zero has no squarefree part");
    // r = n/m = n*m / m^2
    let n = r.numer() * r.denom();
    let (s_int, d) = squarefree_int(&n);
    (Q::new(s_int, r.denom().clone()), d)
}

fn squarefree_int(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut s = BigInt::one();
    let mut d = sign;
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        s *= num_traits::pow(p.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            d *= &p;
        }
        p += 1;
    }
    d *= m;
    (s, d)
}

impl QuadExt {
    pub fn rational(a: Q, d: &BigInt) -> Self {
        QuadExt { a, b: Q::zero(), d: d.clone() }
    }

    /// `√r` written in `Q(√d)` where `d` is the squarefree part of `r`.
    pub fn sqrt_of(r: &Q) -> Self {
        if r.is_zero() {
            return QuadExt { a: Q::zero(), b: Q::zero(), d: BigInt::from(-1) };
        }
        let (s, d) = squarefree_part(r);
        if d.is_one() {
            QuadExt { a: s, b: Q::zero(), d }
        } else {
            QuadExt { a: Q::zero(), b: s, d }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn same_field(&self, o: &Self) -> BigInt {
        if self.b.is_zero() {
            o.d.clone()
        } else {
            assert!(o.b.is_zero() || o.d == self.d, "different quadratic fields");
            self.d.clone()
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let d = self.same_field(o);
        QuadExt { a: &self.a + &o.a, b: &self.b + &o.b, d }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QuadExt { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.same_field(o);
        let dq = Q::from_integer(d.clone());
        QuadExt { a: &self.a * &o.a + &self.b * &o.b * dq, b: &self.a * &o.b + &self.b * &o.a, d }
    }

    pub fn scale(&self, c: &Q) -> Self {
        QuadExt { a: &self.a * c, b: &self.b * c, d: self.d.clone() }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let dq = Q::from_integer(self.d.clone());
        let norm = &self.a * &self.a - &self.b * &self.b * dq;
        QuadExt { a: &self.a / &norm, b: -&self.b / &norm, d: self.d.clone() }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let root = if self.b.is_one() {
            format!("sqrt({})", self.d)
        } else if (-&self.b).is_one() {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", self.b, self.d)
        };
        if self.a.is_zero() {
            write!(f, "{root}")
        } else if let Some(rest) = root.strip_prefix('-') {
            write!(f, "{} - {}", self.a, rest)
        } else {
            write!(f, "{} + {}", self.a, root)
        }
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Roots of `x^2 + b x + c` in `Q` or a quadratic extension.
pub fn monic_quadratic_roots(b: &Q, c: &Q) -> [QuadExt; 2] {
    let disc = b * b - Q::from_integer(4.into()) * c;
    let half = Q::new(1.into(), 2.into());
    let r = QuadExt::sqrt_of(&disc).scale(&half);
    let base = QuadExt::rational(-b * &half, &r.d);
    [base.add(&r), base.sub(&r)]
}
