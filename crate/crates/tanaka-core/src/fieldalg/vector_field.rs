use std::fmt;

use num_traits::One;

use super::poly::join_signed;
use super::{Chart, FieldError, Polynomial, Result, Q};

/// Tangent vector field `sum_i X_i d/dx_i` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    chart: Chart,
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn zero(chart: &Chart) -> Self {
        VectorField {
            chart: chart.clone(),
            components: (0..chart.len()).map(|_| Polynomial::zero(chart)).collect(),
        }
    }

    /// Coordinate field `d/dx_i`.
    pub fn basis(chart: &Chart, i: usize) -> Self {
        let mut v = Self::zero(chart);
        v.components[i] = Polynomial::one(chart);
        v
    }

    pub fn from_components(chart: &Chart, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != chart.len() {
            return Err(FieldError::Arity { expected: chart.len(), got: components.len() });
        }
        for c in &components {
            super::check_same_chart(chart, c.chart())?;
        }
        Ok(VectorField { chart: chart.clone(), components })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    pub fn max_degree(&self) -> u32 {
        self.components.iter().filter_map(Polynomial::total_degree).max().unwrap_or(0)
    }

    pub fn check_degree(&self, cap: u32) -> Result<()> {
        self.components.iter().try_for_each(|c| c.check_degree(cap))
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// `f * X`.
    pub fn scale_poly(&self, f: &Polynomial) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|a| a * f).collect(),
        }
    }

    pub(crate) fn apply_unchecked(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(&self.chart);
        for (j, xj) in self.components.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            let d = f.derivative(j);
            if !d.is_zero() {
                out = &out + &(xj * &d);
            }
        }
        out
    }

    pub(crate) fn bracket_unchecked(&self, other: &VectorField) -> VectorField {
        let components = (0..self.chart.len())
            .map(|i| &self.apply_unchecked(&other.components[i]) - &other.apply_unchecked(&self.components[i]))
            .collect();
        VectorField { chart: self.chart.clone(), components }
    }

    pub(crate) fn eval_unchecked(&self, values: &[Q]) -> Vec<Q> {
        self.components.iter().map(|c| c.eval(values)).collect()
    }

    /// The same field written in coordinates shifted by `shift`
    /// (components `X_i(x + shift)`).
    pub fn translate(&self, shift: &[Q]) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.translate(shift)).collect(),
        }
    }

    /// Re-expresses the field on a larger chart (coordinates matched by name,
    /// new directions get zero components).
    pub fn embed(&self, target: &Chart) -> Option<VectorField> {
        let mut comps: Vec<Polynomial> = (0..target.len()).map(|_| Polynomial::zero(target)).collect();
        for (i, c) in self.components.iter().enumerate() {
            let k = target.index_of(self.chart.name(i))?;
            comps[k] = c.embed(target)?;
        }
        Some(VectorField { chart: target.clone(), components: comps })
    }

    /// Scalar multiple normalized so that the leading coefficient of the
    /// first nonzero component is 1. Used to deduplicate spanning sets.
    pub fn normalized(&self) -> VectorField {
        match self.components.iter().find(|c| !c.is_zero()) {
            Some(c) => {
                let lc = c.leading_term().map(|(_, v)| v.clone()).unwrap_or_else(Q::one);
                self.scale(&(Q::one() / lc))
            }
            None => self.clone(),
        }
    }

    pub(crate) fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            let suffix = format!("d/d{}", self.chart.name(i));
            parts.extend(c.render_terms(Some(&suffix)));
        }
        join_signed(&parts)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({})", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::q;

    #[test]
    fn display_uses_basis_tokens() {
        let c = Chart::new(["x", "y"]).unwrap();
        let x = Polynomial::var(&c, 0);
        let f = VectorField::basis(&c, 0)
            .add(&VectorField::basis(&c, 1).scale_poly(&x.scale(&q(-3, 2))));
        assert_eq!(f.to_string(), "d/dx - 3/2 x d/dy");
        assert_eq!(VectorField::zero(&c).to_string(), "0");
    }

    #[test]
    fn embed_into_larger_chart() {
        let c = Chart::new(["x", "y"]).unwrap();
        let big = c.extended(["t"]).unwrap();
        let f = VectorField::basis(&c, 1).scale_poly(&Polynomial::var(&c, 0));
        let g = f.embed(&big).unwrap();
        assert_eq!(g.components().len(), 3);
        assert!(g.component(2).is_zero());
    }
}
