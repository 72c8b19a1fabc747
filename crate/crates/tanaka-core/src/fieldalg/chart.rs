use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use super::{FieldError, Result, Q};

/// Ordered list of coordinate names. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart(Arc<[String]>);

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(FieldError::InvalidChart("no coordinates".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(FieldError::InvalidChart(format!("`{n}` is not an identifier")));
            }
            if names[..i].contains(n) {
                return Err(FieldError::InvalidChart(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Chart(names.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// A new chart with `extra` appended after the existing coordinates.
    pub fn extended<I, S>(&self, extra: I) -> Result<Chart>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Chart::new(self.0.iter().cloned().chain(extra.into_iter().map(Into::into)))
    }

    /// First name of the form `base`, `base1`, `base2`, ... not already used.
    pub fn fresh_name(&self, base: &str) -> String {
        if self.index_of(base).is_none() {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| self.index_of(n).is_none())
            .expect("unbounded search")
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.0.join(","))
    }
}

/// A rational point on a chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointQ {
    chart: Chart,
    values: Vec<Q>,
}

impl PointQ {
    pub fn new(chart: &Chart, values: Vec<Q>) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(FieldError::Arity { expected: chart.len(), got: values.len() });
        }
        Ok(PointQ { chart: chart.clone(), values })
    }

    pub fn origin(chart: &Chart) -> Self {
        PointQ { chart: chart.clone(), values: vec![Q::zero(); chart.len()] }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn is_origin(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for PointQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}
