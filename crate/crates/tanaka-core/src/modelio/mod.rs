//! The `.tk` model format, deterministic printing and JSON reports.
//!
//! ```text
//! model heisenberg
//! coords x y z
//! field X = d/dx
//! field Y = d/dy + x d/dz
//! distribution D = [X, Y]
//! marked V = Y
//! point 0 0 0
//! ```
//!
//! Field expressions are `Q`-linear combinations of `monomial d/d<coord>`
//! terms with `+ - * ^`, parentheses, juxtaposition as multiplication and
//! rationals written `a/b`. A field may refer to fields defined above it.

mod parse;
mod print;
mod report;

pub use parse::{parse_model, ParseError, ParseErrorKind};
pub use print::print_model;
pub use report::{emit_report, q_to_json, qvec_to_json};

use thiserror::Error;

/// Parses a field expression on the chart of `model`; the model's fields may
/// be referenced by name.
pub fn parse_field(text: &str, model: &Model) -> Result<VectorField, ParseError> {
    parse::parse_field_expr(text, model.chart(), model.fields())
}

use crate::fieldalg::{Chart, PointQ, VectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("undefined field `{0}`")]
    UndefinedField(String),
    #[error("field `{0}` defined twice")]
    DuplicateField(String),
    #[error("field name `{0}` collides with a coordinate")]
    FieldIsCoordinate(String),
    #[error("field `{0}` lives on a different chart")]
    ChartMismatch(String),
    #[error("point has {got} values for {expected} coordinates")]
    PointArity { expected: usize, got: usize },
}

/// A chart, named vector fields on it, the distribution frame (by field
/// name), optional role markers and an optional base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    name: String,
    chart: Chart,
    fields: Vec<(String, VectorField)>,
    distribution_name: String,
    distribution: Vec<String>,
    marked: Vec<(String, String)>,
    base_point: Option<PointQ>,
}

impl Model {
    pub fn new(
        name: impl Into<String>,
        chart: Chart,
        fields: Vec<(String, VectorField)>,
        distribution: Vec<String>,
        marked: Vec<(String, String)>,
        base_point: Option<PointQ>,
    ) -> Result<Self, ModelError> {
        for (i, (n, f)) in fields.iter().enumerate() {
            if fields[..i].iter().any(|(m, _)| m == n) {
                return Err(ModelError::DuplicateField(n.clone()));
            }
            if chart.index_of(n).is_some() {
                return Err(ModelError::FieldIsCoordinate(n.clone()));
            }
            if f.chart() != &chart {
                return Err(ModelError::ChartMismatch(n.clone()));
            }
        }
        if distribution.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        let defined = |n: &String| fields.iter().any(|(m, _)| m == n);
        for n in distribution.iter().chain(marked.iter().map(|(_, f)| f)) {
            if !defined(n) {
                return Err(ModelError::UndefinedField(n.clone()));
            }
        }
        if let Some(p) = &base_point {
            if p.chart() != &chart {
                return Err(ModelError::PointArity { expected: chart.len(), got: p.values().len() });
            }
        }
        Ok(Model {
            name: name.into(),
            chart,
            fields,
            distribution_name: "D".into(),
            distribution,
            marked,
            base_point,
        })
    }

    pub fn with_distribution_name(mut self, name: impl Into<String>) -> Self {
        self.distribution_name = name.into();
        self
    }

    /// Convenience constructor: fields are named and all belong to the
    /// distribution, in order.
    pub fn from_frame(name: impl Into<String>, chart: Chart, frame: Vec<(String, VectorField)>) -> Result<Self, ModelError> {
        let dist = frame.iter().map(|(n, _)| n.clone()).collect();
        Model::new(name, chart, frame, dist, Vec::new(), None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn fields(&self) -> &[(String, VectorField)] {
        &self.fields
    }

    pub fn field(&self, name: &str) -> Option<&VectorField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn distribution_name(&self) -> &str {
        &self.distribution_name
    }

    pub fn distribution(&self) -> &[String] {
        &self.distribution
    }

    /// The frame fields in distribution order.
    pub fn frame(&self) -> Vec<VectorField> {
        self.distribution
            .iter()
            .map(|n| self.field(n).expect("validated at construction").clone())
            .collect()
    }

    pub fn marked(&self) -> &[(String, String)] {
        &self.marked
    }

    /// The field carrying role `role`, if marked.
    pub fn marked_field(&self, role: &str) -> Option<(&str, &VectorField)> {
        let (_, fname) = self.marked.iter().find(|(r, _)| r == role)?;
        Some((fname.as_str(), self.field(fname)?))
    }

    pub fn base_point(&self) -> Option<&PointQ> {
        self.base_point.as_ref()
    }

    pub fn base_point_or_origin(&self) -> PointQ {
        self.base_point.clone().unwrap_or_else(|| PointQ::origin(&self.chart))
    }

    pub fn with_base_point(mut self, p: Option<PointQ>) -> Self {
        self.base_point = p;
        self
    }

    /// Adds extra named fields (e.g. candidate symmetries) after the
    /// existing ones.
    pub fn with_extra_fields(mut self, extra: Vec<(String, VectorField)>) -> Result<Self, ModelError> {
        let mut fields = std::mem::take(&mut self.fields);
        fields.extend(extra);
        let name = self.name.clone();
        let dn = self.distribution_name.clone();
        Ok(Model::new(name, self.chart, fields, self.distribution, self.marked, self.base_point)?.with_distribution_name(dn))
    }
}
