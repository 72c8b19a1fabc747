//! The operations behind the `tanaka` command line. Each command returns a
//! serializable result; [`Rendered`] turns it into the text summary and the
//! JSON document. Exit codes: 0 for any verdict, 2 for input errors, 3 when
//! the distribution is not bracket-generating at the point.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::fieldalg::{parse_rational, PointQ};
use crate::fintype::{self, finiteness_report, AnalysisConfig, CharVarietyVerdict, FinitenessReport, FinitenessVerdict, ReportError, Theorem2Status};
use crate::flag::{self, FlagOptions};
use crate::gnla::{self, free_total_dim, try_witt_dim};
use crate::modelio::{emit_report, parse_field, parse_model, print_model, Model, ParseError};
use crate::models::{self, ModelsError};
use crate::par::Exec;
use crate::prolong::{self, ProlongOptions, Status};
use crate::symcheck::{self, FiltrationDegree, SymError};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Models(#[from] ModelsError),
    #[error("distribution is not bracket-generating at {0}")]
    NotBracketGenerating(String),
    #[error("{0}")]
    Computation(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::NotBracketGenerating(_) => 3,
            _ => 2,
        }
    }
}

impl From<ReportError> for CommandError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::NotBracketGenerating(p) => CommandError::NotBracketGenerating(p),
            other => CommandError::Computation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CommandError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub max_degree: usize,
    pub probe_samples: usize,
    pub seed: u64,
    pub groebner_budget: usize,
    pub kappa_cap: usize,
    pub degree_cap: u32,
    pub unknown_cap: usize,
    pub output: OutputFormat,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for Config {
    fn default() -> Self {
        let a = AnalysisConfig::default();
        Config {
            max_degree: a.max_degree,
            probe_samples: a.probe_samples,
            seed: a.seed,
            groebner_budget: a.groebner_budget,
            kappa_cap: a.kappa_cap,
            degree_cap: a.degree_cap,
            unknown_cap: a.unknown_cap,
            output: OutputFormat::Text,
            exec: Exec::default(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let caps = [
            ("max-degree", self.max_degree),
            ("samples", self.probe_samples),
            ("groebner-budget", self.groebner_budget),
            ("kappa cap", self.kappa_cap),
            ("degree cap", self.degree_cap as usize),
            ("unknown cap", self.unknown_cap),
        ];
        for (name, v) in caps {
            if v == 0 {
                return Err(CommandError::Input(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            max_degree: self.max_degree,
            probe_samples: self.probe_samples,
            seed: self.seed,
            groebner_budget: self.groebner_budget,
            kappa_cap: self.kappa_cap,
            degree_cap: self.degree_cap,
            unknown_cap: self.unknown_cap,
            exec: self.exec,
            ..AnalysisConfig::default()
        }
    }
}

/// A command result in both output forms.
pub trait Rendered: Serialize + Sized {
    fn text(&self) -> String;

    fn json(&self) -> String {
        emit_report(self)
    }
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Ok(parse_model(&text)?)
}

/// Parses `"0,1/2,-3"` or `"0 1/2 -3"` into a point on the model chart.
pub fn parse_point(model: &Model, text: &str) -> Result<PointQ> {
    let vals = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_rational(s).ok_or_else(|| CommandError::Input(format!("`{s}` is not a rational number"))))
        .collect::<Result<Vec<_>>>()?;
    PointQ::new(model.chart(), vals).map_err(|e| CommandError::Input(e.to_string()))
}

fn resolve_point(model: &Model, point: Option<&str>) -> Result<PointQ> {
    match point {
        Some(t) => parse_point(model, t),
        None => Ok(model.base_point_or_origin()),
    }
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    strings(v).join(", ")
}

impl Rendered for FinitenessReport {
    fn text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("model        {}\n", self.model));
        s.push_str(&format!("point        ({})\n", self.point.join(", ")));
        s.push_str(&format!("growth       ({})\n", join(&self.growth_incremental)));
        s.push_str(&format!("gnla dims    ({})\n", join(self.gnla.dims())));
        let status = if self.tanaka.terminated { "terminated" } else { "capped" };
        s.push_str(&format!("tanaka g_k   ({}) {status}\n", join(&self.tanaka.dims)));
        match self.tanaka.total {
            Some(t) => s.push_str(&format!("tanaka total {t}\n")),
            None => s.push_str(&format!("tanaka total unknown (no g_k = 0 up to k = {})\n", self.tanaka.cap)),
        }
        s.push_str(&format!("h0 dim       {}\n", self.h0_dim));
        s.push_str(&format!("char variety {}\n", char_variety_line(&self.char_variety)));
        match self.theorem1_bound {
            Some(b) => s.push_str(&format!("sym bound    {b}\n")),
            None => s.push_str("sym bound    none\n"),
        }
        s.push_str(&format!("growth test  {}\n", theorem2_word(self.theorem2_status)));
        s.push_str(&format!("verdict      {}\n", verdict_word(self.finiteness_verdict)));
        s.push_str(&format!("regular      {} ({} samples, seed {})\n", self.regular_at_samples, self.samples, self.seed));
        s
    }
}

fn char_variety_line(cv: &CharVarietyVerdict) -> String {
    let v = serde_json::to_value(cv).expect("serializable");
    let verdict = v["verdict"].as_str().unwrap_or("?").to_string();
    let stage = v["stage"].as_str().unwrap_or("?");
    let mut out = format!("{verdict} (stage {stage})");
    if let (Some(p), Some(q)) = (v["witness_p"].as_array(), v["witness_q"].as_array()) {
        let fmt = |a: &Vec<serde_json::Value>| a.iter().map(|x| x.as_str().unwrap_or("?").to_string()).collect::<Vec<_>>().join(", ");
        out.push_str(&format!(" p = ({}) q = ({})", fmt(p), fmt(q)));
    }
    if verdict == "undecided" {
        out.push_str(&format!(" budget {} exhausted", cv.budget));
    }
    out
}

fn theorem2_word(s: Theorem2Status) -> &'static str {
    match s {
        Theorem2Status::Finite => "finite",
        Theorem2Status::Inconclusive => "inconclusive",
        Theorem2Status::TooShort => "growth too short",
    }
}

fn verdict_word(v: FinitenessVerdict) -> &'static str {
    match v {
        FinitenessVerdict::FiniteCharVariety => "finite (empty characteristic variety)",
        FinitenessVerdict::FiniteTheorem2 => "finite (growth criterion)",
        FinitenessVerdict::Inconclusive => "inconclusive",
    }
}

/// The full pipeline: flag, symbol algebra, prolongation, `h_0`,
/// characteristic variety and the verdicts.
pub fn cmd_analyze(model: &Model, point: Option<&str>, cfg: &Config) -> Result<FinitenessReport> {
    cfg.validate()?;
    let p = resolve_point(model, point)?;
    Ok(finiteness_report(model, Some(&p), &cfg.analysis())?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProlongReport {
    pub model: String,
    pub point: Vec<String>,
    pub growth: Vec<usize>,
    pub gnla_dims: Vec<usize>,
    pub tanaka_dims: Vec<usize>,
    pub terminated: bool,
    pub terminated_at: Option<usize>,
    pub total: Option<usize>,
    pub seed: u64,
    pub config: Config,
}

impl Rendered for ProlongReport {
    fn text(&self) -> String {
        let mut s = format!("model   {}\npoint   ({})\ngrowth  ({})\n", self.model, self.point.join(", "), join(&self.growth));
        for (k, d) in self.tanaka_dims.iter().enumerate() {
            s.push_str(&format!("g_{k:<5} {d}\n"));
        }
        match (self.terminated_at, self.total) {
            (Some(k), Some(t)) => s.push_str(&format!("terminated at g_{k}, total dimension {t}\n")),
            _ => s.push_str(&format!("capped at degree {}\n", self.config.max_degree)),
        }
        s
    }
}

fn flag_at_point(model: &Model, p: &PointQ, cfg: &Config) -> Result<(flag::DerivedFlag, flag::FlagAtPoint)> {
    let probes = flag::probe_points(model.chart(), Some(p), cfg.probe_samples, cfg.seed);
    let opts = FlagOptions { kappa_cap: cfg.kappa_cap, probes, degree_cap: cfg.degree_cap, exec: cfg.exec };
    let df = flag::derived_flag_with(&model.frame(), &opts).map_err(|e| CommandError::Computation(e.to_string()))?;
    let fp = flag::flag_at(&df, p).map_err(|e| CommandError::Computation(e.to_string()))?;
    if !flag::is_bracket_generating(&fp) {
        return Err(CommandError::NotBracketGenerating(p.to_string()));
    }
    Ok((df, fp))
}

fn prolongation_at(df: &flag::DerivedFlag, p: &PointQ, cfg: &Config) -> Result<prolong::Prolongation> {
    let a = gnla::gnla_at(df, p, cfg.exec).map_err(|e| CommandError::Computation(e.to_string()))?;
    let opts = ProlongOptions { max_degree: cfg.max_degree, unknown_cap: cfg.unknown_cap, exec: cfg.exec };
    prolong::tanaka_prolongation_with(&a, &opts).map_err(|e| CommandError::Computation(e.to_string()))
}

pub fn cmd_prolong(model: &Model, point: Option<&str>, cfg: &Config) -> Result<ProlongReport> {
    cfg.validate()?;
    let p = resolve_point(model, point)?;
    let (df, fp) = flag_at_point(model, &p, cfg)?;
    let pro = prolongation_at(&df, &p, cfg)?;
    let terminated_at = match pro.status() {
        Status::Terminated { at } => Some(at),
        Status::Capped { .. } => None,
    };
    Ok(ProlongReport {
        model: model.name().to_string(),
        point: strings(p.values()),
        growth: fp.growth,
        gnla_dims: pro.gnla().dims().to_vec(),
        tanaka_dims: pro.dims(),
        terminated: pro.terminated(),
        terminated_at,
        total: pro.total_dim(),
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FintypeReport {
    pub model: String,
    pub point: Vec<String>,
    pub growth: Vec<usize>,
    pub h0_dim: usize,
    pub char_variety: CharVarietyVerdict,
    pub theorem2_status: Theorem2Status,
    pub theorem2_finite: bool,
    pub finiteness_verdict: FinitenessVerdict,
    pub finite_routes: Vec<&'static str>,
    pub seed: u64,
    pub config: Config,
}

impl Rendered for FintypeReport {
    fn text(&self) -> String {
        format!(
            "model        {}\ngrowth       ({})\nh0 dim       {}\nchar variety {}\ngrowth test  {}\nverdict      {}\n",
            self.model,
            join(&self.growth),
            self.h0_dim,
            char_variety_line(&self.char_variety),
            theorem2_word(self.theorem2_status),
            verdict_word(self.finiteness_verdict)
        )
    }
}

pub fn cmd_fintype(model: &Model, point: Option<&str>, cfg: &Config) -> Result<FintypeReport> {
    let r = cmd_analyze(model, point, cfg)?;
    Ok(FintypeReport {
        model: r.model,
        point: r.point,
        growth: r.growth_incremental,
        h0_dim: r.h0_dim,
        char_variety: r.char_variety,
        theorem2_status: r.theorem2_status,
        theorem2_finite: r.theorem2_finite,
        finiteness_verdict: r.finiteness_verdict,
        finite_routes: r.finite_routes,
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeDimRow {
    pub n: u32,
    pub k: u32,
    /// `dim` of the degree `j` component, `j = 1..=k`.
    pub witt_dims: Vec<u128>,
    pub free_total_dim: u128,
    pub symmetry_bound: Option<u128>,
    pub bound_note: &'static str,
}

impl Rendered for FreeDimRow {
    fn text(&self) -> String {
        let bound = match self.symmetry_bound {
            Some(b) => b.to_string(),
            None => self.bound_note.to_string(),
        };
        format!(
            "n {} k {}\nwitt dims   ({})\nfree total  {}\nsym bound   {}\n",
            self.n,
            self.k,
            join(&self.witt_dims),
            self.free_total_dim,
            bound
        )
    }
}

pub fn cmd_freedim(n: u32, k: u32) -> Result<FreeDimRow> {
    if n < 2 || k < 1 {
        return Err(CommandError::Input("freedim needs n >= 2 and k >= 1".into()));
    }
    let overflow = || CommandError::Input(format!("dimensions for n = {n}, k = {k} overflow 128 bits"));
    let witt_dims = (1..=k).map(|j| try_witt_dim(n, j).ok_or_else(overflow)).collect::<Result<Vec<_>>>()?;
    let total = free_total_dim(n, k).ok_or_else(overflow)?;
    let bound = fintype::symmetry_bound_free(n, k);
    let bound_note = match (n, k) {
        (2, 2) => "infinite (contact)",
        (_, 1) => "infinite (integrable)",
        (2, 3) => "exceptional, G2",
        (_, 2) => "exceptional, B_n",
        _ => "free total + n^2",
    };
    Ok(FreeDimRow { n, k, witt_dims, free_total_dim: total, symmetry_bound: bound, bound_note })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolSummary {
    /// Coordinates of the class in `g_degree` (negative degrees).
    pub class: Option<Vec<String>>,
    /// Coordinates in the computed basis of `g_degree` (non-negative degrees).
    pub certificate: Option<Vec<String>>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymCheckReport {
    pub model: String,
    pub field: String,
    pub point: Vec<String>,
    pub symmetry: bool,
    pub filtration_degree: Option<FiltrationDegree>,
    pub graded_symbol: Option<SymbolSummary>,
    pub seed: u64,
    pub config: Config,
}

impl Rendered for SymCheckReport {
    fn text(&self) -> String {
        let mut s = format!("field    {}\n", self.field);
        if !self.symmetry {
            s.push_str("verdict  not a symmetry\n");
            return s;
        }
        s.push_str("verdict  symmetry\n");
        match self.filtration_degree {
            Some(FiltrationDegree::Exact(d)) => s.push_str(&format!("degree   {d}\n")),
            Some(FiltrationDegree::AtLeast(d)) => s.push_str(&format!("degree   >= {d}\n")),
            None => {}
        }
        if let Some(sym) = &self.graded_symbol {
            if let Some(c) = &sym.class {
                s.push_str(&format!("class    ({})\n", c.join(", ")));
            }
            if let Some(c) = &sym.certificate {
                s.push_str(&format!("symbol   ({}) in the g_k basis\n", c.join(", ")));
            }
            if let Some(n) = &sym.note {
                s.push_str(&format!("note     {n}\n"));
            }
        }
        s
    }
}

/// Symmetry verdict, filtration degree and graded symbol of a field given by
/// name or by expression.
pub fn cmd_check_sym(model: &Model, field: &str, point: Option<&str>, cfg: &Config) -> Result<SymCheckReport> {
    cfg.validate()?;
    let x = match model.field(field.trim()) {
        Some(f) => f.clone(),
        None => parse_field(field, model)?,
    };
    let p = resolve_point(model, point)?;
    let sym_err = |e: SymError| CommandError::Computation(e.to_string());
    let symmetry = symcheck::is_symmetry_with(&x, &model.frame(), cfg.exec).map_err(sym_err)?;
    let mut report = SymCheckReport {
        model: model.name().to_string(),
        field: x.to_string(),
        point: strings(p.values()),
        symmetry,
        filtration_degree: None,
        graded_symbol: None,
        seed: cfg.seed,
        config: cfg.clone(),
    };
    if !symmetry {
        return Ok(report);
    }
    let (df, _) = flag_at_point(model, &p, cfg)?;
    report.filtration_degree =
        Some(symcheck::filtration_degree(&x, &df, &p, symcheck::DEFAULT_FILTRATION_CAP, cfg.exec).map_err(sym_err)?);
    let pro = prolongation_at(&df, &p, cfg)?;
    report.graded_symbol = Some(match symcheck::graded_symbol(&x, &df, &pro, &p, cfg.exec) {
        Ok(g) => SymbolSummary {
            class: g.class.as_deref().map(strings),
            certificate: g.certificate.as_deref().map(strings),
            note: None,
        },
        Err(e) => SymbolSummary { class: None, certificate: None, note: Some(e.to_string()) },
    });
    Ok(report)
}

/// Emits a constructed model in the `.tk` format.
pub fn cmd_model(kind: &str, params: &[usize]) -> Result<String> {
    Ok(print_model(&models::by_kind(kind, params)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e13() -> Model {
        parse_model(&cmd_model("e13", &[]).unwrap()).unwrap()
    }

    fn quick() -> Config {
        Config { probe_samples: 2, ..Config::default() }
    }

    #[test]
    fn analyze_e13() {
        let r = cmd_analyze(&e13(), None, &quick()).unwrap();
        assert_eq!(r.tanaka.dims, vec![3, 2, 0]);
        assert_eq!(r.theorem1_bound, Some(11));
        assert!(r.text().contains("tanaka total 11"));
    }

    #[test]
    fn rank_one_frame_exits_3() {
        let m = parse_model("coords x y\nfield U = d/dx\ndistribution D = [U]").unwrap();
        let e = cmd_analyze(&m, None, &quick()).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let e = cmd_analyze(&m, Some("0"), &quick()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn check_sym_degrees() {
        let m = e13();
        let r = cmd_check_sym(&m, "S2", None, &quick()).unwrap();
        assert!(r.symmetry);
        assert_eq!(r.filtration_degree, Some(FiltrationDegree::Exact(1)));
        let r = cmd_check_sym(&m, "R", None, &quick()).unwrap();
        assert_eq!(r.filtration_degree, Some(FiltrationDegree::Exact(0)));
        let r = cmd_check_sym(&m, "d/dz3", None, &quick()).unwrap();
        assert!(!r.symmetry);
    }

    #[test]
    fn freedim_rows() {
        assert_eq!(cmd_freedim(2, 3).unwrap().symmetry_bound, Some(14));
        assert_eq!(cmd_freedim(3, 2).unwrap().symmetry_bound, Some(21));
        let r = cmd_freedim(2, 2).unwrap();
        assert_eq!(r.symmetry_bound, None);
        assert!(r.text().contains("infinite (contact)"));
        assert!(cmd_freedim(1, 3).is_err());
    }

    #[test]
    fn model_kinds() {
        let c3 = parse_model(&cmd_model("cartan-jet", &[3]).unwrap()).unwrap();
        assert_eq!(c3.chart().len(), 5);
        let mj = parse_model(&cmd_model("mixed-jet", &[1, 2]).unwrap()).unwrap();
        assert_eq!(mj.frame().len(), 3);
        assert!(cmd_model("nope", &[]).is_err());
    }
}
