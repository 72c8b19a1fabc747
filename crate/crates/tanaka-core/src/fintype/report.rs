use serde::Serialize;
use thiserror::Error;

use super::{char_variety, h0, theorem2_status, CharVarietyConfig, CharVarietyVerdict, Theorem2Status, Verdict};
use crate::fieldalg::{self, PointQ};
use crate::flag::{self, FlagError, FlagOptions};
use crate::gnla::{self, Gnla, GnlaError};
use crate::groebner;
use crate::modelio::Model;
use crate::par::{self, Exec};
use crate::prolong::{self, ProlongError, ProlongOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Gnla(#[from] GnlaError),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
    #[error("distribution is not bracket-generating at {0}")]
    NotBracketGenerating(String),
}

/// Resolved settings for the full analysis; embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisConfig {
    pub max_degree: usize,
    pub probe_samples: usize,
    pub seed: u64,
    pub groebner_budget: usize,
    pub kappa_cap: usize,
    pub degree_cap: u32,
    pub unknown_cap: usize,
    pub witness_grid_bound: i64,
    pub witness_random_samples: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            max_degree: prolong::DEFAULT_MAX_DEGREE,
            probe_samples: flag::DEFAULT_PROBE_SAMPLES,
            seed: 0,
            groebner_budget: groebner::DEFAULT_BUDGET,
            kappa_cap: 16,
            degree_cap: fieldalg::DEFAULT_DEGREE_CAP,
            unknown_cap: prolong::DEFAULT_UNKNOWN_CAP,
            witness_grid_bound: 2,
            witness_random_samples: 32,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TanakaSummary {
    /// `dim g_0, dim g_1, ...` as computed.
    pub dims: Vec<usize>,
    /// `dim m + Σ dim g_k`, when terminated.
    pub total: Option<usize>,
    pub terminated: bool,
    /// The configured maximal degree.
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FinitenessVerdict {
    FiniteCharVariety,
    FiniteTheorem2,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolConsistency {
    /// Same growth and same structure constants in the deterministic frame.
    Consistent,
    /// Same growth, different constants: the algebras may still be isomorphic.
    IsomorphismUndetermined,
    GrowthDiffers,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinitenessReport {
    pub model: String,
    pub point: Vec<String>,
    pub growth_incremental: Vec<usize>,
    pub growth_cumulative: Vec<usize>,
    pub kappa: Option<usize>,
    pub bracket_generating: bool,
    pub tanaka: TanakaSummary,
    pub h0_dim: usize,
    pub char_variety: CharVarietyVerdict,
    /// Minimum of the Tanaka totals over the probe points, when every probe
    /// point gives a terminated prolongation. Sampled, not a global infimum.
    pub theorem1_bound: Option<usize>,
    pub theorem1_scope: &'static str,
    pub theorem2_finite: bool,
    pub theorem2_status: Theorem2Status,
    pub finiteness_verdict: FinitenessVerdict,
    /// Every criterion that certifies finiteness on its own.
    pub finite_routes: Vec<&'static str>,
    pub regular_at_samples: bool,
    pub symbol_consistency: SymbolConsistency,
    /// Adapted frame at the point: representative fields, grade `-1` first.
    pub frame: Vec<String>,
    pub gnla: Gnla,
    pub probe_points: Vec<Vec<String>>,
    pub probe_totals: Vec<Option<usize>>,
    pub samples: usize,
    pub seed: u64,
    pub config: AnalysisConfig,
    pub version: &'static str,
}

struct ProbeResult {
    growth: Vec<usize>,
    fingerprint: String,
    total: Option<usize>,
}

fn point_strings(p: &PointQ) -> Vec<String> {
    p.values().iter().map(ToString::to_string).collect()
}

/// Full pipeline at `point` (default: the model base point or the origin).
pub fn finiteness_report(model: &Model, point: Option<&PointQ>, cfg: &AnalysisConfig) -> Result<FinitenessReport, ReportError> {
    let point = point.cloned().unwrap_or_else(|| model.base_point_or_origin());
    let probes = flag::probe_points(model.chart(), Some(&point), cfg.probe_samples, cfg.seed);
    let opts = FlagOptions { kappa_cap: cfg.kappa_cap, probes: probes.clone(), degree_cap: cfg.degree_cap, exec: cfg.exec };
    let df = flag::derived_flag_with(&model.frame(), &opts)?;
    let fp = flag::flag_at(&df, &point)?;
    if !flag::is_bracket_generating(&fp) {
        return Err(ReportError::NotBracketGenerating(point.to_string()));
    }
    let regularity = flag::regularity_probe(&df, &probes, cfg.exec)?;
    let popts = ProlongOptions { max_degree: cfg.max_degree, unknown_cap: cfg.unknown_cap, exec: cfg.exec };

    let base_gnla = gnla::gnla_at(&df, &point, cfg.exec)?;
    let base_pro = prolong::tanaka_prolongation_with(&base_gnla, &popts)?;
    let others = par::try_map(cfg.exec, &probes[1..], |p| -> Result<Option<ProbeResult>, ReportError> {
        let f = flag::flag_at(&df, p)?;
        if !flag::is_bracket_generating(&f) {
            return Ok(None);
        }
        let g = gnla::gnla_at(&df, p, Exec::Sequential)?;
        let pro = prolong::tanaka_prolongation_with(&g, &ProlongOptions { exec: Exec::Sequential, ..popts.clone() })?;
        Ok(Some(ProbeResult { growth: f.growth, fingerprint: g.fingerprint(), total: pro.total_dim() }))
    })?;
    let mut probe_results = vec![Some(ProbeResult {
        growth: fp.growth.clone(),
        fingerprint: base_gnla.fingerprint(),
        total: base_pro.total_dim(),
    })];
    probe_results.extend(others);

    let h = h0(&base_pro);
    let cv_cfg = CharVarietyConfig {
        grid_bound: cfg.witness_grid_bound,
        random_samples: cfg.witness_random_samples,
        seed: cfg.seed,
        budget: cfg.groebner_budget,
        extract_witness: true,
        exec: cfg.exec,
    };
    let cv = char_variety(&h, &cv_cfg);

    let probe_totals: Vec<Option<usize>> = probe_results.iter().map(|r| r.as_ref().and_then(|r| r.total)).collect();
    let theorem1_bound = probe_totals.iter().copied().collect::<Option<Vec<usize>>>().and_then(|t| t.into_iter().min());

    let symbol_consistency = if probe_results.iter().any(|r| r.as_ref().is_none_or(|r| r.growth != fp.growth)) {
        SymbolConsistency::GrowthDiffers
    } else if probe_results.iter().flatten().all(|r| r.fingerprint == base_gnla.fingerprint()) {
        SymbolConsistency::Consistent
    } else {
        SymbolConsistency::IsomorphismUndetermined
    };

    let t2 = theorem2_status(&fp.growth);
    let mut finite_routes = Vec::new();
    if cv.verdict == Verdict::Empty {
        finite_routes.push("char_variety");
    }
    if t2 == Theorem2Status::Finite {
        finite_routes.push("theorem2");
    }
    let finiteness_verdict = match finite_routes.first() {
        Some(&"char_variety") => FinitenessVerdict::FiniteCharVariety,
        Some(_) => FinitenessVerdict::FiniteTheorem2,
        None => FinitenessVerdict::Inconclusive,
    };

    Ok(FinitenessReport {
        model: model.name().to_string(),
        point: point_strings(&point),
        growth_cumulative: fp.growth_cumulative(),
        growth_incremental: fp.growth.clone(),
        kappa: fp.kappa,
        bracket_generating: true,
        tanaka: TanakaSummary {
            dims: base_pro.dims(),
            total: base_pro.total_dim(),
            terminated: base_pro.terminated(),
            cap: cfg.max_degree,
        },
        h0_dim: h.dim(),
        char_variety: cv,
        theorem1_bound,
        theorem1_scope: "min_over_probe_points",
        theorem2_finite: t2 == Theorem2Status::Finite,
        theorem2_status: t2,
        finiteness_verdict,
        finite_routes,
        regular_at_samples: regularity.regular_at_samples,
        symbol_consistency,
        frame: fp.representatives.iter().map(ToString::to_string).collect(),
        gnla: base_gnla,
        probe_points: probes.iter().map(point_strings).collect(),
        probe_totals,
        samples: probes.len(),
        seed: cfg.seed,
        config: cfg.clone(),
        version: crate::VERSION,
    })
}
