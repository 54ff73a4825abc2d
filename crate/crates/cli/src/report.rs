//! The structured report. Field order is fixed by the struct definitions, and
//! floats go through `serde_json`'s shortest round-trip formatting, so equal
//! inputs give byte-identical documents.

use hermitian_torsion::classifiers::{ClassificationReport, Flag, NILPOTENT_SCOPE};
use hermitian_torsion::functionals::ResidualReport;
use hermitian_torsion::lie_hermitian::ValidationReport;
use hermitian_torsion::optimizer::{OptimConfig, OptimTrace, TraceRecord};
use hermitian_torsion::{CMat, TorsionPackage};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::input::{metric_rows, ConstantEntry, InputDocument};

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

pub const TOOL_NAME: &str = "htorsion";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Entries of `T` with modulus at or below this are left out of the listing.
pub const LISTING_FLOOR: f64 = 1e-14;

fn cx(z: Complex64) -> Complex {
    [z.re, z.im]
}

pub fn matrix(m: &CMat) -> Matrix {
    metric_rows(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub validation_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedResidual {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSection {
    pub passed: bool,
    pub unimodular: bool,
    pub unimodularity_residual: f64,
    pub checks: Vec<NamedResidual>,
}

impl From<&ValidationReport> for ValidationSection {
    fn from(r: &ValidationReport) -> Self {
        Self {
            passed: r.passed(),
            unimodular: r.is_unimodular(),
            unimodularity_residual: r.unimodularity_residual,
            checks: r
                .checks
                .iter()
                .map(|c| NamedResidual {
                    name: c.name.into(),
                    passed: c.passed,
                    residual: c.residual,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionSection {
    pub n: usize,
    /// Columns are the unitary frame in terms of the reference frame.
    pub frame: Matrix,
    pub norm_t2: f64,
    pub norm_eta2: f64,
    pub chi: f64,
    pub chi_imag: f64,
    pub eta: Vec<Complex>,
    pub lee: Vec<f64>,
    /// Nonzero `T^up_{lo}` in the unitary frame, 1-based.
    pub torsion: Vec<ConstantEntry>,
    pub a: Matrix,
    pub b: Matrix,
    pub phi: Matrix,
    pub xi: Matrix,
}

impl From<&TorsionPackage> for TorsionSection {
    fn from(p: &TorsionPackage) -> Self {
        Self {
            n: p.n,
            frame: matrix(&p.frame),
            norm_t2: p.norm_t2,
            norm_eta2: p.norm_eta2,
            chi: p.chi,
            chi_imag: p.chi_imag,
            eta: p.eta.iter().copied().map(cx).collect(),
            lee: p.lee.clone(),
            torsion: p
                .t
                .nonzero(LISTING_FLOOR)
                .into_iter()
                .map(|(j, i, k, v)| ConstantEntry {
                    up: j + 1,
                    lo: [i + 1, k + 1],
                    re: v.re,
                    im: v.im,
                })
                .collect(),
            a: matrix(&p.a),
            b: matrix(&p.b),
            phi: matrix(&p.phi),
            xi: matrix(&p.xi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlagOut {
    pub holds: bool,
    pub residual: f64,
}

impl From<Flag> for FlagOut {
    fn from(f: Flag) -> Self {
        Self {
            holds: f.holds,
            residual: f.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StpOut {
    pub holds: bool,
    pub residual: f64,
    pub identity_tol: f64,
    pub consistent: bool,
    pub identities: Vec<NamedResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NilpotentOut {
    pub holds: bool,
    /// 1-based reference indices in their new order.
    pub witness: Option<Vec<usize>>,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSection {
    pub tol: f64,
    pub kahler: FlagOut,
    pub balanced: FlagOut,
    pub gauduchon: FlagOut,
    pub pluriclosed: FlagOut,
    pub lck_shape: FlagOut,
    pub stp: StpOut,
    pub nilpotent_j: NilpotentOut,
}

impl From<&ClassificationReport> for ClassificationSection {
    fn from(r: &ClassificationReport) -> Self {
        Self {
            tol: r.tol,
            kahler: r.kahler.into(),
            balanced: r.balanced.into(),
            gauduchon: r.gauduchon.into(),
            pluriclosed: r.pluriclosed.into(),
            lck_shape: r.lck_shape.into(),
            stp: StpOut {
                holds: r.stp.flag.holds,
                residual: r.stp.flag.residual,
                identity_tol: r.stp.identity_tol,
                consistent: r.stp.consistent(),
                identities: r
                    .stp
                    .identities
                    .iter()
                    .map(|(name, res)| NamedResidual {
                        name: (*name).into(),
                        passed: *res <= r.stp.identity_tol,
                        residual: *res,
                    })
                    .collect(),
            },
            nilpotent_j: NilpotentOut {
                holds: r.nilpotent_j.holds,
                witness: r.nilpotent_j.witness.as_ref().map(|w| w.iter().map(|i| i + 1).collect()),
                scope: NILPOTENT_SCOPE.into(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSection {
    pub f_value: f64,
    pub g_value: f64,
    pub b: f64,
    pub a: f64,
    pub trace_residual: f64,
    pub norm_q_f: f64,
    pub norm_q_g: f64,
    pub q_f: Matrix,
    pub q_g: Matrix,
}

impl From<&ResidualReport> for ResidualSection {
    fn from(r: &ResidualReport) -> Self {
        Self {
            f_value: r.f_value,
            g_value: r.g_value,
            b: r.b,
            a: r.a,
            trace_residual: r.trace_residual,
            norm_q_f: r.norm_q_f,
            norm_q_g: r.norm_q_g,
            q_f: matrix(&r.q_f),
            q_g: matrix(&r.q_g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSection {
    pub functional: String,
    pub residual: f64,
    pub tol: f64,
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSample {
    pub analytic: f64,
    pub finite_difference: f64,
    pub abs_diff: f64,
    /// Relative difference, or 0 when both sides are within the absolute floor of zero.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSection {
    pub functional: String,
    pub directions: usize,
    pub fd_step: f64,
    pub seed: u64,
    pub unimodular: bool,
    pub threshold: f64,
    pub abs_floor: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub samples: Vec<VariationSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOut {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub residual: f64,
    pub det: f64,
    pub step: f64,
}

impl From<&TraceRecord> for TraceOut {
    fn from(r: &TraceRecord) -> Self {
        Self {
            iteration: r.iteration,
            objective: r.objective,
            grad_norm: r.grad_norm,
            residual: r.residual,
            det: r.det,
            step: r.step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyOut {
    /// True when the final `‖Q_G‖` is small enough for the check to apply.
    pub applies: bool,
    pub holds: bool,
    pub q_g_threshold: f64,
    pub eta_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationSection {
    pub objective: String,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub fd_step: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub det_normalized: bool,
    pub seed: Option<u64>,
    pub perturbation: f64,
    pub converged: bool,
    pub termination: String,
    pub accepted_steps: usize,
    pub monotone: bool,
    pub final_objective: f64,
    pub final_norm_q_f: f64,
    pub final_norm_q_g: f64,
    pub final_eta_norm: f64,
    pub final_metric: Matrix,
    pub gauduchon_consistency: ConsistencyOut,
    pub final_classification: ClassificationSection,
    pub trace: Vec<TraceOut>,
}

/// `‖Q_G‖ ≤ 1e-8` must come with `|η| ≤ 1e-4`.
pub const CONSISTENCY_Q_G: f64 = 1e-8;
pub const CONSISTENCY_ETA: f64 = 1e-4;

impl OptimizationSection {
    pub fn new(cfg: &OptimConfig, seed: Option<u64>, perturbation: f64, tr: &OptimTrace) -> Self {
        let applies = tr.final_norm_q_g <= CONSISTENCY_Q_G;
        Self {
            objective: cfg.objective.name().into(),
            max_iter: cfg.max_iter,
            grad_tol: cfg.grad_tol,
            fd_step: cfg.fd_step,
            initial_step: cfg.initial_step,
            max_step: cfg.max_step,
            shrink: cfg.shrink,
            armijo: cfg.armijo,
            det_normalized: cfg.det_normalized,
            seed,
            perturbation,
            converged: tr.converged,
            termination: tr.termination.name().into(),
            accepted_steps: tr.accepted_steps(),
            monotone: tr.is_monotone(),
            final_objective: tr.final_objective(),
            final_norm_q_f: tr.final_norm_q_f,
            final_norm_q_g: tr.final_norm_q_g,
            final_eta_norm: tr.final_eta_norm,
            final_metric: matrix(tr.final_metric.matrix()),
            gauduchon_consistency: ConsistencyOut {
                applies,
                holds: !applies || tr.final_eta_norm <= CONSISTENCY_ETA,
                q_g_threshold: CONSISTENCY_Q_G,
                eta_threshold: CONSISTENCY_ETA,
            },
            final_classification: (&tr.final_classification).into(),
            trace: tr.records.iter().map(TraceOut::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: ToolInfo,
    pub command: String,
    pub tolerances: Tolerances,
    pub input: InputDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_equations: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<TorsionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<CriticalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variation: Option<VariationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationSection>,
}

impl ReportDocument {
    pub fn new(command: &str, tol: f64, input: InputDocument) -> Self {
        Self {
            tool: ToolInfo::default(),
            command: command.into(),
            tolerances: Tolerances {
                tol,
                validation_tol: hermitian_torsion::lie_hermitian::VALIDATION_TOL,
            },
            input,
            validation: None,
            structure_equations: None,
            torsion: None,
            classification: None,
            residuals: None,
            critical: None,
            variation: None,
            optimization: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntryOut {
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogListing {
    pub tool: ToolInfo,
    pub entries: Vec<CatalogEntryOut>,
}
