//! Command pipelines. Each returns the finished report and its exit code;
//! nothing is written until the caller has the complete report.

use hermitian_torsion::classifiers::classify;
use hermitian_torsion::functionals::{
    fd_directional, first_variation, gauduchon_first_variation, gauduchon_functional, residual_report, torsion_functional,
};
use hermitian_torsion::optimizer::{minimize_from, Objective, OptimConfig};
use hermitian_torsion::{analyze, catalog, sampling, HermMat, HermitianStructure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, EXIT_NEGATIVE, EXIT_OK};
use crate::input::InputDocument;
use crate::report::{
    CatalogEntryOut, CatalogListing, CriticalSection, OptimizationSection, ReportDocument, ToolInfo, VariationSample,
    VariationSection,
};

/// Largest relative deviation accepted by `variation-check`.
pub const VARIATION_THRESHOLD: f64 = 1e-5;
/// Absolute floor below which a difference counts as agreement.
pub const VARIATION_ABS_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    Torsion,
    Gauduchon,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::Torsion => "torsion",
            Functional::Gauduchon => "gauduchon",
        }
    }
}

fn base_report(command: &str, tol: f64, input: &InputDocument, hs: &HermitianStructure) -> ReportDocument {
    let mut doc = ReportDocument::new(command, tol, input.clone());
    doc.validation = Some((&hs.structure().validate()).into());
    doc
}

pub fn analyze_cmd(input: &InputDocument, tol: f64) -> Result<(ReportDocument, i32), CliError> {
    let hs = input.build()?;
    let pkg = analyze(&hs)?;
    let mut doc = base_report("analyze", tol, input, &hs);
    doc.structure_equations = Some(hs.structure().render_equations());
    doc.classification = Some((&classify(&pkg, &hs, tol)?).into());
    doc.residuals = Some((&residual_report(&hs, &pkg)?).into());
    doc.torsion = Some((&pkg).into());
    Ok((doc, EXIT_OK))
}

pub fn check_critical_cmd(input: &InputDocument, functional: Functional, tol: f64) -> Result<(ReportDocument, i32), CliError> {
    let hs = input.build()?;
    let pkg = analyze(&hs)?;
    let rr = residual_report(&hs, &pkg)?;
    let residual = match functional {
        Functional::Torsion => rr.norm_q_f,
        Functional::Gauduchon => rr.norm_q_g,
    };
    let critical = residual <= tol;
    let mut doc = base_report("check-critical", tol, input, &hs);
    doc.residuals = Some((&rr).into());
    doc.critical = Some(CriticalSection {
        functional: functional.name().into(),
        residual,
        tol,
        critical,
    });
    Ok((doc, if critical { EXIT_OK } else { EXIT_NEGATIVE }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationOptions {
    pub functional: Functional,
    pub directions: usize,
    pub fd_step: f64,
    pub seed: u64,
}

/// Relative difference `|a − f| / max(|a|, |f|)`, or 0 when both sides are
/// within the absolute floor of zero.
pub fn deviation(analytic: f64, fd: f64) -> f64 {
    let scale = analytic.abs().max(fd.abs());
    if scale <= VARIATION_ABS_FLOOR {
        0.0
    } else {
        (analytic - fd).abs() / scale
    }
}

pub fn variation_check_cmd(input: &InputDocument, opts: &VariationOptions, tol: f64) -> Result<(ReportDocument, i32), CliError> {
    if opts.directions == 0 {
        return Err(CliError::invalid("--directions must be at least 1".into()));
    }
    if !(opts.fd_step > 0.0 && opts.fd_step.is_finite()) {
        return Err(CliError::invalid("--fd-step must be positive".into()));
    }
    let hs = input.build()?;
    let n = hs.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples = Vec::with_capacity(opts.directions);
    for _ in 0..opts.directions {
        let h = sampling::random_hermitian(&mut rng, n);
        let (analytic, fd) = match opts.functional {
            Functional::Torsion => (first_variation(&hs, &h)?, fd_directional(&hs, &h, opts.fd_step, torsion_functional)?),
            Functional::Gauduchon => (
                gauduchon_first_variation(&hs, &h)?,
                fd_directional(&hs, &h, opts.fd_step, gauduchon_functional)?,
            ),
        };
        if !analytic.is_finite() {
            return Err(CliError::numerical("analytic variation is not finite".into()));
        }
        samples.push(VariationSample {
            analytic,
            finite_difference: fd,
            abs_diff: (analytic - fd).abs(),
            deviation: deviation(analytic, fd),
        });
    }
    let max_deviation = samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let passed = max_deviation <= VARIATION_THRESHOLD;
    let mut doc = base_report("variation-check", tol, input, &hs);
    doc.variation = Some(VariationSection {
        functional: opts.functional.name().into(),
        directions: opts.directions,
        fd_step: opts.fd_step,
        seed: opts.seed,
        unimodular: hs.structure().validate().is_unimodular(),
        threshold: VARIATION_THRESHOLD,
        abs_floor: VARIATION_ABS_FLOOR,
        max_deviation,
        passed,
        samples,
    });
    Ok((doc, if passed { EXIT_OK } else { EXIT_NEGATIVE }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    pub config: OptimConfig,
    /// Seed for the starting perturbation; none starts at the input metric.
    pub seed: Option<u64>,
    pub perturbation: f64,
}

pub fn parse_objective(s: &str) -> Option<Objective> {
    match s {
        "torsion" | "torsion_functional" => Some(Objective::TorsionFunctional),
        "gauduchon" | "gauduchon_functional" => Some(Objective::GauduchonFunctional),
        "residual_norm" | "residual-norm" => Some(Objective::ResidualNorm),
        _ => None,
    }
}

pub fn optimize_cmd(input: &InputDocument, opts: &OptimizeOptions, tol: f64) -> Result<(ReportDocument, i32), CliError> {
    opts.config.validate().map_err(|e| CliError::invalid(e.to_string()))?;
    if !(opts.perturbation >= 0.0 && opts.perturbation.is_finite()) {
        return Err(CliError::invalid("--perturbation must be non-negative".into()));
    }
    let hs = input.build()?;
    let n = hs.dim();
    let start = match opts.seed {
        Some(seed) => sampling::random_hermitian_with_norm(&mut ChaCha8Rng::seed_from_u64(seed), n, opts.perturbation),
        None => HermMat::zeros(n),
    };
    let tr = minimize_from(&hs, &start, &opts.config)?;
    let mut doc = base_report("optimize", tol, input, &hs);
    doc.optimization = Some(OptimizationSection::new(&opts.config, opts.seed, opts.perturbation, &tr));
    Ok((doc, if tr.converged { EXIT_OK } else { EXIT_NEGATIVE }))
}

pub fn catalog_list() -> CatalogListing {
    CatalogListing {
        tool: ToolInfo::default(),
        entries: catalog::names()
            .into_iter()
            .map(|(name, description)| CatalogEntryOut {
                name: name.into(),
                description: description.into(),
            })
            .collect(),
    }
}

pub fn catalog_show(name: &str, tol: f64) -> Result<(ReportDocument, i32), CliError> {
    let input = InputDocument::catalog(name);
    let hs = input.build()?;
    let mut doc = base_report("catalog show", tol, &input, &hs);
    doc.structure_equations = Some(hs.structure().render_equations());
    Ok((doc, EXIT_OK))
}
