//! Descent over the cone of invariant Hermitian metrics on a fixed structure.
//!
//! Metrics are charted as `H(S) = H₀^{1/2} exp(S) H₀^{1/2}` with `S` Hermitian,
//! so every iterate is positive definite. The gradient is a central finite
//! difference over the `n²` real parameters of `S`; the analytic gradient of
//! the torsion functional is available as a cross-check.

use rayon::prelude::*;

use crate::classifiers::{classify, ClassificationReport, DEFAULT_TOL};
use crate::error::{GeometryError, Result};
use crate::functionals::{first_variation_from, gauduchon_residual_matrix, torsion_residual_matrix, volume_factor};
use crate::lie_hermitian::HermitianStructure;
use crate::tensor_algebra::matrix::{c, frobenius, hermitian_eigen, hermitian_exp, hermitian_sqrt, identity};
use crate::tensor_algebra::{CMat, HermMat};
use crate::torsion::{analyze, TorsionPackage};

/// Objective values below this are treated as flat by the stagnation test.
pub const FLAT_TOL: f64 = 1e-14;
/// Backtracking gives up after this many shrinks.
pub const MAX_SHRINKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `F = V^{1/n} |T|²`
    TorsionFunctional,
    /// `G = V^{1/n} |η|²`
    GauduchonFunctional,
    /// `‖Q_F‖²`
    ResidualNorm,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::TorsionFunctional => "torsion_functional",
            Objective::GauduchonFunctional => "gauduchon_functional",
            Objective::ResidualNorm => "residual_norm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimConfig {
    pub objective: Objective,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub fd_step: f64,
    pub initial_step: f64,
    /// Upper bound on the chart norm `‖α G‖` of a trial step.
    pub max_step: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub det_normalized: bool,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            objective: Objective::TorsionFunctional,
            max_iter: 500,
            grad_tol: 1e-8,
            fd_step: 1e-5,
            initial_step: 1.0,
            max_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
            det_normalized: true,
        }
    }
}

impl OptimConfig {
    pub fn with_objective(objective: Objective) -> Self {
        Self {
            objective,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(GeometryError::InvalidInput(format!("optimizer {what}")));
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return bad("fd_step must be positive");
        }
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return bad("grad_tol must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink factor must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial step must be positive");
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return bad("max step must be positive");
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad("sufficient-decrease constant must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
    Stagnated,
    LineSearchFailed,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIter => "max_iter",
            Termination::Stagnated => "stagnated",
            Termination::LineSearchFailed => "line_search_failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    /// `‖Q_G‖` for the Gauduchon objective, `‖Q_F‖` otherwise.
    pub residual: f64,
    pub det: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct OptimTrace {
    pub objective: Objective,
    /// One record for the start point and one per accepted step.
    pub records: Vec<TraceRecord>,
    pub final_metric: HermMat,
    pub converged: bool,
    pub termination: Termination,
    pub final_norm_q_f: f64,
    pub final_norm_q_g: f64,
    pub final_eta_norm: f64,
    pub final_classification: ClassificationReport,
}

impl OptimTrace {
    pub fn accepted_steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().map(|r| r.objective).unwrap_or(f64::NAN)
    }

    /// Objective values along accepted steps never increase.
    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].objective <= w[0].objective)
    }
}

/// `S − (tr S / n) I`.
pub fn trace_free(s: &CMat) -> CMat {
    let n = s.nrows();
    let t = s.trace() / n as f64;
    s - identity(n) * t
}

/// The chart `S ↦ H₀^{1/2} exp(S) H₀^{1/2}` anchored at a metric.
#[derive(Debug, Clone)]
pub struct MetricChart {
    anchor: HermMat,
    root: CMat,
    det_normalized: bool,
}

impl MetricChart {
    pub fn new(anchor: &HermMat, det_normalized: bool) -> Self {
        Self {
            anchor: anchor.clone(),
            root: hermitian_sqrt(anchor.matrix()),
            det_normalized,
        }
    }

    pub fn anchor(&self) -> &HermMat {
        &self.anchor
    }

    pub fn project(&self, s: &CMat) -> CMat {
        if self.det_normalized {
            trace_free(s)
        } else {
            s.clone()
        }
    }

    pub fn parametrize(&self, s: &HermMat) -> Result<HermMat> {
        let e = hermitian_exp(&self.project(s.matrix()));
        HermMat::positive_definite(&self.root * e * &self.root)
    }

    /// Derivative of the chart at `s` along `k`, through the divided
    /// differences of `exp` on the spectrum of `s`.
    pub fn differential(&self, s: &HermMat, k: &CMat) -> CMat {
        let s = self.project(s.matrix());
        let k = self.project(k);
        let n = s.nrows();
        let (lam, v) = hermitian_eigen(&s);
        let kk = v.adjoint() * k * &v;
        let dd = CMat::from_fn(n, n, |i, j| {
            let (a, b) = (lam[i], lam[j]);
            let w = if (a - b).abs() <= 1e-12 * (1.0 + a.abs()) {
                (0.5 * (a + b)).exp()
            } else {
                (a.exp() - b.exp()) / (a - b)
            };
            kk[(i, j)] * w
        });
        &self.root * (&v * dd * v.adjoint()) * &self.root
    }
}

/// Objective value, the residual tracked in the trace, and the package it came from.
struct Evaluation {
    value: f64,
    residual: f64,
}

fn evaluate_hs(hs: &HermitianStructure, objective: Objective) -> Result<(Evaluation, TorsionPackage)> {
    let pkg = analyze(hs)?;
    let ev = match objective {
        Objective::TorsionFunctional => Evaluation {
            value: volume_factor(hs) * pkg.norm_t2,
            residual: frobenius(&torsion_residual_matrix(&pkg)),
        },
        Objective::GauduchonFunctional => Evaluation {
            value: volume_factor(hs) * pkg.norm_eta2,
            residual: frobenius(&gauduchon_residual_matrix(&pkg)?),
        },
        Objective::ResidualNorm => {
            let r = frobenius(&torsion_residual_matrix(&pkg));
            Evaluation { value: r * r, residual: r }
        }
    };
    if !ev.value.is_finite() || !ev.residual.is_finite() {
        return Err(GeometryError::NumericalFailure("objective is not finite".into()));
    }
    Ok((ev, pkg))
}

/// Objective at the metric `H(s)`.
pub fn objective_value(hs0: &HermitianStructure, chart: &MetricChart, s: &HermMat, objective: Objective) -> Result<f64> {
    let hs = hs0.with_metric(chart.parametrize(s)?)?;
    Ok(evaluate_hs(&hs, objective)?.0.value)
}

/// Coordinate directions of the `n²` real parameters: diagonal entries, then
/// real and imaginary parts of each `(i, j)` with `i < j`.
fn directions(n: usize) -> Vec<(usize, usize, bool)> {
    let mut out: Vec<(usize, usize, bool)> = (0..n).map(|i| (i, i, false)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j, false));
            out.push((i, j, true));
        }
    }
    out
}

fn direction_matrix(n: usize, (i, j, imag): (usize, usize, bool)) -> CMat {
    let mut k = CMat::zeros(n, n);
    if i == j {
        k[(i, i)] = c(1.0, 0.0);
    } else if imag {
        k[(i, j)] = c(0.0, 1.0);
        k[(j, i)] = c(0.0, -1.0);
    } else {
        k[(i, j)] = c(1.0, 0.0);
        k[(j, i)] = c(1.0, 0.0);
    }
    k
}

/// Riesz representative `G` with `d/dt f(S + tK) = tr(K G)` from the partial
/// derivatives along [`directions`].
fn assemble(n: usize, partials: &[f64]) -> CMat {
    let mut g = CMat::zeros(n, n);
    for (d, &p) in directions(n).into_iter().zip(partials) {
        let (i, j, imag) = d;
        if i == j {
            g[(i, i)] = c(p, 0.0);
        } else if imag {
            g[(i, j)] += c(0.0, 0.5 * p);
            g[(j, i)] += c(0.0, -0.5 * p);
        } else {
            g[(i, j)] += c(0.5 * p, 0.0);
            g[(j, i)] += c(0.5 * p, 0.0);
        }
    }
    g
}

/// Central-difference gradient in the chart. Evaluations run in parallel and
/// are assembled in a fixed order. The second value reports whether every
/// coordinate probe was flat to [`FLAT_TOL`].
pub fn gradient(hs0: &HermitianStructure, chart: &MetricChart, s: &HermMat, cfg: &OptimConfig) -> Result<(HermMat, bool)> {
    let n = hs0.dim();
    let f0 = objective_value(hs0, chart, s, cfg.objective)?;
    let h = cfg.fd_step;
    let probes: Vec<Result<(f64, f64)>> = directions(n)
        .into_par_iter()
        .map(|d| {
            let k = direction_matrix(n, d);
            let plus = HermMat::new(s.matrix() + k.scale(h))?;
            let minus = HermMat::new(s.matrix() - k.scale(h))?;
            Ok((
                objective_value(hs0, chart, &plus, cfg.objective)?,
                objective_value(hs0, chart, &minus, cfg.objective)?,
            ))
        })
        .collect();
    let mut partials = Vec::with_capacity(n * n);
    let mut flat = true;
    for p in probes {
        let (fp, fm) = p?;
        if !fp.is_finite() || !fm.is_finite() {
            return Err(GeometryError::NumericalFailure("finite-difference probe is not finite".into()));
        }
        flat &= (fp - f0).abs() <= FLAT_TOL && (fm - f0).abs() <= FLAT_TOL;
        partials.push((fp - fm) / (2.0 * h));
    }
    Ok((HermMat::new(assemble(n, &partials))?, flat))
}

/// Gradient of the torsion functional in the chart from the pairing with `Q_F`,
/// pushed through the differential of the chart.
pub fn analytic_torsion_gradient(hs0: &HermitianStructure, chart: &MetricChart, s: &HermMat) -> Result<HermMat> {
    let n = hs0.dim();
    let hs = hs0.with_metric(chart.parametrize(s)?)?;
    let pkg = analyze(&hs)?;
    let q = torsion_residual_matrix(&pkg);
    let mut partials = Vec::with_capacity(n * n);
    for d in directions(n) {
        let dh = HermMat::new(chart.differential(s, &direction_matrix(n, d)))?;
        partials.push(first_variation_from(&hs, &pkg, &q, &dh));
    }
    HermMat::new(assemble(n, &partials))
}

fn record(iteration: usize, ev: &Evaluation, grad_norm: f64, det: f64, step: f64) -> TraceRecord {
    TraceRecord {
        iteration,
        objective: ev.value,
        grad_norm,
        residual: ev.residual,
        det,
        step,
    }
}

/// Gradient descent from the metric of `hs0`.
pub fn minimize(hs0: &HermitianStructure, cfg: &OptimConfig) -> Result<OptimTrace> {
    minimize_from(hs0, &HermMat::zeros(hs0.dim()), cfg)
}

/// Gradient descent in the chart anchored at the metric of `hs0`, starting at `H(start)`.
pub fn minimize_from(hs0: &HermitianStructure, start: &HermMat, cfg: &OptimConfig) -> Result<OptimTrace> {
    cfg.validate()?;
    let chart = MetricChart::new(hs0.metric(), cfg.det_normalized);
    let mut s = HermMat::new(chart.project(start.matrix()))?;
    let mut metric = chart.parametrize(&s)?;
    let (mut ev, _) = evaluate_hs(&hs0.with_metric(metric.clone())?, cfg.objective)?;
    let (mut g, mut flat) = gradient(hs0, &chart, &s, cfg)?;
    let mut gnorm = frobenius(g.matrix());
    let mut records = vec![record(0, &ev, gnorm, metric.det(), 0.0)];

    let mut iteration = 0;
    let termination = loop {
        if gnorm <= cfg.grad_tol {
            break Termination::Converged;
        }
        if flat {
            break Termination::Stagnated;
        }
        if iteration >= cfg.max_iter {
            break Termination::MaxIter;
        }
        iteration += 1;

        // ‖G‖² = tr(G G) is the directional derivative along G
        let slope = gnorm * gnorm;
        // far steps put exp(S) near overflow, where the probes stop being finite
        let mut alpha = cfg.initial_step.min(cfg.max_step / gnorm);
        let mut accepted = None;
        for _ in 0..MAX_SHRINKS {
            let trial = HermMat::new(s.matrix() - g.matrix().scale(alpha))?;
            // a trial point that cannot be evaluated counts as a rejected step
            let probe = chart.parametrize(&trial).and_then(|m| {
                let (e, _) = evaluate_hs(&hs0.with_metric(m.clone())?, cfg.objective)?;
                Ok((m, e))
            });
            if let Ok((trial_metric, trial_ev)) = probe {
                if trial_ev.value <= ev.value - cfg.armijo * alpha * slope {
                    accepted = Some((trial, trial_metric, trial_ev));
                    break;
                }
            }
            alpha *= cfg.shrink;
        }
        let Some((trial, trial_metric, trial_ev)) = accepted else {
            break Termination::LineSearchFailed;
        };
        s = trial;
        metric = trial_metric;
        ev = trial_ev;
        (g, flat) = gradient(hs0, &chart, &s, cfg)?;
        gnorm = frobenius(g.matrix());
        records.push(record(iteration, &ev, gnorm, metric.det(), alpha));
    };

    let hs = hs0.with_metric(metric.clone())?;
    let pkg = analyze(&hs)?;
    let final_norm_q_f = frobenius(&torsion_residual_matrix(&pkg));
    let final_norm_q_g = frobenius(&gauduchon_residual_matrix(&pkg)?);
    let final_classification = classify(&pkg, &hs, DEFAULT_TOL)?;
    Ok(OptimTrace {
        objective: cfg.objective,
        records,
        final_metric: metric,
        converged: termination == Termination::Converged,
        termination,
        final_norm_q_f,
        final_norm_q_g,
        final_eta_norm: pkg.norm_eta2.sqrt(),
        final_classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_hermitian::catalog;
    use crate::sampling;
    use crate::tensor_algebra::matrix::{max_abs, pairing};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn entry(name: &str) -> HermitianStructure {
        catalog::entry(name).unwrap()
    }

    #[test]
    fn chart_basics() {
        let chart = MetricChart::new(&HermMat::identity(3), true);
        assert!(max_abs(&(chart.parametrize(&HermMat::zeros(3)).unwrap().into_matrix() - identity(3))) == 0.0);

        let free = MetricChart::new(&HermMat::identity(3), false);
        let h = free.parametrize(&HermMat::from_real_diagonal(&[2f64.ln(), 0.0, 0.0]).unwrap()).unwrap();
        let expect = HermMat::from_real_diagonal(&[2.0, 1.0, 1.0]).unwrap();
        assert!(max_abs(&(h.matrix() - expect.matrix())) <= 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for n in 1..=4 {
            let h0 = sampling::random_positive_definite(&mut rng, n);
            let chart = MetricChart::new(&h0, true);
            let s = sampling::random_hermitian(&mut rng, n);
            let h = chart.parametrize(&s).unwrap();
            assert!((h.det() - h0.det()).abs() <= 1e-10 * h0.det());
        }
    }

    #[test]
    fn chart_differential_matches_difference_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for det_normalized in [false, true] {
            let chart = MetricChart::new(&sampling::random_positive_definite(&mut rng, 3), det_normalized);
            let s = sampling::random_hermitian(&mut rng, 3);
            let k = sampling::random_hermitian(&mut rng, 3);
            let t = 1e-5;
            let at = |x: f64| chart.parametrize(&HermMat::new(s.matrix() + k.matrix().scale(x)).unwrap()).unwrap().into_matrix();
            let fd = (at(t) - at(-t)).scale(0.5 / t);
            assert!(max_abs(&(fd - chart.differential(&s, k.matrix()))) <= 1e-8);
        }
    }

    #[test]
    fn gradient_is_a_riesz_representative() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let hs = entry("iwasawa");
        let cfg = OptimConfig::default();
        let chart = MetricChart::new(hs.metric(), cfg.det_normalized);
        let s = sampling::random_hermitian_with_norm(&mut rng, 3, 0.3);
        let (g, _) = gradient(&hs, &chart, &s, &cfg).unwrap();
        for _ in 0..5 {
            let k = trace_free(sampling::random_hermitian(&mut rng, 3).matrix());
            let t = 1e-5;
            let at = |x: f64| objective_value(&hs, &chart, &HermMat::new(s.matrix() + k.scale(x)).unwrap(), cfg.objective).unwrap();
            let fd = (at(t) - at(-t)) / (2.0 * t);
            assert!((fd - pairing(&k, g.matrix())).abs() <= 1e-8 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn gradient_reference_points() {
        let cfg = OptimConfig::default();
        let zero = |n| HermMat::zeros(n);
        for (name, lo, hi) in [("abelian-3", -1.0, 0.0), ("so3c", -1.0, 1e-6), ("iwasawa", 0.1, f64::INFINITY)] {
            let hs = entry(name);
            let chart = MetricChart::new(hs.metric(), true);
            let (g, _) = gradient(&hs, &chart, &zero(hs.dim()), &cfg).unwrap();
            let norm = frobenius(g.matrix());
            assert!(norm > lo && norm <= hi, "{name}: {norm}");
        }
    }

    #[test]
    fn analytic_gradient_agrees_with_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let cfg = OptimConfig::default();
        for name in ["so3c", "iwasawa", "kodaira-thurston", "sokc-4"] {
            let hs = entry(name);
            let n = hs.dim();
            for det_normalized in [true, false] {
                let chart = MetricChart::new(hs.metric(), det_normalized);
                let cfg = OptimConfig { det_normalized, ..cfg.clone() };
                for _ in 0..3 {
                    let s = sampling::random_hermitian_with_norm(&mut rng, n, 0.5);
                    let (fd, _) = gradient(&hs, &chart, &s, &cfg).unwrap();
                    let an = analytic_torsion_gradient(&hs, &chart, &s).unwrap();
                    let err = frobenius(&(fd.matrix() - an.matrix()));
                    assert!(err <= 1e-5 * frobenius(an.matrix()).max(1e-4), "{name}: {err}");
                }
            }
        }
    }

    #[test]
    fn abelian_converges_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        let hs = entry("abelian-3");
        for objective in [Objective::TorsionFunctional, Objective::GauduchonFunctional, Objective::ResidualNorm] {
            let start = sampling::random_hermitian(&mut rng, 3);
            let tr = minimize_from(&hs, &start, &OptimConfig::with_objective(objective)).unwrap();
            assert!(tr.converged);
            assert_eq!(tr.accepted_steps(), 0);
            assert_eq!(tr.final_objective(), 0.0);
        }
    }

    #[test]
    fn so3c_identity_is_already_critical() {
        let tr = minimize(&entry("so3c"), &OptimConfig::with_objective(Objective::ResidualNorm)).unwrap();
        assert!(tr.converged);
        assert_eq!(tr.accepted_steps(), 0);
        assert!(tr.final_norm_q_f <= 1e-9);
    }

    #[test]
    fn so3c_perturbation_returns_to_a_critical_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let start = sampling::random_hermitian_with_norm(&mut rng, 3, 0.1);
        let tr = minimize_from(&entry("so3c"), &start, &OptimConfig::with_objective(Objective::ResidualNorm)).unwrap();
        assert!(tr.final_norm_q_f <= 1e-6, "{:?} {}", tr.termination, tr.final_norm_q_f);
        assert!(tr.accepted_steps() <= 500);
        assert!(tr.is_monotone());
        let d0 = tr.records[0].det;
        assert!(tr.records.iter().all(|r| (r.det - d0).abs() <= 1e-8 * d0));
    }

    #[test]
    fn torsion_descent_is_monotone_with_constant_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for name in ["iwasawa", "kodaira-thurston"] {
            let hs = entry(name);
            let start = sampling::random_hermitian_with_norm(&mut rng, hs.dim(), 0.3);
            let cfg = OptimConfig {
                max_iter: 40,
                ..OptimConfig::default()
            };
            let tr = minimize_from(&hs, &start, &cfg).unwrap();
            assert!(tr.is_monotone(), "{name}");
            let d0 = tr.records[0].det;
            assert!(tr.records.iter().all(|r| (r.det - d0).abs() <= 1e-8 * d0), "{name}");
        }
    }

    #[test]
    fn config_validation() {
        let ok = OptimConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            OptimConfig { fd_step: 0.0, ..ok.clone() },
            OptimConfig { grad_tol: -1.0, ..ok.clone() },
            OptimConfig { shrink: 1.0, ..ok.clone() },
            OptimConfig { max_step: 0.0, ..ok.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(GeometryError::InvalidInput(_))));
        }
    }

    #[test]
    fn parallel_gradient_is_reproducible() {
        let hs = entry("sokc-4");
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let s = sampling::random_hermitian_with_norm(&mut rng, 6, 0.2);
        let cfg = OptimConfig::default();
        let chart = MetricChart::new(hs.metric(), true);
        let a = gradient(&hs, &chart, &s, &cfg).unwrap().0;
        let b = gradient(&hs, &chart, &s, &cfg).unwrap().0;
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn steep_starts_take_bounded_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let sc = sampling::random_unimodular_structure(&mut rng, 3);
        let hs = HermitianStructure::with_identity(sc);
        let cfg = OptimConfig {
            max_iter: 20,
            ..OptimConfig::with_objective(Objective::GauduchonFunctional)
        };
        let tr = minimize(&hs, &cfg).unwrap();
        assert!(tr.records[0].grad_norm > 10.0);
        for w in tr.records.windows(2) {
            assert!(w[1].step * w[0].grad_norm <= cfg.max_step * (1.0 + 1e-12));
        }
        assert!(tr.is_monotone());
    }
}
