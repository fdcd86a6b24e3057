use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::{alpha_certificate, cluster, cluster_pseudozero, RootReport, PSEUDOZERO_LEVEL};
use crate::bounds::cauchy_bound;
use crate::complex_poly::{horner_with_derivative, Polynomial};
use crate::homotopy::{
    build_avoiding_path, degenerate_target_path, roots_of_unity_start, track_system,
    CoefficientPath, Endgame, HomotopyError, HomotopySystem, PathChoice, TrackRun, TrackedPath,
    TrackerConfig,
};
use crate::resultants::discriminant;

/// Linking radius floor for clustering, relative to the escape radius.
const CLUSTER_RELATIVE: f64 = 1e-6;
/// Linking radius multiple of the largest Newton correction at an endpoint.
const CLUSTER_STEP_FACTOR: f64 = 10.0;
/// Agreement required between a deflated quotient's roots and the
/// remaining reports.
const DEFLATION_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub tracker: TrackerConfig,
    /// Run the α-test on simple roots and require it to pass.
    pub certify: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tracker: TrackerConfig::default(),
            certify: true,
        }
    }
}

/// Which branch of the solver produced the roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Degree one, solved directly.
    Linear,
    /// Target off Σ_d: tracked along the chosen path to `t = 1`.
    Generic,
    /// Target on Σ_d: restricted segment, collisions allowed at `t = 1`.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `|Δ_d(f)|`.
    pub discriminant_modulus: f64,
    pub sigma_member: bool,
    pub escape_radius: f64,
    pub restarts_used: usize,
    /// Newton steps over tracking, polishing and recursive solves.
    pub total_newton_steps: usize,
    pub route: Route,
    /// Step count of the successful (or last) attempt.
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub reports: Vec<RootReport>,
    pub diagnostics: Diagnostics,
    /// Tracked paths of the successful attempt; empty for degree one.
    pub paths: Vec<TrackedPath>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("polynomial is constant after trimming")]
    ConstantPolynomial,
    #[error(transparent)]
    InvalidConfig(HomotopyError),
    #[error("all {attempts} attempts failed; last failure: {last_failure}")]
    RestartsExhausted {
        attempts: usize,
        last_failure: String,
        partial: Vec<RootReport>,
        diagnostics: Box<Diagnostics>,
    },
}

struct Failure {
    reason: String,
    partial: Vec<RootReport>,
    escape_radius: f64,
    newton_steps: usize,
}

impl Failure {
    fn new(reason: impl Into<String>) -> Self {
        Self {
            reason: reason.into(),
            partial: Vec::new(),
            escape_radius: f64::NAN,
            newton_steps: 0,
        }
    }
}

struct Attempt {
    reports: Vec<RootReport>,
    paths: Vec<TrackedPath>,
    escape_radius: f64,
    newton_steps: usize,
}

/// All roots of `f` with multiplicities.
///
/// Targets off Σ_d are tracked from the roots of unity with every check
/// active; targets on Σ_d use the restricted segment of
/// [`degenerate_target_path`] and let paths meet at `t = 1`. Endpoints are
/// grouped by single linkage, or by [`cluster_pseudozero`] when the
/// linkage is unstable or disagrees with the vanishing derivatives. Any
/// multiple roots are then deflated and the quotient solved again to
/// confirm the remaining roots. A failed attempt is retried with
/// twice the steps and a fresh rotation, up to `max_restarts` times.
pub fn solve(f: &Polynomial, cfg: &SolveConfig) -> Result<Solution, SolveError> {
    cfg.tracker.validate().map_err(SolveError::InvalidConfig)?;
    let d = f.degree();
    if d == 0 {
        return Err(SolveError::ConstantPolynomial);
    }
    let disc = discriminant(f).map_err(|_| SolveError::ConstantPolynomial)?;
    let mut diagnostics = Diagnostics {
        discriminant_modulus: disc.delta.norm(),
        sigma_member: disc.sigma_member,
        escape_radius: f64::NAN,
        restarts_used: 0,
        total_newton_steps: 0,
        route: if d == 1 {
            Route::Linear
        } else if disc.sigma_member {
            Route::Degenerate
        } else {
            Route::Generic
        },
        steps: cfg.tracker.steps,
    };

    if d == 1 {
        let c = f.coeffs();
        let value = -c[0] / c[1];
        diagnostics.escape_radius = cauchy_bound(f).map(|b| b.radius).unwrap_or(f64::NAN);
        diagnostics.steps = 0;
        let report = RootReport {
            value,
            multiplicity: 1,
            residual: f.horner(value).norm(),
            certified: cfg.certify && alpha_certificate(f, value),
            path_indices: vec![1],
            derivative_check: Some(1),
        };
        return Ok(Solution {
            reports: vec![report],
            diagnostics,
            paths: Vec::new(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.tracker.seed);
    let mut last = Failure::new("no attempt ran");
    for attempt in 0..=cfg.tracker.max_restarts {
        let steps = cfg.tracker.steps.saturating_mul(1usize << attempt.min(40));
        let theta = crate::homotopy::draw_theta(cfg.tracker.start, &mut rng);
        diagnostics.restarts_used = attempt;
        diagnostics.steps = steps;
        match attempt_once(f, diagnostics.route, steps, theta, cfg, &mut rng) {
            Ok(done) => {
                diagnostics.escape_radius = done.escape_radius;
                diagnostics.total_newton_steps += done.newton_steps;
                return Ok(Solution {
                    reports: done.reports,
                    diagnostics,
                    paths: done.paths,
                });
            }
            Err(failure) => {
                diagnostics.escape_radius = failure.escape_radius;
                diagnostics.total_newton_steps += failure.newton_steps;
                last = failure;
            }
        }
    }
    Err(SolveError::RestartsExhausted {
        attempts: cfg.tracker.max_restarts + 1,
        last_failure: last.reason,
        partial: last.partial,
        diagnostics: Box::new(diagnostics),
    })
}

fn attempt_once(
    f: &Polynomial,
    route: Route,
    steps: usize,
    theta: f64,
    cfg: &SolveConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Attempt, Failure> {
    let d = f.degree();
    let mut newton_steps = 0usize;
    let (path, start, endgame) = match route {
        Route::Degenerate => {
            let dp = degenerate_target_path(f, theta).map_err(|e| Failure::new(e.to_string()))?;
            let start = if dp.epsilon == 0.0 {
                roots_of_unity_start(d).map_err(|e| Failure::new(e.to_string()))?
            } else {
                let restricted = Polynomial::new(dp.path.start_coeffs())
                    .map_err(|e| Failure::new(e.to_string()))?;
                let sub = solve(&restricted, cfg)
                    .map_err(|e| Failure::new(format!("start system at ε = {}: {e}", dp.epsilon)))?;
                newton_steps += sub.diagnostics.total_newton_steps;
                if sub.reports.len() != d {
                    return Err(Failure::new(format!(
                        "start system at ε = {} has a multiple root",
                        dp.epsilon
                    )));
                }
                sub.reports.iter().map(|r| r.value).collect()
            };
            (dp.path, start, Endgame::Collisions)
        }
        _ => {
            let path = match cfg.tracker.path {
                PathChoice::Line => CoefficientPath::gamma_rotated(f, theta),
                PathChoice::Parabola => {
                    let start =
                        Polynomial::unit_start(d).scale(Complex64::from_polar(1.0, theta));
                    build_avoiding_path(&start, f, steps, rng)
                }
            }
            .map_err(|e| Failure::new(e.to_string()))?;
            let start = roots_of_unity_start(d).map_err(|e| Failure::new(e.to_string()))?;
            (path, start, Endgame::Distinct)
        }
    };

    let system = HomotopySystem::new(path);
    let run = track_system(&system, &start, steps, &cfg.tracker, endgame)
        .map_err(|e| Failure::new(e.to_string()))?;
    newton_steps += run.newton_steps;
    let fail = |reason: String, partial: Vec<RootReport>, newton_steps: usize| Failure {
        reason,
        partial,
        escape_radius: run.escape_radius,
        newton_steps,
    };
    if !run.all_converged() {
        return Err(fail(describe_abort(&run), Vec::new(), newton_steps));
    }

    // Near a μ-fold root Newton contracts only by (μ-1)/μ, so the step
    // taken from an endpoint is comparable to its distance from the root.
    let endpoints = run.endpoints();
    let largest_step = endpoints
        .iter()
        .map(|&z| {
            let (fz, dfz) = horner_with_derivative(f.coeffs(), z);
            if dfz.norm() == 0.0 {
                0.0
            } else {
                (fz / dfz).norm()
            }
        })
        .fold(0.0, f64::max);
    let tol = (CLUSTER_RELATIVE * run.escape_radius).max(CLUSTER_STEP_FACTOR * largest_step);
    let linked = cluster(&endpoints, f, tol);
    let mut reports = match linked {
        Ok(r) if r.iter().all(|r| r.derivative_check == Some(r.multiplicity)) => r,
        _ => cluster_pseudozero(&endpoints, f, PSEUDOZERO_LEVEL)
            .map_err(|e| fail(e.to_string(), Vec::new(), newton_steps))?,
    };
    if !cfg.certify {
        for r in reports.iter_mut() {
            r.certified = false;
        }
    }

    if let Some(bad) = reports
        .iter()
        .find(|r| r.derivative_check != Some(r.multiplicity))
    {
        let reason = format!(
            "cluster at {} has {} paths but derivative order {:?}",
            bad.value, bad.multiplicity, bad.derivative_check
        );
        return Err(fail(reason, reports, newton_steps));
    }
    if cfg.certify {
        if let Some(bad) = reports
            .iter()
            .find(|r| r.multiplicity == 1 && !r.certified)
        {
            let reason = format!("simple root {} failed the α-test", bad.value);
            return Err(fail(reason, reports, newton_steps));
        }
    }
    if reports.iter().any(|r| r.multiplicity > 1) {
        match deflation_check(f, &reports, cfg) {
            Ok(steps_used) => newton_steps += steps_used,
            Err(reason) => return Err(fail(reason, reports, newton_steps)),
        }
    }

    Ok(Attempt {
        reports,
        paths: run.paths,
        escape_radius: run.escape_radius,
        newton_steps,
    })
}

fn describe_abort(run: &TrackRun) -> String {
    let aborted: Vec<String> = run
        .paths
        .iter()
        .filter(|p| {
            !matches!(
                p.status,
                crate::homotopy::PathStatus::Converged | crate::homotopy::PathStatus::Tracking
            )
        })
        .map(|p| {
            let t = p.samples.last().map_or(0.0, |s| s.t);
            format!("path {} {:?} after t = {t}", p.index, p.status)
        })
        .collect();
    format!("tracking stopped with {} steps: {}", run.steps, aborted.join(", "))
}

/// Divides out every multiple root and solves the quotient; its roots must
/// reproduce the remaining reports. Returns the Newton steps spent.
fn deflation_check(f: &Polynomial, reports: &[RootReport], cfg: &SolveConfig) -> Result<usize, String> {
    let mut quotient = f.clone();
    for r in reports.iter().filter(|r| r.multiplicity > 1) {
        quotient = quotient
            .deflate(r.value, r.multiplicity)
            .map_err(|e| format!("deflation: {e}"))?;
    }
    let mut remaining: Vec<&RootReport> = reports.iter().filter(|r| r.multiplicity == 1).collect();
    if quotient.degree() == 0 {
        return if remaining.is_empty() {
            Ok(0)
        } else {
            Err(format!("deflation left a constant but {} simple roots remain", remaining.len()))
        };
    }
    let sub = solve(&quotient, cfg).map_err(|e| format!("deflated quotient: {e}"))?;
    for q in &sub.reports {
        let found = remaining.iter().position(|r| {
            r.multiplicity == q.multiplicity
                && (r.value - q.value).norm() <= DEFLATION_AGREEMENT
        });
        match found {
            Some(k) => {
                remaining.swap_remove(k);
            }
            None => {
                return Err(format!(
                    "deflated quotient root {} (multiplicity {}) matches no remaining report",
                    q.value, q.multiplicity
                ))
            }
        }
    }
    if remaining.is_empty() {
        Ok(sub.diagnostics.total_newton_steps)
    } else {
        Err(format!("{} reports missing from the deflated quotient", remaining.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn multiset(reports: &[RootReport]) -> Vec<(Complex64, usize)> {
        let mut v: Vec<_> = reports.iter().map(|r| (r.value, r.multiplicity)).collect();
        v.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        v
    }

    #[test]
    fn linear_closed_form() {
        let f = Polynomial::from_real(&[6.0, 3.0]).unwrap();
        let s = solve(&f, &SolveConfig::default()).unwrap();
        assert_eq!(s.reports.len(), 1);
        assert_eq!(s.reports[0].value, c(-2.0));
        assert_eq!(s.reports[0].multiplicity, 1);
        assert!(s.reports[0].certified);
        assert_eq!(s.diagnostics.route, Route::Linear);
    }

    #[test]
    fn cube_roots_of_unity() {
        let f = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).unwrap();
        let s = solve(&f, &SolveConfig::default()).unwrap();
        assert_eq!(s.reports.len(), 3);
        for r in &s.reports {
            assert_eq!(r.multiplicity, 1);
            assert!(r.certified);
            assert!((r.value.powu(3) - c(1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn constructed_degenerate_quintic() {
        let i = Complex64::new(0.0, 1.0);
        let f = Polynomial::from_roots(&[(c(1.0), 3), (c(-2.0), 1), (i, 1)], c(1.0)).unwrap();
        let s = solve(&f, &SolveConfig::default()).unwrap();
        assert_eq!(s.diagnostics.route, Route::Degenerate);
        let got = multiset(&s.reports);
        let want = [(c(-2.0), 1), (i, 1), (c(1.0), 3)];
        assert_eq!(got.len(), 3);
        for (g, w) in got.iter().zip(want) {
            assert_eq!(g.1, w.1);
            assert!((g.0 - w.0).norm() < 1e-8, "{g:?} vs {w:?}");
        }
        assert_eq!(s.reports.iter().map(|r| r.multiplicity).sum::<usize>(), 5);
    }

    #[test]
    fn leading_zeros_are_trimmed() {
        let f = Polynomial::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let s = solve(&f, &SolveConfig::default()).unwrap();
        assert_eq!(s.reports.len(), 1);
        assert_eq!(s.reports[0].value, c(-1.0));
    }

    #[test]
    fn constant_is_rejected() {
        let f = Polynomial::from_real(&[4.0]).unwrap();
        assert_eq!(
            solve(&f, &SolveConfig::default()),
            Err(SolveError::ConstantPolynomial)
        );
    }

    #[test]
    fn exhaustion_carries_diagnostics() {
        let f = Polynomial::from_real(&[-27.0, 0.0, 0.0, 1.0]).unwrap();
        let cfg = SolveConfig {
            tracker: TrackerConfig {
                steps: 1,
                corrector_iterations: 1,
                max_restarts: 0,
                ..TrackerConfig::default()
            },
            certify: true,
        };
        match solve(&f, &cfg) {
            Err(SolveError::RestartsExhausted {
                attempts,
                diagnostics,
                ..
            }) => {
                assert_eq!(attempts, 1);
                assert_eq!(diagnostics.restarts_used, 0);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }
}
