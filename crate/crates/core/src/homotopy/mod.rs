//! Homotopy continuation for univariate polynomials.
//!
//! A [`HomotopySystem`] evaluates `H(t, x) = φ_0(t) + ... + φ_d(t) x^d`
//! along a [`CoefficientPath`]. The tracker starts `d` iterates at the
//! roots of the start system and, for `n = 0..N-1`, moves each one by a
//! Newton step of `H((n+1)/N, ·)` taken from its previous value.

mod path;
mod tracker;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundError;
use crate::complex_poly::horner_with_derivative;

pub use path::{
    build_avoiding_path, degenerate_target_path, CoefficientPath, DegeneratePath, PathKind,
    MAX_ARC_ATTEMPTS,
};
pub use tracker::{
    track, track_system, Endgame, PathSample, PathStatus, TrackRun, TrackedPath,
    ENDGAME_CORRECTOR_CAP,
};
pub(crate) use tracker::draw_theta;

/// `|∂H/∂x|` below this fraction of its natural magnitude is a singular step.
pub const DERIVATIVE_FLOOR: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomotopyError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("target polynomial is constant")]
    ConstantTarget,
    #[error("start degree {start} exceeds target degree {target}")]
    DegreeMismatch { start: usize, target: usize },
    #[error("segment restriction {0} outside [0, 1)")]
    BadRestriction(f64),
    #[error("singular Newton step: |dH/dx| = {derivative:e} below floor {floor:e}")]
    SingularStep { derivative: f64, floor: f64 },
    #[error("{which} polynomial lies on the discriminant hypersurface")]
    EndpointInSigma { which: &'static str },
    #[error("no arc constant avoided the discriminant (best c = {best_c}, margin {best_ratio:e})")]
    ArcRejected { best_c: f64, best_ratio: f64 },
    #[error("discriminant vanishes along the whole segment")]
    DenseDiscriminantZero,
    #[error("path leaves the polynomials of full degree: {0}")]
    Escape(#[from] BoundError),
    #[error("expected {expected} start roots, got {got}")]
    StartRootCount { expected: usize, got: usize },
    #[error("invalid tracker configuration: {0}")]
    InvalidConfig(&'static str),
}

/// Start system choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartSystem {
    /// `x^d - 1` exactly.
    Unit,
    /// `e^{iθ} (x^d - 1)` with `θ` drawn from the seeded generator.
    Gamma,
}

/// Path shape used for targets off the discriminant hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathChoice {
    Line,
    Parabola,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    /// Initial step count `N`; doubled on every restart.
    pub steps: usize,
    /// Newton iterations allowed per step, the nominal one included.
    pub corrector_iterations: usize,
    /// Normwise backward error every stored sample must meet.
    pub residual_tol: f64,
    /// Minimum pairwise distance between iterates, relative to the escape radius.
    pub min_separation: f64,
    pub max_restarts: usize,
    pub seed: u64,
    pub start: StartSystem,
    pub path: PathChoice,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            steps: 256,
            corrector_iterations: 3,
            residual_tol: 1e-10,
            min_separation: 1e-7,
            max_restarts: 6,
            seed: 0,
            start: StartSystem::Gamma,
            path: PathChoice::Line,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), HomotopyError> {
        if self.steps == 0 {
            return Err(HomotopyError::InvalidConfig("steps must be >= 1"));
        }
        if self.corrector_iterations == 0 {
            return Err(HomotopyError::InvalidConfig("corrector iterations must be >= 1"));
        }
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return Err(HomotopyError::InvalidConfig("residual tolerance must be positive"));
        }
        if !(self.min_separation > 0.0 && self.min_separation.is_finite()) {
            return Err(HomotopyError::InvalidConfig("minimum separation must be positive"));
        }
        Ok(())
    }
}

/// `e^{2πik/d}` for `k = 0..d-1`.
pub fn roots_of_unity_start(d: usize) -> Result<Vec<Complex64>, HomotopyError> {
    if d == 0 {
        return Err(HomotopyError::ZeroDegree);
    }
    Ok((0..d)
        .map(|k| match (4 * k).checked_rem(d) {
            // quarter turns land exactly on the axes
            Some(0) => [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ][4 * k / d],
            _ => Complex64::from_polar(1.0, TAU * k as f64 / d as f64),
        })
        .collect())
}

/// `H(t, x)` over a coefficient path.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopySystem {
    path: CoefficientPath,
}

impl HomotopySystem {
    pub fn new(path: CoefficientPath) -> Self {
        Self { path }
    }

    pub fn path(&self) -> &CoefficientPath {
        &self.path
    }

    pub fn degree(&self) -> usize {
        self.path.degree()
    }

    pub fn coefficients(&self, t: f64) -> Vec<Complex64> {
        self.path.eval(t)
    }

    /// `(H(t, x), ∂H/∂x (t, x))`.
    pub fn eval(&self, t: f64, x: Complex64) -> (Complex64, Complex64) {
        horner_with_derivative(&self.coefficients(t), x)
    }
}

/// Natural magnitudes of `p(z)` and `p'(z)` used to scale thresholds:
/// `‖c‖_∞ Σ |z|^i` and `‖c‖_∞ Σ i |z|^{i-1}`.
pub(crate) fn magnitudes(coeffs: &[Complex64], z: Complex64) -> (f64, f64) {
    let r = z.norm();
    let norm = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut value = 0.0;
    let mut deriv = 0.0;
    for _ in 0..coeffs.len() {
        deriv = deriv * r + value;
        value = value * r + 1.0;
    }
    (norm * value, norm * deriv)
}

/// One Newton step on a fixed coefficient vector.
pub(crate) fn newton_on(coeffs: &[Complex64], z: Complex64) -> Result<Complex64, HomotopyError> {
    let (h, dh) = horner_with_derivative(coeffs, z);
    let (_, dscale) = magnitudes(coeffs, z);
    let floor = DERIVATIVE_FLOOR * dscale;
    if dh.norm().is_nan() || dh.norm() < floor || dh.norm() == 0.0 {
        return Err(HomotopyError::SingularStep {
            derivative: dh.norm(),
            floor,
        });
    }
    Ok(z - h / dh)
}

/// `z - H(t, z) / ∂H/∂x (t, z)`.
pub fn newton_step(
    system: &HomotopySystem,
    t: f64,
    z: Complex64,
) -> Result<Complex64, HomotopyError> {
    newton_on(&system.coefficients(t), z)
}
