//! Root-norm bounds.
//!
//! Every root of `γ_0 + ... + γ_d x^d` lies in the open disk of radius
//! `2 max_{i<d} |γ_i / γ_d|^{1/(d-i)}`.

use num_complex::Complex64;
use thiserror::Error;

use crate::complex_poly::{Polynomial, TRIM_RELATIVE};

/// Trackers abort an iterate whose modulus exceeds this multiple of the
/// escape radius.
pub const ESCAPE_SLACK: f64 = 4.0;

/// Floor that keeps the disk open when all lower coefficients vanish.
pub const MIN_RADIUS: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("root bound needs degree >= 1")]
    ConstantPolynomial,
    #[error("leading coefficient vanishes at path sample {sample}")]
    VanishingLead { sample: usize },
    #[error("path has no samples")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBound {
    pub radius: f64,
}

impl RootBound {
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < self.radius
    }
}

fn raw_radius(coeffs: &[Complex64]) -> f64 {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let max = coeffs[..d]
        .iter()
        .enumerate()
        .map(|(i, c)| (c / lead).norm().powf(1.0 / (d - i) as f64))
        .fold(0.0, f64::max);
    2.0 * max
}

pub fn cauchy_bound(p: &Polynomial) -> Result<RootBound, BoundError> {
    if p.degree() == 0 {
        return Err(BoundError::ConstantPolynomial);
    }
    Ok(RootBound {
        radius: raw_radius(p.coeffs()).max(MIN_RADIUS),
    })
}

/// Largest root bound over the sampled coefficient vectors of a path.
///
/// Every sample must keep its leading coefficient above the trim threshold.
pub fn homotopy_escape_radius<I, V>(samples: I) -> Result<f64, BoundError>
where
    I: IntoIterator<Item = V>,
    V: AsRef<[Complex64]>,
{
    let mut radius: Option<f64> = None;
    for (k, sample) in samples.into_iter().enumerate() {
        let coeffs = sample.as_ref();
        if coeffs.len() < 2 {
            return Err(BoundError::ConstantPolynomial);
        }
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let lead = coeffs[coeffs.len() - 1].norm();
        if lead == 0.0 || lead <= TRIM_RELATIVE * max {
            return Err(BoundError::VanishingLead { sample: k });
        }
        let r = raw_radius(coeffs);
        radius = Some(radius.map_or(r, |acc| acc.max(r)));
    }
    radius.map(|r| r.max(MIN_RADIUS)).ok_or(BoundError::NoSamples)
}
