//! Newton refinement, α-test certification and endpoint clustering.
//!
//! Tracked endpoints at `t = 1` are polished by Newton's method on the
//! target, grouped by single-linkage clustering, and each group becomes a
//! [`RootReport`] whose multiplicity is the number of paths that end there.

mod solve;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::complex_poly::{horner_with_derivative, Polynomial};
use crate::homotopy::{magnitudes, DERIVATIVE_FLOOR};

pub use solve::{solve, Diagnostics, Route, Solution, SolveConfig, SolveError};

/// `(13 - 3√17) / 4`.
pub const ALPHA_0: f64 = 0.157_670_780_786_754_8;

/// Relative threshold for deciding that a Taylor coefficient vanishes.
pub const DERIVATIVE_THRESHOLD: f64 = 1e-10;

/// Iteration cap used when polishing endpoints.
pub const REFINE_MAX_ITER: usize = 100;

/// Componentwise backward-error level of the pseudozero set used to join
/// the pieces of a split multiple root.
pub const PSEUDOZERO_LEVEL: f64 = 1e-12;
const PSEUDOZERO_SAMPLES: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("expected {expected} endpoints, got {got}")]
    EndpointCount { expected: usize, got: usize },
    #[error("clustering at radius {tol:e} and {doubled:e} disagree ({at_tol} vs {at_double} clusters); increase the step count")]
    AmbiguousClustering {
        tol: f64,
        doubled: f64,
        at_tol: usize,
        at_double: usize,
    },
    #[error("|f(ρ)| = {value:e} exceeds the root threshold {limit:e}")]
    NotARoot { value: f64, limit: f64 },
    #[error("no derivative up to order {degree} exceeds the threshold")]
    NoNonvanishingDerivative { degree: usize },
}

/// One distinct root of a solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    pub value: Complex64,
    pub multiplicity: usize,
    /// `|f(value)|`.
    pub residual: f64,
    pub certified: bool,
    /// 1-based tracker indices of the paths ending here.
    pub path_indices: Vec<usize>,
    /// Order of the first derivative that does not vanish at `value`.
    pub derivative_check: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub value: Complex64,
    pub iterations: usize,
    /// Modulus of the last Newton correction taken.
    pub last_step: f64,
    /// The derivative floor stopped the iteration.
    pub singular: bool,
    /// `|f(value)|`.
    pub residual: f64,
}

/// Newton's method on `f` from `z` until `|f(z)| <= tol`, the correction
/// stalls at rounding level, or `max_iter` steps.
pub fn refine(f: &Polynomial, z: Complex64, max_iter: usize, tol: f64) -> Refinement {
    newton_iterate(f, z, max_iter, tol, DERIVATIVE_FLOOR)
}

fn newton_iterate(
    f: &Polynomial,
    z: Complex64,
    max_iter: usize,
    tol: f64,
    floor_relative: f64,
) -> Refinement {
    let coeffs = f.coeffs();
    let mut z = z;
    let mut last_step = 0.0;
    let mut iterations = 0;
    let mut singular = false;
    let (mut value, _) = horner_with_derivative(coeffs, z);
    while iterations < max_iter && value.norm() > tol {
        let (fz, dfz) = horner_with_derivative(coeffs, z);
        let floor = floor_relative * magnitudes(coeffs, z).1;
        if dfz.norm() == 0.0 || dfz.norm() < floor {
            singular = true;
            break;
        }
        let step = fz / dfz;
        let next = z - step;
        if !(next.re.is_finite() && next.im.is_finite()) {
            singular = true;
            break;
        }
        z = next;
        last_step = step.norm();
        iterations += 1;
        value = horner_with_derivative(coeffs, z).0;
        if last_step <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    Refinement {
        value: z,
        iterations,
        last_step,
        singular,
        residual: value.norm(),
    }
}

/// Coefficients of `f(z + y)` in `y`, i.e. `f^{(k)}(z) / k!`.
pub(crate) fn taylor_coefficients(coeffs: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut work = coeffs.to_vec();
    let n = work.len();
    for k in 0..n.saturating_sub(1) {
        for i in (k..n - 1).rev() {
            let carry = z * work[i + 1];
            work[i] += carry;
        }
    }
    work
}

/// Smale's `α = β γ` at `z`, or `None` when `f'(z) = 0`.
pub fn alpha_value(f: &Polynomial, z: Complex64) -> Option<f64> {
    let taylor = taylor_coefficients(f.coeffs(), z);
    let d1 = *taylor.get(1)?;
    if d1.norm() == 0.0 {
        return None;
    }
    let beta = (taylor[0] / d1).norm();
    let gamma = taylor
        .iter()
        .enumerate()
        .skip(2)
        .map(|(k, t)| (t / d1).norm().powf(1.0 / (k - 1) as f64))
        .fold(0.0, f64::max);
    let alpha = beta * gamma;
    alpha.is_finite().then_some(alpha)
}

/// `α(f, z) < α₀`: Newton's method from `z` converges quadratically.
pub fn alpha_certificate(f: &Polynomial, z: Complex64) -> bool {
    alpha_value(f, z).is_some_and(|a| a < ALPHA_0)
}

/// Smallest `k >= 1` with `|f^{(k)}(ρ)| > threshold k! (1+|ρ|)^{d-k} ‖f‖_∞`.
pub fn multiplicity_by_derivatives(
    f: &Polynomial,
    rho: Complex64,
    threshold: f64,
) -> Result<usize, CertifyError> {
    let d = f.degree();
    let taylor = taylor_coefficients(f.coeffs(), rho);
    let scale = threshold * f.max_norm();
    let base = 1.0 + rho.norm();
    let limit = |k: usize| scale * base.powi((d - k) as i32);
    if taylor[0].norm() > limit(0) {
        return Err(CertifyError::NotARoot {
            value: taylor[0].norm(),
            limit: limit(0),
        });
    }
    (1..=d)
        .find(|&k| taylor[k].norm() > limit(k))
        .ok_or(CertifyError::NoNonvanishingDerivative { degree: d })
}

/// Single-linkage groups of `points` at linking radius `tol`, each sorted,
/// ordered by first member.
fn linkage(points: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

fn report_for(f: &Polynomial, endpoints: &[Complex64], members: &[usize]) -> RootReport {
    let mu = members.len();
    let centroid =
        members.iter().map(|&i| endpoints[i]).sum::<Complex64>() / Complex64::new(mu as f64, 0.0);
    // the (μ-1)-th derivative has a simple root at a μ-fold root of f
    let target = f.nth_derivative(mu - 1);
    let polished = refine(&target, centroid, REFINE_MAX_ITER, 0.0);
    let value = if polished.singular && mu > 1 {
        centroid
    } else {
        polished.value
    };
    RootReport {
        value,
        multiplicity: mu,
        residual: f.horner(value).norm(),
        certified: mu == 1 && alpha_certificate(f, value),
        path_indices: members.iter().map(|&i| i + 1).collect(),
        derivative_check: multiplicity_by_derivatives(f, value, DERIVATIVE_THRESHOLD).ok(),
    }
}

/// Groups `d` endpoints into root reports by single linkage at radius `tol`.
///
/// The grouping must not change when the radius doubles.
pub fn cluster(
    endpoints: &[Complex64],
    f: &Polynomial,
    tol: f64,
) -> Result<Vec<RootReport>, CertifyError> {
    if endpoints.len() != f.degree() {
        return Err(CertifyError::EndpointCount {
            expected: f.degree(),
            got: endpoints.len(),
        });
    }
    let groups = linkage(endpoints, tol);
    let wider = linkage(endpoints, 2.0 * tol);
    if groups != wider {
        return Err(CertifyError::AmbiguousClustering {
            tol,
            doubled: 2.0 * tol,
            at_tol: groups.len(),
            at_double: wider.len(),
        });
    }
    Ok(groups
        .iter()
        .map(|members| report_for(f, endpoints, members))
        .collect())
}

/// Whether the segment from `a` to `b` stays inside the pseudozero set
/// `{z : |f(z)| <= eta Σ |γ_i| |z|^i}`, checked at evenly spaced points.
fn joined_in_pseudozero_set(f: &Polynomial, a: Complex64, b: Complex64, eta: f64) -> bool {
    (0..=PSEUDOZERO_SAMPLES).all(|k| {
        let s = a + (b - a) * (k as f64 / PSEUDOZERO_SAMPLES as f64);
        f.horner(s).norm() <= eta * f.abs_eval(s)
    })
}

/// Groups endpoints by connectivity of the pseudozero set of `f`.
///
/// Each endpoint is first driven by Newton's method to a root of the
/// rounded polynomial. Rounding splits a μ-fold root into μ simple roots
/// close together, and a linking radius taken from Newton steps at those
/// points is far too small to join them; the pseudozero set at level `eta`
/// does join them while keeping distinct roots apart.
pub fn cluster_pseudozero(
    endpoints: &[Complex64],
    f: &Polynomial,
    eta: f64,
) -> Result<Vec<RootReport>, CertifyError> {
    let n = endpoints.len();
    if n != f.degree() {
        return Err(CertifyError::EndpointCount {
            expected: f.degree(),
            got: n,
        });
    }
    let polished: Vec<Complex64> = endpoints
        .iter()
        .map(|&z| newton_iterate(f, z, REFINE_MAX_ITER, 0.0, 0.0).value)
        .collect();
    let mut owner: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if owner[i] != owner[j] && joined_in_pseudozero_set(f, polished[i], polished[j], eta) {
                let (keep, drop) = (owner[i].min(owner[j]), owner[i].max(owner[j]));
                for o in owner.iter_mut().filter(|o| **o == drop) {
                    *o = keep;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match groups.iter_mut().find(|g| owner[g[0]] == owner[i]) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    Ok(groups
        .iter()
        .map(|members| report_for(f, &polished, members))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(coeffs: &[f64]) -> Polynomial {
        Polynomial::from_real(coeffs).unwrap()
    }

    #[test]
    fn alpha_constant_matches_closed_form() {
        assert!((ALPHA_0 - (13.0 - 3.0 * 17f64.sqrt()) / 4.0).abs() < 1e-16);
    }

    #[test]
    fn refine_examples() {
        let f = poly(&[-4.0, 0.0, 1.0]);
        let r = refine(&f, c(2.1), 5, 1e-14);
        assert!((r.value - c(2.0)).norm() < 1e-12);
        assert!(r.iterations <= 5 && !r.singular);

        let fixed = refine(&f, c(2.0), 5, 1e-14);
        assert_eq!(fixed.value, c(2.0));
        assert_eq!(fixed.iterations, 0);

        let double = poly(&[1.0, -2.0, 1.0]);
        let r = refine(&double, c(1.1), 200, 0.0);
        assert!((r.value - c(1.0)).norm() < 0.1);
        assert!(r.value.re >= 1.0 - 1e-6);

        let at_critical = refine(&f, c(0.0), 5, 0.0);
        assert!(at_critical.singular);
        assert_eq!(at_critical.value, c(0.0));
    }

    #[test]
    fn alpha_examples() {
        let f = poly(&[-4.0, 0.0, 1.0]);
        assert!(alpha_certificate(&f, c(2.0)));
        assert!(!alpha_certificate(&f, c(0.0)));
        // β = 0.0401/4.02, γ = 1/4.02
        let a = alpha_value(&f, c(2.01)).unwrap();
        assert!((a - 0.0401 / (4.02 * 4.02)).abs() < 1e-15);
        assert!(alpha_certificate(&f, c(2.01)));
        assert!(!alpha_certificate(&f, c(1.0)));
    }

    #[test]
    fn taylor_coefficients_match_derivatives() {
        let f = poly(&[3.0, -1.0, 2.0, 0.5, -1.5]);
        let z = Complex64::new(0.3, -1.2);
        let taylor = taylor_coefficients(f.coeffs(), z);
        let mut factorial = 1.0;
        for (k, t) in taylor.iter().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            let direct = f.nth_derivative(k).eval(z).unwrap() / factorial;
            assert!((t - direct).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn multiplicity_examples() {
        let f = Polynomial::from_roots(&[(c(1.0), 3), (c(-2.0), 1)], c(1.0)).unwrap();
        assert_eq!(multiplicity_by_derivatives(&f, c(1.0), 1e-6).unwrap(), 3);
        assert_eq!(multiplicity_by_derivatives(&f, c(-2.0), 1e-6).unwrap(), 1);
        let g = poly(&[-4.0, 0.0, 1.0]);
        assert_eq!(multiplicity_by_derivatives(&g, c(2.0), 1e-6).unwrap(), 1);
        let h = poly(&[1.0, -2.0, 1.0]);
        assert_eq!(multiplicity_by_derivatives(&h, c(1.0), 1e-6).unwrap(), 2);
        assert!(matches!(
            multiplicity_by_derivatives(&g, c(0.0), 1e-6),
            Err(CertifyError::NotARoot { .. })
        ));
    }

    #[test]
    fn cluster_examples() {
        let f = poly(&[-4.0, 0.0, 1.0]);
        let reports = cluster(&[c(2.0000001), c(-1.9999999)], &f, 1e-6).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| r.multiplicity == 1 && r.certified));
        assert!((reports[0].value - c(2.0)).norm() < 1e-14);
        assert_eq!(reports[1].path_indices, vec![2]);

        let g = Polynomial::from_roots(&[(c(1.0), 2), (c(-2.0), 1)], c(1.0)).unwrap();
        let reports = cluster(&[c(1.0 + 1e-9), c(1.0 - 1e-9), c(-2.0)], &g, 1e-6).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].multiplicity, 2);
        assert_eq!(reports[0].path_indices, vec![1, 2]);
        assert!((reports[0].value - c(1.0)).norm() < 1e-12);
        assert!(!reports[0].certified);
        assert_eq!(reports[0].derivative_check, Some(2));
        assert_eq!(reports[1].multiplicity, 1);
        assert_eq!(reports[1].derivative_check, Some(1));

        let linear = poly(&[6.0, 3.0]);
        let reports = cluster(&[c(-2.0)], &linear, 1e-6).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].multiplicity, 1);
    }

    #[test]
    fn pseudozero_grouping_joins_split_multiple_root() {
        // rounding the expanded coefficients splits the triple root
        let rho = Complex64::new(0.3, 0.7);
        let f = Polynomial::from_roots(&[(rho, 3), (c(-1.0), 1)], c(1.0)).unwrap();
        let mut endpoints: Vec<Complex64> = (0..3)
            .map(|k| rho + Complex64::from_polar(1e-3, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
            .collect();
        endpoints.insert(1, c(-1.0 + 1e-9));
        let reports = cluster_pseudozero(&endpoints, &f, PSEUDOZERO_LEVEL).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].multiplicity, 3);
        assert_eq!(reports[0].path_indices, vec![1, 3, 4]);
        assert!((reports[0].value - rho).norm() < 1e-10);
        assert_eq!(reports[0].derivative_check, Some(3));
        assert_eq!(reports[1].multiplicity, 1);
        assert!(reports[1].certified);

        // distinct roots 0.3 apart stay apart
        let g = Polynomial::from_roots(&[(c(0.0), 1), (c(0.3), 1)], c(1.0)).unwrap();
        let reports = cluster_pseudozero(&[c(0.0), c(0.3)], &g, PSEUDOZERO_LEVEL).unwrap();
        assert_eq!(reports.len(), 2);
    }

    #[test]
    fn cluster_rejects_ambiguity_and_wrong_count() {
        let f = Polynomial::from_roots(&[(c(0.0), 1), (c(1.5e-6), 1), (c(5.0), 1)], c(1.0)).unwrap();
        assert!(matches!(
            cluster(&[c(0.0), c(1.5e-6), c(5.0)], &f, 1e-6),
            Err(CertifyError::AmbiguousClustering { .. })
        ));
        assert!(matches!(
            cluster(&[c(0.0)], &f, 1e-6),
            Err(CertifyError::EndpointCount { .. })
        ));
    }
}
