//! Sylvester matrices, resultants and the univariate discriminant.
//!
//! Row layout: for `f = a_0 + ... + a_d x^d` and `g = b_0 + ... + b_e x^e`
//! the first `e` rows hold successive right shifts of `(a_0, ..., a_d)`
//! and the next `d` rows hold successive right shifts of `(b_0, ..., b_e)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::certify::{self, SolveConfig, SolveError};
use crate::complex_poly::{Polynomial, TRIM_RELATIVE};

/// `|γ_d Δ_d| <= SIGMA_RELATIVE * max(1, ‖coeffs‖_∞^{2d-1})` marks a
/// coefficient vector as lying on the discriminant hypersurface.
pub const SIGMA_RELATIVE: f64 = 1e-9;

/// A resultant counts as vanishing when
/// `|Res| <= SHARED_ROOT_RELATIVE * ‖f‖_2^e ‖g‖_2^d`.
pub const SHARED_ROOT_RELATIVE: f64 = 1e-6;

/// Tolerance of the coefficient comparison in [`combination_identity_check`].
pub const IDENTITY_RELATIVE: f64 = 1e-10;

/// Backward-error bound a common root must meet on the second polynomial.
pub const COMMON_ROOT_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ResultantError {
    #[error("format ({d}, {e}) is empty")]
    BadFormat { d: usize, e: usize },
    #[error("polynomial of degree {degree} does not fit format degree {format}")]
    DegreeExceedsFormat { degree: usize, format: usize },
    #[error("discriminant needs a polynomial of degree >= 1")]
    ConstantPolynomial,
    #[error("multiplier length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("leading coefficient of degree-{format} input vanishes")]
    VanishingLead { format: usize },
    #[error("resultant {resultant:e} is small but no common root found (best residual {residual:e}); numerically borderline pair")]
    Borderline { resultant: f64, residual: f64 },
    #[error("root solve failed: {0}")]
    Solve(#[from] Box<SolveError>),
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Panics if the rows are ragged or not square.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.n + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    /// Determinant by Gaussian elimination with partial pivoting on modulus.
    /// The empty matrix has determinant 1.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap_or(k);
            let pv = a[pivot * n + k];
            if pv.norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != k {
                for c in 0..n {
                    a.swap(k * n + c, pivot * n + c);
                }
                det = -det;
            }
            det *= pv;
            for i in k + 1..n {
                let factor = a[i * n + k] / pv;
                if factor.norm() == 0.0 {
                    continue;
                }
                for c in k + 1..n {
                    let v = a[k * n + c];
                    a[i * n + c] -= factor * v;
                }
            }
        }
        det
    }

    /// Row vector times matrix.
    pub fn left_multiply(&self, row: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(row.len(), self.n);
        (0..self.n)
            .map(|c| (0..self.n).map(|r| row[r] * self.get(r, c)).sum())
            .collect()
    }
}

/// Sylvester matrix of `(f, g)` in format `(d, e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterMatrix {
    matrix: ComplexMatrix,
    format: (usize, usize),
}

impl SylvesterMatrix {
    pub fn format(&self) -> (usize, usize) {
        self.format
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.determinant()
    }
}

fn check_format(d: usize, e: usize) -> Result<(), ResultantError> {
    if d + e == 0 {
        return Err(ResultantError::BadFormat { d, e });
    }
    Ok(())
}

fn fitted(p: &Polynomial, degree: usize) -> Result<Vec<Complex64>, ResultantError> {
    if p.degree() > degree && !p.is_zero() {
        return Err(ResultantError::DegreeExceedsFormat {
            degree: p.degree(),
            format: degree,
        });
    }
    let mut c = p.padded(degree + 1);
    c.truncate(degree + 1);
    Ok(c)
}

fn sylvester_from_coeffs(a: &[Complex64], b: &[Complex64]) -> ComplexMatrix {
    let d = a.len() - 1;
    let e = b.len() - 1;
    let n = d + e;
    let mut m = ComplexMatrix::zeros(n);
    for r in 0..e {
        for (k, &v) in a.iter().enumerate() {
            m.set(r, r + k, v);
        }
    }
    for r in 0..d {
        for (k, &v) in b.iter().enumerate() {
            m.set(e + r, r + k, v);
        }
    }
    m
}

/// Builds `Syl_{d,e}(f, g)`, zero-padding inputs of lower formal degree.
pub fn sylvester(
    f: &Polynomial,
    g: &Polynomial,
    format: (usize, usize),
) -> Result<SylvesterMatrix, ResultantError> {
    let (d, e) = format;
    check_format(d, e)?;
    let a = fitted(f, d)?;
    let b = fitted(g, e)?;
    Ok(SylvesterMatrix {
        matrix: sylvester_from_coeffs(&a, &b),
        format,
    })
}

pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    m.determinant()
}

/// `Res_{d,e}(f, g) = det Syl_{d,e}(f, g)`.
pub fn resultant(
    f: &Polynomial,
    g: &Polynomial,
    format: (usize, usize),
) -> Result<Complex64, ResultantError> {
    Ok(sylvester(f, g, format)?.determinant())
}

/// Discriminant value together with the Σ_d membership verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantValue {
    pub delta: Complex64,
    pub sigma_member: bool,
}

impl DiscriminantValue {
    /// `|γ_d Δ_d|` for the coefficient vector it was computed from.
    pub fn lead_times_delta(&self, lead: Complex64) -> f64 {
        (lead * self.delta).norm()
    }
}

/// The Σ_d threshold for a coefficient vector of formal degree `d`.
pub fn sigma_threshold(coeffs: &[Complex64]) -> f64 {
    let d = coeffs.len().saturating_sub(1);
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let exponent = (2 * d).saturating_sub(1) as i32;
    SIGMA_RELATIVE * 1f64.max(max.powi(exponent))
}

/// Δ_d of a coefficient vector of formal degree `d = coeffs.len() - 1`.
///
/// The last column of `Syl_{d,d-1}(f, f')` is `a_d` times
/// `(0, .., 1, 0, .., d)`, so Δ_d is the determinant with that column
/// replaced; no division by `a_d` is needed and the value stays finite
/// when the leading coefficient vanishes.
pub fn discriminant_of_coeffs(coeffs: &[Complex64]) -> DiscriminantValue {
    let d = coeffs.len().saturating_sub(1);
    let lead = coeffs.last().copied().unwrap_or_default();
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let lead_negligible = lead.norm() <= TRIM_RELATIVE * max || max == 0.0;
    if d <= 1 {
        return DiscriminantValue {
            delta: Complex64::new(1.0, 0.0),
            sigma_member: lead_negligible,
        };
    }
    let deriv: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect();
    let mut m = sylvester_from_coeffs(coeffs, &deriv);
    let n = 2 * d - 1;
    let e = d - 1;
    for r in 0..n {
        m.set(r, n - 1, Complex64::new(0.0, 0.0));
    }
    m.set(e - 1, n - 1, Complex64::new(1.0, 0.0));
    m.set(n - 1, n - 1, Complex64::new(d as f64, 0.0));
    let delta = m.determinant();
    let sigma_member = lead_negligible || (lead * delta).norm() <= sigma_threshold(coeffs);
    DiscriminantValue {
        delta,
        sigma_member,
    }
}

/// Δ_d(γ_0, ..., γ_d) with `Res_{d,d-1}(p, p') = γ_d Δ_d`; Δ_1 is 1.
pub fn discriminant(p: &Polynomial) -> Result<DiscriminantValue, ResultantError> {
    if p.degree() == 0 {
        return Err(ResultantError::ConstantPolynomial);
    }
    Ok(discriminant_of_coeffs(p.coeffs()))
}

/// Checks `[α, β] · Syl_{d,e}(f, g)` against the coefficients of
/// `α(x) f(x) + β(x) g(x)` expanded by convolution.
pub fn combination_identity_check(
    f: &Polynomial,
    g: &Polynomial,
    format: (usize, usize),
    alpha: &[Complex64],
    beta: &[Complex64],
) -> Result<bool, ResultantError> {
    let (d, e) = format;
    check_format(d, e)?;
    if alpha.len() != e {
        return Err(ResultantError::DimensionMismatch {
            expected: e,
            got: alpha.len(),
        });
    }
    if beta.len() != d {
        return Err(ResultantError::DimensionMismatch {
            expected: d,
            got: beta.len(),
        });
    }
    let syl = sylvester(f, g, format)?;
    let row: Vec<Complex64> = alpha.iter().chain(beta).copied().collect();
    let via_matrix = syl.matrix().left_multiply(&row);

    let a = fitted(f, d)?;
    let b = fitted(g, e)?;
    let mut via_poly = vec![Complex64::new(0.0, 0.0); d + e];
    for (i, al) in alpha.iter().enumerate() {
        for (k, ak) in a.iter().enumerate() {
            via_poly[i + k] += al * ak;
        }
    }
    for (i, be) in beta.iter().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            via_poly[i + k] += be * bk;
        }
    }

    // magnitude of the terms summed into each coefficient
    let mut magnitude = vec![0.0f64; d + e];
    for (i, al) in alpha.iter().enumerate() {
        for (k, ak) in a.iter().enumerate() {
            magnitude[i + k] += al.norm() * ak.norm();
        }
    }
    for (i, be) in beta.iter().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            magnitude[i + k] += be.norm() * bk.norm();
        }
    }
    let scale = magnitude.iter().fold(0.0, |m: f64, &v| m.max(v));
    Ok(via_matrix
        .iter()
        .zip(&via_poly)
        .all(|(u, v)| (u - v).norm() <= IDENTITY_RELATIVE * scale))
}

/// `‖f‖_2^e ‖g‖_2^d`, the Hadamard-type magnitude of `Syl_{d,e}(f, g)`.
pub fn resultant_scale(f: &Polynomial, g: &Polynomial, format: (usize, usize)) -> f64 {
    let (d, e) = format;
    f.l2_norm().powi(e as i32) * g.l2_norm().powi(d as i32)
}

/// Returns a common root of `f` and `g` when their resultant vanishes,
/// `None` when it does not.
///
/// The root is found by solving `f` and keeping the root with the smallest
/// `|g|`.
pub fn common_root_certificate(
    f: &Polynomial,
    g: &Polynomial,
    format: (usize, usize),
) -> Result<Option<Complex64>, ResultantError> {
    let (d, e) = format;
    check_format(d, e)?;
    if f.degree() != d {
        return Err(ResultantError::VanishingLead { format: d });
    }
    if g.degree() != e {
        return Err(ResultantError::VanishingLead { format: e });
    }
    let res = resultant(f, g, format)?;
    if res.norm() > SHARED_ROOT_RELATIVE * resultant_scale(f, g, format) {
        return Ok(None);
    }
    let solution = certify::solve(f, &SolveConfig::default()).map_err(Box::new)?;
    let best = solution
        .reports
        .iter()
        .map(|r| {
            let z = r.value;
            let backward = g.horner(z).norm() / g.abs_eval(z).max(f64::MIN_POSITIVE);
            (z, backward)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1));
    match best {
        Some((z, backward)) if backward <= COMMON_ROOT_RESIDUAL => Ok(Some(z)),
        Some((_, backward)) => Err(ResultantError::Borderline {
            resultant: res.norm(),
            residual: backward,
        }),
        None => Err(ResultantError::Borderline {
            resultant: res.norm(),
            residual: f64::INFINITY,
        }),
    }
}
