//! Dense univariate polynomials over `Complex64`.
//!
//! Coefficients are stored in ascending order: `coeffs[i]` multiplies `x^i`.
//! Construction trims negligible leading coefficients, so the stored degree
//! always matches the leading coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// A leading coefficient is dropped when its modulus is at most this
/// fraction of the largest coefficient modulus.
pub const TRIM_RELATIVE: f64 = 1e-12;

/// Relative factor for the deflation remainder check:
/// `|remainder| <= DEFLATION_RELATIVE * (1 + max|coeff|)`.
pub const DEFLATION_RELATIVE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial needs at least one coefficient")]
    Empty,
    #[error("non-finite coefficient at index {index}")]
    NonFiniteCoefficient { index: usize },
    #[error("non-finite evaluation point {0}")]
    NonFinitePoint(Complex64),
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("leading coefficient must be nonzero")]
    ZeroLead,
    #[error("deflation by (x - {root})^{multiplicity} left remainder {remainder:e} in round {round} (limit {limit:e})")]
    DeflationRemainder {
        root: Complex64,
        multiplicity: usize,
        round: usize,
        remainder: f64,
        limit: f64,
    },
    #[error("cannot deflate degree {degree} polynomial by a factor of degree {multiplicity}")]
    DeflationDegree { degree: usize, multiplicity: usize },
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Univariate polynomial `γ_0 + γ_1 x + ... + γ_d x^d`.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, rejecting non-finite
    /// values and trimming negligible leading terms.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::Empty);
        }
        if let Some(index) = coeffs.iter().position(|c| !is_finite(*c)) {
            return Err(PolyError::NonFiniteCoefficient { index });
        }
        Ok(Self::trimmed(coeffs))
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The zero polynomial (degree 0, single zero coefficient).
    pub fn zero() -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `x^d - 1`.
    pub fn unit_start(d: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
        coeffs[0] = Complex64::new(-1.0, 0.0);
        coeffs[d] += Complex64::new(1.0, 0.0);
        Self::trimmed(coeffs)
    }

    /// Expands `lead * prod (x - root_k)^{m_k}`.
    pub fn from_roots(roots: &[(Complex64, usize)], lead: Complex64) -> Result<Self, PolyError> {
        if !is_finite(lead) {
            return Err(PolyError::NonFiniteCoefficient { index: 0 });
        }
        if lead == Complex64::new(0.0, 0.0) {
            return Err(PolyError::ZeroLead);
        }
        let mut coeffs = vec![lead];
        for &(root, mult) in roots {
            if !is_finite(root) {
                return Err(PolyError::NonFinitePoint(root));
            }
            if mult == 0 {
                return Err(PolyError::ZeroMultiplicity);
            }
            for _ in 0..mult {
                // multiply by (x - root)
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (i, &c) in coeffs.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * root;
                }
                coeffs = next;
            }
        }
        Ok(Self { coeffs })
    }

    fn trimmed(mut coeffs: Vec<Complex64>) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cutoff = TRIM_RELATIVE * max;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            coeffs.pop();
        }
        if max == 0.0 {
            coeffs.truncate(1);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// `max_i |γ_i|`.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Horner evaluation. Rejects non-finite points.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, PolyError> {
        if !is_finite(z) {
            return Err(PolyError::NonFinitePoint(z));
        }
        Ok(self.horner(z))
    }

    pub(crate) fn horner(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    /// `Σ |γ_i| |z|^i`, the natural magnitude of `p(z)` for backward-error checks.
    pub(crate) fn abs_eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Self { coeffs }
    }

    /// k-th derivative; `nth_derivative(0)` is a clone.
    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Divides out `(x - root)^multiplicity` by repeated synthetic division.
    ///
    /// Each round's remainder must stay below
    /// `DEFLATION_RELATIVE * (1 + max|coeff|)`, measured against the
    /// polynomial being divided in that round.
    pub fn deflate(&self, root: Complex64, multiplicity: usize) -> Result<Self, PolyError> {
        if multiplicity == 0 {
            return Err(PolyError::ZeroMultiplicity);
        }
        if !is_finite(root) {
            return Err(PolyError::NonFinitePoint(root));
        }
        if multiplicity > self.degree() {
            return Err(PolyError::DeflationDegree {
                degree: self.degree(),
                multiplicity,
            });
        }
        let mut current = self.coeffs.clone();
        for round in 1..=multiplicity {
            let limit = DEFLATION_RELATIVE
                * (1.0 + current.iter().map(|c| c.norm()).fold(0.0, f64::max));
            let (quotient, remainder) = synthetic_division(&current, root);
            if remainder.norm() > limit {
                return Err(PolyError::DeflationRemainder {
                    root,
                    multiplicity,
                    round,
                    remainder: remainder.norm(),
                    limit,
                });
            }
            current = quotient;
        }
        Ok(Self { coeffs: current })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::trimmed(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Coefficients zero-padded (or kept) to exactly `len` entries.
    pub fn padded(&self, len: usize) -> Vec<Complex64> {
        let mut out = self.coeffs.clone();
        out.resize(len.max(out.len()), Complex64::new(0.0, 0.0));
        out
    }
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub(crate) fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Quotient and remainder of division by `(x - root)`.
fn synthetic_division(coeffs: &[Complex64], root: Complex64) -> (Vec<Complex64>, Complex64) {
    let n = coeffs.len();
    if n == 1 {
        return (vec![Complex64::new(0.0, 0.0)], coeffs[0]);
    }
    let mut quotient = vec![Complex64::new(0.0, 0.0); n - 1];
    let mut carry = Complex64::new(0.0, 0.0);
    for i in (1..n).rev() {
        carry = carry * root + coeffs[i];
        quotient[i - 1] = carry;
    }
    let remainder = carry * root + coeffs[0];
    (quotient, remainder)
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)x^{}", c.re, c.im, i)?;
        }
        write!(f, ")")
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let a = self.padded(len);
        let b = rhs.padded(len);
        Polynomial::trimmed(a.iter().zip(&b).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::trimmed(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(re: &[f64]) -> Polynomial {
        Polynomial::from_real(re).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = poly(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(1.0)).unwrap(), c(0.0));
        assert_eq!(p.eval(c(2.0)).unwrap(), c(3.0));

        let cube = poly(&[-1.0, 0.0, 0.0, 1.0]);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(cube.eval(w).unwrap().norm() < 1e-14);
    }

    #[test]
    fn eval_rejects_non_finite_point() {
        let p = poly(&[1.0, 1.0]);
        assert!(matches!(
            p.eval(Complex64::new(f64::NAN, 0.0)),
            Err(PolyError::NonFinitePoint(_))
        ));
        assert!(p.eval(Complex64::new(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn constructor_rejects_non_finite_and_empty() {
        assert_eq!(Polynomial::new(vec![]), Err(PolyError::Empty));
        assert_eq!(
            Polynomial::from_real(&[1.0, f64::INFINITY]),
            Err(PolyError::NonFiniteCoefficient { index: 1 })
        );
    }

    #[test]
    fn trims_negligible_leading_terms() {
        let p = poly(&[1.0, 1.0, 0.0]);
        assert_eq!(p.degree(), 1);
        let q = poly(&[1.0, 1.0, 1e-13]);
        assert_eq!(q.degree(), 1);
        let kept = poly(&[1.0, 1.0, 1e-11]);
        assert_eq!(kept.degree(), 2);
        assert!(poly(&[0.0, 0.0, 0.0]).is_zero());
        assert_eq!(poly(&[0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn derivative_examples() {
        for d in 1..8 {
            let p = Polynomial::unit_start(d);
            let dp = p.derivative();
            assert_eq!(dp.degree(), d - 1);
            assert_eq!(dp.leading(), c(d as f64));
            assert!(dp.coeffs()[..d - 1].iter().all(|z| z.norm() == 0.0));
        }
        assert!(poly(&[5.0]).derivative().is_zero());
        assert_eq!(poly(&[1.0, 3.0, 1.0]).derivative(), poly(&[3.0, 2.0]));
    }

    #[test]
    fn deflate_examples() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let p = poly(&[2.0, -3.0, 0.0, 1.0]);
        let q = p.deflate(c(1.0), 2).unwrap();
        assert_eq!(q.degree(), 1);
        assert!((q.coeffs()[0] - c(2.0)).norm() < 1e-10);
        assert!((q.coeffs()[1] - c(1.0)).norm() < 1e-10);

        let p = poly(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.deflate(c(1.0), 1).unwrap(), poly(&[1.0, 1.0]));

        match p.deflate(c(3.0), 1) {
            Err(PolyError::DeflationRemainder { remainder, .. }) => {
                assert!((remainder - 8.0).abs() < 1e-12)
            }
            other => panic!("expected remainder error, got {other:?}"),
        }
        assert!(p.deflate(c(1.0), 0).is_err());
        assert!(p.deflate(c(1.0), 3).is_err());
    }

    #[test]
    fn from_roots_examples() {
        let one = c(1.0);
        assert_eq!(
            Polynomial::from_roots(&[(one, 1), (-one, 1)], one).unwrap(),
            poly(&[-1.0, 0.0, 1.0])
        );
        assert_eq!(
            Polynomial::from_roots(&[(c(2.0), 1), (c(-2.0), 1)], one).unwrap(),
            poly(&[-4.0, 0.0, 1.0])
        );
        // (x-1)^3 (x+2) expanded by hand: x^4 - x^3 - 3x^2 + 5x - 2
        let p = Polynomial::from_roots(&[(one, 3), (c(-2.0), 1)], one).unwrap();
        assert_eq!(p, poly(&[-2.0, 5.0, -3.0, -1.0, 1.0]));
        for z in [
            Complex64::new(0.3, -1.2),
            Complex64::new(-2.5, 0.7),
            Complex64::new(1.9, 1.9),
            Complex64::new(-0.1, 0.0),
            Complex64::new(4.0, -3.0),
        ] {
            let direct = (z - one).powu(3) * (z + 2.0);
            assert!((p.eval(z).unwrap() - direct).norm() < 1e-11 * (1.0 + direct.norm()));
        }
        assert_eq!(
            Polynomial::from_roots(&[(one, 1)], c(0.0)),
            Err(PolyError::ZeroLead)
        );
        assert_eq!(
            Polynomial::from_roots(&[(one, 0)], one),
            Err(PolyError::ZeroMultiplicity)
        );
    }

    #[test]
    fn arithmetic() {
        let p = poly(&[1.0, 2.0]);
        let q = poly(&[-1.0, 0.0, 3.0]);
        assert_eq!(&p + &q, poly(&[0.0, 2.0, 3.0]));
        assert_eq!(&p - &p, poly(&[0.0]));
        assert_eq!(&p * &q, poly(&[-1.0, -2.0, 3.0, 6.0]));
    }
}
