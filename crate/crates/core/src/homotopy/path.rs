//! Coefficient paths from a start system to a target polynomial.

use num_complex::Complex64;
use rand::Rng;

use super::HomotopyError;
use crate::complex_poly::Polynomial;
use crate::resultants::{discriminant_of_coeffs, sigma_threshold};

/// Candidate arc constants tried before falling back to uniform draws.
const ARC_CANDIDATES: [f64; 9] = [0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0, -8.0];
/// Total arc constants tried before giving up.
pub const MAX_ARC_ATTEMPTS: usize = 32;
/// Uniform draws of the arc constant come from `[-ARC_RANGE, ARC_RANGE]`.
const ARC_RANGE: f64 = 16.0;
/// Discriminant samples per unit of degree on the degenerate segment scan.
const SEGMENT_SAMPLES_PER_DEGREE: usize = 32;
/// Golden-section iterations when refining a sampled local minimum.
const GOLDEN_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    /// `(1-t) p + t q`.
    StraightLine,
    /// `(1-t) e^{iθ} p + t q`.
    GammaRotated { theta: f64 },
    /// `L(s)` with `s = t + i c t (1-t)` over the line `L`.
    ParabolicArc { c: f64 },
    /// `L(ε + t (1-ε))` over the line `L`.
    SegmentRestricted { epsilon: f64 },
}

/// An analytic path `[0, 1] -> C^{d+1}` of coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPath {
    kind: PathKind,
    start: Vec<Complex64>,
    target: Vec<Complex64>,
}

fn aligned(p: &Polynomial, q: &Polynomial) -> Result<(Vec<Complex64>, Vec<Complex64>), HomotopyError> {
    let d = q.degree();
    if d == 0 {
        return Err(HomotopyError::ConstantTarget);
    }
    if p.degree() > d {
        return Err(HomotopyError::DegreeMismatch {
            start: p.degree(),
            target: d,
        });
    }
    Ok((p.padded(d + 1), q.coeffs().to_vec()))
}

impl CoefficientPath {
    pub fn straight_line(p: &Polynomial, q: &Polynomial) -> Result<Self, HomotopyError> {
        let (start, target) = aligned(p, q)?;
        Ok(Self {
            kind: PathKind::StraightLine,
            start,
            target,
        })
    }

    /// `(1-t) e^{iθ} (x^d - 1) + t f`.
    pub fn gamma_rotated(f: &Polynomial, theta: f64) -> Result<Self, HomotopyError> {
        let (start, target) = aligned(&Polynomial::unit_start(f.degree()), f)?;
        Ok(Self {
            kind: PathKind::GammaRotated { theta },
            start,
            target,
        })
    }

    pub fn parabolic_arc(p: &Polynomial, q: &Polynomial, c: f64) -> Result<Self, HomotopyError> {
        let (start, target) = aligned(p, q)?;
        Ok(Self {
            kind: PathKind::ParabolicArc { c },
            start,
            target,
        })
    }

    pub fn segment_restricted(
        p: &Polynomial,
        q: &Polynomial,
        epsilon: f64,
    ) -> Result<Self, HomotopyError> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(HomotopyError::BadRestriction(epsilon));
        }
        let (start, target) = aligned(p, q)?;
        Ok(Self {
            kind: PathKind::SegmentRestricted { epsilon },
            start,
            target,
        })
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.target.len() - 1
    }

    /// Line parameter `s` reached at path parameter `t`.
    fn line_parameter(&self, t: f64) -> Complex64 {
        match self.kind {
            PathKind::StraightLine | PathKind::GammaRotated { .. } => Complex64::new(t, 0.0),
            PathKind::ParabolicArc { c } => Complex64::new(t, c * t * (1.0 - t)),
            PathKind::SegmentRestricted { epsilon } => {
                Complex64::new(epsilon + t * (1.0 - epsilon), 0.0)
            }
        }
    }

    /// Coefficients of the underlying line at complex parameter `s`.
    pub fn line_at(&self, s: Complex64) -> Vec<Complex64> {
        let rot = match self.kind {
            PathKind::GammaRotated { theta } => Complex64::from_polar(1.0, theta),
            _ => Complex64::new(1.0, 0.0),
        };
        let one = Complex64::new(1.0, 0.0);
        // endpoints reproduced exactly
        if s == Complex64::new(0.0, 0.0) {
            return self.start.iter().map(|&a| rot * a).collect();
        }
        if s == one {
            return self.target.clone();
        }
        self.start
            .iter()
            .zip(&self.target)
            .map(|(&a, &b)| (one - s) * rot * a + s * b)
            .collect()
    }

    /// Coefficient vector `φ(t)`.
    pub fn eval(&self, t: f64) -> Vec<Complex64> {
        self.line_at(self.line_parameter(t))
    }

    pub fn start_coeffs(&self) -> Vec<Complex64> {
        self.eval(0.0)
    }

    pub fn target_coeffs(&self) -> &[Complex64] {
        &self.target
    }

    /// Whether `φ(0)` is a nonzero multiple of `x^d - 1`, so the roots of
    /// unity start the path.
    pub fn starts_at_roots_of_unity(&self) -> bool {
        let c = self.start_coeffs();
        let d = c.len() - 1;
        let lead = c[d];
        lead.norm() > 0.0
            && (c[0] + lead).norm() <= 1e-14 * lead.norm()
            && c[1..d].iter().all(|z| z.norm() <= 1e-14 * lead.norm())
    }
}

/// `|γ_d Δ_d| / threshold` for a coefficient vector; at most 1 means the
/// vector counts as a Σ_d member.
fn sigma_ratio(coeffs: &[Complex64]) -> f64 {
    let dv = discriminant_of_coeffs(coeffs);
    if dv.sigma_member {
        // includes the vanishing-lead case
        let lead = coeffs[coeffs.len() - 1];
        return ((lead * dv.delta).norm() / sigma_threshold(coeffs)).min(1.0);
    }
    let lead = coeffs[coeffs.len() - 1];
    (lead * dv.delta).norm() / sigma_threshold(coeffs)
}

/// Path from `p` to `q` along the parabolic arc `s = t + i c t (1 - t)`
/// over the line through them, with `c` chosen so the sampled discriminant
/// stays above the Σ_d threshold.
///
/// `steps` is the tracker step count; the arc is sampled at `16 d steps`
/// points.
pub fn build_avoiding_path<R: Rng + ?Sized>(
    p: &Polynomial,
    q: &Polynomial,
    steps: usize,
    rng: &mut R,
) -> Result<CoefficientPath, HomotopyError> {
    let line = CoefficientPath::straight_line(p, q)?;
    let d = line.degree();
    if discriminant_of_coeffs(&line.start).sigma_member {
        return Err(HomotopyError::EndpointInSigma { which: "start" });
    }
    if discriminant_of_coeffs(&line.target).sigma_member {
        return Err(HomotopyError::EndpointInSigma { which: "target" });
    }
    let samples = 16 * d * steps.max(1);
    let mut best = (f64::NAN, 0.0f64);
    for attempt in 0..MAX_ARC_ATTEMPTS {
        let c = ARC_CANDIDATES
            .get(attempt)
            .copied()
            .unwrap_or_else(|| rng.gen_range(-ARC_RANGE..ARC_RANGE));
        let arc = CoefficientPath {
            kind: PathKind::ParabolicArc { c },
            ..line.clone()
        };
        let min_ratio = sampled_min_ratio(&arc, samples);
        if min_ratio > 1.0 {
            return Ok(arc);
        }
        if best.0.is_nan() || min_ratio > best.1 {
            best = (c, min_ratio);
        }
    }
    Err(HomotopyError::ArcRejected {
        best_c: best.0,
        best_ratio: best.1,
    })
}

/// Straight path from `γ_d e^{iθ} (x^d - 1)` to a target that may lie on
/// Σ_d, restricted to `[ε, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneratePath {
    pub path: CoefficientPath,
    pub epsilon: f64,
    /// Largest interior parameter where the line dips into Σ_d.
    pub t_star: Option<f64>,
}

/// Finds the restriction `ε` that keeps the line from
/// `γ_d e^{iθ} (x^d - 1)` to `f` out of Σ_d except near `t = 1`.
///
/// The discriminant is sampled on `[0, 1)`; sampled local minima are
/// refined by golden-section search. The run of Σ_d samples touching
/// `t = 1` belongs to the target itself and is skipped. The last dip below
/// that run is `t*`, and `ε` is the midpoint between `t*` and the start of
/// the run (`(1 + t*) / 2` when the run is empty).
pub fn degenerate_target_path(f: &Polynomial, theta: f64) -> Result<DegeneratePath, HomotopyError> {
    let d = f.degree();
    if d == 0 {
        return Err(HomotopyError::ConstantTarget);
    }
    let lead = f.leading();
    let start = Polynomial::unit_start(d).scale(lead * Complex64::from_polar(1.0, theta));
    let line = CoefficientPath::straight_line(&start, f)?;
    let m = SEGMENT_SAMPLES_PER_DEGREE * d.max(2);
    let ts: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
    let ratios: Vec<f64> = ts.iter().map(|&t| sigma_ratio(&line.eval(t))).collect();

    if ratios[..m].iter().all(|&r| r <= 1.0) {
        return Err(HomotopyError::DenseDiscriminantZero);
    }

    // run of Σ_d samples ending at t = 1
    let mut run_start = m;
    while run_start > 0 && ratios[run_start - 1] <= 1.0 {
        run_start -= 1;
    }

    let mut t_star: Option<f64> = None;
    for k in (0..run_start).rev() {
        if ratios[k] <= 1.0 {
            t_star = Some(ts[k]);
            break;
        }
        let left = if k == 0 { f64::INFINITY } else { ratios[k - 1] };
        let right = ratios[k + 1];
        if k > 0 && ratios[k] <= left && ratios[k] <= right {
            let (tm, rm) =
                golden_minimum(|t| sigma_ratio(&line.eval(t)), ts[k - 1], ts[k + 1]);
            if rm <= 1.0 && tm < ts[run_start] {
                t_star = Some(tm);
                break;
            }
        }
    }

    let epsilon = match t_star {
        None => 0.0,
        Some(ts_) => {
            let upper = if run_start == m { 1.0 } else { ts[run_start] };
            0.5 * (ts_ + upper)
        }
    };
    if epsilon > 0.0 && sigma_ratio(&line.eval(epsilon)) <= 1.0 {
        return Err(HomotopyError::DenseDiscriminantZero);
    }
    let path = CoefficientPath {
        kind: PathKind::SegmentRestricted { epsilon },
        ..line
    };
    Ok(DegeneratePath {
        path,
        epsilon,
        t_star,
    })
}

/// Smallest Σ_d ratio along the path: `samples + 1` equispaced points,
/// with every interior local minimum refined by golden-section search.
fn sampled_min_ratio(path: &CoefficientPath, samples: usize) -> f64 {
    let ratio = |t: f64| sigma_ratio(&path.eval(t));
    let ts: Vec<f64> = (0..=samples).map(|k| k as f64 / samples as f64).collect();
    let values: Vec<f64> = ts.iter().map(|&t| ratio(t)).collect();
    let mut min = values.iter().copied().fold(f64::INFINITY, f64::min);
    for k in 1..samples {
        if min <= 1.0 {
            break;
        }
        if values[k] <= values[k - 1] && values[k] <= values[k + 1] {
            min = min.min(golden_minimum(ratio, ts[k - 1], ts[k + 1]).1);
        }
    }
    min
}

fn golden_minimum<F: Fn(f64) -> f64>(ratio: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = ratio(x1);
    let mut f2 = ratio(x2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1.min(f2) <= 1.0 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = ratio(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = ratio(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
