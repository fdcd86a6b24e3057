//! Brute-force reference computations for tests.
//!
//! Nothing here shares code paths with the solver beyond [`Polynomial`]
//! itself: determinants are expanded by cofactors, roots are found by a
//! grid scan, and test cases are built from chosen roots.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::complex_poly::{PolyError, Polynomial};
use crate::resultants::ComplexMatrix;

/// Largest matrix [`brute_determinant`] accepts.
pub const BRUTE_MAX: usize = 8;

/// Separation between distinct drawn roots.
pub const CASE_SEPARATION: f64 = 0.3;
/// Radius of the disk roots are drawn from.
pub const CASE_RADIUS: f64 = 2.0;
pub const MAX_CASE_DEGREE: usize = 30;
const DRAWS_PER_ROOT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("brute-force determinant limited to {BRUTE_MAX}x{BRUTE_MAX}, got {0}x{0}")]
    TooLarge(usize),
    #[error("degree {0} outside 1..={MAX_CASE_DEGREE}")]
    BadDegree(usize),
    #[error("multiplicity profile {profile:?} does not sum to degree {degree}")]
    BadProfile { profile: Vec<usize>, degree: usize },
    #[error("could not place {wanted} roots {separation} apart in radius {radius}")]
    SeparationUnachievable {
        wanted: usize,
        separation: f64,
        radius: f64,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Cofactor expansion along the first row.
pub fn brute_determinant(m: &ComplexMatrix) -> Result<Complex64, OracleError> {
    let n = m.size();
    if n > BRUTE_MAX {
        return Err(OracleError::TooLarge(n));
    }
    let rows = m.rows();
    let cols: Vec<usize> = (0..n).collect();
    Ok(expand(&rows, 0, &cols))
}

fn expand(rows: &[Vec<Complex64>], row: usize, cols: &[usize]) -> Complex64 {
    if cols.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (k, &c) in cols.iter().enumerate() {
        let entry = rows[row][c];
        if entry == Complex64::new(0.0, 0.0) {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = expand(rows, row + 1, &rest);
        if k % 2 == 0 {
            total += entry * minor;
        } else {
            total -= entry * minor;
        }
    }
    total
}

/// Roots found by sampling `|f|` on a `resolution x resolution` grid over
/// the square `[-radius, radius]^2`, polishing each local minimum with
/// Newton's method and discarding those that do not reach
/// `|f(z)| <= 1e-8 max(1, ‖f‖_∞)`.
pub fn grid_root_scan(f: &Polynomial, radius: f64, resolution: usize) -> Vec<Complex64> {
    let n = resolution.max(2);
    let h = 2.0 * radius / (n - 1) as f64;
    let point = |i: usize, j: usize| Complex64::new(-radius + i as f64 * h, -radius + j as f64 * h);
    let values: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f.horner(point(i, j)).norm()).collect())
        .collect();
    let accept = 1e-8 * f.max_norm().max(1.0);
    let derivative = f.derivative();
    let mut found: Vec<Complex64> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = values[i][j];
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                        continue;
                    }
                    if values[a as usize][b as usize] < v {
                        is_min = false;
                    }
                }
            }
            if !is_min {
                continue;
            }
            let mut z = point(i, j);
            for _ in 0..100 {
                let dz = derivative.horner(z);
                if dz.norm() == 0.0 {
                    break;
                }
                let step = f.horner(z) / dz;
                z -= step;
                if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                    break;
                }
            }
            if z.re.is_finite()
                && z.im.is_finite()
                && f.horner(z).norm() <= accept
                && !found.iter().any(|w| (w - z).norm() <= 1e-6 * radius.max(1.0))
            {
                found.push(z);
            }
        }
    }
    found
}

/// A polynomial together with the roots it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub polynomial: Polynomial,
    pub true_roots: Vec<(Complex64, usize)>,
    pub provenance: String,
}

/// Point uniform in the disk of the given radius.
pub fn disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Monic case with one distinct root per profile entry, drawn in the disk
/// of radius 2 at least 0.3 apart. An empty profile means all roots simple.
pub fn random_case<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
    profile: &[usize],
) -> Result<OracleCase, OracleError> {
    random_case_in(rng, degree, profile, CASE_RADIUS, CASE_SEPARATION)
}

/// [`random_case`] with explicit disk radius and separation.
pub fn random_case_in<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
    profile: &[usize],
    radius: f64,
    separation: f64,
) -> Result<OracleCase, OracleError> {
    if degree == 0 || degree > MAX_CASE_DEGREE {
        return Err(OracleError::BadDegree(degree));
    }
    let profile: Vec<usize> = if profile.is_empty() {
        vec![1; degree]
    } else {
        profile.to_vec()
    };
    if profile.iter().sum::<usize>() != degree || profile.contains(&0) {
        return Err(OracleError::BadProfile { profile, degree });
    }
    let mut roots: Vec<Complex64> = Vec::with_capacity(profile.len());
    for _ in 0..profile.len() {
        let placed = (0..DRAWS_PER_ROOT)
            .map(|_| disk_point(rng, radius))
            .find(|z| roots.iter().all(|w| (w - z).norm() >= separation));
        match placed {
            Some(z) => roots.push(z),
            None => {
                return Err(OracleError::SeparationUnachievable {
                    wanted: profile.len(),
                    separation,
                    radius,
                })
            }
        }
    }
    let true_roots: Vec<(Complex64, usize)> = roots.into_iter().zip(profile.iter().copied()).collect();
    let polynomial = Polynomial::from_roots(&true_roots, Complex64::new(1.0, 0.0))?;
    Ok(OracleCase {
        polynomial,
        true_roots,
        provenance: format!(
            "monic, multiplicities {profile:?}, disk radius {radius}, separation {separation}"
        ),
    })
}

/// Largest distance in a greedy nearest-neighbour matching of two root
/// multisets, or `None` when their total multiplicities differ. Each root
/// is repeated by its multiplicity before matching.
pub fn match_roots(found: &[(Complex64, usize)], truth: &[(Complex64, usize)]) -> Option<f64> {
    let expand = |v: &[(Complex64, usize)]| -> Vec<Complex64> {
        v.iter()
            .flat_map(|&(z, m)| std::iter::repeat_n(z, m))
            .collect()
    };
    let mut pool = expand(found);
    let wanted = expand(truth);
    if pool.len() != wanted.len() {
        return None;
    }
    let mut worst = 0.0f64;
    for z in wanted {
        let (k, dist) = pool
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (w - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        worst = worst.max(dist);
        pool.swap_remove(k);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn brute_determinant_examples() {
        assert_eq!(brute_determinant(&ComplexMatrix::identity(4)).unwrap(), c(1.0));
        // Syl_{2,1}(x^2 - 1, 2x) in row-shift layout
        let syl = ComplexMatrix::from_rows(vec![
            vec![c(-1.0), c(0.0), c(1.0)],
            vec![c(0.0), c(2.0), c(0.0)],
            vec![c(0.0), c(0.0), c(2.0)],
        ]);
        assert_eq!(brute_determinant(&syl).unwrap(), c(-4.0));
        assert_eq!(
            brute_determinant(&ComplexMatrix::identity(9)),
            Err(OracleError::TooLarge(9))
        );
    }

    #[test]
    fn grid_scan_examples() {
        let f = Polynomial::from_real(&[-4.0, 0.0, 1.0]).unwrap();
        let mut roots = grid_root_scan(&f, 4.0, 128);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - c(-2.0)).norm() < 1e-12);
        assert!((roots[1] - c(2.0)).norm() < 1e-12);

        let g = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).unwrap();
        let roots = grid_root_scan(&g, 2.0, 128);
        assert_eq!(roots.len(), 3);
        for z in roots {
            assert!(g.eval(z).unwrap().norm() <= 1e-8);
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_case_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let case = random_case(&mut rng, 5, &[3, 1, 1]).unwrap();
        assert_eq!(case.polynomial.degree(), 5);
        assert_eq!(case.true_roots.len(), 3);
        for (i, (z, _)) in case.true_roots.iter().enumerate() {
            assert!(z.norm() <= CASE_RADIUS);
            for (w, _) in &case.true_roots[i + 1..] {
                assert!((z - w).norm() >= CASE_SEPARATION);
            }
            let scale = case.polynomial.max_norm();
            assert!(case.polynomial.eval(*z).unwrap().norm() <= 1e-10 * scale);
        }

        let again = random_case(&mut ChaCha8Rng::seed_from_u64(7), 5, &[3, 1, 1]).unwrap();
        assert_eq!(case, again);

        assert!(random_case(&mut rng, 2, &[]).is_ok());
        assert!(random_case(&mut rng, 4, &[2, 1]).is_err());
        assert!(random_case(&mut rng, 31, &[]).is_err());
        assert!(matches!(
            random_case_in(&mut rng, 30, &[], 0.1, 1.0),
            Err(OracleError::SeparationUnachievable { .. })
        ));
    }

    #[test]
    fn match_roots_examples() {
        let truth = [(c(1.0), 2), (c(-1.0), 1)];
        let found = [(c(-1.0 + 1e-9), 1), (c(1.0), 2)];
        assert!(match_roots(&found, &truth).unwrap() <= 1e-9 + 1e-16);
        assert_eq!(match_roots(&[(c(1.0), 1)], &truth), None);
    }
}
