use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    magnitudes, newton_on, roots_of_unity_start, CoefficientPath, HomotopyError, HomotopySystem,
    StartSystem, TrackerConfig,
};
use crate::bounds::{homotopy_escape_radius, ESCAPE_SLACK};
use crate::complex_poly::{horner, Polynomial};

/// Corrector cap per step when endpoints may collide.
pub const ENDGAME_CORRECTOR_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Tracking,
    Converged,
    AbortedEscape,
    AbortedSingular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub z: Complex64,
    /// `|H(t, z)|`.
    pub residual: f64,
}

/// One root path; `index` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedPath {
    pub index: usize,
    pub samples: Vec<PathSample>,
    pub status: PathStatus,
}

impl TrackedPath {
    pub fn endpoint(&self) -> Complex64 {
        self.samples.last().map(|s| s.z).unwrap_or_default()
    }
}

/// How the final step at `t = 1` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endgame {
    /// The target has simple roots: every check applies through `t = 1`.
    Distinct,
    /// The target may have multiple roots. Paths approaching a collision
    /// need more repair, so the corrector may run up to
    /// [`ENDGAME_CORRECTOR_CAP`] iterations per step; at `t = 1` paths may
    /// meet and a singular derivative stops the corrector instead of
    /// aborting.
    Collisions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackRun {
    pub paths: Vec<TrackedPath>,
    pub steps: usize,
    pub escape_radius: f64,
    pub newton_steps: usize,
}

impl TrackRun {
    pub fn all_converged(&self) -> bool {
        self.paths.iter().all(|p| p.status == PathStatus::Converged)
    }

    pub fn endpoints(&self) -> Vec<Complex64> {
        self.paths.iter().map(TrackedPath::endpoint).collect()
    }
}

fn passes_gate(coeffs: &[Complex64], z: Complex64, residual: f64, tol: f64) -> bool {
    residual <= tol * magnitudes(coeffs, z).0
}

/// Tracks `start_roots` along `system` with `steps` equal parameter steps.
///
/// Paths stop at the first failure of any path; paths that were still
/// healthy keep status [`PathStatus::Tracking`].
pub fn track_system(
    system: &HomotopySystem,
    start_roots: &[Complex64],
    steps: usize,
    cfg: &TrackerConfig,
    endgame: Endgame,
) -> Result<TrackRun, HomotopyError> {
    cfg.validate()?;
    let d = system.degree();
    if start_roots.len() != d {
        return Err(HomotopyError::StartRootCount {
            expected: d,
            got: start_roots.len(),
        });
    }
    let steps = steps.max(1);
    let grid: Vec<Vec<Complex64>> = (0..=steps)
        .map(|n| system.coefficients(n as f64 / steps as f64))
        .collect();
    let escape_radius = homotopy_escape_radius(&grid)?;
    let escape_limit = ESCAPE_SLACK * escape_radius;
    let min_separation = cfg.min_separation * escape_radius;

    let mut paths: Vec<TrackedPath> = start_roots
        .iter()
        .enumerate()
        .map(|(j, &z)| TrackedPath {
            index: j + 1,
            samples: vec![PathSample {
                t: 0.0,
                z,
                residual: horner(&grid[0], z).norm(),
            }],
            status: PathStatus::Tracking,
        })
        .collect();
    let mut newton_steps = 0usize;

    'steps: for n in 0..steps {
        let t = (n + 1) as f64 / steps as f64;
        let coeffs = &grid[n + 1];
        let last_step = n + 1 == steps;
        let relaxed = last_step && endgame == Endgame::Collisions;
        let cap = if endgame == Endgame::Collisions {
            ENDGAME_CORRECTOR_CAP.max(cfg.corrector_iterations)
        } else {
            cfg.corrector_iterations
        };

        for path in paths.iter_mut() {
            let mut z = path.endpoint();
            let mut residual = f64::INFINITY;
            let mut failed = None;
            for _ in 0..cap {
                match newton_on(coeffs, z) {
                    Ok(next) => {
                        z = next;
                        newton_steps += 1;
                    }
                    Err(_) if relaxed => {
                        residual = horner(coeffs, z).norm();
                        break;
                    }
                    Err(_) => {
                        failed = Some(PathStatus::AbortedSingular);
                        break;
                    }
                }
                if z.norm().is_nan() || z.norm() > escape_limit {
                    failed = Some(PathStatus::AbortedEscape);
                    break;
                }
                residual = horner(coeffs, z).norm();
                // the nominal step is always taken; further steps repair the residual
                if passes_gate(coeffs, z, residual, cfg.residual_tol) {
                    break;
                }
            }
            if failed.is_none() && !passes_gate(coeffs, z, residual, cfg.residual_tol) {
                failed = Some(PathStatus::AbortedSingular);
            }
            if let Some(status) = failed {
                path.status = status;
                break 'steps;
            }
            path.samples.push(PathSample { t, z, residual });
        }

        if !relaxed {
            let mut collided = Vec::new();
            for i in 0..paths.len() {
                for j in i + 1..paths.len() {
                    if (paths[i].endpoint() - paths[j].endpoint()).norm() < min_separation {
                        collided.push(i);
                        collided.push(j);
                    }
                }
            }
            if !collided.is_empty() {
                for i in collided {
                    paths[i].status = PathStatus::AbortedSingular;
                }
                break 'steps;
            }
        }

        if last_step {
            for path in paths.iter_mut() {
                path.status = PathStatus::Converged;
            }
        }
    }

    Ok(TrackRun {
        paths,
        steps,
        escape_radius,
        newton_steps,
    })
}

/// Draws the start-system rotation angle for one attempt.
pub(crate) fn draw_theta(start: StartSystem, rng: &mut ChaCha8Rng) -> f64 {
    match start {
        StartSystem::Unit => 0.0,
        StartSystem::Gamma => rng.gen_range(0.0..std::f64::consts::TAU),
    }
}

/// Single tracking pass of `f` from the roots of unity along
/// `(1-t) e^{iθ} (x^d - 1) + t f` with `cfg.steps` steps.
pub fn track(f: &Polynomial, cfg: &TrackerConfig) -> Result<TrackRun, HomotopyError> {
    let d = f.degree();
    if d == 0 {
        return Err(HomotopyError::ConstantTarget);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta = draw_theta(cfg.start, &mut rng);
    let system = HomotopySystem::new(CoefficientPath::gamma_rotated(f, theta)?);
    track_system(
        &system,
        &roots_of_unity_start(d)?,
        cfg.steps,
        cfg,
        Endgame::Distinct,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::PathKind;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted_by_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn unit_target_paths_are_stationary() {
        for d in 1..8 {
            let f = Polynomial::unit_start(d);
            let run = track(&f, &TrackerConfig::default()).unwrap();
            assert!(run.all_converged());
            assert_eq!(run.paths.len(), d);
            for p in &run.paths {
                let z0 = p.samples[0].z;
                assert!(p.samples.iter().all(|s| (s.z - z0).norm() <= 1e-12));
            }
        }
    }

    #[test]
    fn quadratic_endpoints() {
        let f = Polynomial::from_real(&[-4.0, 0.0, 1.0]).unwrap();
        let run = track(&f, &TrackerConfig::default()).unwrap();
        assert!(run.all_converged());
        let ends = sorted_by_re(run.endpoints());
        assert!((ends[0] - c(-2.0)).norm() < 1e-8);
        assert!((ends[1] - c(2.0)).norm() < 1e-8);
    }

    #[test]
    fn constructed_cubic_endpoints() {
        let roots = [Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), c(-2.0)];
        let f = Polynomial::from_roots(&roots.map(|r| (r, 1)), c(1.0)).unwrap();
        let run = track(&f, &TrackerConfig::default()).unwrap();
        assert!(run.all_converged());
        for r in roots {
            let best = run
                .endpoints()
                .iter()
                .map(|e| (e - r).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "root {r} missed by {best}");
        }
    }

    #[test]
    fn samples_satisfy_invariants() {
        let f = Polynomial::new(vec![
            Complex64::new(0.5, -2.0),
            Complex64::new(1.0, 1.0),
            c(0.0),
            Complex64::new(-0.3, 0.2),
            c(1.5),
        ])
        .unwrap();
        let cfg = TrackerConfig::default();
        let run = track(&f, &cfg).unwrap();
        assert!(run.all_converged());
        let rng_theta = draw_theta(cfg.start, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
        let system = HomotopySystem::new(CoefficientPath::gamma_rotated(&f, rng_theta).unwrap());
        assert_eq!(system.path().kind(), PathKind::GammaRotated { theta: rng_theta });
        for p in &run.paths {
            assert_eq!(p.samples.len(), cfg.steps + 1);
            assert!(p.samples.windows(2).all(|w| w[0].t < w[1].t));
            assert!(p.samples[0].residual <= 1e-12);
            for s in &p.samples {
                let coeffs = system.coefficients(s.t);
                assert_eq!(horner(&coeffs, s.z).norm(), s.residual);
                assert!(passes_gate(&coeffs, s.z, s.residual, cfg.residual_tol));
            }
        }
        // pairwise separation at every sample
        for n in 0..=cfg.steps {
            for i in 0..run.paths.len() {
                for j in i + 1..run.paths.len() {
                    let gap = (run.paths[i].samples[n].z - run.paths[j].samples[n].z).norm();
                    assert!(gap >= cfg.min_separation * run.escape_radius);
                }
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = Polynomial::from_real(&[1.0, -3.0, 0.5, 2.0, -1.0, 0.25]).unwrap();
        let cfg = TrackerConfig {
            seed: 42,
            ..TrackerConfig::default()
        };
        let a = track(&f, &cfg).unwrap();
        let b = track(&f, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn collision_endgame_reaches_double_root() {
        let f = Polynomial::from_real(&[1.0, -2.0, 1.0]).unwrap();
        let system = HomotopySystem::new(
            CoefficientPath::segment_restricted(&Polynomial::unit_start(2), &f, 0.0).unwrap(),
        );
        let cfg = TrackerConfig::default();
        let start = roots_of_unity_start(2).unwrap();
        let strict = track_system(&system, &start, 256, &cfg, Endgame::Distinct).unwrap();
        assert!(!strict.all_converged());
        let relaxed = track_system(&system, &start, 256, &cfg, Endgame::Collisions).unwrap();
        assert!(relaxed.all_converged(), "{:?}", relaxed.paths.iter().map(|p| (p.status, p.samples.last().copied())).collect::<Vec<_>>());
        for e in relaxed.endpoints() {
            assert!((e - c(1.0)).norm() < 1e-3);
        }
    }

    #[test]
    fn start_root_count_is_checked() {
        let f = Polynomial::from_real(&[-4.0, 0.0, 1.0]).unwrap();
        let system = HomotopySystem::new(CoefficientPath::gamma_rotated(&f, 0.0).unwrap());
        assert!(matches!(
            track_system(&system, &[c(1.0)], 8, &TrackerConfig::default(), Endgame::Distinct),
            Err(HomotopyError::StartRootCount { .. })
        ));
    }
}
