//! Roots of univariate complex polynomials by homotopy continuation.
//!
//! The start system `x^d - 1` is deformed into the target and each of its
//! `d` roots is followed by Newton steps. Targets with multiple roots are
//! handled by letting paths meet at the end and counting how many arrive at
//! each point. Sylvester resultants and discriminants decide which targets
//! need that treatment and guard the paths.
//!
//! ```
//! use homotopy_roots::{solve, Polynomial, SolveConfig};
//!
//! let f = Polynomial::from_real(&[-4.0, 0.0, 1.0]).unwrap();
//! let solution = solve(&f, &SolveConfig::default()).unwrap();
//! assert_eq!(solution.reports.len(), 2);
//! assert!(solution.reports.iter().all(|r| r.certified));
//! ```

pub mod bounds;
pub mod certify;
pub mod cli;
pub mod complex_poly;
pub mod homotopy;
pub mod oracle;
pub mod resultants;

pub use num_complex::Complex64;

pub use bounds::{cauchy_bound, homotopy_escape_radius, RootBound};
pub use certify::{
    alpha_certificate, cluster, multiplicity_by_derivatives, refine, solve, RootReport, Solution,
    SolveConfig, SolveError,
};
pub use complex_poly::{PolyError, Polynomial};
pub use homotopy::{HomotopySystem, PathChoice, StartSystem, TrackerConfig};
pub use resultants::{discriminant, resultant, sylvester};
