//! Planar Newtonian central configurations, with a focus on the six-body
//! family built from two congruent isosceles triangles.
//!
//! Bodies 1..4 sit at the corners `(∓1, ±y)` of a rectangle and the two apex
//! bodies at `(∓(1 + x), 0)`. With unit rectangle masses and a common apex
//! mass `m`, the geometry is a central configuration exactly when the two
//! closed-form apex masses [`family::mass_m1`] and [`family::mass_m2`] agree
//! and are positive. At `(x, y) = (1, √3)` the family is the regular hexagon.
//!
//! Module map:
//!
//! * [`geometry`]: configurations and elementary transforms.
//! * [`potential`]: `U`, `I`, `λ = U/I` and the two residual forms of the
//!   central-configuration equations. Everything else is checked against it.
//! * [`family`]: the two-triangle geometry and its reduced closed forms.
//! * [`mass_solver`]: mass vectors for a fixed geometry from the nullspace of
//!   the linear CC system.
//! * [`continuation`]: root finding and tracing of the branch `x = φ(y)`.
//! * [`cli`]: the `ccfinder` command line front end and its file formats.

pub mod cli;
pub mod continuation;
pub mod error;
pub mod family;
pub mod geometry;
pub mod mass_solver;
pub mod numdiff;
pub mod potential;

pub use continuation::{
    ift_certificate, solve_phi, trace_curve, trace_curve_with, CurveTrace, IftCertificate,
    SolutionPoint, Termination, TraceOptions,
};
pub use error::{CcError, Result};
pub use family::{
    build_configuration, family_f, lambda_reduced, mass_m1, mass_m2, FamilyEvaluation,
    FamilyParams, ReducedLambdas,
};
pub use geometry::{PlanarConfiguration, Vec2};
pub use mass_solver::{assemble_cc_system, check_symmetry_relations, solve_masses, MassSolution};
pub use potential::{
    cc_residual_direct, cc_residual_weighted, lambda_of, moment_of_inertia, potential_energy,
    CcScalars, Formulation, ResidualReport,
};

/// `√3`, the anchor value of `y`.
pub fn sqrt3() -> f64 {
    3f64.sqrt()
}
