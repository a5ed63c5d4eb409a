//! Numerical laboratory for the two-phase membrane problem
//!
//! ```text
//! Δu = (λ₊/2)·χ{u>0} − (λ₋/2)·χ{u<0}
//! ```
//!
//! on a rectangle with Dirichlet data. The crate is `no_std` (it needs
//! `alloc`) and contains only pure numerics:
//!
//! * [`grid`]: uniform grids, sampled fields, stencils and interpolation.
//! * [`profiles`]: the exact one-dimensional global solutions, their
//!   rotations, sign-definite quadratic solutions, and sup-norm distances
//!   to those classes.
//! * [`solver`]: discrete energy minimization by a sign-pattern
//!   active-set iteration with a preconditioned CG inner solve.
//! * [`monotonicity`]: Weiss and Alt–Caffarelli–Friedman functionals,
//!   the circle norm `S_r`, blow-up rescalings and radius ladders.
//! * [`freeboundary`]: contour extraction, point classification, two-graph
//!   fits, the reflection diagnostic, perimeter and covering estimates.
//!
//! File formats, configuration and the command line live in the
//! `membrane-lab` companion crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod freeboundary;
pub mod geometry;
pub mod grid;
pub mod monotonicity;
pub mod profiles;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Point, Rect};
pub use grid::{BoundaryData, Grid2D, GradientField, PointSampler, ScalarField};
pub use profiles::{GlobalProfile, MStarBounds, OnePhasePolynomial, Phase, SourceStrengths};
