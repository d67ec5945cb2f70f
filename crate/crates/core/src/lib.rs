//! Discrete integral Menger curvature, Jones-type β-numbers and a
//! stopping-time Lipschitz-graph construction on weighted point clouds.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: affine subspaces, projections, Grassmannian angles.
//! * [`simplex`]: Gram-determinant volumes, heights, faces, simplex searches.
//! * [`integrands`]: the six curvature integrands and propriety diagnostics.
//! * [`measure`]: weighted point clouds with closed-ball range queries, generators and CSV I/O.
//! * [`beta`]: β-numbers with fixed, L²-optimal and L¹-refined planes.
//! * [`curvature`]: exact, Monte-Carlo and localized curvature sums.
//! * [`construction`]: stopping-time state, Whitney cubes, the graph map `A`, γ-functions.
//! * [`harness`]: drivers evaluating both sides of the curvature/flatness inequalities.
//! * [`cli`]: the `mengerlab` command-line surface.

pub mod beta;
pub mod cli;
pub mod construction;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod integrands;
pub mod measure;
pub mod simplex;

pub use error::{Error, Result};
pub use geometry::{AffineMap, AffineSubspace, Point};
pub use measure::{Ball, DiscreteMeasure};
pub use simplex::Simplex;
