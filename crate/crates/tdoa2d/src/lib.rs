//! Planar TDOA localization with three receivers.
//!
//! Given three non-collinear receivers and a source emitting at an unknown
//! time, the two observable range differences (TDOAs scaled by the propagation
//! speed) determine the source position either uniquely or up to a two-fold
//! ambiguity. This crate provides:
//!
//! - the forward TDOA map and the exact feasibility structure of measurement
//!   space (a hexagonal polytope with an inscribed ellipse),
//! - a closed-form inverse localizer with degeneracy handling,
//! - the exact degree-5 curve separating unique from ambiguous source
//!   positions, with its asymptotes, ideal points, and samplers,
//! - brute-force oracles that cross-validate the closed forms.
//!
//! # Quick start
//!
//! ```
//! use tdoa2d::geometry::ReceiverConfig;
//! use tdoa2d::tdoa::tau2_forward;
//! use tdoa2d::localizer::localize;
//!
//! let cfg = ReceiverConfig::from_f64([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0]]).unwrap();
//! let tau = tau2_forward(&cfg, tdoa2d::geometry::Vec2::new(1.0, 1.0));
//! let result = localize(&cfg, tau);
//! assert_eq!(result.solutions.len(), 1);
//! assert!(result.solutions[0].position.dist(tdoa2d::geometry::Vec2::new(1.0, 1.0)) < 1e-9);
//! ```

pub mod bifurcation;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod localizer;
pub mod oracle;
pub mod poly;
pub mod rational;
pub mod tdoa;

pub use error::Error;
