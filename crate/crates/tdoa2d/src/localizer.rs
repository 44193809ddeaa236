//! Closed-form inverse of the TDOA map.
//!
//! Squaring the range relations `d_i(x) = d_0(x) + tau_i` for i = 1, 2 gives a
//! linear system for `u = x - m0`:
//!
//! `2 * d_i0 . u = |d_i0|^2 - tau_i^2 - 2 * tau_i * d0`
//!
//! so `x = m0 + alpha + beta * d0` with alpha, beta solved per component, and
//! substituting into `|u| = d0` leaves one quadratic
//! `kappa * d0^2 + 2 b * d0 + c = 0`.
//!
//! Invariant: `kappa = |beta|^2 - 1` equals `ellipse_value(tau) / W^2` exactly,
//! so the quadratic degenerates to a linear equation precisely on the inscribed
//! ellipse. Candidate roots are filtered by physical constraints (`d0 >= 0`,
//! `d0 + tau_i >= 0`) and by the unsquared residual, which removes mirror-branch
//! artifacts introduced by squaring.

use crate::geometry::{ReceiverConfig, Vec2};
use crate::tdoa::TdoaPair;

/// One recovered source with its distance to receiver 0.
#[derive(Debug, Clone, Copy)]
pub struct SourceSolution {
    pub position: Vec2,
    pub d0: f64,
}

/// All physical solutions for a measurement pair, sorted by `d0`.
#[derive(Debug, Clone, Default)]
pub struct LocalizationResult {
    pub solutions: Vec<SourceSolution>,
    /// The quadratic collapsed to linear: the pair lies on the ellipse.
    pub degenerate_linear: bool,
    /// The two roots coincided: the source lies on the ambiguity boundary curve.
    pub double_root: bool,
}

/// Largest unsquared range-difference residual of x against tau.
pub fn branch_residual(config: &ReceiverConfig, x: Vec2, tau: TdoaPair) -> f64 {
    let [m0, m1, m2] = config.receivers();
    let d0 = x.dist(m0);
    let r1 = x.dist(m1) - d0 - tau.tau1;
    let r2 = x.dist(m2) - d0 - tau.tau2;
    r1.abs().max(r2.abs())
}

/// Closed-form localization; returns 0, 1, or 2 sources.
pub fn localize(config: &ReceiverConfig, tau: TdoaPair) -> LocalizationResult {
    let d10 = config.d10();
    let d20 = config.d20();
    let det = 4.0 * config.w();
    let solve = |r1: f64, r2: f64| {
        // Inverse of [[2*d10]; [2*d20]] applied to (r1, r2).
        Vec2::new(
            (2.0 * d20.y * r1 - 2.0 * d10.y * r2) / det,
            (2.0 * d10.x * r2 - 2.0 * d20.x * r1) / det,
        )
    };
    let (t1, t2) = (tau.tau1, tau.tau2);
    let alpha = solve(
        d10.norm_sq() - t1 * t1,
        d20.norm_sq() - t2 * t2,
    );
    let beta = solve(-2.0 * t1, -2.0 * t2);
    let kappa = beta.norm_sq() - 1.0;
    let b = alpha.dot(beta);
    let c = alpha.norm_sq();

    let mut result = LocalizationResult::default();
    let mut roots: Vec<f64> = Vec::new();
    if kappa.abs() <= 1e-12 * (1.0 + beta.norm_sq()) {
        result.degenerate_linear = true;
        if b != 0.0 {
            roots.push(-c / (2.0 * b));
        }
    } else {
        let disc = b * b - kappa * c;
        let disc_scale = (b * b).max((kappa * c).abs()).max(f64::MIN_POSITIVE);
        if disc >= -1e-12 * disc_scale {
            if disc <= 1e-12 * disc_scale {
                result.double_root = true;
                roots.push(-b / kappa);
            } else {
                // Cancellation-free quadratic roots.
                let q = -(b + disc.sqrt().copysign(if b == 0.0 { 1.0 } else { b }));
                roots.push(q / kappa);
                if q != 0.0 {
                    roots.push(c / q);
                }
            }
        }
    }

    let half_tol = 1e-9 * (1.0 + config.scale());
    let [m0, _, _] = config.receivers();
    for &r in &roots {
        if r < -half_tol {
            continue;
        }
        let d0 = r.max(0.0);
        if d0 + t1 < -half_tol || d0 + t2 < -half_tol {
            continue;
        }
        let position = m0 + alpha + beta * d0;
        if branch_residual(config, position, tau) > 1e-7 * (1.0 + d0) {
            continue;
        }
        // Coincident roots may survive twice through the band clamps.
        if result
            .solutions
            .iter()
            .any(|s| (s.d0 - d0).abs() <= 1e-12 * (1.0 + d0))
        {
            continue;
        }
        result.solutions.push(SourceSolution { position, d0 });
    }
    result.solutions.sort_by(|a, b| a.d0.total_cmp(&b.d0));
    result
}
