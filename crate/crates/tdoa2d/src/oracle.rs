//! Brute-force validation oracles, independent of the closed-form algebra:
//! a multistart Newton localizer working on raw range differences, a grid
//! sweep cross-checking the sign of the curve polynomial against the
//! preimage-count classification, and a float vs exact evaluation audit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bifurcation::{build_quintic, residual_chain, PointRegion};
use crate::geometry::{wedge_star, ReceiverConfig, Vec2};
use crate::rational::{rational_from_f64, rational_to_f64};
use crate::tdoa::{ellipse_value, tau2_forward, TdoaPair};

// ---- multistart Newton localizer ----

/// Absolute residual threshold for convergence; the range-difference residual
/// is bounded in the far field, so a scale-relative test accepts wanderers.
const NEWTON_TOL: f64 = 1e-10;
/// Converged iterates closer than this collapse into one root.
const CLUSTER_RADIUS: f64 = 1e-6;
/// Start box half-width as a multiple of the larger baseline from `m0`.
const START_BOX_FACTOR: f64 = 10.0;
const MAX_ITERS: usize = 100;
const POLISH_ITERS: usize = 20;

/// Range-difference residual `(d1 - d0 - tau1, d2 - d0 - tau2)` plus the unit
/// directions from each receiver; `None` exactly at a receiver.
fn residual_and_units(
    config: &ReceiverConfig,
    tau: TdoaPair,
    x: Vec2,
) -> Option<(Vec2, [Vec2; 3])> {
    let m = config.receivers();
    let mut d = [0.0; 3];
    let mut u = [Vec2::new(0.0, 0.0); 3];
    for i in 0..3 {
        let v = x - m[i];
        d[i] = v.norm();
        if d[i] == 0.0 {
            return None;
        }
        u[i] = v * (1.0 / d[i]);
    }
    Some((Vec2::new(d[1] - d[0] - tau.tau1, d[2] - d[0] - tau.tau2), u))
}

/// Newton displacement solving `J * step = -r`; the Jacobian rows are the
/// unit-direction differences `u1 - u0` and `u2 - u0`. `None` when the rows
/// are numerically parallel.
fn newton_step(r: Vec2, u: &[Vec2; 3]) -> Option<Vec2> {
    let j0 = u[1] - u[0];
    let j1 = u[2] - u[0];
    let det = wedge_star(j0, j1);
    if det.abs() < 1e-14 {
        return None;
    }
    Some(Vec2::new(
        (j0.y * r.y - j1.y * r.x) / det,
        (j1.x * r.x - j0.x * r.y) / det,
    ))
}

/// One damped Newton run; returns the polished root and its residual norm.
fn newton_run(config: &ReceiverConfig, tau: TdoaPair, start: Vec2) -> Option<(Vec2, f64)> {
    let mut x = start;
    let (mut r, mut u) = residual_and_units(config, tau, x)?;
    let mut rn = r.norm();
    for _ in 0..MAX_ITERS {
        if rn < NEWTON_TOL {
            return Some(polish(config, tau, x, rn));
        }
        let step = newton_step(r, &u)?;
        // Backtrack until the residual norm decreases.
        let mut t = 1.0;
        loop {
            let xn = x + step * t;
            if let Some((rt, ut)) = residual_and_units(config, tau, xn) {
                let rtn = rt.norm();
                if rtn < rn {
                    x = xn;
                    r = rt;
                    u = ut;
                    rn = rtn;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return None;
            }
        }
    }
    None
}

/// Undamped end-game steps while the residual keeps improving.
fn polish(config: &ReceiverConfig, tau: TdoaPair, x: Vec2, rn: f64) -> (Vec2, f64) {
    let mut best = (x, rn);
    for _ in 0..POLISH_ITERS {
        let Some((r, u)) = residual_and_units(config, tau, best.0) else {
            break;
        };
        let Some(step) = newton_step(r, &u) else {
            break;
        };
        let xn = best.0 + step;
        match residual_and_units(config, tau, xn) {
            Some((rt, _)) if rt.norm() < best.1 => best = (xn, rt.norm()),
            _ => break,
        }
    }
    best
}

/// Multistart damped Newton localization from jittered stratified starting
/// points in a fixed box around the receiver centroid.
///
/// The box half-width is `10 * max(|d10|, |d20|)`; preimages escaping toward
/// infinity near folds are out of scope by design. `starts` is rounded up to
/// the next perfect square `k^2`, and one start is jittered uniformly inside
/// each cell of a `k x k` partition of the box, so coverage is guaranteed at
/// the cell scale (independent draws cluster and miss small basins).
/// Converged roots are clustered to `1e-6`, each cluster keeps its
/// best-residual member, and the result is sorted by distance to `m0`.
/// Output is a pure function of `(config, tau, starts, seed)`.
pub fn newton_cluster_localize(
    config: &ReceiverConfig,
    tau: TdoaPair,
    starts: usize,
    seed: u64,
) -> Vec<Vec2> {
    let center = config.centroid();
    let h = START_BOX_FACTOR * config.d10().norm().max(config.d20().norm());
    let k = (starts as f64).sqrt().ceil() as usize;
    let cell = 2.0 * h / k as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, tau));
    let mut roots: Vec<(Vec2, f64)> = Vec::new();
    for row in 0..k {
        for col in 0..k {
            let start = Vec2::new(
                center.x - h + cell * (col as f64 + rng.gen_range(0.0..1.0)),
                center.y - h + cell * (row as f64 + rng.gen_range(0.0..1.0)),
            );
            let Some((x, rn)) = newton_run(config, tau, start) else {
                continue;
            };
            match roots.iter_mut().find(|(root, _)| root.dist(x) < CLUSTER_RADIUS) {
                Some(entry) if rn < entry.1 => *entry = (x, rn),
                Some(_) => {}
                None => roots.push((x, rn)),
            }
        }
    }
    let m0 = config.receivers()[0];
    roots.sort_by(|a, b| m0.dist(a.0).total_cmp(&m0.dist(b.0)));
    roots.into_iter().map(|(x, _)| x).collect()
}

/// Folds the tau bits into the seed so each pair gets its own start stream.
fn mix_seed(seed: u64, tau: TdoaPair) -> u64 {
    let mut h = seed;
    for bits in [tau.tau1.to_bits(), tau.tau2.to_bits()] {
        h = splitmix64(h ^ bits);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// ---- sign map comparison ----

/// Fold-side exclusion band as a multiple of `W^2`.
const FOLD_BAND: f64 = 1e-6;
/// At most this many mismatch locations are retained in the report.
const MISMATCH_KEEP: usize = 64;

/// Outcome of a grid sweep comparing the sign of the curve polynomial with
/// the preimage-count classification.
///
/// Mismatches are counted only where both classifiers sit outside their
/// tolerance bands.
#[derive(Debug, Clone)]
pub struct SignMapReport {
    /// Lower-left grid corner.
    pub extent_min: Vec2,
    /// Upper-right grid corner.
    pub extent_max: Vec2,
    /// Total grid points visited.
    pub samples: usize,
    /// Disagreements outside both exclusion bands.
    pub mismatches: usize,
    /// First few mismatch locations, for diagnosis.
    pub mismatch_points: Vec<Vec2>,
    /// Points skipped because either classifier sat inside its band.
    pub band_excluded: usize,
}

/// Sweeps an `n x n` grid and cross-checks `sign(F)` against `sign(a)`.
///
/// A point is skipped when the curve value lies in the on-curve band or the
/// fold value satisfies `|a| <= 1e-6 * W^2`; elsewhere the negative sides
/// (single preimage) must coincide.
pub fn sign_map_compare(
    config: &ReceiverConfig,
    extent_min: Vec2,
    extent_max: Vec2,
    n: usize,
) -> SignMapReport {
    assert!(n >= 2, "grid needs at least two points per axis");
    let curve = build_quintic(config);
    let w2 = config.w() * config.w();
    let step_x = (extent_max.x - extent_min.x) / (n - 1) as f64;
    let step_y = (extent_max.y - extent_min.y) / (n - 1) as f64;
    let mut report = SignMapReport {
        extent_min,
        extent_max,
        samples: n * n,
        mismatches: 0,
        mismatch_points: Vec::new(),
        band_excluded: 0,
    };
    for i in 0..n {
        for j in 0..n {
            let x = Vec2::new(
                extent_min.x + step_x * i as f64,
                extent_min.y + step_y * j as f64,
            );
            let region = curve.classify(x);
            let a = ellipse_value(config, tau2_forward(config, x));
            if region == PointRegion::OnCurve || a.abs() <= FOLD_BAND * w2 {
                report.band_excluded += 1;
                continue;
            }
            let unique_by_curve = region == PointRegion::UniqueRegion;
            let unique_by_fold = a < 0.0;
            if unique_by_curve != unique_by_fold {
                report.mismatches += 1;
                if report.mismatch_points.len() < MISMATCH_KEEP {
                    report.mismatch_points.push(x);
                }
            }
        }
    }
    report
}

// ---- float vs exact evaluation audit ----

/// Largest relative deviation between float and exact evaluation of the
/// curve polynomial over `n` seeded random points near the receivers.
///
/// Audits both float paths: compensated evaluation of the expanded
/// polynomial, and the twice-squared residual chain built from distances.
/// Deviation is `|float - exact| / (1 + |exact|)`.
pub fn numeric_vs_exact_deviation(config: &ReceiverConfig, n: usize, seed: u64) -> f64 {
    let curve = build_quintic(config);
    let c = config.centroid();
    let h = 5.0_f64.max(2.0 * config.scale());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let x = Vec2::new(c.x + rng.gen_range(-h..h), c.y + rng.gen_range(-h..h));
        let exact = curve.eval_exact(
            &rational_from_f64(x.x).expect("finite coordinate"),
            &rational_from_f64(x.y).expect("finite coordinate"),
        );
        let exact_f = rational_to_f64(&exact);
        let denom = 1.0 + exact_f.abs();
        let by_poly = (curve.eval(x) - exact_f).abs() / denom;
        let by_chain = (residual_chain(config, x).twice_squared - exact_f).abs() / denom;
        worst = worst.max(by_poly).max(by_chain);
    }
    worst
}

// ---- tests ----
