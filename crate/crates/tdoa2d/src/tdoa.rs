//! Forward TDOA map and the feasibility structure of measurement space.
//!
//! With propagation speed 1, a source x yields the measurement pair
//! `tau = (d1(x) - d0(x), d2(x) - d0(x))`. The reachable pairs lie in a
//! hexagonal polytope cut out by three triangle inequalities, and an inscribed
//! ellipse (the zero set of `ellipse_value`) separates measurements with one
//! preimage from those with two.

use serde::Serialize;

use crate::geometry::{ReceiverConfig, Vec2};
use crate::localizer::localize;

/// One TDOA measurement pair, in length units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdoaPair {
    pub tau1: f64,
    pub tau2: f64,
}

impl TdoaPair {
    pub fn new(tau1: f64, tau2: f64) -> Self {
        Self { tau1, tau2 }
    }
}

/// Where a measurement pair sits relative to the polytope and the ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TauRegion {
    /// No source produces this pair.
    OutsideImage,
    /// Inside the ellipse: exactly one source.
    InteriorUnique,
    /// Outside the ellipse but in the image: exactly two sources.
    InteriorAmbiguous,
    /// On the ellipse (within band): the preimage is a single curve point, if any.
    OnEllipse,
    /// On a polytope facet (within band).
    OnPolytopeBoundary,
    /// At an ellipse-facet tangency point: the preimage escaped to infinity.
    ExcludedTangency,
}

/// Polytope membership with a facet-resolved boundary case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolytopeMembership {
    Interior,
    /// Index of the facet whose slack is maximal within the boundary band.
    Boundary(usize),
    Outside,
}

/// Full classification of a measurement pair.
#[derive(Debug, Clone, Serialize)]
pub struct TauClassification {
    pub region: TauRegion,
    pub expected_preimages: u8,
    /// Signed ellipse residual `a(tau)`.
    pub ellipse_value: f64,
    /// Signed distances to the six facet planes, negative inside.
    pub facet_slacks: [f64; 6],
}

/// Forward map: range differences relative to receiver 0.
pub fn tau2_forward(config: &ReceiverConfig, x: Vec2) -> TdoaPair {
    let [m0, m1, m2] = config.receivers();
    let d0 = x.dist(m0);
    TdoaPair::new(x.dist(m1) - d0, x.dist(m2) - d0)
}

/// Ellipse residual `a(tau) = |tau2*d10 - tau1*d20|^2 - W^2`.
///
/// Negative strictly inside the inscribed ellipse, zero on it, positive outside.
pub fn ellipse_value(config: &ReceiverConfig, tau: TdoaPair) -> f64 {
    let v = config.d10() * tau.tau2 - config.d20() * tau.tau1;
    v.norm_sq() - config.w() * config.w()
}

/// Signed distances to the six facet planes, negative inside the polytope.
///
/// Facet order: `tau1 = +|d10|`, `tau1 = -|d10|`, `tau2 = +|d20|`,
/// `tau2 = -|d20|`, `tau2 - tau1 = +|d21|`, `tau2 - tau1 = -|d21|`.
pub fn facet_slacks(config: &ReceiverConfig, tau: TdoaPair) -> [f64; 6] {
    let (l10, l20, l21) = config.separations();
    let diff = tau.tau2 - tau.tau1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        tau.tau1 - l10,
        -tau.tau1 - l10,
        tau.tau2 - l20,
        -tau.tau2 - l20,
        (diff - l21) * s,
        (-diff - l21) * s,
    ]
}

fn boundary_band(config: &ReceiverConfig) -> f64 {
    1e-9 * config.scale().max(1.0)
}

/// Classifies against the six facet inequalities with a boundary band.
pub fn polytope_membership(config: &ReceiverConfig, tau: TdoaPair) -> PolytopeMembership {
    let slacks = facet_slacks(config, tau);
    let band = boundary_band(config);
    // First facet with the maximal slack, so ties at vertices resolve stably.
    let (mut argmax, mut max) = (0usize, slacks[0]);
    for (i, &s) in slacks.iter().enumerate().skip(1) {
        if s > max {
            (argmax, max) = (i, s);
        }
    }
    if max > band {
        PolytopeMembership::Outside
    } else if max >= -band {
        PolytopeMembership::Boundary(argmax)
    } else {
        PolytopeMembership::Interior
    }
}

/// The six polytope vertices, sorted by angle around the origin.
pub fn polytope_vertices(config: &ReceiverConfig) -> Vec<TdoaPair> {
    // Facet lines as a*tau1 + b*tau2 = c.
    let (l10, l20, l21) = config.separations();
    let lines: [(f64, f64, f64); 6] = [
        (1.0, 0.0, l10),
        (-1.0, 0.0, l10),
        (0.0, 1.0, l20),
        (0.0, -1.0, l20),
        (-1.0, 1.0, l21),
        (1.0, -1.0, l21),
    ];
    let band = boundary_band(config);
    let mut out: Vec<TdoaPair> = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            let (a1, b1, c1) = lines[i];
            let (a2, b2, c2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-12 {
                continue;
            }
            let t = TdoaPair::new((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det);
            let feasible = facet_slacks(config, t).iter().all(|&s| s <= band);
            let dup = out
                .iter()
                .any(|v| (v.tau1 - t.tau1).abs() + (v.tau2 - t.tau2).abs() < band);
            if feasible && !dup {
                out.push(t);
            }
        }
    }
    out.sort_by(|p, q| p.tau2.atan2(p.tau1).total_cmp(&q.tau2.atan2(q.tau1)));
    out
}

/// The six ellipse-facet tangency points, indexed like the facets.
///
/// On each facet the restricted ellipse residual is a perfect square, so the
/// tangency point is its double root; antipodal facets give antipodal points.
pub fn tangency_points(config: &ReceiverConfig) -> Vec<TdoaPair> {
    let (l10, l20, l21) = config.separations();
    let dot1020 = config.d10().dot(config.d20());
    let dot2110 = config.d21().dot(config.d10());
    let t0 = TdoaPair::new(l10, dot1020 / l10);
    let t2 = TdoaPair::new(dot1020 / l20, l20);
    let t4 = TdoaPair::new(dot2110 / l21, dot2110 / l21 + l21);
    let neg = |t: TdoaPair| TdoaPair::new(-t.tau1, -t.tau2);
    vec![t0, neg(t0), t2, neg(t2), t4, neg(t4)]
}

/// Region classification plus the preimage count it implies.
///
/// Counts on bands (facets, ellipse) defer to inverse-solve consistency, and a
/// positive ellipse residual inside the polytope still classifies as
/// `OutsideImage` when no source reproduces the pair: the image omits the
/// pockets between the out-of-image ellipse arcs and the boundary.
pub fn classify_tau(config: &ReceiverConfig, tau: TdoaPair) -> TauClassification {
    let slacks = facet_slacks(config, tau);
    let a = ellipse_value(config, tau);
    let membership = polytope_membership(config, tau);
    let w2 = config.w() * config.w();
    let on_ellipse = a.abs() <= 1e-9 * w2 * (1.0 + tau.tau1 * tau.tau1 + tau.tau2 * tau.tau2);
    let done = |region, count: u8| TauClassification {
        region,
        expected_preimages: count,
        ellipse_value: a,
        facet_slacks: slacks,
    };
    match membership {
        PolytopeMembership::Outside => done(TauRegion::OutsideImage, 0),
        PolytopeMembership::Boundary(_) => {
            if on_ellipse {
                done(TauRegion::ExcludedTangency, 0)
            } else {
                let n = localize(config, tau).solutions.len() as u8;
                done(TauRegion::OnPolytopeBoundary, n)
            }
        }
        PolytopeMembership::Interior => {
            if on_ellipse {
                let n = localize(config, tau).solutions.len().min(1) as u8;
                done(TauRegion::OnEllipse, n)
            } else if a < 0.0 {
                done(TauRegion::InteriorUnique, 1)
            } else if localize(config, tau).solutions.len() == 2 {
                done(TauRegion::InteriorAmbiguous, 2)
            } else {
                done(TauRegion::OutsideImage, 0)
            }
        }
    }
}
