//! The ambiguity boundary curve: exact quintic construction and analysis.
//!
//! The boundary is the source-plane preimage of the inscribed ellipse. Writing
//! `s_0 = m1 - m2`, `s_1 = m2 - m0`, `s_2 = m0 - m1` for the triangle sides
//! opposite each receiver and `D_i(x) = d_i(x) * s_i` for the distance-scaled
//! sides, the defining relation is `|D_0 + D_1 + D_2|^2 = W^2`. Squaring away
//! the radicals twice yields a polynomial of formal degree 8 whose top three
//! homogeneous components cancel identically, leaving an exact quintic. The
//! quintic is negative precisely where localization from a measurement pair is
//! unique, so distance to its zero set measures how close a source sits to the
//! region where every localization method degrades.
//!
//! Everything here is built over exact rationals; floats appear only in
//! evaluation caches and sampling.

use num_complex::Complex64;

use crate::error::Error;
use crate::geometry::{wedge_star, RationalPoint, ReceiverConfig, Vec2};
use crate::localizer::localize;
use crate::poly::{BivariatePoly, FloatPoly};
use crate::rational::{int, rational_to_f64, Rational};
use crate::tdoa::{tangency_points, TdoaPair};

/// Relative half-width of the on-curve band, in units of `W^8 * (1 + |x|^5)`.
const ON_CURVE_BAND: f64 = 1e-9;
/// Gradient-norm gate below which the Sampson quotient is meaningless.
const GRADIENT_GATE: f64 = 1e-12;
/// Emitted curve samples must pass both residual checks with 10x headroom
/// under the documented 1e-6 contract; this also discards far-tail points
/// whose float residuals are dominated by cancellation noise.
const SAMPLE_SAMPSON_MAX: f64 = 1e-7;
const SAMPLE_RESIDUAL_MAX: f64 = 1e-7;
/// Tail cutoff in units of the receiver scale. Beyond it the float residual
/// checks are noise-dominated and can pass spuriously (a sweep angle that
/// hits a tangency direction to machine precision produces a "preimage" at
/// radius ~1e15 hugging an asymptote), so such points count as escaped.
const SAMPLE_RADIUS_CAP: f64 = 1e7;

// ---- derived scalars ----

/// Per-point values of the distance-scaled side system.
#[derive(Debug, Clone)]
pub struct DerivedScalars {
    /// Distances `d_i(x) = |x - m_i|`.
    pub d: [f64; 3],
    /// Norms `|D_i(x)| = d_i(x) * |s_i|`.
    pub big_d: [f64; 3],
    /// `Q = |D_0|^2 + |D_1|^2 + |D_2|^2 - W^2`.
    pub q: f64,
    /// Pair dots `P_ij = D_i . D_j` for `(i, j) = (0, 1), (1, 2), (2, 0)`.
    pub big_p: [f64; 3],
    /// Linear forms `p_i(x) = (D_i(x) . (x - m0)) / d_i(x) = s_i . (x - m0)`;
    /// the distance cancels, so these stay defined at the receivers.
    pub p_lin: [f64; 3],
    /// Normalized pair dots `p_ij = P_ij / (d_i d_j) = s_i . s_j`, constants.
    pub p_dot: [f64; 3],
    /// Signed doubled triangle area.
    pub w: f64,
}

impl DerivedScalars {
    /// Recomputes `p_dot[k]` by literal division instead of cancellation.
    ///
    /// Errors with the offending receiver index when x sits on a receiver of
    /// the pair, where the quotient form is undefined.
    pub fn pair_dot_quotient(&self, k: usize) -> Result<f64, Error> {
        let (i, j) = [(0, 1), (1, 2), (2, 0)][k];
        if self.d[i] == 0.0 {
            return Err(Error::AtReceiver(i));
        }
        if self.d[j] == 0.0 {
            return Err(Error::AtReceiver(j));
        }
        Ok(self.big_p[k] / (self.d[i] * self.d[j]))
    }
}

/// Float side vectors `(s_0, s_1, s_2) = (m1 - m2, m2 - m0, m0 - m1)`.
fn side_vectors(config: &ReceiverConfig) -> [Vec2; 3] {
    [-config.d21(), config.d20(), -config.d10()]
}

/// Exact side vectors in the same order.
fn side_vectors_exact(config: &ReceiverConfig) -> [RationalPoint; 3] {
    [
        config.side_exact((1, 2)),
        config.side_exact((2, 0)),
        config.side_exact((0, 1)),
    ]
}

/// Evaluates every derived scalar at x.
pub fn derived_scalars(config: &ReceiverConfig, x: Vec2) -> DerivedScalars {
    let [m0, m1, m2] = config.receivers();
    let s = side_vectors(config);
    let d = [x.dist(m0), x.dist(m1), x.dist(m2)];
    let big_d = [d[0] * s[0].norm(), d[1] * s[1].norm(), d[2] * s[2].norm()];
    let p_dot = [s[0].dot(s[1]), s[1].dot(s[2]), s[2].dot(s[0])];
    let big_p = [
        d[0] * d[1] * p_dot[0],
        d[1] * d[2] * p_dot[1],
        d[2] * d[0] * p_dot[2],
    ];
    let r0 = x - m0;
    let w = config.w();
    DerivedScalars {
        d,
        big_d,
        q: big_d[0] * big_d[0] + big_d[1] * big_d[1] + big_d[2] * big_d[2] - w * w,
        big_p,
        p_lin: [s[0].dot(r0), s[1].dot(r0), s[2].dot(r0)],
        p_dot,
        w,
    }
}

// ---- residual chain ----

/// The same vanishing quantity computed at five algebraic stages.
///
/// The first three are equal up to rounding; the last two square away the
/// distance radicals and introduce extra sign branches, so their zero sets
/// contain the curve rather than equal it pointwise.
#[derive(Debug, Clone, Copy)]
pub struct ResidualChain {
    /// `|D_0 + D_1 + D_2|^2 - W^2`, straight from the vectors.
    pub vector_form: f64,
    /// Same value via the three norms plus the pairwise dots.
    pub expanded_form: f64,
    /// Same value via `Q + 2 (P_01 + P_12 + P_20)`.
    pub scalar_form: f64,
    /// After isolating `Q + 2 P_12` and squaring once.
    pub once_squared: f64,
    /// After the second squaring; coincides with the quintic value at x.
    pub twice_squared: f64,
}

/// Evaluates the five-stage residual chain at x.
pub fn residual_chain(config: &ReceiverConfig, x: Vec2) -> ResidualChain {
    let [m0, m1, m2] = config.receivers();
    let s = side_vectors(config);
    let d = [x.dist(m0), x.dist(m1), x.dist(m2)];
    let dv = [s[0] * d[0], s[1] * d[1], s[2] * d[2]];
    let w2 = config.w() * config.w();

    let sum = dv[0] + dv[1] + dv[2];
    let vector_form = sum.norm_sq() - w2;

    let (p01, p12, p20) = (dv[0].dot(dv[1]), dv[1].dot(dv[2]), dv[2].dot(dv[0]));
    let norms = dv[0].norm_sq() + dv[1].norm_sq() + dv[2].norm_sq();
    let expanded_form = norms + 2.0 * (p01 + p12 + p20) - w2;

    let sc = derived_scalars(config, x);
    let (q, qp01, qp12, qp20) = (sc.q, sc.big_p[0], sc.big_p[1], sc.big_p[2]);
    let scalar_form = q + 2.0 * (qp01 + qp12 + qp20);

    let left = q * q - 4.0 * (qp01 * qp01 - qp12 * qp12 + qp20 * qp20);
    let once_squared = left - (-4.0 * q * qp12 + 8.0 * qp01 * qp20);
    let twice_squared = left * left
        - (16.0 * q * q * qp12 * qp12 - 64.0 * q * qp01 * qp12 * qp20
            + 64.0 * qp01 * qp01 * qp20 * qp20);

    ResidualChain {
        vector_form,
        expanded_form,
        scalar_form,
        once_squared,
        twice_squared,
    }
}

// ---- exact quintic ----

/// Sign bucket for a source position relative to the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRegion {
    /// Negative quintic: the measurement pair determines the source uniquely.
    UniqueRegion,
    /// Positive quintic: a second admissible source shares the measurement.
    AmbiguousRegion,
    /// Inside the scale-aware zero band.
    OnCurve,
}

/// Distance report: a first-order estimate, optionally sharpened by projection.
#[derive(Debug, Clone, Copy)]
pub struct CurveDistance {
    pub distance: f64,
    /// Projection foot on the curve when Newton refinement converged.
    pub foot: Option<Vec2>,
}

/// The exact degree-5 curve polynomial with cached evaluation machinery.
#[derive(Debug, Clone)]
pub struct QuinticCurve {
    config: ReceiverConfig,
    f: BivariatePoly,
    fx: BivariatePoly,
    fy: BivariatePoly,
    leading_form: BivariatePoly,
    w8: Rational,
    f_float: FloatPoly,
    fx_float: FloatPoly,
    fy_float: FloatPoly,
    w8_f: f64,
}

/// Squared distance to a fixed point, as a polynomial in (x, y).
fn dist_sq_poly(m: &RationalPoint) -> BivariatePoly {
    let dx = BivariatePoly::x().sub(&BivariatePoly::constant(m.x.clone()));
    let dy = BivariatePoly::y().sub(&BivariatePoly::constant(m.y.clone()));
    dx.mul(&dx).add(&dy.mul(&dy))
}

/// Builds the curve polynomial exactly from a receiver configuration.
///
/// Substituting `s_i = d_i(x)^2` keeps every intermediate a polynomial:
/// `Q = s_0 |s_0|^2 + ...`, `P_ij^2 = s_i s_j c_ij^2`, and the triple product
/// `P_01 P_12 P_20 = s_0 s_1 s_2 c_01 c_12 c_20`, where the `c_ij` are the
/// constant side dot products. The degree 6, 7, 8 components cancel exactly.
pub fn build_quintic(config: &ReceiverConfig) -> QuinticCurve {
    let [m0, m1, m2] = config.receivers_exact();
    let s0 = dist_sq_poly(m0);
    let s1 = dist_sq_poly(m1);
    let s2 = dist_sq_poly(m2);
    let (sq10, sq20, sq21) = config.squared_separations();
    let (c01, c12, c20) = config.side_dots();
    let w = config.w_exact();
    let w2 = w * w;

    // |s_0|^2 = |d12|^2 = sq21, |s_1|^2 = sq20, |s_2|^2 = sq10.
    let q = s0
        .scale(sq21)
        .add(&s1.scale(sq20))
        .add(&s2.scale(sq10))
        .sub(&BivariatePoly::constant(w2.clone()));
    let p01_sq = s0.mul(&s1).scale(&(c01 * c01));
    let p12_sq = s1.mul(&s2).scale(&(c12 * c12));
    let p20_sq = s2.mul(&s0).scale(&(c20 * c20));
    let triple = s0.mul(&s1).mul(&s2).scale(&(&(c01 * c12) * c20));

    let q2 = q.mul(&q);
    let pair_sum = p01_sq.add(&p12_sq).add(&p20_sq);
    let quartic_sum = p01_sq
        .mul(&p01_sq)
        .add(&p12_sq.mul(&p12_sq))
        .add(&p20_sq.mul(&p20_sq));
    let cross_sum = p01_sq
        .mul(&p12_sq)
        .add(&p12_sq.mul(&p20_sq))
        .add(&p20_sq.mul(&p01_sq));
    let f = q2
        .mul(&q2)
        .sub(&q2.mul(&pair_sum).scale(&int(8)))
        .add(&q.mul(&triple).scale(&int(64)))
        .add(&quartic_sum.scale(&int(16)))
        .sub(&cross_sum.scale(&int(32)));
    debug_assert_eq!(f.total_degree(), Some(5));

    let w4 = &w2 * &w2;
    let w8 = &w4 * &w4;
    let fx = f.partial_x();
    let fy = f.partial_y();
    QuinticCurve {
        config: config.clone(),
        f_float: FloatPoly::new(&f),
        fx_float: FloatPoly::new(&fx),
        fy_float: FloatPoly::new(&fy),
        leading_form: f.homogeneous_component(5),
        w8_f: rational_to_f64(&w8),
        w8,
        f,
        fx,
        fy,
    }
}

impl QuinticCurve {
    /// The configuration the curve was built from.
    pub fn config(&self) -> &ReceiverConfig {
        &self.config
    }

    /// Exact curve polynomial; negative on the unique-localization region.
    pub fn f(&self) -> &BivariatePoly {
        &self.f
    }

    /// Exact partial in x.
    pub fn fx(&self) -> &BivariatePoly {
        &self.fx
    }

    /// Exact partial in y.
    pub fn fy(&self) -> &BivariatePoly {
        &self.fy
    }

    /// Degree-5 homogeneous component.
    pub fn leading_form(&self) -> &BivariatePoly {
        &self.leading_form
    }

    /// Exact value at every receiver: `W^8`.
    pub fn w8(&self) -> &Rational {
        &self.w8
    }

    /// The polynomial rescaled to value 1 at the receivers.
    pub fn normalized(&self) -> BivariatePoly {
        self.f.scale(&self.w8.recip())
    }

    /// Exact evaluation.
    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        self.f.eval_exact(x, y)
    }

    /// Compensated float evaluation.
    pub fn eval(&self, p: Vec2) -> f64 {
        self.f_float.eval(p.x, p.y)
    }

    /// Float gradient.
    pub fn gradient(&self, p: Vec2) -> Vec2 {
        Vec2::new(self.fx_float.eval(p.x, p.y), self.fy_float.eval(p.x, p.y))
    }

    /// Reference product form of the degree-5 component:
    /// `-64 W |s_0|^2 |s_1|^2 |s_2|^2 (x^2 + y^2) L_0 L_1 L_2` with
    /// `L_i = star(s_i ^ (x, y))`.
    pub fn leading_form_reference(&self) -> BivariatePoly {
        let (sq10, sq20, sq21) = self.config.squared_separations();
        let circ = BivariatePoly::x()
            .mul(&BivariatePoly::x())
            .add(&BivariatePoly::y().mul(&BivariatePoly::y()));
        let mut prod = circ;
        for s in side_vectors_exact(&self.config) {
            // star(s ^ (x, y)) = s.x * y - s.y * x.
            let lin = BivariatePoly::y()
                .scale(&s.x)
                .sub(&BivariatePoly::x().scale(&s.y));
            prod = prod.mul(&lin);
        }
        let coef = &(&(&int(-64) * self.config.w_exact()) * &(sq21 * sq20)) * sq10;
        prod.scale(&coef)
    }

    /// Exact equality of the top component with its closed product form.
    pub fn verify_leading_form(&self) -> bool {
        self.leading_form == self.leading_form_reference()
    }

    /// Scale-aware zero band at p, `1e-9 * W^8 * (1 + |p|^5)`.
    fn zero_band(&self, p: Vec2) -> f64 {
        ON_CURVE_BAND * self.w8_f.abs() * (1.0 + p.norm().powi(5))
    }

    /// Sign classification with an on-curve band.
    pub fn classify(&self, p: Vec2) -> PointRegion {
        let v = self.eval(p);
        if v.abs() <= self.zero_band(p) {
            PointRegion::OnCurve
        } else if v < 0.0 {
            PointRegion::UniqueRegion
        } else {
            PointRegion::AmbiguousRegion
        }
    }

    /// First-order distance estimate `|F| / |grad F|`.
    ///
    /// Errors when the gradient norm falls under the scale gate (critical
    /// points of F, which lie off the real curve).
    pub fn sampson_distance(&self, p: Vec2) -> Result<f64, Error> {
        let g = self.gradient(p).norm();
        // The gradient has degree-4 growth; gate it in the same units.
        let gate = GRADIENT_GATE * self.w8_f.abs() * (1.0 + p.norm_sq() * p.norm_sq());
        if g < gate {
            return Err(Error::GradientVanishes);
        }
        Ok(self.eval(p).abs() / g)
    }

    /// Distance to the zero set, optionally refined by Newton projection
    /// along the gradient. Refinement reports the foot point on success and
    /// falls back to the first-order estimate when it stalls.
    pub fn distance_to_curve(&self, p: Vec2, refine: bool) -> Result<CurveDistance, Error> {
        let sampson = self.sampson_distance(p)?;
        if !refine {
            return Ok(CurveDistance {
                distance: sampson,
                foot: None,
            });
        }
        let mut foot = p;
        for _ in 0..100 {
            let v = self.eval(foot);
            if v.abs() <= 0.1 * self.zero_band(foot) {
                return Ok(CurveDistance {
                    distance: p.dist(foot),
                    foot: Some(foot),
                });
            }
            let g = self.gradient(foot);
            let g2 = g.norm_sq();
            let gate = GRADIENT_GATE * self.w8_f.abs() * (1.0 + foot.norm_sq() * foot.norm_sq());
            if g2.sqrt() < gate {
                return Err(Error::GradientVanishes);
            }
            foot = foot - g * (v / g2);
        }
        Ok(CurveDistance {
            distance: sampson,
            foot: None,
        })
    }
}

/// Convenience wrapper: builds the quintic and classifies one point.
pub fn classify_point(config: &ReceiverConfig, x: Vec2) -> PointRegion {
    build_quintic(config).classify(x)
}

/// Convenience wrapper: builds the quintic and checks its top component.
pub fn verify_leading_form(config: &ReceiverConfig) -> bool {
    build_quintic(config).verify_leading_form()
}

// ---- asymptotes and ideal points ----

/// Line `a x + b y + c = 0` with exact coefficients and float mirrors.
#[derive(Debug, Clone)]
pub struct AffineLine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    exact: (Rational, Rational, Rational),
}

impl AffineLine {
    fn from_exact(a: Rational, b: Rational, c: Rational) -> Self {
        Self {
            a: rational_to_f64(&a),
            b: rational_to_f64(&b),
            c: rational_to_f64(&c),
            exact: (a, b, c),
        }
    }

    /// Exact coefficient triple.
    pub fn exact(&self) -> (&Rational, &Rational, &Rational) {
        (&self.exact.0, &self.exact.1, &self.exact.2)
    }

    /// The defining polynomial `a x + b y + c`.
    pub fn to_poly(&self) -> BivariatePoly {
        BivariatePoly::x()
            .scale(&self.exact.0)
            .add(&BivariatePoly::y().scale(&self.exact.1))
            .add(&BivariatePoly::constant(self.exact.2.clone()))
    }

    /// Signed value at a point.
    pub fn eval(&self, p: Vec2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    /// A direction vector along the line.
    pub fn direction(&self) -> Vec2 {
        Vec2::new(-self.b, self.a)
    }

    /// Intersection with another line, when not parallel.
    pub fn intersect(&self, other: &Self) -> Option<Vec2> {
        let det = self.a * other.b - self.b * other.a;
        if det == 0.0 {
            return None;
        }
        Some(Vec2::new(
            (self.b * other.c - self.c * other.b) / det,
            (self.c * other.a - self.a * other.c) / det,
        ))
    }
}

/// The three real asymptotic lines, indexed like the receivers.
///
/// Line i is `4 star(s_i ^ (x - m_i)) - 3W = 0`; its direction is the side
/// s_i opposite receiver i. The three left-hand sides sum exactly to the
/// constant -W, so the lines can share no common point.
pub fn asymptotes(config: &ReceiverConfig) -> [AffineLine; 3] {
    let sides = side_vectors_exact(config);
    let m = config.receivers_exact();
    let three_w = &int(3) * config.w_exact();
    let four = int(4);
    std::array::from_fn(|i| {
        let s = &sides[i];
        // 4 (s.x (y - m.y) - s.y (x - m.x)) - 3W.
        let a = &int(-4) * &s.y;
        let b = &four * &s.x;
        let c = &(&four * &(&(&s.y * &m[i].x) - &(&s.x * &m[i].y))) - &three_w;
        AffineLine::from_exact(a, b, c)
    })
}

/// Exact sum of the three asymptote polynomials; the constant -W.
pub fn asymptote_sum(config: &ReceiverConfig) -> BivariatePoly {
    let [l0, l1, l2] = asymptotes(config);
    l0.to_poly().add(&l1.to_poly()).add(&l2.to_poly())
}

/// A direction where the projective closure of the curve meets infinity.
#[derive(Debug, Clone, Copy)]
pub struct IdealPoint {
    /// Homogeneous coordinates [x : y : 0], largest-magnitude one scaled to 1.
    pub x: Complex64,
    pub y: Complex64,
    pub is_real: bool,
}

/// The five ideal points of the curve: the three real side directions plus
/// the circular pair `[1 : +/-i : 0]`; all are roots of the leading form.
pub fn ideal_points(config: &ReceiverConfig) -> [IdealPoint; 5] {
    let sides = side_vectors(config);
    let real = |v: Vec2| {
        let s = if v.x.abs() >= v.y.abs() { v.x } else { v.y };
        IdealPoint {
            x: Complex64::new(v.x / s, 0.0),
            y: Complex64::new(v.y / s, 0.0),
            is_real: true,
        }
    };
    let circular = |sign: f64| IdealPoint {
        x: Complex64::new(1.0, 0.0),
        y: Complex64::new(0.0, sign),
        is_real: false,
    };
    [
        real(sides[0]),
        real(sides[1]),
        real(sides[2]),
        circular(1.0),
        circular(-1.0),
    ]
}

// ---- exact plane identity ----

/// Exact residual of `star(s_0 ^ (x-m0)) + star(s_1 ^ (x-m1)) +
/// star(s_2 ^ (x-m2)) = 2W`; identically zero for every x.
pub fn area_identity_residual_exact(config: &ReceiverConfig, x: &RationalPoint) -> Rational {
    let sides = side_vectors_exact(config);
    let m = config.receivers_exact();
    let mut acc = &int(-2) * config.w_exact();
    for i in 0..3 {
        let r = x.sub(&m[i]);
        acc += &(&sides[i].x * &r.y) - &(&sides[i].y * &r.x);
    }
    acc
}

/// Float version of the same residual.
pub fn area_identity_residual(config: &ReceiverConfig, x: Vec2) -> f64 {
    let sides = side_vectors(config);
    let m = config.receivers();
    let mut acc = -2.0 * config.w();
    for i in 0..3 {
        acc += wedge_star(sides[i], x - m[i]);
    }
    acc
}

// ---- curve sampling ----

/// One sampled curve point with the ellipse angle that produced it.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub theta: f64,
    pub point: Vec2,
}

/// A maximal run of angle-contiguous samples on one branch.
#[derive(Debug, Clone, Default)]
pub struct CurveArc {
    pub samples: Vec<CurveSample>,
}

/// Traces the curve by sweeping the inscribed ellipse.
///
/// The ellipse is parametrized by angle as `tau(theta) = (W / |sin(theta) d10
/// - cos(theta) d20|) (cos theta, sin theta)`; each measurement pair on it has
/// at most one finite preimage, recovered with the closed-form localizer. Only
/// the three ellipse arcs bounded by the six facet-tangency directions carry a
/// preimage; sweeping across a tangency direction the preimage escapes to
/// infinity and the localizer comes back empty, which breaks the sweep into
/// runs. Tangency directions are also computed exactly and used as structural
/// cut points, so a run can never silently bridge two branches. The result is
/// the curve's three unbounded branches.
pub fn sample_curve(curve: &QuinticCurve, n: usize) -> Vec<CurveArc> {
    let config = curve.config();
    let w = config.w().abs();
    let (d10, d20) = (config.d10(), config.d20());
    let radius_cap = SAMPLE_RADIUS_CAP * (1.0 + config.scale());
    let mut emitted: Vec<Option<CurveSample>> = Vec::with_capacity(n);
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (sin, cos) = theta.sin_cos();
        let den = (d10 * sin - d20 * cos).norm();
        let r = w / den;
        let tau = TdoaPair::new(r * cos, r * sin);
        let sample = localize(config, tau)
            .solutions
            .first()
            .map(|s| s.position)
            .filter(|&x| x.norm() <= radius_cap && sample_passes(curve, x))
            .map(|point| CurveSample { theta, point });
        emitted.push(sample);
    }
    let cut_after = tangency_cuts(config, n);

    let mut runs: Vec<Vec<CurveSample>> = Vec::new();
    let mut current: Vec<CurveSample> = Vec::new();
    for k in 0..n {
        match emitted[k] {
            Some(s) => current.push(s),
            None => flush(&mut runs, &mut current),
        }
        if cut_after[k] {
            flush(&mut runs, &mut current);
        }
    }
    flush(&mut runs, &mut current);

    // Join across theta = 0 when the circle closes there without a cut.
    let wraps = runs.len() > 1
        && emitted[0].is_some()
        && emitted[n - 1].is_some()
        && !cut_after[n - 1];
    if wraps {
        let last = runs.pop().unwrap();
        let first = std::mem::take(&mut runs[0]);
        runs[0] = [last, first].concat();
    }
    runs.into_iter().map(|samples| CurveArc { samples }).collect()
}

/// Both on-curve residual checks for an emitted sample.
fn sample_passes(curve: &QuinticCurve, x: Vec2) -> bool {
    let sampson_ok = matches!(curve.sampson_distance(x), Ok(s) if s < SAMPLE_SAMPSON_MAX);
    sampson_ok && residual_chain(curve.config(), x).vector_form.abs() < SAMPLE_RESIDUAL_MAX
}

fn flush(runs: &mut Vec<Vec<CurveSample>>, current: &mut Vec<CurveSample>) {
    if !current.is_empty() {
        runs.push(std::mem::take(current));
    }
}

/// Marks the sweep steps whose half-open angle interval `(theta_k, theta_k+1]`
/// contains a facet-tangency direction; the sweep must not connect across it.
fn tangency_cuts(config: &ReceiverConfig, n: usize) -> Vec<bool> {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut cut = vec![false; n];
    for t in tangency_points(config) {
        let mut angle = t.tau2.atan2(t.tau1);
        if angle < 0.0 {
            angle += 2.0 * std::f64::consts::PI;
        }
        cut[(angle / step).floor() as usize % n] = true;
    }
    cut
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_config;
    use crate::rational::ratio;
    use num_traits::Zero;

    fn config1() -> ReceiverConfig {
        ReceiverConfig::from_f64([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0]]).unwrap()
    }

    fn config2() -> ReceiverConfig {
        ReceiverConfig::from_f64([[0.0, 0.0], [2.0, 0.0], [-2.0, 2.0]]).unwrap()
    }

    fn rational_config() -> ReceiverConfig {
        make_config(
            RationalPoint::new(int(0), int(0)),
            RationalPoint::new(ratio(1, 3), int(0)),
            RationalPoint::new(ratio(1, 7), ratio(2, 5)),
        )
        .unwrap()
    }

    fn poly(terms: &[(u32, u32, i64)]) -> BivariatePoly {
        let mut p = BivariatePoly::zero();
        for &(i, j, c) in terms {
            p = p.add(&BivariatePoly::monomial(i, j, int(c)));
        }
        p
    }

    #[test]
    fn test_derived_scalars_at_circumcenter() {
        let c = config1();
        let s = derived_scalars(&c, Vec2::new(1.0, 1.0));
        let r2 = 2.0f64.sqrt();
        for (got, want) in s.d.iter().zip([r2, r2, r2]) {
            assert!((got - want).abs() < 1e-15);
        }
        for (got, want) in s.big_d.iter().zip([2.0 * r2, 4.0, 2.0 * r2]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(s.p_dot, [-4.0, -4.0, 0.0]);
        assert_eq!(s.w, 4.0);
    }

    #[test]
    fn test_q_at_reference_receiver() {
        let c = config1();
        let s = derived_scalars(&c, Vec2::new(0.0, 0.0));
        assert!((s.q - 48.0).abs() < 1e-12);
        // Linear forms survive at the receiver thanks to cancellation.
        assert_eq!(s.p_lin, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn test_pair_dot_quotient() {
        let c = config1();
        let s = derived_scalars(&c, Vec2::new(0.7, -0.3));
        for k in 0..3 {
            let q = s.pair_dot_quotient(k).unwrap();
            assert!((q - s.p_dot[k]).abs() <= 1e-9 * (1.0 + s.p_dot[k].abs()));
            // The quotient times the distances reproduces the pair dot.
            let (i, j) = [(0, 1), (1, 2), (2, 0)][k];
            assert!((q * s.d[i] * s.d[j] - s.big_p[k]).abs() <= 1e-9 * (1.0 + s.big_p[k].abs()));
        }
        let at0 = derived_scalars(&c, Vec2::new(0.0, 0.0));
        assert!(matches!(at0.pair_dot_quotient(0), Err(Error::AtReceiver(0))));
        assert!(matches!(at0.pair_dot_quotient(1), Ok(_)));
        assert!(matches!(at0.pair_dot_quotient(2), Err(Error::AtReceiver(0))));
    }

    #[test]
    fn test_quintic_known_coefficients_config1() {
        let curve = build_quintic(&config1());
        let expected = poly(&[
            (4, 1, -4),
            (3, 2, 4),
            (2, 3, -4),
            (1, 4, 4),
            (4, 0, 2),
            (3, 1, 20),
            (2, 2, -16),
            (1, 3, 4),
            (0, 4, -6),
            (3, 0, -10),
            (2, 1, -38),
            (1, 2, 30),
            (0, 3, 2),
            (2, 0, 18),
            (1, 1, 28),
            (0, 2, -22),
            (1, 0, -12),
            (0, 1, -4),
            (0, 0, 1),
        ]);
        assert_eq!(curve.w8(), &int(65536));
        assert_eq!(curve.normalized(), expected);
        assert_eq!(curve.f(), &expected.scale(&int(65536)));
    }

    #[test]
    fn test_quintic_known_coefficients_config2() {
        let curve = build_quintic(&config2());
        let expected = poly(&[
            (4, 1, -20),
            (3, 2, -60),
            (2, 3, -60),
            (1, 4, -60),
            (0, 5, -40),
            (4, 0, 10),
            (3, 1, 68),
            (2, 2, 80),
            (1, 3, 84),
            (0, 4, 82),
            (3, 0, -34),
            (2, 1, -58),
            (1, 2, -10),
            (0, 3, -50),
            (2, 0, 30),
            (1, 1, 4),
            (0, 2, 22),
            (1, 0, -4),
            (0, 1, -4),
            (0, 0, 1),
        ]);
        assert_eq!(curve.normalized(), expected);
    }

    #[test]
    fn test_degree_certificate_and_receiver_values() {
        for c in [config1(), config2(), rational_config()] {
            let curve = build_quintic(&c);
            assert_eq!(curve.f().total_degree(), Some(5));
            for k in 6..=8 {
                assert!(curve.f().homogeneous_component(k).is_zero());
            }
            assert!(!curve.leading_form().is_zero());
            for m in c.receivers_exact() {
                assert_eq!(&curve.eval_exact(&m.x, &m.y), curve.w8());
            }
        }
    }

    #[test]
    fn test_permutation_invariance() {
        let base = config1();
        let pts = base.receivers_exact().clone();
        let reference = build_quintic(&base).f().clone();
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let c = make_config(
                pts[perm[0]].clone(),
                pts[perm[1]].clone(),
                pts[perm[2]].clone(),
            )
            .unwrap();
            assert_eq!(build_quintic(&c).f(), &reference);
        }
    }

    #[test]
    fn test_leading_form_identity() {
        for c in [config1(), config2(), rational_config()] {
            assert!(build_quintic(&c).verify_leading_form());
        }
        // -262144 * x*y*(x - y)*(x^2 + y^2), expanded.
        let expected = poly(&[
            (4, 1, -262144),
            (3, 2, 262144),
            (2, 3, -262144),
            (1, 4, 262144),
        ]);
        assert_eq!(build_quintic(&config1()).leading_form(), &expected);
    }

    #[test]
    fn test_residual_chain_at_reference_receiver() {
        let c = config1();
        let r = residual_chain(&c, Vec2::new(0.0, 0.0));
        // The pre-squaring forms all equal 48 - 32*sqrt(2) here.
        let want = 48.0 - 32.0 * 2.0f64.sqrt();
        assert!((r.vector_form - want).abs() < 1e-10);
        assert!((r.expanded_form - want).abs() < 1e-10);
        assert!((r.scalar_form - want).abs() < 1e-10);
        assert!((r.twice_squared - 65536.0).abs() < 1e-6);
    }

    #[test]
    fn test_residual_chain_matches_exact_evaluation() {
        let c = config1();
        let curve = build_quintic(&c);
        for k in 0..200u32 {
            let x = Vec2::new(
                -3.0 + 6.0 * ((k as f64 * 0.754877666) % 1.0),
                -3.0 + 6.0 * ((k as f64 * 0.569840291) % 1.0),
            );
            let r = residual_chain(&c, x);
            let exact = curve.eval_exact(
                &crate::rational::rational_from_f64(x.x).unwrap(),
                &crate::rational::rational_from_f64(x.y).unwrap(),
            );
            let exact_f = rational_to_f64(&exact);
            let rel = (r.twice_squared - exact_f).abs() / (1.0 + exact_f.abs());
            assert!(rel < 1e-9, "chain vs exact at {x:?}: {rel}");
            // The three pre-squaring stages agree with each other.
            assert!((r.vector_form - r.expanded_form).abs() < 1e-9 * (1.0 + r.vector_form.abs()));
            assert!((r.vector_form - r.scalar_form).abs() < 1e-9 * (1.0 + r.vector_form.abs()));
        }
    }

    #[test]
    fn test_asymptotes_known_lines() {
        let [l0, l1, l2] = asymptotes(&config1());
        assert_eq!(l0.exact(), (&int(8), &int(0), &int(-12)));
        assert_eq!(l1.exact(), (&int(-8), &int(8), &int(4)));
        assert_eq!(l2.exact(), (&int(0), &int(-8), &int(4)));
        let [l0, l1, l2] = asymptotes(&config2());
        assert_eq!(l0.exact(), (&int(8), &int(16), &int(-12)));
        assert_eq!(l1.exact(), (&int(-8), &int(-8), &int(4)));
        assert_eq!(l2.exact(), (&int(0), &int(-8), &int(4)));
    }

    #[test]
    fn test_asymptote_sum_is_minus_w() {
        for c in [config1(), config2(), rational_config()] {
            let want = BivariatePoly::constant(-c.w_exact().clone());
            assert_eq!(asymptote_sum(&c), want);
        }
        // Pairwise intersections exist, but no common point survives all three.
        let [l0, l1, l2] = asymptotes(&config1());
        let p01 = l0.intersect(&l1).unwrap();
        assert!(l2.eval(p01).abs() > 1e-9);
    }

    #[test]
    fn test_asymptotes_touch_curve_at_infinity() {
        for (c, want_degrees) in [(config1(), [3, 2, 3]), (config2(), [3, 3, 3])] {
            let curve = build_quintic(&c);
            for (line, want_deg) in asymptotes(&c).iter().zip(want_degrees) {
                let (a, b, cc) = line.exact();
                let (px, py) = if !b.is_zero() {
                    (int(0), -(cc / b))
                } else {
                    (-(cc / a), int(0))
                };
                let restricted = curve.f().restrict_to_line(&px, &py, &-b.clone(), &a.clone());
                // Tangency at the ideal point kills the two top coefficients.
                let deg = restricted.degree().unwrap();
                assert_eq!(deg, want_deg);
                if deg == 3 {
                    // A cubic restriction meets the affine curve 1 or 3 times.
                    assert_eq!(restricted.count_real_roots() % 2, 1);
                }
            }
        }
    }

    #[test]
    fn test_ideal_points_canonical_and_on_leading_form() {
        let c = config1();
        let pts = ideal_points(&c);
        let coords: Vec<(f64, f64, f64, f64)> =
            pts.iter().map(|p| (p.x.re, p.x.im, p.y.re, p.y.im)).collect();
        assert_eq!(coords[0], (0.0, 0.0, 1.0, 0.0));
        assert_eq!(coords[1], (1.0, 0.0, 1.0, 0.0));
        assert_eq!(coords[2], (1.0, 0.0, 0.0, 0.0));
        assert_eq!(coords[3], (1.0, 0.0, 0.0, 1.0));
        assert_eq!(coords[4], (1.0, 0.0, 0.0, -1.0));
        assert_eq!(pts.iter().filter(|p| p.is_real).count(), 3);

        for cfg in [config1(), config2(), rational_config()] {
            let curve = build_quintic(&cfg);
            let lead = curve.leading_form();
            // Real directions: exact evaluation of the form vanishes.
            for pair in [(1usize, 2usize), (2, 0), (0, 1)] {
                let s = cfg.side_exact(pair);
                assert!(lead.eval_exact(&s.x, &s.y).is_zero());
            }
            // Circular pair (1, +/-i): split the form's value into real and
            // imaginary rational sums over the powers of i.
            let mut re = Rational::zero();
            let mut im = Rational::zero();
            for ((_, j), coeff) in lead.terms() {
                match j % 4 {
                    0 => re += coeff,
                    1 => im += coeff,
                    2 => re -= coeff,
                    _ => im -= coeff,
                }
            }
            assert!(re.is_zero() && im.is_zero());
        }
    }

    #[test]
    fn test_area_identity() {
        for c in [config1(), config2(), rational_config()] {
            for (px, py) in [(int(0), int(0)), (int(1), int(3)), (ratio(-7, 3), ratio(22, 5))] {
                let x = RationalPoint::new(px, py);
                assert!(area_identity_residual_exact(&c, &x).is_zero());
            }
        }
        assert!(area_identity_residual(&config1(), Vec2::new(0.37, -1.82)).abs() < 1e-12);
    }

    #[test]
    fn test_classify_points() {
        let curve = build_quintic(&config1());
        assert_eq!(curve.classify(Vec2::new(1.0, 1.0)), PointRegion::UniqueRegion);
        for m in curve.config().receivers() {
            assert_eq!(curve.classify(m), PointRegion::AmbiguousRegion);
        }
        assert_eq!(classify_point(&config1(), Vec2::new(1.0, 1.0)), PointRegion::UniqueRegion);
    }

    #[test]
    fn test_distance_estimate_and_projection() {
        let curve = build_quintic(&config1());
        let at_m0 = curve.distance_to_curve(Vec2::new(0.0, 0.0), true).unwrap();
        assert!(at_m0.distance > 0.0 && at_m0.distance < 1.0);
        let foot = at_m0.foot.unwrap();
        assert_eq!(curve.classify(foot), PointRegion::OnCurve);

        // Stepping 1e-3 along the unit normal from a curve point lands at
        // distance 1e-3 up to curvature.
        let arcs = sample_curve(&curve, 360);
        let p0 = arcs[0].samples[arcs[0].samples.len() / 2].point;
        let g = curve.gradient(p0);
        let x = p0 + g * (1e-3 / g.norm());
        let d = curve.distance_to_curve(x, true).unwrap();
        assert!(
            d.distance > 0.9e-3 && d.distance < 1.1e-3,
            "offset distance {}",
            d.distance
        );
    }

    #[test]
    fn test_sample_curve_three_arcs() {
        let curve = build_quintic(&config1());
        let arcs = sample_curve(&curve, 360);
        assert_eq!(arcs.len(), 3);
        for arc in &arcs {
            assert!(arc.samples.len() > 15);
            for s in &arc.samples {
                assert!(curve.sampson_distance(s.point).unwrap() < 1e-6);
                assert!(residual_chain(curve.config(), s.point).vector_form.abs() < 1e-6);
                assert_eq!(curve.classify(s.point), PointRegion::OnCurve);
            }
        }
    }
}
