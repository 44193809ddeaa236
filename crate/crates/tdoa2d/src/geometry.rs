//! Plane primitives and validated receiver configurations.
//!
//! Receiver coordinates are exact rationals so collinearity is decidable and
//! the derived constants propagate exactly into the curve polynomial. Float
//! mirrors of everything are precomputed for the numeric solvers.
//!
//! Index convention: `d_ji = m_j - m_i`, so the triangle sides satisfy
//! `d01 + d12 + d20 = 0`.

use num_traits::Zero;

use crate::error::Error;
use crate::rational::{rational_from_f64, rational_to_f64, Rational};

// ---- float vectors ----

/// Plane vector or point with f64 components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Dot product.
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm.
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Distance to another point.
    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// Oriented area `u1*v2 - u2*v1` of the pair (u, v).
pub fn wedge_star(u: Vec2, v: Vec2) -> f64 {
    u.x * v.y - u.y * v.x
}

// ---- exact vectors ----

/// Plane vector or point with exact rational components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RationalPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    /// Exact conversion from a float point.
    pub fn from_vec2(v: Vec2) -> Result<Self, Error> {
        Ok(Self::new(rational_from_f64(v.x)?, rational_from_f64(v.y)?))
    }

    /// Nearest-float projection.
    pub fn to_vec2(&self) -> Vec2 {
        Vec2::new(rational_to_f64(&self.x), rational_to_f64(&self.y))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn dot(&self, o: &Self) -> Rational {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }
}

/// Exact oriented area of the pair (u, v).
pub fn wedge_star_exact(u: &RationalPoint, v: &RationalPoint) -> Rational {
    &u.x * &v.y - &u.y * &v.x
}

// ---- receiver configuration ----

/// Three non-collinear receivers with every derived constant precomputed,
/// exactly and in float.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct ReceiverConfig {
    exact: [RationalPoint; 3],
    m: [Vec2; 3],
    // Exact derived constants.
    w: Rational,
    sq10: Rational,
    sq20: Rational,
    sq21: Rational,
    c01: Rational,
    c12: Rational,
    c20: Rational,
    // Float mirrors.
    w_f: f64,
    d10: Vec2,
    d20: Vec2,
    d21: Vec2,
    len10: f64,
    len20: f64,
    len21: f64,
}

impl ReceiverConfig {
    /// Validates and precomputes; rejects exactly collinear receivers.
    pub fn new(receivers: [RationalPoint; 3]) -> Result<Self, Error> {
        let [m0, m1, m2] = &receivers;
        let d10 = m1.sub(m0);
        let d20 = m2.sub(m0);
        let d21 = m2.sub(m1);
        let w = wedge_star_exact(&d10, &d20);
        if w.is_zero() {
            return Err(Error::CollinearReceivers);
        }
        // Opposite-side dot constants: c_ij pairs the two sides other than (i, j).
        let d01 = m0.sub(m1);
        let d12 = m1.sub(m2);
        let c01 = d12.dot(&d20);
        let c12 = d20.dot(&d01);
        let c20 = d01.dot(&d12);
        let m = [m0.to_vec2(), m1.to_vec2(), m2.to_vec2()];
        let d10f = m[1] - m[0];
        let d20f = m[2] - m[0];
        let d21f = m[2] - m[1];
        Ok(Self {
            w_f: rational_to_f64(&w),
            w,
            sq10: d10.norm_sq(),
            sq20: d20.norm_sq(),
            sq21: d21.norm_sq(),
            c01,
            c12,
            c20,
            exact: receivers,
            m,
            d10: d10f,
            d20: d20f,
            d21: d21f,
            len10: d10f.norm(),
            len20: d20f.norm(),
            len21: d21f.norm(),
        })
    }

    /// Builds from float coordinates (converted exactly).
    pub fn from_f64(points: [[f64; 2]; 3]) -> Result<Self, Error> {
        let p = |i: usize| RationalPoint::from_vec2(Vec2::new(points[i][0], points[i][1]));
        Self::new([p(0)?, p(1)?, p(2)?])
    }

    /// Float receiver positions.
    pub fn receivers(&self) -> [Vec2; 3] {
        self.m
    }

    /// Exact receiver positions.
    pub fn receivers_exact(&self) -> &[RationalPoint; 3] {
        &self.exact
    }

    /// Exact oriented area `W = wedge_star(d10, d20)`; nonzero by construction.
    pub fn w_exact(&self) -> &Rational {
        &self.w
    }

    /// Float `W`.
    pub fn w(&self) -> f64 {
        self.w_f
    }

    /// Exact squared receiver separations `(d10^2, d20^2, d21^2)`.
    pub fn squared_separations(&self) -> (&Rational, &Rational, &Rational) {
        (&self.sq10, &self.sq20, &self.sq21)
    }

    /// Exact opposite-side dot constants `(c01, c12, c20)`.
    pub fn side_dots(&self) -> (&Rational, &Rational, &Rational) {
        (&self.c01, &self.c12, &self.c20)
    }

    /// Exact side vector `d_ij = m_i - m_j` for the cyclic pairs 01, 12, 20.
    pub fn side_exact(&self, pair: (usize, usize)) -> RationalPoint {
        self.exact[pair.0].sub(&self.exact[pair.1])
    }

    /// Float displacement `m1 - m0`.
    pub fn d10(&self) -> Vec2 {
        self.d10
    }

    /// Float displacement `m2 - m0`.
    pub fn d20(&self) -> Vec2 {
        self.d20
    }

    /// Float displacement `m2 - m1`.
    pub fn d21(&self) -> Vec2 {
        self.d21
    }

    /// Float receiver separations `(|d10|, |d20|, |d21|)`.
    pub fn separations(&self) -> (f64, f64, f64) {
        (self.len10, self.len20, self.len21)
    }

    /// Characteristic length used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.len10.max(self.len20).max(self.len21)
    }

    /// Receiver centroid.
    pub fn centroid(&self) -> Vec2 {
        (self.m[0] + self.m[1] + self.m[2]) * (1.0 / 3.0)
    }
}

/// Constructs a validated configuration from three exact points.
pub fn make_config(
    m0: RationalPoint,
    m1: RationalPoint,
    m2: RationalPoint,
) -> Result<ReceiverConfig, Error> {
    ReceiverConfig::new([m0, m1, m2])
}
