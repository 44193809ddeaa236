//! Sparse exact polynomials: bivariate arithmetic, float evaluation caches,
//! line restriction, and univariate real-root counting.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{format_rational, parse_rational, rational_to_f64, Rational};

// ---- bivariate ----

/// Sparse bivariate polynomial with exact rational coefficients.
///
/// Keys are `(i, j)` for the monomial `x^i * y^j`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

/// One serialized monomial: coefficient `c` (exact rational string) times `x^i * y^j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRecord {
    pub i: u32,
    pub j: u32,
    pub c: String,
}

impl BivariatePoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    /// The monomial `c * x^i * y^j`.
    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    /// The coordinate polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    /// The coordinate polynomial `y`.
    pub fn y() -> Self {
        Self::monomial(0, 1, Rational::one())
    }

    /// True iff no terms are stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored monomials.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms in `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rational)> + '_ {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    /// Coefficient of `x^i * y^j` (zero when absent).
    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, key: (u32, u32), c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Sum of two polynomials.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }

    /// Difference of two polynomials.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, &(-c.clone()));
        }
        out
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((i1, j1), c1) in self.terms() {
            for ((i2, j2), c2) in other.terms() {
                out.add_term((i1 + i2, j1 + j2), &(c1 * c2));
            }
        }
        out
    }

    /// Scales every coefficient by `c`.
    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(Rational::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Largest total degree among stored terms, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Sum of the terms with total degree exactly `k`.
    pub fn homogeneous_component(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j == k)
            .map(|(&k2, c)| (k2, c.clone()))
            .collect();
        Self { terms }
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        let (mi, mj) = self.max_exponents();
        let px = power_table(x, mi);
        let py = power_table(y, mj);
        let mut acc = Rational::zero();
        for ((i, j), c) in self.terms() {
            acc += c * &px[i as usize] * &py[j as usize];
        }
        acc
    }

    /// Partial derivative in `x`.
    pub fn partial_x(&self) -> Self {
        let mut out = Self::zero();
        for ((i, j), c) in self.terms() {
            if i > 0 {
                out.add_term((i - 1, j), &(c * Rational::from_integer(i.into())));
            }
        }
        out
    }

    /// Partial derivative in `y`.
    pub fn partial_y(&self) -> Self {
        let mut out = Self::zero();
        for ((i, j), c) in self.terms() {
            if j > 0 {
                out.add_term((i, j - 1), &(c * Rational::from_integer(j.into())));
            }
        }
        out
    }

    /// Restriction to the parametric line `(px + t*dx, py + t*dy)` as a polynomial in `t`.
    pub fn restrict_to_line(
        &self,
        px: &Rational,
        py: &Rational,
        dx: &Rational,
        dy: &Rational,
    ) -> UnivariatePoly {
        let (mi, mj) = self.max_exponents();
        let lx = UnivariatePoly::new(vec![px.clone(), dx.clone()]);
        let ly = UnivariatePoly::new(vec![py.clone(), dy.clone()]);
        let powx = uni_power_table(&lx, mi);
        let powy = uni_power_table(&ly, mj);
        let mut acc = UnivariatePoly::zero();
        for ((i, j), c) in self.terms() {
            let prod = powx[i as usize].mul(&powy[j as usize]).scale(c);
            acc = acc.add(&prod);
        }
        acc
    }

    /// Serializes to an ordered term list with exact coefficient strings.
    pub fn to_terms(&self) -> Vec<TermRecord> {
        self.terms()
            .map(|((i, j), c)| TermRecord {
                i,
                j,
                c: format_rational(c),
            })
            .collect()
    }

    /// Rebuilds from a term list; duplicate monomials accumulate.
    pub fn from_terms(records: &[TermRecord]) -> Result<Self, Error> {
        let mut out = Self::zero();
        for r in records {
            out.add_term((r.i, r.j), &parse_rational(&r.c)?);
        }
        Ok(out)
    }

    fn max_exponents(&self) -> (u32, u32) {
        let mi = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let mj = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        (mi, mj)
    }
}

fn power_table(v: &Rational, n: u32) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Rational::one());
    for k in 1..=n as usize {
        let next = &out[k - 1] * v;
        out.push(next);
    }
    out
}

fn uni_power_table(p: &UnivariatePoly, n: u32) -> Vec<UnivariatePoly> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(UnivariatePoly::one());
    for k in 1..=n as usize {
        let next = out[k - 1].mul(p);
        out.push(next);
    }
    out
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Total degree descending, then x-exponent descending.
        let mut keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        for (n, &(i, j)) in keys.iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let mag = c.abs();
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && (i, j) != (0, 0);
            if !unit_coeff {
                write!(f, "{}", format_rational(&mag))?;
            }
            let mut star = !unit_coeff;
            for (sym, e) in [("x", i), ("y", j)] {
                if e == 0 {
                    continue;
                }
                if star {
                    write!(f, "*")?;
                }
                star = true;
                write!(f, "{sym}")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

// ---- float evaluation cache ----

/// Float-coefficient snapshot of a `BivariatePoly` for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct FloatPoly {
    terms: Vec<(u32, u32, f64)>,
    max_i: u32,
    max_j: u32,
}

impl FloatPoly {
    /// Rounds each exact coefficient to the nearest f64 once.
    pub fn new(p: &BivariatePoly) -> Self {
        let (max_i, max_j) = p.max_exponents();
        let terms = p
            .terms()
            .map(|((i, j), c)| (i, j, rational_to_f64(c)))
            .collect();
        Self { terms, max_i, max_j }
    }

    /// Evaluates with compensated (Neumaier) summation to tame cancellation.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let px = float_powers(x, self.max_i);
        let py = float_powers(y, self.max_j);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &(i, j, c) in &self.terms {
            let t = c * px[i as usize] * py[j as usize];
            let s = sum + t;
            if sum.abs() >= t.abs() {
                comp += (sum - s) + t;
            } else {
                comp += (t - s) + sum;
            }
            sum = s;
        }
        sum + comp
    }
}

fn float_powers(v: f64, n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(1.0);
    for k in 1..=n as usize {
        out.push(out[k - 1] * v);
    }
    out
}

// ---- univariate ----

/// Dense exact univariate polynomial, coefficients ascending in degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnivariatePoly {
    coeffs: Vec<Rational>,
}

impl UnivariatePoly {
    /// Builds from ascending coefficients, trimming trailing zeros.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant one.
    pub fn one() -> Self {
        Self::new(vec![Rational::one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    /// True iff identically zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Ascending coefficient slice.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Leading coefficient, `None` for zero.
    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(Rational::zero);
            out.push(a + b);
        }
        Self::new(out)
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| -a.clone()).collect())
    }

    /// Derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k.into()))
            .collect();
        Self::new(coeffs)
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Remainder of exact polynomial division.
    pub fn rem(&self, div: &Self) -> Self {
        let d = div.degree().expect("division by zero polynomial");
        let lead = div.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < d {
                break;
            }
            let factor = r.leading().unwrap() / &lead;
            let shift = rd - d;
            let mut sub = vec![Rational::zero(); shift];
            sub.extend(div.coeffs.iter().map(|c| c * &factor));
            r = r.add(&Self::new(sub).neg());
        }
        r
    }

    /// Number of distinct real roots, by Sturm's theorem over the whole line.
    ///
    /// Works for non-squarefree inputs: the chain stops at the gcd, which scales
    /// all signs uniformly at both infinities.
    pub fn count_real_roots(&self) -> usize {
        let Some(deg) = self.degree() else {
            return 0;
        };
        if deg == 0 {
            return 0;
        }
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() || chain[n - 1].degree() == Some(0) {
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        let vars = |at_pos: bool| {
            let mut count = 0usize;
            let mut last = 0i8;
            for p in &chain {
                let Some(d) = p.degree() else { continue };
                let mut s = if p.leading().unwrap().is_negative() { -1i8 } else { 1i8 };
                if !at_pos && d % 2 == 1 {
                    s = -s;
                }
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
            count
        };
        vars(false) - vars(true)
    }
}
