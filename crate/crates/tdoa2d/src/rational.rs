//! Exact rational scalars: parsing, formatting, and safe float conversion.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::str::FromStr;

use crate::error::Error;

/// Arbitrary-precision rational number used for all exact arithmetic.
pub type Rational = num_rational::BigRational;

/// Parses `"n"` or `"n/d"` with optional sign; denominator must be nonzero.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n = BigInt::from_str(t).map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Formats as `"n"` for integers, `"n/d"` otherwise; inverse of `parse_rational`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Converts an f64 into the exactly equal rational; NaN and infinities are rejected.
pub fn rational_from_f64(f: f64) -> Result<Rational, Error> {
    Rational::from_float(f).ok_or_else(|| Error::InvalidInput(format!("non-finite value {f}")))
}

/// Rounds to the nearest f64, scaling both parts independently so huge
/// numerators or denominators cannot overflow the intermediate conversion.
pub fn rational_to_f64(r: &Rational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    if n.is_zero() {
        return 0.0;
    }
    // Keep ~540 bits of each part and restore the exponent afterwards; the
    // two-step power avoids spurious overflow of the intermediate product.
    let sn = (n.bits() as i64 - 540).max(0);
    let sd = (d.bits() as i64 - 540).max(0);
    let nf = (n >> sn as u64).to_f64().unwrap_or(f64::NAN);
    let df = (d >> sd as u64).to_f64().unwrap_or(f64::NAN);
    let k = sn - sd;
    (nf / df) * 2f64.powi((k / 2) as i32) * 2f64.powi((k - k / 2) as i32)
}

/// Builds a rational from an integer pair.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds an integer rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_parse_roundtrip() {
        for s in ["0", "7", "-3", "22/7", "-5/8", "10/4"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(format_rational(&parse_rational("10/4").unwrap()), "5/2");
    }

    #[test]
    fn test_parse_rejects_garbage() {
        for s in ["", "x", "1/0", "1/2/3", "1.5"] {
            assert!(parse_rational(s).is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn test_f64_roundtrip_exact() {
        for f in [0.0, 1.0, -2.5, 0.1, 1e300, -1e-300, 65536.0] {
            let r = rational_from_f64(f).unwrap();
            assert_eq!(rational_to_f64(&r), f);
        }
        assert!(rational_from_f64(f64::NAN).is_err());
    }

    #[test]
    fn test_to_f64_huge_parts() {
        // Value near 1 but with ~1500-bit numerator and denominator.
        let big = BigInt::from(3) << 1500u32;
        let r = Rational::new(big.clone() + 1, big);
        assert!((rational_to_f64(&r) - 1.0).abs() < 1e-15);

        // Magnitude beyond f64 range saturates instead of panicking.
        let huge = Rational::from_integer(BigInt::from(1) << 1100u32);
        assert_eq!(rational_to_f64(&huge), f64::INFINITY);
        assert_eq!(rational_to_f64(&-huge), f64::NEG_INFINITY);
    }
}
