//! Scalar backends: exact rationals and `f64`.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational backend.
pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// A field element usable by every generic routine in the crate.
///
/// Float comparisons always go through an explicit tolerance; the exact
/// backend treats a tolerance of `0.0` as an exact zero test.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Whether arithmetic is exact.
    const EXACT: bool;
    /// Name used in the JSON `"scalar"` field.
    const NAME: &'static str;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Best conversion from a float. Exact for rationals (binary expansion).
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses `"p/q"`, an integer, or a decimal literal.
    fn parse_str(s: &str) -> Option<Self>;

    /// Sign where `|x| <= tol` counts as zero.
    fn sign_tol(&self, tol: f64) -> Sign {
        if self.is_zero() {
            return Sign::Zero;
        }
        if tol > 0.0 && self.to_f64().abs() <= tol {
            return Sign::Zero;
        }
        if self.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// `self^e` by repeated squaring; negative exponents invert.
    fn powi(&self, e: i32) -> Self {
        let mut base = if e < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            return (q != 0.0).then(|| p / q);
        }
        s.parse().ok()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(|| Rational::from_i64(0).unwrap())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.contains('/') {
            let r = Rational::from_str(s).ok()?;
            return Some(r);
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let num = BigInt::from_str_radix(&digits, 10).ok()?;
            let den = num::pow(BigInt::from(10), frac.len());
            let r = Rational::new(num, den);
            return Some(if neg { -r } else { r });
        }
        BigInt::from_str(s).ok().map(Rational::from_integer)
    }
}

/// Shorthand for building a rational from a numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_forms() {
        assert_eq!(Rational::parse_str("1/3"), Some(rat(1, 3)));
        assert_eq!(Rational::parse_str("-4"), Some(rat(-4, 1)));
        assert_eq!(Rational::parse_str("0.25"), Some(rat(1, 4)));
        assert_eq!(Rational::parse_str("-1.5"), Some(rat(-3, 2)));
        assert_eq!(Rational::parse_str("abc"), None);
        assert_eq!(f64::parse_str("1/4"), Some(0.25));
    }

    #[test]
    fn sign_with_tolerance() {
        assert_eq!(1e-12f64.sign_tol(1e-9), Sign::Zero);
        assert_eq!((-1e-3f64).sign_tol(1e-9), Sign::Negative);
        assert_eq!(rat(1, 1_000_000_000_000).sign_tol(0.0), Sign::Positive);
        assert_eq!(rat(0, 1).sign_tol(0.0), Sign::Zero);
    }

    #[test]
    fn powers() {
        assert_eq!(rat(2, 3).powi(3), rat(8, 27));
        assert_eq!(rat(2, 3).powi(-2), rat(9, 4));
        assert_eq!(2.0f64.powi(0), 1.0);
    }
}
