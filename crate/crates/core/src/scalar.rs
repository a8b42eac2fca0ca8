//! Coefficient types.
//!
//! Everything algebraic in this crate is generic over [`Scalar`]: binary
//! floating point for experiments, [`Rational`] for identities that must hold
//! exactly (Wick moments, decomposition reconstruction, the Bernoulli
//! comparison).

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational.
pub type Rational = BigRational;

/// Coefficient field used by polynomials, moment engines and decompositions.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Nearest representable value. Rationals snap onto the dyadic grid
    /// `2^-SNAP_BITS`, which keeps denominators bounded when float search
    /// results are promoted into exact arithmetic.
    fn from_float(v: f64) -> Self;

    fn approx(&self) -> f64;

    /// Square root when it is representable in this type.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Parses `a/b`, integers, and decimal or scientific literals.
    fn parse_literal(s: &str) -> Option<Self>;

    /// Canonical string used by the JSON formats.
    fn to_literal(&self) -> String {
        self.to_string()
    }
}

/// Dyadic resolution used when snapping floats to rationals.
pub const SNAP_BITS: u32 = 24;

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_int(v: i64) -> Self {
                v as $t
            }

            fn from_float(v: f64) -> Self {
                v as $t
            }

            fn approx(&self) -> f64 {
                *self as f64
            }

            fn sqrt_exact(&self) -> Option<Self> {
                (*self >= 0.0).then(|| self.sqrt())
            }

            fn parse_literal(s: &str) -> Option<Self> {
                let s = s.trim();
                if let Some((n, d)) = s.split_once('/') {
                    let n: $t = n.trim().parse().ok()?;
                    let d: $t = d.trim().parse().ok()?;
                    return (d != 0.0).then(|| n / d);
                }
                <$t>::from_str(s).ok()
            }

            fn to_literal(&self) -> String {
                format!("{:?}", self)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_float(v: f64) -> Self {
        let scale = (1u64 << SNAP_BITS) as f64;
        let n = (v * scale).round();
        let n = <Rational as FromPrimitive>::from_f64(n).unwrap_or_else(Rational::zero);
        n / Rational::from_integer(BigInt::from(1u64 << SNAP_BITS))
    }

    fn approx(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Ratio of huge integers: scale down through bit shifts.
            let shift = self.numer().bits().max(self.denom().bits()) as i64 - 60;
            let shift = shift.max(0) as usize;
            let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| Rational::new(n, d))
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        return (!d.is_zero()).then(|| n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str_radix(&digits, 10).ok()?);
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = exp - frac_part.len() as i32;
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -value } else { value })
}

/// `(a-1)!!` for even `a`, zero for odd `a`: the `a`-th moment of a standard
/// Gaussian.
pub fn gaussian_moment<S: Scalar>(a: u32) -> S {
    if a % 2 == 1 {
        return S::zero();
    }
    let mut acc = S::one();
    let mut j = a as i64 - 1;
    while j > 1 {
        acc = acc * S::from_int(j);
        j -= 2;
    }
    acc
}

/// Integer power by repeated squaring.
pub fn powi<S: Scalar>(base: &S, exp: u32) -> S {
    num_traits::pow(base.clone(), exp as usize)
}

/// Certified rational lower bound for π (15 correct digits, rounded down).
pub fn pi_lower_bound() -> Rational {
    Rational::new(BigInt::from(314_159_265_358_979u64), BigInt::from(100_000_000_000_000u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_decimals() {
        let r = Rational::parse_literal("0.1").unwrap();
        assert_eq!(r, Rational::from_ratio(1, 10));
        assert_eq!(Rational::parse_literal("-3/6").unwrap(), Rational::from_ratio(-1, 2));
        assert_eq!(Rational::parse_literal("2.5e2").unwrap(), Rational::from_int(250));
        assert_eq!(Rational::parse_literal("1e-3").unwrap(), Rational::from_ratio(1, 1000));
        assert!(Rational::parse_literal("abc").is_none());
        assert!(Rational::parse_literal("1/0").is_none());
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4"), Some(0.25));
        assert_eq!(f64::parse_literal(" -2.5 "), Some(-2.5));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Rational::from_ratio(9, 4).sqrt_exact(), Some(Rational::from_ratio(3, 2)));
        assert_eq!(Rational::from_int(2).sqrt_exact(), None);
        assert_eq!(4.0f64.sqrt_exact(), Some(2.0));
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_moment::<f64>(4), 3.0);
        assert_eq!(gaussian_moment::<f64>(6), 15.0);
        assert_eq!(gaussian_moment::<f64>(3), 0.0);
        assert_eq!(gaussian_moment::<f64>(0), 1.0);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(3) << 2000usize;
        let r = Rational::new(big.clone(), big * BigInt::from(2));
        assert!((Scalar::approx(&r) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pi_bound_is_below_pi() {
        assert!(Scalar::approx(&pi_lower_bound()) <= std::f64::consts::PI);
        assert!(std::f64::consts::PI - Scalar::approx(&pi_lower_bound()) < 1e-13);
    }
}
