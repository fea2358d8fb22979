//! Dyadic rationals `num / 2^level` in `[0, 1]`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A dyadic rational in `[0, 1]`, always stored in lowest terms: either
/// `num` is odd, or the value is `0/2^0` or `1/2^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    level: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigUint>, level: u32) -> Result<Self> {
        let mut num = num.into();
        if num > BigUint::one() << level {
            return Err(Error::OutOfRange {
                value: format!("{num}/2^{level}"),
                range: "[0, 1]",
            });
        }
        let mut level = level;
        if num.is_zero() {
            level = 0;
        } else {
            let tz = num.trailing_zeros().unwrap_or(0).min(level as u64) as u32;
            num >>= tz;
            level -= tz;
        }
        Ok(Dyadic { num, level })
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigUint::zero(),
            level: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigUint::one(),
            level: 0,
        }
    }

    pub fn half() -> Self {
        Dyadic {
            num: BigUint::one(),
            level: 1,
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    /// Exponent of the denominator in lowest terms.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.level == 0 && self.num.is_one()
    }

    /// Numerator when the value is written over `2^level` (which must be at
    /// least the reduced level).
    pub fn num_at_level(&self, level: u32) -> Option<BigUint> {
        (level >= self.level).then(|| &self.num << (level - self.level))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num.clone()),
            BigInt::from(BigUint::one() << self.level),
        )
    }

    pub fn to_f64(&self) -> f64 {
        // numerators here are far below 2^1023
        let n = self.num.to_f64().unwrap_or(f64::INFINITY);
        n * 2f64.powi(-(self.level as i32))
    }

    /// `(1 + x) / 2`.
    pub fn midpoint_with_one(&self) -> Dyadic {
        let num = (BigUint::one() << self.level) + &self.num;
        Dyadic::new(num, self.level + 1).expect("(1 + x)/2 lies in [1/2, 1]")
    }

    /// `1 − x`.
    pub fn reflect(&self) -> Dyadic {
        let num = (BigUint::one() << self.level) - &self.num;
        Dyadic::new(num, self.level).expect("1 − x lies in [0, 1]")
    }

    /// Convert an exact rational; fails unless the denominator is a power of
    /// two and the value lies in `[0, 1]`.
    pub fn from_rational(q: &BigRational) -> Result<Self> {
        let reason = |r: &str| Error::Parse {
            input: q.to_string(),
            reason: r.to_string(),
        };
        let den = q
            .denom()
            .to_biguint()
            .ok_or_else(|| reason("negative denominator"))?;
        let num = q
            .numer()
            .to_biguint()
            .ok_or_else(|| reason("negative value"))?;
        let level = den.trailing_zeros().unwrap_or(0);
        if den != BigUint::one() << level {
            return Err(reason("denominator is not a power of two"));
        }
        Dyadic::new(num, level as u32)
    }

    /// Exact conversion of a finite double in `[0, 1]`.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange {
                value: x.to_string(),
                range: "[0, 1]",
            });
        }
        if x == 0.0 {
            return Ok(Dyadic::zero());
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let (mantissa, e) = if exp == 0 {
            (bits & ((1 << 52) - 1), -1074)
        } else {
            ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
        };
        // x = mantissa · 2^e with e ≤ 0 for x ≤ 1
        Dyadic::new(BigUint::from(mantissa), (-e) as u32)
    }

    /// Largest dyadic of the given level not exceeding `x ∈ [0, 1]`.
    pub fn floor_at_level(x: f64, level: u32) -> Result<Self> {
        let exact = Self::from_f64_exact(x)?;
        let shifted = match exact.level.cmp(&level) {
            Ordering::Greater => &exact.num >> (exact.level - level),
            _ => &exact.num << (level - exact.level),
        };
        Dyadic::new(shifted, level)
    }

    /// Nearest dyadic of the given level (ties round up).
    pub fn nearest_at_level(x: f64, level: u32) -> Result<Self> {
        let exact = Self::from_f64_exact(x)?;
        if exact.level <= level {
            return Ok(exact);
        }
        let drop = exact.level - level;
        let floor = &exact.num >> drop;
        let round_up = exact.num.bit(drop as u64 - 1);
        Dyadic::new(if round_up { floor + 1u8 } else { floor }, level)
    }

    /// Parse `p/2^k`, `p/q` with `q` a power of two, or `0`/`1`.
    pub fn parse(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let num: BigUint = p.parse().map_err(|_| fail("bad numerator"))?;
        if let Some(exp) = q.strip_prefix("2^") {
            let level: u32 = exp.parse().map_err(|_| fail("bad exponent"))?;
            return Dyadic::new(num, level);
        }
        let den: BigUint = q.parse().map_err(|_| fail("bad denominator"))?;
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        Dyadic::from_rational(&q)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let level = self.level.max(other.level);
        let a = self.num_at_level(level).unwrap();
        let b = other.num_at_level(level).unwrap();
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigUint::one() << self.level)
        }
    }
}

/// Reduced fraction string `p/q` (or `p` for integers).
pub fn format_rational(q: &BigRational) -> String {
    let q = q.reduced();
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `true` when `q` is `num / 2^k` for some `k`.
pub fn is_dyadic(q: &BigRational) -> bool {
    let d = q.denom().magnitude();
    let tz = d.trailing_zeros().unwrap_or(0);
    (d >> tz).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let d = Dyadic::new(4u32, 3).unwrap();
        assert_eq!((d.num().clone(), d.level()), (BigUint::from(1u8), 1));
        let one = Dyadic::new(8u32, 3).unwrap();
        assert!(one.is_one());
        let zero = Dyadic::new(0u32, 7).unwrap();
        assert_eq!(zero, Dyadic::zero());
        assert!(Dyadic::new(9u32, 3).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(Dyadic::parse("1/4").unwrap(), Dyadic::new(1u8, 2).unwrap());
        assert_eq!(
            Dyadic::parse("6/2^3").unwrap(),
            Dyadic::new(3u8, 2).unwrap()
        );
        assert_eq!(Dyadic::parse("1").unwrap(), Dyadic::one());
        assert_eq!(Dyadic::parse("0").unwrap(), Dyadic::zero());
        assert!(Dyadic::parse("1/3").is_err());
        assert!(Dyadic::parse("5/4").is_err());
        assert!(Dyadic::parse("x/4").is_err());
        assert!(Dyadic::parse("1/0").is_err());
        assert_eq!(Dyadic::parse("3/4").unwrap().to_string(), "3/4");
    }

    #[test]
    fn from_floats() {
        assert_eq!(
            Dyadic::from_f64_exact(0.375).unwrap(),
            Dyadic::new(3u8, 3).unwrap()
        );
        assert_eq!(Dyadic::from_f64_exact(1.0).unwrap(), Dyadic::one());
        assert!(Dyadic::from_f64_exact(1.5).is_err());
        let third = 1.0 / 3.0;
        let lo = Dyadic::floor_at_level(third, 4).unwrap();
        assert_eq!(lo, Dyadic::new(5u8, 4).unwrap());
        let near = Dyadic::nearest_at_level(third, 4).unwrap();
        assert_eq!(near, Dyadic::new(5u8, 4).unwrap());
        let near = Dyadic::nearest_at_level(0.3, 3).unwrap();
        assert_eq!(near, Dyadic::new(1u8, 2).unwrap());
        assert_eq!(Dyadic::floor_at_level(0.5, 8).unwrap(), Dyadic::half());
    }

    #[test]
    fn ordering_and_maps() {
        let a = Dyadic::parse("1/4").unwrap();
        let b = Dyadic::parse("3/8").unwrap();
        assert!(a < b);
        assert_eq!(a.reflect(), Dyadic::parse("3/4").unwrap());
        assert_eq!(a.midpoint_with_one(), Dyadic::parse("5/8").unwrap());
        assert_eq!(Dyadic::zero().midpoint_with_one(), Dyadic::half());
    }

    #[test]
    fn dyadic_rationals() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert!(is_dyadic(&q(3, 8)));
        assert!(is_dyadic(&q(1, 1)));
        assert!(!is_dyadic(&q(1, 3)));
        assert!(!is_dyadic(&q(1, 12)));
        assert_eq!(format_rational(&q(4, 18)), "2/9");
        assert_eq!(format_rational(&q(3, 3)), "1");
    }
}
