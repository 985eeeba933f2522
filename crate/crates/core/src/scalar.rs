//! Exact rational scalars.
//!
//! Every algebraic value in the workbench is a [`Rat`]; equality of closure
//! checks is decided bit-exactly. The approximate mode used for infinite
//! products lives in [`crate::special::ProductValue`] and records its
//! truncation depth and tail bound.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

pub type Rat = num::BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `base^exp` for integer exponents of either sign.
pub fn pow_i(base: &Rat, exp: i64) -> Result<Rat> {
    if base.is_zero() {
        return match exp {
            0 => Ok(Rat::one()),
            e if e > 0 => Ok(Rat::zero()),
            _ => Err(Error::Pole("0 raised to a negative power".into())),
        };
    }
    let mut acc = Rat::one();
    let mut b = if exp >= 0 { base.clone() } else { base.recip() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    Ok(acc)
}

pub fn factorial(n: u32) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

pub fn binomial_int(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k as u64 {
        acc = acc * BigInt::from(n as u64 - i) / BigInt::from(i + 1);
    }
    Rat::from_integer(acc)
}

/// Parses "num/den" or a plain integer; also accepts decimal fractions such
/// as "0.25".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim())
            .map_err(|_| Error::Config(format!("bad rational numerator: {s}")))?;
        let d = BigInt::from_str(d.trim())
            .map_err(|_| Error::Config(format!("bad rational denominator: {s}")))?;
        if d.is_zero() {
            return Err(Error::Config(format!("zero denominator: {s}")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let combined = format!("{int}{frac}");
        let n = BigInt::from_str(&combined)
            .map_err(|_| Error::Config(format!("bad decimal: {s}")))?;
        let den = BigInt::from(10u32).pow(digits);
        return Ok(Rat::new(n, den));
    }
    let n = BigInt::from_str(s).map_err(|_| Error::Config(format!("bad integer: {s}")))?;
    Ok(Rat::from_integer(n))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back through a scaled division for very large operands
        let n = r.numer().to_f64();
        let d = r.denom().to_f64();
        match (n, d) {
            (Some(n), Some(d)) => n / d,
            _ => {
                if r.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
        }
    })
}

/// Renders a rational either exactly ("7/4") or as a decimal with the given
/// number of significant digits.
pub fn format_rat(r: &Rat, float_digits: Option<usize>) -> String {
    match float_digits {
        None => {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        Some(d) => format!("{:.*e}", d.saturating_sub(1), to_f64(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_negative_exponent() {
        assert_eq!(pow_i(&rat(2, 3), -2).unwrap(), rat(9, 4));
        assert_eq!(pow_i(&rat(5, 1), 0).unwrap(), rat_i(1));
        assert!(pow_i(&Rat::zero(), -1).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("7/4").unwrap(), rat(7, 4));
        assert_eq!(parse_rat("-3").unwrap(), rat_i(-3));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn factorial_small() {
        assert_eq!(factorial(0), rat_i(1));
        assert_eq!(factorial(5), rat_i(120));
        assert_eq!(binomial_int(5, 2), rat_i(10));
    }
}

pub fn is_zero(r: &Rat) -> bool {
    num::Zero::is_zero(r)
}
