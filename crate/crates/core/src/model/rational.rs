//! Parsing and formatting of exact rationals.
//!
//! Accepted textual forms are `"7/10"`, `"-3"`, `"0.125"` and `"1e-3"`.
//! Decimal input is converted exactly (no binary floating point detour).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ModelError;

pub fn parse_rational(text: &str) -> Result<BigRational, ModelError> {
    let s = text.trim();
    let bad = || ModelError::BadNumber(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i64;
    if shift.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if negative { -value } else { value })
}

/// Formats as `num/den`, always with an explicit denominator.
pub fn format_rational(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn rational_to_f64(value: &BigRational) -> f64 {
    if let Some(v) = value.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    // Fall back to scaling both parts down for very large components.
    let n = value.numer().abs();
    let d = value.denom().clone();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (d >> shift).to_f64().unwrap_or(f64::INFINITY);
    sign * n / d
}

/// Exact rational equal to a finite `f64`.
pub fn rational_from_f64(value: f64) -> Option<BigRational> {
    BigRational::from_float(value)
}

pub fn rational_one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("7/10").unwrap(), r(7, 10));
        assert_eq!(parse_rational("0.7").unwrap(), r(7, 10));
        assert_eq!(parse_rational("-0.125").unwrap(), r(-1, 8));
        assert_eq!(parse_rational("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_rational("2.5E1").unwrap(), r(25, 1));
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "e5", "1/x"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&r(2, 4)), "1/2");
        assert_eq!(format_rational(&r(3, 1)), "3/1");
    }

    #[test]
    fn converts_huge_components() {
        let big = BigRational::new(
            num_traits::pow(BigInt::from(3), 2000) + BigInt::from(1),
            num_traits::pow(BigInt::from(3), 2000) * BigInt::from(4),
        );
        assert!((rational_to_f64(&big) - 0.25).abs() < 1e-12);
    }
}
