//! Arbitrary-precision rationals and the `p/q` string format used by every
//! JSON surface of this crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::SchemaError;

/// The scalar type of the whole crate.
pub type Q = num_rational::BigRational;

/// `n` as a rational.
pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `n/d`, reduced. Panics if `d == 0`; intended for literals in code and tests.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `2^-j`.
pub fn pow2_neg(j: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << j)
}

/// Parses a rational from `p/q`, integer, or plain decimal notation
/// (`"3/10"`, `"-7"`, `"0.3"`). Whitespace around the number is accepted;
/// exponents are not.
pub fn parse_rational(s: &str) -> Result<Q, SchemaError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(SchemaError::Rational("empty string".into()));
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| SchemaError::Rational(format!("bad numerator in {t:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| SchemaError::Rational(format!("bad denominator in {t:?}")))?;
        if d.is_zero() {
            return Err(SchemaError::Rational(format!("zero denominator in {t:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let i: BigInt = if int == "-" || int.is_empty() {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| SchemaError::Rational(format!("bad integer part in {t:?}")))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(SchemaError::Rational(format!("bad fractional part in {t:?}")));
        }
        let f: BigInt = frac
            .parse()
            .map_err(|_| SchemaError::Rational(format!("bad fractional part in {t:?}")))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Q::new(i * &scale + BigInt::from(sign) * f, scale));
    }
    let n: BigInt = t
        .parse()
        .map_err(|_| SchemaError::Rational(format!("not a rational: {t:?}")))?;
    Ok(Q::from_integer(n))
}

/// Formats a rational as `p/q` (or plain `p` when the denominator is 1).
pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// The dyadic rational of smallest denominator (then smallest absolute
/// numerator, then the negative one) in the open interval `(lo, hi)`.
/// Deterministic witness points come from here.
pub fn simplest_dyadic_in(lo: &Q, hi: &Q) -> Q {
    assert!(lo < hi, "empty interval");
    let one = BigInt::one();
    for j in 0u32..512 {
        let den = &one << j;
        // smallest k with k/2^j > lo
        let mut k = (lo * Q::from_integer(den.clone())).floor().to_integer() + 1u32;
        // walk over candidates at this level, preferring small |k|
        let mut best: Option<BigInt> = None;
        loop {
            let cand = Q::new(k.clone(), den.clone());
            if &cand >= hi {
                break;
            }
            match &best {
                Some(b) if b.abs() <= k.abs() => {}
                _ => best = Some(k.clone()),
            }
            k += 1u32;
            // levels are scanned coarse-to-fine, so only a few candidates
            // per level matter
            if best.is_some() {
                break;
            }
        }
        if let Some(k) = best {
            return Q::new(k, den);
        }
    }
    unreachable!("open interval with no dyadic point below level 512")
}

/// Fractional part in `[0, 1)`.
pub fn frac_mod_one(x: &Q) -> Q {
    x - x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/10").unwrap(), q(3, 10));
        assert_eq!(parse_rational("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational(" 7 ").unwrap(), q_int(7));
        assert_eq!(parse_rational("-2/8").unwrap(), q(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("0.3e1").is_err());
    }

    #[test]
    fn format_reduced() {
        assert_eq!(format_rational(&q(4, 8)), "1/2");
        assert_eq!(format_rational(&q_int(-3)), "-3");
        assert_eq!(format_rational(&q(0, 5)), "0");
    }

    #[test]
    fn roundtrip() {
        for (n, d) in [(1i64, 3i64), (-7, 2), (0, 1), (22, 7)] {
            let x = q(n, d);
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }

    #[test]
    fn simplest_dyadic() {
        assert_eq!(simplest_dyadic_in(&q(3, 10), &q(2, 5)), q(3, 8));
        assert_eq!(simplest_dyadic_in(&q(0, 1), &q_int(1)), q(1, 2));
        assert_eq!(simplest_dyadic_in(&q(-1, 1), &q(1, 1)), q_int(0));
        let x = simplest_dyadic_in(&q(1000, 1001), &q(1001, 1002));
        assert!(x > q(1000, 1001) && x < q(1001, 1002));
    }

    #[test]
    fn frac() {
        assert_eq!(frac_mod_one(&q(7, 2)), q(1, 2));
        assert_eq!(frac_mod_one(&q(-1, 4)), q(3, 4));
        assert_eq!(frac_mod_one(&q_int(2)), q_int(0));
    }
}
