//! Small helpers around `BigRational`: parsing/printing in `p/q` form,
//! exact combinatorics, and exact rational powers where they exist.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Shorthand for a rational from two machine integers.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Parses `"p/q"` or `"p"` with optional sign, rejecting zero denominators.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| Error::validation(format!("bad rational numerator in {s:?}")))?;
    let q: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::validation(format!("bad rational denominator in {s:?}")))?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(Error::validation(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

/// Canonical string form: reduced, `p/q` with the sign on the numerator,
/// plain `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Largest integer `<= r`.
pub fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Smallest integer `>= r`.
pub fn ceil_int(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// True when some integer `m` satisfies `lo <= m < hi`.
pub fn integer_in_half_open(lo: &BigRational, hi: &BigRational) -> bool {
    if lo >= hi {
        return false;
    }
    let m = ceil_int(lo);
    BigRational::from_integer(m) < *hi
}

/// Exact `base^exp` for rational `exp`, when the result is again rational:
/// both numerator and denominator of `base` must be perfect `v`-th powers for
/// `exp = u/v`. Returns `None` when the power is irrational.
pub fn rational_pow(base: &BigRational, exp: &BigRational) -> Option<BigRational> {
    if base.is_zero() {
        return if exp.is_positive() {
            Some(BigRational::zero())
        } else {
            None
        };
    }
    let u = exp.numer().clone();
    let v: u32 = exp.denom().try_into().ok()?;
    let root = |x: &BigInt| -> Option<BigInt> {
        if v == 1 {
            return Some(x.clone());
        }
        if x.sign() == Sign::Minus && v % 2 == 0 {
            return None;
        }
        let r = x.nth_root(v);
        (r.pow(v) == *x).then_some(r)
    };
    let rn = root(base.numer())?;
    let rd = root(base.denom())?;
    let pow_abs: u32 = u.magnitude().try_into().ok()?;
    let powed = BigRational::new(rn.pow(pow_abs), rd.pow(pow_abs));
    if u.is_negative() {
        Some(powed.recip())
    } else {
        Some(powed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["-11/20", "3", "0", "201/100", "-2"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn binomial_and_factorial_agree() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(
            binomial(8, 3) * factorial(3) * factorial(5),
            factorial(8)
        );
    }

    #[test]
    fn integer_window_detection() {
        assert!(integer_in_half_open(&rat(19, 10), &rat(21, 10)));
        assert!(!integer_in_half_open(&rat(21, 10), &rat(29, 10)));
        assert!(integer_in_half_open(&rat(2, 1), &rat(21, 10)));
        assert!(!integer_in_half_open(&rat(2, 1), &rat(2, 1)));
    }

    #[test]
    fn exact_rational_powers() {
        let half = rat(1, 2);
        assert_eq!(rational_pow(&rat(1, 4), &rat(-1, 2)), Some(rat_int(2)));
        assert_eq!(rational_pow(&rat(8, 27), &rat(2, 3)), Some(rat(4, 9)));
        assert_eq!(rational_pow(&half, &half), None);
        assert_eq!(rational_pow(&rat_int(2), &rat_int(10)), Some(rat_int(1024)));
    }
}
