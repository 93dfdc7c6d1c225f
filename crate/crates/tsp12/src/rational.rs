//! Exact fractions. Every LP quantity in the crate is a [`Rational`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn half() -> Rational {
    frac(1, 2)
}

/// Parses `a/b` or a bare integer. The denominator must be positive.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if !b.is_positive() {
                return None;
            }
            Some(Rational::new(a, b))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Always renders `num/den`, including `k/1` for integers.
pub fn to_frac_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn is_half_multiple(q: &Rational) -> bool {
    q.denom().is_one() || *q.denom() == BigInt::from(2)
}

/// Least common multiple of the denominators; 1 for an empty iterator.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn scale_to_int(q: &Rational, den: &BigInt) -> BigInt {
    let scaled = q * Rational::from_integer(den.clone());
    debug_assert!(scaled.is_integer());
    scaled.to_integer()
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse("1/2"), Some(half()));
        assert_eq!(parse("4/8"), Some(half()));
        assert_eq!(parse("-3"), Some(int(-3)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("1/-2"), None);
        assert_eq!(to_frac_string(&int(5)), "5/1");
        assert_eq!(to_frac_string(&frac(6, 10)), "3/5");
    }

    #[test]
    fn ceiling_and_denominators() {
        assert_eq!(ceil(&frac(9, 2)), BigInt::from(5));
        assert_eq!(ceil(&int(9)), BigInt::from(9));
        let v = [frac(1, 2), frac(1, 3), int(1)];
        assert_eq!(common_denominator(v.iter()), BigInt::from(6));
    }
}
