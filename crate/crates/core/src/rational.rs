//! Exact rational scalars.
//!
//! Every probability and value in a [`Game`](crate::Game) is a
//! [`Rational`]: an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

/// Shorthand constructor, mostly for tests and fixtures.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or `p` (optionally signed). Rejects zero denominators and
/// anything that is not plain decimal digits.
pub fn parse_rational(text: &str) -> Option<Rational> {
    fn digits(s: &str) -> Option<BigInt> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let value = match body.split_once('/') {
        Some((p, q)) => {
            let q = digits(q)?;
            if q.is_zero() {
                return None;
            }
            Rational::new(digits(p)?, q)
        }
        None => Rational::from_integer(digits(body)?),
    };
    Some(if neg { -value } else { value })
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Greatest common divisor of rationals: the largest `r` such that every
/// value is an integer multiple of `r`.
///
/// Computed as `gcd(numerators) / L` after writing every value over the
/// common denominator `L = lcm(denominators)`. Returns `None` for an empty
/// input or when a value is not strictly positive.
pub fn rational_gcd<'a, I>(values: I) -> Option<Rational>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let values: Vec<&Rational> = values.into_iter().collect();
    if values.is_empty() || values.iter().any(|v| !v.is_positive()) {
        return None;
    }
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let gcd = values.iter().fold(BigInt::zero(), |acc, v| {
        let scaled = v.numer() * (&lcm / v.denom());
        acc.gcd(&scaled)
    });
    Some(Rational::new(gcd, lcm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/3"), Some(rat(1, 3)));
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1"), Some(int(1)));
        assert_eq!(parse_rational("-3/6"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn canonical_formatting() {
        assert_eq!(format_rational(&rat(6, 8)), "3/4");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(0, 5)), "0");
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(rational_gcd(&[rat(1, 3), rat(2, 3)]), Some(rat(1, 3)));
        assert_eq!(rational_gcd(&[rat(1, 2)]), Some(rat(1, 2)));
        assert_eq!(rational_gcd(&[rat(1, 4), rat(1, 3)]), Some(rat(1, 12)));
        assert_eq!(rational_gcd(&[rat(1, 4), rat(3, 4)]), Some(rat(1, 4)));
        assert_eq!(rational_gcd(&[int(1)]), Some(int(1)));
        assert_eq!(rational_gcd(&[]), None);
        assert_eq!(rational_gcd(&[rat(0, 1)]), None);
    }
}
