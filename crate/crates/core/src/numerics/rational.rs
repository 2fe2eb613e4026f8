use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

/// `numer / denom` as a reduced big rational. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Lossy conversion. This is the only sanctioned bridge from exact to floating values.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Always `p/q`, including integers (`0/1`, `1/1`).
pub fn fraction_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Accepts `p/q`, a plain integer, or a finite decimal literal such as `0.25`.
pub fn parse_fraction(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = format!("{}{}", whole, frac).parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Some(if negative { -value } else { value })
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_squared(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Binomial coefficient as an exact big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `n! / (n-k)!`, the number of injective maps from `k` variables into `n` constants.
pub fn falling_factorial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).map(|i| n - i).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings_keep_denominator() {
        assert_eq!(fraction_string(&rat(2, 4)), "1/2");
        assert_eq!(fraction_string(&int(0)), "0/1");
        assert_eq!(fraction_string(&int(1)), "1/1");
        assert_eq!(fraction_string(&rat(-3, 6)), "-1/2");
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_fraction("1/2"), Some(rat(1, 2)));
        assert_eq!(parse_fraction(" 3 "), Some(int(3)));
        assert_eq!(parse_fraction("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_fraction("-.5"), Some(rat(-1, 2)));
        assert_eq!(parse_fraction("1/0"), None);
        assert_eq!(parse_fraction("abc"), None);
        assert_eq!(parse_fraction("."), None);
    }

    #[test]
    fn reciprocal_product_is_one() {
        let a = rat(7, 13);
        let b = rat(13, 7);
        assert_eq!(&a * &b, Rational::one());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(falling_factorial(3, 2), 6);
        assert_eq!(falling_factorial(1, 2), 0);
        assert_eq!(falling_factorial(4, 0), 1);
    }
}
