//! JSON encoding for reports: exact values as `"p/q"` strings, floats with
//! 17 significant digits, non-finite floats as strings.

use std::str::FromStr;

use serde_json::{Number, Value};

use crate::numerics::rational::fraction_string;
use crate::numerics::Rational;

pub fn float(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        let text = format!("{:.16e}", if x == 0.0 { 0.0 } else { x });
        Value::Number(Number::from_str(&text).expect("exponent notation is valid JSON"))
    }
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(float).collect())
}

pub fn fraction(r: &Rational) -> Value {
    Value::String(fraction_string(r))
}

pub fn fractions(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(fraction).collect())
}

pub fn fraction_rows(rows: &[Vec<Rational>]) -> Value {
    Value::Array(rows.iter().map(|r| fractions(r)).collect())
}

/// Pretty-printed with a trailing newline.
pub fn render(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    #[test]
    fn encodings() {
        assert_eq!(render(&float(0.5)), "5.0000000000000000e-1\n");
        assert_eq!(render(&float(-0.0)), "0.0000000000000000e+0\n");
        assert_eq!(float(f64::NEG_INFINITY), Value::String("-inf".into()));
        assert_eq!(fraction(&rat(2, 4)), Value::String("1/2".into()));
        let x = 0.1f64 + 0.2;
        let text = render(&float(x));
        assert_eq!(text.trim().parse::<f64>().unwrap(), x);
    }
}
