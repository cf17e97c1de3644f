//! Parsing of polarization-weight bases given on the command line or in job
//! files: a decimal (`1.1892`), a power of two (`2^(1/4)`, `2^0.25`), or a
//! power of two shifted by a decimal (`2^(1/4)-0.12`).

use serde::{Deserialize, Deserializer};

/// Bases above this behave exactly like it: the expansion already orders
/// rows by index.
pub const BETA_CLAMP: f64 = 2.0;

pub fn parse_beta(text: &str) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty beta".into());
    }
    let value = match t.strip_prefix("2^") {
        None => parse_decimal(&t)?,
        Some(rest) => {
            let (exp, tail) = split_exponent(rest)?;
            let base = 2f64.powf(exp);
            if tail.is_empty() {
                base
            } else {
                let (sign, num) = tail.split_at(1);
                let shift = parse_decimal(num)?;
                match sign {
                    "+" => base + shift,
                    "-" => base - shift,
                    _ => return Err(format!("unexpected `{tail}` after exponent")),
                }
            }
        }
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("beta must be positive, got {value} from `{text}`"))
    }
}

fn parse_decimal(t: &str) -> Result<f64, String> {
    t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"))
}

// Splits `(a/b)rest` or `0.25rest` into the exponent and the remainder.
fn split_exponent(s: &str) -> Result<(f64, &str), String> {
    if let Some(inner) = s.strip_prefix('(') {
        let close = inner.find(')').ok_or("unclosed `(` in exponent")?;
        let (body, rest) = (&inner[..close], &inner[close + 1..]);
        let exp = match body.split_once('/') {
            Some((a, b)) => {
                let b = parse_decimal(b)?;
                if b == 0.0 {
                    return Err("zero denominator in exponent".into());
                }
                parse_decimal(a)? / b
            }
            None => parse_decimal(body)?,
        };
        Ok((exp, rest))
    } else {
        // Unparenthesized exponent running up to a sign that follows a digit.
        let end = s
            .char_indices()
            .skip(1)
            .find(|&(i, c)| {
                (c == '+' || c == '-') && !matches!(s.as_bytes()[i - 1], b'e' | b'E')
            })
            .map_or(s.len(), |(i, _)| i);
        Ok((parse_decimal(&s[..end])?, &s[end..]))
    }
}

/// Applies the clamp, returning the effective base and whether it changed.
pub fn clamp_beta(beta: f64) -> (f64, bool) {
    if beta > BETA_CLAMP {
        (BETA_CLAMP, true)
    } else {
        (beta, false)
    }
}

/// A base in a job file: a JSON number or a string in [`parse_beta`] syntax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta(pub f64);

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) if x.is_finite() && x > 0.0 => Ok(Beta(x)),
            Raw::Num(x) => Err(serde::de::Error::custom(format!("beta must be positive, got {x}"))),
            Raw::Text(s) => parse_beta(&s).map(Beta).map_err(serde::de::Error::custom),
        }
    }
}
