//! Tiny parser for sums of monomials such as `3 - 2*s + s^4` or `1/2*z^3`.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Parses `text` into `(coefficient, exponent)` terms in the single variable
/// `var` (any of the given spellings). Exponents may be negative.
pub fn parse_terms(text: &str, vars: &[&str]) -> Result<Vec<(BigRational, i64)>> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut terms = Vec::new();
    let mut rest = cleaned.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        } else if !first {
            return Err(Error::Parse(format!("expected + or - before `{rest}`")));
        }
        first = false;
        let end = next_sign(rest);
        let (term, tail) = rest.split_at(end);
        let (mut coeff, exp) = parse_term(term, vars)?;
        if negative {
            coeff = -coeff;
        }
        terms.push((coeff, exp));
        rest = tail;
    }
    Ok(terms)
}

/// Position of the next top-level `+`/`-` that starts a new term. A sign
/// directly after `^` belongs to the exponent.
fn next_sign(s: &str) -> usize {
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && i > 0 && bytes[i - 1] != b'^' {
            return i;
        }
    }
    s.len()
}

fn parse_term(term: &str, vars: &[&str]) -> Result<(BigRational, i64)> {
    if term.is_empty() {
        return Err(Error::Parse("dangling sign".into()));
    }
    let var_pos = vars
        .iter()
        .filter_map(|v| term.find(v).map(|p| (p, v.len())))
        .min_by_key(|&(p, _)| p);
    let Some((pos, len)) = var_pos else {
        return Ok((parse_rational(term)?, 0));
    };
    let coeff_text = term[..pos].trim_end_matches('*');
    let coeff = if coeff_text.is_empty() {
        BigRational::one()
    } else {
        parse_rational(coeff_text)?
    };
    let after = &term[pos + len..];
    let exp = if after.is_empty() {
        1
    } else if let Some(e) = after.strip_prefix('^') {
        e.trim_start_matches('(')
            .trim_end_matches(')')
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad exponent `{e}`")))?
    } else {
        return Err(Error::Parse(format!("unexpected `{after}` in term `{term}`")));
    };
    Ok((coeff, exp))
}

/// Parses an integer or a fraction `a/b`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number `{text}`"));
    match text.split_once('/') {
        Some((a, b)) => {
            let num: BigInt = a.parse().map_err(|_| bad())?;
            let den: BigInt = b.parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(text: &str) -> Vec<(i64, i64)> {
        parse_terms(text, &["s"])
            .unwrap()
            .into_iter()
            .map(|(c, e)| (c.to_integer().try_into().unwrap(), e))
            .collect()
    }

    #[test]
    fn parses_mixed_terms() {
        assert_eq!(ints("3 - 2*s + s^4"), vec![(3, 0), (-2, 1), (1, 4)]);
        assert_eq!(ints("-s"), vec![(-1, 1)]);
        assert_eq!(ints("5s^2"), vec![(5, 2)]);
        assert_eq!(ints("s^-1"), vec![(1, -1)]);
    }

    #[test]
    fn parses_fractions() {
        let t = parse_terms("1/2*z^3", &["z"]).unwrap();
        assert_eq!(t[0].0, BigRational::new(1.into(), 2.into()));
        assert_eq!(t[0].1, 3);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_terms("", &["s"]).is_err());
        assert!(parse_terms("3x", &["s"]).is_err());
        assert!(parse_terms("s^", &["s"]).is_err());
        assert!(parse_terms("1/0", &["s"]).is_err());
    }
}
