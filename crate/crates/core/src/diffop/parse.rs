use super::ThetaOperator;
use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, Rational};

/// Parses a sum of terms `c * x^p * theta^i` into an operator.
///
/// Whitespace is ignored, factors may appear in any order and may be
/// omitted (`theta`, `-x^-1*theta`, `3/2`). The variable name is whatever
/// identifier other than `theta` appears; it must be the same throughout and
/// defaults to `x`.
pub fn parse_operator(text: &str) -> Result<ThetaOperator<Rational>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty operator".into()));
    }
    let mut var: Option<String> = None;
    let mut terms = Vec::new();
    for (sign, body) in split_terms(&s)? {
        let mut coeff = Rational::from(sign);
        let mut power = 0i64;
        let mut order = 0usize;
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in term '{body}'")));
            }
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, Some(e.trim_start_matches('(').trim_end_matches(')'))),
                None => (factor, None),
            };
            if base.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                if base == "theta" {
                    let i = match exp {
                        Some(e) => e.parse::<usize>().map_err(|_| {
                            Error::Parse(format!("theta exponent must be a nonnegative integer, got '{e}'"))
                        })?,
                        None => 1,
                    };
                    order += i;
                } else {
                    match &var {
                        Some(v) if v != base => {
                            return Err(Error::Parse(format!("mixed variables '{v}' and '{base}'")))
                        }
                        _ => var = Some(base.to_string()),
                    }
                    let p = match exp {
                        Some(e) => e
                            .parse::<i64>()
                            .map_err(|_| Error::Parse(format!("exponent must be an integer, got '{e}'")))?,
                        None => 1,
                    };
                    power += p;
                }
            } else {
                if exp.is_some() {
                    return Err(Error::Parse(format!("powers of constants are not supported: '{factor}'")));
                }
                let c = parse_rational(base)
                    .ok_or_else(|| Error::Parse(format!("not a rational number: '{base}'")))?;
                coeff *= c;
            }
        }
        terms.push((coeff, power, order));
    }
    Ok(ThetaOperator::from_terms(terms, var.as_deref().unwrap_or("x")))
}

/// Splits at top-level `+`/`-`, keeping signs that follow `^` or `(`.
fn split_terms(s: &str) -> Result<Vec<(i64, String)>> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for c in s.chars() {
        let unary_exponent = matches!(prev, Some('^') | Some('('));
        if (c == '+' || c == '-') && !unary_exponent {
            if cur.is_empty() {
                if matches!(prev, Some('+') | Some('-')) || prev.is_none() {
                    if c == '-' {
                        sign = -sign;
                    }
                    prev = Some(c);
                    continue;
                }
                return Err(Error::Parse(format!("unexpected '{c}'")));
            }
            out.push((sign, std::mem::take(&mut cur)));
            sign = if c == '-' { -1 } else { 1 };
        } else {
            cur.push(c);
        }
        prev = Some(c);
    }
    if cur.is_empty() {
        return Err(Error::Parse("operator ends with a dangling sign".into()));
    }
    out.push((sign, cur));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn parses_euler() {
        let h = parse_operator("x*theta^2 + theta - 1").unwrap();
        let expect = ThetaOperator::from_terms([(q(1, 1), 1, 2), (q(1, 1), 0, 1), (q(-1, 1), 0, 0)], "x");
        assert_eq!(h, expect);
    }

    #[test]
    fn parses_negative_exponents_and_other_variables() {
        let h = parse_operator("16*theta^2 + 16*theta + lambda^-1*theta + 3").unwrap();
        assert_eq!(h.var(), "lambda");
        assert_eq!(h.coeff(1).coeff(-1), q(1, 1));
        let g = parse_operator("- 3/2 * x^(-2) * theta").unwrap();
        assert_eq!(g.coeff(1).coeff(-2), q(-3, 2));
    }

    #[test]
    fn display_round_trips() {
        let h = parse_operator("16*theta^2 + 16*theta + x^-1*theta + 3 - 1/7*x^3").unwrap();
        assert_eq!(parse_operator(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_operator("").is_err());
        assert!(parse_operator("x*theta^-1").is_err());
        assert!(parse_operator("x*y").is_err());
        assert!(parse_operator("theta +").is_err());
        assert!(parse_operator("2^3").is_err());
    }
}
