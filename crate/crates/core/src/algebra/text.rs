//! Text form of polynomials: `re im : word` terms separated by `;`.
//!
//! A word is a space-separated list of letters `P.q.p` (`P` is `A` or `B`,
//! `q` the question, `p` the answer or exponent) or `1` for the identity.
//! The empty string is the zero polynomial.
//!
//! ```text
//! 1 0 : 1; -0.5 0.8660254037844386 : A.1.1 B.1.1
//! ```

use std::fmt;

use crate::algebra::{AlgebraSignature, Letter, Party, Polynomial};
use crate::error::{Error, Result};
use crate::scalar::{fmt_exact, Real, C};

impl<T: Real> Polynomial<T> {
    /// Parses the text form. Words are canonicalized; repeated words add up.
    pub fn parse(text: &str, sig: AlgebraSignature) -> Result<Self> {
        let mut out = Polynomial::zero(sig);
        for (i, raw) in text.split(';').enumerate() {
            let term = raw.trim();
            if term.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                location: format!("term {} `{}`", i + 1, term),
                message,
            };
            let (coeff, word) = term
                .split_once(':')
                .ok_or_else(|| err("expected `re im : word`".into()))?;
            let nums: Vec<&str> = coeff.split_whitespace().collect();
            if nums.len() != 2 {
                return Err(err(format!(
                    "expected two coefficient numbers, found {}",
                    nums.len()
                )));
            }
            let parse_num = |s: &str| -> Result<T> {
                let v: f64 = s
                    .parse()
                    .map_err(|_| err(format!("bad number `{s}`")))?;
                if !v.is_finite() {
                    return Err(err(format!("non-finite number `{s}`")));
                }
                Ok(T::lit(v))
            };
            let c = C::new(parse_num(nums[0])?, parse_num(nums[1])?);
            let letters = parse_word(word).map_err(err)?;
            let p = Polynomial::from_word(sig, &letters, c).map_err(|e| err(e.to_string()))?;
            out.add_scaled(&p, crate::scalar::cone());
        }
        Ok(out)
    }
}

fn parse_word(word: &str) -> std::result::Result<Vec<Letter>, String> {
    let tokens: Vec<&str> = word.split_whitespace().collect();
    match tokens.as_slice() {
        [] => Err("missing word (use `1` for the identity)".into()),
        ["1"] => Ok(Vec::new()),
        _ => tokens.iter().map(|t| parse_letter(t)).collect(),
    }
}

fn parse_letter(tok: &str) -> std::result::Result<Letter, String> {
    let parts: Vec<&str> = tok.split('.').collect();
    if parts.len() != 3 {
        return Err(format!("bad letter `{tok}`"));
    }
    let party = match parts[0] {
        "A" => Party::Alice,
        "B" => Party::Bob,
        p => return Err(format!("unknown party `{p}` in `{tok}`")),
    };
    let num = |s: &str| {
        s.parse::<u16>()
            .map_err(|_| format!("bad index `{s}` in `{tok}`"))
    };
    Ok(Letter {
        party,
        question: num(parts[1])?,
        payload: num(parts[2])?,
    })
}

impl<T: Real> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} {} : {}", fmt_exact(c.re), fmt_exact(c.im), m)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorKind;

    fn sig() -> AlgebraSignature {
        AlgebraSignature::new(2, 2, 3, 3, GeneratorKind::Observable).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        let text = "1 0 : 1; -0.5 0.8660254037844386 : A.1.1 B.1.1; 0.1 -3e-20 : B.0.2";
        let p = Polynomial::<f64>::parse(text, sig()).unwrap();
        assert_eq!(p.len(), 3);
        let q = Polynomial::<f64>::parse(&p.to_string(), sig()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn words_are_canonicalized_and_merged() {
        let p = Polynomial::<f64>::parse("1 0 : B.0.1 A.0.1; 2 0 : A.0.2 A.0.2 B.0.1", sig()).unwrap();
        assert_eq!(p.to_string(), "3 0 : A.0.1 B.0.1");
    }

    #[test]
    fn empty_text_is_zero() {
        assert!(Polynomial::<f64>::parse("  ", sig()).unwrap().is_zero());
        assert_eq!(Polynomial::<f64>::zero(sig()).to_string(), "");
    }

    #[test]
    fn malformed_terms_are_rejected() {
        for bad in [
            "1 : A.0.1",
            "1 0 A.0.1",
            "1 0 :",
            "1 0 : C.0.1",
            "1 0 : A.0",
            "1 0 : A.5.1",
            "1 0 : A.0.0",
            "x 0 : 1",
            "nan 0 : 1",
        ] {
            let e = Polynomial::<f64>::parse(bad, sig()).unwrap_err();
            assert!(matches!(e, Error::Parse { .. }), "{bad}: {e}");
        }
    }
}
