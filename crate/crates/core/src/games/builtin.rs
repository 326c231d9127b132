//! Built-in corpus: `chsh`, `matching`, `b3`, `bn:<n>` and `xor:<table>`.

use crate::algebra::{AlgebraSignature, GeneratorKind, Letter, Polynomial};
use crate::error::{Error, Result};
use crate::games::{reference_polynomial, GamePolynomial, NonlocalGame};
use crate::scalar::{root_of_unity, Real};

/// A game given by its rules, or directly by an objective polynomial.
#[derive(Clone, Debug, PartialEq)]
pub enum GameSpec {
    Game(NonlocalGame),
    Polynomial(GamePolynomial<f64>),
}

impl GameSpec {
    pub fn name(&self) -> &str {
        match self {
            GameSpec::Game(g) => g.name(),
            GameSpec::Polynomial(p) => p.name(),
        }
    }

    pub fn game(&self) -> Option<&NonlocalGame> {
        match self {
            GameSpec::Game(g) => Some(g),
            GameSpec::Polynomial(_) => None,
        }
    }

    /// The polynomial handed to the relaxations.
    pub fn target<T: Real>(&self) -> Result<GamePolynomial<T>> {
        match self {
            GameSpec::Game(g) => reference_polynomial(g),
            GameSpec::Polynomial(p) => Ok(p.cast()),
        }
    }
}

impl<T: Real> GamePolynomial<T> {
    pub fn cast<U: Real>(&self) -> GamePolynomial<U> {
        GamePolynomial {
            name: self.name.clone(),
            poly: self.poly.cast(),
            scale_note: self.scale_note.clone(),
            probability: self.probability,
        }
    }
}

/// Names and one-line descriptions of the built-in games.
pub fn builtin_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("chsh", "CHSH: 2 questions, 2 answers, win iff a xor b = x and y"),
        (
            "matching",
            "bipartite matching: 3 questions, 2 answers, a = b iff x = y (value scale 18 P_G - 9)",
        ),
        (
            "b3",
            "symmetrized 3-answer CHSH polynomial in order-3 observables, optimal value 6",
        ),
        ("bn:<n>", "n-answer CHSH: a = b for y = 0, a + b = x mod n for y = 1"),
        (
            "xor:<table>",
            "XOR game from a sign table, rows separated by commas (chsh = xor:++,+-)",
        ),
    ]
}

/// Looks up a built-in game by name.
pub fn builtin(name: &str) -> Result<GameSpec> {
    match name {
        "chsh" => Ok(GameSpec::Game(chsh())),
        "matching" => Ok(GameSpec::Game(matching())),
        "b3" => Ok(GameSpec::Polynomial(b3())),
        _ => {
            if let Some(n) = name.strip_prefix("bn:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::UnknownGame(name.to_string()))?;
                if n < 2 {
                    return Err(Error::InvalidInput(format!("{name}: need at least 2 answers")));
                }
                return Ok(GameSpec::Game(bn(n)?));
            }
            if let Some(table) = name.strip_prefix("xor:") {
                return Ok(GameSpec::Game(xor(name, table)?));
            }
            Err(Error::UnknownGame(name.to_string()))
        }
    }
}

fn chsh() -> NonlocalGame {
    NonlocalGame::from_predicate("chsh", [2, 2, 2, 2], |a, b, x, y| (a ^ b) == (x & y))
        .expect("valid game")
}

pub(crate) fn matching() -> NonlocalGame {
    NonlocalGame::from_predicate("matching", [3, 3, 2, 2], |a, b, x, y| (x == y) == (a == b))
        .expect("valid game")
}

fn bn(n: usize) -> Result<NonlocalGame> {
    NonlocalGame::from_predicate(format!("bn:{n}"), [2, 2, n, n], move |a, b, x, y| match y {
        0 => a == b,
        _ => (a + b) % n == x,
    })
}

fn xor(name: &str, table: &str) -> Result<NonlocalGame> {
    let rows: Vec<Vec<bool>> = table
        .split(',')
        .map(|r| {
            r.chars()
                .map(|c| match c {
                    '+' => Ok(true),
                    '-' => Ok(false),
                    _ => Err(Error::InvalidInput(format!(
                        "{name}: sign table may only contain '+', '-' and ','"
                    ))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let yq = rows[0].len();
    if yq == 0 || rows.iter().any(|r| r.len() != yq) {
        return Err(Error::InvalidInput(format!(
            "{name}: sign table rows must be nonempty and of equal length"
        )));
    }
    NonlocalGame::from_predicate(name, [rows.len(), yq, 2, 2], |a, b, x, y| {
        (a == b) == rows[x][y]
    })
}

fn b3() -> GamePolynomial<f64> {
    let sig = AlgebraSignature::new(2, 2, 3, 3, GeneratorKind::Observable).expect("valid");
    let w = root_of_unity::<f64>(3, 1);
    let one = root_of_unity::<f64>(3, 0);
    let mut poly = Polynomial::zero(sig);
    for (x, y, c) in [(0, 0, one), (0, 1, one), (1, 0, one), (1, 1, w)] {
        // c·A_x B_y + conj(c)·A_x² B_y²
        for (j, cj) in [(1, c), (2, c.conj())] {
            let term = Polynomial::from_word(sig, &[Letter::alice(x, j), Letter::bob(y, j)], cj)
                .expect("valid letters");
            poly.add_scaled(&term, one);
        }
    }
    GamePolynomial::new(
        "b3",
        poly,
        Some(
            "symmetrized 3-answer CHSH polynomial (B_0^2 -> B_0, w^2 -> w); \
             proportional to the game polynomial, optimal value 6"
                .into(),
        ),
        None,
    )
    .expect("Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Monomial;
    use crate::scalar::C;

    #[test]
    fn chsh_and_its_xor_table_agree() {
        let a = builtin("chsh").unwrap();
        let b = builtin("xor:++,+-").unwrap();
        assert!(a.game().unwrap().same_rules(b.game().unwrap()));
        assert!(a.game().unwrap().wins(0, 0, 0, 0));
    }

    #[test]
    fn b3_has_the_eight_listed_terms() {
        let gp = b3();
        let sig = *gp.signature();
        let w = C::new(-0.5, 3f64.sqrt() / 2.0);
        let expect = [
            (0, 1, 0, 1, C::new(1.0, 0.0)),
            (0, 2, 0, 2, C::new(1.0, 0.0)),
            (0, 1, 1, 1, C::new(1.0, 0.0)),
            (0, 2, 1, 2, C::new(1.0, 0.0)),
            (1, 1, 0, 1, C::new(1.0, 0.0)),
            (1, 2, 0, 2, C::new(1.0, 0.0)),
            (1, 1, 1, 1, w),
            (1, 2, 1, 2, w * w),
        ];
        assert_eq!(gp.poly().len(), 8);
        for (x, i, y, j, c) in expect {
            let m = Monomial::identity()
                .mul(&Monomial::from_letter(Letter::alice(x, i)), &sig)
                .unwrap()
                .mul(&Monomial::from_letter(Letter::bob(y, j)), &sig)
                .unwrap();
            assert!((gp.poly().coeff(&m) - c).norm() < 1e-15, "{m}");
        }
        assert!(gp.poly().is_hermitian(1e-15));
    }

    #[test]
    fn bn_winning_conditions() {
        let g = builtin("bn:3").unwrap();
        let g = g.game().unwrap();
        assert!(g.wins(2, 2, 0, 0) && g.wins(1, 1, 1, 0));
        assert!(g.wins(1, 2, 0, 1) && !g.wins(1, 1, 0, 1));
        // x = 1, y = 1: ω^a ω^b = ω.
        assert!(g.wins(2, 2, 1, 1) && g.wins(0, 1, 1, 1) && !g.wins(0, 0, 1, 1));
    }

    #[test]
    fn bad_names_are_rejected() {
        for name in ["nope", "bn:x", "xor:+a", "xor:++,+", "xor:"] {
            assert!(builtin(name).is_err(), "{name}");
        }
        assert!(matches!(builtin("nope"), Err(Error::UnknownGame(_))));
    }
}
