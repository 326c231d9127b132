//! Nonlocal games, their game polynomials and a brute-force classical value.

mod builtin;
mod io;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    to_observables, AlgebraSignature, GeneratorKind, Letter, Monomial, Polynomial,
};
use crate::error::{Error, Result};
use crate::scalar::{creal, Real};

pub use builtin::{builtin, builtin_names, GameSpec};
pub use io::{load_game, load_spec, save_game, save_spec};

/// Default cap on the number of deterministic strategy pairs examined by
/// [`classical_value`].
pub const DEFAULT_STRATEGY_BUDGET: f64 = 1e8;

const NORMALIZATION_TOL: f64 = 1e-12;

/// A two-player game `(X, Y, A, B, π, V)` with uniform answer alphabets.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlocalGame {
    name: String,
    alice_questions: usize,
    bob_questions: usize,
    alice_answers: usize,
    bob_answers: usize,
    /// `π(x, y)` at `x * bob_questions + y`.
    distribution: Vec<f64>,
    /// `V(a, b, x, y)`, see [`NonlocalGame::index`].
    winning: Vec<bool>,
}

impl NonlocalGame {
    /// Builds a game from explicit tables. `distribution` lists `(x, y, π)`
    /// entries (missing pairs have weight 0); `None` means uniform.
    /// `winning` lists the `(a, b, x, y)` tuples with `V = 1`.
    pub fn new(
        name: impl Into<String>,
        sig: [usize; 4],
        distribution: Option<&[(usize, usize, f64)]>,
        winning: &[[usize; 4]],
    ) -> Result<Self> {
        let [xq, yq, aa, ba] = sig;
        AlgebraSignature::new(xq, yq, aa, ba, GeneratorKind::Projector)?;
        let mut g = Self {
            name: name.into(),
            alice_questions: xq,
            bob_questions: yq,
            alice_answers: aa,
            bob_answers: ba,
            distribution: vec![0.0; xq * yq],
            winning: vec![false; xq * yq * aa * ba],
        };
        match distribution {
            None => g.distribution.fill(1.0 / (xq * yq) as f64),
            Some(entries) => {
                for (i, &(x, y, w)) in entries.iter().enumerate() {
                    check_range(&format!("distribution[{i}].x"), x, xq)?;
                    check_range(&format!("distribution[{i}].y"), y, yq)?;
                    if !(w.is_finite() && w >= 0.0) {
                        return Err(Error::InvalidInput(format!(
                            "distribution[{i}]: weight {w} must be a finite nonnegative number"
                        )));
                    }
                    g.distribution[x * yq + y] += w;
                }
            }
        }
        let total: f64 = g.distribution.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { total });
        }
        for (i, &[a, b, x, y]) in winning.iter().enumerate() {
            check_range(&format!("winning[{i}].a"), a, aa)?;
            check_range(&format!("winning[{i}].b"), b, ba)?;
            check_range(&format!("winning[{i}].x"), x, xq)?;
            check_range(&format!("winning[{i}].y"), y, yq)?;
            let k = g.index(a, b, x, y);
            g.winning[k] = true;
        }
        Ok(g)
    }

    /// Builds a game with uniform `π` from a predicate closure.
    pub fn from_predicate<F>(name: impl Into<String>, sig: [usize; 4], pred: F) -> Result<Self>
    where
        F: Fn(usize, usize, usize, usize) -> bool,
    {
        let [xq, yq, aa, ba] = sig;
        let mut winning = Vec::new();
        for x in 0..xq {
            for y in 0..yq {
                for a in 0..aa {
                    for b in 0..ba {
                        if pred(a, b, x, y) {
                            winning.push([a, b, x, y]);
                        }
                    }
                }
            }
        }
        Self::new(name, sig, None, &winning)
    }

    fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.bob_questions + y) * self.alice_answers + a) * self.bob_answers + b
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `[alice_questions, bob_questions, alice_answers, bob_answers]`.
    pub fn counts(&self) -> [usize; 4] {
        [
            self.alice_questions,
            self.bob_questions,
            self.alice_answers,
            self.bob_answers,
        ]
    }

    pub fn signature(&self) -> AlgebraSignature {
        AlgebraSignature {
            alice_questions: self.alice_questions,
            bob_questions: self.bob_questions,
            alice_answers: self.alice_answers,
            bob_answers: self.bob_answers,
            kind: GeneratorKind::Projector,
        }
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.distribution[x * self.bob_questions + y]
    }

    pub fn wins(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        self.winning[self.index(a, b, x, y)]
    }

    /// All winning tuples `(a, b, x, y)` in lexicographic `(x, y, a, b)` order.
    pub fn winning_tuples(&self) -> Vec<[usize; 4]> {
        let [xq, yq, aa, ba] = self.counts();
        let mut out = Vec::new();
        for x in 0..xq {
            for y in 0..yq {
                for a in 0..aa {
                    for b in 0..ba {
                        if self.wins(a, b, x, y) {
                            out.push([a, b, x, y]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Nonzero `(x, y, π)` entries.
    pub fn distribution_entries(&self) -> Vec<(usize, usize, f64)> {
        let yq = self.bob_questions;
        self.distribution
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(i, &w)| (i / yq, i % yq, w))
            .collect()
    }

    /// Same rules as `other`, ignoring the name.
    pub fn same_rules(&self, other: &NonlocalGame) -> bool {
        self.counts() == other.counts()
            && self.distribution == other.distribution
            && self.winning == other.winning
    }
}

fn check_range(field: &str, value: usize, limit: usize) -> Result<()> {
    if value >= limit {
        return Err(Error::OutOfRange {
            field: field.to_string(),
            value,
            limit,
        });
    }
    Ok(())
}

/// Affine map from a polynomial value to a winning probability:
/// `probability = offset + scale · value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityMap {
    pub offset: f64,
    pub scale: f64,
}

impl ProbabilityMap {
    pub const IDENTITY: ProbabilityMap = ProbabilityMap {
        offset: 0.0,
        scale: 1.0,
    };

    pub fn probability(&self, value: f64) -> f64 {
        self.offset + self.scale * value
    }

    pub fn value(&self, probability: f64) -> f64 {
        (probability - self.offset) / self.scale
    }
}

/// A Hermitian objective polynomial for the relaxations.
#[derive(Clone, Debug, PartialEq)]
pub struct GamePolynomial<T: Real> {
    name: String,
    poly: Polynomial<T>,
    scale_note: Option<String>,
    probability: Option<ProbabilityMap>,
}

impl<T: Real> GamePolynomial<T> {
    /// Wraps `poly`, which must be Hermitian to `1e-12` (relative to its
    /// largest coefficient when that exceeds 1).
    pub fn new(
        name: impl Into<String>,
        poly: Polynomial<T>,
        scale_note: Option<String>,
        probability: Option<ProbabilityMap>,
    ) -> Result<Self> {
        let diff = (&poly - &poly.adjoint()).max_abs_coeff().to_f64_lossy();
        let scale = poly.max_abs_coeff().to_f64_lossy().max(1.0);
        let tol = if std::mem::size_of::<T>() < 8 { 1e-6 } else { 1e-12 };
        if diff > tol * scale {
            return Err(Error::NotHermitian(diff));
        }
        Ok(Self {
            name: name.into(),
            poly,
            scale_note,
            probability,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poly(&self) -> &Polynomial<T> {
        &self.poly
    }

    pub fn signature(&self) -> &AlgebraSignature {
        self.poly.signature()
    }

    pub fn scale_note(&self) -> Option<&str> {
        self.scale_note.as_deref()
    }

    /// How polynomial values translate into winning probabilities, when known.
    pub fn probability(&self) -> Option<ProbabilityMap> {
        self.probability
    }
}

/// `P_G = Σ π(x,y) Σ V(a,b,x,y) M_{a,x} N_{b,y}` in projector form.
pub fn game_polynomial<T: Real>(g: &NonlocalGame) -> Result<GamePolynomial<T>> {
    let sig = g.signature();
    let mut poly = Polynomial::zero(sig);
    for [a, b, x, y] in g.winning_tuples() {
        let w = g.weight(x, y);
        if w == 0.0 {
            continue;
        }
        let m = Monomial::identity()
            .mul(&Monomial::from_letter(Letter::alice(x, a)), &sig)
            .and_then(|m| m.mul(&Monomial::from_letter(Letter::bob(y, b)), &sig))
            .expect("cross-party product never vanishes");
        poly.add_term(m, creal(T::lit(w)));
    }
    GamePolynomial::new(g.name(), poly, None, Some(ProbabilityMap::IDENTITY))
}

/// The polynomial the relaxations optimize for `g`.
///
/// This is the game polynomial itself, except for the bipartite matching game,
/// whose customary form is `P_M = 18·P_G − 9` in ±1 observables (quantum value
/// 6 rather than 5/6).
pub fn reference_polynomial<T: Real>(g: &NonlocalGame) -> Result<GamePolynomial<T>> {
    let gp = game_polynomial::<T>(g)?;
    if !g.same_rules(&builtin::matching()) {
        return Ok(gp);
    }
    let sig = g.signature();
    let shifted = &gp.poly.scale_real(T::lit(18.0))
        - &Polynomial::constant(sig, creal(T::lit(9.0)));
    let map = ProbabilityMap {
        offset: 0.5,
        scale: 1.0 / 18.0,
    };
    GamePolynomial::new(
        g.name(),
        to_observables(&shifted)?,
        Some("P_M = 18 P_G - 9 in +/-1 observables; winning probability = 1/2 + value/18".into()),
        Some(map),
    )
}

/// Best winning probability over deterministic strategies, by enumerating
/// Alice's strategies and letting Bob best-respond per question. Errors when
/// `|A|^|X| · |B|^|Y|` exceeds `budget`.
pub fn classical_value(g: &NonlocalGame, budget: f64) -> Result<f64> {
    let [xq, yq, aa, ba] = g.counts();
    let required = (aa as f64).powi(xq as i32) * (ba as f64).powi(yq as i32);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut alice = vec![0usize; xq];
    let mut best = 0.0f64;
    loop {
        let mut total = 0.0;
        for y in 0..yq {
            let mut best_b = 0.0f64;
            for b in 0..ba {
                let s: f64 = (0..xq)
                    .filter(|&x| g.wins(alice[x], b, x, y))
                    .map(|x| g.weight(x, y))
                    .sum();
                best_b = best_b.max(s);
            }
            total += best_b;
        }
        best = best.max(total);
        // Next Alice strategy in mixed radix.
        let mut i = 0;
        loop {
            if i == xq {
                return Ok(best);
            }
            alice[i] += 1;
            if alice[i] < aa {
                break;
            }
            alice[i] = 0;
            i += 1;
        }
    }
}
