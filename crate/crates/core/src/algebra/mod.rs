//! Noncommutative words and polynomials over the game algebra.
//!
//! Generators are either PVM projectors `M_{a,x}` / `N_{b,y}` or finite-order
//! observables `A_x^j` / `B_y^j`. Alice and Bob generators commute with each
//! other, so every word is stored with all Alice letters first.

mod fourier;
mod polynomial;
mod text;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fourier::{reduce_answer_zero, reduce_answer_zero_party, to_observables, to_projectors};
pub use polynomial::{equal_mod_relations, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn symbol(self) -> char {
        match self {
            Party::Alice => 'A',
            Party::Bob => 'B',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    /// Orthogonal projectors, payload is the answer.
    Projector,
    /// Unitaries of order `d` (the answer count), payload is the exponent.
    Observable,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::Projector => f.write_str("projector"),
            GeneratorKind::Observable => f.write_str("observable"),
        }
    }
}

/// Question and answer counts of both parties plus the generator kind.
///
/// Answer counts are uniform across questions of a party. For observables the
/// answer count is the order `d` of every generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraSignature {
    pub alice_questions: usize,
    pub bob_questions: usize,
    pub alice_answers: usize,
    pub bob_answers: usize,
    #[serde(rename = "generator_kind")]
    pub kind: GeneratorKind,
}

impl AlgebraSignature {
    pub fn new(
        alice_questions: usize,
        bob_questions: usize,
        alice_answers: usize,
        bob_answers: usize,
        kind: GeneratorKind,
    ) -> Result<Self> {
        let sig = Self {
            alice_questions,
            bob_questions,
            alice_answers,
            bob_answers,
            kind,
        };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alice_questions", self.alice_questions),
            ("bob_questions", self.bob_questions),
            ("alice_answers", self.alice_answers),
            ("bob_answers", self.bob_answers),
        ] {
            if v == 0 {
                return Err(Error::InvalidInput(format!("{name} must be at least 1")));
            }
            if v > u16::MAX as usize {
                return Err(Error::InvalidInput(format!("{name} = {v} is too large")));
            }
        }
        Ok(())
    }

    pub fn questions(&self, party: Party) -> usize {
        match party {
            Party::Alice => self.alice_questions,
            Party::Bob => self.bob_questions,
        }
    }

    pub fn answers(&self, party: Party) -> usize {
        match party {
            Party::Alice => self.alice_answers,
            Party::Bob => self.bob_answers,
        }
    }

    pub fn with_kind(&self, kind: GeneratorKind) -> Self {
        Self { kind, ..*self }
    }

    /// Checks that `letter` names an existing generator. Exponent 0 is rejected
    /// because it denotes the identity.
    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        let q = letter.question as usize;
        let p = letter.payload as usize;
        let nq = self.questions(letter.party);
        let na = self.answers(letter.party);
        if q >= nq {
            return Err(Error::InvalidInput(format!(
                "letter {letter}: question {q} out of range ({nq} questions)"
            )));
        }
        match self.kind {
            GeneratorKind::Projector if p >= na => Err(Error::InvalidInput(format!(
                "letter {letter}: answer {p} out of range ({na} answers)"
            ))),
            GeneratorKind::Observable if p == 0 || p >= na => Err(Error::InvalidInput(format!(
                "letter {letter}: exponent {p} outside 1..{na}"
            ))),
            _ => Ok(()),
        }
    }

    /// Generators left after removing answer 0 of every question (projectors),
    /// or all non-trivial powers (observables), for one party.
    pub fn basis_letters(&self, party: Party) -> Vec<Letter> {
        let mut out = Vec::new();
        for q in 0..self.questions(party) {
            for p in 1..self.answers(party) {
                out.push(Letter::new(party, q, p));
            }
        }
        out
    }
}

/// One generator: `M_{a,x}`/`N_{b,y}` or `A_x^j`/`B_y^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub party: Party,
    pub question: u16,
    pub payload: u16,
}

impl Letter {
    pub fn new(party: Party, question: usize, payload: usize) -> Self {
        Self {
            party,
            question: question as u16,
            payload: payload as u16,
        }
    }

    pub fn alice(question: usize, payload: usize) -> Self {
        Self::new(Party::Alice, question, payload)
    }

    pub fn bob(question: usize, payload: usize) -> Self {
        Self::new(Party::Bob, question, payload)
    }

    /// Adjoint letter as a word of length ≤ 1 (`None` is the identity).
    fn adjoint(self, sig: &AlgebraSignature) -> Letter {
        match sig.kind {
            GeneratorKind::Projector => self,
            GeneratorKind::Observable => {
                let d = sig.answers(self.party) as u16;
                Letter {
                    payload: (d - self.payload) % d,
                    ..self
                }
            }
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.party.symbol(), self.question, self.payload)
    }
}

/// A canonical word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<Letter>);

impl Monomial {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn alice_part(&self) -> &[Letter] {
        let split = self.split_point();
        &self.0[..split]
    }

    pub fn bob_part(&self) -> &[Letter] {
        let split = self.split_point();
        &self.0[split..]
    }

    fn split_point(&self) -> usize {
        self.0
            .iter()
            .position(|l| l.party == Party::Bob)
            .unwrap_or(self.0.len())
    }

    /// Distinct Alice questions occurring in the word.
    pub fn alice_questions(&self) -> impl Iterator<Item = usize> + '_ {
        self.alice_part().iter().map(|l| l.question as usize)
    }

    /// Canonical product `self · rhs`, or `None` when it vanishes.
    pub fn mul(&self, rhs: &Monomial, sig: &AlgebraSignature) -> Option<Monomial> {
        let mut alice = Vec::with_capacity(self.0.len() + rhs.0.len());
        let mut bob = Vec::new();
        for &l in self.0.iter().chain(rhs.0.iter()) {
            let stack = if l.party == Party::Alice { &mut alice } else { &mut bob };
            if !push_reduced(stack, l, sig) {
                return None;
            }
        }
        alice.extend(bob);
        Some(Monomial(alice))
    }

    /// Canonical adjoint (reverse, conjugate each letter).
    pub fn adjoint(&self, sig: &AlgebraSignature) -> Monomial {
        let word: Vec<Letter> = self.0.iter().rev().map(|l| l.adjoint(sig)).collect();
        canonicalize_unchecked(&word, sig).expect("adjoint of a nonzero word is nonzero")
    }

    pub fn from_letter(l: Letter) -> Self {
        Self(vec![l])
    }

    /// Wraps letters already in canonical order (e.g. a party's part of a
    /// canonical word).
    pub(crate) fn from_canonical(letters: Vec<Letter>) -> Self {
        Self(letters)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Pushes `l` onto a single-party stack, merging with the top letter when it
/// belongs to the same question. Returns `false` if the word vanishes.
fn push_reduced(stack: &mut Vec<Letter>, l: Letter, sig: &AlgebraSignature) -> bool {
    match sig.kind {
        GeneratorKind::Projector => match stack.last() {
            Some(top) if top.question == l.question => top.payload == l.payload,
            _ => {
                stack.push(l);
                true
            }
        },
        GeneratorKind::Observable => {
            let d = sig.answers(l.party) as u16;
            let mut cur = l;
            loop {
                match stack.last() {
                    Some(top) if top.question == cur.question => {
                        let e = (top.payload + cur.payload) % d;
                        stack.pop();
                        if e == 0 {
                            return true;
                        }
                        cur = Letter { payload: e, ..cur };
                    }
                    _ => {
                        if cur.payload % d != 0 {
                            stack.push(cur);
                        }
                        return true;
                    }
                }
            }
        }
    }
}

fn canonicalize_unchecked(word: &[Letter], sig: &AlgebraSignature) -> Option<Monomial> {
    Monomial::identity().mul(&Monomial(word.to_vec()), sig)
}

/// Reduces a raw word to its canonical monomial, or `None` (the distinguished
/// Zero) when an orthogonality relation annihilates it.
pub fn canonicalize(word: &[Letter], sig: &AlgebraSignature) -> Result<Option<Monomial>> {
    for &l in word {
        sig.check_letter(l)?;
    }
    Ok(canonicalize_unchecked(word, sig))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proj() -> AlgebraSignature {
        AlgebraSignature::new(2, 2, 3, 3, GeneratorKind::Projector).unwrap()
    }

    fn obs(d: usize) -> AlgebraSignature {
        AlgebraSignature::new(2, 2, d, d, GeneratorKind::Observable).unwrap()
    }

    #[test]
    fn projector_idempotence_and_orthogonality() {
        let sig = proj();
        let m = Letter::alice(1, 2);
        assert_eq!(
            canonicalize(&[m, m], &sig).unwrap(),
            Some(Monomial::from_letter(m))
        );
        assert_eq!(canonicalize(&[m, Letter::alice(1, 0)], &sig).unwrap(), None);
    }

    #[test]
    fn bob_letters_move_behind_alice() {
        let sig = proj();
        let (a, b) = (Letter::alice(0, 1), Letter::bob(1, 2));
        assert_eq!(
            canonicalize(&[b, a], &sig).unwrap().unwrap().letters(),
            &[a, b]
        );
    }

    #[test]
    fn observable_exponents_add_mod_d() {
        let sig = obs(3);
        let a2 = Letter::alice(0, 2);
        let got = canonicalize(&[a2, a2], &sig).unwrap().unwrap();
        assert_eq!(got.letters(), &[Letter::alice(0, 1)]);
        // A0 A1 A1^2 A0^2 collapses completely.
        let w = [
            Letter::alice(0, 1),
            Letter::alice(1, 1),
            Letter::alice(1, 2),
            Letter::alice(0, 2),
        ];
        assert!(canonicalize(&w, &sig).unwrap().unwrap().is_identity());
    }

    #[test]
    fn distinct_question_order_is_kept() {
        let sig = proj();
        let w = [Letter::alice(1, 1), Letter::bob(0, 1), Letter::alice(0, 2)];
        let m = canonicalize(&w, &sig).unwrap().unwrap();
        assert_eq!(
            m.letters(),
            &[Letter::alice(1, 1), Letter::alice(0, 2), Letter::bob(0, 1)]
        );
    }

    #[test]
    fn out_of_range_letters_are_rejected() {
        let sig = proj();
        assert!(matches!(
            canonicalize(&[Letter::alice(2, 0)], &sig),
            Err(Error::InvalidInput(_))
        ));
        assert!(canonicalize(&[Letter::bob(0, 3)], &sig).is_err());
        assert!(canonicalize(&[Letter::bob(0, 0)], &obs(3)).is_err());
    }

    #[test]
    fn adjoint_of_observable_word() {
        let sig = obs(3);
        let m = canonicalize(&[Letter::alice(1, 1), Letter::bob(1, 1)], &sig)
            .unwrap()
            .unwrap();
        let adj = m.adjoint(&sig);
        assert_eq!(adj.letters(), &[Letter::alice(1, 2), Letter::bob(1, 2)]);
    }
}
