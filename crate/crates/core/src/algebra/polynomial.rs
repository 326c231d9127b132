use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::{canonicalize, AlgebraSignature, Letter, Monomial};
use crate::error::{Error, Result};
use crate::scalar::{cabs, cone, creal, Real, C};

/// Finite complex linear combination of canonical monomials.
///
/// Terms are kept in a `BTreeMap`, so iteration order (and everything derived
/// from it) is deterministic. Coefficients that are exactly zero are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Real> {
    sig: AlgebraSignature,
    terms: BTreeMap<Monomial, C<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn zero(sig: AlgebraSignature) -> Self {
        Self {
            sig,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(sig: AlgebraSignature) -> Self {
        Self::from_monomial(sig, Monomial::identity(), cone())
    }

    pub fn constant(sig: AlgebraSignature, c: C<T>) -> Self {
        Self::from_monomial(sig, Monomial::identity(), c)
    }

    pub fn from_monomial(sig: AlgebraSignature, m: Monomial, c: C<T>) -> Self {
        let mut p = Self::zero(sig);
        p.add_term(m, c);
        p
    }

    /// `c · w` for a raw word `w`; validates and canonicalizes the word.
    pub fn from_word(sig: AlgebraSignature, word: &[Letter], c: C<T>) -> Result<Self> {
        let mut p = Self::zero(sig);
        if let Some(m) = canonicalize(word, &sig)? {
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn letter(sig: AlgebraSignature, l: Letter) -> Result<Self> {
        Self::from_word(sig, &[l], cone())
    }

    /// Builds a polynomial from `(coefficient, raw word)` pairs.
    pub fn from_words<'a, I>(sig: AlgebraSignature, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (C<T>, &'a [Letter])>,
    {
        let mut p = Self::zero(sig);
        for (c, w) in terms {
            if let Some(m) = canonicalize(w, &sig)? {
                p.add_term(m, c);
            }
        }
        Ok(p)
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.sig
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C<T> {
        self.terms.get(m).copied().unwrap_or_else(crate::scalar::czero)
    }

    /// Adds `c · m`; `m` must already be canonical for this signature.
    pub fn add_term(&mut self, m: Monomial, c: C<T>) {
        if c.re == T::zero() && c.im == T::zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.re == T::zero() && s.im == T::zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &Polynomial<T>, c: C<T>) {
        assert_eq!(self.sig, other.sig, "signature mismatch in polynomial sum");
        for (m, v) in &other.terms {
            self.add_term(m.clone(), *v * c);
        }
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = Self::zero(self.sig);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), *v * c);
        }
        out
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(creal(c))
    }

    /// Product with canonicalization of every word.
    pub fn multiply(&self, rhs: &Polynomial<T>) -> Result<Self> {
        if self.sig != rhs.sig {
            return Err(Error::SignatureMismatch(format!(
                "{:?} vs {:?}",
                self.sig, rhs.sig
            )));
        }
        let mut out = Self::zero(self.sig);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some(m) = m1.mul(m2, &self.sig) {
                    out.add_term(m, *c1 * *c2);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate-linear anti-automorphism: reverses words, conjugates
    /// coefficients and maps observable exponents `j ↦ d − j`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.sig);
        for (m, c) in &self.terms {
            out.add_term(m.adjoint(&self.sig), c.conj());
        }
        out
    }

    /// `r† r`.
    pub fn hermitian_square(&self) -> Self {
        self.adjoint()
            .multiply(self)
            .expect("same signature by construction")
    }

    pub fn max_abs_coeff(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, c| acc.max(cabs(*c)))
    }

    /// Largest monomial degree, 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        (self - &self.adjoint()).max_abs_coeff() <= tol
    }

    /// Drops terms whose coefficient magnitude is at most `tol`.
    pub fn pruned(&self, tol: T) -> Self {
        Self {
            sig: self.sig,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| cabs(**c) > tol)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    /// Reinterprets the coefficients in another scalar type.
    pub fn cast<U: Real>(&self) -> Polynomial<U> {
        let mut out = Polynomial::zero(self.sig);
        for (m, c) in &self.terms {
            out.add_term(
                m.clone(),
                C::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy())),
            );
        }
        out
    }
}

/// `true` iff both polynomials share a signature and every coefficient of the
/// difference has magnitude at most `tol`. Only canonicalization is applied;
/// `Σ_a M_{a,x} = I` is not used.
pub fn equal_mod_relations<T: Real>(p: &Polynomial<T>, q: &Polynomial<T>, tol: T) -> bool {
    if p.sig != q.sig {
        return false;
    }
    (p - q).max_abs_coeff() <= tol
}

impl<'a, T: Real> Add<&'a Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;

    /// # Panics
    /// On signature mismatch.
    fn add(self, rhs: &'a Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        out.add_scaled(rhs, cone());
        out
    }
}

impl<'a, T: Real> Sub<&'a Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;

    /// # Panics
    /// On signature mismatch.
    fn sub(self, rhs: &'a Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        out.add_scaled(rhs, -cone::<T>());
        out
    }
}

impl<'a, T: Real> Mul<&'a Polynomial<T>> for &'a Polynomial<T> {
    type Output = Polynomial<T>;

    /// # Panics
    /// On signature mismatch; use [`Polynomial::multiply`] for a fallible product.
    fn mul(self, rhs: &'a Polynomial<T>) -> Polynomial<T> {
        self.multiply(rhs).expect("signature mismatch in polynomial product")
    }
}

impl<T: Real> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        self.scale(-cone::<T>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorKind;

    fn chsh_sig() -> AlgebraSignature {
        AlgebraSignature::new(2, 2, 2, 2, GeneratorKind::Projector).unwrap()
    }

    fn l(sig: AlgebraSignature, l: Letter) -> Polynomial<f64> {
        Polynomial::letter(sig, l).unwrap()
    }

    #[test]
    fn distribution_over_sums() {
        let sig = chsh_sig();
        let (m0, m1, n0) = (
            l(sig, Letter::alice(0, 0)),
            l(sig, Letter::alice(0, 1)),
            l(sig, Letter::bob(0, 0)),
        );
        let lhs = &(&m0 + &m1) * &n0;
        let rhs = &(&m0 * &n0) + &(&m1 * &n0);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.len(), 2);
    }

    #[test]
    fn identity_is_neutral() {
        let sig = chsh_sig();
        let p = &l(sig, Letter::alice(1, 1)) + &l(sig, Letter::bob(0, 0)).scale_real(3.0);
        assert_eq!(&Polynomial::identity(sig) * &p, p);
        assert_eq!(&p * &Polynomial::identity(sig), p);
    }

    #[test]
    fn difference_times_sum_of_binary_projectors() {
        // (M0 − M1)(M0 + M1) = M0 − M1 by idempotence and orthogonality.
        let sig = chsh_sig();
        let (m0, m1) = (l(sig, Letter::alice(0, 0)), l(sig, Letter::alice(0, 1)));
        let got = &(&m0 - &m1) * &(&m0 + &m1);
        assert_eq!(got, &m0 - &m1);
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = Polynomial::<f64>::identity(chsh_sig());
        let b = Polynomial::<f64>::identity(chsh_sig().with_kind(GeneratorKind::Observable));
        assert!(matches!(a.multiply(&b), Err(Error::SignatureMismatch(_))));
        assert!(!equal_mod_relations(&a, &b, 1.0));
    }

    #[test]
    fn sum_to_identity_is_not_a_rewrite_rule() {
        let sig = chsh_sig();
        let sum = &l(sig, Letter::alice(0, 0)) + &l(sig, Letter::alice(0, 1));
        assert!(!equal_mod_relations(&Polynomial::identity(sig), &sum, 0.0));
        assert!(equal_mod_relations(&sum, &sum.clone(), 0.0));
    }

    #[test]
    fn cancellation_removes_terms() {
        let sig = chsh_sig();
        let p = l(sig, Letter::alice(0, 1));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn adjoint_of_commuting_projectors() {
        let sig = chsh_sig();
        let p = &l(sig, Letter::alice(1, 0)) * &l(sig, Letter::bob(0, 1));
        assert_eq!(p.adjoint(), p);
    }

    #[test]
    fn observable_adjoint_conjugates_and_inverts() {
        let sig = AlgebraSignature::new(2, 2, 3, 3, GeneratorKind::Observable).unwrap();
        let w = crate::scalar::root_of_unity::<f64>(3, 1);
        let p = Polynomial::from_word(sig, &[Letter::alice(1, 1), Letter::bob(1, 1)], w).unwrap();
        let expect =
            Polynomial::from_word(sig, &[Letter::alice(1, 2), Letter::bob(1, 2)], w.conj()).unwrap();
        assert_eq!(p.adjoint(), expect);
    }
}
