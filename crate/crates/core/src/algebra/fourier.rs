//! Conversion between projector and observable generators, and elimination
//! of the answer-0 projectors via `M_{0,x} = I − Σ_{a≥1} M_{a,x}`.

use crate::algebra::{GeneratorKind, Letter, Monomial, Party, Polynomial};
use crate::error::{Error, Result};
use crate::scalar::{cone, creal, root_of_unity, Real};

/// Rewrites a projector polynomial in observables using
/// `M_{a,x} = (1/d) Σ_j ω_d^{−a·j} M_x^j`.
pub fn to_observables<T: Real>(p: &Polynomial<T>) -> Result<Polynomial<T>> {
    let sig = *p.signature();
    if sig.kind != GeneratorKind::Projector {
        return Err(Error::InvalidInput(
            "to_observables expects a projector polynomial".into(),
        ));
    }
    let target = sig.with_kind(GeneratorKind::Observable);
    substitute(p, target, |l| {
        let d = sig.answers(l.party);
        let a = l.payload as i64;
        let inv_d = T::one() / T::from_usize(d).unwrap();
        let mut e = Polynomial::constant(target, creal(inv_d));
        for j in 1..d {
            let w = root_of_unity::<T>(d, -a * j as i64) * inv_d;
            e.add_term(
                Monomial::from_letter(Letter::new(l.party, l.question as usize, j)),
                w,
            );
        }
        e
    })
}

/// Rewrites an observable polynomial in projectors using
/// `M_x^j = Σ_a ω_d^{a·j} M_{a,x}`, then eliminates the answer-0 projectors.
///
/// The elimination makes this the exact inverse of [`to_observables`] on
/// polynomials that contain no answer-0 letters.
pub fn to_projectors<T: Real>(p: &Polynomial<T>) -> Result<Polynomial<T>> {
    let sig = *p.signature();
    if sig.kind != GeneratorKind::Observable {
        return Err(Error::InvalidInput(
            "to_projectors expects an observable polynomial".into(),
        ));
    }
    let target = sig.with_kind(GeneratorKind::Projector);
    let raw = substitute(p, target, |l| {
        let d = sig.answers(l.party);
        let j = l.payload as i64;
        let mut e = Polynomial::zero(target);
        for a in 0..d {
            e.add_term(
                Monomial::from_letter(Letter::new(l.party, l.question as usize, a)),
                root_of_unity::<T>(d, a as i64 * j),
            );
        }
        e
    })?;
    Ok(reduce_answer_zero(&raw))
}

/// Substitutes `M_{0,x} = I − Σ_{a≥1} M_{a,x}` (and the same for Bob) so that
/// the result is expressed in linearly independent words. Observable
/// polynomials are returned unchanged.
pub fn reduce_answer_zero<T: Real>(p: &Polynomial<T>) -> Polynomial<T> {
    reduce_parties(p, &[Party::Alice, Party::Bob])
}

/// Like [`reduce_answer_zero`] but only for the given party's generators.
pub fn reduce_answer_zero_party<T: Real>(p: &Polynomial<T>, party: Party) -> Polynomial<T> {
    reduce_parties(p, &[party])
}

fn reduce_parties<T: Real>(p: &Polynomial<T>, parties: &[Party]) -> Polynomial<T> {
    let sig = *p.signature();
    if sig.kind != GeneratorKind::Projector {
        return p.clone();
    }
    let eliminated = |l: &Letter| l.payload == 0 && parties.contains(&l.party);
    let mut out = Polynomial::zero(sig);
    for (m, c) in p.terms() {
        if !m.letters().iter().any(eliminated) {
            out.add_term(m.clone(), *c);
            continue;
        }
        let mut acc = Polynomial::constant(sig, *c);
        for l in m.letters() {
            let factor = if eliminated(l) {
                let mut f = Polynomial::identity(sig);
                for a in 1..sig.answers(l.party) {
                    f.add_term(
                        Monomial::from_letter(Letter::new(l.party, l.question as usize, a)),
                        -cone::<T>(),
                    );
                }
                f
            } else {
                Polynomial::from_monomial(sig, Monomial::from_letter(*l), cone())
            };
            acc = &acc * &factor;
        }
        out.add_scaled(&acc, cone());
    }
    out
}

fn substitute<T: Real, F>(
    p: &Polynomial<T>,
    target: crate::algebra::AlgebraSignature,
    expand: F,
) -> Result<Polynomial<T>>
where
    F: Fn(Letter) -> Polynomial<T>,
{
    let mut out = Polynomial::zero(target);
    for (m, c) in p.terms() {
        let mut acc = Polynomial::constant(target, *c);
        for &l in m.letters() {
            acc = acc.multiply(&expand(l))?;
        }
        out.add_scaled(&acc, cone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{equal_mod_relations, AlgebraSignature};

    fn sig(d: usize, kind: GeneratorKind) -> AlgebraSignature {
        AlgebraSignature::new(2, 2, d, d, kind).unwrap()
    }

    #[test]
    fn observable_maps_to_fourier_sum_of_projectors() {
        for d in 2..=4 {
            let s = sig(d, GeneratorKind::Observable);
            let a = Polynomial::<f64>::letter(s, Letter::alice(1, 1)).unwrap();
            let got = to_projectors(&a).unwrap();
            // Σ_a ω^a M_a with M_0 eliminated: 1·(I − Σ_{a≥1} M_a) + Σ_{a≥1} ω^a M_a.
            let ps = s.with_kind(GeneratorKind::Projector);
            let mut expect = Polynomial::identity(ps);
            for a in 1..d {
                let w = root_of_unity::<f64>(d, a as i64) - cone::<f64>();
                expect.add_term(Monomial::from_letter(Letter::alice(1, a)), w);
            }
            assert!(equal_mod_relations(&got, &expect, 1e-14), "d={d}");
        }
    }

    #[test]
    fn projector_round_trip_is_identity_for_reduced_letters() {
        for d in 2..=4 {
            let s = sig(d, GeneratorKind::Projector);
            for a in 1..d {
                let m = Polynomial::<f64>::letter(s, Letter::bob(0, a)).unwrap();
                let back = to_projectors(&to_observables(&m).unwrap()).unwrap();
                assert!(equal_mod_relations(&back, &m, 1e-13), "d={d} a={a}");
            }
            let m0 = Polynomial::<f64>::letter(s, Letter::bob(0, 0)).unwrap();
            let back = to_projectors(&to_observables(&m0).unwrap()).unwrap();
            assert!(equal_mod_relations(&back, &reduce_answer_zero(&m0), 1e-13));
        }
    }

    #[test]
    fn binary_pair_becomes_identity_and_sign_observable() {
        let s = sig(2, GeneratorKind::Projector);
        let m0 = Polynomial::<f64>::letter(s, Letter::alice(0, 0)).unwrap();
        let m1 = Polynomial::<f64>::letter(s, Letter::alice(0, 1)).unwrap();
        let os = s.with_kind(GeneratorKind::Observable);
        let a = Polynomial::letter(os, Letter::alice(0, 1)).unwrap();
        assert_eq!(to_observables(&(&m0 + &m1)).unwrap(), Polynomial::identity(os));
        assert_eq!(to_observables(&(&m0 - &m1)).unwrap(), a);
    }

    #[test]
    fn reduction_touches_only_requested_party() {
        let s = sig(3, GeneratorKind::Projector);
        let p = Polynomial::<f64>::from_word(s, &[Letter::alice(0, 0), Letter::bob(1, 0)], cone())
            .unwrap();
        let bob_only = reduce_answer_zero_party(&p, Party::Bob);
        assert_eq!(bob_only.len(), 3);
        assert!(bob_only
            .terms()
            .all(|(m, _)| m.alice_part() == [Letter::alice(0, 0)]));
        assert_eq!(reduce_answer_zero(&p).len(), 9);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let p = Polynomial::<f64>::identity(sig(2, GeneratorKind::Observable));
        assert!(to_observables(&p).is_err());
        assert!(to_projectors(&Polynomial::<f64>::identity(sig(2, GeneratorKind::Projector))).is_err());
    }
}
