//! Hand-written nice certificates for `b3` (degree 2) and `matching`
//! (degree 1), both in observable form.

use super::{SosCertificate, SquareTerm};
use crate::algebra::{AlgebraSignature, GeneratorKind, Letter, Polynomial};
use crate::scalar::{creal, root_of_unity, Real, C};

fn poly<T: Real>(sig: AlgebraSignature, terms: &[(C<T>, Vec<Letter>)]) -> Polynomial<T> {
    let mut p = Polynomial::zero(sig);
    for (c, word) in terms {
        let t = Polynomial::from_word(sig, word, *c).expect("fixture letters are valid");
        p.add_scaled(&t, creal(T::one()));
    }
    p
}

fn r<T: Real>(x: f64) -> C<T> {
    creal(T::lit(x))
}

/// `6 − P_b3 = Σ_{i=1}^{7} λ_i S_i† S_i` with exact rational weights.
pub fn b3_certificate<T: Real>() -> SosCertificate<T> {
    let sig = AlgebraSignature::new(2, 2, 3, 3, GeneratorKind::Observable).expect("valid");
    let w: C<T> = root_of_unity(3, 1);
    let w2 = w * w;
    let a = |x, j| Letter::alice(x, j);
    let b = |y, j| Letter::bob(y, j);
    let q = |n: f64, d: f64| r::<T>(n / d);

    let s1 = poly(
        sig,
        &[
            (r(12.0), vec![a(0, 1)]),
            (q(1.0, 4.0) - w, vec![b(1, 1), b(0, 1)]),
            (q(1.0, 4.0) - w2, vec![b(0, 1), b(1, 1)]),
            (q(13.0, 4.0) * w - r(7.0), vec![b(0, 2)]),
            (q(13.0, 4.0) * w2 - r(7.0), vec![b(1, 2)]),
        ],
    );
    let s2 = poly(
        sig,
        &[
            (r::<T>(12.0) * w2, vec![a(1, 1)]),
            (q(1.0, 4.0) - w2, vec![b(1, 1), b(0, 1)]),
            (q(1.0, 4.0) - w, vec![b(0, 1), b(1, 1)]),
            (q(13.0, 4.0) * w - r::<T>(7.0) * w2, vec![b(0, 2)]),
            (q(13.0, 4.0) * w2 - r::<T>(7.0) * w, vec![b(1, 2)]),
        ],
    );
    let s3 = poly(
        sig,
        &[
            (r(1.0), vec![b(0, 2)]),
            (w, vec![b(1, 2)]),
            (w2, vec![b(0, 1), b(1, 1)]),
            (w2, vec![b(1, 1), b(0, 1)]),
        ],
    );
    let five = r::<T>(5.0);
    let s4 = poly(
        sig,
        &[
            (r(114.0), vec![]),
            (five * w2 - r(48.0), vec![a(0, 1), b(0, 1)]),
            (five * w2 - r(23.0), vec![a(0, 2), b(0, 2)]),
            (five * w - r(48.0), vec![a(0, 1), b(1, 1)]),
            (five * w - r(23.0), vec![a(0, 2), b(1, 2)]),
        ],
    );
    let k5 = (five * w - r(3.0)) / T::lit(7.0);
    let s5 = poly(
        sig,
        &[
            (r(1.0), vec![a(0, 1), b(0, 1)]),
            (r(-1.0), vec![a(0, 2), b(1, 2)]),
            (k5, vec![a(0, 2), b(0, 2)]),
            (-k5, vec![a(0, 1), b(1, 1)]),
        ],
    );
    let s6 = poly(
        sig,
        &[
            (r(114.0), vec![]),
            (five * w - r(48.0), vec![a(1, 1), b(0, 1)]),
            (five * w - r(23.0), vec![a(1, 2), b(0, 2)]),
            ((five * w2 - r(48.0)) * w, vec![a(1, 1), b(1, 1)]),
            ((five * w2 - r(23.0)) * w2, vec![a(1, 2), b(1, 2)]),
        ],
    );
    let k7 = (five * w2 - r(3.0)) / T::lit(7.0);
    let s7 = poly(
        sig,
        &[
            (r(1.0), vec![a(1, 1), b(0, 1)]),
            (-w2, vec![a(1, 2), b(1, 2)]),
            (k7, vec![a(1, 2), b(0, 2)]),
            (-k7 * w, vec![a(1, 1), b(1, 1)]),
        ],
    );
    let weights = [
        (5.0, 1872.0),
        (5.0, 1872.0),
        (5.0, 4992.0),
        (1.0, 11856.0),
        (259.0, 1976.0),
        (1.0, 11856.0),
        (259.0, 1976.0),
    ];
    let mut cert = SosCertificate::new(T::lit(6.0), sig, "b3 nice degree-2 certificate");
    for ((n, d), s) in weights.into_iter().zip([s1, s2, s3, s4, s5, s6, s7]) {
        cert.terms.push(SquareTerm {
            lambda: T::lit(n / d),
            poly: s,
        });
    }
    cert
}

/// `6 − P_M = Σ_{i=1}^{4} T_i† T_i` for the matching game in the scale
/// `P_M = 18·P_G − 9`. Questions are numbered from 0.
///
/// `T_4` is Bob-only; all four terms are needed.
pub fn matching_certificate<T: Real>() -> SosCertificate<T> {
    let sig = AlgebraSignature::new(3, 3, 2, 2, GeneratorKind::Observable).expect("valid");
    let half = r::<T>(0.5);
    let mut cert = SosCertificate::new(T::lit(6.0), sig, "matching nice degree-1 certificate");
    for x in 0..3 {
        let mut terms: Vec<(C<T>, Vec<Letter>)> = vec![(r(1.0), vec![Letter::alice(x, 1)])];
        for y in 0..3 {
            let c = if y == x { -half } else { half };
            terms.push((c, vec![Letter::bob(y, 1)]));
        }
        cert.terms.push(SquareTerm {
            lambda: T::one(),
            poly: poly(sig, &terms),
        });
    }
    let bobs: Vec<(C<T>, Vec<Letter>)> = (0..3).map(|y| (half, vec![Letter::bob(y, 1)])).collect();
    cert.terms.push(SquareTerm {
        lambda: T::one(),
        poly: poly(sig, &bobs),
    });
    cert
}
