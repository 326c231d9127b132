//! Sum-of-squares certificates `ν − P = Σ λ_i r_i† r_i + Σ μ_j s_j`.

mod fixtures;
mod io;

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::algebra::{reduce_answer_zero, AlgebraSignature, Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::games::GamePolynomial;
use crate::relaxation::{dual_data, SdpProblem};
use crate::scalar::{cabs, cone, creal, Real, C};
use crate::sdp::{SdpSolution, SolveStatus};

pub use fixtures::{b3_certificate, matching_certificate};
pub use io::{load_cert, save_cert, FORMAT_VERSION};

/// Default clamp for slightly negative dual-slack eigenvalues.
pub const DEFAULT_CLAMP_TOL: f64 = 1e-7;

/// One weighted square `λ · r† r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareTerm<T: Real> {
    pub lambda: T,
    pub poly: Polynomial<T>,
}

/// One multiple `μ · s` of a polynomial that vanishes on the game algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintTerm<T: Real> {
    pub mu: T,
    pub poly: Polynomial<T>,
}

/// Claim: `bound · I − P = Σ λ_i r_i† r_i + Σ μ_j s_j` modulo the relations.
///
/// Weights are nonnegative. The claim is checked by [`verify`], never
/// assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate<T: Real> {
    pub bound: T,
    pub terms: Vec<SquareTerm<T>>,
    pub constraint_part: Vec<ConstraintTerm<T>>,
    pub signature: AlgebraSignature,
    pub provenance: String,
}

impl<T: Real> SosCertificate<T> {
    pub fn new(bound: T, signature: AlgebraSignature, provenance: impl Into<String>) -> Self {
        Self {
            bound,
            terms: Vec::new(),
            constraint_part: Vec::new(),
            signature,
            provenance: provenance.into(),
        }
    }

    /// Checks weights and signatures of every polynomial.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.lambda >= T::zero()) {
                return Err(Error::InvalidInput(format!(
                    "term {i}: weight {} is negative",
                    t.lambda
                )));
            }
        }
        let polys = self
            .terms
            .iter()
            .map(|t| &t.poly)
            .chain(self.constraint_part.iter().map(|c| &c.poly));
        for p in polys {
            if *p.signature() != self.signature {
                return Err(Error::SignatureMismatch(
                    "certificate polynomial does not match the certificate signature".into(),
                ));
            }
        }
        Ok(())
    }

    /// `Σ λ_i r_i† r_i`.
    pub fn sos_part(&self) -> Polynomial<T> {
        let mut out = Polynomial::zero(self.signature);
        for t in &self.terms {
            out.add_scaled(&t.poly.hermitian_square(), creal(t.lambda));
        }
        out
    }

    /// Largest word length over all square terms.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.poly.degree()).max().unwrap_or(0)
    }

    pub fn cast<U: Real>(&self) -> SosCertificate<U> {
        SosCertificate {
            bound: U::lit(self.bound.to_f64_lossy()),
            terms: self
                .terms
                .iter()
                .map(|t| SquareTerm {
                    lambda: U::lit(t.lambda.to_f64_lossy()),
                    poly: t.poly.cast(),
                })
                .collect(),
            constraint_part: self
                .constraint_part
                .iter()
                .map(|c| ConstraintTerm {
                    mu: U::lit(c.mu.to_f64_lossy()),
                    poly: c.poly.cast(),
                })
                .collect(),
            signature: self.signature,
            provenance: self.provenance.clone(),
        }
    }
}

/// Reads a certificate off an optimal dual solution.
///
/// Every dual-slack block is diagonalized; each eigenpair `(λ, v)` with
/// `λ > 0` yields the term `λ · r† r` with `r = prefix · Σ v_j b_j`, where the
/// phase of `v` makes its largest entry real and positive. Eigenvalues in
/// `[−clamp_tol, 0]` are dropped. The nonzero constraint polynomials are kept
/// with `μ_k = −y_k`.
pub fn extract<T: Real>(
    sol: &SdpSolution<T>,
    p: &SdpProblem<T>,
    clamp_tol: T,
) -> Result<SosCertificate<T>> {
    if sol.status != SolveStatus::Optimal {
        return Err(Error::NotOptimal(sol.status.to_string()));
    }
    let labels = p
        .labels()
        .ok_or_else(|| Error::InvalidInput("problem carries no label map".into()))?;
    let dual = dual_data(p, &sol.dual_y)?;
    let mut cert = SosCertificate::new(
        dual.nu,
        labels.signature,
        format!("{} level {} dual", labels.hierarchy, labels.level),
    );
    for (b, z) in dual.slack.iter().enumerate() {
        let eig = z.clone().symmetric_eigen();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -clamp_tol {
                return Err(Error::Extraction {
                    block: b,
                    eigenvalue: lambda.to_f64_lossy(),
                    clamp_tol: clamp_tol.to_f64_lossy(),
                });
            }
            if lambda <= T::zero() {
                continue;
            }
            let v = normalize_phase(eig.eigenvectors.column(k).iter().copied().collect());
            cert.terms.push(SquareTerm {
                lambda,
                poly: labels.vector_polynomial(b, &v),
            });
        }
    }
    for (k, c) in p.constraints().iter().enumerate() {
        let mut s = labels.matrix_polynomial(&c.matrix);
        if k == dual.normalization {
            s = &s - &Polynomial::identity(labels.signature);
        }
        if !s.is_zero() && sol.dual_y[k] != T::zero() {
            cert.constraint_part.push(ConstraintTerm {
                mu: -sol.dual_y[k],
                poly: s,
            });
        }
    }
    Ok(cert)
}

fn normalize_phase<T: Real>(mut v: Vec<C<T>>) -> Vec<C<T>> {
    let mut best = 0;
    for (i, c) in v.iter().enumerate() {
        if cabs(*c) > cabs(v[best]) {
            best = i;
        }
    }
    let m = cabs(v[best]);
    if m > T::zero() {
        let phase = v[best].conj() / m;
        for c in v.iter_mut() {
            *c *= phase;
        }
        v[best] = creal(v[best].re);
    }
    v
}

/// Outcome of [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport<T: Real> {
    pub ok: bool,
    pub max_residual: T,
    /// Nonzero residual coefficients, largest first.
    pub residuals: Vec<(Monomial, C<T>)>,
}

/// Expands `ν·I − P − Σ λ_i r_i† r_i − Σ μ_j s_j`, substitutes the answer-0
/// projectors and reports the largest remaining coefficient.
pub fn verify<T: Real>(
    cert: &SosCertificate<T>,
    gp: &GamePolynomial<T>,
    tol: T,
) -> Result<VerifyReport<T>> {
    if cert.signature != *gp.signature() {
        return Err(Error::SignatureMismatch(format!(
            "certificate is over {:?}, game polynomial over {:?}",
            cert.signature,
            gp.signature()
        )));
    }
    cert.validate()?;
    let mut r = Polynomial::constant(cert.signature, creal(cert.bound));
    r.add_scaled(gp.poly(), -cone::<T>());
    r.add_scaled(&cert.sos_part(), -cone::<T>());
    for c in &cert.constraint_part {
        r.add_scaled(&c.poly, creal(-c.mu));
    }
    let r = reduce_answer_zero(&r);
    let mut residuals: Vec<(Monomial, C<T>)> = r.terms().map(|(m, c)| (m.clone(), *c)).collect();
    residuals.sort_by(|a, b| {
        cabs(b.1)
            .partial_cmp(&cabs(a.1))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    let max_residual = residuals.first().map_or(T::zero(), |(_, c)| cabs(*c));
    Ok(VerifyReport {
        ok: max_residual <= tol,
        max_residual,
        residuals,
    })
}

/// Which square terms touch more than one Alice question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NicenessReport {
    pub is_nice: bool,
    pub offending_terms: Vec<(usize, BTreeSet<usize>)>,
}

pub fn is_nice<T: Real>(cert: &SosCertificate<T>) -> NicenessReport {
    let mut offending = Vec::new();
    for (i, t) in cert.terms.iter().enumerate() {
        let qs: BTreeSet<usize> = t
            .poly
            .terms()
            .flat_map(|(m, _)| m.alice_questions().collect::<Vec<_>>())
            .collect();
        if qs.len() > 1 {
            offending.push((i, qs));
        }
    }
    NicenessReport {
        is_nice: offending.is_empty(),
        offending_terms: offending,
    }
}

/// Gram matrix `S† diag(λ) S` of the square terms over `basis`, where row `i`
/// of `S` holds the coefficients of `r_i`. Errors if a term leaves the basis.
pub fn gram_matrix<T: Real>(cert: &SosCertificate<T>, basis: &[Monomial]) -> Result<DMatrix<C<T>>> {
    let n = basis.len();
    let mut s = DMatrix::from_element(cert.terms.len(), n, C::new(T::zero(), T::zero()));
    for (i, t) in cert.terms.iter().enumerate() {
        for (m, c) in t.poly.terms() {
            let j = basis
                .iter()
                .position(|b| b == m)
                .ok_or_else(|| Error::NotLevelOne(format!("term {i} contains `{m}` outside the basis")))?;
            s[(i, j)] = *c;
        }
    }
    let mut out = DMatrix::from_element(n, n, C::new(T::zero(), T::zero()));
    for (i, t) in cert.terms.iter().enumerate() {
        for j in 0..n {
            let a = s[(i, j)].conj() * t.lambda;
            if a == C::new(T::zero(), T::zero()) {
                continue;
            }
            for k in 0..n {
                out[(j, k)] += a * s[(i, k)];
            }
        }
    }
    Ok(out)
}
