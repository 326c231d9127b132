//! Degree-1 certificates made nice by completing a block-diagonal Cholesky
//! factor of the Alice corner of their Gram matrix.
//!
//! Over the basis `(Alice question 0 | … | Alice question k−1 | 1, Bob)` a
//! level-1 Gram matrix has zero Alice cross-question blocks:
//!
//! ```text
//!       ⎡ M_1        C_1 ⎤
//!   M = ⎢     ⋱      ⋮   ⎥
//!       ⎢        M_k C_k ⎥
//!       ⎣ C_1† … C_k† M_b ⎦
//! ```
//!
//! Factoring each `M_x` separately and completing the factor to all of `M`
//! gives an upper block-triangular `R` with `R†R = M` whose rows each touch
//! a single Alice question.

use std::ops::Range;

use nalgebra::DMatrix;

use crate::algebra::{reduce_answer_zero, AlgebraSignature, Monomial, Party};
use crate::certificate::{is_nice, verify, SosCertificate, SquareTerm};
use crate::error::{Error, Result};
use crate::games::GamePolynomial;
use crate::scalar::{cabs, czero, Real, C};

/// Alice cross-question Gram entries up to this magnitude are set to zero.
pub const CROSS_BLOCK_TOL: f64 = 1e-7;
/// Most negative eigenvalue accepted by [`block_cholesky`].
pub const PSD_TOL: f64 = 1e-9;
/// Allowed deviation between `R_a†R_a` and the Alice corner.
pub const CORNER_TOL: f64 = 1e-9;
/// Verification tolerance required of the input to [`nicify_level1`].
pub const INPUT_VERIFY_TOL: f64 = 1e-5;

/// Degree-1 basis ordered as Alice question 0, …, Alice question k−1, then
/// the identity and Bob's generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Level1Basis {
    pub monomials: Vec<Monomial>,
    /// One range per Alice question, then the Bob-plus-identity range.
    pub partition: Vec<Range<usize>>,
}

impl Level1Basis {
    pub fn new(sig: &AlgebraSignature) -> Self {
        let mut monomials = Vec::new();
        let mut partition = Vec::new();
        let alice = sig.basis_letters(Party::Alice);
        for x in 0..sig.alice_questions {
            let start = monomials.len();
            monomials.extend(
                alice
                    .iter()
                    .filter(|l| l.question as usize == x)
                    .map(|&l| Monomial::from_letter(l)),
            );
            partition.push(start..monomials.len());
        }
        let start = monomials.len();
        monomials.push(Monomial::identity());
        monomials.extend(sig.basis_letters(Party::Bob).into_iter().map(Monomial::from_letter));
        partition.push(start..monomials.len());
        Self { monomials, partition }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Size of the Alice corner.
    pub fn alice_len(&self) -> usize {
        self.partition.last().map_or(0, |r| r.start)
    }

    pub fn alice_blocks(&self) -> &[Range<usize>] {
        &self.partition[..self.partition.len() - 1]
    }

    fn position(&self, m: &Monomial) -> Option<usize> {
        self.monomials.iter().position(|b| b == m)
    }
}

/// Gram matrix of a degree-1 certificate over a [`Level1Basis`], with the
/// Alice cross-question blocks exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredGram<T: Real> {
    pub m: DMatrix<C<T>>,
    pub basis: Level1Basis,
}

impl<T: Real> StructuredGram<T> {
    pub fn alice_corner(&self) -> DMatrix<C<T>> {
        let n = self.basis.alice_len();
        self.m.view((0, 0), (n, n)).into_owned()
    }
}

/// `M = S† diag(λ) S`, where row `i` of `S` holds the coefficients of `r_i`.
pub fn gram_from_certificate<T: Real>(
    cert: &SosCertificate<T>,
    basis: &Level1Basis,
) -> Result<StructuredGram<T>> {
    let n = basis.len();
    let mut s = DMatrix::from_element(cert.terms.len(), n, czero::<T>());
    for (i, t) in cert.terms.iter().enumerate() {
        let r = reduce_answer_zero(&t.poly);
        for (m, c) in r.terms() {
            if m.degree() > 1 {
                return Err(Error::NotLevelOne(format!("term {i} contains the word `{m}`")));
            }
            let j = basis
                .position(m)
                .ok_or_else(|| Error::NotLevelOne(format!("term {i}: `{m}` is not a basis generator")))?;
            s[(i, j)] = *c;
        }
    }
    let mut m = DMatrix::from_element(n, n, czero::<T>());
    for (i, t) in cert.terms.iter().enumerate() {
        let row = s.row(i);
        for j in 0..n {
            let a = row[j].conj() * t.lambda;
            if a == czero() {
                continue;
            }
            for k in 0..n {
                m[(j, k)] += a * row[k];
            }
        }
    }
    let tol = T::lit(CROSS_BLOCK_TOL);
    let blocks = basis.alice_blocks();
    for (bx, rx) in blocks.iter().enumerate() {
        for ry in &blocks[bx + 1..] {
            for i in rx.clone() {
                for j in ry.clone() {
                    let mag = cabs(m[(i, j)]);
                    if mag > tol {
                        return Err(Error::CrossBlock {
                            row: basis.monomials[i].to_string(),
                            col: basis.monomials[j].to_string(),
                            magnitude: mag.to_f64_lossy(),
                        });
                    }
                    m[(i, j)] = czero();
                    m[(j, i)] = czero();
                }
            }
        }
    }
    Ok(StructuredGram {
        m,
        basis: basis.clone(),
    })
}

/// Pivoted Cholesky restricted to `pivots`: returns rows `r` with
/// `Σ r† r` equal to the part of `a` reachable from the pivots, and leaves
/// the Schur complement in `a`. Stops once every remaining pivot diagonal is
/// at most `tol`.
fn pivoted_rows<T: Real>(a: &mut DMatrix<C<T>>, pivots: &[usize], tol: T) -> Vec<Vec<C<T>>> {
    let n = a.nrows();
    let mut left: Vec<usize> = pivots.to_vec();
    let mut rows = Vec::new();
    while !left.is_empty() {
        let mut pos = 0;
        for (i, &q) in left.iter().enumerate() {
            if a[(q, q)].re > a[(left[pos], left[pos])].re {
                pos = i;
            }
        }
        let p = left[pos];
        let d = a[(p, p)].re;
        if !(d > tol) {
            break;
        }
        left.remove(pos);
        let s = d.sqrt();
        let row: Vec<C<T>> = (0..n).map(|j| a[(p, j)] / s).collect();
        for i in 0..n {
            let ci = row[i].conj();
            if ci == czero() {
                continue;
            }
            for j in 0..n {
                a[(i, j)] -= ci * row[j];
            }
        }
        rows.push(row);
    }
    rows
}

fn rank_tol<T: Real>(a: &DMatrix<C<T>>) -> T {
    let scale = (0..a.nrows()).fold(T::one(), |s, i| s.max(a[(i, i)].re.abs()));
    T::default_epsilon() * T::lit(64.0 * a.nrows().max(1) as f64) * scale
}

/// Block-diagonal `R_a` with `R_a†R_a = M_a`, one pivoted Cholesky factor per
/// block. Rows of a block's factor fill that block's row range in pivot order;
/// rank deficiency leaves trailing zero rows.
pub fn block_cholesky<T: Real>(m_a: &DMatrix<C<T>>, blocks: &[Range<usize>]) -> Result<DMatrix<C<T>>> {
    let n = m_a.nrows();
    let mut r = DMatrix::from_element(n, n, czero::<T>());
    for (b, range) in blocks.iter().enumerate() {
        let k = range.len();
        let mut sub = m_a.view((range.start, range.start), (k, k)).into_owned();
        if k == 0 {
            continue;
        }
        let herm = (&sub + sub.adjoint()) * C::new(T::lit(0.5), T::zero());
        let min = herm.clone().symmetric_eigenvalues().min();
        if min < -T::lit(PSD_TOL) {
            return Err(Error::NotPsd {
                block: b,
                eigenvalue: min.to_f64_lossy(),
            });
        }
        sub = herm;
        let tol = rank_tol(&sub);
        let pivots: Vec<usize> = (0..k).collect();
        for (i, row) in pivoted_rows(&mut sub, &pivots, tol).into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                r[(range.start + i, range.start + j)] = v;
            }
        }
    }
    Ok(r)
}

fn max_abs<T: Real>(a: &DMatrix<C<T>>) -> T {
    a.iter().fold(T::zero(), |m, z| m.max(cabs(*z)))
}

/// Completes `R_a` to `R = [[R_a, R_ab], [0, R_b]]` with `R†R = M`.
///
/// `M` is first factored as `S = [[S_a, S_ab], [0, S_b]]` by pivoting over the
/// Alice indices and then over the rest. `S_a` has full row rank, so the
/// isometry `V` with `R_a = V S_a` comes from the polar factor of
/// `R_a S_a†`; then `R_ab = V S_ab` and `R_b = S_b`.
pub fn cholesky_complete<T: Real>(g: &StructuredGram<T>, r_a: &DMatrix<C<T>>) -> Result<DMatrix<C<T>>> {
    let n = g.m.nrows();
    let na = g.basis.alice_len();
    if r_a.ncols() != na {
        return Err(Error::InvalidInput(format!(
            "corner factor has {} columns, the Alice corner has {na}",
            r_a.ncols()
        )));
    }
    let dev = max_abs(&(r_a.adjoint() * r_a - g.alice_corner()));
    if dev > T::lit(CORNER_TOL) {
        return Err(Error::CornerMismatch(dev.to_f64_lossy()));
    }

    let mut work = (&g.m + g.m.adjoint()) * C::new(T::lit(0.5), T::zero());
    let tol = rank_tol(&work);
    let alice: Vec<usize> = (0..na).collect();
    let rest: Vec<usize> = (na..n).collect();
    let upper = pivoted_rows(&mut work, &alice, tol);
    let lower = pivoted_rows(&mut work, &rest, tol);
    let ka = upper.len();
    let s_a = DMatrix::from_fn(ka, na, |i, j| upper[i][j]);
    let s_ab = DMatrix::from_fn(ka, n - na, |i, j| upper[i][na + j]);

    let ra_rows = r_a.nrows();
    let v = if ka == 0 {
        DMatrix::from_element(ra_rows, 0, czero::<T>())
    } else {
        if ra_rows < ka {
            return Err(Error::NoIsometry {
                singular_values: Vec::new(),
                residual: f64::INFINITY,
            });
        }
        let svd = (r_a * s_a.adjoint()).svd(true, true);
        let u = svd.u.as_ref().expect("requested");
        let wt = svd.v_t.as_ref().expect("requested");
        let v = u * wt;
        let residual = max_abs(&(&v * &s_a - r_a));
        let sv: Vec<f64> = svd.singular_values.iter().map(|s| s.to_f64_lossy()).collect();
        if residual > T::lit(1e-7) || sv.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::NoIsometry {
                singular_values: sv,
                residual: residual.to_f64_lossy(),
            });
        }
        v
    };

    let r_ab = &v * s_ab;
    let mut r = DMatrix::from_element(ra_rows + lower.len(), n, czero::<T>());
    r.view_mut((0, 0), (ra_rows, na)).copy_from(r_a);
    r.view_mut((0, na), (ra_rows, n - na)).copy_from(&r_ab);
    for (i, row) in lower.iter().enumerate() {
        for j in na..n {
            r[(ra_rows + i, j)] = row[j];
        }
    }
    Ok(r)
}

/// Rewrites a degree-1 certificate as a nice one with the same Gram matrix.
///
/// Output terms are the nonzero rows of the completed factor, each with
/// weight 1. The bound and the constraint part are copied unchanged.
pub fn nicify_level1<T: Real>(cert: &SosCertificate<T>, gp: &GamePolynomial<T>) -> Result<SosCertificate<T>> {
    let report = verify(cert, gp, T::lit(INPUT_VERIFY_TOL))?;
    if !report.ok {
        return Err(Error::VerificationFailed(report.max_residual.to_f64_lossy()));
    }
    let basis = Level1Basis::new(&cert.signature);
    let g = gram_from_certificate(cert, &basis)?;
    let r_a = block_cholesky(&g.alice_corner(), basis.alice_blocks())?;
    let r = cholesky_complete(&g, &r_a)?;

    let mut out = SosCertificate::new(cert.bound, cert.signature, format!("{} (nicified)", cert.provenance));
    out.constraint_part = cert.constraint_part.clone();
    for i in 0..r.nrows() {
        let mut p = crate::algebra::Polynomial::zero(cert.signature);
        for (j, m) in basis.monomials.iter().enumerate() {
            p.add_term(m.clone(), r[(i, j)]);
        }
        if !p.is_zero() {
            out.terms.push(SquareTerm { lambda: T::one(), poly: p });
        }
    }
    debug_assert!(is_nice(&out).is_nice);
    Ok(out)
}
