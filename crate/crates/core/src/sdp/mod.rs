//! Dense primal-dual interior-point solver for small Hermitian SDPs.
//!
//! The problem `max ⟨C, X⟩ s.t. ⟨A_k, X⟩ = b_k, X ⪰ 0` is realified with
//! [`real_embed`] (data scaled by ½ so inner products are preserved) and solved
//! by an infeasible-start Nesterov–Todd predictor-corrector method. The dual is
//! `min bᵀy s.t. Z = Σ y_k A_k − C ⪰ 0`; the returned slack is recomputed
//! from `y` exactly in that form.

mod embed;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::relaxation::SdpProblem;
use crate::scalar::{Real, C};

use embed::RealSparse;
pub use embed::{real_embed, real_unembed};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalFailure => "numerical_failure",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions<T> {
    pub gap_tol: T,
    pub feas_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            gap_tol: T::lit(1e-8),
            feas_tol: T::lit(1e-8),
            max_iter: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T: Real> {
    /// Primal moment blocks `X`.
    pub primal: Vec<DMatrix<C<T>>>,
    /// One multiplier per constraint of the problem (0 for dropped rows).
    pub dual_y: Vec<T>,
    /// `Σ y_k A_k − C`.
    pub dual_slack: Vec<DMatrix<C<T>>>,
    pub primal_obj: T,
    pub dual_obj: T,
    /// `|primal_obj − dual_obj|`.
    pub gap: T,
    /// `max_k |⟨A_k, X⟩ − b_k|` over all constraints.
    pub primal_residual: T,
    /// Largest entry of the dual equation residual at the final iterate.
    pub dual_residual: T,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Constraints removed as linearly dependent before iterating.
    pub dropped: Vec<usize>,
}

type Blocks<T> = Vec<DMatrix<T>>;

fn inner<T: Real>(a: &[DMatrix<T>], b: &[DMatrix<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y.iter()).fold(T::zero(), |s, (p, q)| s + *p * *q))
        .fold(T::zero(), |s, v| s + v)
}

fn max_abs<T: Real>(a: &[DMatrix<T>]) -> T {
    a.iter()
        .flat_map(|m| m.iter())
        .fold(T::zero(), |s, v| s.max(v.abs()))
}

fn symmetrize<T: Real>(m: &mut DMatrix<T>) {
    let h = T::lit(0.5);
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = (m[(i, j)] + m[(j, i)]) * h;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// NT scaling of one block: `W = G Gᵀ` with `W Z W = X` and
/// `G⁻¹ X G⁻ᵀ = Gᵀ Z G = diag(λ)`.
struct Scaling<T: Real> {
    g: DMatrix<T>,
    g_inv: DMatrix<T>,
    w: DMatrix<T>,
    lambda: DVector<T>,
}

impl<T: Real> Scaling<T> {
    fn new(x: &DMatrix<T>, z: &DMatrix<T>) -> Option<Self> {
        let n = x.nrows();
        let l = Cholesky::new(x.clone())?.l();
        let mut ltzl = l.transpose() * z * &l;
        symmetrize(&mut ltzl);
        let eig = ltzl.symmetric_eigen();
        let top = eig.eigenvalues.iter().fold(T::zero(), |m, v| m.max(*v));
        if !(top > T::zero()) {
            return None;
        }
        let floor = top * T::default_epsilon();
        let d: DVector<T> = eig.eigenvalues.map(|v| v.max(floor));
        let q = eig.eigenvectors;
        let d_m14 = d.map(|v| T::one() / v.sqrt().sqrt());
        let d_14 = d.map(|v| v.sqrt().sqrt());
        let g = &l * &q * DMatrix::from_diagonal(&d_m14);
        let l_inv = l.solve_lower_triangular(&DMatrix::identity(n, n))?;
        let g_inv = DMatrix::from_diagonal(&d_14) * q.transpose() * l_inv;
        let mut w = &g * g.transpose();
        symmetrize(&mut w);
        Some(Self {
            g,
            g_inv,
            w,
            lambda: d.map(|v| v.sqrt()),
        })
    }

    /// Largest `α` (possibly ∞) with `diag(λ) + α D ⪰ 0`.
    fn max_step(&self, d: &DMatrix<T>) -> T {
        let n = d.nrows();
        let s = self.lambda.map(|v| T::one() / v.sqrt());
        let mut k = DMatrix::from_fn(n, n, |i, j| d[(i, j)] * s[i] * s[j]);
        symmetrize(&mut k);
        let lo = k
            .symmetric_eigenvalues()
            .iter()
            .fold(T::max_value().unwrap(), |m, v| m.min(*v));
        if lo >= T::zero() {
            T::max_value().unwrap()
        } else {
            -T::one() / lo
        }
    }
}

struct Data<T: Real> {
    dims: Vec<usize>,
    a: Vec<RealSparse<T>>,
    b: DVector<T>,
    c: Blocks<T>,
    by_block: Vec<Vec<usize>>,
}

impl<T: Real> Data<T> {
    fn op(&self, x: &[DMatrix<T>]) -> DVector<T> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| a.inner(x)))
    }

    fn adjoint_op(&self, y: &DVector<T>) -> Blocks<T> {
        let mut out = zeros(&self.dims);
        for (a, &v) in self.a.iter().zip(y.iter()) {
            a.add_to(&mut out, v);
        }
        out
    }

    /// `M_ij = ⟨A_i, W A_j W⟩`.
    fn schur(&self, sc: &[Scaling<T>]) -> DMatrix<T> {
        let m = self.a.len();
        let mut out = DMatrix::zeros(m, m);
        for j in 0..m {
            for (b, list) in &self.a[j].blocks {
                let w = &sc[*b].w;
                let n = w.nrows();
                let mut wa = DMatrix::<T>::zeros(n, n);
                for &(r, c, v) in list {
                    // (W A W)_{pq} += v W_{pr} W_{cq}
                    let wr = w.column(r);
                    let wc = w.column(c);
                    for q in 0..n {
                        let f = v * wc[q];
                        if f == T::zero() {
                            continue;
                        }
                        let mut col = wa.column_mut(q);
                        col.axpy(f, &wr, T::one());
                    }
                }
                for &i in &self.by_block[*b] {
                    if i > j {
                        break;
                    }
                    if let Some(entries) = self.a[i].entries_in(*b) {
                        let s = entries
                            .iter()
                            .fold(T::zero(), |s, &(r, c, v)| s + v * wa[(r, c)]);
                        out[(i, j)] += s;
                    }
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                out[(j, i)] = out[(i, j)];
            }
        }
        out
    }
}

fn zeros<T: Real>(dims: &[usize]) -> Blocks<T> {
    dims.iter().map(|&n| DMatrix::zeros(n, n)).collect()
}

/// Keeps a maximal linearly independent prefix-greedy subset of rows, using
/// a Cholesky factorization of their Gram matrix; a row is dropped when its
/// squared residual against the kept rows is ≤ `tol` times its squared norm.
fn independent_rows<T: Real>(rows: &[RealSparse<T>], tol: T) -> Vec<usize> {
    use std::collections::HashMap;
    let mut touching: HashMap<(usize, usize, usize), Vec<(usize, T)>> = HashMap::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut l: Vec<Vec<T>> = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let norm = row.frobenius_sq();
        if norm == T::zero() {
            continue;
        }
        let mut g = vec![T::zero(); kept.len()];
        for (b, list) in &row.blocks {
            for &(r, c, v) in list {
                if let Some(ts) = touching.get(&(*b, r, c)) {
                    for &(pos, w) in ts {
                        g[pos] += v * w;
                    }
                }
            }
        }
        let mut x = vec![T::zero(); kept.len()];
        let mut rem = norm;
        for i in 0..kept.len() {
            let mut s = g[i];
            for (j, xj) in x.iter().enumerate().take(i) {
                s -= l[i][j] * *xj;
            }
            x[i] = s / l[i][i];
            rem -= x[i] * x[i];
        }
        if rem > tol * norm {
            let pos = kept.len();
            x.push(rem.sqrt());
            l.push(x);
            kept.push(k);
            for (b, list) in &row.blocks {
                for &(r, c, v) in list {
                    touching.entry((*b, r, c)).or_default().push((pos, v));
                }
            }
        }
    }
    kept
}

/// Solves `p` from the standard identity-based starting point.
///
/// Fails only on malformed input; solver trouble is reported through
/// [`SdpSolution::status`].
pub fn solve<T: Real>(p: &SdpProblem<T>, opts: &SolverOptions<T>) -> Result<SdpSolution<T>> {
    if p.block_dims().is_empty() || p.block_dims().contains(&0) {
        return Err(Error::InvalidInput("SDP needs nonempty blocks".into()));
    }
    let half = T::lit(0.5);
    let dims: Vec<usize> = p.block_dims().iter().map(|n| 2 * n).collect();
    let all: Vec<RealSparse<T>> = p
        .constraints()
        .iter()
        .map(|c| RealSparse::embed(&c.matrix, p.block_dims(), half))
        .collect();
    let keep = independent_rows(&all, T::lit(1e-10));
    let dropped: Vec<usize> = (0..all.len()).filter(|k| !keep.contains(k)).collect();
    let a: Vec<RealSparse<T>> = keep.iter().map(|&k| all[k].clone()).collect();
    let b = DVector::from_iterator(keep.len(), keep.iter().map(|&k| p.constraints()[k].rhs));
    let mut c = zeros::<T>(&dims);
    RealSparse::embed(p.objective(), p.block_dims(), half).add_to(&mut c, -T::one());
    let mut by_block = vec![Vec::new(); dims.len()];
    for (i, ai) in a.iter().enumerate() {
        for (blk, _) in &ai.blocks {
            by_block[*blk].push(i);
        }
    }
    let data = Data {
        dims: dims.clone(),
        a,
        b,
        c,
        by_block,
    };

    let n_tot = T::from_usize(dims.iter().sum()).unwrap();
    let sqrt_n = n_tot.sqrt();
    let ten = T::lit(10.0);
    let mut xi = ten.max(sqrt_n);
    let mut eta = ten.max(sqrt_n).max(inner(&data.c, &data.c).sqrt());
    for (k, ak) in data.a.iter().enumerate() {
        let nrm = ak.frobenius_sq().sqrt();
        xi = xi.max(sqrt_n * (T::one() + data.b[k].abs()) / (T::one() + nrm));
        eta = eta.max(nrm);
    }
    let mut x: Blocks<T> = dims.iter().map(|&n| DMatrix::identity(n, n) * xi).collect();
    let mut z: Blocks<T> = dims.iter().map(|&n| DMatrix::identity(n, n) * eta).collect();
    let mut y = DVector::zeros(data.a.len());

    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    let mut stalls = 0;
    let huge = T::lit(1e12);
    let mut rd_inf;
    loop {
        let rp = &data.b - data.op(&x);
        let aty = data.adjoint_op(&y);
        let rd: Blocks<T> = (0..dims.len()).map(|k| &data.c[k] - &z[k] - &aty[k]).collect();
        rd_inf = max_abs(&rd);
        let rp_inf = rp.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let pobj = inner(&data.c, &x);
        let dobj = data.b.dot(&y);
        if (pobj - dobj).abs() <= opts.gap_tol && rp_inf <= opts.feas_tol && rd_inf <= opts.feas_tol {
            status = SolveStatus::Optimal;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        if max_abs(&x) > huge || y.amax() > huge {
            status = SolveStatus::Infeasible;
            break;
        }
        iterations += 1;
        let mu = inner(&x, &z) / n_tot;

        let Some(sc) = (0..dims.len())
            .map(|k| Scaling::new(&x[k], &z[k]))
            .collect::<Option<Vec<_>>>()
        else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let Some(chol) = factor(data.schur(&sc)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };

        let wrdw: Blocks<T> = (0..dims.len()).map(|k| &sc[k].w * &rd[k] * &sc[k].w).collect();
        let direction = |rc: &Blocks<T>| {
            let t: Blocks<T> = (0..dims.len()).map(|k| &rc[k] - &wrdw[k]).collect();
            let rhs = &rp - data.op(&t);
            let dy = chol.solve(&rhs);
            let atdy = data.adjoint_op(&dy);
            let dz: Blocks<T> = (0..dims.len()).map(|k| &rd[k] - &atdy[k]).collect();
            let dx: Blocks<T> = (0..dims.len())
                .map(|k| {
                    let mut m = &rc[k] - &sc[k].w * &dz[k] * &sc[k].w;
                    symmetrize(&mut m);
                    m
                })
                .collect();
            (dx, dy, dz)
        };
        let scaled = |dx: &Blocks<T>, dz: &Blocks<T>| {
            let sx: Blocks<T> = (0..dims.len())
                .map(|k| &sc[k].g_inv * &dx[k] * sc[k].g_inv.transpose())
                .collect();
            let sz: Blocks<T> = (0..dims.len())
                .map(|k| sc[k].g.transpose() * &dz[k] * &sc[k].g)
                .collect();
            (sx, sz)
        };
        let steps = |sx: &Blocks<T>, sz: &Blocks<T>| {
            let mut ap = T::one();
            let mut ad = T::one();
            for k in 0..dims.len() {
                ap = ap.min(sc[k].max_step(&sx[k]));
                ad = ad.min(sc[k].max_step(&sz[k]));
            }
            (ap, ad)
        };

        // Predictor.
        let rc: Blocks<T> = x.iter().map(|m| -m.clone()).collect();
        let (dx, _, dz) = direction(&rc);
        let (sx, sz) = scaled(&dx, &dz);
        let (ap, ad) = steps(&sx, &sz);
        let xa: Blocks<T> = (0..dims.len()).map(|k| &x[k] + &dx[k] * ap).collect();
        let za: Blocks<T> = (0..dims.len()).map(|k| &z[k] + &dz[k] * ad).collect();
        let mu_aff = inner(&xa, &za) / n_tot;
        let ratio = (mu_aff / mu).max(T::zero()).min(T::one());
        let expon = T::one().max(T::lit(3.0) * ap.min(ad) * ap.min(ad));
        let sigma = ratio.powf(expon);

        // Corrector.
        let rc: Blocks<T> = (0..dims.len())
            .map(|k| {
                let lam = &sc[k].lambda;
                let n = lam.len();
                let prod = &sx[k] * &sz[k];
                let mut s = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        let mut h = -(prod[(i, j)] + prod[(j, i)]) * T::lit(0.5);
                        if i == j {
                            h += sigma * mu - lam[i] * lam[i];
                        }
                        s[(i, j)] = T::lit(2.0) * h / (lam[i] + lam[j]);
                    }
                }
                &sc[k].g * s * sc[k].g.transpose()
            })
            .collect();
        let (dx, dy, dz) = direction(&rc);
        let (sx, sz) = scaled(&dx, &dz);
        let (mp, md) = steps(&sx, &sz);
        let tau = T::lit(0.9) + T::lit(0.09) * mp.min(md).min(T::one());
        let ap = (tau * mp).min(T::one());
        let ad = (tau * md).min(T::one());
        for k in 0..dims.len() {
            x[k] += &dx[k] * ap;
            z[k] += &dz[k] * ad;
            symmetrize(&mut x[k]);
            symmetrize(&mut z[k]);
        }
        y += &dy * ad;
        if ap.max(ad) < T::lit(1e-10) {
            stalls += 1;
            if stalls >= 5 {
                status = SolveStatus::NumericalFailure;
                break;
            }
        } else {
            stalls = 0;
        }
    }

    let primal: Vec<DMatrix<C<T>>> = x.iter().map(real_unembed).collect();
    let mut dual_y = vec![T::zero(); p.constraints().len()];
    for (i, &k) in keep.iter().enumerate() {
        dual_y[k] = -y[i];
    }
    let dual_slack = p.dual_slack(&dual_y);
    let primal_obj = p.objective().inner(&primal);
    let dual_obj = p
        .constraints()
        .iter()
        .zip(&dual_y)
        .fold(T::zero(), |s, (c, &v)| s + c.rhs * v);
    let primal_residual = p.max_constraint_residual(&primal);
    if status == SolveStatus::Optimal && primal_residual > opts.feas_tol {
        // A dropped row disagrees with the kept ones.
        status = SolveStatus::Infeasible;
    }
    Ok(SdpSolution {
        primal_residual,
        primal,
        dual_y,
        dual_slack,
        primal_obj,
        dual_obj,
        gap: (primal_obj - dual_obj).abs(),
        dual_residual: rd_inf,
        status,
        iterations,
        dropped,
    })
}

fn factor<T: Real>(m: DMatrix<T>) -> Option<Cholesky<T, nalgebra::Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let top = m.diagonal().iter().fold(T::zero(), |s, v| s.max(v.abs()));
    for delta in [1e-14, 1e-12, 1e-10, 1e-8] {
        let mut r = m.clone();
        for i in 0..r.nrows() {
            r[(i, i)] += top * T::lit(delta);
        }
        if let Some(c) = Cholesky::new(r) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests;
