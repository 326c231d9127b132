//! Realification of Hermitian data: `H ↦ [[Re H, −Im H], [Im H, Re H]]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::relaxation::SparseHermitian;
use crate::scalar::{cabs, Real, C};

/// Dense real embedding of a Hermitian matrix. Eigenvalues are those of `h`,
/// each twice, and `⟨embed(A), embed(B)⟩ = 2·Re⟨A, B⟩`.
pub fn real_embed<T: Real>(h: &DMatrix<C<T>>) -> Result<DMatrix<T>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let mut dev = T::zero();
    for i in 0..n {
        for j in 0..n {
            dev = dev.max(cabs(h[(i, j)] - h[(j, i)].conj()));
        }
    }
    let tol = if std::mem::size_of::<T>() < 8 { 1e-6 } else { 1e-12 };
    if dev.to_f64_lossy() > tol {
        return Err(Error::NotHermitian(dev.to_f64_lossy()));
    }
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            out[(i, j)] = v.re;
            out[(n + i, n + j)] = v.re;
            out[(i, n + j)] = -v.im;
            out[(n + i, j)] = v.im;
        }
    }
    Ok(out)
}

/// Inverse of [`real_embed`] on the embedded subspace, applied after
/// averaging so that any symmetric `2n × 2n` input maps to a Hermitian matrix.
pub fn real_unembed<T: Real>(s: &DMatrix<T>) -> DMatrix<C<T>> {
    let n = s.nrows() / 2;
    let h = T::lit(0.5);
    DMatrix::from_fn(n, n, |i, j| {
        let re = (s[(i, j)] + s[(n + i, n + j)]) * h;
        let q = s[(n + i, j)];
        let qt = s[(n + j, i)];
        C::new(re, (q - qt) * h)
    })
}

/// Symmetric sparse matrix over the embedded blocks (both triangles stored).
#[derive(Clone, Debug)]
pub(crate) struct RealSparse<T: Real> {
    /// Per touched block: `(block, [(row, col, value)])`.
    pub blocks: Vec<(usize, Vec<(usize, usize, T)>)>,
}

impl<T: Real> RealSparse<T> {
    /// `embed(A) · scale` for a Hermitian block matrix `A`.
    pub fn embed(a: &SparseHermitian<T>, dims: &[usize], scale: T) -> Self {
        let mut by_block: Vec<(usize, Vec<(usize, usize, T)>)> = Vec::new();
        for &(b, i, j, v) in a.entries() {
            let n = dims[b];
            let list = match by_block.iter().position(|(bb, _)| *bb == b) {
                Some(k) => &mut by_block[k].1,
                None => {
                    by_block.push((b, Vec::new()));
                    &mut by_block.last_mut().unwrap().1
                }
            };
            let mut put = |p: usize, q: usize, w: C<T>| {
                list.push((p, q, w.re * scale));
                list.push((n + p, n + q, w.re * scale));
                list.push((p, n + q, -w.im * scale));
                list.push((n + p, q, w.im * scale));
            };
            put(i, j, v);
            if i != j {
                put(j, i, v.conj());
            }
        }
        for (_, list) in by_block.iter_mut() {
            list.sort_by(|x, y| (x.1, x.0).cmp(&(y.1, y.0)));
            let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(list.len());
            for &(r, c, v) in list.iter() {
                match merged.last_mut() {
                    Some(last) if (last.0, last.1) == (r, c) => last.2 += v,
                    _ => merged.push((r, c, v)),
                }
            }
            merged.retain(|e| e.2 != T::zero());
            *list = merged;
        }
        by_block.retain(|(_, l)| !l.is_empty());
        by_block.sort_by_key(|(b, _)| *b);
        Self { blocks: by_block }
    }

    pub fn inner(&self, x: &[DMatrix<T>]) -> T {
        let mut s = T::zero();
        for (b, list) in &self.blocks {
            let m = &x[*b];
            for &(r, c, v) in list {
                s += v * m[(r, c)];
            }
        }
        s
    }

    pub fn add_to(&self, out: &mut [DMatrix<T>], scale: T) {
        for (b, list) in &self.blocks {
            let m = &mut out[*b];
            for &(r, c, v) in list {
                m[(r, c)] += v * scale;
            }
        }
    }

    pub fn frobenius_sq(&self) -> T {
        self.blocks
            .iter()
            .flat_map(|(_, l)| l.iter())
            .fold(T::zero(), |s, e| s + e.2 * e.2)
    }

    pub fn entries_in(&self, block: usize) -> Option<&[(usize, usize, T)]> {
        self.blocks
            .iter()
            .find(|(b, _)| *b == block)
            .map(|(_, l)| l.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C<f64>> {
        let a = DMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * C::new(0.5, 0.0)
    }

    #[test]
    fn embeds_the_two_by_two_example() {
        let i = C::new(0.0, 1.0);
        let one = C::new(1.0, 0.0);
        let h = DMatrix::from_row_slice(2, 2, &[one, i, -i, one]);
        let e = real_embed(&h).unwrap();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, -1.0, //
                0.0, 1.0, 1.0, 0.0, //
                0.0, 1.0, 1.0, 0.0, //
                -1.0, 0.0, 0.0, 1.0,
            ],
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn eigenvalues_double_and_inner_products_scale_by_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_hermitian(&mut rng, 5);
            let b = random_hermitian(&mut rng, 5);
            let ea = real_embed(&a).unwrap();
            let eb = real_embed(&b).unwrap();
            let direct: C<f64> = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
            let embedded: f64 = ea.iter().zip(eb.iter()).map(|(x, y)| x * y).sum();
            assert!((embedded - 2.0 * direct.re).abs() < 1e-12);

            let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut ee: Vec<f64> = ea.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            ee.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (k, v) in ev.iter().enumerate() {
                assert!((ee[2 * k] - v).abs() < 1e-12 && (ee[2 * k + 1] - v).abs() < 1e-12);
            }
            assert!((real_unembed(&ea) - &a).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = DMatrix::from_row_slice(2, 2, &[C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, 1.0), C::new(1.0, 0.0)]);
        assert!(matches!(real_embed(&h), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sparse_embedding_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = SparseHermitian::<f64>::new();
        for _ in 0..6 {
            let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
            a.push(0, i, j, C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        let dense = real_embed(&a.to_dense(&[3])[0]).unwrap();
        let mut out = vec![DMatrix::zeros(6, 6)];
        RealSparse::embed(&a, &[3], 1.0).add_to(&mut out, 1.0);
        assert!((out[0].clone() - dense).norm() < 1e-15);
    }
}
