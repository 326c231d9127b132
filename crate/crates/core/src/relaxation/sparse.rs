//! Sparse Hermitian block matrices and standard-form SDP problems.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::relaxation::LabelMap;
use crate::scalar::{cabs, czero, creal, Real, C};

/// Hermitian block-diagonal matrix stored by its upper triangle.
///
/// Each entry `(block, row, col, v)` with `row ≤ col` stands for `v` at
/// `(row, col)` and `conj(v)` at `(col, row)`. Diagonal values are real.
/// Duplicate positions add up.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseHermitian<T: Real> {
    entries: Vec<(usize, usize, usize, C<T>)>,
}

impl<T: Real> SparseHermitian<T> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(usize, usize, usize, C<T>)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `v` at `(row, col)` and `conj(v)` at `(col, row)`; on the
    /// diagonal only the real part is kept.
    pub fn push(&mut self, block: usize, row: usize, col: usize, v: C<T>) {
        if row == col {
            self.entries.push((block, row, row, creal(v.re)));
        } else if row < col {
            self.entries.push((block, row, col, v));
        } else {
            self.entries.push((block, col, row, v.conj()));
        }
    }

    /// Adds the matrix `A` with `⟨A, X⟩ = scale · Re X[row, col]`.
    pub fn push_real_part(&mut self, block: usize, row: usize, col: usize, scale: T) {
        let v = if row == col { scale } else { scale * T::lit(0.5) };
        self.push(block, row, col, creal(v));
    }

    /// Adds the matrix `A` with `⟨A, X⟩ = scale · Im X[row, col]`.
    pub fn push_imag_part(&mut self, block: usize, row: usize, col: usize, scale: T) {
        if row != col {
            self.push(block, row, col, C::new(T::zero(), scale * T::lit(0.5)));
        }
    }

    /// Adds the matrix `A` with `⟨A, X⟩ = Re(c · X[row, col])`.
    pub fn push_functional(&mut self, block: usize, row: usize, col: usize, c: C<T>) {
        if row == col {
            self.push(block, row, row, creal(c.re));
        } else {
            self.push(block, row, col, c.conj() * T::lit(0.5));
        }
    }

    /// Merges duplicate positions and drops entries of magnitude ≤ `tol`.
    pub fn compress(&mut self, tol: T) {
        self.entries
            .sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let mut out: Vec<(usize, usize, usize, C<T>)> = Vec::with_capacity(self.entries.len());
        for &(b, r, c, v) in &self.entries {
            match out.last_mut() {
                Some(last) if (last.0, last.1, last.2) == (b, r, c) => last.3 += v,
                _ => out.push((b, r, c, v)),
            }
        }
        out.retain(|e| cabs(e.3) > tol);
        self.entries = out;
    }

    /// Blocks touched by at least one entry, sorted.
    pub fn blocks(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.entries.iter().map(|e| e.0).collect();
        b.sort_unstable();
        b.dedup();
        b
    }

    /// `⟨A, X⟩ = Σ conj(A_ij) X_ij`, which is real for Hermitian `X`.
    pub fn inner(&self, x: &[DMatrix<C<T>>]) -> T {
        let mut s = T::zero();
        for &(b, r, c, v) in &self.entries {
            let xv = x[b][(r, c)];
            if r == c {
                s += v.re * xv.re;
            } else {
                s += T::lit(2.0) * (v.conj() * xv).re;
            }
        }
        s
    }

    /// `out += scale · A`.
    pub fn add_to(&self, out: &mut [DMatrix<C<T>>], scale: T) {
        for &(b, r, c, v) in &self.entries {
            out[b][(r, c)] += v * scale;
            if r != c {
                out[b][(c, r)] += v.conj() * scale;
            }
        }
    }

    pub fn to_dense(&self, dims: &[usize]) -> Vec<DMatrix<C<T>>> {
        let mut out = zero_blocks(dims);
        self.add_to(&mut out, T::one());
        out
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |m, e| m.max(cabs(e.3)))
    }

    pub fn cast<U: Real>(&self) -> SparseHermitian<U> {
        SparseHermitian {
            entries: self
                .entries
                .iter()
                .map(|&(b, r, c, v)| {
                    (b, r, c, C::new(U::lit(v.re.to_f64_lossy()), U::lit(v.im.to_f64_lossy())))
                })
                .collect(),
        }
    }
}

pub fn zero_blocks<T: Real>(dims: &[usize]) -> Vec<DMatrix<C<T>>> {
    dims.iter()
        .map(|&n| DMatrix::from_element(n, n, czero()))
        .collect()
}

/// `⟨A, X⟩ = b` with Hermitian `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T: Real> {
    pub matrix: SparseHermitian<T>,
    pub rhs: T,
}

/// `maximize ⟨C, X⟩  s.t.  ⟨A_k, X⟩ = b_k,  X ⪰ 0` over Hermitian block
/// matrices `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem<T: Real> {
    block_dims: Vec<usize>,
    objective: SparseHermitian<T>,
    constraints: Vec<Constraint<T>>,
    normalization: Option<usize>,
    labels: Option<LabelMap>,
}

impl<T: Real> SdpProblem<T> {
    pub fn new(
        block_dims: Vec<usize>,
        objective: SparseHermitian<T>,
        constraints: Vec<Constraint<T>>,
    ) -> Result<Self> {
        let check = |m: &SparseHermitian<T>, what: &str| -> Result<()> {
            for &(b, r, c, v) in m.entries() {
                if b >= block_dims.len() || c >= block_dims[b] {
                    return Err(Error::InvalidInput(format!(
                        "{what}: entry ({b}, {r}, {c}) outside block dimensions {block_dims:?}"
                    )));
                }
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::InvalidInput(format!("{what}: non-finite entry")));
                }
            }
            Ok(())
        };
        check(&objective, "objective")?;
        for (k, con) in constraints.iter().enumerate() {
            check(&con.matrix, &format!("constraint {k}"))?;
        }
        Ok(Self {
            block_dims,
            objective,
            constraints,
            normalization: None,
            labels: None,
        })
    }

    /// Marks constraint `k` as the normalization `⟨𝟙, X⟩ = 1` whose multiplier
    /// is the bound `ν`.
    pub fn with_normalization(mut self, k: usize) -> Result<Self> {
        if k >= self.constraints.len() {
            return Err(Error::InvalidInput(format!(
                "normalization index {k} out of range"
            )));
        }
        self.normalization = Some(k);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: LabelMap) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn objective(&self) -> &SparseHermitian<T> {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn normalization(&self) -> Option<usize> {
        self.normalization
    }

    pub fn labels(&self) -> Option<&LabelMap> {
        self.labels.as_ref()
    }

    /// `max_k |⟨A_k, X⟩ − b_k|`.
    pub fn max_constraint_residual(&self, x: &[DMatrix<C<T>>]) -> T {
        self.constraints
            .iter()
            .fold(T::zero(), |m, c| m.max((c.matrix.inner(x) - c.rhs).abs()))
    }

    /// `Σ_k y_k A_k − C`.
    pub fn dual_slack(&self, y: &[T]) -> Vec<DMatrix<C<T>>> {
        let mut z = zero_blocks(&self.block_dims);
        for (c, &yk) in self.constraints.iter().zip(y) {
            c.matrix.add_to(&mut z, yk);
        }
        self.objective.add_to(&mut z, -T::one());
        z
    }

    pub fn cast<U: Real>(&self) -> SdpProblem<U> {
        SdpProblem {
            block_dims: self.block_dims.clone(),
            objective: self.objective.cast(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    matrix: c.matrix.cast(),
                    rhs: U::lit(c.rhs.to_f64_lossy()),
                })
                .collect(),
            normalization: self.normalization,
            labels: self.labels.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm() -> Vec<DMatrix<C<f64>>> {
        vec![DMatrix::from_row_slice(
            2,
            2,
            &[C::new(2.0, 0.0), C::new(0.3, -0.7), C::new(0.3, 0.7), C::new(5.0, 0.0)],
        )]
    }

    #[test]
    fn functionals_pick_real_and_imaginary_parts() {
        let x = herm();
        let mut a = SparseHermitian::<f64>::new();
        a.push_real_part(0, 1, 0, 1.0);
        assert!((a.inner(&x) - 0.3).abs() < 1e-15);
        let mut a = SparseHermitian::<f64>::new();
        a.push_imag_part(0, 0, 1, 1.0);
        assert!((a.inner(&x) + 0.7).abs() < 1e-15);
        let mut a = SparseHermitian::<f64>::new();
        a.push_imag_part(0, 1, 0, 2.0);
        assert!((a.inner(&x) - 1.4).abs() < 1e-15);
        let c = C::new(0.5, 2.0);
        for (r, s) in [(0, 1), (1, 0), (1, 1)] {
            let mut a = SparseHermitian::<f64>::new();
            a.push_functional(0, r, s, c);
            assert!((a.inner(&x) - (c * x[0][(r, s)]).re).abs() < 1e-15);
        }
    }

    #[test]
    fn dense_form_is_hermitian_and_matches_inner_product() {
        let mut a = SparseHermitian::<f64>::new();
        a.push(0, 1, 0, C::new(1.0, 2.0));
        a.push(0, 1, 1, C::new(3.0, 9.0));
        let d = a.to_dense(&[2]);
        assert_eq!(d[0][(1, 0)], C::new(1.0, 2.0));
        assert_eq!(d[0][(0, 1)], C::new(1.0, -2.0));
        assert_eq!(d[0][(1, 1)], C::new(3.0, 0.0));
        let x = herm();
        let direct: C<f64> = d[0].iter().zip(x[0].iter()).map(|(p, q)| p.conj() * q).sum();
        assert!((direct.re - a.inner(&x)).abs() < 1e-14 && direct.im.abs() < 1e-14);
    }

    #[test]
    fn compress_merges_and_drops() {
        let mut a = SparseHermitian::<f64>::new();
        a.push_real_part(0, 0, 1, 1.0);
        a.push_real_part(0, 1, 0, -1.0);
        a.push(0, 0, 0, creal(2.0));
        a.compress(0.0);
        assert_eq!(a.entries(), &[(0, 0, 0, creal(2.0))]);
    }
}
