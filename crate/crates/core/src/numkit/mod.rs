//! Dense complex linear algebra: the matrix type, a Jacobi eigensolver and the
//! spectral functions built on it. No domain knowledge lives here.

mod matrix;
mod spectral;

pub use matrix::{vec_inner, vec_norm, CMatrix, C64, ONE, ZERO};
pub use spectral::{
    eigh, null_space, op_norm, polar, psd_power, psd_power_complex, psd_power_complex_eig, psd_power_eig, solve_linear, svd_values, trace_abs_power, HermEig,
    Tolerances,
};

/// A partition of `0..n` into diagonal blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks(pub Vec<Vec<usize>>);

impl Blocks {
    pub fn dim(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    /// Frobenius mass of `a` outside the diagonal blocks.
    pub fn off_block_mass(&self, a: &CMatrix) -> f64 {
        let mut owner = vec![0usize; self.dim()];
        for (b, idx) in self.0.iter().enumerate() {
            for &i in idx {
                owner[i] = b;
            }
        }
        let mut acc = 0.0;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if owner[i] != owner[j] {
                    acc += a[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    pub fn extract(&self, a: &CMatrix) -> Vec<CMatrix> {
        self.0.iter().map(|idx| a.submatrix(idx, idx)).collect()
    }

    /// Reassemble a block-diagonal matrix from per-block pieces.
    pub fn assemble(&self, pieces: &[CMatrix]) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (idx, piece) in self.0.iter().zip(pieces) {
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    out[(i, j)] = piece[(a, b)];
                }
            }
        }
        out
    }

    /// Singular values of the block-diagonal part of `a`, all blocks pooled.
    pub fn svd_values(&self, a: &CMatrix) -> crate::error::Result<Vec<f64>> {
        let mut all = Vec::with_capacity(self.dim());
        for block in self.extract(a) {
            all.extend(svd_values(&block)?);
        }
        all.sort_by(|x, y| y.total_cmp(x));
        Ok(all)
    }

    /// `Σ σ_i^q` over the block-diagonal part (`q = ∞`: largest σ).
    pub fn trace_abs_power(&self, a: &CMatrix, q: f64) -> crate::error::Result<f64> {
        if q < 1.0 || q.is_nan() {
            return Err(crate::error::Error::BadExponent(q));
        }
        let sv = self.svd_values(a)?;
        if q.is_infinite() {
            return Ok(sv.first().copied().unwrap_or(0.0));
        }
        Ok(sv.iter().map(|s| s.powf(q)).sum())
    }
}
