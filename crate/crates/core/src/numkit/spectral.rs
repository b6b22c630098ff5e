//! Spectral kernels on dense complex matrices.
//!
//! Everything here goes through the Hermitian eigensolver: singular values,
//! matrix powers, pseudo-inverse solves and null spaces. Spectra are the
//! objects the rest of the crate reasons about, so no Schur or Padé routes.

use super::matrix::{vec_norm, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Numerical thresholds shared by the spectral kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for equality checks.
    pub eq: f64,
    /// An eigenvalue above `-psd·‖A‖` is admitted as non-negative.
    pub psd: f64,
    /// An eigenvalue below `inv·‖A‖` is treated as zero.
    pub inv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq: 1e-9,
            psd: 1e-10,
            inv: 1e-12,
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V diag(g(λ)) V†`.
    pub fn map(&self, mut g: impl FnMut(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let gv: Vec<C64> = self.values.iter().map(|&l| g(l)).collect();
        let v = &self.vectors;
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            if gv[k] == ZERO {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * gv[k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| C64::new(l, 0.0))
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// a real plane rotation, so the iteration is the real symmetric Jacobi method
/// in disguise and converges for every Hermitian input.
pub fn eigh(a: &CMatrix, tol: f64) -> Result<HermEig> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("eigh needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let norm = a.frobenius_norm();
    let asym = a.hermitian_defect();
    if asym > tol * norm.max(f64::MIN_POSITIVE) && asym > 0.0 {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);

    let mut converged = n <= 1;
    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off == 0.0 || off <= 1e-30 * norm {
            converged = true;
            break;
        }
        let first_sweeps = sweep < 4;
        let threshold = if first_sweeps { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let g = 100.0 * apq.norm();
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if !first_sweeps && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[(p, q)] = ZERO;
                    m[(q, p)] = ZERO;
                    continue;
                }
                if apq.norm() <= threshold || apq == ZERO {
                    continue;
                }
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermEig { values, vectors })
}

fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let beta = apq.norm();
    let phase = apq / beta;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * beta);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) · [[c, s], [-s, c]]
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * u_pp + akq * u_qp;
        m[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        m[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Singular values in descending order, `min(rows, cols)` of them.
///
/// Right singular vectors come from `eigh(A†A)`; each value is then read off
/// as `‖A v_i‖`, which keeps small singular values accurate to `ε‖A‖` instead
/// of `√ε‖A‖`.
pub fn svd_values(a: &CMatrix) -> Result<Vec<f64>> {
    if a.rows() < a.cols() {
        return svd_values(&a.adjoint());
    }
    if a.cols() == 0 {
        return Ok(Vec::new());
    }
    let gram = a.adjoint().matmul(a);
    let eig = eigh(&gram, 1e-8)?;
    let av = a.matmul(&eig.vectors);
    let mut sv: Vec<f64> = (0..a.cols()).map(|k| vec_norm(&av.column(k))).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Polar decomposition `A = U|A|` with `U` a partial isometry vanishing on `ker A`.
pub fn polar(a: &CMatrix, tol: &Tolerances) -> Result<(CMatrix, CMatrix)> {
    let gram = a.adjoint().matmul(a);
    let eig = eigh(&gram, 1e-8)?;
    let top = eig.spectral_norm();
    // σ below ~1e-10·σ_max is treated as kernel
    let cut = (tol.inv * 1e2).powi(2) * top;
    let abs = eig.map(|l| if l > cut { C64::new(l.sqrt(), 0.0) } else { ZERO });
    let inv_abs = eig.map(|l| if l > cut { C64::new(1.0 / l.sqrt(), 0.0) } else { ZERO });
    Ok((a.matmul(&inv_abs), abs))
}

/// `A^t` for positive semidefinite `A`, with `0^t := 0` for `t ≥ 0`.
pub fn psd_power(a: &CMatrix, t: f64, tol: &Tolerances) -> Result<CMatrix> {
    let eig = eigh(a, 1e-8)?;
    psd_power_eig(&eig, t, tol)
}

pub fn psd_power_eig(eig: &HermEig, t: f64, tol: &Tolerances) -> Result<CMatrix> {
    let scale = eig.spectral_norm();
    let min = eig.min();
    if min < -tol.psd * scale {
        return Err(Error::NotPsd { min_eig: min });
    }
    let cut = tol.inv * scale;
    if t < 0.0 && min <= cut {
        return Err(Error::SingularNegativePower { min_eig: min });
    }
    Ok(eig.map(|l| if l <= cut { ZERO } else { C64::new(l.powf(t), 0.0) }))
}

/// `A^z` through the principal branch `λ^z = exp(z ln λ)`.
///
/// A strictly positive definite input is required unless `Re z > 0`, in which
/// case the kernel of `A` is sent to zero.
pub fn psd_power_complex(a: &CMatrix, z: C64, tol: &Tolerances) -> Result<CMatrix> {
    let eig = eigh(a, 1e-8)?;
    psd_power_complex_eig(&eig, z, tol)
}

pub fn psd_power_complex_eig(eig: &HermEig, z: C64, tol: &Tolerances) -> Result<CMatrix> {
    let scale = eig.spectral_norm();
    let min = eig.min();
    if min < -tol.psd * scale {
        return Err(Error::NotPsd { min_eig: min });
    }
    let cut = tol.inv * scale;
    if min <= cut && z.re <= 0.0 {
        return Err(Error::SingularNegativePower { min_eig: min });
    }
    Ok(eig.map(|l| if l <= cut { ZERO } else { (z * l.ln()).exp() }))
}

/// Minimal-norm least-squares solution of `Ax = b`, rejected when the residual
/// exceeds `tol·max(1, ‖b‖)`.
pub fn solve_linear(a: &CMatrix, b: &[C64], tol: f64) -> Result<Vec<C64>> {
    if a.rows() != b.len() {
        return Err(Error::Dimension(format!("system has {} rows but rhs has {}", a.rows(), b.len())));
    }
    let ah = a.adjoint();
    let gram = ah.matmul(a);
    let eig = eigh(&gram, 1e-8)?;
    let top = eig.spectral_norm();
    let cut = 1e-13 * top;
    let atb = ah.mul_vec(b);
    let n = a.cols();
    let mut x = vec![ZERO; n];
    for (k, &l) in eig.values.iter().enumerate() {
        if l <= cut || l == 0.0 {
            continue;
        }
        let coeff: C64 = (0..n).map(|i| eig.vectors[(i, k)].conj() * atb[i]).sum::<C64>() / l;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += eig.vectors[(i, k)] * coeff;
        }
    }
    let ax = a.mul_vec(&x);
    let residual = vec_norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    if residual > tol * vec_norm(b).max(1.0) {
        return Err(Error::Inconsistent { residual });
    }
    Ok(x)
}

/// Orthonormal basis of `ker A` (columns of the returned vectors).
pub fn null_space(a: &CMatrix, rel_tol: f64) -> Result<Vec<Vec<C64>>> {
    let gram = a.adjoint().matmul(a);
    let eig = eigh(&gram, 1e-8)?;
    let cut = rel_tol * eig.spectral_norm().max(f64::MIN_POSITIVE);
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= cut)
        .map(|(k, _)| eig.vectors.column(k))
        .collect())
}

/// `Tr |A|^q = Σ σ_i^q`; for `q = ∞` the largest singular value.
pub fn trace_abs_power(a: &CMatrix, q: f64) -> Result<f64> {
    if q < 1.0 || q.is_nan() {
        return Err(Error::BadExponent(q));
    }
    let sv = svd_values(a)?;
    if q.is_infinite() {
        return Ok(sv.first().copied().unwrap_or(0.0));
    }
    Ok(sv.iter().map(|s| s.powf(q)).sum())
}

/// Operator norm.
pub fn op_norm(a: &CMatrix) -> Result<f64> {
    Ok(svd_values(a)?.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, k: usize) -> CMatrix {
        CMatrix::from_fn(r, k, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let h = random_matrix(rng, n, n).hermitian_part();
        psd_power_complex_eig(
            &eigh(&(&h.matmul(&h) + &CMatrix::identity(n)), 1e-8).unwrap(),
            C64::new(0.0, 1.3),
            &Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn eigh_of_diagonal_sorts() {
        let e = eigh(&CMatrix::diag_real(&[3.0, 1.0]), 1e-9).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
        assert_relative_eq!(e.vectors[(1, 0)].norm(), 1.0);
        assert_relative_eq!(e.vectors[(0, 1)].norm(), 1.0);
    }

    #[test]
    fn eigh_pauli_x() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eigh(&x, 1e-9).unwrap();
        assert_relative_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eigh(&a, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_gram_matrix_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_matrix(&mut rng, 8, 8);
        let a = b.adjoint().matmul(&b);
        let e = eigh(&a, 1e-9).unwrap();
        assert!(e.values.iter().all(|&l| l >= -1e-12));
        let resid = (&a - &e.reconstruct()).frobenius_norm();
        assert!(resid <= 1e-10 * a.frobenius_norm(), "residual {resid}");
        let vtv = e.vectors.adjoint().matmul(&e.vectors);
        assert!((&vtv - &CMatrix::identity(8)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn eigh_large_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 64, 64).hermitian_part();
        let e = eigh(&a, 1e-9).unwrap();
        let resid = (&a - &e.reconstruct()).frobenius_norm();
        assert!(resid <= 1e-10 * a.frobenius_norm(), "residual {resid}");
    }

    #[test]
    fn svd_examples() {
        let sv = svd_values(&CMatrix::identity(4)).unwrap();
        assert!(sv.iter().all(|&s| (s - 1.0).abs() < 1e-15));
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let sv = svd_values(&a).unwrap();
        assert_relative_eq!(sv[0], 2f64.sqrt(), epsilon = 1e-15);
        assert!(sv[1].abs() < 1e-15);
        let sva = svd_values(&a.adjoint()).unwrap();
        assert_relative_eq!(sva[0], sv[0], epsilon = 1e-15);
    }

    #[test]
    fn svd_of_rectangular() {
        let a = CMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 4.0, 0.0]]);
        let sv = svd_values(&a).unwrap();
        assert_eq!(sv.len(), 2);
        assert_relative_eq!(sv[0], 4.0, epsilon = 1e-14);
        assert_relative_eq!(sv[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn svd_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 6, 6);
        let u = random_unitary(&mut rng, 6);
        let v = random_unitary(&mut rng, 6);
        let s1 = svd_values(&a).unwrap();
        let s2 = svd_values(&u.matmul(&a).matmul(&v)).unwrap();
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn psd_power_examples() {
        let tol = Tolerances::default();
        let a = CMatrix::diag_real(&[4.0, 1.0]);
        let h = psd_power(&a, 0.5, &tol).unwrap();
        assert!((&h - &CMatrix::diag_real(&[2.0, 1.0])).frobenius_norm() < 1e-14);
        let h = psd_power(&a, -0.5, &tol).unwrap();
        assert!((&h - &CMatrix::diag_real(&[0.5, 1.0])).frobenius_norm() < 1e-14);
        let h = psd_power(&a, 0.0, &tol).unwrap();
        assert!((&h - &CMatrix::identity(2)).frobenius_norm() < 1e-14);
        // rank one: t = 0 is the range projection
        let p = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let h = psd_power(&p, 0.0, &tol).unwrap();
        assert!((&h - &p.scale_real(0.5)).frobenius_norm() < 1e-14);
        assert!(matches!(psd_power(&p, -1.0, &tol), Err(Error::SingularNegativePower { .. })));
        assert!(matches!(psd_power(&CMatrix::diag_real(&[1.0, -1.0]), 0.5, &tol), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn psd_power_complex_examples() {
        let tol = Tolerances::default();
        let i3 = CMatrix::identity(3);
        let r = psd_power_complex(&i3, C64::new(0.3, -2.0), &tol).unwrap();
        assert!((&r - &i3).frobenius_norm() < 1e-14);

        let d = CMatrix::diag_real(&[4.0, 1.0]);
        let u = psd_power_complex(&d, C64::new(0.0, 0.7), &tol).unwrap();
        let uu = u.adjoint().matmul(&u);
        assert!((&uu - &CMatrix::identity(2)).frobenius_norm() < 1e-14);
        let expected = (C64::new(0.0, 0.7) * 4f64.ln()).exp();
        assert!((u[(0, 0)] - expected).norm() < 1e-14);

        let e = std::f64::consts::E;
        let r = psd_power_complex(&CMatrix::diag_real(&[e, 1.0]), C64::new(1.0, 1.0), &tol).unwrap();
        let expected = c(e) * C64::new(1.0_f64.cos(), 1.0_f64.sin());
        assert!((r[(0, 0)] - expected).norm() < 1e-13);
        assert!((r[(1, 1)] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn solve_linear_cases() {
        let b = vec![c(1.0), C64::new(2.0, -1.0)];
        let x = solve_linear(&CMatrix::identity(2), &b, 1e-9).unwrap();
        assert!((x[0] - b[0]).norm() < 1e-14 && (x[1] - b[1]).norm() < 1e-14);

        // rank deficient but consistent: x + y = 2 has minimal-norm solution (1, 1)
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let x = solve_linear(&a, &[c(2.0), c(2.0)], 1e-9).unwrap();
        assert!((x[0] - c(1.0)).norm() < 1e-12 && (x[1] - c(1.0)).norm() < 1e-12);
        let back = a.mul_vec(&x);
        assert!((back[0] - c(2.0)).norm() < 1e-12);

        assert!(matches!(solve_linear(&a, &[c(1.0), c(2.0)], 1e-9), Err(Error::Inconsistent { .. })));
    }

    #[test]
    fn trace_abs_power_cases() {
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_relative_eq!(trace_abs_power(&a, 2.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(trace_abs_power(&CMatrix::identity(5), 3.0).unwrap(), 5.0, epsilon = 1e-13);
        assert_relative_eq!(trace_abs_power(&a, f64::INFINITY).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
        assert!(matches!(trace_abs_power(&a, 0.5), Err(Error::BadExponent(_))));
    }

    #[test]
    fn polar_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 5, 5);
        let (u, abs) = polar(&a, &Tolerances::default()).unwrap();
        assert!((&u.matmul(&abs) - &a).frobenius_norm() < 1e-10);
        let uu = u.adjoint().matmul(&u);
        assert!((&uu - &CMatrix::identity(5)).frobenius_norm() < 1e-9);
    }
}
