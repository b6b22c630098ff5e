//! Classical cross-checks: the discrete Fourier transform on finite abelian
//! groups and weighted Schatten norms of kernels on pair groupoids.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convalg::GFunction;
use crate::error::{Error, Result};
use crate::measure::MeasuredGroupoid;
use crate::numkit::{eigh, svd_values, CMatrix, C64};

/// Characters of a finite abelian group and the dual weight that makes
/// `f ↦ f̂` unitary from `L²(ν)`.
#[derive(Clone, Debug)]
pub struct DftOracle {
    base: Arc<MeasuredGroupoid>,
    /// `characters[k][γ] = χ_k(γ)`.
    pub characters: Vec<Vec<C64>>,
    /// `max |χ(gh) − χ(g)χ(h)|`.
    pub homomorphism_residual: f64,
    /// Mass of each point of the dual group.
    pub dual_weight: f64,
    c_w: f64,
}

impl DftOracle {
    /// The characters are read off a joint eigenbasis of the translation
    /// operators, and the dual weight from a Parseval probe on `δ_e`.
    pub fn new(base: Arc<MeasuredGroupoid>) -> Result<Self> {
        let g = base.groupoid();
        if g.n_units() != 1 {
            return Err(Error::NotAbelian);
        }
        let n = g.n_arrows();
        let mul = |a: usize, b: usize| g.compose(a, b).expect("group elements compose");
        if (0..n).any(|a| (0..n).any(|b| mul(a, b) != mul(b, a))) {
            return Err(Error::NotAbelian);
        }
        let e = g.unit_arrow(0);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut h = CMatrix::zeros(n, n);
        for a in 0..n {
            let (x, y): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let t = CMatrix::from_fn(n, n, |i, k| if i == mul(a, k) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
            let sym = &t + &t.adjoint();
            let skew = (&t - &t.adjoint()).scale(C64::new(0.0, 1.0));
            h = &h + &(&sym.scale_real(x) + &skew.scale_real(y));
        }
        let eig = eigh(&h, 1e-14)?;
        let characters: Vec<Vec<C64>> = (0..n)
            .map(|k| {
                let v = eig.vectors.column(k);
                let v0 = v[e];
                v.iter().map(|z| z / v0).collect()
            })
            .collect();
        let mut homomorphism_residual: f64 = 0.0;
        for chi in &characters {
            for a in 0..n {
                for b in 0..n {
                    homomorphism_residual = homomorphism_residual.max((chi[mul(a, b)] - chi[a] * chi[b]).norm());
                }
            }
        }
        let c_w = base.w()[0];
        let mut oracle = DftOracle {
            base,
            characters,
            homomorphism_residual,
            dual_weight: 1.0,
            c_w,
        };
        let probe = GFunction::indicator(oracle.base.clone(), e);
        let lhs = probe.lp_norm(2.0, crate::measure::ArrowMeasure::Nu)?.powi(2);
        let rhs: f64 = oracle.transform(&probe)?.iter().map(|z| z.norm_sqr()).sum();
        oracle.dual_weight = lhs / rhs;
        Ok(oracle)
    }

    /// `f̂(χ) = Σ_γ f(γ) χ̄(γ) c_w`.
    pub fn transform(&self, f: &GFunction) -> Result<Vec<C64>> {
        if !Arc::ptr_eq(f.base(), &self.base) {
            return Err(Error::BaseMismatch);
        }
        Ok(self
            .characters
            .iter()
            .map(|chi| chi.iter().zip(f.values()).map(|(c, v)| v * c.conj()).sum::<C64>() * self.c_w)
            .collect())
    }

    /// `‖f̂‖_q` under the dual weight.
    pub fn dual_norm(&self, fhat: &[C64], q: f64) -> f64 {
        if q.is_infinite() {
            return fhat.iter().fold(0.0, |m, z| m.max(z.norm()));
        }
        (fhat.iter().map(|z| z.norm().powf(q)).sum::<f64>() * self.dual_weight).powf(1.0 / q)
    }
}

/// Kernel view of a function on a pair groupoid with `w ≡ 1`.
#[derive(Clone, Debug)]
pub struct SchattenOracle {
    base: Arc<MeasuredGroupoid>,
    /// `arrow[x][y]` is the arrow with range `x` and source `y`.
    arrow: Vec<Vec<usize>>,
}

impl SchattenOracle {
    pub fn new(base: Arc<MeasuredGroupoid>) -> Result<Self> {
        let g = base.groupoid();
        let n = g.n_units();
        if g.n_arrows() != n * n || base.w().iter().any(|&w| w != 1.0) {
            return Err(Error::NotPairGroupoid);
        }
        let mut arrow = vec![vec![usize::MAX; n]; n];
        for a in 0..g.n_arrows() {
            let slot = &mut arrow[g.range(a)][g.source(a)];
            if *slot != usize::MAX {
                return Err(Error::NotPairGroupoid);
            }
            *slot = a;
        }
        Ok(SchattenOracle { base, arrow })
    }

    pub fn kernel(&self, f: &GFunction) -> CMatrix {
        let n = self.arrow.len();
        CMatrix::from_fn(n, n, |x, y| f.values()[self.arrow[x][y]])
    }

    /// `(Σ σ_i(D^{1/2q} K D^{1/2q})^q)^{1/q}` with `D = diag(μ)`.
    pub fn weighted_schatten(&self, f: &GFunction, q: f64) -> Result<f64> {
        let k = self.kernel(f);
        if q.is_infinite() {
            return Ok(svd_values(&k)?.first().copied().unwrap_or(0.0));
        }
        let d: Vec<f64> = self.base.mu().iter().map(|m| m.powf(0.5 / q)).collect();
        let n = d.len();
        let kw = CMatrix::from_fn(n, n, |x, y| k[(x, y)] * d[x] * d[y]);
        Ok(svd_values(&kw)?.iter().map(|s| s.powf(q)).sum::<f64>().powf(1.0 / q))
    }

    /// `(Σ_{x,y} |K(x,y)|² (μ(x)μ(y))^{1/2})^{1/2}`.
    pub fn hilbert_schmidt(&self, f: &GFunction) -> f64 {
        let mu = self.base.mu();
        let k = self.kernel(f);
        let n = mu.len();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| k[(x, y)].norm_sqr() * (mu[x] * mu[y]).sqrt())
            .sum::<f64>()
            .sqrt()
    }
}
