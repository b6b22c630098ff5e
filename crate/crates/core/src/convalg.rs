//! Functions on a measured groupoid and their convolution *-algebra.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measure::{ArrowMeasure, MeasuredGroupoid};
use crate::numkit::{C64, ZERO};

/// A complex function on the arrows of a measured groupoid.
#[derive(Clone)]
pub struct GFunction {
    base: Arc<MeasuredGroupoid>,
    values: Vec<C64>,
}

impl fmt::Debug for GFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GFunction").field("values", &self.values).finish()
    }
}

impl GFunction {
    pub fn new(base: Arc<MeasuredGroupoid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != base.n_arrows() {
            return Err(Error::Dimension(format!("{} values for {} arrows", values.len(), base.n_arrows())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Dimension("function values must be finite".into()));
        }
        Ok(GFunction { base, values })
    }

    pub fn from_real(base: Arc<MeasuredGroupoid>, values: &[f64]) -> Result<Self> {
        Self::new(base, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(base: Arc<MeasuredGroupoid>) -> Self {
        let n = base.n_arrows();
        GFunction { base, values: vec![ZERO; n] }
    }

    /// The indicator `1_γ`.
    pub fn indicator(base: Arc<MeasuredGroupoid>, arrow: usize) -> Self {
        let mut f = Self::zeros(base);
        f.values[arrow] = C64::new(1.0, 0.0);
        f
    }

    /// Convolution unit: `1/w(x)` on units, zero elsewhere.
    pub fn identity_element(base: Arc<MeasuredGroupoid>) -> Self {
        let mut f = Self::zeros(base);
        let g = f.base.groupoid();
        let vals: Vec<(usize, f64)> = g.units().iter().enumerate().map(|(x, &u)| (u, 1.0 / f.base.w()[x])).collect();
        for (u, v) in vals {
            f.values[u] = C64::new(v, 0.0);
        }
        f
    }

    /// Entries drawn i.i.d. complex Gaussian with variance 1/2 per component.
    pub fn random<R: Rng + ?Sized>(base: Arc<MeasuredGroupoid>, rng: &mut R) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let values = (0..base.n_arrows())
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(s * re, s * im)
            })
            .collect();
        GFunction { base, values }
    }

    pub fn base(&self) -> &Arc<MeasuredGroupoid> {
        &self.base
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn same_base(&self, other: &GFunction) -> bool {
        Arc::ptr_eq(&self.base, &other.base)
    }

    fn require_same(&self, other: &GFunction) -> Result<()> {
        if self.same_base(other) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(usize, C64) -> C64) -> GFunction {
        GFunction {
            base: self.base.clone(),
            values: self.values.iter().enumerate().map(|(i, &z)| f(i, z)).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> GFunction {
        self.map(|_, z| z * c)
    }

    pub fn add(&self, other: &GFunction) -> Result<GFunction> {
        self.require_same(other)?;
        Ok(self.map(|i, z| z + other.values[i]))
    }

    pub fn sub(&self, other: &GFunction) -> Result<GFunction> {
        self.require_same(other)?;
        Ok(self.map(|i, z| z - other.values[i]))
    }

    /// `(f*g)(γ) = Σ_{η ∈ G^{s(γ)}} f(γη) g(η⁻¹) w(s(η))`.
    pub fn convolve(&self, other: &GFunction) -> Result<GFunction> {
        self.require_same(other)?;
        let g = self.base.groupoid();
        let w = self.base.w();
        let values = (0..g.n_arrows())
            .map(|a| {
                g.range_fiber(g.source(a))
                    .iter()
                    .map(|&h| {
                        let ah = g.compose(a, h).expect("composable");
                        self.values[ah] * other.values[g.inverse(h)] * w[g.source(h)]
                    })
                    .sum()
            })
            .collect();
        Ok(GFunction {
            base: self.base.clone(),
            values,
        })
    }

    /// `f*(γ) = conj f(γ⁻¹)`.
    pub fn involution(&self) -> GFunction {
        let g = self.base.groupoid();
        self.map(|a, _| self.values[g.inverse(a)].conj())
    }

    /// `δ^z f`, principal branch.
    pub fn delta_twist(&self, z: C64) -> GFunction {
        let d = self.base.delta();
        self.map(|a, v| v * (z * d[a].ln()).exp())
    }

    /// `f₁ ⊗ f₂` on a base built by [`MeasuredGroupoid::product`] from the two factors' bases.
    pub fn tensor(&self, other: &GFunction, product: &Arc<MeasuredGroupoid>) -> Result<GFunction> {
        let (a, b) = product.factors().ok_or(Error::BaseMismatch)?;
        if !Arc::ptr_eq(a, &self.base) || !Arc::ptr_eq(b, &other.base) {
            return Err(Error::BaseMismatch);
        }
        let values = self.values.iter().flat_map(|x| other.values.iter().map(move |y| x * y)).collect();
        Ok(GFunction { base: product.clone(), values })
    }

    /// `(f | g) = Σ f conj(g) ν⁻¹`.
    pub fn inner(&self, other: &GFunction) -> Result<C64> {
        self.require_same(other)?;
        let m = self.base.nu_inv();
        Ok(self.values.iter().zip(&other.values).zip(m).map(|((a, b), w)| a * b.conj() * *w).sum())
    }

    pub fn mixed_norm(&self, p: f64, q: f64) -> Result<f64> {
        self.base.mixed_norm(&self.values, p, q)
    }

    /// `‖f*‖_{p,q}` evaluated along source fibers of `f`.
    pub fn mixed_norm_star(&self, p: f64, q: f64) -> Result<f64> {
        self.base.mixed_norm_star(&self.values, p, q)
    }

    pub fn lp_norm(&self, p: f64, which: ArrowMeasure) -> Result<f64> {
        self.base.lp_norm(&self.values, p, which)
    }

    /// Sup-norm distance to another function on the same base.
    pub fn max_diff(&self, other: &GFunction) -> Result<f64> {
        self.require_same(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
