//! Haar systems, quasi-invariant measures on the unit space and the induced
//! measures and norms on arrows.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::Groupoid;
use crate::numkit::C64;

/// A Haar system in weight form: `λ^x({γ}) = w(s(γ))` for `γ ∈ G^x`.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarSystem {
    w: Vec<f64>,
}

impl HaarSystem {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        positive(&w, "Haar weight")?;
        Ok(HaarSystem { w })
    }

    pub fn uniform(units: usize) -> Self {
        HaarSystem { w: vec![1.0; units] }
    }

    /// Accept a per-arrow table `λ({γ})` and reduce it to weight form.
    /// The table must depend only on the source unit and agree with the
    /// value on that unit.
    pub fn from_arrow_weights(g: &Groupoid, table: &[f64]) -> Result<Self> {
        if table.len() != g.n_arrows() {
            return Err(Error::Dimension(format!("{} arrow weights for {} arrows", table.len(), g.n_arrows())));
        }
        positive(table, "Haar weight")?;
        let w: Vec<f64> = g.units().iter().map(|&u| table[u]).collect();
        for (a, &t) in table.iter().enumerate() {
            let expect = w[g.source(a)];
            if (t - expect).abs() > 1e-12 * expect.max(1.0) {
                return Err(Error::InvalidGroupoid(format!(
                    "Haar table is not left invariant: λ({}) = {t} but the source unit carries {expect}",
                    g.label(a)
                )));
            }
        }
        Ok(HaarSystem { w })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// `λ^{r(γ)}({γ})`.
    pub fn arrow_weight(&self, g: &Groupoid, a: usize) -> f64 {
        self.w[g.source(a)]
    }

    /// Largest relative defect of `λ^{r(γ)}({γη}) = λ^{s(γ)}({η})` over composable pairs.
    pub fn left_invariance_defect(&self, g: &Groupoid) -> f64 {
        g.composable_pairs()
            .map(|(_, b, ab)| {
                let (l, r) = (self.arrow_weight(g, ab), self.arrow_weight(g, b));
                (l - r).abs() / r
            })
            .fold(0.0, f64::max)
    }
}

fn positive(v: &[f64], what: &str) -> Result<()> {
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::NonPositiveWeight(format!("{what} {x}")));
    }
    Ok(())
}

/// Which arrow measure an `L^p` norm is taken against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArrowMeasure {
    Nu,
    NuInv,
    Nu0,
}

#[derive(Debug)]
pub struct MeasuredGroupoid {
    groupoid: Groupoid,
    haar: HaarSystem,
    mu: Vec<f64>,
    nu: Vec<f64>,
    nu_inv: Vec<f64>,
    nu0: Vec<f64>,
    delta: Vec<f64>,
    factors: Option<(Arc<MeasuredGroupoid>, Arc<MeasuredGroupoid>)>,
}

const COCYCLE_TOL: f64 = 1e-12;

impl MeasuredGroupoid {
    pub fn build(groupoid: Groupoid, haar: HaarSystem, mu: Vec<f64>) -> Result<Arc<Self>> {
        Self::build_inner(groupoid, haar, mu, None).map(Arc::new)
    }

    /// Uniform Haar weights and uniform `μ`.
    pub fn uniform(groupoid: Groupoid) -> Result<Arc<Self>> {
        let n = groupoid.n_units();
        Self::build(groupoid, HaarSystem::uniform(n), vec![1.0; n])
    }

    fn build_inner(groupoid: Groupoid, haar: HaarSystem, mu: Vec<f64>, factors: Option<(Arc<MeasuredGroupoid>, Arc<MeasuredGroupoid>)>) -> Result<Self> {
        let units = groupoid.n_units();
        if haar.w.len() != units || mu.len() != units {
            return Err(Error::Dimension(format!(
                "{units} units but {} Haar weights and {} measure values",
                haar.w.len(),
                mu.len()
            )));
        }
        positive(&mu, "unit measure")?;
        if let Some(d) = groupoid.validate().first() {
            return Err(Error::InvalidGroupoid(d.to_string()));
        }
        let n = groupoid.n_arrows();
        let w = &haar.w;
        let nu: Vec<f64> = (0..n).map(|a| mu[groupoid.range(a)] * w[groupoid.source(a)]).collect();
        let nu_inv: Vec<f64> = (0..n).map(|a| nu[groupoid.inverse(a)]).collect();
        let nu0 = nu.iter().zip(&nu_inv).map(|(a, b)| (a * b).sqrt()).collect();
        let delta: Vec<f64> = nu.iter().zip(&nu_inv).map(|(a, b)| a / b).collect();
        let mg = MeasuredGroupoid {
            groupoid,
            haar,
            mu,
            nu,
            nu_inv,
            nu0,
            delta,
            factors,
        };
        let defect = mg.haar.left_invariance_defect(&mg.groupoid).max(mg.cocycle_defect());
        if defect > COCYCLE_TOL {
            return Err(Error::InvalidGroupoid(format!("measure invariants fail (defect {defect:.3e})")));
        }
        Ok(mg)
    }

    /// `G₁ × G₂` with the tensor Haar system and the product measure.
    pub fn product(a: &Arc<MeasuredGroupoid>, b: &Arc<MeasuredGroupoid>) -> Result<Arc<Self>> {
        let g = Groupoid::product(&a.groupoid, &b.groupoid)?;
        let tensor = |x: &[f64], y: &[f64]| x.iter().flat_map(|s| y.iter().map(move |t| s * t)).collect::<Vec<_>>();
        let w = tensor(&a.haar.w, &b.haar.w);
        let mu = tensor(&a.mu, &b.mu);
        Self::build_inner(g, HaarSystem { w }, mu, Some((a.clone(), b.clone()))).map(Arc::new)
    }

    /// `G₁ ⊔ G₂` with the concatenated data.
    pub fn disjoint_union(a: &MeasuredGroupoid, b: &MeasuredGroupoid) -> Result<Arc<Self>> {
        let g = Groupoid::disjoint_union(&a.groupoid, &b.groupoid)?;
        let w = a.haar.w.iter().chain(&b.haar.w).copied().collect();
        let mu = a.mu.iter().chain(&b.mu).copied().collect();
        Self::build(g, HaarSystem { w }, mu)
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn haar(&self) -> &HaarSystem {
        &self.haar
    }

    pub fn w(&self) -> &[f64] {
        &self.haar.w
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn nu_inv(&self) -> &[f64] {
        &self.nu_inv
    }

    pub fn nu0(&self) -> &[f64] {
        &self.nu0
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn n_arrows(&self) -> usize {
        self.groupoid.n_arrows()
    }

    /// The factors this groupoid was built from by [`MeasuredGroupoid::product`].
    pub fn factors(&self) -> Option<(&Arc<MeasuredGroupoid>, &Arc<MeasuredGroupoid>)> {
        self.factors.as_ref().map(|(a, b)| (a, b))
    }

    pub fn arrow_measure(&self, which: ArrowMeasure) -> &[f64] {
        match which {
            ArrowMeasure::Nu => &self.nu,
            ArrowMeasure::NuInv => &self.nu_inv,
            ArrowMeasure::Nu0 => &self.nu0,
        }
    }

    /// Largest relative violation among the δ identities: multiplicativity,
    /// inversion and triviality on units.
    pub fn cocycle_defect(&self) -> f64 {
        let g = &self.groupoid;
        let d = &self.delta;
        let mut worst: f64 = 0.0;
        for (a, b, ab) in g.composable_pairs() {
            worst = worst.max((d[ab] - d[a] * d[b]).abs() / d[ab]);
        }
        for a in 0..g.n_arrows() {
            worst = worst.max((d[g.inverse(a)] * d[a] - 1.0).abs());
            worst = worst.max((self.nu0[g.inverse(a)] - self.nu0[a]).abs() / self.nu0[a]);
        }
        for &u in g.units() {
            worst = worst.max((d[u] - 1.0).abs());
        }
        worst
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        self.delta.iter().all(|d| (d - 1.0).abs() <= tol)
    }

    fn check_len(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.n_arrows() {
            return Err(Error::Dimension(format!("{} values for {} arrows", f.len(), self.n_arrows())));
        }
        Ok(())
    }

    /// `‖f‖_{p,q}`: `L^p` along range fibers weighted by `w∘s`, then `L^q(μ)`.
    pub fn mixed_norm(&self, f: &[C64], p: f64, q: f64) -> Result<f64> {
        self.check_len(f)?;
        let g = &self.groupoid;
        let inner: Vec<f64> = (0..g.n_units())
            .map(|x| fiber_norm(g.range_fiber(x).iter().map(|&a| (f[a].norm(), self.haar.w[g.source(a)])), p))
            .collect::<Result<_>>()?;
        fiber_norm(inner.into_iter().zip(self.mu.iter().copied()), q)
    }

    /// The mixed norm of `f*` computed on `f` itself: `L^p` along source
    /// fibers weighted by `w∘r`, then `L^q(μ)`.
    pub fn mixed_norm_star(&self, f: &[C64], p: f64, q: f64) -> Result<f64> {
        self.check_len(f)?;
        let g = &self.groupoid;
        let inner: Vec<f64> = (0..g.n_units())
            .map(|x| fiber_norm(g.source_fiber(x).iter().map(|&a| (f[a].norm(), self.haar.w[g.range(a)])), p))
            .collect::<Result<_>>()?;
        fiber_norm(inner.into_iter().zip(self.mu.iter().copied()), q)
    }

    /// `‖f‖_{L^p(m)}` for one of the three arrow measures.
    pub fn lp_norm(&self, f: &[C64], p: f64, which: ArrowMeasure) -> Result<f64> {
        self.check_len(f)?;
        fiber_norm(f.iter().map(|z| z.norm()).zip(self.arrow_measure(which).iter().copied()), p)
    }

    /// `‖f^x‖_{L^p(λ^x)}` for each unit `x`.
    pub fn range_fiber_norms(&self, f: &[C64], p: f64) -> Result<Vec<f64>> {
        self.check_len(f)?;
        let g = &self.groupoid;
        (0..g.n_units())
            .map(|x| fiber_norm(g.range_fiber(x).iter().map(|&a| (f[a].norm(), self.haar.w[g.source(a)])), p))
            .collect()
    }
}

/// `(Σ |v|^p m)^{1/p}`, or the max of `|v|` when `p = ∞`.
pub fn fiber_norm(items: impl Iterator<Item = (f64, f64)>, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p == f64::INFINITY {
        return Ok(items.map(|(v, _)| v).fold(0.0, f64::max));
    }
    // scale by the max so large p does not overflow
    let items: Vec<(f64, f64)> = items.collect();
    let top = items.iter().map(|(v, _)| *v).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = items.iter().map(|(v, m)| (v / top).powf(p) * m).sum();
    Ok(top * s.powf(1.0 / p))
}

pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::BadExponent(p));
    }
    Ok(())
}
