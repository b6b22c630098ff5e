//! Numeric witnesses for the interpolation argument: the analytic family
//! `f_z`, the estimates on the boundary lines of the strip `1/2 ≤ Re z ≤ 1`,
//! the duality witness `H(z)` and the tensor-power sharpening.

use std::sync::Arc;

use rand::Rng;

use crate::convalg::GFunction;
use crate::error::{Error, Result};
use crate::measure::{fiber_norm, ArrowMeasure, MeasuredGroupoid};
use crate::nclp::{conjugate_exponent, fourier, lq_norm, plancherel_check};
use crate::numkit::{polar, psd_power_complex, vec_inner, vec_norm, CMatrix, C64};
use crate::repmod::RepContext;

/// Evaluation grid over the closed strip.
#[derive(Clone, Debug, PartialEq)]
pub struct StripGrid {
    pub re: Vec<f64>,
    pub t: Vec<f64>,
}

impl Default for StripGrid {
    fn default() -> Self {
        StripGrid {
            re: vec![0.5, 0.6, 0.75, 0.9, 1.0],
            t: vec![0.0, 0.5, -0.5, 2.0, -2.0],
        }
    }
}

impl StripGrid {
    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        self.re.iter().flat_map(move |&x| self.t.iter().map(move |&t| C64::new(x, t)))
    }
}

/// `f / max(‖f‖_{p,q}, ‖f*‖_{p,q})`.
pub fn normalize_for_strip(f: &GFunction, p: f64) -> Result<GFunction> {
    let q = conjugate_exponent(p);
    let m = f.mixed_norm(p, q)?.max(f.mixed_norm_star(p, q)?);
    if m == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(f.scale(C64::new(1.0 / m, 0.0)))
}

#[derive(Clone, Debug)]
pub struct StripFamily {
    pub f: GFunction,
    pub p: f64,
    pub q: f64,
    pub epsilon: f64,
    /// `‖f^x‖_p` over `(G^x, λ^x)`.
    pub range_norms: Vec<f64>,
    /// `‖f_y‖_p` over `(G_y, λ_y)`.
    pub source_norms: Vec<f64>,
}

impl StripFamily {
    /// Default `ε = (‖f‖^p_{L^p(ν)})^{−1/(q−p)}`, the largest value allowed by
    /// `ε^{q−p} ‖f‖^p_{L^p(ν)} ≤ 1`.
    pub fn new(f: &GFunction, p: f64, epsilon: Option<f64>) -> Result<Self> {
        if !(p > 1.0 && p < 2.0) {
            return Err(Error::BadExponent(p));
        }
        if f.max_abs() == 0.0 {
            return Err(Error::ZeroFunction);
        }
        let q = conjugate_exponent(p);
        let lp = f.lp_norm(p, ArrowMeasure::Nu)?.powf(p);
        let epsilon = match epsilon {
            None => lp.powf(-1.0 / (q - p)),
            Some(e) => {
                let value = e.powf(q - p) * lp;
                if e.is_nan() || e <= 0.0 || value > 1.0 + 1e-12 {
                    return Err(Error::EpsilonRuleViolated { epsilon: e, value });
                }
                e
            }
        };
        let base = f.base();
        let g = base.groupoid();
        let w = base.w();
        let abs: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
        let range_norms = (0..g.n_units())
            .map(|x| fiber_norm(g.range_fiber(x).iter().map(|&a| (abs[a], w[g.source(a)])), p))
            .collect::<Result<_>>()?;
        let source_norms = (0..g.n_units())
            .map(|y| fiber_norm(g.source_fiber(y).iter().map(|&a| (abs[a], w[g.range(a)])), p))
            .collect::<Result<_>>()?;
        Ok(StripFamily {
            f: f.clone(),
            p,
            q,
            epsilon,
            range_norms,
            source_norms,
        })
    }

    pub fn base(&self) -> &Arc<MeasuredGroupoid> {
        self.f.base()
    }

    /// `M(x, y) = max(‖f^x‖_p, ‖f_y‖_p)`.
    pub fn m(&self, x: usize, y: usize) -> f64 {
        self.range_norms[x].max(self.source_norms[y])
    }

    pub fn m_eps(&self, x: usize, y: usize) -> f64 {
        self.m(x, y).max(self.epsilon)
    }

    fn m_eps_arrow(&self, a: usize) -> f64 {
        let g = self.base().groupoid();
        self.m_eps(g.range(a), g.source(a))
    }

    /// `f_z = sgn f · |f|^{pz} · M_ε^{q − z(p+q)}`, written as
    /// `f · |f|^{pd} · M_ε^{−(p+q)d}` with `d = z − 1/p` so that `f_{1/p} = f` exactly.
    pub fn f_z(&self, z: C64) -> GFunction {
        let (p, q) = (self.p, self.q);
        let d = z - 1.0 / p;
        self.f.map(|a, v| {
            if v.norm() == 0.0 {
                return v;
            }
            let log = p * v.norm().ln() - (p + q) * self.m_eps_arrow(a).ln();
            if d.im == 0.0 {
                v * (d.re * log).exp()
            } else {
                v * (d * log).exp()
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineOneRow {
    pub t: f64,
    /// `‖f_{1+it}‖_{1,∞}`.
    pub mixed: f64,
    /// `‖(f_{1+it})*‖_{1,∞}`.
    pub mixed_star: f64,
    /// `‖L(f_{1+it})‖`.
    pub op_norm: f64,
    /// `‖L(δ^{it/2} f_{1+it})‖`.
    pub twisted_op_norm: f64,
}

impl LineOneRow {
    pub fn within(&self, tol: f64) -> bool {
        let b = 2.0 + tol;
        self.mixed <= b && self.mixed_star <= b && self.op_norm <= self.mixed.max(self.mixed_star) * (1.0 + 1e-12) + tol && self.twisted_op_norm <= b
    }
}

pub fn line_one_estimate(ctx: &RepContext, family: &StripFamily, t_grid: &[f64]) -> Result<Vec<LineOneRow>> {
    t_grid
        .iter()
        .map(|&t| {
            let fz = family.f_z(C64::new(1.0, t));
            Ok(LineOneRow {
                t,
                mixed: fz.mixed_norm(1.0, f64::INFINITY)?,
                mixed_star: fz.mixed_norm_star(1.0, f64::INFINITY)?,
                op_norm: ctx.left_bounded_norm(&fz)?,
                twisted_op_norm: ctx.left_bounded_norm(&fz.delta_twist(C64::new(0.0, t / 2.0)))?,
            })
        })
        .collect()
}

/// Integrals of `|f_z|²` over the three parts of the support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartIntegrals {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PartIntegrals {
    pub fn total(&self) -> f64 {
        self.a + self.b + self.c
    }

    pub fn max_part(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    A,
    B,
    C,
}

/// `A: ‖f^{r}‖_p ≥ max(‖f_{s}‖_p, ε)`, else `B: ‖f_{s}‖_p ≥ max(‖f^{r}‖_p, ε)`, else `C`.
pub fn partition(family: &StripFamily) -> Vec<Option<Part>> {
    let g = family.base().groupoid();
    let eps = family.epsilon;
    (0..g.n_arrows())
        .map(|a| {
            if family.f.values()[a].norm() == 0.0 {
                return None;
            }
            let (fr, fs) = (family.range_norms[g.range(a)], family.source_norms[g.source(a)]);
            Some(if fr >= fs.max(eps) {
                Part::A
            } else if fs >= fr.max(eps) {
                Part::B
            } else {
                Part::C
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineHalfRow {
    pub t: f64,
    pub nu: PartIntegrals,
    pub nu_inv: PartIntegrals,
    /// `‖F₂(δ^{it/2} f_z)‖₂`.
    pub f2_norm: f64,
    /// `(∫ |f_z|² dν₀)^{1/2}`.
    pub nu0_norm: f64,
}

pub fn line_half_estimate(ctx: &RepContext, family: &StripFamily, t_grid: &[f64]) -> Result<Vec<LineHalfRow>> {
    let parts = partition(family);
    let base = family.base().clone();
    t_grid
        .iter()
        .map(|&t| {
            let fz = family.f_z(C64::new(0.5, t));
            let integrate = |m: &[f64]| {
                let mut acc = PartIntegrals { a: 0.0, b: 0.0, c: 0.0 };
                for (a, part) in parts.iter().enumerate() {
                    let v = fz.values()[a].norm_sqr() * m[a];
                    match part {
                        Some(Part::A) => acc.a += v,
                        Some(Part::B) => acc.b += v,
                        Some(Part::C) => acc.c += v,
                        None => {}
                    }
                }
                acc
            };
            let pl = plancherel_check(ctx, &fz.delta_twist(C64::new(0.0, t / 2.0)))?;
            Ok(LineHalfRow {
                t,
                nu: integrate(base.nu()),
                nu_inv: integrate(base.nu_inv()),
                f2_norm: pl.lhs,
                nu0_norm: fz.lp_norm(2.0, ArrowMeasure::Nu0)?,
            })
        })
        .collect()
}

/// `ξ_z = Δ^{(1−z)/2} L(f_z) Δ^{(1−z)/2} ξ` in coordinates.
pub fn xi_z(ctx: &RepContext, family: &StripFamily, xi: &[C64], z: C64) -> Result<Vec<C64>> {
    let alpha = (C64::new(1.0, 0.0) - z) * 0.5;
    Ok(fourier(ctx, &family.f_z(z), alpha)?.matrix.mul_vec(xi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiScan {
    pub boundary_sup: f64,
    pub interior_sup: f64,
    /// `2 max(‖ξ‖, ‖L(ξ)‖)`.
    pub bound: f64,
    /// Relative error of the Cauchy-integral reconstruction of `z ↦ (ξ_z, η)`.
    pub cauchy_residual: f64,
}

const CAUCHY_POINTS: usize = 64;

/// `(1/2πi) ∮ h(w)/(w − z₀) dw` on the circle `|w − c| = r`, trapezoidal rule.
fn cauchy_reconstruct(h: impl Fn(C64) -> Result<C64>, c: C64, r: f64, z0: C64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..CAUCHY_POINTS {
        let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / CAUCHY_POINTS as f64);
        let w = c + e * r;
        acc += h(w)? * e * r / (w - z0);
    }
    Ok(acc / CAUCHY_POINTS as f64)
}

pub fn xi_z_scan<R: Rng + ?Sized>(ctx: &RepContext, family: &StripFamily, xi: &GFunction, grid: &StripGrid, rng: &mut R) -> Result<XiScan> {
    let xv = ctx.to_coords(xi)?;
    let bound = 2.0 * vec_norm(&xv).max(ctx.left_bounded_norm(xi)?);
    let (mut boundary_sup, mut interior_sup): (f64, f64) = (0.0, 0.0);
    for z in grid.points() {
        let n = vec_norm(&xi_z(ctx, family, &xv, z)?);
        if z.re == 0.5 || z.re == 1.0 {
            boundary_sup = boundary_sup.max(n);
        } else {
            interior_sup = interior_sup.max(n);
        }
    }
    let eta = ctx.to_coords(&GFunction::random(ctx.base().clone(), rng))?;
    let h = |z: C64| -> Result<C64> { Ok(vec_inner(&xi_z(ctx, family, &xv, z)?, &eta)) };
    let centre = C64::new(0.75, 0.0);
    let mut cauchy_residual: f64 = 0.0;
    for z0 in [centre, C64::new(0.8, 0.05), C64::new(0.7, -0.1)] {
        let direct = h(z0)?;
        let rebuilt = cauchy_reconstruct(h, centre, 0.2, z0)?;
        cauchy_residual = cauchy_residual.max((direct - rebuilt).norm() / direct.norm().max(1e-300));
    }
    Ok(XiScan {
        boundary_sup,
        interior_sup,
        bound,
        cauchy_residual,
    })
}

/// `S ∈ L^p` with `‖S‖_p = 1`, its polar parts and the test vectors.
#[derive(Clone, Debug)]
pub struct DualityWitness {
    pub p: f64,
    pub s: CMatrix,
    pub u: CMatrix,
    pub abs: CMatrix,
    pub xi: Vec<C64>,
    pub eta: Vec<C64>,
    pub l_xi_norm: f64,
    pub l_eta_norm: f64,
}

impl DualityWitness {
    /// `S = Δ^{1/2p} L(g) Δ^{1/2p} / ‖·‖_p` for the given `g`, `ξ`, `η`.
    pub fn new(ctx: &RepContext, p: f64, g: &GFunction, xi: &GFunction, eta: &GFunction) -> Result<Self> {
        let s_norm = lq_norm(ctx, g, p)?;
        let s = if s_norm == 0.0 {
            CMatrix::zeros(ctx.dim(), ctx.dim())
        } else {
            fourier(ctx, g, C64::new(0.5 / p, 0.0))?.matrix.scale_real(1.0 / s_norm)
        };
        let (u, abs) = polar(&s, ctx.tolerances())?;
        Ok(DualityWitness {
            p,
            s,
            u,
            abs,
            xi: ctx.to_coords(xi)?,
            eta: ctx.to_coords(eta)?,
            l_xi_norm: ctx.left_bounded_norm(xi)?,
            l_eta_norm: ctx.left_bounded_norm(eta)?,
        })
    }

    pub fn random<R: Rng + ?Sized>(ctx: &RepContext, p: f64, rng: &mut R) -> Result<Self> {
        let base = ctx.base().clone();
        let g = GFunction::random(base.clone(), rng);
        let xi = GFunction::random(base.clone(), rng);
        let eta = GFunction::random(base, rng);
        Self::new(ctx, p, &g, &xi, &eta)
    }

    /// `‖S − U|S|‖_F`.
    pub fn polar_residual(&self) -> f64 {
        (&self.s - &self.u.matmul(&self.abs)).frobenius_norm()
    }

    /// `η_z = U |S|^{pz} η`.
    pub fn eta_z(&self, ctx: &RepContext, z: C64) -> Result<Vec<C64>> {
        if self.s.max_abs() == 0.0 {
            return Ok(vec![C64::new(0.0, 0.0); self.eta.len()]);
        }
        let pw = psd_power_complex(&self.abs, z * self.p, ctx.tolerances())?;
        Ok(self.u.matmul(&pw).mul_vec(&self.eta))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityScan {
    pub sup_abs_h: f64,
    /// `2 ‖L(ξ)‖ ‖L(η)‖`.
    pub bound: f64,
    /// `|H(1/p) − (F_p(f)ξ, Sη)|`, relative.
    pub at_inverse_p: f64,
    /// `max(|H(z)| − ‖ξ_z‖‖η_{z̄}‖)` on `Re z = 1/2`.
    pub cauchy_schwarz_excess: f64,
    /// `|H(1/p)|`.
    pub h_at_inverse_p: f64,
}

pub fn duality_witness_scan(ctx: &RepContext, family: &StripFamily, w: &DualityWitness, grid: &StripGrid) -> Result<DualityScan> {
    let h_parts = |z: C64| -> Result<(C64, f64, f64)> {
        let xz = xi_z(ctx, family, &w.xi, z)?;
        let ez = w.eta_z(ctx, z.conj())?;
        Ok((vec_inner(&xz, &ez), vec_norm(&xz), vec_norm(&ez)))
    };
    let (mut sup_abs_h, mut cs): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for z in grid.points() {
        let (h, nx, ne) = h_parts(z)?;
        sup_abs_h = sup_abs_h.max(h.norm());
        if z.re == 0.5 {
            cs = cs.max(h.norm() - nx * ne);
        }
    }
    let inv_p = C64::new(1.0 / family.p, 0.0);
    let (h, _, _) = h_parts(inv_p)?;
    let fp = fourier(ctx, &family.f, C64::new(0.5 / family.q, 0.0))?.matrix;
    let direct = vec_inner(&fp.mul_vec(&w.xi), &w.s.mul_vec(&w.eta));
    sup_abs_h = sup_abs_h.max(h.norm());
    Ok(DualityScan {
        sup_abs_h,
        bound: 2.0 * w.l_xi_norm * w.l_eta_norm,
        at_inverse_p: (h - direct).norm() / direct.norm().max(1.0),
        cauchy_schwarz_excess: cs.max(0.0),
        h_at_inverse_p: h.norm(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorSharpening {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    /// `‖F_p(f)‖_q`.
    pub lq: f64,
    /// `‖F_p(F)‖_q` for `F = (f*⊗f)^{⊗n}`.
    pub lq_power: f64,
    /// `|‖F_p(F)‖_q − ‖F_p(f)‖_q^{2n}| / ‖F_p(f)‖_q^{2n}`.
    pub multiplicativity_residual: f64,
    /// `|‖F‖_{p,q} − (‖f‖_{p,q}‖f*‖_{p,q})^n|`, relative.
    pub mixed_norm_residual: f64,
    /// `b_k = 2^{1/2k} (‖f‖_{p,q}‖f*‖_{p,q})^{1/2}`, `k = 1..=n`.
    pub bounds: Vec<f64>,
    /// `(‖f‖_{p,q}‖f*‖_{p,q})^{1/2}`.
    pub geometric_mean: f64,
    /// `max(‖f‖_{p,q}, ‖f*‖_{p,q})`.
    pub max_bound: f64,
}

/// Builds `F = (f*⊗f)^{⊗n}` on `G^{2n}` and compares `‖F_p(F)‖_q` with `‖F_p(f)‖_q^{2n}`.
pub fn tensor_sharpening(ctx: &RepContext, f: &GFunction, p: f64, n: usize) -> Result<TensorSharpening> {
    if n == 0 {
        return Err(Error::Dimension("tensor power n must be at least 1".into()));
    }
    let q = conjugate_exponent(p);
    let base = ctx.base().clone();
    let pair_base = MeasuredGroupoid::product(&base, &base)?;
    let mut big = f.involution().tensor(f, &pair_base)?;
    for _ in 1..n {
        let b = MeasuredGroupoid::product(big.base(), &pair_base)?;
        let pair = f.involution().tensor(f, &pair_base)?;
        big = big.tensor(&pair, &b)?;
    }
    let big_ctx = RepContext::with_tolerances(big.base().clone(), *ctx.tolerances())?;
    let lq = lq_norm(ctx, f, q)?;
    let lq_power = lq_norm(&big_ctx, &big, q)?;
    let expected = lq.powi(2 * n as i32);
    let (fn_, fs) = (f.mixed_norm(p, q)?, f.mixed_norm_star(p, q)?);
    let prod = fn_ * fs;
    let big_mixed = big.mixed_norm(p, q)?;
    let mixed_expected = prod.powi(n as i32);
    Ok(TensorSharpening {
        n,
        p,
        q,
        lq,
        lq_power,
        multiplicativity_residual: (lq_power - expected).abs() / expected.max(1e-300),
        mixed_norm_residual: (big_mixed - mixed_expected).abs() / mixed_expected.max(1e-300),
        bounds: (1..=n).map(|k| 2f64.powf(0.5 / k as f64) * prod.sqrt()).collect(),
        geometric_mean: prod.sqrt(),
        max_bound: fn_.max(fs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{symmetric_table, Groupoid};
    use crate::measure::HaarSystem;
    use crate::nclp::fourier_p;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn unimodular_fixtures() -> Vec<Arc<MeasuredGroupoid>> {
        vec![
            MeasuredGroupoid::uniform(Groupoid::cyclic(2).unwrap()).unwrap(),
            MeasuredGroupoid::build(Groupoid::cyclic(3).unwrap(), HaarSystem::new(vec![0.7]).unwrap(), vec![1.3]).unwrap(),
            MeasuredGroupoid::uniform(Groupoid::from_group(&symmetric_table(3)).unwrap()).unwrap(),
            MeasuredGroupoid::uniform(Groupoid::pair(3).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn family_on_z2() {
        let z2 = MeasuredGroupoid::uniform(Groupoid::cyclic(2).unwrap()).unwrap();
        let f = GFunction::from_real(z2, &[1.0, 1.0]).unwrap();
        let fam = StripFamily::new(&f, 4.0 / 3.0, None).unwrap();
        assert_relative_eq!(fam.m(0, 0), 2f64.powf(0.75), max_relative = 1e-14);
        assert_relative_eq!(fam.epsilon, 2f64.powf(-0.375), max_relative = 1e-14);
        // |f| = 1: f_z = M_ε^{4 − 16z/3} sgn f
        let z = C64::new(0.7, 0.4);
        let expect = (c(4.0) - z * (16.0 / 3.0)).scale(fam.m_eps(0, 0).ln()).exp();
        assert!((fam.f_z(z).values()[0] - expect).norm() < 1e-13);
        assert!(matches!(StripFamily::new(&f, 4.0 / 3.0, Some(10.0)), Err(Error::EpsilonRuleViolated { .. })));
        assert!(matches!(StripFamily::new(&f, 2.0, None), Err(Error::BadExponent(_))));
        assert!(matches!(StripFamily::new(&f.scale(c(0.0)), 1.5, None), Err(Error::ZeroFunction)));
    }

    #[test]
    fn single_arrow_support() {
        let p3 = MeasuredGroupoid::uniform(Groupoid::pair(3).unwrap()).unwrap();
        let g = p3.groupoid().clone();
        let a = 5; // (2,3)
        let f = GFunction::indicator(p3.clone(), a).scale(C64::new(0.3, -0.4));
        let fam = StripFamily::new(&f, 1.5, None).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let nonzero = fam.m(x, y) > 0.0;
                assert_eq!(nonzero, x == g.range(a) || y == g.source(a));
            }
        }
        let ctx = RepContext::new(p3).unwrap();
        for row in line_one_estimate(&ctx, &fam, &[0.0, 1.0]).unwrap() {
            assert!(row.mixed <= 1.0 + 1e-12 && row.mixed_star <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn exact_at_inverse_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for mg in unimodular_fixtures() {
            for p in [1.25, 4.0 / 3.0, 1.5, 1.75] {
                let f = GFunction::random(mg.clone(), &mut rng);
                let fam = StripFamily::new(&f, p, None).unwrap();
                assert_eq!(fam.f_z(c(1.0 / p)).values(), f.values());
                let a = fam.f_z(C64::new(0.8, 0.0));
                let b = fam.f_z(C64::new(0.8, 3.7));
                for (x, y) in a.values().iter().zip(b.values()) {
                    assert!((x.norm() - y.norm()).abs() <= 1e-12 * x.norm());
                }
            }
        }
    }

    #[test]
    fn boundary_lines_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let grid = StripGrid::default();
        for mg in unimodular_fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            for p in [1.25, 4.0 / 3.0, 1.5, 1.75] {
                let f = normalize_for_strip(&GFunction::random(mg.clone(), &mut rng), p).unwrap();
                let fam = StripFamily::new(&f, p, None).unwrap();
                for row in line_one_estimate(&ctx, &fam, &grid.t).unwrap() {
                    assert!(row.within(1e-9), "{row:?}");
                }
                for row in line_half_estimate(&ctx, &fam, &grid.t).unwrap() {
                    assert!(row.nu.max_part() <= 1.0 + 1e-9 && row.nu_inv.max_part() <= 1.0 + 1e-9, "{row:?}");
                    assert!(row.f2_norm <= 3f64.sqrt() + 1e-9);
                    assert!((row.f2_norm - row.nu0_norm).abs() < 1e-9 * row.nu0_norm.max(1.0));
                }
            }
        }
    }

    #[test]
    fn extremal_z2_parts() {
        let z2 = MeasuredGroupoid::uniform(Groupoid::cyclic(2).unwrap()).unwrap();
        let p = 4.0 / 3.0;
        let f = GFunction::from_real(z2.clone(), &[1.0, 1.0]).unwrap();
        let fam = StripFamily::new(&f, p, None).unwrap();
        let ctx = RepContext::new(z2).unwrap();
        let row = line_half_estimate(&ctx, &fam, &[0.0]).unwrap()[0];
        let q = conjugate_exponent(p);
        // |f|^p M^{q−p} summed over both arrows, with M = ‖f‖_{p,q}
        assert_relative_eq!(row.nu.a, f.mixed_norm(p, q).unwrap().powf(q), max_relative = 1e-12);
        assert_eq!((row.nu.b, row.nu.c), (0.0, 0.0));
        let f = normalize_for_strip(&f, p).unwrap();
        let fam = StripFamily::new(&f, p, None).unwrap();
        for r in line_one_estimate(&ctx, &fam, &StripGrid::default().t).unwrap() {
            assert!(r.within(1e-9));
        }
    }

    #[test]
    fn xi_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = StripGrid::default();
        for mg in unimodular_fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            let p = 1.5;
            let f = normalize_for_strip(&GFunction::random(mg.clone(), &mut rng), p).unwrap();
            let fam = StripFamily::new(&f, p, None).unwrap();
            let xi = GFunction::random(mg.clone(), &mut rng);
            let scan = xi_z_scan(&ctx, &fam, &xi, &grid, &mut rng).unwrap();
            assert!(scan.boundary_sup <= scan.bound * (1.0 + 1e-9));
            assert!(scan.cauchy_residual < 1e-8, "{scan:?}");
            let xv = ctx.to_coords(&xi).unwrap();
            let at = xi_z(&ctx, &fam, &xv, c(1.0 / p)).unwrap();
            let direct = fourier_p(&ctx, &f, p).unwrap().matrix.mul_vec(&xv);
            assert!(at.iter().zip(&direct).all(|(a, b)| (a - b).norm() < 1e-12));
            let zero = xi_z_scan(&ctx, &fam, &GFunction::zeros(mg.clone()), &grid, &mut rng).unwrap();
            assert_eq!((zero.boundary_sup, zero.interior_sup), (0.0, 0.0));
        }
    }

    #[test]
    fn duality_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grid = StripGrid::default();
        for mg in unimodular_fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            let p = 4.0 / 3.0;
            let f = normalize_for_strip(&GFunction::random(mg.clone(), &mut rng), p).unwrap();
            let fam = StripFamily::new(&f, p, None).unwrap();
            let w = DualityWitness::random(&ctx, p, &mut rng).unwrap();
            assert!(w.polar_residual() < 1e-10);
            let scan = duality_witness_scan(&ctx, &fam, &w, &grid).unwrap();
            assert!(scan.sup_abs_h <= scan.bound * (1.0 + 1e-9), "{scan:?}");
            assert!(scan.at_inverse_p < 1e-9);
            assert!(scan.cauchy_schwarz_excess <= 1e-12);

            let zero = DualityWitness::new(&ctx, p, &GFunction::zeros(mg.clone()), &f, &f).unwrap();
            assert_eq!(duality_witness_scan(&ctx, &fam, &zero, &grid).unwrap().sup_abs_h, 0.0);
        }
    }

    #[test]
    fn tensor_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z2 = MeasuredGroupoid::uniform(Groupoid::cyclic(2).unwrap()).unwrap();
        let ctx = RepContext::new(z2.clone()).unwrap();
        let f = GFunction::random(z2, &mut rng);
        for p in [1.25, 1.5] {
            let r = tensor_sharpening(&ctx, &f, p, 1).unwrap();
            assert!(r.multiplicativity_residual < 1e-7 && r.mixed_norm_residual < 1e-8);
            let fs = f.mixed_norm(p, r.q).unwrap() * f.mixed_norm_star(p, r.q).unwrap();
            assert_relative_eq!(r.bounds[0], 2f64.sqrt() * fs.sqrt(), max_relative = 1e-14);
            assert!(r.lq <= r.geometric_mean * (1.0 + 1e-9) && r.geometric_mean <= r.max_bound * (1.0 + 1e-15));
            let r2 = tensor_sharpening(&ctx, &f, p, 2).unwrap();
            assert!(r2.multiplicativity_residual < 1e-7, "{r2:?}");
        }
        let p2 = MeasuredGroupoid::build(Groupoid::pair(2).unwrap(), HaarSystem::new(vec![1.0, 2.0]).unwrap(), vec![1.0, 4.0]).unwrap();
        let ctx = RepContext::new(p2.clone()).unwrap();
        let f = GFunction::random(p2.clone(), &mut rng);
        let r = tensor_sharpening(&ctx, &f, 4.0 / 3.0, 2).unwrap();
        assert!(r.multiplicativity_residual < 1e-7, "{r:?}");
        // symmetric kernel: ‖f‖ = ‖f*‖, so the geometric mean is the max bound
        let uni = MeasuredGroupoid::uniform(Groupoid::pair(2).unwrap()).unwrap();
        let ctx = RepContext::new(uni.clone()).unwrap();
        let s = GFunction::from_real(uni, &[1.0, 2.0, 2.0, -1.0]).unwrap();
        let r = tensor_sharpening(&ctx, &s, 1.5, 1).unwrap();
        assert_relative_eq!(r.geometric_mean, r.max_bound, max_relative = 1e-14);

        let p3 = MeasuredGroupoid::uniform(Groupoid::pair(3).unwrap()).unwrap();
        let ctx = RepContext::new(p3.clone()).unwrap();
        let f = GFunction::random(p3, &mut rng);
        assert!(matches!(tensor_sharpening(&ctx, &f, 1.5, 2), Err(Error::SizeCapExceeded { .. })));
    }
}
