//! Non-commutative `L^q` norms, the β-Fourier transforms and the checks built
//! on them.
//!
//! With `ρ` the density of `φ₀` and `ρ′ = JρJ`, a `(−1/q)`-homogeneous `T`
//! has `‖T‖_q = (Tr |ρ′^{1/q} T|^q)^{1/q}`; for `T = F_p(f)` this is
//! `(Tr |ρ^{1/2q} L(f) ρ^{1/2q}|^q)^{1/q}`.

use rand::Rng;

use crate::convalg::GFunction;
use crate::error::{Error, Result};
use crate::measure::{fiber_norm, ArrowMeasure};
use crate::numkit::{eigh, polar, psd_power, vec_inner, CMatrix, C64};
use crate::repmod::RepContext;

/// `q = p/(p−1)` in the extended reals.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `F_β(f) = Δ^α L(f) Δ^α` with `β = (1 − 2α)⁻¹`.
#[derive(Clone, Debug)]
pub struct FourierData {
    pub alpha: C64,
    /// `None` when `α = 1/2`.
    pub beta: Option<C64>,
    pub matrix: CMatrix,
}

pub fn fourier(ctx: &RepContext, f: &GFunction, alpha: C64) -> Result<FourierData> {
    let l = ctx.left_op(f)?;
    let matrix = if alpha == C64::new(0.0, 0.0) {
        l
    } else {
        let d = ctx.delta_power(alpha);
        d.matmul(&l).matmul(&d)
    };
    let denom = C64::new(1.0, 0.0) - alpha * 2.0;
    let beta = if denom.norm() == 0.0 { None } else { Some(denom.inv()) };
    Ok(FourierData { alpha, beta, matrix })
}

/// `F_p(f)`, i.e. `α = 1/(2q)`.
pub fn fourier_p(ctx: &RepContext, f: &GFunction, p: f64) -> Result<FourierData> {
    let q = conjugate_exponent(p);
    fourier(ctx, f, C64::new(0.5 / q, 0.0))
}

/// `ρ^{1/2q} X ρ^{1/2q}` for `X ∈ M`.
fn weighted(ctx: &RepContext, x: &CMatrix, q: f64) -> Result<CMatrix> {
    let r = ctx.rho_power(0.5 / q)?;
    Ok(r.matmul(x).matmul(&r))
}

/// `(Σ σ_i^q)^{1/q}`, scaled by the largest σ so that large `q` cannot overflow.
fn schatten(ctx: &RepContext, k: &CMatrix, q: f64) -> Result<f64> {
    let sv = ctx.blocks().svd_values(k)?;
    fiber_norm(sv.into_iter().map(|s| (s, 1.0)), q)
}

/// `‖F_p(f)‖_q = (Tr |ρ^{1/2q} L(f) ρ^{1/2q}|^q)^{1/q}`; `q = ∞` gives `‖L(f)‖`.
pub fn lq_norm(ctx: &RepContext, f: &GFunction, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::BadExponent(q));
    }
    let l = ctx.left_op(f)?;
    if q.is_infinite() {
        return schatten(ctx, &l, q);
    }
    schatten(ctx, &weighted(ctx, &l, q)?, q)
}

/// A `(−1/q)`-homogeneous operator on `H` with its certificate.
#[derive(Clone, Debug)]
pub struct LqElement {
    pub matrix: CMatrix,
    pub q: f64,
    pub provenance: String,
    pub homogeneity_residual: f64,
}

impl LqElement {
    pub fn certify(ctx: &RepContext, matrix: CMatrix, q: f64, provenance: impl Into<String>) -> Result<Self> {
        if q.is_nan() || q < 1.0 {
            return Err(Error::BadExponent(q));
        }
        let degree = if q.is_infinite() { 0.0 } else { -1.0 / q };
        let homogeneity_residual = ctx.homogeneity_residual(&matrix, degree)?;
        if homogeneity_residual > ctx.tolerances().eq * matrix.frobenius_norm().max(1.0) {
            return Err(Error::NotInLq(format!("not {degree}-homogeneous (residual {homogeneity_residual:.3e})")));
        }
        Ok(LqElement {
            matrix,
            q,
            provenance: provenance.into(),
            homogeneity_residual,
        })
    }

    /// `F_p(f)` as an element of `L^q`.
    pub fn from_function(ctx: &RepContext, f: &GFunction, p: f64) -> Result<Self> {
        let q = conjugate_exponent(p);
        let fd = fourier_p(ctx, f, p)?;
        Self::certify(ctx, fd.matrix, q, format!("F_{p}(f)"))
    }

    /// `ρ′^{1/q} T`, which lies in `M`.
    pub fn m_part(&self, ctx: &RepContext) -> Result<CMatrix> {
        if self.q.is_infinite() {
            return Ok(self.matrix.clone());
        }
        Ok(ctx.rho_prime_power(1.0 / self.q)?.matmul(&self.matrix))
    }
}

/// `(∫ |T|^q dψ₀)^{1/q}` through `h = |T|^q ρ′ ∈ M`.
pub fn lq_norm_spatial(ctx: &RepContext, t: &LqElement) -> Result<f64> {
    let q = t.q;
    if q.is_infinite() {
        return schatten(ctx, &t.matrix, q);
    }
    if t.matrix.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let tol = ctx.tolerances();
    let abs_q = psd_power(&t.matrix.adjoint().matmul(&t.matrix), q / 2.0, tol)?;
    let h = abs_q.matmul(&ctx.density().rho_prime);
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let residual = ctx.residual_to_m(&h)?;
    if residual > 1e-8 * scale {
        return Err(Error::NotInLq(format!("|T|^q ρ′ is not in M (residual {residual:.3e})")));
    }
    let hs = h.hermitian_part();
    let min = eigh(&hs, 1e-8)?.min();
    if min < -tol.psd * scale || h.hermitian_defect() > 1e-8 * scale {
        return Err(Error::NotInLq(format!("|T|^q ρ′ is not positive (min eigenvalue {min:.3e})")));
    }
    Ok(hs.trace().re.max(0.0).powf(1.0 / q))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlancherelResult {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `‖F₂(f)‖₂` against `‖f‖_{L²(ν₀)}`.
pub fn plancherel_check(ctx: &RepContext, f: &GFunction) -> Result<PlancherelResult> {
    let lhs = lq_norm(ctx, f, 2.0)?;
    let rhs = f.lp_norm(2.0, ArrowMeasure::Nu0)?;
    Ok(PlancherelResult {
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / rhs.max(1e-300),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyResult {
    pub p: f64,
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// `‖F_p(f)‖_q ≤ max(‖f‖_{p,q}, ‖f*‖_{p,q})` for `1 ≤ p ≤ 2`.
pub fn hy_check(ctx: &RepContext, f: &GFunction, p: f64, tol: f64) -> Result<HyResult> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::BadExponent(p));
    }
    let q = conjugate_exponent(p);
    let lhs = lq_norm(ctx, f, q)?;
    let rhs = f.mixed_norm(p, q)?.max(f.mixed_norm_star(p, q)?);
    Ok(HyResult {
        p,
        q,
        lhs,
        rhs,
        margin: rhs - lhs,
        pass: lhs <= rhs * (1.0 + tol),
    })
}

/// Sampled lower bound for `‖T‖_q` from
/// `|(Tξ, Sη)| ≤ ‖T‖_q ‖S‖_{q′} ‖L(ξ)‖ ‖L(η)‖` over `S = F_{p′}(g)`.
///
/// The pairing is `Tr(L(η)† K_S† K_T L(ξ))` with `K = ρ′^{1/q} T`. For finite
/// `q > 1` the sample set also contains the witness built from the polar
/// decomposition of `K_T`, which attains the bound.
pub fn lq_lower_by_duality<R: Rng + ?Sized>(ctx: &RepContext, t: &LqElement, samples: usize, rng: &mut R) -> Result<f64> {
    let q = t.q;
    let qd = conjugate_exponent(q);
    let kt = t.m_part(ctx)?;
    if kt.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let base = ctx.base().clone();
    let ratio = |ks: &CMatrix, s_norm: f64, xi: &GFunction, eta: &GFunction| -> Result<f64> {
        let (lx, le) = (ctx.left_op(xi)?, ctx.left_op(eta)?);
        let pairing = le.adjoint().matmul(&ks.adjoint()).matmul(&kt).matmul(&lx).trace();
        let denom = s_norm * ctx.left_bounded_norm(xi)? * ctx.left_bounded_norm(eta)?;
        Ok(if denom > 0.0 { pairing.norm() / denom } else { 0.0 })
    };
    let k_of = |g: &GFunction| -> Result<CMatrix> {
        let l = ctx.left_op(g)?;
        if qd.is_infinite() {
            Ok(l)
        } else {
            weighted(ctx, &l, qd)
        }
    };
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let g = GFunction::random(base.clone(), rng);
        let xi = GFunction::random(base.clone(), rng);
        let eta = GFunction::random(base.clone(), rng);
        best = best.max(ratio(&k_of(&g)?, lq_norm(ctx, &g, qd)?, &xi, &eta)?);
    }
    if q.is_finite() {
        let (u, abs) = polar(&kt, ctx.tolerances())?;
        let ks = u.matmul(&psd_power(&abs, q - 1.0, ctx.tolerances())?);
        // S = F_{p′}(g) with ρ^{1/2q′} L(g) ρ^{1/2q′} = K_S
        let lg = if qd.is_infinite() {
            ks
        } else {
            let r = ctx.rho_power(-0.5 / qd)?;
            r.matmul(&ks).matmul(&r)
        };
        let g = ctx.m_preimage(&lg)?;
        let unit = GFunction::identity_element(base);
        best = best.max(ratio(&k_of(&g)?, lq_norm(ctx, &g, qd)?, &unit, &unit)?);
    }
    Ok(best)
}

/// `γ ↦ Σ_{κ ∈ G^{r(γ)}} ξ′(γ⁻¹κ) conj η′(κ) w(s(κ))` with `ξ′ = δ^{−1/2}ξ`, `η′ = δ^{−1/2}η`.
/// It is the density of `f ↦ (L(f)ξ|η)` against `ν₀`.
pub fn coefficient_function(xi: &GFunction, eta: &GFunction) -> Result<GFunction> {
    if !xi.same_base(eta) {
        return Err(Error::BaseMismatch);
    }
    let base = xi.base().clone();
    let g = base.groupoid();
    let w = base.w();
    let half = C64::new(-0.5, 0.0);
    let (xp, ep) = (xi.delta_twist(half), eta.delta_twist(half));
    let values = (0..g.n_arrows())
        .map(|a| {
            let ai = g.inverse(a);
            g.range_fiber(g.range(a))
                .iter()
                .map(|&k| xp.values()[g.compose(ai, k).expect("same range")] * ep.values()[k].conj() * w[g.source(k)])
                .sum()
        })
        .collect();
    GFunction::new(base, values)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialDerivativeResiduals {
    /// `max |‖T^{1/2}ζ‖² − φ(L(ζ)L(ζ)†)|` over the sampled `ζ`, relative.
    pub quadratic_form: f64,
    /// Residual of `h = Tρ′` to `M`, relative.
    pub membership: f64,
    /// `max |Tr(h m) − φ(m)|` over the basis of `M`, relative.
    pub trace_formula: f64,
    /// `(−1)`-homogeneity residual of `T`.
    pub homogeneity: f64,
}

/// Checks `T = Δ^{1/2} L(F̃) Δ^{1/2}` as the spatial derivative of `φ = (·ξ|ξ)`.
pub fn spatial_derivative_check<R: Rng + ?Sized>(ctx: &RepContext, xi: &GFunction, samples: usize, rng: &mut R) -> Result<SpatialDerivativeResiduals> {
    let base = ctx.base().clone();
    let g = base.groupoid();
    let f = coefficient_function(xi, xi)?;
    let ft = f.map(|a, _| f.values()[g.inverse(a)]);
    let half = ctx.delta_power_real(0.5);
    let t = half.matmul(&ctx.left_op(&ft)?).matmul(&half);
    let xv = ctx.to_coords(xi)?;
    let phi = |m: &CMatrix| vec_inner(&m.mul_vec(&xv), &xv);
    let scale = xv.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);

    let th = t.hermitian_part();
    let eig = eigh(&th, 1e-8)?;
    if eig.min() < -1e-8 * scale {
        return Err(Error::NotPsd { min_eig: eig.min() });
    }

    let mut quadratic_form: f64 = 0.0;
    for _ in 0..samples {
        let zeta = GFunction::random(base.clone(), rng);
        let zv = ctx.to_coords(&zeta)?;
        let lhs = vec_inner(&th.mul_vec(&zv), &zv).re;
        let lz = ctx.left_op(&zeta)?;
        let rhs = phi(&lz.matmul(&lz.adjoint()));
        let norm = lz.frobenius_norm().powi(2) * scale;
        quadratic_form = quadratic_form.max((rhs - lhs).norm() / norm.max(f64::MIN_POSITIVE));
    }

    let h = t.matmul(&ctx.density().rho_prime);
    let hscale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let membership = if xv.iter().all(|z| z.norm() == 0.0) {
        0.0
    } else {
        ctx.residual_to_m(&h)? / hscale
    };
    let mut trace_formula: f64 = 0.0;
    for a in 0..ctx.dim() {
        let m = ctx.left_op(&GFunction::indicator(base.clone(), a))?;
        let d = (h.matmul(&m).trace() - phi(&m)).norm();
        trace_formula = trace_formula.max(d / (scale * m.frobenius_norm()));
    }
    let homogeneity = ctx.homogeneity_residual(&t, -1.0)? / t.frobenius_norm().max(1.0);
    Ok(SpatialDerivativeResiduals {
        quadratic_form,
        membership,
        trace_formula,
        homogeneity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{symmetric_table, Groupoid};
    use crate::measure::{HaarSystem, MeasuredGroupoid};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn pair2(w: [f64; 2], mu: [f64; 2]) -> Arc<MeasuredGroupoid> {
        MeasuredGroupoid::build(Groupoid::pair(2).unwrap(), HaarSystem::new(w.to_vec()).unwrap(), mu.to_vec()).unwrap()
    }

    fn fixtures() -> Vec<Arc<MeasuredGroupoid>> {
        let z3 = MeasuredGroupoid::build(Groupoid::cyclic(3).unwrap(), HaarSystem::new(vec![0.7]).unwrap(), vec![1.3]).unwrap();
        let s3 = MeasuredGroupoid::uniform(Groupoid::from_group(&symmetric_table(3)).unwrap()).unwrap();
        let p3 = MeasuredGroupoid::build(Groupoid::pair(3).unwrap(), HaarSystem::new(vec![1.0, 0.5, 2.0]).unwrap(), vec![2.0, 1.0, 0.25]).unwrap();
        let u = MeasuredGroupoid::disjoint_union(&z3, &pair2([1.0, 2.0], [1.0, 4.0])).unwrap();
        vec![z3, s3, p3, u, pair2([1.0, 1.0], [1.0, 4.0])]
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(1.0), f64::INFINITY);
        assert_eq!(conjugate_exponent(2.0), 2.0);
        assert_relative_eq!(conjugate_exponent(4.0 / 3.0), 4.0, max_relative = 1e-15);
        assert_eq!(conjugate_exponent(f64::INFINITY), 1.0);
    }

    #[test]
    fn fourier_examples() {
        let mg = pair2([1.0, 1.0], [1.0, 4.0]);
        let ctx = RepContext::new(mg.clone()).unwrap();
        let f = GFunction::indicator(mg.clone(), 1);
        let l = ctx.left_op(&f).unwrap();
        assert_eq!(fourier(&ctx, &f, C64::new(0.0, 0.0)).unwrap().matrix, l);
        let fd = fourier(&ctx, &f, C64::new(0.25, 0.0)).unwrap();
        assert_relative_eq!(fd.beta.unwrap().re, 2.0);
        let d = [1.0f64, 0.25, 4.0, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                let expect = l[(i, j)] * (d[i] * d[j]).powf(0.25);
                assert!((fd.matrix[(i, j)] - expect).norm() < 1e-15);
            }
        }
        assert!(fourier(&ctx, &f, C64::new(0.5, 0.0)).unwrap().beta.is_none());
        let z3 = MeasuredGroupoid::uniform(Groupoid::cyclic(3).unwrap()).unwrap();
        let ctx = RepContext::new(z3.clone()).unwrap();
        let f = GFunction::random(z3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(fourier(&ctx, &f, C64::new(0.3, 0.1)).unwrap().matrix, ctx.left_op(&f).unwrap());
    }

    #[test]
    fn lq_norm_examples() {
        let z2 = MeasuredGroupoid::uniform(Groupoid::cyclic(2).unwrap()).unwrap();
        let ctx = RepContext::new(z2.clone()).unwrap();
        let f = GFunction::from_real(z2.clone(), &[1.0, 1.0]).unwrap();
        assert_relative_eq!(lq_norm(&ctx, &f, 4.0).unwrap(), 2f64.powf(0.75), max_relative = 1e-13);
        assert_eq!(lq_norm(&ctx, &GFunction::zeros(z2), 3.0).unwrap(), 0.0);

        let p2 = MeasuredGroupoid::uniform(Groupoid::pair(2).unwrap()).unwrap();
        let ctx = RepContext::new(p2.clone()).unwrap();
        let f = GFunction::from_real(p2, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        for q in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            assert_relative_eq!(lq_norm(&ctx, &f, q).unwrap(), 2f64.sqrt(), max_relative = 1e-13);
        }
    }

    #[test]
    fn spatial_route_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for mg in fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            for p in [1.0, 4.0 / 3.0, 1.5, 2.0, 3.0] {
                let f = GFunction::random(mg.clone(), &mut rng);
                let q = conjugate_exponent(p);
                let t = LqElement::from_function(&ctx, &f, p).unwrap();
                let a = lq_norm(&ctx, &f, q).unwrap();
                let b = lq_norm_spatial(&ctx, &t).unwrap();
                assert!((a - b).abs() <= 1e-8 * a, "p={p}: {a} vs {b}");
            }
        }
        let z = LqElement::certify(&RepContext::new(fixtures()[0].clone()).unwrap(), CMatrix::zeros(3, 3), 2.0, "0").unwrap();
        assert_eq!(lq_norm_spatial(&RepContext::new(fixtures()[0].clone()).unwrap(), &z).unwrap(), 0.0);
    }

    #[test]
    fn scalar_on_a_group() {
        let s3 = MeasuredGroupoid::build(
            Groupoid::from_group(&symmetric_table(3)).unwrap(),
            HaarSystem::new(vec![2.0]).unwrap(),
            vec![3.0],
        )
        .unwrap();
        let ctx = RepContext::new(s3.clone()).unwrap();
        let c = C64::new(0.0, -1.5);
        let q = 3.0;
        let t = LqElement::certify(&ctx, CMatrix::identity(6).scale(c), q, "c·1").unwrap();
        let tr: f64 = ctx.density().rho_prime.trace().re;
        let spatial = lq_norm_spatial(&ctx, &t).unwrap();
        assert_relative_eq!(spatial, c.norm() * tr.powf(1.0 / q), max_relative = 1e-12);
        let cu = GFunction::identity_element(s3).scale(c);
        assert_relative_eq!(spatial, lq_norm(&ctx, &cu, q).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn endpoints_and_plancherel() {
        let z2 = MeasuredGroupoid::uniform(Groupoid::cyclic(2).unwrap()).unwrap();
        let ctx = RepContext::new(z2.clone()).unwrap();
        let r = plancherel_check(&ctx, &GFunction::from_real(z2.clone(), &[1.0, 1.0]).unwrap()).unwrap();
        assert_relative_eq!(r.lhs, 2f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(r.rhs, 2f64.sqrt(), max_relative = 1e-13);
        let zero = plancherel_check(&ctx, &GFunction::zeros(z2)).unwrap();
        assert_eq!((zero.lhs, zero.rhs, zero.residual), (0.0, 0.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mg in fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            let f = GFunction::random(mg.clone(), &mut rng);
            assert!(plancherel_check(&ctx, &f).unwrap().residual <= 1e-9);
            let op = ctx.left_bounded_norm(&f).unwrap();
            assert_relative_eq!(lq_norm(&ctx, &f, f64::INFINITY).unwrap(), op, max_relative = 1e-12);
            let l = ctx.left_op(&f).unwrap();
            let phi = ctx.weight_phi0(&l).unwrap().norm();
            assert!(lq_norm(&ctx, &f, 1.0).unwrap() >= phi * (1.0 - 1e-12));
            for p in [1.0, 4.0 / 3.0, 2.0] {
                let fd = fourier_p(&ctx, &f, p).unwrap();
                let q = conjugate_exponent(p);
                let deg = if q.is_infinite() { 0.0 } else { -1.0 / q };
                assert!(ctx.homogeneity_residual(&fd.matrix, deg).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn hausdorff_young_examples() {
        let z2 = MeasuredGroupoid::uniform(Groupoid::cyclic(2).unwrap()).unwrap();
        let ctx = RepContext::new(z2.clone()).unwrap();
        let r = hy_check(&ctx, &GFunction::from_real(z2, &[1.0, 1.0]).unwrap(), 4.0 / 3.0, 1e-9).unwrap();
        assert_relative_eq!(r.lhs, 2f64.powf(0.75), max_relative = 1e-13);
        assert_relative_eq!(r.rhs, 2f64.powf(0.75), max_relative = 1e-13);
        assert!(r.pass && r.margin.abs() < 1e-12);

        let p2 = MeasuredGroupoid::uniform(Groupoid::pair(2).unwrap()).unwrap();
        let ctx = RepContext::new(p2.clone()).unwrap();
        let f = GFunction::from_real(p2.clone(), &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let r = hy_check(&ctx, &f, 4.0 / 3.0, 1e-9).unwrap();
        assert_relative_eq!(r.lhs, 2f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(r.rhs, 2f64.powf(0.75), max_relative = 1e-13);
        assert!(r.pass);

        let r1 = hy_check(&ctx, &f, 1.0, 1e-9).unwrap();
        assert_relative_eq!(r1.lhs, ctx.left_bounded_norm(&f).unwrap(), max_relative = 1e-13);
        let expect = f
            .mixed_norm(1.0, f64::INFINITY)
            .unwrap()
            .max(f.involution().mixed_norm(1.0, f64::INFINITY).unwrap());
        assert_relative_eq!(r1.rhs, expect, max_relative = 1e-13);
        assert!(matches!(hy_check(&ctx, &f, 2.5, 1e-9), Err(Error::BadExponent(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for mg in fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            for p in [1.0, 1.25, 4.0 / 3.0, 1.5, 1.75, 2.0] {
                let f = GFunction::random(mg.clone(), &mut rng);
                assert!(hy_check(&ctx, &f, p, 1e-9).unwrap().pass);
            }
        }
    }

    #[test]
    fn duality_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for mg in fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            for p in [4.0 / 3.0, 2.0] {
                let f = GFunction::random(mg.clone(), &mut rng);
                let t = LqElement::from_function(&ctx, &f, p).unwrap();
                let norm = lq_norm_spatial(&ctx, &t).unwrap();
                let lower = lq_lower_by_duality(&ctx, &t, 8, &mut rng).unwrap();
                assert!(lower <= norm * (1.0 + 1e-7), "{lower} > {norm}");
                assert!(lower >= 0.9 * norm, "{lower} vs {norm}");
            }
        }
        let ctx = RepContext::new(fixtures()[1].clone()).unwrap();
        let z = LqElement::certify(&ctx, CMatrix::zeros(6, 6), 2.0, "0").unwrap();
        assert_eq!(lq_lower_by_duality(&ctx, &z, 3, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn coefficient_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for mg in fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            let (xi, eta, f) = (
                GFunction::random(mg.clone(), &mut rng),
                GFunction::random(mg.clone(), &mut rng),
                GFunction::random(mg.clone(), &mut rng),
            );
            let coeff = coefficient_function(&xi, &eta).unwrap();
            let lhs: C64 = (0..ctx.dim()).map(|a| f.values()[a] * coeff.values()[a] * mg.nu0()[a]).sum();
            let rhs = f.convolve(&xi).unwrap().inner(&eta).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
            let zero = GFunction::zeros(mg.clone());
            assert_eq!(coefficient_function(&zero, &zero).unwrap().max_abs(), 0.0);
        }
        // group case: γ ↦ Σ_κ ξ(γ⁻¹κ) conj η(κ)
        let s3 = MeasuredGroupoid::uniform(Groupoid::from_group(&symmetric_table(3)).unwrap()).unwrap();
        let (xi, eta) = (GFunction::random(s3.clone(), &mut rng), GFunction::random(s3.clone(), &mut rng));
        let c = coefficient_function(&xi, &eta).unwrap();
        let g = s3.groupoid();
        for a in 0..6 {
            let expect: C64 = (0..6).map(|k| xi.values()[g.compose(g.inverse(a), k).unwrap()] * eta.values()[k].conj()).sum();
            assert!((c.values()[a] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn spatial_derivatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for mg in fixtures() {
            let ctx = RepContext::new(mg.clone()).unwrap();
            let xi = GFunction::random(mg.clone(), &mut rng);
            let r = spatial_derivative_check(&ctx, &xi, 6, &mut rng).unwrap();
            assert!(
                r.quadratic_form < 1e-8 && r.membership < 1e-8 && r.trace_formula < 1e-8 && r.homogeneity < 1e-8,
                "{r:?}"
            );
            let r0 = spatial_derivative_check(&ctx, &GFunction::zeros(mg.clone()), 2, &mut rng).unwrap();
            assert_eq!((r0.quadratic_form, r0.membership, r0.trace_formula, r0.homogeneity), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn fourier_multiplicative_on_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = pair2([1.0, 2.0], [1.0, 4.0]);
        let b = MeasuredGroupoid::build(Groupoid::cyclic(2).unwrap(), HaarSystem::new(vec![3.0]).unwrap(), vec![0.5]).unwrap();
        let ab = MeasuredGroupoid::product(&a, &b).unwrap();
        let (ca, cb, cab) = (
            RepContext::new(a.clone()).unwrap(),
            RepContext::new(b.clone()).unwrap(),
            RepContext::new(ab.clone()).unwrap(),
        );
        let f1 = GFunction::random(a, &mut rng);
        let f2 = GFunction::random(b, &mut rng);
        let t = f1.tensor(&f2, &ab).unwrap();
        for p in [1.0, 4.0 / 3.0, 1.5, 2.0] {
            let q = conjugate_exponent(p);
            let lhs = lq_norm(&cab, &t, q).unwrap();
            let rhs = lq_norm(&ca, &f1, q).unwrap() * lq_norm(&cb, &f2, q).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8 * rhs);
            let kron = fourier_p(&ca, &f1, p).unwrap().matrix.kron(&fourier_p(&cb, &f2, p).unwrap().matrix);
            assert!((&kron - &fourier_p(&cab, &t, p).unwrap().matrix).frobenius_norm() < 1e-12);
        }
    }
}
