//! The regular representation on `H = L²(G, ν⁻¹)` and its modular data.
//!
//! Everything is written in the orthonormal basis `e_γ = 1_γ / √ν⁻¹({γ})`,
//! so adjoints are conjugate transposes. A function `f` has coordinates
//! `f(γ)·√ν⁻¹({γ})`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::convalg::GFunction;
use crate::error::{Error, Result};
use crate::measure::MeasuredGroupoid;
use crate::numkit::{eigh, null_space, psd_power_complex_eig, psd_power_eig, solve_linear, Blocks, CMatrix, HermEig, Tolerances, C64, ONE, ZERO};

/// An antilinear map `v ↦ D·P·conj(v)`, with `(P v)_i = v_{perm(i)}` and `D` a positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiLinear {
    perm: Vec<usize>,
    scale: Vec<f64>,
}

impl AntiLinear {
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.perm.iter().zip(&self.scale).map(|(&p, &s)| v[p].conj() * s).collect()
    }

    /// `K A K` for a linear `A`. Requires `perm` to be an involution.
    pub fn conjugate(&self, a: &CMatrix) -> CMatrix {
        let (p, s) = (&self.perm, &self.scale);
        CMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(p[i], p[j])].conj() * (s[i] * s[p[j]]))
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }
}

/// `Δ`, `J` and `S = JΔ^{1/2}`.
#[derive(Clone, Debug)]
pub struct ModularOps {
    pub delta: CMatrix,
    pub j: AntiLinear,
    pub s: AntiLinear,
}

/// The density `ρ` of the canonical weight with respect to the trace of `H`,
/// and its mirror `ρ′ = JρJ`.
#[derive(Clone, Debug)]
pub struct Density {
    /// `ρ = L(d)`.
    pub coeffs: GFunction,
    pub rho: CMatrix,
    pub rho_prime: CMatrix,
    pub rho_eig: HermEig,
    pub rho_prime_eig: HermEig,
}

/// Bases of `M` and `M′`.
#[derive(Clone, Debug)]
pub struct VnData {
    pub m_basis: Vec<CMatrix>,
    pub commutant_basis: Vec<CMatrix>,
    /// True when the commutant came from the full commutation system,
    /// false when it is the right-regular span checked against `M`.
    pub commutant_solved: bool,
}

impl VnData {
    pub fn dim_m(&self) -> usize {
        self.m_basis.len()
    }

    pub fn dim_m_prime(&self) -> usize {
        self.commutant_basis.len()
    }
}

/// Above this arrow count the commutant is not obtained from the dense
/// `n² × n²` commutation system.
pub const COMMUTANT_SOLVE_MAX_ARROWS: usize = 16;

/// Translations between source fibers.
#[derive(Clone, Debug)]
pub struct FiberDecomposition {
    /// `G_x` for every unit position `x`.
    pub fibers: Vec<Vec<usize>>,
    base: Arc<MeasuredGroupoid>,
}

impl FiberDecomposition {
    pub fn block_dims(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }

    /// `R(γ): H_{s(γ)} → H_{r(γ)}`, `R(γ)ξ(γ′) = ξ(γ′γ)`, as a permutation matrix
    /// in the bases `1_κ/√w(r(κ))`.
    pub fn translation(&self, gamma: usize) -> CMatrix {
        let g = self.base.groupoid();
        let to = &self.fibers[g.range(gamma)];
        let from = &self.fibers[g.source(gamma)];
        let pos: HashMap<usize, usize> = from.iter().enumerate().map(|(j, &k)| (k, j)).collect();
        let mut m = CMatrix::zeros(to.len(), from.len());
        for (i, &k) in to.iter().enumerate() {
            let kg = g.compose(k, gamma).expect("k ∈ G_{r(γ)}");
            m[(i, pos[&kg])] = ONE;
        }
        m
    }
}

pub struct RepContext {
    base: Arc<MeasuredGroupoid>,
    sqrt_nu_inv: Vec<f64>,
    blocks: Blocks,
    tol: Tolerances,
    density: Density,
    vn: OnceLock<std::result::Result<VnData, String>>,
}

impl std::fmt::Debug for RepContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RepContext").field("dim", &self.dim()).finish()
    }
}

impl RepContext {
    pub fn new(base: Arc<MeasuredGroupoid>) -> Result<Self> {
        Self::with_tolerances(base, Tolerances::default())
    }

    pub fn with_tolerances(base: Arc<MeasuredGroupoid>, tol: Tolerances) -> Result<Self> {
        let sqrt_nu_inv = base.nu_inv().iter().map(|x| x.sqrt()).collect();
        let blocks = Blocks(base.groupoid().source_fibers().to_vec());
        let density = solve_density(&base, &blocks, &tol)?;
        Ok(RepContext {
            base,
            sqrt_nu_inv,
            blocks,
            tol,
            density,
            vn: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &Arc<MeasuredGroupoid> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.n_arrows()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The source partition; every element of `M` is block diagonal over it.
    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    fn check_base(&self, f: &GFunction) -> Result<()> {
        if Arc::ptr_eq(f.base(), &self.base) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    pub fn to_coords(&self, f: &GFunction) -> Result<Vec<C64>> {
        self.check_base(f)?;
        Ok(f.values().iter().zip(&self.sqrt_nu_inv).map(|(z, s)| z * s).collect())
    }

    pub fn from_coords(&self, c: &[C64]) -> Result<GFunction> {
        GFunction::new(self.base.clone(), c.iter().zip(&self.sqrt_nu_inv).map(|(z, s)| z / s).collect())
    }

    /// Coordinates of the convolution unit `u`.
    pub fn unit_vector(&self) -> Vec<C64> {
        self.to_coords(&GFunction::identity_element(self.base.clone())).expect("same base")
    }

    /// Matrix of `ξ ↦ f*ξ`: `[s(γ)=s(κ)] f(γκ⁻¹) √(w(r(γ)) w(r(κ)))`.
    pub fn left_op(&self, f: &GFunction) -> Result<CMatrix> {
        self.check_base(f)?;
        let g = self.base.groupoid();
        let w = self.base.w();
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for a in 0..n {
            for &k in g.source_fiber(g.source(a)) {
                let ak = g.compose(a, g.inverse(k)).expect("same source");
                m[(a, k)] = f.values()[ak] * (w[g.range(a)] * w[g.range(k)]).sqrt();
            }
        }
        Ok(m)
    }

    /// Matrix of `ξ ↦ ξ*g`: `[r(γ)=r(κ)] g(κ⁻¹γ) w(s(κ)) √(μ(s(γ))/μ(s(κ)))`.
    pub fn right_op(&self, f: &GFunction) -> Result<CMatrix> {
        self.check_base(f)?;
        let g = self.base.groupoid();
        let (w, mu) = (self.base.w(), self.base.mu());
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for a in 0..n {
            for &k in g.range_fiber(g.range(a)) {
                let ka = g.compose(g.inverse(k), a).expect("same range");
                m[(a, k)] = f.values()[ka] * w[g.source(k)] * (mu[g.source(a)] / mu[g.source(k)]).sqrt();
            }
        }
        Ok(m)
    }

    /// `Δ^z`, diagonal with entries `δ(γ)^z`.
    pub fn delta_power(&self, z: C64) -> CMatrix {
        CMatrix::diag(&self.base.delta().iter().map(|d| (z * d.ln()).exp()).collect::<Vec<_>>())
    }

    pub fn delta_power_real(&self, t: f64) -> CMatrix {
        CMatrix::diag_real(&self.base.delta().iter().map(|d| d.powf(t)).collect::<Vec<_>>())
    }

    /// `Jξ = δ^{1/2} ξ*`; in this basis a conjugation followed by `γ ↔ γ⁻¹`.
    pub fn j(&self) -> AntiLinear {
        AntiLinear {
            perm: self.base.groupoid().inverse_table().to_vec(),
            scale: vec![1.0; self.dim()],
        }
    }

    pub fn modular_ops(&self) -> ModularOps {
        let g = self.base.groupoid();
        let d = self.base.delta();
        let s_scale = (0..self.dim()).map(|a| d[g.inverse(a)].sqrt()).collect();
        ModularOps {
            delta: CMatrix::diag_real(d),
            j: self.j(),
            s: AntiLinear {
                perm: g.inverse_table().to_vec(),
                scale: s_scale,
            },
        }
    }

    /// `‖Δ^z L(f) Δ^{−z} − L(δ^z f)‖_F`.
    pub fn commutation_check(&self, f: &GFunction, z: C64) -> Result<f64> {
        let lhs = self.delta_power(z).matmul(&self.left_op(f)?).matmul(&self.delta_power(-z));
        let rhs = self.left_op(&f.delta_twist(z))?;
        Ok((&lhs - &rhs).frobenius_norm())
    }

    /// `‖X − L(g)‖_F` with `g` read off from `X u`. Zero iff `X ∈ M`.
    pub fn residual_to_m(&self, x: &CMatrix) -> Result<f64> {
        let g = self.from_coords(&x.mul_vec(&self.unit_vector()))?;
        Ok((x - &self.left_op(&g)?).frobenius_norm())
    }

    /// `‖X − R(g)‖_F` with `g` read off from `X u`. Zero iff `X ∈ M′`.
    pub fn residual_to_m_prime(&self, x: &CMatrix) -> Result<f64> {
        let g = self.from_coords(&x.mul_vec(&self.unit_vector()))?;
        Ok((x - &self.right_op(&g)?).frobenius_norm())
    }

    /// The element of `M` whose action on `u` is `x u`.
    pub fn m_preimage(&self, x: &CMatrix) -> Result<GFunction> {
        self.from_coords(&x.mul_vec(&self.unit_vector()))
    }

    pub fn vn_data(&self) -> Result<&VnData> {
        self.vn
            .get_or_init(|| compute_vn(self).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::CommutantSolveFailed(e.clone()))
    }

    fn membership_tol(&self, x: &CMatrix) -> f64 {
        self.tol.eq * x.frobenius_norm().max(1.0)
    }

    /// `φ₀(m) = Tr(ρ m)` for `m ∈ M`.
    pub fn weight_phi0(&self, m: &CMatrix) -> Result<C64> {
        let residual = self.residual_to_m(m)?;
        if residual > self.membership_tol(m) {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(self.density.rho.matmul(m).trace())
    }

    /// `ψ₀(m′) = Tr(ρ′ m′)` for `m′ ∈ M′`.
    pub fn weight_psi0(&self, m: &CMatrix) -> Result<C64> {
        let residual = self.residual_to_m_prime(m)?;
        if residual > self.membership_tol(m) {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(self.density.rho_prime.matmul(m).trace())
    }

    pub fn fiber_decomposition(&self) -> FiberDecomposition {
        FiberDecomposition {
            fibers: self.blocks.0.clone(),
            base: self.base.clone(),
        }
    }

    /// `max_γ ‖R(γ) T_{s(γ)} − δ(γ)^{−α} T_{r(γ)} R(γ)‖_F`.
    pub fn homogeneity_residual(&self, t: &CMatrix, alpha: f64) -> Result<f64> {
        let off_block = self.blocks.off_block_mass(t);
        if off_block > self.tol.eq * t.frobenius_norm().max(1.0) {
            return Err(Error::NotDecomposable { off_block });
        }
        let fd = self.fiber_decomposition();
        let parts = self.blocks.extract(t);
        let g = self.base.groupoid();
        let d = self.base.delta();
        let mut worst: f64 = 0.0;
        for a in 0..self.dim() {
            let r = fd.translation(a);
            let lhs = r.matmul(&parts[g.source(a)]);
            let rhs = parts[g.range(a)].matmul(&r).scale_real(d[a].powf(-alpha));
            worst = worst.max((&lhs - &rhs).frobenius_norm());
        }
        Ok(worst)
    }

    /// Operator norm of `L(ξ)`, blockwise over the source partition.
    pub fn left_bounded_norm(&self, xi: &GFunction) -> Result<f64> {
        let l = self.left_op(xi)?;
        Ok(self.blocks.svd_values(&l)?.first().copied().unwrap_or(0.0))
    }

    /// Largest relative residual of `J L(1_γ) J` to `M′`.
    pub fn tomita_residual(&self) -> Result<f64> {
        let j = self.j();
        let mut worst: f64 = 0.0;
        for a in 0..self.dim() {
            let x = j.conjugate(&self.left_op(&GFunction::indicator(self.base.clone(), a))?);
            worst = worst.max(self.residual_to_m_prime(&x)? / x.frobenius_norm().max(1.0));
        }
        Ok(worst)
    }

    /// For each basis element `T` of `M`: the residual of `Δ^{it} T Δ^{−it}`
    /// to `M` and its distance to `ρ^{it} T ρ^{−it}`, relative to `‖T‖_F`.
    pub fn modular_flow_residual(&self, t: f64) -> Result<(f64, f64)> {
        let it = C64::new(0.0, t);
        let (dp, dm) = (self.delta_power(it), self.delta_power(-it));
        let rp = psd_power_complex_eig(&self.density.rho_eig, it, &self.tol)?;
        let rm = psd_power_complex_eig(&self.density.rho_eig, -it, &self.tol)?;
        let (mut in_m, mut vs_rho): (f64, f64) = (0.0, 0.0);
        for a in 0..self.dim() {
            let x = self.left_op(&GFunction::indicator(self.base.clone(), a))?;
            let scale = x.frobenius_norm().max(1.0);
            let flowed = dp.matmul(&x).matmul(&dm);
            in_m = in_m.max(self.residual_to_m(&flowed)? / scale);
            let sigma = rp.matmul(&x).matmul(&rm);
            vs_rho = vs_rho.max((&flowed - &sigma).frobenius_norm() / scale);
        }
        Ok((in_m, vs_rho))
    }

    /// `‖Δ − ρ ρ′⁻¹‖_F / ‖Δ‖_F`.
    pub fn density_factorization_residual(&self) -> Result<f64> {
        let inv = psd_power_eig(&self.density.rho_prime_eig, -1.0, &self.tol)?;
        let delta = CMatrix::diag_real(self.base.delta());
        Ok((&delta - &self.density.rho.matmul(&inv)).frobenius_norm() / delta.frobenius_norm())
    }

    /// `ρ^t`.
    pub fn rho_power(&self, t: f64) -> Result<CMatrix> {
        psd_power_eig(&self.density.rho_eig, t, &self.tol)
    }

    /// `ρ′^t`.
    pub fn rho_prime_power(&self, t: f64) -> Result<CMatrix> {
        psd_power_eig(&self.density.rho_prime_eig, t, &self.tol)
    }
}

/// Solve `Tr(ρ L(1_γ)) = φ₀(L(1_γ))` for `ρ = Σ c_η L(1_η)`.
///
/// The Gram matrix `Tr(L(1_η) L(1_γ))` is assembled from the sparse entries
/// of the `L(1_η)` and solved on each connected component.
fn solve_density(base: &Arc<MeasuredGroupoid>, blocks: &Blocks, tol: &Tolerances) -> Result<Density> {
    let g = base.groupoid();
    let w = base.w();
    let n = g.n_arrows();
    // L(1_η)_{a,k} ≠ 0 exactly when a k⁻¹ = η
    let mut entries: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for a in 0..n {
        for &k in g.source_fiber(g.source(a)) {
            let eta = g.compose(a, g.inverse(k)).expect("same source");
            entries[eta].push((a, k, (w[g.range(a)] * w[g.range(k)]).sqrt()));
        }
    }
    let mut gram: HashMap<(usize, usize), f64> = HashMap::new();
    for (eta, list) in entries.iter().enumerate() {
        for &(a, k, v) in list {
            // the matching entry of L(1_γ) sits at (k, a), γ = k a⁻¹
            let gamma = g.compose(k, g.inverse(a)).expect("same source");
            let v2 = (w[g.range(k)] * w[g.range(a)]).sqrt();
            *gram.entry((gamma, eta)).or_default() += v * v2;
        }
    }
    let mut rhs = vec![ZERO; n];
    for (x, &u) in g.units().iter().enumerate() {
        rhs[u] = C64::new(base.mu()[x], 0.0);
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for &(a, b) in gram.keys() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(i);
    }
    let mut coeffs = vec![ZERO; n];
    for idx in comps.values() {
        let sub = CMatrix::from_fn(idx.len(), idx.len(), |i, j| C64::new(gram.get(&(idx[i], idx[j])).copied().unwrap_or(0.0), 0.0));
        let b: Vec<C64> = idx.iter().map(|&i| rhs[i]).collect();
        let x = solve_linear(&sub, &b, 1e-10)?;
        for (&i, v) in idx.iter().zip(x) {
            coeffs[i] = v;
        }
    }
    let coeffs = GFunction::new(base.clone(), coeffs)?;

    let mut rho = CMatrix::zeros(n, n);
    for (eta, list) in entries.iter().enumerate() {
        let c = coeffs.values()[eta];
        if c == ZERO {
            continue;
        }
        for &(a, k, v) in list {
            rho[(a, k)] += c * v;
        }
    }
    let rho = rho.hermitian_part();
    let rho_eig = block_eigh(&rho, blocks)?;
    let min_eig = rho_eig.min();
    if min_eig <= tol.inv * rho_eig.spectral_norm() {
        return Err(Error::DensityNotPositive { min_eig });
    }
    let j = AntiLinear {
        perm: g.inverse_table().to_vec(),
        scale: vec![1.0; n],
    };
    let rho_prime = j.conjugate(&rho);
    let rho_prime_eig = HermEig {
        values: rho_eig.values.clone(),
        vectors: CMatrix::from_fn(n, n, |i, k| rho_eig.vectors[(j.perm[i], k)].conj()),
    };
    Ok(Density {
        coeffs,
        rho,
        rho_prime,
        rho_eig,
        rho_prime_eig,
    })
}

/// Eigen-decomposition of a matrix that is block diagonal over `blocks`.
fn block_eigh(a: &CMatrix, blocks: &Blocks) -> Result<HermEig> {
    let n = a.rows();
    let mut pairs: Vec<(f64, Vec<(usize, C64)>)> = Vec::with_capacity(n);
    for idx in &blocks.0 {
        let e = eigh(&a.submatrix(idx, idx), 1e-8)?;
        for (k, &l) in e.values.iter().enumerate() {
            pairs.push((l, idx.iter().enumerate().map(|(i, &row)| (row, e.vectors[(i, k)])).collect()));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut vectors = CMatrix::zeros(n, n);
    for (k, (_, col)) in pairs.iter().enumerate() {
        for &(row, v) in col {
            vectors[(row, k)] = v;
        }
    }
    Ok(HermEig {
        values: pairs.into_iter().map(|p| p.0).collect(),
        vectors,
    })
}

fn compute_vn(ctx: &RepContext) -> Result<VnData> {
    let base = ctx.base.clone();
    let n = ctx.dim();
    let m_basis = (0..n)
        .map(|a| ctx.left_op(&GFunction::indicator(base.clone(), a)))
        .collect::<Result<Vec<_>>>()?;
    let right = (0..n)
        .map(|a| ctx.right_op(&GFunction::indicator(base.clone(), a)))
        .collect::<Result<Vec<_>>>()?;

    let scale = m_basis.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max) * right.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max);
    for m in &m_basis {
        for r in &right {
            let c = m.commutator(r).frobenius_norm();
            if c > 1e-10 * scale.max(1.0) {
                return Err(Error::CommutantSolveFailed(format!("right operators fail to commute with M ({c:.3e})")));
            }
        }
    }

    if n > COMMUTANT_SOLVE_MAX_ARROWS {
        return Ok(VnData {
            m_basis,
            commutant_basis: right,
            commutant_solved: false,
        });
    }

    // X ↦ [X, A] for every basis element A, stacked
    let nn = n * n;
    let mut system = CMatrix::zeros(n * nn, nn);
    for (b, a) in m_basis.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let row = b * nn + i * n + j;
                for k in 0..n {
                    // (XA)_{ij} = Σ_k X_{ik} A_{kj}
                    system[(row, i * n + k)] += a[(k, j)];
                    // (AX)_{ij} = Σ_k A_{ik} X_{kj}
                    system[(row, k * n + j)] -= a[(i, k)];
                }
            }
        }
    }
    let kernel = null_space(&system, 1e-10)?;
    let commutant_basis: Vec<CMatrix> = kernel.into_iter().map(|v| CMatrix::from_vec(n, n, v)).collect::<Result<_>>()?;
    if commutant_basis.len() != n {
        return Err(Error::CommutantSolveFailed(format!(
            "commutant has dimension {} but M has {n}",
            commutant_basis.len()
        )));
    }
    for x in &commutant_basis {
        let r = ctx.residual_to_m_prime(x)?;
        if r > 1e-8 {
            return Err(Error::CommutantSolveFailed(format!(
                "solved commutant element is not a right operator ({r:.3e})"
            )));
        }
    }
    Ok(VnData {
        m_basis,
        commutant_basis,
        commutant_solved: true,
    })
}
