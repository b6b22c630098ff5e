use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::oracles::{DftOracle, SchattenOracle};
use super::report::{Row, RowKind, VerificationReport};
use super::spec::{Check, SuiteSpec, SuiteTolerances};
use crate::convalg::GFunction;
use crate::error::{Error, Result};
use crate::groupoid::with_size_cap;
use crate::interp::{
    duality_witness_scan, line_half_estimate, line_one_estimate, normalize_for_strip, tensor_sharpening, xi_z_scan, DualityWitness, StripFamily, StripGrid,
};
use crate::measure::MeasuredGroupoid;
use crate::nclp::{conjugate_exponent, fourier_p, lq_norm, lq_norm_spatial, plancherel_check, spatial_derivative_check, LqElement};
use crate::numkit::C64;
use crate::repmod::RepContext;

/// Random trials that also run the `G × G` tensor-power case.
const TENSOR_POWER_TRIALS: usize = 2;

pub struct Fixture {
    pub id: String,
    pub ctx: RepContext,
    factors: Option<(RepContext, RepContext)>,
}

impl Fixture {
    pub fn new(id: impl Into<String>, base: Arc<MeasuredGroupoid>) -> Result<Self> {
        let factors = match base.factors() {
            Some((a, b)) => Some((RepContext::new(a.clone())?, RepContext::new(b.clone())?)),
            None => None,
        };
        Ok(Fixture {
            id: id.into(),
            ctx: RepContext::new(base)?,
            factors,
        })
    }

    pub fn base(&self) -> &Arc<MeasuredGroupoid> {
        self.ctx.base()
    }
}

/// Test function of a case: a seeded Gaussian draw or one of the curated
/// extremal inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Input {
    Random(usize),
    /// The constant function 1.
    Ones,
    /// The indicator of the range fiber over the first unit.
    RangeFiber,
}

impl Input {
    fn key(self) -> String {
        match self {
            Input::Random(t) => format!("t{t:04}"),
            Input::Ones => "ones".into(),
            Input::RangeFiber => "fiber".into(),
        }
    }

    pub fn function(self, base: &Arc<MeasuredGroupoid>, rng: &mut ChaCha8Rng) -> GFunction {
        match self {
            Input::Random(_) => GFunction::random(base.clone(), rng),
            Input::Ones => GFunction::from_real(base.clone(), &vec![1.0; base.n_arrows()]).expect("length matches"),
            Input::RangeFiber => {
                let fiber = base.groupoid().range_fiber(0).to_vec();
                GFunction::zeros(base.clone()).map(|a, _| if fiber.contains(&a) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Task {
    Plancherel(Input),
    Hy(usize, Input),
    Proofpath(usize, Input),
    Tensor(usize, Input),
    Modular,
    Oracles(usize, Input),
}

impl Task {
    fn key(self) -> String {
        match self {
            Task::Plancherel(i) => format!("plancherel/{}", i.key()),
            Task::Hy(p, i) => format!("hy/p{p}/{}", i.key()),
            Task::Proofpath(p, i) => format!("proofpath/p{p}/{}", i.key()),
            Task::Tensor(p, i) => format!("tensor/p{p}/{}", i.key()),
            Task::Modular => "modular".into(),
            Task::Oracles(p, i) => format!("oracles/p{p}/{}", i.key()),
        }
    }

    fn check(self) -> Check {
        match self {
            Task::Plancherel(_) => Check::Plancherel,
            Task::Hy(..) => Check::Hy,
            Task::Proofpath(..) => Check::Proofpath,
            Task::Tensor(..) => Check::Tensor,
            Task::Modular => Check::Modular,
            Task::Oracles(..) => Check::Oracles,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of a case, a function of the master seed and the case key only.
pub fn case_seed(master: u64, case_key: &str) -> u64 {
    let h = case_key
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    splitmix64(master ^ splitmix64(h))
}

fn inputs(trials: usize) -> Vec<Input> {
    (0..trials).map(Input::Random).chain([Input::Ones, Input::RangeFiber]).collect()
}

fn tasks(spec: &SuiteSpec) -> Vec<Task> {
    let mut out = Vec::new();
    let ins = inputs(spec.trials);
    let ps = 0..spec.p_grid.len();
    for &check in &spec.checks {
        match check {
            Check::Plancherel => out.extend(ins.iter().map(|&i| Task::Plancherel(i))),
            Check::Hy => out.extend(ps.clone().flat_map(|p| ins.iter().map(move |&i| Task::Hy(p, i)))),
            Check::Proofpath => out.extend(
                ps.clone()
                    .filter(|&p| spec.p_grid[p] > 1.0 && spec.p_grid[p] < 2.0)
                    .flat_map(|p| ins.iter().map(move |&i| Task::Proofpath(p, i))),
            ),
            Check::Tensor => out.extend(ps.clone().flat_map(|p| ins.iter().map(move |&i| Task::Tensor(p, i)))),
            Check::Modular => out.push(Task::Modular),
            Check::Oracles => out.extend(ps.clone().flat_map(|p| ins.iter().map(move |&i| Task::Oracles(p, i)))),
        }
    }
    out
}

/// Collects the rows of one case.
struct Case<'a> {
    fixture: &'a Fixture,
    key: String,
    seed: u64,
    p: Option<f64>,
    tol: &'a SuiteTolerances,
    rows: Vec<Row>,
}

impl Case<'_> {
    fn q(&self) -> Option<f64> {
        self.p.map(conjugate_exponent)
    }

    fn push(&mut self, name: &str, kind: RowKind, lhs: f64, rhs: f64, pass: bool, residuals: BTreeMap<String, f64>) {
        self.rows.push(Row {
            case_id: format!("{}/{}/{name}", self.fixture.id, self.key),
            groupoid_id: self.fixture.id.clone(),
            check: name.to_string(),
            kind,
            p: self.p,
            q: self.q(),
            lhs,
            rhs,
            margin: rhs - lhs,
            residuals,
            pass,
            seed: self.seed,
            note: None,
        });
    }

    /// `lhs ≤ rhs (1 + tol)`.
    fn relative(&mut self, name: &str, lhs: f64, rhs: f64) {
        let pass = lhs <= rhs * (1.0 + self.tol.inequality);
        self.push(name, RowKind::Inequality, lhs, rhs, pass, BTreeMap::new());
    }

    /// `lhs ≤ rhs + tol`.
    fn absolute(&mut self, name: &str, lhs: f64, rhs: f64, residuals: BTreeMap<String, f64>) {
        let pass = lhs <= rhs + self.tol.inequality;
        self.push(name, RowKind::Inequality, lhs, rhs, pass, residuals);
    }

    fn residual(&mut self, name: &str, value: f64, tol: f64) {
        self.push(name, RowKind::Residual, value, tol, value <= tol, BTreeMap::new());
    }

    fn error(&mut self, name: &str, e: &Error) {
        self.push(&format!("{name}.error"), RowKind::Residual, f64::NAN, 0.0, false, BTreeMap::new());
        if let Some(r) = self.rows.last_mut() {
            r.note = Some(e.to_string());
        }
    }
}

fn relative_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn run_task(fx: &Fixture, spec: &SuiteSpec, task: Task) -> Vec<Row> {
    let key = task.key();
    let seed = case_seed(spec.seed, &format!("{}/{key}", fx.id));
    let p = match task {
        Task::Hy(p, _) | Task::Proofpath(p, _) | Task::Tensor(p, _) | Task::Oracles(p, _) => Some(spec.p_grid[p]),
        Task::Plancherel(_) => Some(2.0),
        Task::Modular => None,
    };
    let mut case = Case {
        fixture: fx,
        key,
        seed,
        p,
        tol: &spec.tolerances,
        rows: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let body = |case: &mut Case, rng: &mut ChaCha8Rng| -> Result<()> {
        match task {
            Task::Plancherel(i) => plancherel_rows(case, &i.function(fx.base(), rng)),
            Task::Hy(_, i) => hy_rows(case, &i.function(fx.base(), rng)),
            Task::Proofpath(_, i) => proofpath_rows(case, &i.function(fx.base(), rng), rng),
            Task::Tensor(_, i) => tensor_rows(case, i, &i.function(fx.base(), rng), rng),
            Task::Modular => modular_rows(case, rng),
            Task::Oracles(_, i) => oracle_rows(case, i, &i.function(fx.base(), rng)),
        }
    };
    let outcome = match spec.size_cap {
        Some(cap) => with_size_cap(cap, || body(&mut case, &mut rng)),
        None => body(&mut case, &mut rng),
    };
    if let Err(e) = outcome {
        case.error(task.check().name(), &e);
    }
    case.rows
}

fn plancherel_rows(case: &mut Case, f: &GFunction) -> Result<()> {
    let r = plancherel_check(&case.fixture.ctx, f)?;
    let tol = case.tol.plancherel;
    case.residual("plancherel", r.residual, tol);
    Ok(())
}

fn hy_rows(case: &mut Case, f: &GFunction) -> Result<()> {
    let ctx = &case.fixture.ctx;
    let p = case.p.expect("hy has p");
    let q = conjugate_exponent(p);
    let lhs = lq_norm(ctx, f, q)?;
    let rhs = f.mixed_norm(p, q)?.max(f.mixed_norm_star(p, q)?);
    case.relative("hy", lhs, rhs);
    if q.is_finite() {
        let t = LqElement::from_function(ctx, f, p)?;
        let spatial = lq_norm_spatial(ctx, &t)?;
        let tol = case.tol.route;
        case.residual("hy.route", relative_diff(lhs, spatial), tol);
    }
    Ok(())
}

fn proofpath_rows(case: &mut Case, f: &GFunction, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = &case.fixture.ctx;
    let p = case.p.expect("proofpath has p");
    let grid = StripGrid::default();
    let f = normalize_for_strip(f, p)?;
    let fam = StripFamily::new(&f, p, None)?;

    let exact = fam.f_z(C64::new(1.0 / p, 0.0)).max_diff(&f)?;
    case.residual("proofpath.exact", exact, 0.0);

    let one = line_one_estimate(ctx, &fam, &grid.t)?;
    let mixed = one.iter().fold(0.0f64, |m, r| m.max(r.mixed));
    let star = one.iter().fold(0.0f64, |m, r| m.max(r.mixed_star));
    let op = one.iter().fold(0.0f64, |m, r| m.max(r.op_norm).max(r.twisted_op_norm));
    case.absolute("proofpath.line_one", mixed, 2.0, BTreeMap::new());
    case.absolute("proofpath.line_one_star", star, 2.0, BTreeMap::new());
    case.absolute("proofpath.line_one_op", op, 2.0, BTreeMap::new());

    let half = line_half_estimate(ctx, &fam, &grid.t)?;
    for (name, pick) in [("proofpath.parts_nu", 0usize), ("proofpath.parts_nu_inv", 1)] {
        let worst = half
            .iter()
            .map(|r| if pick == 0 { r.nu } else { r.nu_inv })
            .max_by(|a, b| a.max_part().total_cmp(&b.max_part()))
            .expect("non-empty grid");
        let res = BTreeMap::from([
            ("a".to_string(), worst.a),
            ("b".to_string(), worst.b),
            ("c".to_string(), worst.c),
            ("total".to_string(), worst.total()),
        ]);
        case.absolute(name, worst.max_part(), 1.0, res);
    }
    let total = half.iter().fold(0.0f64, |m, r| m.max(r.nu.total()).max(r.nu_inv.total()));
    case.absolute("proofpath.parts_total", total, 3.0, BTreeMap::new());
    let f2 = half.iter().fold(0.0f64, |m, r| m.max(r.f2_norm));
    case.absolute("proofpath.f2", f2, 3f64.sqrt(), BTreeMap::new());

    let xi = GFunction::random(ctx.base().clone(), rng);
    let scan = xi_z_scan(ctx, &fam, &xi, &grid, rng)?;
    case.absolute("proofpath.xi_boundary", scan.boundary_sup, scan.bound, BTreeMap::new());
    let tol = case.tol.cauchy;
    case.residual("proofpath.cauchy", scan.cauchy_residual, tol);

    let w = DualityWitness::random(ctx, p, rng)?;
    let d = duality_witness_scan(ctx, &fam, &w, &grid)?;
    case.absolute("proofpath.duality", d.sup_abs_h, d.bound, BTreeMap::new());
    let tol = case.tol.modular;
    case.residual("proofpath.duality_at_inverse_p", d.at_inverse_p, tol);
    Ok(())
}

fn tensor_rows(case: &mut Case, input: Input, f: &GFunction, rng: &mut ChaCha8Rng) -> Result<()> {
    let fx = case.fixture;
    let p = case.p.expect("tensor has p");
    let q = conjugate_exponent(p);
    let lq = lq_norm(&fx.ctx, f, q)?;
    let gm = (f.mixed_norm(p, q)? * f.mixed_norm_star(p, q)?).sqrt();
    case.relative("tensor.geometric_mean", lq, gm);
    let tol = case.tol.tensor;

    if matches!(input, Input::Random(t) if t < TENSOR_POWER_TRIALS) {
        match tensor_sharpening(&fx.ctx, f, p, 1) {
            Ok(r) => {
                case.residual("tensor.power", r.multiplicativity_residual, tol);
                case.residual("tensor.power_mixed", r.mixed_norm_residual, tol);
            }
            Err(Error::SizeCapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    if let (Some((ca, cb)), Input::Random(_)) = (&fx.factors, input) {
        let f1 = GFunction::random(ca.base().clone(), rng);
        let f2 = GFunction::random(cb.base().clone(), rng);
        let big = f1.tensor(&f2, fx.base())?;
        let lhs = lq_norm(&fx.ctx, &big, q)?;
        let rhs = lq_norm(ca, &f1, q)? * lq_norm(cb, &f2, q)?;
        case.residual("tensor.product", relative_diff(lhs, rhs), tol);
        let m = big.mixed_norm(p, q)?;
        let m_expected = f1.mixed_norm(p, q)? * f2.mixed_norm(p, q)?;
        case.residual("tensor.product_mixed", relative_diff(m, m_expected), tol);
    }
    Ok(())
}

fn modular_rows(case: &mut Case, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = &case.fixture.ctx;
    let base = ctx.base().clone();
    let (tol, ctol) = (case.tol.modular, case.tol.commutation);

    case.residual("modular.density", ctx.density_factorization_residual()?, tol);
    case.residual("modular.tomita", ctx.tomita_residual()?, tol);
    case.residual("modular.cocycle", base.cocycle_defect(), case.tol.cocycle);

    let f = GFunction::random(base.clone(), rng);
    let mut comm: f64 = 0.0;
    for z in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, 1.0)] {
        let scale = ctx.left_op(&f.delta_twist(z))?.frobenius_norm().max(1.0);
        comm = comm.max(ctx.commutation_check(&f, z)? / scale);
    }
    case.residual("modular.commutation", comm, ctol);

    let lf = ctx.left_op(&f)?;
    let delta = ctx.delta_power_real(1.0);
    let p = 4.0 / 3.0;
    let fp = fourier_p(ctx, &f, p)?.matrix;
    let mut hom: f64 = 0.0;
    for (t, alpha) in [(&lf, 0.0), (&delta, -1.0), (&fp, -1.0 / conjugate_exponent(p))] {
        hom = hom.max(ctx.homogeneity_residual(t, alpha)? / t.frobenius_norm().max(1.0));
    }
    case.residual("modular.homogeneity", hom, tol);

    let (in_m, vs_rho) = ctx.modular_flow_residual(0.7)?;
    case.residual("modular.flow", in_m.max(vs_rho), tol);

    let xi = GFunction::random(base, rng);
    let s = spatial_derivative_check(ctx, &xi, 4, rng)?;
    let worst = s.quadratic_form.max(s.membership).max(s.trace_formula).max(s.homogeneity);
    case.residual("modular.spatial_derivative", worst, tol);
    Ok(())
}

fn oracle_rows(case: &mut Case, input: Input, f: &GFunction) -> Result<()> {
    let fx = case.fixture;
    let first = input == Input::Random(0) && case.key.starts_with("oracles/p0/");
    match DftOracle::new(fx.base().clone()) {
        Ok(o) => dft_rows(case, &o, f, first)?,
        Err(Error::NotAbelian) => {}
        Err(e) => return Err(e),
    }
    match SchattenOracle::new(fx.base().clone()) {
        Ok(o) => schatten_rows(case, &o, f)?,
        Err(Error::NotPairGroupoid) => {}
        Err(e) => return Err(e),
    }
    Ok(())
}

fn dft_rows(case: &mut Case, o: &DftOracle, f: &GFunction, with_characters: bool) -> Result<()> {
    let p = case.p.expect("oracles have p");
    let q = conjugate_exponent(p);
    let classical = o.dual_norm(&o.transform(f)?, q);
    let lq = lq_norm(&case.fixture.ctx, f, q)?;
    let tol = case.tol.oracle;
    case.residual("oracle.dft", relative_diff(classical, lq), tol);
    case.relative("oracle.dft_hy", classical, f.mixed_norm(p, q)?);
    if with_characters {
        case.residual("oracle.dft_characters", o.homomorphism_residual, tol);
    }
    Ok(())
}

fn schatten_rows(case: &mut Case, o: &SchattenOracle, f: &GFunction) -> Result<()> {
    let p = case.p.expect("oracles have p");
    let q = conjugate_exponent(p);
    let oracle = o.weighted_schatten(f, q)?;
    let lq = lq_norm(&case.fixture.ctx, f, q)?;
    let tol = case.tol.oracle;
    case.residual("oracle.schatten", relative_diff(oracle, lq), tol);
    case.relative("oracle.schatten_hy", oracle, f.mixed_norm(p, q)?.max(f.mixed_norm_star(p, q)?));
    if p == 2.0 {
        let hs_tol = case.tol.hilbert_schmidt;
        case.residual("oracle.hilbert_schmidt", relative_diff(lq, o.hilbert_schmidt(f)), hs_tol);
    }
    Ok(())
}

pub fn build_fixtures(spec: &SuiteSpec) -> Result<Vec<Fixture>> {
    let build = || spec.build_fixtures()?.into_iter().map(|(id, base)| Fixture::new(id, base)).collect();
    match spec.size_cap {
        Some(cap) => with_size_cap(cap, build),
        None => build(),
    }
}

/// Runs every requested check; failures become rows, only fixture
/// construction can fail.
pub fn run_suite(spec: &SuiteSpec) -> Result<VerificationReport> {
    run_suite_with_jobs(spec, None)
}

pub fn run_suite_with_jobs(spec: &SuiteSpec, jobs: Option<usize>) -> Result<VerificationReport> {
    let fixtures = build_fixtures(spec)?;
    let work: Vec<(&Fixture, Task)> = fixtures.iter().flat_map(|fx| tasks(spec).into_iter().map(move |t| (fx, t))).collect();
    let run = || work.par_iter().flat_map_iter(|&(fx, t)| run_task(fx, spec, t)).collect::<Vec<_>>();
    let rows = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Parse(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(VerificationReport::new(spec.clone(), rows))
}

/// Oracle rows only; every fixture must satisfy the oracle's preconditions.
pub fn run_oracle(spec: &SuiteSpec, which: OracleKind) -> Result<VerificationReport> {
    let fixtures = build_fixtures(spec)?;
    let mut rows = Vec::new();
    for fx in &fixtures {
        let dft = match which {
            OracleKind::Dft => Some(DftOracle::new(fx.base().clone())?),
            OracleKind::Schatten => None,
        };
        let sch = match which {
            OracleKind::Schatten => Some(SchattenOracle::new(fx.base().clone())?),
            OracleKind::Dft => None,
        };
        for (pi, &p) in spec.p_grid.iter().enumerate() {
            for input in inputs(spec.trials) {
                let key = format!("oracle/p{pi}/{}", input.key());
                let seed = case_seed(spec.seed, &format!("{}/{key}", fx.id));
                let mut case = Case {
                    fixture: fx,
                    key,
                    seed,
                    p: Some(p),
                    tol: &spec.tolerances,
                    rows: Vec::new(),
                };
                let f = input.function(fx.base(), &mut ChaCha8Rng::seed_from_u64(seed));
                let outcome = match (&dft, &sch) {
                    (Some(o), _) => dft_rows(&mut case, o, &f, pi == 0 && input == Input::Random(0)),
                    (_, Some(o)) => schatten_rows(&mut case, o, &f),
                    _ => Ok(()),
                };
                if let Err(e) = outcome {
                    case.error("oracle", &e);
                }
                rows.extend(case.rows);
            }
        }
    }
    Ok(VerificationReport::new(spec.clone(), rows))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    Dft,
    Schatten,
}
