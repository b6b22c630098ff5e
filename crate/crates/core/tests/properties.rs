use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::{symmetric_table, Groupoid};
use groupoidal::harness::{Row, RowKind, SuiteSpec, VerificationReport};
use groupoidal::interp::{normalize_for_strip, StripFamily};
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::nclp::{conjugate_exponent, fourier_p, hy_check, lq_norm, plancherel_check};
use groupoidal::numkit::C64;
use groupoidal::repmod::RepContext;

fn groupoid(kind: u8, n: usize) -> Groupoid {
    match kind % 6 {
        0 => Groupoid::cyclic(n + 1).unwrap(),
        1 => Groupoid::pair(n.min(3)).unwrap(),
        2 => Groupoid::from_group(&symmetric_table(3)).unwrap(),
        3 => Groupoid::from_action(&[vec![0, 1], vec![1, 0]], 2, &[vec![0, 1], vec![1, 0]]).unwrap(),
        4 => Groupoid::disjoint_union(&Groupoid::cyclic(2).unwrap(), &Groupoid::pair(2).unwrap()).unwrap(),
        _ => Groupoid::product(&Groupoid::cyclic(2).unwrap(), &Groupoid::pair(n.min(2)).unwrap()).unwrap(),
    }
}

prop_compose! {
    fn measured()(kind in 0u8..6, n in 2usize..5, w in prop::collection::vec(0.2f64..5.0, 6), mu in prop::collection::vec(0.2f64..5.0, 6)) -> Arc<MeasuredGroupoid> {
        let g = groupoid(kind, n);
        let u = g.n_units();
        MeasuredGroupoid::build(g, HaarSystem::new(w[..u].to_vec()).unwrap(), mu[..u].to_vec()).unwrap()
    }
}

fn random(base: &Arc<MeasuredGroupoid>, seed: u64) -> GFunction {
    GFunction::random(base.clone(), &mut ChaCha8Rng::seed_from_u64(seed))
}

fn close(a: &GFunction, b: &GFunction, tol: f64) -> bool {
    a.max_diff(b).unwrap() <= tol * a.max_abs().max(b.max_abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructors_satisfy_axioms(kind in 0u8..6, n in 2usize..5) {
        prop_assert!(groupoid(kind, n).validate().is_empty());
    }

    #[test]
    fn convolution_is_associative_and_involutive(mg in measured(), seed in any::<u64>()) {
        let (f, g, h) = (random(&mg, seed), random(&mg, seed ^ 1), random(&mg, seed ^ 2));
        let left = f.convolve(&g).unwrap().convolve(&h).unwrap();
        let right = f.convolve(&g.convolve(&h).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
        let star = f.convolve(&g).unwrap().involution();
        prop_assert!(close(&star, &g.involution().convolve(&f.involution()).unwrap(), 1e-12));
        let u = GFunction::identity_element(mg.clone());
        prop_assert!(close(&f.convolve(&u).unwrap(), &f, 1e-13));
        prop_assert!(close(&u.convolve(&f).unwrap(), &f, 1e-13));
    }

    #[test]
    fn left_regular_is_a_star_representation(mg in measured(), seed in any::<u64>()) {
        let ctx = RepContext::new(mg.clone()).unwrap();
        let (f, g) = (random(&mg, seed), random(&mg, seed ^ 7));
        let lfg = ctx.left_op(&f.convolve(&g).unwrap()).unwrap();
        let prod = ctx.left_op(&f).unwrap().matmul(&ctx.left_op(&g).unwrap());
        prop_assert!((&lfg - &prod).frobenius_norm() <= 1e-11 * prod.frobenius_norm().max(1.0));
        let adj = ctx.left_op(&f.involution()).unwrap();
        prop_assert!((&adj - &ctx.left_op(&f).unwrap().adjoint()).frobenius_norm() <= 1e-12 * adj.frobenius_norm().max(1.0));
        let r = ctx.right_op(&g).unwrap();
        let l = ctx.left_op(&f).unwrap();
        prop_assert!((&l.matmul(&r) - &r.matmul(&l)).frobenius_norm() <= 1e-11 * l.frobenius_norm().max(1.0) * r.frobenius_norm().max(1.0));
    }

    #[test]
    fn modular_structure(mg in measured(), seed in any::<u64>()) {
        let ctx = RepContext::new(mg.clone()).unwrap();
        prop_assert!(ctx.density_factorization_residual().unwrap() < 1e-10);
        prop_assert!(mg.cocycle_defect() < 1e-12);
        let f = random(&mg, seed);
        let j = ctx.j();
        let v = ctx.to_coords(&f).unwrap();
        let jj = j.apply(&j.apply(&v));
        prop_assert!(v.iter().zip(&jj).all(|(a, b)| (a - b).norm() < 1e-12));
        for z in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, 1.0)] {
            let scale = ctx.left_op(&f.delta_twist(z)).unwrap().frobenius_norm().max(1.0);
            prop_assert!(ctx.commutation_check(&f, z).unwrap() <= 1e-10 * scale);
        }
    }

    #[test]
    fn plancherel_isometry(mg in measured(), seed in any::<u64>()) {
        let ctx = RepContext::new(mg.clone()).unwrap();
        let r = plancherel_check(&ctx, &random(&mg, seed)).unwrap();
        prop_assert!(r.residual < 1e-9, "{r:?}");
    }

    #[test]
    fn hausdorff_young(mg in measured(), seed in any::<u64>(), p in 1.0f64..=2.0) {
        let ctx = RepContext::new(mg.clone()).unwrap();
        let f = random(&mg, seed);
        let r = hy_check(&ctx, &f, p, 1e-9).unwrap();
        prop_assert!(r.pass, "{r:?}");
        let gm = (f.mixed_norm(p, r.q).unwrap() * f.mixed_norm_star(p, r.q).unwrap()).sqrt();
        prop_assert!(r.lhs <= gm * (1.0 + 1e-9));
    }

    #[test]
    fn involution_symmetries(mg in measured(), seed in any::<u64>(), p in 1.0f64..=2.0) {
        let ctx = RepContext::new(mg.clone()).unwrap();
        let f = random(&mg, seed);
        let q = conjugate_exponent(p);
        let a = lq_norm(&ctx, &f, q).unwrap();
        let b = lq_norm(&ctx, &f.involution(), q).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        let star = f.mixed_norm_star(p, q).unwrap();
        prop_assert!((star - f.involution().mixed_norm(p, q).unwrap()).abs() <= 1e-12 * star.max(1.0));
        let fp = fourier_p(&ctx, &f, p).unwrap().matrix;
        prop_assert!(ctx.homogeneity_residual(&fp, -1.0 / q).unwrap() <= 1e-9 * fp.frobenius_norm().max(1.0));
    }

    #[test]
    fn strip_family(mg in measured(), seed in any::<u64>(), p in 1.05f64..1.95, x in 0.5f64..1.0, t in -3.0f64..3.0) {
        let f = normalize_for_strip(&random(&mg, seed), p).unwrap();
        let fam = StripFamily::new(&f, p, None).unwrap();
        let at = fam.f_z(C64::new(1.0 / p, 0.0));
        prop_assert_eq!(at.values(), f.values());
        let a = fam.f_z(C64::new(x, 0.0));
        let b = fam.f_z(C64::new(x, t));
        prop_assert!(a.values().iter().zip(b.values()).all(|(u, v)| (u.norm() - v.norm()).abs() <= 1e-12 * u.norm().max(1e-300)));
        let q = conjugate_exponent(p);
        prop_assert!(f.mixed_norm(p, q).unwrap().max(f.mixed_norm_star(p, q).unwrap()) <= 1.0 + 1e-12);
    }

    #[test]
    fn report_json_round_trip(vals in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6, any::<bool>(), any::<u64>()), 0..8), inf in any::<bool>()) {
        let spec = SuiteSpec::parse(r#"{"groupoids":[]}"#).unwrap();
        let rows = vals.iter().enumerate().map(|(i, &(lhs, rhs, pass, seed))| Row {
            case_id: format!("c{i:03}"),
            groupoid_id: "g".into(),
            check: "hy".into(),
            kind: if pass { RowKind::Inequality } else { RowKind::Residual },
            p: Some(1.0),
            q: Some(if inf { f64::INFINITY } else { rhs.abs() + 1.0 }),
            lhs,
            rhs,
            margin: rhs - lhs,
            residuals: Default::default(),
            pass,
            seed,
            note: None,
        }).collect();
        let r = VerificationReport::new(spec, rows);
        prop_assert_eq!(VerificationReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
}
