//! The analytic family f_z on the strip and its boundary estimates.
//!
//! On a non-unimodular groupoid the per-part bound on Re z = ½ can exceed 1
//! even though the inequality itself holds. Compare the two fixtures.

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::Groupoid;
use groupoidal::interp::{line_half_estimate, line_one_estimate, normalize_for_strip, StripFamily};
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::numkit::C64;
use groupoidal::repmod::RepContext;

fn run(name: &str, mu: Vec<f64>) -> groupoidal::Result<()> {
    let p = 4.0 / 3.0;
    let mg = MeasuredGroupoid::build(Groupoid::pair(3)?, HaarSystem::uniform(3), mu)?;
    let ctx = RepContext::new(mg.clone())?;
    let f = GFunction::from_real(mg, &[0.2, 1.0, 0.1, 0.05, 0.3, 0.7, 0.02, 0.5, 0.9])?;
    let fam = StripFamily::new(&normalize_for_strip(&f, p)?, p, None)?;
    let exact = fam.f_z(C64::new(1.0 / p, 0.0)).max_diff(&fam.f)?;
    println!("{name}: ε = {:.4}, |f_(1/p) - f| = {exact:.1e}", fam.epsilon);

    let t = [0.0, 1.0, -3.0];
    for r in line_one_estimate(&ctx, &fam, &t)? {
        println!(
            "  Re z = 1, t = {:>4}: ‖f_z‖ = {:.4}, ‖f_z*‖ = {:.4}, op = {:.4}",
            r.t, r.mixed, r.mixed_star, r.op_norm
        );
    }
    for r in line_half_estimate(&ctx, &fam, &t)? {
        println!(
            "  Re z = ½, t = {:>4}: ν parts max {:.4}, ν⁻¹ parts max {:.4}, ‖F₂‖ = {:.4}",
            r.t,
            r.nu.max_part(),
            r.nu_inv.max_part(),
            r.f2_norm
        );
    }
    Ok(())
}

fn main() -> groupoidal::Result<()> {
    run("pair(3) uniform", vec![1.0, 1.0, 1.0])?;
    run("pair(3) skew", vec![1.0, 2.0, 5.0])
}
