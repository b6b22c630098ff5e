//! Modular data of the regular representation on a non-unimodular groupoid.

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::Groupoid;
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::numkit::C64;
use groupoidal::repmod::RepContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> groupoidal::Result<()> {
    let mg = MeasuredGroupoid::build(Groupoid::pair(2)?, HaarSystem::uniform(2), vec![1.0, 4.0])?;
    let g = mg.groupoid();
    for a in 0..g.n_arrows() {
        println!("δ({}) = {}", g.label(a), mg.delta()[a]);
    }
    println!("unimodular: {}, cocycle defect {:.1e}", mg.is_unimodular(1e-12), mg.cocycle_defect());

    let ctx = RepContext::new(mg.clone())?;
    let vn = ctx.vn_data()?;
    println!(
        "dim M = {}, dim M' = {}, fiber blocks {:?}",
        vn.dim_m(),
        vn.dim_m_prime(),
        ctx.fiber_decomposition().block_dims()
    );
    println!("ρ factorization residual {:.1e}", ctx.density_factorization_residual()?);

    let f = GFunction::random(mg, &mut ChaCha8Rng::seed_from_u64(1));
    let v = ctx.to_coords(&f)?;
    let j = ctx.j();
    let jj = j.apply(&j.apply(&v));
    println!("J² = 1: {:.1e}", v.iter().zip(&jj).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    for z in [C64::new(0.0, 1.0), C64::new(0.5, 0.0), C64::new(0.25, -2.0)] {
        println!("Δ^z L(f) Δ^-z = L(δ^z f) at z = {z}: {:.1e}", ctx.commutation_check(&f, z)?);
    }
    Ok(())
}
