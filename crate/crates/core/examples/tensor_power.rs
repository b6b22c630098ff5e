//! ‖F_p(f*⊗f)‖_q = ‖F_p(f)‖_q² and the resulting geometric-mean bound.

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::Groupoid;
use groupoidal::interp::tensor_sharpening;
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::repmod::RepContext;

fn main() -> groupoidal::Result<()> {
    let mg = MeasuredGroupoid::build(Groupoid::pair(2)?, HaarSystem::uniform(2), vec![1.0, 3.0])?;
    let ctx = RepContext::new(mg.clone())?;
    let f = GFunction::from_real(mg, &[1.0, 0.4, 0.0, -0.7])?;
    for n in [1, 2] {
        let s = tensor_sharpening(&ctx, &f, 1.5, n)?;
        println!("n = {n}: {} arrows in the power", 4usize.pow(2 * n as u32));
        println!(
            "  ‖F_p(F)‖_q = {:.10}, ‖F_p(f)‖_q^(2n) = {:.10}, residual {:.1e}",
            s.lq_power,
            s.lq.powi(2 * n as i32),
            s.multiplicativity_residual
        );
        println!("  bounds {:?}", s.bounds);
        println!("  ‖F_p(f)‖_q = {:.6} ≤ geometric mean {:.6} ≤ max {:.6}", s.lq, s.geometric_mean, s.max_bound);
    }
    Ok(())
}
