//! The inequality ‖F_p(f)‖_q ≤ max(‖f‖_{p,q}, ‖f*‖_{p,q}) over the p grid,
//! with the geometric mean of the two mixed norms alongside.

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::Groupoid;
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::nclp::hy_check;
use groupoidal::repmod::RepContext;

fn main() -> groupoidal::Result<()> {
    let mg = MeasuredGroupoid::build(Groupoid::pair(2)?, HaarSystem::uniform(2), vec![1.0, 4.0])?;
    let ctx = RepContext::new(mg.clone())?;
    let f = GFunction::from_real(mg, &[1.0, 2.0, -0.5, 0.3])?;
    println!("{:>6} {:>8} {:>12} {:>12} {:>12}", "p", "q", "‖F_p f‖_q", "bound", "geo mean");
    for p in [1.0, 1.1, 4.0 / 3.0, 1.5, 1.8, 2.0] {
        let r = hy_check(&ctx, &f, p, 1e-9)?;
        let gm = (f.mixed_norm(p, r.q)? * f.mixed_norm_star(p, r.q)?).sqrt();
        println!(
            "{p:>6.3} {:>8.3} {:>12.6} {:>12.6} {gm:>12.6} {}",
            r.q,
            r.lhs,
            r.rhs,
            if r.pass { "ok" } else { "VIOLATED" }
        );
    }
    Ok(())
}
