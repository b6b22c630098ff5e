//! ‖F₂(f)‖₂ = ‖f‖_{L²(ν₀)} across a few groupoids.

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::{symmetric_table, Groupoid};
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::nclp::plancherel_check;
use groupoidal::repmod::RepContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> groupoidal::Result<()> {
    let cases = [
        ("Z/4", MeasuredGroupoid::uniform(Groupoid::cyclic(4)?)?),
        ("S3", MeasuredGroupoid::uniform(Groupoid::from_group(&symmetric_table(3))?)?),
        (
            "pair(3) skew",
            MeasuredGroupoid::build(Groupoid::pair(3)?, HaarSystem::uniform(3), vec![1.0, 2.0, 5.0])?,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, mg) in cases {
        let ctx = RepContext::new(mg.clone())?;
        let worst = (0..50)
            .map(|_| plancherel_check(&ctx, &GFunction::random(mg.clone(), &mut rng)).map(|r| r.residual))
            .collect::<groupoidal::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("{name:<14} worst relative residual over 50 draws: {worst:.2e}");
    }
    Ok(())
}
