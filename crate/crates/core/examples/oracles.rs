//! Independent references: the classical DFT for abelian groups and weighted
//! Schatten norms of kernels for pair groupoids.

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::{cyclic_table, product_table, Groupoid};
use groupoidal::harness::{DftOracle, SchattenOracle};
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::nclp::{conjugate_exponent, lq_norm};
use groupoidal::repmod::RepContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> groupoidal::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = conjugate_exponent(1.25);

    let z6 = Groupoid::from_group(&product_table(&cyclic_table(2), &cyclic_table(3)))?;
    let mg = MeasuredGroupoid::build(z6, HaarSystem::new(vec![0.7])?, vec![1.3])?;
    let dft = DftOracle::new(mg.clone())?;
    let f = GFunction::random(mg.clone(), &mut rng);
    let classical = dft.dual_norm(&dft.transform(&f)?, q);
    let ours = lq_norm(&RepContext::new(mg)?, &f, q)?;
    println!("Z/2×Z/3: DFT {classical:.12} vs groupoid {ours:.12}, dual weight {:.4}", dft.dual_weight);

    let mg = MeasuredGroupoid::build(Groupoid::pair(3)?, HaarSystem::uniform(3), vec![1.0, 2.0, 5.0])?;
    let sch = SchattenOracle::new(mg.clone())?;
    let f = GFunction::random(mg.clone(), &mut rng);
    let ctx = RepContext::new(mg)?;
    println!(
        "pair(3): kernel {:.12} vs groupoid {:.12}",
        sch.weighted_schatten(&f, q)?,
        lq_norm(&ctx, &f, q)?
    );
    println!(
        "pair(3): Hilbert-Schmidt {:.12} vs groupoid {:.12}",
        sch.hilbert_schmidt(&f),
        lq_norm(&ctx, &f, 2.0)?
    );

    match SchattenOracle::new(MeasuredGroupoid::uniform(Groupoid::cyclic(3)?)?) {
        Err(e) => println!("Z/3 has no Schatten oracle: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
