//! The convolution *-algebra: associativity, involution, the unit, and the
//! left-regular representation.

use groupoidal::convalg::GFunction;
use groupoidal::groupoid::Groupoid;
use groupoidal::measure::{HaarSystem, MeasuredGroupoid};
use groupoidal::repmod::RepContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> groupoidal::Result<()> {
    let mg = MeasuredGroupoid::build(Groupoid::pair(3)?, HaarSystem::new(vec![1.0, 0.5, 2.0])?, vec![1.0, 2.0, 5.0])?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = GFunction::random(mg.clone(), &mut rng);
    let g = GFunction::random(mg.clone(), &mut rng);
    let h = GFunction::random(mg.clone(), &mut rng);

    let assoc = f.convolve(&g)?.convolve(&h)?.max_diff(&f.convolve(&g.convolve(&h)?)?)?;
    let star = f.convolve(&g)?.involution().max_diff(&g.involution().convolve(&f.involution())?)?;
    let e = GFunction::identity_element(mg.clone());
    let unit = f.convolve(&e)?.max_diff(&f)?;
    println!("(f*g)*h - f*(g*h)      {assoc:.2e}");
    println!("(f*g)^* - g^* * f^*    {star:.2e}");
    println!("f*1 - f                {unit:.2e}");

    let ctx = RepContext::new(mg)?;
    let lfg = ctx.left_op(&f.convolve(&g)?)?;
    let prod = ctx.left_op(&f)?.matmul(&ctx.left_op(&g)?);
    println!("L(f*g) - L(f)L(g)      {:.2e}", (&lfg - &prod).frobenius_norm());
    let adj = &ctx.left_op(&f.involution())? - &ctx.left_op(&f)?.adjoint();
    println!("L(f^*) - L(f)^†        {:.2e}", adj.frobenius_norm());
    let comm = ctx.left_op(&f)?.commutator(&ctx.right_op(&g)?);
    println!("[L(f), R(g)]           {:.2e}", comm.frobenius_norm());
    Ok(())
}
