//! Build the stock finite groupoids and print their structure maps.

use groupoidal::groupoid::{cyclic_table, symmetric_table, Groupoid};

fn show(name: &str, g: &Groupoid) {
    println!("{name}: {} arrows, {} units, axioms ok: {}", g.n_arrows(), g.n_units(), g.validate().is_empty());
    if g.n_arrows() <= 9 {
        for a in 0..g.n_arrows() {
            println!("  {:>6}: {} -> {}, inverse {}", g.label(a), g.source(a), g.range(a), g.label(g.inverse(a)));
        }
    }
}

fn main() -> groupoidal::Result<()> {
    show("Z/3", &Groupoid::cyclic(3)?);
    show("S3", &Groupoid::from_group(&symmetric_table(3))?);
    show("pair(3)", &Groupoid::pair(3)?);
    show("space(2)", &Groupoid::space(2)?);

    // Z/2 swapping two points.
    let swap = Groupoid::from_action(&cyclic_table(2), 2, &[vec![0, 1], vec![1, 0]])?;
    show("Z/2 ⋉ {0,1}", &swap);
    println!("  isomorphic to pair(2): {}", swap.isomorphism_to(&Groupoid::pair(2)?).is_some());

    let u = Groupoid::disjoint_union(&Groupoid::cyclic(2)?, &Groupoid::pair(2)?)?;
    show("Z/2 ⊔ pair(2)", &u);
    let p = Groupoid::product(&Groupoid::cyclic(2)?, &Groupoid::pair(2)?)?;
    show("Z/2 × pair(2)", &p);
    println!("  composable pairs: {}", p.composable_pairs().count());
    Ok(())
}
