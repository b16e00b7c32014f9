//! Comultiplication on level generators is the Witt vector sum.

use thetakit::theta::{ghost, witt_sum, ThetaPresentation};

fn main() -> thetakit::Result<()> {
    let p = 3;
    let t = ThetaPresentation::free(p, &["b"], 2, 12, Some(12))?;
    let sq = t.tensor_square()?;
    for n in 0..=2 {
        let d = t.comultiply(&t.gen("b", n)?)?;
        println!("Δ(b_{n}) = {}", d.with_precision(6));
    }

    let x: Vec<_> = (0..=2).map(|l| sq.gen("b", l).map(|g| g.into_poly())).collect::<Result<_, _>>()?;
    let y: Vec<_> = (0..=2).map(|l| sq.gen("b'", l).map(|g| g.into_poly())).collect::<Result<_, _>>()?;
    let s = witt_sum(&x, &y, p)?;
    for n in 0..=2 {
        let defect = ghost(&s, n, p) - (ghost(&x, n, p) + ghost(&y, n, p));
        println!("ghost component {n} is additive: {}", defect.is_zero());
    }
    let b = t.base("b");
    println!("counit of b^2 + 5: {}", t.counit(&(b.pow(2) + t.constant(5))));
    Ok(())
}
