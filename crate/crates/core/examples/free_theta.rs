//! The free θ-algebra on one generator: the Frobenius lift, θ, ghost
//! components and the f-congruence.

use thetakit::theta::{f_congruence_defect, ghost, working_precision, ThetaPresentation};

fn main() -> thetakit::Result<()> {
    let p = 2;
    let prec = working_precision(p, 8, 3, 12);
    let t = ThetaPresentation::free(p, &["b"], 3, prec, Some(12))?;
    let b = t.base("b");

    println!("b = {b}");
    println!("θ(b) = {}", b.theta()?);
    println!("ψ^p(b) = {}", b.psi_p()?);
    println!("θ(b^2 + 1) = {}", (b.pow(2) + t.one()).theta()?.with_precision(8));

    let levels: Vec<_> = (0..=2).map(|l| t.gen("b", l).map(|g| g.into_poly())).collect::<Result<_, _>>()?;
    for n in 0..=2 {
        let g = ghost(&levels, n, p);
        println!("ψ^{{p^{n}}}(b) = {}", g.with_precision(8).canonical_text());
    }

    let f = t.psi_p(&b)? - &b;
    println!("f = ψ^p(b) - b = {f}");
    for i in 0..=1 {
        let d = f_congruence_defect(&t, i)?;
        println!("θ_{i}(f) against b_{i}^p - b_{i}: defect is zero = {}", d.is_zero());
    }
    Ok(())
}
