//! λ-operations from the leaky Adams operations, on Z_p and on T(b).

use thetakit::lambda::{cartan_product, lambdas};
use thetakit::theta::ThetaPresentation;
use thetakit::PadicInt;

fn main() -> thetakit::Result<()> {
    let p = 5;
    let x = PadicInt::int(p, -3, 12);
    for (n, l) in lambdas(&x, 5)?.iter().enumerate() {
        println!("λ^{n}(-3) = {l}  binomial: {}", x.binomial(n as u64)?);
    }

    let t = ThetaPresentation::free(2, &["b"], 3, 16, Some(12))?;
    let b = t.base("b");
    for (n, l) in lambdas(&b, 4)?.iter().enumerate() {
        println!("λ^{n}(b) = {}", l.with_precision(6));
    }

    // Cartan: λ^n(x + y) = Σ λ^i(x) λ^{n-i}(y)
    let one = t.one();
    let (lb, l1, lsum) = (lambdas(&b, 3)?, lambdas(&one, 3)?, lambdas(&(&b + &one), 3)?);
    let c = cartan_product(&lb, &l1, 3)?;
    println!("λ^3(b + 1) via Cartan agrees: {}", c == lsum[3]);
    Ok(())
}
