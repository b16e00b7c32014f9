//! Mahler expansions of continuous functions Z_p -> Z_p, the image of the
//! free θ-algebra and the digit basis.

use thetakit::mahler::{pi_bn, pi_map, section_s, to_alpha, MahlerFn1};
use thetakit::theta::ThetaPresentation;
use thetakit::PadicInt;

fn main() -> thetakit::Result<()> {
    let p = 2;
    let n = 10;
    // x^3 sampled at 0..6 recovers its Mahler coefficients 0, 1, 6, 6
    let cube = MahlerFn1::from_fn(p, n, 4, |x| PadicInt::int(p, x * x * x, n))?;
    println!("x^3 = {cube}");
    println!("x^3 at 1/3 = {}", cube.evaluate(&PadicInt::int(p, 3, n).unit_inverse()?)?);
    println!("(x + 1)^3 = {}", cube.translate_int(1));
    println!("Δ(x^3) at (2, 5) = {}", cube.coproduct().evaluate_int(2, 5));

    let t = ThetaPresentation::free(p, &["b"], 3, 16, Some(12))?;
    let b = t.base("b");
    println!("π(b^2) = {}", pi_map(&b.pow(2))?);
    println!("π(ψ^p(b) - b) = {}", pi_map(&(t.psi_p(&b)? - &b))?);
    let s = section_s(&MahlerFn1::beta(p, 16, 3), &t)?;
    println!("s(β_3) = {}", s.with_precision(6));
    println!("π(s(β_3)) = {}", pi_map(&s)?);

    for k in 0..=2 {
        let f = pi_bn(k, p, 1)?;
        println!("π(b_{k}) mod 2 in digits: {}", to_alpha(&f, k)?.canonical_text());
    }
    Ok(())
}
