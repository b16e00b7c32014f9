//! Continuous cohomology of a procyclic group acting on (Z/p^N)^r, via the
//! Smith normal form of ψ^g - 1.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thetakit::cohomology::{cohomology, h0_h1, ko_preset, smith_normal_form, CyclicAction, ModMatrix};

fn main() -> thetakit::Result<()> {
    let n = 12;
    let (h0, h1) = h0_h1(&CyclicAction::scalar(2, n, 1)?);
    println!("trivial action on Z/2^{n}: H^0 = {h0}, H^1 = {h1}");

    for t in 0..8 {
        let a = ko_preset(2, t, n)?;
        let (h0, h1) = h0_h1(&a);
        println!("KO_{t} at p = 2: H^0 = {h0}, H^1 = {h1}, H^2 = {}", cohomology(&a, 2));
    }
    for t in [0, 4, 8, 12] {
        let (h0, h1) = h0_h1(&ko_preset(3, t, 8)?);
        println!("KO_{t} at p = 3: H^0 = {h0}, H^1 = {h1}");
    }

    let a = ModMatrix::new(3, 4, 2, 2, &[1, 3, 9, 4])?;
    let s = smith_normal_form(&a.minus_identity()?);
    println!("Smith form of A - 1 over Z/81: {:?}", s.diagonal);
    let (h0, h1) = h0_h1(&CyclicAction::new(a)?);
    println!("H^0 = {h0}, H^1 = {h1}");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = ModMatrix::random(2, 10, 4, 4, &mut rng);
    let s = smith_normal_form(&m);
    println!("U M V = D over Z/2^10: {}", s.u.mul(&m)?.mul(&s.v)? == s.d);
    Ok(())
}
