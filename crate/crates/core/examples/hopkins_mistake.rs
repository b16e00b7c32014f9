//! The section s is not comultiplicative, yet ((1 - sπ) ⊗ π) ∘ Δ still
//! annihilates every s(β_n).

use thetakit::mahler::hopkins_mistake;
use thetakit::theta::{working_precision, ThetaPresentation};

fn main() -> thetakit::Result<()> {
    for p in [2, 3] {
        let t = ThetaPresentation::free(p, &["b"], 4, working_precision(p, 8, 4, 24), Some(24))?;
        for n in 1..=6 {
            let img = hopkins_mistake(&t, n)?;
            println!(
                "p = {p}, n = {n}: s(β_n) has {} terms, image is zero: {}",
                img.input.poly().len(),
                img.is_zero()
            );
        }
    }
    Ok(())
}
