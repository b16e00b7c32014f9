//! q-expansions of modular forms: Eisenstein series, j^-1, the Tate
//! curve's b and f, and h with θ(f) = h(f).

use thetakit::padic::max_precision;
use thetakit::qseries::{eisenstein_e4, express_in_base, TateData};

fn main() -> thetakit::Result<()> {
    for p in [2, 3] {
        let prec = max_precision(p);
        println!("p = {p}");
        println!("  E4 = {}", eisenstein_e4(p, 6, 12)?);
        let data = TateData::compute(p, 32, prec)?;
        println!("  j^-1 = {}", data.j_inv.truncate(6).with_precision(12));
        println!("  f = {}", data.f.truncate(6).with_precision(12));
        println!("  f mod p = {:?}", &data.f.mod_p()[..12]);
        println!("  j^-1 mod p = {:?}", &data.j_inv.mod_p()[..12]);
        let h: Vec<_> = data.h.iter().take(6).map(|c| c.with_precision(8)).collect();
        println!("  h = {h:?}");
        // f in terms of j^-1 has a unit linear coefficient
        let alpha = express_in_base(&data.f, &data.j_inv)?;
        println!("  α(1) = {}", alpha[1].with_precision(12));
    }
    Ok(())
}
