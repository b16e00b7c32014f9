//! Fixed-precision p-adic integers: arithmetic, precision tracking,
//! Teichmüller digits and the logarithm.

use thetakit::padic::max_precision;
use thetakit::PadicInt;

fn main() -> thetakit::Result<()> {
    let p = 3;
    let x = PadicInt::int(p, -7, 10);
    let y = PadicInt::int(p, 45, 10);
    println!("x = {x}, y = {y}");
    println!("x + y = {}, x * y = {}", x + y, x * y);
    println!("v_3(y) = {}", y.valuation());

    // dividing by p costs a digit, multiplying by p gains one
    let z = y.exact_div_p(2)?;
    println!("y / 9 = {z} (precision {})", z.precision());
    println!("9 * (y / 9) = {} (precision {})", z.mul_p_pow(2), z.mul_p_pow(2).precision());

    let inv = x.unit_inverse()?;
    println!("1 / x = {inv}, check: {}", x * inv);

    let digits = PadicInt::int(p, 100, 8).teichmuller_digits(4)?;
    println!("Teichmüller digits of 100: {digits:?}");

    let four = PadicInt::int(p, 4, 12);
    println!("log(4) = {} mod 3^12", four.log()?);
    println!("binom(1/2, 3) at p = 3: {}", PadicInt::int(p, 2, 20).unit_inverse()?.binomial(3)?);
    println!("largest supported precision at p = 2, 3, 5: {:?}", [2, 3, 5].map(max_precision));
    Ok(())
}
