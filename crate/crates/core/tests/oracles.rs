//! Independent reference computations for values the library derives.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thetakit::cohomology::{h0_h1, ko_preset};
use thetakit::padic::{max_precision, pow_p};
use thetakit::qseries::{discriminant, eisenstein_e4, eisenstein_e6, f_series, j_inverse, log_one_unit, theta_on_series, QSeries};
use thetakit::theta::ThetaPresentation;
use thetakit::PadicInt;

const TERMS: usize = 40;

fn sigma(n: usize, k: u32) -> BigInt {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| BigInt::from(d).pow(k)).sum()
}

fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Inverse of an integer series with constant term 1.
fn inverse(a: &[BigInt]) -> Vec<BigInt> {
    assert!(a[0].is_one());
    let mut out = vec![BigInt::zero(); a.len()];
    out[0] = BigInt::one();
    for n in 1..a.len() {
        let s: BigInt = (1..=n).map(|k| &a[k] * &out[n - k]).sum();
        out[n] = -s;
    }
    out
}

fn eisenstein(k: u32, c: i64) -> Vec<BigInt> {
    (0..TERMS).map(|n| if n == 0 { BigInt::one() } else { BigInt::from(c) * sigma(n, k - 1) }).collect()
}

/// q ∏ (1 - q^n)^24
fn delta_product() -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); TERMS];
    acc[0] = BigInt::one();
    for n in 1..TERMS {
        let mut factor = vec![BigInt::zero(); TERMS];
        factor[0] = BigInt::one();
        factor[n] = BigInt::from(-1);
        for _ in 0..24 {
            acc = mul(&acc, &factor);
        }
    }
    let mut out = vec![BigInt::zero(); TERMS];
    out[1..].clone_from_slice(&acc[..TERMS - 1]);
    out
}

fn residue(x: &BigInt, p: u32, prec: u32) -> u64 {
    let m = BigInt::from(pow_p(p, prec));
    let r = ((x % &m) + &m) % &m;
    r.to_u64().unwrap()
}

fn rational_residue(x: &BigRational, p: u32, prec: u32) -> u64 {
    let m = BigInt::from(pow_p(p, prec));
    let den = x.denom();
    assert!(!(den % BigInt::from(p)).is_zero(), "{x} is not {p}-integral");
    // invert the denominator mod p^prec via the extended Euclidean algorithm
    let (mut r0, mut r1) = (((den % &m) + &m) % &m, m.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        (r0, r1) = (r1.clone(), &r0 - &q * &r1);
        (s0, s1) = (s1.clone(), &s0 - &q * &s1);
    }
    assert!(r0.is_one());
    residue(&(x.numer() * s0), p, prec)
}

fn assert_matches(series: &QSeries, want: &[BigInt], p: u32) {
    for (k, c) in series.coeffs().iter().enumerate().take(want.len()) {
        let prec = c.precision();
        assert_eq!(c.residue(), residue(&want[k], p, prec), "q^{k} at p = {p}, precision {prec}");
    }
}

#[test]
fn discriminant_matches_product_formula() {
    let want = delta_product();
    assert_eq!(want[1..6].iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>(), [1, -24, 252, -1472, 4830]);
    for p in [2, 3, 5] {
        let d = discriminant(p, TERMS, max_precision(p)).unwrap();
        assert!(d.precision() >= 20);
        assert_matches(&d, &want, p);
    }
}

#[test]
fn j_inverse_matches_rational_inversion() {
    let e4 = eisenstein(4, 240);
    let e4_cubed = mul(&mul(&e4, &e4), &e4);
    let want = mul(&delta_product(), &inverse(&e4_cubed));
    assert_eq!(want[2].to_i64(), Some(-744));
    assert_eq!(want[3].to_i64(), Some(356652));
    for p in [2, 3] {
        let j = j_inverse(p, TERMS, max_precision(p)).unwrap();
        assert_matches(&j, &want, p);
    }
}

#[test]
fn eisenstein_series_match_divisor_sums() {
    for p in [2, 3, 5] {
        assert_matches(&eisenstein_e4(p, TERMS, 20).unwrap(), &eisenstein(4, 240), p);
        assert_matches(&eisenstein_e6(p, TERMS, 20).unwrap(), &eisenstein(6, -504), p);
    }
}

/// log E from n L_n = [q^n] q E'/E, over Q.
fn log_by_derivative(e: &[BigInt]) -> Vec<BigRational> {
    let deriv: Vec<BigInt> = e.iter().enumerate().map(|(n, c)| c * BigInt::from(n)).collect();
    let ratio = mul(&deriv, &inverse(e));
    ratio
        .iter()
        .enumerate()
        .map(|(n, c)| if n == 0 { BigRational::zero() } else { BigRational::new(c.clone(), BigInt::from(n)) })
        .collect()
}

#[test]
fn log_e6_at_three_matches_derivative_oracle() {
    let e6 = eisenstein(6, -504);
    let want: Vec<u64> = log_by_derivative(&e6).iter().take(8).map(|c| rational_residue(c, 3, 12)).collect();
    // frozen from the oracle above
    assert_eq!(want, [0, 530937, 387801, 369585, 18801, 3186, 183681, 137205]);
    let got = log_one_unit(&eisenstein_e6(3, TERMS, max_precision(3)).unwrap()).unwrap();
    for (k, w) in want.iter().enumerate() {
        let c = got.coeff(k);
        assert!(c.precision() >= 12);
        assert_eq!(c.with_precision(12).residue(), *w, "q^{k}");
    }
}

#[test]
fn log_e4_at_two_matches_derivative_oracle() {
    let e4 = eisenstein(4, 240);
    let got = log_one_unit(&eisenstein_e4(2, TERMS, max_precision(2)).unwrap()).unwrap();
    for (k, c) in log_by_derivative(&e4).iter().enumerate().take(TERMS) {
        let g = got.coeff(k);
        let prec = g.precision().min(20);
        assert_eq!(g.with_precision(prec).residue(), rational_residue(c, 2, prec), "q^{k}");
    }
}

#[test]
fn log_of_four_at_three() {
    // log(1 + 3) = Σ (-1)^(k+1) 3^k / k, truncated well past 3^6
    let mut sum = BigRational::zero();
    for k in 1..=40i64 {
        let term = BigRational::new(BigInt::from(3).pow(k as u32), BigInt::from(k));
        sum = if k % 2 == 1 { sum + term } else { sum - term };
    }
    let want = rational_residue(&sum, 3, 6);
    assert_eq!(want, 534);
    let got = PadicInt::int(3, 4, 12).log().unwrap();
    assert_eq!(got.with_precision(6).residue(), want);
}

#[test]
fn log_is_a_homomorphism_on_small_units() {
    for p in [2u32, 3, 5] {
        let prec = 16;
        let a = PadicInt::int(p, 1 + 2 * p as i128 * p as i128, prec);
        let b = PadicInt::int(p, 1 + 7 * p as i128 * p as i128, prec);
        let lhs = (a * b).log().unwrap();
        let rhs = a.log().unwrap() + b.log().unwrap();
        let k = lhs.precision().min(rhs.precision());
        assert!(lhs.eq_mod(&rhs, k), "p = {p}");
    }
}

#[test]
fn witt_sum_first_component() {
    for p in [2u32, 3, 5] {
        let pres = ThetaPresentation::free(p, &["b"], 2, 16, Some(12)).unwrap();
        let sq = pres.tensor_square().unwrap();
        let (x0, y0) = (sq.gen("b", 0).unwrap(), sq.gen("b'", 0).unwrap());
        let (x1, y1) = (sq.gen("b", 1).unwrap(), sq.gen("b'", 1).unwrap());
        // S_1 = x_1 + y_1 - Σ_{0<i<p} binom(p, i)/p x_0^i y_0^(p-i)
        let mut want = &x1 + &y1;
        let mut binom = 1i128;
        for i in 1..p as u64 {
            binom = binom * (p as i128 - i as i128 + 1) / i as i128;
            want = want - (x0.pow(i) * y0.pow(p as u64 - i)).scale_int(binom / p as i128);
        }
        let got = pres.comultiply(&pres.gen("b", 1).unwrap()).unwrap();
        assert_eq!(got, want, "p = {p}");
    }
}

#[test]
fn theta_of_f_is_stable_under_more_precision() {
    for p in [2u32, 3] {
        let lo = theta_on_series(&f_series(p, TERMS, 20).unwrap()).unwrap();
        let hi = theta_on_series(&f_series(p, TERMS, max_precision(p)).unwrap()).unwrap();
        assert!(lo.precision() >= 12 && hi.precision() > lo.precision());
        assert!(lo.agrees(&hi), "p = {p}");
        assert!(lo.coeff(0).is_zero());
    }
}

#[test]
fn ko4_cokernel_by_brute_force() {
    let n = 6;
    let m = pow_p(2, n);
    // ψ^3 acts on KO_4 by 3^2 = 9; H^1 = coker(9 - 1), H^0 = ker(9 - 1)
    let image: std::collections::BTreeSet<u64> = (0..m).map(|x| (8 * x) % m).collect();
    let kernel = (0..m).filter(|x| (8 * x) % m == 0).count() as u128;
    let coker = (m / image.len() as u64) as u128;
    assert_eq!(coker, 8);
    let (h0, h1) = h0_h1(&ko_preset(2, 4, n).unwrap());
    assert_eq!(h1.order(), Some(coker));
    assert_eq!(h0.order(), Some(kernel));
    // p = 3, t = 4: ψ^2 acts by 2^2 = 4, and 4 - 1 = 3
    let m3 = pow_p(3, n);
    let image3: std::collections::BTreeSet<u64> = (0..m3).map(|x| (3 * x) % m3).collect();
    let (_, h1) = h0_h1(&ko_preset(3, 4, n).unwrap());
    assert_eq!(h1.order(), Some((m3 / image3.len() as u64) as u128));
}
