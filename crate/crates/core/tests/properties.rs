use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thetakit::cohomology::{h0_h1, CyclicAction, ModMatrix};
use thetakit::lambda::{cartan_product, lambdas};
use thetakit::mahler::MahlerFn1;
use thetakit::padic::pow_p;
use thetakit::poly::{random_poly, Assignment, Generator, PolyRing, Registry};
use thetakit::qseries::{frobenius, log_one_unit, QSeries};
use thetakit::theta::{ThetaElement, ThetaPresentation};
use thetakit::PadicInt;

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5)]
}

fn padic(p: u32, prec: u32) -> impl Strategy<Value = PadicInt> {
    (0..pow_p(p, prec)).prop_map(move |r| PadicInt::int(p, r as i128, prec))
}

fn padic_triple() -> impl Strategy<Value = (PadicInt, PadicInt, PadicInt)> {
    prime().prop_flat_map(|p| (padic(p, 20), padic(p, 20), padic(p, 20)))
}

proptest! {
    #[test]
    fn padic_ring_axioms((a, b, c) in padic_triple()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, PadicInt::zero(a.prime(), 20));
        if a.is_unit() {
            prop_assert!((a * a.unit_inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn binomial_pascal_rule((x, _, _) in padic_triple(), n in 1u64..12) {
        let one = PadicInt::one(x.prime(), x.precision());
        let lhs = (x + one).binomial(n).unwrap();
        let rhs = x.binomial(n).unwrap() + x.binomial(n - 1).unwrap();
        let k = lhs.precision().min(rhs.precision());
        prop_assert!(lhs.eq_mod(&rhs, k));
    }

    #[test]
    fn log_turns_products_into_sums(p in prime(), s in 0u64..10_000, t in 0u64..10_000) {
        let q = if p == 2 { 4 } else { p as i128 };
        let a = PadicInt::int(p, 1 + q * s as i128, 18);
        let b = PadicInt::int(p, 1 + q * t as i128, 18);
        let lhs = (a * b).log().unwrap();
        let rhs = a.log().unwrap() + b.log().unwrap();
        prop_assert!(lhs.eq_mod(&rhs, lhs.precision().min(rhs.precision())));
    }

    #[test]
    fn lambda_is_binomial((x, y, _) in padic_triple()) {
        let (lx, ly, lxy) = (lambdas(&x, 6).unwrap(), lambdas(&y, 6).unwrap(), lambdas(&(x + y), 6).unwrap());
        for n in 0..=6usize {
            let b = x.binomial(n as u64).unwrap();
            prop_assert!(lx[n].eq_mod(&b, lx[n].precision().min(b.precision())));
            let c = cartan_product(&lx, &ly, n).unwrap();
            prop_assert!(c.eq_mod(&lxy[n], c.precision().min(lxy[n].precision())));
        }
    }
}

fn poly_ring(p: u32) -> PolyRing {
    PolyRing::new(Registry::levels(&["x", "y"], 1), p, 16, None).unwrap()
}

fn gens(ring: &PolyRing) -> Vec<Generator> {
    ring.registry().generators().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_axioms(p in prime(), seed: u64) {
        let ring = poly_ring(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gens(&ring);
        let (a, b, c) = (random_poly(&ring, &g, 4, 3, &mut rng), random_poly(&ring, &g, 4, 3, &mut rng), random_poly(&ring, &g, 4, 3, &mut rng));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn substitution_and_evaluation_are_ring_maps(p in prime(), seed: u64) {
        let ring = poly_ring(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gens(&ring);
        let (a, b) = (random_poly(&ring, &g, 4, 3, &mut rng), random_poly(&ring, &g, 4, 3, &mut rng));
        let mut asg = Assignment::new(ring.registry(), &ring);
        for gen in &g {
            asg.set(gen, random_poly(&ring, &g, 2, 2, &mut rng)).unwrap();
        }
        let sub = |f: &thetakit::poly::SparsePoly| f.substitute(&asg).unwrap();
        prop_assert_eq!(sub(&(&a * &b)), &sub(&a) * &sub(&b));
        prop_assert_eq!(sub(&(&a + &b)), &sub(&a) + &sub(&b));
        let vals: Vec<PadicInt> = g.iter().enumerate().map(|(i, _)| PadicInt::int(p, 7 * i as i128 + seed as i128 % 101, 16)).collect();
        let ev = |f: &thetakit::poly::SparsePoly| f.evaluate(&vals).unwrap();
        prop_assert_eq!(ev(&(&a * &b)), ev(&a) * ev(&b));
    }
}

fn free_b(p: u32) -> Arc<ThetaPresentation> {
    ThetaPresentation::free(p, &["b"], 3, 20, Some(16)).unwrap()
}

fn element(pres: &Arc<ThetaPresentation>, rng: &mut ChaCha8Rng) -> ThetaElement {
    let g = [Generator::new("b", 0), Generator::new("b", 1)];
    pres.element(random_poly(pres.ring(), &g, 2, 2, rng)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theta_structure(p in prime(), seed: u64) {
        let pres = free_b(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (element(&pres, &mut rng), element(&pres, &mut rng));
        // ψ^p is a ring map lifting Frobenius
        prop_assert_eq!((&a * &b).psi_p().unwrap(), a.psi_p().unwrap() * b.psi_p().unwrap());
        prop_assert_eq!((&a + &b).psi_p().unwrap(), a.psi_p().unwrap() + b.psi_p().unwrap());
        let lift = a.psi_p().unwrap() - a.pow(p as u64) - a.theta().unwrap().scale_int(p as i128);
        prop_assert!(lift.is_zero());
        // Δ is a ring map with counit ε
        let (da, db) = (pres.comultiply(&a).unwrap(), pres.comultiply(&b).unwrap());
        prop_assert_eq!(pres.comultiply(&(&a * &b)).unwrap(), &da * &db);
        prop_assert_eq!(pres.counit(&(&a * &b)), pres.counit(&a) * pres.counit(&b));
    }
}

proptest! {
    #[test]
    fn mahler_round_trip_and_products(p in prime(), c in prop::collection::vec(0i128..1 << 20, 1..6), d in prop::collection::vec(0i128..1 << 20, 1..6), x in -500i128..500) {
        let f = MahlerFn1::from_coeffs(p, 8, &c).unwrap();
        let g = MahlerFn1::from_coeffs(p, 8, &d).unwrap();
        let samples: Vec<PadicInt> = (0..f.len() as i128 + 2).map(|t| f.evaluate_int(t)).collect();
        prop_assert_eq!(MahlerFn1::from_samples(&samples, 8).unwrap(), f.clone());
        prop_assert_eq!(f.multiply(&g).unwrap().evaluate_int(x), f.evaluate_int(x) * g.evaluate_int(x));
        prop_assert_eq!(f.add(&g).unwrap().evaluate_int(x), f.evaluate_int(x) + g.evaluate_int(x));
        prop_assert_eq!(f.translate_int(3).evaluate_int(x), f.evaluate_int(x + 3));
        prop_assert_eq!(f.antipode().antipode(), f.clone());
        prop_assert_eq!(f.coproduct().evaluate_int(x, 7), f.evaluate_int(x + 7));
    }
}

fn one_unit(p: u32, c: &[i128]) -> QSeries {
    let q = if p == 2 { 4 } else { p as i128 };
    let mut v = vec![1i128];
    v.extend(c.iter().map(|x| q * x));
    QSeries::from_ints(p, &v, 16).unwrap()
}

proptest! {
    #[test]
    fn series_log_and_frobenius(p in prime(), c in prop::collection::vec(-1000i128..1000, 12), d in prop::collection::vec(-1000i128..1000, 12)) {
        let (f, g) = (one_unit(p, &c), one_unit(p, &d));
        let lhs = log_one_unit(&(&f * &g)).unwrap();
        let rhs = &log_one_unit(&f).unwrap() + &log_one_unit(&g).unwrap();
        prop_assert!(lhs.agrees(&rhs));
        prop_assert_eq!(frobenius(&(&f + &g)), &frobenius(&f) + &frobenius(&g));
        prop_assert_eq!(frobenius(&(&f * &g)), &frobenius(&f) * &frobenius(&g));
        prop_assert!((&f * &f.inverse().unwrap()).agrees(&QSeries::one(p, f.terms(), 16)));
    }
}

/// A random product of elementary matrices and its inverse.
fn elementary(p: u32, e: u32, n: usize, moves: &[(usize, usize, i128)]) -> (ModMatrix, ModMatrix) {
    let (mut m, mut inv) = (ModMatrix::identity(p, e, n), ModMatrix::identity(p, e, n));
    for &(i, j, c) in moves {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut fwd = vec![0i128; n * n];
        let mut back = vec![0i128; n * n];
        for k in 0..n {
            fwd[k * n + k] = 1;
            back[k * n + k] = 1;
        }
        fwd[i * n + j] = c;
        back[i * n + j] = -c;
        m = m.mul(&ModMatrix::new(p, e, n, n, &fwd).unwrap()).unwrap();
        inv = ModMatrix::new(p, e, n, n, &back).unwrap().mul(&inv).unwrap();
    }
    (m, inv)
}

proptest! {
    #[test]
    fn cohomology_is_conjugation_invariant(
        p in prime(),
        n in 1usize..4,
        entries in prop::collection::vec(-50i128..50, 9),
        moves in prop::collection::vec((0usize..3, 0usize..3, -9i128..9), 0..6),
    ) {
        // identity plus p times anything is invertible
        let mut a = vec![0i128; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = entries[i * 3 + j] * p as i128 + i128::from(i == j);
            }
        }
        let act = CyclicAction::new(ModMatrix::new(p, 6, n, n, &a).unwrap()).unwrap();
        let (q, q_inv) = elementary(p, 6, n, &moves);
        prop_assert!(q.mul(&q_inv).unwrap() == ModMatrix::identity(p, 6, n));
        let moved = act.conjugate(&q, &q_inv).unwrap();
        prop_assert_eq!(h0_h1(&act), h0_h1(&moved));
        let (h0, h1) = h0_h1(&act);
        prop_assert_eq!(h0.order_log(), h1.order_log());
    }
}
