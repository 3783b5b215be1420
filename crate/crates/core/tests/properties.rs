use lrtower::coding::{entrance_time, random_code, successor, PointCode};
use lrtower::example_ab::{build_example, small_eigenvector};
use lrtower::markov::{dobrushin, transition_matrix, MeasureSource};
use lrtower::scalar::{frac_distance, Scalar};
use lrtower::spectral::{eigenfunction_g, Decomposition};
use lrtower::substitution::{compose, level_expansion, Substitution};
use lrtower::{LevelSpec, QuadraticReal, TowerSystem};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random system satisfying every word axiom: each word uses every letter
/// of the previous alphabet and ends in 1.
fn random_system(seed: u64, depth: usize) -> TowerSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prev = 1;
    let mut levels = Vec::with_capacity(depth);
    for _ in 0..depth {
        let size = rng.random_range(1..=3);
        let words = (0..size)
            .map(|_| {
                let mut letters: Vec<usize> = (2..=prev).collect();
                for _ in 0..rng.random_range(0..=3) {
                    letters.push(rng.random_range(1..=prev));
                }
                letters.shuffle(&mut rng);
                letters.push(1);
                letters
            })
            .collect();
        levels.push(LevelSpec::new(words));
        prev = size;
    }
    TowerSystem::from_levels(levels).expect("valid by construction")
}

fn quadratic() -> impl Strategy<Value = QuadraticReal> {
    (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| QuadraticReal::from_parts(a, b, c, d, 5))
}

fn golden_minus_one() -> Scalar {
    Scalar::from("-1/2+1/2*sqrt(5)".parse::<QuadraticReal>().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_field_laws(x in quadratic(), y in quadratic(), z in quadratic()) {
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.inverse().unwrap(), QuadraticReal::one(5));
        }
        prop_assert_eq!(x.cmp(&y), (&x - &y).sign().cmp(&0));
    }

    #[test]
    fn frac_distance_is_periodic_and_bounded(x in quadratic(), k in -1000i64..1000) {
        let d = x.frac_distance();
        prop_assert!(d.sign() >= 0);
        prop_assert!(d <= QuadraticReal::from_parts(1, 2, 0, 1, 5));
        prop_assert_eq!(x.add_int(&BigInt::from(k)).frac_distance(), d.clone());
        let s = frac_distance(&Scalar::from(x.clone())).unwrap();
        prop_assert_eq!(s, Scalar::from(d));
    }

    #[test]
    fn enclosures_contain_the_value(x in quadratic(), bits in 8u32..200) {
        let enc = x.to_adaptive(bits);
        let lo = QuadraticReal::new(enc.lower(), BigRational::zero(), 5).unwrap();
        let hi = QuadraticReal::new(enc.upper(), BigRational::zero(), 5).unwrap();
        prop_assert!(lo <= x && x <= hi);
        prop_assert!(enc.accuracy_bits() + 2 >= bits);
    }

    #[test]
    fn heights_factor_through_products(seed in any::<u64>(), depth in 2usize..7) {
        let sys = random_system(seed, depth);
        for n in 2..=depth {
            let h = sys.heights(n).unwrap();
            for m in 1..n {
                prop_assert_eq!(sys.product(n, m).unwrap().mul_vec(&sys.heights(m).unwrap()), h.to_vec());
            }
            let w = level_expansion(&sys, n);
            if sys.words(1).iter().all(|w| w.len() == 1) {
                let w = w.unwrap();
                for t in 1..=sys.alphabet_size(n) {
                    prop_assert_eq!(BigInt::from(w.image(t).len()), h[t - 1].clone());
                }
            }
        }
    }

    #[test]
    fn entrance_times_step_down(seed in any::<u64>(), depth in 2usize..7, code_seed in any::<u64>()) {
        let sys = random_system(seed, depth);
        let mut rng = ChaCha8Rng::seed_from_u64(code_seed);
        let code = random_code(&sys, depth, &mut rng).unwrap();
        let Ok(next) = successor(&sys, &code) else { return Ok(()) };
        for n in 1..=depth {
            let r = entrance_time(&sys, &code, n).unwrap();
            let h = sys.heights(n).unwrap();
            prop_assert!(r < h[code.tower(n) - 1]);
            let r_next = entrance_time(&sys, &next, n).unwrap();
            if r.is_zero() {
                prop_assert_eq!(r_next, &h[next.tower(n) - 1] - BigInt::one());
            } else {
                prop_assert_eq!(r_next, r - BigInt::one());
            }
        }
    }

    #[test]
    fn telescoping_keeps_odd_heights(seed in any::<u64>(), depth in 3usize..9) {
        let sys = random_system(seed, depth);
        let tel = sys.telescope().unwrap();
        prop_assert_eq!(tel.depth(), depth.div_ceil(2));
        for n in 1..=tel.depth() {
            prop_assert_eq!(tel.heights(n).unwrap(), sys.heights(2 * n - 1).unwrap());
        }
        for n in 2..=tel.depth() {
            prop_assert_eq!(tel.matrix(n), &sys.matrix(2 * n - 1).mul(sys.matrix(2 * n - 2)));
        }
    }

    #[test]
    fn composition_multiplies_incidence(seed in any::<u64>(), depth in 3usize..7) {
        let sys = random_system(seed, depth);
        for n in 3..=depth {
            let outer = Substitution::from_level(&sys, n - 1);
            let inner = Substitution::from_level(&sys, n);
            let both = compose(&outer, &inner).unwrap();
            prop_assert_eq!(both.incidence(), inner.incidence().mul(&outer.incidence()));
        }
    }

    #[test]
    fn code_json_round_trip(seed in any::<u64>(), depth in 1usize..7) {
        let sys = random_system(seed, depth);
        let code = random_code(&sys, depth, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(PointCode::from_json(&code.to_json()).unwrap(), code);
    }

    #[test]
    fn golden_cocycle(seed in any::<u64>()) {
        let sys = build_example(10).unwrap();
        let dec = Decomposition {
            m: 1,
            w: vec![BigInt::one(), BigInt::zero()],
            v: small_eigenvector().into_iter().map(Scalar::from).collect(),
            decay: vec![],
        };
        let alpha = golden_minus_one();
        let code = random_code(&sys, 10, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let Ok(next) = successor(&sys, &code) else { return Ok(()) };
        for n in 2..=10 {
            let g = eigenfunction_g(&sys, &dec, &code, n).unwrap();
            let r = entrance_time(&sys, &code, n).unwrap();
            prop_assert!(g.checked_sub(&alpha.mul_int(&r)).unwrap().as_integer().is_some());
            if !r.is_zero() {
                let step = eigenfunction_g(&sys, &dec, &next, n).unwrap().checked_sub(&g).unwrap();
                prop_assert!(step.checked_add(&alpha).unwrap().as_integer().is_some());
            }
        }
    }

    #[test]
    fn transition_rows_are_stochastic(n in 1usize..40) {
        let sys = build_example(40).unwrap();
        let q = transition_matrix(&sys, &MeasureSource::Exact, n).unwrap();
        for row in &q.q {
            let sum = row.iter().try_fold(Scalar::zero(), |a, x| a.checked_add(x)).unwrap();
            prop_assert_eq!(sum, Scalar::integer(1));
            prop_assert!(row.iter().all(|x| x.sign().unwrap() >= 0));
        }
        let d = dobrushin(&q).unwrap().to_f64();
        prop_assert!((0.0..=1.0).contains(&d));
    }
}
