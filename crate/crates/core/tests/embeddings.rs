use proptest::prelude::*;
use rand::SeedableRng;
use widthlab::embeddings::{hypothesis_check_with, HypothesisOptions};
use widthlab::lp::random_ball_point;
use widthlab::*;

#[test]
fn depth_one_cascade_agrees_with_skeleton_on_many_points() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for (n, p) in [(3, Exponent::TWO), (4, Exponent::Finite(1.5)), (5, Exponent::TWO)] {
        let gens = regular_simplex(n, p).unwrap();
        let skel = EmbeddingSpec::skeleton(gens.clone()).unwrap();
        let casc = EmbeddingSpec::cascade(gens, 1).unwrap();
        for _ in 0..10_000 / 3 {
            let x = LpVector::new(random_ball_point(&mut rng, n, p), p).unwrap();
            let a = skeleton_projection(&x, &skel).unwrap();
            let b = cascade_projection(&x, &casc, 1).unwrap();
            let gap = a.coords().iter().zip(b.coords()).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            assert!(gap < 1e-9, "n={n} p={p}: {gap}");
        }
    }
}

#[test]
fn empirical_constants_are_meaningful_and_ordered() {
    let n = 5;
    let p = Exponent::TWO;
    // Regime 2(n - k) < n + 1 leaves k = 3, 4.
    let c3 = empirical_c(3, n, p, 20_000, 4).unwrap();
    let c4 = empirical_c(4, n, p, 20_000, 4).unwrap();
    assert!(c3 < 2.0 && c4 < 2.0);
    assert!(c3 >= c4 - 2.0 * 0.01, "c3={c3} c4={c4}");
    assert!(matches!(empirical_c(2, n, p, 1000, 0), Err(Error::RegimeViolation { .. })));
}

#[test]
fn documented_collapse_example() {
    let x = LpVector::new(vec![0.5, -0.2, 0.1], Exponent::TWO).unwrap();
    let y = collapse_projection(&x, 1).unwrap();
    let want = [0.4, -0.1, 0.0];
    for (a, b) in y.coords().iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn dimension_three_set_passes_the_hypotheses() {
    let opts = HypothesisOptions { samples_per_size: 20_000, ..HypothesisOptions::default() };
    for q in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let r = hypothesis_check_with(&dim3_set(Exponent::Finite(q)).unwrap(), &opts).unwrap();
        assert!(r.passed, "p={q}: {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_stay_in_the_ball(seed in any::<u64>(), n in 3usize..6, q in 1.2f64..3.0) {
        let p = Exponent::Finite(q);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = LpVector::new(random_ball_point(&mut rng, n, p), p).unwrap();
        let gens = regular_simplex(n, p).unwrap();
        for spec in [
            EmbeddingSpec::collapse(n, p, 1).unwrap(),
            EmbeddingSpec::skeleton(gens.clone()).unwrap(),
            EmbeddingSpec::cascade(gens, 1).unwrap(),
        ] {
            match spec.apply(&x) {
                Ok(y) => prop_assert!(y.norm() <= 1.0 + 1e-9),
                Err(Error::HypothesisViolated(_)) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn collapse_is_idempotent_on_its_image(seed in any::<u64>(), n in 2usize..7, j in 1usize..7) {
        prop_assume!(j <= n);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = LpVector::new(random_ball_point(&mut rng, n, Exponent::TWO), Exponent::TWO).unwrap();
        let y = collapse_projection(&x, j).unwrap();
        let zeros = y.coords().iter().filter(|v| **v == 0.0).count();
        prop_assert!(zeros >= j);
        // Once j coordinates vanish the threshold is zero.
        prop_assert_eq!(collapse_projection(&y, j).unwrap(), y);
    }
}
