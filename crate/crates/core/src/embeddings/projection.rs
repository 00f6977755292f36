use super::conic::ConicFrame;
use super::{EmbeddingSpec, MapKind, BALL_TOL};
use crate::error::{Error, Result};
use crate::lp::{norm, LpVector};

/// Ratios `λ_k / μ_k` at or below this count as vanishing coefficients.
const ZERO_TOL: f64 = 1e-11;

/// Push `x` along the generator of its cone until a second conic coordinate
/// vanishes. The image lies in the cone over the codimension-two skeleton.
pub fn skeleton_projection(x: &LpVector, spec: &EmbeddingSpec) -> Result<LpVector> {
    if matches!(spec.kind(), MapKind::Collapse(_)) {
        return Err(Error::InvalidArgument("skeleton projection needs generators".into()));
    }
    spec.check_input(x)?;
    let frame = spec.frame()?;
    let mu = spec.certificate();

    let (i, coords) = frame.region(x.coords());
    let step = mu[i]
        * (0..mu.len())
            .filter(|&k| k != i)
            .map(|k| coords.lambda[k] / mu[k])
            .fold(f64::INFINITY, f64::min);
    let mut y = x.coords().to_vec();
    axpy(&mut y, step, frame.point(i));
    finish(y, spec)
}

/// Depth-`j` cascade: repeat the push along `Σ_{l ∈ A} μ_l p_l`, where `A`
/// is the current zero set, until `j + 1` coordinates vanish. Each stage is
/// the identity on points that already have more zeros than it creates.
pub fn cascade_projection(x: &LpVector, spec: &EmbeddingSpec, j: usize) -> Result<LpVector> {
    let n = spec.dim();
    if j == 0 || 2 * j > n {
        return Err(Error::RegimeViolation { n, j });
    }
    if matches!(spec.kind(), MapKind::Collapse(_)) {
        return Err(Error::InvalidArgument("cascade projection needs generators".into()));
    }
    spec.check_input(x)?;
    let frame = spec.frame()?;
    let mu = spec.certificate();

    let mut y = x.coords().to_vec();
    for _ in 0..=n {
        let ratios = ratios(frame, mu, &y);
        let scale = 1.0 + ratios.iter().fold(0.0f64, |a, &b| a.max(b));
        let zero: Vec<usize> = (0..=n).filter(|&k| ratios[k] <= ZERO_TOL * scale).collect();
        if zero.len() > j {
            break;
        }
        let step = (0..=n)
            .filter(|k| !zero.contains(k))
            .map(|k| ratios[k])
            .fold(f64::INFINITY, f64::min);
        for &l in &zero {
            axpy(&mut y, step * mu[l], frame.point(l));
        }
        check_norm(&y, spec)?;
    }
    finish(y, spec)
}

/// `λ_k / μ_k` in the cone containing `y`.
pub(super) fn ratios(frame: &ConicFrame, mu: &[f64], y: &[f64]) -> Vec<f64> {
    let (_, coords) = frame.region(y);
    coords.lambda.iter().zip(mu).map(|(l, m)| l / m).collect()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn check_norm(y: &[f64], spec: &EmbeddingSpec) -> Result<()> {
    let r = norm(y, spec.exponent());
    if r > 1.0 + BALL_TOL {
        return Err(Error::HypothesisViolated(format!(
            "projection left the unit ball (norm {r})"
        )));
    }
    Ok(())
}

fn finish(y: Vec<f64>, spec: &EmbeddingSpec) -> Result<LpVector> {
    check_norm(&y, spec)?;
    LpVector::new(y, spec.exponent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{dim3_set, regular_simplex};
    use crate::hadamard::{hadamard, hadamard_set};
    use crate::lp::{random_ball_point, Exponent, PointConfiguration};
    use crate::rng::stream_rng;
    use proptest::prelude::*;

    /// Closed form: with ratios `r = λ/μ` from any representation, the cascade
    /// of depth `j` keeps `μ_k (r_k − r_(j+1))⁺`, where `r_(j+1)` is the
    /// (j+1)-th smallest ratio.
    fn oracle(x: &[f64], gens: &PointConfiguration, mu: &[f64], j: usize) -> Vec<f64> {
        let n = gens.dim();
        let mat = nalgebra::DMatrix::from_fn(n, n, |r, c| gens.point(c + 1)[r]);
        let c = mat.lu().solve(&nalgebra::DVector::from_column_slice(x)).unwrap();
        let r: Vec<f64> = std::iter::once(0.0)
            .chain(c.iter().copied())
            .zip(mu)
            .map(|(l, m)| l / m)
            .collect();
        let mut sorted = r.clone();
        sorted.sort_by(f64::total_cmp);
        let thr = sorted[j];
        let mut out = vec![0.0; n];
        for k in 0..=n {
            let w = mu[k] * (r[k] - thr).max(0.0);
            for (o, g) in out.iter_mut().zip(gens.point(k)) {
                *o += w * g;
            }
        }
        out
    }

    fn skeleton_spec(gens: PointConfiguration) -> EmbeddingSpec {
        EmbeddingSpec::skeleton(gens).unwrap()
    }

    fn lp(v: Vec<f64>, p: Exponent) -> LpVector {
        LpVector::new(v, p).unwrap()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn apex_is_fixed() {
        let s = skeleton_spec(regular_simplex(3, Exponent::TWO).unwrap());
        let y = skeleton_projection(&lp(vec![0.0; 3], Exponent::TWO), &s).unwrap();
        assert!(y.coords().iter().all(|v| v.abs() < 1e-15));
        let gens = regular_simplex(5, Exponent::TWO).unwrap();
        let c = EmbeddingSpec::cascade(gens, 2).unwrap();
        let y = cascade_projection(&lp(vec![0.0; 5], Exponent::TWO), &c, 2).unwrap();
        assert!(y.coords().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn identity_on_two_dimensional_faces() {
        let gens = regular_simplex(3, Exponent::TWO).unwrap();
        let s = skeleton_spec(gens.clone());
        let x: Vec<f64> = gens.point(1).iter().zip(gens.point(3)).map(|(a, b)| 0.4 * a + 0.3 * b).collect();
        let y = skeleton_projection(&lp(x.clone(), Exponent::TWO), &s).unwrap();
        assert!(max_diff(&x, y.coords()) < 1e-14);
    }

    #[test]
    fn opposite_generator_collapses_to_apex() {
        let gens = regular_simplex(3, Exponent::TWO).unwrap();
        let s = skeleton_spec(gens.clone());
        for t in [0.05, 0.3, 1.0] {
            let x: Vec<f64> = gens.point(0).iter().map(|v| -t * v).collect();
            let y = skeleton_projection(&lp(x, Exponent::TWO), &s).unwrap();
            assert!(y.coords().iter().all(|v| v.abs() < 1e-12), "t={t}: {:?}", y.coords());
        }
    }

    #[test]
    fn outside_ball_and_regime_errors() {
        let gens = regular_simplex(3, Exponent::TWO).unwrap();
        let s = skeleton_spec(gens.clone());
        assert!(matches!(
            skeleton_projection(&lp(vec![1.0, 1.0, 0.0], Exponent::TWO), &s),
            Err(Error::OutsideBall { .. })
        ));
        assert!(matches!(
            EmbeddingSpec::cascade(gens.clone(), 2),
            Err(Error::RegimeViolation { n: 3, j: 2 })
        ));
        assert!(matches!(
            cascade_projection(&lp(vec![0.0; 3], Exponent::TWO), &s, 2),
            Err(Error::RegimeViolation { .. })
        ));
    }

    #[test]
    fn cascade_depth_one_matches_skeleton() {
        let gens = regular_simplex(3, Exponent::TWO).unwrap();
        let s = skeleton_spec(gens.clone());
        let c = EmbeddingSpec::cascade(gens, 1).unwrap();
        let mut rng = stream_rng(11, 0);
        for _ in 0..10_000 {
            let x = lp(random_ball_point(&mut rng, 3, Exponent::TWO), Exponent::TWO);
            let a = skeleton_projection(&x, &s).unwrap();
            let b = cascade_projection(&x, &c, 1).unwrap();
            assert!(max_diff(a.coords(), b.coords()) < 1e-9);
        }
    }

    #[test]
    fn cascade_support_in_dimension_five() {
        let gens = regular_simplex(5, Exponent::TWO).unwrap();
        let c = EmbeddingSpec::cascade(gens, 2).unwrap();
        let mut rng = stream_rng(5, 0);
        for _ in 0..10_000 {
            let x = lp(random_ball_point(&mut rng, 5, Exponent::TWO), Exponent::TWO);
            let y = cascade_projection(&x, &c, 2).unwrap();
            let frame = c.frame().unwrap();
            let (_, coords) = frame.region(y.coords());
            assert!(coords.support(1e-9).len() <= 3);
        }
    }

    #[test]
    fn stagewise_matches_closed_form() {
        let cases: Vec<(PointConfiguration, usize)> = vec![
            (regular_simplex(3, Exponent::TWO).unwrap(), 1),
            (regular_simplex(5, Exponent::Finite(1.5)).unwrap(), 2),
            (regular_simplex(6, Exponent::TWO).unwrap(), 3),
            (regular_simplex(7, Exponent::TWO).unwrap(), 3),
            (dim3_set(Exponent::Finite(1.5)).unwrap(), 1),
            (hadamard_set(&hadamard(4).unwrap(), Exponent::ONE).unwrap(), 1),
        ];
        for (gens, j) in cases {
            let n = gens.dim();
            let p = gens.exponent();
            let spec = EmbeddingSpec::cascade(gens.clone(), j).unwrap();
            let mu = spec.certificate().to_vec();
            let mut rng = stream_rng(3, n as u64);
            for _ in 0..2_000 {
                let x = random_ball_point(&mut rng, n, p);
                let got = cascade_projection(&lp(x.clone(), p), &spec, j).unwrap();
                let want = oracle(&x, &gens, &mu, j);
                assert!(max_diff(got.coords(), &want) < 1e-9, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn skeleton_image_has_codimension_one_support() {
        for gens in [
            regular_simplex(4, Exponent::TWO).unwrap(),
            dim3_set(Exponent::ONE).unwrap(),
            regular_simplex(5, Exponent::Finite(1.5)).unwrap(),
        ] {
            let n = gens.dim();
            let p = gens.exponent();
            let s = skeleton_spec(gens);
            let mut rng = stream_rng(9, 0);
            for _ in 0..2_000 {
                let x = lp(random_ball_point(&mut rng, n, p), p);
                let y = skeleton_projection(&x, &s).unwrap();
                let (_, coords) = s.frame().unwrap().region(y.coords());
                assert!(coords.support(1e-9).len() < n);
            }
        }
    }

    #[test]
    fn l1_hadamard_skeleton_can_leave_the_ball() {
        // Order 8: pushing along a generator may increase the l^1 norm.
        let gens = hadamard_set(&hadamard(8).unwrap(), Exponent::ONE).unwrap();
        let s = skeleton_spec(gens);
        let mut rng = stream_rng(0, 0);
        let escaped = (0..5_000)
            .map(|_| lp(random_ball_point(&mut rng, 7, Exponent::ONE), Exponent::ONE))
            .filter(|x| matches!(skeleton_projection(x, &s), Err(Error::HypothesisViolated(_))))
            .count();
        assert!(escaped > 0);
    }

    proptest! {
        #[test]
        fn skeleton_is_idempotent(seed in any::<u64>()) {
            let gens = regular_simplex(4, Exponent::TWO).unwrap();
            let s = skeleton_spec(gens);
            let mut rng = stream_rng(seed, 0);
            let x = lp(random_ball_point(&mut rng, 4, Exponent::TWO), Exponent::TWO);
            let y = skeleton_projection(&x, &s).unwrap();
            let z = skeleton_projection(&y, &s).unwrap();
            prop_assert!(max_diff(y.coords(), z.coords()) < 1e-9);
            prop_assert!(y.norm() <= 1.0 + 1e-9);
        }
    }
}
