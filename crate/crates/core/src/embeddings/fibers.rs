use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;

use super::collapse::{bisect_max, sample_collapse_fiber};
use super::projection::ratios;
use super::{cascade_projection, regular_simplex, EmbeddingSpec, MapKind, BALL_TOL};
use crate::bounds::{source, BoundKind, BoundRecord};
use crate::error::{Error, Result};
use crate::lp::{diameter_pair, norm, random_ball_point, Exponent, LpVector, PointConfiguration};
use crate::rng::{chunks, stream_rng};

/// Ratios at or below this mark a vanishing conic coordinate of a target.
const TARGET_ZERO_TOL: f64 = 1e-9;

/// Image points (besides the origin) whose fibers feed [`empirical_c`].
pub const EMPIRICAL_TARGETS: usize = 16;

/// Sample `count` points of the fiber over `target`; the target itself comes
/// first. For the generator maps the fiber over `y` is the union, over
/// `j`-subsets `J` of the zero set of `y`, of `y − Σ_{k ∈ J} a_k μ_k p_k`
/// with `a ≥ 0`, cut to the unit ball. Deterministic in `seed`.
pub fn sample_fiber(
    target: &LpVector,
    spec: &EmbeddingSpec,
    j: usize,
    count: usize,
    seed: u64,
) -> Result<PointConfiguration> {
    match spec.kind() {
        MapKind::Collapse(jj) if jj == j => return sample_collapse_fiber(target, j, count, seed),
        MapKind::Skeleton if j == 1 => {}
        MapKind::Cascade(jj) if jj == j => {}
        kind => {
            return Err(Error::InvalidArgument(format!(
                "depth {j} does not match the map {kind:?}"
            )))
        }
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".into()));
    }
    let n = spec.dim();
    if target.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.dim(),
        });
    }
    let p = spec.exponent();
    let y = target.coords();
    let r = norm(y, p);
    if r > 1.0 + BALL_TOL {
        return Err(Error::EmptyFiber(format!("target has norm {r} > 1")));
    }
    let frame = spec.frame()?;
    let mu = spec.certificate();
    let rho = ratios(frame, mu, y);
    let scale = 1.0 + rho.iter().fold(0.0f64, |a, &b| a.max(b));
    let zeros: Vec<usize> = (0..=n).filter(|&k| rho[k] <= TARGET_ZERO_TOL * scale).collect();
    if zeros.len() < j + 1 {
        return Err(Error::EmptyFiber(format!(
            "target has {} vanishing conic coordinates, the map leaves at least {}",
            zeros.len(),
            j + 1
        )));
    }

    let draw = |rng: &mut crate::rng::StreamRng| {
        let picked: Vec<usize> = sample_indices(rng, zeros.len(), j)
            .into_iter()
            .map(|i| zeros[i])
            .collect();
        let one_hot = rng.gen_bool(0.25).then(|| rng.gen_range(0..j));
        let mut dir = vec![0.0; n];
        for (slot, &k) in picked.iter().enumerate() {
            let a = match one_hot {
                Some(h) if h == slot => 1.0,
                Some(_) => 0.0,
                None => rng.gen::<f64>(),
            };
            for (d, g) in dir.iter_mut().zip(frame.point(k)) {
                *d += a * mu[k] * g;
            }
        }
        let step = |t: f64| y.iter().zip(&dir).map(|(a, b)| a - t * b).collect::<Vec<f64>>();
        let mut hi = 1.0;
        while norm(&step(hi), p) <= 1.0 && hi < 1e6 {
            hi *= 2.0;
        }
        let t_max = bisect_max(|t| norm(&step(t), p) <= 1.0, hi);
        let t = if rng.gen_bool(0.5) {
            t_max
        } else {
            t_max * rng.gen::<f64>()
        };
        step(t)
    };

    let mut points = vec![y.to_vec()];
    let rest: Vec<Vec<f64>> = chunks(count - 1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .flat_map_iter(|(stream, len)| {
            let mut rng = stream_rng(seed, stream);
            (0..len).map(|_| draw(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    points.extend(rest);
    PointConfiguration::new(points, p)
}

/// Monte Carlo lower estimate of the largest fiber diameter of the depth
/// `n − k` cascade built on the regular simplex: the origin plus
/// [`EMPIRICAL_TARGETS`] random image points, `samples` fiber points in total.
pub fn empirical_c(k: usize, n: usize, p: Exponent, samples: usize, seed: u64) -> Result<f64> {
    if k >= n {
        return Err(Error::RegimeViolation { n, j: 0 });
    }
    let j = n - k;
    if 2 * j > n {
        return Err(Error::RegimeViolation { n, j });
    }
    let spec = EmbeddingSpec::cascade(regular_simplex(n, p)?, j)?;

    let mut rng = stream_rng(seed, u64::MAX);
    let mut targets = vec![LpVector::zeros(n, p)?];
    for _ in 0..EMPIRICAL_TARGETS {
        let x = LpVector::new(random_ball_point(&mut rng, n, p), p)?;
        targets.push(cascade_projection(&x, &spec, j)?);
    }
    let per_target = (samples / targets.len()).max(2);
    let mut best = 0.0f64;
    for (t, y) in targets.iter().enumerate() {
        let fiber = sample_fiber(y, &spec, j, per_target, seed.wrapping_add(t as u64))?;
        best = best.max(diameter_pair(fiber.points(), p)?.2);
    }
    Ok(best)
}

/// [`empirical_c`] as a non-certified upper record, kept apart from the
/// certified interval.
pub fn empirical_upper_record(
    k: usize,
    n: usize,
    p: Exponent,
    samples: usize,
    seed: u64,
) -> Result<BoundRecord> {
    let c = empirical_c(k, n, p, samples, seed)?;
    Ok(BoundRecord {
        kind: BoundKind::Upper,
        value: k,
        condition: format!("eps >= {c:.6} (sampled, lower estimate of the constant)"),
        source: source::EMPIRICAL.into(),
        threshold: Some(c),
        certified: false,
    })
}
