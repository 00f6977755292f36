use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{norm, Exponent, LpVector, PointConfiguration};
use crate::rng::{chunks, stream_rng, StreamRng};

/// Coordinates at most this large count as zero in a collapse target.
const ZERO_TOL: f64 = 1e-12;

/// Soft-threshold at the j-th smallest coordinate magnitude `m`: coordinates
/// with `|x_i| ≤ m` vanish and the rest move toward zero by `m`.
pub fn collapse_projection(x: &LpVector, j: usize) -> Result<LpVector> {
    let n = x.dim();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    let mut mags: Vec<f64> = x.coords().iter().map(|v| v.abs()).collect();
    let (_, &mut m, _) = mags.select_nth_unstable_by(j - 1, f64::total_cmp);
    let out = x
        .coords()
        .iter()
        .map(|&v| if v.abs() <= m { 0.0 } else { v - m.copysign(v) })
        .collect();
    LpVector::new(out, x.exponent())
}

/// Sup-metric diameter of the largest collapse fiber, with the pair `±s_0`
/// attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseFiber {
    pub diameter: f64,
    pub extremal: [Vec<f64>; 2],
}

/// `2 (n − j + 1)^{-1/p}`, attained at the fiber over the origin by
/// `±(c, …, c, 0, …, 0)` with `n − j + 1` entries `c = (n − j + 1)^{-1/p}`.
pub fn collapse_fiber_diameter(n: usize, p: Exponent, j: usize) -> Result<CollapseFiber> {
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    let free = n - j + 1;
    let c = (free as f64).powf(-p.recip());
    let s0: Vec<f64> = (0..n).map(|i| if i < free { c } else { 0.0 }).collect();
    let neg = s0.iter().map(|v| -v).collect();
    Ok(CollapseFiber {
        diameter: 2.0 * c,
        extremal: [s0, neg],
    })
}

/// Sample `count` preimages of `target` under the depth-`j` collapse. The
/// target itself comes first. Deterministic in `seed`.
pub fn sample_collapse_fiber(
    target: &LpVector,
    j: usize,
    count: usize,
    seed: u64,
) -> Result<PointConfiguration> {
    let n = target.dim();
    let p = target.exponent();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".into()));
    }
    let y = target.coords();
    let r = norm(y, p);
    if r > 1.0 + 1e-9 {
        return Err(Error::EmptyFiber(format!("target has norm {r} > 1")));
    }
    let zeros: Vec<usize> = (0..n).filter(|&i| y[i].abs() <= ZERO_TOL).collect();
    if zeros.len() < j {
        return Err(Error::EmptyFiber(format!(
            "target has {} zero coordinates, the collapse leaves at least {j}",
            zeros.len()
        )));
    }
    let pinned = zeros.len() - j + 1;

    // Largest threshold m with the smallest preimage of that m in the ball.
    let base = |m: f64| {
        let mut v: Vec<f64> = y.iter().map(|&c| if c.abs() <= ZERO_TOL { 0.0 } else { c + m.copysign(c) }).collect();
        for &i in zeros.iter().take(pinned) {
            v[i] = m;
        }
        norm(&v, p)
    };
    let m_max = bisect_max(|m| base(m) <= 1.0, 1.0);

    let sampler = CollapseSampler {
        y,
        p,
        zeros: &zeros,
        pinned,
        m_max,
    };
    let mut points = vec![y.iter().map(|&c| if c.abs() <= ZERO_TOL { 0.0 } else { c }).collect::<Vec<f64>>()];
    let rest: Vec<Vec<f64>> = chunks(count - 1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .flat_map_iter(|(stream, len)| {
            let mut rng = stream_rng(seed, stream);
            (0..len).map(|_| sampler.draw(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    points.extend(rest);
    PointConfiguration::new(points, p)
}

struct CollapseSampler<'a> {
    y: &'a [f64],
    p: Exponent,
    zeros: &'a [usize],
    pinned: usize,
    m_max: f64,
}

impl CollapseSampler<'_> {
    fn draw(&self, rng: &mut StreamRng) -> Vec<f64> {
        let m = if rng.gen_bool(0.5) {
            self.m_max
        } else {
            self.m_max * rng.gen::<f64>()
        };
        let mut x: Vec<f64> = self
            .y
            .iter()
            .map(|&c| if c.abs() <= ZERO_TOL { 0.0 } else { c + m.copysign(c) })
            .collect();
        let mut order = self.zeros.to_vec();
        order.shuffle(rng);
        let (at_m, free) = order.split_at(self.pinned);
        for &i in at_m {
            x[i] = if rng.gen_bool(0.5) { m } else { -m };
        }
        let draws: Vec<f64> = free.iter().map(|_| m * rng.gen_range(-1.0..=1.0)).collect();
        let place = |s: f64, x: &mut Vec<f64>| {
            for (&i, &d) in free.iter().zip(&draws) {
                x[i] = s * d;
            }
        };
        place(1.0, &mut x);
        if norm(&x, self.p) > 1.0 {
            let s = bisect_max(
                |s| {
                    let mut t = x.clone();
                    place(s, &mut t);
                    norm(&t, self.p) <= 1.0
                },
                1.0,
            );
            place(s, &mut x);
        }
        x
    }
}

/// Largest `t ∈ [0, hi]` with `ok(t)`, for a predicate that holds on an
/// initial segment and at 0.
pub(crate) fn bisect_max(ok: impl Fn(f64) -> bool, hi: f64) -> f64 {
    if ok(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
