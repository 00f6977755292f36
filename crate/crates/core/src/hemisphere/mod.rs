//! Small-diameter configurations of `n + 1` unit points whose convex hull
//! contains the origin, checked against the closed-form diameter bound.

mod lbfgs;
mod objective;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::b_lower;
use crate::error::{Error, Result};
use crate::hull::{certificate_residual, hull_weights};
use crate::lp::{norm, random_sphere_point, Exponent, PointConfiguration};
use crate::rng::stream_rng;
use objective::Objective;

/// Slack below the bound tolerated before a configuration counts as a
/// counterexample.
pub const BOUND_SLACK: f64 = 1e-6;

const TAU_START: f64 = 0.03;
/// Starting exponent perturbation; see `objective::smooth_norm`.
const ETA_START: f64 = 0.3;
const RHO_START: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullCertificate {
    /// Barycentric weights with `Σ λ_i f_i = 0`.
    pub lambda: Vec<f64>,
    /// `‖Σ λ_i f_i‖` in the configuration's norm.
    pub residual: f64,
}

/// LP test for `0 ∈ conv(f_i)`, returning the weights when feasible.
pub fn contains_origin_in_hull(points: &PointConfiguration) -> Option<HullCertificate> {
    let lambda = hull_weights(points.points(), 0.0, points.exponent())?;
    let residual = certificate_residual(points.points(), &lambda, points.exponent());
    Some(HullCertificate { lambda, residual })
}

/// Best configuration found, with the certificate stored as its weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub config: PointConfiguration,
    pub diameter: f64,
    pub bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl SearchResult {
    pub fn certificate(&self) -> &[f64] {
        self.config.weights().unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Outer penalty rounds; the penalty grows tenfold each round.
    pub rounds: usize,
    pub max_inner: usize,
}

impl SearchOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            rounds: 5,
            max_inner: 400,
        }
    }
}

pub fn min_diameter_search(n: usize, p: Exponent, restarts: usize, seed: u64) -> Result<SearchResult> {
    min_diameter_search_with(n, p, &SearchOptions::new(restarts, seed))
}

/// Multi-start penalty minimization of the diameter of `n + 1` unit points
/// with the origin in their hull. Restarts run in parallel on independent
/// streams; the smallest certified diameter wins, ties going to the earlier
/// restart. The result is the best found, not a proven optimum.
pub fn min_diameter_search_with(n: usize, p: Exponent, opts: &SearchOptions) -> Result<SearchResult> {
    if n < 1 {
        return Err(Error::InvalidDimension { min: 1, found: n });
    }
    if opts.restarts < 1 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let runs: Vec<Option<Candidate>> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            if n == 1 {
                segment(p)
            } else {
                restart(n, p, opts, r as u64)
            }
        })
        .collect();
    let best = runs
        .into_iter()
        .flatten()
        .min_by(|a, b| a.diameter.total_cmp(&b.diameter))
        .ok_or(Error::Infeasible)?;
    let bound = b_lower(n, p);
    if best.diameter < bound - BOUND_SLACK {
        return Err(Error::BoundViolation {
            diameter: best.diameter,
            bound,
        });
    }
    Ok(SearchResult {
        config: best.config,
        diameter: best.diameter,
        bound,
        gap: best.diameter - bound,
        iterations: best.iterations,
        seed: opts.seed,
    })
}

struct Candidate {
    config: PointConfiguration,
    diameter: f64,
    iterations: usize,
}

fn segment(p: Exponent) -> Option<Candidate> {
    let cfg = PointConfiguration::new(vec![vec![1.0], vec![-1.0]], p).ok()?;
    certified(cfg, 0)
}

fn restart(n: usize, p: Exponent, opts: &SearchOptions, index: u64) -> Option<Candidate> {
    let m = n + 1;
    let mut rng = stream_rng(opts.seed, index);
    let mut x: Vec<f64> = (0..m).flat_map(|_| random_sphere_point(&mut rng, n, p)).collect();
    x.extend(std::iter::repeat_n(0.0, m));

    let mut iterations = 0;
    let mut tau = TAU_START;
    let mut eta = ETA_START;
    let mut rho = RHO_START;
    for _ in 0..opts.rounds {
        let obj = Objective {
            n,
            p,
            eta,
            tau,
            rho,
        };
        iterations += lbfgs::minimize(|v, g| obj.eval(v, g), &mut x, opts.max_inner, 1e-10);
        for chunk in x[..m * n].chunks_mut(n) {
            let r = norm(chunk, p);
            if r > 0.0 {
                chunk.iter_mut().for_each(|v| *v /= r);
            }
        }
        tau *= 0.25;
        eta *= 0.1;
        rho *= 10.0;
    }

    let mut pts: Vec<Vec<f64>> = x[..m * n].chunks(n).map(<[f64]>::to_vec).collect();
    let logits = &x[m * n..];
    let top = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let lambda: Vec<f64> = logits.iter().map(|w| (w - top).exp()).collect();
    project_feasible(&mut pts, &lambda, p)?;
    certified(PointConfiguration::new(pts, p).ok()?, iterations)
}

/// Replace the most heavily weighted point by the unit vector opposite the
/// weighted sum of the others, which puts the origin exactly in the hull.
fn project_feasible(pts: &mut [Vec<f64>], lambda: &[f64], p: Exponent) -> Option<()> {
    let heavy = (0..pts.len()).max_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))?;
    let mut u = vec![0.0; pts[0].len()];
    for (i, pt) in pts.iter().enumerate() {
        if i != heavy {
            u.iter_mut().zip(pt).for_each(|(a, v)| *a += lambda[i] * v);
        }
    }
    let r = norm(&u, p);
    if !(r > 1e-12) {
        return None;
    }
    pts[heavy] = u.iter().map(|v| -v / r).collect();
    Some(())
}

fn certified(cfg: PointConfiguration, iterations: usize) -> Option<Candidate> {
    let cert = contains_origin_in_hull(&cfg)?;
    let config = cfg.with_weights(cert.lambda).ok()?;
    let diameter = config.diameter().ok()?;
    Some(Candidate {
        config,
        diameter,
        iterations,
    })
}

/// Measure a feasible configuration against `b_lower(n, p)`.
pub fn certify_against_bound(config: &PointConfiguration, p: Exponent) -> Result<SearchResult> {
    let cfg = config.with_exponent(p);
    cfg.check_unit_norm(1e-9)?;
    let n = cfg.dim();
    if cfg.len() < 2 {
        return Err(Error::TooFewPoints(cfg.len()));
    }
    let cert = contains_origin_in_hull(&cfg).ok_or(Error::Infeasible)?;
    let cfg = cfg.with_weights(cert.lambda)?;
    let diameter = cfg.diameter()?;
    let bound = b_lower(n, p);
    if diameter < bound - BOUND_SLACK {
        return Err(Error::BoundViolation { diameter, bound });
    }
    Ok(SearchResult {
        config: cfg,
        diameter,
        bound,
        gap: diameter - bound,
        iterations: 0,
        seed: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinfVariant {
    /// `(1,…,1)` and the `n` points with one entry `1` and the rest `−2/(n−1)`.
    PaperTwoOver,
    /// Same shape with `−1/(n−1)`; diameter `n/(n−1)`.
    OneOver,
}

impl std::str::FromStr for LinfVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_2_over" | "two_over" => Ok(Self::PaperTwoOver),
            "one_over" => Ok(Self::OneOver),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

/// Unit sup-norm configurations of `n + 1` points in `R^n` balanced around
/// the origin.
pub fn linf_family(n: usize, variant: LinfVariant) -> Result<PointConfiguration> {
    let (c, min) = match variant {
        LinfVariant::PaperTwoOver => (2.0 / (n as f64 - 1.0), 3),
        LinfVariant::OneOver => (1.0 / (n as f64 - 1.0), 2),
    };
    if n < min {
        return Err(Error::InvalidDimension { min, found: n });
    }
    let mut pts = vec![vec![1.0; n]];
    for i in 0..n {
        let mut v = vec![-c; n];
        v[i] = 1.0;
        pts.push(v);
    }
    // Each coordinate of the other points sums to 1 − (n−1)c; the all-ones
    // point cancels it.
    let head = ((n as f64 - 1.0) * c - 1.0).max(0.0);
    let mut weights: Vec<f64> = std::iter::once(head).chain(std::iter::repeat_n(1.0, n)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    PointConfiguration::new(pts, Exponent::Infinity)?.with_weights(weights)
}
