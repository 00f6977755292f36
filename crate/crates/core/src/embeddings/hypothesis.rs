use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::collapse::bisect_max;
use crate::error::{Error, Result};
use crate::hull::hull_weights;
use crate::lp::{norm, PointConfiguration};
use crate::rng::{chunks, stream_rng, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisOptions {
    /// Lower bound on the balancing weights in the closed-hemisphere test.
    pub delta: f64,
    /// Random draws per subset size in the norm-condition search.
    pub samples_per_size: usize,
    /// Largest accepted violation margin.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        Self {
            delta: 1e-6,
            samples_per_size: 100_000,
            tolerance: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HemisphereTest {
    pub passed: bool,
    pub delta: f64,
    pub certificate: Option<Vec<f64>>,
}

/// A combination `s = Σ_{i ∈ A} λ_i p_i` in the ball and the largest `t`
/// with `‖s − t p_k‖ ≤ 1`; the condition asks `t ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormWitness {
    pub subset: Vec<usize>,
    pub lambda: Vec<f64>,
    pub k: usize,
    pub step: f64,
}

impl NormWitness {
    pub fn margin(&self) -> f64 {
        self.step - 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormConditionTest {
    pub passed: bool,
    pub worst_margin: f64,
    pub witness: Option<NormWitness>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub hemisphere: HemisphereTest,
    pub norm_condition: NormConditionTest,
    pub passed: bool,
}

pub fn hypothesis_check(points: &PointConfiguration) -> Result<HypothesisReport> {
    hypothesis_check_with(points, &HypothesisOptions::default())
}

/// Check that `n + 1` unit generators can drive the skeleton projection: no
/// closed hemisphere holds them (weights `μ ≥ δ` balance them), and
/// subtracting a new generator from a combination of at most `n − 2` others
/// never reaches past the unit step while staying in the ball.
pub fn hypothesis_check_with(
    points: &PointConfiguration,
    opts: &HypothesisOptions,
) -> Result<HypothesisReport> {
    let n = points.dim();
    if points.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: points.len(),
        });
    }
    points.check_unit_norm(1e-9)?;

    let certificate = hull_weights(points.points(), opts.delta, points.exponent());
    let hemisphere = HemisphereTest {
        passed: certificate.is_some(),
        delta: opts.delta,
        certificate,
    };

    let search = NormSearch { points };
    let mut witnesses: Vec<NormWitness> = Vec::new();
    let mut samples = 0;
    for size in 1..n.saturating_sub(1) {
        samples += opts.samples_per_size;
        let found: Vec<NormWitness> = chunks(opts.samples_per_size)
            .collect::<Vec<_>>()
            .into_par_iter()
            .flat_map_iter(|(stream, len)| {
                let mut rng = stream_rng(opts.seed ^ ((size as u64) << 40), stream);
                let mut top: Vec<NormWitness> = Vec::new();
                for _ in 0..len {
                    if let Some(w) = search.draw(&mut rng, size) {
                        keep_top(&mut top, w, 4);
                    }
                }
                top
            })
            .collect();
        for w in found {
            keep_top(&mut witnesses, w, 8);
        }
    }

    let mut rng = stream_rng(opts.seed, u64::MAX);
    let worst = witnesses
        .into_iter()
        .map(|w| search.climb(w, &mut rng))
        .max_by(|a, b| a.step.total_cmp(&b.step));
    let worst_margin = worst.as_ref().map_or(f64::NEG_INFINITY, NormWitness::margin);
    let norm_condition = NormConditionTest {
        passed: worst_margin <= opts.tolerance,
        worst_margin,
        witness: worst,
        samples,
    };
    Ok(HypothesisReport {
        passed: hemisphere.passed && norm_condition.passed,
        hemisphere,
        norm_condition,
    })
}

fn keep_top(list: &mut Vec<NormWitness>, w: NormWitness, cap: usize) {
    list.push(w);
    list.sort_by(|a, b| b.step.total_cmp(&a.step));
    list.truncate(cap);
}

struct NormSearch<'a> {
    points: &'a PointConfiguration,
}

impl NormSearch<'_> {
    fn combination(&self, subset: &[usize], lambda: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.points.dim()];
        for (&i, &l) in subset.iter().zip(lambda) {
            for (a, v) in s.iter_mut().zip(self.points.point(i)) {
                *a += l * v;
            }
        }
        s
    }

    /// Rescale `lambda` so the combination has norm `radius`; `None` if it
    /// vanishes.
    fn evaluate(&self, subset: Vec<usize>, mut lambda: Vec<f64>, k: usize, radius: f64) -> Option<NormWitness> {
        let p = self.points.exponent();
        let s = self.combination(&subset, &lambda);
        let r = norm(&s, p);
        if r < 1e-12 {
            return None;
        }
        let scale = radius / r;
        lambda.iter_mut().for_each(|l| *l *= scale);
        let s: Vec<f64> = s.iter().map(|v| v * scale).collect();
        let pk = self.points.point(k);
        let step = bisect_max(
            |t| norm(&s.iter().zip(pk).map(|(a, b)| a - t * b).collect::<Vec<_>>(), p) <= 1.0,
            2.0,
        );
        Some(NormWitness {
            subset,
            lambda,
            k,
            step,
        })
    }

    fn draw(&self, rng: &mut StreamRng, size: usize) -> Option<NormWitness> {
        let total = self.points.len();
        let picked = sample_indices(rng, total, size + 1).into_vec();
        let (subset, k) = (picked[..size].to_vec(), picked[size]);
        let lambda: Vec<f64> = (0..size).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let radius = if rng.gen_bool(0.5) {
            1.0
        } else {
            rng.gen::<f64>().powf(0.25)
        };
        self.evaluate(subset, lambda, k, radius)
    }

    /// Multiplicative random-walk ascent on `λ` and the radius.
    fn climb(&self, start: NormWitness, rng: &mut StreamRng) -> NormWitness {
        let p = self.points.exponent();
        let mut best = start;
        let mut radius = norm(&self.combination(&best.subset, &best.lambda), p).min(1.0);
        let mut sigma = 0.5;
        for _ in 0..400 {
            let lambda: Vec<f64> = best
                .lambda
                .iter()
                .map(|l| l * (sigma * rng.gen_range(-1.0..1.0f64)).exp())
                .collect();
            let r = (radius * (1.0 + sigma * rng.gen_range(-0.5..0.5f64))).clamp(1e-6, 1.0);
            match self.evaluate(best.subset.clone(), lambda, best.k, r) {
                Some(w) if w.step > best.step => {
                    best = w;
                    radius = r;
                }
                _ => sigma = (sigma * 0.99).max(1e-4),
            }
        }
        best
    }
}
