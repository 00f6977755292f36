//! Origin-in-hull feasibility with a polished barycentric certificate.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::lp::{norm, Exponent};

/// Largest accepted `‖Σ λ_i f_i‖` on a returned certificate.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// Weights `λ ≥ min_weight`, `Σ λ = 1`, with `Σ λ_i f_i = 0`, or `None` when
/// the LP is infeasible or the certificate cannot be polished below
/// [`CERTIFICATE_TOL`] in the `metric` norm.
pub fn hull_weights(points: &[Vec<f64>], min_weight: f64, metric: Exponent) -> Option<Vec<f64>> {
    let m = points.len();
    if m == 0 || min_weight * m as f64 > 1.0 + 1e-15 {
        return None;
    }
    let dim = points[0].len();

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..m).map(|_| lp.add_var(0.0, (min_weight, f64::INFINITY))).collect();
    for d in 0..dim {
        let terms: Vec<_> = vars.iter().zip(points).map(|(&v, pt)| (v, pt[d])).collect();
        lp.add_constraint(terms, ComparisonOp::Eq, 0.0);
    }
    let ones: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(ones, ComparisonOp::Eq, 1.0);

    let solution = lp.solve().ok()?.into_solution().ok()?;
    let raw: Vec<f64> = vars.iter().map(|&v| solution.var_value(v).max(min_weight)).collect();

    let weights = polish(points, raw, min_weight);
    (certificate_residual(points, &weights, metric) <= CERTIFICATE_TOL).then_some(weights)
}

/// `‖Σ λ_i f_i‖` in the given norm.
pub fn certificate_residual(points: &[Vec<f64>], weights: &[f64], metric: Exponent) -> f64 {
    norm(&weighted_sum(points, weights), metric)
}

fn weighted_sum(points: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; points.first().map_or(0, Vec::len)];
    for (pt, w) in points.iter().zip(weights) {
        for (a, v) in acc.iter_mut().zip(pt) {
            *a += w * v;
        }
    }
    acc
}

/// Minimal-norm correction of the weights off their lower bound so that the
/// balance equations hold to rounding, then exact renormalization.
fn polish(points: &[Vec<f64>], mut w: Vec<f64>, min_weight: f64) -> Vec<f64> {
    let dim = points[0].len();
    for _ in 0..4 {
        let free: Vec<usize> = (0..w.len()).filter(|&i| w[i] > min_weight + 1e-14).collect();
        if free.is_empty() {
            break;
        }
        let sum = weighted_sum(points, &w);
        let total: f64 = w.iter().sum();
        let mut rhs = DVector::from_iterator(dim + 1, sum.iter().copied().chain([total - 1.0]));
        if rhs.amax() < 1e-17 {
            break;
        }
        rhs.neg_mut();
        let mat = DMatrix::from_fn(dim + 1, free.len(), |r, c| {
            if r < dim {
                points[free[c]][r]
            } else {
                1.0
            }
        });
        let Ok(delta) = mat.svd(true, true).solve(&rhs, 1e-12) else {
            break;
        };
        let mut clamped = false;
        for (c, &i) in free.iter().enumerate() {
            w[i] += delta[c];
            if w[i] < min_weight {
                w[i] = min_weight;
                clamped = true;
            }
        }
        if !clamped {
            break;
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}
