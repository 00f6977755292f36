use nalgebra::{DMatrix, DVector, Dyn, LU};
use serde::{Deserialize, Serialize};

use super::EmbeddingSpec;
use crate::error::{Error, Result};
use crate::lp::{LpVector, PointConfiguration};

/// Largest accepted condition number of a generator subsystem.
const MAX_CONDITION: f64 = 1e12;
/// Coordinates above `-REGION_TOL` count as nonnegative when locating a cone.
pub(super) const REGION_TOL: f64 = 1e-10;
const SPAN_TOL: f64 = 1e-9;

/// Coefficients of a point in the generators `{p_k : k ∉ excluded}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicCoordinates {
    pub excluded: Vec<usize>,
    /// One entry per generator; excluded entries are zero.
    pub lambda: Vec<f64>,
}

impl ConicCoordinates {
    pub fn min_coefficient(&self) -> f64 {
        self.lambda
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.excluded.contains(k))
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_in_cone(&self, tol: f64) -> bool {
        self.min_coefficient() >= -tol
    }

    /// Indices whose coefficient exceeds `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.lambda.len()).filter(|&k| self.lambda[k] > tol).collect()
    }
}

/// LU factorizations of every square generator subsystem `{p_k : k ≠ i}`.
#[derive(Debug, Clone)]
pub(super) struct ConicFrame {
    n: usize,
    points: Vec<Vec<f64>>,
    solvers: Vec<LU<f64, Dyn, Dyn>>,
}

impl ConicFrame {
    pub(super) fn new(generators: &PointConfiguration) -> Result<Self> {
        let n = generators.dim();
        let points = generators.points().to_vec();
        let mut solvers = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mat = columns(&points, n, |k| k != i);
            check_condition(&mat)?;
            solvers.push(mat.lu());
        }
        Ok(Self { n, points, solvers })
    }

    pub(super) fn point(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    /// Coefficients with generator `i` left out.
    pub(super) fn solve_without(&self, x: &[f64], i: usize) -> ConicCoordinates {
        let sol = self.solvers[i]
            .solve(&DVector::from_column_slice(x))
            .expect("factorization checked at construction");
        let mut lambda = Vec::with_capacity(self.n + 1);
        lambda.extend(sol.iter().take(i).copied());
        lambda.push(0.0);
        lambda.extend(sol.iter().skip(i).copied());
        ConicCoordinates {
            excluded: vec![i],
            lambda,
        }
    }

    /// First cone `i` whose coordinates are nonnegative within tolerance,
    /// with negative rounding clamped to zero.
    pub(super) fn region(&self, x: &[f64]) -> (usize, ConicCoordinates) {
        let mut best: Option<(usize, ConicCoordinates, f64)> = None;
        for i in 0..=self.n {
            let c = self.solve_without(x, i);
            let low = c.min_coefficient();
            if low >= -REGION_TOL {
                return (i, clamp(c));
            }
            if best.as_ref().is_none_or(|b| low > b.2) {
                best = Some((i, c, low));
            }
        }
        let (i, c, _) = best.expect("at least one generator");
        (i, clamp(c))
    }
}

fn clamp(mut c: ConicCoordinates) -> ConicCoordinates {
    c.lambda.iter_mut().for_each(|v| *v = v.max(0.0));
    c
}

fn columns(points: &[Vec<f64>], n: usize, keep: impl Fn(usize) -> bool) -> DMatrix<f64> {
    let idx: Vec<usize> = (0..points.len()).filter(|&k| keep(k)).collect();
    DMatrix::from_fn(n, idx.len(), |r, c| points[idx[c]][r])
}

fn check_condition(mat: &DMatrix<f64>) -> Result<()> {
    let sv = mat.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    Ok(())
}

/// Solve `x = Σ_{k ∉ excluded} λ_k p_k`. Negative entries are reported as-is;
/// they mean `x` lies outside that cone. With two or more exclusions the
/// system is overdetermined and `x` must lie in the span.
pub fn conic_coordinates(
    x: &LpVector,
    spec: &EmbeddingSpec,
    excluded: &[usize],
) -> Result<ConicCoordinates> {
    let frame = spec.frame()?;
    let n = spec.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    if let Some(&bad) = excluded.iter().find(|&&i| i > n) {
        return Err(Error::IndexOutOfRange { index: bad, max: n });
    }
    let mut excl = excluded.to_vec();
    excl.sort_unstable();
    excl.dedup();
    match excl.len() {
        0 => Err(Error::InvalidArgument(
            "at least one generator must be excluded".into(),
        )),
        1 => Ok(frame.solve_without(x.coords(), excl[0])),
        _ => {
            let keep: Vec<usize> = (0..=n).filter(|k| !excl.contains(k)).collect();
            if keep.is_empty() {
                return Ok(ConicCoordinates {
                    excluded: excl,
                    lambda: vec![0.0; n + 1],
                });
            }
            let mat = columns(&frame.points, n, |k| !excl.contains(&k));
            check_condition(&mat)?;
            let rhs = DVector::from_column_slice(x.coords());
            let sol = mat
                .clone()
                .svd(true, true)
                .solve(&rhs, 0.0)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let residual = (&mat * &sol - &rhs).norm();
            if residual > SPAN_TOL {
                return Err(Error::OutsideSpan { residual });
            }
            let mut lambda = vec![0.0; n + 1];
            for (c, &k) in keep.iter().enumerate() {
                lambda[k] = sol[c];
            }
            Ok(ConicCoordinates {
                excluded: excl,
                lambda,
            })
        }
    }
}
