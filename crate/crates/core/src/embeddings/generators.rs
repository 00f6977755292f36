use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::{norm, Exponent, PointConfiguration};

/// Positive `μ` with `Σ μ_k p_k = 0` and `Σ μ_k = 1` for `n + 1` points
/// spanning `R^n`. Fails if the kernel is not one-dimensional or has a
/// non-positive entry, i.e. the points lie in a closed hemisphere.
pub fn balancing_weights(points: &PointConfiguration) -> Result<Vec<f64>> {
    let n = points.dim();
    if points.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: points.len(),
        });
    }
    let mat = DMatrix::from_fn(n, n, |r, c| points.point(c + 1)[r]);
    let sv = mat.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition <= 1e12) {
        return Err(Error::SingularSystem { condition });
    }
    let rhs = -DVector::from_column_slice(points.point(0));
    let tail = mat
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem { condition })?;
    let mut mu: Vec<f64> = std::iter::once(1.0).chain(tail.iter().copied()).collect();
    let total: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|m| *m /= total);
    let floor = 1e-12 * mu.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if total <= 0.0 || mu.iter().any(|&m| m <= floor) {
        return Err(Error::HypothesisViolated(
            "generators lie in a closed hemisphere".into(),
        ));
    }
    Ok(mu)
}

/// Vertices of the regular simplex centred at the origin of `R^n`, each
/// rescaled to unit l^p norm, carrying their balancing weights.
pub fn regular_simplex(n: usize, p: Exponent) -> Result<PointConfiguration> {
    if n < 2 {
        return Err(Error::InvalidDimension { min: 2, found: n });
    }
    // e_1..e_n together with β(1,…,1) are pairwise at distance √2.
    let beta = (1.0 - ((n + 1) as f64).sqrt()) / n as f64;
    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    verts.push(vec![beta; n]);
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        verts.push(v);
    }
    let shift = (1.0 + beta) / (n + 1) as f64;
    for v in &mut verts {
        v.iter_mut().for_each(|x| *x -= shift);
        let r = norm(v, p);
        v.iter_mut().for_each(|x| *x /= r);
    }
    let cfg = PointConfiguration::new(verts, p)?;
    let mu = balancing_weights(&cfg)?;
    cfg.with_weights(mu)
}

/// The four points `3^{-1/p}(±1, ±1, ±1)` with an even number of minus signs.
pub fn dim3_set(p: Exponent) -> Result<PointConfiguration> {
    let s = 3f64.powf(-p.recip());
    let pts = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ]
    .iter()
    .map(|r| r.iter().map(|v| v * s).collect())
    .collect();
    PointConfiguration::new(pts, p)?.with_weights(vec![0.25; 4])
}
