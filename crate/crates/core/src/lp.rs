//! l^p norms, distances, radial projection and set diameters.
//!
//! The exponent `p = ∞` is a tagged variant of [`Exponent`], never a large
//! float, so the sup-norm branches are exact.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute slack used by geometric predicates (hull residuals, ball membership).
pub const PREDICATE_TOL: f64 = 1e-9;
/// Relative slack used when checking unit normalization.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Slack pair threaded through predicates that need to decide on floating-point data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub predicate: f64,
    pub normalization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            predicate: PREDICATE_TOL,
            normalization: NORMALIZATION_TOL,
        }
    }
}

/// Exponent of an l^p norm, `1 <= p <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// The float value, `f64::INFINITY` for the sentinel.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// Conjugate exponent `p'` with `1/p + 1/p' = 1`.
    pub fn dual(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::ONE,
            Exponent::Finite(1.0) => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            _ => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse exponent '{s}'")))?;
                Exponent::finite(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::finite(p).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `‖x‖_p` of a raw coordinate slice.
pub fn norm(x: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => x.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        Exponent::Finite(1.0) => x.iter().map(|v| v.abs()).sum(),
        Exponent::Finite(2.0) => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        Exponent::Finite(q) => {
            // Scale by the largest entry so large q cannot overflow.
            let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if m == 0.0 {
                return 0.0;
            }
            m * x.iter().map(|v| (v.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
        }
    }
}

/// `‖a - b‖_p`.
pub fn distance(a: &[f64], b: &[f64], p: Exponent) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    match p {
        Exponent::Infinity => a
            .iter()
            .zip(b)
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())),
        Exponent::Finite(1.0) => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        Exponent::Finite(2.0) => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        Exponent::Finite(_) => {
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            norm(&diff, p)
        }
    }
}

fn check_coords(coords: &[f64]) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::EmptyVector);
    }
    if let Some(index) = coords.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// A point of `R^n` together with the exponent of the ambient norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpVector {
    coords: Vec<f64>,
    exponent: Exponent,
}

impl LpVector {
    pub fn new(coords: Vec<f64>, exponent: Exponent) -> Result<Self> {
        check_coords(&coords)?;
        Ok(Self { coords, exponent })
    }

    pub fn zeros(dim: usize, exponent: Exponent) -> Result<Self> {
        Self::new(vec![0.0; dim], exponent)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn norm(&self) -> f64 {
        lp_norm(self)
    }

    pub fn distance(&self, other: &LpVector) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(distance(&self.coords, &other.coords, self.exponent))
    }
}

pub fn lp_norm(x: &LpVector) -> f64 {
    norm(&x.coords, x.exponent)
}

pub fn dual_exponent(p: Exponent) -> Exponent {
    p.dual()
}

/// `x / ‖x‖_p`; fails on vectors of norm below `1e-12`.
pub fn radial_project(x: &LpVector) -> Result<LpVector> {
    let n = lp_norm(x);
    if n < NORMALIZATION_TOL {
        return Err(Error::ZeroVector { norm: n });
    }
    Ok(LpVector {
        coords: x.coords.iter().map(|v| v / n).collect(),
        exponent: x.exponent,
    })
}

/// Finite family of points of `R^n`, optionally carrying nonnegative barycentric
/// weights that certify the origin lies in their convex hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    exponent: Exponent,
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
}

impl PointConfiguration {
    /// Shape checks only: at least one point, common dimension, finite entries.
    pub fn new(points: Vec<Vec<f64>>, exponent: Exponent) -> Result<Self> {
        let first = points.first().ok_or(Error::TooFewPoints(0))?;
        let dim = first.len();
        for pt in &points {
            check_coords(pt)?;
            if pt.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: pt.len(),
                });
            }
        }
        Ok(Self {
            exponent,
            dim,
            points,
            weights: None,
        })
    }

    /// Like [`PointConfiguration::new`] but every point must have unit norm
    /// within `tol` (relative).
    pub fn on_sphere(points: Vec<Vec<f64>>, exponent: Exponent, tol: f64) -> Result<Self> {
        let cfg = Self::new(points, exponent)?;
        cfg.check_unit_norm(tol)?;
        Ok(cfg)
    }

    pub fn from_vectors(vectors: &[LpVector]) -> Result<Self> {
        let exponent = vectors.first().ok_or(Error::TooFewPoints(0))?.exponent();
        Self::new(vectors.iter().map(|v| v.coords().to_vec()).collect(), exponent)
    }

    pub fn check_unit_norm(&self, tol: f64) -> Result<()> {
        for (index, pt) in self.points.iter().enumerate() {
            let n = norm(pt, self.exponent);
            if (n - 1.0).abs() > tol {
                return Err(Error::NotOnSphere { index, norm: n });
            }
        }
        Ok(())
    }

    /// Attach barycentric weights; they must be nonnegative, sum to one and
    /// balance the points to the origin within [`PREDICATE_TOL`].
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PREDICATE_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        let residual = norm(&self.weighted_sum(&weights), self.exponent);
        if residual > PREDICATE_TOL {
            return Err(Error::InvalidWeights(format!(
                "weighted sum has norm {residual:e}"
            )));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn weighted_sum(&self, weights: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for (pt, w) in self.points.iter().zip(weights) {
            for (a, v) in acc.iter_mut().zip(pt) {
                *a += w * v;
            }
        }
        acc
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn vector(&self, i: usize) -> LpVector {
        LpVector {
            coords: self.points[i].clone(),
            exponent: self.exponent,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }

    /// Same points viewed in another norm.
    pub fn with_exponent(&self, exponent: Exponent) -> Self {
        Self {
            exponent,
            dim: self.dim,
            points: self.points.clone(),
            weights: None,
        }
    }

    pub fn diameter(&self) -> Result<f64> {
        set_diameter(self)
    }
}

/// Largest pairwise distance in the configuration's own norm.
pub fn set_diameter(points: &PointConfiguration) -> Result<f64> {
    diameter_pair(points.points(), points.exponent()).map(|(_, _, d)| d)
}

/// Exact diameter of a point set together with a pair attaining it.
///
/// Pairs are visited in decreasing order of distance to the centroid and cut
/// off once `r_a + r_b` cannot beat the current best, which is exact by the
/// triangle inequality and skips most pairs on clustered samples.
pub fn diameter_pair(points: &[Vec<f64>], metric: Exponent) -> Result<(usize, usize, f64)> {
    let m = points.len();
    if m < 2 {
        return Err(Error::TooFewPoints(m));
    }
    let dim = points[0].len();
    let mut centroid = vec![0.0; dim];
    for pt in points {
        for (c, v) in centroid.iter_mut().zip(pt) {
            *c += v;
        }
    }
    centroid.iter_mut().for_each(|c| *c /= m as f64);

    let mut radial: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, pt)| (distance(pt, &centroid, metric), i))
        .collect();
    radial.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut best = (radial[0].1, radial[1].1, -1.0);
    for a in 0..m {
        let (ra, ia) = radial[a];
        if 2.0 * ra < best.2 * (1.0 - 1e-12) {
            break;
        }
        for &(rb, ib) in &radial[a + 1..] {
            // Slack keeps the cut exact despite rounding in the radii.
            if ra + rb < best.2 * (1.0 - 1e-12) {
                break;
            }
            let d = distance(&points[ia], &points[ib], metric);
            if d > best.2 {
                best = (ia.min(ib), ia.max(ib), d);
            }
        }
    }
    Ok(best)
}

/// Point of the unit l^p ball: uniform direction on the cube surface pushed to
/// the sphere, radius `U^{1/n}`. Not uniform in volume for `p != 2`, only
/// full-support.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, p: Exponent) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&dir, p);
        if n < 1e-6 {
            continue;
        }
        let r: f64 = rng.gen::<f64>().powf(1.0 / dim as f64);
        return dir.into_iter().map(|v| v * r / n).collect();
    }
}

/// Uniform-ish point of the unit l^p sphere.
pub fn random_sphere_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, p: Exponent) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&dir, p);
        if n < 1e-6 {
            continue;
        }
        return dir.into_iter().map(|v| v / n).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(c: &[f64], p: Exponent) -> LpVector {
        LpVector::new(c.to_vec(), p).unwrap()
    }

    fn brute_diameter(points: &[Vec<f64>], p: Exponent) -> f64 {
        let mut best = 0.0_f64;
        for i in 0..points.len() {
            for j in 0..points.len() {
                if i != j {
                    best = best.max(distance(&points[i], &points[j], p));
                }
            }
        }
        best
    }

    #[test]
    fn norm_examples() {
        assert_eq!(lp_norm(&v(&[1.0, 1.0, 1.0], Exponent::ONE)), 3.0);
        assert_eq!(lp_norm(&v(&[3.0, 4.0], Exponent::TWO)), 5.0);
        assert_eq!(lp_norm(&v(&[-2.0, 1.0], Exponent::Infinity)), 2.0);
        assert_relative_eq!(
            lp_norm(&v(&[1.0, 2.0, 2.0], Exponent::Finite(3.0))),
            17.0_f64.powf(1.0 / 3.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_exponent(Exponent::TWO), Exponent::TWO);
        assert_eq!(dual_exponent(Exponent::ONE), Exponent::Infinity);
        assert_eq!(dual_exponent(Exponent::Infinity), Exponent::ONE);
        match dual_exponent(Exponent::Finite(4.0)) {
            Exponent::Finite(q) => assert_relative_eq!(q, 4.0 / 3.0, max_relative = 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exponent_parsing_and_validation() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        assert!("0.5".parse::<Exponent>().is_err());
        assert!(Exponent::finite(f64::NAN).is_err());
        let json = serde_json::to_string(&[Exponent::TWO, Exponent::Infinity]).unwrap();
        assert_eq!(json, r#"[2.0,"inf"]"#);
        let back: Vec<Exponent> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Exponent::TWO, Exponent::Infinity]);
    }

    #[test]
    fn radial_project_examples() {
        let a = radial_project(&v(&[2.0, 0.0, 0.0], Exponent::TWO)).unwrap();
        assert_eq!(a.coords(), &[1.0, 0.0, 0.0]);
        let b = radial_project(&v(&[1.0, 1.0], Exponent::ONE)).unwrap();
        assert_eq!(b.coords(), &[0.5, 0.5]);
        let c = radial_project(&v(&[1.0, 1.0, 1.0], Exponent::Finite(3.0))).unwrap();
        for x in c.coords() {
            assert_relative_eq!(*x, 3.0_f64.powf(-1.0 / 3.0), max_relative = 1e-14);
        }
        assert!(matches!(
            radial_project(&v(&[1e-13, 0.0], Exponent::TWO)),
            Err(Error::ZeroVector { .. })
        ));
    }

    #[test]
    fn empty_vector_rejected() {
        assert_eq!(LpVector::new(vec![], Exponent::TWO), Err(Error::EmptyVector));
    }

    #[test]
    fn diameter_examples() {
        let anti = PointConfiguration::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], Exponent::Finite(1.7))
            .unwrap();
        assert_eq!(set_diameter(&anti).unwrap(), 2.0);

        // Inscribed equilateral triangle; brute force over its three pairs.
        let tri: Vec<Vec<f64>> = [90.0_f64, 210.0, 330.0]
            .iter()
            .map(|deg| vec![deg.to_radians().cos(), deg.to_radians().sin()])
            .collect();
        let expected = brute_diameter(&tri, Exponent::TWO);
        assert_relative_eq!(expected, 3.0_f64.sqrt(), max_relative = 1e-15);
        let cfg = PointConfiguration::new(tri, Exponent::TWO).unwrap();
        assert_eq!(set_diameter(&cfg).unwrap(), expected);

        let single = PointConfiguration::new(vec![vec![1.0]], Exponent::TWO).unwrap();
        assert_eq!(set_diameter(&single), Err(Error::TooFewPoints(1)));
    }

    #[test]
    fn weights_are_validated() {
        let cfg = PointConfiguration::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], Exponent::TWO).unwrap();
        assert!(cfg.clone().with_weights(vec![0.5, 0.5]).is_ok());
        assert!(cfg.clone().with_weights(vec![0.7, 0.3]).is_err());
        assert!(cfg.with_weights(vec![1.5, -0.5]).is_err());
    }

    fn exponents() -> impl Strategy<Value = Exponent> {
        prop_oneof![
            Just(Exponent::ONE),
            Just(Exponent::Finite(1.5)),
            Just(Exponent::TWO),
            Just(Exponent::Finite(3.0)),
            Just(Exponent::Infinity),
        ]
    }

    fn vecs(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0..10.0_f64, n)
    }

    proptest! {
        #[test]
        fn triangle_inequality(p in exponents(), (x, y, z) in (1usize..7).prop_flat_map(|n| (vecs(n), vecs(n), vecs(n)))) {
            prop_assert!(distance(&x, &z, p) <= distance(&x, &y, p) + distance(&y, &z, p) + 1e-10);
        }

        #[test]
        fn norm_is_monotone_in_p(x in (1usize..8).prop_flat_map(vecs), a in 1.0..6.0_f64, b in 1.0..6.0_f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let nl = norm(&x, Exponent::Finite(lo));
            let nh = norm(&x, Exponent::Finite(hi));
            prop_assert!(nh <= nl * (1.0 + 1e-12) + 1e-300);
            prop_assert!(norm(&x, Exponent::Infinity) <= nh * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn norm_bounded_by_sup_norm(x in (1usize..8).prop_flat_map(vecs), p in 1.0..8.0_f64) {
            let n = x.len() as f64;
            prop_assert!(norm(&x, Exponent::Finite(p)) <= n.powf(1.0 / p) * norm(&x, Exponent::Infinity) * (1.0 + 1e-12));
        }

        #[test]
        fn radial_projection_idempotent(x in (1usize..8).prop_flat_map(vecs), p in exponents()) {
            prop_assume!(norm(&x, p) > 1e-6);
            let once = radial_project(&LpVector::new(x, p).unwrap()).unwrap();
            prop_assert!((once.norm() - 1.0).abs() <= 1e-12);
            let twice = radial_project(&once).unwrap();
            for (a, b) in once.coords().iter().zip(twice.coords()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn pruned_diameter_matches_brute_force(
            pts in (1usize..5, 2usize..40).prop_flat_map(|(d, m)| prop::collection::vec(vecs(d), m)),
            p in exponents(),
        ) {
            let (_, _, d) = diameter_pair(&pts, p).unwrap();
            prop_assert_eq!(d, brute_diameter(&pts, p));
        }
    }
}
