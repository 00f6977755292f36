//! Closed-form width-dimension thresholds for l^p unit balls and the
//! aggregator that turns them into a certified integer interval.
//!
//! Every bound is a record "eps < t ⇒ wdim ≥ k" (lower) or
//! "eps ≥ t ⇒ wdim ≤ k" (upper). The interval for a given `eps` is the max
//! over applicable lower records and the min over applicable upper records;
//! the Urysohn widths are read off the same record lists.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::hadamard_order_available;
use crate::lp::Exponent;

/// Relative slack applied to lower-bound thresholds. Thresholds that agree in
/// exact arithmetic (e.g. `b_{3;p}` and `2(2/3)^{1/p}` for `p ≤ 2`) may differ
/// by an ulp; shrinking only the lower side keeps every claim sound.
const LOWER_SLACK: f64 = 1e-12;

/// Ball diameter; every unit ball has diameter 2 in its own norm.
pub const BALL_DIAMETER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// The ball with its own l^p distance.
    #[serde(rename = "lp")]
    IntrinsicLp,
    /// The ball with the sup distance of the product.
    #[serde(rename = "sup")]
    SupMetric,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Metric::IntrinsicLp),
            "sup" => Ok(Metric::SupMetric),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}, expected lp or sup"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::IntrinsicLp => "lp",
            Metric::SupMetric => "sup",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

/// A numeric threshold with a closed form for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub expr: String,
}

impl Threshold {
    fn new(value: f64, expr: impl Into<String>) -> Self {
        Self {
            value,
            expr: expr.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub kind: BoundKind,
    pub value: usize,
    pub condition: String,
    pub source: String,
    /// Threshold on eps where the claim switches on, when there is one.
    pub threshold: Option<f64>,
    /// False for sampled estimates; those never move `lo` or `hi`.
    pub certified: bool,
}

impl BoundRecord {
    fn lower(value: usize, t: Threshold, source: &str) -> Self {
        Self {
            kind: BoundKind::Lower,
            value,
            condition: format!("eps < {}", t.expr),
            source: source.into(),
            threshold: Some(t.value),
            certified: true,
        }
    }

    fn upper(value: usize, t: Threshold, source: &str) -> Self {
        Self {
            kind: BoundKind::Upper,
            value,
            condition: format!("eps >= {}", t.expr),
            source: source.into(),
            threshold: Some(t.value),
            certified: true,
        }
    }

    /// Whether the record's premise holds at `eps`.
    pub fn applies(&self, eps: f64) -> bool {
        match (self.kind, self.threshold) {
            (BoundKind::Lower, Some(t)) => eps < t * (1.0 - LOWER_SLACK),
            (BoundKind::Upper, Some(t)) => eps >= t,
            _ => true,
        }
    }
}

/// Certified integer bounds `[lo, hi]` on the width dimension at one `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WdimInterval {
    pub n: usize,
    pub p: Exponent,
    pub metric: Metric,
    pub eps: f64,
    pub lo: usize,
    pub hi: usize,
    pub records: Vec<BoundRecord>,
}

impl WdimInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Distinct sources of the records that pin `lo` and `hi`.
    pub fn sources(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.source) {
                out.push(r.source.clone());
            }
        }
        out
    }
}

pub mod source {
    pub const CONNECTED: &str = "connected-ball";
    pub const BALL_DIAMETER: &str = "ball-diameter";
    pub const BORSUK_ULAM: &str = "borsuk-ulam";
    pub const BORSUK_ULAM_DIM3: &str = "borsuk-ulam-tree-lift";
    pub const HEMISPHERE_DIAMETER: &str = "hemisphere-diameter";
    pub const CUBE_INCLUSION: &str = "cube-inclusion";
    pub const PLANE: &str = "planar-inclusion";
    pub const SIMPLEX_PROJECTION: &str = "simplex-skeleton-projection";
    pub const TETRAHEDRON_PROJECTION: &str = "tetrahedron-skeleton-projection";
    pub const HADAMARD_PROJECTION: &str = "hadamard-skeleton-projection";
    pub const COLLAPSE: &str = "coordinate-collapse";
    pub const CUBE: &str = "cube";
    pub const EMPIRICAL: &str = "empirical-cascade-fibers";
}

fn check_dim(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidDimension { min: 1, found: n });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok(())
}

/// Width dimension of the cube `[-1,1]^n` with the sup metric.
pub fn wdim_cube(n: usize, eps: f64) -> Result<usize> {
    check_dim(n)?;
    check_eps(eps)?;
    Ok(if eps >= BALL_DIAMETER { 0 } else { n })
}

/// `2 (k+1)^{-1/p}`: below it the l^p ball with the sup metric needs
/// dimension more than `k`.
pub fn sup_metric_threshold(k: usize, p: Exponent) -> f64 {
    2.0 * ((k + 1) as f64).powf(-p.recip())
}

/// Exact width dimension of the l^p unit ball with the sup metric.
pub fn wdim_lp_ball_sup_metric(n: usize, p: Exponent, eps: f64) -> Result<usize> {
    check_dim(n)?;
    check_eps(eps)?;
    let Exponent::Finite(q) = p else {
        return Err(Error::InfiniteExponent);
    };
    // Smallest k with eps >= 2(k+1)^{-1/p}, i.e. k >= (2/eps)^p - 1; the closed
    // form is then nudged so it agrees with the threshold predicate itself.
    let guess = ((2.0 / eps).powf(q) - 1.0).ceil().clamp(0.0, n as f64) as usize;
    let mut k = guess;
    while k > 0 && eps >= sup_metric_threshold(k - 1, p) {
        k -= 1;
    }
    while k < n && eps < sup_metric_threshold(k, p) {
        k += 1;
    }
    Ok(k)
}

/// Lower threshold `b_{k;p}`: `2^{1/p'}(1+1/k)^{1/p}` for `p ≤ 2` and
/// `2^{1/p}(1+1/k)^{1/p'}` for `p ≥ 2` (at `p = ∞` the limit `1 + 1/k`).
/// It is the least diameter of `k+1` unit points whose hull holds the origin.
pub fn b_lower(k: usize, p: Exponent) -> f64 {
    let ip = p.recip();
    let ipd = 1.0 - ip;
    let ratio = 1.0 + 1.0 / k as f64;
    if ip >= 0.5 {
        2f64.powf(ipd) * ratio.powf(ip)
    } else {
        2f64.powf(ip) * ratio.powf(ipd)
    }
}

fn b_lower_expr(k: usize, p: Exponent) -> String {
    let pd = p.dual();
    if p.recip() >= 0.5 {
        format!("2^(1/{pd})*(1+1/{k})^(1/{p})")
    } else {
        format!("2^(1/{p})*(1+1/{k})^(1/{pd})")
    }
}

/// Lower bound from antipodal maps: `⌊n/2⌋` for `eps < 2`, raised to 2 in
/// dimension 3 where maps to graphs lift to trees. The dimension-3 lift is
/// unconditional for `1 < p < ∞`; for `p ∈ {1, ∞}` it needs `l1_linf_dim3`.
pub fn borsuk_ulam_floor(n: usize, eps: f64, p: Exponent, l1_linf_dim3: bool) -> usize {
    if eps >= BALL_DIAMETER {
        return 0;
    }
    if n == 3 && (l1_linf_dim3 || matches!(p, Exponent::Finite(q) if q > 1.0)) {
        return 2;
    }
    n / 2
}

/// Smallest certified `t` with `eps ≥ t ⇒ wdim ≤ k` for the intrinsic metric.
pub fn known_upper(k: usize, n: usize, p: Exponent) -> Option<Threshold> {
    known_upper_tagged(k, n, p).map(|(t, _)| t)
}

fn known_upper_tagged(k: usize, n: usize, p: Exponent) -> Option<(Threshold, &'static str)> {
    if k >= n {
        return None;
    }
    let mut best: Option<(Threshold, &'static str)> = None;
    let mut offer = |t: Threshold, src: &'static str| {
        if best.as_ref().is_none_or(|(b, _)| t.value < b.value) {
            best = Some((t, src));
        }
    };
    if k == 0 {
        offer(Threshold::new(BALL_DIAMETER, "2"), source::BALL_DIAMETER);
    }
    if let Exponent::Finite(q) = p {
        if k + 1 == n && n >= 2 && q == 2.0 {
            offer(
                Threshold::new((2.0 * (1.0 + 1.0 / n as f64)).sqrt(), format!("sqrt(2*(1+1/{n}))")),
                source::SIMPLEX_PROJECTION,
            );
        }
        if k == 2 && n == 3 {
            offer(
                Threshold::new(2.0 * (2.0_f64 / 3.0).powf(1.0 / q), format!("2*(2/3)^(1/{p})")),
                source::TETRAHEDRON_PROJECTION,
            );
        }
        if k + 1 == n && n >= 2 && q == 1.0 && hadamard_order_available(n + 1) {
            offer(
                Threshold::new(1.0 + 1.0 / n as f64, format!("1+1/{n}")),
                source::HADAMARD_PROJECTION,
            );
        }
    }
    best
}

/// Knobs for [`wdim_interval_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalOptions {
    /// Use the complete dimension-3 description for `1 ≤ p ≤ 2`, which
    /// switches on the tree-lift bound at `p = 1`.
    pub dim3_exact_table: bool,
    /// Apply the tree-lift bound at `p ∈ {1, ∞}` regardless of the table.
    pub l1_linf_dim3: bool,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        Self {
            dim3_exact_table: true,
            l1_linf_dim3: false,
        }
    }
}

impl IntervalOptions {
    fn dim3_lift(&self, p: Exponent) -> bool {
        self.l1_linf_dim3 || (self.dim3_exact_table && p.value() <= 2.0)
    }
}

/// All lower records "eps < t ⇒ wdim ≥ k" for the intrinsic metric, finite `p`.
pub fn lower_records(n: usize, p: Exponent, opts: IntervalOptions) -> Vec<BoundRecord> {
    let mut out = Vec::new();
    out.push(BoundRecord::lower(1, Threshold::new(2.0, "2"), source::CONNECTED));

    let bu = borsuk_ulam_floor(n, 1.0, p, opts.dim3_lift(p));
    if bu >= 1 {
        let src = if n == 3 && bu == 2 {
            source::BORSUK_ULAM_DIM3
        } else {
            source::BORSUK_ULAM
        };
        out.push(BoundRecord::lower(bu, Threshold::new(2.0, "2"), src));
    }

    for k in 1..=n {
        out.push(BoundRecord::lower(
            k,
            Threshold::new(b_lower(k, p), b_lower_expr(k, p)),
            source::HEMISPHERE_DIAMETER,
        ));
        // The sub-ball of dimension k contains a sup-ball of radius k^{-1/p}.
        out.push(BoundRecord::lower(
            k,
            Threshold::new(2.0 * (k as f64).powf(-p.recip()), format!("2*{k}^(-1/{p})")),
            source::CUBE_INCLUSION,
        ));
    }

    if n >= 2 {
        let ip = p.recip();
        let t = 2f64.powf(ip).max(2f64.powf(1.0 - ip));
        out.push(BoundRecord::lower(
            2,
            Threshold::new(t, format!("max(2^(1/{p}), 2^(1/{}))", p.dual())),
            source::PLANE,
        ));
    }
    out
}

/// All certified upper records "eps ≥ t ⇒ wdim ≤ k" for the intrinsic metric.
pub fn upper_records(n: usize, p: Exponent) -> Vec<BoundRecord> {
    (0..n)
        .filter_map(|k| known_upper_tagged(k, n, p).map(|(t, src)| BoundRecord::upper(k, t, src)))
        .collect()
}

pub fn wdim_interval(n: usize, p: Exponent, metric: Metric, eps: f64) -> Result<WdimInterval> {
    wdim_interval_with(n, p, metric, eps, IntervalOptions::default())
}

pub fn wdim_interval_with(
    n: usize,
    p: Exponent,
    metric: Metric,
    eps: f64,
    opts: IntervalOptions,
) -> Result<WdimInterval> {
    check_dim(n)?;
    check_eps(eps)?;

    let exact = |k: usize, condition: String, src: &str| WdimInterval {
        n,
        p,
        metric,
        eps,
        lo: k,
        hi: k,
        records: vec![BoundRecord {
            kind: BoundKind::Exact,
            value: k,
            condition,
            source: src.into(),
            threshold: None,
            certified: true,
        }],
    };

    let Exponent::Finite(_) = p else {
        // Both metrics coincide with the cube for p = ∞.
        let k = wdim_cube(n, eps)?;
        let cond = if k == 0 { "eps >= 2" } else { "eps < 2" };
        return Ok(exact(k, cond.into(), source::CUBE));
    };

    if metric == Metric::SupMetric {
        let k = wdim_lp_ball_sup_metric(n, p, eps)?;
        let cond = match k {
            0 => "eps >= 2".to_string(),
            k if k == n => format!("eps < 2*{n}^(-1/{p})"),
            k => format!("2*{}^(-1/{p}) <= eps < 2*{k}^(-1/{p})", k + 1),
        };
        return Ok(exact(k, cond, source::COLLAPSE));
    }

    let mut lo = 0;
    let mut hi = n;
    let mut best_lower: Vec<BoundRecord> = Vec::new();
    let mut best_upper: Vec<BoundRecord> = Vec::new();

    for rec in lower_records(n, p, opts).into_iter().filter(|r| r.applies(eps)) {
        lo = lo.max(rec.value);
        keep_strongest(&mut best_lower, rec, |new, old| new.value > old.value);
    }
    for rec in upper_records(n, p).into_iter().filter(|r| r.applies(eps)) {
        hi = hi.min(rec.value);
        keep_strongest(&mut best_upper, rec, |new, old| new.value < old.value);
    }
    if lo > hi {
        return Err(Error::InconsistentBounds {
            n,
            p: p.to_string(),
            eps,
            lo,
            hi,
        });
    }

    let mut records: Vec<BoundRecord> = best_lower.into_iter().filter(|r| r.value == lo).collect();
    records.extend(best_upper.into_iter().filter(|r| r.value == hi));
    Ok(WdimInterval {
        n,
        p,
        metric,
        eps,
        lo,
        hi,
        records,
    })
}

/// Keep one record per source, the strongest one.
fn keep_strongest(
    list: &mut Vec<BoundRecord>,
    rec: BoundRecord,
    stronger: impl Fn(&BoundRecord, &BoundRecord) -> bool,
) {
    match list.iter_mut().find(|r| r.source == rec.source) {
        Some(old) if stronger(&rec, old) => *old = rec,
        Some(_) => {}
        None => list.push(rec),
    }
}

/// Enclosure of the Urysohn width `a_k = inf { eps : wdim_eps ≤ k }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthEstimate {
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_source: String,
    pub upper_source: String,
}

impl WidthEstimate {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Enclosures of `a_0, …, a_{n-1}`.
pub fn urysohn_widths(n: usize, p: Exponent, metric: Metric) -> Result<Vec<WidthEstimate>> {
    urysohn_widths_with(n, p, metric, IntervalOptions::default())
}

pub fn urysohn_widths_with(
    n: usize,
    p: Exponent,
    metric: Metric,
    opts: IntervalOptions,
) -> Result<Vec<WidthEstimate>> {
    check_dim(n)?;
    let exact = |k: usize, v: f64, src: &str| WidthEstimate {
        k,
        lower: v,
        upper: v,
        lower_source: src.into(),
        upper_source: src.into(),
    };
    if !p.is_finite() {
        return Ok((0..n).map(|k| exact(k, BALL_DIAMETER, source::CUBE)).collect());
    }
    if metric == Metric::SupMetric {
        return Ok((0..n)
            .map(|k| exact(k, sup_metric_threshold(k, p), source::COLLAPSE))
            .collect());
    }
    let lowers = lower_records(n, p, opts);
    let uppers = upper_records(n, p);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // a_k ≥ t whenever eps < t forces wdim ≥ k+1.
        let (lower, lower_source) = lowers
            .iter()
            .filter(|r| r.value > k)
            .filter_map(|r| r.threshold.map(|t| (t, r.source.clone())))
            .fold((0.0, String::from("trivial")), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
        let (upper, upper_source) = uppers
            .iter()
            .filter(|r| r.value <= k)
            .filter_map(|r| r.threshold.map(|t| (t, r.source.clone())))
            .fold((f64::INFINITY, String::new()), |acc, cur| if cur.0 < acc.0 { cur } else { acc });
        if lower > upper * (1.0 + 1e-12) {
            return Err(Error::InconsistentBounds {
                n,
                p: p.to_string(),
                eps: lower,
                lo: k + 1,
                hi: k,
            });
        }
        out.push(WidthEstimate {
            k,
            lower: lower.min(upper),
            upper,
            lower_source,
            upper_source,
        });
    }
    Ok(out)
}
