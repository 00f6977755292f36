use std::io::Write;

use clap::{Args, ValueEnum};
use serde::Serialize;
use widthlab::embeddings::{collapse_fiber_diameter, hypothesis_check_with, HypothesisOptions};
use widthlab::lp::{diameter_pair, norm, random_ball_point};
use widthlab::rng::stream_rng;
use widthlab::{
    b_lower, collapse_projection, empirical_c, hadamard_order_available, hadamard_set, min_diameter_search,
    regular_simplex, sample_fiber, wdim_interval, EmbeddingSpec, Exponent, LpVector, Metric,
    PointConfiguration,
};

use crate::error::CliError;
use crate::output::{write_json, Format, OutputArgs};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bounds,
    Hadamard,
    Fibers,
    Embeddings,
    Search,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value = "2")]
    pub p: Exponent,
    /// Random points per sampled check.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// One checked statement; `margin >= 0` exactly when it holds.
#[derive(Debug, Serialize)]
pub struct Claim {
    pub suite: &'static str,
    pub claim: String,
    pub passed: bool,
    pub margin: f64,
    pub detail: String,
}

#[derive(Serialize)]
struct Report<'a> {
    claims: &'a [Claim],
    passed: bool,
}

struct Collector {
    suite: &'static str,
    claims: Vec<Claim>,
}

impl Collector {
    fn check(&mut self, claim: impl Into<String>, margin: f64, detail: impl Into<String>) {
        self.claims.push(Claim {
            suite: self.suite,
            claim: claim.into(),
            passed: margin >= 0.0,
            margin,
            detail: detail.into(),
        });
    }
}

fn generators(n: usize, p: Exponent) -> Result<(PointConfiguration, &'static str), CliError> {
    if hadamard_order_available(n + 1) {
        Ok((hadamard_set(&widthlab::hadamard(n + 1)?, p)?, "hadamard"))
    } else {
        Ok((regular_simplex(n, p)?, "simplex"))
    }
}

fn bounds(c: &mut Collector, n: usize, p: Exponent) -> Result<(), CliError> {
    let grid: Vec<f64> = (1..=44).map(|i| f64::from(i) * 0.05).collect();
    for metric in [Metric::IntrinsicLp, Metric::SupMetric] {
        let rows = grid
            .iter()
            .map(|&eps| wdim_interval(n, p, metric, eps))
            .collect::<Result<Vec<_>, _>>()?;
        let ordered = rows.iter().map(|r| r.hi as f64 - r.lo as f64).fold(f64::INFINITY, f64::min);
        c.check(format!("lo <= hi ({metric})"), ordered, format!("{} eps values", rows.len()));
        let drops = rows
            .windows(2)
            .map(|w| (w[0].lo as f64 - w[1].lo as f64).min(w[0].hi as f64 - w[1].hi as f64))
            .fold(f64::INFINITY, f64::min);
        c.check(format!("bounds non-increasing in eps ({metric})"), drops, "");
        let top = rows.iter().find(|r| r.eps > 2.0).map_or(0, |r| r.hi);
        c.check(
            format!("wdim vanishes past eps = 2 ({metric})"),
            -(top as f64),
            format!("hi = {top}"),
        );
        let first = &rows[0];
        c.check(
            format!("small eps keeps full dimension ({metric})"),
            first.lo as f64 - n as f64,
            format!("eps {} gives [{}, {}]", first.eps, first.lo, first.hi),
        );
    }
    let worst = (1..=n.max(1))
        .map(|k| {
            let b = b_lower(k, p);
            (b - 1.0).min(2.0 - b) + TOL
        })
        .fold(f64::INFINITY, f64::min);
    c.check("1 <= b_lower(k, p) <= 2 for k <= n", worst, "");
    Ok(())
}

fn hadamard(c: &mut Collector, n: usize, p: Exponent) -> Result<(), CliError> {
    let top = (n + 1).max(20);
    let orders: Vec<usize> = (2..=top).filter(|&o| hadamard_order_available(o)).collect();
    for &order in &orders {
        let h = widthlab::hadamard(order)?;
        let off = h
            .gram()
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (v - if i == j { order as i64 } else { 0 }).abs()))
            .max()
            .unwrap_or(0);
        c.check(format!("H{order} H{order}^T = {order} I"), -(off as f64), "");
        let set = hadamard_set(&h, p)?;
        let unit = set.points().iter().map(|x| (norm(x, p) - 1.0).abs()).fold(0.0, f64::max);
        let sum = set.weighted_sum(&vec![1.0; order]);
        let drift = sum.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        c.check(
            format!("order {order} set: unit norms, zero sum"),
            TOL - unit.max(drift),
            format!("norm error {unit:.1e}, sum error {drift:.1e}"),
        );
        let d = set.diameter()?;
        let expected = 2.0 * (order as f64 / (2.0 * (order - 1) as f64)).powf(p.recip());
        c.check(
            format!("order {order} set diameter"),
            TOL - (d - expected).abs(),
            format!("{d} vs 2 (N / 2(N-1))^(1/p) = {expected}"),
        );
    }
    Ok(())
}

fn fibers(c: &mut Collector, n: usize, p: Exponent, samples: usize, seed: u64) -> Result<(), CliError> {
    for j in 1..=n {
        let spec = EmbeddingSpec::collapse(n, p, j)?;
        let fiber = sample_fiber(&LpVector::zeros(n, p)?, &spec, j, samples, seed)?;
        let d = diameter_pair(fiber.points(), Exponent::Infinity)?.2;
        let bound = collapse_fiber_diameter(n, p, j)?.diameter;
        c.check(
            format!("collapse depth {j}: sup diameter of the fiber over 0 within closed form"),
            bound + TOL - d,
            format!("sampled {d:.6}, closed form {bound:.6}"),
        );
    }
    let (gens, name) = generators(n, p)?;
    let expected = gens.diameter()?;
    let spec = EmbeddingSpec::skeleton(gens)?;
    let fiber = sample_fiber(&LpVector::zeros(n, p)?, &spec, 1, samples, seed)?;
    let d = diameter_pair(fiber.points(), p)?.2;
    c.check(
        format!("skeleton fiber over 0 ({name} generators) is below 2"),
        2.0 - d,
        format!("diameter {d:.6}"),
    );
    c.check(
        format!("skeleton fiber over 0 ({name} generators) spans the generator diameter to 1%"),
        0.01 * expected - (d - expected).abs(),
        format!("diameter {d:.6}, generator diameter {expected:.6}, b_lower {:.6}", b_lower(n, p)),
    );
    Ok(())
}

fn embeddings(c: &mut Collector, n: usize, p: Exponent, samples: usize, seed: u64) -> Result<(), CliError> {
    let (gens, name) = generators(n, p)?;
    let report = hypothesis_check_with(
        &gens,
        &HypothesisOptions {
            samples_per_size: samples.max(100),
            seed,
            ..HypothesisOptions::default()
        },
    )?;
    let norm_condition = if report.norm_condition.passed { "holds" } else { "fails" };
    c.check(
        format!("{name} generators pass the hemisphere test"),
        if report.hemisphere.passed { 0.0 } else { -1.0 },
        format!(
            "norm condition {norm_condition}, worst margin {:.3e}",
            report.norm_condition.worst_margin
        ),
    );

    let mut rng = stream_rng(seed, 0);
    let xs: Vec<LpVector> = (0..samples)
        .map(|_| LpVector::new(random_ball_point(&mut rng, n, p), p))
        .collect::<Result<_, _>>()?;
    let mut maps = vec![("skeleton".to_string(), EmbeddingSpec::skeleton(gens.clone())?)];
    for j in (2..=n).filter(|j| 2 * j < n + 1) {
        maps.push((format!("cascade depth {j}"), EmbeddingSpec::cascade(gens.clone(), j)?));
    }
    for (label, spec) in &maps {
        let (mut worst, mut rejected) = (0.0f64, 0usize);
        for x in &xs {
            match spec.apply(x) {
                Ok(y) => worst = worst.max(y.norm()),
                Err(widthlab::Error::HypothesisViolated(_)) => rejected += 1,
                Err(e) => return Err(e.into()),
            }
        }
        c.check(
            format!("{label} images stay in the ball"),
            1.0 + TOL - worst,
            format!("largest image norm {worst:.12}, {rejected} of {} points rejected", xs.len()),
        );
    }
    for j in 1..=n {
        let mut worst = 0.0f64;
        for x in &xs {
            let once = collapse_projection(x, j)?;
            let twice = collapse_projection(&once, j)?;
            let diff = once.coords().iter().zip(twice.coords()).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
            worst = worst.max(diff);
        }
        c.check(format!("collapse depth {j} is idempotent"), TOL - worst, "");
    }
    if n >= 3 {
        let k = n - 1;
        if 2 * (n - k) < n + 1 {
            let e = empirical_c(k, n, p, samples.max(32), seed)?;
            c.check(format!("empirical fiber diameter for k = {k} stays below 2"), 2.0 - e, format!("{e:.6}"));
        }
    }
    Ok(())
}

fn search(c: &mut Collector, n: usize, p: Exponent, restarts: usize, seed: u64) -> Result<(), CliError> {
    let result = match min_diameter_search(n, p, restarts, seed) {
        Ok(r) => r,
        Err(e @ widthlab::Error::BoundViolation { .. }) => {
            c.check("search never beats b_lower", -1.0, e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    c.check(
        "search never beats b_lower",
        result.gap + widthlab::hemisphere::BOUND_SLACK,
        format!("diameter {:.9}, bound {:.9}", result.diameter, result.bound),
    );
    let w = result.certificate();
    let sum: f64 = w.iter().sum();
    let neg = w.iter().fold(0.0f64, |a, &v| a.min(v));
    let centre = result.config.weighted_sum(w);
    let residual = centre.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    c.check(
        "certificate is a convex combination at the origin",
        1e-7 - residual.max((sum - 1.0).abs()).max(-neg),
        format!("residual {residual:.1e}"),
    );
    Ok(())
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    let suites: &[Suite] = match args.suite {
        Suite::All => &[Suite::Bounds, Suite::Hadamard, Suite::Fibers, Suite::Embeddings, Suite::Search],
        ref s => std::slice::from_ref(s),
    };
    let mut claims = Vec::new();
    for &suite in suites {
        let name = match suite {
            Suite::Bounds => "bounds",
            Suite::Hadamard => "hadamard",
            Suite::Fibers => "fibers",
            Suite::Embeddings => "embeddings",
            Suite::Search => "search",
            Suite::All => unreachable!(),
        };
        let mut c = Collector { suite: name, claims: Vec::new() };
        match suite {
            Suite::Bounds => bounds(&mut c, args.n, args.p)?,
            Suite::Hadamard => hadamard(&mut c, args.n, args.p)?,
            Suite::Fibers => fibers(&mut c, args.n, args.p, args.samples, args.seed)?,
            Suite::Embeddings => embeddings(&mut c, args.n, args.p, args.samples, args.seed)?,
            Suite::Search => search(&mut c, args.n, args.p, args.restarts, args.seed)?,
            Suite::All => unreachable!(),
        }
        claims.extend(c.claims);
    }
    let passed = claims.iter().all(|c| c.passed);

    let mut out = args.out.open()?;
    match args.out.format_or(Format::Text) {
        Format::Json => write_json(&mut *out, &Report { claims: &claims, passed })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["suite", "claim", "passed", "margin", "detail"]).map_err(CliError::csv)?;
            for cl in &claims {
                w.write_record([
                    cl.suite.to_string(),
                    cl.claim.clone(),
                    cl.passed.to_string(),
                    cl.margin.to_string(),
                    cl.detail.clone(),
                ])
                .map_err(CliError::csv)?;
            }
            w.flush().map_err(CliError::io)?;
        }
        Format::Text => {
            for cl in &claims {
                let mark = if cl.passed { "ok  " } else { "FAIL" };
                write!(out, "{mark} [{}] {}", cl.suite, cl.claim).map_err(CliError::io)?;
                if !cl.detail.is_empty() {
                    write!(out, ": {}", cl.detail).map_err(CliError::io)?;
                }
                writeln!(out).map_err(CliError::io)?;
            }
            let ok = claims.iter().filter(|c| c.passed).count();
            writeln!(out, "{ok}/{} claims hold", claims.len()).map_err(CliError::io)?;
        }
    }
    out.flush().map_err(CliError::io)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::claim("some claims failed"))
    }
}
