use std::io::Write;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use widthlab::{wdim_interval, Exponent, Metric};

use crate::error::CliError;
use crate::output::{write_json, Format, OutputArgs};

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "2")]
    pub p: Exponent,
    /// `lp` (the ball's own distance) or `sup`.
    #[arg(long, default_value = "lp")]
    pub metric: Metric,
    /// A single eps value.
    #[arg(long, conflicts_with = "eps_grid")]
    pub eps: Option<f64>,
    /// `start:stop:step`, both ends included.
    #[arg(long)]
    pub eps_grid: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    p: Exponent,
    metric: Metric,
    eps: f64,
    lo: usize,
    hi: usize,
    sources: Vec<String>,
}

#[derive(Serialize)]
struct TableDoc<'a> {
    rows: &'a [Row],
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::usage(format!("eps grid must be start:stop:step, got {spec:?}"));
    let [a, b, step] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b, step): (f64, f64, f64) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
        step.trim().parse().map_err(|_| bad())?,
    );
    if !(step > 0.0 && a > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    if count > 1_000_000 {
        return Err(CliError::usage("eps grid has more than a million points"));
    }
    // Rounded so that 0.1 + 2 * 0.1 prints as 0.3.
    Ok((0..=count)
        .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

pub fn run(args: &TableArgs) -> Result<(), CliError> {
    let grid = match (&args.eps, &args.eps_grid) {
        (Some(e), None) => vec![*e],
        (None, Some(g)) => parse_grid(g)?,
        _ => return Err(CliError::usage("pass --eps or --eps-grid")),
    };
    let rows = grid
        .par_iter()
        .map(|&eps| {
            let iv = wdim_interval(args.n, args.p, args.metric, eps)?;
            Ok(Row {
                n: iv.n,
                p: iv.p,
                metric: iv.metric,
                eps,
                lo: iv.lo,
                hi: iv.hi,
                sources: iv.sources(),
            })
        })
        .collect::<Result<Vec<Row>, widthlab::Error>>()?;

    let mut out = args.out.open()?;
    match args.out.format_or(Format::Text) {
        Format::Json => write_json(&mut *out, &TableDoc { rows: &rows })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["n", "p", "metric", "eps", "lo", "hi", "sources"])
                .map_err(CliError::csv)?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    r.p.to_string(),
                    r.metric.to_string(),
                    r.eps.to_string(),
                    r.lo.to_string(),
                    r.hi.to_string(),
                    r.sources.join(";"),
                ])
                .map_err(CliError::csv)?;
            }
            w.flush().map_err(CliError::io)?;
        }
        Format::Text => {
            writeln!(out, "{:>3} {:>5} {:>6} {:>8} {:>3} {:>3}  sources", "n", "p", "metric", "eps", "lo", "hi")
                .map_err(CliError::io)?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>3} {:>5} {:>6} {:>8} {:>3} {:>3}  {}",
                    r.n,
                    r.p.to_string(),
                    r.metric.to_string(),
                    r.eps,
                    r.lo,
                    r.hi,
                    r.sources.join(", ")
                )
                .map_err(CliError::io)?;
            }
        }
    }
    out.flush().map_err(CliError::io)
}
