use std::io::Write;

use clap::Args;
use serde::Serialize;
use widthlab::lp::norm;
use widthlab::{certify_against_bound, linf_family, min_diameter_search, Exponent, LinfVariant, SearchResult};

use crate::error::CliError;
use crate::output::{write_json, write_points_csv, Format, OutputArgs};

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    /// Defaults to 2, or to inf with --family.
    #[arg(long)]
    pub p: Option<Exponent>,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Certify a closed-form l^inf family instead of searching
    /// (`one_over` or `paper_2_over`).
    #[arg(long)]
    pub family: Option<LinfVariant>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct SearchDoc<'a> {
    n: usize,
    p: Exponent,
    /// "best found" for searches, the family name otherwise.
    label: String,
    restarts: Option<usize>,
    seed: u64,
    iterations: usize,
    diameter: f64,
    bound: f64,
    gap: f64,
    configuration: &'a [Vec<f64>],
    certificate: &'a [f64],
}

pub fn run(args: &SearchArgs) -> Result<(), CliError> {
    let (result, label, restarts): (SearchResult, String, Option<usize>) = match args.family {
        Some(variant) => {
            let p = args.p.unwrap_or(Exponent::Infinity);
            let family = linf_family(args.n, variant)?;
            let name = serde_json::to_value(variant).map_err(CliError::internal)?;
            let name = name.as_str().unwrap_or_default().to_string();
            (certify_against_bound(&family, p)?, format!("family {name}"), None)
        }
        None => {
            let p = args.p.unwrap_or(Exponent::TWO);
            let r = min_diameter_search(args.n, p, args.restarts, args.seed)?;
            (r, "best found".into(), Some(args.restarts))
        }
    };
    let p = result.config.exponent();
    let doc = SearchDoc {
        n: args.n,
        p,
        label,
        restarts,
        seed: result.seed,
        iterations: result.iterations,
        diameter: result.diameter,
        bound: result.bound,
        gap: result.gap,
        configuration: result.config.points(),
        certificate: result.certificate(),
    };

    let mut out = args.out.open()?;
    match args.out.format_or(Format::Json) {
        Format::Json => write_json(&mut *out, &doc)?,
        Format::Csv => {
            let norms: Vec<f64> = doc.configuration.iter().map(|x| norm(x, p)).collect();
            write_points_csv(&mut *out, doc.configuration, &norms)?;
        }
        Format::Text => {
            let w = &mut *out;
            let io = CliError::io;
            writeln!(w, "{} (n={}, p={})", doc.label, doc.n, doc.p).map_err(io)?;
            writeln!(w, "diameter  {}", doc.diameter).map_err(io)?;
            writeln!(w, "bound     {}", doc.bound).map_err(io)?;
            writeln!(w, "gap       {:e}", doc.gap).map_err(io)?;
            for (pt, l) in doc.configuration.iter().zip(doc.certificate) {
                let coords: Vec<String> = pt.iter().map(|v| format!("{v:+.9}")).collect();
                writeln!(w, "  [{}]  weight {l:.9}", coords.join(", ")).map_err(io)?;
            }
        }
    }
    out.flush().map_err(CliError::io)
}
