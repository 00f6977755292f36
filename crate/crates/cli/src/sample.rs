use std::io::Write;

use clap::{Args, ValueEnum};
use serde::Serialize;
use widthlab::hadamard::describe;
use widthlab::lp::{diameter_pair, norm, random_ball_point};
use widthlab::rng::stream_rng;
use widthlab::{
    dim3_set, hadamard_set, regular_simplex, sample_fiber, EmbeddingSpec, Exponent, LpVector,
    PointConfiguration,
};

use crate::error::CliError;
use crate::output::{write_json, write_points_csv, Format, OutputArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapName {
    Collapse,
    Skeleton,
    Cascade,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generators {
    /// Regular simplex rescaled to the unit sphere.
    Simplex,
    /// Hadamard set of order n + 1.
    Hadamard,
    /// The four-point set in dimension 3.
    Dim3,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long, value_enum)]
    pub map: MapName,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "2")]
    pub p: Exponent,
    /// Depth of the collapse or cascade; the skeleton map has depth 1.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, value_enum, default_value = "simplex")]
    pub generators: Generators,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Comma-separated coordinates; random ball points are used otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Number of random points when --point is absent.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FiberArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// `0` for the origin or comma-separated coordinates.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub target: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HadamardArgs {
    #[arg(long)]
    pub order: usize,
    /// Export the normalized point set instead of the matrix.
    #[arg(long)]
    pub set: bool,
    #[arg(long, default_value = "1")]
    pub p: Exponent,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_coords(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("cannot parse coordinate {t:?}")))
        })
        .collect()
}

fn resolve_dim(given: Option<usize>, implied: Option<usize>) -> Result<usize, CliError> {
    match (given, implied) {
        (Some(a), Some(b)) if a != b => Err(CliError::usage(format!("--n {a} does not match {b} coordinates"))),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(CliError::usage("pass --n")),
    }
}

fn build_spec(args: &MapArgs, n: usize) -> Result<EmbeddingSpec, CliError> {
    let p = args.p;
    if args.map == MapName::Collapse {
        return Ok(EmbeddingSpec::collapse(n, p, args.j)?);
    }
    let gens = match args.generators {
        Generators::Simplex => regular_simplex(n, p)?,
        Generators::Hadamard => hadamard_set(&widthlab::hadamard(n + 1)?, p)?,
        Generators::Dim3 if n == 3 => dim3_set(p)?,
        Generators::Dim3 => return Err(CliError::usage("the dim3 generators need --n 3")),
    };
    Ok(match args.map {
        MapName::Skeleton if args.j == 1 => EmbeddingSpec::skeleton(gens)?,
        MapName::Skeleton => return Err(CliError::usage("the skeleton map has depth 1")),
        _ => EmbeddingSpec::cascade(gens, args.j)?,
    })
}

#[derive(Serialize)]
struct Mapped {
    input: Vec<f64>,
    image: Vec<f64>,
    norm: f64,
}

#[derive(Serialize)]
struct EmbedDoc<'a> {
    map: MapName,
    n: usize,
    p: Exponent,
    j: usize,
    points: &'a [Mapped],
}

pub fn embed(args: &EmbedArgs) -> Result<(), CliError> {
    let given = args.point.as_deref().map(parse_coords).transpose()?;
    let n = resolve_dim(args.map.n, given.as_ref().map(Vec::len))?;
    let p = args.map.p;
    let spec = build_spec(&args.map, n)?;
    let inputs = match given {
        Some(x) => vec![x],
        None => {
            let mut rng = stream_rng(args.map.seed, 0);
            (0..args.samples).map(|_| random_ball_point(&mut rng, n, p)).collect()
        }
    };
    let mapped = inputs
        .into_iter()
        .map(|x| {
            let image = spec.apply(&LpVector::new(x.clone(), p)?)?;
            Ok(Mapped {
                norm: image.norm(),
                image: image.into_coords(),
                input: x,
            })
        })
        .collect::<Result<Vec<_>, widthlab::Error>>()?;

    let mut out = args.out.open()?;
    match args.out.format_or(Format::Csv) {
        Format::Json => write_json(
            &mut *out,
            &EmbedDoc {
                map: args.map.map,
                n,
                p,
                j: args.map.j,
                points: &mapped,
            },
        )?,
        Format::Csv => {
            let images: Vec<Vec<f64>> = mapped.iter().map(|m| m.image.clone()).collect();
            let norms: Vec<f64> = mapped.iter().map(|m| m.norm).collect();
            write_points_csv(&mut *out, &images, &norms)?;
        }
        Format::Text => {
            for m in &mapped {
                writeln!(out, "{:?} -> {:?}  norm {}", m.input, m.image, m.norm).map_err(CliError::io)?;
            }
        }
    }
    out.flush().map_err(CliError::io)
}

#[derive(Serialize)]
struct FiberDoc<'a> {
    map: MapName,
    n: usize,
    p: Exponent,
    j: usize,
    target: &'a [f64],
    samples: usize,
    seed: u64,
    diameter: f64,
    points: &'a [Vec<f64>],
}

pub fn fibers(args: &FiberArgs) -> Result<(), CliError> {
    let explicit = if args.target.trim() == "0" {
        None
    } else {
        Some(parse_coords(&args.target)?)
    };
    let n = resolve_dim(args.map.n, explicit.as_ref().map(Vec::len))?;
    let p = args.map.p;
    let spec = build_spec(&args.map, n)?;
    let target = explicit.unwrap_or_else(|| vec![0.0; n]);
    let fiber: PointConfiguration = sample_fiber(
        &LpVector::new(target.clone(), p)?,
        &spec,
        args.map.j,
        args.samples,
        args.map.seed,
    )?;
    let diameter = if fiber.len() >= 2 {
        diameter_pair(fiber.points(), p)?.2
    } else {
        0.0
    };
    let summary = format!(
        "{} points of the {:?} fiber over {:?} (n={n}, p={p}, j={}): diameter {diameter}",
        fiber.len(),
        args.map.map,
        target,
        args.map.j
    )
    .to_lowercase();

    let mut out = args.out.open()?;
    match args.out.format_or(Format::Csv) {
        Format::Json => write_json(
            &mut *out,
            &FiberDoc {
                map: args.map.map,
                n,
                p,
                j: args.map.j,
                target: &target,
                samples: fiber.len(),
                seed: args.map.seed,
                diameter,
                points: fiber.points(),
            },
        )?,
        Format::Csv => {
            eprintln!("{summary}");
            let norms: Vec<f64> = fiber.points().iter().map(|x| norm(x, p)).collect();
            write_points_csv(&mut *out, fiber.points(), &norms)?;
        }
        Format::Text => writeln!(out, "{summary}").map_err(CliError::io)?,
    }
    out.flush().map_err(CliError::io)
}

#[derive(Serialize)]
struct MatrixDoc {
    order: usize,
    normalized: bool,
    rows: Vec<Vec<i8>>,
}

#[derive(Serialize)]
struct SetDoc<'a> {
    order: usize,
    p: Exponent,
    diameter: f64,
    points: &'a [Vec<f64>],
}

pub fn hadamard(args: &HadamardArgs) -> Result<(), CliError> {
    let h = widthlab::hadamard(args.order)?;
    let mut out = args.out.open()?;
    if args.set {
        let set = hadamard_set(&h, args.p)?;
        let diameter = set.diameter()?;
        match args.out.format_or(Format::Csv) {
            Format::Json => write_json(
                &mut *out,
                &SetDoc {
                    order: h.order(),
                    p: args.p,
                    diameter,
                    points: set.points(),
                },
            )?,
            Format::Csv | Format::Text => {
                let norms: Vec<f64> = set.points().iter().map(|x| norm(x, args.p)).collect();
                write_points_csv(&mut *out, set.points(), &norms)?;
            }
        }
    } else {
        match args.out.format_or(Format::Text) {
            Format::Json => write_json(
                &mut *out,
                &MatrixDoc {
                    order: h.order(),
                    normalized: h.is_normalized(),
                    rows: (0..h.order()).map(|i| h.row(i).to_vec()).collect(),
                },
            )?,
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                for i in 0..h.order() {
                    w.write_record(h.row(i).iter().map(i8::to_string)).map_err(CliError::csv)?;
                }
                w.flush().map_err(CliError::io)?;
            }
            Format::Text => out.write_all(describe(&h).as_bytes()).map_err(CliError::io)?,
        }
    }
    out.flush().map_err(CliError::io)
}
