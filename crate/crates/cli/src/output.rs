use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

/// Version of the JSON documents written by every command.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; each command picks its own default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn open(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.output {
            Some(path) => {
                let file = File::create(path)
                    .map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))?;
                Box::new(BufWriter::new(file))
            }
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Serialize)]
struct Tagged<'a, T> {
    schema: u32,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON document with the schema tag in front.
pub fn write_json<T: Serialize>(out: &mut dyn Write, body: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, &Tagged { schema: SCHEMA, body }).map_err(CliError::internal)?;
    writeln!(out).map_err(CliError::io)
}

/// CSV rows `index, x1..xn, norm` for a list of points.
pub fn write_points_csv(out: &mut dyn Write, points: &[Vec<f64>], norms: &[f64]) -> Result<(), CliError> {
    let dim = points.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.push("norm".into());
    w.write_record(&header).map_err(CliError::csv)?;
    for (i, (pt, nrm)) in points.iter().zip(norms).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(pt.iter().map(f64::to_string));
        row.push(nrm.to_string());
        w.write_record(&row).map_err(CliError::csv)?;
    }
    w.flush().map_err(CliError::io)
}
