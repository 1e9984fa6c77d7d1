use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::run::{Report, Rows, Violation};

pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    config: &'a RunConfig,
    rows: &'a [T],
    violations: &'a [Violation],
}

fn csv_rows<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

fn json_doc<T: Serialize>(
    out: &mut dyn Write,
    cfg: &RunConfig,
    rows: &[T],
    violations: &[Violation],
) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, &Document { config: cfg, rows, violations })?;
    writeln!(out)
}

pub fn write(mut out: Box<dyn Write>, cfg: &RunConfig, report: &Report) -> io::Result<()> {
    match (&report.rows, cfg.format) {
        (Rows::Table(rows), Format::Csv) => csv_rows(&mut out, rows)?,
        (Rows::Constants(rows), Format::Csv) => csv_rows(&mut out, rows)?,
        (Rows::Table(rows), Format::Json) => json_doc(&mut out, cfg, rows, &report.violations)?,
        (Rows::Constants(rows), Format::Json) => json_doc(&mut out, cfg, rows, &report.violations)?,
    }
    out.flush()
}
