//! CSV files for observations and curves. Metadata rides along as leading
//! `# key=value` lines.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::harness::{CurveKind, CurveTable};

pub const OBSERVATION_HEADER: &str = "index,value";
pub const ROC_HEADER: &str = "pf,pd,detector";
pub const POWER_HEADER: &str = "snr_db,pd,detector";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Schema { line: usize, reason: String },
}

pub type Metadata = Vec<(String, String)>;

fn write_metadata(w: &mut impl Write, metadata: &[(String, String)]) -> io::Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

pub fn write_observation(
    w: &mut impl Write,
    samples: &[f64],
    metadata: &[(String, String)],
) -> io::Result<()> {
    write_metadata(w, metadata)?;
    writeln!(w, "{OBSERVATION_HEADER}")?;
    for (i, v) in samples.iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: io::Lines<R>,
    number: usize,
    metadata: Metadata,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self {
            inner: r.lines(),
            number: 0,
            metadata: Vec::new(),
        }
    }

    /// Next non-blank, non-comment line; comments before the header are
    /// collected as metadata.
    fn next_data(&mut self) -> Result<Option<String>, CsvError> {
        for line in self.inner.by_ref() {
            self.number += 1;
            let line = line?;
            let t = line.trim();
            if let Some(c) = t.strip_prefix('#') {
                if let Some((k, v)) = c.trim().split_once('=') {
                    self.metadata
                        .push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !t.is_empty() {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn schema(&self, reason: impl Into<String>) -> CsvError {
        CsvError::Schema {
            line: self.number,
            reason: reason.into(),
        }
    }

    fn expect_header(&mut self, header: &str) -> Result<(), CsvError> {
        match self.next_data()? {
            Some(h) if h == header => Ok(()),
            Some(h) => Err(self.schema(format!("expected header `{header}`, found `{h}`"))),
            None => Err(self.schema(format!("missing header `{header}`"))),
        }
    }
}

fn parse_f64<R: BufRead>(lines: &Lines<R>, field: &str) -> Result<f64, CsvError> {
    field
        .trim()
        .parse()
        .map_err(|_| lines.schema(format!("`{field}` is not a number")))
}

/// Samples and metadata of an observation file.
pub fn read_observation(r: impl BufRead) -> Result<(Vec<f64>, Metadata), CsvError> {
    let mut lines = Lines::new(r);
    lines.expect_header(OBSERVATION_HEADER)?;
    let mut samples = Vec::new();
    while let Some(row) = lines.next_data()? {
        let (index, value) = row
            .split_once(',')
            .ok_or_else(|| lines.schema("expected two columns"))?;
        if index.trim().parse::<usize>().ok() != Some(samples.len()) {
            return Err(lines.schema(format!("expected index {}, found `{index}`", samples.len())));
        }
        samples.push(parse_f64(&lines, value)?);
    }
    if samples.is_empty() {
        return Err(lines.schema("no samples"));
    }
    Ok((samples, lines.metadata))
}

/// All curves in one file; every curve must share `kind`.
pub fn write_curves(
    w: &mut impl Write,
    curves: &[CurveTable],
    metadata: &[(String, String)],
) -> io::Result<()> {
    write_metadata(w, metadata)?;
    let kind = curves.first().map_or(CurveKind::Roc, |c| c.kind);
    writeln!(
        w,
        "{}",
        if kind == CurveKind::Roc {
            ROC_HEADER
        } else {
            POWER_HEADER
        }
    )?;
    for c in curves {
        if c.kind != kind {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "mixed curve kinds in one file",
            ));
        }
        for (x, y) in &c.points {
            writeln!(w, "{x},{y},{}", c.detector)?;
        }
    }
    Ok(())
}

/// Curves in first-appearance order of their detector names.
pub fn read_curves(r: impl BufRead) -> Result<(Vec<CurveTable>, Metadata), CsvError> {
    let mut lines = Lines::new(r);
    let kind = match lines.next_data()? {
        Some(h) if h == ROC_HEADER => CurveKind::Roc,
        Some(h) if h == POWER_HEADER => CurveKind::Power,
        _ => return Err(lines.schema("expected a ROC or power header")),
    };
    let mut curves: Vec<CurveTable> = Vec::new();
    while let Some(row) = lines.next_data()? {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(lines.schema("expected three columns"));
        }
        let point = (parse_f64(&lines, fields[0])?, parse_f64(&lines, fields[1])?);
        let name = fields[2].trim();
        match curves.iter_mut().find(|c| c.detector == name) {
            Some(c) => c.points.push(point),
            None => curves.push(CurveTable {
                kind,
                detector: name.to_string(),
                points: vec![point],
                metadata: Vec::new(),
            }),
        }
    }
    Ok((curves, lines.metadata))
}
