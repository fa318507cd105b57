//! Dataset CSV: header `f0,f1,…,f{d-1},label`, one row per sample.
//! Raw image CSV: header `label,p0,…,p{D-1}`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{LabeledDataset, Provenance};
use crate::error::{Error, Result};

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads the file and yields `(line, record)` pairs after checking arity.
fn read_records<R: Read>(reader: R, check_header: impl Fn(&csv::StringRecord) -> Result<()>) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(parse_err(1, "file is empty")),
        Some(r) => r.map_err(|e| csv_err(&e))?,
    };
    check_header(&header)?;
    let width = header.len();
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_err(&e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(parse_err(line, format!("expected {width} fields, found {}", rec.len())));
        }
        out.push((line, rec));
    }
    if out.is_empty() {
        return Err(parse_err(2, "no data rows"));
    }
    Ok(out)
}

fn csv_err(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_err(line, e.to_string())
}

fn parse_f64(line: u64, cell: &str) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("non-numeric cell {cell:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {cell:?}")));
    }
    Ok(v)
}

fn parse_label(line: u64, cell: &str, max: u8) -> Result<u8> {
    match cell.trim().parse::<u8>() {
        Ok(l) if l <= max => Ok(l),
        _ => Err(parse_err(line, format!("label {cell:?} is not an integer in 0..={max}"))),
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let records = read_records(File::open(path)?, |h| {
        let n = h.len();
        if n < 2 || &h[n - 1] != "label" {
            return Err(parse_err(1, "header must end with a `label` column"));
        }
        for (j, name) in h.iter().take(n - 1).enumerate() {
            if name != format!("f{j}") {
                return Err(parse_err(1, format!("expected header column f{j}, found {name:?}")));
            }
        }
        Ok(())
    })?;
    let mut features = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());
    for (line, rec) in &records {
        let n = rec.len();
        features.push(rec.iter().take(n - 1).map(|c| parse_f64(*line, c)).collect::<Result<Vec<_>>>()?);
        labels.push(parse_label(*line, &rec[n - 1], 1)?);
    }
    let provenance = Provenance::new("csv", None).with("path", path.display().to_string());
    LabeledDataset::new(features, labels, provenance)
}

/// Writes the dataset CSV with 17 significant digits per feature.
pub fn save_csv(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<String> = (0..dataset.dim()).map(|j| format!("f{j}")).collect();
    writeln!(w, "{},label", header.join(","))?;
    for (x, l) in dataset.features().iter().zip(dataset.labels()) {
        for v in x {
            write!(w, "{v:.16e},")?;
        }
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

/// Raw pixel rows with their digit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawImages {
    pub labels: Vec<u8>,
    pub pixels: Vec<Vec<f64>>,
}

impl RawImages {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Keeps rows labeled `negative` or `positive`, relabeled 0 and 1.
    pub fn binary(&self, negative: u8, positive: u8) -> Result<(Vec<Vec<f64>>, Vec<u8>)> {
        if negative == positive {
            return Err(Error::invalid("binary task needs two distinct digits"));
        }
        let (rows, labels): (Vec<_>, Vec<_>) = self
            .pixels
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == negative || l == positive)
            .map(|(p, &l)| (p.clone(), u8::from(l == positive)))
            .unzip();
        if !labels.contains(&0) || !labels.contains(&1) {
            return Err(Error::invalid(format!(
                "images contain no rows for digit {negative} or {positive}"
            )));
        }
        Ok((rows, labels))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let width = self.pixels.first().map_or(0, Vec::len);
        let header: Vec<String> = (0..width).map(|j| format!("p{j}")).collect();
        writeln!(w, "label,{}", header.join(","))?;
        for (p, l) in self.pixels.iter().zip(&self.labels) {
            write!(w, "{l}")?;
            for v in p {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn load_raw_images(path: impl AsRef<Path>) -> Result<RawImages> {
    let records = read_records(File::open(path)?, |h| {
        if h.len() < 2 || &h[0] != "label" {
            return Err(parse_err(1, "header must start with a `label` column"));
        }
        for (j, name) in h.iter().skip(1).enumerate() {
            if name != format!("p{j}") {
                return Err(parse_err(1, format!("expected header column p{j}, found {name:?}")));
            }
        }
        Ok(())
    })?;
    let mut labels = Vec::with_capacity(records.len());
    let mut pixels = Vec::with_capacity(records.len());
    for (line, rec) in &records {
        labels.push(parse_label(*line, &rec[0], 9)?);
        pixels.push(rec.iter().skip(1).map(|c| parse_f64(*line, c)).collect::<Result<Vec<_>>>()?);
    }
    Ok(RawImages { labels, pixels })
}
