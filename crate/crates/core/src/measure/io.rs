//! CSV serialization: header `x0,...,x{N-1}` with an optional trailing `w`
//! weight column. Files without weights load with uniform mass 1.

use std::io::{Read, Write};
use std::path::Path;

use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Reads a measure, declaring intrinsic dimension `n`.
pub fn read_csv(path: &Path, n: usize) -> Result<DiscreteMeasure> {
    let file = std::fs::File::open(path)?;
    read_csv_from(file, n)
}

pub fn read_csv_from<R: Read>(reader: R, n: usize) -> Result<DiscreteMeasure> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let has_weight = headers.iter().next_back() == Some("w");
    let ambient = headers.len() - usize::from(has_weight);
    for (i, h) in headers.iter().take(ambient).enumerate() {
        if h != format!("x{i}") {
            return Err(Error::BadParams(format!("unexpected CSV column '{h}', expected 'x{i}'")));
        }
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::BadParams(format!("row {}: cannot parse '{s}' as a number", row + 1)))
        };
        let coords: Vec<f64> = rec.iter().take(ambient).map(parse).collect::<Result<_>>()?;
        points.push(Point::from_vec(coords));
        if has_weight {
            weights.push(parse(&rec[ambient])?);
        }
    }
    if has_weight {
        DiscreteMeasure::new(points, weights, n)
    } else {
        DiscreteMeasure::uniform(points, n)
    }
}

pub fn write_csv(mu: &DiscreteMeasure, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv_to(mu, file)
}

/// Writes coordinates and weights using the shortest decimal representation
/// that parses back to the identical `f64`.
pub fn write_csv_to<W: Write>(mu: &DiscreteMeasure, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..mu.ambient_dim()).map(|i| format!("x{i}")).collect();
    header.push("w".into());
    wtr.write_record(&header)?;
    for (p, w) in mu.points().iter().zip(mu.weights()) {
        let mut row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        row.push(w.to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
