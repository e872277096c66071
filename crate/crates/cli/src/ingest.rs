//! Ratings files and pair files.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use robord_core::model::MAX_FEATURES;
use robord_core::{Alternative, RatedDataset, Subset};

use crate::error::{io_err, CliError, Result};

/// Reads a ratings table with header `f_1,…,f_n,rating`. Feature cells are
/// `0` or `1`, ratings positive integers; the scale is the largest rating.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<RatedDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    read_ratings(file, &path.display().to_string())
}

pub fn read_ratings<R: Read>(input: R, name: &str) -> Result<RatedDataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(CliError::EmptyFile(name.to_string()));
    }
    let n = header.len() - 1;
    if !header[n].eq_ignore_ascii_case("rating") {
        return Err(CliError::Header(format!("last column must be `rating`, found `{}`", &header[n])));
    }
    if n == 0 || n > MAX_FEATURES {
        return Err(CliError::Header(format!("{n} feature columns, expected 1..={MAX_FEATURES}")));
    }
    let mut items = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        let cell = |column: usize, message: String| CliError::Cell {
            row,
            column: header[column].to_string(),
            message,
        };
        let mut a = Subset::EMPTY;
        for i in 0..n {
            match &record[i] {
                "1" => a = a.with(i),
                "0" => {}
                other => return Err(cell(i, format!("expected 0 or 1, found `{other}`"))),
            }
        }
        let rating: u32 = record[n]
            .parse()
            .ok()
            .filter(|&r| r > 0)
            .ok_or_else(|| cell(n, format!("expected a positive integer, found `{}`", &record[n])))?;
        items.push((a, rating));
    }
    if items.is_empty() {
        return Err(CliError::EmptyFile(name.to_string()));
    }
    let scale = items.iter().map(|&(_, r)| r).max().unwrap_or(1);
    Ok(RatedDataset::new(n, scale, items)?)
}

/// Writes a dataset in the format read by [`ingest_csv`].
pub fn write_ratings<W: std::io::Write>(data: &RatedDataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=data.n()).map(|i| format!("f_{i}")).collect();
    header.push("rating".into());
    w.write_record(&header)?;
    for &(a, r) in data.items() {
        let mut row: Vec<String> = (0..data.n()).map(|i| (a.contains(i) as u8).to_string()).collect();
        row.push(r.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err("<output>"))?;
    Ok(())
}

/// Reads query pairs: a header `a,b`, then one pair of bit strings of
/// length `n` per row (`1010` is `{a1,a3}`).
pub fn read_pairs<R: Read>(input: R, n: usize) -> Result<Vec<(Alternative, Alternative)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers()?.clone();
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(CliError::Cell {
                row,
                column: "*".into(),
                message: format!("expected 2 cells, found {}", record.len()),
            });
        }
        let alt = |k: usize| {
            let cell = &record[k];
            Subset::parse_bitstring(cell)
                .filter(|_| cell.len() == n)
                .ok_or_else(|| CliError::Cell {
                    row,
                    column: header.get(k).unwrap_or("?").to_string(),
                    message: format!("expected a bit string of length {n}, found `{cell}`"),
                })
        };
        pairs.push((alt(0)?, alt(1)?));
    }
    Ok(pairs)
}

pub fn read_pairs_file(path: impl AsRef<Path>, n: usize) -> Result<Vec<(Alternative, Alternative)>> {
    let path = path.as_ref();
    read_pairs(File::open(path).map_err(io_err(path))?, n)
}
