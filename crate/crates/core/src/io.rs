//! File formats: lattice data in CSV (with a JSON sidecar), 8-bit PGM
//! images, and CSV output.
//!
//! A grid CSV has the header `k,j,value`. Its metadata lives next to it in
//! a file with the same stem and a `.json` extension:
//!
//! ```json
//! { "w": 10.0, "kind": "samples", "bounds": [-5, 40, -5, 40] }
//! ```
//!
//! `kind` is `samples` or `cell_averages`; `bounds` (`kmin, kmax, jmin,
//! jmax`) is optional and defaults to the index range present in the CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{FieldKind, GridField};

/// Formats a float with 17 significant digits, which round-trips exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header and rows as comma-separated values with LF endings.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    wtr.write_record(header).map_err(csv_err)?;
    for row in rows {
        wtr.write_record(row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    Samples,
    CellAverages,
}

impl From<KindTag> for FieldKind {
    fn from(t: KindTag) -> Self {
        match t {
            KindTag::Samples => FieldKind::Samples,
            KindTag::CellAverages => FieldKind::CellAverages,
        }
    }
}

impl From<FieldKind> for KindTag {
    fn from(k: FieldKind) -> Self {
        match k {
            FieldKind::Samples => KindTag::Samples,
            FieldKind::CellAverages => KindTag::CellAverages,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub w: f64,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[i64; 4]>,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

#[derive(Debug, Deserialize)]
struct Record {
    k: i64,
    j: i64,
    value: f64,
}

/// Reads a `k,j,value` CSV and its JSON sidecar.
pub fn read_grid_csv(path: &Path) -> Result<GridField> {
    let meta_path = sidecar_path(path);
    let meta_text = std::fs::read_to_string(&meta_path)
        .map_err(|e| Error::Io(format!("{}: {e}", meta_path.display())))?;
    let meta: GridMeta = serde_json::from_str(&meta_text)
        .map_err(|e| Error::Parse(format!("{}: {e}", meta_path.display())))?;
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let records: Vec<Record> = rdr
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    grid_from_records(&meta, &records)
}

fn grid_from_records(meta: &GridMeta, records: &[Record]) -> Result<GridField> {
    let bounds = match meta.bounds {
        Some([a, b, c, d]) => (a, b, c, d),
        None => {
            if records.is_empty() {
                return Err(Error::Parse("grid CSV has no rows and no bounds".into()));
            }
            records.iter().fold(
                (i64::MAX, i64::MIN, i64::MAX, i64::MIN),
                |(a, b, c, d), r| (a.min(r.k), b.max(r.k), c.min(r.j), d.max(r.j)),
            )
        }
    };
    let mut field = GridField::new(meta.w, meta.kind.into(), bounds)?;
    for r in records {
        field
            .set(r.k, r.j, r.value)
            .map_err(|_| Error::Parse(format!("row ({}, {}) lies outside bounds {bounds:?}", r.k, r.j)))?;
    }
    Ok(field)
}

/// Writes a field as `k,j,value` rows plus its sidecar. Missing indices are
/// skipped.
pub fn write_grid_csv(path: &Path, field: &GridField) -> Result<()> {
    let (kmin, kmax, jmin, jmax) = field.bounds();
    let mut rows = Vec::new();
    for k in kmin..=kmax {
        for j in jmin..=jmax {
            if let Ok(v) = field.get(k, j) {
                rows.push(vec![k.to_string(), j.to_string(), fmt_f64(v)]);
            }
        }
    }
    let file = std::fs::File::create(path)?;
    write_csv(file, &["k", "j", "value"], &rows)?;
    let meta = GridMeta {
        w: field.w(),
        kind: field.kind().into(),
        bounds: Some([kmin, kmax, jmin, jmax]),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(sidecar_path(path), text)?;
    Ok(())
}

/// Reads an 8-bit grayscale PGM. Pixel column `i`, row `j` becomes lattice
/// index `(k, j) = (i, j)` with value `pixel / 255`, sampled at rate `w`.
pub fn read_pgm(path: &Path, w: f64, kind: FieldKind) -> Result<GridField> {
    let img = image::ImageReader::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        .with_guessed_format()?
        .decode()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .into_luma8();
    let (width, height) = img.dimensions();
    if width == 0 || height == 0 {
        return Err(Error::Parse(format!("{}: empty image", path.display())));
    }
    let mut field = GridField::new(w, kind, (0, width as i64 - 1, 0, height as i64 - 1))?;
    for (i, j, px) in img.enumerate_pixels() {
        field.set(i as i64, j as i64, px.0[0] as f64 / 255.0)?;
    }
    Ok(field)
}
