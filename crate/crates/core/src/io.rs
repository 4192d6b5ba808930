//! CSV emission and ingestion for result rows.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Writes rows with a header line.
pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("csv flush: {e}")))
}

pub fn write_csv_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    write_csv(f, rows)
}

pub fn read_csv<R: Read, T: DeserializeOwned>(reader: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(reader).deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn read_csv_file<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    read_csv(f)
}

/// Serializes a ±1/0 vector as a `;`-separated cell.
pub(crate) fn join_signs<S: serde::Serializer>(v: &[i8], s: S) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    s.serialize_str(&text.join(";"))
}

pub(crate) fn split_signs<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<i8>, D::Error> {
    let text: String = serde::Deserialize::deserialize(d)?;
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';').map(|t| t.parse::<i8>().map_err(serde::de::Error::custom)).collect()
}
