//! Versioned CSV tables and JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::{CliResult, Common, Format};

/// Schema version written into every CSV header comment.
pub const SCHEMA_VERSION: u32 = 1;

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// CSV with a `# qimage <kind> v<N>` first line, then a header row.
pub fn write_csv<R: Serialize>(path: &Path, kind: &str, rows: &[R]) -> CliResult<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "# qimage {kind} v{SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` as `<out>/<name>.csv` or `<out>/<name>.json`.
pub fn write_table<R: Serialize>(common: &Common, name: &str, rows: &[R]) -> CliResult<PathBuf> {
    let path = match common.format {
        Format::Csv => {
            let path = common.out.join(format!("{name}.csv"));
            write_csv(&path, name, rows)?;
            path
        }
        Format::Json => {
            let path = common.out.join(format!("{name}.json"));
            write_json(&path, rows)?;
            path
        }
    };
    println!("{}", path.display());
    Ok(path)
}
