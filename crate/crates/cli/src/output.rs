//! Report emission and atomic file writes.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::canonical;
use crate::run::Item;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub const CSV_HEADER: [&str; 7] = ["scenario", "theorem", "hypotheses_ok", "lhs", "rhs", "constant", "pass"];

pub fn to_json(items: &[Item]) -> Result<String> {
    let arr = items.iter().map(Item::to_value).collect::<Result<Vec<_>>>()?;
    Ok(canonical::value_to_string(&Value::Array(arr)))
}

pub fn to_csv(items: &[Item]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for it in items {
        let r = &it.report;
        w.write_record([
            r.scenario.clone(),
            r.theorem.clone(),
            r.hypotheses_ok().to_string(),
            canonical::float(r.lhs),
            canonical::float(r.rhs),
            canonical::float(r.constant_used),
            r.pass.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn render(items: &[Item], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(items),
        Format::Csv => to_csv(items),
    }
}

/// Write via a temporary file in the target directory and a rename, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
