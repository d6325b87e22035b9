use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Version of every artifact the CLI writes.
pub const FORMAT_VERSION: u32 = 1;

/// Parameters of one invocation, embedded in every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: Value,
}

impl RunConfig {
    pub fn new<A: Serialize>(command: &'static str, args: &A) -> Result<Self> {
        Ok(Self {
            tool: "geolip",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args: serde_json::to_value(args)?,
        })
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes `{format_version, run_config, <body fields>}` as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, cfg: &RunConfig, body: &T) -> Result<()> {
    let mut doc = json!({ "format_version": FORMAT_VERSION, "run_config": cfg });
    match serde_json::to_value(body)? {
        Value::Object(fields) => doc.as_object_mut().unwrap().extend(fields),
        other => {
            doc["result"] = other;
        }
    }
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Opens a CSV-like file and writes the `#` header lines.
pub fn create_with_header(path: &Path, cfg: &RunConfig) -> Result<BufWriter<File>> {
    let mut w = create(path)?;
    write_header(&mut w, cfg)?;
    Ok(w)
}

pub fn write_header<W: Write>(w: &mut W, cfg: &RunConfig) -> Result<()> {
    writeln!(w, "# format_version: {FORMAT_VERSION}")?;
    writeln!(w, "# run_config: {}", serde_json::to_string(cfg)?)?;
    Ok(())
}
