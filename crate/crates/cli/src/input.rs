//! Reading and writing polynomial files in any supported format.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use quadratizer::io::json::{from_json_into, to_json_string, PolyJson};
use quadratizer::io::{from_qubo_into, parse_into, QuboJson};
use quadratizer::{Error, Polynomial, VariableRegistry};

pub fn read_source(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Parses text, polynomial JSON or QUBO JSON into `reg`, reusing labels it already has.
pub fn load_into(source: &str, reg: &mut VariableRegistry) -> Result<Polynomial, Error> {
    if !source.trim_start().starts_with('{') {
        return parse_into(source, reg);
    }
    let value: serde_json::Value = serde_json::from_str(source).map_err(|e| Error::Schema(e.to_string()))?;
    if value.get("offset").is_some() {
        let q: QuboJson = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        from_qubo_into(&q, reg)
    } else {
        let doc: PolyJson = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        from_json_into(&doc, reg)
    }
}

pub fn load_file(path: &Path, reg: &mut VariableRegistry) -> Result<Polynomial> {
    let source = read_source(path)?;
    load_into(&source, reg).with_context(|| format!("loading {}", path.display()))
}

pub fn json(p: &Polynomial, reg: &VariableRegistry) -> String {
    to_json_string(p, reg)
}

/// Writes `body` plus a trailing newline to `out`, or to standard output.
pub fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    let mut body = body.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(path) if path.as_os_str() != "-" => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))
        }
        _ => io::stdout().write_all(body.as_bytes()).context("writing standard output"),
    }
}
