use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::output::{print_json, print_text, warn, Format, SCHEMA};

/// Fields every fragment carries; the rest is kept verbatim.
#[derive(Deserialize)]
struct Header {
    schema: u32,
    pass: bool,
    #[serde(default)]
    command: Option<String>,
}

#[derive(Serialize)]
struct Fragment {
    path: String,
    command: Option<String>,
    pass: bool,
    body: Value,
}

#[derive(Serialize)]
struct MergedReport {
    schema: u32,
    command: &'static str,
    pass: bool,
    fragments: Vec<Fragment>,
    warnings: Vec<String>,
}

fn load(path: &Path) -> Result<Fragment> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).with_context(|| format!("reading fragment {name}"))?;
    let body: Value =
        serde_json::from_str(&text).with_context(|| format!("malformed fragment {name}: not valid JSON"))?;
    let header = Header::deserialize(&body)
        .with_context(|| format!("malformed fragment {name}: missing or mistyped schema/pass"))?;
    if header.schema != SCHEMA {
        bail!("malformed fragment {name}: schema {} is not supported (expected {SCHEMA})", header.schema);
    }
    Ok(Fragment { path: name, command: header.command, pass: header.pass, body })
}

pub fn report(paths: &[PathBuf], format: Format) -> Result<bool> {
    let fragments = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    if fragments.is_empty() {
        warnings.push("no fragments given; the empty report passes vacuously".to_string());
    }
    for w in &warnings {
        warn(w);
    }
    let pass = fragments.iter().all(|f| f.pass);
    let merged = MergedReport { schema: SCHEMA, command: "report", pass, fragments, warnings };

    match format {
        Format::Json => print_json(&merged)?,
        Format::Text => {
            let mut s = String::new();
            for f in &merged.fragments {
                writeln!(s, "{:<5} {:<9} {}", f.pass, f.command.as_deref().unwrap_or("-"), f.path)?;
            }
            writeln!(s, "fragments: {}", merged.fragments.len())?;
            writeln!(s, "pass: {pass}")?;
            print_text(&s)?;
        }
    }
    Ok(pass)
}
