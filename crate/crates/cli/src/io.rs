use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cfguard::report::RunReport;
use sha2::{Digest, Sha256};

use crate::Format;

pub struct Input {
    pub text: String,
    pub digest: String,
}

pub fn read(path: &Path) -> Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    Ok(Input { text, digest })
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Colors from either a guard JSON object with a `colors` array or plain
/// whitespace-separated integers.
pub fn parse_colors(text: &str) -> Result<Vec<usize>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(trimmed).context("parsing color JSON")?;
        let Some(list) = value.get("colors").and_then(|c| c.as_array()) else {
            bail!("color JSON has no `colors` array");
        };
        return list
            .iter()
            .map(|c| c.as_u64().map(|c| c as usize).context("colors must be non-negative integers"))
            .collect();
    }
    text.split_whitespace()
        .map(|t| t.parse::<usize>().with_context(|| format!("`{t}` is not a color")))
        .collect()
}

pub fn colors_line(colors: &[usize]) -> String {
    let mut s = colors.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

pub fn emit(report: &RunReport, format: Format) {
    match format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
}
