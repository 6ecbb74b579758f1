//! JSON artifacts and run manifests.
//!
//! Artifacts go to `--out` (or standard output when absent) as pretty JSON
//! with a trailing newline. Next to each artifact a `<out>.manifest.json`
//! records the flags that reproduce it. Timing is only printed, never
//! written, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::commands::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub schema: &'static str,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub r: Option<u64>,
    pub variant: Option<&'static str>,
    /// Every flag of the run, defaults included.
    pub flags: BTreeMap<String, String>,
    pub outcome: String,
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &'static str, schema: &'static str) -> Self {
        Self { command, schema, seed: None, n: None, r: None, variant: None, flags: BTreeMap::new(), outcome: String::new(), artifacts: Vec::new() }
    }

    pub fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes the artifact and its manifest, or prints the artifact when `out`
/// is `None`. Returns the artifact text.
pub fn emit<T: Serialize>(
    artifact: &T,
    mut manifest: RunManifest,
    out: Option<&Path>,
    started: Instant,
    summary: &str,
) -> Result<String, CliError> {
    let text = to_json(artifact)?;
    match out {
        None => print!("{text}"),
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            manifest.artifacts.push(path.display().to_string());
            let mpath = manifest_path(path);
            fs::write(&mpath, to_json(&manifest)?).map_err(|e| CliError::Io(mpath.display().to_string(), e))?;
            println!("{summary}");
            println!("wrote {} ({:.1?})", path.display(), started.elapsed());
        }
    }
    Ok(text)
}
