//! Output documents and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::CliError;

pub const TOOL: &str = "perc-lab";

pub enum Artifact {
    /// Wrapped into a document with the resolved config.
    Json(Value),
    Csv(Vec<u8>),
    Pgm(Vec<u8>),
}

fn provenance(cfg: &Config) -> Value {
    json!({
        "tool": TOOL,
        "version": perc_lab::VERSION,
        "config": cfg,
    })
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON value serializes");
    out.push(b'\n');
    out
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// `<path>.meta.json`, holding the provenance of a CSV or PGM output.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `bytes` to a temporary file next to `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let ctx = || format!("writing {}", path.display());
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir).map_err(|e| CliError::io(ctx(), e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(ctx(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(ctx(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(ctx(), e.error))?;
    Ok(())
}

/// Writes `artifact` where the config says and prints `summary` as one line,
/// on stdout when the data goes to a file and on stderr otherwise.
pub fn emit(cfg: &Config, artifact: Artifact, summary: &str) -> Result<(), CliError> {
    let (bytes, needs_sidecar) = match artifact {
        Artifact::Json(result) => {
            let mut doc = provenance(cfg);
            doc["result"] = result;
            (pretty(&doc), false)
        }
        Artifact::Csv(b) | Artifact::Pgm(b) => (b, true),
    };
    match &cfg.output.path {
        Some(path) => {
            write_atomic(path, &bytes)?;
            if needs_sidecar {
                write_atomic(&sidecar_path(path), &pretty(&provenance(cfg)))?;
            }
            println!("{summary} -> {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes).map_err(|e| CliError::io("writing stdout", e))?;
            stdout.flush().map_err(|e| CliError::io("writing stdout", e))?;
            if needs_sidecar {
                eprintln!("{}", serde_json::to_string(&provenance(cfg)).expect("JSON value serializes"));
            }
            eprintln!("{summary}");
        }
    }
    Ok(())
}
