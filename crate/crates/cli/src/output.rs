//! Report files. JSON reports carry the config inline; CSV tables get a
//! `<out>.meta.json` sidecar with the config and a summary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::Failure;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339()
}

pub fn emit_json<T: Serialize>(cfg: &ExperimentConfig, result: &T) -> Result<(), Failure> {
    let doc = json!({ "config": cfg, "result": result });
    let text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    match &cfg.out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| io_failure(path, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Writes the table through `write`, then the sidecar when `--out` is set.
pub fn emit_csv<F>(cfg: &ExperimentConfig, summary: Value, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> Result<(), String>,
{
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            let mut w = BufWriter::new(file);
            write(&mut w).map_err(|e| io_failure(path, e))?;
            w.flush().map_err(|e| io_failure(path, e))?;
            let meta = json!({
                "config": cfg,
                "summary": summary,
                "timestamp": timestamp(),
            });
            let meta_path = sidecar(path);
            let text = serde_json::to_string_pretty(&meta).expect("meta serializes");
            std::fs::write(&meta_path, text + "\n").map_err(|e| io_failure(&meta_path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|e| Failure::Config(format!("stdout: {e}")))?;
            eprintln!(
                "{}",
                serde_json::to_string(&summary).expect("summary serializes")
            );
            Ok(())
        }
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// `{:.16e}`, or empty for a missing value.
pub fn float(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.16e}")).unwrap_or_default()
}
