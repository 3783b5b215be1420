use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// Environment variable naming the default report directory.
pub const CACHE_DIR_VAR: &str = "LRTOWER_CACHE_DIR";

/// `--out`, else `$LRTOWER_CACHE_DIR`, else no files.
pub fn output_dir(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from))
}

/// Wraps a result with the resolved configuration and tool version.
pub fn envelope(config: &Value, result: Value) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "result": result,
    })
}

/// Writes `contents` to `dir/name` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

/// A command's output: the JSON report, plus optional CSV and plain text.
pub struct Artifacts {
    pub stem: &'static str,
    pub json: Value,
    pub csv: Option<String>,
    /// Printed instead of the JSON when present.
    pub text: Option<String>,
}

impl Artifacts {
    pub fn json(stem: &'static str, json: Value) -> Self {
        Self { stem, json, csv: None, text: None }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn emit(self, config: &Value, dir: Option<&Path>) -> std::io::Result<()> {
        let report = serde_json::to_string_pretty(&envelope(config, self.json))? + "\n";
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        match &self.text {
            Some(text) => out.write_all(text.as_bytes())?,
            None => out.write_all(report.as_bytes())?,
        }
        if let Some(dir) = dir {
            let path = write_atomic(dir, &format!("{}.json", self.stem), &report)?;
            eprintln!("wrote {}", path.display());
            if let Some(csv) = &self.csv {
                let path = write_atomic(dir, &format!("{}.csv", self.stem), csv)?;
                eprintln!("wrote {}", path.display());
            }
        }
        Ok(())
    }
}
