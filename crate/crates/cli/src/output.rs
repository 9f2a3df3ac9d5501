use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;

/// Output directory plus the resolved config stamped into every artifact.
pub struct Artifacts {
    dir: PathBuf,
    config: Value,
}

/// serde_json's default map is ordered, so a round trip through Value sorts keys.
pub fn sorted<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

impl Artifacts {
    pub fn new(dir: &Path, config: Option<&ExperimentConfig>) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let config = match config {
            Some(c) => sorted(c)?,
            None => Value::Null,
        };
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            config,
        })
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut buf = format!(
            "# toa-lab {}\n# config {}\n",
            toa_lab::VERSION,
            serde_json::to_string(&self.config)?
        )
        .into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let doc = serde_json::json!({
            "version": toa_lab::VERSION,
            "config": self.config,
            "result": sorted(body)?,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Shortest round-trip form, so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}
