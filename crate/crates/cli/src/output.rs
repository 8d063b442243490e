//! Artifact writers. Every file carries the hash of the run config: JSON
//! objects in a `config_sha256` field, text and CSV files in a leading
//! `# config_sha256 <hex>` line.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

pub struct Artifacts {
    pub dir: PathBuf,
    pub hash: String,
    pub written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, hash: String) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            hash,
            written: Vec::new(),
        })
    }

    fn save(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn header(&self) -> String {
        format!("# config_sha256 {}\n", self.hash)
    }

    /// Serialize `value` (which must be a JSON object) with the hash added.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<Value> {
        let mut v = serde_json::to_value(value)?;
        if let Value::Object(map) = &mut v {
            map.insert("config_sha256".into(), Value::String(self.hash.clone()));
        }
        self.save(name, &serde_json::to_string_pretty(&v)?)?;
        Ok(v)
    }

    /// A JSON list whose entries each carry the hash.
    pub fn json_list<T: Serialize>(&mut self, name: &str, items: &[T]) -> Result<()> {
        let mut list = Vec::new();
        for item in items {
            let mut v = serde_json::to_value(item)?;
            if let Value::Object(map) = &mut v {
                map.insert("config_sha256".into(), Value::String(self.hash.clone()));
            }
            list.push(v);
        }
        self.save(name, &serde_json::to_string_pretty(&Value::Array(list))?)?;
        Ok(())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(self.header().into_bytes());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
        self.save(name, &String::from_utf8(bytes)?)?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let contents = format!("{}{body}", self.header());
        self.save(name, &contents)?;
        Ok(())
    }
}

/// Top-level verdict object printed to stdout and stored per subcommand.
pub fn verdict(command: &str, pass: bool, details: Map<String, Value>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("pass".into(), Value::Bool(pass));
    m.extend(details);
    m
}
