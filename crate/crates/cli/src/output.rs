//! File writers. Every CSV starts with a `# schema_version=..; config_hash=..`
//! comment line and every JSON document carries the same two fields, so any
//! output can be traced back to the config that produced it.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::SCHEMA_VERSION;
use crate::error::CliError;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub struct OutDir {
    dir: PathBuf,
    hash: String,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    schema_version: u32,
    config_hash: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

impl OutDir {
    pub fn create(dir: &Path, hash: String) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(OutDir { dir: dir.to_path_buf(), hash })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn csv<I>(&self, name: &str, header: &[String], rows: I) -> Result<PathBuf, CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut buf = format!("# schema_version={SCHEMA_VERSION}; config_hash={}\n", self.hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let err = |e: csv::Error| CliError::io(&self.path(name), std::io::Error::other(e));
            w.write_record(header).map_err(err)?;
            for row in rows {
                w.write_record(&row).map_err(err)?;
            }
            w.flush().map_err(|e| CliError::io(&self.path(name), e))?;
        }
        self.write(name, &buf)
    }

    /// Pretty JSON of `body` with the schema fields merged in; `body` must
    /// serialize to an object.
    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf, CliError> {
        let doc = Stamped { schema_version: SCHEMA_VERSION, config_hash: &self.hash, body };
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::io(&self.path(name), std::io::Error::other(e)))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}
