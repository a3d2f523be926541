use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::commands::PipelineCommand;
use crate::config::PipelineConfig;
use crate::error::CliError;

pub const MANIFEST_DIR: &str = "manifests";

/// Provenance record written next to every command's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: PipelineCommand,
    pub config: PipelineConfig,
    /// Absolute input path → SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output path relative to the output directory → SHA-256.
    pub outputs: BTreeMap<String, String>,
    pub wall_time_secs: f64,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

pub fn file_hash(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(socdim::sha256_hex(&bytes))
}

/// Tracks the inputs read and outputs written by one command.
pub struct Run {
    pub out: PathBuf,
    pub config: PipelineConfig,
    started: Instant,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(out: PathBuf, config: PipelineConfig) -> Self {
        Run {
            out,
            config,
            started: Instant::now(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    /// Hashes and records an input file.
    pub fn input<'p>(&mut self, path: &'p Path) -> Result<&'p Path, CliError> {
        if !path.is_file() {
            return Err(CliError::Input(format!("{}: no such file", path.display())));
        }
        if let std::collections::btree_map::Entry::Vacant(e) =
            self.inputs.entry(path.display().to_string())
        {
            e.insert(file_hash(path)?);
        }
        Ok(path)
    }

    /// Reserves an output path under the output directory.
    pub fn output(&mut self, rel: &str) -> Result<PathBuf, CliError> {
        let path = self.out.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        if !self.outputs.iter().any(|o| o == rel) {
            self.outputs.push(rel.to_string());
        }
        Ok(path)
    }

    pub fn tsv(&mut self, rel: &str, header: &[&str]) -> Result<Tsv, CliError> {
        let path = self.output(rel)?;
        Tsv::create(&path, header)
    }

    pub fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let path = self.output(rel)?;
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }

    /// Checks inputs are unchanged, hashes outputs, and writes the manifest.
    pub fn finish(self, command: &PipelineCommand) -> Result<Manifest, CliError> {
        for (p, h) in &self.inputs {
            if &file_hash(Path::new(p))? != h {
                return Err(CliError::Input(format!(
                    "{p} changed while the command ran"
                )));
            }
        }
        let mut outputs = BTreeMap::new();
        for rel in &self.outputs {
            outputs.insert(rel.clone(), file_hash(&self.out.join(rel))?);
        }
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.clone(),
            config: self.config,
            inputs: self.inputs,
            outputs,
            wall_time_secs: self.started.elapsed().as_secs_f64(),
        };
        let path = self
            .out
            .join(MANIFEST_DIR)
            .join(format!("{}.json", command.slug()));
        fs::create_dir_all(path.parent().expect("has parent"))
            .map_err(|e| CliError::io(&path, e))?;
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}

/// Tab-separated table writer with a fixed column count.
pub struct Tsv {
    path: PathBuf,
    w: BufWriter<File>,
    columns: usize,
}

impl Tsv {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, CliError> {
        let f = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut t = Tsv {
            path: path.to_path_buf(),
            w: BufWriter::new(f),
            columns: header.len(),
        };
        t.raw(&header.join("\t"))?;
        Ok(t)
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        assert_eq!(fields.len(), self.columns, "row width matches header");
        self.raw(&fields.join("\t"))
    }

    fn raw(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.w, "{line}").map_err(|e| CliError::io(&self.path, e))
    }

    pub fn close(mut self) -> Result<(), CliError> {
        self.w.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

/// Empty cell for missing values.
pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}
