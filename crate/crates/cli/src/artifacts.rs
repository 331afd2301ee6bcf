use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const PLOT_DIR: &str = "plotdata";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// path relative to the output directory, `/`-separated
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Output directory whose every file ends up listed in the manifest.
pub struct Artifacts {
    root: PathBuf,
    files: Vec<FileEntry>,
}

#[derive(Deserialize)]
struct PreviousManifest {
    files: Vec<FileEntry>,
}

impl Artifacts {
    /// Creates `root`, first removing the files a previous run listed in its
    /// manifest. Anything else already there is refused rather than mixed
    /// into this run.
    pub fn create(root: &Path) -> Result<Self, CliError> {
        let manifest = root.join(MANIFEST);
        if manifest.exists() {
            let text = fs::read_to_string(&manifest)?;
            let prev: PreviousManifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("output: unreadable previous manifest: {e}")))?;
            for f in prev.files {
                let p = root.join(&f.path);
                if p.is_file() {
                    fs::remove_file(p)?;
                }
            }
            fs::remove_file(&manifest)?;
        }
        fs::create_dir_all(root.join(PLOT_DIR))?;
        let leftovers: Vec<String> = fs::read_dir(root)?
            .chain(fs::read_dir(root.join(PLOT_DIR))?)
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_file())
            .map(|e| e.path().display().to_string())
            .collect();
        if !leftovers.is_empty() {
            return Err(CliError::Config(format!(
                "output: {} is not empty and was not written by a previous run ({})",
                root.display(),
                leftovers.join(", ")
            )));
        }
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.root.join(rel), bytes)?;
        self.files.push(FileEntry {
            path: rel.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex(&Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn write_jsonl<T: Serialize>(&mut self, rel: &str, rows: &[T]) -> Result<(), CliError> {
        let mut out = Vec::new();
        for r in rows {
            serde_json::to_writer(&mut out, r)?;
            out.push(b'\n');
        }
        self.write(rel, &out)
    }

    pub fn write_csv(&mut self, rel: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut out = header.join(",");
        out.push('\n');
        for r in rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        self.write(rel, out.as_bytes())
    }

    /// Two-column plot file `plotdata/<name>.csv`.
    pub fn write_plot(&mut self, name: &str, x_label: &str, x: &[f64], y: &[f64]) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = x.iter().zip(y).map(|(a, b)| vec![num(*a), num(*b)]).collect();
        self.write_csv(&format!("{PLOT_DIR}/{name}.csv"), &[x_label, "value"], &rows)
    }

    /// Writes the manifest last, listing every file written before it.
    pub fn finish<M: Serialize>(self, build: impl FnOnce(Vec<FileEntry>) -> M) -> Result<PathBuf, CliError> {
        let manifest = build(self.files);
        let mut text = serde_json::to_vec_pretty(&manifest)?;
        text.push(b'\n');
        let path = self.root.join(MANIFEST);
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Shortest round-trip decimal form, so that files are byte-stable.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// File-name-safe rendering of a parameter value.
pub fn tag(v: f64) -> String {
    num(v).replace('.', "p").replace('-', "m")
}
