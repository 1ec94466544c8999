//! Output files: provenance stamping and all-or-nothing writes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Default output directory when a command is given no explicit path.
pub const OUT_DIR_VAR: &str = "NETGROWTH_OUT_DIR";

/// Recorded at the top of every output: tool version, seed, command line.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub command: String,
}

impl Provenance {
    pub fn new(seed: Option<u64>) -> Self {
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        Self { tool: "netgrowth".into(), version: env!("CARGO_PKG_VERSION").into(), seed, command }
    }

    /// Single `#` comment line for text outputs.
    pub fn comment(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("# {} {} | seed: {} | command: {}", self.tool, self.version, seed, self.command)
    }
}

/// JSON document with a leading `provenance` member.
#[derive(Serialize)]
pub struct Stamped<'a, T: Serialize> {
    pub provenance: &'a Provenance,
    #[serde(flatten)]
    pub body: T,
}

pub fn to_json<T: Serialize>(provenance: &Provenance, body: T) -> String {
    let doc = Stamped { provenance, body };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable report");
    text.push('\n');
    text
}

/// Resolves an output path: explicit paths are used as given, otherwise the
/// default name goes under `$NETGROWTH_OUT_DIR` (or the working directory).
pub fn resolve(explicit: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => default_dir().join(default_name),
    }
}

pub fn default_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Output files staged next to their destinations and renamed into place by
/// [`commit`](Self::commit). Dropping without committing deletes the staged
/// files, so a failed command leaves no partial outputs behind.
#[derive(Default)]
pub struct OutputSet {
    staged: Vec<(PathBuf, PathBuf)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes `body` to a staging file for `path`, prefixed by `header`.
    pub fn write(&mut self, path: &Path, header: Option<&str>, body: &[u8]) -> io::Result<()> {
        let staging = staging_path(path);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        self.staged.push((staging.clone(), path.to_path_buf()));
        let mut file = io::BufWriter::new(fs::File::create(&staging)?);
        if let Some(h) = header {
            writeln!(file, "{h}")?;
        }
        file.write_all(body)?;
        file.flush()
    }

    /// Renames every staged file into place. If any rename fails, the files
    /// already moved are deleted and the rest stay staged for `Drop`.
    pub fn commit(mut self) -> io::Result<Vec<PathBuf>> {
        let mut done = Vec::with_capacity(self.staged.len());
        while let Some((staging, dest)) = self.staged.first().cloned() {
            if let Err(err) = fs::rename(&staging, &dest) {
                for path in &done {
                    let _ = fs::remove_file(path);
                }
                return Err(err);
            }
            self.staged.remove(0);
            done.push(dest);
        }
        Ok(done)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        for (staging, _) in &self.staged {
            let _ = fs::remove_file(staging);
        }
    }
}

fn staging_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.partial"))
}
