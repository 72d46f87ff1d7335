use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

/// Output files held in memory until the whole command has succeeded.
#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(String, String)>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    outputs: Vec<ManifestEntry<'a>>,
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    file: &'a str,
    bytes: usize,
}

impl Staged {
    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<String>) {
        let name = name.into();
        let contents = contents.into();
        match self.files.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = contents,
            None => self.files.push((name, contents)),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// Lists every staged file with its size. Deliberately free of
    /// timestamps so reruns are byte-identical.
    pub fn add_manifest(&mut self, command: &str) {
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            outputs: self
                .files
                .iter()
                .map(|(file, c)| ManifestEntry { file, bytes: c.len() })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        self.add(format!("{command}.manifest.json"), text);
    }

    /// Writes each file to a hidden temporary beside its target, then
    /// renames them all into place. On failure the temporaries are removed
    /// and no target is touched.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut temps = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp"));
            if let Err(e) = fs::write(&tmp, contents) {
                for t in temps.iter().chain(std::iter::once(&tmp)) {
                    let _ = fs::remove_file(t);
                }
                return Err(io(&tmp)(e));
            }
            temps.push(tmp);
        }
        let mut written = Vec::with_capacity(temps.len());
        for ((name, _), tmp) in self.files.iter().zip(&temps) {
            let target = dir.join(name);
            fs::rename(tmp, &target).map_err(io(&target))?;
            written.push(target);
        }
        Ok(written)
    }
}
