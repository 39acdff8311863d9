//! Output directory bookkeeping: every file written goes through `Outputs`,
//! which later writes a manifest of names and SHA-256 digests.

use std::fs;
use std::path::{Path, PathBuf};

use rtm_core::error::Result;
use rtm_core::fdsolver::{FreqSlices, SurfaceGather};
use rtm_core::modelkit::io::write_field;
use rtm_core::modelkit::ScalarField;
use rtm_core::report::export_pgm;
use sha2::{Digest, Sha256};

/// Percentile of `|values|` at which previews saturate.
const PREVIEW_CLIP: f64 = 99.0;

pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.dir.join(name)
    }

    /// Field file plus a gray-scale preview.
    pub fn field(&mut self, stem: &str, f: &ScalarField) -> Result<()> {
        write_field(self.path(&format!("{stem}.rtmf")), f)?;
        export_pgm(f, self.path(&format!("{stem}.pgm")), PREVIEW_CLIP)
    }

    pub fn gather(&mut self, stem: &str, g: &SurfaceGather) -> Result<()> {
        g.write(self.path(&format!("{stem}.gather")))
    }

    pub fn slices(&mut self, stem: &str, s: &FreqSlices) -> Result<()> {
        s.write(self.path(&format!("{stem}.slices")))
    }

    /// `key=value` lines.
    pub fn metrics(&mut self, name: &str, lines: &[(String, String)]) -> Result<()> {
        let text: String = lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        fs::write(self.path(name), text)?;
        Ok(())
    }

    /// Manifest `name`: one `sha256  file` line per file, in write order.
    pub fn finish(self, name: &str) -> Result<PathBuf> {
        let mut text = String::new();
        for name in &self.files {
            let digest = Sha256::digest(fs::read(self.dir.join(name))?);
            text.push_str(&format!("{digest:x}  {name}\n"));
        }
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        Ok(path)
    }
}
