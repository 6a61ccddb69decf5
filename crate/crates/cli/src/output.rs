//! Output directory bookkeeping: the manifest and plain-text writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use morphogrow::dynamics::StepDiagnostics;
use serde::Serialize;

pub const MANIFEST: &str = "manifest.json";

/// Full round-trip precision (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeStatus {
    pub c0: f64,
    pub c1: f64,
    pub breached: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_path: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    /// `running`, `ok`, `solver_error`, `violation` or `config_error`.
    pub status: String,
    pub partial: bool,
    pub error: Option<String>,
    pub envelope: Option<EnvelopeStatus>,
    pub steps: Vec<StepDiagnostics>,
    pub files: Vec<String>,
    /// Elapsed seconds; the only field that differs between identical runs.
    pub wall_clock_seconds: f64,
}

/// An output directory whose manifest lists every file written to it.
pub struct RunDir {
    dir: PathBuf,
    manifest: Manifest,
    started: Instant,
}

impl RunDir {
    /// Create the directory and write the initial manifest.
    pub fn create(
        dir: &Path,
        command: &str,
        config_path: &Path,
        seed: u64,
        config: BTreeMap<String, String>,
    ) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let mut run = Self {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                artifact: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                config_path: config_path.display().to_string(),
                seed,
                config,
                status: "running".into(),
                partial: false,
                error: None,
                envelope: None,
                steps: Vec::new(),
                files: vec![MANIFEST.to_string()],
                wall_clock_seconds: 0.0,
            },
            started: Instant::now(),
        };
        run.flush()?;
        Ok(run)
    }

    pub fn manifest_mut(&mut self) -> &mut Manifest {
        &mut self.manifest
    }

    /// Write `name` and register it in the manifest.
    pub fn write(&mut self, name: &str, contents: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), contents)?;
        if !self.manifest.files.iter().any(|f| f == name) {
            self.manifest.files.push(name.to_string());
        }
        Ok(())
    }

    fn flush(&mut self) -> io::Result<()> {
        self.manifest.wall_clock_seconds = self.started.elapsed().as_secs_f64();
        let text = serde_json::to_string_pretty(&self.manifest).map_err(io::Error::other)?;
        fs::write(self.dir.join(MANIFEST), text + "\n")
    }

    /// Record the final status and rewrite the manifest.
    pub fn finish(mut self, status: &str, error: Option<String>) -> io::Result<()> {
        self.manifest.partial = status != "ok";
        self.manifest.status = status.to_string();
        self.manifest.error = error;
        self.flush()
    }
}

/// CSV text with a header row.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Whitespace-separated two-column plot data with a comment header.
pub fn columns(labels: (&str, &str), points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = format!("# {} {}\n", labels.0, labels.1);
    for (a, b) in points {
        let _ = writeln!(out, "{} {}", num(a), num(b));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::E, -1e-300, 6.02e23] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let text = csv(&["t", "S"], vec![vec![0.0, -0.5]]);
        assert_eq!(text, "t,S\n0.0000000000000000e0,-5.0000000000000000e-1\n");
    }

    #[test]
    fn manifest_lists_files() {
        let tmp = tempfile::tempdir().unwrap();
        let mut run = RunDir::create(
            tmp.path(),
            "simulate",
            Path::new("a.cfg"),
            1,
            BTreeMap::new(),
        )
        .unwrap();
        run.write("x.csv", "a\n").unwrap();
        run.write("x.csv", "b\n").unwrap();
        run.finish("ok", None).unwrap();
        let text = fs::read_to_string(tmp.path().join(MANIFEST)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["files"], serde_json::json!(["manifest.json", "x.csv"]));
        assert_eq!(v["status"], "ok");
        assert_eq!(v["partial"], false);
    }
}
