//! Data emission and run manifests.
//!
//! CSV bodies are deterministic: shortest round-trip decimal formatting, LF
//! line endings, no timestamps. Every file written through an
//! [`OutputRecorder`] lands in the run manifest together with its SHA-256,
//! so a run can be audited and reproduced byte-for-byte.

use crate::error::{Error, Result};
use crate::propagate::Trajectory;
use crate::spectral::SpectrumResult;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const TRAJECTORY_HEADER: &str = "r,photon_number,norm_drift";
pub const SPECTRUM_HEADER: &str = "index,eigenvalue";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the output root directory.
pub const OUT_DIR_ENV: &str = "SQUEEZE_LAB_OUT_DIR";

/// Resolve the output root: the environment variable wins over the CLI
/// value, which defaults to the current directory.
pub fn resolve_out_root(cli_out_dir: Option<&Path>) -> PathBuf {
    if let Some(env_root) = std::env::var_os(OUT_DIR_ENV) {
        return PathBuf::from(env_root);
    }
    cli_out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

/// Writes files under a root directory and records (path, hash) pairs.
#[derive(Debug)]
pub struct OutputRecorder {
    root: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl OutputRecorder {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutputRecorder {
            root: root.into(),
            outputs: Vec::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn outputs(&self) -> &[OutputEntry] {
        &self.outputs
    }

    /// Write `bytes` to `rel_path` under the root, creating parents.
    pub fn write(&mut self, rel_path: impl AsRef<Path>, bytes: &[u8]) -> Result<PathBuf> {
        let rel = rel_path.as_ref();
        let full = self.root.join(rel);
        if let Some(parent) = full.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
        std::fs::write(&full, bytes)
            .map_err(|e| Error::io(format!("writing {}", full.display()), e))?;
        self.outputs.push(OutputEntry {
            path: rel.to_string_lossy().into_owned(),
            sha256: sha256_hex(bytes),
        });
        Ok(full)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Execution record for one CLI invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    /// All computations are deterministic; no RNG is involved anywhere.
    pub seedless: bool,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn start(command: impl Into<String>) -> Self {
        RunManifest {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.into(),
            parameters: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            seedless: true,
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    /// Close the manifest and write it alongside the recorded outputs.
    pub fn finish(mut self, recorder: &mut OutputRecorder, rel_path: &str) -> Result<PathBuf> {
        self.outputs = recorder.outputs().to_vec();
        self.finished_unix_ms = now_ms();
        let json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        // write directly (not via the recorder: the manifest lists outputs,
        // it is not itself an output)
        let full = recorder.root().join(rel_path);
        if let Some(parent) = full.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
        std::fs::write(&full, json.as_bytes())
            .map_err(|e| Error::io(format!("writing {}", full.display()), e))?;
        Ok(full)
    }
}

fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Versioned wrapper for JSON reports.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub kind: String,
    pub body: T,
}

pub fn report_json<T: Serialize>(kind: &str, body: &T) -> String {
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        kind: kind.to_string(),
        body,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut s = String::with_capacity(32 * t.r_grid.len() + 32);
    s.push_str(TRAJECTORY_HEADER);
    s.push('\n');
    for k in 0..t.r_grid.len() {
        s.push_str(&format!(
            "{},{},{}\n",
            t.r_grid[k], t.photon_number[k], t.norm_drift[k]
        ));
    }
    s
}

pub fn spectrum_csv(sp: &SpectrumResult) -> String {
    let mut s = String::with_capacity(24 * sp.eigenvalues.len() + 24);
    s.push_str(SPECTRUM_HEADER);
    s.push('\n');
    for (i, v) in sp.eigenvalues.iter().enumerate() {
        s.push_str(&format!("{i},{v}\n"));
    }
    s
}

pub fn parse_trajectory_csv(text: &str, origin: &str) -> Result<Trajectory> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRAJECTORY_HEADER => {}
        other => {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: 1,
                msg: format!("expected header {TRAJECTORY_HEADER:?}, got {other:?}"),
            })
        }
    }
    let mut t = Trajectory {
        r_grid: Vec::new(),
        photon_number: Vec::new(),
        norm_drift: Vec::new(),
        states: None,
    };
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut field = |name: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse {
                    path: origin.to_string(),
                    line: idx + 1,
                    msg: format!("missing field {name}"),
                })?
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    path: origin.to_string(),
                    line: idx + 1,
                    msg: format!("bad {name}: {e}"),
                })
        };
        t.r_grid.push(field("r")?);
        t.photon_number.push(field("photon_number")?);
        t.norm_drift.push(field("norm_drift")?);
    }
    Ok(t)
}

pub fn parse_spectrum_csv(text: &str, origin: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SPECTRUM_HEADER => {}
        other => {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: 1,
                msg: format!("expected header {SPECTRUM_HEADER:?}, got {other:?}"),
            })
        }
    }
    let mut values = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let index: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: idx + 1,
                msg: "bad index".to_string(),
            })?;
        if index != values.len() {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: idx + 1,
                msg: format!("non-contiguous index {index}"),
            });
        }
        let v: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: idx + 1,
                msg: "bad eigenvalue".to_string(),
            })?;
        values.push(v);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_trajectory() -> Trajectory {
        Trajectory {
            r_grid: vec![0.0, 0.01, 0.02],
            photon_number: vec![0.0, 1.2345678901234567e-3, 0.25],
            norm_drift: vec![0.0, 1e-16, 2e-16],
            states: None,
        }
    }

    #[test]
    fn trajectory_csv_shape() {
        let t = tiny_trajectory();
        let csv = trajectory_csv(&t);
        assert_eq!(csv.lines().count(), 4); // header + 3 points
        assert!(csv.starts_with("r,photon_number,norm_drift\n"));

        let empty = Trajectory {
            r_grid: vec![],
            photon_number: vec![],
            norm_drift: vec![],
            states: None,
        };
        assert_eq!(trajectory_csv(&empty), "r,photon_number,norm_drift\n");
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let t = tiny_trajectory();
        let csv = trajectory_csv(&t);
        let parsed = parse_trajectory_csv(&csv, "mem").unwrap();
        assert_eq!(trajectory_csv(&parsed), csv);
    }

    #[test]
    fn spectrum_csv_round_trip() {
        use crate::operators::{build_hamiltonian, TruncationSpec};
        let spec = TruncationSpec::new(3, 2, None).unwrap();
        let h = build_hamiltonian(&spec);
        let s = crate::spectral::spectrum(&h, false).unwrap();
        let csv = spectrum_csv(&s);
        assert!(csv.contains("0,-2.449489742783178\n"));
        assert!(csv.contains("1,2.449489742783178\n"));
        let values = parse_spectrum_csv(&csv, "mem").unwrap();
        assert_eq!(values, s.eigenvalues);
    }

    #[test]
    fn recorder_hashes_outputs() {
        let dir = std::env::temp_dir().join(format!("sqlab-io-test-{}", std::process::id()));
        let mut rec = OutputRecorder::new(&dir);
        rec.write("a/b.csv", b"hello\n").unwrap();
        assert_eq!(rec.outputs().len(), 1);
        assert_eq!(rec.outputs()[0].path, "a/b.csv");
        assert_eq!(
            rec.outputs()[0].sha256,
            sha256_hex(b"hello\n"),
        );
        let mut m = RunManifest::start("test");
        m.param("n", 3);
        let path = m.finish(&mut rec, "manifest.json").unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let parsed: RunManifest = serde_json::from_str(&text).unwrap();
        assert!(parsed.seedless);
        assert_eq!(parsed.outputs.len(), 1);
        std::fs::remove_dir_all(&dir).ok();
    }
}
