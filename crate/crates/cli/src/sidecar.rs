//! Output files and their JSON metadata sidecars.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub output: String,
    /// Full input configuration after flag overrides.
    pub config: Config,
    /// SHA-256 of the canonical TOML form of `config`.
    pub config_sha256: String,
    /// Command-specific derived parameters and summaries.
    pub details: serde_json::Value,
}

pub fn config_hash(config: &Config) -> Result<String> {
    let digest = Sha256::digest(config.to_toml_string()?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the sidecar next to `out` and returns its path.
pub fn write_sidecar(out: &Path, command: &str, config: &Config, details: serde_json::Value) -> Result<PathBuf> {
    let meta = Sidecar {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        output: out.display().to_string(),
        config: config.clone(),
        config_sha256: config_hash(config)?,
        details,
    };
    let path = sidecar_path(out);
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, &meta)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(path)
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::config("sidecar", e.to_string()))
}

/// Shortest round-trip form of a CSV number, with an exponent at extreme magnitudes.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// CSV unless the output path ends in `.json`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn format_of(out: Option<&Path>) -> Format {
    match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    }
}

/// The output file, or stdout when no path is given.
pub fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_round_trips_the_config() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("scan.csv");
        let mut cfg = Config::default();
        cfg.system.preset = Some("bb".into());
        cfg.drive.eps_ratio = Some(0.5);
        let path = write_sidecar(&out, "scan", &cfg, serde_json::json!({"rows": 3})).unwrap();
        assert_eq!(path, dir.path().join("scan.csv.meta.json"));
        let meta = read_sidecar(&path).unwrap();
        assert_eq!(meta.config, cfg);
        assert_eq!(meta.config_sha256, config_hash(&cfg).unwrap());
        assert_eq!(meta.config_sha256.len(), 64);
    }

    #[test]
    fn hash_tracks_the_config() {
        let a = Config::default();
        let mut b = a.clone();
        b.run.seed = 7;
        assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    }

    #[test]
    fn numbers_round_trip() {
        for v in [2.8841061835271545e-17, 0.05, 5.0, -4.490004313462697, 1e300] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(2.5e-17), "2.5e-17");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn json_by_extension() {
        assert_eq!(format_of(Some(Path::new("x.JSON"))), Format::Json);
        assert_eq!(format_of(Some(Path::new("x.csv"))), Format::Csv);
        assert_eq!(format_of(None), Format::Csv);
    }
}
