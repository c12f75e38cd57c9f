//! Emission helpers: number formatting, atomic writes, metadata headers.

use std::io::Write;
use std::path::Path;

use dirichlet_strips::scanner::ScanResult;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::JobConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// C-style `%.12e`: two-digit signed exponent.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

/// Hex SHA-256 of the canonical job JSON.
pub fn config_hash(cfg: &JobConfig) -> String {
    let text = serde_json::to_string(&cfg.canonical()).expect("config serialises");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Comment lines recording version, hash and the canonical job.
pub fn comment_header(cfg: &JobConfig) -> String {
    let job = serde_json::to_string(&cfg.canonical()).expect("config serialises");
    format!("# dstrips {VERSION}\n# config_sha256 {}\n# config {job}\n", config_hash(cfg))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    artifact: &'static str,
    version: &'static str,
    config_sha256: String,
    config: JobConfig,
    result: &'a T,
}

/// Pretty JSON record wrapping `result` with the job metadata.
pub fn json_record<T: Serialize>(cfg: &JobConfig, result: &T) -> String {
    let env = Envelope { artifact: "dstrips", version: VERSION, config_sha256: config_hash(cfg), config: cfg.canonical(), result };
    let mut s = serde_json::to_string_pretty(&env).expect("result serialises");
    s.push('\n');
    s
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::validation("Io", format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub const SCAN_HEADER: &str = "sigma,min_modulus,argmin_t,tail_bound,warning";

pub fn scan_csv(cfg: &JobConfig, result: &ScanResult) -> String {
    let mut s = comment_header(cfg);
    s.push_str(SCAN_HEADER);
    s.push('\n');
    for r in &result.rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            sci(r.sigma),
            sci(r.min_modulus),
            sci(r.argmin_t),
            sci(r.tail_bound),
            u8::from(r.warning)
        ));
    }
    s
}

/// Two-column `sigma min_modulus` text for plotting tools.
pub fn plot_data(cfg: &JobConfig, result: &ScanResult) -> String {
    let mut s = comment_header(cfg);
    s.push_str("# sigma min_modulus\n");
    for r in &result.rows {
        s.push_str(&format!("{} {}\n", sci(r.sigma), sci(r.min_modulus)));
    }
    s
}

pub fn emit_plot_data(cfg: &JobConfig, result: &ScanResult, path: &Path) -> Result<(), CliError> {
    write_atomic(path, &plot_data(cfg, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_matches_printf() {
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(1.5e-7), "1.500000000000e-07");
        assert_eq!(sci(-123.25), "-1.232500000000e+02");
        assert_eq!(sci(2e105), "2.000000000000e+105");
    }
}
