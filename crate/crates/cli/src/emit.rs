//! Output plumbing: JSON artifacts carrying the config echo, config hash,
//! crate version and tolerance table; CSV scans with a comment header.

use std::io::Write;

use serde::Serialize;

use crate::config::{RunConfig, ToleranceTable};

#[derive(Debug)]
pub enum EmitError {
    Io(std::io::Error),
}

impl std::fmt::Display for EmitError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmitError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for EmitError {
    fn from(e: std::io::Error) -> Self {
        EmitError::Io(e)
    }
}

#[derive(Serialize)]
pub struct Artifact<T: Serialize> {
    pub version: &'static str,
    pub config: RunConfig,
    pub config_hash: String,
    pub tolerances: ToleranceTable,
    pub payload: T,
}

pub fn artifact<T: Serialize>(config: &RunConfig, payload: T) -> Artifact<T> {
    Artifact {
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        config_hash: config.hash(),
        tolerances: ToleranceTable::pinned(),
        payload,
    }
}

/// Serialize to a deterministic JSON string.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("artifact serializes")
}

pub fn write_out(path: Option<&str>, body: &str) -> Result<(), EmitError> {
    match path {
        Some(p) => {
            let mut f = std::fs::File::create(p)?;
            f.write_all(body.as_bytes())?;
            f.write_all(b"\n")?;
            Ok(())
        }
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

/// CSV with `# key: value` comment headers carrying the provenance.
pub fn csv_header(config: &RunConfig, columns: &str) -> String {
    format!(
        "# adsdeform {} config_hash {}\n# config {}\n{}\n",
        env!("CARGO_PKG_VERSION"),
        config.hash(),
        serde_json::to_string(config).expect("config serializes"),
        columns
    )
}

/// Complex number as the [re, im] pair used in all JSON payloads.
pub fn cx(z: adsdeform_core::Cx) -> [f64; 2] {
    [z.re, z.im]
}
