//! Run configuration echoed into every report.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Config snapshot serialized under `meta` in JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub potential: Option<String>,
    pub n_max: usize,
    pub s_values: Vec<f64>,
    pub basis_size: Option<usize>,
    pub quad_nodes: Option<usize>,
    pub tol: f64,
    pub format: Format,
    pub version: &'static str,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            potential: None,
            n_max: 10,
            s_values: vec![0.5, 1.0, 2.0],
            basis_size: None,
            quad_nodes: None,
            tol: 1e-8,
            format: Format::Csv,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}
