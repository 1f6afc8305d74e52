//! Optional TOML run file. Keys mirror the long flag names; a flag given on
//! the command line always wins over the file.
//!
//! ```toml
//! N = 3
//! q = 2
//! workers = 4
//! lattice-nodes = 50000000
//!
//! [scan]
//! xmax = 10000
//! out = "scan.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: Option<i64>,
    pub q: Option<i64>,
    pub workers: Option<usize>,
    pub lattice_nodes: Option<u64>,
    pub group_iterations: Option<u64>,
    pub rho_iterations: Option<u64>,
    #[serde(default)]
    pub classify: ClassifySection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub density: DensitySection,
    #[serde(default)]
    pub orders: OrdersSection,
    #[serde(default)]
    pub families: FamiliesSection,
    #[serde(default)]
    pub fourier: FourierSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ClassifySection {
    pub t: Option<String>,
    pub explain: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScanSection {
    pub xmax: Option<u64>,
    pub block: Option<u64>,
    pub out: Option<PathBuf>,
    pub timings: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DensitySection {
    pub xmax: Option<u64>,
    pub grid: Option<Vec<u64>>,
    pub p_max: Option<u64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OrdersSection {
    pub b: Option<u64>,
    pub t: Option<u64>,
    pub p: Option<u64>,
    pub k: Option<u32>,
    pub base_power: Option<u64>,
    pub xmax: Option<u64>,
    pub epsilon: Option<f64>,
    pub log_q: Option<u64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FamiliesSection {
    pub family: Option<String>,
    pub kmax: Option<u32>,
    pub known: Option<Vec<u64>>,
    pub format: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FourierSection {
    pub t: Option<i64>,
    pub depth: Option<u32>,
    pub level: Option<u32>,
    pub grid: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerifySection {
    pub suite: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}
