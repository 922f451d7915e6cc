//! TOML configuration. Every key is optional; command-line flags win.
//!
//! ```toml
//! param_set = "set1"      # set1 | set2 | set2-native | logreg
//! workload = "mult-relin"
//! seed = 7
//! simulate = true
//! backend = "library"     # library | accelerator
//! format = "json"         # json | csv | table
//! report = "report.json"
//!
//! [costs]                 # cycles per instruction class
//! ntt = 7168
//! split_surcharge = 853
//!
//! [machine]
//! clock_mhz = 200.0
//! serial = false
//! ```

use std::path::{Path, PathBuf};

use flexhe_archsim::cost::{CostModel, MachineConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendName {
    Library,
    Accelerator,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub param_set: Option<String>,
    pub workload: Option<String>,
    pub seed: Option<u64>,
    pub simulate: Option<bool>,
    pub backend: Option<BackendName>,
    pub format: Option<Format>,
    pub report: Option<PathBuf>,
    pub costs: CostModel,
    pub machine: MachineConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize)]
struct CostFile<'a> {
    costs: &'a CostModel,
}

pub fn write_costs(path: &Path, costs: &CostModel) -> Result<()> {
    let text = toml::to_string(&CostFile { costs }).map_err(|e| CliError::Other(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
