//! The versioned JSON report and the files written next to it.

use crate::config::{Suite, SuiteConfig};
use crate::error::{HarnessError, Result};
use crate::record::VerificationRecord;
use crate::suites::SuiteRun;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const SCHEMA: &str = "hyperlevel-verification";
pub const SCHEMA_VERSION: u32 = 1;

/// Inputs that determine the report. The output directory and execution
/// mode are left out: neither changes any number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub seed: u64,
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub radial_nodes: usize,
    pub suites: Vec<Suite>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub schema_version: u32,
    pub config: ReportConfig,
    pub summary: Summary,
    /// Sorted by id.
    pub records: Vec<VerificationRecord>,
}

impl Report {
    pub fn new(cfg: &SuiteConfig, records: &[VerificationRecord]) -> Self {
        let mut records = records.to_vec();
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = records.iter().filter(|r| r.pass).count();
        Self {
            schema: SCHEMA.to_string(),
            schema_version: SCHEMA_VERSION,
            config: ReportConfig {
                seed: cfg.seed,
                n_list: cfg.n_list.clone(),
                samples: cfg.samples,
                radial_nodes: cfg.radial_nodes,
                suites: cfg.suites.clone(),
            },
            summary: Summary { total: records.len(), passed, failed: records.len() - passed },
            records,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self)?;
        v.push(b'\n');
        Ok(v)
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

/// Writes `report.json`, `timings.json` and `curves/*.csv` under `dir`.
pub fn write_outputs(dir: &Path, cfg: &SuiteConfig, run: &SuiteRun) -> Result<PathBuf> {
    let curves = dir.join("curves");
    std::fs::create_dir_all(&curves).map_err(|e| HarnessError::io(&curves, e))?;
    let report = dir.join("report.json");
    write(&report, &Report::new(cfg, &run.records).to_bytes()?)?;
    // wall-clock times vary between runs, so they stay out of report.json
    let timings: BTreeMap<&str, f64> = run.timings.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let mut t = serde_json::to_vec_pretty(&timings)?;
    t.push(b'\n');
    write(&dir.join("timings.json"), &t)?;
    for (name, bytes) in &run.curves {
        write(&curves.join(name), bytes)?;
    }
    Ok(report)
}
