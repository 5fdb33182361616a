//! Suite configuration. Precedence: command-line flags, then the config
//! file, then [`SuiteConfig::default`].

use crate::error::{HarnessError, Result};
use hyperlevel::exec::Execution;
use hyperlevel::integrate::McConfig;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Geometry,
    Norms,
    Superlevel,
    Rearrange,
    Inequalities,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Geometry, Suite::Norms, Suite::Superlevel, Suite::Rearrange, Suite::Inequalities];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Norms => "norms",
            Suite::Superlevel => "superlevel",
            Suite::Rearrange => "rearrange",
            Suite::Inequalities => "inequalities",
        }
    }

    /// `all` or a comma-separated list of suite names.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Suite::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for Suite {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Smallest accepted `samples`; the scan-based engines get `samples / 100`.
pub const MIN_SAMPLES: usize = 10_000;
pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub n_list: Vec<usize>,
    /// Direction budget of the volume integrals; the other estimators get
    /// fixed fractions of it (see [`Budget`]).
    pub samples: usize,
    pub radial_nodes: usize,
    pub suites: Vec<Suite>,
    pub output_dir: PathBuf,
    pub execution: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_list: vec![1, 2],
            samples: 200_000,
            radial_nodes: 64,
            suites: Suite::ALL.to_vec(),
            output_dir: PathBuf::from("report"),
            execution: Execution::default(),
        }
    }
}

/// Sampled directions per estimator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Geodesic-ball volumes.
    pub volume: usize,
    /// Hardy and Bergman norms.
    pub norms: usize,
    /// Distribution functions on fixed grids.
    pub distribution: usize,
    /// Rearrangements, Pólya–Szegő and the Sobolev battery.
    pub rearrange: usize,
}

/// Partial configuration, as read from a file or from flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub seed: Option<u64>,
    pub n_list: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub radial_nodes: Option<usize>,
    pub suites: Option<Vec<Suite>>,
    pub output_dir: Option<PathBuf>,
    pub execution: Option<Execution>,
}

impl ConfigOverrides {
    /// TOML, or JSON for a `.json` extension.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    fn apply(self, cfg: &mut SuiteConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.n_list {
            cfg.n_list = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.radial_nodes {
            cfg.radial_nodes = v;
        }
        if let Some(v) = self.suites {
            cfg.suites = v;
        }
        if let Some(v) = self.output_dir {
            cfg.output_dir = v;
        }
        if let Some(v) = self.execution {
            cfg.execution = v;
        }
    }
}

/// Comma-separated dimensions, e.g. `1,2`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().map_err(|_| HarnessError::Config(format!("bad dimension `{p}`"))))
        .collect()
}

impl SuiteConfig {
    pub fn resolve(file: Option<ConfigOverrides>, flags: ConfigOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            f.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.n_list.sort_unstable();
        cfg.n_list.dedup();
        cfg.suites.sort();
        cfg.suites.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(HarnessError::Config("no suites selected".into()));
        }
        if self.n_list.is_empty() {
            return Err(HarnessError::Config("no dimensions selected".into()));
        }
        if let Some(n) = self.n_list.iter().find(|n| !(1..=MAX_DIM).contains(*n)) {
            return Err(HarnessError::Config(format!("dimension {n} outside 1..={MAX_DIM}")));
        }
        if self.samples < MIN_SAMPLES {
            return Err(HarnessError::Config(format!("samples = {} below the minimum {MIN_SAMPLES}", self.samples)));
        }
        if self.radial_nodes < McConfig::MIN_COUNT {
            return Err(HarnessError::Config(format!(
                "radial_nodes = {} below the minimum {}",
                self.radial_nodes,
                McConfig::MIN_COUNT
            )));
        }
        Ok(())
    }

    pub fn budget(&self) -> Budget {
        Budget {
            volume: self.samples,
            norms: self.samples / 10,
            distribution: self.samples / 50,
            rearrange: self.samples / 100,
        }
    }

    /// Sampler with `samples` directions and this config's seed and nodes.
    pub fn mc(&self, samples: usize) -> Result<McConfig> {
        Ok(McConfig::new(self.seed, samples, self.radial_nodes)?.with_execution(self.execution))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let file = ConfigOverrides { seed: Some(7), samples: Some(50_000), ..Default::default() };
        let flags = ConfigOverrides { seed: Some(9), ..Default::default() };
        let cfg = SuiteConfig::resolve(Some(file), flags).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.samples, 50_000);
        assert_eq!(cfg.n_list, vec![1, 2]);
    }

    #[test]
    fn rejects_bad_configs() {
        let empty = ConfigOverrides { suites: Some(vec![]), ..Default::default() };
        assert!(SuiteConfig::resolve(None, empty).is_err());
        let small = ConfigOverrides { samples: Some(100), ..Default::default() };
        assert!(SuiteConfig::resolve(None, small).is_err());
        let dim = ConfigOverrides { n_list: Some(vec![0]), ..Default::default() };
        assert!(SuiteConfig::resolve(None, dim).is_err());
        assert!(Suite::parse_list("geometry,bogus").is_err());
    }

    #[test]
    fn suite_lists() {
        assert_eq!(Suite::parse_list("all").unwrap(), Suite::ALL.to_vec());
        assert_eq!(Suite::parse_list("norms, geometry,norms").unwrap(), vec![Suite::Geometry, Suite::Norms]);
        assert_eq!(parse_dims("2,1").unwrap(), vec![2, 1]);
        assert!(parse_dims("1,x").is_err());
    }

    #[test]
    fn toml_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("hyperlevel-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("suite.toml");
        std::fs::write(&path, "seed = 5\nn_list = [2]\nsuites = [\"geometry\"]\n").unwrap();
        let o = ConfigOverrides::from_file(&path).unwrap();
        assert_eq!(o.seed, Some(5));
        assert_eq!(o.suites, Some(vec![Suite::Geometry]));
        std::fs::write(&path, "sed = 5\n").unwrap();
        assert!(matches!(ConfigOverrides::from_file(&path), Err(HarnessError::Config(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
