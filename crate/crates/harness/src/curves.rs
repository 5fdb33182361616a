//! CSV dumps of `μ`, `g`, the weak-type bound and `u*` for plotting.

use crate::error::{HarnessError, Result};
use hyperlevel::holo::{LevelFunction, Polynomial};
use hyperlevel::integrate::McConfig;
use hyperlevel::rearrange::DecreasingRearrangement;
use hyperlevel::superlevel::{
    default_t_grid, distribution_function, weak_type_bound, DistributionFunction, MonotoneFunctional, DEFAULT_GRID,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    /// `u = |f|^a (1-|z|^2)^b`.
    pub a: f64,
    pub b: f64,
    /// Thresholds; `None` selects the default grid, an empty list is a
    /// usage error.
    pub t_grid: Option<Vec<f64>>,
}

impl Default for CurveParams {
    fn default() -> Self {
        Self { a: 2.0, b: 1.0, t_grid: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curves {
    pub mu: DistributionFunction,
    pub g: MonotoneFunctional,
    pub bound: Vec<f64>,
    pub ustar: DecreasingRearrangement,
}

pub fn compute_curves(f: &Polynomial, params: &CurveParams, cfg: &McConfig) -> Result<Curves> {
    let u = LevelFunction::new(f.clone(), params.a, params.b)?;
    let grid = match &params.t_grid {
        Some(g) if g.is_empty() => return Err(hyperlevel::Error::Usage("empty t-grid".into()).into()),
        Some(g) => g.clone(),
        None => default_t_grid(u.maximum(cfg.seed).0, DEFAULT_GRID),
    };
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::Config("t-grid must be strictly increasing".into()));
    }
    let mu = distribution_function(&u, &grid, cfg)?;
    Ok(curves_of(mu, params.b))
}

pub fn curves_of(mu: DistributionFunction, b: f64) -> Curves {
    let g = mu.monotone_functional(b);
    let bound = mu.t_grid.iter().map(|&t| weak_type_bound(t, mu.n)).collect();
    let ustar = DecreasingRearrangement::from_distribution(&mu);
    Curves { mu, g, bound, ustar }
}

/// Columns `t, mu, mu_stderr, g, g_stderr, weak_type_bound`.
pub fn distribution_csv(c: &Curves) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "mu", "mu_stderr", "g", "g_stderr", "weak_type_bound"])?;
    for k in 0..c.mu.t_grid.len() {
        let row = [c.mu.t_grid[k], c.mu.mu[k], c.mu.mu_stderr[k], c.g.g[k], c.g.g_stderr[k], c.bound[k]];
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    finish(w)
}

/// Columns `s, ustar`.
pub fn rearrangement_csv(ustar: &DecreasingRearrangement) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "ustar"])?;
    for (s, u) in ustar.rows() {
        w.write_record([format!("{s:e}"), format!("{u:e}")])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| HarnessError::io("csv buffer", e.into_error()))
}

/// Writes `<stem>_distribution.csv` and `<stem>_rearrangement.csv`.
pub fn dump_curves(
    f: &Polynomial,
    params: &CurveParams,
    cfg: &McConfig,
    dir: &Path,
    stem: &str,
) -> Result<(PathBuf, PathBuf)> {
    let c = compute_curves(f, params, cfg)?;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let dist = dir.join(format!("{stem}_distribution.csv"));
    let rear = dir.join(format!("{stem}_rearrangement.csv"));
    std::fs::write(&dist, distribution_csv(&c)?).map_err(|e| HarnessError::io(&dist, e))?;
    std::fs::write(&rear, rearrangement_csv(&c.ustar)?).map_err(|e| HarnessError::io(&rear, e))?;
    Ok((dist, rear))
}
