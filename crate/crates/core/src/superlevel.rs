//! Distribution functions `μ(t) = vol_g{u > t}` of superlevel sets, the
//! monotone quantity `g(t) = t^{1/b} (μ^{1/n} + 1)`, the weak-type bound, the
//! layer-cake identity for Bergman norms and the extremal-functional checks.
//!
//! Along each sampled direction `ζ` the ray `ρ ↦ u(tanh ρ ζ)` is scanned on a
//! uniform grid up to a certified cutoff, sign changes of `u - t` are refined
//! by the Illinois method, and the superlevel set contributes
//! `Σ (sinh^{2n} ρ_out - sinh^{2n} ρ_in)`. All thresholds share the same
//! directions, so `μ̂` is exactly nonincreasing in `t`.

use crate::check::{CheckReport, Margin};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::geometry::ScalarField;
use crate::holo::{LevelFunction, Polynomial};
use crate::integrate::{IntegralEstimate, McConfig, Method};
use crate::norms::{best_norm_pow, bergman_constant, norm_pow, SpaceParams};
use crate::quad::{adaptive, JacobiRule, MonotoneCubic};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Scan points per direction.
pub const SCAN_POINTS: usize = 1024;

/// Default grid size.
pub const DEFAULT_GRID: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    pub n: usize,
    pub t_grid: Vec<f64>,
    pub mu: Vec<f64>,
    pub mu_stderr: Vec<f64>,
    pub t0: f64,
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DistributionFunction {
    /// `g(t) = t^{1/b} (μ^{1/n} + 1)` with delta-method errors.
    pub fn monotone_functional(&self, b: f64) -> MonotoneFunctional {
        let n = self.n as f64;
        let (g, se): (Vec<f64>, Vec<f64>) = self
            .t_grid
            .iter()
            .zip(self.mu.iter().zip(&self.mu_stderr))
            .map(|(&t, (&m, &s))| {
                let tb = t.powf(1.0 / b);
                let root = m.max(0.0).powf(1.0 / n);
                let d = if m > 0.0 { root / (n * m) } else if s > 0.0 { f64::INFINITY } else { 0.0 };
                let se = if d.is_finite() { tb * d * s } else { tb * s.powf(1.0 / n) };
                (tb * (root + 1.0), se)
            })
            .unzip();
        MonotoneFunctional { t_grid: self.t_grid.clone(), g, g_stderr: se, b }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFunctional {
    pub t_grid: Vec<f64>,
    pub g: Vec<f64>,
    pub g_stderr: Vec<f64>,
    pub b: f64,
}

/// `count` geometric points in `[t0·1e-3, t0·(1-1e-3)]`.
pub fn default_t_grid(t0: f64, count: usize) -> Vec<f64> {
    let lo = t0 * 1e-3;
    let hi = t0 * (1.0 - 1e-3);
    if count <= 1 {
        return vec![hi];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

fn vol_coord(rho: f64, n: usize) -> f64 {
    rho.sinh().powi(2 * n as i32)
}

/// Root of `h` on `[a, b]` given `h(a) = fa`, `h(b) = fb` of opposite signs.
fn illinois<H: Fn(f64) -> f64>(h: H, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c.is_finite() && c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = h(c);
        if fc == 0.0 || (b - a).abs() < 1e-15 * (1.0 + c.abs()) {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Per-direction superlevel measures for every threshold.
pub struct DistributionEngine<'a, U: ScalarField + ?Sized> {
    u: &'a U,
    cfg: McConfig,
    scan: usize,
}

impl<'a, U: ScalarField + ?Sized> DistributionEngine<'a, U> {
    pub fn new(u: &'a U, cfg: &McConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { u, cfg: *cfg, scan: SCAN_POINTS })
    }

    pub fn with_scan(mut self, scan: usize) -> Self {
        self.scan = scan.max(16);
        self
    }

    /// Geodesic radius past which `u < level` along every ray.
    fn cutoff(&self, level: f64) -> (f64, Option<String>) {
        if let Some(rc) = self.u.radial_cutoff(level) {
            return (rc.max(1e-9), None);
        }
        let hint = self.u.support_radius_hint();
        if hint < 1.0 {
            return (hint.atanh(), None);
        }
        (17.0, Some("no certified radial cutoff; truncating at ρ = 17".to_string()))
    }

    /// `m[j][k]`: measure of `{u > t_k}` along direction `j`, in the volume
    /// coordinate. `t_grid` must be positive.
    pub fn direction_measures(&self, t_grid: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
        if t_grid.is_empty() {
            return Err(Error::Usage("empty t-grid".into()));
        }
        if t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Parameter("thresholds must be positive and finite".into()));
        }
        let n = self.u.dim();
        let t_min = t_grid.iter().cloned().fold(f64::INFINITY, f64::min);
        let (rho_cut, mut warnings) = {
            let (r, w) = self.cutoff(0.5 * t_min);
            (r, w.into_iter().collect::<Vec<_>>())
        };
        let scan = self.scan;
        let h = rho_cut / (scan - 1) as f64;
        let rows = map_indexed(self.cfg.execution, self.cfg.sphere_samples, |j| {
            let zeta = self.cfg.direction(n, j);
            let ray = |rho: f64| self.u.eval_polar(rho, &zeta);
            let v: Vec<f64> = (0..scan).map(|i| ray(i as f64 * h)).collect();
            let uncertified = v[scan - 1] > t_min;
            let row: Vec<f64> = t_grid
                .iter()
                .map(|&t| {
                    let mut m = 0.0;
                    let mut start = if v[0] > t { Some(0.0) } else { None };
                    for i in 1..scan {
                        let (a, b) = (v[i - 1] > t, v[i] > t);
                        if a != b {
                            let lo = (i - 1) as f64 * h;
                            let edge = illinois(|r| ray(r) - t, lo, lo + h, v[i - 1] - t, v[i] - t);
                            if b {
                                start = Some(edge);
                            } else if let Some(s) = start.take() {
                                m += vol_coord(edge, n) - vol_coord(s, n);
                            }
                        }
                    }
                    if let Some(s) = start {
                        m += vol_coord(rho_cut, n) - vol_coord(s, n);
                    }
                    m
                })
                .collect();
            (row, uncertified)
        });
        if rows.iter().any(|(_, bad)| *bad) {
            warnings.push(format!("radial cutoff ρ = {rho_cut:.4} not certified on some directions"));
        }
        Ok((rows.into_iter().map(|(r, _)| r).collect(), warnings))
    }
}

fn column_stats(rows: &[Vec<f64>], k: usize) -> (f64, f64) {
    let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
    crate::check::mean_stderr(&col)
}

/// `μ(t)` on `t_grid` for any field, with `t0` supplied by the caller.
pub fn distribution_of<U: ScalarField + ?Sized>(
    u: &U,
    t0: f64,
    t_grid: &[f64],
    cfg: &McConfig,
) -> Result<DistributionFunction> {
    let engine = DistributionEngine::new(u, cfg)?;
    let (rows, warnings) = engine.direction_measures(t_grid)?;
    let (mu, mu_stderr) = (0..t_grid.len()).map(|k| column_stats(&rows, k)).unzip();
    Ok(DistributionFunction {
        n: u.dim(),
        t_grid: t_grid.to_vec(),
        mu,
        mu_stderr,
        t0,
        samples: rows.len() as u64,
        warnings,
    })
}

/// `μ(t) = vol_g{u > t}` for a level function. An empty `t_grid` selects the
/// default geometric grid.
pub fn distribution_function(u: &LevelFunction, t_grid: &[f64], cfg: &McConfig) -> Result<DistributionFunction> {
    let (t0, _) = u.maximum(cfg.seed);
    let grid = if t_grid.is_empty() { default_t_grid(t0, DEFAULT_GRID) } else { t_grid.to_vec() };
    distribution_of(u, t0, &grid, cfg)
}

/// `g(t_{i+1}) <= g(t_i)` within `3·sqrt(se_i^2 + se_{i+1}^2)` on `(0, t0)`.
pub fn monotonicity_check(u: &LevelFunction, mu: &DistributionFunction) -> CheckReport {
    let g = mu.monotone_functional(u.b());
    let mut margins = Vec::new();
    for i in 0..g.t_grid.len().saturating_sub(1) {
        if g.t_grid[i + 1] >= mu.t0 {
            break;
        }
        let se = g.g_stderr[i].hypot(g.g_stderr[i + 1]);
        margins.push(Margin::new(g.g[i] - g.g[i + 1], se, g.g[i]));
    }
    CheckReport::worst_of("monotonicity", &margins, false)
}

/// `(bt/n) μ' μ^{1/n-1} + μ^{1/n} + 1 <= 0` at interior grid points, with
/// `μ'` from a monotone cubic interpolant.
pub fn differential_inequality_check(b: f64, mu: &DistributionFunction) -> Result<CheckReport> {
    let n = mu.n as f64;
    let idx: Vec<usize> = (0..mu.t_grid.len()).filter(|&i| mu.mu[i] > 0.0).collect();
    if idx.len() < 3 {
        return Ok(CheckReport::worst_of("differential-inequality", &[], false).note("fewer than 3 positive points"));
    }
    let x: Vec<f64> = idx.iter().map(|&i| mu.t_grid[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| mu.mu[i]).collect();
    let spline = MonotoneCubic::new(x.clone(), y.clone())?;
    let mut margins = Vec::new();
    for k in 1..idx.len() - 1 {
        let (t, m) = (x[k], y[k]);
        let d = spline.derivative(t);
        let secant = (y[k + 1] - y[k - 1]) / (x[k + 1] - x[k - 1]);
        let se_d = mu.mu_stderr[idx[k - 1]].hypot(mu.mu_stderr[idx[k + 1]]) / (x[k + 1] - x[k - 1]);
        let c = b * t / n * m.powf(1.0 / n - 1.0);
        let lhs = c * d + m.powf(1.0 / n) + 1.0;
        let se = (c * se_d).hypot(m.powf(1.0 / n - 1.0) / n * mu.mu_stderr[idx[k]]);
        margins.push(Margin::new(-lhs, se, 1.0).with_discretization(c * (d - secant)));
    }
    Ok(CheckReport::worst_of("differential-inequality", &margins, false))
}

/// Weak-type bound `μ(t) <= max((1/t - 1)^n, 0)` for `u = |f|^r (1-|z|^2)`
/// after normalizing `‖f‖_{H^{nr}} = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    pub scale: f64,
    pub mu: DistributionFunction,
    pub bound: Vec<f64>,
    pub margins: Vec<Margin>,
    pub report: CheckReport,
}

pub fn weak_type_bound(t: f64, n: usize) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        (1.0 / t - 1.0).powi(n as i32)
    }
}

/// Normalizes `f` to unit `H^{nr}` norm, builds `u = |f|^r (1-|z|^2)` and
/// compares `μ` with the bound. An empty `t_grid` selects the default grid.
pub fn weak_type_check(f: &Polynomial, r: f64, t_grid: &[f64], cfg: &McConfig) -> Result<WeakTypeReport> {
    let n = f.dim();
    let params = SpaceParams::hardy(n, n as f64 * r)?;
    let norm_pow = best_norm_pow(f, &params, &cfg.with_seed(cfg.seed ^ 0x9e37_79b9))?;
    if !(norm_pow.value > 0.0) {
        return Err(Error::Normalization("f has zero Hardy norm".into()));
    }
    let norm = norm_pow.root(params.p());
    let scale = 1.0 / norm.value;
    let rel_norm_err = norm.stderr / norm.value;
    let u = LevelFunction::hardy(f.scale(Complex64::new(scale, 0.0)), r)?;
    let mu = distribution_function(&u, t_grid, cfg)?;
    // uncertainty of the scale moves thresholds: u_k = k^r u, μ_k(t) = μ(t k^{-r})
    let slope = if rel_norm_err > 0.0 && mu.t_grid.len() > 2 { mu_log_slopes(&mu) } else { vec![0.0; mu.t_grid.len()] };
    let bound: Vec<f64> = mu.t_grid.iter().map(|&t| weak_type_bound(t, n)).collect();
    let margins: Vec<Margin> = (0..mu.t_grid.len())
        .map(|k| {
            let scale_err = slope[k] * r * rel_norm_err;
            Margin::new(bound[k] - mu.mu[k], mu.mu_stderr[k].hypot(scale_err), bound[k])
        })
        .collect();
    let mut report = CheckReport::worst_of("weak-type", &margins, false)
        .note(format!("normalization factor {scale:.12} (relative error {rel_norm_err:.2e})"));
    report.notes.extend(mu.warnings.iter().cloned());
    Ok(WeakTypeReport { scale, mu, bound, margins, report })
}

/// `|t μ'(t)|` from a monotone interpolant of the sampled curve.
fn mu_log_slopes(mu: &DistributionFunction) -> Vec<f64> {
    let idx: Vec<usize> = (0..mu.t_grid.len()).collect();
    let x: Vec<f64> = idx.iter().map(|&i| mu.t_grid[i]).collect();
    match MonotoneCubic::new(x.clone(), mu.mu.clone()) {
        Ok(s) => x.iter().map(|&t| (t * s.derivative(t)).abs()).collect(),
        Err(_) => vec![0.0; x.len()],
    }
}

/// Layer-cake value `α c_α ∫_0^{t0} μ(t) t^{α-1} dt` of `‖f‖_{A_α^{rα}}^{rα}`
/// for `u = |f|^r (1-|z|^2)`.
///
/// With `t = t0 x` the integrand is `[μ(t) t^n] x^{α-1-n}`; the bracket is
/// bounded and the weight is absorbed into a Gauss–Jacobi rule. The
/// discretization error is estimated from a rule of half the order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerCake {
    pub estimate: IntegralEstimate,
    pub discretization: f64,
    pub t0: f64,
}

pub const LAYER_CAKE_ORDER: usize = 48;

pub fn layer_cake_bergman(f: &Polynomial, r: f64, alpha: f64, cfg: &McConfig) -> Result<LayerCake> {
    let n = f.dim();
    let c_alpha = bergman_constant(n, alpha)?;
    let u = LevelFunction::hardy(f.clone(), r)?;
    let (t0, _) = u.maximum(cfg.seed);
    if !(t0 > 0.0) {
        return Ok(LayerCake { estimate: IntegralEstimate::exact(0.0), discretization: 0.0, t0 });
    }
    let nn = n as f64;
    let hi = JacobiRule::new(LAYER_CAKE_ORDER, 0.0, alpha - 1.0 - nn)?.mapped(0.0, 1.0);
    let lo = JacobiRule::new(LAYER_CAKE_ORDER / 2, 0.0, alpha - 1.0 - nn)?.mapped(0.0, 1.0);
    let grid: Vec<f64> = hi.iter().chain(lo.iter()).map(|&(x, _)| t0 * x).collect();
    let (rows, warnings) = DistributionEngine::new(&u, cfg)?.direction_measures(&grid)?;
    let pre = alpha * c_alpha * t0.powf(alpha - nn);
    let sum = |rule: &[(f64, f64)], row: &[f64]| -> f64 {
        rule.iter()
            .zip(row)
            .map(|(&(x, w), &m)| w * m * (t0 * x).powf(nn))
            .sum::<f64>()
            * pre
    };
    let per_dir_hi: Vec<f64> = rows.iter().map(|row| sum(&hi, &row[..hi.len()])).collect();
    let per_dir_lo: Vec<f64> = rows.iter().map(|row| sum(&lo, &row[hi.len()..])).collect();
    let (value, stderr) = crate::check::mean_stderr(&per_dir_hi);
    let (value_lo, _) = crate::check::mean_stderr(&per_dir_lo);
    Ok(LayerCake {
        estimate: IntegralEstimate { value, stderr, samples: rows.len() as u64, method: Method::MonteCarlo, warnings },
        // the half-order difference overstates the error of the full rule
        discretization: 0.1 * (value - value_lo).abs(),
        t0,
    })
}

/// `k_α ∫_0^1 (1/t - 1)^n t^{α-1} dt = 1` by adaptive quadrature, to `1e-10`.
pub fn normalization_identity_check(n: usize, alpha: f64) -> Result<CheckReport> {
    let k = crate::norms::layer_cake_constant(n, alpha)?;
    if n == 0 || !(alpha > n as f64) {
        return Err(Error::Parameter(format!("need n >= 1 and α > n, got n = {n}, α = {alpha}")));
    }
    // t = v^m with m = 1/(α-n) turns (1-t)^n t^{α-n-1} dt into m (1-v^m)^n dv
    let m = 1.0 / (alpha - n as f64);
    let res = adaptive(|v| m * (1.0 - v.powf(m)).powi(n as i32), 0.0, 1.0, &[], 1e-15, 1e-13);
    if !res.converged {
        return Err(Error::Divergence(format!("normalization integral error {:.2e}", res.error)));
    }
    let v = k * res.value;
    Ok(CheckReport::equality(format!("normalization-identity[n={n},alpha={alpha}]"), Margin::exact(v - 1.0, 1e-10))
        .note(format!("k_α ∫ = {v:.15}")))
}

/// Exact `μ(t)` of `u = |z|^2 (1-|z|^2)` on the disk (`n = 1`): the annulus
/// `x_- < |z|^2 < x_+` has hyperbolic measure `x_+/(1-x_+) - x_-/(1-x_-)`.
pub fn coordinate_annulus_measure(t: f64) -> f64 {
    if t >= 0.25 {
        return 0.0;
    }
    if t <= 0.0 {
        return f64::INFINITY;
    }
    let d = (1.0 - 4.0 * t).sqrt();
    let (xm, xp) = ((1.0 - d) / 2.0, (1.0 + d) / 2.0);
    xp / (1.0 - xp) - xm / (1.0 - xm)
}

/// Layer-cake value against an independent sampled Bergman norm.
pub fn layer_cake_cross_check(f: &Polynomial, r: f64, alpha: f64, cfg: &McConfig) -> Result<CheckReport> {
    let lc = layer_cake_bergman(f, r, alpha, cfg)?;
    let params = SpaceParams::bergman(f.dim(), r * alpha, alpha)?;
    let direct = norm_pow(f, &params, &cfg.with_seed(cfg.seed.wrapping_add(0x5851_f42d)))?;
    let m = Margin::new(lc.estimate.value - direct.value, lc.estimate.stderr.hypot(direct.stderr), direct.value)
        .with_discretization(lc.discretization);
    Ok(CheckReport::equality("layer-cake", m).note(format!(
        "layer cake {:.10} ± {:.2e}, direct {:.10} ± {:.2e}",
        lc.estimate.value, lc.estimate.stderr, direct.value, direct.stderr
    )))
}

/// Increasing functions `G` with `G(0) = 0` for the extremal checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "g", rename_all = "snake_case")]
pub enum GFunction {
    /// `t^s`
    Power { s: f64 },
    /// `max(t - c, 0)`
    Hinge { c: f64 },
    /// Piecewise linear through `knots`, zero before the first knot and
    /// constant after the last.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl GFunction {
    pub fn by_name(name: &str, param: f64) -> Result<Self> {
        match name {
            "power" => Ok(Self::Power { s: param }),
            "hinge" => Ok(Self::Hinge { c: param }),
            other => Err(Error::Registry(other.to_string())),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Power { s } if *s > 1.0 => Ok(()),
            Self::Power { s } => Err(Error::Parameter(format!("power G needs s > 1, got {s}"))),
            Self::Hinge { c } if *c > 0.0 => Ok(()),
            Self::Hinge { c } => Err(Error::Parameter(format!("hinge G needs c > 0, got {c}"))),
            Self::PiecewiseLinear { knots } => {
                let ok = knots.len() >= 2
                    && knots[0].0 > 0.0
                    && knots[0].1 == 0.0
                    && knots.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1);
                if ok {
                    Ok(())
                } else {
                    Err(Error::Parameter("piecewise-linear G needs increasing knots from (t1 > 0, 0)".into()))
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Power { s } => t.max(0.0).powf(*s),
            Self::Hinge { c } => (t - c).max(0.0),
            Self::PiecewiseLinear { knots } => {
                if t <= knots[0].0 {
                    return 0.0;
                }
                for w in knots.windows(2) {
                    if t <= w[1].0 {
                        return w[0].1 + (w[1].1 - w[0].1) * (t - w[0].0) / (w[1].0 - w[0].0);
                    }
                }
                knots[knots.len() - 1].1
            }
        }
    }

    /// Kinks of `G`.
    fn breaks(&self) -> Vec<f64> {
        match self {
            Self::Power { .. } => vec![],
            Self::Hinge { c } => vec![*c],
            Self::PiecewiseLinear { knots } => knots.iter().map(|k| k.0).collect(),
        }
    }

    /// `G'(t)` away from kinks.
    fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Power { s } => s * t.powf(s - 1.0),
            Self::Hinge { c } => {
                if t > *c {
                    1.0
                } else {
                    0.0
                }
            }
            Self::PiecewiseLinear { knots } => {
                for w in knots.windows(2) {
                    if t > w[0].0 && t <= w[1].0 {
                        return (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    }
                }
                0.0
            }
        }
    }
}

/// `∫_0^∞ μ(t) G'(t) dt` for the Stieltjes form of `∫ G(u) dv_g`, over
/// per-direction measures. Returns per-direction values.
fn stieltjes_per_direction<U: ScalarField + ?Sized>(
    u: &U,
    t0: f64,
    g: &GFunction,
    order: usize,
    power_floor: f64,
    cfg: &McConfig,
) -> Result<(Vec<f64>, Vec<String>)> {
    // nodes and weights on (0, t0) for ∫ μ G' dt
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    match g {
        GFunction::Power { s } => {
            // μ t^{power_floor} bounded near 0; weight t^{s-1-power_floor}
            let e = s - 1.0 - power_floor;
            let rule = JacobiRule::new(order, 0.0, e)?.mapped(0.0, 1.0);
            let pre = s * t0.powf(*s);
            for (x, w) in rule {
                nodes.push((t0 * x, pre * w * x.powf(power_floor)));
            }
        }
        _ => {
            let first = g.breaks().first().copied().unwrap_or(0.0);
            let rule = crate::quad::legendre(order);
            let mut pts: Vec<f64> = vec![first.min(t0)];
            pts.extend(g.breaks().into_iter().filter(|&b| b > first && b < t0));
            pts.push(t0);
            for w in pts.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                let half = 0.5 * (b - a);
                for &(x, wt) in rule.iter() {
                    let t = a + half * (x + 1.0);
                    nodes.push((t, wt * half * g.derivative(t)));
                }
            }
        }
    }
    if nodes.is_empty() {
        return Ok((vec![0.0; cfg.sphere_samples], vec![]));
    }
    let grid: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let (rows, warnings) = DistributionEngine::new(u, cfg)?.direction_measures(&grid)?;
    Ok((
        rows.iter()
            .map(|row| row.iter().zip(&nodes).map(|(m, (_, w))| m * w).sum())
            .collect(),
        warnings,
    ))
}

/// Which extremal statement is exercised.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum ExtremalSpace {
    /// `u = |f|^r (1-|z|^2)`, `‖f‖_{H^{nr}} = 1`.
    Hardy { r: f64 },
    /// `u = |f|^p (1-|z|^2)^α`, `‖f‖_{A_α^p} = 1`, `G` convex.
    Bergman { p: f64, alpha: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub scale: f64,
    pub value: IntegralEstimate,
    pub extremal: f64,
    pub report: CheckReport,
}

/// Extremal `μ` for `f ≡ 1`.
fn extremal_mu(space: &ExtremalSpace, n: usize, t: f64) -> f64 {
    match space {
        ExtremalSpace::Hardy { .. } => weak_type_bound(t, n),
        ExtremalSpace::Bergman { alpha, .. } => {
            if t >= 1.0 {
                0.0
            } else {
                (t.powf(-1.0 / alpha) - 1.0).powi(n as i32)
            }
        }
    }
}

/// `∫ G(u) dv_g = ∫ μ dG` for normalized `f`, compared with the `f ≡ 1` value.
pub fn extremal_functional_check(
    g: &GFunction,
    f: &Polynomial,
    space: ExtremalSpace,
    cfg: &McConfig,
) -> Result<ExtremalReport> {
    g.validate()?;
    let n = f.dim();
    let nn = n as f64;
    let (params, a, b) = match space {
        ExtremalSpace::Hardy { r } => (SpaceParams::hardy(n, nn * r)?, r, 1.0),
        ExtremalSpace::Bergman { p, alpha } => (SpaceParams::bergman(n, p, alpha)?, p, alpha),
    };
    // μ(t) ~ t^{-n/b} near 0 for f ≡ 1; ∫ μ G' converges only if G' t^{-n/b} is integrable
    let decay = nn / b;
    if let GFunction::Power { s } = g {
        if *s <= decay {
            return Err(Error::Divergence(format!("∫ μ dG diverges for G = t^{s} (needs s > {decay})")));
        }
    }
    let extremal = {
        let res = adaptive(|t| extremal_mu(&space, n, t) * g.derivative(t), 0.0, 1.0, &g.breaks(), 1e-13, 1e-12);
        if !res.converged {
            return Err(Error::Divergence("extremal value did not converge".into()));
        }
        res.value
    };
    let norm_pow = best_norm_pow(f, &params, &cfg.with_seed(cfg.seed ^ 0x9e37_79b9))?;
    if !(norm_pow.value > 0.0) {
        return Err(Error::Normalization("f has zero norm".into()));
    }
    let norm = norm_pow.root(params.p());
    let scale = 1.0 / norm.value;
    let u = LevelFunction::new(f.scale(Complex64::new(scale, 0.0)), a, b)?;
    let (t0, _) = u.maximum(cfg.seed);
    let (hi, warnings) = stieltjes_per_direction(&u, t0, g, 48, decay, cfg)?;
    let (lo, _) = stieltjes_per_direction(&u, t0, g, 24, decay, cfg)?;
    let (value, stderr) = crate::check::mean_stderr(&hi);
    let (value_lo, _) = crate::check::mean_stderr(&lo);
    // normalization error: ∫G(k^a u) moves by about |dV/dk| δk; bound by a finite difference in k
    let rel = norm.stderr / norm.value;
    let scale_err = if rel > 0.0 {
        let up = LevelFunction::new(f.scale(Complex64::new(scale * (1.0 + rel), 0.0)), a, b)?;
        let (t0u, _) = up.maximum(cfg.seed);
        let (vals, _) = stieltjes_per_direction(&up, t0u, g, 48, decay, cfg)?;
        (crate::check::mean_stderr(&vals).0 - value).abs()
    } else {
        0.0
    };
    let est = IntegralEstimate { value, stderr, samples: hi.len() as u64, method: Method::MonteCarlo, warnings };
    let m = Margin::new(extremal - value, stderr.hypot(scale_err), extremal).with_discretization(0.1 * (value - value_lo));
    let report = CheckReport::inequality("extremal-functional", m)
        .note(format!("value {value:.10} vs extremal {extremal:.10}, scale {scale:.10}"));
    Ok(ExtremalReport { scale, value: est, extremal, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(samples: usize) -> McConfig {
        McConfig::new(42, samples, 64).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = default_t_grid(0.5, 64);
        assert_eq!(g.len(), 64);
        assert_relative_eq!(g[0], 5e-4, max_relative = 1e-14);
        assert_relative_eq!(g[63], 0.4995, max_relative = 1e-14);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constant_function_is_extremal() {
        for n in 1..=2 {
            let u = LevelFunction::hardy(Polynomial::one(n), 2.0).unwrap();
            let mu = distribution_function(&u, &[], &cfg(64)).unwrap();
            for (t, m) in mu.t_grid.iter().zip(&mu.mu) {
                assert_relative_eq!(*m, weak_type_bound(*t, n), max_relative = 1e-9);
            }
            let g = mu.monotone_functional(1.0);
            assert!(g.g.iter().all(|v| (v - 1.0).abs() < 1e-9));
            assert!(monotonicity_check(&u, &mu).pass);
        }
    }

    #[test]
    fn empty_above_maximum() {
        let u = LevelFunction::hardy(Polynomial::coordinate(1, 0), 2.0).unwrap();
        let mu = distribution_function(&u, &[0.3, 0.5], &cfg(32)).unwrap();
        assert_eq!(mu.mu, vec![0.0, 0.0]);
        assert!(distribution_function(&u, &[-0.1], &cfg(32)).is_err());
    }

    #[test]
    fn annulus_for_coordinate() {
        let u = LevelFunction::hardy(Polynomial::coordinate(1, 0), 2.0).unwrap();
        let mu = distribution_function(&u, &[0.05, 0.1, 0.2], &cfg(32)).unwrap();
        for (t, m) in mu.t_grid.iter().zip(&mu.mu) {
            assert_relative_eq!(*m, coordinate_annulus_measure(*t), max_relative = 1e-10);
        }
        assert_eq!(coordinate_annulus_measure(0.3), 0.0);
    }

    #[test]
    fn normalization_identity() {
        for &(n, alpha) in &[(1usize, 1.5), (2, 2.5), (2, 4.0), (1, 1.01)] {
            let r = normalization_identity_check(n, alpha).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn layer_cake_for_constant() {
        let lc = layer_cake_bergman(&Polynomial::one(2), 1.0, 3.0, &cfg(32)).unwrap();
        assert_relative_eq!(lc.estimate.value, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn g_registry() {
        assert!(GFunction::by_name("nope", 1.0).is_err());
        let g = GFunction::PiecewiseLinear { knots: vec![(0.2, 0.0), (0.5, 1.0), (0.8, 1.5)] };
        assert!(g.validate().is_ok());
        assert_relative_eq!(g.eval(0.35), 0.5);
        assert_eq!(g.eval(0.9), 1.5);
        let f = Polynomial::one(2);
        let e = extremal_functional_check(&GFunction::Power { s: 2.0 }, &f, ExtremalSpace::Hardy { r: 1.0 }, &cfg(32));
        assert!(matches!(e, Err(Error::Divergence(_))));
    }

    #[test]
    fn extremal_for_constant_is_tight() {
        let f = Polynomial::one(1);
        let rep = extremal_functional_check(&GFunction::Power { s: 2.0 }, &f, ExtremalSpace::Hardy { r: 2.0 }, &cfg(32))
            .unwrap();
        assert_relative_eq!(rep.extremal, 1.0, max_relative = 1e-10);
        assert!(rep.report.margin.value.abs() < 1e-8);
    }
}
