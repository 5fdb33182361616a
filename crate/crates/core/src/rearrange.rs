//! Decreasing rearrangement `u*(s) = sup{t > 0 : μ(t) > s}`, the hyperbolic
//! symmetrization `u♯_g(z) = u*(sinh^{2n} ρ(z))`, the Euclidean one
//! `u♯_e(z) = u*(|z|^{2n})`, and the checks built on them: equimeasurability,
//! `L^q` and volume preservation, Pólya–Szegő, and the radial gradient
//! integral identities.
//!
//! Sampled rearrangements come from a Chebyshev-clustered threshold grid
//! with common random directions, so `μ̂` is exactly nonincreasing and every
//! functional of `u*` is a smooth function of the column means. Standard
//! errors use the delta method; discretization errors compare the full grid
//! with every other knot.

use crate::check::{delta_method, mean_stderr, CheckReport, Margin};
use crate::error::{Error, Result};
use crate::geometry::{fd_complex_gradient, fd_step, norm_sqr, radius_of_volume, BallPoint, ScalarField};
use crate::holo::LevelFunction;
use crate::integrate::{compact_extent, polar_gradient_norm, support_moment_rows, McConfig};
use crate::quad::{adaptive, adaptive_to_infinity, legendre};
use crate::superlevel::{DistributionEngine, DistributionFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Knots of the default threshold grid (a power of two plus one, so the
/// half grid nests).
pub const REARRANGEMENT_GRID: usize = 257;

/// Seed offset separating the distribution sample from the direct integrals.
const DISTRIBUTION_SALT: u64 = 0x5bd1_e995;

/// Piecewise-linear generalized inverse of `μ`, right-continuous at ties.
///
/// Knots are stored with `s` nondecreasing and `u*` nonincreasing; beyond the
/// last knot `u* = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecreasingRearrangement {
    pub s_grid: Vec<f64>,
    pub ustar: Vec<f64>,
}

impl DecreasingRearrangement {
    /// Inverse of a sampled distribution function.
    pub fn from_distribution(mu: &DistributionFunction) -> Self {
        Self::from_samples(&mu.t_grid, &mu.mu, mu.t0)
    }

    /// Knots `(μ_k, t_k)` for `μ_k > 0`, closed by `(0, t0)` at the top.
    pub fn from_samples(t_grid: &[f64], mu: &[f64], t0: f64) -> Self {
        let mut knots: Vec<(f64, f64)> = t_grid
            .iter()
            .zip(mu)
            .filter(|&(&t, &m)| m > 0.0 && t > 0.0)
            .map(|(&t, &m)| (m, t))
            .collect();
        if knots.is_empty() {
            return Self::default();
        }
        let top = knots.iter().map(|k| k.1).fold(f64::NEG_INFINITY, f64::max);
        if t0 > top {
            knots.push((0.0, t0));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        let mut running = f64::INFINITY;
        let (s_grid, ustar) = knots
            .into_iter()
            .map(|(s, t)| {
                running = running.min(t);
                (s, running)
            })
            .unzip();
        Self { s_grid, ustar }
    }

    /// Exact inverse at each `s` by bisection on a monotone `μ` over `(0, t_hi]`.
    pub fn from_fn<M: FnMut(f64) -> Result<f64>>(mut mu: M, t_hi: f64, s_grid: &[f64]) -> Result<Self> {
        if !(t_hi > 0.0 && t_hi.is_finite()) {
            return Err(Error::Parameter(format!("upper threshold must be positive, got {t_hi}")));
        }
        let mut s_sorted = s_grid.to_vec();
        if s_sorted.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::Parameter("volume coordinates must be finite and >= 0".into()));
        }
        s_sorted.sort_by(f64::total_cmp);
        let mut ustar = Vec::with_capacity(s_sorted.len());
        for &s in &s_sorted {
            let (mut lo, mut hi) = (0.0, t_hi);
            if mu(hi)? > s {
                ustar.push(t_hi);
                continue;
            }
            if mu(hi * 1e-15)? <= s {
                ustar.push(0.0);
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
                    break;
                }
                if mu(mid)? > s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            ustar.push(0.5 * (lo + hi));
        }
        Ok(Self { s_grid: s_sorted, ustar })
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        let k = self.s_grid.partition_point(|&x| x <= s);
        if k == 0 {
            return self.ustar.first().copied().unwrap_or(0.0);
        }
        let i = k - 1;
        if self.s_grid[i] == s || i + 1 == self.s_grid.len() {
            return if i + 1 == self.s_grid.len() && s > self.s_grid[i] { 0.0 } else { self.ustar[i] };
        }
        let (s0, s1) = (self.s_grid[i], self.s_grid[i + 1]);
        let w = (s - s0) / (s1 - s0);
        self.ustar[i] + w * (self.ustar[i + 1] - self.ustar[i])
    }

    /// `u*(0) = ess sup u`.
    pub fn sup(&self) -> f64 {
        self.eval(0.0)
    }

    /// `sup{s : u*(s) > 0}`.
    pub fn support_volume(&self) -> f64 {
        match self.ustar.iter().position(|&v| v <= 0.0) {
            Some(0) => 0.0,
            Some(k) => self.s_grid[k],
            None => self.s_grid.last().copied().unwrap_or(0.0),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.s_grid.iter().copied().zip(self.ustar.iter().copied())
    }

    /// `∫_0^∞ u*(s)^q ds`, exact for the piecewise-linear interpolant.
    pub fn lq_integral(&self, q: f64) -> f64 {
        self.s_grid
            .windows(2)
            .zip(self.ustar.windows(2))
            .map(|(s, t)| {
                let len = s[1] - s[0];
                let (a, b) = (t[0], t[1]);
                if (a - b).abs() <= 1e-14 * a.abs().max(b.abs()) {
                    len * a.powf(q)
                } else {
                    len * (a.powf(q + 1.0) - b.powf(q + 1.0)) / ((q + 1.0) * (a - b))
                }
            })
            .sum()
    }

    /// `∫|∇_g u♯_g|^p dv_g = (2n)^p ∫ |u*'(s)|^p s^{(2n-1)p/2n} (1 + s^{1/n})^{p/2} ds`
    /// for the piecewise-linear interpolant. Vertical jumps are skipped.
    pub fn hyperbolic_energy(&self, n: usize, p: f64) -> f64 {
        let rule = legendre(12);
        let nf = n as f64;
        let weight = |s: f64| s.powf((2.0 * nf - 1.0) * p / (2.0 * nf)) * (1.0 + s.powf(1.0 / nf)).powf(p / 2.0);
        let total: f64 = self
            .s_grid
            .windows(2)
            .zip(self.ustar.windows(2))
            .filter(|(s, _)| s[1] > s[0])
            .map(|(s, t)| {
                let slope = (t[0] - t[1]) / (s[1] - s[0]);
                let half = 0.5 * (s[1] - s[0]);
                let w: f64 = rule.iter().map(|&(x, wt)| wt * weight(s[0] + half * (x + 1.0))).sum();
                slope.powf(p) * w * half
            })
            .sum();
        (2.0 * nf).powf(p) * total
    }
}

/// `u♯_g(z) = u*(vol_g B_g(0, ρ(z)))`.
pub fn hyperbolic_symmetrization(ustar: &DecreasingRearrangement, z: &BallPoint) -> f64 {
    volume_coordinate(ustar, z.coords())
}

fn volume_coordinate(ustar: &DecreasingRearrangement, z: &[Complex64]) -> f64 {
    let r2 = norm_sqr(z);
    if r2 >= 1.0 {
        return 0.0;
    }
    ustar.eval((r2 / (1.0 - r2)).powi(z.len() as i32))
}

/// `u♯_e(z) = u*(|z|^{2n})` on `C^n`.
pub fn euclidean_symmetrization(ustar: &DecreasingRearrangement, z: &[Complex64]) -> f64 {
    ustar.eval(norm_sqr(z).powi(z.len() as i32))
}

/// `u♯_g` as a field on `B_n`.
pub struct HyperbolicSymmetrization<'a> {
    n: usize,
    ustar: &'a DecreasingRearrangement,
    rho_support: f64,
}

impl<'a> HyperbolicSymmetrization<'a> {
    pub fn new(n: usize, ustar: &'a DecreasingRearrangement) -> Self {
        let rho_support = radius_of_volume(ustar.support_volume(), n.max(1));
        Self { n: n.max(1), ustar, rho_support }
    }
}

impl ScalarField for HyperbolicSymmetrization<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &[Complex64]) -> f64 {
        volume_coordinate(self.ustar, z)
    }

    fn eval_polar(&self, rho: f64, _zeta: &[Complex64]) -> f64 {
        self.ustar.eval(rho.sinh().powi(2 * self.n as i32))
    }

    fn support_radius_hint(&self) -> f64 {
        (self.rho_support * (1.0 + 1e-12) + 1e-12).tanh()
    }

    fn radial_cutoff(&self, _level: f64) -> Option<f64> {
        Some(self.rho_support * (1.0 + 1e-12) + 1e-12)
    }
}

/// `(w - c)_+`: compactly supported truncation of a field with known maximum.
#[derive(Clone, Debug)]
pub struct TruncatedField<U> {
    inner: U,
    cut: f64,
    peak: f64,
}

impl<U: ScalarField> TruncatedField<U> {
    /// `inner_peak` is `max w`; the truncation level must lie in `(0, max w)`.
    pub fn new(inner: U, cut: f64, inner_peak: f64) -> Result<Self> {
        if !(cut > 0.0 && cut < inner_peak) {
            return Err(Error::Parameter(format!("truncation level {cut} must lie in (0, {inner_peak})")));
        }
        Ok(Self { inner, cut, peak: inner_peak - cut })
    }

    /// `max (w - c)_+`.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn cut(&self) -> f64 {
        self.cut
    }

    pub fn inner(&self) -> &U {
        &self.inner
    }
}

impl TruncatedField<LevelFunction> {
    /// Truncation at `fraction · max w`.
    pub fn of_level(w: LevelFunction, fraction: f64, seed: u64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::Parameter(format!("truncation fraction must lie in (0, 1), got {fraction}")));
        }
        let (t0, _) = w.maximum(seed);
        Self::new(w, fraction * t0, t0)
    }
}

impl<U: ScalarField> ScalarField for TruncatedField<U> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, z: &[Complex64]) -> f64 {
        (self.inner.eval(z) - self.cut).max(0.0)
    }

    fn eval_polar(&self, rho: f64, zeta: &[Complex64]) -> f64 {
        (self.inner.eval_polar(rho, zeta) - self.cut).max(0.0)
    }

    fn complex_gradient(&self, z: &[Complex64]) -> Option<Vec<Complex64>> {
        if self.inner.eval(z) <= self.cut {
            return Some(vec![Complex64::new(0.0, 0.0); z.len()]);
        }
        Some(
            self.inner
                .complex_gradient(z)
                .unwrap_or_else(|| fd_complex_gradient(&self.inner, z, fd_step(z))),
        )
    }

    fn support_radius_hint(&self) -> f64 {
        match self.inner.radial_cutoff(self.cut) {
            Some(rc) => rc.tanh(),
            None => self.inner.support_radius_hint(),
        }
    }

    fn radial_cutoff(&self, level: f64) -> Option<f64> {
        self.inner.radial_cutoff(self.cut + level.max(0.0))
    }
}

/// Thresholds `t_k = t0 (1 - cos(πk/(m-1)))/2`, the first moved to `1e-9 t0`.
pub fn rearrangement_t_grid(t0: f64, count: usize) -> Vec<f64> {
    let m = count.max(3);
    let mut grid: Vec<f64> = (0..m)
        .map(|k| 0.5 * t0 * (1.0 - (std::f64::consts::PI * k as f64 / (m - 1) as f64).cos()))
        .collect();
    grid[0] = 1e-9 * t0;
    grid[m - 1] = t0;
    grid
}

/// Per-direction superlevel measures on the clustered grid, kept so that
/// functionals of `u*` get delta-method error bars.
#[derive(Clone, Debug)]
pub struct SampledDistribution {
    pub n: usize,
    pub t0: f64,
    pub t_grid: Vec<f64>,
    pub mu: Vec<f64>,
    pub mu_stderr: Vec<f64>,
    pub warnings: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Value, standard error and discretization estimate of a functional of `u*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub value: f64,
    pub stderr: f64,
    pub discretization: f64,
}

impl SampledDistribution {
    /// `count` must be `2^k + 1` with `k >= 2`.
    pub fn compute<U: ScalarField + ?Sized>(u: &U, t0: f64, count: usize, cfg: &McConfig) -> Result<Self> {
        if count < 5 || !(count - 1).is_power_of_two() {
            return Err(Error::Parameter(format!("grid size must be 2^k + 1 >= 5, got {count}")));
        }
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::Parameter(format!("maximum must be positive, got {t0}")));
        }
        let t_grid = rearrangement_t_grid(t0, count);
        let (rows, warnings) = DistributionEngine::new(u, cfg)?.direction_measures(&t_grid)?;
        let (mu, mu_stderr) = (0..count)
            .map(|k| mean_stderr(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
            .unzip();
        Ok(Self { n: u.dim(), t0, t_grid, mu, mu_stderr, warnings, rows })
    }

    pub fn distribution(&self) -> DistributionFunction {
        DistributionFunction {
            n: self.n,
            t_grid: self.t_grid.clone(),
            mu: self.mu.clone(),
            mu_stderr: self.mu_stderr.clone(),
            t0: self.t0,
            samples: self.rows.len() as u64,
            warnings: self.warnings.clone(),
        }
    }

    pub fn rearrangement(&self) -> DecreasingRearrangement {
        DecreasingRearrangement::from_samples(&self.t_grid, &self.mu, self.t0)
    }

    /// `F(u*)` on the full grid, its delta-method error, and the difference
    /// to the half grid scaled for a second-order interpolant.
    pub fn functional<F: Fn(&DecreasingRearrangement) -> f64>(&self, f: F) -> Functional {
        let (value, stderr) = delta_method(&self.rows, |mu| {
            f(&DecreasingRearrangement::from_samples(&self.t_grid, mu, self.t0))
        });
        let t_half: Vec<f64> = self.t_grid.iter().step_by(2).copied().collect();
        let mu_half: Vec<f64> = self.mu.iter().step_by(2).copied().collect();
        let coarse = f(&DecreasingRearrangement::from_samples(&t_half, &mu_half, self.t0));
        Functional { value, stderr, discretization: (value - coarse).abs() / 3.0 }
    }
}

fn distribution_cfg(cfg: &McConfig) -> McConfig {
    cfg.with_seed(cfg.seed.wrapping_add(DISTRIBUTION_SALT))
}

/// `μ_{u♯_g} = μ_u` at every grid threshold with positive measure.
pub fn equimeasurability_check(sample: &SampledDistribution, cfg: &McConfig) -> Result<CheckReport> {
    let ustar = sample.rearrangement();
    let sharp = HyperbolicSymmetrization::new(sample.n, &ustar);
    let idx: Vec<usize> = (0..sample.t_grid.len()).filter(|&k| sample.mu[k] > 0.0).collect();
    let ts: Vec<f64> = idx.iter().map(|&k| sample.t_grid[k]).collect();
    if ts.is_empty() {
        return Ok(CheckReport::equality("equimeasurability", Margin::exact(0.0, 0.0)).note("empty superlevel sets"));
    }
    // u♯_g is radial, so a handful of directions is exact
    let radial_cfg = cfg.with_samples(McConfig::MIN_COUNT);
    let (rows, _) = DistributionEngine::new(&sharp, &radial_cfg)?.direction_measures(&ts)?;
    let margins: Vec<Margin> = idx
        .iter()
        .enumerate()
        .map(|(c, &k)| {
            let m_sharp = rows[0][c];
            Margin::new(m_sharp - sample.mu[k], sample.mu_stderr[k], sample.mu[k])
        })
        .collect();
    Ok(CheckReport::worst_of("equimeasurability", &margins, true))
}

/// `‖u‖_q = ‖u♯_g‖_q` for each `q` (finite `q` compared as `q`-th powers,
/// `q = ∞` as `max u = u*(0)`), plus `vol_g(supp u) = vol_g(supp u♯_g)`.
pub fn preservation_check<U: ScalarField + ?Sized>(
    u: &U,
    t0: f64,
    qs: &[f64],
    cfg: &McConfig,
) -> Result<Vec<CheckReport>> {
    if qs.iter().any(|q| !(*q > 0.0)) {
        return Err(Error::Parameter("exponents must be positive".into()));
    }
    let finite: Vec<f64> = qs.iter().copied().filter(|q| q.is_finite()).collect();
    let rho_max = compact_extent(u)?;
    let rows = support_moment_rows(u, rho_max, cfg, finite.len() + 1, false, |v, _, out| {
        for (o, q) in out.iter_mut().zip(&finite) {
            *o = v.powf(*q);
        }
        out[finite.len()] = 1.0;
    })?;
    let sample = SampledDistribution::compute(u, t0, REARRANGEMENT_GRID, &distribution_cfg(cfg))?;
    let column = |k: usize| mean_stderr(&rows.iter().map(|r| r[k]).collect::<Vec<_>>());
    let mut out = Vec::new();
    for q in qs {
        if q.is_infinite() {
            // sampled rays can miss a thin maximizing set, so the top sampled
            // level is only a lower bound for ess sup u; exceeding t0 would
            // mean the maximum search failed
            let k = sample.mu.iter().rposition(|&m| m > 0.0);
            let top = k.map_or(0.0, |k| sample.t_grid[k]);
            let ustar = sample.rearrangement();
            out.push(
                CheckReport::inequality("linf-preservation", Margin::new(t0 - top, 0.0, t0)).note(format!(
                    "max u = {t0:.12e}, u*(0) = {:.12e}, highest sampled level = {top:.12e}",
                    ustar.sup()
                )),
            );
            continue;
        }
        let k = finite.iter().position(|x| x == q).expect("finite exponent present");
        let (lhs, lhs_se) = column(k);
        let rhs = sample.functional(|r| r.lq_integral(*q));
        let margin = Margin::new(lhs - rhs.value, lhs_se.hypot(rhs.stderr), lhs).with_discretization(rhs.discretization);
        out.push(
            CheckReport::equality(format!("lq-preservation[q={q}]"), margin)
                .note(format!("∫u^q dv_g = {lhs:.8e}, ∫(u♯)^q dv_g = {:.8e}", rhs.value)),
        );
    }
    let (vol, vol_se) = column(finite.len());
    let support = sample.functional(extrapolated_support);
    let raw = sample.rearrangement().support_volume();
    let disc = support.discretization.hypot(support.value - raw);
    let margin = Margin::new(vol - support.value, vol_se.hypot(support.stderr), vol).with_discretization(disc);
    out.push(CheckReport::equality("volume-preservation", margin));
    for r in out.iter_mut() {
        r.notes.extend(sample.warnings.iter().cloned());
    }
    Ok(out)
}

/// Support volume with the last knot segment extended linearly to `u* = 0`;
/// the lowest grid threshold sits just above zero.
fn extrapolated_support(r: &DecreasingRearrangement) -> f64 {
    let k = r.s_grid.len();
    if k < 2 {
        return r.support_volume();
    }
    let (s0, t0) = (r.s_grid[k - 2], r.ustar[k - 2]);
    let (s1, t1) = (r.s_grid[k - 1], r.ustar[k - 1]);
    if t1 <= 0.0 || t0 <= t1 {
        return r.support_volume();
    }
    s1 + t1 * (s1 - s0) / (t0 - t1)
}

/// `u♯_g = u` pointwise at `tanh(ρ_k) e_1` for a radial nonincreasing `u`,
/// with `u*` from bisection on the distribution engine.
pub fn fixed_point_check<U: ScalarField + ?Sized>(u: &U, t0: f64, radii: &[f64], cfg: &McConfig) -> Result<CheckReport> {
    let n = u.dim();
    let radial_cfg = cfg.with_samples(McConfig::MIN_COUNT);
    let engine = DistributionEngine::new(u, &radial_cfg)?;
    let s_grid: Vec<f64> = radii.iter().map(|&r| r.sinh().powi(2 * n as i32)).collect();
    let ustar = DecreasingRearrangement::from_fn(
        |t| {
            let (rows, _) = engine.direction_measures(&[t])?;
            Ok(rows.iter().map(|r| r[0]).sum::<f64>() / rows.len() as f64)
        },
        t0,
        &s_grid,
    )?;
    let mut e1 = vec![Complex64::new(0.0, 0.0); n];
    e1[0] = Complex64::new(1.0, 0.0);
    let margins: Vec<Margin> = radii
        .iter()
        .map(|&rho| {
            let s = rho.sinh().powi(2 * n as i32);
            let sharp = ustar.eval(s);
            Margin::exact(sharp - u.eval_polar(rho, &e1), 1e-10 * t0.max(1.0))
        })
        .collect();
    Ok(CheckReport::worst_of("rearrangement-fixed-point", &margins, true))
}

/// Both sides of the Pólya–Szegő inequality `∫|∇_g u♯_g|^p ≤ ∫|∇_g u|^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyaSzegoReport {
    pub p: f64,
    /// Radial energy of `u♯_g` from its rearrangement.
    pub sharp: Functional,
    pub direct: f64,
    pub direct_stderr: f64,
    pub warnings: Vec<String>,
}

impl PolyaSzegoReport {
    pub fn margin(&self) -> Margin {
        Margin::new(self.direct - self.sharp.value, self.direct_stderr.hypot(self.sharp.stderr), self.direct)
            .with_discretization(self.sharp.discretization)
    }

    pub fn inequality(&self) -> CheckReport {
        let mut r = CheckReport::inequality(format!("polya-szego[p={}]", self.p), self.margin()).note(format!(
            "∫|∇u♯|^p = {:.8e}, ∫|∇u|^p = {:.8e}",
            self.sharp.value, self.direct
        ));
        r.notes.extend(self.warnings.iter().cloned());
        r
    }

    /// Equality reading, for radial nonincreasing `u`.
    pub fn equality(&self) -> CheckReport {
        let mut r = self.inequality();
        r.id = format!("polya-szego-equality[p={}]", self.p);
        r.pass = r.margin.vanishes();
        r
    }
}

/// Pólya–Szegő for a compactly supported `u` with maximum `t0`.
pub fn polya_szego_check<U: ScalarField + ?Sized>(u: &U, t0: f64, p: f64, cfg: &McConfig) -> Result<PolyaSzegoReport> {
    Ok(polya_szego_checks(u, t0, &[p], cfg)?.remove(0))
}

/// Pólya–Szegő for several exponents, sharing one distribution sample.
pub fn polya_szego_checks<U: ScalarField + ?Sized>(
    u: &U,
    t0: f64,
    ps: &[f64],
    cfg: &McConfig,
) -> Result<Vec<PolyaSzegoReport>> {
    if let Some(p) = ps.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
        return Err(Error::Parameter(format!("Pólya–Szegő needs 1 < p < ∞, got {p}")));
    }
    if ps.is_empty() {
        return Err(Error::Usage("no exponents given".into()));
    }
    let rho_max = compact_extent(u)?;
    let rows = support_moment_rows(u, rho_max, cfg, ps.len(), true, |_, g, out| {
        for (o, p) in out.iter_mut().zip(ps) {
            *o = g.powf(*p);
        }
    })?;
    let sample = SampledDistribution::compute(u, t0, REARRANGEMENT_GRID, &distribution_cfg(cfg))?;
    let n = u.dim();
    Ok(ps
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let (direct, direct_stderr) = mean_stderr(&rows.iter().map(|r| r[k]).collect::<Vec<_>>());
            let sharp = sample.functional(|r| r.hyperbolic_energy(n, p));
            PolyaSzegoReport { p, sharp, direct, direct_stderr, warnings: sample.warnings.clone() }
        })
        .collect())
}

/// Analytic radial profiles for the gradient-integral identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `u*(s) = (1 + s^{1/n})^{-1}`, optionally cut off at `s_max`.
    Inverse { n: usize, s_max: Option<f64> },
    /// `u* = 1` on `[0, s0]`, linear down to `0` at `s1`.
    Ramp { n: usize, s0: f64, s1: f64 },
}

impl RadialProfile {
    pub fn dim(&self) -> usize {
        match *self {
            RadialProfile::Inverse { n, .. } | RadialProfile::Ramp { n, .. } => n,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            RadialProfile::Inverse { n, s_max } => {
                if s_max.is_some_and(|m| s > m) {
                    0.0
                } else {
                    1.0 / (1.0 + s.powf(1.0 / n as f64))
                }
            }
            RadialProfile::Ramp { s0, s1, .. } => {
                if s <= s0 {
                    1.0
                } else if s >= s1 {
                    0.0
                } else {
                    (s1 - s) / (s1 - s0)
                }
            }
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            RadialProfile::Inverse { n, s_max } => {
                if s_max.is_some_and(|m| s > m) || s <= 0.0 {
                    return 0.0;
                }
                let nf = n as f64;
                let r = s.powf(1.0 / nf);
                -(r / (nf * s)) / ((1.0 + r) * (1.0 + r))
            }
            RadialProfile::Ramp { s0, s1, .. } => {
                if s > s0 && s < s1 {
                    -1.0 / (s1 - s0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper end of the `s`-domain (`∞` when unbounded).
    pub fn s_end(&self) -> f64 {
        match *self {
            RadialProfile::Inverse { s_max, .. } => s_max.unwrap_or(f64::INFINITY),
            RadialProfile::Ramp { s1, .. } => s1,
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match *self {
            RadialProfile::Inverse { .. } => vec![1.0],
            RadialProfile::Ramp { s0, s1, .. } => vec![s0, s1],
        }
    }

    /// Closed forms of both integrals for the ramp at `p = 2`.
    pub fn closed_form(&self, p: f64) -> Option<(f64, f64)> {
        match *self {
            RadialProfile::Ramp { n, s0, s1 } if p == 2.0 => {
                let nf = n as f64;
                let e = (2.0 * nf - 1.0) / nf;
                let k = (2.0 * nf).powi(2) / (s1 - s0).powi(2);
                let e1 = k * (s1.powf(e + 1.0) - s0.powf(e + 1.0)) / (e + 1.0);
                let extra = k * (s1.powi(3) - s0.powi(3)) / 3.0;
                Some((e1, e1 + extra))
            }
            _ => None,
        }
    }
}

/// The two radial gradient integrals, each by a 1-D formula in `s` and by
/// direct quadrature of finite-difference gradients of the symmetrized field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialIdentityReport {
    pub profile: RadialProfile,
    pub p: f64,
    pub euclidean_formula: f64,
    pub euclidean_direct: f64,
    pub hyperbolic_formula: f64,
    pub hyperbolic_direct: f64,
    pub closed_form: Option<(f64, f64)>,
    pub warnings: Vec<String>,
}

/// Relative agreement required between the two quadratures.
pub const RADIAL_IDENTITY_TOL: f64 = 1e-4;

impl RadialIdentityReport {
    pub fn checks(&self) -> Vec<CheckReport> {
        let rel = |a: f64, b: f64, id: &str| {
            CheckReport::equality(id.to_string(), Margin::exact(a - b, RADIAL_IDENTITY_TOL * b.abs()))
                .note(format!("{a:.10e} vs {b:.10e}"))
        };
        let mut out = vec![
            rel(self.euclidean_direct, self.euclidean_formula, "radial-identity-euclidean"),
            rel(self.hyperbolic_direct, self.hyperbolic_formula, "radial-identity-hyperbolic"),
        ];
        if let Some((e1, e2)) = self.closed_form {
            out.push(rel(self.euclidean_formula, e1, "radial-identity-euclidean-closed-form"));
            out.push(rel(self.hyperbolic_formula, e2, "radial-identity-hyperbolic-closed-form"));
        }
        for r in out.iter_mut() {
            r.notes.extend(self.warnings.iter().cloned());
        }
        out
    }
}

/// `s`-domain integral of `h`, truncated where it drops below `1e-14` of its
/// running size for unbounded profiles.
fn integrate_s<H: Fn(f64) -> f64>(h: H, profile: &RadialProfile, warnings: &mut Vec<String>, what: &str) -> f64 {
    let end = profile.s_end();
    let breaks = profile.breaks();
    let res = if end.is_finite() {
        adaptive(&h, 0.0, end, &breaks, 1e-15, 1e-12)
    } else {
        adaptive_to_infinity(&h, 0.0, &breaks, 1e-15, 1e-12)
    };
    if !res.converged {
        warnings.push(format!("{what}: 1-D integral did not converge (error {:.2e})", res.error));
    }
    res.value
}

pub fn radial_gradient_identities_check(profile: RadialProfile, p: f64) -> Result<RadialIdentityReport> {
    let n = profile.dim();
    if n == 0 {
        return Err(Error::Parameter("dimension must be >= 1".into()));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("exponent must be >= 1, got {p}")));
    }
    let nf = n as f64;
    let c = (2.0 * nf).powf(p);
    let e = (2.0 * nf - 1.0) * p / (2.0 * nf);
    let mut warnings = Vec::new();
    let euclidean_formula =
        c * integrate_s(|s| profile.derivative(s).abs().powf(p) * s.powf(e), &profile, &mut warnings, "(E1)");
    let k_integral = c * integrate_s(
        |s| profile.derivative(s).abs().powf(p) * s.powf(e) * ((1.0 + s.powf(1.0 / nf)).powf(p / 2.0) - 1.0),
        &profile,
        &mut warnings,
        "(E2)",
    );
    let hyperbolic_formula = euclidean_formula + k_integral;

    // Direct side: finite-difference gradients along a fixed non-axial direction.
    let zeta: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + i as f64, 0.5 - i as f64 * 0.25))
        .collect();
    let norm = norm_sqr(&zeta).sqrt();
    let zeta: Vec<Complex64> = zeta.into_iter().map(|c| c / norm).collect();
    let sym = RadialProfileField { profile, n };
    let euclid = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let z: Vec<Complex64> = zeta.iter().map(|c| c * r).collect();
        let h = 1e-6 * r.max(1e-3);
        let d = fd_complex_gradient_unbounded(&sym, &z, h);
        // real gradient norm: |∇u|^2 = 4 Σ |∂u/∂z_i|^2
        let g = 2.0 * d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        2.0 * nf * r.powf(2.0 * nf - 1.0) * g.powf(p)
    };
    let r_breaks: Vec<f64> = profile.breaks().iter().map(|s| s.powf(1.0 / (2.0 * nf))).collect();
    let r_end = profile.s_end().powf(1.0 / (2.0 * nf));
    let res = if r_end.is_finite() {
        adaptive(euclid, 0.0, r_end, &r_breaks, 1e-15, 1e-10)
    } else {
        adaptive_to_infinity(euclid, 0.0, &r_breaks, 1e-15, 1e-10)
    };
    if !res.converged {
        warnings.push(format!("Euclidean direct quadrature did not converge (error {:.2e})", res.error));
    }
    let euclidean_direct = res.value;

    let hyper = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        crate::integrate::volume_jacobian(rho, n) * polar_gradient_norm(&sym, rho, &zeta).powf(p)
    };
    let rho_breaks: Vec<f64> = profile.breaks().iter().map(|&s| radius_of_volume(s, n)).collect();
    let rho_end = radius_of_volume(profile.s_end(), n);
    let res = if rho_end.is_finite() {
        adaptive(hyper, 0.0, rho_end, &rho_breaks, 1e-15, 1e-10)
    } else {
        // finite differences lose precision as tanh ρ approaches 1; by ρ = 10
        // the integrand of any admissible profile is far below the tolerance
        adaptive(hyper, 0.0, 10.0, &rho_breaks, 1e-15, 1e-10)
    };
    if !res.converged {
        warnings.push(format!("hyperbolic direct quadrature did not converge (error {:.2e})", res.error));
    }
    Ok(RadialIdentityReport {
        profile,
        p,
        euclidean_formula,
        euclidean_direct,
        hyperbolic_formula,
        hyperbolic_direct: res.value,
        closed_form: profile.closed_form(p),
        warnings,
    })
}

/// A radial profile read both as `u♯_e` on `C^n` (through `eval`) and as
/// `u♯_g` on the ball (through `eval_polar` and ball-point `eval`).
struct RadialProfileField {
    profile: RadialProfile,
    n: usize,
}

impl RadialProfileField {
    fn euclidean(&self, z: &[Complex64]) -> f64 {
        self.profile.value(norm_sqr(z).powi(self.n as i32))
    }
}

impl ScalarField for RadialProfileField {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &[Complex64]) -> f64 {
        let r2 = norm_sqr(z);
        if r2 >= 1.0 {
            return 0.0;
        }
        self.profile.value((r2 / (1.0 - r2)).powi(self.n as i32))
    }
}

/// Holomorphic partials of the Euclidean reading by central differences.
fn fd_complex_gradient_unbounded(f: &RadialProfileField, z: &[Complex64], h: f64) -> Vec<Complex64> {
    let mut w = z.to_vec();
    (0..z.len())
        .map(|i| {
            let zi = z[i];
            let mut at = |d: Complex64| {
                w[i] = zi + d;
                let v = f.euclidean(&w);
                w[i] = zi;
                v
            };
            let xp = at(Complex64::new(h, 0.0));
            let xm = at(Complex64::new(-h, 0.0));
            let yp = at(Complex64::new(0.0, h));
            let ym = at(Complex64::new(0.0, -h));
            Complex64::new((xp - xm) / (4.0 * h), -(yp - ym) / (4.0 * h))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::{LevelFunction, Polynomial};
    use approx::assert_relative_eq;

    #[test]
    fn inverse_of_model_distribution() {
        for n in [1usize, 2] {
            let t: Vec<f64> = (1..200).map(|k| k as f64 / 200.0).collect();
            let mu: Vec<f64> = t.iter().map(|&t| (1.0 / t - 1.0).powi(n as i32)).collect();
            let r = DecreasingRearrangement::from_samples(&t, &mu, 1.0);
            for (&tk, &mk) in t.iter().zip(&mu) {
                let exact = 1.0 / (1.0 + mk.powf(1.0 / n as f64));
                assert_relative_eq!(r.eval(mk), exact, max_relative = 1e-12);
                assert_relative_eq!(r.eval(mk), tk, max_relative = 1e-12);
            }
            assert_eq!(r.sup(), 1.0);
        }
    }

    #[test]
    fn zero_distribution_gives_zero() {
        let r = DecreasingRearrangement::from_samples(&[0.1, 0.5, 1.0], &[0.0; 3], 1.0);
        assert!(r.is_empty());
        assert_eq!(r.eval(0.0), 0.0);
        assert_eq!(r.eval(3.0), 0.0);
    }

    #[test]
    fn step_distribution_inverts_exactly() {
        let mu = |t: f64| Ok(if t < 1.0 { 5.0 } else { 0.0 });
        let r = DecreasingRearrangement::from_fn(mu, 10.0, &[0.0, 1.0, 4.999, 5.0, 7.0]).unwrap();
        for (s, v) in [(0.0, 1.0), (1.0, 1.0), (4.999, 1.0), (5.0, 0.0), (7.0, 0.0), (9.0, 0.0)] {
            assert!((r.eval(s) - v).abs() < 1e-12, "u*({s}) = {}", r.eval(s));
        }
    }

    #[test]
    fn ties_resolve_right_continuously() {
        // μ flat at 2 on [0.2, 0.4]: u*(2) takes the lower end of the tie
        let r = DecreasingRearrangement::from_samples(&[0.1, 0.2, 0.4, 0.6], &[3.0, 2.0, 2.0, 1.0], 0.8);
        assert_relative_eq!(r.eval(2.0), 0.2);
        assert!(r.eval(1.999_999) > 0.39);
        assert!(r.ustar.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn piecewise_linear_integrals() {
        let r = DecreasingRearrangement { s_grid: vec![0.0, 1.0, 3.0], ustar: vec![2.0, 2.0, 0.0] };
        assert_relative_eq!(r.lq_integral(1.0), 2.0 + 2.0, max_relative = 1e-14);
        assert_relative_eq!(r.lq_integral(2.0), 4.0 + 2.0 * 8.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(r.support_volume(), 3.0);
    }

    #[test]
    fn symmetrizations_of_model() {
        let r = DecreasingRearrangement::from_fn(|t: f64| Ok((1.0 / t - 1.0).max(0.0)), 1.0, &[0.0, 0.5, 1.0, 2.0])
            .unwrap();
        assert_relative_eq!(r.sup(), 1.0, max_relative = 1e-12);
        let z = BallPoint::new(vec![Complex64::new(0.3, 0.4)]).unwrap();
        // sinh^2 ρ = 1/3 at |z|^2 = 1/4, where u*(1/3) = 3/4 up to interpolation
        let v = hyperbolic_symmetrization(&r, &z);
        assert!((v - 0.75).abs() < 0.03);
        let e = euclidean_symmetrization(&r, &[Complex64::new(0.5_f64.sqrt(), 0.0)]);
        assert_relative_eq!(e, 2.0 / 3.0, max_relative = 1e-12);
        let near = euclidean_symmetrization(&r, &[Complex64::new(0.1, 0.0)]);
        assert!(near >= e);
    }

    #[test]
    fn radial_level_function_is_a_fixed_point() {
        let u = LevelFunction::new(Polynomial::one(1), 2.0, 1.0).unwrap();
        let cfg = McConfig::new(7, 16, 32).unwrap();
        let radii: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
        let rep = fixed_point_check(&u, 1.0, &radii, &cfg).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn truncated_field_is_compact() {
        let w = LevelFunction::new(Polynomial::coordinate(2, 0), 2.0, 1.0).unwrap();
        let u = TruncatedField::new(w, 0.1, 0.25).unwrap();
        let rho = compact_extent(&u).unwrap();
        let zeta = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(u.eval_polar(rho, &zeta), 0.0);
        assert!(u.eval_polar(0.7, &zeta) > 0.0);
        assert!(TruncatedField::new(LevelFunction::hardy(Polynomial::one(1), 1.0).unwrap(), 2.0, 1.0).is_err());
    }

    #[test]
    fn radial_truncation_preserves_norms_and_energy() {
        let w = LevelFunction::new(Polynomial::one(2), 2.0, 1.0).unwrap();
        let u = TruncatedField::new(w, 0.2, 1.0).unwrap();
        let cfg = McConfig::new(3, 64, 32).unwrap();
        for r in preservation_check(&u, u.peak(), &[1.0, 2.0, 4.0, f64::INFINITY], &cfg).unwrap() {
            assert!(r.pass, "{r:?}");
        }
        let ps = polya_szego_check(&u, u.peak(), 2.0, &cfg).unwrap();
        assert!(ps.equality().pass, "{ps:?}");
    }

    #[test]
    fn radial_identities_agree() {
        let cases = [
            (RadialProfile::Inverse { n: 1, s_max: None }, 2.0),
            (RadialProfile::Inverse { n: 2, s_max: Some(1e4) }, 2.0),
            (RadialProfile::Ramp { n: 1, s0: 0.5, s1: 2.0 }, 2.0),
            (RadialProfile::Ramp { n: 2, s0: 0.3, s1: 1.7 }, 2.0),
            (RadialProfile::Inverse { n: 2, s_max: Some(1e4) }, 3.0),
        ];
        for (profile, p) in cases {
            let rep = radial_gradient_identities_check(profile, p).unwrap();
            for c in rep.checks() {
                assert!(c.pass, "{profile:?} p={p}: {c:?}");
            }
        }
        // n = 1, p = 2 closed values: 4 B(2,2) = 2/3 and 4 B(2,1) = 2
        let rep = radial_gradient_identities_check(RadialProfile::Inverse { n: 1, s_max: None }, 2.0).unwrap();
        assert_relative_eq!(rep.euclidean_formula, 2.0 / 3.0, max_relative = 1e-10);
        assert_relative_eq!(rep.hyperbolic_formula, 2.0, max_relative = 1e-10);
    }
}
