//! Hardy and weighted Bergman norms, pointwise bounds, the contraction chain
//! and the Hardy limit of Bergman norms.
//!
//! With `σ(S_n) = 1` and `v(B_n) = 1`:
//!
//! * `‖f‖_{H^p}^p = ∫_{S_n} |f|^p dσ` (polynomials extend to the sphere, so
//!   the supremum over dilates is the boundary value);
//! * `‖f‖_{A_α^p}^p = c_α ∫ |f|^p (1-|z|^2)^{α-n-1} dv`,
//!   `c_α = Γ(α) / (n! Γ(α-n))`.

use crate::check::{CheckReport, Margin};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::holo::Polynomial;
use crate::integrate::{IntegralEstimate, McConfig, Method};
use crate::quad::JacobiRule;
use crate::special::{factorial, gamma, ln_gamma};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Hardy { p: f64 },
    Bergman { p: f64, alpha: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub space: Space,
    pub n: usize,
}

impl SpaceParams {
    pub fn hardy(n: usize, p: f64) -> Result<Self> {
        let s = Self { space: Space::Hardy { p }, n };
        s.validate()?;
        Ok(s)
    }

    pub fn bergman(n: usize, p: f64, alpha: f64) -> Result<Self> {
        let s = Self { space: Space::Bergman { p, alpha }, n };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parameter("dimension must be >= 1".into()));
        }
        let p = self.p();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("exponent p must be positive, got {p}")));
        }
        if let Space::Bergman { alpha, .. } = self.space {
            bergman_constant(self.n, alpha)?;
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        match self.space {
            Space::Hardy { p } | Space::Bergman { p, .. } => p,
        }
    }

    /// Exponent of `(1-|z|^2)` in the pointwise bound: `n` for Hardy, `α`
    /// for Bergman.
    pub fn weight_exponent(&self) -> f64 {
        match self.space {
            Space::Hardy { .. } => self.n as f64,
            Space::Bergman { alpha, .. } => alpha,
        }
    }

    /// `r = p/n` (Hardy) or `p/α` (Bergman).
    pub fn r(&self) -> f64 {
        self.p() / self.weight_exponent()
    }
}

/// `c_α = Γ(α) / (n! Γ(α-n))`, which makes `‖1‖_{A_α^p} = 1`.
pub fn bergman_constant(n: usize, alpha: f64) -> Result<f64> {
    let nn = n as f64;
    if !(alpha > nn && alpha.is_finite()) {
        return Err(Error::Parameter(format!("Bergman weight needs α > n = {n}, got α = {alpha}")));
    }
    let c = if alpha < 150.0 {
        gamma(alpha) / (factorial(n as u32) * gamma(alpha - nn))
    } else {
        (ln_gamma(alpha) - ln_gamma(alpha - nn)).exp() / factorial(n as u32)
    };
    if c.is_finite() && c > 0.0 {
        Ok(c)
    } else {
        Err(Error::Parameter(format!("c_α not finite for α = {alpha}")))
    }
}

/// `k_α = (α-n) Γ(α+1) / (Γ(n+1) Γ(α-n+1))`, equal to `α c_α`.
pub fn layer_cake_constant(n: usize, alpha: f64) -> Result<f64> {
    let nn = n as f64;
    if !(alpha > nn) {
        return Err(Error::Parameter(format!("k_α needs α > n, got α = {alpha}")));
    }
    Ok((alpha - nn) * gamma(alpha + 1.0) / (gamma(nn + 1.0) * gamma(alpha - nn + 1.0)))
}

/// Closed-form `‖f‖^p` when available: single monomials (any `p`) and even
/// integer `p = 2k` through `‖f^k‖_2^2`.
pub fn exact_norm_pow(f: &Polynomial, params: &SpaceParams) -> Option<f64> {
    params.validate().ok()?;
    if f.dim() != params.n {
        return None;
    }
    let p = params.p();
    let n = params.n as f64;
    if f.is_empty() {
        return Some(0.0);
    }
    if f.len() == 1 {
        let (m, c) = f.terms().next()?;
        let half: f64 = p * m.degree() as f64 / 2.0;
        let sphere = (ln_gamma(n)
            + m.exponents().iter().map(|&k| ln_gamma(p * k as f64 / 2.0 + 1.0)).sum::<f64>()
            - ln_gamma(n + half))
            .exp();
        let radial = match params.space {
            Space::Hardy { .. } => 1.0,
            Space::Bergman { alpha, .. } => {
                bergman_constant(params.n, alpha).ok()? * n * crate::special::beta(n + half, alpha - n)
            }
        };
        return Some(c.norm().powf(p) * sphere * radial);
    }
    let k = p / 2.0;
    if k.fract() == 0.0 && (1.0..=8.0).contains(&k) {
        let g = f.pow(k as u32);
        return match params.space {
            Space::Hardy { .. } => Some(g.hardy2_norm_sq()),
            Space::Bergman { alpha, .. } => g.bergman2_norm_sq(alpha).ok(),
        };
    }
    None
}

/// Per-direction samples of `‖f‖^p` for several spaces on the common
/// direction set; row `i` belongs to `spaces[i]`.
pub fn norm_pow_samples(f: &Polynomial, spaces: &[SpaceParams], cfg: &McConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let n = f.dim();
    enum Plan {
        Sphere(f64),
        Radial { p: f64, c: f64, nodes: Vec<(f64, f64)> },
    }
    let mut plans = Vec::with_capacity(spaces.len());
    for s in spaces {
        s.validate()?;
        if s.n != n {
            return Err(Error::DimensionMismatch { expected: s.n, got: n });
        }
        plans.push(match s.space {
            Space::Hardy { p } => Plan::Sphere(p),
            Space::Bergman { p, alpha } => {
                let rule = JacobiRule::new(cfg.radial_nodes, alpha - n as f64 - 1.0, n as f64 - 1.0)?;
                Plan::Radial { p, c: bergman_constant(n, alpha)?, nodes: rule.mapped(0.0, 1.0) }
            }
        });
    }
    let per_dir = map_indexed(cfg.execution, cfg.sphere_samples, |j| {
        let zeta = cfg.direction(n, j);
        let mut z = zeta.clone();
        plans
            .iter()
            .map(|plan| match plan {
                Plan::Sphere(p) => f.eval_unchecked(&zeta).norm().powf(*p),
                Plan::Radial { p, c, nodes } => {
                    nodes
                        .iter()
                        .map(|&(x, w)| {
                            let r = x.sqrt();
                            for (zi, ci) in z.iter_mut().zip(&zeta) {
                                *zi = ci * r;
                            }
                            w * f.eval_unchecked(&z).norm().powf(*p)
                        })
                        .sum::<f64>()
                        * c
                        * n as f64
                }
            })
            .collect::<Vec<f64>>()
    });
    Ok((0..spaces.len())
        .map(|i| per_dir.iter().map(|row| row[i]).collect())
        .collect())
}

fn estimate(samples: &[f64]) -> IntegralEstimate {
    let (value, stderr) = crate::check::mean_stderr(samples);
    IntegralEstimate { value, stderr, samples: samples.len() as u64, method: Method::MonteCarlo, warnings: Vec::new() }
}

/// `‖f‖^p` by sampling.
pub fn norm_pow(f: &Polynomial, params: &SpaceParams, cfg: &McConfig) -> Result<IntegralEstimate> {
    let rows = norm_pow_samples(f, std::slice::from_ref(params), cfg)?;
    let mut e = estimate(&rows[0]);
    if matches!(params.space, Space::Bergman { .. }) {
        e.method = Method::RadialProduct;
    }
    Ok(e)
}

/// `‖f‖_{H^p}` by sphere sampling.
pub fn hardy_norm(f: &Polynomial, p: f64, cfg: &McConfig) -> Result<IntegralEstimate> {
    Ok(norm_pow(f, &SpaceParams::hardy(f.dim(), p)?, cfg)?.root(p))
}

/// `‖f‖_{A_α^p}` by direction sampling and Gauss–Jacobi in `|z|^2`.
pub fn bergman_norm(f: &Polynomial, p: f64, alpha: f64, cfg: &McConfig) -> Result<IntegralEstimate> {
    Ok(norm_pow(f, &SpaceParams::bergman(f.dim(), p, alpha)?, cfg)?.root(p))
}

/// `‖f‖^p`, exact when a closed form exists and sampled otherwise.
pub fn best_norm_pow(f: &Polynomial, params: &SpaceParams, cfg: &McConfig) -> Result<IntegralEstimate> {
    match exact_norm_pow(f, params) {
        Some(v) => Ok(IntegralEstimate::exact(v)),
        None => norm_pow(f, params, cfg),
    }
}

/// Delta-method estimate of `A^{1/pa} - B^{1/pb}` from paired samples.
fn paired_root_difference(a: &[f64], pa: f64, b: &[f64], pb: f64) -> (f64, f64) {
    let m = a.len() as f64;
    let ma = a.iter().sum::<f64>() / m;
    let mb = b.iter().sum::<f64>() / m;
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
        sab += (x - ma) * (y - mb);
    }
    let d = (m - 1.0).max(1.0) * m;
    let (vaa, vbb, vab) = (saa / d, sbb / d, sab / d);
    let ra = ma.max(0.0).powf(1.0 / pa);
    let rb = mb.max(0.0).powf(1.0 / pb);
    let ga = if ma > 0.0 { ra / (pa * ma) } else { 0.0 };
    let gb = if mb > 0.0 { -rb / (pb * mb) } else { 0.0 };
    let var = ga * ga * vaa + gb * gb * vbb + 2.0 * ga * gb * vab;
    (ra - rb, var.max(0.0).sqrt())
}

/// Pointwise bound `|f(z)|^p (1-|z|^2)^{w} <= ‖f‖^p` with `w = n` (Hardy) or
/// `α` (Bergman), at every listed point.
pub fn pointwise_bound_check(
    f: &Polynomial,
    params: &SpaceParams,
    points: &[Vec<Complex64>],
    cfg: &McConfig,
) -> Result<CheckReport> {
    let norm = best_norm_pow(f, params, cfg)?;
    let p = params.p();
    let w = params.weight_exponent();
    let mut margins = Vec::with_capacity(points.len());
    for z in points {
        let pt = crate::geometry::BallPoint::new(z.clone())?;
        let lhs = f.evaluate(pt.coords())?.norm().powf(p) * (1.0 - pt.norm_sqr()).powf(w);
        margins.push(Margin::new(norm.value - lhs, norm.stderr, norm.value));
    }
    Ok(CheckReport::worst_of("pointwise-bound", &margins, false)
        .note(format!("norm^p = {:.12} ± {:.3e}", norm.value, norm.stderr)))
}

/// One link of the contraction chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub label: String,
    pub norm: IntegralEstimate,
    pub exact: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub entries: Vec<ChainEntry>,
    /// `norm_i - norm_{i+1}` for consecutive entries.
    pub steps: Vec<Margin>,
    pub report: CheckReport,
}

fn sorted_strict(alphas: &[f64], ascending: bool) -> bool {
    alphas
        .windows(2)
        .all(|w| if ascending { w[0] < w[1] } else { w[0] > w[1] })
}

/// `‖f‖_{H^{nr}} >= ‖f‖_{A_{α_1}^{α_1 r}} >= ‖f‖_{A_{α_2}^{α_2 r}} >= ...`
/// for an increasing `alphas`.
pub fn contraction_chain_check(f: &Polynomial, r: f64, alphas: &[f64], cfg: &McConfig) -> Result<ChainReport> {
    if alphas.is_empty() || !sorted_strict(alphas, true) {
        return Err(Error::Parameter("alpha grid must be nonempty and strictly increasing".into()));
    }
    let n = f.dim();
    let mut spaces = vec![SpaceParams::hardy(n, n as f64 * r)?];
    for &a in alphas {
        spaces.push(SpaceParams::bergman(n, a * r, a)?);
    }
    let rows = norm_pow_samples(f, &spaces, cfg)?;
    let mut entries = Vec::new();
    for (s, row) in spaces.iter().zip(&rows) {
        let p = s.p();
        let label = match s.space {
            Space::Hardy { p } => format!("H^{p}"),
            Space::Bergman { p, alpha } => format!("A_{alpha}^{p}"),
        };
        entries.push(ChainEntry {
            label,
            norm: estimate(row).root(p),
            exact: exact_norm_pow(f, s).map(|v| v.powf(1.0 / p)),
        });
    }
    let mut steps = Vec::new();
    for i in 0..spaces.len() - 1 {
        let (d, se) = paired_root_difference(&rows[i], spaces[i].p(), &rows[i + 1], spaces[i + 1].p());
        steps.push(Margin::new(d, se, entries[i].norm.value));
    }
    let report = CheckReport::worst_of("contraction-chain", &steps, false);
    Ok(ChainReport { entries, steps, report })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub alphas: Vec<f64>,
    /// `‖f‖_{A_α^{αr}} - ‖f‖_{H^{nr}}` with its standard error.
    pub gaps: Vec<(f64, f64)>,
    pub report: CheckReport,
}

/// Bergman norms approach the Hardy norm as `α → n+`: the gap shrinks along
/// a decreasing `alphas` sequence.
pub fn hardy_limit_check(f: &Polynomial, r: f64, alphas: &[f64], cfg: &McConfig) -> Result<LimitReport> {
    let n = f.dim();
    if alphas.is_empty() || !sorted_strict(alphas, false) || alphas.iter().any(|&a| a <= n as f64) {
        return Err(Error::Parameter("alpha sequence must decrease strictly towards n from above".into()));
    }
    let mut spaces = vec![SpaceParams::hardy(n, n as f64 * r)?];
    for &a in alphas {
        spaces.push(SpaceParams::bergman(n, a * r, a)?);
    }
    let rows = norm_pow_samples(f, &spaces, cfg)?;
    let ph = spaces[0].p();
    let gaps: Vec<(f64, f64)> = (1..spaces.len())
        .map(|i| {
            let (d, se) = paired_root_difference(&rows[i], spaces[i].p(), &rows[0], ph);
            (d.abs(), se)
        })
        .collect();
    let steps: Vec<Margin> = gaps
        .windows(2)
        .map(|w| Margin::new(w[0].0 - w[1].0, w[0].1.hypot(w[1].1), w[0].0))
        .collect();
    let mut report = CheckReport::worst_of("hardy-limit", &steps, false);
    if let Some(&(g, se)) = gaps.last() {
        if se > g {
            report = report.note(format!("sampling noise {se:.2e} exceeds the final gap {g:.2e}; raise samples"));
        }
    }
    Ok(LimitReport { alphas: alphas.to_vec(), gaps, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::{random_poly, MultiIndex};
    use approx::assert_relative_eq;

    fn cfg() -> McConfig {
        McConfig::new(42, 4000, 64).unwrap()
    }

    #[test]
    fn constants() {
        assert_relative_eq!(bergman_constant(1, 2.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(bergman_constant(2, 3.0).unwrap(), 1.0, max_relative = 1e-14);
        assert!(bergman_constant(2, 2.0).is_err());
        for k in 1..=100 {
            let alpha = 2.0 + 0.1 * k as f64;
            let lhs = layer_cake_constant(2, alpha).unwrap();
            let rhs = alpha * bergman_constant(2, alpha).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn norm_examples() {
        let c = cfg();
        let one = Polynomial::one(2);
        assert_relative_eq!(hardy_norm(&one, 3.3, &c).unwrap().value, 1.0, max_relative = 1e-14);
        assert_relative_eq!(bergman_norm(&one, 1.7, 2.5, &c).unwrap().value, 1.0, max_relative = 1e-12);
        let z = Polynomial::coordinate(1, 0);
        assert_relative_eq!(hardy_norm(&z, 2.0, &c).unwrap().value, 1.0, max_relative = 1e-14);
        let z2 = Polynomial::coordinate(2, 0);
        let h = hardy_norm(&z2, 2.0, &c).unwrap();
        assert!((h.value - 0.5f64.sqrt()).abs() < 3.0 * h.stderr);
        assert_relative_eq!(bergman_norm(&z, 2.0, 2.0, &c).unwrap().value, 0.5f64.sqrt(), max_relative = 1e-12);
        // c_3 ∫ r^2 (1-r^2) 2r dr = 2 (1/2 - 1/3) ... = 1/3
        assert_relative_eq!(bergman_norm(&z, 2.0, 3.0, &c).unwrap().value, (1.0f64 / 3.0).sqrt(), max_relative = 1e-12);
        assert!(bergman_norm(&z, 2.0, 1.0, &c).is_err());
    }

    #[test]
    fn exact_paths_agree() {
        let f = random_poly(2, 2, 5, 0);
        for s in [SpaceParams::hardy(2, 2.0).unwrap(), SpaceParams::bergman(2, 4.0, 3.5).unwrap()] {
            let exact = exact_norm_pow(&f, &s).unwrap();
            let mc = norm_pow(&f, &s, &cfg()).unwrap();
            assert!((mc.value - exact).abs() < 4.0 * mc.stderr, "{s:?}: {} vs {exact}", mc.value);
        }
        let m = Polynomial::monomial(MultiIndex::new(vec![2, 1]), Complex64::new(0.3, 0.4));
        let s = SpaceParams::bergman(2, 3.0, 2.7).unwrap();
        let mc = norm_pow(&m, &s, &cfg()).unwrap();
        let exact = exact_norm_pow(&m, &s).unwrap();
        assert!((mc.value - exact).abs() < 4.0 * mc.stderr + 1e-9);
    }

    #[test]
    fn pointwise_bounds() {
        let z = Polynomial::coordinate(1, 0);
        let pts: Vec<Vec<Complex64>> = (0..99).map(|k| vec![Complex64::new(k as f64 / 100.0, 0.0)]).collect();
        let rep = pointwise_bound_check(&z, &SpaceParams::hardy(1, 2.0).unwrap(), &pts, &cfg()).unwrap();
        assert!(rep.pass);
        assert!(rep.margin.value >= 0.75 - 1e-12);
    }

    #[test]
    fn chain_for_coordinate() {
        let z = Polynomial::coordinate(1, 0);
        let rep = contraction_chain_check(&z, 2.0, &[1.5, 2.0, 3.0], &cfg()).unwrap();
        assert!(rep.report.pass);
        let exact: Vec<f64> = rep.entries.iter().map(|e| e.exact.unwrap()).collect();
        assert!(exact.windows(2).all(|w| w[0] > w[1]));
        // Γ(α)Γ(α+1)/Γ(2α) at α = 3/2
        assert_relative_eq!(exact[1].powf(3.0), 0.589_048_622_548_086_3, max_relative = 1e-12);
    }
}
