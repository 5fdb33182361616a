//! Seeded integration over the sphere `S_n`, the ball with normalized volume
//! `dv`, and the ball with the hyperbolic measure `dv_g`.
//!
//! Directions are uniform on `S_n` and addressed by `(seed, index)`, so every
//! estimate is bit-reproducible for a fixed configuration. Radial integrals
//! are deterministic Gauss rules evaluated along each sampled direction; the
//! per-direction results are i.i.d. and give the standard error directly.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::geometry::{bergman_quadratic_form, fd_complex_gradient, fd_step, norm_sqr, ScalarField};
use crate::holo::MultiIndex;
use crate::quad::{legendre, JacobiRule};
use crate::rng::{sphere_point, streams, CounterRng};
use crate::special::ln_gamma;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MonteCarlo,
    RadialProduct,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl IntegralEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0, samples: 0, method: Method::Exact, warnings: Vec::new() }
    }

    fn from_samples(values: &[f64], method: Method) -> Self {
        let (value, stderr) = crate::check::mean_stderr(values);
        Self { value, stderr, samples: values.len() as u64, method, warnings: Vec::new() }
    }

    /// `value^(1/p)` with the delta-method error `stderr · value^(1/p-1) / p`.
    pub fn root(&self, p: f64) -> Self {
        let v = self.value.max(0.0);
        let root = v.powf(1.0 / p);
        let stderr = if v > 0.0 { self.stderr * root / (p * v) } else { self.stderr.powf(1.0 / p) };
        Self { value: root, stderr, ..self.clone() }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { value: self.value * k, stderr: self.stderr * k.abs(), ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    pub sphere_samples: usize,
    pub radial_nodes: usize,
    #[serde(default)]
    pub execution: Execution,
}

impl McConfig {
    pub const MIN_COUNT: usize = 16;

    pub fn new(seed: u64, sphere_samples: usize, radial_nodes: usize) -> Result<Self> {
        let cfg = Self { seed, sphere_samples, radial_nodes, execution: Execution::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.sphere_samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sphere_samples < Self::MIN_COUNT || self.radial_nodes < Self::MIN_COUNT {
            return Err(Error::Parameter(format!(
                "sample counts must be >= {} (sphere_samples = {}, radial_nodes = {})",
                Self::MIN_COUNT,
                self.sphere_samples,
                self.radial_nodes
            )));
        }
        Ok(())
    }

    /// Direction `j` of the common sample set.
    pub fn direction(&self, n: usize, j: usize) -> Vec<Complex64> {
        sphere_point(self.seed, streams::SPHERE, j as u64, n)
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self { seed: 42, sphere_samples: 4096, radial_nodes: 64, execution: Execution::default() }
    }
}

/// `∫_{S_n} φ dσ` by uniform direction sampling.
pub fn integrate_sphere<F>(n: usize, phi: F, cfg: &McConfig) -> Result<IntegralEstimate>
where
    F: Fn(&[Complex64]) -> f64 + Sync + Send,
{
    cfg.validate()?;
    let values = map_indexed(cfg.execution, cfg.sphere_samples, |j| phi(&cfg.direction(n, j)));
    Ok(IntegralEstimate::from_samples(&values, Method::MonteCarlo))
}

/// `∫_{S_n} ζ^a conj(ζ)^b dσ = δ_{ab} (n-1)! a! / (n-1+|a|)!`.
pub fn exact_sphere_monomial(a: &MultiIndex, b: &MultiIndex, n: usize) -> Result<f64> {
    if a.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
    }
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
    }
    if a != b {
        return Ok(0.0);
    }
    let k = a.degree() as f64;
    let nn = n as f64;
    if a.degree() + n as u32 <= 20 {
        let num = crate::special::factorial(n as u32 - 1) * a.factorial();
        return Ok(num / crate::special::factorial(n as u32 - 1 + a.degree()));
    }
    let lg: f64 = a.exponents().iter().map(|&m| ln_gamma(m as f64 + 1.0)).sum();
    Ok((ln_gamma(nn) + lg - ln_gamma(nn + k)).exp())
}

/// `∫_{B_n} φ dv` in polar form `2n ∫_0^1 r^{2n-1} ∫_{S_n} φ(rζ) dσ dr`,
/// Gauss–Legendre in `r` along each sampled direction.
pub fn integrate_ball<U: ScalarField + ?Sized>(u: &U, cfg: &McConfig) -> Result<IntegralEstimate> {
    cfg.validate()?;
    let n = u.dim();
    let rmax = u.support_radius_hint().clamp(f64::MIN_POSITIVE, 1.0);
    let rule = legendre(cfg.radial_nodes);
    let nn = 2 * n as i32;
    let values = map_indexed(cfg.execution, cfg.sphere_samples, |j| {
        let zeta = cfg.direction(n, j);
        let mut z = zeta.clone();
        let half = 0.5 * rmax;
        rule.iter()
            .map(|&(x, w)| {
                let r = half * (x + 1.0);
                for (zi, ci) in z.iter_mut().zip(&zeta) {
                    *zi = ci * r;
                }
                w * half * nn as f64 * r.powi(nn - 1) * u.eval(&z)
            })
            .sum::<f64>()
    });
    Ok(IntegralEstimate::from_samples(&values, Method::RadialProduct))
}

/// `∫_{B_n} φ (1-|z|^2)^β dv` with the weight absorbed into a Gauss–Jacobi
/// rule in `x = r^2`: `n ∫_0^1 x^{n-1} (1-x)^β ∫ φ(√x ζ) dσ dx`.
pub fn integrate_ball_weighted<F>(n: usize, phi: F, beta: f64, cfg: &McConfig) -> Result<IntegralEstimate>
where
    F: Fn(&[Complex64]) -> f64 + Sync + Send,
{
    cfg.validate()?;
    let rule = JacobiRule::new(cfg.radial_nodes, beta, n as f64 - 1.0)?;
    let nodes = rule.mapped(0.0, 1.0);
    let values = map_indexed(cfg.execution, cfg.sphere_samples, |j| {
        let zeta = cfg.direction(n, j);
        let mut z = zeta.clone();
        nodes
            .iter()
            .map(|&(x, w)| {
                let r = x.sqrt();
                for (zi, ci) in z.iter_mut().zip(&zeta) {
                    *zi = ci * r;
                }
                w * n as f64 * phi(&z)
            })
            .sum::<f64>()
    });
    Ok(IntegralEstimate::from_samples(&values, Method::RadialProduct))
}

/// Plain Monte Carlo over `B_n` by rejection from the cube `[-1,1]^{2n}`.
pub fn integrate_ball_rejection<U: ScalarField + ?Sized>(u: &U, cfg: &McConfig) -> Result<IntegralEstimate> {
    cfg.validate()?;
    const TRIES: u64 = 256;
    let n = u.dim();
    let words = 4 * n as u64 * TRIES;
    let values = map_indexed(cfg.execution, cfg.sphere_samples, |j| {
        let mut rng = CounterRng::at(cfg.seed, streams::BALL_REJECTION, j as u64, words);
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..TRIES {
            for zi in z.iter_mut() {
                *zi = Complex64::new(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
            }
            if norm_sqr(&z) < 1.0 {
                return u.eval(&z);
            }
        }
        f64::NAN
    });
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Parameter("rejection sampler exhausted its budget".into()));
    }
    Ok(IntegralEstimate::from_samples(&values, Method::MonteCarlo))
}

/// `ds/dρ = 2n sinh(ρ)^{2n-1} cosh(ρ)` for the volume coordinate `s = sinh^{2n} ρ`.
pub fn volume_jacobian(rho: f64, n: usize) -> f64 {
    2.0 * n as f64 * rho.sinh().powi(2 * n as i32 - 1) * rho.cosh()
}

/// Radial discretization along one direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayPlan {
    pub rho_max: f64,
    /// Uniform scan points used to locate the support.
    pub scan: usize,
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Maximal panel width in `ρ`.
    pub max_panel: f64,
}

impl RayPlan {
    pub fn new(rho_max: f64, order: usize) -> Self {
        Self { rho_max, scan: 1024, order, max_panel: 1.0 }
    }

    pub fn with_scan(mut self, scan: usize) -> Self {
        self.scan = scan.max(2);
        self
    }
}

/// Maximal intervals of `[0, rho_max]` on which `inside` holds, endpoints
/// refined by bisection.
pub fn support_intervals<S: Fn(f64) -> bool>(plan: &RayPlan, inside: S) -> Vec<(f64, f64)> {
    let m = plan.scan;
    let h = plan.rho_max / (m - 1) as f64;
    let refine = |mut lo: f64, mut hi: f64, lo_in: bool| {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if inside(mid) == lo_in {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut out = Vec::new();
    let mut prev = inside(0.0);
    let mut start = if prev { Some(0.0) } else { None };
    for i in 1..m {
        let rho = i as f64 * h;
        let cur = inside(rho);
        if cur != prev {
            let edge = refine(rho - h, rho, prev);
            if cur {
                start = Some(edge);
            } else if let Some(a) = start.take() {
                out.push((a, edge));
            }
        }
        prev = cur;
    }
    if let Some(a) = start {
        out.push((a, plan.rho_max));
    }
    out
}

/// `∫ h_k(ρ) ds` over the given intervals, for `k` integrands at once.
pub fn ray_integrals<I: FnMut(f64, &mut [f64])>(
    n: usize,
    plan: &RayPlan,
    intervals: &[(f64, f64)],
    k: usize,
    mut integrand: I,
) -> Vec<f64> {
    let rule = legendre(plan.order);
    let mut acc = vec![0.0; k];
    let mut buf = vec![0.0; k];
    for &(a, b) in intervals {
        let panels = ((b - a) / plan.max_panel).ceil().max(1.0) as usize;
        let w = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * w;
            let half = 0.5 * w;
            for &(x, wt) in rule.iter() {
                let rho = lo + half * (x + 1.0);
                let jac = volume_jacobian(rho, n) * wt * half;
                buf.iter_mut().for_each(|v| *v = 0.0);
                integrand(rho, &mut buf);
                for (a, v) in acc.iter_mut().zip(&buf) {
                    *a += jac * v;
                }
            }
        }
    }
    acc
}

/// Upper geodesic radius for hyperbolic integration of `u`.
fn hyperbolic_extent<U: ScalarField + ?Sized>(u: &U, cfg: &McConfig) -> (f64, Option<String>) {
    let hint = u.support_radius_hint();
    if hint < 1.0 {
        return (hint.atanh(), None);
    }
    // probe decay of |u| ds/dρ on a few directions
    // beyond ρ ≈ 17, tanh ρ rounds to 1 and Cartesian fields lose all precision
    const PROBE_RHO: f64 = 17.0;
    const STEPS: usize = 800;
    let n = u.dim();
    let mut last = 0.0f64;
    let mut warn = None;
    for j in 0..32usize.min(cfg.sphere_samples) {
        let zeta = cfg.direction(n, j);
        let vals: Vec<f64> = (0..=STEPS)
            .map(|i| {
                let rho = PROBE_RHO * i as f64 / STEPS as f64;
                (u.eval_polar(rho, &zeta).abs() * volume_jacobian(rho, n)).min(f64::MAX)
            })
            .collect();
        let peak = vals.iter().cloned().fold(0.0, f64::max);
        if let Some(i) = vals.iter().rposition(|&v| v > 1e-14 * peak) {
            if i == STEPS && vals[STEPS] > 1e-12 * peak {
                warn = Some(format!("integrand has not decayed below 1e-12 at ρ = {PROBE_RHO}"));
            }
            last = last.max(PROBE_RHO * ((i + 1).min(STEPS)) as f64 / STEPS as f64);
        }
    }
    (last.max(1e-6), warn)
}

/// `∫_{B_n} φ dv_g` with `dv_g = dv / (1-|z|^2)^{n+1}`, using `s = sinh^{2n} ρ`
/// as radial measure. The support of `φ` along each direction is located on a
/// scan grid and integrated panel-wise with Gauss–Legendre.
pub fn integrate_ball_hyperbolic<U: ScalarField + ?Sized>(u: &U, cfg: &McConfig) -> Result<IntegralEstimate> {
    cfg.validate()?;
    let n = u.dim();
    let (rho_max, warn) = hyperbolic_extent(u, cfg);
    let plan = RayPlan::new(rho_max, cfg.radial_nodes);
    let values = map_indexed(cfg.execution, cfg.sphere_samples, |j| {
        let zeta = cfg.direction(n, j);
        let iv = support_intervals(&plan, |rho| u.eval_polar(rho, &zeta) != 0.0);
        ray_integrals(n, &plan, &iv, 1, |rho, out| out[0] = u.eval_polar(rho, &zeta))[0]
    });
    let mut est = IntegralEstimate::from_samples(&values, Method::RadialProduct);
    est.warnings.extend(warn);
    Ok(est)
}

/// Geodesic radius outside of which `u` vanishes identically.
pub fn compact_extent<U: ScalarField + ?Sized>(u: &U) -> Result<f64> {
    if let Some(rc) = u.radial_cutoff(0.0) {
        return Ok(rc);
    }
    let hint = u.support_radius_hint();
    if hint < 1.0 {
        return Ok(hint.atanh());
    }
    Err(Error::Domain("field has no certified compact support in the ball".into()))
}

/// `|∇_g u|_g` at `tanh(ρ) ζ`.
pub fn polar_gradient_norm<U: ScalarField + ?Sized>(u: &U, rho: f64, zeta: &[Complex64]) -> f64 {
    let r = rho.tanh();
    let z: Vec<Complex64> = zeta.iter().map(|c| c * r).collect();
    let d = u.complex_gradient(&z).unwrap_or_else(|| fd_complex_gradient(u, &z, fd_step(&z)));
    bergman_quadratic_form(&z, &d).sqrt()
}

/// Per-direction integrals `∫ h_k ds` over `{u > 0}` up to `rho_max`.
///
/// `h` receives the value of `u` and, when `with_gradient` is set, `|∇_g u|_g`
/// (otherwise `0`). Row `j` holds the `k` integrals along direction `j`.
pub fn support_moment_rows<U, H>(
    u: &U,
    rho_max: f64,
    cfg: &McConfig,
    k: usize,
    with_gradient: bool,
    h: H,
) -> Result<Vec<Vec<f64>>>
where
    U: ScalarField + ?Sized,
    H: Fn(f64, f64, &mut [f64]) + Sync,
{
    cfg.validate()?;
    let n = u.dim();
    let plan = RayPlan::new(rho_max, cfg.radial_nodes);
    Ok(map_indexed(cfg.execution, cfg.sphere_samples, |j| {
        let zeta = cfg.direction(n, j);
        let iv = support_intervals(&plan, |rho| u.eval_polar(rho, &zeta) > 0.0);
        ray_integrals(n, &plan, &iv, k, |rho, out| {
            let v = u.eval_polar(rho, &zeta);
            let g = if with_gradient { polar_gradient_norm(u, rho, &zeta) } else { 0.0 };
            h(v, g, out)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FnField;
    use approx::assert_relative_eq;

    fn cfg(samples: usize) -> McConfig {
        McConfig::new(42, samples, 64).unwrap()
    }

    #[test]
    fn config_minimums() {
        assert!(McConfig::new(1, 15, 64).is_err());
        assert!(McConfig::new(1, 16, 8).is_err());
    }

    #[test]
    fn sphere_examples() {
        let c = cfg(20_000);
        let one = integrate_sphere(2, |_| 1.0, &c).unwrap();
        assert_eq!((one.value, one.stderr), (1.0, 0.0));
        let e = integrate_sphere(2, |z| z[0].norm_sqr(), &c).unwrap();
        assert!((e.value - 0.5).abs() < 3.0 * e.stderr);
        let e = integrate_sphere(3, |z| z[0].re, &c).unwrap();
        assert!(e.value.abs() < 3.0 * e.stderr);
    }

    #[test]
    fn sphere_monomials() {
        let m = |v: Vec<u32>| MultiIndex::new(v);
        assert_eq!(exact_sphere_monomial(&m(vec![0, 0]), &m(vec![0, 0]), 2).unwrap(), 1.0);
        assert_eq!(exact_sphere_monomial(&m(vec![1, 0]), &m(vec![1, 0]), 2).unwrap(), 0.5);
        assert_eq!(exact_sphere_monomial(&m(vec![1]), &m(vec![2]), 1).unwrap(), 0.0);
        assert_relative_eq!(
            exact_sphere_monomial(&m(vec![2, 1, 0]), &m(vec![2, 1, 0]), 3).unwrap(),
            2.0 * 2.0 / 120.0,
            max_relative = 1e-15
        );
        assert!(exact_sphere_monomial(&m(vec![1]), &m(vec![1]), 2).is_err());
    }

    #[test]
    fn ball_examples() {
        let c = cfg(256);
        let one = integrate_ball(&FnField::new(3, |_| 1.0), &c).unwrap();
        assert!((one.value - 1.0).abs() < 1e-12);
        let e = integrate_ball(&FnField::new(1, |z: &[Complex64]| z[0].norm_sqr()), &c).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
        let c = cfg(20_000);
        let e = integrate_ball(&FnField::new(2, |z: &[Complex64]| z[0].norm_sqr()), &c).unwrap();
        assert!((e.value - 1.0 / 3.0).abs() < 3.0 * e.stderr);
    }

    #[test]
    fn weighted_ball_matches_beta() {
        // ∫ (1-|z|^2)^β dv = n B(n, β+1)
        let c = cfg(64);
        for &(n, beta) in &[(1usize, 0.0), (2, -0.5), (2, 1.3), (3, -0.99)] {
            let e = integrate_ball_weighted(n, |_| 1.0, beta, &c).unwrap();
            let exact = n as f64 * crate::special::beta(n as f64, beta + 1.0);
            assert_relative_eq!(e.value, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn hyperbolic_examples() {
        let c = cfg(64);
        let ind = FnField::new(1, |z: &[Complex64]| if norm_sqr(z).sqrt() < 1f64.tanh() { 1.0 } else { 0.0 })
            .with_support(1f64.tanh() * 1.01);
        let e = integrate_ball_hyperbolic(&ind, &c).unwrap();
        assert_relative_eq!(e.value, 1f64.sinh().powi(2), max_relative = 1e-10);

        let w = FnField::new(2, |z: &[Complex64]| (1.0 - norm_sqr(z)).powi(3));
        let e = integrate_ball_hyperbolic(&w, &c).unwrap();
        assert_relative_eq!(e.value, 1.0, max_relative = 1e-8);

        let c2 = FnField::new(1, |z: &[Complex64]| (1.0 - norm_sqr(z)).powi(2));
        let e = integrate_ball_hyperbolic(&c2, &c).unwrap();
        assert_relative_eq!(e.value, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn polar_agrees_with_rejection() {
        let c = cfg(40_000);
        let u = FnField::new(2, |z: &[Complex64]| (z[0] + z[1] * 0.5).norm().powf(1.5) + z[1].re);
        let a = integrate_ball(&u, &c).unwrap();
        let b = integrate_ball_rejection(&u, &c).unwrap();
        assert!((a.value - b.value).abs() < 3.0 * a.stderr.hypot(b.stderr));
    }

    #[test]
    fn estimates_are_reproducible_across_modes() {
        let u = FnField::new(2, |z: &[Complex64]| z[0].norm() * (1.0 - norm_sqr(z)));
        let seq = McConfig::new(3, 500, 32).unwrap().with_execution(Execution::Sequential);
        let par = seq.with_execution(Execution::Parallel);
        assert_eq!(integrate_ball(&u, &seq).unwrap(), integrate_ball(&u, &par).unwrap());
        assert_eq!(integrate_ball_hyperbolic(&u, &seq).unwrap(), integrate_ball_hyperbolic(&u, &par).unwrap());
    }

    #[test]
    fn support_detection() {
        let plan = RayPlan::new(3.0, 16).with_scan(64);
        let iv = support_intervals(&plan, |r| (0.5..1.25).contains(&r) || r > 2.0);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0 - 0.5).abs() < 1e-12 && (iv[0].1 - 1.25).abs() < 1e-12);
        assert!((iv[1].0 - 2.0).abs() < 1e-12 && iv[1].1 == 3.0);
    }
}
