//! Sharp constants and the checkers for the isoperimetric inequalities, the
//! Sobolev family, the weighted Hardy inequality and the rearrangement lemma
//! comparing `∫Φ(g/t^{1/α})Ψ` with `∫Φ(t^{-1/α})Ψ`.
//!
//! Measures are normalized (`v(B_n) = 1`, `vol_g B_g(0, ρ) = sinh^{2n} ρ`)
//! unless a [`Convention`] says otherwise. In that convention the Sobolev
//! constant `S(2n, p)` tends to `2n` as `p → 1`, matching the `4n²` constant
//! of the `p = 1` inequality.

use crate::check::{delta_method, CheckReport, Margin};
use crate::error::{Error, Result};
use crate::geometry::{geodesic_ball_volume, geodesic_sphere_area, GeodesicRadius, ScalarField};
use crate::integrate::{compact_extent, support_moment_rows, McConfig};
use crate::quad::adaptive;
use crate::rng::{streams, CounterRng};
use crate::special::{beta, gamma, ln_gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sharp Sobolev constant `S(N, p)` in the normalized-measure convention,
/// for real dimension `N` and `1 <= p < N`:
/// `S = ((1/N) (N(p-1)/(N-p))^{1-1/p} (Γ(N)/(Γ(N/p) Γ(N+1-N/p)))^{1/N})^{-1}`.
pub fn sobolev_constant(real_dim: usize, p: f64) -> Result<f64> {
    let nr = real_dim as f64;
    if real_dim == 0 {
        return Err(Error::Parameter("real dimension must be >= 1".into()));
    }
    if !(p >= 1.0 && p < nr) {
        return Err(Error::Domain(format!("Sobolev constant needs 1 <= p < {real_dim}, got {p}")));
    }
    if p == 1.0 {
        return Ok(nr);
    }
    let ratio = nr * (p - 1.0) / (nr - p);
    let ln_gammas = ln_gamma(nr) - ln_gamma(nr / p) - ln_gamma(nr + 1.0 - nr / p);
    let ln_k = -nr.ln() + (1.0 - 1.0 / p) * ratio.ln() + ln_gammas / nr;
    Ok((-ln_k).exp())
}

/// Factor turning the normalized-measure constant into the Lebesgue one:
/// `S_Lebesgue = S_normalized · ω_N^{1/N}` with `ω_N = π^{N/2}/Γ(N/2 + 1)`.
pub fn lebesgue_factor(real_dim: usize) -> f64 {
    let nr = real_dim as f64;
    let omega = PI.powf(nr / 2.0) / gamma(nr / 2.0 + 1.0);
    omega.powf(1.0 / nr)
}

/// `ℓ(s) = s^{(2n-1)/2n} (1 + s^{1/n})^{1/2}`.
pub fn ell(s: f64, n: usize) -> f64 {
    let nf = n as f64;
    s.powf((2.0 * nf - 1.0) / (2.0 * nf)) * (1.0 + s.powf(1.0 / nf)).sqrt()
}

/// `k_{n,p}(s) = s^{(2n-1)p/2n} ((1 + s^{1/n})^{p/2} - 1)`.
pub fn k_np(s: f64, n: usize, p: f64) -> f64 {
    let nf = n as f64;
    s.powf((2.0 * nf - 1.0) * p / (2.0 * nf)) * ((1.0 + s.powf(1.0 / nf)).powf(p / 2.0) - 1.0)
}

/// `n B(n - (2n-1)p/(2(p-1)), n/(p-1))`, finite for `p > 2n`.
pub fn ell_integral_closed(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p > 2.0 * nf) {
        return Err(Error::Regime(format!("ℓ-integral needs p > 2n = {}, got {p}", 2 * n)));
    }
    Ok(nf * beta(nf - (2.0 * nf - 1.0) * p / (2.0 * (p - 1.0)), nf / (p - 1.0)))
}

/// `∫_0^∞ ℓ(s)^{-p/(p-1)} ds` by quadrature in `τ = ln s`.
pub fn ell_integral_quadrature(n: usize, p: f64) -> Result<f64> {
    let closed = ell_integral_closed(n, p)?;
    let q = p / (p - 1.0);
    let nf = n as f64;
    // in τ the integrand decays like e^{Pτ/n} at -∞ and e^{-Qτ/n} at +∞
    let pp = nf - (2.0 * nf - 1.0) * q / 2.0;
    let qq = nf / (p - 1.0);
    let lo = -40.0 * nf / pp;
    let hi = 40.0 * nf / qq;
    let ln_ell = |tau: f64| (2.0 * nf - 1.0) / (2.0 * nf) * tau + 0.5 * softplus(tau / nf);
    let res = adaptive(|tau: f64| (tau - q * ln_ell(tau)).exp(), lo, hi, &[0.0], 1e-300, 1e-13);
    if !res.converged {
        return Err(Error::Divergence(format!("ℓ-integral quadrature error {:.2e} (closed form {closed})", res.error)));
    }
    Ok(res.value)
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `½ B(n - (2n-1)p/(2(p-1)), n/(p-1))`, the constant of the `p > 2n` bound.
pub fn sup_bound_prefactor(n: usize, p: f64) -> Result<f64> {
    Ok(0.5 * ell_integral_closed(n, p)? / n as f64)
}

/// Measure convention for the isoperimetric comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `v(B_n) = 1`, unit-ball perimeter `2n`.
    Normalized,
    /// Lebesgue measure on `R^{2n}`: `vol(B_n) = π^n/n!`, `per(B_n) = 2π^n/(n-1)!`,
    /// with the hyperbolic quantities rescaled by the same `π^n/n!`.
    Lebesgue,
}

fn unit_ball_volume(n: usize, c: Convention) -> f64 {
    match c {
        Convention::Normalized => 1.0,
        Convention::Lebesgue => PI.powi(n as i32) / gamma(n as f64 + 1.0),
    }
}

/// `per_g^{2n} >= (per(B)^{2n}/vol(B)^{2n-1}) vol_g^{2n-1}` on geodesic balls,
/// reported as the relative margin `1 - rhs/lhs`.
pub fn isoperimetric_model_check(rho_grid: &[f64], n: usize, convention: Convention) -> Result<CheckReport> {
    if n == 0 {
        return Err(Error::Parameter("n must be >= 1".into()));
    }
    let omega = unit_ball_volume(n, convention);
    let per_unit = 2.0 * n as f64 * omega;
    let exp = 2 * n as i32;
    let c = per_unit.powi(exp) / omega.powi(exp - 1);
    let mut margins = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let r = GeodesicRadius::new(rho)?;
        let per = omega * geodesic_sphere_area(r, n)?;
        let vol = omega * geodesic_ball_volume(r, n)?;
        // 1 - rhs/lhs, from ratios that stay finite for large radii
        let ratio = c / per * (vol / per).powi(exp - 1);
        margins.push(Margin::exact(1.0 - ratio, 1e-12));
    }
    Ok(CheckReport::worst_of(format!("isoperimetric-model[n={n}]"), &margins, false))
}

/// `per_g² = 4n² V^{(2n-1)/n} + 4n² V²` on geodesic balls, to `1e-12` relative;
/// the margin is the relative residual.
pub fn isoperimetric_refined_check(rho_grid: &[f64], n: usize) -> Result<CheckReport> {
    if n == 0 {
        return Err(Error::Parameter("n must be >= 1".into()));
    }
    let nf = n as f64;
    let mut margins = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let r = GeodesicRadius::new(rho)?;
        let per = geodesic_sphere_area(r, n)?;
        let v = geodesic_ball_volume(r, n)?;
        // relative residual 1 - rhs/per², formed from ratios so that large
        // radii do not overflow
        let a = v.powf((2.0 * nf - 1.0) / (2.0 * nf)) / per;
        let b = v / per;
        margins.push(Margin::exact(1.0 - 4.0 * nf * nf * (a * a + b * b), 1e-12));
    }
    Ok(CheckReport::worst_of(format!("isoperimetric-refined[n={n}]"), &margins, true))
}

/// The four parts of the Sobolev family on `(B_n, dv_g)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SobolevRegime {
    /// `p = 1`.
    I,
    /// `1 < p < 2`.
    II,
    /// `n >= 2`, `2 <= p < 2n`.
    III,
    /// `p > 2n`.
    IV,
}

impl SobolevRegime {
    pub fn by_name(name: &str) -> Result<Self> {
        match name.trim_start_matches("sobolev-") {
            "I" | "i" | "1" => Ok(Self::I),
            "II" | "ii" | "2" => Ok(Self::II),
            "III" | "iii" | "3" => Ok(Self::III),
            "IV" | "iv" | "4" => Ok(Self::IV),
            _ => Err(Error::Registry(name.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
        }
    }

    /// Whether `(n, p)` lies in this regime.
    pub fn admits(self, n: usize, p: f64) -> bool {
        let two_n = 2.0 * n as f64;
        match self {
            Self::I => p == 1.0,
            Self::II => p > 1.0 && p < 2.0,
            Self::III => n >= 2 && (2.0..two_n).contains(&p),
            Self::IV => p > two_n && p.is_finite(),
        }
    }

    pub fn validate(self, n: usize, p: f64) -> Result<()> {
        if self.admits(n, p) {
            Ok(())
        } else {
            Err(Error::Regime(format!("regime {} does not admit n = {n}, p = {p}", self.name())))
        }
    }
}

/// Both sides of one Sobolev inequality, `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub regime: SobolevRegime,
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub check: CheckReport,
}

/// Checks the regime's inequality for a compactly supported `u` with
/// maximum `sup_u`. Integrals are over `dv_g` with the Bergman gradient.
pub fn sobolev_check<U: ScalarField + ?Sized>(
    u: &U,
    sup_u: f64,
    p: f64,
    regime: SobolevRegime,
    cfg: &McConfig,
) -> Result<SobolevReport> {
    let n = u.dim();
    regime.validate(n, p)?;
    let nf = n as f64;
    let two_n = 2.0 * nf;
    let rho_max = compact_extent(u)?;
    // columns: ∫|∇u|^p, ∫u^{q1}, ∫u^{q2}
    let (q1, q2) = match regime {
        SobolevRegime::I => (two_n / (two_n - 1.0), 1.0),
        SobolevRegime::II | SobolevRegime::III => (two_n * p / (two_n - p), p),
        SobolevRegime::IV => (1.0, 1.0),
    };
    let rows = support_moment_rows(u, rho_max, cfg, 3, true, |v, g, out| {
        out[0] = g.powf(p);
        out[1] = v.powf(q1);
        out[2] = v.powf(q2);
    })?;
    let sides = |m: &[f64]| -> (f64, f64) {
        let (grad, a, b) = (m[0], m[1], m[2]);
        match regime {
            SobolevRegime::I => {
                let c = 4.0 * nf * nf;
                (grad * grad, c * a.powf((two_n - 1.0) / nf) + c * b * b)
            }
            SobolevRegime::II => {
                let s = sobolev_constant(2 * n, p).expect("validated regime");
                let inner = s * s * a.powf(2.0 / q1) + (two_n / p).powi(2) * b.powf(2.0 / p);
                (grad, inner.powf(p / 2.0))
            }
            SobolevRegime::III => {
                let s = sobolev_constant(2 * n, p).expect("validated regime");
                (grad, s.powf(p) * a.powf(p / q1) + (two_n / p).powf(p) * b)
            }
            SobolevRegime::IV => {
                let pre = sup_bound_prefactor(n, p).expect("validated regime");
                (pre * grad.powf(1.0 / p), sup_u)
            }
        }
    };
    let (value, stderr) = delta_method(&rows, |m| {
        let (l, r) = sides(m);
        l - r
    });
    let means: Vec<f64> = (0..3).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / rows.len() as f64).collect();
    let (lhs, rhs) = sides(&means);
    let check = CheckReport::inequality(format!("sobolev-{}[n={n},p={p}]", regime.name()), Margin::new(value, stderr, lhs))
        .note(format!("lhs = {lhs:.8e}, rhs = {rhs:.8e}"));
    Ok(SobolevReport { regime, p, lhs, rhs, check })
}

/// Nonnegative test functions on `(0, ∞)` for the weighted Hardy inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HardyProbe {
    /// Indicator of `(a, b)`.
    Indicator { a: f64, b: f64 },
    /// `e^{-rate x}`.
    Exponential { rate: f64 },
    /// `x^{-exponent}` on `(lo, ∞)`.
    PowerTail { exponent: f64, lo: f64 },
}

impl HardyProbe {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            HardyProbe::Indicator { a, b } => {
                if x > a && x < b {
                    1.0
                } else {
                    0.0
                }
            }
            HardyProbe::Exponential { rate } => (-rate * x).exp(),
            HardyProbe::PowerTail { exponent, lo } => {
                if x > lo {
                    x.powf(-exponent)
                } else {
                    0.0
                }
            }
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match *self {
            HardyProbe::Indicator { a, b } => vec![a, b],
            HardyProbe::Exponential { .. } => vec![1.0],
            HardyProbe::PowerTail { lo, .. } => vec![lo],
        }
    }

    /// The near-extremal probe `x^{-(ε+1)/p - δ}` on `(1, ∞)`.
    pub fn near_extremal(p: f64, eps: f64, delta: f64) -> Self {
        HardyProbe::PowerTail { exponent: (eps + 1.0) / p + delta, lo: 1.0 }
    }
}

/// `∫_a^∞ h` on dyadic panels past the last break, with a geometric tail
/// once consecutive panel ratios settle (exact for power-law tails).
fn integrate_from<H: Fn(f64) -> f64>(h: &H, a: f64, breaks: &[f64]) -> Result<f64> {
    const REL: f64 = 1e-12;
    let start = breaks.iter().copied().fold(a.max(1.0), f64::max).max(a);
    let mut total = if start > a { adaptive(h, a, start, breaks, 1e-300, REL).value } else { 0.0 };
    let mut lo = start;
    let mut width = start.max(1.0);
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    for _ in 0..400 {
        let piece = adaptive(h, lo, lo + width, &[], 1e-300, REL).value;
        total += piece;
        if piece.abs() <= 1e-17 * total.abs() || (piece == 0.0 && total == 0.0) {
            return Ok(total);
        }
        if let Some(pv) = prev.filter(|v| *v != 0.0) {
            let ratio = piece / pv;
            if let Some(pr) = prev_ratio {
                if (ratio - pr).abs() < 1e-7 * ratio.abs() {
                    if ratio >= 1.0 - 1e-9 {
                        return Err(Error::Divergence(format!("integrand tail ratio {ratio} per doubling")));
                    }
                    return Ok(total + piece * ratio / (1.0 - ratio));
                }
            }
            prev_ratio = Some(ratio);
        }
        prev = Some(piece);
        lo += width;
        width *= 2.0;
    }
    Err(Error::Divergence("tail integral did not settle".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub p: f64,
    pub eps: f64,
    /// `(p/(ε+1-p))^p ∫ f^p x^ε dx`.
    pub lhs: f64,
    /// `∫ (x^{-1} ∫_x^∞ f)^p x^ε dx`.
    pub rhs: f64,
    pub check: CheckReport,
}

impl HardyReport {
    pub fn ratio(&self) -> f64 {
        self.rhs / self.lhs
    }
}

/// Weighted Hardy inequality for `p > 1`, `ε > p - 1`, with the tail
/// average `x^{-1} ∫_x^∞ f` (the form that is finite for these exponents).
pub fn weighted_hardy_check(f: &HardyProbe, p: f64, eps: f64) -> Result<HardyReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("weighted Hardy needs p > 1, got {p}")));
    }
    if !(eps > p - 1.0) {
        return Err(Error::Parameter(format!("weighted Hardy needs ε > p - 1, got ε = {eps}, p = {p}")));
    }
    let breaks = f.breaks();
    let c = (p / (eps + 1.0 - p)).powf(p);
    let lhs_integrand = |x: f64| if x > 0.0 { f.eval(x).powf(p) * x.powf(eps) } else { 0.0 };
    let lhs = c * integrate_from(&lhs_integrand, 0.0, &breaks)?;
    let tail = |x: f64| integrate_from(&|t: f64| f.eval(t), x, &breaks);
    // validate the tail once so divergence surfaces as an error
    tail(breaks.iter().copied().fold(1.0, f64::max))?;
    let rhs_integrand = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let big_f = tail(x).unwrap_or(f64::NAN);
        (big_f / x).powf(p) * x.powf(eps)
    };
    let rhs = integrate_from(&rhs_integrand, 0.0, &breaks)?;
    if !(lhs.is_finite() && rhs.is_finite()) {
        return Err(Error::Divergence(format!("weighted Hardy sides lhs = {lhs}, rhs = {rhs}")));
    }
    let check = CheckReport::inequality(format!("hardy-weighted[p={p},eps={eps}]"), Margin::exact(lhs - rhs, 1e-9 * lhs))
        .note(format!("lhs = {lhs:.10e}, rhs = {rhs:.10e}"));
    Ok(HardyReport { p, eps, lhs, rhs, check })
}

/// Outer function `Φ` of the rearrangement lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi {
    /// `max(x - 1, 0)^k`.
    ShiftedPower { k: f64 },
    /// `x^k`.
    Power { k: f64 },
}

impl Phi {
    pub fn by_name(name: &str, k: f64) -> Result<Self> {
        let phi = match name {
            "shifted-power" => Phi::ShiftedPower { k },
            "power" => Phi::Power { k },
            _ => return Err(Error::Registry(name.to_string())),
        };
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Parameter(format!("Φ exponent must be positive, got {k}")));
        }
        Ok(phi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Phi::ShiftedPower { k } => (x - 1.0).max(0.0).powf(k),
            Phi::Power { k } => x.max(0.0).powf(k),
        }
    }
}

/// Weight `Ψ` of the rearrangement lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Psi {
    Identity,
    Power { k: f64 },
}

impl Psi {
    pub fn by_name(name: &str, k: f64) -> Result<Self> {
        match name {
            "identity" => Ok(Psi::Identity),
            "power" if k > 0.0 && k.is_finite() => Ok(Psi::Power { k }),
            "power" => Err(Error::Parameter(format!("Ψ exponent must be positive, got {k}"))),
            _ => Err(Error::Registry(name.to_string())),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Psi::Identity => t,
            Psi::Power { k } => t.powf(k),
        }
    }
}

/// Piecewise-linear `g` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    pub t: Vec<f64>,
    pub g: Vec<f64>,
}

impl SampledProfile {
    /// Knots must start at `0`, end at `1`, and carry positive nonincreasing values.
    pub fn new(t: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != g.len() {
            return Err(Error::Parameter("profile needs >= 2 matching knots".into()));
        }
        if t[0] != 0.0 || *t.last().expect("nonempty") != 1.0 || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("profile knots must increase from 0 to 1".into()));
        }
        if g.iter().any(|v| !(*v > 0.0 && v.is_finite())) || g.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Parameter("profile values must be positive and nonincreasing".into()));
        }
        Ok(Self { t, g })
    }

    pub fn linear(g0: f64, g1: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![g0, g1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.t.partition_point(|&v| v <= x).clamp(1, self.t.len() - 1);
        let (t0, t1) = (self.t[k - 1], self.t[k]);
        let w = ((x - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.g[k - 1] + w * (self.g[k] - self.g[k - 1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KalajReport {
    /// Rescaling applied to `g` to meet the normalization.
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub check: CheckReport,
}

/// Substitution `t = v^8` tames the `t^{-k/α}` endpoint singularity.
const KALAJ_POWER: i32 = 8;

fn unit_integral<H: Fn(f64) -> f64>(h: H, breaks: &[f64]) -> Result<f64> {
    let m = KALAJ_POWER as f64;
    let vb: Vec<f64> = breaks.iter().map(|t| t.powf(1.0 / m)).collect();
    let res = adaptive(
        |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            m * v.powi(KALAJ_POWER - 1) * h(v.powi(KALAJ_POWER))
        },
        0.0,
        1.0,
        &vb,
        1e-300,
        1e-13,
    );
    if !res.converged || !res.value.is_finite() {
        return Err(Error::Divergence(format!("unit-interval integral error {:.2e}", res.error)));
    }
    Ok(res.value)
}

/// `∫Φ(λg/t^{1/α})Ψ <= ∫Φ(t^{-1/α})Ψ + 1e-8`, after choosing `λ` with
/// `∫Φ(λg/t^{1/α}) = ∫Φ(t^{-1/α})`.
pub fn kalaj_lemma_check(phi: Phi, psi: Psi, g: &SampledProfile, alpha: f64) -> Result<KalajReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("α must be positive, got {alpha}")));
    }
    let breaks = &g.t[1..g.t.len() - 1];
    let model = |t: f64| t.powf(-1.0 / alpha);
    let target = unit_integral(|t| phi.eval(model(t)), &[])
        .map_err(|e| Error::Normalization(format!("model integral: {e}")))?;
    let mass = |lambda: f64| unit_integral(|t| phi.eval(lambda * g.eval(t) * model(t)), breaks);
    let (mut lo, mut hi) = (1.0, 1.0);
    for _ in 0..200 {
        if mass(lo)? <= target {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..200 {
        if mass(hi)? >= target {
            break;
        }
        hi *= 2.0;
    }
    if !(mass(lo)? <= target && mass(hi)? >= target) {
        return Err(Error::Normalization("could not bracket the rescaling of g".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let achieved = mass(lambda)?;
    if (achieved - target).abs() > 1e-9 * target.abs().max(1.0) {
        return Err(Error::Normalization(format!("normalization {achieved} vs {target}")));
    }
    let lhs = unit_integral(|t| phi.eval(lambda * g.eval(t) * model(t)) * psi.eval(t), breaks)?;
    let rhs = unit_integral(|t| phi.eval(model(t)) * psi.eval(t), &[])?;
    let check = CheckReport::inequality(format!("kalaj[α={alpha}]"), Margin::exact(rhs - lhs, 1e-8))
        .note(format!("λ = {lambda:.12}, lhs = {lhs:.12e}, rhs = {rhs:.12e}"));
    Ok(KalajReport { lambda, lhs, rhs, check })
}

/// `(a+b)^α = sup_{t∈[0,1]} (t^{1-α} a^α + (1-t)^{1-α} b^α)` for `α ∈ (0,1)`,
/// the supremum located by golden-section search of the concave objective.
pub fn sup_representation_gap(a: f64, b: f64, alpha: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("need a, b > 0 and α in (0,1), got ({a}, {b}, {alpha})")));
    }
    let h = |t: f64| t.powf(1.0 - alpha) * a.powf(alpha) + (1.0 - t).powf(1.0 - alpha) * b.powf(alpha);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (h(x1), h(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = h(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = h(x1);
        }
    }
    let sup = f1.max(f2);
    let exact = (a + b).powf(alpha);
    Ok((sup - exact) / exact)
}

/// Spot check of the sup representation on `count` seeded triples.
pub fn sup_representation_check(seed: u64, count: usize) -> Result<CheckReport> {
    let mut margins = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = CounterRng::at(seed, streams::TEST_POINTS, i as u64, 3);
        let a = 10f64.powf(4.0 * rng.uniform() - 2.0);
        let b = 10f64.powf(4.0 * rng.uniform() - 2.0);
        let alpha = 0.02 + 0.96 * rng.uniform();
        margins.push(Margin::exact(sup_representation_gap(a, b, alpha)?, 1e-10));
    }
    Ok(CheckReport::worst_of("sup-representation", &margins, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sobolev_constant_limits() {
        for n in 1..=4usize {
            assert_eq!(sobolev_constant(2 * n, 1.0).unwrap(), 2.0 * n as f64);
            let near = sobolev_constant(2 * n, 1.0 + 1e-10).unwrap();
            assert_relative_eq!(near, 2.0 * n as f64, max_relative = 1e-8);
        }
        assert!(sobolev_constant(4, 4.0).is_err());
        assert!(sobolev_constant(2, 0.5).is_err());
        // continuity in p
        let a = sobolev_constant(4, 2.5).unwrap();
        let b = sobolev_constant(4, 2.5 + 1e-9).unwrap();
        assert!((a - b).abs() < 1e-7);
    }

    #[test]
    fn sobolev_constant_matches_talenti_profile() {
        // u(x) = (1 + |x|^{p/(p-1)})^{1 - N/p} in R^N with normalized measure 2n r^{2n-1} dr
        let (n, p) = (1usize, 1.5);
        let nr = 2.0 * n as f64;
        let pstar = nr * p / (nr - p);
        let m = p / (p - 1.0);
        let e = 1.0 - nr / p;
        let u = |r: f64| (1.0 + r.powf(m)).powf(e);
        let du = |r: f64| e * m * r.powf(m - 1.0) * (1.0 + r.powf(m)).powf(e - 1.0);
        let rad = |r: f64| nr * r.powf(nr - 1.0);
        let grad = crate::quad::adaptive_to_infinity(|r| du(r).abs().powf(p) * rad(r), 0.0, &[1.0], 1e-300, 1e-12);
        let mass = crate::quad::adaptive_to_infinity(|r| u(r).powf(pstar) * rad(r), 0.0, &[1.0], 1e-300, 1e-12);
        let ratio = (grad.value / mass.value.powf(p / pstar)).powf(1.0 / p);
        let s = sobolev_constant(2 * n, p).unwrap();
        assert!((ratio / s - 1.0).abs() < 1e-2, "ratio {ratio} vs S {s}");
    }

    #[test]
    fn beta_and_prefactor() {
        assert_eq!(beta(1.0, 1.0), 1.0);
        let pre = sup_bound_prefactor(1, 4.0).unwrap();
        assert_relative_eq!(pre, gamma(1.0 / 3.0).powi(2) / (2.0 * gamma(2.0 / 3.0)), max_relative = 1e-13);
        assert_relative_eq!(pre, 2.649_97, max_relative = 1e-5);
        assert!(sup_bound_prefactor(2, 4.0).is_err());
    }

    #[test]
    fn ell_integral_by_quadrature() {
        for &(n, p) in &[(1usize, 3.0), (1, 4.0), (2, 5.0), (2, 9.0), (3, 7.5)] {
            let q = ell_integral_quadrature(n, p).unwrap();
            let c = ell_integral_closed(n, p).unwrap();
            assert_relative_eq!(q, c, max_relative = 1e-8);
        }
    }

    #[test]
    fn isoperimetric_examples() {
        let grid: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
        for n in 1..=3 {
            for c in [Convention::Normalized, Convention::Lebesgue] {
                assert!(isoperimetric_model_check(&grid, n, c).unwrap().pass);
            }
            assert!(isoperimetric_refined_check(&grid, n).unwrap().pass);
        }
        // sinh²(2) = 4(sinh²1 + sinh⁴1)
        let s1 = 1f64.sinh().powi(2);
        assert_relative_eq!(2f64.sinh().powi(2), 4.0 * (s1 + s1 * s1), max_relative = 1e-14);
        let small = isoperimetric_model_check(&[1e-3], 2, Convention::Normalized).unwrap();
        // for n = 2 the relative margin is 1 - cosh^{-4} ρ
        assert_relative_eq!(small.margin.value, 1.0 - 1e-3f64.cosh().powi(-4), max_relative = 1e-6);
    }

    #[test]
    fn mixing_conventions_fails_for_small_balls() {
        // Lebesgue constants against normalized hyperbolic quantities
        let n = 1;
        let c = (2.0 * PI).powi(2) / PI;
        let r = GeodesicRadius::new(0.1).unwrap();
        let per = geodesic_sphere_area(r, n).unwrap();
        let vol = geodesic_ball_volume(r, n).unwrap();
        assert!(per.powi(2) - c * vol < 0.0);
    }

    #[test]
    fn regimes() {
        assert!(SobolevRegime::I.admits(1, 1.0));
        assert!(SobolevRegime::II.admits(2, 1.5));
        assert!(!SobolevRegime::III.admits(1, 2.0));
        assert!(SobolevRegime::III.admits(2, 2.0));
        assert!(SobolevRegime::IV.admits(1, 4.0));
        assert!(matches!(SobolevRegime::II.validate(1, 2.5), Err(Error::Regime(_))));
        assert_eq!(SobolevRegime::by_name("sobolev-III").unwrap(), SobolevRegime::III);
    }

    #[test]
    fn hardy_examples() {
        let r = weighted_hardy_check(&HardyProbe::Indicator { a: 0.0, b: 1.0 }, 2.0, 2.0).unwrap();
        assert_relative_eq!(r.lhs, 4.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(r.rhs, 1.0 / 3.0, max_relative = 1e-9);
        assert!(r.check.pass);
        let r = weighted_hardy_check(&HardyProbe::Exponential { rate: 1.0 }, 2.0, 1.5).unwrap();
        assert!(r.check.pass);
        assert_relative_eq!(r.lhs, 16.0 * gamma(2.5) / 2f64.powf(2.5), max_relative = 1e-9);
        assert_relative_eq!(r.rhs, gamma(0.5) / 2f64.sqrt(), max_relative = 1e-9);
        let r = weighted_hardy_check(&HardyProbe::near_extremal(2.0, 2.0, 1e-3), 2.0, 2.0).unwrap();
        assert!(r.check.pass);
        assert!(r.ratio() > 0.95 && r.ratio() <= 1.0, "ratio {}", r.ratio());
        assert!(weighted_hardy_check(&HardyProbe::Exponential { rate: 1.0 }, 2.0, 0.5).is_err());
    }

    #[test]
    fn kalaj_examples() {
        let g1 = SampledProfile::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let r = kalaj_lemma_check(Phi::ShiftedPower { k: 1.0 }, Psi::Identity, &g1, 2.0).unwrap();
        assert!(r.check.pass && (r.lhs - r.rhs).abs() < 1e-10);
        assert_relative_eq!(r.lambda, 1.0, max_relative = 1e-12);

        let lin = SampledProfile::linear(1.5, 0.5).unwrap();
        let r = kalaj_lemma_check(Phi::ShiftedPower { k: 1.0 }, Psi::Identity, &lin, 2.0).unwrap();
        assert!(r.check.pass, "{r:?}");

        let g = SampledProfile::linear(1.2, 0.8).unwrap();
        let r = kalaj_lemma_check(Phi::Power { k: 2.0 }, Psi::Power { k: 2.0 }, &g, 3.0).unwrap();
        assert!(r.check.pass, "{r:?}");
        assert!(SampledProfile::linear(0.5, 1.0).is_err());
        assert!(matches!(Phi::by_name("cosh", 1.0), Err(Error::Registry(_))));
    }

    #[test]
    fn sup_representation() {
        assert!(sup_representation_gap(1.0, 2.0, 0.5).unwrap().abs() < 1e-12);
        assert!(sup_representation_check(42, 200).unwrap().pass);
    }
}
