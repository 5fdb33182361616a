//! One-dimensional quadrature and interpolation.
//!
//! Gauss–Legendre and Gauss–Jacobi node sets come from `gauss-quad` and are
//! cached per order. The adaptive integrator is a 7/15-point Gauss–Kronrod
//! bisection scheme.

use crate::error::{Error, Result};
use gauss_quad::{GaussJacobi, GaussLegendre};
use std::collections::{BinaryHeap, HashMap};
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

pub type Rule = Arc<[(f64, f64)]>;

fn legendre_cache() -> &'static Mutex<HashMap<usize, Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, sorted by node.
pub fn legendre(order: usize) -> Rule {
    let order = order.max(1);
    let mut cache = legendre_cache().lock().expect("quadrature cache poisoned");
    cache
        .entry(order)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(NonZeroUsize::new(order).unwrap());
            let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into()
        })
        .clone()
}

/// `∫_a^b f` with an `order`-point Gauss–Legendre rule.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(order: usize, a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    legendre(order)
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Gauss–Jacobi rule for the weight `(1-x)^alpha (1+x)^beta` on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct JacobiRule {
    pub alpha: f64,
    pub beta: f64,
    pairs: Vec<(f64, f64)>,
}

impl JacobiRule {
    pub fn new(order: usize, alpha: f64, beta: f64) -> Result<Self> {
        let a = gauss_quad::FiniteAboveNegOneF64::new(alpha)
            .ok_or_else(|| Error::Parameter(format!("Jacobi exponent {alpha} must exceed -1")))?;
        let b = gauss_quad::FiniteAboveNegOneF64::new(beta)
            .ok_or_else(|| Error::Parameter(format!("Jacobi exponent {beta} must exceed -1")))?;
        let order = NonZeroUsize::new(order.max(1)).unwrap();
        let rule = GaussJacobi::new(order, a, b);
        let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(Self { alpha, beta, pairs })
    }

    /// `∫_a^b (b - x)^alpha (x - a)^beta h(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut h: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let scale = half.powf(self.alpha + self.beta + 1.0);
        scale
            * self
                .pairs
                .iter()
                .map(|&(x, w)| w * h(mid + half * x))
                .sum::<f64>()
    }

    /// Nodes mapped to `[a, b]` with the matching weights of
    /// [`JacobiRule::integrate`].
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let scale = half.powf(self.alpha + self.beta + 1.0);
        self.pairs
            .iter()
            .map(|&(x, w)| (mid + half * x, scale * w))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`, split first at
/// `breaks` (points where `f` has kinks or jumps).
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    const MAX_SEGMENTS: usize = 4000;
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let (v, e) = kronrod15(&mut f, w[0], w[1]);
        total += v;
        total_err += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
    }
    let mut converged = false;
    while heap.len() < MAX_SEGMENTS {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            converged = true;
            break;
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // resum to shed accumulated cancellation in the running totals
    let segments = heap.into_vec();
    let value = segments.iter().map(|s| s.value).sum();
    let error = segments.iter().map(|s| s.error).sum::<f64>();
    converged |= error <= abs_tol.max(rel_tol * f64::abs(value));
    QuadResult { value, error, converged }
}

/// `∫_a^∞ f` through the map `x = a + t/(1-t)`.
pub fn adaptive_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    let mapped: Vec<f64> = breaks
        .iter()
        .filter(|&&x| x > a)
        .map(|&x| (x - a) / (1.0 + x - a))
        .collect();
    adaptive(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let d = 1.0 - t;
            let v = f(a + t / d) / (d * d);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        &mapped,
        abs_tol,
        rel_tol,
    )
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Parameter("monotone cubic needs at least two matching samples".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("interpolation abscissae must increase strictly".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                slope[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Ok(Self { x, y, slope })
    }

    fn segment(&self, t: f64) -> usize {
        self.x.partition_point(|&v| v <= t).clamp(1, self.x.len() - 1) - 1
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let d00 = 6.0 * s * s - 6.0 * s;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        (d00 * self.y[i] + d01 * self.y[i + 1]) / h + d10 * self.slope[i] + d11 * self.slope[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_is_exact_on_polynomials() {
        let v = gauss_legendre(8, 0.0, 2.0, |x| x.powi(15));
        assert_relative_eq!(v, 2f64.powi(16) / 16.0, max_relative = 1e-14);
    }

    #[test]
    fn jacobi_handles_endpoint_singularity() {
        // ∫_0^1 t^{-0.99} (1-t)^2 dt = B(0.01, 3)
        let rule = JacobiRule::new(16, 0.0, -0.99).unwrap();
        let v = rule.integrate(0.0, 1.0, |t| (1.0 - t).powi(2));
        assert_relative_eq!(v, crate::special::beta(0.01, 3.0), max_relative = 1e-13);
    }

    #[test]
    fn adaptive_with_kink() {
        let r = adaptive(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-14, 1e-13);
        assert!(r.converged);
        assert_relative_eq!(r.value, 0.5 * (0.09 + 0.49), max_relative = 1e-13);
    }

    #[test]
    fn adaptive_semi_infinite() {
        let r = adaptive_to_infinity(|x: f64| (-x).exp() * x.sqrt(), 0.0, &[], 1e-13, 1e-12);
        assert_relative_eq!(r.value, crate::special::gamma(1.5), max_relative = 1e-10);
        let r = adaptive_to_infinity(|x: f64| 1.0 / (1.0 + x).powi(3), 0.0, &[], 1e-14, 1e-12);
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-11);
    }

    #[test]
    fn monotone_cubic_keeps_monotonicity() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| if v < 5.0 { 10.0 - v } else { 5.0 - 0.01 * v }).collect();
        let m = MonotoneCubic::new(x, y).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..=900 {
            let t = k as f64 * 0.01;
            let v = m.value(t);
            assert!(v <= prev + 1e-12);
            prev = v;
            assert!(m.derivative(t) <= 1e-12);
        }
        let s = MonotoneCubic::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert_relative_eq!(s.value(1.0), 1.0);
    }
}
