//! Margins with error budgets.

use serde::{Deserialize, Serialize};

/// Multiplier applied to standard errors in every statistical comparison.
pub const SIGMA_RULE: f64 = 3.0;

/// Relative floor for comparisons whose error bar is zero (exact or
/// deterministic quantities). Covers rounding and root-finding noise.
pub const ANALYTIC_FLOOR: f64 = 1e-10;

/// Signed slack of an inequality `lhs >= rhs` (margin `lhs - rhs`) or of an
/// equality (margin `lhs - rhs`, compared in absolute value).
///
/// `stderr` is the statistical standard error of the margin; `discretization`
/// an estimate of the deterministic quadrature or interpolation error. The
/// tolerance is `3 * sqrt(stderr^2 + discretization^2) + floor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    pub stderr: f64,
    pub discretization: f64,
    pub floor: f64,
}

impl Margin {
    /// Margin with a statistical error bar; `scale` sets the analytic floor.
    pub fn new(value: f64, stderr: f64, scale: f64) -> Self {
        Self {
            value,
            stderr,
            discretization: 0.0,
            floor: ANALYTIC_FLOOR * scale.abs().max(1.0),
        }
    }

    /// Margin of an exact computation with an explicit absolute floor.
    pub fn exact(value: f64, floor: f64) -> Self {
        Self { value, stderr: 0.0, discretization: 0.0, floor }
    }

    pub fn with_discretization(mut self, d: f64) -> Self {
        self.discretization = d.abs();
        self
    }

    pub fn tolerance(&self) -> f64 {
        SIGMA_RULE * self.stderr.hypot(self.discretization) + self.floor
    }

    /// Inequality reading: `value >= -tolerance`.
    pub fn holds(&self) -> bool {
        self.value.is_finite() && self.value >= -self.tolerance()
    }

    /// Equality reading: `|value| <= tolerance`.
    pub fn vanishes(&self) -> bool {
        self.value.is_finite() && self.value.abs() <= self.tolerance()
    }
}

/// Outcome of one named comparison, used by every checker in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub margin: Margin,
    pub pass: bool,
    /// Free-form diagnostics (warnings, scale factors, worst points).
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn inequality(id: impl Into<String>, margin: Margin) -> Self {
        Self { id: id.into(), pass: margin.holds(), margin, notes: Vec::new() }
    }

    pub fn equality(id: impl Into<String>, margin: Margin) -> Self {
        Self { id: id.into(), pass: margin.vanishes(), margin, notes: Vec::new() }
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// Worst (most negative relative to tolerance) of a set of margins.
    pub fn worst_of(id: impl Into<String>, margins: &[Margin], equality: bool) -> Self {
        let score = |m: &Margin| {
            let v = if equality { -m.value.abs() } else { m.value };
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v + m.tolerance()
            }
        };
        let worst = margins
            .iter()
            .copied()
            .min_by(|a, b| score(a).total_cmp(&score(b)))
            .unwrap_or(Margin::exact(0.0, 0.0));
        let pass = margins
            .iter()
            .all(|m| if equality { m.vanishes() } else { m.holds() });
        Self { id: id.into(), margin: worst, pass, notes: Vec::new() }
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// `f` at the column means of `rows`, with a delta-method standard error
/// from the per-row influence `∇f · (row - mean)`.
pub fn delta_method<F: Fn(&[f64]) -> f64>(rows: &[Vec<f64>], f: F) -> (f64, f64) {
    let count = rows.len();
    let Some(width) = rows.first().map(Vec::len) else {
        return (f64::NAN, f64::NAN);
    };
    let mut mean = vec![0.0; width];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= count as f64);
    let value = f(&mean);
    if count < 2 {
        return (value, 0.0);
    }
    let mut grad = vec![0.0; width];
    let mut probe = mean.clone();
    for i in 0..width {
        if rows.iter().all(|r| r[i] == mean[i]) {
            continue;
        }
        let h = 1e-6 * mean[i].abs().max(1e-300);
        probe[i] = mean[i] + h;
        let up = f(&probe);
        probe[i] = mean[i] - h;
        let down = f(&probe);
        probe[i] = mean[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    let ss: f64 = rows
        .iter()
        .map(|r| {
            let psi: f64 = grad.iter().zip(r.iter().zip(&mean)).map(|(g, (x, m))| g * (x - m)).sum();
            psi * psi
        })
        .sum();
    (value, (ss / (count * (count - 1)) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_rule() {
        let m = Margin::new(-0.29, 0.1, 1.0);
        assert!(m.holds());
        let m = Margin::new(-0.31, 0.1, 1.0);
        assert!(!m.holds());
        assert!(Margin::exact(1e-12, 1e-10).vanishes());
        assert!(!Margin::new(f64::NAN, 1.0, 1.0).holds());
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        let (m, s) = mean_stderr(&[2.0; 10]);
        assert_eq!((m, s), (2.0, 0.0));
    }

    #[test]
    fn delta_method_linear_matches_direct() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64, (i * i) as f64 % 7.0]).collect();
        let col: Vec<f64> = rows.iter().map(|r| 2.0 * r[0] - r[1]).collect();
        let (m, s) = mean_stderr(&col);
        let (v, e) = delta_method(&rows, |x| 2.0 * x[0] - x[1]);
        assert!((m - v).abs() < 1e-9 && (s - e).abs() < 1e-6 * s);
    }
}
