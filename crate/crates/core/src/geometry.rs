//! Bergman-metric geometry of the unit ball `B_n ⊂ C^n`.
//!
//! Volumes are in the normalized convention `v(B_n) = 1` with
//! `dv_g = dv / (1 - |z|^2)^(n+1)`, so the geodesic ball of radius `ρ` about
//! the origin has volume `sinh(ρ)^(2n)`.
//!
//! The gradient norm uses the quadratic form
//! `|∇_g u|^2 = 4(1-|z|^2) Σ (δ_ij - z_i z̄_j) ∂_i u conj(∂_j u)`
//! and the invariant Laplacian
//! `Δ_g = 4(1-|z|^2) Σ (δ_ij - z_i z̄_j) ∂²/∂z_i∂z̄_j`. Both are pinned by
//! `|∇_g ρ| = 1` and `Δ_g log(1-|z|^2) = -4n`.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// A point of the open unit ball in `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("a ball point needs n >= 1 coordinates".into()));
        }
        let r2 = norm_sqr(&coords);
        if !(r2 < 1.0) {
            return Err(Error::Domain(format!("|z|^2 = {r2} is not < 1")));
        }
        Ok(Self { coords })
    }

    pub fn origin(n: usize) -> Self {
        Self { coords: vec![Complex64::new(0.0, 0.0); n.max(1)] }
    }

    /// `tanh(ρ) ζ` for a unit vector `ζ`.
    pub fn from_polar(rho: f64, zeta: &[Complex64]) -> Result<Self> {
        let r = rho.tanh();
        Self::new(zeta.iter().map(|c| c * r).collect())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.coords)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

pub(crate) fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// Geodesic distance to the origin.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct GeodesicRadius(f64);

impl GeodesicRadius {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_finite() && rho >= 0.0 {
            Ok(Self(rho))
        } else {
            Err(Error::Domain(format!("geodesic radius must be finite and >= 0, got {rho}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A real-valued function on the ball.
///
/// `complex_gradient` returns the holomorphic-coordinate partials
/// `∂u/∂z_i = (∂_x - i ∂_y) u / 2` when known in closed form; callers fall
/// back to finite differences otherwise.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, z: &[Complex64]) -> f64;

    /// Value at `tanh(ρ) ζ`. Implementations with a closed form in `ρ`
    /// should override this to stay accurate near the boundary.
    fn eval_polar(&self, rho: f64, zeta: &[Complex64]) -> f64 {
        let r = rho.tanh();
        let z: Vec<Complex64> = zeta.iter().map(|c| c * r).collect();
        self.eval(&z)
    }

    fn complex_gradient(&self, _z: &[Complex64]) -> Option<Vec<Complex64>> {
        None
    }

    /// Euclidean radius outside of which the field vanishes.
    fn support_radius_hint(&self) -> f64 {
        1.0
    }

    /// A geodesic radius beyond which `eval_polar < level` in every direction,
    /// when such a certificate is available.
    fn radial_cutoff(&self, _level: f64) -> Option<f64> {
        None
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, z: &[Complex64]) -> f64 {
        (**self).eval(z)
    }
    fn eval_polar(&self, rho: f64, zeta: &[Complex64]) -> f64 {
        (**self).eval_polar(rho, zeta)
    }
    fn complex_gradient(&self, z: &[Complex64]) -> Option<Vec<Complex64>> {
        (**self).complex_gradient(z)
    }
    fn support_radius_hint(&self) -> f64 {
        (**self).support_radius_hint()
    }
    fn radial_cutoff(&self, level: f64) -> Option<f64> {
        (**self).radial_cutoff(level)
    }
}

/// Closure-backed field.
pub struct FnField<F> {
    n: usize,
    f: F,
    support: f64,
}

impl<F: Fn(&[Complex64]) -> f64 + Sync> FnField<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f, support: 1.0 }
    }

    pub fn with_support(mut self, radius: f64) -> Self {
        self.support = radius;
        self
    }
}

impl<F: Fn(&[Complex64]) -> f64 + Sync> ScalarField for FnField<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Complex64]) -> f64 {
        (self.f)(z)
    }
    fn support_radius_hint(&self) -> f64 {
        self.support
    }
}

/// `z ↦ ρ(z)`, with its closed-form gradient.
pub struct DistanceField {
    pub n: usize,
}

impl ScalarField for DistanceField {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &[Complex64]) -> f64 {
        norm_sqr(z).sqrt().atanh()
    }
    fn eval_polar(&self, rho: f64, _zeta: &[Complex64]) -> f64 {
        rho
    }
    fn complex_gradient(&self, z: &[Complex64]) -> Option<Vec<Complex64>> {
        let r2 = norm_sqr(z);
        if r2 == 0.0 {
            return None;
        }
        let c = 1.0 / (2.0 * r2.sqrt() * (1.0 - r2));
        Some(z.iter().map(|zi| zi.conj() * c).collect())
    }
}

/// `ρ(z) = ½ ln((1+|z|)/(1-|z|))`.
pub fn geodesic_radius(z: &BallPoint) -> GeodesicRadius {
    GeodesicRadius(z.norm().atanh())
}

/// Geodesic radius of raw coordinates, rejecting points outside the ball.
pub fn geodesic_radius_of(z: &[Complex64]) -> Result<GeodesicRadius> {
    let r = norm_sqr(z).sqrt();
    if r >= 1.0 {
        return Err(Error::Domain(format!("|z| = {r} is not < 1")));
    }
    Ok(GeodesicRadius(r.atanh()))
}

/// `ln sinh ρ`, stable for large `ρ`.
pub fn ln_sinh(rho: f64) -> f64 {
    if rho > 20.0 {
        rho - std::f64::consts::LN_2 + (-(-2.0 * rho).exp()).ln_1p()
    } else {
        rho.sinh().ln()
    }
}

/// Radius above which sinh-based quantities are formed in log space.
const LOG_SPACE_RHO: f64 = 300.0;

/// `vol_g(B_g(0, ρ)) = sinh(ρ)^(2n)`.
pub fn geodesic_ball_volume(rho: GeodesicRadius, n: usize) -> Result<f64> {
    let rho = rho.get();
    if rho == 0.0 {
        return Ok(0.0);
    }
    if rho > LOG_SPACE_RHO {
        let lv = 2.0 * n as f64 * ln_sinh(rho);
        return saturating_exp(lv, "geodesic ball volume");
    }
    Ok(rho.sinh().powi(2 * n as i32))
}

/// `ln vol_g(B_g(0, ρ))`.
pub fn ln_geodesic_ball_volume(rho: GeodesicRadius, n: usize) -> f64 {
    2.0 * n as f64 * ln_sinh(rho.get())
}

/// `per_g(∂B_g(0, ρ)) = 2n sinh(ρ)^(2n-1) cosh(ρ)`, the `ρ`-derivative of
/// the ball volume.
pub fn geodesic_sphere_area(rho: GeodesicRadius, n: usize) -> Result<f64> {
    let rho = rho.get();
    if rho <= 0.0 {
        return Err(Error::Domain("sphere area needs ρ > 0".into()));
    }
    let n2 = 2 * n as i32;
    if rho > LOG_SPACE_RHO {
        let la = (2.0 * n as f64).ln() + (n2 - 1) as f64 * ln_sinh(rho) + rho - std::f64::consts::LN_2;
        return saturating_exp(la, "geodesic sphere area");
    }
    Ok(2.0 * n as f64 * rho.sinh().powi(n2 - 1) * rho.cosh())
}

fn saturating_exp(l: f64, what: &str) -> Result<f64> {
    if l > f64::MAX.ln() {
        Err(Error::Domain(format!("{what} overflows (log value {l:.3})")))
    } else {
        Ok(l.exp())
    }
}

/// Inverse of `ρ ↦ sinh(ρ)^(2n)`.
pub fn radius_of_volume(s: f64, n: usize) -> f64 {
    s.powf(1.0 / (2.0 * n as f64)).asinh()
}

/// Default central-difference step at `z`, shrinking toward the boundary.
pub fn fd_step(z: &[Complex64]) -> f64 {
    1e-5 * (1.0 - norm_sqr(z).sqrt())
}

/// Holomorphic partials by central differences in the real coordinates.
pub fn fd_complex_gradient<U: ScalarField + ?Sized>(u: &U, z: &[Complex64], h: f64) -> Vec<Complex64> {
    let mut w = z.to_vec();
    (0..z.len())
        .map(|i| {
            let zi = z[i];
            w[i] = zi + h;
            let xp = u.eval(&w);
            w[i] = zi - h;
            let xm = u.eval(&w);
            w[i] = zi + Complex64::new(0.0, h);
            let yp = u.eval(&w);
            w[i] = zi - Complex64::new(0.0, h);
            let ym = u.eval(&w);
            w[i] = zi;
            Complex64::new((xp - xm) / (4.0 * h), -(yp - ym) / (4.0 * h))
        })
        .collect()
}

/// `4(1-|z|^2) Σ (δ_ij - z_i z̄_j) d_i conj(d_j)` for holomorphic partials `d`.
pub fn bergman_quadratic_form(z: &[Complex64], d: &[Complex64]) -> f64 {
    let r2 = norm_sqr(z);
    let sum_sq: f64 = d.iter().map(|c| c.norm_sqr()).sum();
    let proj: Complex64 = z.iter().zip(d).map(|(zi, di)| zi * di).sum();
    (4.0 * (1.0 - r2) * (sum_sq - proj.norm_sqr())).max(0.0)
}

/// `|∇_g u|_g` at `z`, from the closed-form gradient when the field has one.
pub fn bergman_gradient_norm<U: ScalarField + ?Sized>(u: &U, z: &BallPoint) -> Result<f64> {
    if u.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: z.dim() });
    }
    let d = u
        .complex_gradient(z.coords())
        .unwrap_or_else(|| fd_complex_gradient(u, z.coords(), fd_step(z.coords())));
    Ok(bergman_quadratic_form(z.coords(), &d).sqrt())
}

/// Invariant Laplacian `Δ_g u(z)` by Richardson-extrapolated central
/// differences of the real Hessian.
pub fn invariant_laplacian<U: ScalarField + ?Sized>(u: &U, z: &BallPoint) -> Result<f64> {
    if u.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: z.dim() });
    }
    let n = z.dim();
    let base = z.coords();
    let h = 1e-3 * (1.0 - z.norm());
    let dim = 2 * n;
    let shift = |w: &mut [Complex64], k: usize, d: f64| {
        if k % 2 == 0 {
            w[k / 2].re += d;
        } else {
            w[k / 2].im += d;
        }
    };
    let eval_at = |steps: &[(usize, f64)]| -> Result<f64> {
        let mut w = base.to_vec();
        for &(k, d) in steps {
            shift(&mut w, k, d);
        }
        let v = u.eval(&w);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Singular(format!("field is not finite near {:?}", base)))
        }
    };
    let f0 = eval_at(&[])?;
    // real Hessian in coordinates (x_1, y_1, ..., x_n, y_n)
    let mut hess = vec![0.0; dim * dim];
    for k in 0..dim {
        let d2 = |s: f64| -> Result<f64> {
            Ok((eval_at(&[(k, s)])? - 2.0 * f0 + eval_at(&[(k, -s)])?) / (s * s))
        };
        hess[k * dim + k] = (4.0 * d2(h)? - d2(2.0 * h)?) / 3.0;
        for l in (k + 1)..dim {
            let mixed = |s: f64| -> Result<f64> {
                Ok((eval_at(&[(k, s), (l, s)])? - eval_at(&[(k, s), (l, -s)])?
                    - eval_at(&[(k, -s), (l, s)])?
                    + eval_at(&[(k, -s), (l, -s)])?)
                    / (4.0 * s * s))
            };
            let v = (4.0 * mixed(h)? - mixed(2.0 * h)?) / 3.0;
            hess[k * dim + l] = v;
            hess[l * dim + k] = v;
        }
    }
    let hx = |a: usize, b: usize| hess[a * dim + b];
    let r2 = z.norm_sqr();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            // ∂²u/∂z_i∂z̄_j
            let mixed = Complex64::new(
                0.25 * (hx(xi, xj) + hx(yi, yj)),
                0.25 * (hx(xi, yj) - hx(yi, xj)),
            );
            let delta = if i == j { 1.0 } else { 0.0 };
            let coef = Complex64::new(delta, 0.0) - base[i] * base[j].conj();
            acc += coef * mixed;
        }
    }
    Ok(4.0 * (1.0 - r2) * acc.re)
}
