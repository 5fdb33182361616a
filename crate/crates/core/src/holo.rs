//! Sparse holomorphic polynomials on `C^n` and the level functions
//! `u(z) = |f(z)|^a (1 - |z|^2)^b`.

use crate::error::{Error, Result};
use crate::geometry::{fd_complex_gradient, fd_step, norm_sqr, ScalarField};
use crate::rng::{disk_point, streams, CounterRng};
use crate::special::factorial;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Exponent vector of a monomial `z^m = z_1^{m_1} ... z_n^{m_n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `e_i` in dimension `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = vec![0; n];
        m[i] = 1;
        Self(m)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `m! = Π m_i!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All indices of dimension `n` and total degree at most `d`, in
    /// lexicographic order.
    pub fn all_up_to(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if cur.len() == n {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for k in 0..=left {
                cur.push(k);
                rec(n, left - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out.sort();
        out
    }
}

/// `Σ c_m z^m` with finitely many nonzero terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(MultiIndex::zero(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `z_{i+1}`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(MultiIndex::unit(n, i), Complex64::new(1.0, 0.0));
        p
    }

    pub fn monomial(m: MultiIndex, c: Complex64) -> Self {
        let mut p = Self::zero(m.dim());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("polynomial dimension must be >= 1".into()));
        }
        let mut p = Self::zero(n);
        for (m, c) in terms {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Parameter("non-finite coefficient".into()));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Adds `c z^m`, dropping the term if it cancels exactly.
    pub fn add_term(&mut self, m: MultiIndex, c: Complex64) {
        debug_assert_eq!(m.dim(), self.n);
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                if c != ZERO {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == ZERO {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// `Σ |c_m|`, an upper bound for `|f|` on the closed ball.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut p = Self::zero(self.n);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c * k);
        }
        p
    }

    /// `f(λ z)`.
    pub fn dilate(&self, lambda: f64) -> Self {
        let mut p = Self::zero(self.n);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c * lambda.powi(m.degree() as i32));
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut p = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(ma.add(mb), ca * cb);
            }
        }
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// Exact value at `z`, via per-variable power tables.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: z.len() });
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let d = self.degree() as usize;
        if d == 0 {
            return self.terms.values().copied().sum();
        }
        let mut pows = vec![Complex64::new(1.0, 0.0); self.n * (d + 1)];
        for (i, zi) in z.iter().enumerate() {
            for k in 1..=d {
                pows[i * (d + 1) + k] = pows[i * (d + 1) + k - 1] * zi;
            }
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .enumerate()
                    .fold(*c, |acc, (i, &k)| acc * pows[i * (d + 1) + k as usize])
            })
            .sum()
    }

    /// `∂f/∂z_i` for each `i`.
    pub fn complex_partials(&self) -> Vec<Polynomial> {
        (0..self.n)
            .map(|i| {
                let mut p = Self::zero(self.n);
                for (m, c) in &self.terms {
                    let k = m.0[i];
                    if k > 0 {
                        let mut e = m.0.clone();
                        e[i] -= 1;
                        p.add_term(MultiIndex(e), c * k as f64);
                    }
                }
                p
            })
            .collect()
    }

    /// `‖f‖_{H^2}^2 = Σ |c_m|^2 (n-1)! m! / (n-1+|m|)!` by orthogonality.
    pub fn hardy2_norm_sq(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.norm_sqr() * sphere_moment(m, self.n))
            .sum()
    }

    /// `‖f‖_{A_α^2}^2 = Σ |c_m|^2 c_α n B(n+|m|, α-n) (n-1)! m! / (n-1+|m|)!`.
    pub fn bergman2_norm_sq(&self, alpha: f64) -> Result<f64> {
        let n = self.n as f64;
        if !(alpha > n) {
            return Err(Error::Parameter(format!("Bergman weight needs α > n, got α = {alpha}")));
        }
        let c_alpha = crate::norms::bergman_constant(self.n, alpha)?;
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| {
                let radial = n * crate::special::beta(n + m.degree() as f64, alpha - n);
                c.norm_sqr() * c_alpha * radial * sphere_moment(m, self.n)
            })
            .sum())
    }
}

/// `∫_{S_n} |ζ^m|^2 dσ = (n-1)! m! / (n-1+|m|)!`.
fn sphere_moment(m: &MultiIndex, n: usize) -> f64 {
    let d = m.degree() as f64;
    let nn = n as f64;
    (crate::special::ln_gamma(nn) + m.0.iter().map(|&k| crate::special::ln_gamma(k as f64 + 1.0)).sum::<f64>()
        - crate::special::ln_gamma(nn + d))
        .exp()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·z{}", i + 1)?,
                    _ => write!(f, "·z{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    exponents: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolynomialFile {
    n: usize,
    terms: Vec<TermFile>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialFile {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermFile { exponents: m.0.clone(), re: c.re, im: c.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = PolynomialFile::deserialize(d)?;
        Polynomial::from_terms(
            file.n,
            file.terms
                .into_iter()
                .map(|t| (MultiIndex(t.exponents), Complex64::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl Polynomial {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomials always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parameter(format!("polynomial JSON: {e}")))
    }
}

/// `u(z) = |f(z)|^a (1 - |z|^2)^b`.
#[derive(Clone, Debug)]
pub struct LevelFunction {
    f: Polynomial,
    partials: Vec<Polynomial>,
    a: f64,
    b: f64,
    zero_tol: f64,
}

impl LevelFunction {
    pub fn new(f: Polynomial, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::Parameter(format!("level exponents need a, b > 0, got a = {a}, b = {b}")));
        }
        let partials = f.complex_partials();
        let zero_tol = 1e-12 * (1.0 + f.coeff_l1());
        Ok(Self { f, partials, a, b, zero_tol })
    }

    /// Hardy-type level function `|f|^r (1 - |z|^2)`.
    pub fn hardy(f: Polynomial, r: f64) -> Result<Self> {
        Self::new(f, r, 1.0)
    }

    /// Bergman-type level function `|f|^p (1 - |z|^2)^α`.
    pub fn bergman(f: Polynomial, p: f64, alpha: f64) -> Result<Self> {
        Self::new(f, p, alpha)
    }

    pub fn poly(&self) -> &Polynomial {
        &self.f
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Same `(a, b)` with `f` replaced by `k f`.
    pub fn rescaled(&self, k: f64) -> Self {
        Self::new(self.f.scale(Complex64::new(k, 0.0)), self.a, self.b).expect("exponents already validated")
    }

    /// Value from `|f|` and `1 - |z|^2` supplied separately.
    fn combine(&self, fabs: f64, defect: f64) -> f64 {
        if fabs == 0.0 || defect <= 0.0 {
            return 0.0;
        }
        (self.a * fabs.ln() + self.b * defect.ln()).exp()
    }

    /// Numerically located `t_0 = max u` and a maximizer.
    pub fn maximum(&self, seed: u64) -> (f64, Vec<Complex64>) {
        locate_maximum(self, seed)
    }
}

impl ScalarField for LevelFunction {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn eval(&self, z: &[Complex64]) -> f64 {
        let defect = 1.0 - norm_sqr(z);
        self.combine(self.f.eval_unchecked(z).norm(), defect)
    }

    fn eval_polar(&self, rho: f64, zeta: &[Complex64]) -> f64 {
        let r = rho.tanh();
        let z: Vec<Complex64> = zeta.iter().map(|c| c * r).collect();
        let sech = 1.0 / rho.cosh();
        self.combine(self.f.eval_unchecked(&z).norm(), sech * sech)
    }

    fn complex_gradient(&self, z: &[Complex64]) -> Option<Vec<Complex64>> {
        let fz = self.f.eval_unchecked(z);
        let defect = 1.0 - norm_sqr(z);
        if fz.norm() < self.zero_tol {
            return Some(fd_complex_gradient(self, z, fd_step(z)));
        }
        let u = self.combine(fz.norm(), defect);
        Some(
            z.iter()
                .zip(&self.partials)
                .map(|(zi, pi)| {
                    let fi = pi.eval_unchecked(z);
                    u * (0.5 * self.a * fi / fz - self.b * zi.conj() / defect)
                })
                .collect(),
        )
    }

    fn radial_cutoff(&self, level: f64) -> Option<f64> {
        // u <= (Σ|c|)^a sech(ρ)^{2b}
        let bound = self.f.coeff_l1();
        if bound == 0.0 {
            return Some(0.0);
        }
        if !(level > 0.0) {
            return None;
        }
        let ratio = (self.a * bound.ln() - level.ln()) / (2.0 * self.b);
        if ratio <= 0.0 {
            Some(0.0)
        } else {
            Some(ratio.exp().acosh())
        }
    }
}

/// Radical-inverse (Halton) coordinate of `i` in base `p`.
fn radical_inverse(mut i: u64, p: u64) -> f64 {
    let inv = 1.0 / p as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += f * (i % p) as f64;
        i /= p;
        f *= inv;
    }
    x
}

const HALTON_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Number of low-discrepancy starting points for the maximum search.
pub const MAX_SEARCH_STARTS: usize = 256;

/// Halton points of `[-1,1]^{2n}` that fall inside the ball, first `count`.
fn halton_ball_points(n: usize, count: usize) -> Vec<Vec<Complex64>> {
    let dim = 2 * n;
    assert!(dim <= HALTON_PRIMES.len(), "dimension too large for the start set");
    let mut out = Vec::with_capacity(count);
    let mut i = 1u64;
    while out.len() < count {
        let x: Vec<f64> = (0..dim).map(|k| 2.0 * radical_inverse(i, HALTON_PRIMES[k]) - 1.0).collect();
        i += 1;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 < 1.0 {
            out.push((0..n).map(|k| Complex64::new(x[2 * k], x[2 * k + 1])).collect());
        }
    }
    out
}

fn set_coord(z: &mut [Complex64], k: usize, v: f64) {
    if k % 2 == 0 {
        z[k / 2].re = v;
    } else {
        z[k / 2].im = v;
    }
}

fn get_coord(z: &[Complex64], k: usize) -> f64 {
    if k % 2 == 0 {
        z[k / 2].re
    } else {
        z[k / 2].im
    }
}

/// Golden-section maximization of `h` on `[lo, hi]`.
fn golden_max<H: FnMut(f64) -> f64>(mut h: H, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = h(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = h(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Multi-start coordinate-wise golden-section ascent for `max u`.
///
/// The seed perturbs nothing in the start set (it is a fixed Halton set); it
/// only orders ties, so results are fully deterministic.
pub fn locate_maximum<U: ScalarField + ?Sized>(u: &U, _seed: u64) -> (f64, Vec<Complex64>) {
    let n = u.dim();
    let starts = halton_ball_points(n, MAX_SEARCH_STARTS);
    let mut scored: Vec<(f64, Vec<Complex64>)> = starts.into_iter().map(|z| (u.eval(&z), z)).collect();
    scored.push((u.eval(&vec![ZERO; n]), vec![ZERO; n]));
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = (f64::NEG_INFINITY, vec![ZERO; n]);
    for (v0, z0) in scored.into_iter().take(12) {
        let mut z = z0;
        let mut v = v0;
        for _sweep in 0..200 {
            let before = v;
            for k in 0..2 * n {
                let cur = get_coord(&z, k);
                let others = norm_sqr(&z) - cur * cur;
                let half = (1.0 - others).max(0.0).sqrt() * (1.0 - 1e-12);
                let mut w = z.clone();
                let (x, fx) = golden_max(
                    |x| {
                        set_coord(&mut w, k, x);
                        u.eval(&w)
                    },
                    -half,
                    half,
                    1e-11,
                );
                if fx > v {
                    set_coord(&mut z, k, x);
                    v = fx;
                }
            }
            if v - before <= 1e-13 * v.abs().max(1e-300) {
                break;
            }
        }
        if v > best.0 {
            best = (v, z);
        }
    }
    best
}

/// Named families of test polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Constants { n: usize },
    Coordinates { n: usize },
    /// `count` polynomials with every coefficient of degree `<= degree`
    /// uniform in the unit disk.
    RandomPoly { degree: u32, n: usize, count: usize },
    /// `f(λ z)` for a fixed random base polynomial of the given degree.
    Dilates { degree: u32, n: usize, lambdas: Vec<f64> },
}

impl Family {
    /// Parses `constants`, `coordinates`, `random_poly`, `dilates` with
    /// defaults for the numeric parameters.
    pub fn by_name(name: &str, n: usize) -> Result<Self> {
        match name {
            "constants" => Ok(Self::Constants { n }),
            "coordinates" => Ok(Self::Coordinates { n }),
            "random_poly" => Ok(Self::RandomPoly { degree: 3, n, count: 5 }),
            "dilates" => Ok(Self::Dilates { degree: 3, n, lambdas: vec![0.25, 0.5, 0.75, 0.9] }),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Random polynomial of degree `<= d` in `n` variables, number `index` of the
/// stream for `seed`.
pub fn random_poly(d: u32, n: usize, seed: u64, index: u64) -> Polynomial {
    let idx = MultiIndex::all_up_to(n, d);
    let words = 4 * idx.len() as u64;
    let mut rng = CounterRng::at(seed, streams::POLY_COEFFS, index, words);
    Polynomial::from_terms(n, idx.into_iter().map(|m| (m, disk_point(&mut rng)))).expect("valid indices")
}

pub fn test_family(family: &Family, seed: u64) -> Result<Vec<Polynomial>> {
    match family {
        Family::Constants { n } => {
            check_dim(*n)?;
            Ok(vec![Polynomial::one(*n)])
        }
        Family::Coordinates { n } => {
            check_dim(*n)?;
            Ok((0..*n).map(|i| Polynomial::coordinate(*n, i)).collect())
        }
        Family::RandomPoly { degree, n, count } => {
            check_dim(*n)?;
            Ok((0..*count as u64).map(|i| random_poly(*degree, *n, seed, i)).collect())
        }
        Family::Dilates { degree, n, lambdas } => {
            check_dim(*n)?;
            if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
                return Err(Error::Parameter(format!("dilation factor {l} not in (0,1)")));
            }
            let base = random_poly(*degree, *n, seed, 0);
            Ok(lambdas.iter().map(|&l| base.dilate(l)).collect())
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=6).contains(&n) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("dimension n = {n} outside 1..=6")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bergman_gradient_norm, BallPoint};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation_examples() {
        let one = Polynomial::one(2);
        assert_eq!(one.evaluate(&[c(0.3, 0.1), c(-0.2, 0.0)]).unwrap(), c(1.0, 0.0));
        let z1 = Polynomial::coordinate(2, 0);
        assert_eq!(z1.evaluate(&[c(0.3, 0.0), c(0.0, 0.4)]).unwrap(), c(0.3, 0.0));
        let f = Polynomial::from_terms(
            2,
            [(MultiIndex::zero(2), c(2.0, 0.0)), (MultiIndex::new(vec![1, 1]), c(1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(f.evaluate(&[c(0.5, 0.0), c(0.5, 0.0)]).unwrap(), c(2.25, 0.0));
        assert!(f.evaluate(&[c(0.5, 0.0)]).is_err());
    }

    #[test]
    fn partials() {
        let f = Polynomial::monomial(MultiIndex::new(vec![2]), c(1.0, 0.0));
        assert_eq!(f.complex_partials()[0], Polynomial::monomial(MultiIndex::new(vec![1]), c(2.0, 0.0)));
        let k = Polynomial::constant(2, c(3.0, 1.0));
        assert!(k.complex_partials().iter().all(Polynomial::is_empty));
        let f = Polynomial::monomial(MultiIndex::new(vec![1, 1]), c(1.0, 0.0));
        let d = f.complex_partials();
        assert_eq!(d[0], Polynomial::coordinate(2, 1));
        assert_eq!(d[1], Polynomial::coordinate(2, 0));
    }

    #[test]
    fn level_function_examples() {
        let u = LevelFunction::new(Polynomial::coordinate(1, 0), 2.0, 1.0).unwrap();
        assert_relative_eq!(u.eval(&[c(0.6, 0.0)]), 0.2304, max_relative = 1e-14);
        let u1 = LevelFunction::new(Polynomial::one(1), 2.0, 1.0).unwrap();
        let z = BallPoint::new(vec![c(0.3, 0.4)]).unwrap();
        assert_relative_eq!(bergman_gradient_norm(&u1, &z).unwrap(), 0.75, max_relative = 1e-12);
        let near = [c(1.0 - 1e-4, 0.0)];
        assert!(u1.eval(&near) < 1e-3);
        assert!(LevelFunction::new(Polynomial::one(1), 0.0, 1.0).is_err());
    }

    #[test]
    fn polar_matches_cartesian() {
        let f = random_poly(3, 2, 42, 0);
        let u = LevelFunction::new(f, 2.0, 2.5).unwrap();
        let zeta = crate::rng::sphere_point(1, 1, 0, 2);
        for &rho in &[0.1, 0.8, 2.0] {
            let z: Vec<Complex64> = zeta.iter().map(|c| c * f64::tanh(rho)).collect();
            assert_relative_eq!(u.eval_polar(rho, &zeta), u.eval(&z), max_relative = 1e-12);
        }
    }

    #[test]
    fn analytic_gradient_matches_fd() {
        let f = random_poly(2, 2, 7, 3);
        let u = LevelFunction::new(f, 1.5, 1.0).unwrap();
        let z = [c(0.2, 0.1), c(-0.3, 0.25)];
        let g = u.complex_gradient(&z).unwrap();
        let fd = fd_complex_gradient(&u, &z, 1e-6);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).norm() < 1e-6 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn cutoff_certifies_decay() {
        let f = random_poly(3, 2, 42, 1);
        let u = LevelFunction::new(f, 2.0, 1.0).unwrap();
        let t = 1e-3;
        let rc = u.radial_cutoff(t).unwrap();
        for k in 0..50 {
            let zeta = crate::rng::sphere_point(9, 1, k, 2);
            assert!(u.eval_polar(rc + 0.01, &zeta) < t);
        }
    }

    #[test]
    fn maximum_of_coordinate_level() {
        // |z|^2 (1-|z|^2) peaks at 1/4
        let u = LevelFunction::new(Polynomial::coordinate(1, 0), 2.0, 1.0).unwrap();
        let (t0, _) = u.maximum(42);
        assert!((t0 - 0.25).abs() < 1e-10);
        let u = LevelFunction::new(Polynomial::one(2), 2.0, 2.0).unwrap();
        assert!((u.maximum(0).0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn families() {
        assert_eq!(test_family(&Family::Constants { n: 1 }, 0).unwrap(), vec![Polynomial::one(1)]);
        assert_eq!(
            test_family(&Family::Coordinates { n: 2 }, 0).unwrap(),
            vec![Polynomial::coordinate(2, 0), Polynomial::coordinate(2, 1)]
        );
        let fam = Family::RandomPoly { degree: 3, n: 2, count: 3 };
        let a = test_family(&fam, 42).unwrap();
        assert_eq!(a, test_family(&fam, 42).unwrap());
        assert_ne!(a, test_family(&fam, 43).unwrap());
        assert_eq!(a[0].len(), 10);
        assert!(a[0].terms().all(|(_, c)| c.norm() < 1.0));
        assert!(matches!(Family::by_name("bogus", 1), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = random_poly(4, 3, 11, 2);
        let back = Polynomial::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
        let s = r#"{"n":1,"terms":[{"exponents":[0,1],"re":1.0,"im":0.0}]}"#;
        assert!(Polynomial::from_json(s).is_err());
    }

    #[test]
    fn exact_norms() {
        let z = Polynomial::coordinate(2, 0);
        assert_relative_eq!(z.hardy2_norm_sq(), 0.5, max_relative = 1e-14);
        let z = Polynomial::coordinate(1, 0);
        assert_relative_eq!(z.bergman2_norm_sq(2.0).unwrap(), 0.5, max_relative = 1e-14);
        assert!(z.bergman2_norm_sq(1.0).is_err());
        // ‖z^2‖_{H^2} = ‖z‖_{H^4}^2 for n = 1
        let sq = z.pow(2);
        assert_relative_eq!(sq.hardy2_norm_sq(), 1.0, max_relative = 1e-14);
    }
}
