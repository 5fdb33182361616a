//! The verification battery. Every check becomes one or more
//! [`VerificationRecord`]s; checks run one after another and each is
//! internally data-parallel, so the report does not depend on scheduling.

use crate::config::{Budget, Suite, SuiteConfig};
use crate::curves::{curves_of, distribution_csv, rearrangement_csv};
use crate::error::{HarnessError, Result};
use crate::exit;
use crate::record::{Reading, VerificationRecord};
use crate::report::{write_outputs, Report};
use hyperlevel::check::{CheckReport, Margin};
use hyperlevel::geometry::{
    geodesic_ball_volume, geodesic_sphere_area, invariant_laplacian, BallPoint, FnField, GeodesicRadius,
};
use hyperlevel::holo::{random_poly, LevelFunction, MultiIndex, Polynomial};
use hyperlevel::inequalities::{
    ell_integral_closed, ell_integral_quadrature, isoperimetric_model_check, isoperimetric_refined_check,
    kalaj_lemma_check, sobolev_check, sobolev_constant, sup_representation_check, weighted_hardy_check, Convention,
    HardyProbe, Phi, Psi, SampledProfile, SobolevRegime,
};
use hyperlevel::integrate::{integrate_ball_hyperbolic, McConfig};
use hyperlevel::norms::{
    bergman_constant, contraction_chain_check, exact_norm_pow, hardy_limit_check, layer_cake_constant, norm_pow,
    pointwise_bound_check, SpaceParams,
};
use hyperlevel::rearrange::{
    equimeasurability_check, fixed_point_check, polya_szego_check, polya_szego_checks, preservation_check,
    radial_gradient_identities_check, RadialProfile, SampledDistribution, TruncatedField, REARRANGEMENT_GRID,
};
use hyperlevel::rng::{streams, CounterRng};
use hyperlevel::superlevel::{
    coordinate_annulus_measure, differential_inequality_check, distribution_function, extremal_functional_check,
    layer_cake_cross_check, monotonicity_check, normalization_identity_check, weak_type_check, ExtremalSpace,
    GFunction,
};
use hyperlevel::Complex64;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::time::Instant;

/// Records, CSV curves keyed by file name, and wall-clock seconds per check.
#[derive(Clone, Debug, Default)]
pub struct SuiteRun {
    pub records: Vec<VerificationRecord>,
    pub curves: BTreeMap<String, Vec<u8>>,
    pub timings: BTreeMap<String, f64>,
}

impl SuiteRun {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

type Item = (String, Reading, CheckReport);

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    budget: Budget,
    run: SuiteRun,
}

impl Ctx<'_> {
    fn many<F: FnOnce() -> Result<Vec<Item>>>(&mut self, base: String, tag: &str, inputs: Value, f: F) {
        let mut inputs = inputs;
        inputs["seed"] = json!(self.cfg.seed);
        inputs["radial_nodes"] = json!(self.cfg.radial_nodes);
        let start = Instant::now();
        match f() {
            Ok(items) => {
                for (id, reading, report) in items {
                    self.run.records.push(VerificationRecord::from_check(id, tag, reading, &report, &inputs));
                }
            }
            Err(e) => self.run.records.push(VerificationRecord::from_error(base.clone(), tag, &inputs, &e)),
        }
        self.run.timings.insert(base, start.elapsed().as_secs_f64());
    }

    fn one<F: FnOnce() -> Result<CheckReport>>(&mut self, id: String, tag: &str, reading: Reading, inputs: Value, f: F) {
        let key = id.clone();
        self.many(key, tag, inputs, || Ok(vec![(id, reading, f()?)]));
    }

    fn mc(&self, samples: usize) -> Result<McConfig> {
        self.cfg.mc(samples)
    }

    fn curve(&mut self, name: String, bytes: Result<Vec<u8>>) {
        match bytes {
            Ok(b) => {
                self.run.curves.insert(name, b);
            }
            Err(e) => self.run.records.push(VerificationRecord::from_error(
                format!("curves/{name}"),
                "curve-dump",
                &json!({ "file": name }),
                &e,
            )),
        }
    }
}

/// Random polynomials of degree 3 used throughout the battery.
pub fn battery(n: usize, seed: u64, count: usize) -> Vec<Polynomial> {
    (0..count as u64).map(|i| random_poly(3, n, seed, i)).collect()
}

pub const BATTERY_SIZE: usize = 5;

/// Pólya–Szegő battery size across all dimensions.
pub const REARRANGEMENT_BATTERY: usize = 15;

fn poly_json(f: &Polynomial) -> Value {
    serde_json::to_value(f).expect("polynomials serialize")
}

/// Runs the configured suites in order; records are sorted by id.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteRun> {
    cfg.validate()?;
    let mut ctx = Ctx { cfg, budget: cfg.budget(), run: SuiteRun::default() };
    for &suite in &cfg.suites {
        for (k, &n) in cfg.n_list.iter().enumerate() {
            let first = k == 0;
            match suite {
                Suite::Geometry => geometry(&mut ctx, n)?,
                Suite::Norms => norms(&mut ctx, n)?,
                Suite::Superlevel => superlevel(&mut ctx, n)?,
                Suite::Rearrange => rearrange(&mut ctx, n)?,
                Suite::Inequalities => inequalities(&mut ctx, n, first)?,
            }
        }
    }
    ctx.run.records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(ctx.run)
}

/// Runs the suites, writes the outputs and returns the report with the exit
/// status (`0` all pass, `1` some record fails).
pub fn verify(cfg: &SuiteConfig) -> Result<(Report, u8)> {
    let run = run_suite(cfg)?;
    write_outputs(&cfg.output_dir, cfg, &run)?;
    let report = Report::new(cfg, &run.records);
    let code = if report.all_pass() { exit::PASS } else { exit::FAIL };
    Ok((report, code))
}

fn geometry(ctx: &mut Ctx, n: usize) -> Result<()> {
    let radii: Vec<f64> = (1..=50).map(|k| 0.1 * k as f64).collect();
    iso_refined_block(ctx, n);
    ctx.one(
        format!("geometry/area-derivative[n={n}]"),
        "sphere-area",
        Reading::Equality,
        json!({ "n": n, "radii": &radii[..20], "h": 1e-5 }),
        || area_derivative_check(n, &radii[..20]),
    );
    let vcfg = ctx.mc(ctx.budget.volume)?;
    for rho in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let inputs = json!({ "n": n, "rho": rho, "samples": vcfg.sphere_samples });
        ctx.many(format!("geometry/volume[n={n},rho={rho}]"), "geodesic-ball-volume", inputs, || {
            volume_checks(n, rho, &vcfg)
        });
    }
    let ocfg = ctx.mc(ctx.budget.norms)?;
    ctx.one(
        format!("geometry/volume-off-center[n={n}]"),
        "geodesic-ball-volume",
        Reading::Equality,
        json!({ "n": n, "rho": 1.0, "center": 0.5, "samples": ocfg.sphere_samples }),
        || off_center_volume_check(n, 0.5, 1.0, &ocfg),
    );
    let seed = ctx.cfg.seed;
    ctx.one(
        format!("geometry/laplacian-log[n={n}]"),
        "invariant-laplacian",
        Reading::Equality,
        json!({ "n": n, "polynomials": 20, "points": 1000 }),
        || laplacian_log_check(n, seed, 20, 1000),
    );
    Ok(())
}

/// Sphere area against a central difference of the volume, `1e-6` relative.
pub fn area_derivative_check(n: usize, radii: &[f64]) -> Result<CheckReport> {
    let h = 1e-5;
    let mut margins = Vec::new();
    for &rho in radii {
        let v = |r: f64| -> Result<f64> { Ok(geodesic_ball_volume(GeodesicRadius::new(r)?, n)?) };
        let fd = (v(rho + h)? - v(rho - h)?) / (2.0 * h);
        let area = geodesic_sphere_area(GeodesicRadius::new(rho)?, n)?;
        margins.push(Margin::exact(fd - area, 1e-6 * area));
    }
    Ok(CheckReport::worst_of("area-derivative", &margins, true))
}

/// Sampled hyperbolic volume of `B_g(0, ρ)` against `sinh^{2n} ρ`, and the
/// relative standard error against `1e-3`.
pub fn volume_checks(n: usize, rho: f64, cfg: &McConfig) -> Result<Vec<Item>> {
    let r = rho.tanh();
    let ind = FnField::new(n, move |z: &[Complex64]| {
        let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        if s.sqrt() < r {
            1.0
        } else {
            0.0
        }
    })
    .with_support((r * (1.0 + 1e-9)).min(1.0));
    let est = integrate_ball_hyperbolic(&ind, cfg)?;
    let exact = geodesic_ball_volume(GeodesicRadius::new(rho)?, n)?;
    let rel = est.stderr / est.value;
    let value = CheckReport::equality("volume", Margin::new(est.value - exact, est.stderr, exact))
        .note(format!("estimate {:.12} ± {:.3e}, exact {exact:.12}", est.value, est.stderr));
    let precision = CheckReport::inequality("volume-precision", Margin::exact(1e-3 - rel, 0.0))
        .note(format!("relative standard error {rel:.3e}"));
    Ok(vec![
        (format!("geometry/volume[n={n},rho={rho}]"), Reading::Equality, value),
        (format!("geometry/volume-precision[n={n},rho={rho}]"), Reading::Inequality, precision),
    ])
}

/// Volume of the geodesic ball of radius `rho` about `c e_1`: the same
/// `sinh^{2n} ρ` by invariance, but with direction-dependent rays.
pub fn off_center_volume_check(n: usize, c: f64, rho: f64, cfg: &McConfig) -> Result<CheckReport> {
    let th2 = rho.tanh().powi(2);
    let field = FnField::new(n, move |z: &[Complex64]| {
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let inner = Complex64::new(1.0, 0.0) - z[0] * c;
        let phi2 = 1.0 - (1.0 - c * c) * (1.0 - s) / inner.norm_sqr();
        if phi2 < th2 {
            1.0
        } else {
            0.0
        }
    })
    .with_support((c.atanh() + rho).tanh());
    let est = integrate_ball_hyperbolic(&field, cfg)?;
    let exact = geodesic_ball_volume(GeodesicRadius::new(rho)?, n)?;
    Ok(CheckReport::equality("volume-off-center", Margin::new(est.value - exact, est.stderr, exact))
        .note(format!("estimate {:.10} ± {:.3e}, exact {exact:.10}", est.value, est.stderr)))
}

/// `Δ_g log u = -4nb` for `u = |f|^2 (1-|z|^2)^b`, `b ∈ {1, 2.5}`, at seeded
/// points with `|z| <= 0.9`; points with `|f| < 0.1` are skipped.
pub fn laplacian_log_check(n: usize, seed: u64, polys: usize, points: usize) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    let mut used = 0usize;
    for i in 0..polys {
        let f = random_poly(3, n, seed, i as u64);
        let (a, b) = (2.0, if i % 2 == 0 { 1.0 } else { 2.5 });
        let ff = f.clone();
        let log_u = FnField::new(n, move |z: &[Complex64]| {
            let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            let fz = ff.evaluate(z).map(|v| v.norm()).unwrap_or(f64::NAN);
            a * fz.ln() + b * (1.0 - s).ln()
        });
        for j in 0..points {
            let z = test_point(n, seed, (i * points + j) as u64, 0.9);
            if f.evaluate(&z)?.norm() < 0.1 {
                skipped += 1;
                continue;
            }
            let lap = invariant_laplacian(&log_u, &BallPoint::new(z)?)?;
            worst = worst.max((lap + 4.0 * n as f64 * b).abs());
            used += 1;
        }
    }
    Ok(CheckReport::equality("laplacian-log", Margin::exact(worst, 1e-4))
        .note(format!("max |Δ_g log u + 4nb| = {worst:.3e} over {used} points ({skipped} near zeros of f skipped)")))
}

const TEST_POINT_OFFSET: u64 = 1 << 32;

/// Seeded point with `|z| = r_max · U^{1/2n}` (uniform in the ball of that radius).
pub fn test_point(n: usize, seed: u64, index: u64, r_max: f64) -> Vec<Complex64> {
    let mut rng = CounterRng::at(seed, streams::TEST_POINTS, TEST_POINT_OFFSET + index, 4 * n as u64 + 2);
    let mut z: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let r = r_max * rng.uniform().powf(1.0 / (2.0 * n as f64));
    for c in &mut z {
        *c *= r / norm;
    }
    z
}

fn norms(ctx: &mut Ctx, n: usize) -> Result<()> {
    let cfg = ctx.mc(ctx.budget.norms)?;
    let seed = ctx.cfg.seed;
    let nf = n as f64;
    let (f, label, r, alphas) = if n == 1 {
        (Polynomial::coordinate(1, 0), "z", 2.0, vec![1.5, 2.0, 3.0])
    } else {
        let mut f = Polynomial::one(n);
        f.add_term(MultiIndex::unit(n, 0), Complex64::new(1.0, 0.0));
        (f, "1+z1", 1.0, vec![nf + 0.5, nf + 1.0, nf + 2.0])
    };
    let inputs = json!({ "f": poly_json(&f), "r": r, "alphas": alphas, "samples": cfg.sphere_samples });
    ctx.many(format!("norms/contraction-chain[n={n},f={label}]"), "contraction-chain", inputs, || {
        let rep = contraction_chain_check(&f, r, &alphas, &cfg)?;
        let exact: Vec<f64> = rep.entries.iter().filter_map(|e| e.exact).collect();
        let mut items = vec![(format!("norms/contraction-chain[n={n},f={label}]"), Reading::Inequality, rep.report.clone())];
        if exact.len() == rep.entries.len() {
            // strict decrease of the exact chain
            let steps: Vec<Margin> = exact.windows(2).map(|w| Margin::exact(w[0] - w[1] - 1e-12, 0.0)).collect();
            let oracle = CheckReport::worst_of("contraction-oracle", &steps, false)
                .note(format!("exact chain {exact:?}"));
            items.push((format!("norms/contraction-oracle[n={n},f={label}]"), Reading::Inequality, oracle));
            let agree: Vec<Margin> = rep
                .entries
                .iter()
                .zip(&exact)
                .map(|(e, x)| Margin::new(e.norm.value - x, e.norm.stderr, *x))
                .collect();
            let mc = CheckReport::worst_of("contraction-mc-vs-oracle", &agree, true);
            items.push((format!("norms/contraction-mc-vs-oracle[n={n},f={label}]"), Reading::Equality, mc));
        }
        Ok(items)
    });

    let polys = battery(n, seed, BATTERY_SIZE);
    let limit_alphas = [nf + 0.5, nf + 0.1, nf + 0.01];
    for (i, f) in polys.iter().enumerate() {
        let inputs = json!({ "f": poly_json(f), "r": 1.0, "alphas": limit_alphas, "samples": cfg.sphere_samples });
        ctx.one(format!("norms/hardy-limit[n={n},poly={i}]"), "hardy-limit", Reading::Inequality, inputs, || {
            Ok(hardy_limit_check(f, 1.0, &limit_alphas, &cfg)?.report)
        });
    }
    let one = Polynomial::one(n);
    ctx.one(
        format!("norms/hardy-limit-constant[n={n}]"),
        "hardy-limit",
        Reading::Equality,
        json!({ "f": poly_json(&one), "r": 1.0, "alphas": limit_alphas }),
        || {
            let rep = hardy_limit_check(&one, 1.0, &limit_alphas, &cfg)?;
            let gaps: Vec<Margin> = rep.gaps.iter().map(|&(g, se)| Margin::new(g, se, 1.0)).collect();
            Ok(CheckReport::worst_of("hardy-limit-constant", &gaps, true))
        },
    );

    let points: Vec<Vec<Complex64>> = (0..64).map(|j| test_point(n, seed, 1_000_000 + j, 0.99)).collect();
    for (i, f) in polys.iter().enumerate() {
        for params in [SpaceParams::hardy(n, 2.0)?, SpaceParams::bergman(n, 2.0, nf + 1.0)?] {
            let space = space_label(&params);
            let inputs = json!({ "f": poly_json(f), "space": space, "points": 64, "samples": cfg.sphere_samples });
            ctx.one(format!("norms/pointwise-bound[n={n},poly={i},{space}]"), "pointwise-bound", Reading::Inequality, inputs, || {
                Ok(pointwise_bound_check(f, &params, &points, &cfg)?)
            });
        }
        for params in [SpaceParams::hardy(n, 2.0)?, SpaceParams::bergman(n, 2.0, nf + 1.5)?] {
            let space = space_label(&params);
            let inputs = json!({ "f": poly_json(f), "space": space, "samples": cfg.sphere_samples });
            ctx.one(format!("norms/exact-vs-sampled[n={n},poly={i},{space}]"), "norm-oracle", Reading::Equality, inputs, || {
                let exact = exact_norm_pow(f, &params).ok_or_else(|| hyperlevel::Error::Parameter("no exact value".into()))?;
                let mc = norm_pow(f, &params, &cfg)?;
                // four standard errors for this comparison
                Ok(CheckReport::equality("exact-vs-sampled", Margin::new(mc.value - exact, mc.stderr * 4.0 / 3.0, exact))
                    .note(format!("sampled {:.10} ± {:.2e}, exact {exact:.10}", mc.value, mc.stderr)))
            });
        }
    }

    let alphas: Vec<f64> = (1..=100).map(|k| nf + 0.1 * k as f64).collect();
    ctx.one(format!("norms/k-alpha-identity[n={n}]"), "layer-cake-constant", Reading::Equality, json!({ "n": n, "alphas": alphas }), || {
        let mut margins = Vec::new();
        for &a in &alphas {
            let k = layer_cake_constant(n, a)?;
            let c = a * bergman_constant(n, a)?;
            margins.push(Margin::exact(k - c, 1e-12 * c.abs()));
        }
        Ok(CheckReport::worst_of("k-alpha-identity", &margins, true))
    });
    Ok(())
}

fn space_label(p: &SpaceParams) -> String {
    match p.space {
        hyperlevel::norms::Space::Hardy { p } => format!("hardy(p={p})"),
        hyperlevel::norms::Space::Bergman { p, alpha } => format!("bergman(p={p},alpha={alpha})"),
    }
}

fn superlevel(ctx: &mut Ctx, n: usize) -> Result<()> {
    let cfg = ctx.mc(ctx.budget.distribution)?;
    let seed = ctx.cfg.seed;
    let nf = n as f64;
    let samples = cfg.sphere_samples;
    let polys = battery(n, seed, BATTERY_SIZE);

    for (i, f) in polys.iter().enumerate() {
        for r in [1.0, 2.0] {
            let base = format!("superlevel/weak-type[n={n},poly={i},r={r}]");
            let inputs = json!({ "f": poly_json(f), "r": r, "grid": 64, "samples": samples });
            let mut csv = None;
            ctx.many(base, "weak-type", inputs, || {
                let w = weak_type_check(f, r, &[], &cfg)?;
                let u = LevelFunction::hardy(f.scale(Complex64::new(w.scale, 0.0)), r)?;
                let mono = monotonicity_check(&u, &w.mu);
                let diff = differential_inequality_check(1.0, &w.mu)?;
                if i == 0 {
                    let c = curves_of(w.mu.clone(), 1.0);
                    csv = Some((distribution_csv(&c), rearrangement_csv(&c.ustar)));
                }
                Ok(vec![
                    (format!("superlevel/weak-type[n={n},poly={i},r={r}]"), Reading::Inequality, w.report),
                    (format!("superlevel/monotonicity[n={n},poly={i},r={r}]"), Reading::Inequality, mono),
                    (format!("superlevel/differential-inequality[n={n},poly={i},r={r}]"), Reading::Inequality, diff),
                ])
            });
            if let Some((d, s)) = csv {
                ctx.curve(format!("superlevel_n{n}_poly0_r{r}_distribution.csv"), d);
                ctx.curve(format!("superlevel_n{n}_poly0_r{r}_rearrangement.csv"), s);
            }
        }
        let inputs = json!({ "f": poly_json(f), "a": 2.0, "b": 2.5, "grid": 64, "samples": samples });
        ctx.one(format!("superlevel/monotonicity[n={n},poly={i},a=2,b=2.5]"), "monotonicity", Reading::Inequality, inputs, || {
            let u = LevelFunction::new(f.clone(), 2.0, 2.5)?;
            let mu = distribution_function(&u, &[], &cfg)?;
            Ok(monotonicity_check(&u, &mu))
        });
    }

    let one = Polynomial::one(n);
    for r in [1.0, 2.0] {
        let inputs = json!({ "f": poly_json(&one), "r": r, "grid": 64, "samples": samples });
        let mut csv = None;
        ctx.many(format!("superlevel/weak-type-equality[n={n},r={r}]"), "weak-type", inputs, || {
            let w = weak_type_check(&one, r, &[], &cfg)?;
            let g = w.mu.monotone_functional(1.0);
            let flat: Vec<Margin> = g.g.iter().zip(&g.g_stderr).map(|(v, se)| Margin::new(v - 1.0, *se, 1.0)).collect();
            let c = curves_of(w.mu.clone(), 1.0);
            csv = Some((distribution_csv(&c), rearrangement_csv(&c.ustar)));
            Ok(vec![
                (
                    format!("superlevel/weak-type-equality[n={n},r={r}]"),
                    Reading::Equality,
                    CheckReport::worst_of("weak-type-equality", &w.margins, true),
                ),
                (format!("superlevel/g-constant[n={n},r={r}]"), Reading::Equality, CheckReport::worst_of("g-constant", &flat, true)),
            ])
        });
        if let Some((d, s)) = csv {
            ctx.curve(format!("superlevel_n{n}_one_r{r}_distribution.csv"), d);
            ctx.curve(format!("superlevel_n{n}_one_r{r}_rearrangement.csv"), s);
        }
    }

    if n == 1 {
        let z = Polynomial::coordinate(1, 0);
        let inputs = json!({ "f": poly_json(&z), "a": 2.0, "b": 1.0, "grid": 64, "samples": samples });
        ctx.one("superlevel/annulus-oracle[n=1]".into(), "distribution-oracle", Reading::Equality, inputs, || {
            let u = LevelFunction::hardy(z.clone(), 2.0)?;
            let mu = distribution_function(&u, &[], &cfg)?;
            let margins: Vec<Margin> = mu
                .t_grid
                .iter()
                .zip(mu.mu.iter().zip(&mu.mu_stderr))
                .map(|(&t, (&m, &se))| {
                    let exact = coordinate_annulus_measure(t);
                    Margin::new(m - exact, se, exact).with_discretization(1e-9 * exact)
                })
                .collect();
            Ok(CheckReport::worst_of("annulus-oracle", &margins, true))
        });
        let inputs = json!({ "f": poly_json(&z), "r": 2.0, "grid": [0.05, 0.1, 0.15, 0.2], "samples": samples });
        ctx.one("superlevel/weak-type-strict[n=1,f=z]".into(), "weak-type", Reading::Inequality, inputs, || {
            let w = weak_type_check(&z, 2.0, &[0.05, 0.1, 0.15, 0.2], &cfg)?;
            // strictly positive margins: subtract the tolerance before comparing
            let strict: Vec<Margin> = w.margins.iter().map(|m| Margin::exact(m.value - m.tolerance(), 0.0)).collect();
            Ok(CheckReport::worst_of("weak-type-strict", &strict, false))
        });
    }

    let lc_alpha = nf + 1.0;
    for (i, f) in polys.iter().enumerate() {
        let inputs = json!({ "f": poly_json(f), "r": 1.0, "alpha": lc_alpha, "samples": samples });
        ctx.one(format!("superlevel/layer-cake[n={n},poly={i}]"), "layer-cake", Reading::Equality, inputs, || {
            Ok(layer_cake_cross_check(f, 1.0, lc_alpha, &cfg)?)
        });
    }
    if n == 1 {
        let z = Polynomial::coordinate(1, 0);
        let inputs = json!({ "f": poly_json(&z), "r": 2.0, "alpha": 2.0, "samples": samples });
        ctx.one("superlevel/layer-cake[n=1,f=z]".into(), "layer-cake", Reading::Equality, inputs, || {
            Ok(layer_cake_cross_check(&z, 2.0, 2.0, &cfg)?)
        });
    } else {
        let mut f = Polynomial::one(n);
        f.add_term(MultiIndex::unit(n, 0), Complex64::new(1.0, 0.0));
        let inputs = json!({ "f": poly_json(&f), "r": 1.0, "alpha": nf + 1.0, "samples": samples });
        ctx.one(format!("superlevel/layer-cake[n={n},f=1+z1]"), "layer-cake", Reading::Equality, inputs, || {
            Ok(layer_cake_cross_check(&f, 1.0, nf + 1.0, &cfg)?)
        });
    }
    for alpha in [nf + 0.5, nf + 1.0, nf + 2.5] {
        ctx.one(
            format!("superlevel/normalization-identity[n={n},alpha={alpha}]"),
            "layer-cake-constant",
            Reading::Equality,
            json!({ "n": n, "alpha": alpha }),
            || Ok(normalization_identity_check(n, alpha)?),
        );
    }

    let mut extremal: Vec<(String, GFunction, Polynomial, ExtremalSpace)> = Vec::new();
    for (i, f) in polys.iter().take(2).enumerate() {
        extremal.push((format!("poly={i},G=t^{}", n + 1), GFunction::Power { s: nf + 1.0 }, f.clone(), ExtremalSpace::Hardy { r: 2.0 }));
    }
    extremal.push((
        "poly=0,G=pl".into(),
        GFunction::PiecewiseLinear { knots: vec![(0.05, 0.0), (0.2, 1.0), (0.5, 1.5)] },
        polys[0].clone(),
        ExtremalSpace::Hardy { r: 2.0 },
    ));
    extremal.push((
        "poly=0,G=t^2,bergman".into(),
        GFunction::Power { s: 2.0 },
        polys[0].clone(),
        ExtremalSpace::Bergman { p: 2.0, alpha: nf + 1.0 },
    ));
    if n == 1 {
        extremal.push(("f=z,G=hinge".into(), GFunction::Hinge { c: 0.5 }, Polynomial::coordinate(1, 0), ExtremalSpace::Hardy { r: 2.0 }));
    }
    for (label, g, f, space) in extremal {
        let inputs = json!({ "f": poly_json(&f), "G": g, "space": space, "samples": samples });
        ctx.one(format!("superlevel/extremal[n={n},{label}]"), "extremal-functional", Reading::Inequality, inputs, || {
            Ok(extremal_functional_check(&g, &f, space, &cfg)?.report)
        });
    }
    Ok(())
}

/// Level functions `(|f|^2 (1-|z|^2) - 0.05 max)_+` for the rearrangement and
/// Sobolev batteries.
pub fn truncated_battery(n: usize, seed: u64, count: usize) -> Result<Vec<TruncatedField<LevelFunction>>> {
    (0..count as u64)
        .map(|i| {
            let w = LevelFunction::new(random_poly(3, n, seed, i), 2.0, 1.0)?;
            Ok(TruncatedField::of_level(w, 0.05, seed)?)
        })
        .collect()
}

fn rearrange(ctx: &mut Ctx, n: usize) -> Result<()> {
    let cfg = ctx.mc(ctx.budget.rearrange)?;
    let seed = ctx.cfg.seed;
    let samples = cfg.sphere_samples;
    let dims = ctx.cfg.n_list.len();
    let count = REARRANGEMENT_BATTERY.div_ceil(dims);
    let fields = truncated_battery(n, seed, count)?;
    let ps = [1.5, 2.0, 3.0];
    for (i, u) in fields.iter().enumerate() {
        let inputs = json!({ "f": poly_json(u.inner().poly()), "cut": u.cut(), "ps": ps, "samples": samples });
        ctx.many(format!("rearrange/polya-szego[n={n},poly={i}]"), "polya-szego", inputs, || {
            Ok(polya_szego_checks(u, u.peak(), &ps, &cfg)?
                .into_iter()
                .map(|r| (format!("rearrange/polya-szego[n={n},poly={i},p={}]", r.p), Reading::Inequality, r.inequality()))
                .collect())
        });
    }
    for (i, u) in fields.iter().take(2).enumerate() {
        let inputs = json!({ "f": poly_json(u.inner().poly()), "cut": u.cut(), "qs": ["1", "2", "4", "inf"], "samples": samples });
        let mut csv = None;
        ctx.many(format!("rearrange/preservation[n={n},poly={i}]"), "rearrangement-preservation", inputs, || {
            let mut items: Vec<Item> = preservation_check(u, u.peak(), &[1.0, 2.0, 4.0, f64::INFINITY], &cfg)?
                .into_iter()
                .map(|r| {
                    // the sup norm is an inequality: the sampled maximum cannot exceed t0
                    let reading = if r.id.starts_with("linf") { Reading::Inequality } else { Reading::Equality };
                    (format!("rearrange/{}[n={n},poly={i}]", r.id), reading, r)
                })
                .collect();
            let sample = SampledDistribution::compute(u, u.peak(), REARRANGEMENT_GRID, &cfg)?;
            let eq = equimeasurability_check(&sample, &cfg)?;
            items.push((format!("rearrange/equimeasurability[n={n},poly={i}]"), Reading::Equality, eq));
            if i == 0 {
                csv = Some(rearrangement_csv(&sample.rearrangement()));
            }
            Ok(items)
        });
        if let Some(c) = csv {
            ctx.curve(format!("rearrange_n{n}_poly0_rearrangement.csv"), c);
        }
    }
    if n == 2 {
        let w = LevelFunction::new(Polynomial::coordinate(2, 0), 2.0, 1.0)?;
        let (t0, _) = w.maximum(seed);
        let u = TruncatedField::new(w, 0.1, t0)?;
        let inputs = json!({ "f": poly_json(u.inner().poly()), "cut": 0.1, "qs": [2.0], "samples": samples });
        ctx.many("rearrange/preservation[n=2,f=z1]".into(), "rearrangement-preservation", inputs, || {
            Ok(preservation_check(&u, u.peak(), &[2.0], &cfg)?
                .into_iter()
                .map(|r| (format!("rearrange/{}[n=2,f=z1]", r.id), Reading::Equality, r))
                .collect())
        });
        let mut f = Polynomial::coordinate(2, 0);
        f.add_term(MultiIndex::zero(2), Complex64::new(0.5, 0.0));
        let u = TruncatedField::of_level(LevelFunction::new(f, 2.0, 1.0)?, 0.05, seed)?;
        let inputs = json!({ "f": poly_json(u.inner().poly()), "cut": u.cut(), "p": 2.0, "samples": samples });
        ctx.one("rearrange/polya-szego[n=2,f=z1+0.5,p=2]".into(), "polya-szego", Reading::Inequality, inputs, || {
            Ok(polya_szego_check(&u, u.peak(), 2.0, &cfg)?.inequality())
        });
    }

    let radial = LevelFunction::new(Polynomial::one(n), 2.0, 1.0)?;
    let radii: Vec<f64> = (0..10).map(|k| 0.1 + 0.2 * k as f64).collect();
    ctx.one(format!("rearrange/fixed-point[n={n}]"), "rearrangement-fixed-point", Reading::Equality, json!({ "n": n, "radii": radii }), || {
        Ok(fixed_point_check(&radial, 1.0, &radii, &cfg)?)
    });
    let truncated = TruncatedField::new(radial.clone(), 0.2, 1.0)?;
    ctx.one(format!("rearrange/polya-szego-equality[n={n},p=2]"), "polya-szego", Reading::Equality, json!({ "n": n, "cut": 0.2, "p": 2.0, "samples": samples }), || {
        Ok(polya_szego_check(&truncated, truncated.peak(), 2.0, &cfg)?.equality())
    });

    let mut profiles = vec![RadialProfile::Ramp { n, s0: 1.0, s1: 3.0 }];
    profiles.push(match n {
        1 => RadialProfile::Inverse { n, s_max: None },
        _ => RadialProfile::Inverse { n, s_max: Some(1e4) },
    });
    for profile in profiles {
        let label = match profile {
            RadialProfile::Ramp { .. } => "ramp",
            RadialProfile::Inverse { .. } => "inverse",
        };
        let inputs = json!({ "profile": profile, "p": 2.0 });
        ctx.many(format!("rearrange/radial-identity[n={n},{label}]"), "radial-gradient-identity", inputs, || {
            Ok(radial_gradient_identities_check(profile, 2.0)?
                .checks()
                .into_iter()
                .map(|r| (format!("rearrange/{}[n={n},{label}]", r.id), Reading::Equality, r))
                .collect())
        });
    }
    Ok(())
}

/// `(regime, p)` pairs exercised in dimension `n`.
pub fn sobolev_cases(n: usize) -> Vec<(SobolevRegime, f64)> {
    let two_n = 2.0 * n as f64;
    [
        (SobolevRegime::I, 1.0),
        (SobolevRegime::II, 1.5),
        (SobolevRegime::III, 2.0),
        (SobolevRegime::III, 3.0),
        (SobolevRegime::IV, two_n + 2.0),
    ]
    .into_iter()
    .filter(|(r, p)| r.admits(n, *p))
    .collect()
}

pub const SOBOLEV_BATTERY: usize = 3;

fn inequalities(ctx: &mut Ctx, n: usize, first: bool) -> Result<()> {
    let fields = truncated_battery(n, ctx.cfg.seed, SOBOLEV_BATTERY)?;
    for (regime, p) in sobolev_cases(n) {
        sobolev_block(ctx, n, regime, p, &fields)?;
    }
    if n == 1 {
        let cfg = ctx.mc(ctx.budget.rearrange)?;
        let w = LevelFunction::new(Polynomial::one(1), 2.0, 1.0)?;
        let u = TruncatedField::new(w, 0.2, 1.0)?;
        let inputs = json!({ "cut": 0.2, "samples": cfg.sphere_samples });
        ctx.one("inequalities/sobolev-I[n=1,p=1,f=1]".into(), "sobolev", Reading::Inequality, inputs, || {
            Ok(sobolev_check(&u, u.peak(), 1.0, SobolevRegime::I, &cfg)?.check)
        });
    }
    sobolev_constants(ctx, n);
    iso_model_block(ctx, n);
    kalaj_block(ctx, n, first)?;
    if first {
        hardy_block(ctx, 2.0);
        hardy_block(ctx, 3.0);
        let seed = ctx.cfg.seed;
        ctx.one("inequalities/sup-representation".into(), "sup-representation", Reading::Equality, json!({ "count": 200 }), || {
            Ok(sup_representation_check(seed, 200)?)
        });
    }
    Ok(())
}

fn sobolev_block(
    ctx: &mut Ctx,
    n: usize,
    regime: SobolevRegime,
    p: f64,
    fields: &[TruncatedField<LevelFunction>],
) -> Result<()> {
    let cfg = ctx.mc(ctx.budget.rearrange)?;
    for (i, u) in fields.iter().enumerate() {
        let inputs = json!({
            "f": poly_json(u.inner().poly()), "cut": u.cut(), "regime": regime, "p": p, "samples": cfg.sphere_samples
        });
        ctx.one(
            format!("inequalities/sobolev-{}[n={n},p={p},poly={i}]", regime.name()),
            "sobolev",
            Reading::Inequality,
            inputs,
            || Ok(sobolev_check(u, u.peak(), p, regime, &cfg)?.check),
        );
    }
    Ok(())
}

fn sobolev_constants(ctx: &mut Ctx, n: usize) {
    let nf = n as f64;
    ctx.one(format!("inequalities/sobolev-constant-limit[n={n}]"), "sobolev-constant", Reading::Equality, json!({ "n": n, "p": 1.0 + 1e-12 }), || {
        let s = sobolev_constant(2 * n, 1.0 + 1e-12)?;
        Ok(CheckReport::equality("sobolev-constant-limit", Margin::exact(s - 2.0 * nf, 1e-8 * 2.0 * nf)).note(format!("S = {s:.15}")))
    });
    for p in [2.0 * nf + 0.5, 2.0 * nf + 1.0, 2.0 * nf + 3.0] {
        ctx.one(format!("inequalities/ell-integral[n={n},p={p}]"), "ell-integral", Reading::Equality, json!({ "n": n, "p": p }), || {
            let closed = ell_integral_closed(n, p)?;
            let quad = ell_integral_quadrature(n, p)?;
            Ok(CheckReport::equality("ell-integral", Margin::exact(quad - closed, 1e-8 * closed)).note(format!("{quad:.15} vs {closed:.15}")))
        });
    }
}

fn iso_model_block(ctx: &mut Ctx, n: usize) {
    let rho_grid: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
    for (conv, label) in [(Convention::Normalized, "normalized"), (Convention::Lebesgue, "lebesgue")] {
        let inputs = json!({ "n": n, "radii": rho_grid, "convention": conv });
        ctx.one(format!("inequalities/isoperimetric-model[n={n},{label}]"), "isoperimetric-model", Reading::Inequality, inputs, || {
            Ok(isoperimetric_model_check(&rho_grid, n, conv)?)
        });
    }
}

fn iso_refined_block(ctx: &mut Ctx, n: usize) {
    let radii: Vec<f64> = (1..=50).map(|k| 0.1 * k as f64).collect();
    ctx.one(
        format!("geometry/isoperimetric-refined[n={n}]"),
        "geodesic-ball-equality",
        Reading::Equality,
        json!({ "n": n, "radii": radii }),
        || Ok(isoperimetric_refined_check(&radii, n)?),
    );
}

/// Dimension-specific instance always; the dimension-free ones when `all`.
fn kalaj_block(ctx: &mut Ctx, n: usize, all: bool) -> Result<()> {
    // Φ(t^{-1/α}) ~ t^{-n/α} near 0, integrable only for α > n
    let alpha = n as f64 + 1.0;
    let shifted = Phi::ShiftedPower { k: n as f64 };
    let g = SampledProfile::linear(1.0, 0.5)?;
    let inputs = json!({ "phi": shifted, "psi": Psi::Identity, "g": [1.0, 0.5], "alpha": alpha });
    ctx.one(format!("inequalities/kalaj[n={n},phi=(x-1)^n,psi=t]"), "rearrangement-lemma", Reading::Inequality, inputs, || {
        Ok(kalaj_lemma_check(shifted, Psi::Identity, &g, alpha)?.check)
    });
    if !all {
        return Ok(());
    }
    let one = Phi::ShiftedPower { k: 1.0 };
    let flat = SampledProfile::linear(1.0, 1.0)?;
    let inputs = json!({ "phi": one, "psi": Psi::Identity, "g": [1.0, 1.0], "alpha": 2.0 });
    ctx.one("inequalities/kalaj[g=1]".into(), "rearrangement-lemma", Reading::Equality, inputs, || {
        let r = kalaj_lemma_check(one, Psi::Identity, &flat, 2.0)?;
        Ok(CheckReport::equality("kalaj-flat", Margin::exact(r.lhs - r.rhs, 1e-8)))
    });
    let sq = Phi::Power { k: 2.0 };
    let psi = Psi::Power { k: 2.0 };
    let g = SampledProfile::linear(1.2, 0.8)?;
    let inputs = json!({ "phi": sq, "psi": psi, "g": [1.2, 0.8], "alpha": 3.0 });
    ctx.one("inequalities/kalaj[phi=x^2,psi=t^2]".into(), "rearrangement-lemma", Reading::Inequality, inputs, || {
        Ok(kalaj_lemma_check(sq, psi, &g, 3.0)?.check)
    });
    Ok(())
}

/// Probes at exponent `p` with weight `ε = p`, plus the sharpness probe.
fn hardy_block(ctx: &mut Ctx, p: f64) {
    let eps = p;
    let probes = [
        ("indicator", HardyProbe::Indicator { a: 0.0, b: 1.0 }),
        ("exponential", HardyProbe::Exponential { rate: 1.0 }),
        ("near-extremal", HardyProbe::near_extremal(p, eps, 1e-3)),
    ];
    for (label, probe) in probes {
        let inputs = json!({ "probe": probe, "p": p, "eps": eps });
        ctx.many(format!("inequalities/hardy-weighted[{label},p={p},eps={eps}]"), "weighted-hardy", inputs, || {
            let r = weighted_hardy_check(&probe, p, eps)?;
            let mut items = vec![(format!("inequalities/hardy-weighted[{label},p={p},eps={eps}]"), Reading::Inequality, r.check.clone())];
            if label == "near-extremal" {
                let ratio = r.ratio();
                let sharp = CheckReport::equality("hardy-sharpness", Margin::exact(ratio - 1.0, 0.05)).note(format!("rhs/lhs = {ratio:.6}"));
                items.push((format!("inequalities/hardy-sharpness[p={p},eps={eps}]"), Reading::Equality, sharp));
            }
            Ok(items)
        });
    }
}

/// Checks selected by `ineq --check`.
pub const INEQ_CHECKS: [&str; 9] = [
    "iso-model",
    "iso-refined",
    "sobolev-I",
    "sobolev-II",
    "sobolev-III",
    "sobolev-IV",
    "hardy-weighted",
    "kalaj",
    "sobolev-constants",
];

/// One family of inequality checks at `(n, p)`. Parameters outside the
/// family's range are configuration errors rather than failing records.
pub fn inequality_records(check: &str, n: usize, p: f64, cfg: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    if !(1..=crate::config::MAX_DIM).contains(&n) {
        return Err(HarnessError::Config(format!("dimension {n} outside 1..={}", crate::config::MAX_DIM)));
    }
    let mut ctx = Ctx { cfg, budget: cfg.budget(), run: SuiteRun::default() };
    match check {
        "iso-model" => iso_model_block(&mut ctx, n),
        "iso-refined" => iso_refined_block(&mut ctx, n),
        "hardy-weighted" => {
            if !(p > 1.0 && p.is_finite()) {
                return Err(HarnessError::Config(format!("hardy-weighted needs p > 1, got {p}")));
            }
            hardy_block(&mut ctx, p);
        }
        "kalaj" => kalaj_block(&mut ctx, n, true)?,
        "sobolev-constants" => sobolev_constants(&mut ctx, n),
        s if s.starts_with("sobolev-") => {
            let regime = SobolevRegime::by_name(s).map_err(|_| HarnessError::Config(format!("unknown check `{s}`")))?;
            regime.validate(n, p).map_err(|e| HarnessError::Config(e.to_string()))?;
            let fields = truncated_battery(n, cfg.seed, SOBOLEV_BATTERY)?;
            sobolev_block(&mut ctx, n, regime, p, &fields)?;
        }
        other => {
            return Err(HarnessError::Config(format!("unknown check `{other}`; expected one of {}", INEQ_CHECKS.join(", "))))
        }
    }
    let mut records = ctx.run.records;
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}
