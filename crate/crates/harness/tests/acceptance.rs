//! Acceptance criteria. One full default run (seed 42, n = 1, 2, 2·10^5
//! samples) is shared by all criteria; a few criteria add direct checks.
//! Each test prints `criterion N: PASS|FAIL ...` on stderr.

use hyperlevel::exec::Execution;
use hyperlevel::geometry::{geodesic_ball_volume, geodesic_sphere_area, GeodesicRadius};
use hyperlevel::holo::Polynomial;
use hyperlevel::inequalities::isoperimetric_refined_check;
use hyperlevel::integrate::McConfig;
use hyperlevel::norms::contraction_chain_check;
use hyperlevel::superlevel::normalization_identity_check;
use hyperlevel_harness::{verify, Report, SuiteConfig, VerificationRecord};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

struct Run {
    report: Report,
    bytes: Vec<u8>,
    elapsed: Duration,
    code: u8,
    _dir: tempfile::TempDir,
}

fn full_config(dir: &std::path::Path, execution: Execution) -> SuiteConfig {
    SuiteConfig { output_dir: dir.to_path_buf(), execution, ..SuiteConfig::default() }
}

fn full_run() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let (report, code) = verify(&full_config(dir.path(), Execution::Parallel)).expect("suite runs");
        let elapsed = start.elapsed();
        let bytes = std::fs::read(dir.path().join("report.json")).unwrap();
        Run { report, bytes, elapsed, code, _dir: dir }
    })
}

fn matching(prefixes: &[&str]) -> Vec<&'static VerificationRecord> {
    full_run()
        .report
        .records
        .iter()
        .filter(|r| prefixes.iter().any(|p| r.id.starts_with(p)))
        .collect()
}

/// Every record under `prefixes` passes, and there are at least `min` of them.
fn all_pass(prefixes: &[&str], min: usize) -> (bool, String) {
    let rs = matching(prefixes);
    let failed: Vec<String> = rs
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} (margin {:?}, tol {:e}) {}", r.id, r.margin, r.tolerance, r.notes.join("; ")))
        .collect();
    let ok = rs.len() >= min && failed.is_empty();
    (ok, format!("{} records, {} failed {:?}", rs.len(), failed.len(), failed))
}

fn criterion(k: u32, what: &str, parts: &[(bool, String)]) {
    let ok = parts.iter().all(|p| p.0);
    let detail: Vec<&str> = parts.iter().map(|p| p.1.as_str()).collect();
    eprintln!("criterion {k}: {} {what} [{}]", if ok { "PASS" } else { "FAIL" }, detail.join(" | "));
    assert!(ok, "criterion {k} ({what}) failed: {detail:?}");
}

#[test]
fn criterion_01_geodesic_ball_equality() {
    let start = Instant::now();
    let radii: Vec<f64> = (1..=50).map(|k| 0.1 * k as f64).collect();
    let mut worst = 0.0f64;
    let mut checks = true;
    for n in 1..=3 {
        checks &= isoperimetric_refined_check(&radii, n).unwrap().pass;
        let nf = n as f64;
        for &rho in &radii {
            let r = GeodesicRadius::new(rho).unwrap();
            let per = geodesic_sphere_area(r, n).unwrap();
            let v = geodesic_ball_volume(r, n).unwrap();
            let rhs = 4.0 * nf * nf * (v.powf((2.0 * nf - 1.0) / nf) + v * v);
            worst = worst.max(((per * per - rhs) / (per * per)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    criterion(
        1,
        "per_g^2 = 4n^2(V^((2n-1)/n) + V^2), 50 radii, n = 1..3",
        &[
            (checks && worst < 1e-12, format!("max relative error {worst:.2e}")),
            (secs < 1.0, format!("{secs:.4} s")),
            all_pass(&["geometry/isoperimetric-refined["], 2),
        ],
    );
}

#[test]
fn criterion_02_volume_formula() {
    criterion(
        2,
        "sampled geodesic-ball volume = sinh^(2n) rho, stderr/value < 1e-3",
        &[all_pass(&["geometry/volume[n=1,", "geometry/volume[n=2,"], 10), all_pass(&["geometry/volume-precision["], 10)],
    );
}

#[test]
fn criterion_03_laplacian_identity() {
    criterion(3, "Delta_g log u = -4nb at 1000 points x 20 polynomials", &[all_pass(&["geometry/laplacian-log["], 2)]);
}

#[test]
fn criterion_04_weak_type_bound() {
    criterion(
        4,
        "weak-type bound on 20 unit-norm polynomials, equality for f = 1",
        &[all_pass(&["superlevel/weak-type[n="], 20), all_pass(&["superlevel/weak-type-equality["], 4)],
    );
}

#[test]
fn criterion_05_monotonicity() {
    let rs = matching(&["superlevel/monotonicity["]);
    let battery = rs.iter().filter(|r| r.id.contains(",r=")).count();
    criterion(
        5,
        "g(t) nonincreasing on the battery, g = 1 for f = 1",
        &[
            all_pass(&["superlevel/monotonicity["], 20),
            (battery >= 20, format!("{battery} battery records")),
            all_pass(&["superlevel/g-constant["], 4),
        ],
    );
}

#[test]
fn criterion_06_contraction_chain() {
    let cfg = McConfig::new(42, 2_000, 64).unwrap();
    let chain = contraction_chain_check(&Polynomial::coordinate(1, 0), 2.0, &[1.5, 2.0, 3.0], &cfg).unwrap();
    let exact: Vec<f64> = chain.entries.iter().map(|e| e.exact.expect("monomial norms are exact")).collect();
    let strict = exact.windows(2).all(|w| w[1] < w[0]) && (exact[0] - 1.0).abs() < 1e-14;
    criterion(
        6,
        "contraction chain for f = z: exact values strictly decrease below 1, sampled values agree",
        &[
            (strict, format!("exact chain {exact:?}")),
            all_pass(&["norms/contraction-chain[n=1,f=z]", "norms/contraction-oracle[n=1,f=z]"], 2),
            all_pass(&["norms/contraction-mc-vs-oracle[n=1,f=z]"], 1),
        ],
    );
}

#[test]
fn criterion_07_hardy_limit() {
    criterion(7, "Bergman-Hardy gap decreases as alpha -> n+", &[all_pass(&["norms/hardy-limit["], 10)]);
}

#[test]
fn criterion_08_layer_cake() {
    let direct: Vec<bool> = [(1, 1.01), (1, 2.0), (2, 2.5), (2, 4.0), (3, 3.5)]
        .into_iter()
        .map(|(n, a)| {
            let r = normalization_identity_check(n, a).unwrap();
            r.pass && r.margin.value.abs() <= 1e-10
        })
        .collect();
    criterion(
        8,
        "layer-cake norm matches the Bergman norm; k_alpha normalization to 1e-10",
        &[
            all_pass(&["superlevel/layer-cake["], 12),
            all_pass(&["superlevel/normalization-identity["], 6),
            (direct.iter().all(|&b| b), format!("direct identity checks {direct:?}")),
        ],
    );
}

#[test]
fn criterion_09_rearrangement() {
    let ps = matching(&["rearrange/polya-szego[n=1,poly=", "rearrange/polya-szego[n=2,poly="]);
    criterion(
        9,
        "equimeasurability, L^q preservation, fixed point, Polya-Szego on 15+ functions x 3 exponents",
        &[
            all_pass(&["rearrange/equimeasurability["], 4),
            all_pass(&["rearrange/lq-preservation["], 12),
            all_pass(&["rearrange/linf-preservation["], 4),
            all_pass(&["rearrange/fixed-point["], 2),
            all_pass(&["rearrange/polya-szego"], 45),
            (ps.len() >= 45, format!("{} battery records", ps.len())),
        ],
    );
}

#[test]
fn criterion_10_radial_identities() {
    let rs = matching(&["rearrange/"]);
    let radial: Vec<&&VerificationRecord> =
        rs.iter().filter(|r| r.id.ends_with(",inverse]") || r.id.ends_with(",ramp]")).collect();
    let failed: Vec<&str> = radial.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    let profiles = ["[n=1,inverse]", "[n=2,inverse]", "[n=1,ramp]", "[n=2,ramp]"]
        .iter()
        .all(|p| radial.iter().any(|r| r.id.ends_with(p)));
    criterion(
        10,
        "radial gradient identities by dual quadrature",
        &[(profiles && failed.is_empty() && radial.len() >= 8, format!("{} records, failed {failed:?}", radial.len()))],
    );
}

#[test]
fn criterion_11_sobolev() {
    let regimes = ["I", "II", "III", "IV"]
        .iter()
        .all(|r| !matching(&[&format!("inequalities/sobolev-{r}[")]).is_empty());
    criterion(
        11,
        "Sobolev parts I-IV, S(2n, p) -> 2n, ell integral closed form",
        &[
            all_pass(&["inequalities/sobolev-I[", "inequalities/sobolev-II[", "inequalities/sobolev-III[", "inequalities/sobolev-IV["], 15),
            (regimes, "all four regimes present".into()),
            all_pass(&["inequalities/sobolev-constant-limit["], 2),
            all_pass(&["inequalities/ell-integral["], 6),
        ],
    );
}

#[test]
fn criterion_12_kalaj_and_hardy() {
    criterion(
        12,
        "rearrangement lemma and weighted Hardy orderings, near-extremal probe within 5%",
        &[
            all_pass(&["inequalities/kalaj["], 4),
            all_pass(&["inequalities/hardy-weighted["], 6),
            all_pass(&["inequalities/hardy-sharpness["], 2),
        ],
    );
}

#[test]
fn criterion_13_determinism_and_runtime() {
    let first = full_run();
    let dir = tempfile::tempdir().unwrap();
    // the rerun is sequential: neither scheduling nor thread count may change a byte
    let (_, code) = verify(&full_config(dir.path(), Execution::Sequential)).expect("suite runs");
    let bytes = std::fs::read(dir.path().join("report.json")).unwrap();
    let secs = first.elapsed.as_secs_f64();
    criterion(
        13,
        "byte-identical rerun, full suite under 15 minutes",
        &[
            (bytes == first.bytes && code == first.code, format!("{} bytes, identical: {}", bytes.len(), bytes == first.bytes)),
            (secs < 900.0, format!("full suite {secs:.1} s")),
            (first.code == 0, format!("exit code {}", first.code)),
        ],
    );
}
