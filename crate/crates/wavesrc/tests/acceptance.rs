//! Acceptance gate: thirteen end-to-end criteria, one test each, each
//! printing a single PASS/FAIL line with the measured quantity.
//!
//! Criteria 2, 7 and 10 encode published expectations that the
//! measurements in this code base contradict; they are asserted at their
//! stated tolerances and fail honestly. The README documents the
//! analysis behind each discrepancy.

use std::process::Command;
use std::sync::OnceLock;
use wavesrc::estimator::{
    band_average, covariance_moment, frequency_decorrelation, oracle_band_average,
    riesz_potential, strength_constant, ConstantsMode, FrequencySweep, Model,
};
use wavesrc::forward::{acoustic_field, acoustic_field_trunc};
use wavesrc::grid::Grid;
use wavesrc::inversion::{assemble_kernel, lambda_sweep, laplacian_consistency, riesz_fixed};
use wavesrc::randfield::{discrete_covariance, sample_field, FieldSpec, SmoothBump};
use wavesrc::specialfn::{hankel1, hankel1_trunc, HankelTruncation};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:02} {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn linfit(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

fn single_bump(dim: usize, radius: f64) -> Vec<SmoothBump> {
    vec![SmoothBump {
        center: vec![0.0; dim],
        radius,
        amplitude: 1.0,
    }]
}

#[test]
fn criterion_01_hankel_truncation_law() {
    let mut worst: (f64, f64) = (0.0, 0.0);
    let mut all_pass = true;
    for n_terms in 0..3usize {
        let trunc = HankelTruncation::new(0, n_terms).unwrap();
        let pts: Vec<(f64, f64)> = (0..60)
            .map(|i| {
                let t = 10.0 * (100.0f64).powf(i as f64 / 59.0);
                let gap = (hankel1(0, t).unwrap() - hankel1_trunc(&trunc, t).unwrap()).norm();
                (t.ln(), gap.ln())
            })
            .collect();
        let slope = linfit(&pts);
        let target = -(n_terms as f64 + 1.5);
        if (slope - target).abs() > worst.0 {
            worst = ((slope - target).abs(), slope);
        }
        all_pass &= (slope - target).abs() <= 0.1;
    }
    report(
        1,
        all_pass,
        &format!("worst kernel-gap slope deviation {:.3} (slope {:.3})", worst.0, worst.1),
    );
    assert!(all_pass);
}

/// The stated expectation (slope -3.5 +- 0.15) reflects only the kernel
/// truncation law; the realized field gap additionally carries the
/// source's own spectral decay of roughly kappa^{-(m+1)/2 + 1/2}, so the
/// measured slope sits near -4.2 and this criterion fails as stated.
/// The kernel-level law itself is verified exactly by criterion 1.
#[test]
fn criterion_02_field_truncation_law() {
    let spec = FieldSpec {
        dim: 2,
        order_m: 2.0,
        strength: single_bump(2, 1.0),
        grid: Grid::centered(2, &[0.0, 0.0], 2.1, 64).unwrap(),
        components: 1,
    };
    let sample = sample_field(&spec, 1).unwrap();
    let x = [3.0, 0.0];
    let pts: Vec<(f64, f64)> = (0..40)
        .map(|i| {
            let k = 5.0 * (40.0f64).powf(i as f64 / 39.0);
            let u = acoustic_field(&sample, k, &x).unwrap();
            let ut = acoustic_field_trunc(&sample, k, &x, 2).unwrap();
            (k.ln(), (u - ut).norm().ln())
        })
        .collect();
    let slope = linfit(&pts);
    let pass = (slope + 3.5).abs() <= 0.15;
    report(
        2,
        pass,
        &format!("field truncation slope {slope:.3} vs stated -3.5 +- 0.15"),
    );
    assert!(pass, "measured slope {slope:.3}");
}

struct ErgodicRun {
    estimates: Vec<f64>,
    oracle8: Vec<f64>,
    potential: Vec<f64>,
}

/// Shared full-scale 2D ergodic run for criteria 3 and 4: one
/// realization (seed 5), 746 sweep frequencies, 16 ray receivers.
fn ergodic_run() -> &'static ErgodicRun {
    static RUN: OnceLock<ErgodicRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let spec = FieldSpec {
            dim: 2,
            order_m: 2.0,
            strength: single_bump(2, 2.5),
            grid: Grid::centered(2, &[0.0, 0.0], 5.3, 256).unwrap(),
            components: 1,
        };
        let sweep = FrequencySweep::new(150.0, 0.2, 3.0).unwrap();
        let points: Vec<Vec<f64>> = (0..16).map(|i| vec![3.6 + 0.4 * i as f64, 0.0]).collect();
        let sample = sample_field(&spec, 5).unwrap();
        let estimates: Vec<f64> = points
            .iter()
            .map(|x| band_average(&sample, &sweep, x, Model::Acoustic2, None).unwrap())
            .collect();
        let oracle8: Vec<f64> = points
            .iter()
            .take(8)
            .map(|x| oracle_band_average(&spec, &sweep, x, Model::Acoustic2, None).unwrap())
            .collect();
        let potential: Vec<f64> = points
            .iter()
            .map(|x| riesz_potential(&spec.strength, x, 1.0).unwrap())
            .collect();
        ErgodicRun {
            estimates,
            oracle8,
            potential,
        }
    })
}

#[test]
fn criterion_03_ergodicity_2d() {
    let run = ergodic_run();
    let max_rel = run
        .estimates
        .iter()
        .zip(&run.oracle8)
        .map(|(e, o)| (e - o).abs() / o)
        .fold(0.0f64, f64::max);
    let pass = max_rel <= 0.10;
    report(
        3,
        pass,
        &format!("max |band avg - ensemble|/ensemble over 8 points: {max_rel:.4}"),
    );
    assert!(pass, "max relative deviation {max_rel:.4}");
}

#[test]
fn criterion_04_profile_proportionality_2d() {
    let run = ergodic_run();
    let corr = pearson(&run.estimates, &run.potential);
    let pass = corr >= 0.98;
    report(
        4,
        pass,
        &format!("correlation with the Riesz potential over 16 points: {corr:.5}"),
    );
    assert!(pass, "correlation {corr:.5}");
}

#[test]
fn criterion_05_acoustic_3d_spot_check() {
    let spec = FieldSpec {
        dim: 3,
        order_m: 3.0,
        strength: single_bump(3, 0.38),
        grid: Grid::centered(3, &[0.0, 0.0, 0.0], 1.6, 32).unwrap(),
        components: 1,
    };
    let points: Vec<Vec<f64>> =
        (0..12).map(|i| vec![1.45 + 0.12 * i as f64, 0.0, 0.0]).collect();
    let mut vals = Vec::new();
    let mut k = 30.0f64;
    while k <= 60.0 {
        let v = covariance_moment(&spec, k, &points[0], Model::Acoustic3, None).unwrap();
        vals.push(k.powi(3) * v);
        k += 5.0;
    }
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    let spread = (hi - lo) / lo;

    let sweep = FrequencySweep::new(60.0, 0.25, 3.0).unwrap();
    let sample = sample_field(&spec, 1).unwrap();
    let est: Vec<f64> = points
        .iter()
        .map(|x| band_average(&sample, &sweep, x, Model::Acoustic3, None).unwrap())
        .collect();
    let potential: Vec<f64> = points
        .iter()
        .map(|x| riesz_potential(&spec.strength, x, 2.0).unwrap())
        .collect();
    let corr = pearson(&est, &potential);
    let pass = spread <= 0.15 && corr >= 0.95;
    report(
        5,
        pass,
        &format!("weighted-moment spread {spread:.3}, profile correlation {corr:.5}"),
    );
    assert!(pass, "spread {spread:.3}, corr {corr:.5}");
}

#[test]
fn criterion_06_elastic_2d_plateau() {
    let spec = FieldSpec {
        dim: 2,
        order_m: 2.0,
        strength: single_bump(2, 0.7),
        grid: Grid::centered(2, &[0.0, 0.0], 3.1, 128).unwrap(),
        components: 2,
    };
    let lame = (2.0, 1.0);
    let x0 = [2.0, 0.5];
    let mut vals = Vec::new();
    let mut w = 40.0f64;
    while w <= 120.0 {
        let v = covariance_moment(&spec, w, &x0, Model::Elastic2, Some(lame)).unwrap();
        vals.push(w.powi(3) * v);
        w += 10.0;
    }
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    let spread = (hi - lo) / lo;

    let points: Vec<Vec<f64>> = (0..8).map(|i| vec![1.8 + 0.35 * i as f64, 0.0]).collect();
    let profile: Vec<f64> = points
        .iter()
        .map(|x| {
            120.0f64.powi(3)
                * covariance_moment(&spec, 120.0, x, Model::Elastic2, Some(lame)).unwrap()
        })
        .collect();
    let potential: Vec<f64> = points
        .iter()
        .map(|x| riesz_potential(&spec.strength, x, 1.0).unwrap())
        .collect();
    let corr = pearson(&profile, &potential);
    let pass = spread <= 0.15 && corr >= 0.95;
    report(
        6,
        pass,
        &format!("weighted-moment spread {spread:.3}, profile correlation {corr:.5}"),
    );
    assert!(pass, "spread {spread:.3}, corr {corr:.5}");
}

/// The published closed form for the elastic 3D constant evaluates to
/// c_p^{4-m}/(128 pi^2); the constant actually produced by the exact
/// ensemble moment of this model is 8 (b_1 + b_3), roughly 40x larger
/// for lambda = 2, mu = 1. Asserted at the stated 25% tolerance, this
/// criterion fails honestly.
#[test]
fn criterion_07_elastic_3d_constant() {
    let spec = FieldSpec {
        dim: 3,
        order_m: 3.0,
        strength: single_bump(3, 0.34),
        grid: Grid::centered(3, &[0.0, 0.0, 0.0], 1.45, 24).unwrap(),
        components: 3,
    };
    let lame = (2.0, 1.0);
    let x = [1.5, 0.0, 0.0];
    let pot = riesz_potential(&spec.strength, &x, 2.0).unwrap();
    let mut fitted = 0.0;
    let spots = [30.0f64, 40.0, 50.0];
    for &w in &spots {
        let v = covariance_moment(&spec, w, &x, Model::Elastic3, Some(lame)).unwrap();
        fitted += w.powi(3) * v / pot;
    }
    fitted /= spots.len() as f64;
    let paper = strength_constant(Model::Elastic3, ConstantsMode::Paper, 3.0, Some(lame)).unwrap();
    let ratio = fitted / paper;
    let pass = (ratio - 1.0).abs() <= 0.25;
    report(
        7,
        pass,
        &format!("fitted C {fitted:.3e} vs published {paper:.3e} (ratio {ratio:.1})"),
    );
    assert!(pass, "fitted-to-published ratio {ratio:.1}");
}

#[test]
fn criterion_08_frequency_decorrelation() {
    let spec = FieldSpec {
        dim: 2,
        order_m: 2.0,
        strength: single_bump(2, 0.6),
        grid: Grid::centered(2, &[0.0, 0.0], 2.6, 128).unwrap(),
        components: 1,
    };
    let x = [2.2, 0.0];
    let est = frequency_decorrelation(&spec, &x, 40.0, 50.0, 500).unwrap();
    let denom = covariance_moment(&spec, 40.0, &x, Model::Acoustic2, None).unwrap();
    let ratio = est.conjugated.norm() / denom;
    let pass = ratio < 0.05;
    report(
        8,
        pass,
        &format!("|E u(40) conj(u(50))| / E|u(40)|^2 = {ratio:.4} over 500 seeds"),
    );
    assert!(pass, "cross-moment ratio {ratio:.4}");
}

#[test]
fn criterion_09_gaussian_fourth_moment() {
    let spec = FieldSpec {
        dim: 2,
        order_m: 2.0,
        strength: single_bump(2, 0.3),
        grid: Grid::centered(2, &[0.0, 0.0], 1.3, 16).unwrap(),
        components: 1,
    };
    let a = spec.grid.len() / 2 + spec.grid.n / 2;
    let b = a + 2;
    let var_a = discrete_covariance(&spec, a, a);
    let var_b = discrete_covariance(&spec, b, b);
    let cov = discrete_covariance(&spec, a, b);
    let target = 2.0 * cov * cov;

    let n_mc = 3000usize;
    let terms: Vec<f64> = (1..=n_mc as i64)
        .map(|seed| {
            let s = sample_field(&spec, seed).unwrap();
            let (x, y) = (s.values[0][a], s.values[0][b]);
            (x * x - var_a) * (y * y - var_b)
        })
        .collect();
    let lhs = terms.iter().sum::<f64>() / n_mc as f64;
    let var = terms.iter().map(|t| (t - lhs) * (t - lhs)).sum::<f64>() / (n_mc as f64 - 1.0);
    let se = (var / n_mc as f64).sqrt();
    let pass = (lhs - target).abs() <= 3.0 * se;
    report(
        9,
        pass,
        &format!("E[(X^2-v)(Y^2-v)] = {lhs:.4e} vs 2(EXY)^2 = {target:.4e} (3 SE {:.1e})", 3.0 * se),
    );
    assert!(pass, "deviation {:.3e} vs 3 SE {:.3e}", (lhs - target).abs(), 3.0 * se);
}

/// Ring-only data at a single radius spans a row space nearly orthogonal
/// to the radial structure of the bump: the projection of the truth onto
/// it already leaves a ~0.7 relative residual, so the stated 10% / 25%
/// bounds are unreachable for this geometry and the criterion fails
/// honestly at both noise levels.
#[test]
fn criterion_10_closed_loop_inversion() {
    use rand::{Rng, SeedableRng};
    let bumps = single_bump(2, 1.0);
    let grid = Grid::centered(2, &[0.0, 0.0], 2.05, 32).unwrap();
    let points: Vec<Vec<f64>> = (0..24)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / 24.0;
            vec![3.0 * th.cos(), 3.0 * th.sin()]
        })
        .collect();
    let op = assemble_kernel(&points, &grid, 1.0, 1.0).unwrap();
    let truth: Vec<f64> = (0..grid.len())
        .map(|i| bumps[0].eval(&grid.node(i)[..2]))
        .collect();
    let data: Vec<f64> = points
        .iter()
        .map(|p| riesz_fixed(&bumps, p, 1.0, 256))
        .collect();
    let lambdas: Vec<f64> = (0..21).map(|i| 10f64.powf(-6.0 + 0.25 * i as f64)).collect();

    let mut errors = Vec::new();
    for noise in [0.0f64, 0.01] {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(99);
        let noisy: Vec<f64> = data
            .iter()
            .map(|v| {
                let g: f64 = rng.sample(rand_distr::StandardNormal);
                v * (1.0 + noise * g)
            })
            .collect();
        let recs = lambda_sweep(&op, &noisy, &lambdas, true, Some(&truth)).unwrap();
        let best = recs
            .iter()
            .map(|r| r.truth_error.unwrap())
            .fold(f64::INFINITY, f64::min);
        errors.push(best);
    }
    let pass = errors[0] <= 0.10 && errors[1] <= 0.25;
    report(
        10,
        pass,
        &format!(
            "best relative L2 error: noiseless {:.3} (bound 0.10), 1% noise {:.3} (bound 0.25)",
            errors[0], errors[1]
        ),
    );
    assert!(pass, "noiseless {:.3}, noisy {:.3}", errors[0], errors[1]);
}

#[test]
fn criterion_11_laplacian_identity() {
    let bumps = single_bump(2, 1.0);
    let x = [3.0, 0.0];
    let d1 = laplacian_consistency(&bumps, &x, 1.0, 1, 1e-3).unwrap();
    let d2 = laplacian_consistency(&bumps, &x, 1.0, 2, 1e-2).unwrap();
    let pass = d1 <= 1e-3 && d2 <= 1e-3;
    report(
        11,
        pass,
        &format!("relative deviation (n,l)=(1,1): {d1:.2e}, (2,1): {d2:.2e}"),
    );
    assert!(pass, "(1,1) {d1:.2e}, (2,1) {d2:.2e}");
}

const CLI_CONFIG: &str = r#"
seed = 7
model = "acoustic2"
order_m = 2.0
grid_center = [0.0, 0.0]
grid_side = 1.3
grid_n = 32
measurement_points = [[1.4, 0.0], [0.0, 1.45]]

[[strength]]
center = [0.0, 0.0]
radius = 0.3
amplitude = 1.0

[sweep]
upper = 5.0
step = 0.25
"#;

fn cli_run(cfg: &std::path::Path, out: &std::path::Path, sub: &str) {
    let status = Command::new(env!("CARGO_BIN_EXE_wavesrc"))
        .args(["--config"])
        .arg(cfg)
        .args(["--out"])
        .arg(out)
        .arg(sub)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "{sub} failed");
}

fn run_dir(out: &std::path::Path) -> std::path::PathBuf {
    std::fs::read_dir(out).unwrap().next().unwrap().unwrap().path()
}

#[test]
fn criterion_12_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("experiment.toml");
    std::fs::write(&cfg, CLI_CONFIG).unwrap();
    for out in ["a", "b"] {
        let out = tmp.path().join(out);
        cli_run(&cfg, &out, "sample");
        cli_run(&cfg, &out, "sweep");
    }
    let da = run_dir(&tmp.path().join("a"));
    let db = run_dir(&tmp.path().join("b"));
    let mut pass = true;
    for f in ["sample/values.csv", "sample/header.json", "sweep/sweep.csv", "sweep/profile.json"] {
        pass &= std::fs::read(da.join(f)).unwrap() == std::fs::read(db.join(f)).unwrap();
    }
    report(12, pass, "sample and sweep outputs byte-identical across reruns");
    assert!(pass);
}

#[test]
fn criterion_13_constant_audit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("experiment.toml");
    std::fs::write(&cfg, CLI_CONFIG).unwrap();
    let out = tmp.path().join("out");
    cli_run(&cfg, &out, "sample");
    cli_run(&cfg, &out, "sweep");
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(run_dir(&out).join("sweep/summary.json")).unwrap(),
    )
    .unwrap();
    let audit = &summary["constant_audit"];
    let paper = audit["paper"].as_f64().unwrap();
    let empirical = audit["empirical"].as_f64().unwrap();
    let flagged = audit["sign_discrepancy"].as_bool().unwrap();
    let pass = flagged && paper < 0.0 && empirical > 0.0;
    report(
        13,
        pass,
        &format!("published C {paper:.3e}, fitted C {empirical:.3e}, sign discrepancy flagged: {flagged}"),
    );
    assert!(pass);
}
