//! Forward-map properties: linearity, governing-equation residuals,
//! truncated-kernel accuracy, and receiver-geometry validation.

use wavesrc::forward::{
    acoustic_field, acoustic_field_trunc, dist_to_support, elastic_field, elastic_field_trunc,
    helmholtz_residual, resolution_ok, MeasurementSet,
};
use wavesrc::greens::ElasticParams;
use wavesrc::grid::Grid;
use wavesrc::randfield::{sample_field, sample_vector_field, FieldSpec, SmoothBump};

fn linfit(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn spec2(n: usize, components: usize) -> FieldSpec {
    FieldSpec {
        dim: 2,
        order_m: 2.0,
        strength: vec![SmoothBump {
            center: vec![0.0, 0.0],
            radius: 0.3,
            amplitude: 1.0,
        }],
        grid: Grid::centered(2, &[0.0, 0.0], 1.3, n).unwrap(),
        components,
    }
}

fn spec3(n: usize, components: usize) -> FieldSpec {
    FieldSpec {
        dim: 3,
        order_m: 3.0,
        strength: vec![SmoothBump {
            center: vec![0.0, 0.0, 0.0],
            radius: 0.3,
            amplitude: 1.0,
        }],
        grid: Grid::centered(3, &[0.0, 0.0, 0.0], 1.3, n).unwrap(),
        components,
    }
}

#[test]
fn field_is_linear_in_the_source() {
    let sample = sample_field(&spec2(32, 1), 5).unwrap();
    let mut doubled = sample.clone();
    for v in doubled.values[0].iter_mut() {
        *v *= 2.0;
    }
    let x = [1.1, 0.4];
    let u = acoustic_field(&sample, 7.0, &x).unwrap();
    let u2 = acoustic_field(&doubled, 7.0, &x).unwrap();
    assert!((u2 - 2.0 * u).norm() < 1e-14 * u.norm());
}

#[test]
fn zero_amplitude_radiates_nothing() {
    let mut spec = spec2(16, 1);
    spec.strength[0].amplitude = 0.0;
    let sample = sample_field(&spec, 1).unwrap();
    assert!(sample.active_nodes().is_empty());
    let u = acoustic_field(&sample, 5.0, &[2.0, 0.0]).unwrap();
    assert_eq!(u.norm(), 0.0);
}

#[test]
fn truncated_3d_is_exact() {
    let sample = sample_field(&spec3(12, 1), 2).unwrap();
    let x = [1.0, 0.2, -0.3];
    let u = acoustic_field(&sample, 9.0, &x).unwrap();
    let ut = acoustic_field_trunc(&sample, 9.0, &x, 2).unwrap();
    assert_eq!(u, ut);
}

#[test]
fn truncated_2d_error_decays_like_freq_power() {
    // the kernel gap scales like kappa^{-3} relative to the kernel
    // itself (N = 2 truncation); the field and its gap share the
    // source's own frequency decay, so compare RMS gap to RMS field
    // over a ring of receivers and a small frequency window
    let sample = sample_field(&spec2(64, 1), 4).unwrap();
    let mut pts = Vec::new();
    for kappa in [40.0f64, 80.0, 160.0] {
        let mut gap_ms = 0.0;
        let mut field_ms = 0.0;
        for ai in 0..12 {
            let th = ai as f64 * std::f64::consts::TAU / 12.0;
            let x = [1.2 * th.cos(), 1.2 * th.sin()];
            for ki in 0..5 {
                let k = kappa + 0.4 * ki as f64;
                let u = acoustic_field(&sample, k, &x).unwrap();
                let ut = acoustic_field_trunc(&sample, k, &x, 2).unwrap();
                let gap = (u - ut).norm();
                assert!(gap < 1e-4 * u.norm().max(1e-12), "kappa {k}: gap {gap}");
                gap_ms += gap * gap;
                field_ms += u.norm_sqr();
            }
        }
        pts.push((kappa.ln(), (gap_ms / field_ms).sqrt().ln()));
    }
    let slope = linfit(&pts);
    assert!(
        (slope + 3.0).abs() < 0.3,
        "relative truncation gap slope {slope}, want about -3"
    );
}

#[test]
fn acoustic_field_solves_helmholtz() {
    for (dim, x) in [(2usize, vec![1.1, 0.3]), (3, vec![0.9, 0.4, -0.5])] {
        let spec = if dim == 2 { spec2(32, 1) } else { spec3(16, 1) };
        let sample = sample_field(&spec, 6).unwrap();
        let kappa = 6.0;
        let res = helmholtz_residual(
            |p| acoustic_field(&sample, kappa, p),
            kappa,
            &x,
            1e-3,
            &spec.strength,
        )
        .unwrap();
        assert!(res < 1e-4, "dim {dim}: Helmholtz residual {res}");
    }
}

#[test]
fn helmholtz_stencil_rejected_near_support() {
    let spec = spec2(16, 1);
    let sample = sample_field(&spec, 1).unwrap();
    let err = helmholtz_residual(
        |p| acoustic_field(&sample, 5.0, p),
        5.0,
        &[0.3005, 0.0],
        1e-2,
        &spec.strength,
    );
    assert!(err.is_err());
}

#[test]
fn truncated_elastic_matches_exact_at_high_frequency() {
    let sample = sample_vector_field(&spec2(48, 2), 9).unwrap();
    let params = ElasticParams::new(150.0, 2.0, 1.0).unwrap();
    let x = [1.3, -0.2];
    let u = elastic_field(&sample, &params, &x).unwrap();
    let ut = elastic_field_trunc(&sample, &params, &x).unwrap();
    let norm: f64 = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let gap: f64 = u
        .iter()
        .zip(&ut)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(gap < 1e-5 * norm, "relative elastic truncation gap {}", gap / norm);
}

#[test]
fn evaluation_inside_support_rejected() {
    let sample = sample_field(&spec2(16, 1), 1).unwrap();
    assert!(acoustic_field(&sample, 5.0, &[0.1, 0.0]).is_err());
    assert!(acoustic_field(&sample, -1.0, &[2.0, 0.0]).is_err());
    let vsample = sample_vector_field(&spec2(16, 2), 1).unwrap();
    let params = ElasticParams::new(5.0, 2.0, 1.0).unwrap();
    assert!(elastic_field(&vsample, &params, &[0.0, 0.2]).is_err());
    // component mismatches
    assert!(acoustic_field(&vsample, 5.0, &[2.0, 0.0]).is_err());
    assert!(elastic_field(&sample, &params, &[2.0, 0.0]).is_err());
}

#[test]
fn measurement_geometry() {
    let bumps = vec![SmoothBump {
        center: vec![0.0, 0.0],
        radius: 0.5,
        amplitude: 1.0,
    }];
    assert!((dist_to_support(&bumps, &[2.0, 0.0]) - 1.5).abs() < 1e-15);
    assert!(MeasurementSet::new(vec![vec![2.0, 0.0]], &bumps, 1.0).is_ok());
    assert!(MeasurementSet::new(vec![vec![1.2, 0.0]], &bumps, 1.0).is_err());
    assert!(MeasurementSet::new(vec![vec![2.0, 0.0]], &bumps, 0.0).is_err());
}

#[test]
fn resolution_rule() {
    // six cells per wavelength
    assert!(resolution_ok(0.1, 10.0));
    assert!(!resolution_ok(0.2, 10.0));
}
