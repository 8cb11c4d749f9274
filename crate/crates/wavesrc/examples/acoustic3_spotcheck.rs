//! 3D acoustic spot check: the weighted ensemble moment kappa^m E|u|^2
//! flattens at high frequency, and a single realization's band average
//! tracks the Riesz potential 1/|x-y|^2 of the strength in shape.
//!
//! Usage: acoustic3_spotcheck [seed]

use wavesrc::estimator::{
    band_average, covariance_moment, riesz_potential, FrequencySweep, Model,
};
use wavesrc::grid::Grid;
use wavesrc::randfield::{sample_field, FieldSpec, SmoothBump};

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

fn main() {
    let seed: i64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(1);
    let spec = FieldSpec {
        dim: 3,
        order_m: 3.0,
        strength: vec![SmoothBump {
            center: vec![0.0, 0.0, 0.0],
            radius: 0.38,
            amplitude: 1.0,
        }],
        grid: Grid::centered(3, &[0.0, 0.0, 0.0], 1.6, 32).unwrap(),
        components: 1,
    };
    let sweep = FrequencySweep::new(60.0, 0.25, spec.order_m).unwrap();
    let points: Vec<Vec<f64>> =
        (0..12).map(|i| vec![1.45 + 0.12 * i as f64, 0.0, 0.0]).collect();

    println!("kappa    kappa^3 E|u|^2 at the nearest receiver");
    let mut k = 30.0f64;
    while k <= 60.0 {
        let v = covariance_moment(&spec, k, &points[0], Model::Acoustic3, None).unwrap();
        println!("{k:>5}    {:.6e}", k.powi(3) * v);
        k += 10.0;
    }

    let sample = sample_field(&spec, seed).unwrap();
    let est: Vec<f64> = points
        .iter()
        .map(|x| band_average(&sample, &sweep, x, Model::Acoustic3, None).unwrap())
        .collect();
    let potential: Vec<f64> = points
        .iter()
        .map(|x| riesz_potential(&spec.strength, x, 2.0).unwrap())
        .collect();
    println!(
        "\nseed {seed}: correlation of the 12-point band-average profile with the potential: {:.5}",
        pearson(&est, &potential)
    );
}
