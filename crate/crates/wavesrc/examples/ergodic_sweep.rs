//! Ergodicity of the frequency-band average, at full desk scale.
//!
//! Draws one realization of a 2D source with strength bump radius 2.5,
//! band-averages kappa^3 |u|^2 over kappa in [1, 150] at receivers along
//! a ray, and compares pointwise with the exact ensemble average and in
//! shape with the Riesz potential of the strength.
//!
//! Usage: ergodic_sweep [seed]

use wavesrc::estimator::{
    band_average, oracle_band_average, riesz_potential, FrequencySweep, Model,
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
        .unwrap_or(5);

    let spec = FieldSpec {
        dim: 2,
        order_m: 2.0,
        strength: vec![SmoothBump {
            center: vec![0.0, 0.0],
            radius: 2.5,
            amplitude: 1.0,
        }],
        grid: Grid::centered(2, &[0.0, 0.0], 5.3, 256).unwrap(),
        components: 1,
    };
    let sweep = FrequencySweep::new(150.0, 0.2, 3.0).unwrap();
    // receivers along one ray: radii 3.6, 4.0, ..., 9.6
    let points: Vec<Vec<f64>> = (0..16).map(|i| vec![3.6 + 0.4 * i as f64, 0.0]).collect();

    let t0 = std::time::Instant::now();
    let sample = sample_field(&spec, seed).unwrap();
    println!(
        "seed {seed}: {} active nodes, {} frequencies",
        sample.active_nodes().len(),
        sweep.freqs().len()
    );

    let mut estimates = Vec::new();
    for x in &points {
        estimates.push(band_average(&sample, &sweep, x, Model::Acoustic2, None).unwrap());
    }
    println!("band averages done in {:.1?}", t0.elapsed());

    let mut max_rel = 0.0f64;
    for (i, x) in points.iter().take(8).enumerate() {
        let oracle = oracle_band_average(&spec, &sweep, x, Model::Acoustic2, None).unwrap();
        let rel = (estimates[i] - oracle).abs() / oracle;
        max_rel = max_rel.max(rel);
        println!(
            "x = {:>4.1}: band avg {:.6e}  ensemble {:.6e}  rel err {:.4}",
            x[0], estimates[i], oracle, rel
        );
    }
    println!("max relative deviation over 8 points: {max_rel:.4}");

    let potential: Vec<f64> = points
        .iter()
        .map(|x| riesz_potential(&spec.strength, x, 1.0).unwrap())
        .collect();
    let corr = pearson(&estimates, &potential);
    println!("correlation with the Riesz potential over 16 points: {corr:.5}");
    println!("total {:.1?}", t0.elapsed());
}
