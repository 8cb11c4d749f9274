//! The elastic high-frequency plateau: omega^{m+1} E|u|^2 flattens, and
//! its spatial profile is proportional to the Riesz potential of the
//! strength.
//!
//! Uses the exact ensemble second moment (no Monte Carlo), so the run is
//! deterministic and fast. The fitted proportionality constant is
//! compared with the closed form 4 a_3 built from the slownesses.

use wavesrc::estimator::{covariance_moment, elastic_constants, riesz_potential, Model};
use wavesrc::greens::ElasticParams;
use wavesrc::grid::Grid;
use wavesrc::randfield::{FieldSpec, SmoothBump};

fn main() {
    let spec = FieldSpec {
        dim: 2,
        order_m: 2.0,
        strength: vec![SmoothBump {
            center: vec![0.0, 0.0],
            radius: 0.7,
            amplitude: 1.0,
        }],
        grid: Grid::centered(2, &[0.0, 0.0], 3.1, 128).unwrap(),
        components: 2,
    };
    let lame = (2.0, 1.0);
    let x0 = [2.0, 0.5];

    println!("omega    omega^3 E|u|^2");
    let mut w = 40.0f64;
    while w <= 120.0 {
        let v = covariance_moment(&spec, w, &x0, Model::Elastic2, Some(lame)).unwrap();
        println!("{w:>5}    {:.6e}", w.powi(3) * v);
        w += 20.0;
    }

    let points: Vec<Vec<f64>> = (0..8).map(|i| vec![1.8 + 0.35 * i as f64, 0.0]).collect();
    let params = ElasticParams::new(1.0, lame.0, lame.1).unwrap();
    let (a3, _, _) = elastic_constants(&params, spec.order_m);
    println!("\nx       fitted C = omega^3 E|u|^2 / potential   (4 a_3 = {:.6e})", 4.0 * a3);
    for x in &points {
        let v = covariance_moment(&spec, 120.0, x, Model::Elastic2, Some(lame)).unwrap();
        let pot = riesz_potential(&spec.strength, x, 1.0).unwrap();
        println!("{:>4.2}    {:.6e}", x[0], 120.0f64.powi(3) * v / pot);
    }
}
