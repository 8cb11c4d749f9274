//! The truncation law of the Hankel asymptotic expansion: the optimally
//! truncated series H_{n,N} differs from H_n^(1) by O(t^{-(N+3/2)}).
//!
//! Prints the measured log-log slope of the gap for N = 0, 1, 2.

use wavesrc::specialfn::{hankel1, hankel1_trunc, HankelTruncation};

fn main() {
    for n_terms in 0..3usize {
        let trunc = HankelTruncation::new(0, n_terms).unwrap();
        let pts: Vec<(f64, f64)> = (0..60)
            .map(|i| {
                let t = 10.0 * (100.0f64).powf(i as f64 / 59.0);
                let gap = (hankel1(0, t).unwrap() - hankel1_trunc(&trunc, t).unwrap()).norm();
                (t.ln(), gap.ln())
            })
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        println!(
            "N = {n_terms}: measured slope {slope:.3}, predicted {:.1}",
            -(n_terms as f64 + 1.5)
        );
    }
}
