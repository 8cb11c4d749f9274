//! Small n-dimensional FFT helpers on top of rustfft's 1D transforms.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

/// Forward n-dimensional DFT of a row-major cube with `n` points per axis.
pub fn fftn(data: &mut [Complex64], dim: usize, n: usize) {
    transform(data, dim, n, false);
}

/// Inverse n-dimensional DFT including the 1/N^dim normalization.
pub fn ifftn(data: &mut [Complex64], dim: usize, n: usize) {
    transform(data, dim, n, true);
    let scale = 1.0 / (n.pow(dim as u32) as f64);
    for v in data.iter_mut() {
        *v *= scale;
    }
}

fn transform(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    assert_eq!(data.len(), n.pow(dim as u32));
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn rustfft::Fft<f64>> = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let total = data.len();
    // axis a has stride n^(dim-1-a) in row-major layout
    for a in 0..dim {
        let stride = n.pow((dim - 1 - a) as u32);
        let block = stride * n;
        let mut base = 0;
        while base < total {
            for off in 0..stride {
                for i in 0..n {
                    line[i] = data[base + off + i * stride];
                }
                fft.process(&mut line);
                for i in 0..n {
                    data[base + off + i * stride] = line[i];
                }
            }
            base += block;
        }
    }
}
