//! Fundamental solutions: Helmholtz in 2D/3D and the Navier system of
//! linearized elasticity, assembled from radial derivatives of the
//! scalar kernel.

use crate::error::{Error, Result};
use crate::grid::dist;
use crate::specialfn::hankel1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const MIN_SEPARATION: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AcousticParams {
    pub kappa: f64,
}

impl AcousticParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        Ok(AcousticParams { kappa })
    }
}

/// Lamé medium at angular frequency omega. Slownesses and wavenumbers of
/// the two body waves are derived at construction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ElasticParams {
    pub omega: f64,
    pub lambda: f64,
    pub mu: f64,
    pub c_p: f64,
    pub c_s: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
}

impl ElasticParams {
    pub fn new(omega: f64, lambda: f64, mu: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if !(mu > 0.0) || !(lambda + mu > 0.0) {
            return Err(Error::Domain(
                "Lamé parameters need mu > 0 and lambda + mu > 0".into(),
            ));
        }
        let c_p = (lambda + 2.0 * mu).powf(-0.5);
        let c_s = mu.powf(-0.5);
        Ok(ElasticParams {
            omega,
            lambda,
            mu,
            c_p,
            c_s,
            kappa_p: c_p * omega,
            kappa_s: c_s * omega,
        })
    }
}

fn separation(dim: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    let r = dist(&x[..dim], &y[..dim]);
    if r < MIN_SEPARATION {
        return Err(Error::Singularity);
    }
    Ok(r)
}

/// Outgoing Helmholtz fundamental solution.
/// 2D: (i/4) H_0^(1)(kappa r); 3D: e^{i kappa r} / (4 pi r).
pub fn phi(dim: usize, x: &[f64], y: &[f64], kappa: f64) -> Result<Complex64> {
    let r = separation(dim, x, y)?;
    phi_of_r(dim, r, kappa)
}

fn phi_of_r(dim: usize, r: f64, kappa: f64) -> Result<Complex64> {
    match dim {
        2 => Ok(Complex64::new(0.0, 0.25) * hankel1(0, kappa * r)?),
        3 => Ok(Complex64::cis(kappa * r) / (4.0 * std::f64::consts::PI * r)),
        _ => Err(Error::Domain(format!("dimension must be 2 or 3, got {dim}"))),
    }
}

/// First and second radial derivatives of Phi at radius r.
fn phi_radial(dim: usize, r: f64, kappa: f64) -> Result<(Complex64, Complex64)> {
    let t = kappa * r;
    match dim {
        2 => {
            let h0 = hankel1(0, t)?;
            let h1 = hankel1(1, t)?;
            let a = Complex64::new(0.0, -0.25) * kappa * h1;
            let b = Complex64::new(0.0, -0.25) * kappa * kappa * (h0 - h1 / t);
            Ok((a, b))
        }
        3 => {
            let p = phi_of_r(3, r, kappa)?;
            let q = Complex64::new(-1.0 / r, kappa);
            Ok((p * q, p * (q * q + 1.0 / (r * r))))
        }
        _ => Err(Error::Domain(format!("dimension must be 2 or 3, got {dim}"))),
    }
}

/// Hessian of Phi(|x-y|; kappa) in x, as a flat dim x dim matrix.
/// d_i d_j Phi = A (delta_ij - D_i D_j / r^2) / r + B D_i D_j / r^2
/// with A, B the first and second radial derivatives and D = x - y.
pub fn hess_phi(dim: usize, x: &[f64], y: &[f64], kappa: f64) -> Result<Vec<Complex64>> {
    let r = separation(dim, x, y)?;
    let (a, b) = phi_radial(dim, r, kappa)?;
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let dij = if i == j { 1.0 } else { 0.0 };
            let unit = (x[i] - y[i]) * (x[j] - y[j]) / (r * r);
            out[i * dim + j] = a * ((dij - unit) / r) + b * unit;
        }
    }
    Ok(out)
}

/// Hess Phi(kappa_s) - Hess Phi(kappa_p), the rotational-minus-
/// compressional Hessian difference entering the Navier tensor.
pub fn hess_phi_diff(
    dim: usize,
    x: &[f64],
    y: &[f64],
    params: &ElasticParams,
) -> Result<Vec<Complex64>> {
    let hs = hess_phi(dim, x, y, params.kappa_s)?;
    let hp = hess_phi(dim, x, y, params.kappa_p)?;
    Ok(hs.iter().zip(&hp).map(|(s, p)| s - p).collect())
}

/// Outgoing fundamental tensor of the Navier system:
/// G = (1/mu) Phi(kappa_s) I + (1/omega^2) (Hess Phi(kappa_s) - Hess Phi(kappa_p)),
/// returned as a flat dim x dim matrix.
pub fn navier_green(
    dim: usize,
    x: &[f64],
    y: &[f64],
    params: &ElasticParams,
) -> Result<Vec<Complex64>> {
    let r = separation(dim, x, y)?;
    let ps = phi_of_r(dim, r, params.kappa_s)?;
    let hd = hess_phi_diff(dim, x, y, params)?;
    let w2 = params.omega * params.omega;
    let mut out = hd;
    for v in out.iter_mut() {
        *v /= w2;
    }
    for i in 0..dim {
        out[i * dim + i] += ps / params.mu;
    }
    Ok(out)
}
