//! Radiated fields from a sampled source by midpoint quadrature over the
//! synthesis grid, in exact and asymptotically truncated forms.

use crate::error::{Error, Result};
use crate::grid::dist;
use crate::greens::{navier_green, phi, ElasticParams};
use crate::randfield::{FieldSample, SmoothBump};
use crate::specialfn::{hankel1_trunc, HankelTruncation};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Signed distance from x to the union of bump supports (positive
/// outside, nonpositive inside).
pub fn dist_to_support(bumps: &[SmoothBump], x: &[f64]) -> f64 {
    bumps
        .iter()
        .map(|b| dist(x, &b.center) - b.radius)
        .fold(f64::INFINITY, f64::min)
}

/// Receiver points kept at distance >= delta_star from supp phi.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub points: Vec<Vec<f64>>,
    pub delta_star: f64,
}

impl MeasurementSet {
    pub fn new(points: Vec<Vec<f64>>, strength: &[SmoothBump], delta_star: f64) -> Result<Self> {
        if !(delta_star > 0.0) {
            return Err(Error::Geometry("delta_star must be positive".into()));
        }
        for p in &points {
            let d = dist_to_support(strength, p);
            if d < delta_star {
                return Err(Error::Geometry(format!(
                    "measurement point at distance {d:.3} < delta_star {delta_star}"
                )));
            }
        }
        Ok(MeasurementSet { points, delta_star })
    }
}

fn check_outside(sample: &FieldSample, x: &[f64]) -> Result<()> {
    if dist_to_support(&sample.spec.strength, x) <= 0.0 {
        return Err(Error::Geometry(
            "field evaluation point inside the source support".into(),
        ));
    }
    Ok(())
}

/// True when the synthesis grid resolves the wavelength 2 pi / kappa
/// with at least six cells.
pub fn resolution_ok(h: f64, kappa: f64) -> bool {
    h <= 2.0 * std::f64::consts::PI / kappa / 6.0
}

/// u(x, kappa) = -sum_j Phi_d(x, y_j, kappa) f(y_j) h^d.
pub fn acoustic_field(sample: &FieldSample, kappa: f64, x: &[f64]) -> Result<Complex64> {
    if sample.spec.components != 1 {
        return Err(Error::Spec("acoustic_field needs a scalar sample".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    check_outside(sample, x)?;
    let d = sample.spec.dim;
    let vol = sample.spec.grid.cell_volume();
    let f = &sample.values[0];
    let mut u = Complex64::new(0.0, 0.0);
    for &j in sample.active_nodes() {
        let y = sample.spec.grid.node(j);
        u -= phi(d, x, &y[..d], kappa)? * f[j];
    }
    Ok(u * vol)
}

/// 2D variant with the kernel -(i/4) H_{0,N}^(1)(kappa |x-y|); in 3D the
/// exact exponential kernel is already elementary and returned unchanged.
pub fn acoustic_field_trunc(
    sample: &FieldSample,
    kappa: f64,
    x: &[f64],
    n_terms: usize,
) -> Result<Complex64> {
    if sample.spec.dim == 3 {
        return acoustic_field(sample, kappa, x);
    }
    if sample.spec.components != 1 {
        return Err(Error::Spec("acoustic_field_trunc needs a scalar sample".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    check_outside(sample, x)?;
    let trunc = HankelTruncation::new(0, n_terms)?;
    let vol = sample.spec.grid.cell_volume();
    let f = &sample.values[0];
    let mut u = Complex64::new(0.0, 0.0);
    for &j in sample.active_nodes() {
        let y = sample.spec.grid.node(j);
        let r = dist(x, &y[..2]);
        u -= Complex64::new(0.0, 0.25) * hankel1_trunc(&trunc, kappa * r)? * f[j];
    }
    Ok(u * vol)
}

/// u(x, omega) = -sum_j G(x, y_j, omega) f(y_j) h^d, componentwise.
pub fn elastic_field(
    sample: &FieldSample,
    params: &ElasticParams,
    x: &[f64],
) -> Result<Vec<Complex64>> {
    let d = sample.spec.dim;
    if sample.spec.components != d {
        return Err(Error::Spec("elastic_field needs a d-component sample".into()));
    }
    check_outside(sample, x)?;
    let vol = sample.spec.grid.cell_volume();
    let mut u = vec![Complex64::new(0.0, 0.0); d];
    for &j in sample.active_nodes() {
        let y = sample.spec.grid.node(j);
        let g = navier_green(d, x, &y[..d], params)?;
        for i in 0..d {
            for c in 0..d {
                u[i] -= g[i * d + c] * sample.values[c][j];
            }
        }
    }
    for v in u.iter_mut() {
        *v *= vol;
    }
    Ok(u)
}

/// 2D truncated elastic field built from the truncated expansions
/// H_{0,2}, H_{1,3}, H_{2,4} of the kernel pieces; the 3D kernel has no
/// asymptotic truncation (it is already elementary).
pub fn elastic_field_trunc(
    sample: &FieldSample,
    params: &ElasticParams,
    x: &[f64],
) -> Result<Vec<Complex64>> {
    if sample.spec.dim != 2 {
        return Err(Error::Spec(
            "elastic_field_trunc is defined in 2D only".into(),
        ));
    }
    if sample.spec.components != 2 {
        return Err(Error::Spec("elastic_field_trunc needs a 2-component sample".into()));
    }
    check_outside(sample, x)?;
    let h02 = HankelTruncation::new(0, 2)?;
    let h13 = HankelTruncation::new(1, 3)?;
    let h24 = HankelTruncation::new(2, 4)?;
    let (ks, kp) = (params.kappa_s, params.kappa_p);
    let w2 = params.omega * params.omega;
    let quarter_i = Complex64::new(0.0, 0.25);
    let vol = sample.spec.grid.cell_volume();
    let mut u = vec![Complex64::new(0.0, 0.0); 2];
    for &j in sample.active_nodes() {
        let y = sample.spec.grid.node(j);
        let dx = [x[0] - y[0], x[1] - y[1]];
        let r = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
        // diagonal part: (i/4mu) H_{0,2}(ks r)
        //   + (i/4w^2) [-ks H_{1,3}(ks r) + kp H_{1,3}(kp r)] / r
        let diag = quarter_i / params.mu * hankel1_trunc(&h02, ks * r)?
            + quarter_i / w2
                * (-ks * hankel1_trunc(&h13, ks * r)? + kp * hankel1_trunc(&h13, kp * r)?)
                / r;
        // directional part: (i/4w^2) [ks^2 H_{2,4}(ks r) - kp^2 H_{2,4}(kp r)]
        //   * (x_i - y_i)(x_c - y_c) / r^2
        let s2 = quarter_i / w2
            * (ks * ks * hankel1_trunc(&h24, ks * r)? - kp * kp * hankel1_trunc(&h24, kp * r)?);
        for i in 0..2 {
            for c in 0..2 {
                let mut g = s2 * (dx[i] * dx[c] / (r * r));
                if i == c {
                    g += diag;
                }
                u[i] -= g * sample.values[c][j];
            }
        }
    }
    for v in u.iter_mut() {
        *v *= vol;
    }
    Ok(u)
}

/// Relative Helmholtz defect |Delta_h u + kappa^2 u| / (kappa^2 |u|) of
/// an arbitrary field function, via a central difference Laplacian.
/// `support` (may be empty) is checked against the stencil ball.
pub fn helmholtz_residual<F>(
    field_fn: F,
    kappa: f64,
    x: &[f64],
    stencil_h: f64,
    support: &[SmoothBump],
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    if !(stencil_h > 0.0) {
        return Err(Error::Domain("stencil_h must be positive".into()));
    }
    if !support.is_empty() && dist_to_support(support, x) < 2.0 * stencil_h {
        return Err(Error::Geometry(
            "finite-difference stencil touches the source support".into(),
        ));
    }
    let d = x.len();
    let u0 = field_fn(x)?;
    let mut lap = Complex64::new(0.0, 0.0);
    let mut xp = x.to_vec();
    for a in 0..d {
        xp[a] = x[a] + stencil_h;
        let up = field_fn(&xp)?;
        xp[a] = x[a] - stencil_h;
        let um = field_fn(&xp)?;
        xp[a] = x[a];
        lap += (up - 2.0 * u0 + um) / (stencil_h * stencil_h);
    }
    Ok((lap + kappa * kappa * u0).norm() / (kappa * kappa * u0.norm()))
}

/// Batch evaluation over frequencies x points, serialized as CSV with
/// columns freq, point, re/im per component.
pub fn write_field_csv(
    sample: &FieldSample,
    freqs: &[f64],
    points: &MeasurementSet,
    elastic: Option<(f64, f64)>,
    path: &Path,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let ncomp = sample.spec.components;
    write!(out, "freq,point")?;
    for c in 0..ncomp {
        write!(out, ",re{c},im{c}")?;
    }
    writeln!(out)?;
    for &w in freqs {
        for (pi, p) in points.points.iter().enumerate() {
            let vals: Vec<Complex64> = match elastic {
                Some((lambda, mu)) => {
                    let params = ElasticParams::new(w, lambda, mu)?;
                    elastic_field(sample, &params, p)?
                }
                None => vec![acoustic_field(sample, w, p)?],
            };
            write!(out, "{w},{pi}")?;
            for v in &vals {
                write!(out, ",{},{}", v.re, v.im)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
