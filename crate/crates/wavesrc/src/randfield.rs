//! Synthesis of microlocally isotropic Gaussian random sources on a
//! periodic grid, plus spectral and statistical diagnostics.
//!
//! A sample is sqrt(phi(x)) * K_{m/2} W with W unit white noise scaled by
//! h^{-d/2} and K_{m/2} the Fourier multiplier |xi|^{-m/2} (zero mode
//! dropped). The covariance operator of the result has principal symbol
//! phi(x) |xi|^{-m}.

use crate::error::{Error, Result};
use crate::fftutil::{fftn, ifftn};
use crate::grid::Grid;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SmoothBump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl SmoothBump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            / (self.radius * self.radius);
        if s < 1.0 {
            self.amplitude * (1.0 - 1.0 / (1.0 - s)).exp()
        } else {
            0.0
        }
    }
}

/// Strength phi as a sum of smooth bumps.
pub fn strength_eval(bumps: &[SmoothBump], x: &[f64]) -> f64 {
    bumps.iter().map(|b| b.eval(x)).sum()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldSpec {
    pub dim: usize,
    pub order_m: f64,
    pub strength: Vec<SmoothBump>,
    pub grid: Grid,
    pub components: usize,
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d != 2 && d != 3 {
            return Err(Error::Spec(format!("dimension must be 2 or 3, got {d}")));
        }
        if self.grid.dim != d {
            return Err(Error::Spec("grid dimension mismatch".into()));
        }
        let m = self.order_m;
        if !(m >= d as f64 && m < d as f64 + 0.5) {
            return Err(Error::Spec(format!(
                "order m={m} outside [{d}, {}.5)",
                d
            )));
        }
        if self.components != 1 && self.components != d {
            return Err(Error::Spec("components must be 1 or d".into()));
        }
        let side = self.grid.side();
        for b in &self.strength {
            if b.center.len() != d {
                return Err(Error::Spec("bump center dimension mismatch".into()));
            }
            if b.radius <= 0.0 || b.amplitude < 0.0 {
                return Err(Error::Spec("bump needs radius > 0, amplitude >= 0".into()));
            }
            for a in 0..d {
                let lo = b.center[a] - b.radius;
                let hi = b.center[a] + b.radius;
                if lo <= self.grid.origin[a] || hi >= self.grid.origin[a] + side {
                    return Err(Error::Spec(
                        "grid too small to contain supp phi".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn phi_at(&self, x: &[f64]) -> f64 {
        strength_eval(&self.strength, x)
    }

    /// phi sampled at every grid node.
    pub fn phi_values(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.phi_at(&self.grid.node(i)[..self.dim]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct FieldSample {
    pub spec: FieldSpec,
    pub seed: i64,
    /// one real array per component, flat over the grid
    pub values: Vec<Vec<f64>>,
    active: Vec<usize>,
    phi: Vec<f64>,
}

impl FieldSample {
    /// Indices of grid nodes where phi > 0.
    pub fn active_nodes(&self) -> &[usize] {
        &self.active
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn component_rng(seed: i64, component: usize) -> ChaCha20Rng {
    let base = splitmix64(seed.unsigned_abs() ^ splitmix64(component as u64));
    ChaCha20Rng::seed_from_u64(base)
}

/// The smoothed noise K_{m/2} W for one component, before masking by
/// sqrt(phi). Exposed for spectral diagnostics.
pub fn smoothed_noise(spec: &FieldSpec, seed: i64, component: usize) -> Vec<f64> {
    let grid = &spec.grid;
    let nn = grid.len();
    let scale = grid.h.powf(-(spec.dim as f64) / 2.0);
    let mut rng = component_rng(seed, component);
    let mut data: Vec<Complex64> = (0..nn)
        .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal) * scale, 0.0))
        .collect();
    fftn(&mut data, spec.dim, grid.n);
    for (i, v) in data.iter_mut().enumerate() {
        let k = grid.freq_norm(i);
        *v *= if k > 0.0 {
            k.powf(-spec.order_m / 2.0)
        } else {
            0.0
        };
    }
    ifftn(&mut data, spec.dim, grid.n);
    let sign = if seed < 0 { -1.0 } else { 1.0 };
    data.into_iter().map(|v| sign * v.re).collect()
}

fn sample_components(spec: &FieldSpec, seed: i64) -> Result<FieldSample> {
    spec.validate()?;
    let phi = spec.phi_values();
    let sqrt_phi: Vec<f64> = phi.iter().map(|p| p.sqrt()).collect();
    let active: Vec<usize> = phi
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, _)| i)
        .collect();
    let mut values = Vec::with_capacity(spec.components);
    for c in 0..spec.components {
        let z = smoothed_noise(spec, seed, c);
        let v: Vec<f64> = z
            .iter()
            .zip(&sqrt_phi)
            .map(|(zi, s)| if *s > 0.0 { s * zi } else { 0.0 })
            .collect();
        values.push(v);
    }
    Ok(FieldSample {
        spec: spec.clone(),
        seed,
        values,
        active,
        phi,
    })
}

/// Scalar source sample (acoustic).
pub fn sample_field(spec: &FieldSpec, seed: i64) -> Result<FieldSample> {
    if spec.components != 1 {
        return Err(Error::Spec("sample_field needs components = 1".into()));
    }
    sample_components(spec, seed)
}

/// d-component source sample (elastic); components mutually independent.
pub fn sample_vector_field(spec: &FieldSpec, seed: i64) -> Result<FieldSample> {
    if spec.components != spec.dim {
        return Err(Error::Spec(
            "sample_vector_field needs components = d".into(),
        ));
    }
    sample_components(spec, seed)
}

/// Exact covariance of the synthesized discrete field between two grid
/// nodes: sqrt(phi(y)) sqrt(phi(z)) (1/L^d) sum_{xi != 0} |xi|^{-m}
/// cos(xi . (y - z)).
pub fn discrete_covariance(spec: &FieldSpec, y_idx: usize, z_idx: usize) -> f64 {
    let grid = &spec.grid;
    let d = spec.dim;
    let xy = grid.node(y_idx);
    let xz = grid.node(z_idx);
    let py = spec.phi_at(&xy[..d]);
    let pz = spec.phi_at(&xz[..d]);
    if py == 0.0 || pz == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let k = grid.freq_norm(i);
        if k == 0.0 {
            continue;
        }
        let ia = grid.unravel(i);
        let mut dot = 0.0;
        for a in 0..d {
            dot += grid.freq(ia[a]) * (xy[a] - xz[a]);
        }
        acc += k.powf(-spec.order_m) * dot.cos();
    }
    (py * pz).sqrt() * acc / grid.side().powi(d as i32)
}

/// Log-log regression slope of the radially resolved power spectrum of
/// the smoothed noise, averaged over the given seeds. Expected ~ -m.
pub fn spectral_slope(spec: &FieldSpec, seeds: &[i64]) -> Result<f64> {
    if seeds.is_empty() {
        return Err(Error::Statistics("spectral_slope needs seeds".into()));
    }
    let grid = &spec.grid;
    let nn = grid.len();
    let mut power = vec![0.0f64; nn];
    for &seed in seeds {
        let z = smoothed_noise(spec, seed, 0);
        let mut data: Vec<Complex64> =
            z.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        fftn(&mut data, spec.dim, grid.n);
        for (p, v) in power.iter_mut().zip(&data) {
            *p += v.norm_sqr();
        }
    }
    let kmin = 3.0 * 2.0 * std::f64::consts::PI / grid.side();
    let kmax = 0.45 * std::f64::consts::PI / grid.h;
    let mut pts = Vec::new();
    for i in 0..nn {
        let k = grid.freq_norm(i);
        if k >= kmin && k <= kmax && power[i] > 0.0 {
            pts.push((k.ln(), (power[i] / seeds.len() as f64).ln()));
        }
    }
    if pts.len() < 8 {
        return Err(Error::Statistics("too few modes in the resolved band".into()));
    }
    Ok(linfit_slope(&pts))
}

pub(crate) fn linfit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Grid dump: values.csv plus a JSON header describing the layout.
pub fn write_sample(sample: &FieldSample, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let header = serde_json::json!({
        "dimension": sample.spec.dim,
        "order_m": sample.spec.order_m,
        "grid": sample.spec.grid,
        "strength": sample.spec.strength,
        "seed": sample.seed,
        "components": sample.spec.components,
        "values_file": "values.csv",
    });
    std::fs::write(
        dir.join("header.json"),
        serde_json::to_string_pretty(&header).expect("header serializes"),
    )?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("values.csv"))?);
    let d = sample.spec.dim;
    write!(out, "index")?;
    for a in 0..d {
        write!(out, ",x{a}")?;
    }
    for c in 0..sample.spec.components {
        write!(out, ",f{c}")?;
    }
    writeln!(out)?;
    for i in 0..sample.spec.grid.len() {
        let x = sample.spec.grid.node(i);
        write!(out, "{i}")?;
        for a in 0..d {
            write!(out, ",{}", x[a])?;
        }
        for c in 0..sample.spec.components {
            write!(out, ",{}", sample.values[c][i])?;
        }
        writeln!(out)?;
    }
    Ok(())
}
