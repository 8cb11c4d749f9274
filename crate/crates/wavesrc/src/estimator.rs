//! Frequency-band averaging of a single realization, the analytic
//! strength targets it converges to, and exact ensemble oracles used to
//! verify ergodicity.

use crate::error::{Error, Result};
use crate::fftutil::fftn;
use crate::forward::{acoustic_field, elastic_field, MeasurementSet};
use crate::greens::{navier_green, phi, ElasticParams};
use crate::grid::dist;
use crate::randfield::{sample_field, FieldSample, FieldSpec, SmoothBump};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Acoustic2,
    Acoustic3,
    Elastic2,
    Elastic3,
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Acoustic2 | Model::Elastic2 => 2,
            Model::Acoustic3 | Model::Elastic3 => 3,
        }
    }

    pub fn is_elastic(&self) -> bool {
        matches!(self, Model::Elastic2 | Model::Elastic3)
    }

    /// Exponent p of the frequency weight in the band average:
    /// p = m + 1 in 2D, p = m in 3D.
    pub fn weight_exponent(&self, m: f64) -> f64 {
        if self.dim() == 2 {
            m + 1.0
        } else {
            m
        }
    }

    /// Power l of the Riesz kernel 1/|x-y|^l in the strength relation.
    pub fn riesz_exponent(&self) -> f64 {
        (self.dim() - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsMode {
    Paper,
    Empirical,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FrequencySweep {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
    pub weight_exponent: f64,
}

impl FrequencySweep {
    pub fn new(upper: f64, step: f64, weight_exponent: f64) -> Result<Self> {
        if !(upper > 1.0) {
            return Err(Error::Sweep(format!("upper must exceed 1, got {upper}")));
        }
        if !(step > 0.0 && step <= 0.25) {
            return Err(Error::Sweep(format!(
                "step must lie in (0, 0.25], got {step}"
            )));
        }
        Ok(FrequencySweep {
            lower: 1.0,
            upper,
            step,
            weight_exponent,
        })
    }

    /// Frequency nodes, endpoints included; the nominal step is snapped
    /// so the band divides evenly.
    pub fn freqs(&self) -> Vec<f64> {
        let span = self.upper - self.lower;
        let n = (span / self.step).round().max(1.0) as usize;
        let h = span / n as f64;
        (0..=n).map(|i| self.lower + i as f64 * h).collect()
    }

    /// Trapezoid quadrature of per-node integrand values over the band,
    /// normalized by 1/(Q - 1).
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let freqs = self.freqs();
        assert_eq!(values.len(), freqs.len());
        let h = freqs[1] - freqs[0];
        let mut acc = 0.0;
        let mut comp = 0.0;
        for (i, v) in values.iter().enumerate() {
            let w = if i == 0 || i == values.len() - 1 { 0.5 } else { 1.0 };
            let y = w * v * h - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        acc / (self.upper - self.lower)
    }
}

fn squared_field(
    sample: &FieldSample,
    model: Model,
    lame: Option<(f64, f64)>,
    freq: f64,
    x: &[f64],
) -> Result<f64> {
    if model.is_elastic() {
        let (lambda, mu) =
            lame.ok_or_else(|| Error::Spec("elastic model needs Lamé parameters".into()))?;
        let params = ElasticParams::new(freq, lambda, mu)?;
        let u = elastic_field(sample, &params, x)?;
        Ok(u.iter().map(|v| v.norm_sqr()).sum())
    } else {
        Ok(acoustic_field(sample, freq, x)?.norm_sqr())
    }
}

/// Single-realization band average
/// (1/(Q-1)) \int_1^Q kappa^p |u(x, kappa)|^2 d kappa (trapezoid).
pub fn band_average(
    sample: &FieldSample,
    sweep: &FrequencySweep,
    x: &[f64],
    model: Model,
    lame: Option<(f64, f64)>,
) -> Result<f64> {
    let p = sweep.weight_exponent;
    let vals: Result<Vec<f64>> = sweep
        .freqs()
        .par_iter()
        .map(|&k| Ok(k.powf(p) * squared_field(sample, model, lame, k, x)?))
        .collect();
    Ok(sweep.integrate(&vals?))
}

/// Exact ensemble second moment E |u(x, freq)|^2 of the discrete field,
/// evaluated by a quadratic form in Fourier space: with
/// v_j = K(x, y_j) sqrt(phi(y_j)) h^d the moment is
/// (1/L^d) sum_{xi != 0} |xi|^{-m} |v^(xi)|^2, summed over kernel rows.
pub fn covariance_moment(
    spec: &FieldSpec,
    freq: f64,
    x: &[f64],
    model: Model,
    lame: Option<(f64, f64)>,
) -> Result<f64> {
    spec.validate()?;
    if model.dim() != spec.dim {
        return Err(Error::Spec("model dimension mismatch".into()));
    }
    let grid = &spec.grid;
    let d = spec.dim;
    let nn = grid.len();
    let vol = grid.cell_volume();
    let sqrt_phi: Vec<f64> = spec.phi_values().iter().map(|p| p.sqrt()).collect();
    let mut kernels: Vec<Vec<Complex64>> = Vec::new();
    if model.is_elastic() {
        let (lambda, mu) =
            lame.ok_or_else(|| Error::Spec("elastic model needs Lamé parameters".into()))?;
        let params = ElasticParams::new(freq, lambda, mu)?;
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); nn]; d * d];
        for j in 0..nn {
            if sqrt_phi[j] == 0.0 {
                continue;
            }
            let y = grid.node(j);
            let g = navier_green(d, x, &y[..d], &params)?;
            for e in 0..d * d {
                rows[e][j] = g[e] * sqrt_phi[j] * vol;
            }
        }
        kernels.extend(rows);
    } else {
        let mut row = vec![Complex64::new(0.0, 0.0); nn];
        for j in 0..nn {
            if sqrt_phi[j] == 0.0 {
                continue;
            }
            let y = grid.node(j);
            row[j] = phi(d, x, &y[..d], freq)? * sqrt_phi[j] * vol;
        }
        kernels.push(row);
    }
    let mults: Vec<f64> = (0..nn)
        .map(|i| {
            let k = grid.freq_norm(i);
            if k > 0.0 {
                k.powf(-spec.order_m)
            } else {
                0.0
            }
        })
        .collect();
    let mut total = 0.0;
    for mut row in kernels {
        fftn(&mut row, d, grid.n);
        total += row
            .iter()
            .zip(&mults)
            .map(|(v, m)| m * v.norm_sqr())
            .sum::<f64>();
    }
    Ok(total / grid.side().powi(d as i32))
}

/// Ensemble band average: the covariance_moment oracle integrated over
/// the same sweep that band_average uses.
pub fn oracle_band_average(
    spec: &FieldSpec,
    sweep: &FrequencySweep,
    x: &[f64],
    model: Model,
    lame: Option<(f64, f64)>,
) -> Result<f64> {
    let p = sweep.weight_exponent;
    let vals: Result<Vec<f64>> = sweep
        .freqs()
        .par_iter()
        .map(|&k| Ok(k.powf(p) * covariance_moment(spec, k, x, model, lame)?))
        .collect();
    Ok(sweep.integrate(&vals?))
}

/// Midpoint quadrature of the Riesz potential
/// \int phi(y) / |x - y|^l dy, refined until 0.1% self-consistency.
pub fn riesz_potential(bumps: &[SmoothBump], x: &[f64], l: f64) -> Result<f64> {
    if bumps.is_empty() {
        return Ok(0.0);
    }
    let d = bumps[0].center.len();
    let mut prev = f64::NAN;
    let mut n = 32usize;
    loop {
        let mut total = 0.0;
        for b in bumps {
            let h = 2.0 * b.radius / n as f64;
            let volume = h.powi(d as i32);
            let mut y = vec![0.0f64; d];
            let mut idx = vec![0usize; d];
            'cells: loop {
                for a in 0..d {
                    y[a] = b.center[a] - b.radius + (idx[a] as f64 + 0.5) * h;
                }
                let p = b.eval(&y);
                if p > 0.0 {
                    total += p / dist(x, &y).powf(l) * volume;
                }
                for a in (0..d).rev() {
                    idx[a] += 1;
                    if idx[a] < n {
                        continue 'cells;
                    }
                    idx[a] = 0;
                }
                break;
            }
        }
        if prev.is_finite() && (total - prev).abs() <= 1e-3 * total.abs() {
            return Ok(total);
        }
        if n >= 512 {
            return Err(Error::Statistics(
                "Riesz quadrature failed to self-converge".into(),
            ));
        }
        prev = total;
        n *= 2;
    }
}

/// Elastic plateau constants a_3, b_1, b_3 built from the slownesses.
pub fn elastic_constants(params: &ElasticParams, m: f64) -> (f64, f64, f64) {
    let pi = std::f64::consts::PI;
    let a3 = (params.c_s.powf(3.0 - m) + params.c_p.powf(3.0 - m)) / (32.0 * pi);
    let b1 = params.c_s.powf(4.0 - m) / (128.0 * pi * pi);
    let b3 = (params.c_s.powf(4.0 - m) + params.c_p.powf(4.0 - m)) / (128.0 * pi * pi);
    (a3, b1, b3)
}

/// The proportionality constant C in T(x) = C \int phi / |x-y|^l dy.
///
/// `Paper` evaluates the published closed forms. `Empirical` uses the
/// coefficients fitted against the exact ensemble oracle in this code
/// base; they disagree with the published ones (see README), most
/// visibly in 2D acoustics where the published constant is negative
/// while T is a limit of nonnegative averages.
pub fn strength_constant(
    model: Model,
    mode: ConstantsMode,
    m: f64,
    lame_at_unit_omega: Option<(f64, f64)>,
) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let elastic = || -> Result<ElasticParams> {
        let (lambda, mu) = lame_at_unit_omega
            .ok_or_else(|| Error::Spec("elastic model needs Lamé parameters".into()))?;
        ElasticParams::new(1.0, lambda, mu)
    };
    Ok(match (model, mode) {
        // acoustic phases cancel: c_m = 1
        (Model::Acoustic2, ConstantsMode::Paper) => -1.0 / 64.0 / (8.0 * pi),
        (Model::Acoustic2, ConstantsMode::Empirical) => 1.0 / (8.0 * pi),
        (Model::Acoustic3, ConstantsMode::Paper) => (1.0 / 8.0) / (16.0 * pi * pi),
        (Model::Acoustic3, ConstantsMode::Empirical) => 1.0 / (16.0 * pi * pi),
        (Model::Elastic2, ConstantsMode::Paper) => {
            let (a3, _, _) = elastic_constants(&elastic()?, m);
            a3
        }
        (Model::Elastic2, ConstantsMode::Empirical) => {
            let (a3, _, _) = elastic_constants(&elastic()?, m);
            4.0 * a3
        }
        (Model::Elastic3, ConstantsMode::Paper) => {
            let (_, b1, b3) = elastic_constants(&elastic()?, m);
            b3 - b1
        }
        (Model::Elastic3, ConstantsMode::Empirical) => {
            let (_, b1, b3) = elastic_constants(&elastic()?, m);
            8.0 * (b1 + b3)
        }
    })
}

/// Analytic strength profile T(x) = C \int phi(y) / |x-y|^l dy.
pub fn analytic_strength(
    bumps: &[SmoothBump],
    x: &[f64],
    model: Model,
    mode: ConstantsMode,
    m: f64,
    lame: Option<(f64, f64)>,
) -> Result<f64> {
    if crate::forward::dist_to_support(bumps, x) <= 0.0 {
        return Err(Error::Geometry(
            "analytic strength requested inside the source support".into(),
        ));
    }
    let c = strength_constant(model, mode, m, lame)?;
    Ok(c * riesz_potential(bumps, x, model.riesz_exponent())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    BandAverage,
    Analytic,
    Ensemble,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrengthProfile {
    pub points: MeasurementSet,
    pub values: Vec<f64>,
    pub source: ProfileSource,
    pub uncertainty: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct DecorrelationEstimate {
    /// Monte-Carlo mean of u(k1) conj(u(k2)) and its standard error
    pub conjugated: Complex64,
    pub conjugated_se: f64,
    /// Monte-Carlo mean of u(k1) u(k2) and its standard error
    pub plain: Complex64,
    pub plain_se: f64,
    pub n_seeds: usize,
}

/// Monte-Carlo cross moments of the acoustic field at two frequencies,
/// used to verify decorrelation in |k1 - k2|.
pub fn frequency_decorrelation(
    spec: &FieldSpec,
    x: &[f64],
    kappa1: f64,
    kappa2: f64,
    n_seeds: usize,
) -> Result<DecorrelationEstimate> {
    if n_seeds < 10 {
        return Err(Error::Statistics(format!(
            "need at least 10 seeds, got {n_seeds}"
        )));
    }
    if kappa1 < 1.0 || kappa2 < 1.0 {
        return Err(Error::Domain("frequencies must be >= 1".into()));
    }
    let pairs: Result<Vec<(Complex64, Complex64)>> = (1..=n_seeds as i64)
        .into_par_iter()
        .map(|seed| {
            let sample = sample_field(spec, seed)?;
            let u1 = acoustic_field(&sample, kappa1, x)?;
            let u2 = acoustic_field(&sample, kappa2, x)?;
            Ok((u1 * u2.conj(), u1 * u2))
        })
        .collect();
    let pairs = pairs?;
    let n = n_seeds as f64;
    let mean = |f: &dyn Fn(&(Complex64, Complex64)) -> Complex64| -> (Complex64, f64) {
        let mu: Complex64 = pairs.iter().map(|p| f(p)).sum::<Complex64>() / n;
        let var: f64 = pairs.iter().map(|p| (f(p) - mu).norm_sqr()).sum::<f64>() / (n - 1.0);
        (mu, (var / n).sqrt())
    };
    let (conjugated, conjugated_se) = mean(&|p| p.0);
    let (plain, plain_se) = mean(&|p| p.1);
    Ok(DecorrelationEstimate {
        conjugated,
        conjugated_se,
        plain,
        plain_se,
        n_seeds,
    })
}

/// Full sweep over frequencies and points from one realization,
/// optionally with the ensemble oracle alongside.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub freqs: Vec<f64>,
    /// squared field magnitude, indexed [freq][point]
    pub squared: Vec<Vec<f64>>,
    pub estimates: Vec<f64>,
    pub oracle: Option<Vec<f64>>,
}

pub fn run_sweep(
    sample: &FieldSample,
    sweep: &FrequencySweep,
    points: &MeasurementSet,
    model: Model,
    lame: Option<(f64, f64)>,
    with_oracle: bool,
) -> Result<SweepResult> {
    let freqs = sweep.freqs();
    let squared: Result<Vec<Vec<f64>>> = freqs
        .par_iter()
        .map(|&k| {
            points
                .points
                .iter()
                .map(|x| squared_field(sample, model, lame, k, x))
                .collect()
        })
        .collect();
    let squared = squared?;
    let p = sweep.weight_exponent;
    let estimates: Vec<f64> = (0..points.points.len())
        .map(|pi| {
            let vals: Vec<f64> = freqs
                .iter()
                .zip(&squared)
                .map(|(k, row)| k.powf(p) * row[pi])
                .collect();
            sweep.integrate(&vals)
        })
        .collect();
    let oracle = if with_oracle {
        let vals: Result<Vec<f64>> = points
            .points
            .par_iter()
            .map(|x| oracle_band_average(&sample.spec, sweep, x, model, lame))
            .collect();
        Some(vals?)
    } else {
        None
    };
    Ok(SweepResult {
        freqs,
        squared,
        estimates,
        oracle,
    })
}

/// CSV rows: kappa, then per point |u|^2 and the weighted integrand.
pub fn write_sweep_csv(result: &SweepResult, p: f64, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let npts = result.squared.first().map_or(0, |r| r.len());
    write!(out, "kappa")?;
    for i in 0..npts {
        write!(out, ",u2_{i},weighted_{i}")?;
    }
    writeln!(out)?;
    for (k, row) in result.freqs.iter().zip(&result.squared) {
        write!(out, "{k}")?;
        for v in row {
            write!(out, ",{},{}", v, k.powf(p) * v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
