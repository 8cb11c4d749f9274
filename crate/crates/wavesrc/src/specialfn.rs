//! Bessel and Hankel functions of orders 0..=2 and their truncated
//! large-argument asymptotic expansions.
//!
//! Two evaluation branches: the ascending series in double-double
//! arithmetic up to t = 45, and the divergent asymptotic expansion with
//! optimal (smallest-term) truncation beyond. The branches agree to
//! better than 1e-10 at the crossover.

use crate::dd::Dd;
use crate::error::{Error, Result};
use num_complex::Complex64;

pub const EULER_GAMMA: f64 = 0.5772156649015329;

const SERIES_CUTOFF: f64 = 45.0;
const MAX_SERIES_TERMS: usize = 160;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
}

fn check_order(n: u32) -> Result<()> {
    if n > 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    Ok(())
}

/// J_n(t) by the ascending series, t in the series regime.
///
/// The terms peak around 1e17 before the sum collapses to O(1), so every
/// coefficient must carry double-double accuracy; even an f64 rounding
/// of t^2/4 would be amplified by the peak into an O(1e-6) error.
fn bessel_j_series(n: u32, t: f64) -> f64 {
    let half = t / 2.0;
    let mut term = Dd::from(1.0);
    for k in 1..=n {
        term = term.mul_f64(half).div_f64(k as f64);
    }
    let mut sum = term;
    for p in 1..MAX_SERIES_TERMS {
        term = term
            .mul_f64(-half)
            .mul_f64(half)
            .div_f64(p as f64 * (p as f64 + n as f64));
        sum = sum.add(term);
        if term.abs() < 1e-35 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum.to_f64()
}

/// Y_n(t) by the logarithmic series, t in the series regime.
fn bessel_y_series(n: u32, t: f64) -> f64 {
    let half = t / 2.0;
    let half2 = half * half;
    let jn = bessel_j_series(n, t);
    let log_part = std::f64::consts::FRAC_2_PI * ((half).ln() + EULER_GAMMA) * jn;

    // finite sum: -(1/pi) sum_{p=0}^{n-1} (n-1-p)!/p! (t/2)^{2p-n}
    let mut finite = 0.0;
    if n > 0 {
        let mut fact_num = (1..n as u64).product::<u64>() as f64; // (n-1)!
        let mut fact_den = 1.0;
        let mut pw = half.powi(-(n as i32));
        for p in 0..n {
            finite += fact_num / fact_den * pw;
            pw *= half2;
            if p + 1 < n {
                fact_num /= (n - 1 - p) as f64;
                fact_den *= (p + 1) as f64;
            }
        }
    }

    // harmonic-number series: -(1/pi) sum_p (-1)^p (H_p + H_{p+n}) /
    // (p!(p+n)!) (t/2)^{2p+n}
    let mut base = Dd::from(1.0);
    for k in 1..=n {
        base = base.mul_f64(half).div_f64(k as f64);
    }
    let mut h_p = Dd::ZERO;
    let mut h_pn = Dd::ZERO;
    let recip = |k: usize| Dd::from(1.0).div_f64(k as f64);
    for k in 1..=n as usize {
        h_pn = h_pn.add(recip(k));
    }
    let mut sum = base.mul(h_p.add(h_pn));
    for p in 1..MAX_SERIES_TERMS {
        base = base
            .mul_f64(-half)
            .mul_f64(half)
            .div_f64(p as f64 * (p as f64 + n as f64));
        h_p = h_p.add(recip(p));
        h_pn = h_pn.add(recip(p + n as usize));
        let term = base.mul(h_p.add(h_pn));
        sum = sum.add(term);
        if term.abs() < 1e-35 * (1.0 + sum.abs()) {
            break;
        }
    }

    log_part - std::f64::consts::FRAC_1_PI * (finite + sum.to_f64())
}

/// Optimally truncated asymptotic expansion of H_n^(1)(t), valid for
/// large t. Terms are added while they keep shrinking.
fn hankel1_asymptotic(n: u32, t: f64) -> Complex64 {
    let n2 = 4.0 * (n as f64) * (n as f64);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev_mag = f64::INFINITY;
    let mut j = 1.0f64;
    loop {
        let factor = Complex64::new(0.0, 1.0) * (n2 - (2.0 * j - 1.0).powi(2))
            / (8.0 * j * t);
        term *= factor;
        let mag = term.norm();
        if mag >= prev_mag || j > 200.0 {
            break;
        }
        sum += term;
        if mag < 1e-18 * sum.norm() {
            break;
        }
        prev_mag = mag;
        j += 1.0;
    }
    let phase = t - (n as f64 / 2.0 + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * t)).sqrt() * Complex64::cis(phase) * sum
}

/// Bessel function of the first (J) or second (Y) kind, order 0..=2.
pub fn bessel(kind: BesselKind, n: u32, t: f64) -> Result<f64> {
    check_order(n)?;
    match kind {
        BesselKind::J => {
            if t < 0.0 || !t.is_finite() {
                return Err(Error::Domain(format!("J requires t >= 0, got {t}")));
            }
            if t <= SERIES_CUTOFF {
                Ok(bessel_j_series(n, t))
            } else {
                Ok(hankel1_asymptotic(n, t).re)
            }
        }
        BesselKind::Y => {
            if t <= 0.0 || !t.is_finite() {
                return Err(Error::Domain(format!("Y requires t > 0, got {t}")));
            }
            if t <= SERIES_CUTOFF {
                Ok(bessel_y_series(n, t))
            } else {
                Ok(hankel1_asymptotic(n, t).im)
            }
        }
    }
}

/// Hankel function of the first kind, H_n^(1)(t) = J_n(t) + i Y_n(t).
pub fn hankel1(n: u32, t: f64) -> Result<Complex64> {
    check_order(n)?;
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("hankel1 requires t > 0, got {t}")));
    }
    if t <= SERIES_CUTOFF {
        Ok(Complex64::new(bessel_j_series(n, t), bessel_y_series(n, t)))
    } else {
        Ok(hankel1_asymptotic(n, t))
    }
}

/// Truncated asymptotic expansion H_{n,N}: order n, first N+1 terms.
#[derive(Clone, Debug)]
pub struct HankelTruncation {
    pub order: u32,
    pub terms: usize,
    pub coefficients: Vec<Complex64>,
}

impl HankelTruncation {
    /// Coefficients a_j = i^j sqrt(2/pi) (n,j), with
    /// (n,j) = (4n^2-1)(4n^2-3^2)...(4n^2-(2j-1)^2) / (8^j j!).
    pub fn new(order: u32, terms: usize) -> Result<Self> {
        check_order(order)?;
        let n2 = 4.0 * (order as f64) * (order as f64);
        let mut coefficients = Vec::with_capacity(terms + 1);
        let mut a = Complex64::new((2.0 / std::f64::consts::PI).sqrt(), 0.0);
        coefficients.push(a);
        for j in 1..=terms {
            let jf = j as f64;
            a *= Complex64::new(0.0, 1.0) * (n2 - (2.0 * jf - 1.0).powi(2)) / (8.0 * jf);
            coefficients.push(a);
        }
        Ok(HankelTruncation {
            order,
            terms,
            coefficients,
        })
    }
}

/// Evaluate the truncated expansion
/// sqrt(1/t) e^{i(t - (n/2 + 1/4)pi)} sum_{j=0}^{N} a_j t^{-j}.
pub fn hankel1_trunc(trunc: &HankelTruncation, t: f64) -> Result<Complex64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!(
            "hankel1_trunc requires t > 0, got {t}"
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut tp = 1.0;
    for a in &trunc.coefficients {
        sum += a * tp;
        tp /= t;
    }
    let phase = t - (trunc.order as f64 / 2.0 + 0.25) * std::f64::consts::PI;
    Ok((1.0 / t).sqrt() * Complex64::cis(phase) * sum)
}
