//! Rician parameter fitting and goodness of fit for envelope samples.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analytic::{rician_pdf, RicianParams};
use crate::error::{Error, Result};
use crate::special::{bessel_i0e, bessel_i1e, integrate};

/// Smallest sample accepted by [`fit_rician`].
pub const MIN_FIT_SAMPLES: usize = 100;

/// Upper end of the K search interval.
pub const K_MAX: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Moments,
    MaxLikelihoodGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub params: RicianParams,
    pub method: FitMethod,
    /// Kolmogorov–Smirnov distance between the samples and the fitted law.
    pub gof_statistic: f64,
    pub n: usize,
}

/// `⟨r⟩² / ⟨r²⟩` of a Rician envelope with factor `k`.
///
/// Rises strictly from π/4 (Rayleigh) towards 1 as `k → ∞`.
pub fn moment_ratio(k: f64) -> f64 {
    let h = 0.5 * k;
    let l = (1.0 + k) * bessel_i0e(h) + k * bessel_i1e(h);
    PI / (4.0 * (1.0 + k)) * l * l
}

/// Inverts [`moment_ratio`] by bisection on `[0, K_MAX]`.
///
/// Ratios at or below π/4 map to 0 and ratios beyond `moment_ratio(K_MAX)`
/// map to `K_MAX`.
pub fn k_from_moment_ratio(ratio: f64) -> f64 {
    if ratio <= moment_ratio(0.0) {
        return 0.0;
    }
    if ratio >= moment_ratio(K_MAX) {
        return K_MAX;
    }
    let (mut lo, mut hi) = (0.0, K_MAX);
    while hi - lo > 1e-10 * hi && hi > 1e-300 {
        let mid = 0.5 * (lo + hi);
        if moment_ratio(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_envelopes(envelopes: &[f64]) -> Result<()> {
    if envelopes.len() < MIN_FIT_SAMPLES {
        return Err(Error::Degenerate(format!(
            "need at least {MIN_FIT_SAMPLES} envelopes, got {}",
            envelopes.len()
        )));
    }
    if let Some(bad) = envelopes.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!(
            "envelopes must be finite and non-negative, got {bad}"
        )));
    }
    Ok(())
}

/// Moment fit: `P̂_r = ⟨r²⟩` and K from `⟨r⟩²/⟨r²⟩`.
pub fn fit_rician_moments(envelopes: &[f64]) -> Result<RicianParams> {
    check_envelopes(envelopes)?;
    let n = envelopes.len() as f64;
    let m1 = envelopes.iter().sum::<f64>() / n;
    let m2 = envelopes.iter().map(|x| x * x).sum::<f64>() / n;
    let var = envelopes.iter().map(|x| (x - m1).powi(2)).sum::<f64>() / n;
    if !(m2 > 0.0) || var <= 1e-14 * m2 {
        return Err(Error::Degenerate("envelopes have no spread".into()));
    }
    RicianParams::new(k_from_moment_ratio(m1 * m1 / m2), m2)
}

/// Log-likelihood of K with the power held at `p`, dropping terms free of K.
fn log_likelihood(envelopes: &[f64], k: f64, p: f64) -> f64 {
    let sk = k.sqrt();
    let scale = ((k + 1.0) / p).sqrt();
    let body: f64 = envelopes
        .iter()
        .map(|&x| {
            let a = x * scale;
            -(a - sk).powi(2) + bessel_i0e(2.0 * a * sk).ln()
        })
        .sum();
    envelopes.len() as f64 * (1.0 + k).ln() + body
}

/// Moment fit refined by maximizing the likelihood over K.
///
/// The power stays at the moment value. K is scanned over a logarithmic
/// grid around the moment estimate (plus K = 0) and the best bracket is
/// refined by golden-section search. Near K = 0 this is far sharper than
/// the moment ratio, whose slope vanishes there.
pub fn fit_rician(envelopes: &[f64]) -> Result<FitResult> {
    let start = fit_rician_moments(envelopes)?;
    let p = start.total_power();
    let ll = |k: f64| log_likelihood(envelopes, k, p);

    let center = start.k().max(1e-3);
    let mut grid: Vec<f64> = vec![0.0];
    grid.extend(
        (-20..=20)
            .map(|j| center * 10f64.powf(j as f64 / 10.0))
            .filter(|k| *k <= K_MAX),
    );
    let values: Vec<f64> = grid.iter().map(|&k| ll(k)).collect();
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let k = golden_max(&ll, lo, hi, 1e-10);
    let k = if ll(k) >= values[best] { k } else { grid[best] };

    let params = RicianParams::new(k, p)?;
    Ok(FitResult {
        params,
        method: FitMethod::MaxLikelihoodGrid,
        gof_statistic: ks_distance(envelopes, &params),
        n: envelopes.len(),
    })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > rel_tol * b.abs().max(1e-12) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Kolmogorov–Smirnov distance between the envelopes and a Rician law.
///
/// The CDF is built by integrating the density between consecutive sorted
/// samples, so the cost is linear in the sample count.
pub fn ks_distance(envelopes: &[f64], params: &RicianParams) -> f64 {
    if envelopes.is_empty() {
        return 0.0;
    }
    let mut xs: Vec<f64> = envelopes.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let (lo, hi) = params.support();
    let pdf = |t: f64| rician_pdf(t, params);

    let mut cdf = 0.0;
    let mut at = lo;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let x_in = x.clamp(lo, hi);
        if x_in > at {
            cdf += integrate(pdf, at, x_in, 1e-13, 1e-9).value;
            at = x_in;
        }
        let f = if x >= hi { 1.0 } else { cdf.clamp(0.0, 1.0) };
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d.clamp(0.0, 1.0)
}

/// 1% critical value of the one-sample KS statistic (large-n approximation).
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
