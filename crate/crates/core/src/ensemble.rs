//! Monte-Carlo simulation of the single-scattering receive-voltage model.
//!
//! Each realization draws a cloud of scatterers and sums the direct wave
//! with one scattered term per scatterer:
//!
//! ```text
//! v = v_d + A · Σ_n cos ψ_n · exp(−j k ρ_n (1 − cos θ_n)) / ρ_n
//! ```
//!
//! with `A = v_d · sqrt(⟨σ_s⟩ / (4π D_or))`. Since `⟨cos²ψ⟩ = 1/2` and
//! `⟨1/ρ²⟩ = 3/R_s²`, the scattered power is `N_s A² · 3/(2 R_s²)`, which is
//! exactly `P_LOS / K` for the fixed-count closed form.
//!
//! Realization `m` always draws from RNG stream `m` of the scenario seed, so
//! a sweep is bit-identical for any number of worker threads.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic;
use crate::cloud::{ScattererCloud, SphericalPosition};
use crate::error::{Error, Result};
use crate::estimate::{to_db, KFactorEstimate};
use crate::scenario::{Frequency, Region, ScenarioConfig};
use crate::table::{Method, SweepRow, SweepTable};

/// Draws closer than this fraction of the region radius are redrawn.
pub const MIN_RADIUS_FRACTION: f64 = 1e-6;

/// Number of leave-one-group-out replicates for the K̂ standard error.
const JACKKNIFE_GROUPS: usize = 20;

/// Identifies an independent, reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let a = TAU * rng.random::<f64>();
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Draws `count` scatterers uniformly over `region` (receiver at the centre).
///
/// Spherical regions use inverse-CDF sampling, `ρ = R u^{1/3}` and
/// `θ = arccos(1 − 2u)`; cubes draw Cartesian coordinates uniformly.
pub fn sample_cloud_in<R: Rng + ?Sized>(
    region: &Region,
    count: usize,
    rng: &mut R,
) -> ScattererCloud {
    let min_rho = MIN_RADIUS_FRACTION * region.analytic_radius();
    let mut cloud = ScattererCloud {
        positions: Vec::with_capacity(count),
        mismatch_angles: Vec::with_capacity(count),
        redraws: 0,
    };
    for _ in 0..count {
        let position = loop {
            let p = match *region {
                Region::Sphere { radius_m } => SphericalPosition {
                    rho: radius_m * rng.random::<f64>().cbrt(),
                    theta: (1.0 - 2.0 * rng.random::<f64>()).acos(),
                    phi: uniform_angle(rng),
                },
                Region::Cube { side_m } => {
                    let mut c = [0.0; 3];
                    for x in &mut c {
                        *x = side_m * (rng.random::<f64>() - 0.5);
                    }
                    SphericalPosition::from_cartesian(c)
                }
            };
            if p.rho >= min_rho {
                break p;
            }
            cloud.redraws += 1;
        };
        cloud.positions.push(position);
        cloud.mismatch_angles.push(uniform_angle(rng));
    }
    if cloud.redraws > 0 {
        log::debug!(
            "redrew {} scatterer positions next to the receiver",
            cloud.redraws
        );
    }
    cloud
}

/// Draws the scatterer cloud of one realization at frequency `f`.
pub fn sample_cloud(
    config: &ScenarioConfig,
    f: Frequency,
    stream: RngStream,
) -> Result<ScattererCloud> {
    let count = config.realized_count(f)?;
    Ok(sample_cloud_in(
        &config.geometry.region,
        count,
        &mut stream.rng(),
    ))
}

/// Amplitude of one scattered term relative to the direct wave.
pub fn scattered_amplitude(config: &ScenarioConfig, f: Frequency) -> Result<f64> {
    let sigma = config.scatterer.sigma_avg(f)?;
    Ok((sigma / (4.0 * PI * config.antenna.directivity_rx)).sqrt())
}

/// Complex receive signal of one realization.
pub fn receive_voltage(
    cloud: &ScattererCloud,
    config: &ScenarioConfig,
    f: Frequency,
) -> Result<Complex64> {
    let v_d = config.antenna.los_power(f).sqrt();
    let amplitude = v_d * scattered_amplitude(config, f)?;
    let k = f.wavenumber();
    let mut scattered = Complex64::new(0.0, 0.0);
    for (p, psi) in cloud.positions.iter().zip(&cloud.mismatch_angles) {
        if p.rho <= 0.0 {
            return Err(Error::Geometry(
                "scatterer collides with the receiver (ρ = 0)".into(),
            ));
        }
        let phase = -k * p.rho * (1.0 - p.theta.cos());
        scattered += Complex64::from_polar(psi.cos() / p.rho, phase);
    }
    Ok(Complex64::new(v_d, 0.0) + amplitude * scattered)
}

/// Moment estimator `K̂ = |⟨v⟩|² / (⟨|v|²⟩ − |⟨v⟩|²)`, `P̂_r = ⟨|v|²⟩`.
///
/// The standard error of K̂ in dB comes from a delete-a-group jackknife over
/// contiguous blocks. A diffuse power below machine epsilon times `P̂_r`
/// yields a deterministic (infinite K) estimate instead of an error.
pub fn estimate_k(samples: &[Complex64]) -> Result<KFactorEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "K estimation needs at least 2 samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<Complex64>() / nf;
    let power = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / nf;
    let diffuse = samples.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / nf;
    if !(diffuse > f64::EPSILON * power) {
        return Ok(KFactorEstimate::deterministic(power, n));
    }
    let k = mean.norm_sqr() / diffuse;
    Ok(KFactorEstimate::new(
        k,
        power,
        jackknife_stderr_db(samples),
        n,
    ))
}

fn jackknife_stderr_db(samples: &[Complex64]) -> f64 {
    let n = samples.len();
    let groups = JACKKNIFE_GROUPS.min(n);
    let total_sum: Complex64 = samples.iter().sum();
    let total_sq: f64 = samples.iter().map(|v| v.norm_sqr()).sum();
    let mut replicates = Vec::with_capacity(groups);
    for g in 0..groups {
        let lo = g * n / groups;
        let hi = (g + 1) * n / groups;
        let part = &samples[lo..hi];
        let kept = (n - part.len()) as f64;
        if kept < 2.0 {
            continue;
        }
        let mean = (total_sum - part.iter().sum::<Complex64>()) / kept;
        let power = (total_sq - part.iter().map(|v| v.norm_sqr()).sum::<f64>()) / kept;
        let diffuse = power - mean.norm_sqr();
        if diffuse > 0.0 {
            replicates.push(to_db(mean.norm_sqr() / diffuse));
        }
    }
    let g = replicates.len();
    if g < 2 {
        return 0.0;
    }
    let avg = replicates.iter().sum::<f64>() / g as f64;
    let ss: f64 = replicates.iter().map(|r| (r - avg).powi(2)).sum();
    ((g as f64 - 1.0) / g as f64 * ss).sqrt()
}

/// Received samples of a Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct McSamples {
    /// `[frequency][realization]`.
    pub per_frequency: Vec<Vec<Complex64>>,
    /// Scatterer positions redrawn next to the receiver, over all clouds.
    pub redraws: usize,
}

/// Received samples for every configured frequency.
///
/// A realization keeps its cloud across frequencies while the scatterer count
/// is unchanged (common random numbers), which keeps K-vs-f curves smooth.
pub fn mc_samples(config: &ScenarioConfig) -> Result<McSamples> {
    config.validate()?;
    let counts: Vec<usize> = config
        .frequencies
        .iter()
        .map(|&f| config.realized_count(f))
        .collect::<Result<_>>()?;
    let per_realization: Vec<(Vec<Complex64>, usize)> = (0..config.ensembles)
        .into_par_iter()
        .map(|m| {
            let stream = RngStream::new(config.seed, m);
            let mut cloud: Option<ScattererCloud> = None;
            let mut redraws = 0;
            let values = config
                .frequencies
                .iter()
                .zip(&counts)
                .map(|(&f, &count)| {
                    if cloud.as_ref().is_none_or(|c| c.len() != count) {
                        let fresh =
                            sample_cloud_in(&config.geometry.region, count, &mut stream.rng());
                        redraws += fresh.redraws;
                        cloud = Some(fresh);
                    }
                    receive_voltage(cloud.as_ref().expect("drawn"), config, f)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((values, redraws))
        })
        .collect::<Result<_>>()?;
    Ok(McSamples {
        per_frequency: (0..config.frequencies.len())
            .map(|i| per_realization.iter().map(|row| row.0[i]).collect())
            .collect(),
        redraws: per_realization.iter().map(|row| row.1).sum(),
    })
}

/// Monte-Carlo K-factor sweep with the fixed-count closed form alongside.
pub fn mc_sweep(config: &ScenarioConfig) -> Result<SweepTable> {
    let samples = mc_samples(config)?;
    let mut table = SweepTable::for_scenario(config);
    table.set_meta("redraws", samples.redraws);
    for (&f, row_samples) in config.frequencies.iter().zip(&samples.per_frequency) {
        let sigma = config.scatterer.sigma_avg(f)?;
        table.push(analytic_count_row(config, f)?);
        let est = estimate_k(row_samples)?;
        table.push(SweepRow::from_estimate(
            f,
            Method::Mc,
            &est,
            config.realized_count(f)? as f64,
            config.analytic_radius(),
            sigma,
            config.ensembles,
            config.seed,
        ));
    }
    table.sort();
    Ok(table)
}

/// Row of the fixed-count closed form for `config` at `f`.
pub fn analytic_count_row(config: &ScenarioConfig, f: Frequency) -> Result<SweepRow> {
    let sigma = config.scatterer.sigma_avg(f)?;
    let r_s = config.analytic_radius();
    let n_s = config.analytic_count(f)?;
    let k = analytic::k_fixed_count(config.antenna.directivity_rx, r_s, n_s, sigma);
    Ok(SweepRow::analytic(
        f,
        Method::AnalyticFixedCount,
        k,
        n_s,
        r_s,
        sigma,
        config,
    ))
}
