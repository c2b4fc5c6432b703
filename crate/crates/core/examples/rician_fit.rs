//! Fits a Rician distribution to simulated envelopes and checks the fit with
//! a Kolmogorov-Smirnov distance.
//!
//! ```text
//! cargo run --release --example rician_fit
//! ```

use kfactor::ensemble::mc_samples;
use kfactor::scenario::{GeometrySpec, Population, Region, ScattererSpec};
use kfactor::stats::{fit_rician, ks_critical_1pct, ks_distance};
use kfactor::{Frequency, ScenarioConfig};

fn main() -> kfactor::Result<()> {
    // a sparse cloud at low frequency keeps K moderate
    let config = ScenarioConfig {
        geometry: GeometrySpec {
            region: Region::Sphere { radius_m: 3.0 },
            tx_placement: Default::default(),
        },
        antenna: Default::default(),
        scatterer: ScattererSpec::half_wave_dipoles(),
        population: Population::FixedCount { n_s: 50 },
        frequencies: vec![Frequency::from_ghz(0.3)?],
        ensembles: 20_000,
        seed: 7,
    };
    let f = config.frequencies[0];
    let k_model = kfactor::analytic::k_fixed_count(
        1.0,
        config.analytic_radius(),
        50.0,
        config.scatterer.sigma_avg(f)?,
    );
    let samples = mc_samples(&config)?;
    let envelopes: Vec<f64> = samples.per_frequency[0].iter().map(|v| v.norm()).collect();
    let fit = fit_rician(&envelopes)?;
    let d = ks_distance(&envelopes, &fit.params);
    println!("closed-form K  {k_model:.3}");
    println!("fitted K       {:.3} ({:?})", fit.params.k(), fit.method);
    println!("fitted power   {:.4}", fit.params.total_power());
    println!(
        "KS distance    {d:.4} (1% critical {:.4})",
        ks_critical_1pct(envelopes.len())
    );
    Ok(())
}
