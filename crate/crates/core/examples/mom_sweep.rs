//! Desk-scale comparison of wire-solver K-factors with the closed form:
//! resonant PEC dipoles in a 30 m cube lit by a broadside plane wave.
//!
//! ```text
//! cargo run --release --example mom_sweep -- [n_scatterers] [ensembles]
//! ```

use kfactor::mom::{mom_k_sweep, MomOptions};
use kfactor::scenario::{GeometrySpec, Population, Region, ScattererSpec, TxPlacement};
use kfactor::{Frequency, Method, ScenarioConfig};

fn main() -> kfactor::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_s: u64 = args
        .next()
        .map_or(10, |a| a.parse().expect("scatterer count"));
    let ensembles: u64 = args
        .next()
        .map_or(50, |a| a.parse().expect("ensemble count"));
    let config = ScenarioConfig {
        geometry: GeometrySpec {
            region: Region::Cube { side_m: 30.0 },
            tx_placement: TxPlacement::FarFieldPlaneWave,
        },
        antenna: Default::default(),
        scatterer: ScattererSpec::half_wave_dipoles(),
        population: Population::FixedCount { n_s },
        frequencies: [0.5, 1.0, 2.0]
            .iter()
            .map(|g| Frequency::from_ghz(*g))
            .collect::<Result<_, _>>()?,
        ensembles,
        seed: 42,
    };
    let start = std::time::Instant::now();
    let table = mom_k_sweep(&config, &MomOptions::default())?;
    println!(
        "N_s = {n_s}, {ensembles} realizations, {:.1} s",
        start.elapsed().as_secs_f64()
    );
    println!("  f (GHz)   analytic (dB)   MoM (dB)   ± (dB)");
    let analytic: Vec<_> = table.rows_for(Method::AnalyticFixedCount).collect();
    for (a, m) in analytic.iter().zip(table.rows_for(Method::Mom)) {
        println!(
            "{:>9.2} {:>15.2} {:>10.2} {:>8.2}",
            a.frequency_hz * 1e-9,
            a.k_db,
            m.k_db,
            m.stderr_db
        );
    }
    Ok(())
}
