//! Wire-solver K-factors for PEC and matched scatterers, with a distant and
//! an in-volume transmitter.
//!
//! ```text
//! cargo run --release --example mom_variants -- [ensembles]
//! ```

use kfactor::mom::{mom_k_sweep, MomOptions};
use kfactor::scenario::{GeometrySpec, Load, Population, Region, ScattererSpec, TxPlacement};
use kfactor::{Frequency, Method, ScenarioConfig};

fn main() -> kfactor::Result<()> {
    let ensembles: u64 = std::env::args()
        .nth(1)
        .map_or(50, |a| a.parse().expect("ensemble count"));
    let base = ScenarioConfig {
        geometry: GeometrySpec {
            region: Region::Cube { side_m: 30.0 },
            tx_placement: TxPlacement::FarFieldPlaneWave,
        },
        antenna: Default::default(),
        scatterer: ScattererSpec::half_wave_dipoles(),
        population: Population::FixedCount { n_s: 10 },
        frequencies: [0.5, 1.0, 2.0]
            .iter()
            .map(|g| Frequency::from_ghz(*g))
            .collect::<Result<_, _>>()?,
        ensembles,
        seed: 42,
    };
    let variants = [
        ("plane wave, PEC", TxPlacement::FarFieldPlaneWave, Load::Pec),
        (
            "plane wave, matched",
            TxPlacement::FarFieldPlaneWave,
            Load::Matched,
        ),
        (
            "in-volume Tx, PEC",
            TxPlacement::InVolumeDipole { distance_m: 7.5 },
            Load::Pec,
        ),
    ];
    for (name, tx, load) in variants {
        let mut config = base.clone();
        config.geometry.tx_placement = tx;
        config.scatterer.load = load;
        let table = mom_k_sweep(&config, &MomOptions::default())?;
        let ks: Vec<String> = table
            .rows_for(Method::Mom)
            .map(|r| format!("{:6.2}", r.k_db))
            .collect();
        println!("{name:<22} K (dB) at 0.5/1/2 GHz: {}", ks.join(" "));
    }
    Ok(())
}
