//! Monte-Carlo K-factors next to the closed form for a scenario file.
//!
//! ```text
//! cargo run --release --example mc_sweep -- [scenario.json]
//! ```

use kfactor::ensemble::mc_sweep;
use kfactor::{Method, ScenarioConfig};

fn main() -> kfactor::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/scenarios/sphere_n100.json"
        )
        .into()
    });
    let config = ScenarioConfig::from_path(&path)?;
    for v in config.validate()?.violations {
        eprintln!("warning: {}", v.message);
    }
    let table = mc_sweep(&config)?;
    println!(
        "{path}: {} realizations, seed {}",
        config.ensembles, config.seed
    );
    println!(
        "{:>9} {:>13} {:>9} {:>8}",
        "f (GHz)", "analytic (dB)", "MC (dB)", "± (dB)"
    );
    for (a, m) in table
        .rows_for(Method::AnalyticFixedCount)
        .zip(table.rows_for(Method::Mc))
    {
        println!(
            "{:>9.2} {:>13.2} {:>9.2} {:>8.3}",
            a.frequency_hz * 1e-9,
            a.k_db,
            m.k_db,
            m.stderr_db
        );
    }
    if let (Some(a), Some(m)) = (
        table.loglog_slope(Method::AnalyticFixedCount),
        table.loglog_slope(Method::Mc),
    ) {
        println!("log-log slope: analytic {a:.3}, MC {m:.3}");
    }
    Ok(())
}
