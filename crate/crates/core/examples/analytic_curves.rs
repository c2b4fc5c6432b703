//! Closed-form K-factors against frequency for the three population models,
//! preceded by the averaged dipole cross-section table.
//!
//! ```text
//! cargo run --example analytic_curves
//! ```

use kfactor::analytic::{self, TABLED_ELECTRICAL_LENGTHS};
use kfactor::estimate::to_db;
use kfactor::scenario::Packing;
use kfactor::Frequency;

fn main() -> kfactor::Result<()> {
    println!("L/λ    <σ>/λ²");
    for l in TABLED_ELECTRICAL_LENGTHS {
        println!("{l:<6} {:.4}", analytic::avg_dipole_xsec(l)?);
    }

    let r_s = 15.0;
    let d_or = 1.0;
    let packing = Packing::default();
    let sigma_hw = analytic::avg_dipole_xsec(0.5)?;
    println!("\nR_s = {r_s} m, half-wave dipoles, K in dB");
    println!(
        "{:>9} {:>10} {:>10} {:>14} {:>12}",
        "f (GHz)", "N_s=10", "N_s=1000", "ρ=0.1/m³", "max packed"
    );
    for ghz in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        let f = Frequency::from_ghz(ghz)?;
        let sigma = sigma_hw * f.wavelength().powi(2);
        let r_ff = packing.far_field_distance(f)?;
        println!(
            "{ghz:>9} {:>10.2} {:>10.2} {:>14.2} {:>12.2}",
            to_db(analytic::k_fixed_count(d_or, r_s, 10.0, sigma)),
            to_db(analytic::k_fixed_count(d_or, r_s, 1000.0, sigma)),
            to_db(analytic::k_fixed_density(d_or, 0.1, r_s, sigma)),
            to_db(analytic::k_lower_bound(
                d_or,
                r_ff,
                r_s,
                sigma,
                packing.eta_pack
            )),
        );
    }
    Ok(())
}
