//! Single half-wave wire: input impedance, broadside cross-section and
//! their convergence under mesh refinement.
//!
//! ```text
//! cargo run --release --example mom_dipole
//! ```

use kfactor::mom::{
    assemble, cross_section, excite, input_impedance, AssemblyOptions, MeshOptions, Source,
    WireMesh,
};
use kfactor::Frequency;

fn main() -> kfactor::Result<()> {
    let f = Frequency::from_ghz(1.0)?;
    let lambda = f.wavelength();
    println!("n_basis   Z_in (ohm)            RCS/λ²");
    for n_basis in [11, 21, 41, 81] {
        let opts = MeshOptions {
            basis_per_half_wave: n_basis,
            ..MeshOptions::default()
        };
        let mesh = WireMesh::from_wires(vec![opts.wire([0.0; 3], 0.5, f)]);
        let z_in = input_impedance(&mesh, 0, f)?;
        let mut system = assemble(&mesh, f, &AssemblyOptions::default());
        system.v = excite(&mesh, &Source::broadside(), f);
        let currents = system.solve()?;
        let rcs = cross_section(&mesh, &currents, f, [-1.0, 0.0, 0.0]);
        println!(
            "{n_basis:>7}   {:>7.2} {:+8.2}j      {:.4}",
            z_in.re,
            z_in.im,
            rcs / (lambda * lambda)
        );
    }
    Ok(())
}
