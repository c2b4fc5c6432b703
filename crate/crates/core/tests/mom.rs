use std::f64::consts::PI;

use kfactor::ensemble::{estimate_k, sample_cloud_in, RngStream};
use kfactor::mom::solve::receive;
use kfactor::mom::{
    assemble, excite, input_impedance, mesh_ensemble, mom_samples, AssemblyMode, AssemblyOptions,
    MeshOptions, MomOptions, Source, WireMesh, ETA0,
};
use kfactor::scenario::{GeometrySpec, Load, Population, Region, ScattererSpec, TxPlacement};
use kfactor::{Frequency, ScenarioConfig};
use num_complex::Complex64;

fn ghz(g: f64) -> Frequency {
    Frequency::from_ghz(g).unwrap()
}

fn half_wave(center: [f64; 3], f: Frequency) -> kfactor::mom::Wire {
    MeshOptions::default().wire(center, 0.5, f)
}

fn solve(mesh: &WireMesh, f: Frequency, source: &Source, opts: &AssemblyOptions) -> Vec<Complex64> {
    let mut sys = assemble(mesh, f, opts);
    sys.v = excite(mesh, source, f);
    sys.solve().unwrap()
}

#[test]
fn gap_fed_transfer_is_reciprocal() {
    let f = ghz(1.0);
    let mesh = WireMesh::from_wires(vec![
        half_wave([0.0, 0.0, 0.0], f),
        half_wave([0.7, 0.4, 0.05], f),
        half_wave([-0.3, 0.9, -0.1], f),
    ]);
    let opts = AssemblyOptions {
        mode: AssemblyMode::Full,
        coupling: true,
    };
    let one = Complex64::new(1.0, 0.0);
    let from_0 = solve(
        &mesh,
        f,
        &Source::GapFed {
            wire: 0,
            voltage: one,
        },
        &opts,
    );
    let from_1 = solve(
        &mesh,
        f,
        &Source::GapFed {
            wire: 1,
            voltage: one,
        },
        &opts,
    );
    let y10 = from_0[mesh.center_basis(1)];
    let y01 = from_1[mesh.center_basis(0)];
    assert!((y10 - y01).norm() <= 1e-8 * y10.norm(), "{y10} vs {y01}");
}

#[test]
fn gap_fed_dipole_field_matches_closed_form() {
    // a sinusoidal half-wave current radiating the same power as the MoM
    // current gives E_z = -j η I0 e^{-jkR1} / (2π R1) on the broadside plane,
    // with R1 the distance to either wire end
    let f = ghz(1.0);
    let r_t = 7.5;
    let mesh = WireMesh::from_wires(vec![half_wave([-r_t, 0.0, 0.0], f)]);
    let source = Source::GapFed {
        wire: 0,
        voltage: Complex64::new(1.0, 0.0),
    };
    let currents = solve(&mesh, f, &source, &AssemblyOptions::default());
    let z_in = 1.0 / currents[mesh.center_basis(0)];
    let i_feed = currents[mesh.center_basis(0)].norm();
    let radiation_resistance = 73.13;
    let i0 = i_feed * (z_in.re / radiation_resistance).sqrt();
    let half = mesh.wires[0].length / 2.0;
    let r1 = (r_t * r_t + half * half).sqrt();
    let oracle = ETA0 * i0 / (2.0 * PI * r1);
    let e = receive(&mesh, &currents, &source, f, [0.0; 3]);
    assert!(
        (e.norm() - oracle).abs() < 0.01 * oracle,
        "{} vs {oracle}",
        e.norm()
    );
}

#[test]
fn sparse_clouds_are_single_scattering() {
    let f = ghz(1.0);
    let lambda = f.wavelength();
    let spacing = 10.0 * lambda;
    let mesh = WireMesh::from_wires(vec![
        half_wave([spacing, 0.0, 0.0], f),
        half_wave([0.0, spacing, 0.1], f),
        half_wave([-spacing, 0.3, -0.2], f),
        half_wave([0.2, -spacing, 0.0], f),
    ]);
    let src = Source::broadside();
    let scattered = |coupling: bool| {
        let i = solve(
            &mesh,
            f,
            &src,
            &AssemblyOptions {
                coupling,
                ..Default::default()
            },
        );
        receive(&mesh, &i, &src, f, [0.0; 3]) - Complex64::new(1.0, 0.0)
    };
    let coupled = scattered(true);
    let single = scattered(false);
    let rel = (coupled - single).norm() / single.norm();
    assert!(rel < 0.05, "relative difference {rel}");
}

#[test]
fn mutual_impedance_decay() {
    let f = ghz(1.0);
    let lambda = f.wavelength();
    let mutual = |offset: [f64; 3]| {
        let mesh = WireMesh::from_wires(vec![half_wave([0.0; 3], f), half_wave(offset, f)]);
        let sys = assemble(&mesh, f, &AssemblyOptions::default());
        sys.z[(mesh.center_basis(0), mesh.center_basis(1))].norm()
    };
    // side by side the coupling is a radiation field, 1/r
    let d = 20.0 * lambda;
    let ratio = mutual([d, 0.0, 0.0]) / mutual([2.0 * d, 0.0, 0.0]);
    assert!((ratio - 2.0).abs() < 0.02, "broadside ratio {ratio}");
    // end to end a z-directed current has no radiation field, leaving 1/r²
    let ratio = mutual([0.0, 0.0, d]) / mutual([0.0, 0.0, 2.0 * d]);
    assert!((ratio - 4.0).abs() < 0.1, "co-linear ratio {ratio}");
}

fn small_cube(load: Load) -> ScenarioConfig {
    ScenarioConfig {
        geometry: GeometrySpec {
            region: Region::Cube { side_m: 30.0 },
            tx_placement: TxPlacement::FarFieldPlaneWave,
        },
        antenna: Default::default(),
        scatterer: ScattererSpec {
            load,
            ..ScattererSpec::half_wave_dipoles()
        },
        population: Population::FixedCount { n_s: 10 },
        frequencies: vec![ghz(1.0)],
        ensembles: 40,
        seed: 3,
    }
}

#[test]
fn resistive_loads_raise_k() {
    let k_for = |load| {
        let config = small_cube(load);
        let samples = mom_samples(&config, ghz(1.0), &MomOptions::default()).unwrap();
        let v: Vec<Complex64> = samples.iter().map(|s| s.value).collect();
        estimate_k(&v).unwrap().k_linear()
    };
    let mut previous = k_for(Load::Pec);
    for r in [25.0, 100.0, 400.0] {
        let k = k_for(Load::Impedance {
            re_ohm: r,
            im_ohm: 0.0,
        });
        assert!(k >= previous, "{r} Ω: {k} < {previous}");
        previous = k;
    }
}

#[test]
fn matched_impedance_is_conjugate_of_input() {
    let f = ghz(2.0);
    let config = small_cube(Load::Matched);
    let z = kfactor::mom::sweep::scatterer_load(&config, f, &MomOptions::default())
        .unwrap()
        .unwrap();
    let z_in = input_impedance(&WireMesh::from_wires(vec![half_wave([0.0; 3], f)]), 0, f).unwrap();
    assert!((z - z_in.conj()).norm() < 1e-9 * z.norm());
}

#[test]
fn overlaps_are_rare_in_a_dense_cube() {
    // two vertical wires of length L collide when their axes are closer than
    // 2a horizontally and their spans overlap vertically
    let f = ghz(1.0);
    let opts = MeshOptions::default();
    let a = opts.radius_over_lambda * f.wavelength();
    let l = f.wavelength() / 2.0;
    let side: f64 = 30.0;
    let n = 1000.0;
    let pair = PI * (2.0 * a).powi(2) * 2.0 * l / side.powi(3);
    let per_realization = n * (n - 1.0) / 2.0 * pair;
    assert!(per_realization < 1e-4, "{per_realization}");

    let region = Region::Cube { side_m: side };
    let mut redraws = 0;
    for m in 0..20 {
        let mut rng = RngStream::new(11, m).rng();
        let cloud = sample_cloud_in(&region, 1000, &mut rng);
        let mesh = mesh_ensemble(&cloud, &region, 0.5, f, &opts, &[], &mut rng).unwrap();
        assert_eq!(mesh.wires.len(), 1000);
        let h = side / 2.0;
        assert!(mesh
            .wires
            .iter()
            .all(|w| w.center.iter().all(|c| c.abs() <= h)));
        redraws += mesh.redraws;
    }
    assert_eq!(redraws, 0);
}
