//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use kfactor::analytic::{self, RicianParams};
use kfactor::ensemble::{mc_sweep, sample_cloud_in, RngStream};
use kfactor::mom::{
    assemble, cross_section, excite, mom_k_sweep, mom_realization, AssemblyMode, AssemblyOptions,
    MeshOptions, MomOptions, Source, WireMesh, ETA0,
};
use kfactor::scenario::{GeometrySpec, Load, Population, Region, ScattererSpec, TxPlacement};
use kfactor::stats::fit_rician;
use kfactor::{Frequency, Method, ScenarioConfig, SweepTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;

fn ghz(g: f64) -> Frequency {
    Frequency::from_ghz(g).unwrap()
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.log10(), y.log10())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `<σ>/λ²` of a half-wave dipole as tabulated.
const SIGMA_HALF_WAVE: f64 = 0.1527;

fn k_oracle(n_s: f64, r_s: f64, f: Frequency) -> f64 {
    8.0 * PI * r_s * r_s / (3.0 * n_s * SIGMA_HALF_WAVE * f.wavelength().powi(2))
}

fn sphere(n_s: u64, freqs: &[f64], ensembles: u64, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        geometry: GeometrySpec {
            region: Region::Sphere { radius_m: 15.0 },
            tx_placement: TxPlacement::FarFieldPlaneWave,
        },
        antenna: Default::default(),
        scatterer: ScattererSpec::half_wave_dipoles(),
        population: Population::FixedCount { n_s },
        frequencies: freqs.iter().map(|&g| ghz(g)).collect(),
        ensembles,
        seed,
    }
}

fn cube(n_s: u64, ensembles: u64) -> ScenarioConfig {
    ScenarioConfig {
        geometry: GeometrySpec {
            region: Region::Cube { side_m: 30.0 },
            tx_placement: TxPlacement::FarFieldPlaneWave,
        },
        antenna: Default::default(),
        scatterer: ScattererSpec::half_wave_dipoles(),
        population: Population::FixedCount { n_s },
        frequencies: vec![ghz(0.5), ghz(1.0), ghz(2.0)],
        ensembles,
        seed: 42,
    }
}

fn k_db_of(table: &SweepTable, method: Method) -> Vec<(f64, f64)> {
    table
        .rows_for(method)
        .map(|r| (r.frequency_hz, r.k_db))
        .collect()
}

fn table_i() -> Outcome {
    let expected = [
        (0.5, 0.1527),
        (1.5, 0.1835),
        (2.5, 0.2183),
        (3.5, 0.2510),
        (4.5, 0.2819),
    ];
    let mut worst: f64 = 0.0;
    for (l, s) in expected {
        worst = worst.max((analytic::avg_dipole_xsec(l).map_err(|e| e.to_string())? - s).abs());
    }
    check(worst <= 1e-4, format!("max |Δ| = {worst:.2e} (tol 1e-4)"))
}

fn identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d: f64 = rng.random_range(0.5..5.0);
        let r_s: f64 = rng.random_range(1.0..200.0);
        let n_s: f64 = rng.random_range(1.0..1e5);
        let sigma: f64 = rng.random_range(1e-6..1.0);
        let r_ff: f64 = rng.random_range(1e-3..1.0);
        let eta: f64 = rng.random_range(0.3..0.74);
        let rho = n_s / (4.0 / 3.0 * PI * r_s.powi(3));
        let a = analytic::k_fixed_count(d, r_s, n_s, sigma);
        let b = analytic::k_fixed_density(d, rho, r_s, sigma);
        worst = worst.max((a - b).abs() / a);
        let n_packed = 8.0 * eta * r_s.powi(3) / r_ff.powi(3);
        let c = analytic::k_fixed_count(d, r_s, n_packed, sigma);
        let e = analytic::k_lower_bound(d, r_ff, r_s, sigma, eta);
        worst = worst.max((c - e).abs() / c);
    }
    check(
        worst <= 1e-12,
        format!("max relative error {worst:.2e} over 1000 draws (tol 1e-12)"),
    )
}

fn frequency_scaling() -> Outcome {
    let grid = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    let config = sphere(100, &grid, 10_000, 42);
    let analytic: Vec<(f64, f64)> = config
        .frequencies
        .iter()
        .map(|&f| {
            let sigma = config.scatterer.sigma_avg(f).unwrap();
            (f.hz(), analytic::k_fixed_count(1.0, 15.0, 100.0, sigma))
        })
        .collect();
    let table = mc_sweep(&config).map_err(|e| e.to_string())?;
    let mc: Vec<(f64, f64)> = table
        .rows_for(Method::Mc)
        .map(|r| (r.frequency_hz, r.k_linear))
        .collect();
    let (sa, sm) = (slope(&analytic), slope(&mc));
    check(
        (sa - 2.0).abs() <= 1e-3 && (sm - 2.0).abs() <= 0.2,
        format!("analytic slope {sa:.5} (2 ± 0.001), MC slope {sm:.3} (2 ± 0.2)"),
    )
}

fn mc_matches_closed_form() -> Outcome {
    let grid = [0.5, 1.0, 2.0, 5.0, 10.0];
    let mut worst: f64 = 0.0;
    for n_s in [10, 100, 1000] {
        let config = sphere(n_s, &grid, 100_000, 42);
        let table = mc_sweep(&config).map_err(|e| e.to_string())?;
        for r in table.rows_for(Method::Mc) {
            let oracle = db(k_oracle(
                n_s as f64,
                15.0,
                Frequency::new(r.frequency_hz).unwrap(),
            ));
            worst = worst.max((r.k_db - oracle).abs());
        }
    }
    check(
        worst <= 0.5,
        format!("max |K_MC − K| = {worst:.3} dB over 15 points (tol 0.5 dB)"),
    )
}

fn appendix_identities() -> Outcome {
    let n = 1_000_000;
    let r_s = 15.0;
    let mut rng = RngStream::new(42, 0).rng();
    let cloud = sample_cloud_in(&Region::Sphere { radius_m: r_s }, n, &mut rng);
    let inv_rho2 = cloud
        .positions
        .iter()
        .map(|p| 1.0 / (p.rho * p.rho))
        .sum::<f64>()
        / n as f64;
    let cosines: Vec<f64> = cloud.mismatch_angles.iter().map(|a| a.cos()).collect();
    let mean_cos = cosines.iter().sum::<f64>() / n as f64;
    let mean_cos2 = cosines.iter().map(|c| c * c).sum::<f64>() / n as f64;
    let sd_cos = (mean_cos2 - mean_cos * mean_cos).sqrt() / (n as f64).sqrt();
    let rel = (inv_rho2 - 3.0 / (r_s * r_s)).abs() / (3.0 / (r_s * r_s));
    check(
        rel <= 0.01 && mean_cos.abs() <= 4.0 * sd_cos && (mean_cos2 - 0.5).abs() <= 0.01,
        format!(
            "<1/ρ²> off by {:.3}%, <cos ψ> = {mean_cos:.2e} ({:.2} s.e.), <cos²ψ> = {mean_cos2:.4}",
            100.0 * rel,
            mean_cos.abs() / sd_cos
        ),
    )
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn rician_envelopes(k: f64, p: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nu = (k * p / (k + 1.0)).sqrt();
    let s = (p / (2.0 * (k + 1.0))).sqrt();
    let normal = Normal::new(0.0, s).unwrap();
    (0..n)
        .map(|_| {
            let x = nu + normal.sample(&mut rng);
            let y = normal.sample(&mut rng);
            (x * x + y * y).sqrt()
        })
        .collect()
}

fn rician_machinery() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [0.0, 1.0, 10.0, 100.0] {
        let params = RicianParams::new(k, 1.0).map_err(|e| e.to_string())?;
        let upper = (k / (k + 1.0)).sqrt() + 12.0 / (2.0 * (k + 1.0)).sqrt();
        let total = simpson(|x| analytic::rician_pdf(x, &params), 0.0, upper, 200_000);
        worst = worst.max((total - 1.0).abs());
    }
    let fit10 =
        fit_rician(&rician_envelopes(10.0, 2.5, 1_000_000, 5)).map_err(|e| e.to_string())?;
    let fit0 = fit_rician(&rician_envelopes(0.0, 1.0, 1_000_000, 6)).map_err(|e| e.to_string())?;
    let (k10, k0) = (fit10.params.k(), fit0.params.k());
    check(
        worst <= 1e-9 && (k10 - 10.0).abs() <= 0.3 && k0 < 0.02,
        format!("pdf mass error {worst:.1e}, K̂(10) = {k10:.3}, K̂(0) = {k0:.4}"),
    )
}

/// Broadside backscatter of a short-circuited half-wave dipole with a
/// sinusoidal current (induced EMF), in units of λ².
fn induced_emf_rcs() -> f64 {
    let x = 2.0 * PI;
    let (mut si, mut cin) = (0.0, 0.0);
    let mut fact = 1.0;
    for n in 1..40 {
        let odd = 2 * n - 1;
        let even = 2 * n;
        fact *= odd as f64;
        si += (-1f64).powi(n + 1) * x.powi(odd) / (odd as f64 * fact);
        fact *= even as f64;
        cin += (-1f64).powi(n + 1) * x.powi(even) / (even as f64 * fact);
    }
    let c = ETA0 / (4.0 * PI);
    let (r, xr) = (c * cin, c * si);
    let directivity = ETA0 / (PI * r);
    directivity.powi(2) * r * r / (PI * (r * r + xr * xr))
}

fn mom_validation() -> Outcome {
    let f = ghz(1.0);
    let lambda = f.wavelength();
    let opts = MeshOptions::default();

    let cluster = WireMesh::from_wires(vec![
        opts.wire([0.0; 3], 0.5, f),
        opts.wire([0.4, 0.1, 0.02], 0.5, f),
        opts.wire([-1.1, 0.7, -0.05], 0.5, f),
    ]);
    let full = assemble(
        &cluster,
        f,
        &AssemblyOptions {
            mode: AssemblyMode::Full,
            coupling: true,
        },
    );
    let asym = full.max_asymmetry();

    let single = WireMesh::from_wires(vec![opts.wire([0.0; 3], 0.5, f)]);
    let mut sys = assemble(&single, f, &AssemblyOptions::default());
    sys.v = excite(&single, &Source::broadside(), f);
    let currents = sys.solve().map_err(|e| e.to_string())?;
    let rcs = cross_section(&single, &currents, f, [-1.0, 0.0, 0.0]) / (lambda * lambda);
    let oracle = induced_emf_rcs();
    let rcs_err = (rcs - oracle).abs() / oracle;

    let config = cube(10, 8);
    let coarse = MomOptions::default();
    let fine = MomOptions {
        mesh: MeshOptions {
            basis_per_half_wave: 2 * (opts.basis_per_half_wave + 1) - 1,
            ..opts
        },
        ..MomOptions::default()
    };
    let mut mesh_change: f64 = 0.0;
    let mut scattered_change: f64 = 0.0;
    for m in 0..config.ensembles {
        let a = mom_realization(&config, f, m, &coarse, None)
            .map_err(|e| e.to_string())?
            .value;
        let b = mom_realization(&config, f, m, &fine, None)
            .map_err(|e| e.to_string())?
            .value;
        mesh_change = mesh_change.max((a - b).norm() / b.norm());
        let one = num_complex::Complex64::new(1.0, 0.0);
        scattered_change = scattered_change.max((a - b).norm() / (b - one).norm());
    }
    check(
        asym <= 1e-10 && rcs_err <= 0.05 && mesh_change < 0.01,
        format!(
            "asymmetry {asym:.1e}, RCS {rcs:.4}λ² vs {oracle:.4}λ² ({:.1}%), mesh halving {:.3}% \
             (scattered part {:.2}%)",
            100.0 * rcs_err,
            100.0 * mesh_change,
            100.0 * scattered_change
        ),
    )
}

struct MomRuns {
    pec: Vec<(u64, SweepTable)>,
}

fn mom_runs() -> Result<MomRuns, String> {
    let mut pec = Vec::new();
    for n_s in [10, 100] {
        let table =
            mom_k_sweep(&cube(n_s, 50), &MomOptions::default()).map_err(|e| e.to_string())?;
        pec.push((n_s, table));
    }
    Ok(MomRuns { pec })
}

fn desk_scale_sweep(runs: &MomRuns) -> Outcome {
    let mut same_sign = true;
    let mut analytic_above = true;
    let mut sq = Vec::new();
    let mut parts = Vec::new();
    for (n_s, table) in &runs.pec {
        let mom = k_db_of(table, Method::Mom);
        let oracle: Vec<(f64, f64)> = mom
            .iter()
            .map(|&(hz, _)| {
                (
                    hz,
                    db(k_oracle(*n_s as f64, 15.0, Frequency::new(hz).unwrap())),
                )
            })
            .collect();
        let lin = |v: &[(f64, f64)]| {
            v.iter()
                .map(|&(f, k)| (f, 10f64.powf(k / 10.0)))
                .collect::<Vec<_>>()
        };
        let (sm, sa) = (slope(&lin(&mom)), slope(&lin(&oracle)));
        same_sign &= sm.signum() == sa.signum();
        for ((_, m), (_, a)) in mom.iter().zip(&oracle) {
            analytic_above &= a > m;
            sq.push((a - m).powi(2));
        }
        parts.push(format!(
            "N_s={n_s}: MoM {} dB",
            mom.iter()
                .map(|(_, k)| format!("{k:.1}"))
                .collect::<Vec<_>>()
                .join("/")
        ));
    }
    let rms = (sq.iter().sum::<f64>() / sq.len() as f64).sqrt();
    check(
        same_sign && analytic_above && (1.0..=6.0).contains(&rms),
        format!(
            "{}; same slope sign {same_sign}, analytic above {analytic_above}, RMS {rms:.2} dB (1..6)",
            parts.join(", ")
        ),
    )
}

fn loaded_and_in_volume(runs: &MomRuns) -> Outcome {
    let (_, pec) = &runs.pec[0];
    let mut matched_cfg = cube(10, 50);
    matched_cfg.scatterer.load = Load::Matched;
    let matched = mom_k_sweep(&matched_cfg, &MomOptions::default()).map_err(|e| e.to_string())?;
    let pec_k = k_db_of(pec, Method::Mom);
    let matched_k = k_db_of(&matched, Method::Mom);
    let higher = pec_k.iter().zip(&matched_k).all(|(p, m)| m.1 > p.1);

    let mut inv_cfg = cube(10, 50);
    inv_cfg.geometry.tx_placement = TxPlacement::InVolumeDipole { distance_m: 7.5 };
    let inv = mom_k_sweep(&inv_cfg, &MomOptions::default()).map_err(|e| e.to_string())?;
    let inv_k = k_db_of(&inv, Method::Mom);
    let increasing = inv_k.windows(2).all(|w| w[1].1 > w[0].1);
    let fmt = |v: &[(f64, f64)]| {
        v.iter()
            .map(|(_, k)| format!("{k:.1}"))
            .collect::<Vec<_>>()
            .join("/")
    };
    check(
        higher && increasing,
        format!(
            "PEC {} dB, matched {} dB, in-volume Tx {} dB",
            fmt(&pec_k),
            fmt(&matched_k),
            fmt(&inv_k)
        ),
    )
}

fn determinism() -> Outcome {
    let run = |threads: usize| -> Result<(String, String), String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| {
            let mc =
                mc_sweep(&sphere(100, &[0.5, 1.0, 2.0], 2000, 9)).map_err(|e| e.to_string())?;
            let mom =
                mom_k_sweep(&cube(5, 12), &MomOptions::default()).map_err(|e| e.to_string())?;
            Ok((mc.to_csv_string().unwrap(), mom.to_csv_string().unwrap()))
        })
    };
    let a = run(1)?;
    let b = run(4)?;
    let c = run(4)?;
    check(
        a == b && b == c,
        format!(
            "MC and MoM CSVs identical for 1 and 4 workers: {}",
            a == b && b == c
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut failures = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome, t: Instant| {
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id:>2} {name}: {detail} ({secs:.1} s)"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {id:>2} {name}: {detail} ({secs:.1} s)");
            }
        }
    };
    let t = Instant::now();
    report(1, "cross-section table", table_i(), t);
    let t = Instant::now();
    report(2, "closed-form identities", identities(), t);
    let t = Instant::now();
    report(3, "frequency scaling", frequency_scaling(), t);
    let t = Instant::now();
    report(4, "MC vs closed form", mc_matches_closed_form(), t);
    let t = Instant::now();
    report(5, "sampling identities", appendix_identities(), t);
    let t = Instant::now();
    report(6, "Rician pdf and fit", rician_machinery(), t);
    let t = Instant::now();
    report(7, "MoM validation", mom_validation(), t);
    let t = Instant::now();
    match mom_runs() {
        Ok(runs) => {
            report(8, "desk-scale MoM sweep", desk_scale_sweep(&runs), t);
            let t = Instant::now();
            report(
                9,
                "loaded and in-volume variants",
                loaded_and_in_volume(&runs),
                t,
            );
        }
        Err(e) => {
            report(8, "desk-scale MoM sweep", Err(e.clone()), t);
            report(9, "loaded and in-volume variants", Err(e), t);
        }
    }
    let t = Instant::now();
    report(10, "determinism", determinism(), t);
    println!(
        "{failures} failed, total {:.1} s",
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
