use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;

use super::assemble::{assemble, AssemblyOptions};
use super::dump::write_kmom1;
use super::mesh::{mesh_ensemble, scatterer_electrical_length, MeshOptions, Wire, WireMesh};
use super::solve::{excite, input_impedance, receive, Source};
use crate::ensemble::{analytic_count_row, estimate_k, sample_cloud_in, RngStream};
use crate::error::{Error, Result};
use crate::scenario::{Frequency, Load, ScenarioConfig, TxPlacement};
use crate::table::{Method, SweepRow, SweepTable};

/// Default cap on scatterers per realization.
pub const DEFAULT_MAX_SCATTERERS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct MomOptions {
    pub mesh: MeshOptions,
    pub assembly: AssemblyOptions,
    pub max_scatterers: usize,
    /// Directory for per-realization `KMOM1` dumps of Z and the currents.
    pub dump_dir: Option<PathBuf>,
}

impl Default for MomOptions {
    fn default() -> Self {
        Self {
            mesh: MeshOptions::default(),
            assembly: AssemblyOptions::default(),
            max_scatterers: DEFAULT_MAX_SCATTERERS,
            dump_dir: None,
        }
    }
}

/// One received sample with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomSample {
    pub value: Complex64,
    pub unknowns: usize,
    pub redraws: usize,
}

/// Input impedance of a lone centre-fed wire of electrical length `l` at `f`.
pub fn isolated_input_impedance(
    l_over_lambda: f64,
    f: Frequency,
    mesh: &MeshOptions,
) -> Result<Complex64> {
    let mesh = WireMesh::from_wires(vec![mesh.wire([0.0; 3], l_over_lambda, f)]);
    input_impedance(&mesh, 0, f)
}

/// Lumped load at the centre of every scatterer for `config` at `f`.
pub fn scatterer_load(
    config: &ScenarioConfig,
    f: Frequency,
    options: &MomOptions,
) -> Result<Option<Complex64>> {
    Ok(match config.scatterer.load {
        Load::Pec => None,
        Load::Matched => {
            let l = scatterer_electrical_length(config)?;
            Some(isolated_input_impedance(l, f, &options.mesh)?.conj())
        }
        Load::Impedance { re_ohm, im_ohm } => Some(Complex64::new(re_ohm, im_ohm)),
    })
}

/// Transmitter wire and source for the scenario's Tx placement.
fn transmitter(config: &ScenarioConfig, f: Frequency, options: &MomOptions) -> (Vec<Wire>, Source) {
    match config.geometry.tx_placement {
        TxPlacement::FarFieldPlaneWave => (Vec::new(), Source::broadside()),
        TxPlacement::InVolumeDipole { distance_m } => (
            vec![options.mesh.wire([-distance_m, 0.0, 0.0], 0.5, f)],
            Source::GapFed {
                wire: 0,
                voltage: Complex64::new(1.0, 0.0),
            },
        ),
    }
}

/// Builds, solves and samples realization `m` of `config` at `f`.
pub fn mom_realization(
    config: &ScenarioConfig,
    f: Frequency,
    m: u64,
    options: &MomOptions,
    load: Option<Complex64>,
) -> Result<MomSample> {
    let count = config.realized_count(f)?;
    if count > options.max_scatterers {
        return Err(Error::InvalidConfig(format!(
            "{count} scatterers exceed the wire-solver limit of {}",
            options.max_scatterers
        )));
    }
    let l = scatterer_electrical_length(config)?;
    let region = &config.geometry.region;
    let mut rng = RngStream::new(config.seed, m).rng();
    let cloud = sample_cloud_in(region, count, &mut rng);
    let (tx, source) = transmitter(config, f, options);
    let n_tx = tx.len();
    let mesh = mesh_ensemble(&cloud, region, l, f, &options.mesh, &tx, &mut rng)?;
    let mut system = assemble(&mesh, f, &options.assembly);
    system.v = excite(&mesh, &source, f);
    if let Some(z) = load {
        for w in n_tx..mesh.wires.len() {
            system.add_load(mesh.center_basis(w), z);
        }
    }
    let dump = options.dump_dir.as_ref().map(|dir| {
        let stem = format!("f{:.0}hz_m{m}", f.hz());
        (
            dir.join(format!("{stem}_z.kmom1")),
            dir.join(format!("{stem}_i.kmom1")),
        )
    });
    if let Some((z_path, _)) = &dump {
        let loads = system.loads.clone();
        let z = &system.z;
        let at = |i: usize, j: usize| {
            let extra: Complex64 = loads
                .iter()
                .filter(|(b, _)| i == j && *b == i)
                .map(|(_, z)| *z)
                .sum();
            z[(i, j)] + extra
        };
        write_kmom1(
            BufWriter::new(File::create(z_path)?),
            system.n(),
            system.n(),
            at,
        )?;
    }
    let unknowns = system.n();
    let currents = system.solve()?;
    if let Some((_, i_path)) = &dump {
        write_kmom1(
            BufWriter::new(File::create(i_path)?),
            currents.len(),
            1,
            |i, _| currents[i],
        )?;
    }
    Ok(MomSample {
        value: receive(&mesh, &currents, &source, f, [0.0; 3]),
        unknowns,
        redraws: mesh.redraws,
    })
}

/// Received samples of all realizations at `f`, in realization order.
pub fn mom_samples(
    config: &ScenarioConfig,
    f: Frequency,
    options: &MomOptions,
) -> Result<Vec<MomSample>> {
    let load = scatterer_load(config, f, options)?;
    (0..config.ensembles)
        .into_par_iter()
        .map(|m| mom_realization(config, f, m, options, load))
        .collect()
}

/// Wire-solver K-factor sweep with the fixed-count closed form alongside.
pub fn mom_k_sweep(config: &ScenarioConfig, options: &MomOptions) -> Result<SweepTable> {
    config.validate()?;
    if let Some(dir) = &options.dump_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut table = SweepTable::for_scenario(config);
    table.set_meta("basis_per_half_wave", options.mesh.basis_per_half_wave);
    table.set_meta("radius_over_lambda", options.mesh.radius_over_lambda);
    table.set_meta("coupling", options.assembly.coupling);
    let load = match config.scatterer.load {
        Load::Pec => "pec".to_string(),
        Load::Matched => "matched".to_string(),
        Load::Impedance { re_ohm, im_ohm } => format!("{re_ohm}{im_ohm:+}j"),
    };
    table.set_meta("load", load);
    let mut redraws = 0;
    for &f in &config.frequencies {
        let samples = mom_samples(config, f, options)?;
        redraws += samples.iter().map(|s| s.redraws).sum::<usize>();
        let values: Vec<Complex64> = samples.iter().map(|s| s.value).collect();
        let est = estimate_k(&values)?;
        table.push(analytic_count_row(config, f)?);
        table.push(SweepRow::from_estimate(
            f,
            Method::Mom,
            &est,
            config.realized_count(f)? as f64,
            config.analytic_radius(),
            config.scatterer.sigma_avg(f)?,
            config.ensembles,
            config.seed,
        ));
        log::info!(
            "{f}: K = {:.2} dB over {} realizations",
            est.k_db(),
            values.len()
        );
    }
    table.set_meta("redraws", redraws);
    table.sort();
    Ok(table)
}
