//! Batch front-end behind the `kfactor` binary.
//!
//! Exit codes: 0 on success, 1 for invalid input (bad flags, unreadable or
//! invalid scenario), 2 when a run fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{self, TABLED_ELECTRICAL_LENGTHS};
use crate::ensemble::mc_sweep;
use crate::error::{Error, Result};
use crate::mom::{mom_k_sweep, MomOptions};
use crate::scenario::{Frequency, Load, Population, ScenarioConfig, TxPlacement};
use crate::stats::fit_rician;
use crate::table::{Method, SweepRow, SweepTable};

#[derive(Debug, Parser)]
#[command(
    name = "kfactor",
    version,
    about = "Rician K-factor of random scatterer clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form K-factors (fixed count, fixed density, packing bound).
    Analytic(RunArgs),
    /// Monte-Carlo ensemble K-factors.
    Mc(RunArgs),
    /// Thin-wire method-of-moments K-factors.
    Mom(RunArgs),
    /// Averaged dipole cross-sections for the tabulated electrical lengths.
    XsecTable {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit Rician parameters to a CSV column of envelope samples.
    Fit {
        envelopes: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the frequency grid, comma separated, in GHz.
    #[arg(long, value_delimiter = ',')]
    pub freq_ghz: Option<Vec<f64>>,
    /// Overrides the number of realizations.
    #[arg(long)]
    pub ensembles: Option<u64>,
    /// Keep only rows of this method.
    #[arg(long)]
    pub method: Option<Method>,
    /// Transmitter placement.
    #[arg(long, value_enum)]
    pub tx: Option<TxArg>,
    /// Load at the centre of every scatterer (wire solver only).
    #[arg(long, value_enum)]
    pub load: Option<LoadArg>,
}

impl clap::builder::ValueParserFactory for Method {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Method>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TxArg {
    Planewave,
    Involume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoadArg {
    Pec,
    Matched,
}

impl RunArgs {
    /// Loads the scenario and applies the command-line overrides.
    ///
    /// The seed comes from `--seed`, then the file, then the default.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", self.config.display())))?;
        let mut config: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", self.config.display())))?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(ghz) = &self.freq_ghz {
            config.frequencies = ghz
                .iter()
                .map(|g| Frequency::from_ghz(*g))
                .collect::<Result<_>>()?;
        }
        if let Some(m) = self.ensembles {
            config.ensembles = m;
        }
        match self.tx {
            Some(TxArg::Planewave) => config.geometry.tx_placement = TxPlacement::FarFieldPlaneWave,
            Some(TxArg::Involume)
                if !matches!(
                    config.geometry.tx_placement,
                    TxPlacement::InVolumeDipole { .. }
                ) =>
            {
                config.geometry.tx_placement = TxPlacement::InVolumeDipole {
                    distance_m: 0.5 * config.analytic_radius(),
                };
            }
            _ => {}
        }
        match self.load {
            Some(LoadArg::Pec) => config.scatterer.load = Load::Pec,
            Some(LoadArg::Matched) => config.scatterer.load = Load::Matched,
            None => {}
        }
        let report = config.validate()?;
        for v in &report.violations {
            log::warn!("{}", v.message);
        }
        Ok(config)
    }
}

/// Closed-form rows for every frequency of the scenario.
pub fn analytic_sweep(config: &ScenarioConfig) -> Result<SweepTable> {
    config.validate()?;
    let mut table = SweepTable::for_scenario(config);
    let packing = config.population.packing();
    let d_or = config.antenna.directivity_rx;
    let r_s = config.analytic_radius();
    for &f in &config.frequencies {
        let sigma = config.scatterer.sigma_avg(f)?;
        let n_s = config.analytic_count(f)?;
        let rho = match config.population {
            Population::FixedDensity { rho_per_m3 } => rho_per_m3,
            _ => analytic::density_of(n_s, r_s),
        };
        let r_ff = packing.far_field_distance(f)?;
        let rows = [
            (
                Method::AnalyticFixedCount,
                analytic::k_fixed_count(d_or, r_s, n_s, sigma),
                n_s,
            ),
            (
                Method::AnalyticFixedDensity,
                analytic::k_fixed_density(d_or, rho, r_s, sigma),
                n_s,
            ),
            (
                Method::AnalyticLowerBound,
                analytic::k_lower_bound(d_or, r_ff, r_s, sigma, packing.eta_pack),
                analytic::packed_count(r_s, r_ff, packing.eta_pack),
            ),
        ];
        for (method, k, n) in rows {
            table.push(SweepRow::analytic(f, method, k, n, r_s, sigma, config));
        }
    }
    table.sort();
    Ok(table)
}

/// Table of averaged dipole cross-sections, `σ/λ²` per electrical length.
pub fn xsec_table() -> Result<Vec<(f64, f64)>> {
    TABLED_ELECTRICAL_LENGTHS
        .iter()
        .map(|&l| Ok((l, analytic::avg_dipole_xsec(l)?)))
        .collect()
}

/// Reads envelope samples: first column of a CSV, `#` comments and a
/// non-numeric header line are skipped.
pub fn read_envelopes(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let Some(cell) = record.get(0) else { continue };
        match cell.trim().parse::<f64>() {
            Ok(x) => out.push(x),
            Err(_) if i == 0 => {}
            Err(_) => {
                return Err(Error::InvalidConfig(format!(
                    "line {}: '{cell}' is not a number",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn finish(args: &RunArgs, mut table: SweepTable) -> Result<()> {
    if let Some(m) = args.method {
        table.retain_method(m);
        table.set_meta("method", m.as_str());
    }
    emit(args.out.as_deref(), &table.to_csv_string()?)
}

/// Executes one parsed command.
pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analytic(args) => {
            let config = args.scenario()?;
            log::info!("seed = {}", config.seed);
            finish(args, analytic_sweep(&config)?)
        }
        Command::Mc(args) => {
            let config = args.scenario()?;
            log::info!("seed = {}", config.seed);
            finish(args, mc_sweep(&config)?)
        }
        Command::Mom(args) => {
            let config = args.scenario()?;
            log::info!("seed = {}", config.seed);
            finish(args, mom_k_sweep(&config, &MomOptions::default())?)
        }
        Command::XsecTable { out } => {
            let mut text = String::from("l_over_lambda,sigma_over_lambda2\r\n");
            for (l, s) in xsec_table()? {
                text.push_str(&format!("{l:.1},{s:.4}\r\n"));
            }
            emit(out.as_deref(), &text)
        }
        Command::Fit { envelopes, out } => {
            let samples = read_envelopes(envelopes)?;
            let fit = fit_rician(&samples)?;
            let mut json = serde_json::to_string_pretty(&fit)?;
            json.push('\n');
            emit(out.as_deref(), &json)
        }
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
