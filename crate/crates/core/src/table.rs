//! K-factor sweep results and their CSV form.
//!
//! The CSV starts with a block of `# key=value` lines describing the run,
//! followed by a fixed header row and one row per (method, frequency).
//! Infinite values are written as `inf`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimate::{to_db, KFactorEstimate};
use crate::scenario::{Frequency, ScenarioConfig, TxPlacement};

/// Column order of the CSV body.
pub const COLUMNS: [&str; 10] = [
    "frequency_hz",
    "method",
    "k_linear",
    "k_db",
    "stderr_db",
    "n_s",
    "r_s_m",
    "sigma_avg_m2",
    "ensembles",
    "seed",
];

/// Source of a K value. The declaration order is the row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AnalyticFixedCount,
    AnalyticFixedDensity,
    AnalyticLowerBound,
    Mc,
    Mom,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::AnalyticFixedCount => "analytic_fixed_count",
            Method::AnalyticFixedDensity => "analytic_fixed_density",
            Method::AnalyticLowerBound => "analytic_lower_bound",
            Method::Mc => "mc",
            Method::Mom => "mom",
        }
    }

    pub fn is_analytic(self) -> bool {
        matches!(
            self,
            Method::AnalyticFixedCount | Method::AnalyticFixedDensity | Method::AnalyticLowerBound
        )
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            Method::AnalyticFixedCount,
            Method::AnalyticFixedDensity,
            Method::AnalyticLowerBound,
            Method::Mc,
            Method::Mom,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| format!("unknown method '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub frequency_hz: f64,
    pub method: Method,
    pub k_linear: f64,
    pub k_db: f64,
    pub stderr_db: f64,
    pub n_s: f64,
    pub r_s_m: f64,
    pub sigma_avg_m2: f64,
    /// Realizations behind the value; zero for closed forms.
    pub ensembles: u64,
    pub seed: u64,
}

impl SweepRow {
    /// Row for a closed-form value.
    pub fn analytic(
        f: Frequency,
        method: Method,
        k: f64,
        n_s: f64,
        r_s: f64,
        sigma: f64,
        config: &ScenarioConfig,
    ) -> Self {
        Self {
            frequency_hz: f.hz(),
            method,
            k_linear: k,
            k_db: to_db(k),
            stderr_db: 0.0,
            n_s,
            r_s_m: r_s,
            sigma_avg_m2: sigma,
            ensembles: 0,
            seed: config.seed,
        }
    }

    /// Row for an ensemble estimate.
    #[allow(clippy::too_many_arguments)]
    pub fn from_estimate(
        f: Frequency,
        method: Method,
        est: &KFactorEstimate,
        n_s: f64,
        r_s: f64,
        sigma: f64,
        ensembles: u64,
        seed: u64,
    ) -> Self {
        Self {
            frequency_hz: f.hz(),
            method,
            k_linear: est.k_linear(),
            k_db: est.k_db(),
            stderr_db: est.stderr_db(),
            n_s,
            r_s_m: r_s,
            sigma_avg_m2: sigma,
            ensembles,
            seed,
        }
    }
}

/// Rows of a sweep plus the metadata written into the CSV header block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    metadata: Vec<(String, String)>,
    rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty table whose header describes `config`.
    pub fn for_scenario(config: &ScenarioConfig) -> Self {
        let mut t = Self::new();
        t.set_meta("tool", env!("CARGO_PKG_NAME"));
        t.set_meta("version", env!("CARGO_PKG_VERSION"));
        t.set_meta("config_hash", config.config_hash());
        t.set_meta("seed", config.seed);
        t.set_meta("ensembles", config.ensembles);
        t.set_meta("region", config.geometry.region.label());
        let tx = match config.geometry.tx_placement {
            TxPlacement::FarFieldPlaneWave => "planewave".to_string(),
            TxPlacement::InVolumeDipole { distance_m } => format!("involume:{distance_m}"),
        };
        t.set_meta("tx", tx);
        t
    }

    /// Sets or replaces a header entry, keeping first-insertion order.
    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace(['\n', '\r'], " ");
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: SweepRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = SweepRow>) {
        self.rows.extend(rows);
    }

    /// Orders rows by method, then frequency.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.method
                .cmp(&b.method)
                .then(a.frequency_hz.total_cmp(&b.frequency_hz))
        });
    }

    /// Drops every row not produced by `method`.
    pub fn retain_method(&mut self, method: Method) {
        self.rows.retain(|r| r.method == method);
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &SweepRow> + '_ {
        self.rows.iter().filter(move |r| r.method == method)
    }

    /// Least-squares slope of log10 K against log10 f for one method.
    pub fn loglog_slope(&self, method: Method) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows_for(method)
            .filter(|r| r.k_linear > 0.0 && r.k_linear.is_finite())
            .map(|r| (r.frequency_hz.log10(), r.k_linear.log10()))
            .collect();
        loglog_fit(&pts)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}").expect("write to string");
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                num(r.frequency_hz),
                r.method.as_str().to_string(),
                num(r.k_linear),
                num(r.k_db),
                num(r.stderr_db),
                num(r.n_s),
                num(r.r_s_m),
                num(r.sigma_avg_m2),
                r.ensembles.to_string(),
                r.seed.to_string(),
            ])?;
        }
        let body = w
            .into_inner()
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_csv_string()?.as_bytes())?;
        Ok(())
    }
}

/// Slope of the least-squares line through `(x, y)` points.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        // shortest representation that round-trips
        format!("{x:?}")
    }
}
