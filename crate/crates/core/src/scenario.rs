//! Scenario description shared by the analytic, Monte-Carlo and MoM layers.
//!
//! A scenario is loaded from JSON with the top-level keys `geometry`,
//! `antenna`, `scatterer`, `population`, `frequencies_hz`, `ensembles` and
//! `seed`; unknown keys are rejected at every level.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{
    self, DEFAULT_ALPHA_E, DEFAULT_ETA_PACK, DEFAULT_GAMMA_A, HALF_WAVE_DIPOLE_GAIN,
};
use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Seed used when neither the command line nor the scenario sets one.
pub const DEFAULT_SEED: u64 = 42;

/// A strictly positive frequency in hertz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Frequency(f64);

impl Frequency {
    pub fn new(hz: f64) -> Result<Self> {
        if hz > 0.0 && hz.is_finite() {
            Ok(Self(hz))
        } else {
            Err(Error::InvalidConfig(format!(
                "frequency must be positive and finite, got {hz}"
            )))
        }
    }

    pub fn from_ghz(ghz: f64) -> Result<Self> {
        Self::new(ghz * 1e9)
    }

    pub fn hz(self) -> f64 {
        self.0
    }

    pub fn ghz(self) -> f64 {
        self.0 * 1e-9
    }

    pub fn wavelength(self) -> f64 {
        SPEED_OF_LIGHT / self.0
    }

    pub fn wavenumber(self) -> f64 {
        2.0 * PI * self.0 / SPEED_OF_LIGHT
    }
}

impl TryFrom<f64> for Frequency {
    type Error = Error;

    fn try_from(hz: f64) -> Result<Self> {
        Self::new(hz)
    }
}

impl From<Frequency> for f64 {
    fn from(f: Frequency) -> f64 {
        f.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.ghz())
    }
}

/// Station antennas and transmit power.
///
/// Without `los_distance_m` the scenario runs in normalized-power mode, where
/// the direct-wave power is one and the link distance never enters K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaSpec {
    #[serde(default = "one")]
    pub directivity_rx: f64,
    #[serde(default = "one")]
    pub gain_tx: f64,
    #[serde(default = "one")]
    pub radiation_efficiency: f64,
    #[serde(default = "one")]
    pub tx_power_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub los_distance_m: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for AntennaSpec {
    fn default() -> Self {
        Self {
            directivity_rx: 1.0,
            gain_tx: 1.0,
            radiation_efficiency: 1.0,
            tx_power_w: 1.0,
            los_distance_m: None,
        }
    }
}

impl AntennaSpec {
    /// Receive gain, efficiency times directivity.
    pub fn gain_rx(&self) -> f64 {
        self.radiation_efficiency * self.directivity_rx
    }

    pub fn is_normalized(&self) -> bool {
        self.los_distance_m.is_none()
    }

    /// Direct-wave power at `f`: one in normalized mode, Friis otherwise.
    pub fn los_power(&self, f: Frequency) -> f64 {
        match self.los_distance_m {
            None => 1.0,
            Some(r_o) => analytic::los_power(
                f.wavelength(),
                r_o,
                self.gain_rx(),
                self.gain_tx,
                self.tx_power_w,
            ),
        }
    }
}

/// What each scatterer is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScattererKind {
    ResonantDipoleHalfWave,
    DipoleOfElectricalLength { l_over_lambda: f64 },
    FixedCrossSection { sigma_m2: f64 },
}

/// Lumped termination at the centre of each dipole (MoM only).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Load {
    #[default]
    Pec,
    /// Conjugate of the isolated dipole's input impedance at each frequency.
    Matched,
    Impedance {
        re_ohm: f64,
        im_ohm: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSpec {
    pub kind: ScattererKind,
    #[serde(default)]
    pub load: Load,
}

impl ScattererSpec {
    pub fn half_wave_dipoles() -> Self {
        Self {
            kind: ScattererKind::ResonantDipoleHalfWave,
            load: Load::Pec,
        }
    }

    /// Electrical length L/λ for dipole scatterers.
    pub fn electrical_length(&self) -> Option<f64> {
        match self.kind {
            ScattererKind::ResonantDipoleHalfWave => Some(0.5),
            ScattererKind::DipoleOfElectricalLength { l_over_lambda } => Some(l_over_lambda),
            ScattererKind::FixedCrossSection { .. } => None,
        }
    }

    /// Spatially averaged cross-section ⟨σ_s⟩ in m² at `f`.
    pub fn sigma_avg(&self, f: Frequency) -> Result<f64> {
        match self.kind {
            ScattererKind::FixedCrossSection { sigma_m2 } => Ok(sigma_m2),
            _ => {
                let l = self.electrical_length().expect("dipole");
                Ok(analytic::avg_dipole_xsec(l)? * f.wavelength().powi(2))
            }
        }
    }
}

/// Region holding the scatterers; the receiver sits at its centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    Sphere { radius_m: f64 },
    Cube { side_m: f64 },
}

impl Region {
    pub fn volume(&self) -> f64 {
        match *self {
            Region::Sphere { radius_m } => 4.0 / 3.0 * PI * radius_m.powi(3),
            Region::Cube { side_m } => side_m.powi(3),
        }
    }

    /// Largest distance from the centre to a point of the region.
    pub fn bounding_radius(&self) -> f64 {
        match *self {
            Region::Sphere { radius_m } => radius_m,
            Region::Cube { side_m } => 0.5 * side_m * 3f64.sqrt(),
        }
    }

    /// Sphere radius used by the closed forms (inscribed sphere for a cube).
    pub fn analytic_radius(&self) -> f64 {
        match *self {
            Region::Sphere { radius_m } => radius_m,
            Region::Cube { side_m } => 0.5 * side_m,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Region::Sphere { .. } => "sphere",
            Region::Cube { .. } => "cube",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TxPlacement {
    /// Distant transmitter; the region is lit by a plane wave.
    #[default]
    FarFieldPlaneWave,
    /// Half-wave dipole transmitter inside the region at `distance_m` from the receiver.
    InVolumeDipole { distance_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub region: Region,
    #[serde(default)]
    pub tx_placement: TxPlacement,
}

/// How many scatterers the region holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Population {
    FixedCount {
        n_s: u64,
    },
    FixedDensity {
        rho_per_m3: f64,
    },
    /// As many scatterers as fit while staying in each other's far field.
    MaxPacked {
        #[serde(default = "default_gamma_a")]
        gamma_a: f64,
        #[serde(default = "default_eta_pack")]
        eta_pack: f64,
        #[serde(default = "default_alpha_e")]
        alpha_e: f64,
        #[serde(default = "default_scatterer_gain")]
        scatterer_gain: f64,
    },
}

fn default_gamma_a() -> f64 {
    DEFAULT_GAMMA_A
}
fn default_eta_pack() -> f64 {
    DEFAULT_ETA_PACK
}
fn default_alpha_e() -> f64 {
    DEFAULT_ALPHA_E
}
fn default_scatterer_gain() -> f64 {
    HALF_WAVE_DIPOLE_GAIN
}

/// Far-field packing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packing {
    pub gamma_a: f64,
    pub eta_pack: f64,
    pub alpha_e: f64,
    pub scatterer_gain: f64,
}

impl Default for Packing {
    fn default() -> Self {
        Self {
            gamma_a: DEFAULT_GAMMA_A,
            eta_pack: DEFAULT_ETA_PACK,
            alpha_e: DEFAULT_ALPHA_E,
            scatterer_gain: HALF_WAVE_DIPOLE_GAIN,
        }
    }
}

impl Packing {
    pub fn far_field_distance(&self, f: Frequency) -> Result<f64> {
        analytic::far_field_distance(
            f.wavelength(),
            self.scatterer_gain,
            self.gamma_a,
            self.alpha_e,
        )
    }
}

impl Population {
    /// Packing parameters of a `MaxPacked` population, defaults otherwise.
    pub fn packing(&self) -> Packing {
        match *self {
            Population::MaxPacked {
                gamma_a,
                eta_pack,
                alpha_e,
                scatterer_gain,
            } => Packing {
                gamma_a,
                eta_pack,
                alpha_e,
                scatterer_gain,
            },
            _ => Packing::default(),
        }
    }
}

/// A complete propagation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub antenna: AntennaSpec,
    pub scatterer: ScattererSpec,
    pub population: Population,
    #[serde(rename = "frequencies_hz")]
    pub frequencies: Vec<Frequency>,
    pub ensembles: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 of the canonical JSON form; changes iff a field changes.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sphere radius entering the closed forms.
    pub fn analytic_radius(&self) -> f64 {
        self.geometry.region.analytic_radius()
    }

    /// Scatterer count as used by the closed forms (may be fractional).
    pub fn analytic_count(&self, f: Frequency) -> Result<f64> {
        let r_s = self.analytic_radius();
        Ok(match self.population {
            Population::FixedCount { n_s } => n_s as f64,
            Population::FixedDensity { rho_per_m3 } => rho_per_m3 * 4.0 / 3.0 * PI * r_s.powi(3),
            Population::MaxPacked { eta_pack, .. } => analytic::packed_count(
                r_s,
                self.population.packing().far_field_distance(f)?,
                eta_pack,
            ),
        })
    }

    /// Integer scatterer count drawn into one realization of the region.
    pub fn realized_count(&self, f: Frequency) -> Result<usize> {
        let volume = self.geometry.region.volume();
        Ok(match self.population {
            Population::FixedCount { n_s } => n_s as usize,
            Population::FixedDensity { rho_per_m3 } => (rho_per_m3 * volume).round() as usize,
            Population::MaxPacked { eta_pack, .. } => {
                let r_ff = self.population.packing().far_field_distance(f)?;
                let v_ff = PI * r_ff.powi(3) / 6.0;
                let n = (eta_pack * volume / v_ff).floor();
                if n < 1.0 {
                    log::warn!("no scatterer fits the far-field packing at {f}");
                    0
                } else {
                    n as usize
                }
            }
        })
    }

    /// Checks hard invariants (returned as errors) and the modelling
    /// assumptions (returned as a report of violations).
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_invariants()?;
        let mut report = ValidationReport::default();
        let r_s = self.analytic_radius();

        if let Some(l) = self.scatterer.electrical_length() {
            if !analytic::TABLED_ELECTRICAL_LENGTHS
                .iter()
                .any(|t| (t - l).abs() < 1e-12)
            {
                log::warn!("electrical length L/λ = {l} is outside the tabulated grid");
                report.push(
                    ViolationKind::ElectricalLengthOffGrid,
                    format!("L/λ = {l} not in {:?}", analytic::TABLED_ELECTRICAL_LENGTHS),
                );
            }
        }

        for &f in &self.frequencies {
            let k_limit = f.wavelength() / (2.0 * PI);
            if r_s < PHASE_AVERAGING_MARGIN * k_limit {
                report.push(
                    ViolationKind::ScatteringVolumeTooSmall {
                        frequency_hz: f.hz(),
                    },
                    format!("R_s = {r_s} m is not much larger than λ/2π = {k_limit:.4} m at {f}"),
                );
            }
            let packing = self.population.packing();
            let r_ff = packing.far_field_distance(f)?;
            let n_max = analytic::packed_count(r_s, r_ff, packing.eta_pack);
            match self.population {
                Population::MaxPacked { .. } => {
                    if n_max < 1.0 {
                        report.push(
                            ViolationKind::FarFieldPackingInfeasible {
                                frequency_hz: f.hz(),
                            },
                            format!("R_FF = {r_ff:.4} m leaves no room for a scatterer at {f}"),
                        );
                    }
                }
                _ => {
                    let n = self.analytic_count(f)?;
                    if n > n_max {
                        report.push(
                            ViolationKind::ExceedsFarFieldPacking {
                                frequency_hz: f.hz(),
                            },
                            format!("N_s = {n} exceeds far-field packing limit {n_max:.1} at {f}"),
                        );
                    }
                }
            }
        }
        Ok(report)
    }

    fn check_invariants(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.ensembles == 0 {
            return bad("ensembles must be at least 1".into());
        }
        if self.frequencies.is_empty() {
            return bad("at least one frequency is required".into());
        }
        if self.frequencies.windows(2).any(|w| w[1].hz() <= w[0].hz()) {
            return bad("frequencies must be strictly increasing".into());
        }
        let a = &self.antenna;
        for (name, v) in [
            ("directivity_rx", a.directivity_rx),
            ("gain_tx", a.gain_tx),
            ("radiation_efficiency", a.radiation_efficiency),
            ("tx_power_w", a.tx_power_w),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if a.radiation_efficiency > 1.0 {
            return bad(format!(
                "radiation_efficiency must not exceed 1, got {}",
                a.radiation_efficiency
            ));
        }
        if let Some(r_o) = a.los_distance_m {
            if !(r_o > 0.0 && r_o.is_finite()) {
                return bad(format!("los_distance_m must be positive, got {r_o}"));
            }
        }
        match self.scatterer.kind {
            ScattererKind::FixedCrossSection { sigma_m2 }
                if !(sigma_m2 > 0.0 && sigma_m2.is_finite()) =>
            {
                return bad(format!("sigma_m2 must be positive, got {sigma_m2}"));
            }
            ScattererKind::DipoleOfElectricalLength { l_over_lambda }
                if analytic::avg_dipole_xsec(l_over_lambda).is_err() =>
            {
                return bad(format!(
                    "L/λ = {l_over_lambda} is outside the cross-section formula's domain"
                ));
            }
            _ => {}
        }
        if let Load::Impedance { re_ohm, im_ohm } = self.scatterer.load {
            if !(re_ohm.is_finite() && im_ohm.is_finite()) {
                return bad("load impedance must be finite".into());
            }
        }
        let size = match self.geometry.region {
            Region::Sphere { radius_m } => radius_m,
            Region::Cube { side_m } => side_m,
        };
        if !(size > 0.0 && size.is_finite()) {
            return bad(format!("region size must be positive, got {size}"));
        }
        if let TxPlacement::InVolumeDipole { distance_m } = self.geometry.tx_placement {
            if !(distance_m > 0.0 && distance_m < self.analytic_radius()) {
                return bad(format!(
                    "in-volume transmitter distance {distance_m} m must lie inside the region (< {} m)",
                    self.analytic_radius()
                ));
            }
        }
        match self.population {
            Population::FixedCount { n_s: 0 } => return bad("n_s must be at least 1".into()),
            Population::FixedDensity { rho_per_m3 }
                if !(rho_per_m3 > 0.0 && rho_per_m3.is_finite()) =>
            {
                return bad(format!("rho_per_m3 must be positive, got {rho_per_m3}"));
            }
            Population::MaxPacked {
                gamma_a,
                eta_pack,
                alpha_e,
                scatterer_gain,
            } => {
                if !(gamma_a > 0.0 && gamma_a < 1.0) {
                    return bad(format!("gamma_a must lie in (0, 1), got {gamma_a}"));
                }
                if !(eta_pack > 0.0 && eta_pack <= 1.0) {
                    return bad(format!("eta_pack must lie in (0, 1], got {eta_pack}"));
                }
                if !(alpha_e > 0.0 && scatterer_gain > 0.0) {
                    return bad("alpha_e and scatterer_gain must be positive".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// How many multiples of λ/2π the sphere radius must span for the phase
/// average of the scattered terms to vanish.
pub const PHASE_AVERAGING_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    ScatteringVolumeTooSmall { frequency_hz: f64 },
    FarFieldPackingInfeasible { frequency_hz: f64 },
    ExceedsFarFieldPacking { frequency_hz: f64 },
    ElectricalLengthOffGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

/// Modelling assumptions a scenario breaks; empty when it is fully in scope.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, kind: ViolationKind, message: String) {
        self.violations.push(Violation { kind, message });
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}
