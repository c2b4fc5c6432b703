use rand::Rng;

use crate::cloud::ScattererCloud;
use crate::ensemble::sample_cloud_in;
use crate::error::{Error, Result};
use crate::scenario::{Frequency, Region, ScattererKind, ScenarioConfig};

/// Equivalent wire radius as a fraction of the wavelength (λ/100 strips).
pub const RADIUS_OVER_LAMBDA: f64 = 1.0 / 400.0;

/// Default number of rooftop basis functions on a half-wave wire.
pub const DEFAULT_BASIS_PER_HALF_WAVE: usize = 21;

/// A straight wire parallel to ẑ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wire {
    pub center: [f64; 3],
    pub length: f64,
    pub radius: f64,
    pub n_basis: usize,
}

impl Wire {
    pub fn n_segments(&self) -> usize {
        self.n_basis + 1
    }

    pub fn segment_length(&self) -> f64 {
        self.length / self.n_segments() as f64
    }

    /// Index of the basis function centred on the wire midpoint.
    pub fn center_basis(&self) -> usize {
        self.n_basis / 2
    }

    pub fn z_range(&self) -> (f64, f64) {
        (
            self.center[2] - 0.5 * self.length,
            self.center[2] + 0.5 * self.length,
        )
    }

    /// Shortest distance between two parallel wires (as axis segments).
    pub fn distance_to(&self, other: &Wire) -> f64 {
        let dx = self.center[0] - other.center[0];
        let dy = self.center[1] - other.center[1];
        let dz = ((self.center[2] - other.center[2]).abs() - 0.5 * (self.length + other.length))
            .max(0.0);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Shortest distance from the wire axis to a point.
    pub fn distance_to_point(&self, p: [f64; 3]) -> f64 {
        let dx = self.center[0] - p[0];
        let dy = self.center[1] - p[1];
        let dz = ((self.center[2] - p[2]).abs() - 0.5 * self.length).max(0.0);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// One straight piece of a wire between two basis nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: [f64; 3],
    pub length: f64,
    pub wire: usize,
}

impl Segment {
    pub fn point(&self, t: f64) -> [f64; 3] {
        [
            self.start[0],
            self.start[1],
            self.start[2] + t * self.length,
        ]
    }

    pub fn midpoint(&self) -> [f64; 3] {
        self.point(0.5)
    }
}

/// Which half of a rooftop lies on a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    /// `f = t`, charge `+1/Δ`.
    Rising,
    /// `f = 1 − t`, charge `−1/Δ`.
    Falling,
}

impl Half {
    pub fn value(self, t: f64) -> f64 {
        match self {
            Half::Rising => t,
            Half::Falling => 1.0 - t,
        }
    }

    pub fn charge_sign(self) -> f64 {
        match self {
            Half::Rising => 1.0,
            Half::Falling => -1.0,
        }
    }
}

/// Segmented thin-wire geometry of a whole ensemble realization.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WireMesh {
    pub wires: Vec<Wire>,
    pub segments: Vec<Segment>,
    /// First segment and first basis index of each wire.
    seg_offset: Vec<usize>,
    basis_offset: Vec<usize>,
    /// Wire driven by a gap generator (in-volume transmitter), if any.
    pub fed_wire: Option<usize>,
    /// Scatterer positions redrawn because of overlaps or receiver collisions.
    pub redraws: usize,
}

impl WireMesh {
    pub fn from_wires(wires: Vec<Wire>) -> Self {
        let mut mesh = WireMesh::default();
        for w in wires {
            mesh.push_wire(w);
        }
        mesh
    }

    pub fn push_wire(&mut self, wire: Wire) -> usize {
        let idx = self.wires.len();
        self.seg_offset.push(self.segments.len());
        self.basis_offset.push(self.n_unknowns());
        let (z0, _) = wire.z_range();
        let d = wire.segment_length();
        for i in 0..wire.n_segments() {
            self.segments.push(Segment {
                start: [wire.center[0], wire.center[1], z0 + i as f64 * d],
                length: d,
                wire: idx,
            });
        }
        self.wires.push(wire);
        idx
    }

    pub fn n_unknowns(&self) -> usize {
        self.wires.iter().map(|w| w.n_basis).sum()
    }

    pub fn basis_offset(&self, wire: usize) -> usize {
        self.basis_offset[wire]
    }

    pub fn segment_offset(&self, wire: usize) -> usize {
        self.seg_offset[wire]
    }

    /// Global index of the centre basis of `wire`.
    pub fn center_basis(&self, wire: usize) -> usize {
        self.basis_offset[wire] + self.wires[wire].center_basis()
    }

    /// Basis halves that live on segment `seg`, as (global basis, half).
    pub fn halves(&self, seg: usize) -> impl Iterator<Item = (usize, Half)> {
        let w = self.segments[seg].wire;
        let local = seg - self.seg_offset[w];
        let n_basis = self.wires[w].n_basis;
        let base = self.basis_offset[w];
        let falling = (local >= 1).then(|| (base + local - 1, Half::Falling));
        let rising = (local < n_basis).then(|| (base + local, Half::Rising));
        falling.into_iter().chain(rising)
    }

    /// Node currents at the start and end of every segment.
    pub fn segment_currents(
        &self,
        coeffs: &[num_complex::Complex64],
    ) -> Vec<(num_complex::Complex64, num_complex::Complex64)> {
        let zero = num_complex::Complex64::new(0.0, 0.0);
        (0..self.segments.len())
            .map(|s| {
                let mut ends = (zero, zero);
                for (b, half) in self.halves(s) {
                    match half {
                        Half::Falling => ends.0 = coeffs[b],
                        Half::Rising => ends.1 = coeffs[b],
                    }
                }
                ends
            })
            .collect()
    }

    /// Largest segment length over radius ratio violation, if any wire is too fat.
    pub fn thin_wire_warning(&self) -> Option<String> {
        self.wires
            .iter()
            .find(|w| w.radius >= 0.5 * w.segment_length())
            .map(|w| {
                format!(
                    "wire radius {} not small against half a segment ({})",
                    w.radius,
                    0.5 * w.segment_length()
                )
            })
    }
}

/// Options for building meshes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Basis functions on a half-wave wire; longer wires scale proportionally.
    pub basis_per_half_wave: usize,
    pub radius_over_lambda: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            basis_per_half_wave: DEFAULT_BASIS_PER_HALF_WAVE,
            radius_over_lambda: RADIUS_OVER_LAMBDA,
        }
    }
}

impl MeshOptions {
    /// Wire of electrical length `l_over_lambda` centred at `center`.
    pub fn wire(&self, center: [f64; 3], l_over_lambda: f64, f: Frequency) -> Wire {
        let lambda = f.wavelength();
        let segments = ((self.basis_per_half_wave + 1) as f64 * l_over_lambda / 0.5)
            .round()
            .max(2.0) as usize;
        Wire {
            center,
            length: l_over_lambda * lambda,
            radius: self.radius_over_lambda * lambda,
            n_basis: segments - 1,
        }
    }
}

/// Electrical length of the MoM scatterers of `config`.
pub fn scatterer_electrical_length(config: &ScenarioConfig) -> Result<f64> {
    match config.scatterer.kind {
        ScattererKind::ResonantDipoleHalfWave => Ok(0.5),
        ScattererKind::DipoleOfElectricalLength { l_over_lambda } => Ok(l_over_lambda),
        ScattererKind::FixedCrossSection { .. } => Err(Error::InvalidConfig(
            "the wire solver needs dipole scatterers, not a fixed cross-section".into(),
        )),
    }
}

/// Turns a cloud into vertical wires, one per scatterer, resonant at `f`.
///
/// `fixed` wires (the in-volume transmitter) go in first. A scatterer closer
/// than two wire radii to another wire or to the receiver at the origin is
/// redrawn from `rng`; the number of redraws is kept on the mesh.
pub fn mesh_ensemble<R: Rng + ?Sized>(
    cloud: &ScattererCloud,
    region: &Region,
    l_over_lambda: f64,
    f: Frequency,
    options: &MeshOptions,
    fixed: &[Wire],
    rng: &mut R,
) -> Result<WireMesh> {
    const MAX_REDRAWS: usize = 10_000;
    let mut mesh = WireMesh::from_wires(fixed.to_vec());
    let clearance = 2.0 * options.radius_over_lambda * f.wavelength();
    let fits = |w: &Wire, mesh: &WireMesh| {
        w.distance_to_point([0.0; 3]) > clearance
            && mesh.wires.iter().all(|o| w.distance_to(o) > clearance)
    };
    for p in &cloud.positions {
        let mut wire = options.wire(p.to_cartesian(), l_over_lambda, f);
        while !fits(&wire, &mesh) {
            mesh.redraws += 1;
            if mesh.redraws > MAX_REDRAWS {
                return Err(Error::Geometry(
                    "could not place non-overlapping wires".into(),
                ));
            }
            let fresh = sample_cloud_in(region, 1, rng);
            wire = options.wire(fresh.positions[0].to_cartesian(), l_over_lambda, f);
        }
        mesh.push_wire(wire);
    }
    if let Some(w) = mesh.thin_wire_warning() {
        log::warn!("{w}");
    }
    Ok(mesh)
}
