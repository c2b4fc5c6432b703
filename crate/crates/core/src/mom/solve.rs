use std::f64::consts::PI;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::lu::partial_pivoting::{factor, solve as lu_solve};
use faer::{Mat, Par};
use num_complex::Complex64;

use super::assemble::MomSystem;
use super::mesh::WireMesh;
use super::ETA0;
use crate::error::{Error, Result};
use crate::scenario::Frequency;
use crate::special::gauss_rule;

type C3 = [Complex64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Incident field driving the wires.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    /// Unit-amplitude plane wave `p̂ e^{-jk d̂·r}` (phase zero at the origin).
    PlaneWave {
        direction: [f64; 3],
        polarization: [f64; 3],
    },
    /// Delta-gap generator at the centre of a mesh wire.
    GapFed { wire: usize, voltage: Complex64 },
}

impl Source {
    /// ẑ-polarized plane wave travelling along +x̂.
    pub fn broadside() -> Self {
        Source::PlaneWave {
            direction: [1.0, 0.0, 0.0],
            polarization: [0.0, 0.0, 1.0],
        }
    }

    /// Incident field at `r`; gap generators have none outside the gap.
    pub fn incident_field(&self, r: [f64; 3], k: f64) -> C3 {
        match *self {
            Source::PlaneWave {
                direction,
                polarization,
            } => {
                let phase = Complex64::from_polar(1.0, -k * dot(direction, r));
                polarization.map(|p| p * phase)
            }
            Source::GapFed { .. } => [ZERO; 3],
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Tested incident field `V_m = ∫ f_m ŝ·E_inc dl`.
pub fn excite(mesh: &WireMesh, source: &Source, f: Frequency) -> Vec<Complex64> {
    let mut v = vec![ZERO; mesh.n_unknowns()];
    match *source {
        Source::GapFed { wire, voltage } => v[mesh.center_basis(wire)] = voltage,
        Source::PlaneWave { .. } => {
            let k = f.wavenumber();
            let rule: Vec<_> = gauss_rule(4).unit_interval().collect();
            for (s, seg) in mesh.segments.iter().enumerate() {
                let e: Vec<Complex64> = rule
                    .iter()
                    .map(|&(t, _)| source.incident_field(seg.point(t), k)[2])
                    .collect();
                for (b, half) in mesh.halves(s) {
                    let tested: Complex64 = rule
                        .iter()
                        .zip(&e)
                        .map(|(&(t, w), e)| w * half.value(t) * e)
                        .sum();
                    v[b] += seg.length * tested;
                }
            }
        }
    }
    v
}

impl MomSystem {
    /// Solves `(Z + loads) I = V` by LU with partial pivoting.
    ///
    /// The matrix is factored in place, so the system is consumed.
    pub fn solve(self) -> Result<Vec<Complex64>> {
        let n = self.n();
        let mut lu = self.z;
        for (b, z) in &self.loads {
            lu[(*b, *b)] += *z;
        }
        let mut perm = vec![0usize; n];
        let mut perm_inv = vec![0usize; n];
        let mut buf = MemBuffer::new(
            factor::lu_in_place_scratch::<usize, Complex64>(n, n, Par::Seq, Default::default()).or(
                lu_solve::solve_in_place_scratch::<usize, Complex64>(n, 1, Par::Seq),
            ),
        );
        let stack = MemStack::new(&mut buf);
        let (_, p) = factor::lu_in_place(
            lu.as_mut(),
            &mut perm,
            &mut perm_inv,
            Par::Seq,
            stack,
            Default::default(),
        );
        let diag: Vec<f64> = (0..n).map(|i| lu[(i, i)].norm()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(max.is_finite()) || !(min > 1e-14 * max) {
            return Err(Error::Singular(format!("pivot ratio {:e}", min / max)));
        }
        let mut rhs = Mat::<Complex64>::from_fn(n, 1, |i, _| self.v[i]);
        lu_solve::solve_in_place(lu.as_ref(), lu.as_ref(), p, rhs.as_mut(), Par::Seq, stack);
        let x: Vec<Complex64> = (0..n).map(|i| rhs[(i, 0)]).collect();
        if x.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Singular("non-finite currents".into()));
        }
        Ok(x)
    }
}

/// Field radiated by the wire currents at an observation point.
pub fn scattered_field(mesh: &WireMesh, currents: &[Complex64], f: Frequency, r: [f64; 3]) -> C3 {
    let k = f.wavenumber();
    let ends = mesh.segment_currents(currents);
    let mut vector = ZERO;
    let mut scalar = [ZERO; 3];
    for (seg, &(i0, i1)) in mesh.segments.iter().zip(&ends) {
        if i0 == ZERO && i1 == ZERO {
            continue;
        }
        let c = seg.midpoint();
        let dist = ((r[0] - c[0]).powi(2) + (r[1] - c[1]).powi(2) + (r[2] - c[2]).powi(2)).sqrt();
        let ratio = dist / seg.length;
        let (order, panels) = if ratio < 2.0 {
            (16, 4)
        } else if ratio < 6.0 {
            (8, 1)
        } else {
            (4, 1)
        };
        let rule = gauss_rule(order);
        for panel in 0..panels {
            let h = 1.0 / panels as f64;
            for (t0, w0) in rule.unit_interval() {
                let (t, w) = (h * (panel as f64 + t0), h * w0);
                let rp = seg.point(t);
                let d = [r[0] - rp[0], r[1] - rp[1], r[2] - rp[2]];
                let big_r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                let g = Complex64::from_polar(1.0 / big_r, -k * big_r);
                let current = i0 * (1.0 - t) + i1 * t;
                vector += w * seg.length * current * g;
                // ∇g = (r − r')/R · (−(1 + jkR) g / R)
                let dg = -(Complex64::new(1.0, k * big_r)) * g / (big_r * big_r);
                for a in 0..3 {
                    scalar[a] += w * (i1 - i0) * dg * d[a];
                }
            }
        }
    }
    let pre = Complex64::new(0.0, -ETA0 / (4.0 * PI));
    [
        pre * scalar[0] / k,
        pre * scalar[1] / k,
        pre * (k * vector + scalar[2] / k),
    ]
}

/// Far-field radiation vector `F` with `E ≈ F e^{-jkr}/r` along `direction`.
pub fn far_field(mesh: &WireMesh, currents: &[Complex64], f: Frequency, direction: [f64; 3]) -> C3 {
    let k = f.wavenumber();
    let n = dot(direction, direction).sqrt();
    let u = direction.map(|x| x / n);
    let ends = mesh.segment_currents(currents);
    let rule: Vec<_> = gauss_rule(4).unit_interval().collect();
    let mut sum = ZERO;
    for (seg, &(i0, i1)) in mesh.segments.iter().zip(&ends) {
        for &(t, w) in &rule {
            let phase = Complex64::from_polar(1.0, k * dot(u, seg.point(t)));
            sum += w * seg.length * (i0 * (1.0 - t) + i1 * t) * phase;
        }
    }
    // transverse part of ẑ
    let zt = [-u[0] * u[2], -u[1] * u[2], 1.0 - u[2] * u[2]];
    let pre = Complex64::new(0.0, -k * ETA0 / (4.0 * PI)) * sum;
    zt.map(|c| pre * c)
}

/// Bistatic cross-section toward `direction` for a unit-amplitude incident wave.
pub fn cross_section(
    mesh: &WireMesh,
    currents: &[Complex64],
    f: Frequency,
    direction: [f64; 3],
) -> f64 {
    let e = far_field(mesh, currents, f, direction);
    4.0 * PI * e.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// Solves the system and returns the ẑ field at `rx`, incident plus radiated.
pub fn solve_and_receive(
    system: MomSystem,
    mesh: &WireMesh,
    source: &Source,
    rx: [f64; 3],
) -> Result<Complex64> {
    let f = system.frequency;
    let currents = system.solve()?;
    Ok(receive(mesh, &currents, source, f, rx))
}

/// ẑ field at `rx` for known currents.
pub fn receive(
    mesh: &WireMesh,
    currents: &[Complex64],
    source: &Source,
    f: Frequency,
    rx: [f64; 3],
) -> Complex64 {
    source.incident_field(rx, f.wavenumber())[2] + scattered_field(mesh, currents, f, rx)[2]
}

/// Input impedance of `wire` for a gap generator at its centre, with every
/// other wire present and passive.
pub fn input_impedance(mesh: &WireMesh, wire: usize, f: Frequency) -> Result<Complex64> {
    let mut system = super::assemble::assemble(mesh, f, &Default::default());
    let source = Source::GapFed {
        wire,
        voltage: Complex64::new(1.0, 0.0),
    };
    system.v = excite(mesh, &source, f);
    let currents = system.solve()?;
    Ok(1.0 / currents[mesh.center_basis(wire)])
}
