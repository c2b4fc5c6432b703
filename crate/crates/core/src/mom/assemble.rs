use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use super::mesh::{Half, Segment, WireMesh};
use super::ETA0;
use crate::scenario::Frequency;
use crate::special::gauss_rule;

/// Integrals of `g = e^{-jkR}/R` against `{1, t, t', t t'}` over a segment pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairMoments {
    pub i00: Complex64,
    pub i10: Complex64,
    pub i01: Complex64,
    pub i11: Complex64,
}

impl PairMoments {
    /// Moments of the pair taken in the opposite order.
    pub fn swapped(self) -> Self {
        Self {
            i00: self.i00,
            i10: self.i01,
            i01: self.i10,
            i11: self.i11,
        }
    }

    fn average(self, other: Self) -> Self {
        Self {
            i00: 0.5 * (self.i00 + other.i00),
            i10: 0.5 * (self.i10 + other.i10),
            i01: 0.5 * (self.i01 + other.i01),
            i11: 0.5 * (self.i11 + other.i11),
        }
    }

    /// `∫∫ f_p(t) f_q(t') g dt dt'` for the given rooftop halves.
    pub fn shape_integral(&self, hp: Half, hq: Half) -> Complex64 {
        match (hp, hq) {
            (Half::Rising, Half::Rising) => self.i11,
            (Half::Rising, Half::Falling) => self.i10 - self.i11,
            (Half::Falling, Half::Rising) => self.i01 - self.i11,
            (Half::Falling, Half::Falling) => self.i00 - self.i10 - self.i01 + self.i11,
        }
    }
}

/// How the matrix is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssemblyMode {
    /// Each unordered segment pair is integrated once and mirrored.
    #[default]
    Symmetric,
    /// Every ordered pair is integrated on its own (for checking reciprocity).
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyOptions {
    pub mode: AssemblyMode,
    /// With `false` only self blocks are kept, i.e. no mutual coupling.
    pub coupling: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            mode: AssemblyMode::Symmetric,
            coupling: true,
        }
    }
}

/// Dense impedance system `(Z + loads) I = V`.
#[derive(Debug, Clone)]
pub struct MomSystem {
    pub z: Mat<Complex64>,
    pub v: Vec<Complex64>,
    /// Lumped impedances added to the diagonal at solve time.
    pub loads: Vec<(usize, Complex64)>,
    pub frequency: Frequency,
}

impl MomSystem {
    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn add_load(&mut self, basis: usize, z: Complex64) {
        self.loads.push((basis, z));
    }

    /// Largest `|Z_mn − Z_nm| / |Z_mn|` over all entries.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                let a = self.z[(i, j)];
                let b = self.z[(j, i)];
                let scale = a.norm().max(b.norm());
                if scale > 0.0 {
                    worst = worst.max((a - b).norm() / scale);
                }
            }
        }
        worst
    }
}

// Pairs closer than this many segment lengths use singularity extraction.
const NEAR_RATIO: f64 = 2.5;
const NEAR_PANELS: usize = 4;
const NEAR_OUTER_ORDER: usize = 8;
const NEAR_INNER_ORDER: usize = 8;

struct Rules {
    tiers: [(f64, Vec<(f64, f64)>); 3],
    coarse: Vec<(f64, f64)>,
    outer: Vec<(f64, f64)>,
    inner: Vec<(f64, f64)>,
}

impl Rules {
    fn new() -> Self {
        let rule = |n: usize| gauss_rule(n).unit_interval().collect::<Vec<_>>();
        let panel = rule(NEAR_OUTER_ORDER);
        let outer = (0..NEAR_PANELS)
            .flat_map(|p| {
                let h = 1.0 / NEAR_PANELS as f64;
                panel.iter().map(move |&(t, w)| (h * (p as f64 + t), h * w))
            })
            .collect();
        Self {
            tiers: [(6.0, rule(8)), (20.0, rule(4)), (f64::INFINITY, rule(2))],
            coarse: rule(2),
            outer,
            inner: rule(NEAR_INNER_ORDER),
        }
    }

    fn far_rule(&self, ratio: f64) -> &[(f64, f64)] {
        self.tiers
            .iter()
            .find(|(limit, _)| ratio < *limit)
            .map(|(_, r)| r.as_slice())
            .unwrap_or(&self.coarse)
    }
}

fn perp2(p: &Segment, q: &Segment) -> f64 {
    let dx = p.start[0] - q.start[0];
    let dy = p.start[1] - q.start[1];
    dx * dx + dy * dy
}

fn green(k: f64, r: f64) -> Complex64 {
    let (s, c) = (k * r).sin_cos();
    Complex64::new(c, -s) / r
}

/// `(e^{-jkR} − 1)/R` without cancellation at small R.
fn green_minus_static(k: f64, r: f64) -> Complex64 {
    let half = (0.5 * k * r).sin();
    Complex64::new(-2.0 * half * half, -(k * r).sin()) / r
}

fn moments_gauss(p: &Segment, q: &Segment, k: f64, a2: f64, rule: &[(f64, f64)]) -> PairMoments {
    let base = perp2(p, q) + a2;
    let mut m = PairMoments::default();
    for &(tp, wp) in rule {
        let zp = p.start[2] + tp * p.length;
        let mut g0 = Complex64::new(0.0, 0.0);
        let mut g1 = Complex64::new(0.0, 0.0);
        for &(tq, wq) in rule {
            let dz = zp - (q.start[2] + tq * q.length);
            let g = wq * green(k, (base + dz * dz).sqrt());
            g0 += g;
            g1 += tq * g;
        }
        m.i00 += wp * g0;
        m.i10 += wp * tp * g0;
        m.i01 += wp * g1;
        m.i11 += wp * tp * g1;
    }
    m
}

/// Parallel-pair moments with the static `1/R` part of the inner integral
/// done in closed form.
fn moments_extracted(p: &Segment, q: &Segment, k: f64, a2: f64, rules: &Rules) -> PairMoments {
    let ae2 = perp2(p, q) + a2;
    let ae = ae2.sqrt();
    let dq = q.length;
    let mut m = PairMoments::default();
    for &(t, w) in &rules.outer {
        let z = p.start[2] + t * p.length;
        let s = z - q.start[2];
        let s0 = ((dq - s) / ae).asinh() + (s / ae).asinh();
        let j0 = s0 / dq;
        let j1 = (((dq - s).powi(2) + ae2).sqrt() - (s * s + ae2).sqrt() + s * s0) / (dq * dq);
        let mut k0 = Complex64::new(0.0, 0.0);
        let mut k1 = Complex64::new(0.0, 0.0);
        for &(tq, wq) in &rules.inner {
            let dz = s - tq * dq;
            let h = wq * green_minus_static(k, (dz * dz + ae2).sqrt());
            k0 += h;
            k1 += tq * h;
        }
        let inner0 = k0 + j0;
        let inner1 = k1 + j1;
        m.i00 += w * inner0;
        m.i10 += w * t * inner0;
        m.i01 += w * inner1;
        m.i11 += w * t * inner1;
    }
    m
}

fn pair_moments(mesh: &WireMesh, p: usize, q: usize, k: f64, rules: &Rules) -> PairMoments {
    let (sp, sq) = (&mesh.segments[p], &mesh.segments[q]);
    let (ap, aq) = (mesh.wires[sp.wire].radius, mesh.wires[sq.wire].radius);
    let a2 = 0.5 * (ap * ap + aq * aq);
    let (cp, cq) = (sp.midpoint(), sq.midpoint());
    let dist = ((cp[0] - cq[0]).powi(2) + (cp[1] - cq[1]).powi(2) + (cp[2] - cq[2]).powi(2)).sqrt();
    let ratio = dist / sp.length.max(sq.length);
    if ratio < NEAR_RATIO {
        // average both orders so the result does not depend on which
        // segment carries the outer quadrature
        moments_extracted(sp, sq, k, a2, rules)
            .average(moments_extracted(sq, sp, k, a2, rules).swapped())
    } else {
        moments_gauss(sp, sq, k, a2, rules.far_rule(ratio))
    }
}

/// Contribution of one segment pair to `Z_mn` for the halves `hp`, `hq`.
fn entry(m: &PairMoments, hp: Half, hq: Half, dp: f64, dq: f64, k: f64) -> Complex64 {
    let vector = k * dp * dq * m.shape_integral(hp, hq);
    let scalar = hp.charge_sign() * hq.charge_sign() * m.i00 / k;
    Complex64::new(0.0, ETA0 / (4.0 * PI)) * (vector - scalar)
}

/// Galerkin EFIE matrix of the mesh with rooftop basis and test functions.
pub fn assemble(mesh: &WireMesh, f: Frequency, options: &AssemblyOptions) -> MomSystem {
    let n = mesh.n_unknowns();
    let k = f.wavenumber();
    let rules = Rules::new();
    let mut z = Mat::<Complex64>::zeros(n, n);
    let nseg = mesh.segments.len();
    for p in 0..nseg {
        let q_range = match options.mode {
            AssemblyMode::Symmetric => p..nseg,
            AssemblyMode::Full => 0..nseg,
        };
        for q in q_range {
            let (sp, sq) = (&mesh.segments[p], &mesh.segments[q]);
            if !options.coupling && sp.wire != sq.wire {
                continue;
            }
            let m = pair_moments(mesh, p, q, k, &rules);
            for (bm, hm) in mesh.halves(p) {
                for (bn, hn) in mesh.halves(q) {
                    let v = entry(&m, hm, hn, sp.length, sq.length, k);
                    z[(bm, bn)] += v;
                    if options.mode == AssemblyMode::Symmetric && p != q {
                        z[(bn, bm)] += v;
                    }
                }
            }
        }
    }
    MomSystem {
        z,
        v: vec![Complex64::new(0.0, 0.0); n],
        loads: Vec::new(),
        frequency: f,
    }
}
