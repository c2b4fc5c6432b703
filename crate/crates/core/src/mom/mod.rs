//! Thin-wire method of moments for clouds of vertical dipoles.
//!
//! Wires carry rooftop (piecewise linear) current basis functions and are
//! tested with the same functions (Galerkin), using the reduced thin-wire
//! kernel `R = sqrt(|r − r'|² + a²)`. A λ/100 strip is modelled as a wire of
//! equivalent radius a = λ/400.

pub mod assemble;
pub mod dump;
pub mod mesh;
pub mod solve;
pub mod sweep;

pub use assemble::{assemble, AssemblyMode, AssemblyOptions, MomSystem};
pub use mesh::{mesh_ensemble, MeshOptions, Wire, WireMesh};
pub use solve::{
    cross_section, excite, far_field, input_impedance, scattered_field, solve_and_receive, Source,
};
pub use sweep::{mom_k_sweep, mom_realization, mom_samples, MomOptions};

/// Free-space wave impedance μ0·c, in ohms.
pub const ETA0: f64 = 376.730_313_668;
