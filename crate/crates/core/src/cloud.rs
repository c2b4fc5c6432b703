use std::f64::consts::TAU;

/// Scatterer location in receiver-centred spherical coordinates.
///
/// The polar axis points at the transmitter, so `theta` is the angle between
/// the scatterer and the direct-path arrival direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPosition {
    pub rho: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPosition {
    pub fn from_cartesian([x, y, z]: [f64; 3]) -> Self {
        let rho = (x * x + y * y + z * z).sqrt();
        let theta = if rho > 0.0 {
            (z / rho).clamp(-1.0, 1.0).acos()
        } else {
            0.0
        };
        let phi = y.atan2(x).rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative angles
        let phi = if phi >= TAU { 0.0 } else { phi };
        Self { rho, theta, phi }
    }

    pub fn to_cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.rho * st * cp, self.rho * st * sp, self.rho * ct]
    }
}

/// One random realization of the scatterer population.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScattererCloud {
    pub positions: Vec<SphericalPosition>,
    /// Polarization mismatch angle ψ between each scattered wave and the receiver.
    pub mismatch_angles: Vec<f64>,
    /// Positions redrawn because they fell on top of the receiver.
    pub redraws: usize,
}

impl ScattererCloud {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
