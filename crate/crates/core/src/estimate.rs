use serde::Serialize;

/// Estimated Rician K-factor of a set of received samples.
///
/// K is kept in linear units; `k_db` is derived on construction so the two
/// never disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KFactorEstimate {
    k_linear: f64,
    k_db: f64,
    total_power: f64,
    stderr_db: f64,
    samples: usize,
    deterministic: bool,
}

impl KFactorEstimate {
    pub fn new(k_linear: f64, total_power: f64, stderr_db: f64, samples: usize) -> Self {
        assert!(k_linear >= 0.0, "K must be non-negative, got {k_linear}");
        Self {
            k_linear,
            k_db: to_db(k_linear),
            total_power,
            stderr_db: if stderr_db.is_finite() {
                stderr_db.abs()
            } else {
                0.0
            },
            samples,
            deterministic: false,
        }
    }

    /// Samples without spread: K is infinite.
    pub fn deterministic(total_power: f64, samples: usize) -> Self {
        Self {
            k_linear: f64::INFINITY,
            k_db: f64::INFINITY,
            total_power,
            stderr_db: 0.0,
            samples,
            deterministic: true,
        }
    }

    pub fn k_linear(&self) -> f64 {
        self.k_linear
    }

    pub fn k_db(&self) -> f64 {
        self.k_db
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn stderr_db(&self) -> f64 {
        self.stderr_db
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Set when the diffuse power underflowed (pure line-of-sight input).
    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
