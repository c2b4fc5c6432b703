//! Closed-form K-factor models, link powers, far-field packing and the
//! Rician envelope density.
//!
//! Every function here is pure. Lengths are in metres, cross-sections in m²,
//! powers in watts (or in the normalized unit where the LOS power is one).

use std::f64::consts::PI;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{bessel_i0e, integrate};

/// Electrical lengths L/λ on which the dipole cross-section table is defined.
pub const TABLED_ELECTRICAL_LENGTHS: [f64; 5] = [0.5, 1.5, 2.5, 3.5, 4.5];

/// Random close packing fraction of spheres.
pub const DEFAULT_ETA_PACK: f64 = 0.64;
/// Far-field fitting coefficient shared by all antennas.
pub const DEFAULT_ALPHA_E: f64 = 0.06;
/// Default antenna gain reduction factor for the far-field criterion.
pub const DEFAULT_GAMMA_A: f64 = 0.9;
/// Gain of a half-wave dipole, used as the scatterer gain in the far-field distance.
pub const HALF_WAVE_DIPOLE_GAIN: f64 = 1.64;

/// Spatially averaged scattering cross-section of a thin dipole, normalized by λ².
pub fn avg_dipole_xsec(l_over_lambda: f64) -> Result<f64> {
    let arg = 22.368 * l_over_lambda;
    if !(l_over_lambda > 0.0) || !(arg > 1.0) {
        return Err(Error::Domain(format!(
            "dipole cross-section needs 22.368·L/λ > 1, got L/λ = {l_over_lambda}"
        )));
    }
    let ln = arg.ln();
    Ok((1.178 * l_over_lambda + 0.179 * ln - 0.131) / (ln * ln))
}

/// Far-field distance `R_FF = (4λG/π²)·sqrt(α_E / (1 − γ_A))`.
pub fn far_field_distance(wavelength: f64, gain: f64, gamma_a: f64, alpha_e: f64) -> Result<f64> {
    if !(gamma_a > 0.0 && gamma_a < 1.0) {
        return Err(Error::Domain(format!(
            "gamma_A must lie in (0, 1), got {gamma_a}"
        )));
    }
    if !(wavelength > 0.0 && gain > 0.0 && alpha_e > 0.0) {
        return Err(Error::Domain(
            "far-field distance needs positive λ, G and α_E".into(),
        ));
    }
    Ok(4.0 * wavelength * gain / (PI * PI) * (alpha_e / (1.0 - gamma_a)).sqrt())
}

/// Unrounded number of far-field spheres packed into the scattering sphere,
/// `8·η·(R_s/R_FF)³`.
pub fn packed_count(r_s: f64, r_ff: f64, eta_pack: f64) -> f64 {
    8.0 * eta_pack * (r_s / r_ff).powi(3)
}

/// Largest integer scatterer count keeping every pair in mutual far field.
///
/// Returns 0 (and logs a warning) when fewer than one scatterer fits.
pub fn max_packed_count(r_s: f64, r_ff: f64, eta_pack: f64) -> u64 {
    let n = packed_count(r_s, r_ff, eta_pack).floor();
    if !(n >= 1.0) {
        warn!("no scatterer fits: R_s = {r_s} m, R_FF = {r_ff} m, eta_pack = {eta_pack}");
        return 0;
    }
    n as u64
}

/// Scatterer density of the maximally packed volume, `6η/(π R_FF³)`.
pub fn packed_density(r_ff: f64, eta_pack: f64) -> f64 {
    6.0 * eta_pack / (PI * r_ff.powi(3))
}

/// Scatterer density of `n_s` scatterers spread over a sphere of radius `r_s`.
pub fn density_of(n_s: f64, r_s: f64) -> f64 {
    3.0 * n_s / (4.0 * PI * r_s.powi(3))
}

/// K-factor for a fixed number of scatterers in a sphere of radius `r_s`.
pub fn k_fixed_count(d_or: f64, r_s: f64, n_s: f64, sigma_avg: f64) -> f64 {
    8.0 * PI * d_or * r_s * r_s / (3.0 * n_s * sigma_avg)
}

/// K-factor for a fixed scatterer density.
pub fn k_fixed_density(d_or: f64, rho_s: f64, r_s: f64, sigma_avg: f64) -> f64 {
    2.0 * d_or / (rho_s * r_s * sigma_avg)
}

/// Lower bound on K when the sphere is packed with mutually far-field scatterers.
pub fn k_lower_bound(d_or: f64, r_ff: f64, r_s: f64, sigma_avg: f64, eta_pack: f64) -> f64 {
    PI * d_or * r_ff.powi(3) / (3.0 * eta_pack * r_s * sigma_avg)
}

/// Friis power of the direct wave.
pub fn los_power(wavelength: f64, r_o: f64, g_or: f64, g_ot: f64, p_t: f64) -> f64 {
    (wavelength / (4.0 * PI * r_o)).powi(2) * g_or * g_ot * p_t
}

/// Mean power scattered towards the receiver by `n_s` single-bounce scatterers.
#[allow(clippy::too_many_arguments)]
pub fn rimp_power(
    n_s: f64,
    r_s: f64,
    wavelength: f64,
    r_o: f64,
    e_r: f64,
    g_ot: f64,
    sigma_avg: f64,
    p_t: f64,
) -> f64 {
    3.0 * n_s / (4.0 * PI * r_s * r_s)
        * (wavelength / (4.0 * PI * r_o)).powi(2)
        * 0.5
        * e_r
        * g_ot
        * sigma_avg
        * p_t
}

/// Rician envelope parameters: K-factor and total received power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicianParams {
    k: f64,
    total_power: f64,
}

impl RicianParams {
    pub fn new(k: f64, total_power: f64) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!(
                "K must be finite and non-negative, got {k}"
            )));
        }
        if !(total_power > 0.0) || !total_power.is_finite() {
            return Err(Error::Domain(format!(
                "P_r must be positive, got {total_power}"
            )));
        }
        Ok(Self { k, total_power })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    /// Amplitude of the deterministic component, `sqrt(P_r K/(K+1))`.
    pub fn los_amplitude(&self) -> f64 {
        (self.total_power * self.k / (self.k + 1.0)).sqrt()
    }

    /// Per-quadrature standard deviation of the diffuse component.
    pub fn diffuse_sigma(&self) -> f64 {
        (self.total_power / (2.0 * (self.k + 1.0))).sqrt()
    }

    /// Interval outside of which the density is below ~e^{-100} of its peak.
    pub fn support(&self) -> (f64, f64) {
        let s = self.los_amplitude();
        let sigma = self.diffuse_sigma();
        ((s - 15.0 * sigma).max(0.0), s + 15.0 * sigma)
    }
}

/// Rician density of the envelope `x = |v|`.
///
/// Evaluated as `2(1+K)x/P · exp(−(a − √K)²) · [e^{−z} I0(z)]` with
/// `a = x·sqrt((K+1)/P)` and `z = 2a√K`, which is the textbook form with the
/// exponentials combined so that large K cannot overflow.
pub fn rician_pdf(x: f64, params: &RicianParams) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let k = params.k;
    let p = params.total_power;
    let a = x * ((k + 1.0) / p).sqrt();
    let sk = k.sqrt();
    let z = 2.0 * a * sk;
    2.0 * (1.0 + k) * x / p * (-(a - sk).powi(2)).exp() * bessel_i0e(z)
}

/// Rician CDF by adaptive integration of [`rician_pdf`] (absolute tolerance 1e-12).
pub fn rician_cdf(x: f64, params: &RicianParams) -> f64 {
    let (lo, hi) = params.support();
    if x <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    integrate(|t| rician_pdf(t, params), lo, x, 1e-12, 1e-12)
        .value
        .clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_of_dipole_cross_sections() {
        let expected = [0.1527, 0.1835, 0.2183, 0.2510, 0.2819];
        for (l, e) in TABLED_ELECTRICAL_LENGTHS.iter().zip(expected) {
            let v = avg_dipole_xsec(*l).unwrap();
            assert!((v - e).abs() <= 1e-4, "L/λ = {l}: {v} vs {e}");
        }
    }

    #[test]
    fn cross_section_domain() {
        assert!(avg_dipole_xsec(1.0 / 22.368).is_err());
        assert!(avg_dipole_xsec(0.0).is_err());
        assert!(avg_dipole_xsec(-1.0).is_err());
        assert!(avg_dipole_xsec(0.05).is_ok());
    }

    #[test]
    fn far_field_distance_examples() {
        let lambda = 0.5996;
        let r = far_field_distance(lambda, 1.64, 0.9, 0.06).unwrap();
        assert!((r - 0.309).abs() < 5e-4, "{r}");
        let r2 = far_field_distance(lambda, 3.28, 0.9, 0.06).unwrap();
        assert_relative_eq!(r2, 2.0 * r, max_relative = 1e-15);
        assert!(far_field_distance(lambda, 1.64, 1.0, 0.06).is_err());
        assert!(far_field_distance(lambda, 1.64, 1.2, 0.06).is_err());
    }

    #[test]
    fn packing_examples() {
        assert_eq!(max_packed_count(2.0, 2.0, 0.64), 5);
        let n = max_packed_count(15.0, 0.309, 0.64);
        assert!((n as f64 / 5.86e5 - 1.0).abs() < 2e-3, "{n}");
        assert_eq!(max_packed_count(15.0, 0.309, 0.0), 0);
        assert_eq!(max_packed_count(0.1, 0.309, 0.64), 0);
        assert_relative_eq!(
            packed_density(0.309, 0.64),
            packed_count(15.0, 0.309, 0.64) / (4.0 / 3.0 * PI * 15f64.powi(3)),
            max_relative = 1e-13
        );
    }

    #[test]
    fn k_fixed_count_examples() {
        let sigma = 0.1527 * 0.29979f64.powi(2);
        let k = k_fixed_count(1.0, 15.0, 1000.0, sigma);
        assert!((k - 137.3).abs() < 0.1, "{k}");
        assert!((10.0 * k.log10() - 21.4).abs() < 0.05);
        assert_relative_eq!(
            k_fixed_count(1.0, 15.0, 2000.0, sigma),
            k / 2.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            k_fixed_count(1.0, 30.0, 1000.0, sigma),
            4.0 * k,
            max_relative = 1e-15
        );
    }

    #[test]
    fn k_fixed_density_examples() {
        let sigma = 0.013723;
        let k = k_fixed_density(1.0, 1e-3, 15.0, sigma);
        assert!((k - 9715.0).abs() < 2.0, "{k}");
        assert_relative_eq!(
            k_fixed_density(1.0, 2e-3, 15.0, sigma),
            k / 2.0,
            max_relative = 1e-15
        );
        let n = 1000.0;
        assert_relative_eq!(
            k_fixed_density(1.0, density_of(n, 15.0), 15.0, sigma),
            k_fixed_count(1.0, 15.0, n, sigma),
            max_relative = 1e-14
        );
    }

    #[test]
    fn lower_bound_examples() {
        let sigma = 0.0549;
        let (r_ff, r_s, eta) = (0.309, 15.0, 0.64);
        let k = k_lower_bound(1.0, r_ff, r_s, sigma, eta);
        let via_count = k_fixed_count(1.0, r_s, packed_count(r_s, r_ff, eta), sigma);
        assert_relative_eq!(k, via_count, max_relative = 1e-12);
        assert_relative_eq!(
            k_lower_bound(1.0, 2.0 * r_ff, r_s, sigma, eta),
            8.0 * k,
            max_relative = 1e-14
        );
    }

    #[test]
    fn link_power_examples() {
        assert_relative_eq!(
            los_power(0.3, 1000.0, 1.0, 1.0, 1.0),
            5.70e-10,
            max_relative = 1e-3
        );
        let p = los_power(0.3, 1000.0, 2.0, 1.5, 3.0);
        assert_relative_eq!(
            los_power(0.3, 2000.0, 2.0, 1.5, 3.0),
            p / 4.0,
            max_relative = 1e-15
        );
        let r = rimp_power(1000.0, 15.0, 0.3, 1000.0, 1.0, 1.0, 0.013723, 1.0);
        assert_relative_eq!(r, 4.15e-12, max_relative = 2e-3);
        assert_eq!(
            rimp_power(0.0, 15.0, 0.3, 1000.0, 1.0, 1.0, 0.013723, 1.0),
            0.0
        );
    }

    #[test]
    fn power_ratio_is_the_k_factor() {
        let (d_or, e_r) = (1.7, 0.8);
        let (lambda, r_o, g_ot, p_t, n, r_s, sigma) = (0.12, 350.0, 2.5, 4.0, 321.0, 11.0, 0.004);
        let k = los_power(lambda, r_o, e_r * d_or, g_ot, p_t)
            / rimp_power(n, r_s, lambda, r_o, e_r, g_ot, sigma, p_t);
        assert_relative_eq!(k, k_fixed_count(d_or, r_s, n, sigma), max_relative = 1e-13);
    }

    #[test]
    fn rician_reduces_to_rayleigh() {
        for p in [0.5, 1.0, 2.0] {
            let params = RicianParams::new(0.0, p).unwrap();
            for i in 0..200 {
                let x = i as f64 * 0.02;
                let rayleigh = 2.0 * x / p * (-x * x / p).exp();
                let v = rician_pdf(x, &params);
                assert!(
                    (v - rayleigh).abs() <= 1e-12 * rayleigh.abs().max(1e-300),
                    "x={x}"
                );
            }
        }
    }

    #[test]
    fn rician_pdf_survives_huge_k() {
        let params = RicianParams::new(1e6, 1.0).unwrap();
        let peak = rician_pdf(1.0, &params);
        assert!(peak.is_finite() && peak > 100.0);
        assert_eq!(rician_pdf(0.5, &params), 0.0);
        assert!(rician_pdf(-1.0, &params) == 0.0);
    }

    #[test]
    fn rician_cdf_limits() {
        let params = RicianParams::new(10.0, 1.0).unwrap();
        assert_eq!(rician_cdf(0.0, &params), 0.0);
        assert_eq!(rician_cdf(100.0, &params), 1.0);
        let mid = rician_cdf(1.0, &params);
        assert!(mid > 0.3 && mid < 0.7);
    }

    #[test]
    fn rician_params_validation() {
        assert!(RicianParams::new(-1.0, 1.0).is_err());
        assert!(RicianParams::new(1.0, 0.0).is_err());
        assert!(RicianParams::new(f64::INFINITY, 1.0).is_err());
    }
}
