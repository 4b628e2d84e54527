//! Per-link radio model: free-space path loss, SNR, and Shannon capacity.
//!
//! All scalar functions are generic over [`num_traits::Float`] so the same
//! formulas can be instantiated at `f32` or `f64`; the rest of the crate uses
//! [`crate::Real`]. Inputs are linear SI units (watts, meters, Hz, W/Hz);
//! dB-domain values are converted once at config parse time via
//! [`dbm_to_watts`] and never inside the hot path.

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::Vec3;
use crate::Real;

/// Minimum supported link distance in meters. The free-space model diverges
/// at d -> 0; distances below this are treated as solver bugs and rejected
/// rather than clamped.
pub const D_FLOOR: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("link distance {distance} m is below the supported floor {floor} m")]
    BelowDistanceFloor { distance: f64, floor: f64 },
    #[error("bandwidth must be positive, got {0} Hz")]
    NonPositiveBandwidth(f64),
}

/// Fixed radio-layer parameters, stored in linear SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams<F = Real> {
    /// Transmit power in watts.
    pub tx_power: F,
    /// Carrier wavelength in meters.
    pub wavelength: F,
    /// Noise power spectral density in watts/Hz.
    pub noise_psd: F,
}

impl<F: Float> RadioParams<F> {
    /// Builds radio parameters from the units used in configuration files:
    /// dBm, millimeters, dBm/Hz.
    pub fn from_config_units(tx_power_dbm: F, wavelength_mm: F, noise_psd_dbm_hz: F) -> Self {
        let mm = F::from(1e-3).unwrap();
        Self {
            tx_power: dbm_to_watts(tx_power_dbm),
            wavelength: wavelength_mm * mm,
            noise_psd: dbm_to_watts(noise_psd_dbm_hz),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("tx_power", self.tx_power),
            ("wavelength", self.wavelength),
            ("noise_psd", self.noise_psd),
        ] {
            if !(v.is_finite() && v > F::zero()) {
                return Err(format!("radio parameter {name} must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// dBm to watts: P_W = 10^(dBm/10 - 3).
pub fn dbm_to_watts<F: Float>(dbm: F) -> F {
    let ten = F::from(10.0).unwrap();
    ten.powf(dbm / ten - F::from(3.0).unwrap())
}

/// Watts to dBm: inverse of [`dbm_to_watts`].
pub fn watts_to_dbm<F: Float>(watts: F) -> F {
    let ten = F::from(10.0).unwrap();
    ten * watts.log10() + F::from(30.0).unwrap()
}

/// Free-space path gain (lambda / (4 pi d))^2, dimensionless.
///
/// `d` must be at least [`D_FLOOR`] meters.
pub fn path_loss<F: Float>(d: F, wavelength: F) -> Result<F, ChannelError> {
    let floor = F::from(D_FLOOR).unwrap();
    if d < floor {
        return Err(ChannelError::BelowDistanceFloor {
            distance: d.to_f64().unwrap_or(f64::NAN),
            floor: D_FLOOR,
        });
    }
    let four_pi = F::from(4.0 * std::f64::consts::PI).unwrap();
    let ratio = wavelength / (four_pi * d);
    Ok(ratio * ratio)
}

/// Received SNR: p_tx * gain / (bandwidth * n0).
pub fn snr<F: Float>(p_tx: F, gain: F, bandwidth: F, n0: F) -> Result<F, ChannelError> {
    if bandwidth <= F::zero() {
        return Err(ChannelError::NonPositiveBandwidth(
            bandwidth.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(p_tx * gain / (bandwidth * n0))
}

/// Shannon capacity in bit/s: bandwidth * log2(1 + snr).
pub fn capacity<F: Float>(bandwidth: F, snr: F) -> F {
    bandwidth * (F::one() + snr).log2()
}

/// Capacity of the link between two positions for a given channel bandwidth.
///
/// Composes distance, path loss, SNR and Shannon capacity.
pub fn link_capacity(
    tx_pos: Vec3,
    rx_pos: Vec3,
    bandwidth: Real,
    radio: &RadioParams,
) -> Result<Real, ChannelError> {
    let gain = path_loss(tx_pos.distance(rx_pos), radio.wavelength)?;
    let g = snr(radio.tx_power, gain, bandwidth, radio.noise_psd)?;
    Ok(capacity(bandwidth, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table_radio() -> RadioParams {
        RadioParams::from_config_units(20.0, 60.0, -174.0)
    }

    #[test]
    fn dbm_round_trip() {
        assert!((dbm_to_watts(20.0) - 0.1).abs() < 1e-12);
        assert!((dbm_to_watts(-174.0) - 3.9811e-21).abs() / 3.9811e-21 < 1e-4);
        for dbm in [-174.0, -30.0, 0.0, 20.0, 33.5] {
            assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() < 1e-9);
        }
    }

    #[test]
    fn path_loss_values() {
        // unit-gain distance by construction
        let d = 0.06 / (4.0 * std::f64::consts::PI);
        // below D_FLOOR, so evaluate the formula at a scaled pair instead
        assert!(d < D_FLOOR);
        let g = path_loss(100.0, 0.06).unwrap();
        assert!((g - 2.2797e-9).abs() / 2.2797e-9 < 1e-4);
        let g2 = path_loss(200.0, 0.06).unwrap();
        assert!((g2 - g / 4.0).abs() <= g * 1e-15);
    }

    #[test]
    fn path_loss_unit_gain_distance() {
        // lambda chosen so that lambda/(4 pi) lands above the floor
        let lambda = 4.0 * std::f64::consts::PI;
        assert!((path_loss(1.0, lambda).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_floor_guard() {
        assert!(matches!(
            path_loss(0.05, 0.06),
            Err(ChannelError::BelowDistanceFloor { .. })
        ));
        assert!(path_loss(D_FLOOR, 0.06).is_ok());
    }

    #[test]
    fn snr_values() {
        assert_eq!(snr(1.0, 1.0, 1.0, 1.0).unwrap(), 1.0);
        let radio = table_radio();
        let gain = path_loss(100.0, radio.wavelength).unwrap();
        let g = snr(radio.tx_power, gain, 20e6, radio.noise_psd).unwrap();
        assert!((g - 2.863e3).abs() / 2.863e3 < 1e-3);
        let g_half = snr(radio.tx_power, gain, 40e6, radio.noise_psd).unwrap();
        assert_eq!(g_half, g / 2.0);
        assert!(snr(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn capacity_values() {
        assert_eq!(capacity(20e6, 0.0), 0.0);
        assert_eq!(capacity(20e6, 1.0), 2.0e7);
        let c = capacity(20e6, 2.863e3);
        assert!((c - 2.297e8).abs() / 2.297e8 < 1e-3);
    }

    #[test]
    fn link_capacity_composition() {
        let radio = table_radio();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = Vec3::new(
                rng.random_range(0.0..500.0),
                rng.random_range(0.0..500.0),
                rng.random_range(0.0..100.0),
            );
            let b = Vec3::new(
                rng.random_range(0.0..500.0),
                rng.random_range(0.0..500.0),
                rng.random_range(100.0..200.0),
            );
            let bw = rng.random_range(20e6..160e6);
            let chained = capacity(
                bw,
                snr(
                    radio.tx_power,
                    path_loss(a.distance(b), radio.wavelength).unwrap(),
                    bw,
                    radio.noise_psd,
                )
                .unwrap(),
            );
            assert_eq!(link_capacity(a, b, bw, &radio).unwrap(), chained);
        }
    }

    #[test]
    fn link_capacity_monotone_in_distance() {
        let radio = table_radio();
        let tx = Vec3::new(0.0, 0.0, 0.0);
        let mut prev = f64::INFINITY;
        for k in 1..50 {
            let rx = Vec3::new(10.0 * k as f64, 5.0 * k as f64, 2.0 * k as f64);
            let c = link_capacity(tx, rx, 20e6, &radio).unwrap();
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn link_capacity_table_values() {
        let radio = table_radio();
        let c = link_capacity(
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(100.0, 0.0, 0.0),
            20e6,
            &radio,
        )
        .unwrap();
        assert!((c - 2.297e8).abs() / 2.297e8 < 1e-3);
    }

    #[test]
    fn capacity_increasing_in_bandwidth_for_fixed_received_power() {
        // with snr = c/B, B*log2(1 + c/B) increases in B
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let c = rng.random_range(1e3..1e12);
            let b1 = rng.random_range(1e6..1e9);
            let b2 = b1 * rng.random_range(1.001..10.0);
            let cap1 = capacity(b1, c / b1);
            let cap2 = capacity(b2, c / b2);
            assert!(cap2 > cap1, "c={c} b1={b1} b2={b2}");
        }
    }

    #[test]
    fn generic_scalar_f32_instantiation() {
        let g32 = path_loss(100.0f32, 0.06f32).unwrap();
        let g64 = path_loss(100.0f64, 0.06f64).unwrap();
        assert!((g32 as f64 - g64).abs() / g64 < 1e-5);
    }
}
