//! dB/linear conversions, power and OSNR newtypes, and the physical constants
//! that enter every ASE noise expression.
//!
//! All arithmetic downstream of this module is done in linear units. The dB
//! types exist for configuration files and reports.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Planck constant in J·s (SI defining value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Default carrier frequency for single-frequency formulas, Hz.
pub const DEFAULT_CARRIER_HZ: f64 = 193.4e12;
/// Default OSNR reference bandwidth (0.1 nm at 1550 nm), Hz.
pub const DEFAULT_REFERENCE_BANDWIDTH_HZ: f64 = 12.5e9;

pub const C_BAND_LOW_HZ: f64 = 191.0e12;
pub const C_BAND_HIGH_HZ: f64 = 197.0e12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum UnitError {
    #[error("cannot express non-positive value {0} in dB")]
    NonPositive(f64),
    #[error("reference bandwidth must be positive, got {0} Hz")]
    ReferenceBandwidth(f64),
    #[error("carrier frequency {0} Hz outside the C-band")]
    CarrierOutOfBand(f64),
}

#[inline]
pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::ten().powf(db / T::ten())
}

/// `10·log10(x)`. A dark slot (zero power) has no dB representation.
#[inline]
pub fn linear_to_db<T: Scalar>(x: T) -> Result<T, UnitError> {
    if x > T::zero() {
        Ok(T::ten() * x.log10())
    } else {
        Err(UnitError::NonPositive(x.to_f64_lossy()))
    }
}

#[inline]
pub fn dbm_to_watts<T: Scalar>(p: PowerDbm<T>) -> PowerLinear<T> {
    PowerLinear(T::lit(1e-3) * db_to_linear(p.0))
}

#[inline]
pub fn watts_to_dbm<T: Scalar>(p: PowerLinear<T>) -> Result<PowerDbm<T>, UnitError> {
    linear_to_db(p.0 / T::lit(1e-3)).map(PowerDbm)
}

/// Power in dBm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerDbm<T>(pub T);

/// Power in watts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerLinear<T>(pub T);

/// OSNR in dB, referenced to the OSNR reference bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OsnrDb<T>(pub T);

/// Dimensionless OSNR. Always finite and positive; a noiseless signal is
/// carried as a (signal, noise = 0) pair and never converted to this type.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OsnrLinear<T>(pub T);

impl<T: Scalar> PowerDbm<T> {
    pub fn to_linear(self) -> PowerLinear<T> {
        dbm_to_watts(self)
    }
}

impl<T: Scalar> PowerLinear<T> {
    pub fn to_dbm(self) -> Result<PowerDbm<T>, UnitError> {
        watts_to_dbm(self)
    }
}

impl<T: Scalar> OsnrDb<T> {
    pub fn to_linear(self) -> OsnrLinear<T> {
        OsnrLinear(db_to_linear(self.0))
    }
}

impl<T: Scalar> OsnrLinear<T> {
    pub fn to_db(self) -> OsnrDb<T> {
        // Positive by construction.
        OsnrDb(T::ten() * self.0.log10())
    }

    /// OSNR of a (signal, noise) pair; `None` for a dark or noiseless slot.
    pub fn from_powers(signal: T, noise: T) -> Option<Self> {
        (signal > T::zero() && noise > T::zero()).then(|| OsnrLinear(signal / noise))
    }
}

/// Constants for the `h·f·B_ref·F` ASE expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>", serialize = "T: Serialize"))]
pub struct PhysicalConstants<T> {
    /// Planck constant, J·s.
    #[serde(skip, default = "planck")]
    pub planck: T,
    /// Carrier frequency used by single-frequency formulas, Hz.
    pub carrier_hz: T,
    /// OSNR reference bandwidth, Hz.
    pub reference_bandwidth_hz: T,
}

fn planck<T: Scalar>() -> T {
    T::lit(PLANCK)
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self {
            planck: T::lit(PLANCK),
            carrier_hz: T::lit(DEFAULT_CARRIER_HZ),
            reference_bandwidth_hz: T::lit(DEFAULT_REFERENCE_BANDWIDTH_HZ),
        }
    }
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn validate(self) -> Result<Self, UnitError> {
        if !(self.reference_bandwidth_hz > T::zero()) {
            return Err(UnitError::ReferenceBandwidth(
                self.reference_bandwidth_hz.to_f64_lossy(),
            ));
        }
        let f = self.carrier_hz.to_f64_lossy();
        if !(C_BAND_LOW_HZ..=C_BAND_HIGH_HZ).contains(&f) {
            return Err(UnitError::CarrierOutOfBand(f));
        }
        Ok(self)
    }

    /// `h·f·B_ref`: one photon per mode, in W, at frequency `f`.
    #[inline]
    pub fn quantum_noise(&self, frequency_hz: T) -> T {
        self.planck * frequency_hz * self.reference_bandwidth_hz
    }
}
