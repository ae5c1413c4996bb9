//! Parameter records for the optical elements of a wavelength-blocker node
//! chain: transmitters, amplifiers, couplers, splitters, blockers, receivers.
//!
//! Records hold dB/dBm values as written in configuration files. Formulas
//! convert to linear units where they consume them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::units::{db_to_linear, PowerDbm, PowerLinear};

/// One violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{component}: {what} out of range ({value})")]
    OutOfRange {
        component: &'static str,
        what: &'static str,
        value: f64,
    },
    #[error("receiver: p_min ({p_min} dBm) must be below p_max ({p_max} dBm)")]
    ReceiverWindow { p_min: f64, p_max: f64 },
}

impl ParamError {
    fn range<T: Scalar>(component: &'static str, what: &'static str, value: T) -> Self {
        ParamError::OutOfRange {
            component,
            what,
            value: value.to_f64_lossy(),
        }
    }
}

/// Checks a record's invariants, returning it unchanged when they all hold
/// and one error per violated invariant otherwise.
pub trait Validate: Sized {
    fn errors(&self) -> Vec<ParamError>;

    fn validate(self) -> Result<Self, Vec<ParamError>> {
        let errors = self.errors();
        if errors.is_empty() {
            Ok(self)
        } else {
            Err(errors)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModulationFormat {
    #[serde(rename = "DP-QPSK")]
    DpQpsk,
    #[serde(rename = "DP-16QAM")]
    Dp16Qam,
}

impl fmt::Display for ModulationFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModulationFormat::DpQpsk => "DP-QPSK",
            ModulationFormat::Dp16Qam => "DP-16QAM",
        })
    }
}

/// Coherent transmitter. Its integrated amplifier emits unfiltered broadband
/// ASE, so `osnr_tx_db` is the ratio of its signal to that noise in the
/// reference bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmitterParams<T> {
    pub p_tx_dbm: T,
    pub osnr_tx_db: T,
    pub format: ModulationFormat,
    pub symbol_rate_baud: T,
}

impl<T: Scalar> TransmitterParams<T> {
    pub fn power(&self) -> PowerLinear<T> {
        PowerDbm(self.p_tx_dbm).to_linear()
    }

    /// Broadband noise in the reference bandwidth emitted into every slot.
    pub fn broadband_noise(&self) -> T {
        self.power().0 / db_to_linear(self.osnr_tx_db)
    }
}

impl<T: Scalar> Validate for TransmitterParams<T> {
    fn errors(&self) -> Vec<ParamError> {
        let mut e = Vec::new();
        if !(self.p_tx_dbm >= T::lit(-10.0) && self.p_tx_dbm <= T::lit(10.0)) {
            e.push(ParamError::range("transmitter", "p_tx", self.p_tx_dbm));
        }
        if !(self.osnr_tx_db > T::zero()) {
            e.push(ParamError::range("transmitter", "osnr_tx", self.osnr_tx_db));
        }
        if !(self.symbol_rate_baud > T::zero()) {
            e.push(ParamError::range("transmitter", "symbol_rate", self.symbol_rate_baud));
        }
        e
    }
}

/// How an amplifier picks its gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainMode<T> {
    /// Total output power (signal plus ASE) is driven to `p_out_max`.
    TargetOutput,
    /// Gain is held at the given dB value.
    FixedGain(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct EdfaParams<T> {
    /// Total output power, dBm.
    pub p_out_max_dbm: T,
    pub gain_max_db: T,
    pub noise_figure_db: T,
    /// Linear noise-figure slope across the band, dB per THz relative to the
    /// carrier frequency. Positive values give higher-frequency slots more ASE.
    #[serde(default = "T::zero")]
    pub tilt_db_per_thz: T,
    /// Hold this gain instead of targeting `p_out_max_dbm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_gain_db: Option<T>,
}

impl<T: Scalar> EdfaParams<T> {
    pub fn new(p_out_max_dbm: T, gain_max_db: T, noise_figure_db: T) -> Self {
        Self {
            p_out_max_dbm,
            gain_max_db,
            noise_figure_db,
            tilt_db_per_thz: T::zero(),
            fixed_gain_db: None,
        }
    }

    pub fn mode(&self) -> GainMode<T> {
        match self.fixed_gain_db {
            Some(g) => GainMode::FixedGain(g),
            None => GainMode::TargetOutput,
        }
    }

    /// Noise figure in dB at `frequency_hz`, including tilt.
    pub fn noise_figure_at(&self, frequency_hz: T, reference_hz: T) -> T {
        self.noise_figure_db + self.tilt_db_per_thz * (frequency_hz - reference_hz) / T::lit(1e12)
    }
}

impl<T: Scalar> Validate for EdfaParams<T> {
    fn errors(&self) -> Vec<ParamError> {
        let mut e = Vec::new();
        if !(self.p_out_max_dbm <= T::lit(23.0)) {
            e.push(ParamError::range("edfa", "p_out_max", self.p_out_max_dbm));
        }
        if !(self.gain_max_db > T::zero() && self.gain_max_db <= T::lit(40.0)) {
            e.push(ParamError::range("edfa", "gain_max", self.gain_max_db));
        }
        if !(self.noise_figure_db >= T::lit(3.0)) {
            e.push(ParamError::range("edfa", "noise_figure", self.noise_figure_db));
        }
        if !self.tilt_db_per_thz.is_finite() {
            e.push(ParamError::range("edfa", "tilt", self.tilt_db_per_thz));
        }
        if let Some(g) = self.fixed_gain_db {
            if !(g >= T::zero()) {
                e.push(ParamError::range("edfa", "fixed_gain", g));
            }
        }
        e
    }
}

/// Two-port tap coupler: `ratio` goes to the secondary (drop or add) port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct CouplerParams<T> {
    pub ratio: T,
    #[serde(default = "T::zero")]
    pub excess_loss_db: T,
}

impl<T: Scalar> CouplerParams<T> {
    pub fn new(ratio: T) -> Self {
        Self {
            ratio,
            excess_loss_db: T::zero(),
        }
    }

    /// Linear power factor to the tap port.
    pub fn tap_factor(&self) -> T {
        self.ratio / db_to_linear(self.excess_loss_db)
    }

    /// Linear power factor to the through port.
    pub fn through_factor(&self) -> T {
        (T::one() - self.ratio) / db_to_linear(self.excess_loss_db)
    }
}

impl<T: Scalar> Validate for CouplerParams<T> {
    fn errors(&self) -> Vec<ParamError> {
        let mut e = Vec::new();
        if !(self.ratio > T::zero() && self.ratio < T::one()) {
            e.push(ParamError::range("coupler", "ratio", self.ratio));
        }
        if !(self.excess_loss_db >= T::zero()) {
            e.push(ParamError::range("coupler", "excess_loss", self.excess_loss_db));
        }
        e
    }
}

/// 1×K splitter (or K×1 combiner).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SplitterParams<T> {
    pub ways: usize,
    #[serde(default = "T::zero")]
    pub excess_loss_db: T,
}

impl<T: Scalar> SplitterParams<T> {
    pub fn new(ways: usize) -> Self {
        Self {
            ways,
            excess_loss_db: T::zero(),
        }
    }

    /// Per-branch loss in dB: `10·log10(ways) + excess`.
    pub fn branch_loss_db(&self) -> T {
        T::ten() * T::from_count(self.ways).log10() + self.excess_loss_db
    }
}

impl<T: Scalar> Validate for SplitterParams<T> {
    fn errors(&self) -> Vec<ParamError> {
        let mut e = Vec::new();
        if self.ways < 1 {
            e.push(ParamError::range("splitter", "ways", T::from_count(self.ways)));
        }
        if !(self.excess_loss_db >= T::zero()) {
            e.push(ParamError::range("splitter", "excess_loss", self.excess_loss_db));
        }
        e
    }
}

fn default_max_attenuation<T: Scalar>() -> T {
    T::lit(15.0)
}

/// Wavelength blocker with per-channel equalization.
///
/// `insertion_loss_db` already contains the equalization headroom; the
/// per-slot equalizer attenuates on top of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct WavelengthBlockerParams<T> {
    pub insertion_loss_db: T,
    #[serde(default = "default_max_attenuation")]
    pub max_attenuation_db: T,
    /// 1-based slot indices blocked in the express path.
    #[serde(default)]
    pub blocked: BTreeSet<usize>,
    /// Extinction of blocked slots relative to the pass state. `None` blocks
    /// ideally; otherwise leaked power reappears as in-band crosstalk noise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isolation_db: Option<T>,
    /// Equalize active slots to this output power instead of to the weakest
    /// active slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalization_target_dbm: Option<T>,
}

impl<T: Scalar> WavelengthBlockerParams<T> {
    pub fn new(insertion_loss_db: T) -> Self {
        Self {
            insertion_loss_db,
            max_attenuation_db: default_max_attenuation(),
            blocked: BTreeSet::new(),
            isolation_db: None,
            equalization_target_dbm: None,
        }
    }

    pub fn with_blocked(mut self, slots: impl IntoIterator<Item = usize>) -> Self {
        self.blocked.extend(slots);
        self
    }
}

impl<T: Scalar> Validate for WavelengthBlockerParams<T> {
    fn errors(&self) -> Vec<ParamError> {
        let mut e = Vec::new();
        if !(self.insertion_loss_db >= T::zero()) {
            e.push(ParamError::range("wavelength blocker", "insertion_loss", self.insertion_loss_db));
        }
        if !(self.max_attenuation_db >= T::zero()) {
            e.push(ParamError::range("wavelength blocker", "max_attenuation", self.max_attenuation_db));
        }
        if let Some(iso) = self.isolation_db {
            if !(iso >= T::zero()) {
                e.push(ParamError::range("wavelength blocker", "isolation", iso));
            }
        }
        if self.blocked.contains(&0) {
            e.push(ParamError::range("wavelength blocker", "blocked slot", T::zero()));
        }
        e
    }
}

/// Coherent receiver dynamic range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverParams<T> {
    /// Minimum per-channel power, dBm.
    pub p_min_dbm: T,
    /// Maximum total input power, dBm.
    pub p_max_dbm: T,
}

impl<T: Scalar> Validate for ReceiverParams<T> {
    fn errors(&self) -> Vec<ParamError> {
        if self.p_min_dbm < self.p_max_dbm {
            Vec::new()
        } else {
            vec![ParamError::ReceiverWindow {
                p_min: self.p_min_dbm.to_f64_lossy(),
                p_max: self.p_max_dbm.to_f64_lossy(),
            }]
        }
    }
}
