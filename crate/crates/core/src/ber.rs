//! AWGN estimate of pre-FEC BER for Gray-coded DP-QPSK and DP-16QAM, and the
//! FEC threshold test.
//!
//! The OSNR → SNR conversion uses the dual-polarization convention
//! `SNR = OSNR · B_ref / R_s`: the OSNR counts the noise of both polarizations
//! in `B_ref` and the receiver sees the total signal over `R_s`.

use serde::{Deserialize, Serialize};
use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::components::ModulationFormat;
use crate::scalar::Scalar;
use crate::units::{db_to_linear, OsnrLinear};

pub const DEFAULT_FEC_THRESHOLD: f64 = 2e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FecPolicy {
    pub threshold_ber: f64,
}

impl Default for FecPolicy {
    fn default() -> Self {
        Self {
            threshold_ber: DEFAULT_FEC_THRESHOLD,
        }
    }
}

impl FecPolicy {
    pub fn new(threshold_ber: f64) -> Result<Self, String> {
        if threshold_ber > 0.0 && threshold_ber < 0.5 {
            Ok(Self { threshold_ber })
        } else {
            Err(format!("FEC threshold {threshold_ber} outside (0, 0.5)"))
        }
    }
}

pub fn snr_from_osnr<T: Scalar>(osnr: OsnrLinear<T>, symbol_rate_baud: T, b_ref_hz: T) -> T {
    osnr.0 * b_ref_hz / symbol_rate_baud
}

/// Estimated BER at linear `snr`, after subtracting `penalty_db` of
/// implementation penalty.
pub fn ber_estimate<T: Scalar>(snr: T, format: ModulationFormat, penalty_db: T) -> T {
    let snr = (snr / db_to_linear(penalty_db)).to_f64_lossy();
    let ber = match format {
        ModulationFormat::DpQpsk => 0.5 * erfc((snr / 2.0).sqrt()),
        ModulationFormat::Dp16Qam => 0.375 * erfc((snr / 10.0).sqrt()),
    };
    T::lit(ber)
}

/// Q factor `√2·erfc⁻¹(2·BER)` of the QPSK-equivalent decision, linear.
fn q_from_ber(ber: f64) -> Option<f64> {
    (ber > 0.0 && ber < 0.5).then(|| std::f64::consts::SQRT_2 * erfc_inv(2.0 * ber))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FecVerdict {
    pub pass: bool,
    /// `Q²(ber) − Q²(threshold)` in dB. `None` when the BER is zero (unbounded
    /// margin) or at the 0.5 ceiling.
    pub margin_db: Option<f64>,
}

/// Passes iff `ber` is strictly below the threshold.
pub fn fec_verdict<T: Scalar>(ber: T, policy: &FecPolicy) -> FecVerdict {
    let ber = ber.to_f64_lossy();
    assert!((0.0..=0.5).contains(&ber), "BER {ber} outside [0, 0.5]");
    let margin_db = match (q_from_ber(ber), q_from_ber(policy.threshold_ber)) {
        (Some(q), Some(q_thr)) => Some(20.0 * (q / q_thr).log10()),
        _ => None,
    };
    FecVerdict {
        pass: ber < policy.threshold_ber,
        margin_db,
    }
}
