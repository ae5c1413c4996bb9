//! Closed-form OSNR algebra for uniform chains: transmitter coupling penalty,
//! span accumulation, harmonic combination with added-channel noise, and the
//! combined span-plus-add expression. `inverse_osnr_accumulate` is the
//! independent route every closed form is cross-checked against.

use crate::scalar::Scalar;
use crate::units::{db_to_linear, OsnrDb, OsnrLinear, PhysicalConstants, PowerLinear};

/// Noise contribution of one amplified span, identical at every stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageNoise<T> {
    /// Per-channel signal power at the amplifier input, W.
    pub p_in_edfa: PowerLinear<T>,
    pub noise_figure_linear: T,
    pub constants: PhysicalConstants<T>,
}

impl<T: Scalar> StageNoise<T> {
    pub fn new(p_in_edfa: PowerLinear<T>, noise_figure_db: T, constants: PhysicalConstants<T>) -> Self {
        Self {
            p_in_edfa,
            noise_figure_linear: db_to_linear(noise_figure_db),
            constants,
        }
    }

    /// `h·f_c·B_ref·F_N`, input-referred ASE per stage in W.
    pub fn ase_power(&self) -> T {
        self.constants.quantum_noise(self.constants.carrier_hz) * self.noise_figure_linear
    }

    /// OSNR a single stage would have on a noiseless input.
    pub fn stage_osnr(&self) -> OsnrLinear<T> {
        OsnrLinear(self.p_in_edfa.0 / self.ase_power())
    }
}

/// OSNR per channel after combining `n` unfiltered transmitters, each filling
/// every slot with its own broadband noise.
pub fn coupled_tx_osnr<T: Scalar>(osnr_tx: OsnrDb<T>, n: usize) -> OsnrDb<T> {
    assert!(n >= 1, "at least one transmitter");
    OsnrDb(osnr_tx.0 - T::ten() * T::from_count(n).log10())
}

/// OSNR after `m` identical amplified spans.
pub fn osnr_after_spans<T: Scalar>(osnr_tx_n: OsnrLinear<T>, stage: &StageNoise<T>, m: usize) -> OsnrLinear<T> {
    let p_in = stage.p_in_edfa.0;
    let m = T::from_count(m);
    OsnrLinear(osnr_tx_n.0 * p_in / (p_in + m * stage.ase_power() * osnr_tx_n.0))
}

/// Harmonic combination: the noise of two paths adds.
pub fn combine_osnr<T: Scalar>(a: OsnrLinear<T>, b: OsnrLinear<T>) -> OsnrLinear<T> {
    debug_assert!(a.0 > T::zero() && b.0 > T::zero());
    OsnrLinear(a.0 * b.0 / (a.0 + b.0))
}

/// Add-path OSNR seen by each channel when `k` unfiltered transmitters are
/// combined into a node.
pub fn osnr_add_k<T: Scalar>(osnr_tx: OsnrLinear<T>, k: usize) -> OsnrLinear<T> {
    assert!(k >= 1, "at least one added channel");
    OsnrLinear(osnr_tx.0 / T::from_count(k))
}

/// OSNR after `m` nodes, each contributing one span stage and one add stage.
pub fn osnr_after_nodes<T: Scalar>(
    osnr_tx_n: OsnrLinear<T>,
    stage: &StageNoise<T>,
    osnr_add_k: OsnrLinear<T>,
    m: usize,
) -> OsnrLinear<T> {
    let p_in = stage.p_in_edfa.0;
    let m = T::from_count(m);
    OsnrLinear(p_in / (m * stage.ase_power() + p_in * (m / osnr_add_k.0 + T::one() / osnr_tx_n.0)))
}

/// `1/OSNR = 1/OSNR_0 + Σ 1/OSNR_i`.
pub fn inverse_osnr_accumulate<T: Scalar>(
    initial: OsnrLinear<T>,
    stage_osnrs: impl IntoIterator<Item = OsnrLinear<T>>,
) -> OsnrLinear<T> {
    let inv = stage_osnrs
        .into_iter()
        .fold(T::one() / initial.0, |acc, s| acc + T::one() / s.0);
    OsnrLinear(T::one() / inv)
}
