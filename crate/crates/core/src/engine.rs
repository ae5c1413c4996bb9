//! Per-slot propagation of signal and ASE power through the element chain:
//! transmitter combiner, booster, spans, add/drop nodes, tail receivers.
//!
//! Every slot carries a (signal, noise) pair in watts. Noise is the ASE power
//! inside the OSNR reference bandwidth, assumed flat across the slot. Dark
//! slots carry noise too, since neither amplifiers nor unfiltered
//! transmitters confine their ASE to lit channels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{CouplerParams, EdfaParams, GainMode, ReceiverParams, SplitterParams, WavelengthBlockerParams};
use crate::network::{validate_topology, ChannelPlan, Element, NodeId, Topology, TopologyError};
use crate::scalar::Scalar;
use crate::units::{db_to_linear, linear_to_db, OsnrLinear, PhysicalConstants, PowerDbm, PowerLinear};
use crate::components::TransmitterParams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("topology invalid: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Topology(Vec<TopologyError>),
    #[error("no input power at {0}")]
    NoInputPower(String),
    #[error("add into lit slot: wavelength collision at {node} slot {slot}")]
    Collision { node: NodeId, slot: usize },
}

/// Whether the head booster's own ASE is modeled, or taken to be already
/// contained in the coupled transmitter OSNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoosterNoise {
    #[default]
    Counted,
    InTxOsnr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions<T> {
    pub constants: PhysicalConstants<T>,
    pub booster_noise: BoosterNoise,
}

impl<T: Scalar> Default for EngineOptions<T> {
    fn default() -> Self {
        Self {
            constants: PhysicalConstants::default(),
            booster_noise: BoosterNoise::Counted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SlotState<T> {
    pub slot: usize,
    pub frequency_hz: T,
    /// Signal power, W.
    pub signal: T,
    /// ASE power in the reference bandwidth, W.
    pub noise: T,
    pub active: bool,
    pub origin: Option<NodeId>,
}

impl<T: Scalar> SlotState<T> {
    pub fn osnr(&self) -> Option<OsnrLinear<T>> {
        if self.active {
            OsnrLinear::from_powers(self.signal, self.noise)
        } else {
            None
        }
    }

    fn scale(&mut self, factor: T) {
        self.signal = self.signal * factor;
        self.noise = self.noise * factor;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ChannelState<T> {
    /// Indexed by `slot - 1`.
    pub slots: Vec<SlotState<T>>,
    /// Width over which a slot's noise density extends, Hz.
    pub slot_width_hz: T,
}

impl<T: Scalar> ChannelState<T> {
    pub fn dark(plan: &ChannelPlan<T>) -> Self {
        Self {
            slots: plan
                .slots()
                .map(|slot| SlotState {
                    slot,
                    frequency_hz: plan.frequency(slot),
                    signal: T::zero(),
                    noise: T::zero(),
                    active: false,
                    origin: None,
                })
                .collect(),
            slot_width_hz: plan.spacing_hz,
        }
    }

    pub fn slot(&self, slot: usize) -> Option<&SlotState<T>> {
        self.slots.get(slot.wrapping_sub(1))
    }

    pub fn osnr(&self, slot: usize) -> Option<OsnrLinear<T>> {
        self.slot(slot).and_then(SlotState::osnr)
    }

    pub fn active_count(&self) -> usize {
        self.slots.iter().filter(|s| s.active).count()
    }

    /// Total optical power: all signals plus ASE integrated over every slot.
    pub fn total_power(&self, reference_bandwidth_hz: T) -> PowerLinear<T> {
        let width = self.slot_width_hz / reference_bandwidth_hz;
        PowerLinear(self.slots.iter().map(|s| s.signal + s.noise * width).sum())
    }
}

/// Attenuation, either common to all slots or per slot (dB, indexed by
/// `slot - 1`).
#[derive(Debug, Clone, PartialEq)]
pub enum Loss<T> {
    Uniform(T),
    PerSlot(Vec<T>),
}

/// Scales signal and noise alike; per-slot OSNR is unchanged.
pub fn apply_attenuation<T: Scalar>(mut state: ChannelState<T>, loss: &Loss<T>) -> ChannelState<T> {
    match loss {
        Loss::Uniform(db) => {
            let f = T::one() / db_to_linear(*db);
            state.slots.iter_mut().for_each(|s| s.scale(f));
        }
        Loss::PerSlot(dbs) => {
            for (s, db) in state.slots.iter_mut().zip(dbs) {
                s.scale(T::one() / db_to_linear(*db));
            }
        }
    }
    state
}

/// Splits at a tap coupler into (tap port, through port).
pub fn split<T: Scalar>(state: &ChannelState<T>, coupler: &CouplerParams<T>) -> (ChannelState<T>, ChannelState<T>) {
    let mut tap = state.clone();
    let mut through = state.clone();
    let (a, b) = (coupler.tap_factor(), coupler.through_factor());
    tap.slots.iter_mut().for_each(|s| s.scale(a));
    through.slots.iter_mut().for_each(|s| s.scale(b));
    (tap, through)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WarningKind {
    /// Required gain exceeded the amplifier maximum; output is short.
    GainClamped { required_db: f64, max_db: f64 },
    /// Input already above the output target; amplifier left at unity gain.
    GainFloor { required_db: f64 },
    /// Equalization needed more attenuation than the blocker provides.
    EqualizationCapped { slot: usize, required_db: f64, max_db: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    /// Index of the trace point the warning belongs to.
    pub point: usize,
    pub node: NodeId,
    #[serde(flatten)]
    pub kind: WarningKind,
}

impl Warning {
    /// True for conditions that make the configured link unbuildable.
    pub fn is_infeasible(&self) -> bool {
        matches!(self.kind, WarningKind::GainClamped { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierOutcome<T> {
    pub gain_db: T,
    pub clamped: Option<ClampKind>,
    pub required_db: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClampKind {
    Ceiling,
    Floor,
}

/// Amplifies every slot and adds `(g−1)·h·f·B_ref·F(f)` of ASE per slot.
/// With `add_noise = false` the amplifier is treated as noiseless.
pub fn apply_edfa<T: Scalar>(
    mut state: ChannelState<T>,
    amp: &EdfaParams<T>,
    constants: &PhysicalConstants<T>,
    add_noise: bool,
) -> Result<(ChannelState<T>, AmplifierOutcome<T>), EngineError> {
    let b_ref = constants.reference_bandwidth_hz;
    let p_in = state.total_power(b_ref).0;
    if !(p_in > T::zero()) {
        return Err(EngineError::NoInputPower("amplifier input".into()));
    }
    // ASE per slot for unit (g − 1), in the reference bandwidth.
    let unit_ase: Vec<T> = state
        .slots
        .iter()
        .map(|s| {
            if add_noise {
                let nf = amp.noise_figure_at(s.frequency_hz, constants.carrier_hz);
                constants.quantum_noise(s.frequency_hz) * db_to_linear(nf)
            } else {
                T::zero()
            }
        })
        .collect();

    let required = match amp.mode() {
        GainMode::FixedGain(g) => db_to_linear(g),
        GainMode::TargetOutput => {
            // g·(P_in + A) − A = P_out with A the total unit ASE.
            let width = state.slot_width_hz / b_ref;
            let a: T = unit_ase.iter().map(|&x| x * width).sum();
            let p_out = PowerDbm(amp.p_out_max_dbm).to_linear().0;
            (p_out + a) / (p_in + a)
        }
    };
    let g_max = db_to_linear(amp.gain_max_db);
    let (gain, clamped) = if required > g_max {
        (g_max, Some(ClampKind::Ceiling))
    } else if required < T::one() {
        (T::one(), Some(ClampKind::Floor))
    } else {
        (required, None)
    };

    for (s, ase) in state.slots.iter_mut().zip(&unit_ase) {
        s.signal = s.signal * gain;
        s.noise = s.noise * gain + (gain - T::one()) * *ase;
    }
    let ten = T::ten();
    Ok((
        state,
        AmplifierOutcome {
            gain_db: ten * gain.log10(),
            clamped,
            required_db: ten * required.log10(),
        },
    ))
}

/// Blocks, then attenuates every passing slot by the insertion loss and
/// equalizes active slots to a common power. Returns the slots whose required
/// equalization exceeded the device range, with the required attenuation.
pub fn apply_wb<T: Scalar>(
    mut state: ChannelState<T>,
    wb: &WavelengthBlockerParams<T>,
) -> (ChannelState<T>, Vec<(usize, T)>) {
    let il = T::one() / db_to_linear(wb.insertion_loss_db);
    for s in state.slots.iter_mut() {
        if wb.blocked.contains(&s.slot) {
            let leak = match wb.isolation_db {
                None => T::zero(),
                Some(iso) => (s.signal + s.noise) * il / db_to_linear(iso),
            };
            s.signal = T::zero();
            s.noise = leak;
            s.active = false;
            s.origin = None;
        } else {
            s.scale(il);
        }
    }

    let target = match wb.equalization_target_dbm {
        Some(dbm) => Some(PowerDbm(dbm).to_linear().0),
        None => state
            .slots
            .iter()
            .filter(|s| s.active)
            .map(|s| s.signal)
            .fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.min(x)))),
    };
    let mut capped = Vec::new();
    if let Some(target) = target {
        let max_att = db_to_linear(wb.max_attenuation_db);
        for s in state.slots.iter_mut().filter(|s| s.active) {
            if s.signal <= target {
                continue;
            }
            let needed = s.signal / target;
            let att = if needed > max_att {
                capped.push((s.slot, T::ten() * needed.log10()));
                max_att
            } else {
                needed
            };
            s.scale(T::one() / att);
        }
    }
    (state, capped)
}

/// Combines `adds` through a K×1 combiner and the add coupler onto the
/// express path. Each transmitter lands its signal in its own slot and its
/// broadband ASE in every slot.
pub fn apply_add<T: Scalar>(
    state: ChannelState<T>,
    adds: &[(usize, TransmitterParams<T>)],
    combiner: &SplitterParams<T>,
    add_coupler: &CouplerParams<T>,
    node: NodeId,
) -> Result<ChannelState<T>, EngineError> {
    let (_, mut out) = split(&state, add_coupler);
    let path = add_coupler.tap_factor() / db_to_linear(combiner.branch_loss_db());
    inject(&mut out, adds, path, node)?;
    Ok(out)
}

fn inject<T: Scalar>(
    state: &mut ChannelState<T>,
    adds: &[(usize, TransmitterParams<T>)],
    path: T,
    node: NodeId,
) -> Result<(), EngineError> {
    let broadband: T = adds.iter().map(|(_, tx)| tx.broadband_noise()).sum::<T>() * path;
    for (slot, tx) in adds {
        let s = state
            .slots
            .get_mut(slot.wrapping_sub(1))
            .ok_or(EngineError::Collision { node, slot: *slot })?;
        if s.active {
            return Err(EngineError::Collision { node, slot: *slot });
        }
        s.signal = tx.power().0 * path;
        s.active = true;
        s.origin = Some(node);
    }
    for s in state.slots.iter_mut() {
        s.noise = s.noise + broadband;
    }
    Ok(())
}

/// Transmitters of the head terminal through its combiner.
pub fn launch<T: Scalar>(
    plan: &ChannelPlan<T>,
    adds: &[(usize, TransmitterParams<T>)],
    combiner: &SplitterParams<T>,
) -> Result<ChannelState<T>, EngineError> {
    let mut state = ChannelState::dark(plan);
    inject(&mut state, adds, T::one() / db_to_linear(combiner.branch_loss_db()), NodeId(0))?;
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RxCheck {
    PerChannelMin,
    TotalMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct RxVerdict<T> {
    /// Slot for per-channel checks, `None` for the total-power check.
    pub slot: Option<usize>,
    pub check: RxCheck,
    pub pass: bool,
    /// Headroom in dB, negative on failure. `None` when undefined.
    pub margin_db: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Receiver dynamic range at a drop output: each received slot must reach
/// `p_min`; the total power of every slot reaching the receiver (the drop is
/// unfiltered) must not exceed `p_max`.
pub fn receiver_check<T: Scalar>(
    state: &ChannelState<T>,
    rx: &ReceiverParams<T>,
    received: &[usize],
    constants: &PhysicalConstants<T>,
) -> Vec<RxVerdict<T>> {
    let mut out: Vec<RxVerdict<T>> = received
        .iter()
        .map(|&slot| match state.slot(slot) {
            Some(s) if s.active && s.signal > T::zero() => {
                let dbm = PowerLinear(s.signal).to_dbm().expect("positive").0;
                let margin = dbm - rx.p_min_dbm;
                RxVerdict {
                    slot: Some(slot),
                    check: RxCheck::PerChannelMin,
                    pass: margin >= T::zero(),
                    margin_db: Some(margin),
                    note: None,
                }
            }
            _ => RxVerdict {
                slot: Some(slot),
                check: RxCheck::PerChannelMin,
                pass: false,
                margin_db: None,
                note: Some("slot inactive".into()),
            },
        })
        .collect();
    let total = state.total_power(constants.reference_bandwidth_hz);
    out.push(match total.to_dbm() {
        Ok(dbm) => {
            let margin = rx.p_max_dbm - dbm.0;
            RxVerdict {
                slot: None,
                check: RxCheck::TotalMax,
                pass: margin >= T::zero(),
                margin_db: Some(margin),
                note: None,
            }
        }
        Err(_) => RxVerdict {
            slot: None,
            check: RxCheck::TotalMax,
            pass: true,
            margin_db: None,
            note: Some("no light".into()),
        },
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Launch,
    Amplifier,
    Drop,
    NodeOutput,
    Receiver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TracePoint<T> {
    pub label: String,
    pub kind: PointKind,
    pub node: NodeId,
    /// Fibre distance from the head terminal, km.
    pub distance_km: T,
    pub state: ChannelState<T>,
    /// Slots detected at this point (drop and receiver points only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub received: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub receiver: Vec<RxVerdict<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PropagationTrace<T> {
    pub points: Vec<TracePoint<T>>,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

impl<T: Scalar> PropagationTrace<T> {
    pub fn point(&self, label: &str) -> Option<&TracePoint<T>> {
        self.points.iter().find(|p| p.label == label)
    }

    /// Drop and receiver points, in order.
    pub fn receive_points(&self) -> impl Iterator<Item = (usize, &TracePoint<T>)> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p.kind, PointKind::Drop | PointKind::Receiver))
    }

    /// True if an infeasibility warning was raised at or before point `index`.
    pub fn infeasible_upto(&self, index: usize) -> bool {
        self.warnings.iter().any(|w| w.point <= index && w.is_infeasible())
    }
}

struct Tracer<T> {
    points: Vec<TracePoint<T>>,
    warnings: Vec<Warning>,
}

impl<T: Scalar> Tracer<T> {
    fn record(&mut self, label: String, kind: PointKind, node: NodeId, distance_km: T, state: &ChannelState<T>) -> usize {
        self.points.push(TracePoint {
            label,
            kind,
            node,
            distance_km,
            state: state.clone(),
            received: Vec::new(),
            receiver: Vec::new(),
        });
        self.points.len() - 1
    }

    fn amplify(
        &mut self,
        state: ChannelState<T>,
        amp: &EdfaParams<T>,
        opts: &EngineOptions<T>,
        add_noise: bool,
        label: String,
        node: NodeId,
        distance_km: T,
    ) -> Result<ChannelState<T>, EngineError> {
        let (state, outcome) = apply_edfa(state, amp, &opts.constants, add_noise).map_err(|e| match e {
            EngineError::NoInputPower(_) => EngineError::NoInputPower(label.clone()),
            other => other,
        })?;
        let point = self.record(label, PointKind::Amplifier, node, distance_km, &state);
        match outcome.clamped {
            Some(ClampKind::Ceiling) => self.warnings.push(Warning {
                point,
                node,
                kind: WarningKind::GainClamped {
                    required_db: outcome.required_db.to_f64_lossy(),
                    max_db: amp.gain_max_db.to_f64_lossy(),
                },
            }),
            Some(ClampKind::Floor) => self.warnings.push(Warning {
                point,
                node,
                kind: WarningKind::GainFloor {
                    required_db: outcome.required_db.to_f64_lossy(),
                },
            }),
            None => {}
        }
        Ok(state)
    }

    fn receive(
        &mut self,
        state: &ChannelState<T>,
        label: String,
        kind: PointKind,
        node: NodeId,
        distance_km: T,
        received: Vec<usize>,
        rx: &ReceiverParams<T>,
        constants: &PhysicalConstants<T>,
    ) {
        let i = self.record(label, kind, node, distance_km, state);
        self.points[i].receiver = receiver_check(state, rx, &received, constants);
        self.points[i].received = received;
    }
}

/// Folds the topology head to tail, recording every measurement point.
pub fn propagate<T: Scalar>(t: &Topology<T>, opts: &EngineOptions<T>) -> Result<PropagationTrace<T>, EngineError> {
    validate_topology(t).map_err(EngineError::Topology)?;
    let constants = &opts.constants;
    let mut tr = Tracer {
        points: Vec::new(),
        warnings: Vec::new(),
    };
    let mut distance = T::zero();

    let head = NodeId(0);
    let mut state = launch(&t.plan, &t.head.add_list(), &t.head.combiner())?;
    tr.record("head/launch".into(), PointKind::Launch, head, distance, &state);
    state = tr.amplify(
        state,
        &t.head.booster,
        opts,
        opts.booster_noise == BoosterNoise::Counted,
        "head/booster".into(),
        head,
        distance,
    )?;

    let mut node_index = 0;
    for element in &t.interior {
        match element {
            Element::Span(span) => {
                state = apply_attenuation(state, &Loss::Uniform(span.loss_db()));
                distance = distance + span.length_km;
            }
            Element::Node(node) => {
                node_index += 1;
                let id = NodeId(node_index);
                let tag = format!("node{node_index}");
                state = tr.amplify(state, &node.pre_amp, opts, true, format!("{tag}/preamp"), id, distance)?;

                let (tap, through) = split(&state, &node.drop_coupler);
                let drop_loss = t.drop_path_extra_loss_db + node.drop_splitter.branch_loss_db();
                let at_rx = apply_attenuation(tap, &Loss::Uniform(drop_loss));
                tr.receive(
                    &at_rx,
                    format!("{tag}/drop"),
                    PointKind::Drop,
                    id,
                    distance,
                    node.received_slots(),
                    &t.rx,
                    constants,
                );

                let (blocked, capped) = apply_wb(through, &node.wb);
                let added = apply_add(blocked, &node.add_list(), &node.add_combiner(), &node.add_coupler, id)?;
                let point = tr.record(format!("{tag}/out"), PointKind::NodeOutput, id, distance, &added);
                for (slot, required) in capped {
                    tr.warnings.push(Warning {
                        point,
                        node: id,
                        kind: WarningKind::EqualizationCapped {
                            slot,
                            required_db: required.to_f64_lossy(),
                            max_db: node.wb.max_attenuation_db.to_f64_lossy(),
                        },
                    });
                }
                state = added;
            }
        }
    }

    let tail = t.tail_id();
    state = tr.amplify(state, &t.tail.pre_amp, opts, true, "tail/preamp".into(), tail, distance)?;
    let at_rx = apply_attenuation(
        state,
        &Loss::Uniform(t.drop_path_extra_loss_db + t.tail.splitter.branch_loss_db()),
    );
    let mut received: Vec<usize> = t.tail.drops.iter().flat_map(|r| r.iter()).collect();
    if received.is_empty() {
        received = at_rx.slots.iter().filter(|s| s.active).map(|s| s.slot).collect();
    }
    received.sort_unstable();
    received.dedup();
    tr.receive(&at_rx, "tail/rx".into(), PointKind::Receiver, tail, distance, received, &t.rx, constants);

    Ok(PropagationTrace {
        points: tr.points,
        warnings: tr.warnings,
    })
}

/// OSNR of `slot` in dB, if lit and noisy.
pub fn osnr_db<T: Scalar>(state: &ChannelState<T>, slot: usize) -> Option<T> {
    state.osnr(slot).map(|o| o.to_db().0)
}

/// Signal power of `slot` in dBm, if lit.
pub fn signal_dbm<T: Scalar>(state: &ChannelState<T>, slot: usize) -> Option<T> {
    state
        .slot(slot)
        .filter(|s| s.signal > T::zero())
        .and_then(|s| linear_to_db(s.signal / T::lit(1e-3)).ok())
}
