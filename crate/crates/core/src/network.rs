//! Declarative horseshoe model: channel plan, terminal and add/drop nodes,
//! spans, and the slot bookkeeping that detects wavelength collisions.
//!
//! One [`Topology`] is one direction of the horseshoe. Slots are numbered
//! from 1 in ascending frequency.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::components::{
    CouplerParams, EdfaParams, ParamError, ReceiverParams, SplitterParams, TransmitterParams, Validate,
    WavelengthBlockerParams,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ChannelPlan<T> {
    pub n_slots: usize,
    /// Frequency of slot 1, Hz.
    pub f_start_hz: T,
    pub spacing_hz: T,
}

impl<T: Scalar> ChannelPlan<T> {
    /// Centre frequency of 1-based `slot`.
    pub fn frequency(&self, slot: usize) -> T {
        self.f_start_hz + T::from_count(slot - 1) * self.spacing_hz
    }

    pub fn slots(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n_slots
    }
}

/// Inclusive run of slots, written in configs as `7` or `"1-90"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotRange {
    pub first: usize,
    pub last: usize,
}

impl SlotRange {
    pub fn single(slot: usize) -> Self {
        Self { first: slot, last: slot }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }
}

impl fmt::Display for SlotRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.first == self.last {
            write!(f, "{}", self.first)
        } else {
            write!(f, "{}-{}", self.first, self.last)
        }
    }
}

impl Serialize for SlotRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.first == self.last {
            s.serialize_u64(self.first as u64)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for SlotRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RangeVisitor;

        impl Visitor<'_> for RangeVisitor {
            type Value = SlotRange;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a slot number or a \"first-last\" range")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<SlotRange, E> {
                Ok(SlotRange::single(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<SlotRange, E> {
                usize::try_from(v)
                    .map(SlotRange::single)
                    .map_err(|_| E::custom(format!("negative slot {v}")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<SlotRange, E> {
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| E::custom(format!("bad slot range \"{v}\"")))
                };
                match v.split_once('-') {
                    Some((a, b)) => {
                        let (first, last) = (parse(a)?, parse(b)?);
                        if first > last {
                            return Err(E::custom(format!("empty slot range \"{v}\"")));
                        }
                        Ok(SlotRange { first, last })
                    }
                    None => parse(v).map(SlotRange::single),
                }
            }
        }

        d.deserialize_any(RangeVisitor)
    }
}

fn expand(ranges: &[SlotRange]) -> Vec<usize> {
    ranges.iter().flat_map(SlotRange::iter).collect()
}

/// Transmitters sharing one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct AddGroup<T> {
    pub slots: Vec<SlotRange>,
    pub tx: TransmitterParams<T>,
}

fn expand_adds<T: Copy>(groups: &[AddGroup<T>]) -> Vec<(usize, TransmitterParams<T>)> {
    groups
        .iter()
        .flat_map(|g| expand(&g.slots).into_iter().map(move |s| (s, g.tx)))
        .collect()
}

/// Terminal node launching the horseshoe: transmitters, combiner, booster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct HeadNode<T> {
    pub booster: EdfaParams<T>,
    /// Combiner; `None` means an ideal N×1 coupler with one port per
    /// transmitter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combiner: Option<SplitterParams<T>>,
    pub adds: Vec<AddGroup<T>>,
}

impl<T: Scalar> HeadNode<T> {
    pub fn add_list(&self) -> Vec<(usize, TransmitterParams<T>)> {
        expand_adds(&self.adds)
    }

    pub fn combiner(&self) -> SplitterParams<T> {
        self.combiner
            .unwrap_or_else(|| SplitterParams::new(self.add_list().len().max(1)))
    }
}

/// Wavelength-blocker add/drop node: pre-amplifier, drop coupler and 1×K
/// splitter, blocker with equalization, K×1 combiner and add coupler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct AddDropNode<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub pre_amp: EdfaParams<T>,
    pub drop_coupler: CouplerParams<T>,
    pub drop_splitter: SplitterParams<T>,
    pub wb: WavelengthBlockerParams<T>,
    pub add_coupler: CouplerParams<T>,
    /// Add-side combiner; defaults to the drop splitter's port count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub add_combiner: Option<SplitterParams<T>>,
    #[serde(default)]
    pub adds: Vec<AddGroup<T>>,
    /// Slots received here and blocked in the express path.
    #[serde(default)]
    pub drops: Vec<SlotRange>,
    /// Slots received here that continue downstream.
    #[serde(default)]
    pub monitors: Vec<SlotRange>,
}

impl<T: Scalar> AddDropNode<T> {
    pub fn add_list(&self) -> Vec<(usize, TransmitterParams<T>)> {
        expand_adds(&self.adds)
    }

    pub fn add_combiner(&self) -> SplitterParams<T> {
        self.add_combiner.unwrap_or(self.drop_splitter)
    }

    pub fn drop_list(&self) -> Vec<usize> {
        expand(&self.drops)
    }

    pub fn monitor_list(&self) -> Vec<usize> {
        expand(&self.monitors)
    }

    /// Dropped then monitored slots, ascending, without repeats.
    pub fn received_slots(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.drop_list().into_iter().chain(self.monitor_list()).collect();
        set.into_iter().collect()
    }
}

/// Terminal node closing the horseshoe: pre-amplifier and receiver splitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TailNode<T> {
    pub pre_amp: EdfaParams<T>,
    pub splitter: SplitterParams<T>,
    /// Received slots; empty means every active slot.
    #[serde(default)]
    pub drops: Vec<SlotRange>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SpanSpec<T> {
    pub length_km: T,
    pub attenuation_db_per_km: T,
    #[serde(default = "T::zero")]
    pub extra_loss_db: T,
}

impl<T: Scalar> SpanSpec<T> {
    pub fn loss_db(&self) -> T {
        self.length_km * self.attenuation_db_per_km + self.extra_loss_db
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum Element<T> {
    Span(SpanSpec<T>),
    Node(AddDropNode<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Topology<T> {
    pub plan: ChannelPlan<T>,
    pub head: HeadNode<T>,
    /// Spans and add/drop nodes in order, starting and ending with a span.
    #[serde(default)]
    pub interior: Vec<Element<T>>,
    pub tail: TailNode<T>,
    pub rx: ReceiverParams<T>,
    /// Loss between every drop port and its splitter, dB.
    #[serde(default = "T::zero")]
    pub drop_path_extra_loss_db: T,
}

/// Position of a node along the horseshoe: 0 is the head terminal, add/drop
/// nodes count from 1, the tail terminal comes last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}", self.0)
    }
}

impl<T: Scalar> Topology<T> {
    pub fn add_drop_nodes(&self) -> impl Iterator<Item = &AddDropNode<T>> {
        self.interior.iter().filter_map(|e| match e {
            Element::Node(n) => Some(n),
            Element::Span(_) => None,
        })
    }

    pub fn spans(&self) -> impl Iterator<Item = &SpanSpec<T>> {
        self.interior.iter().filter_map(|e| match e {
            Element::Span(s) => Some(s),
            Element::Node(_) => None,
        })
    }

    pub fn tail_id(&self) -> NodeId {
        NodeId(self.add_drop_nodes().count() + 1)
    }

    pub fn total_length_km(&self) -> T {
        self.spans().map(|s| s.length_km).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("channel plan: {0}")]
    Plan(String),
    #[error("{node}: {error}")]
    Params { node: NodeId, error: ParamError },
    #[error("span {index}: {what}")]
    Span { index: usize, what: String },
    #[error("interior element {position}: {what}")]
    Alternation { position: usize, what: &'static str },
    #[error("{node} slot {slot}: outside the {n_slots}-slot plan")]
    SlotOutOfRange { node: NodeId, slot: usize, n_slots: usize },
    #[error("wavelength collision at {node} slot {slot}")]
    Collision { node: NodeId, slot: usize },
    #[error("drop without block at {node} slot {slot}")]
    DropWithoutBlock { node: NodeId, slot: usize },
    #[error("receiver on dark slot at {node} slot {slot}")]
    DarkReceive { node: NodeId, slot: usize },
    #[error("{node}: {what} needs {needed} ports, only {ports} available")]
    Ports {
        node: NodeId,
        what: &'static str,
        needed: usize,
        ports: usize,
    },
    #[error("receiver: {0}")]
    Receiver(ParamError),
}

fn param_errors(node: NodeId, errors: Vec<ParamError>, out: &mut Vec<TopologyError>) {
    out.extend(errors.into_iter().map(|error| TopologyError::Params { node, error }));
}

/// Checks element alternation, slot ranges, parameter invariants,
/// drop-and-block, and add collisions.
pub fn validate_topology<T: Scalar>(t: &Topology<T>) -> Result<(), Vec<TopologyError>> {
    let mut errs = Vec::new();
    let n_slots = t.plan.n_slots;

    if n_slots < 1 {
        errs.push(TopologyError::Plan("n_slots must be at least 1".into()));
    }
    if !(t.plan.spacing_hz > T::zero()) {
        errs.push(TopologyError::Plan("spacing must be positive".into()));
    }
    if !(t.plan.f_start_hz > T::zero()) {
        errs.push(TopologyError::Plan("start frequency must be positive".into()));
    }
    if let Err(e) = t.rx.validate() {
        errs.extend(e.into_iter().map(TopologyError::Receiver));
    }
    if !(t.drop_path_extra_loss_db >= T::zero()) {
        errs.push(TopologyError::Plan("drop_path_extra_loss must be non-negative".into()));
    }

    // Strict span/node alternation, spans at both ends.
    for (i, e) in t.interior.iter().enumerate() {
        let expect_span = i % 2 == 0;
        match (e, expect_span) {
            (Element::Node(_), true) => errs.push(TopologyError::Alternation {
                position: i,
                what: "expected a span between nodes",
            }),
            (Element::Span(_), false) => errs.push(TopologyError::Alternation {
                position: i,
                what: "two consecutive spans without a node",
            }),
            _ => {}
        }
    }
    if matches!(t.interior.last(), Some(Element::Node(_))) {
        errs.push(TopologyError::Alternation {
            position: t.interior.len() - 1,
            what: "the last add/drop node needs a span to the tail",
        });
    }
    for (index, s) in t.spans().enumerate() {
        if !(s.length_km >= T::zero()) {
            errs.push(TopologyError::Span {
                index: index + 1,
                what: "length must be non-negative".into(),
            });
        }
        if !(s.attenuation_db_per_km > T::zero()) {
            errs.push(TopologyError::Span {
                index: index + 1,
                what: "attenuation must be positive".into(),
            });
        }
        if !(s.extra_loss_db >= T::zero()) {
            errs.push(TopologyError::Span {
                index: index + 1,
                what: "extra loss must be non-negative".into(),
            });
        }
    }

    let in_plan = |node: NodeId, slot: usize, errs: &mut Vec<TopologyError>| {
        let ok = (1..=n_slots).contains(&slot);
        if !ok {
            errs.push(TopologyError::SlotOutOfRange { node, slot, n_slots });
        }
        ok
    };

    // Head.
    let head = NodeId(0);
    param_errors(head, t.head.booster.errors(), &mut errs);
    let mut active = BTreeSet::new();
    let head_adds = t.head.add_list();
    for (slot, tx) in &head_adds {
        param_errors(head, tx.errors(), &mut errs);
        if in_plan(head, *slot, &mut errs) && !active.insert(*slot) {
            errs.push(TopologyError::Collision { node: head, slot: *slot });
        }
    }
    let combiner = t.head.combiner();
    param_errors(head, combiner.errors(), &mut errs);
    if head_adds.len() > combiner.ways {
        errs.push(TopologyError::Ports {
            node: head,
            what: "transmitters",
            needed: head_adds.len(),
            ports: combiner.ways,
        });
    }

    // Add/drop nodes in order.
    for (i, node) in t.add_drop_nodes().enumerate() {
        let id = NodeId(i + 1);
        param_errors(id, node.pre_amp.errors(), &mut errs);
        param_errors(id, node.drop_coupler.errors(), &mut errs);
        param_errors(id, node.drop_splitter.errors(), &mut errs);
        param_errors(id, node.wb.errors(), &mut errs);
        param_errors(id, node.add_coupler.errors(), &mut errs);
        param_errors(id, node.add_combiner().errors(), &mut errs);

        for &slot in &node.wb.blocked {
            in_plan(id, slot, &mut errs);
        }
        for slot in node.drop_list() {
            if !in_plan(id, slot, &mut errs) {
                continue;
            }
            if !node.wb.blocked.contains(&slot) {
                errs.push(TopologyError::DropWithoutBlock { node: id, slot });
            }
            if !active.contains(&slot) {
                errs.push(TopologyError::DarkReceive { node: id, slot });
            }
        }
        for slot in node.monitor_list() {
            if in_plan(id, slot, &mut errs) && !active.contains(&slot) {
                errs.push(TopologyError::DarkReceive { node: id, slot });
            }
        }
        let received = node.received_slots().len();
        if received > node.drop_splitter.ways {
            errs.push(TopologyError::Ports {
                node: id,
                what: "receivers",
                needed: received,
                ports: node.drop_splitter.ways,
            });
        }

        for slot in &node.wb.blocked {
            active.remove(slot);
        }
        let adds = node.add_list();
        for (slot, tx) in &adds {
            param_errors(id, tx.errors(), &mut errs);
            if in_plan(id, *slot, &mut errs) && !active.insert(*slot) {
                errs.push(TopologyError::Collision { node: id, slot: *slot });
            }
        }
        let ports = node.add_combiner().ways;
        if adds.len() > ports {
            errs.push(TopologyError::Ports {
                node: id,
                what: "transmitters",
                needed: adds.len(),
                ports,
            });
        }
    }

    // Tail.
    let tail = t.tail_id();
    param_errors(tail, t.tail.pre_amp.errors(), &mut errs);
    param_errors(tail, t.tail.splitter.errors(), &mut errs);
    let tail_drops = expand(&t.tail.drops);
    for &slot in &tail_drops {
        if in_plan(tail, slot, &mut errs) && !active.contains(&slot) {
            errs.push(TopologyError::DarkReceive { node: tail, slot });
        }
    }
    let receivers = if tail_drops.is_empty() {
        active.len()
    } else {
        tail_drops.iter().collect::<BTreeSet<_>>().len()
    };
    if receivers > t.tail.splitter.ways {
        errs.push(TopologyError::Ports {
            node: tail,
            what: "receivers",
            needed: receivers,
            ports: t.tail.splitter.ways,
        });
    }

    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// A lit slot on one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Carrier<T> {
    pub origin: NodeId,
    pub tx: TransmitterParams<T>,
}

/// Slot occupancy on the fibre leaving one node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment<T> {
    pub from: NodeId,
    /// Indexed by `slot - 1`.
    pub slots: Vec<Option<Carrier<T>>>,
}

impl<T> Segment<T> {
    pub fn carrier(&self, slot: usize) -> Option<&Carrier<T>> {
        self.slots.get(slot.wrapping_sub(1)).and_then(Option::as_ref)
    }

    pub fn active_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }
}

/// Per-segment occupancy. Segment 0 leaves the head; segment `i` leaves
/// add/drop node `i`; the last segment feeds the tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyMap<T> {
    pub segments: Vec<Segment<T>>,
}

impl<T> OccupancyMap<T> {
    pub fn tail_input(&self) -> &Segment<T> {
        self.segments.last().expect("head segment always present")
    }
}

/// Slot occupancy per segment. Assumes the topology validates.
pub fn occupancy_map<T: Scalar>(t: &Topology<T>) -> OccupancyMap<T> {
    let mut slots: Vec<Option<Carrier<T>>> = vec![None; t.plan.n_slots];
    for (slot, tx) in t.head.add_list() {
        slots[slot - 1] = Some(Carrier { origin: NodeId(0), tx });
    }
    let mut segments = vec![Segment {
        from: NodeId(0),
        slots: slots.clone(),
    }];
    for (i, node) in t.add_drop_nodes().enumerate() {
        let id = NodeId(i + 1);
        for &slot in &node.wb.blocked {
            slots[slot - 1] = None;
        }
        for (slot, tx) in node.add_list() {
            slots[slot - 1] = Some(Carrier { origin: id, tx });
        }
        segments.push(Segment {
            from: id,
            slots: slots.clone(),
        });
    }
    OccupancyMap { segments }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::components::ModulationFormat;

    pub fn tx() -> TransmitterParams<f64> {
        TransmitterParams {
            p_tx_dbm: 3.0,
            osnr_tx_db: 40.0,
            format: ModulationFormat::DpQpsk,
            symbol_rate_baud: 34e9,
        }
    }

    pub fn span(km: f64) -> Element<f64> {
        Element::Span(SpanSpec {
            length_km: km,
            attenuation_db_per_km: 0.25,
            extra_loss_db: 0.0,
        })
    }

    pub fn amen() -> AddDropNode<f64> {
        AddDropNode {
            name: None,
            pre_amp: EdfaParams::new(20.0, 30.0, 5.0),
            drop_coupler: CouplerParams::new(0.2),
            drop_splitter: SplitterParams::new(20),
            wb: WavelengthBlockerParams::new(12.0),
            add_coupler: CouplerParams::new(0.2),
            add_combiner: None,
            adds: vec![],
            drops: vec![],
            monitors: vec![],
        }
    }

    /// Head lights `1..=lit` of 96 slots; `nodes` add/drop nodes behind
    /// 40 km spans.
    pub fn horseshoe(lit: usize, nodes: Vec<AddDropNode<f64>>) -> Topology<f64> {
        let mut interior = vec![span(40.0)];
        for n in nodes {
            interior.push(Element::Node(n));
            interior.push(span(40.0));
        }
        Topology {
            plan: ChannelPlan {
                n_slots: 96,
                f_start_hz: 191.55e12,
                spacing_hz: 50e9,
            },
            head: HeadNode {
                booster: EdfaParams::new(20.0, 30.0, 5.0),
                combiner: None,
                adds: vec![AddGroup {
                    slots: vec![SlotRange { first: 1, last: lit }],
                    tx: tx(),
                }],
            },
            interior,
            tail: TailNode {
                pre_amp: EdfaParams::new(15.5, 30.0, 5.0),
                splitter: SplitterParams::new(96),
                drops: vec![],
            },
            rx: ReceiverParams {
                p_min_dbm: -23.0,
                p_max_dbm: 3.0,
            },
            drop_path_extra_loss_db: 0.0,
        }
    }
}
