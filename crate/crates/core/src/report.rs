//! Result rows, CSV writers and plain-text tables shared by the command-line
//! front end and the tests.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::ber::{ber_estimate, fec_verdict, snr_from_osnr, FecVerdict};
use crate::components::ModulationFormat;
use crate::config::{Observable, ScenarioConfig, SweepSpec};
use crate::design::{DesignReport, MarginUnit};
use crate::engine::{osnr_db, propagate, signal_dbm, EngineError, PointKind, PropagationTrace, RxCheck, Warning};
use crate::network::{occupancy_map, NodeId};

/// Formats with six significant digits, `%g` style: fixed notation for
/// exponents in [-4, 6), scientific otherwise, trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowVerdict {
    Pass,
    Fail,
    /// An amplifier at or before this point could not reach its target.
    Infeasible,
}

impl RowVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RowVerdict::Pass => "pass",
            RowVerdict::Fail => "fail",
            RowVerdict::Infeasible => "infeasible",
        }
    }
}

/// One received slot at one drop or receiver point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiveRow {
    pub point: String,
    pub node: NodeId,
    pub distance_km: f64,
    pub slot: usize,
    pub format: Option<ModulationFormat>,
    pub signal_dbm: Option<f64>,
    pub osnr_db: Option<f64>,
    pub snr_db: Option<f64>,
    pub ber: Option<f64>,
    pub fec: Option<FecVerdict>,
    pub rx_pass: bool,
    pub rx_margin_db: Option<f64>,
    pub verdict: RowVerdict,
}

/// Per-slot quality at every receive point of a trace.
pub fn receive_rows(cfg: &ScenarioConfig, trace: &PropagationTrace<f64>) -> Vec<ReceiveRow> {
    let occupancy = occupancy_map(&cfg.topology);
    let b_ref = cfg.options.constants.reference_bandwidth_hz;
    let fec = cfg.options.fec();
    let mut rows = Vec::new();
    for (index, point) in trace.receive_points() {
        // Light reaching node i left node i-1; the tail is fed by the last segment.
        let segment = match point.kind {
            PointKind::Receiver => occupancy.tail_input(),
            _ => &occupancy.segments[point.node.0 - 1],
        };
        let total_ok = point
            .receiver
            .iter()
            .filter(|v| v.check == RxCheck::TotalMax)
            .all(|v| v.pass);
        let infeasible = trace.infeasible_upto(index);
        for &slot in &point.received {
            let per_channel = point
                .receiver
                .iter()
                .find(|v| v.check == RxCheck::PerChannelMin && v.slot == Some(slot));
            let tx = segment.carrier(slot).map(|c| c.tx);
            let osnr = osnr_db(&point.state, slot);
            let (snr_db, ber) = match (point.state.osnr(slot), tx) {
                (Some(o), Some(tx)) => {
                    let snr = snr_from_osnr(o, tx.symbol_rate_baud, b_ref);
                    (
                        Some(10.0 * snr.log10()),
                        Some(ber_estimate(snr, tx.format, cfg.options.ber_penalty_db)),
                    )
                }
                _ => (None, None),
            };
            let fec_v = ber.map(|b| fec_verdict(b, &fec));
            let rx_pass = total_ok && per_channel.is_some_and(|v| v.pass);
            let verdict = if infeasible {
                RowVerdict::Infeasible
            } else if rx_pass && fec_v.is_some_and(|f| f.pass) {
                RowVerdict::Pass
            } else {
                RowVerdict::Fail
            };
            rows.push(ReceiveRow {
                point: point.label.clone(),
                node: point.node,
                distance_km: point.distance_km,
                slot,
                format: tx.map(|t| t.format),
                signal_dbm: signal_dbm(&point.state, slot),
                osnr_db: osnr,
                snr_db,
                ber,
                fec: fec_v,
                rx_pass,
                rx_margin_db: per_channel.and_then(|v| v.margin_db),
                verdict,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, Serialize)]
pub struct Simulation {
    pub trace: PropagationTrace<f64>,
    pub rows: Vec<ReceiveRow>,
}

impl Simulation {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == RowVerdict::Pass)
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.trace.warnings
    }
}

pub fn simulate(cfg: &ScenarioConfig) -> Result<Simulation, EngineError> {
    let trace = propagate(&cfg.topology, &cfg.options.engine())?;
    let rows = receive_rows(cfg, &trace);
    Ok(Simulation { trace, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub rows: Vec<ReceiveRow>,
}

/// Runs one simulation per sweep value, in parallel, returning results in
/// the order of `spec.values`. Fails as a whole if any point fails.
pub fn sweep(cfg: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<SweepPoint>, EngineError> {
    spec.values
        .par_iter()
        .map(|&value| {
            let mut point = cfg.clone();
            spec.axis.apply(&mut point.topology, value);
            simulate(&point).map(|s| SweepPoint { value, rows: s.rows })
        })
        .collect()
}

fn csv_string(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Long-format sweep table, rows ordered by sweep value, distance, slot.
pub fn sweep_csv(points: &[SweepPoint], spec: &SweepSpec) -> String {
    let power = spec.observes(Observable::RxPower);
    let osnr = spec.observes(Observable::Osnr);
    let ber = spec.observes(Observable::Ber);
    let mut header = vec!["sweep_value", "distance_km", "slot", "osnr_db", "ber", "verdict"];
    if power {
        header.push("signal_dbm");
    }
    let records = points.iter().flat_map(|p| {
        let mut rows: Vec<&ReceiveRow> = p.rows.iter().collect();
        rows.sort_by(|a, b| a.distance_km.total_cmp(&b.distance_km).then(a.slot.cmp(&b.slot)));
        rows.into_iter().map(move |r| {
            let mut rec = vec![
                fmt_sig(p.value),
                fmt_sig(r.distance_km),
                r.slot.to_string(),
                if osnr { opt(r.osnr_db) } else { String::new() },
                if ber { opt(r.ber) } else { String::new() },
                r.verdict.as_str().to_string(),
            ];
            if power {
                rec.push(opt(r.signal_dbm));
            }
            rec
        })
    });
    csv_string(&header, records)
}

/// Per-slot state at every measurement point.
pub fn trace_csv(trace: &PropagationTrace<f64>) -> String {
    let header = ["point", "slot", "frequency_hz", "signal_dbm", "noise_dbm", "osnr_db", "active", "origin"];
    let records = trace.points.iter().flat_map(|p| {
        p.state.slots.iter().map(move |s| {
            let dbm = |w: f64| (w > 0.0).then(|| 10.0 * (w / 1e-3).log10());
            vec![
                p.label.clone(),
                s.slot.to_string(),
                fmt_sig(s.frequency_hz),
                opt(dbm(s.signal)),
                opt(dbm(s.noise)),
                opt(s.osnr().map(|o| o.to_db().0)),
                s.active.to_string(),
                s.origin.map(|o| o.0.to_string()).unwrap_or_default(),
            ]
        })
    });
    csv_string(&header, records)
}

/// Receive rows as CSV, in trace order.
pub fn rows_csv(rows: &[ReceiveRow]) -> String {
    let header = [
        "point",
        "distance_km",
        "slot",
        "format",
        "signal_dbm",
        "osnr_db",
        "snr_db",
        "ber",
        "fec_margin_db",
        "rx_margin_db",
        "verdict",
    ];
    let records = rows.iter().map(|r| {
        vec![
            r.point.clone(),
            fmt_sig(r.distance_km),
            r.slot.to_string(),
            r.format.map(|f| f.to_string()).unwrap_or_default(),
            opt(r.signal_dbm),
            opt(r.osnr_db),
            opt(r.snr_db),
            opt(r.ber),
            opt(r.fec.and_then(|f| f.margin_db)),
            opt(r.rx_margin_db),
            r.verdict.as_str().to_string(),
        ]
    });
    csv_string(&header, records)
}

fn fixed(x: Option<f64>, decimals: usize) -> String {
    x.map(|v| format!("{v:.decimals$}")).unwrap_or_else(|| "-".into())
}

pub fn rows_table(rows: &[ReceiveRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<13} {:>8} {:>5} {:<9} {:>10} {:>9} {:>10} {:>9} {:>9}  verdict",
        "point", "km", "slot", "format", "P_ch dBm", "OSNR dB", "BER", "FEC dB", "Rx dB"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<13} {:>8.1} {:>5} {:<9} {:>10} {:>9} {:>10} {:>9} {:>9}  {}",
            r.point,
            r.distance_km,
            r.slot,
            r.format.map(|f| f.to_string()).unwrap_or_else(|| "-".into()),
            fixed(r.signal_dbm, 2),
            fixed(r.osnr_db, 2),
            r.ber.map(|b| format!("{b:.3e}")).unwrap_or_else(|| "-".into()),
            fixed(r.fec.and_then(|f| f.margin_db), 2),
            fixed(r.rx_margin_db, 2),
            r.verdict.as_str()
        );
    }
    out
}

pub fn warnings_table(warnings: &[Warning], trace: &PropagationTrace<f64>) -> String {
    let mut out = String::new();
    for w in warnings {
        let label = trace.points.get(w.point).map(|p| p.label.as_str()).unwrap_or("?");
        let what = match &w.kind {
            crate::engine::WarningKind::GainClamped { required_db, max_db } => {
                format!("gain clamped: needs {required_db:.2} dB, maximum {max_db:.2} dB")
            }
            crate::engine::WarningKind::GainFloor { required_db } => {
                format!("input above output target: needs {required_db:.2} dB, held at 0 dB")
            }
            crate::engine::WarningKind::EqualizationCapped { slot, required_db, max_db } => {
                format!("slot {slot}: equalization needs {required_db:.2} dB, maximum {max_db:.2} dB")
            }
        };
        let _ = writeln!(out, "warning: {label}: {what}");
    }
    out
}

pub fn design_table(r: &DesignReport<f64>) -> String {
    let mut out = String::new();
    let pct = |x: f64| format!("{:.2} %", 100.0 * x);
    let _ = writeln!(out, "channels N          {}", r.n_channels);
    let _ = writeln!(out, "add/drop per node K {}", r.k_add_drop);
    let _ = writeln!(out, "drop ratio window   {} .. {}", pct(r.r_drop_min), pct(r.r_drop_max));
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<12} {:>9} {:>9} {:>13} {:>13}", "point", "r_drop", "r_add", "node loss dB", "max span km");
    let mut points = vec![("r_drop min", r.at_min), ("r_drop max", r.at_max)];
    if let Some(c) = r.configured {
        points.push(("configured", c));
    }
    for (name, p) in points {
        let _ = writeln!(
            out,
            "{:<12} {:>9} {:>9} {:>13.2} {:>13.1}",
            name,
            pct(p.r_drop),
            pct(p.r_add),
            p.node_loss_db,
            p.max_span_km
        );
    }
    let _ = writeln!(out);
    for v in &r.verdicts {
        let unit = match v.unit {
            MarginUnit::PercentagePoints => "pp",
            MarginUnit::Db => "dB",
        };
        let _ = writeln!(
            out,
            "[{}] {:<32} margin {:>8.2} {:<2}  {}",
            if v.pass { "pass" } else { "FAIL" },
            v.constraint,
            v.margin,
            unit,
            v.message
        );
    }
    out
}
