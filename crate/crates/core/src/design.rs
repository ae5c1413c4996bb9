//! Closed-form node design rules: the drop-ratio window imposed by the
//! receiver dynamic range, the add ratio that levels added channels with
//! express channels, the resulting node through-loss, and the longest span
//! the amplifier gain can bridge.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{EdfaParams, ParamError, ReceiverParams, TransmitterParams, Validate, WavelengthBlockerParams};
use crate::scalar::Scalar;
use crate::units::{db_to_linear, PowerDbm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("invalid design input: {0}")]
    Precondition(String),
    #[error("invalid component parameters: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Params(Vec<ParamError>),
    #[error("infeasible drop ratio: {constraint} (r_min {r_min:.4}, r_max {r_max:.4})")]
    Infeasible {
        constraint: &'static str,
        r_min: f64,
        r_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DesignInputs<T> {
    pub n_channels: usize,
    pub k_add_drop: usize,
    pub amp: EdfaParams<T>,
    pub tx: TransmitterParams<T>,
    pub rx: ReceiverParams<T>,
    pub wb: WavelengthBlockerParams<T>,
    pub fibre_loss_db_per_km: T,
    /// Configured drop ratio, checked against the window when present.
    pub r_drop: Option<T>,
    /// Drop-path loss beyond the ideal 1×K splitter, dB.
    pub extra_drop_loss_db: T,
    /// Configured span length, checked against the span budget when present.
    pub span_length_km: Option<T>,
}

impl<T: Scalar> DesignInputs<T> {
    fn check(&self) -> Result<(), DesignError> {
        if self.k_add_drop < 1 || self.k_add_drop > self.n_channels {
            return Err(DesignError::Precondition(format!(
                "k_add_drop must satisfy 1 <= K <= N (K = {}, N = {})",
                self.k_add_drop, self.n_channels
            )));
        }
        if !(self.fibre_loss_db_per_km > T::zero()) {
            return Err(DesignError::Precondition("fibre_loss must be positive".into()));
        }
        if !(self.extra_drop_loss_db >= T::zero()) {
            return Err(DesignError::Precondition("extra drop-path loss must be non-negative".into()));
        }
        let mut errors = self.amp.errors();
        errors.extend(self.tx.errors());
        errors.extend(self.rx.errors());
        errors.extend(self.wb.errors());
        if errors.is_empty() {
            Ok(())
        } else {
            Err(DesignError::Params(errors))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DropBounds<T> {
    pub r_min: T,
    pub r_max: T,
}

/// Drop-ratio window `P_min·K·N·L/P_amp < R_drop < P_max·K·L/P_amp`, where
/// `L` is the extra drop-path loss (linear, 1 for an ideal splitter).
pub fn drop_ratio_bounds<T: Scalar>(inputs: &DesignInputs<T>) -> Result<DropBounds<T>, DesignError> {
    inputs.check()?;
    let p_amp = PowerDbm(inputs.amp.p_out_max_dbm).to_linear().0;
    let p_min = PowerDbm(inputs.rx.p_min_dbm).to_linear().0;
    let p_max = PowerDbm(inputs.rx.p_max_dbm).to_linear().0;
    let k = T::from_count(inputs.k_add_drop);
    let n = T::from_count(inputs.n_channels);
    let extra = db_to_linear(inputs.extra_drop_loss_db);

    let r_min = p_min * k * n * extra / p_amp;
    let r_max = (p_max * k * extra / p_amp).min(T::one());
    if r_min >= T::one() {
        return Err(DesignError::Infeasible {
            constraint: "minimum per-channel receiver power needs the whole amplifier output",
            r_min: r_min.to_f64_lossy(),
            r_max: r_max.to_f64_lossy(),
        });
    }
    if r_min > r_max {
        return Err(DesignError::Infeasible {
            constraint: "receiver dynamic range window is empty",
            r_min: r_min.to_f64_lossy(),
            r_max: r_max.to_f64_lossy(),
        });
    }
    Ok(DropBounds { r_min, r_max })
}

/// Add ratio at which each added channel enters at the express-channel power.
pub fn add_ratio<T: Scalar>(inputs: &DesignInputs<T>, r_drop: T) -> T {
    assert!(r_drop > T::zero() && r_drop < T::one(), "drop ratio must lie in (0, 1)");
    let p_amp = PowerDbm(inputs.amp.p_out_max_dbm).to_linear().0;
    let p_tx = PowerDbm(inputs.tx.p_tx_dbm).to_linear().0;
    let a_wb = db_to_linear(inputs.wb.insertion_loss_db);
    let k = T::from_count(inputs.k_add_drop);
    let n = T::from_count(inputs.n_channels);
    let express = p_amp * (T::one() - r_drop);
    express / (p_tx / k * a_wb * n + express)
}

/// Express-path loss of one node in dB: drop coupler, blocker and add coupler.
pub fn node_through_loss<T: Scalar>(r_drop: T, wb: &WavelengthBlockerParams<T>, r_add: T) -> T {
    let ten = T::ten();
    -ten * (T::one() - r_drop).log10() + wb.insertion_loss_db - ten * (T::one() - r_add).log10()
}

/// Longest span whose loss plus the node loss fits in the amplifier gain.
pub fn max_span_length<T: Scalar>(amp: &EdfaParams<T>, node_loss_db: T, fibre_loss_db_per_km: T) -> T {
    assert!(fibre_loss_db_per_km > T::zero(), "fibre loss must be positive");
    ((amp.gain_max_db - node_loss_db) / fibre_loss_db_per_km).max(T::zero())
}

/// Add ratio, node loss and span budget at one drop ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct OperatingPoint<T> {
    pub r_drop: T,
    pub r_add: T,
    pub node_loss_db: T,
    pub max_span_km: T,
}

impl<T: Scalar> OperatingPoint<T> {
    pub fn at(inputs: &DesignInputs<T>, r_drop: T) -> Self {
        let r_add = add_ratio(inputs, r_drop);
        let node_loss_db = node_through_loss(r_drop, &inputs.wb, r_add);
        Self {
            r_drop,
            r_add,
            node_loss_db,
            max_span_km: max_span_length(&inputs.amp, node_loss_db, inputs.fibre_loss_db_per_km),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginUnit {
    #[serde(rename = "pp")]
    PercentagePoints,
    #[serde(rename = "dB")]
    Db,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Verdict<T> {
    pub constraint: String,
    pub pass: bool,
    pub margin: T,
    pub unit: MarginUnit,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DesignReport<T> {
    pub n_channels: usize,
    pub k_add_drop: usize,
    pub r_drop_min: T,
    pub r_drop_max: T,
    /// Operating point figures: at the configured drop ratio when one is
    /// given, otherwise at `r_drop_max`.
    pub r_add: T,
    pub node_loss_db: T,
    pub max_span_km: T,
    pub at_min: OperatingPoint<T>,
    pub at_max: OperatingPoint<T>,
    pub configured: Option<OperatingPoint<T>>,
    pub verdicts: Vec<Verdict<T>>,
}

impl<T: Scalar> DesignReport<T> {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

fn pct<T: Scalar>(x: T) -> f64 {
    x.to_f64_lossy() * 100.0
}

pub fn evaluate_design<T: Scalar>(inputs: &DesignInputs<T>) -> Result<DesignReport<T>, DesignError> {
    let bounds = drop_ratio_bounds(inputs)?;
    let hundred = T::lit(100.0);
    let at_min = OperatingPoint::at(inputs, bounds.r_min);
    let at_max = OperatingPoint::at(inputs, bounds.r_max.min(T::lit(1.0 - 1e-9)));

    let mut verdicts = vec![Verdict {
        constraint: "drop ratio window".into(),
        pass: true,
        margin: (bounds.r_max - bounds.r_min) * hundred,
        unit: MarginUnit::PercentagePoints,
        message: format!(
            "{:.1} % < r_drop < {:.1} %",
            pct(bounds.r_min),
            pct(bounds.r_max)
        ),
    }];

    let configured = match inputs.r_drop {
        Some(r) => {
            if !(r > T::zero() && r < T::one()) {
                return Err(DesignError::Precondition(format!(
                    "configured r_drop {} outside (0, 1)",
                    r
                )));
            }
            let above_min = r - bounds.r_min;
            verdicts.push(Verdict {
                constraint: "r_drop minimum".into(),
                pass: above_min > T::zero(),
                margin: above_min * hundred,
                unit: MarginUnit::PercentagePoints,
                message: if above_min > T::zero() {
                    format!("r_drop {:.1} % above minimum {:.1} %", pct(r), pct(bounds.r_min))
                } else {
                    format!("r_drop {:.1} % below minimum {:.1} %", pct(r), pct(bounds.r_min))
                },
            });
            let below_max = bounds.r_max - r;
            verdicts.push(Verdict {
                constraint: "r_drop maximum".into(),
                pass: below_max > T::zero(),
                margin: below_max * hundred,
                unit: MarginUnit::PercentagePoints,
                message: if below_max > T::zero() {
                    format!("r_drop {:.1} % below maximum {:.1} %", pct(r), pct(bounds.r_max))
                } else {
                    format!("r_drop above maximum {:.1} %", pct(bounds.r_max))
                },
            });
            Some(OperatingPoint::at(inputs, r))
        }
        None => None,
    };

    let op = configured.unwrap_or(at_max);
    let gain_margin = inputs.amp.gain_max_db - op.node_loss_db;
    verdicts.push(Verdict {
        constraint: "node loss within amplifier gain".into(),
        pass: gain_margin > T::zero(),
        margin: gain_margin,
        unit: MarginUnit::Db,
        message: format!(
            "node loss {:.2} dB vs gain {:.1} dB",
            op.node_loss_db.to_f64_lossy(),
            inputs.amp.gain_max_db.to_f64_lossy()
        ),
    });
    if let Some(len) = inputs.span_length_km {
        let margin = (op.max_span_km - len) * inputs.fibre_loss_db_per_km;
        verdicts.push(Verdict {
            constraint: "span length".into(),
            pass: margin >= T::zero(),
            margin,
            unit: MarginUnit::Db,
            message: format!(
                "span {:.1} km vs maximum {:.1} km",
                len.to_f64_lossy(),
                op.max_span_km.to_f64_lossy()
            ),
        });
    }

    Ok(DesignReport {
        n_channels: inputs.n_channels,
        k_add_drop: inputs.k_add_drop,
        r_drop_min: bounds.r_min,
        r_drop_max: bounds.r_max,
        r_add: op.r_add,
        node_loss_db: op.node_loss_db,
        max_span_km: op.max_span_km,
        at_min,
        at_max,
        configured,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::ModulationFormat;
    use crate::scalar::rel_diff;
    use proptest::prelude::*;

    /// 96 channels, 8 dropped per node, 20 dBm amplifier, +3/−23 dBm receiver,
    /// 3 dBm transmitters, 12 dB blocker, 0.25 dB/km fibre.
    fn metro() -> DesignInputs<f64> {
        DesignInputs {
            n_channels: 96,
            k_add_drop: 8,
            amp: EdfaParams::new(20.0, 30.0, 5.0),
            tx: TransmitterParams {
                p_tx_dbm: 3.0,
                osnr_tx_db: 40.0,
                format: ModulationFormat::DpQpsk,
                symbol_rate_baud: 34e9,
            },
            rx: ReceiverParams {
                p_min_dbm: -23.0,
                p_max_dbm: 3.0,
            },
            wb: WavelengthBlockerParams::new(12.0),
            fibre_loss_db_per_km: 0.25,
            r_drop: None,
            extra_drop_loss_db: 0.0,
            span_length_km: None,
        }
    }

    /// Independent route: the bounds are per-channel / total power budgets,
    /// worked in dBm.
    fn bounds_oracle_db(p_amp: f64, p_min: f64, p_max: f64, n: f64, k: f64) -> (f64, f64) {
        let r_min = 10f64.powf((p_min + 10.0 * (k * n).log10() - p_amp) / 10.0);
        let r_max = 10f64.powf((p_max + 10.0 * k.log10() - p_amp) / 10.0);
        (r_min, r_max)
    }

    #[test]
    fn metro_drop_bounds() {
        let b = drop_ratio_bounds(&metro()).unwrap();
        assert!((b.r_min * 100.0 - 3.85).abs() < 0.01, "{}", b.r_min);
        assert!((b.r_max * 100.0 - 15.96).abs() < 0.01, "{}", b.r_max);
        let (lo, hi) = bounds_oracle_db(20.0, -23.0, 3.0, 96.0, 8.0);
        assert!(rel_diff(b.r_min, lo) < 1e-12);
        assert!(rel_diff(b.r_max, hi) < 1e-12);
    }

    #[test]
    fn smaller_system_bounds_from_oracle() {
        let mut i = metro();
        i.amp.p_out_max_dbm = 17.0;
        i.n_channels = 48;
        i.k_add_drop = 4;
        let b = drop_ratio_bounds(&i).unwrap();
        let (lo, hi) = bounds_oracle_db(17.0, -23.0, 3.0, 48.0, 4.0);
        assert!(rel_diff(b.r_min, lo) < 1e-12);
        assert!(rel_diff(b.r_max, hi) < 1e-12);
        // Frozen from the oracle above.
        assert!((b.r_min - 0.019_200).abs() < 5e-6);
        assert!((b.r_max - 0.159_243).abs() < 5e-6);
    }

    #[test]
    fn zero_drop_count_is_rejected() {
        let mut i = metro();
        i.k_add_drop = 0;
        assert!(matches!(drop_ratio_bounds(&i), Err(DesignError::Precondition(_))));
    }

    #[test]
    fn empty_window_names_the_constraint() {
        let mut i = metro();
        i.rx.p_min_dbm = -5.0;
        match drop_ratio_bounds(&i) {
            Err(DesignError::Infeasible { constraint, .. }) => {
                assert!(constraint.contains("per-channel") || constraint.contains("window"))
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        let mut i = metro();
        i.rx.p_min_dbm = -12.0;
        i.rx.p_max_dbm = -10.0;
        let err = drop_ratio_bounds(&i).unwrap_err();
        assert!(err.to_string().contains("window"), "{err}");
    }

    #[test]
    fn add_ratio_examples() {
        let i = metro();
        assert!((add_ratio(&i, 0.038) * 100.0 - 20.2).abs() < 0.05);
        assert!((add_ratio(&i, 0.16) * 100.0 - 18.1).abs() < 0.05);
        // Rounded reference figures, within half a point.
        assert!((add_ratio(&i, 0.038) * 100.0 - 20.0).abs() < 0.5);
        assert!((add_ratio(&i, 0.16) * 100.0 - 17.9).abs() < 0.5);
    }

    #[test]
    fn add_ratio_is_one_half_when_paths_balance() {
        let mut i = metro();
        // P_tx/K·a_WB·N = P_amp(1 − R_drop) with K = N = 1, a_WB = 0 dB.
        i.n_channels = 1;
        i.k_add_drop = 1;
        i.wb.insertion_loss_db = 0.0;
        i.tx.p_tx_dbm = 0.0;
        i.amp.p_out_max_dbm = 10.0 * (1.0 / 0.75_f64).log10();
        assert!((add_ratio(&i, 0.25) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn node_loss_examples() {
        let wb = WavelengthBlockerParams::new(12.0);
        assert!((node_through_loss(0.038_f64, &wb, 0.202) - 13.15).abs() < 0.01);
        assert!((node_through_loss(0.16_f64, &wb, 0.181) - 13.62).abs() < 0.01);
        assert_eq!(node_through_loss(0.0, &wb, 0.0), 12.0);
    }

    #[test]
    fn span_length_examples() {
        let amp = EdfaParams::new(20.0, 30.0, 5.0);
        assert!((max_span_length(&amp, 13.7_f64, 0.25) - 65.2).abs() < 1e-9);
        assert_eq!(max_span_length(&amp, 30.0, 0.25), 0.0);
        assert_eq!(max_span_length(&amp, 35.0, 0.25), 0.0);
        assert!((max_span_length(&amp, 13.2_f64, 0.25) - 67.2).abs() < 1e-9);
    }

    #[test]
    fn full_report_matches_worked_example() {
        let r = evaluate_design(&metro()).unwrap();
        assert!((r.r_drop_min * 100.0 - 3.8).abs() < 0.1);
        assert!((r.r_drop_max * 100.0 - 16.0).abs() < 0.1);
        assert!((r.at_min.r_add * 100.0 - 20.0).abs() < 0.5);
        assert!((r.at_max.r_add * 100.0 - 17.9).abs() < 0.5);
        assert!((r.at_min.node_loss_db - 13.2).abs() < 0.1);
        assert!((r.at_max.node_loss_db - 13.7).abs() < 0.1);
        assert!((r.at_max.max_span_km - 65.2).abs() < 0.5);
        assert!(r.configured.is_none());
        assert!(r.all_pass());
    }

    #[test]
    fn twenty_percent_drop_exceeds_the_window() {
        let mut i = metro();
        i.r_drop = Some(0.20);
        let r = evaluate_design(&i).unwrap();
        let max = r.verdicts.iter().find(|v| v.constraint == "r_drop maximum").unwrap();
        assert!(!max.pass);
        assert_eq!(max.message, "r_drop above maximum 16.0 %");
        assert!((max.margin - (r.r_drop_max - 0.20) * 100.0).abs() < 1e-12);
        assert!(!r.all_pass());
    }

    #[test]
    fn drop_everything_at_one_node() {
        let mut i = metro();
        i.k_add_drop = 96;
        let b = drop_ratio_bounds(&i).unwrap();
        let p_min = 10f64.powf(-2.3);
        let p_max = 10f64.powf(0.3);
        assert!(rel_diff(b.r_min, p_min * 96.0 * 96.0 / 100.0) < 1e-12);
        assert_eq!(b.r_max, (p_max * 96.0 / 100.0).min(1.0));
        let r = evaluate_design(&i).unwrap();
        assert!(r.at_max.r_add > 0.0 && r.at_max.r_add < 1.0);
    }

    #[test]
    fn extra_drop_loss_scales_both_bounds() {
        let mut i = metro();
        i.extra_drop_loss_db = 3.0;
        let b = drop_ratio_bounds(&i).unwrap();
        let base = drop_ratio_bounds(&metro()).unwrap();
        assert!(rel_diff(b.r_min, base.r_min * db_to_linear(3.0)) < 1e-12);
        assert!(rel_diff(b.r_max, base.r_max * db_to_linear(3.0)) < 1e-12);
    }

    #[test]
    fn span_verdict_uses_budget() {
        let mut i = metro();
        i.r_drop = Some(0.15);
        i.span_length_km = Some(80.0);
        let r = evaluate_design(&i).unwrap();
        let span = r.verdicts.iter().find(|v| v.constraint == "span length").unwrap();
        assert!(!span.pass);
        i.span_length_km = Some(40.0);
        assert!(evaluate_design(&i).unwrap().all_pass());
    }

    #[test]
    fn single_precision_bounds() {
        let i = metro();
        let i32 = DesignInputs::<f32> {
            n_channels: i.n_channels,
            k_add_drop: i.k_add_drop,
            amp: EdfaParams::new(20.0, 30.0, 5.0),
            tx: TransmitterParams {
                p_tx_dbm: 3.0,
                osnr_tx_db: 40.0,
                format: ModulationFormat::DpQpsk,
                symbol_rate_baud: 34e9,
            },
            rx: ReceiverParams {
                p_min_dbm: -23.0,
                p_max_dbm: 3.0,
            },
            wb: WavelengthBlockerParams::new(12.0),
            fibre_loss_db_per_km: 0.25,
            r_drop: None,
            extra_drop_loss_db: 0.0,
            span_length_km: None,
        };
        let r = evaluate_design(&i32).unwrap();
        assert!((r.r_drop_max - 0.1596).abs() < 1e-4);
        assert!((r.at_max.max_span_km - 65.5).abs() < 0.1);
    }

    fn sweep_inputs() -> impl Strategy<Value = DesignInputs<f64>> {
        (
            10.0..23.0_f64,
            -30.0..-15.0_f64,
            -5.0..5.0_f64,
            8usize..96,
            1usize..8,
            0.0..15.0_f64,
            -5.0..8.0_f64,
        )
            .prop_map(|(p_amp, p_min, p_max, n, k, il, p_tx)| {
                let mut i = metro();
                i.amp.p_out_max_dbm = p_amp;
                i.rx.p_min_dbm = p_min;
                i.rx.p_max_dbm = p_max;
                i.n_channels = n;
                i.k_add_drop = k;
                i.wb.insertion_loss_db = il;
                i.tx.p_tx_dbm = p_tx;
                i
            })
    }

    fn raw_bounds(i: &DesignInputs<f64>) -> (f64, f64) {
        let p_amp = 10f64.powf(i.amp.p_out_max_dbm / 10.0);
        let p_min = 10f64.powf(i.rx.p_min_dbm / 10.0);
        let p_max = 10f64.powf(i.rx.p_max_dbm / 10.0);
        let l = 10f64.powf(i.extra_drop_loss_db / 10.0);
        (
            p_min * (i.k_add_drop * i.n_channels) as f64 * l / p_amp,
            p_max * i.k_add_drop as f64 * l / p_amp,
        )
    }

    proptest! {
        #[test]
        fn bound_monotonicity(i in sweep_inputs()) {
            let (lo, hi) = raw_bounds(&i);
            let mut more_pmax = i.clone();
            more_pmax.rx.p_max_dbm += 0.5;
            prop_assert!(raw_bounds(&more_pmax).1 > hi);
            let mut more_pmin = i.clone();
            more_pmin.rx.p_min_dbm += 0.5;
            prop_assert!(raw_bounds(&more_pmin).0 > lo);
            let mut more_k = i.clone();
            more_k.k_add_drop += 1;
            more_k.n_channels = more_k.n_channels.max(more_k.k_add_drop);
            prop_assert!(raw_bounds(&more_k).1 > hi);
            prop_assert!(raw_bounds(&more_k).0 > lo);
            let mut more_n = i.clone();
            more_n.n_channels += 1;
            prop_assert!(raw_bounds(&more_n).0 > lo);
            // Implementation agrees with the raw budgets whenever feasible.
            if let Ok(b) = drop_ratio_bounds(&i) {
                prop_assert!(rel_diff(b.r_min, lo) < 1e-12);
                prop_assert!(rel_diff(b.r_max, hi.min(1.0)) < 1e-12);
                prop_assert!(b.r_min <= b.r_max);
            }
        }

        #[test]
        fn add_ratio_in_unit_interval_and_decreasing(i in sweep_inputs(), r in 0.01..0.6_f64) {
            let a = add_ratio(&i, r);
            prop_assert!(a > 0.0 && a < 1.0);
            let mut more_n = i.clone();
            more_n.n_channels += 1;
            prop_assert!(add_ratio(&more_n, r) < a);
            let mut lossier = i.clone();
            lossier.wb.insertion_loss_db += 0.5;
            prop_assert!(add_ratio(&lossier, r) < a);
        }

        #[test]
        fn span_decreasing_in_node_loss(loss in 0.0..29.0_f64, delta in 0.01..1.0_f64) {
            let amp = EdfaParams::new(20.0, 30.0, 5.0);
            prop_assert!(max_span_length(&amp, loss + delta, 0.25) < max_span_length(&amp, loss, 0.25));
        }

        #[test]
        fn bounds_are_scale_free(i in sweep_inputs(), shift in -5.0..5.0_f64) {
            // Scaling every power (including P_amp) by a common factor.
            let mut s = i.clone();
            s.amp.p_out_max_dbm += shift;
            s.rx.p_min_dbm += shift;
            s.rx.p_max_dbm += shift;
            let (lo, hi) = raw_bounds(&i);
            let (slo, shi) = raw_bounds(&s);
            prop_assert!(rel_diff(lo, slo) < 1e-12);
            prop_assert!(rel_diff(hi, shi) < 1e-12);
        }
    }
}
