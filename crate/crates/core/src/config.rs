//! Scenario files: a TOML document holding the topology, simulation options,
//! optional design-rule overrides and an optional sweep definition.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ber::FecPolicy;
use crate::design::DesignInputs;
use crate::engine::{BoosterNoise, EngineOptions};
use crate::network::{Element, Topology};
use crate::units::{PhysicalConstants, UnitError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub booster_noise: BoosterNoise,
    pub constants: PhysicalConstants<f64>,
    pub fec_threshold: f64,
    /// Implementation penalty subtracted from the SNR before the BER formula.
    pub ber_penalty_db: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            booster_noise: BoosterNoise::default(),
            constants: PhysicalConstants::default(),
            fec_threshold: FecPolicy::default().threshold_ber,
            ber_penalty_db: 0.0,
        }
    }
}

impl Options {
    pub fn engine(&self) -> EngineOptions<f64> {
        EngineOptions {
            constants: self.constants,
            booster_noise: self.booster_noise,
        }
    }

    pub fn fec(&self) -> FecPolicy {
        FecPolicy {
            threshold_ber: self.fec_threshold,
        }
    }
}

/// Overrides for design-rule inputs that the topology alone does not pin down.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignOverrides {
    pub n_channels: Option<usize>,
    pub k_add_drop: Option<usize>,
    pub extra_drop_loss_db: Option<f64>,
    pub r_drop: Option<f64>,
    pub span_length_km: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// OSNR of every head transmitter, dB.
    #[serde(rename = "head.osnr_tx")]
    HeadOsnrTx,
    /// Per-channel OSNR after the head combiner, dB. Each head transmitter is
    /// set to this value plus the coupling penalty.
    #[serde(rename = "head.coupled_osnr")]
    HeadCoupledOsnr,
    /// Launch power of every head transmitter, dBm.
    #[serde(rename = "head.p_tx")]
    HeadPtx,
    /// Length of every span, km.
    #[serde(rename = "span.length_km")]
    SpanLength,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::HeadOsnrTx => "head.osnr_tx",
            SweepAxis::HeadCoupledOsnr => "head.coupled_osnr",
            SweepAxis::HeadPtx => "head.p_tx",
            SweepAxis::SpanLength => "span.length_km",
        }
    }

    pub fn apply(self, t: &mut Topology<f64>, value: f64) {
        match self {
            SweepAxis::HeadOsnrTx => t.head.adds.iter_mut().for_each(|g| g.tx.osnr_tx_db = value),
            SweepAxis::HeadCoupledOsnr => {
                let n = t.head.add_list().len().max(1) as f64;
                let per_tx = value + 10.0 * n.log10();
                t.head.adds.iter_mut().for_each(|g| g.tx.osnr_tx_db = per_tx);
            }
            SweepAxis::HeadPtx => t.head.adds.iter_mut().for_each(|g| g.tx.p_tx_dbm = value),
            SweepAxis::SpanLength => {
                for e in t.interior.iter_mut() {
                    if let Element::Span(s) = e {
                        s.length_km = value;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Osnr,
    Ber,
    RxPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Osnr, Observable::Ber]
}

impl SweepSpec {
    pub fn check(&self) -> Result<(), ConfigError> {
        if self.values.is_empty() {
            return Err(ConfigError::Invalid("sweep: values list is empty".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(ConfigError::Invalid(format!("sweep: non-finite value {v}")));
        }
        Ok(())
    }

    pub fn observes(&self, o: Observable) -> bool {
        self.observables.contains(&o)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub topology: Topology<f64>,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub design: DesignOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Option checks that sit outside the topology validation.
    fn check(&self) -> Result<(), ConfigError> {
        self.options
            .constants
            .validate()
            .map_err(|e: UnitError| ConfigError::Invalid(format!("options.constants: {e}")))?;
        FecPolicy::new(self.options.fec_threshold).map_err(|e| ConfigError::Invalid(format!("options: {e}")))?;
        if !self.options.ber_penalty_db.is_finite() || self.options.ber_penalty_db < 0.0 {
            return Err(ConfigError::Invalid("options: ber_penalty_db must be non-negative".into()));
        }
        if let Some(s) = &self.sweep {
            s.check()?;
        }
        Ok(())
    }

    /// Design-rule inputs taken from the first add/drop node, its first add
    /// transmitter (or the head's) and the first span, then overridden by the
    /// `[design]` table.
    pub fn design_inputs(&self) -> Result<DesignInputs<f64>, ConfigError> {
        let t = &self.topology;
        let node = t
            .add_drop_nodes()
            .next()
            .ok_or_else(|| ConfigError::Invalid("design rules need at least one add/drop node".into()))?;
        let span = t
            .spans()
            .next()
            .ok_or_else(|| ConfigError::Invalid("design rules need at least one span".into()))?;
        let tx = node
            .add_list()
            .first()
            .map(|(_, tx)| *tx)
            .or_else(|| t.head.add_list().first().map(|(_, tx)| *tx))
            .ok_or_else(|| ConfigError::Invalid("no transmitter configured".into()))?;
        let o = &self.design;
        Ok(DesignInputs {
            n_channels: o.n_channels.unwrap_or_else(|| t.head.add_list().len()),
            k_add_drop: o.k_add_drop.unwrap_or(node.drop_splitter.ways),
            amp: node.pre_amp,
            tx,
            rx: t.rx,
            wb: node.wb.clone(),
            fibre_loss_db_per_km: span.attenuation_db_per_km,
            r_drop: Some(o.r_drop.unwrap_or(node.drop_coupler.ratio)),
            extra_drop_loss_db: o
                .extra_drop_loss_db
                .unwrap_or(t.drop_path_extra_loss_db + node.drop_splitter.excess_loss_db),
            span_length_km: Some(o.span_length_km.unwrap_or(span.length_km)),
        })
    }
}
