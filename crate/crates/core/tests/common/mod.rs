//! Uniform add/drop chains built through the public API, with the closed-form
//! OSNR they should reproduce.

#![allow(dead_code)]

use std::path::PathBuf;

use wbmetro::components::{
    CouplerParams, EdfaParams, ModulationFormat, ReceiverParams, SplitterParams, TransmitterParams,
    WavelengthBlockerParams,
};
use wbmetro::config::ScenarioConfig;
use wbmetro::engine::{BoosterNoise, EngineOptions};
use wbmetro::network::{AddDropNode, AddGroup, ChannelPlan, Element, HeadNode, SlotRange, SpanSpec, TailNode, Topology};
use wbmetro::osnr::{coupled_tx_osnr, osnr_add_k, StageNoise};
use wbmetro::units::{db_to_linear, OsnrDb, OsnrLinear, PhysicalConstants, PowerDbm};

pub const HEAD_TX: usize = 4;
const LAUNCH_DBM: f64 = -10.0;

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

pub fn design_config() -> ScenarioConfig {
    ScenarioConfig::load(&config_path("metro-design-96ch.toml")).expect("bundled config loads")
}

pub fn experiment_config() -> ScenarioConfig {
    ScenarioConfig::load(&config_path("horseshoe-4x40km-90ch.toml")).expect("bundled config loads")
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Chain of `m` identical nodes between `m + 1` identical spans. All
/// amplifiers run at fixed gain equal to span plus node loss, so every
/// amplifier input carries `p_in_dbm` per channel. With `adds`, each node
/// blocks and refills `k` slots at the express channel power.
#[derive(Debug, Clone)]
pub struct UniformChain {
    pub m: usize,
    pub p_in_dbm: f64,
    pub span_db: f64,
    pub nf_db: f64,
    pub tx_osnr_db: f64,
    pub add_tx_osnr_db: f64,
    pub k: usize,
    pub r_drop: f64,
    pub r_add: f64,
    pub wb_db: f64,
    pub adds: bool,
}

impl UniformChain {
    pub fn node_loss_db(&self) -> f64 {
        self.wb_db - 10.0 * (1.0 - self.r_drop).log10() - 10.0 * (1.0 - self.r_add).log10()
    }

    pub fn gain_db(&self) -> f64 {
        self.span_db + self.node_loss_db()
    }

    pub fn booster_gain_db(&self) -> f64 {
        self.p_in_dbm + self.span_db - (LAUNCH_DBM - 10.0 * (HEAD_TX as f64).log10())
    }

    pub fn add_tx_dbm(&self) -> f64 {
        self.p_in_dbm + self.span_db + 10.0 * (self.k as f64).log10() - 10.0 * self.r_add.log10()
    }

    /// Parameters inside the component ranges the topology validator accepts.
    pub fn is_buildable(&self) -> bool {
        self.add_tx_dbm().abs() <= 10.0 && self.gain_db() <= 40.0 && self.booster_gain_db() > 0.5
    }

    fn tx(p: f64, osnr: f64) -> TransmitterParams<f64> {
        TransmitterParams {
            p_tx_dbm: p,
            osnr_tx_db: osnr,
            format: ModulationFormat::DpQpsk,
            symbol_rate_baud: 34e9,
        }
    }

    pub fn topology(&self) -> Topology<f64> {
        let fixed = |g: f64| EdfaParams {
            fixed_gain_db: Some(g),
            ..EdfaParams::new(20.0, 40.0, self.nf_db)
        };
        let span = Element::Span(SpanSpec {
            length_km: self.span_db / 0.25,
            attenuation_db_per_km: 0.25,
            extra_loss_db: 0.0,
        });
        let refill = SlotRange {
            first: HEAD_TX + 1,
            last: HEAD_TX + self.k,
        };
        let mut interior = vec![span.clone()];
        for i in 0..self.m {
            interior.push(Element::Node(AddDropNode {
                name: Some(format!("n{}", i + 1)),
                pre_amp: fixed(self.gain_db()),
                drop_coupler: CouplerParams::new(self.r_drop),
                drop_splitter: SplitterParams::new(self.k),
                wb: WavelengthBlockerParams::new(self.wb_db).with_blocked(refill.iter()),
                add_coupler: CouplerParams::new(self.r_add),
                add_combiner: None,
                adds: if self.adds {
                    vec![AddGroup {
                        slots: vec![refill],
                        tx: Self::tx(self.add_tx_dbm(), self.add_tx_osnr_db),
                    }]
                } else {
                    vec![]
                },
                drops: vec![],
                monitors: vec![SlotRange::single(1)],
            }));
            interior.push(span.clone());
        }
        Topology {
            plan: ChannelPlan {
                n_slots: HEAD_TX + self.k,
                f_start_hz: 193.4e12,
                spacing_hz: 50e9,
            },
            head: HeadNode {
                booster: fixed(self.booster_gain_db()),
                combiner: None,
                adds: vec![AddGroup {
                    slots: vec![SlotRange { first: 1, last: HEAD_TX }],
                    tx: Self::tx(LAUNCH_DBM, self.tx_osnr_db),
                }],
            },
            interior,
            tail: TailNode {
                pre_amp: fixed(self.gain_db()),
                splitter: SplitterParams::new(4),
                drops: vec![SlotRange::single(1)],
            },
            rx: ReceiverParams {
                p_min_dbm: -40.0,
                p_max_dbm: 20.0,
            },
            drop_path_extra_loss_db: 0.0,
        }
    }

    pub fn options(&self) -> EngineOptions<f64> {
        EngineOptions {
            constants: PhysicalConstants::default(),
            booster_noise: BoosterNoise::InTxOsnr,
        }
    }

    /// Per-stage noise with the noise figure referred to the amplifier input.
    pub fn stage(&self) -> StageNoise<f64> {
        let g = db_to_linear(self.gain_db());
        StageNoise::new(
            PowerDbm(self.p_in_dbm).to_linear(),
            self.nf_db + 10.0 * ((g - 1.0) / g).log10(),
            PhysicalConstants::default(),
        )
    }

    pub fn coupled(&self) -> OsnrLinear<f64> {
        coupled_tx_osnr(OsnrDb(self.tx_osnr_db), HEAD_TX).to_linear()
    }

    pub fn add_path(&self) -> OsnrLinear<f64> {
        osnr_add_k(OsnrDb(self.add_tx_osnr_db).to_linear(), self.k)
    }
}

impl Default for UniformChain {
    fn default() -> Self {
        Self {
            m: 4,
            p_in_dbm: -16.0,
            span_db: 10.0,
            nf_db: 5.0,
            tx_osnr_db: 36.0,
            add_tx_osnr_db: 40.0,
            k: 4,
            r_drop: 0.2,
            r_add: 0.2,
            wb_db: 10.0,
            adds: true,
        }
    }
}
