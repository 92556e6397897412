//! JSON run configurations for the subcommands. Every field has a default,
//! so a missing config file means "run the demo shape"; `--seed` and
//! `--trials` override whatever the file says.

use serde::{Deserialize, Serialize};

use qgsm::proto_qmem::{AcceptPolicy, BasisContract, CloneModel};
use qgsm::proto_tri::{BasisPolicy, CompareMode, OrderPolicy, ScenarioKind};
use qgsm::qstate::StateKind;
use qgsm::runtime::Channel;

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EveSpec {
    pub channel: Channel,
    #[serde(default = "default_eve_model")]
    pub model: String,
}

fn default_eve_model() -> String {
    "cnot".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriRunConfig {
    #[serde(default = "default_source")]
    pub source_kind: StateKind,
    #[serde(default = "default_emissions")]
    pub num_emissions: u32,
    #[serde(default)]
    pub basis_policy: BasisPolicy,
    #[serde(default)]
    pub order_policy: OrderPolicy,
    #[serde(default = "default_scenario")]
    pub scenario: ScenarioKind,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub compare: CompareMode,
    #[serde(default = "default_min_key_len")]
    pub min_key_len: usize,
    #[serde(default)]
    pub eve: Option<EveSpec>,
}

fn default_source() -> StateKind {
    StateKind::Ghz3
}

fn default_emissions() -> u32 {
    40
}

fn default_scenario() -> ScenarioKind {
    ScenarioKind::Simultaneous
}

fn default_trials() -> u32 {
    1_000
}

fn default_min_key_len() -> usize {
    qgsm::proto_tri::DEFAULT_MIN_KEY_LEN
}

impl Default for TriRunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub p_flip: f64,
    #[serde(default)]
    pub qber_threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QmemRunConfig {
    #[serde(default = "default_capacity")]
    pub n: u64,
    #[serde(default = "default_window")]
    pub m: u32,
    #[serde(default = "default_contract")]
    pub contract: BasisContract,
    /// Accept rule; omitted means Threshold(⌊m/2⌋).
    #[serde(default)]
    pub policy: Option<AcceptPolicy>,
    #[serde(default = "default_qmem_trials")]
    pub trials: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub attack: Option<CloneModel>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    /// Also write the post-run provisioning snapshot (provision.json) so
    /// later attack studies can fork it.
    #[serde(default)]
    pub export_snapshot: bool,
}

fn default_capacity() -> u64 {
    1_000_000
}

fn default_window() -> u32 {
    10
}

fn default_contract() -> BasisContract {
    BasisContract::IidRandom
}

fn default_qmem_trials() -> u32 {
    10_000
}

impl Default for QmemRunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E91RunConfig {
    #[serde(default = "default_pairs")]
    pub pairs: u32,
    #[serde(default)]
    pub disclose_fraction: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_pairs() -> u32 {
    10_000
}

impl Default for E91RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackRunConfig {
    #[serde(default = "default_attack_channel")]
    pub channel: Channel,
    #[serde(default = "default_attack_trials")]
    pub trials: u32,
    #[serde(default = "default_emissions")]
    pub num_emissions: u32,
    #[serde(default = "default_source")]
    pub source_kind: StateKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub compare: CompareMode,
}

fn default_attack_channel() -> Channel {
    Channel::A
}

fn default_attack_trials() -> u32 {
    1_000
}

impl Default for AttackRunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}
