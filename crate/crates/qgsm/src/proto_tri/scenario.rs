//! Attack and login scenarios over the three-particle protocol, plus the
//! CNOT eavesdropping study.
//!
//! Scenarios follow the threat model of a fully copied SIM (Ki and A3
//! included): solo logins succeed undetected, simultaneous logins expose the
//! clone through differing quantum keys, eavesdropping the basis traffic
//! does not help the clone, and classical key relaying defeats detection —
//! the protocol's acknowledged gap, only plausible for co-located cards.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auth_gsm::{a3_default, Imsi, RandChallenge, SecretKey};
use crate::error::{Error, Result};
use crate::party::Role;
use crate::proto_tri::{
    detect_clone, quantum_authenticate, run_session, ChannelKey, CloneOutcome, CompareMode,
    Credentials, LoginSubmission, RoundClass, Sim2Mode, TriConfig, TriSessionOutcome,
};
use crate::qstate::BasisAxis;
use crate::runtime::{Channel, Purpose, RngStream, Verdict};
use crate::stats::{mutual_information, two_proportion_z};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// One card logs in alone (original or copy — there is no difference).
    SoloLogin,
    /// Both cards request at the same time, measuring honestly.
    Simultaneous,
    /// Simultaneous, with SIM2 reading channel A's basis announcements.
    BasisEavesdrop,
    /// SIM1 forwards its sifted key over the inter-SIM channel; SIM2 relays
    /// SIM1's announcements and still wastes measurements on its own leg.
    KeyForwarding,
    /// Standing inter-SIM relay; SIM2 never touches its own particles.
    RelayChannel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub trials: u32,
    pub seed: u64,
    /// Session shape shared by every trial (sim2/eve/tap fields are set per
    /// scenario kind).
    pub session: TriConfig,
    pub compare: CompareMode,
    pub min_key_len: usize,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind, trials: u32, seed: u64) -> Self {
        ScenarioConfig {
            kind,
            trials,
            seed,
            session: TriConfig {
                record_transcript: false,
                ..TriConfig::default()
            },
            compare: CompareMode::default(),
            min_key_len: crate::proto_tri::DEFAULT_MIN_KEY_LEN,
        }
    }

    /// The per-trial session configuration with the scenario's SIM2 mode and
    /// taps applied.
    pub fn effective_session(&self) -> TriConfig {
        session_config_for(self.kind, &self.session)
    }

    /// Master seed of one trial's session.
    pub fn trial_seed(&self, trial: u32) -> u64 {
        RngStream::trial_seed(self.seed, u64::from(trial))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u32,
    pub outcome: CloneOutcome,
    pub key_len_a: usize,
    pub key_len_b: Option<usize>,
    pub null_rounds: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub kind: ScenarioKind,
    pub trials: u32,
    pub detection_rate: f64,
    pub accept_rate: f64,
    pub reject_rate: f64,
    pub mean_key_len_a: f64,
    pub mean_key_len_b: f64,
    pub null_rounds_total: u64,
    pub results: Vec<TrialResult>,
}

const SCENARIO_IMSI: &str = "262017773310001";
const SCENARIO_KI: SecretKey = SecretKey(0x0123_4567_89AB_CDEF_0011_2233_4455_6677);

fn session_config_for(kind: ScenarioKind, base: &TriConfig) -> TriConfig {
    let mut config = base.clone();
    config.sim2 = match kind {
        ScenarioKind::SoloLogin => Sim2Mode::Absent,
        ScenarioKind::Simultaneous | ScenarioKind::BasisEavesdrop => Sim2Mode::Honest,
        ScenarioKind::KeyForwarding => Sim2Mode::Relay { measure_own: true },
        ScenarioKind::RelayChannel => Sim2Mode::Relay { measure_own: false },
    };
    config.sim2_taps_basis_announcements = kind == ScenarioKind::BasisEavesdrop;
    config
}

/// Judges one dual login: both submissions carry the (identical) RES from
/// the copied Ki plus the quantum response from whatever key each card
/// holds; the AUC compares them pairwise and, in full-key mode, consults
/// its own channel records. Key length never gates detection — noticing
/// the copy is independent of whether either login would be accepted.
fn judge_dual(outcome: &TriSessionOutcome, rand: RandChallenge, compare: CompareMode) -> Result<CloneOutcome> {
    let imsi = Imsi::parse(SCENARIO_IMSI).expect("static imsi is well-formed");
    let res = a3_default(SCENARIO_KI, rand);
    let sim2_key = outcome.sim2_key.as_ref().expect("dual sessions have SIM2");
    let first = LoginSubmission {
        imsi: imsi.clone(),
        res,
        qres: a3_default(outcome.sim1_key.secret_key(), rand),
    };
    let second = LoginSubmission {
        imsi,
        res,
        qres: a3_default(sim2_key.secret_key(), rand),
    };
    let verdict = detect_clone(
        &first,
        &second,
        Some((&outcome.auc_keys.a, &outcome.auc_keys.b)),
        compare,
    )?;
    Ok(verdict.outcome)
}

/// Runs `trials` independent sessions of one scenario and aggregates the
/// verdicts.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    if config.trials == 0 {
        return Err(Error::Config("scenario needs at least one trial".into()));
    }
    let session_config = session_config_for(config.kind, &config.session);

    let mut results = Vec::with_capacity(config.trials as usize);
    let mut detected = 0u64;
    let mut accepted = 0u64;
    let mut rejected = 0u64;
    let mut key_len_a = 0u64;
    let mut key_len_b = 0u64;
    let mut null_rounds_total = 0u64;

    for trial in 0..config.trials {
        let trial_seed = RngStream::trial_seed(config.seed, trial as u64);
        let outcome = run_session(&session_config, trial_seed)?;
        let rand = RandChallenge(
            RngStream::derive(trial_seed, Role::Auc, Purpose::Challenge, 0).random(),
        );

        let clone_outcome = match config.kind {
            ScenarioKind::SoloLogin => {
                let sim = Credentials {
                    ki: SCENARIO_KI,
                    key_bits: outcome.sim1_key.bit_string(),
                };
                let network = Credentials {
                    ki: SCENARIO_KI,
                    key_bits: outcome.auc_keys.a.bit_string(),
                };
                let auth = quantum_authenticate(&sim, &network, rand, a3_default, config.min_key_len);
                match auth.verdict {
                    Verdict::Accept => CloneOutcome::Accepted,
                    Verdict::Reject => CloneOutcome::Rejected,
                }
            }
            _ => judge_dual(&outcome, rand, config.compare)?,
        };

        match clone_outcome {
            CloneOutcome::Accepted => accepted += 1,
            CloneOutcome::Rejected => rejected += 1,
            CloneOutcome::CloneDetected => detected += 1,
        }
        let null_rounds = outcome.rounds.iter().filter(|r| r.null_applied).count() as u32;
        null_rounds_total += u64::from(null_rounds);
        key_len_a += outcome.sim1_key.len() as u64;
        key_len_b += outcome.sim2_key.as_ref().map_or(0, ChannelKey::len) as u64;
        results.push(TrialResult {
            trial,
            outcome: clone_outcome,
            key_len_a: outcome.sim1_key.len(),
            key_len_b: outcome.sim2_key.as_ref().map(ChannelKey::len),
            null_rounds,
        });
    }

    let n = f64::from(config.trials);
    Ok(ScenarioReport {
        kind: config.kind,
        trials: config.trials,
        detection_rate: detected as f64 / n,
        accept_rate: accepted as f64 / n,
        reject_rate: rejected as f64 / n,
        mean_key_len_a: key_len_a as f64 / n,
        mean_key_len_b: key_len_b as f64 / n,
        null_rounds_total,
        results,
    })
}

/// Configuration of the CNOT eavesdropping study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EveCnotConfig {
    /// Channels Eve sits on. Exactly one: the probe cannot straddle both.
    pub channels: Vec<Channel>,
    pub trials: u32,
    pub seed: u64,
    pub session: TriConfig,
    pub compare: CompareMode,
}

impl EveCnotConfig {
    pub fn new(channel: Channel, trials: u32, seed: u64) -> Self {
        EveCnotConfig {
            channels: vec![channel],
            trials,
            seed,
            session: TriConfig {
                record_transcript: false,
                ..TriConfig::default()
            },
            compare: CompareMode::default(),
        }
    }
}

/// Agreement counter: (hits, total).
pub type Agreement = (u64, u64);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EveCnotReport {
    pub tapped: Channel,
    pub trials: u32,
    /// Eve vs tapped channel key on Z-sifted rounds (CNOT copies Z exactly).
    pub tapped_z_agreement: Agreement,
    /// Eve's ancilla (X-measured) vs tapped channel key on Null rounds.
    pub tapped_null_agreement: Agreement,
    /// Eve vs the *untapped* channel's identification (single-channel) bits.
    pub untapped_ident_agreement: Agreement,
    pub untapped_ident_mutual_information: f64,
    pub detection_with_eve: Agreement,
    pub detection_without_eve: Agreement,
    /// Two-proportion z statistic between the detection arms.
    pub detection_z: f64,
}

pub fn agreement_rate(a: Agreement) -> f64 {
    if a.1 == 0 {
        0.0
    } else {
        a.0 as f64 / a.1 as f64
    }
}

/// Interposes Eve's CNOT probe on one channel across `trials` dual-login
/// sessions and reports what she learns and whether detection budges.
pub fn eve_cnot_session(config: &EveCnotConfig) -> Result<EveCnotReport> {
    if config.channels.len() > 1 {
        return Err(Error::EveBothChannels);
    }
    let channel = *config
        .channels
        .first()
        .ok_or_else(|| Error::Config("eve study needs a target channel".into()))?;

    let mut eve_config = config.session.clone();
    eve_config.sim2 = Sim2Mode::Honest;
    eve_config.eve_channel = Some(channel);
    let mut baseline_config = eve_config.clone();
    baseline_config.eve_channel = None;

    let mut tapped_z = (0u64, 0u64);
    let mut tapped_null = (0u64, 0u64);
    let mut untapped_ident = (0u64, 0u64);
    let mut mi_eve_bits = Vec::new();
    let mut mi_key_bits = Vec::new();
    let mut detection_with = (0u64, 0u64);
    let mut detection_without = (0u64, 0u64);

    for trial in 0..config.trials {
        let eve_seed = RngStream::trial_seed(config.seed, 2 * u64::from(trial));
        let base_seed = RngStream::trial_seed(config.seed, 2 * u64::from(trial) + 1);

        let outcome = run_session(&eve_config, eve_seed)?;
        let eve_by_round: HashMap<u32, (BasisAxis, u8)> = outcome
            .eve_rounds
            .iter()
            .map(|e| (e.round, (e.axis, e.bit)))
            .collect();

        let (tapped_key, untapped_key) = match channel {
            Channel::A => (&outcome.auc_keys.a, &outcome.auc_keys.b),
            Channel::B => (&outcome.auc_keys.b, &outcome.auc_keys.a),
        };
        for kb in &tapped_key.bits {
            let Some((_, eve_bit)) = eve_by_round.get(&kb.round) else {
                continue;
            };
            match kb.class {
                RoundClass::ChanABlue | RoundClass::ChanBYellow | RoundClass::BothGreen => {
                    tapped_z.1 += 1;
                    tapped_z.0 += u64::from(*eve_bit == kb.bit);
                }
                RoundClass::NullGray => {
                    tapped_null.1 += 1;
                    tapped_null.0 += u64::from(*eve_bit == kb.bit);
                }
                RoundClass::DiscardRed => {}
            }
        }
        for kb in &untapped_key.bits {
            if !matches!(kb.class, RoundClass::ChanABlue | RoundClass::ChanBYellow) {
                continue;
            }
            let Some((_, eve_bit)) = eve_by_round.get(&kb.round) else {
                continue;
            };
            untapped_ident.1 += 1;
            untapped_ident.0 += u64::from(*eve_bit == kb.bit);
            mi_eve_bits.push(*eve_bit);
            mi_key_bits.push(kb.bit);
        }

        let rand = RandChallenge(
            RngStream::derive(eve_seed, Role::Auc, Purpose::Challenge, 0).random(),
        );
        detection_with.1 += 1;
        detection_with.0 +=
            u64::from(judge_dual(&outcome, rand, config.compare)? == CloneOutcome::CloneDetected);

        let baseline = run_session(&baseline_config, base_seed)?;
        let rand = RandChallenge(
            RngStream::derive(base_seed, Role::Auc, Purpose::Challenge, 0).random(),
        );
        detection_without.1 += 1;
        detection_without.0 +=
            u64::from(judge_dual(&baseline, rand, config.compare)? == CloneOutcome::CloneDetected);
    }

    Ok(EveCnotReport {
        tapped: channel,
        trials: config.trials,
        tapped_z_agreement: tapped_z,
        tapped_null_agreement: tapped_null,
        untapped_ident_agreement: untapped_ident,
        untapped_ident_mutual_information: mutual_information(&mi_eve_bits, &mi_key_bits),
        detection_with_eve: detection_with,
        detection_without_eve: detection_without,
        detection_z: two_proportion_z(
            detection_with.0,
            detection_with.1.max(1),
            detection_without.0,
            detection_without.1.max(1),
        ),
    })
}
