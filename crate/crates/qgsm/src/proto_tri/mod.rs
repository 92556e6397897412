//! Three-particle entanglement protocol: round classification, Null-message
//! reconciliation, per-channel key accumulation, quantum-key authentication
//! and dual-login clone detection.
//!
//! Each emission sends one three-qubit state to (SIM1, SIM2, AUC). Parties
//! measure in X or Z, SIMs announce bases to the AUC and the AUC announces
//! its own back. A round becomes key material when bases line up:
//! all-Z rounds feed both channels, mixed rounds where one SIM matches the
//! AUC in Z feed that SIM's channel, and all-X rounds survive via a Null
//! message that aligns everyone on the AUC's bit. Everything else is
//! discarded. A SIM's sifted key therefore equals the AUC's (sign-adjusted)
//! record for its channel bit-for-bit, and two simultaneous logins with the
//! same IMSI but different channel keys expose a cloned card.

mod e91;
mod scenario;

pub use e91::{run_e91_reference, E91Config, E91Outcome};
pub use scenario::{
    agreement_rate, eve_cnot_session, run_scenario, Agreement, EveCnotConfig, EveCnotReport,
    ScenarioConfig, ScenarioKind, ScenarioReport, TrialResult,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auth_gsm::{AuthResponse, Imsi, RandChallenge, SecretKey, A3};
use crate::error::{Error, Result};
use crate::party::Role;
use crate::qstate::{BasisAxis, QubitLabel, StateKind, StateVector};
use crate::runtime::{Channel, Payload, Purpose, RngStream, Session, Transcript, Verdict};

/// Sifting class of one round, following the protocol's table colors:
/// red discards, blue feeds channel A, yellow feeds channel B, green feeds
/// both, gray is an all-X round rescued by a Null message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundClass {
    DiscardRed,
    ChanABlue,
    ChanBYellow,
    BothGreen,
    NullGray,
}

impl RoundClass {
    pub fn feeds(self, channel: Channel) -> bool {
        matches!(
            (self, channel),
            (RoundClass::BothGreen | RoundClass::NullGray, _)
                | (RoundClass::ChanABlue, Channel::A)
                | (RoundClass::ChanBYellow, Channel::B)
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            RoundClass::DiscardRed => "red",
            RoundClass::ChanABlue => "blue",
            RoundClass::ChanBYellow => "yellow",
            RoundClass::BothGreen => "green",
            RoundClass::NullGray => "gray",
        }
    }
}

/// Classifies a dual-login round from the announced bases, in
/// (SIM1, SIM2, AUC) order. Only X and Z are admissible here.
///
/// Single-channel X agreements (e.g. SIM1 = AUC = X while SIM2 = Z) are
/// discarded: two-qubit X marginals of the shared states carry no
/// correlation, so such rounds cannot yield a shared bit.
pub fn classify_round(sim1: BasisAxis, sim2: BasisAxis, auc: BasisAxis) -> Result<RoundClass> {
    for axis in [sim1, sim2, auc] {
        if axis == BasisAxis::Y {
            return Err(Error::ForbiddenAxis { axis });
        }
    }
    use BasisAxis::{X, Z};
    Ok(match (sim1, sim2, auc) {
        (Z, Z, Z) => RoundClass::BothGreen,
        (X, X, X) => RoundClass::NullGray,
        (Z, X, Z) => RoundClass::ChanABlue,
        (X, Z, Z) => RoundClass::ChanBYellow,
        _ => RoundClass::DiscardRed,
    })
}

/// Null-message reconciliation for an all-X round: every party ends up
/// holding the AUC's announced bit (receivers flip their bit iff it
/// differs, which is the same thing).
pub fn null_adjust(auc_bit: u8, _sim_bit: u8) -> u8 {
    auc_bit
}

/// Z-sign map of a source state: +1 when a channel's SIM agrees with the
/// AUC in Z, −1 when it anti-agrees (the AUC then stores flipped bits for
/// that channel). Computed from the state itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelSigns {
    pub a: i8,
    /// Absent for two-party sources.
    pub b: Option<i8>,
}

pub fn reconcile_state_correlations(kind: StateKind) -> Result<ChannelSigns> {
    fn z_sign(
        state: &StateVector,
        sim_qubit: usize,
        auc_qubit: usize,
        channel: char,
        name: &'static str,
    ) -> Result<i8> {
        let d = state.outcome_distribution(&[(sim_qubit, BasisAxis::Z), (auc_qubit, BasisAxis::Z)])?;
        let corr = d.prob_of_bits(&[0, 0]) + d.prob_of_bits(&[1, 1])
            - d.prob_of_bits(&[0, 1])
            - d.prob_of_bits(&[1, 0]);
        if (corr - 1.0).abs() < 1e-9 {
            Ok(1)
        } else if (corr + 1.0).abs() < 1e-9 {
            Ok(-1)
        } else {
            Err(Error::NoZCorrelation { kind: name, channel })
        }
    }

    match kind {
        StateKind::BellPhiPlus => {
            let state = StateVector::named(
                kind,
                &[QubitLabel::Party(Role::Sim1), QubitLabel::Party(Role::Auc)],
            )?;
            Ok(ChannelSigns {
                a: z_sign(&state, 0, 1, 'A', kind.name())?,
                b: None,
            })
        }
        StateKind::Ghz3 | StateKind::WFlipped => {
            let state = StateVector::named(
                kind,
                &[
                    QubitLabel::Party(Role::Sim1),
                    QubitLabel::Party(Role::Sim2),
                    QubitLabel::Party(Role::Auc),
                ],
            )?;
            Ok(ChannelSigns {
                a: z_sign(&state, 0, 2, 'A', kind.name())?,
                b: Some(z_sign(&state, 1, 2, 'B', kind.name())?),
            })
        }
    }
}

/// Per-party basis selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BasisPolicy {
    #[default]
    IidUniform,
    AllZ,
    AllX,
}

impl BasisPolicy {
    fn pick(self, rng: &mut RngStream) -> BasisAxis {
        match self {
            BasisPolicy::IidUniform => {
                if rng.random::<bool>() {
                    BasisAxis::X
                } else {
                    BasisAxis::Z
                }
            }
            BasisPolicy::AllZ => BasisAxis::Z,
            BasisPolicy::AllX => BasisAxis::X,
        }
    }
}

/// Measurement timing within a round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrderPolicy {
    /// AUC, then SIM1, then SIM2 — the order of the worked examples.
    #[default]
    Fixed,
    /// Fresh random order each round. Joint statistics are order-invariant,
    /// so this only shuffles the transcript.
    PerRoundRandom,
    /// A fixed explicit schedule; must list SIM1, SIM2 and AUC exactly once.
    Explicit(Vec<Role>),
}

/// How the AUC reconciles a source whose channels anti-correlate in Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReconcileMode {
    /// Per-channel sign map computed from the state (default).
    #[default]
    DerivedSigns,
    /// Flip every AUC record globally. Kept for comparison; for the
    /// anti-correlated source this corrupts channel A.
    LiteralGlobalFlip,
}

/// SIM2's behavior during a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Sim2Mode {
    /// Solo login: SIM2 takes no part; its particle goes unmeasured.
    Absent,
    /// Independent measurements and truthful announcements.
    #[default]
    Honest,
    /// SIM2 announces SIM1's bases and adopts SIM1's bits, received over the
    /// inter-SIM relay. Optionally it still burns measurements on its own
    /// leg (the results are discarded).
    Relay { measure_own: bool },
}

/// Configuration of one key-distribution session.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriConfig {
    pub source: StateKind,
    pub emissions: u32,
    pub basis_policy: BasisPolicy,
    pub order_policy: OrderPolicy,
    pub reconcile: ReconcileMode,
    pub sim2: Sim2Mode,
    /// Channel Eve's CNOT probe sits on, if any.
    pub eve_channel: Option<Channel>,
    /// Gives SIM2 read access to channel A's basis announcements (the
    /// basis-eavesdropping scenario). The copies arrive after SIM2 has
    /// already measured, so they cannot change its key.
    pub sim2_taps_basis_announcements: bool,
    pub record_transcript: bool,
}

impl Default for TriConfig {
    fn default() -> Self {
        TriConfig {
            source: StateKind::Ghz3,
            emissions: 20,
            basis_policy: BasisPolicy::IidUniform,
            order_policy: OrderPolicy::Fixed,
            reconcile: ReconcileMode::DerivedSigns,
            sim2: Sim2Mode::Honest,
            eve_channel: None,
            sim2_taps_basis_announcements: false,
            record_transcript: true,
        }
    }
}

/// One accumulated key bit and where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyBit {
    pub round: u32,
    pub bit: u8,
    pub class: RoundClass,
}

/// An ordered channel key with per-bit provenance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelKey {
    pub bits: Vec<KeyBit>,
}

impl ChannelKey {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The key as a binary string, oldest bit first.
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|k| if k.bit == 1 { '1' } else { '0' }).collect()
    }

    /// Only the single-channel (blue/yellow) bits. Green and gray rounds
    /// hand the same bit to both channels, so identification rests on these.
    pub fn identification_string(&self) -> String {
        self.bits
            .iter()
            .filter(|k| matches!(k.class, RoundClass::ChanABlue | RoundClass::ChanBYellow))
            .map(|k| if k.bit == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn secret_key(&self) -> SecretKey {
        SecretKey::from_bit_str(&self.bit_string())
    }
}

/// The AUC's stored per-channel records.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelKeys {
    pub a: ChannelKey,
    pub b: ChannelKey,
}

/// Announced axis and registered bit of one party in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyRound {
    pub axis: BasisAxis,
    pub bit: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_index: u32,
    pub sim1: PartyRound,
    /// SIM2's announced basis and adopted bit (claimed, under relay).
    pub sim2: Option<PartyRound>,
    pub auc: PartyRound,
    pub class: RoundClass,
    pub null_applied: bool,
    /// The common bit everyone holds after a Null adjustment. Raw bits
    /// above are preserved unchanged.
    pub adjusted_bit: Option<u8>,
}

/// Eve's per-round inference from her stored CNOT ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveRound {
    pub round: u32,
    pub axis: BasisAxis,
    pub bit: u8,
}

/// Everything a session produces.
#[derive(Debug, Clone)]
pub struct TriSessionOutcome {
    pub auc_keys: ChannelKeys,
    pub sim1_key: ChannelKey,
    pub sim2_key: Option<ChannelKey>,
    pub rounds: Vec<RoundRecord>,
    pub eve_rounds: Vec<EveRound>,
    pub signs: ChannelSigns,
    pub transcript: Transcript,
}

fn source_labels(source: StateKind) -> Vec<QubitLabel> {
    match source.arity() {
        2 => vec![QubitLabel::Party(Role::Sim1), QubitLabel::Party(Role::Auc)],
        _ => vec![
            QubitLabel::Party(Role::Sim1),
            QubitLabel::Party(Role::Sim2),
            QubitLabel::Party(Role::Auc),
        ],
    }
}

fn apply_sign(bit: u8, sign: i8) -> u8 {
    if sign < 0 {
        bit ^ 1
    } else {
        bit
    }
}

/// Runs a full key-distribution session and returns the channel keys, round
/// table and transcript.
pub fn run_session(config: &TriConfig, master_seed: u64) -> Result<TriSessionOutcome> {
    if config.source == StateKind::BellPhiPlus {
        return Err(Error::Config(
            "two-party sources run through the E91 reference mode".into(),
        ));
    }
    let sim2_present = !matches!(config.sim2, Sim2Mode::Absent);
    let sim2_measures = matches!(
        config.sim2,
        Sim2Mode::Honest | Sim2Mode::Relay { measure_own: true }
    );
    let sim2_relays = matches!(config.sim2, Sim2Mode::Relay { .. });

    let mut topology = vec![Role::Sep, Role::Sim1, Role::Auc];
    if sim2_present {
        topology.insert(2, Role::Sim2);
    }
    if config.eve_channel.is_some() {
        topology.push(Role::Eve);
    }
    let mut session = Session::open(&topology, master_seed)?;
    session.set_recording(config.record_transcript);
    if let Some(channel) = config.eve_channel {
        session.set_eve_intercept(channel.sim())?;
    }
    if config.sim2_taps_basis_announcements && sim2_present {
        session.add_tap(crate::runtime::Tap {
            observer: Role::Sim2,
            endpoints: (Role::Sim1, Role::Auc),
            basis_announce_only: true,
        })?;
    }

    // Sign map: +1 stores the AUC bit as-is, −1 flipped. The literal mode
    // flips every AUC record (Null broadcasts included) when the source
    // anti-correlates.
    let (sign_a, sign_b, null_flip) = match config.reconcile {
        ReconcileMode::DerivedSigns => {
            let signs = reconcile_state_correlations(config.source)?;
            (signs.a, signs.b.unwrap_or(1), 0u8)
        }
        ReconcileMode::LiteralGlobalFlip => {
            let flip = if config.source == StateKind::WFlipped { -1 } else { 1 };
            (flip, flip, u8::from(flip < 0))
        }
    };

    if let OrderPolicy::Explicit(schedule) = &config.order_policy {
        let well_formed = schedule.len() == 3
            && [Role::Sim1, Role::Sim2, Role::Auc]
                .iter()
                .all(|r| schedule.iter().filter(|s| *s == r).count() == 1);
        if !well_formed {
            return Err(Error::Config(
                "explicit schedule must list SIM1, SIM2 and AUC exactly once".into(),
            ));
        }
    }

    let labels = source_labels(config.source);
    let mut outcome = TriSessionOutcome {
        auc_keys: ChannelKeys::default(),
        sim1_key: ChannelKey::default(),
        sim2_key: sim2_present.then(ChannelKey::default),
        rounds: Vec::with_capacity(config.emissions as usize),
        eve_rounds: Vec::new(),
        signs: ChannelSigns {
            a: sign_a,
            b: sim2_present.then_some(sign_b),
        },
        transcript: Transcript::new(master_seed),
    };

    for round in 0..config.emissions {
        let state = StateVector::named(config.source, &labels)?;
        // The SIM2 leg is emitted regardless; in solo sessions the source
        // keeps it and nobody measures it.
        let legs: Vec<(usize, Role)> = vec![
            (0, Role::Sim1),
            (1, if sim2_present { Role::Sim2 } else { Role::Sep }),
            (2, Role::Auc),
        ];
        let delivery = session.quantum_deliver(state, &legs)?;

        let sim1_axis = config
            .basis_policy
            .pick(session.stream(Role::Sim1, Purpose::Basis));
        let auc_axis = config
            .basis_policy
            .pick(session.stream(Role::Auc, Purpose::Basis));
        let sim2_axis = sim2_measures
            .then(|| config.basis_policy.pick(session.stream(Role::Sim2, Purpose::Basis)));

        let measures = |r: &Role| *r != Role::Sim2 || sim2_measures;
        let mut order: Vec<Role> = match &config.order_policy {
            OrderPolicy::Fixed | OrderPolicy::PerRoundRandom => {
                [Role::Auc, Role::Sim1, Role::Sim2].into_iter().filter(measures).collect()
            }
            OrderPolicy::Explicit(schedule) => schedule.iter().copied().filter(measures).collect(),
        };
        if config.order_policy == OrderPolicy::PerRoundRandom {
            let rng = session.stream(Role::Sep, Purpose::Order);
            for i in (1..order.len()).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
        }

        let mut state = delivery.state.clone();
        let mut sim1_bit = 0u8;
        let mut sim2_bit = None;
        let mut auc_bit = 0u8;
        for party in order {
            let axis = match party {
                Role::Sim1 => sim1_axis,
                Role::Sim2 => sim2_axis.expect("sim2 measures"),
                _ => auc_axis,
            };
            let leg = delivery.leg_of(party).expect("measuring party holds a leg");
            let (record, post) = {
                let rng = session.stream(party, Purpose::Outcome);
                state.measure(leg, axis, rng, 0)?
            };
            state = post;
            match party {
                Role::Sim1 => sim1_bit = record.classical_bit,
                Role::Sim2 => sim2_bit = Some(record.classical_bit),
                _ => auc_bit = record.classical_bit,
            }
            session.log_measurement(party, round, record);
        }

        // What SIM2 presents to the AUC: its own results, or SIM1's under
        // the relay attack. The relayed basis travels over the inter-SIM
        // channel before SIM2 repeats it.
        let claimed2: Option<PartyRound> = if sim2_present {
            if sim2_relays {
                session.send(
                    Role::Sim1,
                    Role::Sim2,
                    Payload::BasisAnnounce { round, axis: sim1_axis },
                )?;
                Some(PartyRound { axis: sim1_axis, bit: sim1_bit })
            } else {
                Some(PartyRound {
                    axis: sim2_axis.expect("honest sim2 measures"),
                    bit: sim2_bit.expect("honest sim2 measures"),
                })
            }
        } else {
            None
        };

        session.send(
            Role::Sim1,
            Role::Auc,
            Payload::BasisAnnounce { round, axis: sim1_axis },
        )?;
        if let Some(c2) = &claimed2 {
            session.send(
                Role::Sim2,
                Role::Auc,
                Payload::BasisAnnounce { round, axis: c2.axis },
            )?;
        }
        session.send(
            Role::Auc,
            Role::Sim1,
            Payload::BasisAnnounce { round, axis: auc_axis },
        )?;
        if sim2_present {
            session.send(
                Role::Auc,
                Role::Sim2,
                Payload::BasisAnnounce { round, axis: auc_axis },
            )?;
        }

        let class = match &claimed2 {
            Some(c2) => classify_round(sim1_axis, c2.axis, auc_axis)?,
            // Solo sifting: only Z∧Z rounds correlate (the pair marginal of
            // the shared state has no X correlation); they register as
            // single-channel rounds on the lone SIM's channel.
            None => {
                if sim1_axis == BasisAxis::Z && auc_axis == BasisAxis::Z {
                    RoundClass::ChanABlue
                } else {
                    RoundClass::DiscardRed
                }
            }
        };

        let mut null_applied = false;
        let mut adjusted_bit = None;
        let mut sim1_kept = sim1_bit;
        let mut sim2_kept = claimed2.as_ref().map(|c| c.bit);
        if class == RoundClass::NullGray {
            null_applied = true;
            let broadcast = auc_bit ^ null_flip;
            session.send(
                Role::Auc,
                Role::Sim1,
                Payload::NullMessage { round, auc_bit: broadcast },
            )?;
            if sim2_present {
                session.send(
                    Role::Auc,
                    Role::Sim2,
                    Payload::NullMessage { round, auc_bit: broadcast },
                )?;
            }
            sim1_kept = null_adjust(broadcast, sim1_bit);
            sim2_kept = sim2_kept.map(|b| null_adjust(broadcast, b));
            adjusted_bit = Some(broadcast);
        }

        // Key accumulation. The AUC stores its own (sign-adjusted) bit; each
        // SIM stores what it holds after any Null adjustment.
        if class.feeds(Channel::A) {
            let auc_record = if class == RoundClass::NullGray {
                auc_bit ^ null_flip
            } else {
                apply_sign(auc_bit, sign_a)
            };
            outcome.auc_keys.a.bits.push(KeyBit { round, bit: auc_record, class });
            outcome.sim1_key.bits.push(KeyBit { round, bit: sim1_kept, class });
        }
        if sim2_present && class.feeds(Channel::B) {
            let auc_record = if class == RoundClass::NullGray {
                auc_bit ^ null_flip
            } else {
                apply_sign(auc_bit, sign_b)
            };
            outcome.auc_keys.b.bits.push(KeyBit { round, bit: auc_record, class });
            if let (Some(key), Some(bit)) = (outcome.sim2_key.as_mut(), sim2_kept) {
                key.bits.push(KeyBit { round, bit, class });
            }
        }

        // Eve measures her stored ancilla only after the bases are public,
        // in the tapped SIM's announced basis.
        if let Some(ancilla) = delivery.eve_ancilla {
            let tapped_axis = match config.eve_channel {
                Some(Channel::B) => claimed2.as_ref().map(|c| c.axis).unwrap_or(sim1_axis),
                _ => sim1_axis,
            };
            let (record, _post) = {
                let rng = session.stream(Role::Eve, Purpose::Outcome);
                state.measure(ancilla, tapped_axis, rng, 0)?
            };
            session.log_measurement(Role::Eve, round, record);
            outcome.eve_rounds.push(EveRound {
                round,
                axis: tapped_axis,
                bit: record.classical_bit,
            });
        }

        outcome.rounds.push(RoundRecord {
            round_index: round,
            sim1: PartyRound { axis: sim1_axis, bit: sim1_bit },
            sim2: claimed2,
            auc: PartyRound { axis: auc_axis, bit: auc_bit },
            class,
            null_applied,
            adjusted_bit,
        });
    }

    // Relay attacks finish with the classical key transfer SIM1 → SIM2.
    if sim2_relays {
        let bits = outcome.sim1_key.bit_string();
        session.send(Role::Sim1, Role::Sim2, Payload::KeyRelay { bits })?;
    }

    outcome.transcript = session.into_transcript();
    Ok(outcome)
}

/// Reasons a quantum authentication can fail short of a key mismatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    InsufficientKey,
    ResMismatch,
    QresMismatch,
}

/// One side's credentials for the dual (Ki, QK) check.
#[derive(Debug, Clone)]
pub struct Credentials {
    pub ki: SecretKey,
    pub key_bits: String,
}

/// Outcome of the (RES, QRES) comparison for one login.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumAuthOutcome {
    /// Network-side (RES_i, QRES_j).
    pub network_pair: (AuthResponse, AuthResponse),
    /// SIM-side (XRES_i, QXRES_j).
    pub sim_pair: (AuthResponse, AuthResponse),
    pub verdict: Verdict,
    pub reason: Option<RejectReason>,
}

/// Default minimum quantum-key length before a login is attempted.
pub const DEFAULT_MIN_KEY_LEN: usize = 8;

/// Runs the dual-response check: both sides apply A3 to (Ki, RAND) and to
/// (QK, RAND); the login is accepted iff both response pairs agree. Keys
/// shorter than `min_key_len` are rejected outright.
pub fn quantum_authenticate(
    sim: &Credentials,
    network: &Credentials,
    rand: RandChallenge,
    a3: A3,
    min_key_len: usize,
) -> QuantumAuthOutcome {
    let network_pair = (
        a3(network.ki, rand),
        a3(SecretKey::from_bit_str(&network.key_bits), rand),
    );
    let sim_pair = (
        a3(sim.ki, rand),
        a3(SecretKey::from_bit_str(&sim.key_bits), rand),
    );
    if sim.key_bits.len() < min_key_len || network.key_bits.len() < min_key_len {
        return QuantumAuthOutcome {
            network_pair,
            sim_pair,
            verdict: Verdict::Reject,
            reason: Some(RejectReason::InsufficientKey),
        };
    }
    let (verdict, reason) = if sim_pair.0 != network_pair.0 {
        (Verdict::Reject, Some(RejectReason::ResMismatch))
    } else if sim_pair.1 != network_pair.1 {
        (Verdict::Reject, Some(RejectReason::QresMismatch))
    } else {
        (Verdict::Accept, None)
    };
    QuantumAuthOutcome {
        network_pair,
        sim_pair,
        verdict,
        reason,
    }
}

/// One login attempt as the AUC sees it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoginSubmission {
    pub imsi: Imsi,
    pub res: AuthResponse,
    pub qres: AuthResponse,
}

/// What the clone detector compares across the two submissions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMode {
    /// Compare the AUC's full per-channel key strings (length + content).
    #[default]
    FullKey,
    /// Compare only the submitted 32-bit quantum responses.
    ResponsesOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CloneOutcome {
    Accepted,
    Rejected,
    CloneDetected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneEvidence {
    pub res: (u32, u32),
    pub qres: (u32, u32),
    /// Whether the AUC's two channel records were equal (full-key mode).
    pub auc_keys_equal: Option<bool>,
}

/// Verdict over a pair of simultaneous same-IMSI logins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneVerdict {
    pub outcome: CloneOutcome,
    pub evidence: CloneEvidence,
}

/// Judges two simultaneous logins sharing one IMSI. A clone shows up as
/// identical i-results with differing j-results: the copied Ki answers the
/// classical challenge identically while the unclonable quantum keys
/// disagree. Detection rejects both cards; submissions whose i-results
/// already differ are plainly rejected.
pub fn detect_clone(
    first: &LoginSubmission,
    second: &LoginSubmission,
    auc_records: Option<(&ChannelKey, &ChannelKey)>,
    mode: CompareMode,
) -> Result<CloneVerdict> {
    if first.imsi != second.imsi {
        return Err(Error::Config(
            "clone detection compares submissions sharing one IMSI".into(),
        ));
    }
    let auc_keys_equal = auc_records.map(|(a, b)| a.bit_string() == b.bit_string());
    let evidence = CloneEvidence {
        res: (first.res.0, second.res.0),
        qres: (first.qres.0, second.qres.0),
        auc_keys_equal,
    };
    let outcome = if first.res != second.res {
        CloneOutcome::Rejected
    } else {
        let quantum_differs = match (mode, auc_keys_equal) {
            (CompareMode::FullKey, Some(equal)) => !equal,
            _ => first.qres != second.qres,
        };
        if quantum_differs {
            CloneOutcome::CloneDetected
        } else {
            CloneOutcome::Accepted
        }
    };
    Ok(CloneVerdict { outcome, evidence })
}
