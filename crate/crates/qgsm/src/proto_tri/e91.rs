//! Two-party reference mode: Bell-pair sifting between one SIM (Alice) and
//! the AUC (Bob), with a disclosed check fraction removed from the key.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::party::Role;
use crate::proto_tri::BasisPolicy;
use crate::qstate::{QubitLabel, StateKind, StateVector};
use crate::runtime::{Payload, Purpose, Session, Transcript};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct E91Config {
    pub pairs: u32,
    /// Fraction of sifted bits announced for eavesdrop checking and then
    /// dropped from the key.
    pub disclose_fraction: f64,
    pub alice_policy: BasisPolicy,
    pub bob_policy: BasisPolicy,
    pub record_transcript: bool,
}

impl Default for E91Config {
    fn default() -> Self {
        E91Config {
            pairs: 1_000,
            disclose_fraction: 0.0,
            alice_policy: BasisPolicy::IidUniform,
            bob_policy: BasisPolicy::IidUniform,
            record_transcript: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisclosedBit {
    pub round: u32,
    pub alice_bit: u8,
    pub bob_bit: u8,
}

#[derive(Debug, Clone)]
pub struct E91Outcome {
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    /// Sifted length before the disclosure was removed.
    pub sifted_len: usize,
    pub disclosed: Vec<DisclosedBit>,
    pub transcript: Transcript,
}

/// Runs the Bell-pair protocol: emit, measure in independently chosen X/Z,
/// announce bases both ways, keep matching-basis rounds. Since Φ+ is
/// perfectly correlated in X and in Z, the sifted keys coincide.
pub fn run_e91_reference(config: &E91Config, master_seed: u64) -> Result<E91Outcome> {
    let mut session = Session::open(&[Role::Sep, Role::Sim1, Role::Auc], master_seed)?;
    session.set_recording(config.record_transcript);

    let labels = [QubitLabel::Party(Role::Sim1), QubitLabel::Party(Role::Auc)];
    let mut alice_bits: Vec<(u32, u8)> = Vec::new();
    let mut bob_bits: Vec<(u32, u8)> = Vec::new();

    for round in 0..config.pairs {
        let state = StateVector::named(StateKind::BellPhiPlus, &labels)?;
        let delivery = session.quantum_deliver(state, &[(0, Role::Sim1), (1, Role::Auc)])?;

        let alice_axis = config.alice_policy.pick(session.stream(Role::Sim1, Purpose::Basis));
        let bob_axis = config.bob_policy.pick(session.stream(Role::Auc, Purpose::Basis));

        let mut state = delivery.state;
        let mut bits = [0u8; 2];
        for (slot, (role, axis)) in [(Role::Sim1, alice_axis), (Role::Auc, bob_axis)]
            .into_iter()
            .enumerate()
        {
            let leg = delivery.legs[slot].0;
            let (record, post) = {
                let rng = session.stream(role, Purpose::Outcome);
                state.measure(leg, axis, rng, 0)?
            };
            state = post;
            bits[slot] = record.classical_bit;
            session.log_measurement(role, round, record);
        }

        session.send(Role::Sim1, Role::Auc, Payload::BasisAnnounce { round, axis: alice_axis })?;
        session.send(Role::Auc, Role::Sim1, Payload::BasisAnnounce { round, axis: bob_axis })?;

        if alice_axis == bob_axis {
            alice_bits.push((round, bits[0]));
            bob_bits.push((round, bits[1]));
        }
    }

    let sifted_len = alice_bits.len();

    // Disclosure: Bob picks the check positions from his stream, both sides
    // announce those bits, and the positions leave the key.
    let check_count = ((sifted_len as f64) * config.disclose_fraction).floor() as usize;
    let mut disclosed = Vec::with_capacity(check_count);
    if check_count > 0 {
        let mut indices: Vec<usize> = (0..sifted_len).collect();
        let rng = session.stream(Role::Auc, Purpose::Disclosure);
        for i in 0..check_count {
            let j = rng.random_range(i..indices.len());
            indices.swap(i, j);
        }
        let mut check: Vec<usize> = indices[..check_count].to_vec();
        check.sort_unstable();

        let positions: Vec<u64> = check.iter().map(|&i| alice_bits[i].0 as u64).collect();
        let a_bits: Vec<u8> = check.iter().map(|&i| alice_bits[i].1).collect();
        let b_bits: Vec<u8> = check.iter().map(|&i| bob_bits[i].1).collect();
        session.send(
            Role::Sim1,
            Role::Auc,
            Payload::BasisReport {
                positions: positions.clone(),
                axes: Vec::new(),
                bits: a_bits.clone(),
            },
        )?;
        session.send(
            Role::Auc,
            Role::Sim1,
            Payload::BasisReport {
                positions,
                axes: Vec::new(),
                bits: b_bits.clone(),
            },
        )?;
        for (slot, &i) in check.iter().enumerate() {
            disclosed.push(DisclosedBit {
                round: alice_bits[i].0,
                alice_bit: a_bits[slot],
                bob_bit: b_bits[slot],
            });
        }
        for &i in check.iter().rev() {
            alice_bits.remove(i);
            bob_bits.remove(i);
        }
    }

    Ok(E91Outcome {
        alice_key: alice_bits.into_iter().map(|(_, b)| b).collect(),
        bob_key: bob_bits.into_iter().map(|(_, b)| b).collect(),
        sifted_len,
        disclosed,
        transcript: session.into_transcript(),
    })
}
