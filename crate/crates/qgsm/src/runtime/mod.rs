//! Session plumbing: party topology, classical channels with taps, quantum
//! delivery with an optional eavesdropper transform, and the transcript.
//!
//! A session is single-threaded and event-ordered. All randomness flows
//! through [`RngStream`]s derived from the session's master seed, so two
//! sessions opened with the same topology and seed produce byte-identical
//! transcripts.

mod message;
mod rng;
mod transcript;

pub use message::{ClassicalMessage, Payload, Verdict};
pub use rng::{Purpose, RngStream};
pub use transcript::{Event, Transcript};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::party::Role;
use crate::qstate::{MeasurementRecord, StateVector};

/// The two SIM↔AUC key-distribution channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Channel {
    A,
    B,
}

impl Channel {
    /// The SIM endpoint of the channel; the other endpoint is always AUC.
    pub fn sim(self) -> Role {
        match self {
            Channel::A => Role::Sim1,
            Channel::B => Role::Sim2,
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Channel::A => "A",
            Channel::B => "B",
        })
    }
}

/// Read access granted on a classical channel. The observer receives a copy
/// of every matching message after delivery.
#[derive(Debug, Clone)]
pub struct Tap {
    pub observer: Role,
    /// Match messages travelling between these two parties, either way.
    pub endpoints: (Role, Role),
    /// Restrict the tap to basis announcements (the eavesdropping scenario
    /// only ever sees those).
    pub basis_announce_only: bool,
}

impl Tap {
    fn matches(&self, msg: &ClassicalMessage) -> bool {
        let (a, b) = self.endpoints;
        let between = (msg.sender == a && msg.receiver == b) || (msg.sender == b && msg.receiver == a);
        if !between {
            return false;
        }
        if self.basis_announce_only {
            matches!(msg.payload, Payload::BasisAnnounce { .. })
        } else {
            true
        }
    }
}

/// A delivered multi-qubit emission: the joint state plus who holds which leg.
#[derive(Debug, Clone)]
pub struct Delivery {
    pub state: StateVector,
    pub legs: Vec<(usize, Role)>,
    /// Index of the ancilla Eve split off in transit, if she intercepted.
    pub eve_ancilla: Option<usize>,
}

impl Delivery {
    pub fn leg_of(&self, role: Role) -> Option<usize> {
        self.legs.iter().find(|(_, r)| *r == role).map(|(q, _)| *q)
    }
}

/// One protocol session: topology, transcript, derived RNG streams.
#[derive(Debug)]
pub struct Session {
    master_seed: u64,
    roles: Vec<Role>,
    quantum_links: Vec<(Role, Role)>,
    transcript: Transcript,
    taps: Vec<Tap>,
    /// Leg receiver Eve intercepts with her CNOT probe, if any.
    eve_intercept: Option<Role>,
    streams: BTreeMap<(Role, Purpose), RngStream>,
    next_seq: u64,
    recording: bool,
}

impl Session {
    /// Opens a session over the given topology.
    ///
    /// If SEP is present, quantum links SEP→(each SIM) and SEP→AUC are wired.
    /// Requires exactly one AUC; duplicate roles are rejected.
    pub fn open(topology: &[Role], master_seed: u64) -> Result<Session> {
        for (i, role) in topology.iter().enumerate() {
            if topology[i + 1..].contains(role) {
                return Err(Error::DuplicateRole { role: *role });
            }
        }
        if !topology.contains(&Role::Auc) {
            return Err(Error::MissingAuc);
        }
        let mut quantum_links = Vec::new();
        if topology.contains(&Role::Sep) {
            for receiver in [Role::Sim1, Role::Sim2, Role::Auc] {
                if topology.contains(&receiver) {
                    quantum_links.push((Role::Sep, receiver));
                }
            }
        }
        Ok(Session {
            master_seed,
            roles: topology.to_vec(),
            quantum_links,
            transcript: Transcript::new(master_seed),
            taps: Vec::new(),
            eve_intercept: None,
            streams: BTreeMap::new(),
            next_seq: 0,
            recording: true,
        })
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn has_role(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }

    pub fn quantum_links(&self) -> &[(Role, Role)] {
        &self.quantum_links
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    /// Turns event recording off (sequence numbers keep advancing). Large
    /// Monte Carlo runs use this; determinism is unaffected because RNG
    /// draws never depend on the transcript.
    pub fn set_recording(&mut self, on: bool) {
        self.recording = on;
    }

    /// The derived RNG stream of a party for a given purpose. Derivation
    /// depends only on `(master_seed, role, purpose)`, so lazily creating
    /// streams keeps them reproducible no matter the access order.
    pub fn stream(&mut self, role: Role, purpose: Purpose) -> &mut RngStream {
        let seed = self.master_seed;
        self.streams
            .entry((role, purpose))
            .or_insert_with(|| RngStream::derive(seed, role, purpose, 0))
    }

    pub fn add_tap(&mut self, tap: Tap) -> Result<()> {
        for role in [tap.observer, tap.endpoints.0, tap.endpoints.1] {
            if !self.has_role(role) {
                return Err(Error::UnknownParty { role });
            }
        }
        self.taps.push(tap);
        Ok(())
    }

    /// Configures Eve's in-transit CNOT probe on the leg destined for
    /// `target`. Requires Eve in the topology.
    pub fn set_eve_intercept(&mut self, target: Role) -> Result<()> {
        if !self.has_role(Role::Eve) {
            return Err(Error::UnknownParty { role: Role::Eve });
        }
        if !self.has_role(target) {
            return Err(Error::UnknownParty { role: target });
        }
        self.eve_intercept = Some(target);
        Ok(())
    }

    fn take_seq(&mut self) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        seq
    }

    /// Sends a classical message, logging it in send order and delivering
    /// tap copies afterwards. Returns the message's sequence number.
    pub fn send(&mut self, sender: Role, receiver: Role, payload: Payload) -> Result<u64> {
        if !self.has_role(sender) {
            return Err(Error::UnknownParty { role: sender });
        }
        if !self.has_role(receiver) {
            return Err(Error::UnknownParty { role: receiver });
        }
        let seq = self.take_seq();
        let message = ClassicalMessage {
            sequence_number: seq,
            sender,
            receiver,
            payload,
        };
        let tap_copies: Vec<Role> = self
            .taps
            .iter()
            .filter(|t| t.matches(&message))
            .map(|t| t.observer)
            .collect();
        if self.recording {
            self.transcript.events.push(Event::Message {
                seq,
                message: message.clone(),
            });
        }
        for observer in tap_copies {
            let tap_seq = self.take_seq();
            if self.recording {
                self.transcript.events.push(Event::Tap {
                    seq: tap_seq,
                    observer,
                    message: message.clone(),
                });
            }
        }
        Ok(seq)
    }

    /// Delivers an emitted joint state to the mapped parties. If Eve's
    /// intercept is configured and the target holds a leg, a |0⟩ ancilla is
    /// attached and CNOTed from that leg while the state is in transit.
    pub fn quantum_deliver(&mut self, state: StateVector, legs: &[(usize, Role)]) -> Result<Delivery> {
        if legs.len() != state.num_qubits() {
            return Err(Error::LegMismatch {
                legs: legs.len(),
                qubits: state.num_qubits(),
            });
        }
        for (i, (qubit, role)) in legs.iter().enumerate() {
            if *qubit >= state.num_qubits() {
                return Err(Error::QubitOutOfRange {
                    index: *qubit,
                    num_qubits: state.num_qubits(),
                });
            }
            if !self.has_role(*role) {
                return Err(Error::UnknownParty { role: *role });
            }
            if legs[i + 1..].iter().any(|(q, r)| q == qubit || r == role) {
                return Err(Error::LegMismatch {
                    legs: legs.len(),
                    qubits: state.num_qubits(),
                });
            }
        }
        let mut delivery = Delivery {
            state,
            legs: legs.to_vec(),
            eve_ancilla: None,
        };
        if let Some(target) = self.eve_intercept {
            if let Some(leg) = delivery.leg_of(target) {
                let extended = delivery.state.attach_ancilla(0)?;
                let ancilla = extended.num_qubits() - 1;
                delivery.state = extended.apply_cnot(leg, ancilla)?;
                delivery.legs.push((ancilla, Role::Eve));
                delivery.eve_ancilla = Some(ancilla);
            }
        }
        Ok(delivery)
    }

    /// Logs a measurement event, stamping it with the next sequence number.
    pub fn log_measurement(&mut self, party: Role, round: u32, mut record: MeasurementRecord) -> u64 {
        let seq = self.take_seq();
        record.sequence_number = seq;
        if self.recording {
            self.transcript.events.push(Event::Measurement {
                seq,
                party,
                round,
                record,
            });
        }
        seq
    }
}
