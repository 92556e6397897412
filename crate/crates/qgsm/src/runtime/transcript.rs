//! Totally ordered event log.
//!
//! A transcript records every classical message, tap copy and measurement of
//! a session in send order. Together with the master seed it is the unit of
//! reproducibility: replaying the seed regenerates the transcript
//! bit-for-bit, and the JSON Lines export is stable enough to diff.

use serde::{Deserialize, Serialize};

use crate::party::Role;
use crate::qstate::MeasurementRecord;
use crate::runtime::message::ClassicalMessage;

/// One transcript entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    Message {
        seq: u64,
        #[serde(flatten)]
        message: ClassicalMessage,
    },
    /// Copy of a message delivered to a configured tap observer.
    Tap {
        seq: u64,
        observer: Role,
        #[serde(flatten)]
        message: ClassicalMessage,
    },
    Measurement {
        seq: u64,
        party: Role,
        round: u32,
        record: MeasurementRecord,
    },
}

impl Event {
    pub fn seq(&self) -> u64 {
        match self {
            Event::Message { seq, .. } | Event::Tap { seq, .. } | Event::Measurement { seq, .. } => {
                *seq
            }
        }
    }
}

/// Ordered log of one session.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub master_seed: u64,
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn new(master_seed: u64) -> Self {
        Transcript {
            master_seed,
            events: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn messages(&self) -> impl Iterator<Item = &ClassicalMessage> {
        self.events.iter().filter_map(|e| match e {
            Event::Message { message, .. } => Some(message),
            _ => None,
        })
    }

    /// Serializes the transcript as JSON Lines, one event per line.
    /// Field names are stable; see the repository README for the schema.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("transcript events serialize"));
            out.push('\n');
        }
        out
    }
}
