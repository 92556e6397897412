//! Classical message vocabulary.
//!
//! Payloads carry classical data only — basis names, bits, integers — never
//! amplitudes. That firewall is structural: there is no payload variant that
//! could hold quantum state.

use serde::{Deserialize, Serialize};

use crate::party::Role;
use crate::qstate::BasisAxis;

/// Accept/reject verdict exchanged at the end of an authentication run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Everything a party can say over a classical channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Payload {
    /// Opens an authentication request.
    ImsiRequest { imsi: String },
    /// Network-issued 128-bit challenge.
    RandIssue { rand: u128 },
    /// Measurement basis for one round; deliberately outcome-free.
    BasisAnnounce { round: u32, axis: BasisAxis },
    /// All-X round reconciliation: carries the AUC's own X bit so receivers
    /// can flip mismatching bits. Broadcasting the bit is a documented leak.
    NullMessage { round: u32, auc_bit: u8 },
    /// Quantum-memory challenge: measure positions n+1..=n+m.
    WindowRequest { n: u64, m: u32 },
    /// SIM answer to a window challenge.
    BasisReport {
        positions: Vec<u64>,
        axes: Vec<BasisAxis>,
        bits: Vec<u8>,
    },
    /// Authentication responses: classical-key response plus the quantum-key
    /// response (absent in classical baseline runs).
    ResSubmission { res: u32, qres: Option<u32> },
    /// Classical transfer of accumulated key bits (inter-SIM relay attack).
    KeyRelay { bits: String },
    /// Final verdict.
    Decision { verdict: Verdict },
}

/// One logged classical message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalMessage {
    pub sequence_number: u64,
    pub sender: Role,
    pub receiver: Role,
    pub payload: Payload,
}
