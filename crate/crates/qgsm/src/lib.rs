//! Deterministic simulator for quantum-cryptographic SIM-card authentication.
//!
//! The crate models two authentication protocols for mobile networks next to
//! the classical GSM baseline:
//!
//! * a three-particle entanglement protocol ([`proto_tri`]) in which a source
//!   of entangled triples feeds SIM1, SIM2 and the authentication center
//!   (AUC), sifted measurement records become per-channel quantum keys, and a
//!   cloned SIM betrays itself during simultaneous logins because quantum
//!   keys cannot be copied;
//! * a quantum-memory challenge-response protocol ([`proto_qmem`]) in which a
//!   SIM card stores unmeasured halves of Bell pairs and answers windowed
//!   measurement challenges issued by the network.
//!
//! Everything is driven by seeded RNG streams ([`runtime::RngStream`]) so a
//! run is reproducible bit-for-bit from its master seed. The few-qubit
//! state-vector engine lives in [`qstate`]; [`fixtures`] replays the pinned
//! worked examples used by the test suites and the CLI.

pub mod auth_gsm;
pub mod error;
pub mod fixtures;
pub mod party;
pub mod proto_qmem;
pub mod proto_tri;
pub mod qstate;
pub mod runtime;
pub mod stats;

pub use error::{Error, Result};
pub use party::Role;
