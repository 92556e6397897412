//! Classical GSM authentication baseline: IMSI, Ki, RAND, the pluggable A3
//! algorithm and the five-step challenge-response exchange.
//!
//! The default A3 is a toy summation widened to the real field widths
//! (128-bit key and challenge, 32-bit response); operators may plug any pure
//! `(key, rand) → response` function. The quantum protocols reuse the same
//! contract with sifted quantum keys zero-padded into the key field.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::party::Role;
use crate::runtime::{Payload, Purpose, Session, Verdict};

/// Subscriber identity: 6–15 decimal digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Imsi(String);

impl Imsi {
    pub fn parse(digits: &str) -> Result<Imsi> {
        if digits.len() < 6 || digits.len() > 15 {
            return Err(Error::InvalidImsi {
                reason: format!("length {} not in 6..=15", digits.len()),
            });
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidImsi {
                reason: "non-decimal character".into(),
            });
        }
        Ok(Imsi(digits.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// 128-bit long-term secret (Ki) or a quantum key padded into the same field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretKey(pub u128);

impl SecretKey {
    /// Reads a key from a binary string, most significant bit first. Short
    /// strings zero-extend; anything past 128 bits is dropped so toy keys
    /// and long sifted keys share one code path.
    pub fn from_bit_str(bits: &str) -> SecretKey {
        let mut v: u128 = 0;
        for b in bits.bytes().take(128) {
            v = (v << 1) | u128::from(b == b'1');
        }
        SecretKey(v)
    }
}

/// Fresh 128-bit challenge drawn from the AUC's RNG stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandChallenge(pub u128);

/// 32-bit A3 output (RES, XRES, QRES, QXRES).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthResponse(pub u32);

/// Pluggable authentication algorithm.
pub type A3 = fn(SecretKey, RandChallenge) -> AuthResponse;

/// Default A3: 128-bit wrapping sum truncated to the low 32 bits.
pub fn a3_default(key: SecretKey, rand: RandChallenge) -> AuthResponse {
    AuthResponse(key.0.wrapping_add(rand.0) as u32)
}

/// Outcome of one classical authentication run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsmAuthOutcome {
    pub verdict: Verdict,
    pub res: Option<AuthResponse>,
    pub xres: Option<AuthResponse>,
}

/// Runs the five-step GSM exchange inside a session:
/// IMSI request → network derives (RAND, RES) → RAND issue → SIM derives
/// XRES → XRES submission and comparison. Accepts iff XRES = RES.
///
/// A malformed IMSI is rejected before any RAND is issued. Steps 2 and 4 are
/// party-local computations; the transcript carries the four wire messages
/// in order.
pub fn classical_authenticate(
    session: &mut Session,
    imsi: &str,
    sim_key: SecretKey,
    network_key: SecretKey,
    a3: A3,
) -> Result<GsmAuthOutcome> {
    let sim = [Role::Sim1, Role::Sim2]
        .into_iter()
        .find(|r| session.has_role(*r))
        .ok_or(Error::UnknownParty { role: Role::Sim1 })?;

    session.send(sim, Role::Auc, Payload::ImsiRequest { imsi: imsi.into() })?;

    if Imsi::parse(imsi).is_err() {
        session.send(Role::Auc, sim, Payload::Decision { verdict: Verdict::Reject })?;
        return Ok(GsmAuthOutcome {
            verdict: Verdict::Reject,
            res: None,
            xres: None,
        });
    }

    let rand = RandChallenge(session.stream(Role::Auc, Purpose::Challenge).random());
    let res = a3(network_key, rand);
    session.send(Role::Auc, sim, Payload::RandIssue { rand: rand.0 })?;

    let xres = a3(sim_key, rand);
    session.send(
        sim,
        Role::Auc,
        Payload::ResSubmission {
            res: xres.0,
            qres: None,
        },
    )?;

    let verdict = if xres == res { Verdict::Accept } else { Verdict::Reject };
    session.send(Role::Auc, sim, Payload::Decision { verdict })?;

    Ok(GsmAuthOutcome {
        verdict,
        res: Some(res),
        xres: Some(xres),
    })
}
