//! Deterministic RNG stream derivation.
//!
//! Every random draw in a session comes from a stream derived from
//! `(master_seed, party, purpose, counter)`. Distinct tuples give
//! statistically independent ChaCha streams, so adding a party or a purpose
//! never perturbs the draws of another, and replaying a seed reproduces a
//! run exactly.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::party::Role;

/// What a derived stream is used for. The discriminants are part of the
/// reproducibility contract: reordering them would reshuffle every seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Purpose {
    /// Per-round measurement basis choice.
    Basis,
    /// Born-rule outcome sampling.
    Outcome,
    /// RAND challenge generation.
    Challenge,
    /// Per-round measurement ordering.
    Order,
    /// Quantum-memory provisioning (axis and outcome draws).
    Provision,
    /// Window/contract axis selection on the SIM side.
    Contract,
    /// Attack-model randomness.
    Attack,
    /// Per-trial sub-seed derivation in Monte Carlo runs.
    Trial,
    /// Disclosure subset selection (eavesdropping checks).
    Disclosure,
    /// Bit-flip channel noise.
    Noise,
}

impl Purpose {
    fn id(self) -> u64 {
        match self {
            Purpose::Basis => 1,
            Purpose::Outcome => 2,
            Purpose::Challenge => 3,
            Purpose::Order => 4,
            Purpose::Provision => 5,
            Purpose::Contract => 6,
            Purpose::Attack => 7,
            Purpose::Trial => 8,
            Purpose::Disclosure => 9,
            Purpose::Noise => 10,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded, replayable random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha12Rng,
}

impl RngStream {
    /// Derives the stream for `(master_seed, party, purpose, counter)`.
    pub fn derive(master_seed: u64, party: Role, purpose: Purpose, counter: u64) -> Self {
        let mut state = master_seed;
        let mut acc = splitmix64(&mut state);
        for v in [party.stream_id(), purpose.id(), counter] {
            state ^= v.wrapping_mul(0xA076_1D64_78BD_642F);
            acc ^= splitmix64(&mut state);
        }
        let mut seed = [0u8; 32];
        let mut s = acc;
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        RngStream {
            inner: ChaCha12Rng::from_seed(seed),
        }
    }

    /// Derives a fresh sub-seed, e.g. one master seed per Monte Carlo trial.
    pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
        let mut stream = RngStream::derive(master_seed, Role::Sep, Purpose::Trial, trial);
        stream.inner.next_u64()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest);
    }
}
