//! Quantum-memory challenge-response protocol.
//!
//! At the HLR, one Bell pair Φ+ is shared per memory position: the AUC
//! measures its half right away in a random X/Z basis and records
//! (basis, bit); the SIM half is stored unmeasured. Because Φ+ correlates
//! both bases perfectly, the stored half is exactly the eigenstate the AUC
//! steered it into, so each cell is kept as (axis, bit) — the
//! local-collapse representation, statistically exact for Φ+ and cheap
//! enough for million-cell banks (validated against the full two-qubit
//! simulation in the tests).
//!
//! To authenticate, the network asks for a window of positions to be
//! measured; matching-basis positions must reproduce the AUC's bits
//! exactly. Cloning the card means measuring cells in guessed bases, which
//! disturbs them and shows up as bit errors in later challenges.

mod attack;
mod combinatorics;

pub use attack::{apply_bit_noise, clone_attack, measure_resend_with_known_axes, CloneModel};
pub use combinatorics::{binomial, match_probability, q_contract, MatchProbability, MAX_WINDOW};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::party::Role;
use crate::qstate::{BasisAxis, Ket1, QubitLabel, StateVector};
use crate::runtime::{Purpose, RngStream};

/// One provisioning record on the network side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub axis: BasisAxis,
    pub bit: u8,
}

/// Position-indexed AUC measurement records (positions are 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AucLedger {
    entries: Vec<LedgerEntry>,
}

impl AucLedger {
    pub fn from_entries(entries: Vec<LedgerEntry>) -> Self {
        AucLedger { entries }
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, position: u64) -> Option<&LedgerEntry> {
        if position == 0 {
            return None;
        }
        self.entries.get(position as usize - 1)
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }
}

/// One stored qubit: an eigenstate of exactly one axis, never measured
/// twice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub axis: BasisAxis,
    pub bit: u8,
    pub consumed: bool,
}

impl Cell {
    /// Materializes the stored eigenstate as a one-qubit state vector.
    pub fn qubit_state(&self) -> StateVector {
        let ket = match (self.axis, self.bit) {
            (BasisAxis::Z, 0) => Ket1::Zero,
            (BasisAxis::Z, _) => Ket1::One,
            (_, 0) => Ket1::Plus,
            (_, _) => Ket1::Minus,
        };
        StateVector::product(&[QubitLabel::Party(Role::Sim1)], &[ket])
            .expect("single-qubit product state")
    }
}

/// The SIM card's quantum memory: N position-indexed cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumMemoryBank {
    cells: Vec<Cell>,
}

impl QuantumMemoryBank {
    pub fn from_cells(cells: Vec<Cell>) -> Self {
        QuantumMemoryBank { cells }
    }

    pub fn capacity(&self) -> u64 {
        self.cells.len() as u64
    }

    pub fn cell(&self, position: u64) -> Option<&Cell> {
        if position == 0 {
            return None;
        }
        self.cells.get(position as usize - 1)
    }

    pub(crate) fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [Cell] {
        &mut self.cells
    }

    pub fn consumed_count(&self) -> u64 {
        self.cells.iter().filter(|c| c.consumed).count() as u64
    }

    pub fn remaining(&self) -> u64 {
        self.capacity() - self.consumed_count()
    }
}

/// How the AUC picks its per-position measurement axes at provisioning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProvisionContract {
    /// Independent uniform X/Z per position (default).
    IidRandom,
    /// Exactly `q` X picks in every consecutive window of `window`
    /// positions, for side-by-side study with a fixed-count SIM. `q` is
    /// clamped to the window length.
    FixedCountPerWindow { window: u32, q: u32 },
}

/// Samples an axis eigenstate measurement of a stored cell: the same axis
/// reads the stored bit with certainty, the conjugate axis is a fair coin.
pub fn measure_cell(cell: &Cell, axis: BasisAxis, rng: &mut RngStream) -> u8 {
    if axis == cell.axis {
        cell.bit
    } else {
        u8::from(rng.random::<f64>() >= 0.5)
    }
}

fn draw_entry(axis_is_x: bool, u: f64) -> LedgerEntry {
    LedgerEntry {
        axis: if axis_is_x { BasisAxis::X } else { BasisAxis::Z },
        bit: u8::from(u >= 0.5),
    }
}

/// Provisions N positions: per position the AUC leg of a fresh Φ+ pair is
/// measured in a random axis and the SIM leg is stored as the steered
/// eigenstate.
pub fn provision(n: u64, master_seed: u64) -> (AucLedger, QuantumMemoryBank) {
    provision_with_contract(n, ProvisionContract::IidRandom, master_seed)
}

pub fn provision_with_contract(
    n: u64,
    contract: ProvisionContract,
    master_seed: u64,
) -> (AucLedger, QuantumMemoryBank) {
    let mut rng = RngStream::derive(master_seed, Role::Auc, Purpose::Provision, 0);
    let mut entries = Vec::with_capacity(n as usize);
    let mut cells = Vec::with_capacity(n as usize);

    match contract {
        ProvisionContract::IidRandom => {
            for _ in 0..n {
                let axis_is_x = rng.random::<bool>();
                let entry = draw_entry(axis_is_x, rng.random::<f64>());
                entries.push(entry);
                cells.push(Cell {
                    axis: entry.axis,
                    bit: entry.bit,
                    consumed: false,
                });
            }
        }
        ProvisionContract::FixedCountPerWindow { window, q } => {
            let window = window.max(1) as usize;
            let mut produced = 0u64;
            while produced < n {
                let span = window.min((n - produced) as usize);
                let mut x_slots = vec![false; span];
                // Uniform q-subset of the window gets X.
                let picks = (q as usize).min(span);
                let mut indices: Vec<usize> = (0..span).collect();
                for i in 0..picks {
                    let j = rng.random_range(i..indices.len());
                    indices.swap(i, j);
                }
                for &i in &indices[..picks] {
                    x_slots[i] = true;
                }
                for &is_x in &x_slots {
                    let entry = draw_entry(is_x, rng.random::<f64>());
                    entries.push(entry);
                    cells.push(Cell {
                        axis: entry.axis,
                        bit: entry.bit,
                        consumed: false,
                    });
                }
                produced += span as u64;
            }
        }
    }

    (AucLedger::from_entries(entries), QuantumMemoryBank::from_cells(cells))
}

/// Serializable snapshot of a provisioned (ledger, bank) pair, so attack
/// studies can fork one provisioning run. The consumed flags travel as a
/// packed bitmap; cell contents are recoverable from the ledger because
/// unconsumed cells are still the steered eigenstates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvisionSnapshot {
    pub n: u64,
    pub seed: u64,
    pub entries: Vec<LedgerEntry>,
    pub consumed_bitmap: Vec<u8>,
    /// Post-measurement contents of consumed cells, in position order.
    pub consumed_cells: Vec<Cell>,
}

impl ProvisionSnapshot {
    pub fn capture(ledger: &AucLedger, bank: &QuantumMemoryBank, seed: u64) -> Self {
        let n = ledger.len();
        let mut consumed_bitmap = vec![0u8; n.div_ceil(8) as usize];
        let mut consumed_cells = Vec::new();
        for (idx, cell) in bank.cells().iter().enumerate() {
            if cell.consumed {
                consumed_bitmap[idx / 8] |= 1 << (idx % 8);
                consumed_cells.push(*cell);
            }
        }
        ProvisionSnapshot {
            n,
            seed,
            entries: ledger.entries().to_vec(),
            consumed_bitmap,
            consumed_cells,
        }
    }

    pub fn restore(&self) -> Result<(AucLedger, QuantumMemoryBank)> {
        if self.entries.len() as u64 != self.n
            || self.consumed_bitmap.len() as u64!= self.n.div_ceil(8)
        {
            return Err(Error::Config("snapshot shape does not match n".into()));
        }
        let mut consumed_iter = self.consumed_cells.iter();
        let mut cells = Vec::with_capacity(self.n as usize);
        for (idx, entry) in self.entries.iter().enumerate() {
            let consumed = self.consumed_bitmap[idx / 8] & (1 << (idx % 8)) != 0;
            if consumed {
                let cell = consumed_iter
                    .next()
                    .ok_or_else(|| Error::Config("snapshot bitmap exceeds consumed cells".into()))?;
                cells.push(*cell);
            } else {
                cells.push(Cell {
                    axis: entry.axis,
                    bit: entry.bit,
                    consumed: false,
                });
            }
        }
        if consumed_iter.next().is_some() {
            return Err(Error::Config("snapshot has surplus consumed cells".into()));
        }
        Ok((
            AucLedger::from_entries(self.entries.clone()),
            QuantumMemoryBank::from_cells(cells),
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshots serialize")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Config(format!("snapshot parse: {e}")))
    }
}

/// Challenge window: positions n+1 ..= n+m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRequest {
    pub n: u64,
    pub m: u32,
}

impl WindowRequest {
    pub fn positions(&self) -> impl Iterator<Item = u64> {
        (self.n + 1)..=(self.n + u64::from(self.m))
    }

    pub fn last(&self) -> u64 {
        self.n + u64::from(self.m)
    }
}

/// How the SIM spreads its measurement directions over a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisContract {
    /// Uniform independent X/Z per position.
    IidRandom,
    /// Exactly `q` X measurements at a uniformly random subset, rest Z.
    FixedCount { q: u32 },
}

impl BasisContract {
    fn pick_axes(&self, m: u32, rng: &mut RngStream) -> Result<Vec<BasisAxis>> {
        match *self {
            BasisContract::IidRandom => Ok((0..m)
                .map(|_| {
                    if rng.random::<bool>() {
                        BasisAxis::X
                    } else {
                        BasisAxis::Z
                    }
                })
                .collect()),
            BasisContract::FixedCount { q } => {
                if q > m {
                    return Err(Error::ContractOutOfRange {
                        q: q as usize,
                        m: m as usize,
                    });
                }
                let mut axes = vec![BasisAxis::Z; m as usize];
                let mut indices: Vec<usize> = (0..m as usize).collect();
                for i in 0..q as usize {
                    let j = rng.random_range(i..indices.len());
                    indices.swap(i, j);
                }
                for &i in &indices[..q as usize] {
                    axes[i] = BasisAxis::X;
                }
                Ok(axes)
            }
        }
    }
}

/// The SIM's answer to a window challenge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisReport {
    pub positions: Vec<u64>,
    pub axes: Vec<BasisAxis>,
    pub bits: Vec<u8>,
}

/// Measures one window of the bank under a basis contract, consuming the
/// cells. Reuse of consumed cells is an error, never silent.
pub fn sim_measure_window(
    bank: &mut QuantumMemoryBank,
    request: &WindowRequest,
    contract: BasisContract,
    rng: &mut RngStream,
) -> Result<BasisReport> {
    if request.m == 0 || request.last() > bank.capacity() {
        return Err(Error::WindowOutOfRange {
            first: request.n + 1,
            last: request.last(),
            capacity: bank.capacity(),
        });
    }
    for position in request.positions() {
        if bank.cell(position).expect("range checked").consumed {
            return Err(Error::CellConsumed { position });
        }
    }
    let axes = contract.pick_axes(request.m, rng)?;
    let mut report = BasisReport {
        positions: request.positions().collect(),
        axes: axes.clone(),
        bits: Vec::with_capacity(request.m as usize),
    };
    for (slot, position) in request.positions().enumerate() {
        let idx = position as usize - 1;
        let cell = bank.cells()[idx];
        let bit = measure_cell(&cell, axes[slot], rng);
        bank.cells_mut()[idx] = Cell {
            axis: axes[slot],
            bit,
            consumed: true,
        };
        report.bits.push(bit);
    }
    Ok(report)
}

/// Count rule applied on top of the bit check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcceptPolicy {
    /// Matched count must equal the contracted q.
    ExactQ { q: u32 },
    /// Matched count must reach q_min. `Threshold { q_min: 0 }` reduces the
    /// decision to the bit check alone.
    Threshold { q_min: u32 },
    /// Matched count must equal the modal value q_contract(m).
    ModalCount,
}

impl AcceptPolicy {
    /// The default rule: at least ⌊m/2⌋ matching bases.
    pub fn default_threshold(m: u32) -> Self {
        AcceptPolicy::Threshold { q_min: m / 2 }
    }

    fn count_ok(&self, matched: usize, m: u32) -> bool {
        match *self {
            AcceptPolicy::ExactQ { q } => matched == q as usize,
            AcceptPolicy::Threshold { q_min } => matched >= q_min as usize,
            AcceptPolicy::ModalCount => matched as u64 == q_contract(u64::from(m)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemVerdict {
    Accept,
    Reject,
    RejectCountMismatch,
}

/// Outcome of sifting one report against the ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemDecision {
    pub verdict: MemVerdict,
    pub matched_positions: Vec<u64>,
    pub mismatched_positions: Vec<u64>,
    /// Fraction of matched positions whose bits disagree.
    pub qber: f64,
    /// Bits at matched positions, the registered key on acceptance.
    pub key_bits: String,
}

/// Noiseless decision: positions with differing bases are dropped; the
/// rest must agree exactly, and the matched count must satisfy the policy.
pub fn sift_and_decide(ledger: &AucLedger, report: &BasisReport, policy: AcceptPolicy) -> Result<MemDecision> {
    sift_and_decide_noisy(ledger, report, policy, 0.0)
}

/// Noisy variant: accepts when qber ≤ `qber_threshold` (0.0 reproduces the
/// noiseless rule). Error correction and privacy amplification beyond this
/// threshold discard are out of scope.
pub fn sift_and_decide_noisy(
    ledger: &AucLedger,
    report: &BasisReport,
    policy: AcceptPolicy,
    qber_threshold: f64,
) -> Result<MemDecision> {
    let m = report.positions.len() as u32;
    let mut matched_positions = Vec::new();
    let mut mismatched_positions = Vec::new();
    let mut key_bits = String::new();
    for (slot, &position) in report.positions.iter().enumerate() {
        let entry = ledger.entry(position).ok_or(Error::WindowOutOfRange {
            first: position,
            last: position,
            capacity: ledger.len(),
        })?;
        if entry.axis != report.axes[slot] {
            continue;
        }
        matched_positions.push(position);
        key_bits.push(if report.bits[slot] == 1 { '1' } else { '0' });
        if entry.bit != report.bits[slot] {
            mismatched_positions.push(position);
        }
    }
    let qber = if matched_positions.is_empty() {
        0.0
    } else {
        mismatched_positions.len() as f64 / matched_positions.len() as f64
    };
    let verdict = if !policy.count_ok(matched_positions.len(), m) {
        MemVerdict::RejectCountMismatch
    } else if qber > qber_threshold {
        MemVerdict::Reject
    } else {
        MemVerdict::Accept
    };
    Ok(MemDecision {
        verdict,
        matched_positions,
        mismatched_positions,
        qber,
        key_bits,
    })
}

/// Consumption rate limit: at most `max_positions` consumed over any
/// stretch of `per_requests` consecutive requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateLimit {
    pub max_positions: u64,
    pub per_requests: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardStatus {
    pub remaining: u64,
    pub rate_exceeded: bool,
}

/// Tracks memory depletion across challenge windows. Cell reuse is already
/// impossible (consumption is enforced by the bank); the guard additionally
/// flags bursts that would drain the memory — the denial-of-service angle
/// on a finite quantum memory.
#[derive(Debug, Clone)]
pub struct DepletionGuard {
    capacity: u64,
    consumed: u64,
    recent: std::collections::VecDeque<u64>,
    limit: Option<RateLimit>,
}

impl DepletionGuard {
    pub fn new(capacity: u64, limit: Option<RateLimit>) -> Self {
        DepletionGuard {
            capacity,
            consumed: 0,
            recent: std::collections::VecDeque::new(),
            limit,
        }
    }

    /// Registers a granted window of `m` positions.
    pub fn register_request(&mut self, m: u64) -> GuardStatus {
        self.consumed = (self.consumed + m).min(self.capacity);
        let mut rate_exceeded = false;
        if let Some(limit) = self.limit {
            self.recent.push_back(m);
            while self.recent.len() > limit.per_requests {
                self.recent.pop_front();
            }
            let windowed: u64 = self.recent.iter().sum();
            rate_exceeded = windowed > limit.max_positions;
        }
        GuardStatus {
            remaining: self.capacity - self.consumed,
            rate_exceeded,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.capacity - self.consumed
    }
}
