//! Pinned worked examples: the fixed measurement-sequence replays on the
//! GHZ and flipped-W sources, the 20-round classification table and the
//! 10-position quantum-memory challenge that registers the key 1011.
//!
//! These run both in the test suites and behind the CLI's `fixtures`
//! subcommand. Expected states are stated up to normalization and global
//! phase at 1e−10.

use crate::party::Role;
use crate::proto_qmem::{
    sift_and_decide, AcceptPolicy, AucLedger, BasisReport, LedgerEntry, MemVerdict,
};
use crate::proto_tri::{classify_round, RoundClass};
use crate::qstate::{BasisAxis, Ket1, OutcomeSign, QubitLabel, StateKind, StateVector};

pub const STATE_EQUIV_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FixtureResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn tri_labels() -> [QubitLabel; 3] {
    [
        QubitLabel::Party(Role::Sim1),
        QubitLabel::Party(Role::Sim2),
        QubitLabel::Party(Role::Auc),
    ]
}

fn ghz() -> StateVector {
    StateVector::named(StateKind::Ghz3, &tri_labels()).expect("ghz construction")
}

fn w_flipped() -> StateVector {
    StateVector::named(StateKind::WFlipped, &tri_labels()).expect("w construction")
}

fn product(kets: [Ket1; 3]) -> StateVector {
    StateVector::product(&tri_labels(), &kets).expect("product state")
}

fn check_state(name: &'static str, got: &StateVector, expected: &StateVector) -> FixtureResult {
    let passed = got.approx_equiv(expected, STATE_EQUIV_TOL);
    FixtureResult {
        name,
        passed,
        detail: if passed {
            "post-state matches".into()
        } else {
            format!("post-state mismatch: {:?}", got.amplitudes())
        },
    }
}

/// Replay on GHZ: AUC projects X+, then SIM1 Z+, then SIM2 Z+. The first
/// projection leaves (|00⟩ + |11⟩) ⊗ |+⟩; the Z projections collapse the
/// SIM pair to |00⟩ while the AUC leg stays |+⟩.
pub fn replay_auc_x_plus_then_z() -> Vec<FixtureResult> {
    let mut results = Vec::new();
    let qubit = |role: Role| tri_labels().iter().position(|l| *l == QubitLabel::Party(role)).unwrap();

    let step1 = ghz().measure_forced(qubit(Role::Auc), BasisAxis::X, OutcomeSign::Plus);
    let step1 = match step1 {
        Ok(s) => s,
        Err(e) => {
            return vec![FixtureResult {
                name: "ghz-x-plus-step1",
                passed: false,
                detail: e.to_string(),
            }]
        }
    };
    // (|00⟩+|11⟩)⊗|+⟩ over (SIM1, SIM2, AUC).
    let expected1 = {
        let bell_pair_plus = [
            (0b000, 0.5),
            (0b001, 0.5),
            (0b110, 0.5),
            (0b111, 0.5),
        ];
        let mut amps = vec![num_complex::Complex64::ZERO; 8];
        for (idx, v) in bell_pair_plus {
            amps[idx] = num_complex::Complex64::new(v, 0.0);
        }
        StateVector::from_amplitudes(tri_labels().to_vec(), amps).unwrap()
    };
    results.push(check_state("ghz-x-plus-step1", &step1, &expected1));

    let step2 = step1
        .measure_forced(qubit(Role::Sim1), BasisAxis::Z, OutcomeSign::Plus)
        .expect("possible projection");
    let expected23 = product([Ket1::Zero, Ket1::Zero, Ket1::Plus]);
    results.push(check_state("ghz-x-plus-step2", &step2, &expected23));

    let step3 = step2
        .measure_forced(qubit(Role::Sim2), BasisAxis::Z, OutcomeSign::Plus)
        .expect("possible projection");
    results.push(check_state("ghz-x-plus-step3", &step3, &expected23));
    results
}

/// Blue-round replay on GHZ: the sequence AUC Z+, SIM2 Z+, SIM1 X+ ends in
/// |+⟩₁ ⊗ |0⟩₂ ⊗ |0⟩₃.
pub fn replay_blue_round_sequence() -> Vec<FixtureResult> {
    let state = ghz()
        .measure_forced(2, BasisAxis::Z, OutcomeSign::Plus)
        .and_then(|s| s.measure_forced(1, BasisAxis::Z, OutcomeSign::Plus))
        .and_then(|s| s.measure_forced(0, BasisAxis::X, OutcomeSign::Plus));
    match state {
        Ok(s) => vec![check_state(
            "ghz-blue-sequence",
            &s,
            &product([Ket1::Plus, Ket1::Zero, Ket1::Zero]),
        )],
        Err(e) => vec![FixtureResult {
            name: "ghz-blue-sequence",
            passed: false,
            detail: e.to_string(),
        }],
    }
}

/// All-X replay on GHZ: AUC X−, SIM1 X−, then SIM2 is forced to X+ with
/// certainty; the final state is |−⟩₁ ⊗ |+⟩₂ ⊗ |−⟩₃.
pub fn replay_ghz_null_sequence() -> Vec<FixtureResult> {
    replay_null(ghz(), "ghz-null-sequence")
}

/// The same all-X replay on the flipped-W source ends in the same product
/// state.
pub fn replay_w_null_sequence() -> Vec<FixtureResult> {
    replay_null(w_flipped(), "w-null-sequence")
}

fn replay_null(source: StateVector, name: &'static str) -> Vec<FixtureResult> {
    let expected = product([Ket1::Minus, Ket1::Plus, Ket1::Minus]);
    let state = source
        .measure_forced(2, BasisAxis::X, OutcomeSign::Minus)
        .and_then(|s| s.measure_forced(0, BasisAxis::X, OutcomeSign::Minus));
    let state = match state {
        Ok(s) => s,
        Err(e) => {
            return vec![FixtureResult {
                name,
                passed: false,
                detail: e.to_string(),
            }]
        }
    };
    let mut results = Vec::new();
    // The third measurement is forced: X+ on SIM2 has probability 1.
    let p_plus = state
        .outcome_probability(1, BasisAxis::X, OutcomeSign::Plus)
        .unwrap_or(0.0);
    results.push(FixtureResult {
        name,
        passed: (p_plus - 1.0).abs() < STATE_EQUIV_TOL,
        detail: format!("SIM2 X+ probability {p_plus:.12}"),
    });
    match state.measure_forced(1, BasisAxis::X, OutcomeSign::Plus) {
        Ok(s) => results.push(check_state(name, &s, &expected)),
        Err(e) => results.push(FixtureResult {
            name,
            passed: false,
            detail: e.to_string(),
        }),
    }
    results
}

/// One row of the 20-round key-distribution table: announced bases and
/// registered bits in the printed column order (SIM1, AUC, SIM2).
#[derive(Debug, Clone, Copy)]
pub struct KeyTableRow {
    pub emission: u32,
    pub sim1_axis: BasisAxis,
    pub sim1_bit: u8,
    pub auc_axis: BasisAxis,
    pub auc_bit: u8,
    pub sim2_axis: BasisAxis,
    pub sim2_bit: u8,
}

/// The 20 emissions of the key-distribution table, bottom row (emission 1)
/// first. Basis columns are transcribed as printed; a handful of printed
/// outcome bits are physically inconsistent with the bases, so only the
/// classification is validated against this data.
pub fn key_table_rows() -> Vec<KeyTableRow> {
    use BasisAxis::{X, Z};
    type Reading = (BasisAxis, u8);
    let rows: [(u32, Reading, Reading, Reading); 20] = [
        (1, (X, 1), (X, 1), (X, 0)),
        (2, (Z, 1), (X, 0), (Z, 0)),
        (3, (X, 0), (X, 0), (Z, 0)),
        (4, (Z, 0), (X, 0), (X, 0)),
        (5, (Z, 0), (Z, 0), (Z, 0)),
        (6, (X, 1), (X, 0), (X, 1)),
        (7, (Z, 1), (Z, 1), (Z, 1)),
        (8, (Z, 0), (Z, 0), (X, 1)),
        (9, (Z, 1), (X, 1), (X, 1)),
        (10, (X, 1), (Z, 0), (X, 1)),
        (11, (Z, 1), (X, 0), (X, 0)),
        (12, (X, 0), (Z, 1), (Z, 1)),
        (13, (Z, 0), (X, 0), (Z, 0)),
        (14, (X, 0), (Z, 0), (X, 0)),
        (15, (X, 1), (Z, 1), (X, 1)),
        (16, (Z, 1), (X, 0), (Z, 1)),
        (17, (X, 0), (X, 1), (X, 1)),
        (18, (X, 0), (Z, 1), (X, 1)),
        (19, (Z, 0), (X, 1), (Z, 0)),
        (20, (X, 1), (X, 1), (Z, 0)),
    ];
    rows.iter()
        .map(|&(emission, s1, auc, s2)| KeyTableRow {
            emission,
            sim1_axis: s1.0,
            sim1_bit: s1.1,
            auc_axis: auc.0,
            auc_bit: auc.1,
            sim2_axis: s2.0,
            sim2_bit: s2.1,
        })
        .collect()
}

/// Expected per-emission classes for [`key_table_rows`], derived from the
/// basis columns under the sifting rule.
pub fn key_table_expected_classes() -> Vec<(u32, RoundClass)> {
    use RoundClass::*;
    vec![
        (1, NullGray),
        (2, DiscardRed),
        (3, DiscardRed),
        (4, DiscardRed),
        (5, BothGreen),
        (6, NullGray),
        (7, BothGreen),
        (8, ChanABlue),
        (9, DiscardRed),
        (10, DiscardRed),
        (11, DiscardRed),
        (12, ChanBYellow),
        (13, DiscardRed),
        (14, DiscardRed),
        (15, DiscardRed),
        (16, DiscardRed),
        (17, NullGray),
        (18, DiscardRed),
        (19, DiscardRed),
        (20, DiscardRed),
    ]
}

/// Checks the sifting rule against every row of the key-distribution table.
pub fn replay_key_table_classification() -> Vec<FixtureResult> {
    let rows = key_table_rows();
    let expected = key_table_expected_classes();
    let mut mismatches = Vec::new();
    for (row, (emission, class)) in rows.iter().zip(expected.iter()) {
        assert_eq!(row.emission, *emission);
        match classify_round(row.sim1_axis, row.sim2_axis, row.auc_axis) {
            Ok(got) if got == *class => {}
            Ok(got) => mismatches.push(format!("emission {}: {:?} != {:?}", emission, got, class)),
            Err(e) => mismatches.push(format!("emission {emission}: {e}")),
        }
    }
    let counts = |class: RoundClass| {
        expected.iter().filter(|(_, c)| *c == class).count()
    };
    let tally_ok = counts(RoundClass::ChanABlue) == 1
        && counts(RoundClass::ChanBYellow) == 1
        && counts(RoundClass::BothGreen) == 2
        && counts(RoundClass::NullGray) == 3
        && counts(RoundClass::DiscardRed) == 13;
    vec![FixtureResult {
        name: "key-table-classification",
        passed: mismatches.is_empty() && tally_ok,
        detail: if mismatches.is_empty() {
            "20 rows classified; tally 1 blue / 1 yellow / 2 green / 3 gray / 13 red".into()
        } else {
            mismatches.join("; ")
        },
    }]
}

/// The 10-position memory-challenge fixture. The AUC row's bases at
/// positions 9 and 10 are forced to X by the printed |−⟩ and |+⟩ results,
/// and the position-1 bit follows the classical-bit row (the printed result
/// contradicts it). Matched positions are 1, 3, 6 and 7.
pub fn memory_challenge_fixture() -> (AucLedger, BasisReport) {
    use BasisAxis::{X, Z};
    let auc: [(BasisAxis, u8); 10] = [
        (Z, 1),
        (X, 1),
        (Z, 0),
        (Z, 1),
        (X, 1),
        (Z, 1),
        (X, 1),
        (Z, 0),
        (X, 1),
        (X, 0),
    ];
    let sim: [(BasisAxis, u8); 10] = [
        (Z, 1),
        (Z, 1),
        (Z, 0),
        (X, 1),
        (Z, 0),
        (Z, 1),
        (X, 1),
        (X, 1),
        (Z, 1),
        (Z, 0),
    ];
    let ledger = AucLedger::from_entries(
        auc.iter()
            .map(|&(axis, bit)| LedgerEntry { axis, bit })
            .collect(),
    );
    let report = BasisReport {
        positions: (1..=10).collect(),
        axes: sim.iter().map(|&(a, _)| a).collect(),
        bits: sim.iter().map(|&(_, b)| b).collect(),
    };
    (ledger, report)
}

/// Sifts the memory-challenge fixture: the key 1011 is registered and the
/// login accepted at threshold 4.
pub fn replay_memory_challenge() -> Vec<FixtureResult> {
    let (ledger, report) = memory_challenge_fixture();
    match sift_and_decide(&ledger, &report, AcceptPolicy::Threshold { q_min: 4 }) {
        Ok(decision) => {
            let passed = decision.key_bits == "1011"
                && decision.verdict == MemVerdict::Accept
                && decision.matched_positions == vec![1, 3, 6, 7];
            vec![FixtureResult {
                name: "memory-challenge-key",
                passed,
                detail: format!(
                    "key {:?}, verdict {:?}, matched {:?}",
                    decision.key_bits, decision.verdict, decision.matched_positions
                ),
            }]
        }
        Err(e) => vec![FixtureResult {
            name: "memory-challenge-key",
            passed: false,
            detail: e.to_string(),
        }],
    }
}

/// Runs every fixture.
pub fn run_all() -> Vec<FixtureResult> {
    let mut results = Vec::new();
    results.extend(replay_auc_x_plus_then_z());
    results.extend(replay_blue_round_sequence());
    results.extend(replay_ghz_null_sequence());
    results.extend(replay_w_null_sequence());
    results.extend(replay_key_table_classification());
    results.extend(replay_memory_challenge());
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_passes() {
        for r in run_all() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn key_table_has_twenty_rows_in_emission_order() {
        let rows = key_table_rows();
        assert_eq!(rows.len(), 20);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.emission, i as u32 + 1);
        }
    }

    #[test]
    fn memory_fixture_under_the_other_policies() {
        let (ledger, report) = memory_challenge_fixture();
        // Four matched positions miss the modal count of five.
        let modal = sift_and_decide(&ledger, &report, AcceptPolicy::ModalCount).unwrap();
        assert_eq!(modal.verdict, MemVerdict::RejectCountMismatch);
        let exact = sift_and_decide(&ledger, &report, AcceptPolicy::ExactQ { q: 4 }).unwrap();
        assert_eq!(exact.verdict, MemVerdict::Accept);
    }
}
