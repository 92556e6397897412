//! Cloning attacks on the quantum memory and the bit-flip noise stub.
//!
//! A cloner cannot read the stored states without measuring them in guessed
//! bases. Measure-resend leaves both the copy and the original holding the
//! attacker's observed eigenstates: half the cells get re-prepared in the
//! wrong axis, so a later honest challenge sees each matched bit flip with
//! probability ¼ and accepts with probability (¾)^k over k matched
//! positions.

use rand::Rng;

use crate::proto_qmem::{measure_cell, AucLedger, BasisReport, Cell, QuantumMemoryBank};
use crate::qstate::BasisAxis;
use crate::runtime::RngStream;

/// Attack model for copying a provisioned memory bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CloneModel {
    /// Measure every cell in a uniformly random axis and write the observed
    /// eigenstate into both the clone and the original.
    MeasureResend,
    /// Populate the clone with uniform random eigenstates; the original is
    /// untouched. The zero-information baseline.
    RandomFresh,
}

/// Clones the unconsumed cells of a bank. Returns `(clone, original)`,
/// where `original` reflects whatever disturbance the model causes.
pub fn clone_attack(
    bank: &QuantumMemoryBank,
    model: CloneModel,
    rng: &mut RngStream,
) -> (QuantumMemoryBank, QuantumMemoryBank) {
    let mut clone_cells = Vec::with_capacity(bank.cells().len());
    let mut original_cells = Vec::with_capacity(bank.cells().len());
    for cell in bank.cells() {
        if cell.consumed {
            clone_cells.push(*cell);
            original_cells.push(*cell);
            continue;
        }
        match model {
            CloneModel::MeasureResend => {
                let axis = if rng.random::<bool>() {
                    BasisAxis::X
                } else {
                    BasisAxis::Z
                };
                let bit = measure_cell(cell, axis, rng);
                let observed = Cell { axis, bit, consumed: false };
                clone_cells.push(observed);
                original_cells.push(observed);
            }
            CloneModel::RandomFresh => {
                let axis = if rng.random::<bool>() {
                    BasisAxis::X
                } else {
                    BasisAxis::Z
                };
                let bit = u8::from(rng.random::<bool>());
                clone_cells.push(Cell { axis, bit, consumed: false });
                original_cells.push(*cell);
            }
        }
    }
    (
        QuantumMemoryBank::from_cells(clone_cells),
        QuantumMemoryBank::from_cells(original_cells),
    )
}

/// Degenerate upper bound: an attacker who somehow knows every provisioning
/// axis measures along it, copying perfectly and disturbing nothing.
pub fn measure_resend_with_known_axes(
    bank: &QuantumMemoryBank,
    ledger: &AucLedger,
) -> (QuantumMemoryBank, QuantumMemoryBank) {
    let cells: Vec<Cell> = bank
        .cells()
        .iter()
        .enumerate()
        .map(|(idx, cell)| {
            if cell.consumed {
                *cell
            } else {
                let entry = ledger.entry(idx as u64 + 1).expect("ledger covers bank");
                Cell {
                    axis: entry.axis,
                    bit: cell.bit,
                    consumed: false,
                }
            }
        })
        .collect();
    (
        QuantumMemoryBank::from_cells(cells.clone()),
        QuantumMemoryBank::from_cells(cells),
    )
}

/// Channel-noise stub: flips each reported bit independently with
/// probability `p_flip`.
pub fn apply_bit_noise(report: &BasisReport, p_flip: f64, rng: &mut RngStream) -> BasisReport {
    let mut noisy = report.clone();
    if p_flip > 0.0 {
        for bit in &mut noisy.bits {
            if rng.random::<f64>() < p_flip {
                *bit ^= 1;
            }
        }
    }
    noisy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::party::Role;
    use crate::proto_qmem::{
        provision, sift_and_decide, sim_measure_window, AcceptPolicy, BasisContract, MemVerdict,
        WindowRequest,
    };
    use crate::runtime::Purpose;

    fn rng(seed: u64, counter: u64) -> RngStream {
        RngStream::derive(seed, Role::Eve, Purpose::Attack, counter)
    }

    #[test]
    fn measure_resend_disturbs_a_quarter_of_matched_bits() {
        let (ledger, bank) = provision(40_000, 11);
        let (_, disturbed) = clone_attack(&bank, CloneModel::MeasureResend, &mut rng(11, 0));
        let mut original = disturbed;
        let mut r = RngStream::derive(11, Role::Sim1, Purpose::Contract, 0);
        let mut matched = 0u64;
        let mut errors = 0u64;
        for w in 0..2_000u64 {
            let request = WindowRequest { n: w * 20, m: 10 };
            let report =
                sim_measure_window(&mut original, &request, BasisContract::IidRandom, &mut r)
                    .unwrap();
            let decision =
                sift_and_decide(&ledger, &report, AcceptPolicy::Threshold { q_min: 0 }).unwrap();
            matched += decision.matched_positions.len() as u64;
            errors += decision.mismatched_positions.len() as u64;
        }
        let rate = errors as f64 / matched as f64;
        let sigma = (0.25 * 0.75 / matched as f64).sqrt();
        assert!((rate - 0.25).abs() < 4.0 * sigma, "error rate {rate} over {matched}");
    }

    #[test]
    fn random_fresh_clone_agrees_at_chance_and_leaves_the_original_alone() {
        let (ledger, bank) = provision(40_000, 12);
        let (clone, original) = clone_attack(&bank, CloneModel::RandomFresh, &mut rng(12, 0));
        assert_eq!(&original, &bank);

        let mut clone = clone;
        let mut r = RngStream::derive(12, Role::Sim1, Purpose::Contract, 0);
        let mut matched = 0u64;
        let mut errors = 0u64;
        for w in 0..2_000u64 {
            let request = WindowRequest { n: w * 20, m: 10 };
            let report =
                sim_measure_window(&mut clone, &request, BasisContract::IidRandom, &mut r).unwrap();
            let decision =
                sift_and_decide(&ledger, &report, AcceptPolicy::Threshold { q_min: 0 }).unwrap();
            matched += decision.matched_positions.len() as u64;
            errors += decision.mismatched_positions.len() as u64;
        }
        let rate = errors as f64 / matched as f64;
        let sigma = (0.25 / matched as f64).sqrt();
        assert!((rate - 0.5).abs() < 4.0 * sigma, "error rate {rate} over {matched}");
    }

    #[test]
    fn axis_oracle_makes_the_attack_perfect() {
        let (ledger, bank) = provision(1_000, 13);
        let (clone, original) = measure_resend_with_known_axes(&bank, &ledger);
        assert_eq!(&original, &bank);
        let mut clone = clone;
        let report = sim_measure_window(
            &mut clone,
            &WindowRequest { n: 0, m: 10 },
            BasisContract::IidRandom,
            &mut rng(13, 0),
        )
        .unwrap();
        let decision =
            sift_and_decide(&ledger, &report, AcceptPolicy::Threshold { q_min: 0 }).unwrap();
        assert_eq!(decision.verdict, MemVerdict::Accept);
        assert_eq!(decision.qber, 0.0);
    }

    #[test]
    fn consumed_cells_are_left_untouched_by_attacks() {
        let (_, mut bank) = provision(50, 14);
        sim_measure_window(
            &mut bank,
            &WindowRequest { n: 0, m: 10 },
            BasisContract::IidRandom,
            &mut rng(14, 0),
        )
        .unwrap();
        let before: Vec<_> = (1..=10).map(|p| *bank.cell(p).unwrap()).collect();
        let (clone, original) = clone_attack(&bank, CloneModel::MeasureResend, &mut rng(14, 1));
        for p in 1..=10u64 {
            assert_eq!(*clone.cell(p).unwrap(), before[p as usize - 1]);
            assert_eq!(*original.cell(p).unwrap(), before[p as usize - 1]);
            assert!(clone.cell(p).unwrap().consumed);
        }
    }
}
