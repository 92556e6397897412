//! Acceptance suite: one test per protocol-level claim, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them).

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use qgsm::auth_gsm::{a3_default, classical_authenticate, SecretKey};
use qgsm::fixtures;
use qgsm::party::Role;
use qgsm::proto_qmem::{
    binomial, clone_attack, match_probability, provision, sift_and_decide, sim_measure_window,
    AcceptPolicy, BasisContract, CloneModel, MemVerdict, WindowRequest,
};
use qgsm::proto_tri::{
    agreement_rate, eve_cnot_session, run_scenario, BasisPolicy, EveCnotConfig, RoundClass,
    ScenarioConfig, ScenarioKind, TriConfig,
};
use qgsm::qstate::{BasisAxis, QubitLabel, StateVector};
use qgsm::runtime::{Channel, Purpose, RngStream, Session, Verdict};
use qgsm::stats::{chi_square_gof, two_proportion_z};

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion}: {detail}");
}

#[test]
fn c01_ghz_all_z_correlations() {
    let start = Instant::now();
    let config = TriConfig {
        emissions: 100_000,
        basis_policy: BasisPolicy::AllZ,
        record_transcript: false,
        ..TriConfig::default()
    };
    let out = qgsm::proto_tri::run_session(&config, 101).unwrap();
    let mut agreeing = 0u64;
    for r in &out.rounds {
        let s2 = r.sim2.unwrap();
        if r.sim1.bit == r.auc.bit && s2.bit == r.auc.bit {
            agreeing += 1;
        }
    }
    let elapsed = start.elapsed();
    let passed = agreeing == 100_000 && elapsed.as_secs_f64() < 5.0;
    report(
        "1 (GHZ Z-correlations)",
        passed,
        &format!("{agreeing}/100000 rounds agree, {:.2}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn c02_x_parity_and_null_soundness() {
    use qgsm::qstate::StateKind;
    for source in [StateKind::Ghz3, StateKind::WFlipped] {
        let config = TriConfig {
            source,
            emissions: 100_000,
            basis_policy: BasisPolicy::AllX,
            record_transcript: false,
            ..TriConfig::default()
        };
        let out = qgsm::proto_tri::run_session(&config, 202).unwrap();
        let mut odd_parity = 0u64;
        let mut null_disagreements = 0u64;
        for r in &out.rounds {
            let s2 = r.sim2.unwrap();
            if (r.sim1.bit + s2.bit + r.auc.bit) % 2 != 0 {
                odd_parity += 1;
            }
            if !(r.class == RoundClass::NullGray && r.adjusted_bit == Some(r.auc.bit)) {
                null_disagreements += 1;
            }
        }
        // After the Null adjustment every party holds the AUC's bit, so the
        // per-channel keys must coincide with the AUC records exactly.
        let keys_agree = out.sim1_key.bit_string() == out.auc_keys.a.bit_string()
            && out.sim2_key.as_ref().unwrap().bit_string() == out.auc_keys.b.bit_string();
        let passed = odd_parity == 0 && null_disagreements == 0 && keys_agree;
        report(
            &format!("2 (X parity + Null, {})", source.name()),
            passed,
            &format!("odd-parity rounds {odd_parity}, unadjusted rounds {null_disagreements}"),
        );
    }
}

#[test]
fn c03_equation_replays() {
    let mut results = Vec::new();
    results.extend(fixtures::replay_auc_x_plus_then_z());
    results.extend(fixtures::replay_blue_round_sequence());
    results.extend(fixtures::replay_ghz_null_sequence());
    results.extend(fixtures::replay_w_null_sequence());
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{}: {}", r.name, r.detail))
        .collect();
    report(
        "3 (equation replays)",
        failed.is_empty(),
        &format!("{} replays at 1e-10", results.len()),
    );
}

#[test]
fn c04_clone_detection_rates() {
    let start = Instant::now();

    let mut dual = ScenarioConfig::new(ScenarioKind::Simultaneous, 10_000, 404);
    dual.session.emissions = 40;
    let dual_report = run_scenario(&dual).unwrap();

    let mut solo = ScenarioConfig::new(ScenarioKind::SoloLogin, 2_000, 405);
    solo.session.emissions = 120;
    let solo_report = run_scenario(&solo).unwrap();

    let mut forward = ScenarioConfig::new(ScenarioKind::KeyForwarding, 10_000, 406);
    forward.session.emissions = 40;
    let forward_report = run_scenario(&forward).unwrap();

    let elapsed = start.elapsed();
    let passed = dual_report.detection_rate >= 0.99
        && solo_report.accept_rate == 1.0
        && forward_report.detection_rate == 0.0
        && elapsed.as_secs_f64() < 60.0;
    report(
        "4 (clone detection)",
        passed,
        &format!(
            "dual {:.4}, solo accept {:.4}, key-forwarding {:.4}, {:.1}s",
            dual_report.detection_rate,
            solo_report.accept_rate,
            forward_report.detection_rate,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c05_match_probability_and_histogram() {
    let p = match_probability(10, 5).unwrap();
    let exact_ok = (p.numerator, p.denominator) == (252, 1024);

    let mut sums_ok = true;
    for m in 1..=64u64 {
        let total: u128 = (0..=m).map(|q| binomial(m, q).unwrap()).sum();
        sums_ok &= total == 1u128 << m;
    }

    // 10⁵ iid windows of m = 10 against the exact match-count law.
    let trials = 100_000u64;
    let m = 10u32;
    let (ledger, mut bank) = provision(u64::from(m) * trials, 505);
    let x_entries = ledger
        .entries()
        .iter()
        .filter(|e| e.axis == BasisAxis::X)
        .count() as f64;
    let n_total = (u64::from(m) * trials) as f64;
    let provision_balanced = (x_entries - n_total / 2.0).abs() < 4.0 * 0.5 * n_total.sqrt();
    let mut rng = RngStream::derive(505, Role::Sim1, Purpose::Contract, 0);
    let mut histogram = vec![0u64; m as usize + 1];
    for w in 0..trials {
        let request = WindowRequest { n: w * u64::from(m), m };
        let report_data =
            sim_measure_window(&mut bank, &request, BasisContract::IidRandom, &mut rng).unwrap();
        let decision =
            sift_and_decide(&ledger, &report_data, AcceptPolicy::Threshold { q_min: 0 }).unwrap();
        histogram[decision.matched_positions.len()] += 1;
    }
    let expected: Vec<f64> = (0..=u64::from(m))
        .map(|q| match_probability(u64::from(m), q).unwrap().as_f64())
        .collect();
    let (stat, p_value) = chi_square_gof(&histogram, &expected);

    // The modal cell alone: empirical q=5 frequency against 252/1024.
    let p5 = 252.0 / 1024.0;
    let emp5 = histogram[5] as f64 / trials as f64;
    let modal_ok = (emp5 - p5).abs() < 3.0 * (p5 * (1.0 - p5) / trials as f64).sqrt();

    let passed = exact_ok && sums_ok && p_value > 0.001 && modal_ok && provision_balanced;
    report(
        "5 (match-count law)",
        passed,
        &format!(
            "252/1024 exact: {exact_ok}, sums exact to m=64: {sums_ok}, chi2 {stat:.2} p {p_value:.4}, q=5 cell {emp5:.4}"
        ),
    );
}

#[test]
fn c06_memory_challenge_fixture() {
    let results = fixtures::replay_memory_challenge();
    let passed = results.iter().all(|r| r.passed);
    report(
        "6 (challenge fixture key 1011)",
        passed,
        &results
            .iter()
            .map(|r| r.detail.clone())
            .collect::<Vec<_>>()
            .join("; "),
    );
}

#[test]
fn c07_measure_resend_attack_law() {
    let trials = 100_000u64;
    let m = 10u32;
    let n = u64::from(m) * trials;

    // Honest completeness first: bit check alone accepts every honest run.
    let (ledger, mut honest_bank) = provision(n, 707);
    let mut rng = RngStream::derive(707, Role::Sim1, Purpose::Contract, 0);
    let mut honest_accepts = 0u64;
    for w in 0..trials {
        let request = WindowRequest { n: w * u64::from(m), m };
        let report_data =
            sim_measure_window(&mut honest_bank, &request, BasisContract::IidRandom, &mut rng)
                .unwrap();
        let decision =
            sift_and_decide(&ledger, &report_data, AcceptPolicy::Threshold { q_min: 0 }).unwrap();
        honest_accepts += u64::from(decision.verdict == MemVerdict::Accept);
    }

    // Measure-resend over a fresh bank, then honest checks on the disturbed
    // original, grouped by matched count k.
    let (ledger, bank) = provision(n, 708);
    let mut attack_rng = RngStream::derive(708, Role::Eve, Purpose::Attack, 0);
    let (_, mut disturbed) = clone_attack(&bank, CloneModel::MeasureResend, &mut attack_rng);
    let mut rng = RngStream::derive(708, Role::Sim1, Purpose::Contract, 0);
    let mut per_k: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for w in 0..trials {
        let request = WindowRequest { n: w * u64::from(m), m };
        let report_data =
            sim_measure_window(&mut disturbed, &request, BasisContract::IidRandom, &mut rng)
                .unwrap();
        let decision =
            sift_and_decide(&ledger, &report_data, AcceptPolicy::Threshold { q_min: 0 }).unwrap();
        let k = decision.matched_positions.len();
        let cell = per_k.entry(k).or_insert((0, 0));
        cell.1 += 1;
        cell.0 += u64::from(decision.verdict == MemVerdict::Accept);
    }

    let mut all_within = true;
    let mut detail = String::new();
    for (k, (accepts, count)) in &per_k {
        if *count < 30 {
            continue;
        }
        let p = 0.75f64.powi(*k as i32);
        let emp = *accepts as f64 / *count as f64;
        let sigma = (p * (1.0 - p) / *count as f64).sqrt();
        let within = if sigma == 0.0 {
            emp == p
        } else {
            (emp - p).abs() <= 3.0 * sigma
        };
        all_within &= within;
        if !within {
            detail.push_str(&format!("k={k}: emp {emp:.4} vs {p:.4} (3σ {:.4}); ", 3.0 * sigma));
        }
    }

    let passed = honest_accepts == trials && all_within;
    report(
        "7 (measure-resend (3/4)^k law)",
        passed,
        &format!("honest accepts {honest_accepts}/{trials}; per-k within 3σ: {all_within} {detail}"),
    );
}

#[test]
fn c08_cnot_attack_changes_nothing() {
    let mut config = EveCnotConfig::new(Channel::A, 3_000, 808);
    config.session.emissions = 40;
    let eve = eve_cnot_session(&config).unwrap();

    let z = two_proportion_z(
        eve.detection_with_eve.0,
        eve.detection_with_eve.1,
        eve.detection_without_eve.0,
        eve.detection_without_eve.1,
    );
    let ident = agreement_rate(eve.untapped_ident_agreement);
    let n_ident = eve.untapped_ident_agreement.1 as f64;
    let four_sigma = 4.0 * 0.5 / n_ident.sqrt();

    let passed = z.abs() <= 3.0
        && (ident - 0.5).abs() <= four_sigma
        && agreement_rate(eve.detection_with_eve) >= 0.99
        && eve.tapped_z_agreement.0 == eve.tapped_z_agreement.1;
    report(
        "8 (CNOT attack)",
        passed,
        &format!(
            "detection z {z:.2}, eve-vs-untapped {ident:.4} (±{four_sigma:.4} over {} bits), tapped-Z copies {}/{}",
            eve.untapped_ident_agreement.1, eve.tapped_z_agreement.0, eve.tapped_z_agreement.1
        ),
    );
}

#[test]
fn c09_order_invariance_and_no_signaling() {
    let mut rng = ChaCha12Rng::seed_from_u64(909);
    let axes = [BasisAxis::X, BasisAxis::Y, BasisAxis::Z];
    let mut worst_perm = 0.0f64;
    let mut worst_marginal = 0.0f64;

    for case in 0..1_000 {
        let n = rng.random_range(1..=5usize);
        let labels: Vec<QubitLabel> = (0..n).map(|i| QubitLabel::Ancilla(i as u8)).collect();
        let amps: Vec<num_complex::Complex64> = (0..1usize << n)
            .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let Ok(state) = StateVector::from_amplitudes(labels, amps) else {
            continue;
        };

        let k = rng.random_range(1..=n);
        let mut qubits: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.random_range(i..n);
            qubits.swap(i, j);
        }
        let assignment: Vec<(usize, BasisAxis)> = qubits[..k]
            .iter()
            .map(|&q| (q, axes[rng.random_range(0..3)]))
            .collect();

        let base = state.outcome_distribution(&assignment).unwrap();

        // Permutation invariance: evaluate under a shuffled assignment list
        // and map outcomes back.
        let mut perm: Vec<usize> = (0..k).collect();
        for i in 0..k {
            let j = rng.random_range(i..k);
            perm.swap(i, j);
        }
        let shuffled: Vec<(usize, BasisAxis)> = perm.iter().map(|&i| assignment[i]).collect();
        let shuffled_dist = state.outcome_distribution(&shuffled).unwrap();
        for outcome in 0..base.num_outcomes() {
            let bits: Vec<u8> = (0..k).map(|j| ((outcome >> (k - 1 - j)) & 1) as u8).collect();
            let permuted_bits: Vec<u8> = perm.iter().map(|&i| bits[i]).collect();
            let diff = (base.prob_of_bits(&bits) - shuffled_dist.prob_of_bits(&permuted_bits)).abs();
            worst_perm = worst_perm.max(diff);
        }

        // No-signaling: each measured qubit's marginal equals its
        // stand-alone distribution regardless of what others measure.
        for (slot, &(qubit, axis)) in assignment.iter().enumerate() {
            let marginal = base.marginal(slot);
            let alone = state.outcome_distribution(&[(qubit, axis)]).unwrap();
            worst_marginal = worst_marginal
                .max((marginal.0 - alone.prob_of_bits(&[0])).abs())
                .max((marginal.1 - alone.prob_of_bits(&[1])).abs());
        }
        let _ = case;
    }

    let passed = worst_perm < 1e-12 && worst_marginal < 1e-12;
    report(
        "9 (order invariance + no-signaling)",
        passed,
        &format!("worst permutation diff {worst_perm:.2e}, worst marginal diff {worst_marginal:.2e}"),
    );
}

#[test]
fn c10_classical_baseline_accepts_clones() {
    let mut rng = ChaCha12Rng::seed_from_u64(1010);
    let mut accepts = 0u64;
    let trials = 1_000u64;
    for i in 0..trials {
        let ki = SecretKey(u128::from(rng.next_u64()) << 64 | u128::from(rng.next_u64()));
        // The clone carries a byte-exact copy of Ki; sessions differ only in
        // their RAND draws.
        let mut session = Session::open(&[Role::Sim2, Role::Auc], 2_000 + i).unwrap();
        let out = classical_authenticate(&mut session, "262017773310001", ki, ki, a3_default).unwrap();
        accepts += u64::from(out.verdict == Verdict::Accept);
    }
    report(
        "10 (classical clone acceptance)",
        accepts == trials,
        &format!("{accepts}/{trials} clone logins accepted"),
    );
}
