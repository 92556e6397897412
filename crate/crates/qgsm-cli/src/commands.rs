//! Subcommand implementations: run, write artifacts, print a summary.

use std::path::{Path, PathBuf};

use qgsm::fixtures;
use qgsm::proto_qmem::{
    clone_attack, match_probability, provision, sift_and_decide_noisy, sim_measure_window,
    AcceptPolicy, CloneModel, MemVerdict, WindowRequest,
};
use qgsm::proto_tri::{
    eve_cnot_session, run_e91_reference, run_scenario, EveCnotConfig, E91Config, ScenarioConfig,
};
use qgsm::runtime::{Purpose, RngStream};
use qgsm::Role;

use crate::artifacts::{config_hash, ArtifactDir, RunHeader};
use crate::config::{AttackRunConfig, E91RunConfig, QmemRunConfig, TriRunConfig};
use crate::{CliError, Format};

pub struct Output {
    pub quiet: bool,
    pub format: Format,
}

impl Output {
    /// Prints one key/value summary block in the selected format.
    pub fn summary(&self, pairs: &[(&str, String)]) {
        if self.quiet {
            return;
        }
        match self.format {
            Format::Text => {
                for (k, v) in pairs {
                    println!("{k} {v}");
                }
            }
            Format::Csv => {
                for (k, v) in pairs {
                    println!("{k},{v}");
                }
            }
            Format::Jsonl => {
                let fields: Vec<String> = pairs
                    .iter()
                    .map(|(k, v)| match v.parse::<f64>() {
                        Ok(num) if !v.is_empty() => format!("\"{k}\":{num}"),
                        _ => format!("\"{k}\":\"{v}\""),
                    })
                    .collect();
                println!("{{{}}}", fields.join(","));
            }
        }
    }

    pub fn line(&self, text: &str) {
        if !self.quiet {
            println!("{text}");
        }
    }
}

fn summary_text(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k} {v}\n"))
        .collect::<String>()
}

pub fn cmd_tri(config: &TriRunConfig, out_dir: &Path, output: &Output) -> Result<(), CliError> {
    let mut scenario = ScenarioConfig::new(config.scenario, config.trials, config.seed);
    scenario.session.source = config.source_kind;
    scenario.session.emissions = config.num_emissions;
    scenario.session.basis_policy = config.basis_policy;
    scenario.session.order_policy = config.order_policy.clone();
    scenario.session.eve_channel = config.eve.as_ref().map(|e| e.channel);
    scenario.compare = config.compare;
    scenario.min_key_len = config.min_key_len;

    let header = RunHeader {
        subcommand: "tri",
        seed: config.seed,
        config_hash: config_hash(config),
    };
    output.line(&header.comment_line());
    let mut dir = ArtifactDir::create(&out_dir.join("tri"), header)?;

    let report = run_scenario(&scenario)?;

    // Round table and transcript of trial 0, replayed with recording on.
    let mut first_session = scenario.effective_session();
    first_session.record_transcript = true;
    let first = qgsm::proto_tri::run_session(&first_session, scenario.trial_seed(0))?;
    let rows: Vec<Vec<String>> = first
        .rounds
        .iter()
        .map(|r| {
            vec![
                r.round_index.to_string(),
                r.sim1.axis.to_string(),
                r.sim1.bit.to_string(),
                r.auc.axis.to_string(),
                r.auc.bit.to_string(),
                r.sim2.map(|s| s.axis.to_string()).unwrap_or_default(),
                r.sim2.map(|s| s.bit.to_string()).unwrap_or_default(),
                r.class.label().to_string(),
                r.null_applied.to_string(),
            ]
        })
        .collect();
    dir.write_csv(
        "rounds.csv",
        &["aliases: basis = MB (measurement basis), bit = CB (classical bit)"],
        &[
            "round",
            "sim1_basis",
            "sim1_bit",
            "auc_basis",
            "auc_bit",
            "sim2_basis",
            "sim2_bit",
            "class",
            "null_applied",
        ],
        &rows,
    )?;
    dir.write_text(
        "transcript.jsonl",
        &first.transcript.to_jsonl(),
    )?;

    let verdict_lines: Vec<String> = report
        .results
        .iter()
        .map(|r| serde_json::to_string(r).expect("trial results serialize"))
        .collect();
    dir.write_jsonl("verdicts.jsonl", &verdict_lines)?;

    let null_first = first.rounds.iter().filter(|r| r.null_applied).count();
    let pairs = [
        ("scenario", format!("{:?}", report.kind)),
        ("trials", report.trials.to_string()),
        ("detection_rate", format!("{:.6}", report.detection_rate)),
        ("accept_rate", format!("{:.6}", report.accept_rate)),
        ("reject_rate", format!("{:.6}", report.reject_rate)),
        ("mean_key_len_a", format!("{:.3}", report.mean_key_len_a)),
        ("mean_key_len_b", format!("{:.3}", report.mean_key_len_b)),
        ("null_rounds_total", report.null_rounds_total.to_string()),
        ("null_rounds_first_trial", null_first.to_string()),
    ];
    dir.write_text("summary.txt", &summary_text(&pairs))?;
    output.summary(&pairs);
    Ok(())
}

pub fn cmd_qmem(config: &QmemRunConfig, out_dir: &Path, output: &Output) -> Result<(), CliError> {
    let header = RunHeader {
        subcommand: "qmem",
        seed: config.seed,
        config_hash: config_hash(config),
    };
    output.line(&header.comment_line());
    let mut dir = ArtifactDir::create(&out_dir.join("qmem"), header)?;

    let m = config.m;
    let policy = config.policy.unwrap_or_else(|| AcceptPolicy::default_threshold(m));
    let qber_threshold = config.noise.as_ref().map_or(0.0, |n| n.qber_threshold);

    let (ledger, bank) = provision(config.n, config.seed);
    let mut challenged = match config.attack {
        None => bank,
        Some(model) => {
            let mut rng = RngStream::derive(config.seed, Role::Eve, Purpose::Attack, 0);
            let (clone, original) = clone_attack(&bank, model, &mut rng);
            // Measure-resend is checked on the disturbed original; a fresh
            // random clone answers the challenge itself.
            match model {
                CloneModel::MeasureResend => original,
                CloneModel::RandomFresh => clone,
            }
        }
    };

    let mut contract_rng = RngStream::derive(config.seed, Role::Sim1, Purpose::Contract, 0);
    let mut noise_rng = RngStream::derive(config.seed, Role::Sim1, Purpose::Noise, 0);

    let max_trials = (config.n / u64::from(m)) as u32;
    let exhausted = config.trials > max_trials;
    let trials = config.trials.min(max_trials);

    let mut histogram = vec![0u64; m as usize + 1];
    let mut per_k_accepts = vec![0u64; m as usize + 1];
    let mut verdict_lines = Vec::with_capacity(trials as usize);
    let mut accepts = 0u64;
    let mut count_rejects = 0u64;
    let mut bit_rejects = 0u64;
    let mut qber_sum = 0.0f64;
    let mut first_window_rows: Vec<Vec<String>> = Vec::new();

    for trial in 0..trials {
        let request = WindowRequest {
            n: u64::from(trial) * u64::from(m),
            m,
        };
        let mut report = sim_measure_window(&mut challenged, &request, config.contract, &mut contract_rng)?;
        if let Some(noise) = &config.noise {
            report = qgsm::proto_qmem::apply_bit_noise(&report, noise.p_flip, &mut noise_rng);
        }
        let decision = sift_and_decide_noisy(&ledger, &report, policy, qber_threshold)?;
        let k = decision.matched_positions.len();
        histogram[k] += 1;
        match decision.verdict {
            MemVerdict::Accept => {
                accepts += 1;
                per_k_accepts[k] += 1;
            }
            MemVerdict::Reject => bit_rejects += 1,
            MemVerdict::RejectCountMismatch => count_rejects += 1,
        }
        qber_sum += decision.qber;
        verdict_lines.push(format!(
            "{{\"trial\":{trial},\"matched\":{k},\"verdict\":{},\"qber\":{:.6}}}",
            serde_json::to_string(&decision.verdict).expect("verdict serializes"),
            decision.qber
        ));

        if trial == 0 {
            for (slot, &position) in report.positions.iter().enumerate() {
                let entry = ledger.entry(position).expect("in range");
                let matched = entry.axis == report.axes[slot];
                first_window_rows.push(vec![
                    position.to_string(),
                    entry.axis.to_string(),
                    entry.bit.to_string(),
                    report.axes[slot].to_string(),
                    report.bits[slot].to_string(),
                    matched.to_string(),
                    if matched { report.bits[slot].to_string() } else { String::new() },
                ]);
            }
        }
    }

    dir.write_csv(
        "challenge.csv",
        &["first challenge window; key_bit is set at matched-basis positions"],
        &["position", "auc_basis", "auc_bit", "sim_basis", "sim_bit", "matched", "key_bit"],
        &first_window_rows,
    )?;

    let histogram_rows: Vec<Vec<String>> = (0..=m as usize)
        .map(|k| {
            let expected_p = match_probability(u64::from(m), k as u64)
                .map(|p| p.as_f64())
                .unwrap_or(0.0);
            vec![
                k.to_string(),
                histogram[k].to_string(),
                format!("{expected_p:.8}"),
                format!("{:.3}", expected_p * trials as f64),
            ]
        })
        .collect();
    dir.write_csv(
        "histogram.csv",
        &["matched-basis count per window against the exact C(m,q)/2^m law"],
        &["matched_count", "observed", "expected_probability", "expected_count"],
        &histogram_rows,
    )?;

    if let Some(model) = config.attack {
        let per_bit: f64 = match model {
            CloneModel::MeasureResend => 0.75,
            CloneModel::RandomFresh => 0.5,
        };
        let curve_rows: Vec<Vec<String>> = (0..=m as usize)
            .map(|k| {
                let n_k = histogram[k];
                let empirical = if n_k == 0 {
                    String::new()
                } else {
                    format!("{:.6}", per_k_accepts[k] as f64 / n_k as f64)
                };
                vec![
                    k.to_string(),
                    n_k.to_string(),
                    empirical,
                    format!("{:.6}", per_bit.powi(k as i32)),
                ]
            })
            .collect();
        dir.write_csv(
            "accept_curve.csv",
            &["empirical accept rate per matched count vs the analytic per-bit law"],
            &["matched_count", "trials", "empirical_accept", "analytic_accept"],
            &curve_rows,
        )?;
    }

    dir.write_jsonl("verdicts.jsonl", &verdict_lines)?;

    if config.export_snapshot {
        let snapshot = qgsm::proto_qmem::ProvisionSnapshot::capture(&ledger, &challenged, config.seed);
        dir.write_raw("provision.json", &snapshot.to_json())?;
    }

    let mut pairs = vec![
        ("capacity", config.n.to_string()),
        ("window_m", m.to_string()),
        ("trials_requested", config.trials.to_string()),
        ("trials_run", trials.to_string()),
        ("accept_rate", format!("{:.6}", accepts as f64 / f64::from(trials.max(1)))),
        ("count_mismatch_rejects", count_rejects.to_string()),
        ("bit_rejects", bit_rejects.to_string()),
        ("mean_qber", format!("{:.6}", qber_sum / f64::from(trials.max(1)))),
        ("remaining_cells", challenged.remaining().to_string()),
    ];
    if exhausted {
        pairs.push(("incomplete", "memory exhausted before the requested trials".into()));
    }
    dir.write_text("summary.txt", &summary_text(&pairs))?;
    output.summary(&pairs);

    if exhausted {
        return Err(CliError::Internal(format!(
            "memory exhausted: {} cells support only {} windows of m={} (partial artifacts flagged in {})",
            config.n,
            max_trials,
            m,
            out_dir.join("qmem").display()
        )));
    }
    Ok(())
}

pub fn cmd_e91(config: &E91RunConfig, out_dir: &Path, output: &Output) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&config.disclose_fraction) {
        return Err(CliError::Config("disclose_fraction must be within 0..=1".into()));
    }
    let header = RunHeader {
        subcommand: "e91",
        seed: config.seed,
        config_hash: config_hash(config),
    };
    output.line(&header.comment_line());
    let mut dir = ArtifactDir::create(&out_dir.join("e91"), header)?;

    let e91 = E91Config {
        pairs: config.pairs,
        disclose_fraction: config.disclose_fraction,
        ..E91Config::default()
    };
    let out = run_e91_reference(&e91, config.seed)?;

    let keys = format!(
        "alice {}\nbob   {}\n",
        out.alice_key.iter().map(|b| char::from(b'0' + b)).collect::<String>(),
        out.bob_key.iter().map(|b| char::from(b'0' + b)).collect::<String>(),
    );
    dir.write_text("keys.txt", &keys)?;
    dir.write_text("transcript.jsonl", &out.transcript.to_jsonl())?;

    let disclosed_ok = out.disclosed.iter().all(|d| d.alice_bit == d.bob_bit);
    let pairs = [
        ("pairs", config.pairs.to_string()),
        ("sifted_len", out.sifted_len.to_string()),
        ("disclosed", out.disclosed.len().to_string()),
        ("disclosed_consistent", disclosed_ok.to_string()),
        ("final_key_len", out.alice_key.len().to_string()),
        ("keys_identical", (out.alice_key == out.bob_key).to_string()),
    ];
    dir.write_text("summary.txt", &summary_text(&pairs))?;
    output.summary(&pairs);
    Ok(())
}

pub fn cmd_attack(config: &AttackRunConfig, out_dir: &Path, output: &Output) -> Result<(), CliError> {
    let header = RunHeader {
        subcommand: "attack",
        seed: config.seed,
        config_hash: config_hash(config),
    };
    output.line(&header.comment_line());
    let mut dir = ArtifactDir::create(&out_dir.join("attack"), header)?;

    let mut eve = EveCnotConfig::new(config.channel, config.trials, config.seed);
    eve.session.source = config.source_kind;
    eve.session.emissions = config.num_emissions;
    eve.compare = config.compare;
    let report = eve_cnot_session(&eve)?;

    dir.write_text(
        "report.json",
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;

    let rate = |a: (u64, u64)| {
        if a.1 == 0 {
            0.0
        } else {
            a.0 as f64 / a.1 as f64
        }
    };
    let pairs = [
        ("tapped_channel", report.tapped.to_string()),
        ("trials", report.trials.to_string()),
        ("tapped_z_agreement", format!("{:.6}", rate(report.tapped_z_agreement))),
        ("tapped_null_agreement", format!("{:.6}", rate(report.tapped_null_agreement))),
        ("untapped_ident_agreement", format!("{:.6}", rate(report.untapped_ident_agreement))),
        (
            "untapped_mutual_information_bits",
            format!("{:.6}", report.untapped_ident_mutual_information),
        ),
        ("detection_with_eve", format!("{:.6}", rate(report.detection_with_eve))),
        ("detection_without_eve", format!("{:.6}", rate(report.detection_without_eve))),
        ("detection_z", format!("{:.3}", report.detection_z)),
    ];
    dir.write_text("summary.txt", &summary_text(&pairs))?;
    output.summary(&pairs);
    Ok(())
}

pub fn cmd_fixtures(output: &Output) -> Result<(), CliError> {
    let results = fixtures::run_all();
    let mut failures = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        if !r.passed || !output.quiet {
            println!("fixture {}: {status} ({})", r.name, r.detail);
        }
        if !r.passed {
            failures.push(r.name);
        }
    }
    if failures.is_empty() {
        output.line(&format!("{} fixtures passed", results.len()));
        Ok(())
    } else {
        Err(CliError::Internal(format!(
            "fixture mismatches: {}",
            failures.join(", ")
        )))
    }
}

pub fn cmd_stats(out_dir: &Path, output: &Output) -> Result<(), CliError> {
    let mut files: Vec<PathBuf> = Vec::new();
    collect_jsonl(out_dir, &mut files)?;
    files.sort();
    if files.is_empty() {
        return Err(CliError::Config(format!(
            "no .jsonl artifacts under {}",
            out_dir.display()
        )));
    }

    let mut counts: std::collections::BTreeMap<String, u64> = Default::default();
    let mut records = 0u64;
    for file in &files {
        let body = std::fs::read_to_string(file)?;
        for line in body.lines() {
            let Ok(value) = serde_json::from_str::<serde_json::Value>(line) else {
                continue;
            };
            for field in ["outcome", "verdict"] {
                if let Some(v) = value.get(field).and_then(|v| v.as_str()) {
                    *counts.entry(format!("{field}:{v}")).or_default() += 1;
                    records += 1;
                }
            }
        }
    }

    let mut pairs: Vec<(&str, String)> = vec![
        ("files", files.len().to_string()),
        ("records", records.to_string()),
    ];
    let count_strings: Vec<(String, String)> = counts
        .iter()
        .map(|(k, v)| (k.clone(), v.to_string()))
        .collect();
    for (k, v) in &count_strings {
        pairs.push((k.as_str(), v.clone()));
    }
    let header = RunHeader {
        subcommand: "stats",
        seed: 0,
        config_hash: fnv_of_paths(&files),
    };
    let mut dir = ArtifactDir::create(out_dir, header)?;
    dir.write_text("stats.txt", &summary_text(&pairs))?;
    output.summary(&pairs);
    Ok(())
}

fn fnv_of_paths(paths: &[PathBuf]) -> u64 {
    let joined = paths
        .iter()
        .map(|p| p.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("\n");
    crate::artifacts::fnv1a64(joined.as_bytes())
}

fn collect_jsonl(dir: &Path, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if !dir.is_dir() {
        return Err(CliError::Config(format!("{} is not a directory", dir.display())));
    }
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if path.is_dir() {
            collect_jsonl(&path, files)?;
        } else if path.extension().is_some_and(|e| e == "jsonl") {
            files.push(path);
        }
    }
    Ok(())
}
