//! Seeded decode campaigns written as JSONL, one record per trial.
//!
//! Trial `i` draws from ChaCha8 seeded with the campaign seed on stream `i`,
//! so any trial can be replayed alone, and records are identical however the
//! trials are scheduled.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64;

use comprecon::channel::{apply, random_error};
use comprecon::reconstruct::{
    brute_force_decode, decode_deletions, decode_insertions, decode_skewed, is_asymmetric, DecodeOptions,
    DecodeReport,
};
use comprecon::{full_readout, BitString, CodebookSpec, Error, ErrorModel, ErrorSpec};

use crate::CliError;

pub const DEFAULT_CROSS_CHECK_CAP: usize = 12;

/// How each trial picks its codeword.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Uniform rank drawn from the trial's stream.
    #[default]
    Seeded,
    /// Rank `trial mod |codebook|`.
    RoundRobin,
    /// Every codeword under every deletion pattern of exactly `t` units;
    /// `trials` is ignored.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: CodebookSpec,
    pub model: ErrorModel,
    /// Targets per error: classes, pairs, insertions or skews.
    pub t: usize,
    #[serde(default)]
    pub trials: u64,
    pub seed: u64,
    /// Inclusive range of lengths to sweep; the codebook's own `n` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[usize; 2]>,
    #[serde(default)]
    pub selection: Selection,
    #[serde(default = "default_cross_check_cap")]
    pub cross_check_cap: usize,
    #[serde(default)]
    pub options: DecodeOptions,
}

fn default_cross_check_cap() -> usize {
    DEFAULT_CROSS_CHECK_CAP
}

impl ExperimentConfig {
    /// Hex digest of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", xxh3_64(canonical.as_bytes()))
    }

    fn specs(&self) -> Result<Vec<CodebookSpec>, CliError> {
        match self.n_range {
            None => Ok(vec![self.spec]),
            Some([lo, hi]) if lo <= hi => (lo..=hi).map(|n| Ok(self.spec.with_n(n)?)).collect(),
            Some([lo, hi]) => Err(CliError::Usage(format!("empty length range {lo}..={hi}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    /// Decoded to a different codeword.
    Miscorrected,
    Ambiguous,
    Undecodable,
    /// The code does not guarantee this pattern and the decoder declined it.
    Unsupported,
    /// The error could not be drawn or applied.
    InvalidError,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossCheck {
    Agree,
    Disagree,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config_hash: String,
    pub trial: u64,
    pub n: usize,
    pub rank: u128,
    pub codeword: BitString,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorSpec>,
    pub outcome: TrialOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoded: Option<BitString>,
    /// Colliding codewords when the outcome is ambiguous.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub backtracks: u64,
    pub max_dead_depth: usize,
    pub cross_check: CrossCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_us: Option<u64>,
}

/// Codeword and error for one trial, before decoding.
#[derive(Clone, Debug)]
struct TrialPlan {
    trial: u64,
    spec: CodebookSpec,
    rank: u128,
    error: Result<ErrorSpec, String>,
}

fn plan(cfg: &ExperimentConfig) -> Result<Vec<TrialPlan>, CliError> {
    let mut plans = Vec::new();
    for spec in cfg.specs()? {
        let size = spec.size();
        if size == 0 {
            return Err(CliError::Usage(format!("{spec} is empty")));
        }
        match cfg.selection {
            Selection::Exhaustive => {
                let patterns = exhaustive_patterns(cfg.model, spec.n(), cfg.t)?;
                for rank in 0..size {
                    for error in &patterns {
                        let trial = plans.len() as u64;
                        plans.push(TrialPlan { trial, spec, rank, error: Ok(error.clone()) });
                    }
                }
            }
            Selection::Seeded | Selection::RoundRobin => {
                for _ in 0..cfg.trials {
                    let trial = plans.len() as u64;
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(trial);
                    let rank = match cfg.selection {
                        Selection::Seeded => rng.gen_range(0..size),
                        _ => trial as u128 % size,
                    };
                    let codeword = spec.unrank(rank)?;
                    let error = random_error(cfg.model, cfg.t, rng.gen(), &full_readout(&codeword))
                        .map_err(|e| e.to_string());
                    plans.push(TrialPlan { trial, spec, rank, error });
                }
            }
        }
    }
    Ok(plans)
}

/// Every deletion error of exactly `t` units at length `n`.
fn exhaustive_patterns(model: ErrorModel, n: usize, t: usize) -> Result<Vec<ErrorSpec>, CliError> {
    fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
        if size == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for (i, &first) in items.iter().enumerate() {
            for mut rest in subsets(&items[i + 1..], size - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    match model {
        ErrorModel::AsymDelete => {
            let classes: Vec<usize> = (1..=n).collect();
            Ok(subsets(&classes, t)
                .into_iter()
                .filter(|p| is_asymmetric(n, &p.iter().copied().collect()))
                .map(|p| ErrorSpec::asym_delete(&p))
                .collect())
        }
        ErrorModel::SymPairDelete => {
            let pairs: Vec<usize> = (1..=n / 2).collect();
            Ok(subsets(&pairs, t).into_iter().map(|p| ErrorSpec::sym_pair_delete(n, &p)).collect())
        }
        other => Err(CliError::Usage(format!("exhaustive campaigns support deletion models, not {other}"))),
    }
}

fn decode(model: ErrorModel, r: &comprecon::Readout, spec: &CodebookSpec, opts: DecodeOptions) -> comprecon::Result<DecodeReport> {
    match model {
        ErrorModel::AsymDelete | ErrorModel::SymPairDelete => decode_deletions(r, spec, opts),
        ErrorModel::Insert => decode_insertions(r, spec, opts),
        ErrorModel::Skew => decode_skewed(r, spec, opts),
    }
}

fn run_trial(cfg: &ExperimentConfig, hash: &str, plan: &TrialPlan, timing: bool) -> Result<TrialRecord, CliError> {
    let codeword = plan.spec.unrank(plan.rank)?;
    let mut record = TrialRecord {
        config_hash: hash.to_owned(),
        trial: plan.trial,
        n: plan.spec.n(),
        rank: plan.rank,
        codeword,
        error: plan.error.as_ref().ok().cloned(),
        outcome: TrialOutcome::InvalidError,
        decoded: None,
        candidates: None,
        message: None,
        backtracks: 0,
        max_dead_depth: 0,
        cross_check: CrossCheck::Skipped,
        wall_time_us: None,
    };
    let error = match &plan.error {
        Ok(e) => e,
        Err(message) => {
            record.message = Some(message.clone());
            return Ok(record);
        }
    };
    let readout = full_readout(&codeword);
    let corrupted = match apply(&readout, error) {
        Ok(r) => r,
        Err(e) => {
            record.message = Some(e.to_string());
            return Ok(record);
        }
    };
    let start = Instant::now();
    let decoded = decode(cfg.model, &corrupted, &plan.spec, cfg.options);
    if timing {
        record.wall_time_us = Some(start.elapsed().as_micros() as u64);
    }
    match &decoded {
        Ok(report) => {
            record.outcome = if report.result == codeword { TrialOutcome::Success } else { TrialOutcome::Miscorrected };
            record.decoded = Some(report.result);
            record.backtracks = report.backtracks;
            record.max_dead_depth = report.max_dead_depth;
        }
        Err(e) => {
            record.outcome = match e {
                Error::Ambiguous { candidates } => {
                    record.candidates = Some(candidates.clone());
                    TrialOutcome::Ambiguous
                }
                Error::Undecodable(_) => TrialOutcome::Undecodable,
                Error::Capability(_) => TrialOutcome::Unsupported,
                _ => TrialOutcome::Failed,
            };
            record.message = Some(e.to_string());
        }
    }
    if plan.spec.n() <= cfg.cross_check_cap && record.outcome != TrialOutcome::Unsupported {
        let reference = brute_force_decode(&corrupted.without_classes(&error.classes()), &plan.spec);
        record.cross_check = match (&decoded, &reference) {
            (Ok(a), Ok(b)) if a.result == b.result => CrossCheck::Agree,
            (Err(Error::Ambiguous { .. }), Err(Error::Ambiguous { .. })) => CrossCheck::Agree,
            (Err(Error::Undecodable(_)), Err(Error::Undecodable(_))) => CrossCheck::Agree,
            _ => CrossCheck::Disagree,
        };
    }
    Ok(record)
}

/// Runs every trial; records come back in trial order.
pub fn run_experiment(cfg: &ExperimentConfig, timing: bool) -> Result<Vec<TrialRecord>, CliError> {
    let hash = cfg.hash();
    let plans = plan(cfg)?;
    plans.par_iter().map(|p| run_trial(cfg, &hash, p, timing)).collect()
}

/// Re-runs a single trial of a campaign.
pub fn replay_trial(cfg: &ExperimentConfig, trial: u64) -> Result<TrialRecord, CliError> {
    let plans = plan(cfg)?;
    let p = plans
        .get(trial as usize)
        .ok_or_else(|| CliError::Usage(format!("trial {trial} outside 0..{}", plans.len())))?;
    run_trial(cfg, &cfg.hash(), p, false)
}

pub fn write_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> Result<(), CliError> {
    for record in records {
        serde_json::to_writer(&mut out, record).map_err(|e| CliError::Io(e.into()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Counts per outcome, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub success: usize,
    pub miscorrected: usize,
    pub ambiguous: usize,
    pub undecodable: usize,
    pub unsupported: usize,
    pub invalid_error: usize,
    pub failed: usize,
    pub cross_check_disagreements: usize,
}

impl Summary {
    pub fn of(records: &[TrialRecord]) -> Self {
        let mut s = Summary { trials: records.len(), ..Summary::default() };
        for r in records {
            *match r.outcome {
                TrialOutcome::Success => &mut s.success,
                TrialOutcome::Miscorrected => &mut s.miscorrected,
                TrialOutcome::Ambiguous => &mut s.ambiguous,
                TrialOutcome::Undecodable => &mut s.undecodable,
                TrialOutcome::Unsupported => &mut s.unsupported,
                TrialOutcome::InvalidError => &mut s.invalid_error,
                TrialOutcome::Failed => &mut s.failed,
            } += 1;
            s.cross_check_disagreements += usize::from(r.cross_check == CrossCheck::Disagree);
        }
        s
    }

    pub fn all_succeeded(&self) -> bool {
        self.success == self.trials
    }
}
