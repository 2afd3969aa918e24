//! Randomized checks of the axioms and derived theorems against any
//! [`ModelOracle`], with reproducible counterexample records.
//!
//! Every case draws its inputs from its own ChaCha stream, seeded from the
//! master seed, the check id and the case index. Parallel execution therefore
//! never changes a result, and a recorded seed replays its case exactly.

mod axioms;
mod gen;
mod theorems;

pub use gen::Gen;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::oracle::ModelOracle;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub cases: usize,
    pub max_size: usize,
    pub max_depth: usize,
    pub stability_n: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            cases: 500,
            max_size: 6,
            max_depth: 4,
            stability_n: 8,
            seed: 42,
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        SuiteConfig {
            seed,
            ..SuiteConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cases == 0 || self.max_size == 0 || self.max_depth == 0 || self.stability_n == 0 {
            return Err(Error::InvalidInput("suite bounds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub check_id: String,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub observed: String,
}

/// Result of one case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Passed against a bracketing witness rather than an exact one.
    Approximate,
    Fail(String),
    /// Undecided: precision ran out or a bounded search came up empty.
    Inconclusive(String),
    /// The finite-`n` form of stability failed; not a disproof.
    Anomaly(String),
}

pub(crate) type CheckFn = fn(&mut Gen) -> Result<Verdict>;

pub(crate) struct Check {
    pub id: &'static str,
    pub run: CheckFn,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub id: String,
    pub cases: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub anomalies: usize,
    pub approximate: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub model: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckSummary>,
    pub counterexamples: Vec<CounterexampleRecord>,
    pub inconclusive: Vec<CounterexampleRecord>,
    pub anomalies: Vec<CounterexampleRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn approximate(&self) -> usize {
        self.checks.iter().map(|c| c.approximate).sum()
    }

    /// Both reports concatenated, as for a combined run.
    pub fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.checks.extend(other.checks);
        self.counterexamples.extend(other.counterexamples);
        self.inconclusive.extend(other.inconclusive);
        self.anomalies.extend(other.anomalies);
        self
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of case `index` of check `id` under master seed `seed`.
pub fn case_seed(seed: u64, id: &str, index: usize) -> u64 {
    splitmix(splitmix(seed ^ fnv1a(id)) ^ index as u64)
}

fn run_case(oracle: &dyn ModelOracle, cfg: &SuiteConfig, check: &Check, seed: u64) -> (Verdict, Vec<String>) {
    let mut g = Gen::new(oracle, ChaCha8Rng::seed_from_u64(seed), cfg);
    let verdict = match (check.run)(&mut g) {
        Ok(v) => v,
        Err(e @ Error::PrecisionExhausted { .. }) => Verdict::Inconclusive(e.to_string()),
        Err(e) => Verdict::Fail(format!("error: {e}")),
    };
    (verdict, g.take_inputs())
}

fn run_check(oracle: &dyn ModelOracle, cfg: &SuiteConfig, check: &Check) -> (CheckSummary, Vec<(Verdict, CounterexampleRecord)>) {
    let mut summary = CheckSummary {
        id: check.id.to_owned(),
        cases: cfg.cases,
        ..CheckSummary::default()
    };
    let mut records = Vec::new();
    for i in 0..cfg.cases {
        let seed = case_seed(cfg.seed, check.id, i);
        let (verdict, inputs) = run_case(oracle, cfg, check, seed);
        let observed = match &verdict {
            Verdict::Pass => continue,
            Verdict::Approximate => {
                summary.approximate += 1;
                continue;
            }
            Verdict::Fail(s) => {
                summary.failed += 1;
                s.clone()
            }
            Verdict::Inconclusive(s) => {
                summary.inconclusive += 1;
                s.clone()
            }
            Verdict::Anomaly(s) => {
                summary.anomalies += 1;
                s.clone()
            }
        };
        records.push((
            verdict,
            CounterexampleRecord {
                check_id: check.id.to_owned(),
                seed,
                inputs,
                observed,
            },
        ));
    }
    (summary, records)
}

fn run_suite(oracle: &dyn ModelOracle, cfg: &SuiteConfig, checks: &[Check]) -> Result<SuiteReport> {
    cfg.validate()?;
    let results: Vec<_> = checks.par_iter().map(|c| run_check(oracle, cfg, c)).collect();
    let mut report = SuiteReport {
        model: oracle.name().to_owned(),
        config: cfg.clone(),
        checks: Vec::new(),
        counterexamples: Vec::new(),
        inconclusive: Vec::new(),
        anomalies: Vec::new(),
    };
    for (summary, records) in results {
        report.checks.push(summary);
        for (verdict, rec) in records {
            match verdict {
                Verdict::Fail(_) => report.counterexamples.push(rec),
                Verdict::Inconclusive(_) => report.inconclusive.push(rec),
                Verdict::Anomaly(_) => report.anomalies.push(rec),
                Verdict::Pass | Verdict::Approximate => {}
            }
        }
    }
    Ok(report)
}

pub fn axiom_check_ids() -> Vec<&'static str> {
    axioms::CHECKS.iter().map(|c| c.id).collect()
}

pub fn theorem_check_ids() -> Vec<&'static str> {
    theorems::CHECKS.iter().map(|c| c.id).collect()
}

pub fn run_axiom_suite(oracle: &dyn ModelOracle, cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_suite(oracle, cfg, axioms::CHECKS)
}

pub fn run_theorem_suite(oracle: &dyn ModelOracle, cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_suite(oracle, cfg, theorems::CHECKS)
}

/// Run only the named checks.
pub fn run_selected(oracle: &dyn ModelOracle, cfg: &SuiteConfig, ids: &[&str]) -> Result<SuiteReport> {
    let picked: Vec<Check> = axioms::CHECKS
        .iter()
        .chain(theorems::CHECKS)
        .filter(|c| ids.contains(&c.id))
        .map(|c| Check { id: c.id, run: c.run })
        .collect();
    if picked.len() != ids.len() {
        return Err(Error::InvalidInput(format!("unknown check among {ids:?}")));
    }
    run_suite(oracle, cfg, &picked)
}

/// Re-run one case from its recorded seed.
pub fn replay(
    oracle: &dyn ModelOracle,
    cfg: &SuiteConfig,
    check_id: &str,
    seed: u64,
) -> Result<(Verdict, CounterexampleRecord)> {
    let check = axioms::CHECKS
        .iter()
        .chain(theorems::CHECKS)
        .find(|c| c.id == check_id)
        .ok_or_else(|| Error::InvalidInput(format!("unknown check `{check_id}`")))?;
    let (verdict, inputs) = run_case(oracle, cfg, check, seed);
    let observed = match &verdict {
        Verdict::Pass => "pass".to_owned(),
        Verdict::Approximate => "pass (bracketed)".to_owned(),
        Verdict::Fail(s) | Verdict::Inconclusive(s) | Verdict::Anomaly(s) => s.clone(),
    };
    Ok((
        verdict,
        CounterexampleRecord {
            check_id: check_id.to_owned(),
            seed,
            inputs,
            observed,
        },
    ))
}

pub(crate) fn ok_if(cond: bool, msg: impl FnOnce() -> String) -> Result<Verdict> {
    Ok(if cond { Verdict::Pass } else { Verdict::Fail(msg()) })
}
