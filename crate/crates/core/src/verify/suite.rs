use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exactnum::Rational;
use crate::maximal::MaximalProfile;

use super::checks::{check_hl_set_inequality, check_symmetric_splice, check_level_set_inequality, check_weak_type_bound};
use super::random::{quarter_in, random_ds_function, random_instance, random_open_set, rng_for, MAX_SIZE};
use super::replay::proof_replay;
use super::{Report, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Thm1,
    Thm2,
    Hl,
    Ds,
    Replay,
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "thm1" => SuiteKind::Thm1,
            "thm2" => SuiteKind::Thm2,
            "hl" => SuiteKind::Hl,
            "ds" => SuiteKind::Ds,
            "replay" => SuiteKind::Replay,
            other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
        })
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteKind::Thm1 => "thm1",
            SuiteKind::Thm2 => "thm2",
            SuiteKind::Hl => "hl",
            SuiteKind::Ds => "ds",
            SuiteKind::Replay => "replay",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Exponent for the weak-norm suite.
    pub p: Rational,
    /// Additive slack for the weak-norm suite.
    pub tol: Rational,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { p: Rational::from_integer(2), tol: Rational::frac(1, 1_000_000_000) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub kind: SuiteKind,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub reports: Vec<Report>,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Report> {
        self.reports.iter().filter(|r| r.verdict != Verdict::Pass)
    }

    /// One row per instance: `seed,verdict,checked,margin,runtime_ms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,verdict,checked,margin,runtime_ms\n");
        for r in &self.reports {
            let margin = r.margin.map(|m| m.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{:.3}\n",
                r.seed,
                r.verdict,
                r.checked_points,
                margin,
                r.runtime.as_secs_f64() * 1e3
            ));
        }
        out
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances, {} passed, {} failed, {} errors",
            self.kind,
            self.reports.len(),
            self.passed,
            self.failed,
            self.errors
        )
    }
}

fn size_for(seed: u64) -> usize {
    rng_for(seed, 7).gen_range(0..=MAX_SIZE)
}

/// Runs `instances` seeded checks of one kind; instance `i` uses seed `seed + i`.
pub fn run_suite(kind: SuiteKind, instances: usize, seed: u64, options: &SuiteOptions) -> SuiteOutcome {
    let reports: Vec<Report> = (0..instances as u64)
        .map(|i| run_one(kind, seed.wrapping_add(i), options))
        .collect();
    let count = |v| reports.iter().filter(|r| r.verdict == v).count();
    SuiteOutcome {
        kind,
        seed,
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        errors: count(Verdict::Error),
        reports,
    }
}

fn run_one(kind: SuiteKind, seed: u64, options: &SuiteOptions) -> Report {
    match kind {
        SuiteKind::Thm1 => check_level_set_inequality(&random_instance(seed, size_for(seed)), None),
        SuiteKind::Thm2 => check_weak_type_bound(&random_instance(seed, size_for(seed)), &options.p, &options.tol),
        SuiteKind::Hl => {
            let inst = random_instance(seed, size_for(seed));
            let set = random_open_set(&mut rng_for(seed, 1));
            check_hl_set_inequality(&inst, &set)
        }
        SuiteKind::Ds => {
            let mut rng = rng_for(seed, 2);
            let f = random_ds_function(&mut rng);
            let a = quarter_in(&mut rng, 0, 4);
            let b = quarter_in(&mut rng, 0, 4);
            let mut report = check_symmetric_splice(&f, &a, &b);
            report.seed = seed;
            report
        }
        SuiteKind::Replay => replay_one(seed),
    }
}

/// Draws instances from derived seeds until one has a positive level with a
/// nonempty superlevel set.
fn replay_one(seed: u64) -> Report {
    for attempt in 0..64u64 {
        let derived = seed.wrapping_add(attempt << 32);
        let inst = random_instance(derived, size_for(derived).max(2));
        let profile = MaximalProfile::new(&inst.function, &inst.measure);
        let levels: Vec<Rational> = profile
            .positive_critical()
            .iter()
            .flat_map(|c| [c.clone(), c * Rational::frac(1, 2)])
            .filter(|l| profile.superlevel(l).is_ok_and(|s| !s.set.is_empty()))
            .collect();
        if levels.is_empty() {
            continue;
        }
        let mut rng = rng_for(derived, 3);
        let lambda = &levels[rng.gen_range(0..levels.len())];
        let n = rng.gen_range(1..=6);
        let mut report = proof_replay(&inst, lambda, n);
        report.seed = seed;
        return report;
    }
    Report::error("replay", seed, "no replayable instance")
}
