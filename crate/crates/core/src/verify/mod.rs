//! Executable checks of the rearrangement inequalities, random instances, and
//! brute-force oracles used to cross-examine the exact algorithms.

mod checks;
mod oracle;
mod random;
mod replay;
mod suite;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ExtRational, Rational};
use crate::measure::{cumulative, IntervalSet, Measure1D};
use crate::stepfn::{distribution, StepFunction};

pub use checks::{
    check_equimeasurable, check_hl_set_inequality, check_symmetric_splice, check_level_set_inequality, check_weak_type_bound,
    comparison_levels,
};
pub use oracle::{
    brute_superlevel_set, direct_integral, grid_distribution, grid_maximal_at, grid_oracle, GridOracle, OracleValue,
};
pub use random::{random_ds_function, random_open_set, random_instance, MAX_SIZE};
pub use replay::{proof_replay, replay_chain, witness_family};
pub use suite::{run_suite, SuiteKind, SuiteOptions, SuiteOutcome};

/// A measure and a function on it, with its seed and descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub measure: Measure1D,
    pub function: StepFunction,
    pub seed: u64,
    pub descriptor: String,
}

impl Instance {
    /// Rejects functions with a superlevel set of infinite measure.
    pub fn new(measure: Measure1D, function: StepFunction, seed: u64, descriptor: impl Into<String>) -> Result<Self> {
        let dist = distribution(&function, &measure);
        if let Some(level) = dist.levels().iter().find(|l| !l.lambda.is_finite()) {
            return Err(Error::InfiniteLevelSet(level.t.to_string()));
        }
        Ok(Instance { measure, function, seed, descriptor: descriptor.into() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        })
    }
}

/// A checked relation `lhs ⋈ rhs` that did not hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub relation: String,
    pub point: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub checked_points: usize,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Smallest `rhs − lhs` seen, as a float, for plotting.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl Report {
    pub fn error(check: &str, seed: u64, message: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            seed,
            verdict: Verdict::Error,
            checked_points: 0,
            witnesses: Vec::new(),
            message: Some(message.into()),
            margin: None,
            runtime: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Accumulates relation checks into a [`Report`].
pub(crate) struct Ledger {
    check: String,
    seed: u64,
    checked: usize,
    witnesses: Vec<Witness>,
    margin: Option<f64>,
    started: std::time::Instant,
}

impl Ledger {
    pub(crate) fn new(check: &str, seed: u64) -> Self {
        Ledger {
            check: check.into(),
            seed,
            checked: 0,
            witnesses: Vec::new(),
            margin: None,
            started: std::time::Instant::now(),
        }
    }

    fn record(&mut self, ok: bool, relation: &str, point: &dyn fmt::Display, lhs: &dyn fmt::Display, rhs: &dyn fmt::Display) -> bool {
        self.checked += 1;
        if !ok {
            self.witnesses.push(Witness {
                relation: relation.into(),
                point: point.to_string(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        ok
    }

    fn margin(&mut self, m: f64) {
        if m.is_finite() {
            self.margin = Some(self.margin.map_or(m, |old| old.min(m)));
        }
    }

    pub(crate) fn le(&mut self, relation: &str, point: &dyn fmt::Display, lhs: &Rational, rhs: &Rational) -> bool {
        self.margin((rhs - lhs).to_f64());
        self.record(lhs <= rhs, relation, point, lhs, rhs)
    }

    pub(crate) fn lt(&mut self, relation: &str, point: &dyn fmt::Display, lhs: &Rational, rhs: &Rational) -> bool {
        self.margin((rhs - lhs).to_f64());
        self.record(lhs < rhs, relation, point, lhs, rhs)
    }

    pub(crate) fn eq<T: PartialEq + fmt::Display>(&mut self, relation: &str, point: &dyn fmt::Display, lhs: &T, rhs: &T) -> bool {
        self.record(lhs == rhs, relation, point, lhs, rhs)
    }

    pub(crate) fn le_ext(&mut self, relation: &str, point: &dyn fmt::Display, lhs: &ExtRational, rhs: &ExtRational) -> bool {
        if let (ExtRational::Finite(l), ExtRational::Finite(r)) = (lhs, rhs) {
            self.margin((r - l).to_f64());
        }
        self.record(lhs <= rhs, relation, point, lhs, rhs)
    }

    pub(crate) fn le_f64(&mut self, relation: &str, point: &dyn fmt::Display, lhs: f64, rhs: f64) -> bool {
        self.margin(rhs - lhs);
        self.record(lhs <= rhs, relation, point, &lhs, &rhs)
    }

    pub(crate) fn holds(&mut self, relation: &str, point: &dyn fmt::Display, ok: bool) -> bool {
        self.record(ok, relation, point, &ok, &true)
    }

    pub(crate) fn finish(self) -> Report {
        let verdict = if self.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
        Report {
            check: self.check,
            seed: self.seed,
            verdict,
            checked_points: self.checked,
            witnesses: self.witnesses,
            message: None,
            margin: self.margin,
            runtime: self.started.elapsed(),
        }
    }

    pub(crate) fn fail_with(self, message: impl Into<String>) -> Report {
        let mut r = self.finish();
        r.verdict = Verdict::Error;
        r.message = Some(message.into());
        r
    }
}

/// `∫_U f dμ` over an open set, `None` when infinite.
pub(crate) fn set_integral(f: &StepFunction, mu: &Measure1D, set: &IntervalSet) -> Option<Rational> {
    let g = cumulative(mu, Some(f));
    let mut total = ExtRational::zero();
    for c in set.components() {
        total = total.checked_add(&g.integral_open(&c.left, &c.right))?;
    }
    total.finite().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::IntervalFamily;
    use crate::maximal::{maximal_weak_norm, superlevel_set, MaximalProfile};
    use crate::measure::OpenInterval;
    use crate::stepfn::weak_lp_norm;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn unit_box() -> Instance {
        let f = StepFunction::indicator(r("-1/2"), r("1/2"), Rational::one()).unwrap();
        Instance::new(Measure1D::lebesgue(), f, 0, "box").unwrap()
    }

    fn atom_instance() -> Instance {
        let f = StepFunction::indicator(r("-1"), r("1"), r("5")).unwrap();
        Instance::new(Measure1D::atom(Rational::zero(), Rational::one()).unwrap(), f, 0, "atom").unwrap()
    }

    #[test]
    fn box_replay_stays_inside() {
        let inst = unit_box();
        let report = proof_replay(&inst, &r("1/2"), 2);
        assert!(report.passed(), "{report:?}");
        let fam = witness_family(&inst, &r("1/2"), 2).unwrap();
        let window = IntervalSet::from_interval(OpenInterval::bounded(r("-3/2"), r("3/2")).unwrap());
        assert!(fam.union().is_subset_of(&window));
    }

    #[test]
    fn duplicate_families_degenerate() {
        let inst = unit_box();
        let fam = IntervalFamily::new(vec![OpenInterval::bounded(r("-1/2"), r("1")).unwrap()]);
        let report = replay_chain(&inst, &r("1/2"), &fam, &fam);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn replay_needs_nonempty_level() {
        let report = proof_replay(&unit_box(), &r("2"), 3);
        assert_eq!(report.verdict, Verdict::Error);
    }

    #[test]
    fn atom_instances() {
        let inst = atom_instance();
        assert!(check_level_set_inequality(&inst, None).passed());
        let p = r("2");
        let report = check_weak_type_bound(&inst, &p, &r("1e-9"));
        assert!(report.passed(), "{report:?}");
        let lhs = maximal_weak_norm(&inst.function, &inst.measure, &p).unwrap();
        assert!((lhs.value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_function_passes() {
        let inst = random_instance(17, 0);
        assert!(inst.function.is_zero());
        assert!(!inst.measure.is_zero());
        assert!(check_level_set_inequality(&inst, None).passed());
        assert!(check_level_set_inequality(&inst, Some(&[r("1"), r("1/3")])).passed());
    }

    #[test]
    fn box_weak_ratio() {
        let inst = unit_box();
        let p = r("2");
        assert!(check_weak_type_bound(&inst, &p, &r("1e-9")).passed());
        let lhs = maximal_weak_norm(&inst.function, &inst.measure, &p).unwrap();
        let rhs = weak_lp_norm(&inst.function, &inst.measure, &p).unwrap();
        assert!(lhs.value / rhs.value <= 1.0 + 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn generation_is_deterministic() {
        for seed in 0..40 {
            let size = (seed % 13) as usize;
            let a = serde_json::to_string(&random_instance(seed, size)).unwrap();
            let b = serde_json::to_string(&random_instance(seed, size)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn hl_and_ds_edge_cases() {
        let inst = unit_box();
        let report = check_hl_set_inequality(&inst, &IntervalSet::empty());
        assert!(report.passed());
        let report = check_hl_set_inequality(&inst, &IntervalSet::whole_line());
        assert_eq!(report.verdict, Verdict::Error);

        let lopsided = StepFunction::indicator(r("0"), r("1"), Rational::one()).unwrap();
        let report = check_symmetric_splice(&lopsided, &r("1"), &r("1"));
        assert_eq!(report.verdict, Verdict::Error);
        assert_eq!(report.witnesses.len(), 1);

        let two_blocks = StepFunction::indicator(r("-1"), r("1"), Rational::one()).unwrap();
        for b in ["0", "1/2", "1", "3"] {
            assert!(check_symmetric_splice(&two_blocks, &r("0"), &r(b)).passed());
        }
    }

    #[test]
    fn equimeasurable_random() {
        for seed in 0..60 {
            let inst = random_instance(seed, (seed % 13) as usize);
            let report = check_equimeasurable(&inst);
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn brute_level_set_agrees() {
        for seed in 0..80 {
            let inst = random_instance(seed, (seed % 13) as usize);
            let profile = MaximalProfile::new(&inst.function, &inst.measure);
            let crit = profile.positive_critical().to_vec();
            let mut levels = crit.clone();
            levels.extend(crit.windows(2).map(|w| w[0].midpoint(&w[1])));
            if let Some(first) = crit.first() {
                levels.push(first * r("1/2"));
            }
            for l in &levels {
                let fast = superlevel_set(&inst.function, &inst.measure, l).unwrap();
                let brute = brute_superlevel_set(&inst.function, &inst.measure, l).unwrap();
                assert_eq!(fast, brute, "seed {seed}, λ = {l}");
            }
        }
    }

    #[test]
    fn grid_oracle_on_box() {
        let v = grid_maximal_at(&unit_box(), 10_000, &r("3/2")).unwrap();
        assert_eq!(v.exact, r("1/2"));
        assert!(v.oracle <= v.exact);
        assert!(v.gap() < 1e-3);
    }

    #[test]
    fn grid_oracle_random() {
        for seed in 0..8 {
            let inst = random_instance(seed, 6);
            let coarse = grid_oracle(&inst, 800).unwrap();
            assert!(coarse.consistent(1e-9), "seed {seed}");
            for t in ["0", "1/2", "1", "2"] {
                let d = distribution(&inst.function, &inst.measure).eval(&r(t)).unwrap();
                assert_eq!(grid_distribution(&inst, 800, &r(t)).unwrap(), d, "seed {seed} t {t}");
            }
        }
    }

    #[test]
    fn small_suites_pass() {
        let opts = SuiteOptions::default();
        for kind in [SuiteKind::Thm1, SuiteKind::Thm2, SuiteKind::Hl, SuiteKind::Ds, SuiteKind::Replay] {
            let out = run_suite(kind, 25, 1000, &opts);
            assert!(out.all_passed(), "{out}: {:?}", out.failures().next());
        }
    }
}
