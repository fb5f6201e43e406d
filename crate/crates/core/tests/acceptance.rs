//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rearrange_core::constants::{cp_constant, sharpness_profile};
use rearrange_core::exactnum::Rational;
use rearrange_core::maximal::{superlevel_set, MaximalProfile};
use rearrange_core::verify::{
    brute_superlevel_set, check_equimeasurable, grid_oracle, random_instance, run_suite, SuiteKind, SuiteOptions,
    MAX_SIZE,
};

const SEED: u64 = 20_240_501;
const SUITE_SIZE: usize = 1000;

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: impl Into<String>) -> Line {
    Line { passed, detail: detail.into() }
}

/// Positive root of `(p−1)x^p − p x^{p−1} − 1` by float bisection.
fn cp_oracle(p: f64) -> f64 {
    let phi = |x: f64| (p - 1.0) * x.powf(p) - p * x.powf(p - 1.0) - 1.0;
    let (mut lo, mut hi) = (1.0, 2.0);
    while phi(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `sup_s (2t)^{1/p}/(s+t) ∫_{−s}^{t} |2u|^{−1/p} du` by golden-section search in `ln s`.
fn ratio_oracle(p: f64, t: f64) -> f64 {
    let primitive = |x: f64| 2f64.powf(-1.0 / p) * x.powf(1.0 - 1.0 / p) / (1.0 - 1.0 / p);
    let ratio = |ls: f64| {
        let s = ls.exp();
        (2.0 * t).powf(1.0 / p) * (primitive(s) + primitive(t)) / (s + t)
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (t.ln() - 30.0, t.ln() + 30.0);
    for _ in 0..300 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if ratio(c) > ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    ratio(0.5 * (a + b))
}

fn c2_bracket() -> Line {
    let start = Instant::now();
    let cp = cp_constant(&r("2"), &r("1e-12")).unwrap();
    let elapsed = start.elapsed();
    // 1 + √2 is the positive root of x² − 2x − 1
    let phi = |x: &Rational| x * x - x * &r("2") - Rational::one();
    let brackets = phi(&cp.cp_low).is_negative() && phi(&cp.cp_high).is_positive();
    let width = (&cp.cp_high - &cp.cp_low).to_f64();
    let mid = cp.cp_low.midpoint(&cp.cp_high);
    let consistent = phi(&mid).abs().to_f64() <= 3.0 * width;
    let exact = 1.0 + 2f64.sqrt();
    line(
        brackets && width <= 1e-12 && consistent && elapsed < Duration::from_secs(1),
        format!("[{}, {}] ∋ {exact:.15}, width {width:.1e}, {elapsed:.2?}", cp.cp_low.to_f64(), cp.cp_high.to_f64()),
    )
}

fn sharpness_grid() -> Line {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut ok = true;
    for p in ["3/2", "2", "3", "10"] {
        let pf = r(p).to_f64();
        let cp_ref = cp_oracle(pf);
        for t in ["1/2", "1", "2"] {
            let prof = match sharpness_profile(&r(p), &r(t), &r("1e-12")) {
                Ok(prof) => prof,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let ratio_ref = ratio_oracle(pf, r(t).to_f64());
            worst.0 = worst.0.max(prof.ratio_error());
            worst.1 = worst.1.max(prof.w_error());
            worst.2 = worst.2.max(prof.first_order_residual);
            worst.3 = worst.3.max((prof.ma_over_a.value - ratio_ref).abs()).max((prof.cp.cp_approx.value - cp_ref).abs());
        }
    }
    let elapsed = start.elapsed();
    line(
        ok && worst.0 <= 1e-6 && worst.1 <= 1e-5 && worst.2 <= 1e-8 && worst.3 <= 1e-6 && elapsed < Duration::from_secs(10),
        format!(
            "ratio err {:.1e} ≤ 1e-6, w err {:.1e} ≤ 1e-5, first-order {:.1e} ≤ 1e-8, oracle gap {:.1e}, {elapsed:.2?}",
            worst.0, worst.1, worst.2, worst.3
        ),
    )
}

fn suite_line(kind: SuiteKind, options: &SuiteOptions, limit: Duration) -> (bool, String) {
    let start = Instant::now();
    let out = run_suite(kind, SUITE_SIZE, SEED, options);
    let elapsed = start.elapsed();
    let checked: usize = out.reports.iter().map(|r| r.checked_points).sum();
    (
        out.all_passed() && out.reports.len() == SUITE_SIZE && elapsed < limit,
        format!("{out}, {checked} relations, {elapsed:.2?}"),
    )
}

fn level_sets() -> Line {
    let (ok, detail) = suite_line(SuiteKind::Thm1, &SuiteOptions::default(), Duration::from_secs(300));
    line(ok, detail)
}

fn weak_type() -> Line {
    let mut ok = true;
    let mut details = Vec::new();
    for p in ["3/2", "2", "3"] {
        let options = SuiteOptions { p: r(p), tol: r("1e-9") };
        let (pass, detail) = suite_line(SuiteKind::Thm2, &options, Duration::from_secs(100));
        ok &= pass;
        details.push(format!("p={p}: {detail}"));
    }
    line(ok, details.join("; "))
}

fn replay() -> Line {
    let (ok, detail) = suite_line(SuiteKind::Replay, &SuiteOptions::default(), Duration::from_secs(300));
    line(ok, detail)
}

fn set_and_splice() -> Line {
    let (hl_ok, hl) = suite_line(SuiteKind::Hl, &SuiteOptions::default(), Duration::from_secs(300));
    let (ds_ok, ds) = suite_line(SuiteKind::Ds, &SuiteOptions::default(), Duration::from_secs(300));
    line(hl_ok && ds_ok, format!("{hl}; {ds}"))
}

fn oracle_equivalence() -> Line {
    let start = Instant::now();
    let mut ok = true;
    let mut points = 0;
    let mut levels = 0;
    let mut max_gap = 0.0f64;
    for i in 0..100u64 {
        let inst = random_instance(SEED + i, 6);
        let oracle = grid_oracle(&inst, 10_000).unwrap();
        ok &= oracle.aligned && oracle.consistent(1e-9);
        points += oracle.values.len();
        max_gap = max_gap.max(oracle.max_gap());

        let profile = MaximalProfile::new(&inst.function, &inst.measure);
        let crit = profile.positive_critical();
        let mut lambdas: Vec<Rational> = crit.to_vec();
        lambdas.extend(crit.windows(2).map(|w| w[0].midpoint(&w[1])));
        if let (Some(first), Some(last)) = (crit.first(), crit.last()) {
            lambdas.push(first * r("1/2"));
            lambdas.push(last + Rational::one());
        }
        for l in &lambdas {
            levels += 1;
            ok &= superlevel_set(&inst.function, &inst.measure, l).unwrap()
                == brute_superlevel_set(&inst.function, &inst.measure, l).unwrap();
        }
    }
    line(
        ok,
        format!(
            "100 instances, {points} grid points within bound (max gap {max_gap:.1e}), {levels} level sets equal, {:.2?}",
            start.elapsed()
        ),
    )
}

fn equimeasurability() -> Line {
    let mut ok = true;
    let mut count = 0;
    for i in 0..SUITE_SIZE as u64 {
        for size in [MAX_SIZE / 2, MAX_SIZE] {
            ok &= check_equimeasurable(&random_instance(SEED + i, size)).passed();
            count += 1;
        }
    }
    line(ok, format!("{count} instances, exact equality at every critical value"))
}

type Criterion = (&'static str, fn() -> Line);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("C_2 bracket", c2_bracket),
        ("sharpness profile grid", sharpness_grid),
        ("rearranged level sets dominate (1000 instances)", level_sets),
        ("weak-type bound, p in {3/2, 2, 3}", weak_type),
        ("covering and splice replay (1000 pairs)", replay),
        ("set inequality and symmetric splicing (1000 each)", set_and_splice),
        ("grid and brute-force oracles", oracle_equivalence),
        ("equimeasurability", equimeasurability),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        if !result.passed {
            failures += 1;
        }
        println!("{} [{}] {name}: {}", if result.passed { "PASS" } else { "FAIL" }, i + 1, result.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
