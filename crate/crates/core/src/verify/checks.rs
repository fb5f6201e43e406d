use crate::constants::cp_constant;
use crate::exactnum::Rational;
use crate::maximal::MaximalProfile;
use crate::measure::{IntervalSet, Measure1D};
use crate::stepfn::{distribution, first_asymmetric_level, rearrange, weak_lp_norm, StepFunction};

use super::{set_integral, Instance, Ledger, Report};

/// Both sides' positive critical averages, the midpoints between consecutive
/// ones, half the smallest, and one past the largest.
pub fn comparison_levels(left: &MaximalProfile, right: &MaximalProfile) -> Vec<Rational> {
    let mut crit: Vec<Rational> = left.positive_critical().iter().chain(right.positive_critical()).cloned().collect();
    crit.sort();
    crit.dedup();
    let mut out = crit.clone();
    if let (Some(first), Some(last)) = (crit.first(), crit.last()) {
        out.push(first * Rational::frac(1, 2));
        out.push(last + Rational::one());
    }
    out.extend(crit.windows(2).map(|w| w[0].midpoint(&w[1])));
    out.sort();
    out
}

/// `μ(E_λ^μ(f)) ≤ |E_λ(f*)|` at the given levels (or [`comparison_levels`]).
pub fn check_level_set_inequality(inst: &Instance, levels: Option<&[Rational]>) -> Report {
    let mut ledger = Ledger::new("thm1", inst.seed);
    let fstar = match rearrange(&inst.function, &inst.measure) {
        Ok(f) => f,
        Err(e) => return ledger.fail_with(e.to_string()),
    };
    let left = MaximalProfile::new(&inst.function, &inst.measure);
    let right = MaximalProfile::new(&fstar, &Measure1D::lebesgue());
    let auto;
    let levels = match levels {
        Some(l) => l,
        None => {
            auto = comparison_levels(&left, &right);
            &auto
        }
    };
    for lambda in levels {
        match (left.level_measure(lambda), right.level_measure(lambda)) {
            (Ok(l), Ok(r)) => {
                ledger.le_ext("mu(E_lambda(f)) <= |E_lambda(f*)|", lambda, &l, &r);
            }
            (Err(e), _) | (_, Err(e)) => return ledger.fail_with(e.to_string()),
        }
    }
    ledger.finish()
}

/// `‖M_μ f‖_{p,∞} ≤ C_p ‖f‖_{p,∞} + tol`, with the upper end of the certified
/// bracket for `C_p`.
pub fn check_weak_type_bound(inst: &Instance, p: &Rational, tol: &Rational) -> Report {
    let mut ledger = Ledger::new("thm2", inst.seed);
    let run = || -> crate::Result<(f64, f64)> {
        let cp = cp_constant(p, &Rational::frac(1, 1_000_000_000_000_000))?;
        let lhs = MaximalProfile::new(&inst.function, &inst.measure).weak_norm(p)?;
        let norm = weak_lp_norm(&inst.function, &inst.measure, p)?;
        Ok((lhs.value, cp.cp_high.to_f64() * norm.value))
    };
    match run() {
        Ok((lhs, rhs)) => {
            ledger.le_f64("maximal weak norm <= C_p * weak norm + tol", p, lhs, rhs + tol.to_f64());
            ledger.finish()
        }
        Err(e) => ledger.fail_with(e.to_string()),
    }
}

/// `∫_E f dμ ≤ ∫_{E*} f*(x) dx` with `E* = (−μ(E)/2, μ(E)/2)`.
pub fn check_hl_set_inequality(inst: &Instance, set: &IntervalSet) -> Report {
    let mut ledger = Ledger::new("hl", inst.seed);
    let Some(mass) = super::random::finite_measure(&inst.measure, set) else {
        return ledger.fail_with("μ(E) is infinite");
    };
    let fstar = match rearrange(&inst.function, &inst.measure) {
        Ok(f) => f,
        Err(e) => return ledger.fail_with(e.to_string()),
    };
    let Some(lhs) = set_integral(&inst.function, &inst.measure, set) else {
        return ledger.fail_with("∫_E f dμ is not finite");
    };
    let half = &mass * Rational::frac(1, 2);
    let rhs = fstar.lebesgue_integral(&(-&half), &half);
    ledger.le("int_E f dmu <= int_E* f*", set, &lhs, &rhs);
    ledger.finish()
}

/// `∫_{−a}^{b} f ≤ ∫_{−a}^{b} f*` (Lebesgue) for distributionally symmetric `f`.
pub fn check_symmetric_splice(f: &StepFunction, a: &Rational, b: &Rational) -> Report {
    let mut ledger = Ledger::new("ds", 0);
    if a.is_negative() || b.is_negative() {
        return ledger.fail_with("a and b must be nonnegative");
    }
    if let Some(t) = first_asymmetric_level(f) {
        ledger.holds("distributional symmetry", &t, false);
        return ledger.fail_with(format!("f is not distributionally symmetric at level {t}"));
    }
    let fstar = match rearrange(f, &Measure1D::lebesgue()) {
        Ok(s) => s,
        Err(e) => return ledger.fail_with(e.to_string()),
    };
    let lo = -a;
    let lhs = f.lebesgue_integral(&lo, b);
    let rhs = fstar.lebesgue_integral(&lo, b);
    ledger.le("int f <= int f*", &format!("[-{a}, {b}]"), &lhs, &rhs);
    ledger.finish()
}

/// `λ_f` under `μ` equals `λ_{f*}` under Lebesgue at every critical value of
/// either and between consecutive ones.
pub fn check_equimeasurable(inst: &Instance) -> Report {
    let mut ledger = Ledger::new("equimeasurable", inst.seed);
    let fstar = match rearrange(&inst.function, &inst.measure) {
        Ok(f) => f,
        Err(e) => return ledger.fail_with(e.to_string()),
    };
    let d = distribution(&inst.function, &inst.measure);
    let ds = distribution(&fstar, &Measure1D::lebesgue());
    let mut ts: Vec<Rational> = d.critical_values().into_iter().chain(ds.critical_values()).collect();
    ts.sort();
    ts.dedup();
    let mids: Vec<Rational> = ts.windows(2).map(|w| w[0].midpoint(&w[1])).collect();
    ts.extend(mids);
    for t in &ts {
        match (d.eval(t), ds.eval(t)) {
            (Ok(l), Ok(r)) => {
                ledger.eq("lambda_f(t) = lambda_f*(t)", t, &l, &r);
            }
            (Err(e), _) | (_, Err(e)) => return ledger.fail_with(e.to_string()),
        }
    }
    ledger.finish()
}
