use crate::covering::{decompose, IntervalFamily};
use crate::error::{Error, Result};
use crate::exactnum::{ExtRational, Rational};
use crate::maximal::{superlevel_set, MaximalProfile};
use crate::measure::{cumulative, IntervalSet, Measure1D, OpenInterval};
use crate::stepfn::{is_distributionally_symmetric, rearrange, splice, StepFunction};

use super::{set_integral, Instance, Ledger, Report};

const MAX_DEPTH: u32 = 8;

/// Dyadic points of each component of `set` (unbounded ends cut to a window of
/// length 4), coarse levels first and components interleaved within a level.
fn sample_points(set: &IntervalSet, count: usize) -> Vec<Rational> {
    let window = Rational::from_integer(4);
    let spans: Vec<(Rational, Rational)> = set
        .components()
        .iter()
        .map(|c| match (&c.left, &c.right) {
            (ExtRational::Finite(l), ExtRational::Finite(r)) => (l.clone(), r.clone()),
            (ExtRational::Finite(l), _) => (l.clone(), l + &window),
            (_, ExtRational::Finite(r)) => (r - &window, r.clone()),
            _ => (Rational::from_integer(-2), Rational::from_integer(2)),
        })
        .collect();
    let mut out = Vec::new();
    for depth in 1..=MAX_DEPTH {
        let denom = 1i64 << depth;
        for (l, r) in &spans {
            for k in (1..denom).step_by(2) {
                if out.len() == count {
                    return out;
                }
                out.push(l + &((r - l) * Rational::frac(k, denom)));
            }
        }
    }
    out
}

/// Up to `n` open intervals, each containing a sample point of `E_λ` and
/// carrying a μ-average of `f` above `λ`.
pub fn witness_family(inst: &Instance, lambda: &Rational, n: usize) -> Result<IntervalFamily> {
    let profile = MaximalProfile::new(&inst.function, &inst.measure);
    let level = profile.superlevel(lambda)?;
    let mut intervals = Vec::new();
    for x in sample_points(&level.set, n) {
        let iv = profile
            .witness_interval(&x, lambda)
            .ok_or_else(|| Error::Numeric(format!("no witness interval at {x} although it lies in E_λ")))?;
        intervals.push(iv);
    }
    Ok(IntervalFamily::new(intervals))
}

/// Witness intervals for `E_λ`, their two-family decomposition, and every link
/// of the splice argument from `λμ(F) < ∫_F f dμ` to `(−B, B) ⊆ E_λ(f*)`.
pub fn proof_replay(inst: &Instance, lambda: &Rational, n: usize) -> Report {
    let mut ledger = Ledger::new("replay", inst.seed);
    if n == 0 {
        return ledger.fail_with("N must be positive");
    }
    let level = match superlevel_set(&inst.function, &inst.measure, lambda) {
        Ok(set) => set,
        Err(e) => return ledger.fail_with(e.to_string()),
    };
    if level.is_empty() {
        return ledger.fail_with("nothing to replay: E_λ is empty");
    }
    let mut previous = Rational::zero();
    let mut family = IntervalFamily::default();
    for k in 1..=n {
        family = match witness_family(inst, lambda, k) {
            Ok(fam) => fam,
            Err(e) => return ledger.fail_with(e.to_string()),
        };
        let union = family.union();
        ledger.holds("F(N) inside E_lambda", &k, union.is_subset_of(&level));
        let Some(m) = super::random::finite_measure(&inst.measure, &union) else {
            return ledger.fail_with("witness union has infinite measure");
        };
        ledger.le("mu(F(N-1)) <= mu(F(N))", &k, &previous, &m);
        previous = m;
    }
    let (first, second) = decompose(&family);
    ledger.holds("first family pairwise disjoint", &"A1", first.is_pairwise_disjoint());
    ledger.holds("second family pairwise disjoint", &"A2", second.is_pairwise_disjoint());
    ledger.eq("union preserved", &"F", &first.union().union(&second.union()), &family.union());
    match chain(&mut ledger, inst, lambda, &first, &second) {
        Ok(()) => ledger.finish(),
        Err(e) => ledger.fail_with(e.to_string()),
    }
}

/// The splice chain for explicitly given families. Each interval must carry a
/// μ-average above `λ` and each family must be pairwise disjoint.
pub fn replay_chain(inst: &Instance, lambda: &Rational, first: &IntervalFamily, second: &IntervalFamily) -> Report {
    let mut ledger = Ledger::new("replay", inst.seed);
    if !lambda.is_positive() {
        return ledger.fail_with("λ must be positive");
    }
    if first.is_empty() && second.is_empty() {
        return ledger.fail_with("nothing to replay: both families are empty");
    }
    ledger.holds("first family pairwise disjoint", &"A1", first.is_pairwise_disjoint());
    ledger.holds("second family pairwise disjoint", &"A2", second.is_pairwise_disjoint());
    match chain(&mut ledger, inst, lambda, first, second) {
        Ok(()) => ledger.finish(),
        Err(e) => ledger.fail_with(e.to_string()),
    }
}

fn finite(x: ExtRational, what: &str) -> Result<Rational> {
    x.finite().cloned().ok_or_else(|| Error::Undefined(format!("{what} is infinite")))
}

fn total_integral(f: &StepFunction, mu: &Measure1D) -> Result<Rational> {
    finite(cumulative(mu, Some(f)).integral_open(&ExtRational::NegInf, &ExtRational::PosInf), "∫ f dμ")
}

fn chain(ledger: &mut Ledger, inst: &Instance, lambda: &Rational, first: &IntervalFamily, second: &IntervalFamily) -> Result<()> {
    let (f, mu) = (&inst.function, &inst.measure);
    let g = cumulative(mu, Some(f));
    let two = Rational::from_integer(2);
    let half = Rational::frac(1, 2);

    // every witness interval beats λ, and sums over a disjoint family equal the union
    for (name, fam) in [("F1", first), ("F2", second)] {
        let mut mass_sum = Rational::zero();
        let mut int_sum = Rational::zero();
        for iv in &fam.intervals {
            let m = finite(mu.interval_measure(&iv.left, &iv.right), "μ(I)")?;
            let i = finite(g.integral_open(&iv.left, &iv.right), "∫_I f dμ")?;
            ledger.lt("lambda mu(I) < int_I f dmu", iv, &(lambda * &m), &i);
            mass_sum += &m;
            int_sum += &i;
        }
        if fam.is_empty() {
            continue;
        }
        let union = fam.union();
        let m = finite(mu.measure_of(&union), "μ(F_i)")?;
        let i = set_integral(f, mu, &union).ok_or_else(|| Error::Undefined("∫_{F_i} f dμ is infinite".into()))?;
        ledger.eq("sum of mu(I) = mu(F_i)", &name, &mass_sum, &m);
        ledger.eq("sum of int_I f = int_F_i f", &name, &int_sum, &i);
        ledger.lt("lambda mu(F_i) < int_F_i f dmu", &name, &(lambda * &m), &i);
    }

    let u1 = first.union();
    let u2 = second.union();
    let mu_both = mu.restrict_to(&u1.intersection(&u2))?;
    let mu_12 = mu.restrict_to_difference(&u1, &u2)?;
    let mu_21 = mu.restrict_to_difference(&u2, &u1)?;
    let a = &finite(mu.measure_of(&u1.union(&u2)), "μ(F1 ∪ F2)")? * &half;
    let b = &finite(mu_both.total_mass(), "μ(F1 ∩ F2)")? * &half;
    let b12 = &finite(mu_12.total_mass(), "μ(F1 \\ F2)")? * &half;
    let b21 = &finite(mu_21.total_mass(), "μ(F2 \\ F1)")? * &half;
    let mu_f1 = finite(mu.measure_of(&u1), "μ(F1)")?;
    let mu_f2 = finite(mu.measure_of(&u2), "μ(F2)")?;
    let big = &(&b + &b12) + &b21;
    ledger.eq("a = b + b12 + b21", &"bookkeeping", &a, &big);
    ledger.eq("mu(F1) = 2(b + b12)", &"bookkeeping", &mu_f1, &(&two * &(&b + &b12)));
    ledger.eq("mu(F2) = 2(b + b21)", &"bookkeeping", &mu_f2, &(&two * &(&b + &b21)));

    let f1s = rearrange(f, &mu_both)?;
    let f12s = rearrange(f, &mu_12)?;
    let f21s = rearrange(f, &mu_21)?;
    let int_both = total_integral(f, &mu_both)?;
    let int_12 = total_integral(f, &mu_12)?;
    let int_21 = total_integral(f, &mu_21)?;
    let int_1s = f1s.lebesgue_integral(&-&b, &b);
    let int_12s = f12s.lebesgue_integral(&-&b12, &b12);
    let int_21s = f21s.lebesgue_integral(&-&b21, &b21);
    ledger.eq("int_{F1 cap F2} f dmu = int f1*", &"rearrangement", &int_both, &int_1s);
    ledger.eq("int_{F1 minus F2} f dmu = int f12*", &"rearrangement", &int_12, &int_12s);
    ledger.eq("int_{F2 minus F1} f dmu = int f21*", &"rearrangement", &int_21, &int_21s);
    if !first.is_empty() {
        ledger.lt("lambda mu(F1) < int f1* + int f12*", &"F1", &(lambda * &mu_f1), &(&int_1s + &int_12s));
    }
    if !second.is_empty() {
        ledger.lt("lambda mu(F2) < int f1* + int f21*", &"F2", &(lambda * &mu_f2), &(&int_1s + &int_21s));
    }

    let diamond = splice(&f1s, &f12s, &f21s, &b, &b12, &b21)?;
    let left_end = -&b;
    let spliced = diamond.lebesgue_integral(&left_end, &big);
    let pieces_sum = &(&int_1s + &f12s.lebesgue_integral(&Rational::zero(), &b12)) + &f21s.lebesgue_integral(&Rational::zero(), &b21);
    ledger.eq("int_{-b}^{B} splice = int f1* + half int f12* + half int f21*", &"splice", &spliced, &pieces_sum);
    let width = &(&two * &b) + &(&b12 + &b21);
    ledger.lt("lambda (2b + b12 + b21) < int_{-b}^{B} splice", &"splice", &(lambda * &width), &spliced);

    let fstar = rearrange(f, mu)?;
    ledger.holds("splice is distributionally symmetric", &"splice", is_distributionally_symmetric(&diamond));
    let dstar = rearrange(&diamond, &Measure1D::lebesgue())?;
    let mut probes: Vec<Rational> = dstar.breakpoints().into_iter().chain(fstar.breakpoints()).collect();
    probes.sort();
    probes.dedup();
    let mids: Vec<Rational> = probes.windows(2).map(|w| w[0].midpoint(&w[1])).collect();
    probes.extend(mids);
    for x in &probes {
        ledger.le("(splice)* <= f*", x, &dstar.value_at(x), &fstar.value_at(x));
    }
    let neg_big = -&big;
    for (lo, hi) in [(&left_end, &big), (&neg_big, &b)] {
        let span = format!("({lo}, {hi})");
        let lhs = diamond.lebesgue_integral(lo, hi);
        let rhs = fstar.lebesgue_integral(lo, hi);
        ledger.le("int splice <= int f*", &span, &lhs, &rhs);
        ledger.lt("lambda |I| < int_I f*", &span, &(lambda * &width), &rhs);
    }

    if big.is_positive() {
        let target = IntervalSet::from_interval(OpenInterval::bounded(neg_big, big.clone())?);
        let level = superlevel_set(&fstar, &Measure1D::lebesgue(), lambda)?;
        ledger.holds("(-B, B) inside E_lambda(f*)", &format!("B = {big}"), target.is_subset_of(&level));
    }
    Ok(())
}
