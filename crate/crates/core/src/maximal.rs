//! The uncentered maximal operator `M_μ f(x) = sup_{I ∋ x, μ(I) > 0} (1/μ(I)) ∫_I f dμ`
//! over open intervals.
//!
//! Everything runs on the two cumulative functions `G = ∫ f dμ` and `U = μ`,
//! built on a shared breakpoint set so that `L = G − λU` is available at every
//! knot for any `λ` without rebuilding.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ApproxReal, ExtRational, Rational};
use crate::measure::{cumulative::joint_breakpoints, CumulativeFn, IntervalSet, Measure1D, OpenInterval};
use crate::stepfn::{max_power_product, StepFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Side {
    Left,
    Right,
}

/// One-sided position at a knot: `Left` is `x⁻`, `Right` is `x⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct KnotSide {
    pub knot: usize,
    pub side: Side,
}

#[derive(Clone, Debug)]
struct Cell {
    value: Rational,
    density: Rational,
}

/// Shared state for every λ-dependent computation on one `(f, μ)` pair.
#[derive(Clone, Debug)]
pub(crate) struct Engine {
    xs: Vec<Rational>,
    g: CumulativeFn,
    u: CumulativeFn,
    background: Rational,
    /// `cells[k]` lies between knot `k − 1` and knot `k`.
    cells: Vec<Cell>,
}

impl Engine {
    pub(crate) fn new(f: &StepFunction, mu: &Measure1D) -> Self {
        let xs = joint_breakpoints(mu, Some(f));
        let g = CumulativeFn::build_on(mu, Some(f), &Rational::zero(), &xs);
        let u = CumulativeFn::build_on(mu, None, &Rational::one(), &xs);
        let background = mu.background_density().clone();
        let mut cells = Vec::with_capacity(xs.len() + 1);
        cells.push(Cell { value: Rational::zero(), density: background.clone() });
        for w in xs.windows(2) {
            let mid = w[0].midpoint(&w[1]);
            cells.push(Cell { value: f.value_at(&mid), density: mu.density_at(&mid).clone() });
        }
        if !xs.is_empty() {
            cells.push(Cell { value: Rational::zero(), density: background.clone() });
        }
        Engine { xs, g, u, background, cells }
    }

    pub(crate) fn has_atom(&self, j: usize) -> bool {
        let k = &self.u.knots()[j];
        k.left != k.right
    }

    pub(crate) fn g_at(&self, p: KnotSide) -> &Rational {
        let k = &self.g.knots()[p.knot];
        match p.side {
            Side::Left => &k.left,
            Side::Right => &k.right,
        }
    }

    pub(crate) fn u_at(&self, p: KnotSide) -> &Rational {
        let k = &self.u.knots()[p.knot];
        match p.side {
            Side::Left => &k.left,
            Side::Right => &k.right,
        }
    }

    fn l_at(&self, p: KnotSide, lambda: &Rational) -> Rational {
        self.g_at(p) - lambda * self.u_at(p)
    }

    /// Knot sides that differ from each other; the right side is dropped where
    /// there is no atom.
    pub(crate) fn distinct_sides(&self) -> Vec<KnotSide> {
        let mut out = Vec::with_capacity(2 * self.xs.len());
        for j in 0..self.xs.len() {
            out.push(KnotSide { knot: j, side: Side::Left });
            if self.has_atom(j) {
                out.push(KnotSide { knot: j, side: Side::Right });
            }
        }
        out
    }

    /// Averages over every interval with candidate endpoints.
    fn candidate_averages(&self) -> Vec<Rational> {
        let sides = self.distinct_sides();
        let mut out = Vec::new();
        if self.background.is_positive() {
            out.push(Rational::zero());
        }
        for (i, a) in sides.iter().enumerate() {
            for b in &sides[i + 1..] {
                let mass = self.u_at(*b) - self.u_at(*a);
                if mass.is_positive() {
                    out.push((self.g_at(*b) - self.g_at(*a)) / mass);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn maximal_at(&self, x: &Rational) -> Result<Rational> {
        // (G, U) at each admissible left endpoint a⁺ and right endpoint b⁻
        let mut lefts: Vec<(Rational, Rational)> = Vec::new();
        let mut rights: Vec<(Rational, Rational)> = Vec::new();
        for p in self.distinct_sides() {
            let entry = (self.g_at(p).clone(), self.u_at(p).clone());
            match self.xs[p.knot].cmp(x) {
                Ordering::Less => lefts.push(entry),
                Ordering::Greater => rights.push(entry),
                Ordering::Equal => {}
            }
        }
        lefts.push((self.g.value_left(x), self.u.value_left(x)));
        rights.push((self.g.value_right(x), self.u.value_right(x)));

        let mut best: Option<Rational> = self.background.is_positive().then(Rational::zero);
        for (ga, ua) in &lefts {
            for (gb, ub) in &rights {
                let mass = ub - ua;
                if mass.is_positive() {
                    let avg = (gb - ga) / mass;
                    if best.as_ref().is_none_or(|b| avg > *b) {
                        best = Some(avg);
                    }
                }
            }
        }
        best.ok_or_else(|| Error::Undefined(format!("no interval containing {x} has positive measure")))
    }

    /// A rational open interval around `x` whose μ-average of `f` exceeds `λ`,
    /// obtained by realizing the best one-sided candidate pair with a small
    /// offset that is halved until the exact average clears `λ`.
    fn witness_interval(&self, mu: &Measure1D, x: &Rational, lambda: &Rational) -> Option<OpenInterval> {
        #[derive(Clone, Copy)]
        enum End {
            Knot(KnotSide),
            Near,
        }
        let mut lefts: Vec<(End, Rational, Rational)> = Vec::new();
        let mut rights: Vec<(End, Rational, Rational)> = Vec::new();
        for p in self.distinct_sides() {
            let entry = (End::Knot(p), self.g_at(p).clone(), self.u_at(p).clone());
            match self.xs[p.knot].cmp(x) {
                Ordering::Less => lefts.push(entry),
                Ordering::Greater => rights.push(entry),
                Ordering::Equal => {}
            }
        }
        lefts.push((End::Near, self.g.value_left(x), self.u.value_left(x)));
        rights.push((End::Near, self.g.value_right(x), self.u.value_right(x)));
        let mut best: Option<(End, End, Rational)> = None;
        for (ea, ga, ua) in &lefts {
            for (eb, gb, ub) in &rights {
                let mass = ub - ua;
                if mass.is_positive() {
                    let avg = (gb - ga) / mass;
                    if best.as_ref().is_none_or(|b| avg > b.2) {
                        best = Some((*ea, *eb, avg));
                    }
                }
            }
        }
        let (ea, eb, avg) = best?;
        if avg <= *lambda {
            return None;
        }
        let mut points: Vec<&Rational> = self.xs.iter().chain(std::iter::once(x)).collect();
        points.sort();
        points.dedup();
        let mut delta = points
            .windows(2)
            .map(|w| w[1] - w[0])
            .min()
            .unwrap_or_else(Rational::one)
            .min(Rational::one())
            * Rational::frac(1, 2);
        for _ in 0..256 {
            let a = match ea {
                End::Knot(KnotSide { knot, side: Side::Left }) => &self.xs[knot] - &delta,
                End::Knot(KnotSide { knot, side: Side::Right }) => self.xs[knot].clone(),
                End::Near => x - &delta,
            };
            let b = match eb {
                End::Knot(KnotSide { knot, side: Side::Left }) => self.xs[knot].clone(),
                End::Knot(KnotSide { knot, side: Side::Right }) => &self.xs[knot] + &delta,
                End::Near => x + &delta,
            };
            let (ae, be) = (ExtRational::Finite(a.clone()), ExtRational::Finite(b.clone()));
            if let (ExtRational::Finite(mass), ExtRational::Finite(integral)) =
                (mu.interval_measure(&ae, &be), self.integral(&a, &b))
            {
                if mass.is_positive() && integral > lambda * mass {
                    return OpenInterval::bounded(a, b).ok();
                }
            }
            delta = delta * Rational::frac(1, 2);
        }
        None
    }

    fn integral(&self, a: &Rational, b: &Rational) -> ExtRational {
        self.g.integral_open(&a.clone().into(), &b.clone().into())
    }

    /// `E_λ` together with the exact form of `λ' ↦ μ(E_λ')` on the open
    /// stretch of critical averages that contains `λ`.
    pub(crate) fn level(&self, lambda: &Rational) -> Level {
        let m = self.xs.len();
        if m == 0 {
            // f ≡ 0 and μ has constant density, so L is nonincreasing
            return Level { set: IntervalSet::empty(), form: Some(LevelForm::zero()) };
        }
        let ks = |knot, side| KnotSide { knot, side };
        let finite = |p: KnotSide| Threshold { value: ExtRational::Finite(self.l_at(p, lambda)), point: Some(p) };
        let pos_bg = self.background.is_positive();
        let at_neg_inf = if pos_bg {
            Threshold { value: ExtRational::PosInf, point: None }
        } else {
            finite(ks(0, Side::Left))
        };
        let at_pos_inf = if pos_bg {
            Threshold { value: ExtRational::NegInf, point: None }
        } else {
            finite(ks(m - 1, Side::Right))
        };

        // a[k]: inf of L(t⁺) over t left of cell k; b[k]: sup of L(t⁻) over t right of it
        let mut a = Vec::with_capacity(m + 1);
        let mut a_strict = Vec::with_capacity(m);
        a.push(at_neg_inf);
        for j in 0..m {
            let s = Threshold::min(a[j].clone(), finite(ks(j, Side::Left)));
            a_strict.push(s.clone());
            a.push(Threshold::min(s, finite(ks(j, Side::Right))));
        }
        let mut b = vec![at_pos_inf; m + 1];
        let mut b_strict = vec![Threshold { value: ExtRational::NegInf, point: None }; m];
        for j in (0..m).rev() {
            let s = Threshold::max(b[j + 1].clone(), finite(ks(j, Side::Right)));
            b_strict[j] = s.clone();
            b[j] = Threshold::max(s, finite(ks(j, Side::Left)));
        }

        let mut comps: Vec<(Bound, Bound)> = Vec::new();
        for k in 0..=m {
            let joins = k > 0 && b_strict[k - 1].value > a_strict[k - 1].value;
            for (i, frag) in self.cell_fragments(k, lambda, &a[k], &b[k]).into_iter().enumerate() {
                match comps.last_mut() {
                    Some(last) if i == 0 && joins && last.1.at == frag.0.at => last.1 = frag.1,
                    _ => comps.push(frag),
                }
            }
        }

        let mut form = Some(LevelForm::zero());
        for (l, r) in &comps {
            form = match (form, &l.u, &r.u) {
                (Some(mut acc), UValue::Finite(lu), UValue::Finite(ru)) => {
                    acc.add(ru, 1);
                    acc.add(lu, -1);
                    Some(acc)
                }
                _ => None,
            };
        }
        let set = IntervalSet::from_sorted_unchecked(
            comps.into_iter().map(|(l, r)| OpenInterval { left: l.at, right: r.at }).collect(),
        );
        Level { set, form: form.map(LevelForm::normalized) }
    }

    fn cell_bounds(&self, k: usize) -> (Bound, Bound) {
        let m = self.xs.len();
        let left = if k == 0 {
            let u = if self.background.is_positive() {
                UValue::Infinite
            } else {
                UValue::constant(self.u.knots()[0].left.clone())
            };
            Bound { at: ExtRational::NegInf, u }
        } else {
            Bound { at: self.xs[k - 1].clone().into(), u: UValue::constant(self.u.knots()[k - 1].right.clone()) }
        };
        let right = if k == m {
            let u = if self.background.is_positive() {
                UValue::Infinite
            } else {
                UValue::constant(self.u.knots()[m - 1].right.clone())
            };
            Bound { at: ExtRational::PosInf, u }
        } else {
            Bound { at: self.xs[k].clone().into(), u: UValue::constant(self.u.knots()[k].left.clone()) }
        };
        (left, right)
    }

    /// Pieces of cell `k` inside `E_λ`, given the running extrema around it.
    fn cell_fragments(&self, k: usize, lambda: &Rational, a: &Threshold, b: &Threshold) -> Vec<(Bound, Bound)> {
        let (lo, hi) = self.cell_bounds(k);
        if b.value > a.value {
            return vec![(lo, hi)];
        }
        let reference = if k == 0 {
            KnotSide { knot: 0, side: Side::Left }
        } else {
            KnotSide { knot: k - 1, side: Side::Right }
        };
        let cell = &self.cells[k];
        let line = CellLine {
            reference,
            x: &self.xs[reference.knot],
            value: self.l_at(reference, lambda),
            slope: &cell.density * (&cell.value - lambda),
            pole: &cell.value,
        };
        let mut frags = Vec::with_capacity(2);
        if let Some(frag) = self.solve(&line, a, Ordering::Greater, &lo, &hi) {
            frags.push(frag);
        }
        if let Some(frag) = self.solve(&line, b, Ordering::Less, &lo, &hi) {
            frags.push(frag);
        }
        frags.sort_by(|x, y| x.0.at.cmp(&y.0.at));
        let mut out: Vec<(Bound, Bound)> = Vec::with_capacity(2);
        for frag in frags {
            match out.last_mut() {
                Some(last) if frag.0.at < last.1.at => {
                    if frag.1.at > last.1.at {
                        last.1 = frag.1;
                    }
                }
                _ => out.push(frag),
            }
        }
        out
    }

    /// `{t ∈ (lo, hi) : L(t) ⋚ threshold}` with `want` the required ordering of `L(t)`.
    fn solve(
        &self,
        line: &CellLine<'_>,
        threshold: &Threshold,
        want: Ordering,
        lo: &Bound,
        hi: &Bound,
    ) -> Option<(Bound, Bound)> {
        let whole = Some((lo.clone(), hi.clone()));
        let level = match &threshold.value {
            ExtRational::Finite(v) => v,
            ExtRational::NegInf => return (want == Ordering::Greater).then_some(whole).flatten(),
            ExtRational::PosInf => return (want == Ordering::Less).then_some(whole).flatten(),
        };
        if line.slope.is_zero() {
            return (line.value.cmp(level) == want).then_some(whole).flatten();
        }
        let t = line.x + (level - &line.value) / &line.slope;
        let point = threshold.point.expect("finite thresholds come from knots");
        let g_ref = self.g_at(line.reference);
        let u_ref = self.u_at(line.reference);
        let residue = (self.g_at(point) - g_ref) - line.pole * (self.u_at(point) - u_ref);
        let solved = Bound {
            at: t.clone().into(),
            u: UValue::Finite(LevelForm {
                constant: self.u_at(point).clone(),
                terms: vec![(line.pole.clone(), residue)],
            }),
        };
        // above the line to the right of t when the slope agrees with `want`
        let rightward = (line.slope.signum() == Ordering::Greater) == (want == Ordering::Greater);
        let (l, r) = if rightward {
            if hi.at <= t {
                return None;
            }
            (if lo.at < t { solved } else { lo.clone() }, hi.clone())
        } else {
            if lo.at >= t {
                return None;
            }
            (lo.clone(), if hi.at > t { solved } else { hi.clone() })
        };
        Some((l, r))
    }
}

struct CellLine<'a> {
    reference: KnotSide,
    x: &'a Rational,
    value: Rational,
    slope: Rational,
    pole: &'a Rational,
}

#[derive(Clone, Debug)]
struct Threshold {
    value: ExtRational,
    point: Option<KnotSide>,
}

impl Threshold {
    fn min(a: Threshold, b: Threshold) -> Threshold {
        if b.value < a.value {
            b
        } else {
            a
        }
    }

    fn max(a: Threshold, b: Threshold) -> Threshold {
        if b.value > a.value {
            b
        } else {
            a
        }
    }
}

#[derive(Clone, Debug)]
enum UValue {
    Infinite,
    Finite(LevelForm),
}

impl UValue {
    fn constant(c: Rational) -> Self {
        UValue::Finite(LevelForm { constant: c, terms: Vec::new() })
    }
}

#[derive(Clone, Debug)]
struct Bound {
    at: ExtRational,
    u: UValue,
}

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub set: IntervalSet,
    pub form: Option<LevelForm>,
}

/// `λ ↦ c + Σ R_φ / (φ − λ)`: the exact shape of `μ(E_λ)` between two
/// consecutive critical averages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelForm {
    pub constant: Rational,
    /// `(φ, R_φ)`, sorted by `φ`, with nonzero residues.
    pub terms: Vec<(Rational, Rational)>,
}

impl LevelForm {
    pub fn zero() -> Self {
        LevelForm { constant: Rational::zero(), terms: Vec::new() }
    }

    fn add(&mut self, other: &LevelForm, sign: i64) {
        let s = Rational::from_integer(sign);
        self.constant += &(&other.constant * &s);
        self.terms.extend(other.terms.iter().map(|(phi, r)| (phi.clone(), r * &s)));
    }

    fn normalized(mut self) -> Self {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (phi, r) in self.terms.drain(..) {
            *merged.entry(phi).or_insert_with(Rational::zero) += &r;
        }
        self.terms = merged.into_iter().filter(|(_, r)| !r.is_zero()).collect();
        self
    }

    /// Exact value; fails at a pole.
    pub fn eval(&self, lambda: &Rational) -> Result<Rational> {
        let mut total = self.constant.clone();
        for (phi, r) in &self.terms {
            total += &(r.checked_div(&(phi - lambda))?);
        }
        Ok(total)
    }

    pub fn eval_f64(&self, lambda: f64) -> f64 {
        self.constant.to_f64() + self.terms.iter().map(|(phi, r)| r.to_f64() / (phi.to_f64() - lambda)).sum::<f64>()
    }

    pub fn derivative_f64(&self, lambda: f64) -> f64 {
        self.terms
            .iter()
            .map(|(phi, r)| {
                let d = phi.to_f64() - lambda;
                r.to_f64() / (d * d)
            })
            .sum()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }
}

fn check_lambda(lambda: &Rational) -> Result<()> {
    if !lambda.is_positive() {
        return Err(Error::Argument(format!("level must be positive, got {lambda}")));
    }
    Ok(())
}

/// `E_λ = {x : M_μ f(x) > λ}`.
pub fn superlevel_set(f: &StepFunction, mu: &Measure1D, lambda: &Rational) -> Result<IntervalSet> {
    check_lambda(lambda)?;
    Ok(Engine::new(f, mu).level(lambda).set)
}

/// `M_μ f(x)`.
pub fn maximal_at(f: &StepFunction, mu: &Measure1D, x: &Rational) -> Result<Rational> {
    Engine::new(f, mu).maximal_at(x)
}

/// Sorted distinct averages over all intervals whose endpoints are one-sided
/// breakpoints of `f` or `μ` (or infinite).
pub fn critical_averages(f: &StepFunction, mu: &Measure1D) -> Vec<Rational> {
    Engine::new(f, mu).candidate_averages()
}

/// An open interval with rational endpoints that contains `x` and on which the
/// μ-average of `f` exceeds `λ`; `None` when `M_μ f(x) ≤ λ`.
pub fn witness_interval(f: &StepFunction, mu: &Measure1D, x: &Rational, lambda: &Rational) -> Option<OpenInterval> {
    Engine::new(f, mu).witness_interval(mu, x, lambda)
}

/// `E_λ` with its exact measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Superlevel {
    pub lambda: Rational,
    pub set: IntervalSet,
    pub measure: ExtRational,
}

/// Closed bracket `[low, high]`; `low == high` when exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub low: Rational,
    pub high: Rational,
}

impl Bracket {
    pub fn exact(x: Rational) -> Self {
        Bracket { low: x.clone(), high: x }
    }

    pub fn is_exact(&self) -> bool {
        self.low == self.high
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.low <= *x && *x <= self.high
    }
}

/// All critical averages of one `(f, μ)` pair with `E_λ` precomputed at each
/// positive one.
#[derive(Clone, Debug)]
pub struct MaximalProfile {
    engine: Engine,
    mu: Measure1D,
    critical: Vec<Rational>,
    cache: BTreeMap<Rational, Superlevel>,
}

impl MaximalProfile {
    pub fn new(f: &StepFunction, mu: &Measure1D) -> Self {
        let engine = Engine::new(f, mu);
        let critical = engine.candidate_averages();
        let mut profile = MaximalProfile { engine, mu: mu.clone(), critical, cache: BTreeMap::new() };
        let cache = profile
            .positive_critical()
            .iter()
            .map(|l| (l.clone(), profile.compute(l)))
            .collect();
        profile.cache = cache;
        profile
    }

    fn compute(&self, lambda: &Rational) -> Superlevel {
        let set = self.engine.level(lambda).set;
        let measure = self.mu.measure_of(&set);
        Superlevel { lambda: lambda.clone(), set, measure }
    }

    pub fn critical_lambdas(&self) -> &[Rational] {
        &self.critical
    }

    pub fn positive_critical(&self) -> &[Rational] {
        let start = self.critical.partition_point(|c| !c.is_positive());
        &self.critical[start..]
    }

    pub fn superlevel(&self, lambda: &Rational) -> Result<Superlevel> {
        check_lambda(lambda)?;
        Ok(match self.cache.get(lambda) {
            Some(s) => s.clone(),
            None => self.compute(lambda),
        })
    }

    pub fn level_measure(&self, lambda: &Rational) -> Result<ExtRational> {
        check_lambda(lambda)?;
        Ok(match self.cache.get(lambda) {
            Some(s) => s.measure.clone(),
            None => self.mu.measure_of(&self.engine.level(lambda).set),
        })
    }

    /// The form of `μ(E_λ)` on the open stretch `(low, high)` between two
    /// consecutive critical values (`high = None` for the last, unbounded one).
    pub fn level_form(&self, low: &Rational, high: Option<&Rational>) -> Result<LevelForm> {
        let probe = match high {
            Some(h) => low.midpoint(h),
            None => low + Rational::one(),
        };
        check_lambda(&probe)?;
        self.engine
            .level(&probe)
            .form
            .ok_or_else(|| Error::Undefined(format!("μ(E_λ) is infinite at λ = {probe}")))
    }

    /// Consecutive stretches `(c_i, c_{i+1})` of positive levels, starting at 0.
    fn stretches(&self) -> Vec<(Rational, Option<Rational>)> {
        let pos = self.positive_critical();
        let mut out = Vec::with_capacity(pos.len() + 1);
        let mut low = Rational::zero();
        for c in pos {
            out.push((low, Some(c.clone())));
            low = c.clone();
        }
        out.push((low, None));
        out
    }

    pub fn maximal_at(&self, x: &Rational) -> Result<Rational> {
        self.engine.maximal_at(x)
    }

    pub fn witness_interval(&self, x: &Rational, lambda: &Rational) -> Option<OpenInterval> {
        self.engine.witness_interval(&self.mu, x, lambda)
    }

    /// `(M_μ f)*(x) = inf{λ > 0 : μ(E_λ) ≤ 2|x|}`.
    pub fn rearranged_at(&self, x: &Rational, tol: &Rational) -> Result<Bracket> {
        if !tol.is_positive() {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        let target = ExtRational::Finite(x.abs() * Rational::from_integer(2));
        let pos = self.positive_critical();
        let Some(i) = pos.iter().position(|c| self.cache[c].measure <= target) else {
            // no positive averages at all: M_μ f vanishes wherever it is defined
            return Ok(Bracket::exact(Rational::zero()));
        };
        let high = pos[i].clone();
        let low = if i == 0 { Rational::zero() } else { pos[i - 1].clone() };
        let form = self.level_form(&low, Some(&high))?;
        let target = target.finite().expect("finite").clone();
        if form.eval(&high)? > target {
            return Ok(Bracket::exact(high));
        }
        let (mut lo, mut hi) = (low, high);
        while &hi - &lo > *tol {
            let mid = lo.midpoint(&hi);
            if form.eval(&mid)? <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Bracket { low: lo, high: hi })
    }

    /// `sup_λ λ·μ(E_λ)^{1/p}`.
    ///
    /// On each stretch the value at the left end is exact, the right end is a
    /// limit of the exact form, and interior maxima are located from the sign
    /// of the derivative of `ln λ + (1/p) ln μ(E_λ)`.
    pub fn weak_norm(&self, p: &Rational) -> Result<ApproxReal> {
        if *p <= Rational::one() {
            return Err(Error::Domain(format!("weak-L^p norm needs p > 1, got {p}")));
        }
        let pf = p.to_f64();
        let mut candidates: Vec<(Rational, Rational)> = Vec::new();
        for (low, high) in self.stretches() {
            if low.is_positive() {
                if let ExtRational::Finite(m) = &self.cache[&low].measure {
                    candidates.push((low.clone(), m.clone()));
                }
            }
            let Some(high) = high else { continue };
            let form = self.level_form(&low, Some(&high))?;
            candidates.push((high.clone(), form.eval(&high)?));
            if form.is_constant() {
                continue;
            }
            for lambda in interior_maxima(&form, low.to_f64(), high.to_f64(), pf) {
                let lambda = Rational::from_f64_exact(lambda)?;
                if lambda > low && lambda < high {
                    let m = form.eval(&lambda)?;
                    candidates.push((lambda, m));
                }
            }
        }
        max_power_product(&candidates, p)
    }
}

/// Local maxima of `ψ(λ) = ln λ + ln F(λ) / p` on `(low, high)`.
fn interior_maxima(form: &LevelForm, low: f64, high: f64, p: f64) -> Vec<f64> {
    const SAMPLES: usize = 64;
    let dpsi = |l: f64| {
        let m = form.eval_f64(l);
        if m <= 0.0 {
            return f64::NAN;
        }
        1.0 / l + form.derivative_f64(l) / (p * m)
    };
    let grid: Vec<f64> = (1..SAMPLES).map(|i| low + (high - low) * i as f64 / SAMPLES as f64).collect();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (da, db) = (dpsi(a), dpsi(b));
        if !(da > 0.0 && db <= 0.0) {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if dpsi(mid) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// `(M_μ f)*(x)` bracketed to width `tol`.
pub fn maximal_rearranged_at(f: &StepFunction, mu: &Measure1D, x: &Rational, tol: &Rational) -> Result<Bracket> {
    MaximalProfile::new(f, mu).rearranged_at(x, tol)
}

/// `‖M_μ f‖_{L^{p,∞}(μ)}`.
pub fn maximal_weak_norm(f: &StepFunction, mu: &Measure1D, p: &Rational) -> Result<ApproxReal> {
    MaximalProfile::new(f, mu).weak_norm(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfn::Piece;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn step(parts: &[(&str, &str, &str)]) -> StepFunction {
        StepFunction::new(
            parts.iter().map(|(l, h, v)| Piece { left: r(l), right: r(h), value: r(v) }).collect(),
        )
        .unwrap()
    }

    fn unit_box() -> StepFunction {
        step(&[("-1/2", "1/2", "1")])
    }

    fn atom_instance() -> (StepFunction, Measure1D) {
        (step(&[("-1", "1", "5")]), Measure1D::atom(r("0"), r("1")).unwrap())
    }

    #[test]
    fn box_superlevel_sets() {
        let leb = Measure1D::lebesgue();
        let e = superlevel_set(&unit_box(), &leb, &r("1/2")).unwrap();
        assert_eq!(e, IntervalSet::from_interval(OpenInterval::bounded(r("-3/2"), r("3/2")).unwrap()));
        assert!(superlevel_set(&unit_box(), &leb, &r("1")).unwrap().is_empty());
        assert!(superlevel_set(&unit_box(), &leb, &r("0")).is_err());
    }

    #[test]
    fn atom_superlevel_is_whole_line() {
        let (f, mu) = atom_instance();
        let e = superlevel_set(&f, &mu, &r("4")).unwrap();
        assert_eq!(e, IntervalSet::whole_line());
        assert_eq!(mu.measure_of(&e), ExtRational::Finite(r("1")));
        assert_eq!(critical_averages(&f, &mu), vec![r("5")]);
        assert_eq!(maximal_at(&f, &mu, &r("100")).unwrap(), r("5"));
    }

    #[test]
    fn box_pointwise_values() {
        let leb = Measure1D::lebesgue();
        assert_eq!(maximal_at(&unit_box(), &leb, &r("3/2")).unwrap(), r("1/2"));
        assert_eq!(maximal_at(&unit_box(), &leb, &r("0")).unwrap(), r("1"));
        assert_eq!(maximal_at(&unit_box(), &leb, &r("1/2")).unwrap(), r("1"));
        // 1/(x + 1/2) by calculus
        for x in ["5/8", "1", "7", "-3"] {
            let x = r(x);
            let expected = (x.abs() + r("1/2")).recip().unwrap();
            assert_eq!(maximal_at(&unit_box(), &leb, &x).unwrap(), expected);
        }
    }

    #[test]
    fn constant_on_support() {
        let mu = Measure1D::new(r("0"), vec![crate::measure::DensityPiece { left: r("0"), right: r("2"), density: r("3") }], vec![]).unwrap();
        let f = step(&[("-1", "3", "7/2")]);
        assert_eq!(maximal_at(&f, &mu, &r("1")).unwrap(), r("7/2"));
        assert_eq!(maximal_at(&f, &mu, &r("-5")).unwrap(), r("7/2"));
    }

    #[test]
    fn empty_family_is_undefined() {
        let mu = Measure1D::new(r("0"), vec![], vec![]).unwrap();
        assert!(matches!(maximal_at(&unit_box(), &mu, &r("0")), Err(Error::Undefined(_))));
    }

    #[test]
    fn box_level_form_is_exact() {
        let profile = MaximalProfile::new(&unit_box(), &Measure1D::lebesgue());
        assert_eq!(profile.critical_lambdas(), &[r("0"), r("1")]);
        let form = profile.level_form(&r("0"), Some(&r("1"))).unwrap();
        for l in ["1/7", "1/3", "1/2", "9/10"] {
            let l = r(l);
            let expected = r("2") / &l - r("1");
            assert_eq!(form.eval(&l).unwrap(), expected);
            assert_eq!(profile.level_measure(&l).unwrap(), ExtRational::Finite(expected));
        }
    }

    #[test]
    fn rearranged_maximal_function() {
        let (f, mu) = atom_instance();
        let tol = r("1/1000000");
        assert_eq!(maximal_rearranged_at(&f, &mu, &r("1/4"), &tol).unwrap(), Bracket::exact(r("5")));
        let far = maximal_rearranged_at(&f, &mu, &r("1"), &tol).unwrap();
        assert!(far.low.is_zero() && far.high <= tol);

        let b = maximal_rearranged_at(&unit_box(), &Measure1D::lebesgue(), &r("3/2"), &tol).unwrap();
        assert!(b.contains(&r("1/2")), "{b:?}");
        assert!(&b.high - &b.low <= tol);
        assert!(maximal_rearranged_at(&unit_box(), &Measure1D::lebesgue(), &r("1"), &r("0")).is_err());
    }

    #[test]
    fn weak_norms() {
        let (f, mu) = atom_instance();
        for p in ["3/2", "2", "5"] {
            let n = maximal_weak_norm(&f, &mu, &r(p)).unwrap();
            assert!(n.contains(5.0), "{n}");
        }
        // sup over λ < 1 of λ (2/λ − 1)^{1/2} is approached at λ → 1
        let n = maximal_weak_norm(&unit_box(), &Measure1D::lebesgue(), &r("2")).unwrap();
        assert!((n.value - 1.0).abs() < 1e-12, "{n}");
        // p = 3/2: maximize λ^{3/2}(2/λ − 1) = 2λ^{1/2} − λ^{3/2} at λ = 2/3
        let n = maximal_weak_norm(&unit_box(), &Measure1D::lebesgue(), &r("3/2")).unwrap();
        let expected = (2.0f64 / 3.0) * (2.0f64).powf(2.0 / 3.0);
        assert!((n.value - expected).abs() < 1e-9, "{n} vs {expected}");
    }
}
