use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ExtRational, Rational};
use crate::maximal::MaximalProfile;
use crate::measure::{IntervalSet, Measure1D, OpenInterval};
use crate::stepfn::StepFunction;

use super::Instance;

/// `∫_{(a,b)} f dμ` summed piece by piece.
pub fn direct_integral(f: &StepFunction, mu: &Measure1D, a: &ExtRational, b: &ExtRational) -> Rational {
    let mut total = Rational::zero();
    for p in f.pieces() {
        let left = std::cmp::max(a.clone(), ExtRational::Finite(p.left.clone()));
        let right = std::cmp::min(b.clone(), ExtRational::Finite(p.right.clone()));
        if left >= right {
            continue;
        }
        let mut mass = mu.interval_measure(&left, &right);
        // [l, r) keeps the atom at l when (a, b) contains it
        if left == ExtRational::Finite(p.left.clone()) && *a < left {
            mass = mass.checked_add(&ExtRational::Finite(mu.atom_weight(&p.left))).expect("finite");
        }
        let mass = mass.finite().expect("pieces are bounded").clone();
        total += &(&p.value * &mass);
    }
    total
}

fn knots(f: &StepFunction, mu: &Measure1D) -> Vec<Rational> {
    let mut xs = f.breakpoints();
    xs.extend(mu.breakpoints());
    xs.sort();
    xs.dedup();
    xs
}

/// `{x : M_μ f(x) > λ}` by enumerating every pair of one-sided knot values
/// around each cell and each knot, with `L = ∫ f dμ − λμ` taken from direct
/// integrals.
pub fn brute_superlevel_set(f: &StepFunction, mu: &Measure1D, lambda: &Rational) -> Result<IntervalSet> {
    if !lambda.is_positive() {
        return Err(Error::Argument(format!("level must be positive, got {lambda}")));
    }
    let xs = knots(f, mu);
    let m = xs.len();
    if m == 0 {
        return Ok(IntervalSet::empty());
    }
    let fin = |x: &Rational| ExtRational::Finite(x.clone());
    let jump = |x: &Rational| mu.atom_weight(x) * (f.value_at(x) - lambda);
    // L at x_j⁻ and x_j⁺, relative to x_0⁻
    let mut left_vals = Vec::with_capacity(m);
    let mut right_vals = Vec::with_capacity(m);
    for x in &xs {
        let open = if *x == xs[0] {
            Rational::zero()
        } else {
            let mass = mu.interval_measure(&fin(&xs[0]), &fin(x)).finite().expect("bounded").clone();
            direct_integral(f, mu, &fin(&xs[0]), &fin(x)) - lambda * &mass + jump(&xs[0])
        };
        right_vals.push(&open + &jump(x));
        left_vals.push(open);
    }
    let pos_bg = mu.background_density().is_positive();
    let at_neg_inf = if pos_bg { ExtRational::PosInf } else { ExtRational::zero() };
    let at_pos_inf = if pos_bg { ExtRational::NegInf } else { fin(&right_vals[m - 1]) };

    // one-sided values left of knot `j` (`own`) or of the cell ending at knot `j`
    let starts = |j: usize, own: bool| -> Vec<ExtRational> {
        let mut v = vec![at_neg_inf.clone()];
        for i in 0..j {
            v.push(fin(&left_vals[i]));
            v.push(fin(&right_vals[i]));
        }
        if own {
            v.push(fin(&left_vals[j]));
        }
        v
    };
    let ends = |j: usize, own: bool| -> Vec<ExtRational> {
        let mut v = vec![at_pos_inf.clone()];
        for i in j..m {
            if i > j || !own {
                v.push(fin(&left_vals[i]));
            }
            v.push(fin(&right_vals[i]));
        }
        v
    };
    let any_pair = |s: &[ExtRational], t: &[ExtRational]| s.iter().any(|a| t.iter().any(|b| b > a));

    let member: Vec<bool> = (0..m).map(|j| any_pair(&starts(j, true), &ends(j, true))).collect();

    let mut pieces = Vec::new();
    for cell in 0..=m {
        let lo = if cell == 0 { ExtRational::NegInf } else { fin(&xs[cell - 1]) };
        let hi = if cell == m { ExtRational::PosInf } else { fin(&xs[cell]) };
        let s = starts(cell, false);
        let t = ends(cell, false);
        if any_pair(&s, &t) {
            pieces.push(OpenInterval::new(lo, hi)?);
            continue;
        }
        let probe = match (&lo, &hi) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.midpoint(b),
            (ExtRational::Finite(a), _) => a + Rational::one(),
            (_, ExtRational::Finite(b)) => b - Rational::one(),
            _ => Rational::zero(),
        };
        let slope = (f.value_at(&probe) - lambda) * mu.density_at(&probe).clone();
        let (anchor, base) = if cell == 0 { (xs[0].clone(), left_vals[0].clone()) } else { (xs[cell - 1].clone(), right_vals[cell - 1].clone()) };
        let t_max = t.into_iter().max().expect("nonempty");
        let s_min = s.into_iter().min().expect("nonempty");
        for (bound, below) in [(t_max, true), (s_min, false)] {
            if let Some(iv) = linear_part(&lo, &hi, &anchor, &base, &slope, &bound, below)? {
                pieces.push(iv);
            }
        }
    }
    let mut comps: Vec<OpenInterval> = IntervalSet::from_intervals(pieces).components().to_vec();
    for (j, x) in xs.iter().enumerate() {
        if !member[j] {
            continue;
        }
        let at = fin(x);
        let i = comps
            .iter()
            .position(|c| c.right == at)
            .filter(|&i| i + 1 < comps.len() && comps[i + 1].left == at)
            .ok_or_else(|| Error::Numeric(format!("knot {x} is in the level set but not interior to it")))?;
        let right = comps.remove(i + 1).right;
        comps[i].right = right;
    }
    Ok(IntervalSet::from_intervals(comps))
}

/// `{x ∈ (lo, hi) : base + slope·(x − anchor) < bound}` (or `> bound` when
/// `below` is false).
fn linear_part(
    lo: &ExtRational,
    hi: &ExtRational,
    anchor: &Rational,
    base: &Rational,
    slope: &Rational,
    bound: &ExtRational,
    below: bool,
) -> Result<Option<OpenInterval>> {
    let whole = || OpenInterval::new(lo.clone(), hi.clone()).map(Some);
    let bound = match bound {
        ExtRational::PosInf => return if below { whole() } else { Ok(None) },
        ExtRational::NegInf => return if below { Ok(None) } else { whole() },
        ExtRational::Finite(v) => v,
    };
    if slope.is_zero() {
        let holds = if below { base < bound } else { base > bound };
        return if holds { whole() } else { Ok(None) };
    }
    let z = ExtRational::Finite(anchor + &(bound - base) / slope);
    // below with positive slope, or above with negative slope: x < z
    let (l, r) = if below == slope.is_positive() {
        (lo.clone(), std::cmp::min(hi.clone(), z))
    } else {
        (std::cmp::max(lo.clone(), z), hi.clone())
    };
    if l < r {
        Ok(Some(OpenInterval::new(l, r)?))
    } else {
        Ok(None)
    }
}

/// One grid point: the exact value, the best grid-interval average found, and
/// the a-priori gap bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub x: Rational,
    pub exact: Rational,
    pub oracle: Rational,
    pub bound: f64,
}

impl OracleValue {
    pub fn gap(&self) -> f64 {
        (&self.exact - &self.oracle).to_f64()
    }

    /// `oracle ≤ exact ≤ oracle + bound` (the upper side with slack `slack`).
    pub fn consistent(&self, slack: f64) -> bool {
        self.oracle <= self.exact && self.gap() <= self.bound + slack
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridOracle {
    pub resolution: usize,
    pub radius: Rational,
    /// Every breakpoint of `f` and `μ` is a grid point.
    pub aligned: bool,
    pub values: Vec<OracleValue>,
}

impl GridOracle {
    pub fn max_gap(&self) -> f64 {
        self.values.iter().map(OracleValue::gap).fold(0.0, f64::max)
    }

    pub fn consistent(&self, slack: f64) -> bool {
        self.values.iter().all(|v| v.consistent(slack))
    }
}

const SAMPLE_POINTS: usize = 64;

/// Float prefix sums of mass and integral over a uniform grid of `[−R, R]`.
struct Grid {
    points: Vec<Rational>,
    knots: Vec<Rational>,
    radius: Rational,
    aligned: bool,
    /// `μ((g_0, g_i))` and the same plus the atom at `g_i`
    mass: Vec<f64>,
    mass_after: Vec<f64>,
    integ: Vec<f64>,
    integ_after: Vec<f64>,
    h: f64,
    f_max: f64,
    rho_max: f64,
    rho_min: f64,
    atom_min: f64,
    min_cell: f64,
}

impl Grid {
    /// `R` is 5, or the least integer exceeding every breakpoint and `reach` in
    /// absolute value when that is larger; with `n` a multiple of 40 quarter
    /// points then lie on the grid.
    fn new(f: &StepFunction, mu: &Measure1D, n: usize, reach: &Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument("grid needs at least 2 cells".into()));
        }
        let xs = knots(f, mu);
        let extent = xs.iter().map(Rational::abs).fold(reach.abs(), std::cmp::max);
        let radius = Rational::from_integer((extent.to_f64().floor() as i64 + 1).max(5));
        let h = &(&radius * Rational::from_integer(2)) / &Rational::from_integer(n as i64);
        let points: Vec<Rational> = (0..=n).map(|i| -&radius + &h * Rational::from_integer(i as i64)).collect();
        let aligned = xs.iter().all(|x| ((x + &radius) / &h).is_integer());
        let fin = |x: &Rational| ExtRational::Finite(x.clone());

        let mut mass = vec![0.0f64; n + 1];
        let mut integ = vec![0.0f64; n + 1];
        let mut mass_after = vec![0.0f64; n + 1];
        let mut integ_after = vec![0.0f64; n + 1];
        for i in 0..=n {
            if i > 0 {
                let (a, b) = (fin(&points[i - 1]), fin(&points[i]));
                mass[i] = mass_after[i - 1] + mu.interval_measure(&a, &b).to_f64();
                integ[i] = integ_after[i - 1] + direct_integral(f, mu, &a, &b).to_f64();
            }
            let w = mu.atom_weight(&points[i]);
            mass_after[i] = mass[i] + w.to_f64();
            integ_after[i] = integ[i] + (&w * &f.value_at(&points[i])).to_f64();
        }
        let densities = || {
            mu.density_pieces()
                .iter()
                .map(|p| p.density.to_f64())
                .chain(std::iter::once(mu.background_density().to_f64()))
        };
        Ok(Grid {
            aligned,
            mass,
            mass_after,
            integ,
            integ_after,
            h: h.to_f64(),
            f_max: f.max_value().to_f64(),
            rho_max: densities().fold(0.0, f64::max),
            rho_min: densities().filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min),
            atom_min: mu.atoms().iter().map(|a| a.weight.to_f64()).fold(f64::INFINITY, f64::min),
            min_cell: xs.windows(2).map(|w| (&w[1] - &w[0]).to_f64()).fold(f64::INFINITY, f64::min),
            points,
            knots: xs,
            radius,
        })
    }

    /// The oracle at grid point `k`, `None` when no grid interval around it has mass.
    fn evaluate(&self, f: &StepFunction, mu: &Measure1D, profile: &MaximalProfile, k: usize) -> Result<Option<OracleValue>> {
        let x = &self.points[k];
        let Some((a, b)) = dinkelbach(k, &self.mass, &self.integ, &self.mass_after, &self.integ_after) else {
            return Ok(None);
        };
        let exact = profile.maximal_at(x)?;
        let (lo, hi) = (ExtRational::Finite(self.points[a].clone()), ExtRational::Finite(self.points[b].clone()));
        let m = mu.interval_measure(&lo, &hi).finite().expect("bounded").clone();
        let oracle = direct_integral(f, mu, &lo, &hi) / &m;
        let dist = self.knots.iter().map(|y| (y - x).abs().to_f64()).fold(f64::INFINITY, f64::min);
        let d_min = self.atom_min.min(self.rho_min * dist.min(self.min_cell));
        let on_knot = self.knots.contains(x);
        let bound = if self.aligned && !on_knot && d_min.is_finite() && d_min > 0.0 {
            let pad = 2.0 * self.rho_max * self.h;
            pad * self.f_max / (d_min + pad)
        } else {
            self.f_max
        };
        Ok(Some(OracleValue { x: x.clone(), exact, oracle, bound }))
    }
}

/// `M_μ f` at up to 64 grid points of `[−R, R]` with `n` cells (breakpoints
/// skipped), maximizing the average over grid intervals `(a, b) ∋ x` by
/// Dinkelbach iteration on float prefix sums. The winning interval's average is
/// recomputed exactly, so each oracle value is a true lower bound.
pub fn grid_oracle(inst: &Instance, n: usize) -> Result<GridOracle> {
    let (f, mu) = (&inst.function, &inst.measure);
    let grid = Grid::new(f, mu, n, &Rational::zero())?;
    let profile = MaximalProfile::new(f, mu);
    let stride = (n / SAMPLE_POINTS).max(1);
    let mut values = Vec::new();
    for k in (1..n).step_by(stride) {
        if grid.knots.contains(&grid.points[k]) {
            continue;
        }
        if let Some(v) = grid.evaluate(f, mu, &profile, k)? {
            values.push(v);
        }
    }
    Ok(GridOracle { resolution: n, radius: grid.radius, aligned: grid.aligned, values })
}

/// The grid oracle at a single point `x`, which must land on the grid.
pub fn grid_maximal_at(inst: &Instance, n: usize, x: &Rational) -> Result<OracleValue> {
    let (f, mu) = (&inst.function, &inst.measure);
    let grid = Grid::new(f, mu, n, x)?;
    let k = ((x + &grid.radius) * Rational::from_integer(n as i64) / (&grid.radius * Rational::from_integer(2)))
        .to_f64()
        .round() as usize;
    if grid.points.get(k) != Some(x) {
        return Err(Error::Argument(format!("{x} is not a grid point at resolution {n}")));
    }
    let profile = MaximalProfile::new(f, mu);
    grid.evaluate(f, mu, &profile, k)?
        .ok_or_else(|| Error::Undefined(format!("no interval of positive mass around {x}")))
}

/// `μ({f > t})` by summing the masses of the cells and grid points where `f`
/// exceeds `t`; exact when every breakpoint is a grid point.
pub fn grid_distribution(inst: &Instance, n: usize, t: &Rational) -> Result<ExtRational> {
    let (f, mu) = (&inst.function, &inst.measure);
    let grid = Grid::new(f, mu, n, &Rational::zero())?;
    let fin = |x: &Rational| ExtRational::Finite(x.clone());
    let mut total = ExtRational::zero();
    if !t.is_negative() {
        for w in grid.points.windows(2) {
            if f.value_at(&w[0].midpoint(&w[1])) > *t {
                total = total.checked_add(&mu.interval_measure(&fin(&w[0]), &fin(&w[1]))).expect("nonnegative");
            }
        }
        for x in &grid.points {
            if f.value_at(x) > *t {
                total = total.checked_add(&fin(&mu.atom_weight(x))).expect("nonnegative");
            }
        }
    } else {
        total = mu.total_mass();
    }
    Ok(total)
}

/// Grid indices `a < k < b` maximizing `(I(b) − I⁺(a)) / (Q(b) − Q⁺(a))`.
fn dinkelbach(k: usize, q: &[f64], i: &[f64], q_after: &[f64], i_after: &[f64]) -> Option<(usize, usize)> {
    let n = q.len() - 1;
    let ratio = |a: usize, b: usize| {
        let m = q[b] - q_after[a];
        (m > 0.0).then(|| (i[b] - i_after[a]) / m)
    };
    let mut best: Option<(usize, usize, f64)> = None;
    let mut lambda = 0.0;
    for _ in 0..100 {
        let a = (0..k)
            .min_by(|&x, &y| (i_after[x] - lambda * q_after[x]).total_cmp(&(i_after[y] - lambda * q_after[y])))
            .expect("k ≥ 1");
        let b = (k + 1..=n)
            .max_by(|&x, &y| (i[x] - lambda * q[x]).total_cmp(&(i[y] - lambda * q[y])))
            .expect("k < n");
        match ratio(a, b) {
            Some(r) if best.is_none_or(|(_, _, old)| r > old) => {
                best = Some((a, b, r));
                lambda = r;
            }
            _ => break,
        }
    }
    if best.is_none() {
        // λ = 0 picked a massless pair: fall back to the widest interval
        return ratio(0, n).map(|_| (0, n));
    }
    best.map(|(a, b, _)| (a, b))
}
