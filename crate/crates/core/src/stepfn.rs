//! Nonnegative step functions and their rearrangements.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{rational_pow, ApproxReal, ExtRational, Rational};
use crate::measure::Measure1D;

/// `value` on `[left, right)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    #[serde(rename = "from")]
    pub left: Rational,
    #[serde(rename = "to")]
    pub right: Rational,
    pub value: Rational,
}

#[derive(Deserialize)]
struct StepRepr {
    #[serde(default)]
    pieces: Vec<Piece>,
}

/// Nonnegative piecewise-constant function with bounded support.
///
/// Canonical form: pieces sorted, disjoint, with positive values, and no two
/// touching pieces carrying the same value. Zero outside the pieces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StepRepr")]
pub struct StepFunction {
    pieces: Vec<Piece>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;
    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.pieces)
    }
}

impl StepFunction {
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            if p.left >= p.right {
                return Err(Error::Argument(format!("empty piece [{}, {})", p.left, p.right)));
            }
            if p.value.is_negative() {
                return Err(Error::Argument(format!("negative value {} on [{}, {})", p.value, p.left, p.right)));
            }
        }
        pieces.sort_by(|a, b| a.left.cmp(&b.left));
        if pieces.windows(2).any(|w| w[0].right > w[1].left) {
            return Err(Error::Argument("step function pieces overlap".into()));
        }
        Ok(Self::canonical(pieces))
    }

    fn canonical(pieces: Vec<Piece>) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces.into_iter().filter(|p| p.value.is_positive()) {
            match out.last_mut() {
                Some(last) if last.right == p.left && last.value == p.value => last.right = p.right,
                _ => out.push(p),
            }
        }
        StepFunction { pieces: out }
    }

    pub fn zero() -> Self {
        StepFunction { pieces: Vec::new() }
    }

    /// `value · χ_[left, right)`.
    pub fn indicator(left: Rational, right: Rational, value: Rational) -> Result<Self> {
        Self::new(vec![Piece { left, right, value }])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn value_at(&self, x: &Rational) -> Rational {
        let i = self.pieces.partition_point(|p| p.right <= *x);
        match self.pieces.get(i) {
            Some(p) if p.left <= *x => p.value.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.pieces.iter().flat_map(|p| [p.left.clone(), p.right.clone()]).collect();
        out.dedup();
        out
    }

    pub fn max_value(&self) -> Rational {
        self.pieces.iter().map(|p| &p.value).max().cloned().unwrap_or_else(Rational::zero)
    }

    /// Distinct positive values, decreasing.
    pub fn distinct_values(&self) -> Vec<Rational> {
        let mut vals: Vec<Rational> = self.pieces.iter().map(|p| p.value.clone()).collect();
        vals.sort_by(|a, b| b.cmp(a));
        vals.dedup();
        vals
    }

    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if c.is_negative() {
            return Err(Error::Argument("scale factor must be nonnegative".into()));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { left: p.left.clone(), right: p.right.clone(), value: &p.value * c })
            .collect();
        Ok(Self::canonical(pieces))
    }

    /// Pointwise combination on the common refinement.
    fn combine(&self, other: &StepFunction, op: impl Fn(Rational, Rational) -> Rational) -> StepFunction {
        let mut cuts = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort();
        cuts.dedup();
        let pieces = cuts
            .windows(2)
            .map(|w| Piece {
                left: w[0].clone(),
                right: w[1].clone(),
                value: op(self.value_at(&w[0]), other.value_at(&w[0])),
            })
            .collect();
        Self::canonical(pieces)
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        self.combine(other, |a, b| a + b)
    }

    /// `f · χ_[left, right)`.
    pub fn restrict(&self, left: &ExtRational, right: &ExtRational) -> StepFunction {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let l = std::cmp::max(ExtRational::Finite(p.left.clone()), left.clone());
                let r = std::cmp::min(ExtRational::Finite(p.right.clone()), right.clone());
                match (l, r) {
                    (ExtRational::Finite(l), ExtRational::Finite(r)) if l < r => {
                        Some(Piece { left: l, right: r, value: p.value.clone() })
                    }
                    _ => None,
                }
            })
            .collect();
        Self::canonical(pieces)
    }

    /// `x ↦ f(−x)`, with pieces flipped to stay half-open on the right.
    pub fn mirror(&self) -> StepFunction {
        let mut pieces: Vec<Piece> = self
            .pieces
            .iter()
            .map(|p| Piece { left: -&p.right, right: -&p.left, value: p.value.clone() })
            .collect();
        pieces.reverse();
        Self::canonical(pieces)
    }

    /// `∫_a^b f dx` (Lebesgue).
    pub fn lebesgue_integral(&self, a: &Rational, b: &Rational) -> Rational {
        if a > b {
            return -self.lebesgue_integral(b, a);
        }
        self.pieces
            .iter()
            .filter_map(|p| {
                let l = std::cmp::max(&p.left, a);
                let r = std::cmp::min(&p.right, b);
                (l < r).then(|| &p.value * (r - l))
            })
            .sum()
    }

    /// Even up to breakpoints (which are null sets).
    pub fn is_even(&self) -> bool {
        let zero = ExtRational::zero();
        self.restrict(&zero, &ExtRational::PosInf) == self.restrict(&ExtRational::NegInf, &zero).mirror()
    }

    /// Even and nonincreasing in `|x|`.
    pub fn is_symmetric_decreasing(&self) -> bool {
        if !self.is_even() {
            return false;
        }
        let positive = self.restrict(&ExtRational::zero(), &ExtRational::PosInf);
        let mut cursor = Rational::zero();
        let mut last: Option<&Rational> = None;
        for p in positive.pieces() {
            if p.left != cursor || last.is_some_and(|v| p.value > *v) {
                return false;
            }
            cursor = p.right.clone();
            last = Some(&p.value);
        }
        true
    }

    /// Largest `r` such that the support lies in `[-r, r]`.
    pub fn support_radius(&self) -> Rational {
        match (self.pieces.first(), self.pieces.last()) {
            (Some(first), Some(last)) => std::cmp::max(first.left.abs(), last.right.abs()),
            _ => Rational::zero(),
        }
    }
}

/// `t ↦ μ({f > t})` for `t ≥ 0`.
///
/// `levels[j] = (t_j, λ_j)` means `λ(t) = λ_j` on `[t_j, t_{j+1})`; `t_0 = 0`,
/// the `λ_j` strictly decrease and the last one is `0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionFn {
    levels: Vec<DistributionLevel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionLevel {
    pub t: Rational,
    pub lambda: ExtRational,
}

impl DistributionFn {
    pub fn levels(&self) -> &[DistributionLevel] {
        &self.levels
    }

    /// Critical values `t_j`.
    pub fn critical_values(&self) -> Vec<Rational> {
        self.levels.iter().map(|l| l.t.clone()).collect()
    }

    pub fn eval(&self, t: &Rational) -> Result<ExtRational> {
        if t.is_negative() {
            return Err(Error::Argument("distribution function is defined for t >= 0".into()));
        }
        let i = self.levels.partition_point(|l| l.t <= *t);
        Ok(self.levels[i - 1].lambda.clone())
    }

    /// `f*(x) = inf{t : λ(t) ≤ 2|x|}` as a layer-cake sum of the indicators of the
    /// centered intervals `(−λ_j/2, λ_j/2)`, each weighted by the level gap.
    pub fn rearrangement(&self) -> Result<StepFunction> {
        let half = Rational::frac(1, 2);
        let mut out = StepFunction::zero();
        for w in self.levels.windows(2) {
            let lambda = match &w[0].lambda {
                ExtRational::Finite(l) => l,
                _ => return Err(Error::InfiniteLevelSet(w[0].t.to_string())),
            };
            let radius = lambda * &half;
            let height = &w[1].t - &w[0].t;
            if radius.is_positive() {
                out = out.add(&StepFunction::indicator(-&radius, radius, height)?);
            }
        }
        Ok(out)
    }
}

/// Exact distribution function of `f` under `mu` (strict superlevel sets).
pub fn distribution(f: &StepFunction, mu: &Measure1D) -> DistributionFn {
    let mut ts = vec![Rational::zero()];
    ts.extend(f.distinct_values().into_iter().rev());
    let mut levels: Vec<DistributionLevel> = Vec::with_capacity(ts.len());
    for t in ts {
        let lambda = f
            .pieces()
            .iter()
            .filter(|p| p.value > t)
            .map(|p| mu.half_open_measure(&p.left, &p.right))
            .fold(ExtRational::zero(), |acc, m| acc.checked_add(&m).expect("nonnegative"));
        match levels.last() {
            Some(prev) if prev.lambda == lambda => {}
            _ => levels.push(DistributionLevel { t, lambda }),
        }
    }
    DistributionFn { levels }
}

/// Symmetric decreasing rearrangement of `f` with respect to `mu`, as a function
/// on the Lebesgue line: `μ({f > t}) = |{f* > t}|` for every `t > 0`.
pub fn rearrange(f: &StepFunction, mu: &Measure1D) -> Result<StepFunction> {
    distribution(f, mu).rearrangement()
}

fn check_exponent(p: &Rational) -> Result<()> {
    if *p <= Rational::one() {
        return Err(Error::Domain(format!("weak-L^p norm needs p > 1, got {p}")));
    }
    Ok(())
}

pub(crate) fn pow_tolerance() -> Rational {
    Rational::frac(1, 100_000_000_000_000)
}

/// `sup_t |2t|^{1/p} f*(t)`.
///
/// On each constant piece of `f*` the supremum is approached at the outer
/// endpoint `r`, giving `v · (2r)^{1/p}`. Candidates are compared exactly via
/// `v^n (2r)^d` for `p = n/d`; only the winner goes through a real power.
pub fn weak_lp_norm(f: &StepFunction, mu: &Measure1D, p: &Rational) -> Result<ApproxReal> {
    check_exponent(p)?;
    let fstar = rearrange(f, mu)?;
    let candidates = fstar
        .restrict(&ExtRational::zero(), &ExtRational::PosInf)
        .pieces()
        .iter()
        .map(|piece| (piece.value.clone(), &piece.right * Rational::from_integer(2)))
        .collect::<Vec<_>>();
    max_power_product(&candidates, p)
}

/// `max_k v_k · m_k^{1/p}` over pairs `(v_k, m_k)` with `v_k, m_k ≥ 0`.
pub(crate) fn max_power_product(pairs: &[(Rational, Rational)], p: &Rational) -> Result<ApproxReal> {
    let n: i32 = p.numer().try_into().map_err(|_| Error::Argument("exponent too large".into()))?;
    let d: i32 = p.denom().try_into().map_err(|_| Error::Argument("exponent too large".into()))?;
    let mut best: Option<(&Rational, &Rational, Rational)> = None;
    for (v, m) in pairs {
        if !v.is_positive() || !m.is_positive() {
            continue;
        }
        let key = v.pow(n)? * m.pow(d)?;
        if best.as_ref().is_none_or(|(_, _, k)| key.cmp(k) == Ordering::Greater) {
            best = Some((v, m, key));
        }
    }
    let Some((v, m, _)) = best else {
        return Ok(ApproxReal::new(0.0, 0.0));
    };
    let root = rational_pow(m, &p.recip()?, &pow_tolerance())?;
    Ok(root.scale(v.to_f64()))
}

/// `f**(t) = (1/t) ∫_0^t f*(s) ds`.
pub fn f_star_star(f: &StepFunction, mu: &Measure1D, t: &Rational) -> Result<Rational> {
    if !t.is_positive() {
        return Err(Error::Argument(format!("f** needs t > 0, got {t}")));
    }
    let fstar = rearrange(f, mu)?;
    Ok(fstar.lebesgue_integral(&Rational::zero(), t) / t)
}

/// `|{x > 0 : f(x) > t}| = |{x < 0 : f(x) > t}|` for all `t > 0` (Lebesgue).
pub fn is_distributionally_symmetric(f: &StepFunction) -> bool {
    first_asymmetric_level(f).is_none()
}

/// A level `t ≥ 0` at which the two half-lines carry different mass above `t`.
pub fn first_asymmetric_level(f: &StepFunction) -> Option<Rational> {
    let zero = ExtRational::zero();
    let positive = f.restrict(&zero, &ExtRational::PosInf);
    let negative = f.restrict(&ExtRational::NegInf, &zero);
    let mass_above = |g: &StepFunction, t: &Rational| -> Rational {
        g.pieces().iter().filter(|p| p.value > *t).map(|p| &p.right - &p.left).sum()
    };
    let mut ts = vec![Rational::zero()];
    ts.extend(f.distinct_values());
    ts.into_iter().find(|t| mass_above(&positive, t) != mass_above(&negative, t))
}

/// The even function that equals `f1s` on `|x| < b`, `f12s(|x| − b)` on
/// `b ≤ |x| < b + b12`, `f21s(|x| − b − b12)` on the next `b21`, and 0 beyond.
pub fn splice(
    f1s: &StepFunction,
    f12s: &StepFunction,
    f21s: &StepFunction,
    b: &Rational,
    b12: &Rational,
    b21: &Rational,
) -> Result<StepFunction> {
    for (name, len) in [("b", b), ("b12", b12), ("b21", b21)] {
        if len.is_negative() {
            return Err(Error::Argument(format!("{name} must be nonnegative")));
        }
    }
    let mut positive: Vec<Piece> = Vec::new();
    let mut offset = Rational::zero();
    for (name, g, len) in [("f1s", f1s, b), ("f12s", f12s, b12), ("f21s", f21s, b21)] {
        if !g.is_symmetric_decreasing() {
            return Err(Error::Argument(format!("{name} is not symmetric decreasing")));
        }
        if g.support_radius() > *len {
            return Err(Error::Argument(format!("{name} is not supported in [-{len}, {len}]")));
        }
        for p in g.restrict(&ExtRational::zero(), &ExtRational::PosInf).pieces() {
            positive.push(Piece { left: &p.left + &offset, right: &p.right + &offset, value: p.value.clone() });
        }
        offset = &offset + len;
    }
    let positive = StepFunction::new(positive)?;
    let mut pieces = positive.mirror().pieces().to_vec();
    pieces.extend(positive.pieces().iter().cloned());
    StepFunction::new(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DensityPiece;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn step(parts: &[(&str, &str, &str)]) -> StepFunction {
        StepFunction::new(
            parts.iter().map(|(l, h, v)| Piece { left: r(l), right: r(h), value: r(v) }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_form_merges_and_drops_zeros() {
        let f = step(&[("0", "1", "2"), ("1", "2", "2"), ("2", "3", "0")]);
        assert_eq!(f.pieces().len(), 1);
        assert_eq!(f.pieces()[0].right, r("2"));
        assert!(StepFunction::new(vec![Piece { left: r("0"), right: r("1"), value: r("-1") }]).is_err());
        assert!(StepFunction::new(vec![
            Piece { left: r("0"), right: r("2"), value: r("1") },
            Piece { left: r("1"), right: r("3"), value: r("1") },
        ])
        .is_err());
    }

    #[test]
    fn distribution_of_indicator() {
        let f = step(&[("0", "2", "1")]);
        let d = distribution(&f, &Measure1D::lebesgue());
        assert_eq!(d.eval(&r("0")).unwrap(), ExtRational::Finite(r("2")));
        assert_eq!(d.eval(&r("1/2")).unwrap(), ExtRational::Finite(r("2")));
        assert_eq!(d.eval(&r("1")).unwrap(), ExtRational::zero());
        assert_eq!(d.eval(&r("7")).unwrap(), ExtRational::zero());
        assert!(d.eval(&r("-1")).is_err());
    }

    #[test]
    fn distribution_atomic() {
        let f = step(&[("-1", "1", "3")]);
        let mu = Measure1D::atom(r("0"), r("2")).unwrap();
        let d = distribution(&f, &mu);
        assert_eq!(d.eval(&r("5/2")).unwrap(), ExtRational::Finite(r("2")));
        assert_eq!(d.eval(&r("3")).unwrap(), ExtRational::zero());
    }

    #[test]
    fn rearrange_two_levels() {
        let f = step(&[("0", "1", "2"), ("1", "3", "1")]);
        let fs = rearrange(&f, &Measure1D::lebesgue()).unwrap();
        let expected = step(&[("-3/2", "-1/2", "1"), ("-1/2", "1/2", "2"), ("1/2", "3/2", "1")]);
        assert_eq!(fs, expected);
        assert!(fs.is_symmetric_decreasing());
    }

    #[test]
    fn rearrange_spreads_density() {
        let f = step(&[("0", "1", "1")]);
        let mu = Measure1D::new(
            r("0"),
            vec![DensityPiece { left: r("0"), right: r("1"), density: r("2") }],
            vec![],
        )
        .unwrap();
        assert_eq!(rearrange(&f, &mu).unwrap(), step(&[("-1", "1", "1")]));
    }

    #[test]
    fn rearrange_is_idempotent_on_symmetric_decreasing() {
        let f = step(&[("-2", "-1", "1"), ("-1", "1", "3"), ("1", "2", "1")]);
        let mu = Measure1D::lebesgue();
        let fs = rearrange(&f, &mu).unwrap();
        assert_eq!(fs, f);
        assert_eq!(distribution(&fs, &mu), distribution(&f, &mu));
    }

    #[test]
    fn weak_norm_of_centered_indicator() {
        let f = step(&[("-1/2", "1/2", "1")]);
        for p in ["3/2", "2", "7"] {
            let n = weak_lp_norm(&f, &Measure1D::lebesgue(), &r(p)).unwrap();
            assert!(n.contains(1.0), "{p}: {n}");
        }
        assert!(matches!(weak_lp_norm(&f, &Measure1D::lebesgue(), &r("1")), Err(Error::Domain(_))));
    }

    #[test]
    fn weak_norm_is_homogeneous() {
        let f = step(&[("0", "1", "2"), ("1", "3", "1")]);
        let mu = Measure1D::lebesgue();
        let base = weak_lp_norm(&f, &mu, &r("2")).unwrap();
        let scaled = weak_lp_norm(&f.scale(&r("5/3")).unwrap(), &mu, &r("2")).unwrap();
        assert!((scaled.value - base.value * 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f_star_star_values() {
        let f = step(&[("-1", "1", "1")]);
        let mu = Measure1D::lebesgue();
        assert_eq!(f_star_star(&f, &mu, &r("1/2")).unwrap(), r("1"));
        assert_eq!(f_star_star(&f, &mu, &r("2")).unwrap(), r("1/2"));
        assert!(f_star_star(&f, &mu, &r("0")).is_err());
    }

    #[test]
    fn distributional_symmetry() {
        assert!(is_distributionally_symmetric(&step(&[("-1", "1", "2")])));
        assert!(!is_distributionally_symmetric(&step(&[("0", "1", "1")])));
        // not even, but each level splits evenly
        assert!(is_distributionally_symmetric(&step(&[("-3", "-2", "1"), ("4", "5", "1")])));
    }

    #[test]
    fn splice_identity_and_example() {
        let f1 = step(&[("-1", "1", "1")]);
        let out = splice(&f1, &StepFunction::zero(), &StepFunction::zero(), &r("1"), &r("0"), &r("0")).unwrap();
        assert_eq!(out, f1);

        let f12 = step(&[("-1/2", "1/2", "2")]);
        let out = splice(&f1, &f12, &StepFunction::zero(), &r("1"), &r("1/2"), &r("0")).unwrap();
        assert_eq!(out, step(&[("-3/2", "-1", "2"), ("-1", "1", "1"), ("1", "3/2", "2")]));
        assert_eq!(out.lebesgue_integral(&r("-1"), &r("3/2")), r("3"));
        assert!(is_distributionally_symmetric(&out));
    }

    #[test]
    fn splice_rejects_bad_support() {
        let f1 = step(&[("-2", "2", "1")]);
        let z = StepFunction::zero();
        assert!(matches!(splice(&f1, &z, &z, &r("1"), &r("0"), &r("0")), Err(Error::Argument(_))));
        let lopsided = step(&[("0", "1", "1")]);
        assert!(splice(&lopsided, &z, &z, &r("1"), &r("0"), &r("0")).is_err());
    }
}
