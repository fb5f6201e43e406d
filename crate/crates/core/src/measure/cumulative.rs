use std::cmp::Ordering;

use crate::exactnum::{ExtRational, Rational};
use crate::measure::Measure1D;
use crate::stepfn::StepFunction;

/// A breakpoint of a [`CumulativeFn`] with both one-sided values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Knot {
    pub x: Rational,
    /// Limit from below.
    pub left: Rational,
    /// Value at `x`, equal to the limit from above.
    pub right: Rational,
    /// Slope on the open cell to the right of `x`.
    pub slope_after: Rational,
}

/// `G(x) = ∫_{(x₀, x]} h dμ` for a piecewise-constant integrand `h`, with `x₀`
/// the first knot. Linear between knots; jumps only at atoms.
///
/// The integral over an open interval is `G(b⁻) − G(a⁺)`, i.e.
/// `value_left(b) − value_right(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulativeFn {
    anchor: Rational,
    slope_before: Rational,
    knots: Vec<Knot>,
}

/// Cumulative integral of `weight` (or of `1` when `weight` is `None`) against `mu`.
pub fn cumulative(mu: &Measure1D, weight: Option<&StepFunction>) -> CumulativeFn {
    match weight {
        Some(f) => CumulativeFn::build(mu, Some(f), &Rational::zero()),
        None => CumulativeFn::build(mu, None, &Rational::one()),
    }
}

/// Sorted union of the breakpoints of `f` and `mu`.
pub(crate) fn joint_breakpoints(mu: &Measure1D, f: Option<&StepFunction>) -> Vec<Rational> {
    let mut bps = mu.breakpoints();
    if let Some(f) = f {
        bps.extend(f.breakpoints());
        bps.sort();
        bps.dedup();
    }
    bps
}

impl CumulativeFn {
    /// Integrand `f(x) + shift` (with `f ≡ 0` when absent).
    pub fn build(mu: &Measure1D, f: Option<&StepFunction>, shift: &Rational) -> Self {
        let bps = joint_breakpoints(mu, f);
        Self::build_on(mu, f, shift, &bps)
    }

    /// Like [`build`](Self::build) but on a caller-supplied breakpoint set, which
    /// must contain every breakpoint of `f` and `mu`. Knots of two functions built
    /// on the same set line up index by index.
    pub(crate) fn build_on(mu: &Measure1D, f: Option<&StepFunction>, shift: &Rational, bps: &[Rational]) -> Self {
        let value = |x: &Rational| match f {
            Some(f) => f.value_at(x) + shift,
            None => shift.clone(),
        };
        // f has bounded support, so outside all breakpoints only the shift remains
        let outer_slope = shift * mu.background_density();
        let Some(first) = bps.first() else {
            return CumulativeFn { anchor: Rational::zero(), slope_before: outer_slope, knots: Vec::new() };
        };
        let mut knots: Vec<Knot> = Vec::with_capacity(bps.len());
        let mut level = Rational::zero();
        for (i, x) in bps.iter().enumerate() {
            if let Some(prev) = knots.last() {
                level = &prev.right + &prev.slope_after * (x - &prev.x);
            }
            let left = level.clone();
            let right = &left + value(x) * mu.atom_weight(x);
            let slope_after = match bps.get(i + 1) {
                Some(next) => {
                    let mid = x.midpoint(next);
                    value(&mid) * mu.density_at(&mid)
                }
                None => outer_slope.clone(),
            };
            knots.push(Knot { x: x.clone(), left, right, slope_after });
        }
        CumulativeFn { anchor: first.clone(), slope_before: outer_slope, knots }
    }

    pub fn anchor(&self) -> &Rational {
        &self.anchor
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn slope_before(&self) -> &Rational {
        &self.slope_before
    }

    pub fn slope_after_last(&self) -> &Rational {
        self.knots.last().map_or(&self.slope_before, |k| &k.slope_after)
    }

    fn locate(&self, x: &Rational) -> (usize, bool) {
        let i = self.knots.partition_point(|k| k.x < *x);
        let exact = self.knots.get(i).is_some_and(|k| k.x == *x);
        (i, exact)
    }

    fn linear_value(&self, i: usize, x: &Rational) -> Rational {
        if i == 0 {
            match self.knots.first() {
                Some(k) => &k.left - &self.slope_before * (&k.x - x),
                None => &self.slope_before * (x - &self.anchor),
            }
        } else {
            let k = &self.knots[i - 1];
            &k.right + &k.slope_after * (x - &k.x)
        }
    }

    /// `G(x⁻)`.
    pub fn value_left(&self, x: &Rational) -> Rational {
        match self.locate(x) {
            (i, true) => self.knots[i].left.clone(),
            (i, false) => self.linear_value(i, x),
        }
    }

    /// `G(x) = G(x⁺)`.
    pub fn value_right(&self, x: &Rational) -> Rational {
        match self.locate(x) {
            (i, true) => self.knots[i].right.clone(),
            (i, false) => self.linear_value(i, x),
        }
    }

    pub fn limit_neg_inf(&self) -> ExtRational {
        match self.slope_before.signum() {
            Ordering::Greater => ExtRational::NegInf,
            Ordering::Less => ExtRational::PosInf,
            Ordering::Equal => ExtRational::Finite(self.value_left(&self.anchor)),
        }
    }

    pub fn limit_pos_inf(&self) -> ExtRational {
        match self.slope_after_last().signum() {
            Ordering::Greater => ExtRational::PosInf,
            Ordering::Less => ExtRational::NegInf,
            Ordering::Equal => match self.knots.last() {
                Some(k) => ExtRational::Finite(k.right.clone()),
                None => ExtRational::Finite(Rational::zero()),
            },
        }
    }

    /// `G(x⁻)` with `G(−∞)` / `G(+∞)` as limits.
    pub fn value_left_ext(&self, x: &ExtRational) -> ExtRational {
        match x {
            ExtRational::NegInf => self.limit_neg_inf(),
            ExtRational::Finite(x) => ExtRational::Finite(self.value_left(x)),
            ExtRational::PosInf => self.limit_pos_inf(),
        }
    }

    pub fn value_right_ext(&self, x: &ExtRational) -> ExtRational {
        match x {
            ExtRational::NegInf => self.limit_neg_inf(),
            ExtRational::Finite(x) => ExtRational::Finite(self.value_right(x)),
            ExtRational::PosInf => self.limit_pos_inf(),
        }
    }

    /// `∫_{(a,b)} h dμ` for `a < b`.
    pub fn integral_open(&self, a: &ExtRational, b: &ExtRational) -> ExtRational {
        self.value_left_ext(b)
            .checked_sub(&self.value_right_ext(a))
            .expect("outer slopes share a sign, so the difference is defined")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, DensityPiece};
    use crate::stepfn::Piece;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn lebesgue_unit_weight_is_identity() {
        let g = cumulative(&Measure1D::lebesgue(), None);
        assert!(g.knots().is_empty());
        for x in ["-3", "0", "5/2"] {
            assert_eq!(g.value_left(&r(x)), r(x) - g.anchor());
            assert_eq!(g.value_right(&r(x)), g.value_left(&r(x)));
        }
        assert_eq!(g.limit_pos_inf(), ExtRational::PosInf);
        assert_eq!(g.limit_neg_inf(), ExtRational::NegInf);
    }

    #[test]
    fn atom_jump_is_weighted_value() {
        let mu = Measure1D::atom(r("0"), r("1")).unwrap();
        let f = StepFunction::new(vec![Piece { left: r("-1"), right: r("1"), value: r("5") }]).unwrap();
        let g = cumulative(&mu, Some(&f));
        assert_eq!(&g.value_right(&r("0")) - &g.value_left(&r("0")), r("5"));
        assert!(g.knots().iter().all(|k| k.slope_after.is_zero()));
        assert!(g.slope_before().is_zero());
        assert_eq!(g.integral_open(&ExtRational::NegInf, &ExtRational::PosInf), ExtRational::Finite(r("5")));
        assert_eq!(g.integral_open(&r("0").into(), &r("1").into()), ExtRational::zero());
    }

    #[test]
    fn additivity_across_an_atom() {
        let mu = Measure1D::new(
            r("1/2"),
            vec![DensityPiece { left: r("-1"), right: r("2"), density: r("3") }],
            vec![Atom { at: r("1"), weight: r("2") }],
        )
        .unwrap();
        let f = StepFunction::new(vec![
            Piece { left: r("-2"), right: r("1"), value: r("1") },
            Piece { left: r("1"), right: r("3"), value: r("4") },
        ])
        .unwrap();
        let g = cumulative(&mu, Some(&f));
        let (a, c, b) = (r("-3").into(), r("1"), r("5/2").into());
        let whole = g.integral_open(&a, &b);
        let parts = g
            .integral_open(&a, &c.clone().into())
            .checked_add(&g.integral_open(&c.clone().into(), &b))
            .unwrap()
            .checked_add(&ExtRational::Finite(mu.atom_weight(&c) * f.value_at(&c)))
            .unwrap();
        assert_eq!(whole, parts);
        // direct: 1/2 on (-3,-2)... f=0 there; (-2,-1): 1*1/2; (-1,1): 1*3*2; atom 4*2; (1,2): 4*3; (2,5/2): 4*1/2
        assert_eq!(whole, ExtRational::Finite(r("1/2") + r("6") + r("8") + r("12") + r("1")));
    }
}
