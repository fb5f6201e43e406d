use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ExtRational, Rational};

/// Open interval `(left, right)` with `left < right`; either end may be infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpenInterval {
    #[serde(rename = "from")]
    pub left: ExtRational,
    #[serde(rename = "to")]
    pub right: ExtRational,
}

impl OpenInterval {
    pub fn new(left: ExtRational, right: ExtRational) -> Result<Self> {
        if left >= right || left == ExtRational::PosInf || right == ExtRational::NegInf {
            return Err(Error::Argument(format!("empty open interval ({left}, {right})")));
        }
        Ok(OpenInterval { left, right })
    }

    pub fn bounded(left: Rational, right: Rational) -> Result<Self> {
        Self::new(left.into(), right.into())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.left < *x && self.right > *x
    }

    pub fn contains_interval(&self, other: &OpenInterval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    pub fn intersects(&self, other: &OpenInterval) -> bool {
        self.left < other.right && other.left < self.right
    }

    pub fn lebesgue_length(&self) -> ExtRational {
        match (&self.left, &self.right) {
            (ExtRational::Finite(l), ExtRational::Finite(r)) => ExtRational::Finite(r - l),
            _ => ExtRational::PosInf,
        }
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

/// Finite union of pairwise disjoint open intervals, sorted by left endpoint.
///
/// Two components may share an endpoint; that point is then outside the set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<OpenInterval>", into = "Vec<OpenInterval>")]
pub struct IntervalSet {
    components: Vec<OpenInterval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { components: Vec::new() }
    }

    pub fn whole_line() -> Self {
        IntervalSet {
            components: vec![OpenInterval { left: ExtRational::NegInf, right: ExtRational::PosInf }],
        }
    }

    pub fn from_interval(interval: OpenInterval) -> Self {
        IntervalSet { components: vec![interval] }
    }

    /// Union of arbitrary open intervals.
    pub fn from_intervals<I: IntoIterator<Item = OpenInterval>>(intervals: I) -> Self {
        let mut all: Vec<OpenInterval> = intervals.into_iter().collect();
        all.sort_by(|a, b| a.left.cmp(&b.left).then_with(|| b.right.cmp(&a.right)));
        let mut components: Vec<OpenInterval> = Vec::with_capacity(all.len());
        for iv in all {
            match components.last_mut() {
                // strict overlap only: a shared endpoint is covered by neither interval
                Some(last) if iv.left < last.right => {
                    if iv.right > last.right {
                        last.right = iv.right;
                    }
                }
                _ => components.push(iv),
            }
        }
        IntervalSet { components }
    }

    /// Trusts the caller that `components` are sorted, disjoint and nonempty.
    pub(crate) fn from_sorted_unchecked(components: Vec<OpenInterval>) -> Self {
        debug_assert!(components.windows(2).all(|w| w[0].right <= w[1].left));
        IntervalSet { components }
    }

    pub fn components(&self) -> &[OpenInterval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let i = self.components.partition_point(|c| c.right <= *x);
        self.components.get(i).is_some_and(|c| c.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.components.iter().chain(&other.components).cloned())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.components, &other.components);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let left = std::cmp::max(&a[i].left, &b[j].left);
            let right = std::cmp::min(&a[i].right, &b[j].right);
            if left < right {
                out.push(OpenInterval { left: left.clone(), right: right.clone() });
            }
            if a[i].right < b[j].right {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { components: out }
    }

    /// Interior of the complement, i.e. the complement of the closure.
    pub fn exterior(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = ExtRational::NegInf;
        for c in &self.components {
            if cursor < c.left {
                out.push(OpenInterval { left: cursor.clone(), right: c.left.clone() });
            }
            cursor = c.right.clone();
        }
        if cursor < ExtRational::PosInf {
            out.push(OpenInterval { left: cursor, right: ExtRational::PosInf });
        }
        IntervalSet { components: out }
    }

    /// Every component of `self` lies inside a single component of `other`.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.components.iter().all(|c| {
            let i = other.components.partition_point(|o| o.right <= c.left);
            other.components.get(i).is_some_and(|o| o.contains_interval(c))
        })
    }

    pub fn lebesgue_measure(&self) -> ExtRational {
        self.components
            .iter()
            .map(OpenInterval::lebesgue_length)
            .fold(ExtRational::zero(), |acc, x| acc.checked_add(&x).expect("lengths are nonnegative"))
    }

    pub fn is_bounded(&self) -> bool {
        self.components.iter().all(|c| c.left.is_finite() && c.right.is_finite())
    }
}

impl TryFrom<Vec<OpenInterval>> for IntervalSet {
    type Error = Error;
    fn try_from(components: Vec<OpenInterval>) -> Result<Self> {
        for c in &components {
            OpenInterval::new(c.left.clone(), c.right.clone())?;
        }
        if components.windows(2).any(|w| w[0].right > w[1].left) {
            return Err(Error::Argument("interval set components must be sorted and disjoint".into()));
        }
        Ok(IntervalSet { components })
    }
}

impl From<IntervalSet> for Vec<OpenInterval> {
    fn from(set: IntervalSet) -> Self {
        set.components
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("∅");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
