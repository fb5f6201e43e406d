//! Splitting a finite family of open intervals into two subfamilies of pairwise
//! disjoint intervals with the same union.

use serde::{Deserialize, Serialize};

use crate::measure::{IntervalSet, OpenInterval};

/// A finite list of open intervals; duplicates are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalFamily {
    pub intervals: Vec<OpenInterval>,
}

impl IntervalFamily {
    pub fn new(intervals: Vec<OpenInterval>) -> Self {
        IntervalFamily { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.intervals.iter().cloned())
    }

    /// No two members intersect.
    pub fn is_pairwise_disjoint(&self) -> bool {
        let mut sorted: Vec<&OpenInterval> = self.intervals.iter().collect();
        sorted.sort_by(|a, b| a.left.cmp(&b.left));
        sorted.windows(2).all(|w| w[0].right <= w[1].left)
    }

    fn pick(&self, indices: &[usize]) -> IntervalFamily {
        IntervalFamily { intervals: indices.iter().map(|&i| self.intervals[i].clone()).collect() }
    }
}

/// Indices into the input family for each of the two subfamilies.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// Greedy chain cover: walking left to right, each step takes the member that
/// reaches furthest right among those starting strictly before the current
/// frontier. Chain members are then dealt alternately to the two sides.
pub fn decompose_indices(family: &IntervalFamily) -> Split {
    let iv = &family.intervals;
    let mut order: Vec<usize> = (0..iv.len()).collect();
    order.sort_by(|&a, &b| iv[a].left.cmp(&iv[b].left).then_with(|| iv[b].right.cmp(&iv[a].right)));

    let mut chain = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut current = order[i];
        chain.push(current);
        i += 1;
        loop {
            let mut best: Option<usize> = None;
            while i < order.len() && iv[order[i]].left < iv[current].right {
                if best.is_none_or(|b| iv[order[i]].right > iv[b].right) {
                    best = Some(order[i]);
                }
                i += 1;
            }
            match best {
                Some(b) if iv[b].right > iv[current].right => {
                    chain.push(b);
                    current = b;
                }
                _ => break,
            }
        }
    }

    let mut split = Split::default();
    for (k, idx) in chain.into_iter().enumerate() {
        if k % 2 == 0 {
            split.first.push(idx);
        } else {
            split.second.push(idx);
        }
    }
    split
}

pub fn decompose(family: &IntervalFamily) -> (IntervalFamily, IntervalFamily) {
    let split = decompose_indices(family);
    (family.pick(&split.first), family.pick(&split.second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;
    use proptest::prelude::*;

    fn iv(l: i64, r: i64) -> OpenInterval {
        OpenInterval::bounded(Rational::from_integer(l), Rational::from_integer(r)).unwrap()
    }

    #[test]
    fn three_overlapping() {
        let fam = IntervalFamily::new(vec![iv(0, 2), iv(1, 3), iv(2, 4)]);
        let (f1, f2) = decompose(&fam);
        assert_eq!(f1.intervals, vec![iv(0, 2), iv(2, 4)]);
        assert_eq!(f2.intervals, vec![iv(1, 3)]);
        assert_eq!(f1.union().union(&f2.union()), IntervalSet::from_interval(iv(0, 4)));
    }

    #[test]
    fn singleton_and_nested() {
        let (f1, f2) = decompose(&IntervalFamily::new(vec![iv(0, 1)]));
        assert_eq!(f1.intervals, vec![iv(0, 1)]);
        assert!(f2.is_empty());
        let (f1, f2) = decompose(&IntervalFamily::new(vec![iv(0, 4), iv(1, 2)]));
        assert_eq!(f1.intervals, vec![iv(0, 4)]);
        assert!(f2.is_empty());
        let (f1, f2) = decompose(&IntervalFamily::default());
        assert!(f1.is_empty() && f2.is_empty());
    }

    #[test]
    fn touching_intervals_and_duplicates() {
        let fam = IntervalFamily::new(vec![iv(0, 1), iv(1, 2), iv(1, 2)]);
        let split = decompose_indices(&fam);
        assert_eq!(split.first, vec![0]);
        assert_eq!(split.second, vec![1]);
    }

    proptest! {
        #[test]
        fn disjoint_and_union_preserving(raw in prop::collection::vec((-40i64..40, 1i64..15), 0..50)) {
            let fam = IntervalFamily::new(raw.iter().map(|&(l, w)| iv(l, l + w)).collect());
            let split = decompose_indices(&fam);
            let (f1, f2) = (fam.pick(&split.first), fam.pick(&split.second));
            prop_assert!(f1.is_pairwise_disjoint());
            prop_assert!(f2.is_pairwise_disjoint());
            prop_assert_eq!(f1.union().union(&f2.union()), fam.union());
            let mut all: Vec<usize> = split.first.iter().chain(&split.second).copied().collect();
            all.sort();
            all.dedup();
            prop_assert_eq!(all.len(), split.first.len() + split.second.len());
            prop_assert!(all.iter().all(|&i| i < fam.len()));
        }
    }
}
