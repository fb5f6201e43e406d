//! Finite-description positive Borel measures on the line.
//!
//! A [`Measure1D`] is a background density on all of ℝ, overridden on finitely
//! many half-open pieces, plus finitely many atoms. Sets are unions of open
//! intervals, so atoms sitting on an endpoint are never counted.

pub(crate) mod cumulative;
mod interval_set;

pub use cumulative::{cumulative, CumulativeFn, Knot};
pub use interval_set::{IntervalSet, OpenInterval};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ExtRational, Rational};

/// Density override on `[left, right)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DensityPiece {
    #[serde(rename = "from")]
    pub left: Rational,
    #[serde(rename = "to")]
    pub right: Rational,
    pub density: Rational,
}

/// Point mass.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub at: Rational,
    pub weight: Rational,
}

#[derive(Deserialize)]
struct MeasureRepr {
    #[serde(default)]
    background_density: Rational,
    #[serde(default)]
    density_pieces: Vec<DensityPiece>,
    #[serde(default)]
    atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr")]
pub struct Measure1D {
    background_density: Rational,
    density_pieces: Vec<DensityPiece>,
    atoms: Vec<Atom>,
}

impl TryFrom<MeasureRepr> for Measure1D {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        Measure1D::new(r.background_density, r.density_pieces, r.atoms)
    }
}

impl Measure1D {
    pub fn new(
        background_density: Rational,
        mut density_pieces: Vec<DensityPiece>,
        mut atoms: Vec<Atom>,
    ) -> Result<Self> {
        if background_density.is_negative() {
            return Err(Error::Argument("background density must be nonnegative".into()));
        }
        for p in &density_pieces {
            if p.left >= p.right {
                return Err(Error::Argument(format!("empty density piece [{}, {})", p.left, p.right)));
            }
            if p.density.is_negative() {
                return Err(Error::Argument("piece density must be nonnegative".into()));
            }
        }
        density_pieces.sort_by(|a, b| a.left.cmp(&b.left));
        if density_pieces.windows(2).any(|w| w[0].right > w[1].left) {
            return Err(Error::Argument("density pieces overlap".into()));
        }
        if atoms.iter().any(|a| !a.weight.is_positive()) {
            return Err(Error::Argument("atom weights must be positive".into()));
        }
        atoms.sort_by(|a, b| a.at.cmp(&b.at));
        if atoms.windows(2).any(|w| w[0].at == w[1].at) {
            return Err(Error::Argument("atom positions must be distinct".into()));
        }
        Ok(Measure1D { background_density, density_pieces, atoms })
    }

    pub fn lebesgue() -> Self {
        Self::with_background(Rational::one())
    }

    pub fn with_background(density: Rational) -> Self {
        assert!(!density.is_negative());
        Measure1D { background_density: density, density_pieces: Vec::new(), atoms: Vec::new() }
    }

    /// A single point mass and nothing else.
    pub fn atom(at: Rational, weight: Rational) -> Result<Self> {
        Self::new(Rational::zero(), Vec::new(), vec![Atom { at, weight }])
    }

    pub fn background_density(&self) -> &Rational {
        &self.background_density
    }

    pub fn density_pieces(&self) -> &[DensityPiece] {
        &self.density_pieces
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_lebesgue(&self) -> bool {
        self.background_density == Rational::one() && self.density_pieces.is_empty() && self.atoms.is_empty()
    }

    /// No mass anywhere.
    pub fn is_zero(&self) -> bool {
        self.background_density.is_zero()
            && self.atoms.is_empty()
            && self.density_pieces.iter().all(|p| p.density.is_zero())
    }

    /// Sorted distinct piece endpoints and atom positions.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .density_pieces
            .iter()
            .flat_map(|p| [p.left.clone(), p.right.clone()])
            .chain(self.atoms.iter().map(|a| a.at.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Density at `x` (pieces are half-open).
    pub fn density_at(&self, x: &Rational) -> &Rational {
        let i = self.density_pieces.partition_point(|p| p.right <= *x);
        match self.density_pieces.get(i) {
            Some(p) if p.left <= *x => &p.density,
            _ => &self.background_density,
        }
    }

    pub fn atom_weight(&self, x: &Rational) -> Rational {
        match self.atoms.binary_search_by(|a| a.at.cmp(x)) {
            Ok(i) => self.atoms[i].weight.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Integral of the density over `(left, right)`, ignoring atoms.
    fn continuous_part(&self, left: &ExtRational, right: &ExtRational) -> ExtRational {
        if left >= right {
            return ExtRational::zero();
        }
        let bounded = left.is_finite() && right.is_finite();
        if !bounded && self.background_density.is_positive() {
            return ExtRational::PosInf;
        }
        let mut total = match (left, right) {
            (ExtRational::Finite(l), ExtRational::Finite(r)) => &self.background_density * (r - l),
            _ => Rational::zero(),
        };
        for p in &self.density_pieces {
            let lo = std::cmp::max(ExtRational::Finite(p.left.clone()), left.clone());
            let hi = std::cmp::min(ExtRational::Finite(p.right.clone()), right.clone());
            if let (ExtRational::Finite(lo), ExtRational::Finite(hi)) = (&lo, &hi) {
                if lo < hi {
                    total += &((&p.density - &self.background_density) * (hi - lo));
                }
            }
        }
        ExtRational::Finite(total)
    }

    /// μ of the open interval `(left, right)`.
    pub fn interval_measure(&self, left: &ExtRational, right: &ExtRational) -> ExtRational {
        let cont = self.continuous_part(left, right);
        let atoms: Rational = self
            .atoms
            .iter()
            .filter(|a| *left < a.at && *right > a.at)
            .map(|a| &a.weight)
            .sum();
        cont.checked_add(&atoms.into()).expect("finite atom mass")
    }

    /// μ of the half-open interval `[left, right)`.
    pub fn half_open_measure(&self, left: &Rational, right: &Rational) -> ExtRational {
        let open = self.interval_measure(&left.clone().into(), &right.clone().into());
        open.checked_add(&self.atom_weight(left).into()).expect("finite atom mass")
    }

    pub fn measure_of(&self, set: &IntervalSet) -> ExtRational {
        set.components()
            .iter()
            .map(|c| self.interval_measure(&c.left, &c.right))
            .fold(ExtRational::zero(), |acc, m| acc.checked_add(&m).expect("measures are nonnegative"))
    }

    pub fn total_mass(&self) -> ExtRational {
        self.measure_of(&IntervalSet::whole_line())
    }

    /// Constant-density segments covering `[left, right)`.
    fn segments(&self, left: &Rational, right: &Rational) -> Vec<(Rational, Rational, Rational)> {
        let mut cuts: Vec<Rational> = vec![left.clone(), right.clone()];
        for p in &self.density_pieces {
            for e in [&p.left, &p.right] {
                if e > left && e < right {
                    cuts.push(e.clone());
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let d = self.density_at(&w[0]).clone();
                (w[0].clone(), w[1].clone(), d)
            })
            .collect()
    }

    /// The measure `A ↦ μ(A ∩ S)` where `S` has density region `region` and
    /// contains exactly the atoms accepted by `keep_atom`.
    fn restrict_with(&self, region: &IntervalSet, keep_atom: impl Fn(&Rational) -> bool) -> Result<Measure1D> {
        let mut pieces = Vec::new();
        for c in region.components() {
            let (left, right) = match (&c.left, &c.right) {
                (ExtRational::Finite(l), ExtRational::Finite(r)) => (l.clone(), r.clone()),
                _ if self.background_density.is_positive() => {
                    return Err(Error::Argument(
                        "cannot restrict a measure with positive background to an unbounded set".into(),
                    ))
                }
                _ => {
                    // without background, only the pieces carry density
                    let Some(first) = self.density_pieces.first() else { continue };
                    let last = self.density_pieces.last().expect("nonempty");
                    let l = std::cmp::max(c.left.clone(), first.left.clone().into());
                    let r = std::cmp::min(c.right.clone(), last.right.clone().into());
                    match (l, r) {
                        (ExtRational::Finite(l), ExtRational::Finite(r)) if l < r => (l, r),
                        _ => continue,
                    }
                }
            };
            for (l, r, d) in self.segments(&left, &right) {
                if d.is_positive() {
                    pieces.push(DensityPiece { left: l, right: r, density: d });
                }
            }
        }
        let atoms = self.atoms.iter().filter(|a| keep_atom(&a.at)).cloned().collect();
        Measure1D::new(Rational::zero(), pieces, atoms)
    }

    /// μ restricted to the open set `set`.
    pub fn restrict_to(&self, set: &IntervalSet) -> Result<Measure1D> {
        self.restrict_with(set, |x| set.contains(x))
    }

    /// μ restricted to `a \ b` for open sets `a`, `b`. Endpoints of `b` inside `a`
    /// belong to the difference and keep their atoms.
    pub fn restrict_to_difference(&self, a: &IntervalSet, b: &IntervalSet) -> Result<Measure1D> {
        let region = a.intersection(&b.exterior());
        self.restrict_with(&region, |x| a.contains(x) && !b.contains(x))
    }
}
