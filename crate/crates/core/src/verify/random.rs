use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{ExtRational, Rational};
use crate::measure::{Atom, DensityPiece, IntervalSet, Measure1D, OpenInterval};
use crate::stepfn::{Piece, StepFunction};

use super::Instance;

/// Cap on the number of distinct breakpoints of a generated instance.
pub const MAX_SIZE: usize = 12;

const VALUES: [(i64, i64); 8] = [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1), (5, 2), (4, 1)];
const WEIGHTS: [(i64, i64); 4] = [(1, 2), (1, 1), (2, 1), (3, 1)];
const DENSITIES: [(i64, i64); 5] = [(0, 1), (1, 2), (1, 1), (2, 1), (3, 1)];
const BACKGROUNDS: [(i64, i64); 3] = [(1, 2), (1, 1), (2, 1)];

fn pick(rng: &mut ChaCha8Rng, table: &[(i64, i64)]) -> Rational {
    let (n, d) = table[rng.gen_range(0..table.len())];
    Rational::frac(n, d)
}

/// A multiple of 1/4 in `[-4, 4]`.
fn position(rng: &mut ChaCha8Rng) -> Rational {
    Rational::frac(rng.gen_range(-16..=16), 4)
}

fn distinct_positions(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
    let mut all: Vec<i64> = (-16..=16).collect();
    all.shuffle(rng);
    let mut out: Vec<Rational> = all[..count.min(all.len())].iter().map(|&k| Rational::frac(k, 4)).collect();
    out.sort();
    out
}

/// Deterministic instance with at most `size` (capped at [`MAX_SIZE`])
/// breakpoints between `f` and `μ`. Sizes 0 and 1 give `f ≡ 0`.
pub fn random_instance(seed: u64, size: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = size.min(MAX_SIZE);

    let background = if rng.gen_bool(0.25) { Rational::zero() } else { pick(&mut rng, &BACKGROUNDS) };
    if size < 2 {
        // no room for a nonzero f; μ gets at most `size` breakpoints
        let measure = if size == 1 && background.is_zero() {
            Measure1D::atom(position(&mut rng), pick(&mut rng, &WEIGHTS)).expect("valid atom")
        } else {
            Measure1D::with_background(std::cmp::max(background, Rational::frac(1, 2)))
        };
        return Instance::new(measure, StepFunction::zero(), seed, format!("seed={seed} size={size} f=0"))
            .expect("f = 0 is admissible");
    }

    let f_points = rng.gen_range(2..=size);
    let xs = distinct_positions(&mut rng, f_points);
    let mut pieces: Vec<Piece> = xs
        .windows(2)
        .map(|w| Piece { left: w[0].clone(), right: w[1].clone(), value: pick(&mut rng, &VALUES) })
        .collect();
    if pieces.iter().all(|p| p.value.is_zero()) {
        let i = rng.gen_range(0..pieces.len());
        pieces[i].value = Rational::one();
    }
    let function = StepFunction::new(pieces).expect("generated pieces are valid");

    let mut budget = size.saturating_sub(f_points);
    let mut atoms: Vec<Atom> = Vec::new();
    let mut density: Vec<DensityPiece> = Vec::new();
    while budget > 0 {
        let roll: f64 = rng.gen();
        if roll < 0.3 {
            let at = position(&mut rng);
            if atoms.iter().all(|a| a.at != at) {
                atoms.push(Atom { at, weight: pick(&mut rng, &WEIGHTS) });
            }
            budget -= 1;
        } else if roll < 0.6 && budget >= 2 {
            let ends = distinct_positions(&mut rng, 2);
            let overlaps = density.iter().any(|p| p.left < ends[1] && ends[0] < p.right);
            if !overlaps {
                density.push(DensityPiece {
                    left: ends[0].clone(),
                    right: ends[1].clone(),
                    density: pick(&mut rng, &DENSITIES),
                });
            }
            budget -= 2;
        } else {
            break;
        }
    }
    let has_mass = background.is_positive()
        || !atoms.is_empty()
        || density.iter().any(|p| p.density.is_positive());
    if !has_mass {
        // put mass where f lives
        let w = &function.pieces()[0];
        atoms.push(Atom { at: w.left.clone(), weight: Rational::one() });
    }
    let descriptor = format!(
        "seed={seed} size={size} background={background} atoms={} density_pieces={} f_pieces={}",
        atoms.len(),
        density.len(),
        function.pieces().len()
    );
    let measure = Measure1D::new(background, density, atoms).expect("generated measure is valid");
    Instance::new(measure, function, seed, descriptor).expect("bounded support gives finite level sets")
}

/// Union of up to 3 bounded open intervals with endpoints on the quarter grid in `[-5, 5]`.
pub fn random_open_set(rng: &mut ChaCha8Rng) -> IntervalSet {
    let count = rng.gen_range(0..=3);
    let parts = (0..count).map(|_| {
        let a = rng.gen_range(-20..20);
        let len = rng.gen_range(1..=12);
        OpenInterval::bounded(Rational::frac(a, 4), Rational::frac(a + len, 4)).expect("nonempty")
    });
    IntervalSet::from_intervals(parts.collect::<Vec<_>>())
}

/// A distributionally symmetric step function: the blocks of the positive
/// half-line reappear on the negative half-line in shuffled order.
pub fn random_ds_function(rng: &mut ChaCha8Rng) -> StepFunction {
    let blocks: Vec<(Rational, Rational)> = (0..rng.gen_range(1..=5))
        .map(|_| (Rational::frac(rng.gen_range(1..=6), 4), pick(rng, &VALUES)))
        .collect();
    let mut shuffled = blocks.clone();
    shuffled.shuffle(rng);
    let mut pieces = Vec::new();
    let mut cursor = Rational::zero();
    for (len, v) in &blocks {
        let next = &cursor + len;
        pieces.push(Piece { left: cursor.clone(), right: next.clone(), value: v.clone() });
        cursor = next;
    }
    let mut cursor = Rational::zero();
    for (len, v) in &shuffled {
        let next = &cursor - len;
        pieces.push(Piece { left: next.clone(), right: cursor.clone(), value: v.clone() });
        cursor = next;
    }
    StepFunction::new(pieces).expect("blocks tile the line without overlap")
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn quarter_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    Rational::frac(rng.gen_range(lo * 4..=hi * 4), 4)
}

pub(crate) fn finite_measure(mu: &Measure1D, set: &IntervalSet) -> Option<Rational> {
    match mu.measure_of(set) {
        ExtRational::Finite(m) => Some(m),
        _ => None,
    }
}
