//! Instance and solution transforms between the Ramsey-type and the
//! adjacent-Hindman-type principles, and a harness that runs one
//! forward / search / backward / check round trip on a finite window.
//!
//! | kind           | instance                         | transformed instance             |
//! |----------------|----------------------------------|----------------------------------|
//! | `RT_TO_ZRT(n)`  | sets, arity `n`                  | invariant sets, arity `n + 1`    |
//! | `ZRT_TO_AHT(d)` | invariant sets, arity `d + 1`    | vectors, arity `d`, sum-bounded  |
//! | `AHT_TO_ZRT(d)` | vectors, arity `d`               | invariant sets, arity `d + 1`    |
//! | `APAHT_TO_RT(n)`| vectors, arity `n`               | sets over bit positions, `n + 1` |

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::bitcomb::{block, differences, is_apart};
use crate::colourings::{invariance_witness, Colour, FiniteColouring, Mode, Shape, VectorDomain};
use crate::error::{Error, Result};
use crate::search::{
    find_afs_mono_par, find_afs_mono_with, find_mono_subset_par, find_mono_subset_with, AfsQuery,
    SubsetQuery, Witness,
};
use crate::sums::{adjacent_tuples, gap_increasing, partial_sums, IncreasingSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    RtToZrt(usize),
    ZrtToAht(usize),
    AhtToZrt(usize),
    ApahtToRt(usize),
}

impl ReductionKind {
    pub fn new(tag: &str, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Arity { min: 1, got: 0 });
        }
        Ok(match tag.to_ascii_uppercase().replace('-', "_").as_str() {
            "RT_TO_ZRT" => ReductionKind::RtToZrt(arity),
            "ZRT_TO_AHT" => ReductionKind::ZrtToAht(arity),
            "AHT_TO_ZRT" => ReductionKind::AhtToZrt(arity),
            "APAHT_TO_RT" => ReductionKind::ApahtToRt(arity),
            other => {
                return Err(Error::Mismatch {
                    expected: "RT_TO_ZRT, ZRT_TO_AHT, AHT_TO_ZRT or APAHT_TO_RT".into(),
                    got: other.into(),
                })
            }
        })
    }

    pub fn tag(self) -> &'static str {
        match self {
            ReductionKind::RtToZrt(_) => "RT_TO_ZRT",
            ReductionKind::ZrtToAht(_) => "ZRT_TO_AHT",
            ReductionKind::AhtToZrt(_) => "AHT_TO_ZRT",
            ReductionKind::ApahtToRt(_) => "APAHT_TO_RT",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            ReductionKind::RtToZrt(a)
            | ReductionKind::ZrtToAht(a)
            | ReductionKind::AhtToZrt(a)
            | ReductionKind::ApahtToRt(a) => a,
        }
    }

    fn param_name(self) -> &'static str {
        match self {
            ReductionKind::RtToZrt(_) | ReductionKind::ApahtToRt(_) => "n",
            ReductionKind::ZrtToAht(_) | ReductionKind::AhtToZrt(_) => "d",
        }
    }

    /// Size of the solution sought on the transformed instance when the
    /// original solution should have `target` elements.
    pub fn sought(self, target: usize) -> usize {
        match self {
            ReductionKind::RtToZrt(_) | ReductionKind::ApahtToRt(_) => target + 1,
            ReductionKind::ZrtToAht(_) | ReductionKind::AhtToZrt(_) => target,
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.tag(), self.arity())
    }
}

fn expect_shape(instance: &FiniteColouring, sets: bool, dim: usize) -> Result<()> {
    let mode_ok = (instance.mode() == Mode::Sets) == sets;
    if !mode_ok || instance.dim() != dim {
        return Err(Error::Mismatch {
            expected: format!(
                "{} colouring of arity {dim}",
                if sets { "sets" } else { "vectors" }
            ),
            got: format!(
                "{} colouring of arity {}",
                instance.mode().name(),
                instance.dim()
            ),
        });
    }
    Ok(())
}

fn undefined_at(t: &[u64]) -> Error {
    Error::Malformed(format!("instance has no colour for {t:?}"))
}

/// Highest bit position usable by `APAHT_TO_RT`: the largest `w` with
/// `2^w - 1 <= window`, so every half-open block below `w` is a coloured
/// value.
pub fn bit_window(window: u64) -> u64 {
    u64::from((window.saturating_add(1)).ilog2())
}

/// Transform an instance of the source principle into one of the target
/// principle.
pub fn forward_transform(
    kind: ReductionKind,
    instance: &FiniteColouring,
) -> Result<FiniteColouring> {
    let palette = instance.palette();
    let window = instance.window();
    match kind {
        ReductionKind::RtToZrt(n) => {
            expect_shape(instance, true, n)?;
            let mut args = vec![0; n];
            FiniteColouring::try_from_fn(Shape::sets(n + 1, window), palette, |t| {
                for (a, x) in args.iter_mut().zip(&t[1..]) {
                    *a = x - t[0];
                }
                instance.colour(&args).ok_or_else(|| undefined_at(&args))
            })
        }
        ReductionKind::ZrtToAht(d) => {
            expect_shape(instance, true, d + 1)?;
            if let Some((first, second)) = invariance_witness(instance)? {
                return Err(Error::NotInvariant { first, second });
            }
            let domain = if d == 1 {
                VectorDomain::Box
            } else {
                VectorDomain::Simplex
            };
            let mut anchored = vec![0; d + 1];
            FiniteColouring::try_from_fn(Shape::vectors(d, window, domain), palette, |y| {
                for (i, yi) in y.iter().enumerate() {
                    anchored[i + 1] = anchored[i] + yi;
                }
                instance
                    .colour(&anchored)
                    .ok_or_else(|| undefined_at(&anchored))
            })
        }
        ReductionKind::AhtToZrt(d) => {
            expect_shape(instance, false, d)?;
            let mut gaps = vec![0; d];
            FiniteColouring::try_from_fn(Shape::sets(d + 1, window), palette, |t| {
                for (g, w) in gaps.iter_mut().zip(t.windows(2)) {
                    *g = w[1] - w[0];
                }
                instance.colour(&gaps).ok_or_else(|| undefined_at(&gaps))
            })
        }
        ReductionKind::ApahtToRt(n) => {
            expect_shape(instance, false, n)?;
            let bits = bit_window(window);
            let mut blocks = vec![0; n];
            FiniteColouring::try_from_fn(Shape::sets(n + 1, bits), palette, |t| {
                for (b, w) in blocks.iter_mut().zip(t.windows(2)) {
                    *b = block(w[0], w[1] - 1)?;
                }
                instance
                    .colour(&blocks)
                    .ok_or_else(|| undefined_at(&blocks))
            })
        }
    }
}

/// Map a solution of the transformed instance back to a solution of the
/// original one.
pub fn backward_transform(kind: ReductionKind, solution: &[u64]) -> Result<IncreasingSequence> {
    let solution = IncreasingSequence::new(solution.to_vec())?;
    if solution.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    match kind {
        ReductionKind::RtToZrt(_) => {
            let base = solution[0];
            IncreasingSequence::new(solution[1..].iter().map(|x| x - base).collect())
        }
        ReductionKind::ZrtToAht(_) => partial_sums(&solution),
        ReductionKind::AhtToZrt(_) => {
            IncreasingSequence::new(differences(&gap_increasing(&solution)?)?)
        }
        ReductionKind::ApahtToRt(_) => {
            let blocks = solution
                .windows(2)
                .map(|w| block(w[0], w[1] - 1))
                .collect::<Result<Vec<_>>>()?;
            IncreasingSequence::new(blocks)
        }
    }
}

/// Every `dim`-subset of `elements` has colour `colour` under `c`.
fn sets_mono(c: &FiniteColouring, elements: &[u64], colour: Option<Colour>) -> bool {
    uniform(
        elements
            .iter()
            .copied()
            .combinations(c.dim())
            .map(|t| c.colour(&t)),
        colour,
    )
}

/// Every adjacent `dim`-tuple of `seq` has colour `colour` under `c`.
fn afs_mono(c: &FiniteColouring, seq: &[u64], colour: Option<Colour>) -> Result<bool> {
    if seq.is_empty() {
        return Ok(true);
    }
    let tuples = adjacent_tuples(seq, c.dim())?;
    Ok(uniform(tuples.iter().map(|t| c.colour(&t.values)), colour))
}

/// All colours are defined, equal to each other, and equal to `expected`
/// when that is given.
fn uniform(mut colours: impl Iterator<Item = Option<Colour>>, expected: Option<Colour>) -> bool {
    let mut want = expected;
    colours.all(|got| match (got, want) {
        (None, _) => false,
        (Some(g), None) => {
            want = Some(g);
            true
        }
        (Some(g), Some(w)) => g == w,
    })
}

/// Whether a mapped-back solution solves the original instance in the given
/// colour: monochromatic subsets for the Ramsey-type sources, monochromatic
/// adjacent tuples (and apartness for `APAHT_TO_RT`) for the Hindman-type
/// ones.
pub fn solves_original(
    kind: ReductionKind,
    instance: &FiniteColouring,
    mapped: &[u64],
    colour: Option<Colour>,
) -> Result<bool> {
    Ok(match kind {
        ReductionKind::RtToZrt(_) | ReductionKind::ZrtToAht(_) => {
            sets_mono(instance, mapped, colour)
        }
        ReductionKind::AhtToZrt(_) => afs_mono(instance, mapped, colour)?,
        ReductionKind::ApahtToRt(_) => is_apart(mapped)? && afs_mono(instance, mapped, colour)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    #[default]
    Sequential,
    /// Split the witness search across the rayon pool.
    Parallel,
}

/// Outcome of one round trip. `pass` and `colour` are `None` when the
/// transformed window holds no witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub kind: &'static str,
    pub params: BTreeMap<&'static str, usize>,
    pub window: u64,
    pub target: usize,
    pub witness: Option<Vec<u64>>,
    pub mapped: Option<Vec<u64>>,
    pub pass: Option<bool>,
    pub colour: Option<Colour>,
    #[serde(skip)]
    pub original_digest: String,
    #[serde(skip)]
    pub transformed_digest: String,
    #[serde(skip)]
    pub sought: usize,
}

impl ReductionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn search(
    kind: ReductionKind,
    transformed: &FiniteColouring,
    sought: usize,
    strategy: SearchStrategy,
) -> Result<Option<Witness>> {
    match kind {
        ReductionKind::RtToZrt(_) | ReductionKind::AhtToZrt(_) | ReductionKind::ApahtToRt(_) => {
            let q = SubsetQuery {
                size: sought,
                separated: false,
            };
            match strategy {
                SearchStrategy::Sequential => find_mono_subset_with(transformed, q),
                SearchStrategy::Parallel => find_mono_subset_par(transformed, q),
            }
        }
        ReductionKind::ZrtToAht(_) => {
            let q = AfsQuery::new(sought, transformed.window());
            match strategy {
                SearchStrategy::Sequential => find_afs_mono_with(transformed, q),
                SearchStrategy::Parallel => find_afs_mono_par(transformed, q),
            }
        }
    }
}

/// Transform `instance`, find the lexicographically least witness of the
/// matching size on the result, map it back and check it on `instance`.
pub fn verify_reduction(
    kind: ReductionKind,
    instance: &FiniteColouring,
    target: usize,
) -> Result<ReductionReport> {
    verify_reduction_with(kind, instance, target, SearchStrategy::Sequential)
}

pub fn verify_reduction_with(
    kind: ReductionKind,
    instance: &FiniteColouring,
    target: usize,
    strategy: SearchStrategy,
) -> Result<ReductionReport> {
    let transformed = forward_transform(kind, instance)?;
    let sought = kind.sought(target);
    let witness = search(kind, &transformed, sought, strategy)?;
    let mut report = ReductionReport {
        kind: kind.tag(),
        params: BTreeMap::from([(kind.param_name(), kind.arity())]),
        window: instance.window(),
        target,
        witness: None,
        mapped: None,
        pass: None,
        colour: None,
        original_digest: instance.digest(),
        transformed_digest: transformed.digest(),
        sought,
    };
    if let Some(w) = witness {
        let mapped = backward_transform(kind, &w.elements)?;
        report.pass = Some(solves_original(kind, instance, &mapped, w.colour)?);
        report.colour = w.colour;
        report.witness = Some(w.elements.into_vec());
        report.mapped = Some(mapped.into_vec());
    }
    Ok(report)
}
