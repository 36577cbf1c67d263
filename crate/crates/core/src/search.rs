//! Brute-force monochromatic witness search and finite analogue numbers.
//!
//! Every search is a depth-first walk that extends candidates in increasing
//! order and prunes a prefix as soon as it breaks monochromaticity. All the
//! witness conditions are inherited by prefixes, so the first complete
//! candidate reached is the lexicographically least one.

use rayon::prelude::*;
use serde::Serialize;

use crate::colourings::{
    gen_colourings, Colour, Colouring, FiniteColouring, GenSpec, Generation, Mode, Shape,
    VectorDomain,
};
use crate::error::{Error, Result};
use crate::sums::IncreasingSequence;

/// A monochromatic witness and its colour. The colour is `None` when the
/// witness is too short to contain any coloured tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Witness {
    pub elements: IncreasingSequence,
    pub colour: Option<Colour>,
}

/// Call `f` on every `k`-combination of `0..n` in lexicographic order until
/// it returns `false`. Returns whether every call returned `true`.
fn all_combinations(
    n: usize,
    k: usize,
    idx: &mut Vec<usize>,
    mut f: impl FnMut(&[usize]) -> bool,
) -> bool {
    if k > n {
        return true;
    }
    idx.clear();
    idx.extend(0..k);
    loop {
        if !f(idx) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Options for [`find_mono_subset_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetQuery {
    pub size: usize,
    /// Also require the separation condition on the witness.
    pub separated: bool,
}

struct SubsetSearch<'a> {
    c: &'a FiniteColouring,
    query: SubsetQuery,
    chosen: Vec<u64>,
    tuple: Vec<u64>,
    idx: Vec<usize>,
}

impl SubsetSearch<'_> {
    /// Whether appending `x` keeps every tuple through `x` in `colour`.
    fn admits(&mut self, x: u64, colour: &mut Option<Colour>) -> bool {
        let dim = self.c.dim();
        let j = self.chosen.len();
        if self.query.separated && j >= 2 {
            let g = self.chosen[j - 1] - self.chosen[j - 2];
            let h = x - self.chosen[j - 1];
            if g.ilog2() >= h.trailing_zeros() {
                return false;
            }
        }
        if j + 1 < dim {
            return true;
        }
        let (c, chosen, tuple) = (self.c, &self.chosen, &mut self.tuple);
        all_combinations(j, dim - 1, &mut self.idx, |sub| {
            tuple.clear();
            tuple.extend(sub.iter().map(|&i| chosen[i]));
            tuple.push(x);
            match (c.colour(tuple), *colour) {
                (None, _) => false,
                (Some(got), None) => {
                    *colour = Some(got);
                    true
                }
                (Some(got), Some(want)) => got == want,
            }
        })
    }

    fn dfs(&mut self, colour: Option<Colour>) -> Option<Witness> {
        let m = self.query.size;
        let j = self.chosen.len();
        if j == m {
            return Some(Witness {
                elements: IncreasingSequence::new(self.chosen.clone()).unwrap(),
                colour,
            });
        }
        let window = self.c.window();
        let start = self.chosen.last().map_or(0, |&x| x + 1);
        let need_after = (m - j - 1) as u64;
        if window < need_after {
            return None;
        }
        for x in start..=window - need_after {
            let mut col = colour;
            if self.admits(x, &mut col) {
                self.chosen.push(x);
                let found = self.dfs(col);
                self.chosen.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
}

fn check_subset_query(c: &FiniteColouring, query: SubsetQuery) -> Result<()> {
    if c.mode() != Mode::Sets {
        return Err(Error::Mismatch {
            expected: "sets mode".into(),
            got: c.mode().name().into(),
        });
    }
    if query.size < c.dim() {
        return Err(Error::TooShort {
            needed: c.dim(),
            got: query.size,
        });
    }
    Ok(())
}

fn subset_search_from(
    c: &FiniteColouring,
    query: SubsetQuery,
    first: Option<u64>,
) -> Option<Witness> {
    let mut s = SubsetSearch {
        c,
        query,
        chosen: Vec::new(),
        tuple: Vec::new(),
        idx: Vec::new(),
    };
    match first {
        None => s.dfs(None),
        Some(x) => {
            let mut col = None;
            if !s.admits(x, &mut col) {
                return None;
            }
            s.chosen.push(x);
            s.dfs(col)
        }
    }
}

/// Lexicographically least `m`-subset of the window all of whose
/// `dim`-subsets share one colour.
pub fn find_mono_subset(c: &FiniteColouring, m: usize) -> Result<Option<Witness>> {
    find_mono_subset_with(
        c,
        SubsetQuery {
            size: m,
            separated: false,
        },
    )
}

pub fn find_mono_subset_with(c: &FiniteColouring, query: SubsetQuery) -> Result<Option<Witness>> {
    check_subset_query(c, query)?;
    Ok(subset_search_from(c, query, None))
}

/// Same result as [`find_mono_subset_with`], with the candidate space split
/// by first element across the rayon pool. The least first element that
/// yields a witness wins, so the answer does not depend on scheduling.
pub fn find_mono_subset_par(c: &FiniteColouring, query: SubsetQuery) -> Result<Option<Witness>> {
    check_subset_query(c, query)?;
    if query.size == 0 {
        return Ok(subset_search_from(c, query, None));
    }
    let last_first = match c.window().checked_sub(query.size as u64 - 1) {
        Some(v) => v,
        None => return Ok(None),
    };
    Ok((0..=last_first)
        .into_par_iter()
        .find_map_first(|x| subset_search_from(c, query, Some(x))))
}

/// Options for [`find_afs_mono_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AfsQuery {
    pub length: usize,
    /// Every adjacent sum, hence the total of the sequence, stays within
    /// `[1, window]`.
    pub window: u64,
    /// Require the apartness condition on the sequence itself.
    pub apart: bool,
    /// Restrict to witnesses of this colour.
    pub colour: Option<Colour>,
    /// Least value allowed as first element.
    pub floor: u64,
}

impl AfsQuery {
    pub fn new(length: usize, window: u64) -> Self {
        Self {
            length,
            window,
            apart: false,
            colour: None,
            floor: 1,
        }
    }
}

struct AfsSearch<'a, C: ?Sized> {
    c: &'a C,
    query: AfsQuery,
    seq: Vec<u64>,
    prefix: Vec<u64>,
    tuple: Vec<u64>,
    idx: Vec<usize>,
}

impl<C: Colouring + ?Sized> AfsSearch<'_, C> {
    /// Check the adjacent tuples whose last block ends at the new element.
    fn admits(&mut self, y: u64, colour: &mut Option<Colour>) -> bool {
        let d = self.c.dim();
        let j = self.seq.len();
        if self.query.apart && j > 0 && self.seq[j - 1].ilog2() >= y.trailing_zeros() {
            return false;
        }
        let top = self.prefix[j] + y;
        let (c, prefix, tuple) = (self.c, &self.prefix, &mut self.tuple);
        // cut points c_0 < ... < c_{d-1} chosen from 0..=j, with c_d = j + 1
        all_combinations(j + 1, d, &mut self.idx, |cuts| {
            tuple.clear();
            for w in cuts.windows(2) {
                tuple.push(prefix[w[1]] - prefix[w[0]]);
            }
            tuple.push(top - prefix[cuts[d - 1]]);
            match (c.colour(tuple), *colour) {
                (None, _) => false,
                (Some(got), None) => {
                    *colour = Some(got);
                    true
                }
                (Some(got), Some(want)) => got == want,
            }
        })
    }

    fn dfs(&mut self, colour: Option<Colour>) -> Option<Witness> {
        let m = self.query.length;
        let j = self.seq.len();
        if j == m {
            return Some(Witness {
                elements: IncreasingSequence::new(self.seq.clone()).unwrap(),
                colour,
            });
        }
        let base = self.prefix[j];
        let start = self.seq.last().map_or(self.query.floor.max(1), |&y| y + 1);
        let rest = (m - j - 1) as u64;
        let mut y = start;
        // y + (y+1) + ... + (y+rest) must still fit
        while let Some(total) = y
            .checked_mul(rest + 1)
            .and_then(|v| v.checked_add(rest * (rest + 1) / 2))
            .and_then(|v| v.checked_add(base))
        {
            if total > self.query.window {
                break;
            }
            let mut col = colour;
            if self.admits(y, &mut col) {
                self.seq.push(y);
                self.prefix.push(base + y);
                let found = self.dfs(col);
                self.seq.pop();
                self.prefix.pop();
                if found.is_some() {
                    return found;
                }
            }
            y += 1;
        }
        None
    }
}

fn new_afs_search<C: Colouring + ?Sized>(c: &C, query: AfsQuery) -> AfsSearch<'_, C> {
    AfsSearch {
        c,
        query,
        seq: Vec::new(),
        prefix: vec![0],
        tuple: Vec::new(),
        idx: Vec::new(),
    }
}

/// Lexicographically least increasing sequence of length `m` whose adjacent
/// `dim`-tuples all lie in the domain of `c` and share one colour.
pub fn find_afs_mono<C: Colouring + ?Sized>(
    c: &C,
    m: usize,
    window: u64,
) -> Result<Option<Witness>> {
    find_afs_mono_with(c, AfsQuery::new(m, window))
}

pub fn find_afs_mono_with<C: Colouring + ?Sized>(
    c: &C,
    query: AfsQuery,
) -> Result<Option<Witness>> {
    if c.dim() == 0 {
        return Err(Error::Arity { min: 1, got: 0 });
    }
    if query.length == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    Ok(new_afs_search(c, restrict(query)).dfs(query.colour))
}

fn restrict(query: AfsQuery) -> AfsQuery {
    AfsQuery {
        floor: query.floor.max(1),
        ..query
    }
}

/// Parallel form of [`find_afs_mono_with`], split by first element.
pub fn find_afs_mono_par<C: Colouring + ?Sized>(c: &C, query: AfsQuery) -> Result<Option<Witness>> {
    if c.dim() == 0 {
        return Err(Error::Arity { min: 1, got: 0 });
    }
    if query.length == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let query = restrict(query);
    let lo = query.floor;
    let hi = query.window / query.length as u64;
    if hi < lo {
        return Ok(None);
    }
    Ok((lo..=hi).into_par_iter().find_map_first(|y| {
        let mut s = new_afs_search(c, query);
        let mut col = query.colour;
        if !s.admits(y, &mut col) {
            return None;
        }
        s.seq.push(y);
        s.prefix.push(y);
        s.dfs(col)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Principle {
    /// Ramsey: arbitrary colourings of `dim`-subsets.
    Rt,
    /// Ramsey restricted to translation-invariant colourings.
    Zrt,
    /// Adjacent Hindman in dimension `dim`.
    Aht,
    /// Translation-invariant Ramsey with separated witnesses.
    SepZrt,
    /// Adjacent Hindman with apart witnesses.
    Apaht,
}

impl Principle {
    pub fn name(self) -> &'static str {
        match self {
            Principle::Rt => "RT",
            Principle::Zrt => "ZRT",
            Principle::Aht => "AHT",
            Principle::SepZrt => "SEPZRT",
            Principle::Apaht => "APAHT",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "RT" => Principle::Rt,
            "ZRT" => Principle::Zrt,
            "AHT" => Principle::Aht,
            "SEPZRT" => Principle::SepZrt,
            "APAHT" => Principle::Apaht,
            other => {
                return Err(Error::Mismatch {
                    expected: "RT, ZRT, AHT, SEPZRT or APAHT".into(),
                    got: other.into(),
                })
            }
        })
    }

    fn is_sets(self) -> bool {
        matches!(self, Principle::Rt | Principle::Zrt | Principle::SepZrt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteNumberQuery {
    pub principle: Principle,
    pub dim: usize,
    pub palette: usize,
    pub size: usize,
    pub cap: u64,
}

/// Outcome of [`finite_number`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteNumber {
    /// Least window size `n` at which every admissible colouring has a
    /// witness, with a colouring at `n - 1` that has none (if `n - 1` was a
    /// nonempty admissible window).
    Found {
        n: u64,
        tightness: Option<FiniteColouring>,
    },
    /// Some colouring at the cap has no witness.
    ExceedsCap {
        counterexample: Option<FiniteColouring>,
    },
}

impl FiniteNumber {
    pub fn value(&self) -> Option<u64> {
        match self {
            FiniteNumber::Found { n, .. } => Some(*n),
            FiniteNumber::ExceedsCap { .. } => None,
        }
    }

    pub fn counterexample(&self) -> Option<&FiniteColouring> {
        match self {
            FiniteNumber::Found { tightness, .. } => tightness.as_ref(),
            FiniteNumber::ExceedsCap { counterexample } => counterexample.as_ref(),
        }
    }
}

/// The admissible colourings at window size `n`, or `None` when the window
/// is too small to hold any candidate.
fn admissible(q: &FiniteNumberQuery, n: u64) -> Option<GenSpec> {
    if q.principle.is_sets() {
        // ground set {0, ..., n-1}
        if n < 2 {
            return None;
        }
        let invariant = q.principle != Principle::Rt;
        Some(GenSpec::sets(q.dim, n - 1, q.palette, invariant))
    } else {
        let domain = if q.dim == 1 {
            VectorDomain::Box
        } else {
            VectorDomain::Simplex
        };
        Some(GenSpec {
            shape: Shape::vectors(q.dim, n, domain),
            palette: q.palette,
            invariant: false,
        })
    }
}

fn has_witness(q: &FiniteNumberQuery, c: &FiniteColouring) -> Result<bool> {
    let found = match q.principle {
        Principle::Rt | Principle::Zrt => find_mono_subset(c, q.size)?,
        Principle::SepZrt => find_mono_subset_with(
            c,
            SubsetQuery {
                size: q.size,
                separated: true,
            },
        )?,
        Principle::Aht => find_afs_mono(c, q.size, c.window())?,
        Principle::Apaht => find_afs_mono_with(
            c,
            AfsQuery {
                apart: true,
                ..AfsQuery::new(q.size, c.window())
            },
        )?,
    };
    Ok(found.is_some())
}

/// Least window size `n <= cap` such that every admissible colouring of that
/// window has a witness of the requested size.
///
/// Window size counts the ground set: `{0, ..., n-1}` for the Ramsey-type
/// principles and the values `[1, n]` for the Hindman-type ones, whose
/// adjacent sums must all stay within `[1, n]`. Translation-invariant
/// colourings are enumerated through their difference tables.
pub fn finite_number(q: &FiniteNumberQuery, budget: u64) -> Result<FiniteNumber> {
    if q.dim == 0 || q.palette == 0 || q.size == 0 || q.cap == 0 {
        return Err(Error::Malformed(
            "finite number parameters must be at least 1".into(),
        ));
    }
    if q.principle.is_sets() && q.size < q.dim {
        return Err(Error::TooShort {
            needed: q.dim,
            got: q.size,
        });
    }
    let mut last_counterexample = None;
    for n in 1..=q.cap {
        let counterexample = match admissible(q, n) {
            None => {
                // a single point: only a 1-subset fits
                if q.size <= n as usize {
                    return Ok(FiniteNumber::Found { n, tightness: None });
                }
                None
            }
            Some(spec) => {
                let mut found = None;
                for c in gen_colourings(&spec, Generation::Exhaustive, budget)? {
                    if !has_witness(q, &c)? {
                        found = Some(c);
                        break;
                    }
                }
                if found.is_none() {
                    return Ok(FiniteNumber::Found {
                        n,
                        tightness: last_counterexample,
                    });
                }
                found
            }
        };
        last_counterexample = counterexample;
    }
    Ok(FiniteNumber::ExceedsCap {
        counterexample: last_counterexample,
    })
}
