//! Finite stage-wise enumerations standing in for the halting set, the
//! four-colour pair colouring that codes such an enumeration, and the
//! procedure that reads membership back off a monochromatic sequence.
//!
//! An [`EnumerationOracle`] lists `(element, stage)` events. Its stage-`s`
//! approximation is cumulative: everything enumerated at a stage `<= s`.
//! After its last event the approximation no longer changes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bitcomb::{block, lambda, mu};
use crate::colourings::{Colour, Colouring, FiniteColouring, Shape, VectorDomain};
use crate::error::{Error, Result};
use crate::sums::IncreasingSequence;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OracleFile", into = "OracleFile")]
pub struct EnumerationOracle {
    /// sorted by element; elements are distinct
    events: Vec<(u64, u64)>,
}

#[derive(Serialize, Deserialize)]
struct OracleFile {
    events: Vec<(u64, u64)>,
}

impl TryFrom<OracleFile> for EnumerationOracle {
    type Error = Error;

    fn try_from(f: OracleFile) -> Result<Self> {
        Self::new(f.events)
    }
}

impl From<EnumerationOracle> for OracleFile {
    fn from(o: EnumerationOracle) -> Self {
        OracleFile { events: o.events }
    }
}

impl EnumerationOracle {
    /// `events` are `(element, stage)` pairs; an element may appear once.
    pub fn new(mut events: Vec<(u64, u64)>) -> Result<Self> {
        events.sort_unstable();
        if let Some(w) = events.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateEvent(w[0].0));
        }
        Ok(Self { events })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: OracleFile =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("oracle serializes")
    }

    pub fn events(&self) -> &[(u64, u64)] {
        &self.events
    }

    /// Last stage at which anything is enumerated (0 for an empty oracle).
    pub fn settle_stage(&self) -> u64 {
        self.events.iter().map(|&(_, s)| s).max().unwrap_or(0)
    }

    /// The set the enumeration converges to.
    pub fn final_set(&self) -> BTreeSet<u64> {
        self.events.iter().map(|&(e, _)| e).collect()
    }

    pub fn contains(&self, element: u64) -> bool {
        self.events
            .binary_search_by_key(&element, |&(e, _)| e)
            .is_ok()
    }

    /// Elements below `bound` enumerated by stage `stage`.
    pub fn approx(&self, bound: u64, stage: u64) -> BTreeSet<u64> {
        self.events
            .iter()
            .filter(|&&(e, s)| e < bound && s <= stage)
            .map(|&(e, _)| e)
            .collect()
    }

    /// `approx(bound, a) == approx(bound, b)`, i.e. nothing below `bound`
    /// is enumerated strictly after the earlier stage and by the later one.
    pub fn approx_agrees(&self, bound: u64, a: u64, b: u64) -> bool {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        !self
            .events
            .iter()
            .any(|&(e, s)| e < bound && lo < s && s <= hi)
    }
}

/// Colour `(i, j)` of the four-colour pair colouring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoByTwoColour {
    pub i: bool,
    pub j: bool,
}

impl TwoByTwoColour {
    pub const BOTH: Self = Self { i: true, j: true };

    /// `(i, j) -> 2i + j`
    pub fn encode(self) -> Colour {
        2 * Colour::from(self.i) + Colour::from(self.j)
    }

    pub fn decode(c: Colour) -> Option<Self> {
        (c < 4).then_some(Self {
            i: c & 2 != 0,
            j: c & 1 != 0,
        })
    }
}

/// `i = [λ(x) < λ(y)]`, `j = [approx(λ(x), μ(x)) = approx(λ(x), μ(y))]`.
pub fn lower_bound_colour(w: &EnumerationOracle, x: u64, y: u64) -> Result<TwoByTwoColour> {
    let (lx, ly) = (lambda(x)?, lambda(y)?);
    let (mx, my) = (mu(x)?, mu(y)?);
    Ok(TwoByTwoColour {
        i: lx < ly,
        j: w.approx_agrees(lx.into(), mx.into(), my.into()),
    })
}

/// The four-colour pair colouring evaluated on demand over every pair of
/// positive values, for windows too large to tabulate.
#[derive(Debug, Clone, Copy)]
pub struct LowerBound<'a> {
    pub oracle: &'a EnumerationOracle,
}

impl Colouring for LowerBound<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn colour(&self, t: &[u64]) -> Option<Colour> {
        match t {
            [x, y] => lower_bound_colour(self.oracle, *x, *y)
                .ok()
                .map(TwoByTwoColour::encode),
            _ => None,
        }
    }
}

/// Tabulate the four-colour pair colouring on `[1, window]^2`.
pub fn lower_bound_colouring(w: &EnumerationOracle, window: u64) -> Result<FiniteColouring> {
    FiniteColouring::try_from_fn(Shape::vectors(2, window, VectorDomain::Box), 4, |t| {
        Ok(lower_bound_colour(w, t[0], t[1])?.encode())
    })
}

/// `x_n = 2^(S+2n) + 2^(S+2n+1)` for `n < m`, with `S` the settle stage.
/// The bit blocks are disjoint and rising and every `μ` is past the settle
/// stage, so every adjacent pair of adjacent sums is coloured `(1, 1)`.
pub fn synthesize_solution(w: &EnumerationOracle, m: usize) -> Result<IncreasingSequence> {
    if m == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let s = w.settle_stage();
    let seq = (0..m as u64)
        .map(|n| {
            let lo = n
                .checked_mul(2)
                .and_then(|v| v.checked_add(s))
                .ok_or(Error::Overflow { op: "synthesize" })?;
            block(
                lo,
                lo.checked_add(1)
                    .ok_or(Error::Overflow { op: "synthesize" })?,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    IncreasingSequence::new(seq)
}

/// Membership of `m` read off the first term `x` with `λ(x) > m`, as
/// `m ∈ approx(λ(x), μ(x))`.
pub fn decode(seq: &[u64], w: &EnumerationOracle, m: u64) -> Result<bool> {
    for &x in seq {
        if u64::from(lambda(x)?) > m {
            return Ok(w.approx(lambda(x)?.into(), mu(x)?.into()).contains(&m));
        }
    }
    Err(Error::WindowExhausted { query: m })
}
