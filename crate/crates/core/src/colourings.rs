//! Explicit finite-window colourings of tuples.
//!
//! Two ordering modes exist. In *sets* mode the domain is every strictly
//! increasing `dim`-tuple over `[0, window]`; these are the instances of
//! Ramsey-type principles. In *vectors* mode the domain is made of ordered
//! tuples of positive values, either the full box `[1, window]^dim` or the
//! simplex of tuples whose coordinates sum to at most `window`; these are the
//! instances of the adjacent Hindman principles.
//!
//! A translation-invariant sets-mode colouring is determined by its values on
//! tuples anchored at 0, so it factors through the successive differences of
//! the tuple. [`DifferenceColouring`] is that canonical form.

use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type Colour = u8;

/// Largest palette an explicit table can hold; one byte value is reserved.
pub const MAX_PALETTE: usize = 255;

/// Hard cap on the number of cells of a dense table.
pub const MAX_CELLS: u128 = 1 << 28;

const UNSET: Colour = Colour::MAX;

/// Anything that assigns colours to tuples. Out-of-domain tuples map to
/// `None`, which searches treat as forbidden.
pub trait Colouring: Sync {
    fn dim(&self) -> usize;
    fn colour(&self, tuple: &[u64]) -> Option<Colour>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VectorDomain {
    /// `[1, window]^dim`
    Box,
    /// positive tuples with coordinate sum at most `window`
    Simplex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Sets,
    Vectors(VectorDomain),
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sets => "sets",
            Mode::Vectors(_) => "vectors",
        }
    }
}

/// Dimension, window and ordering mode of a table: everything except the
/// colours themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub dim: usize,
    pub window: u64,
    pub mode: Mode,
}

impl Shape {
    pub fn sets(dim: usize, window: u64) -> Self {
        Self {
            dim,
            window,
            mode: Mode::Sets,
        }
    }

    pub fn vectors(dim: usize, window: u64, domain: VectorDomain) -> Self {
        Self {
            dim,
            window,
            mode: Mode::Vectors(domain),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Arity { min: 1, got: 0 });
        }
        if self.window == 0 {
            return Err(Error::Malformed("window must be at least 1".into()));
        }
        Ok(())
    }

    fn lo(&self) -> u64 {
        match self.mode {
            Mode::Sets => 0,
            Mode::Vectors(_) => 1,
        }
    }

    fn radix(&self) -> u64 {
        match self.mode {
            Mode::Sets => self.window + 1,
            Mode::Vectors(_) => self.window,
        }
    }

    pub fn contains(&self, t: &[u64]) -> bool {
        if t.len() != self.dim {
            return false;
        }
        match self.mode {
            Mode::Sets => t.iter().all(|&x| x <= self.window) && t.windows(2).all(|w| w[0] < w[1]),
            Mode::Vectors(domain) => {
                t.iter().all(|&x| (1..=self.window).contains(&x))
                    && (domain == VectorDomain::Box || t.iter().sum::<u64>() <= self.window)
            }
        }
    }

    /// Every domain tuple, in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<u64>> {
        match self.mode {
            Mode::Sets => (0..=self.window).combinations(self.dim).collect(),
            Mode::Vectors(VectorDomain::Box) => (0..self.dim)
                .map(|_| 1..=self.window)
                .multi_cartesian_product()
                .collect(),
            Mode::Vectors(VectorDomain::Simplex) => {
                let mut out = Vec::new();
                simplex_rec(
                    self.dim,
                    self.window,
                    &mut Vec::with_capacity(self.dim),
                    &mut out,
                );
                out
            }
        }
    }

    /// Visit every domain tuple in lexicographic order through one reused
    /// buffer.
    pub fn for_each_tuple(&self, mut f: impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
        let mut buf = vec![0; self.dim];
        self.visit(0, 0, &mut buf, &mut f)
    }

    fn visit(
        &self,
        pos: usize,
        used: u64,
        buf: &mut [u64],
        f: &mut impl FnMut(&[u64]) -> Result<()>,
    ) -> Result<()> {
        if pos == self.dim {
            return f(buf);
        }
        let after = (self.dim - pos - 1) as u64;
        let (lo, hi) = match self.mode {
            Mode::Sets => (
                if pos == 0 { 0 } else { buf[pos - 1] + 1 },
                self.window.checked_sub(after),
            ),
            Mode::Vectors(VectorDomain::Box) => (1, Some(self.window)),
            Mode::Vectors(VectorDomain::Simplex) => (1, self.window.checked_sub(used + after)),
        };
        let Some(hi) = hi else { return Ok(()) };
        for v in lo..=hi {
            buf[pos] = v;
            self.visit(pos + 1, used + v, buf, f)?;
        }
        Ok(())
    }

    /// Number of domain tuples, computed without enumerating them.
    pub fn size(&self) -> u128 {
        let (d, n) = (self.dim as u128, u128::from(self.window));
        match self.mode {
            Mode::Sets => binomial(n + 1, d),
            Mode::Vectors(VectorDomain::Box) => n.checked_pow(self.dim as u32).unwrap_or(u128::MAX),
            // compositions of at most n into d positive parts
            Mode::Vectors(VectorDomain::Simplex) => binomial(n, d),
        }
    }
}

fn simplex_rec(dim: usize, budget: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if prefix.len() == dim {
        out.push(prefix.clone());
        return;
    }
    let remaining = (dim - prefix.len() - 1) as u64;
    if budget < remaining + 1 {
        return;
    }
    for v in 1..=budget - remaining {
        prefix.push(v);
        simplex_rec(dim, budget - v, prefix, out);
        prefix.pop();
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Dense mixed-radix table; unset cells hold [`UNSET`].
#[derive(Clone, PartialEq, Eq, Hash)]
struct Grid {
    lo: u64,
    radix: u64,
    cells: Vec<Colour>,
}

impl Grid {
    fn new(shape: &Shape) -> Result<Self> {
        let radix = shape.radix();
        let cells = u128::from(radix)
            .checked_pow(shape.dim as u32)
            .unwrap_or(u128::MAX);
        if cells > MAX_CELLS {
            return Err(Error::Budget {
                count: cells,
                budget: MAX_CELLS as u64,
            });
        }
        Ok(Self {
            lo: shape.lo(),
            radix,
            cells: vec![UNSET; cells as usize],
        })
    }

    #[inline]
    fn index(&self, t: &[u64]) -> Option<usize> {
        let mut idx: u64 = 0;
        for &x in t {
            let off = x.checked_sub(self.lo)?;
            if off >= self.radix {
                return None;
            }
            idx = idx * self.radix + off;
        }
        Some(idx as usize)
    }

    #[inline]
    fn get(&self, t: &[u64]) -> Option<Colour> {
        let idx = self.index(t)?;
        match self.cells[idx] {
            UNSET => None,
            c => Some(c),
        }
    }
}

fn check_palette(palette: usize) -> Result<()> {
    if palette == 0 || palette > MAX_PALETTE {
        return Err(Error::Malformed(format!(
            "palette must be in 1..={MAX_PALETTE}, got {palette}"
        )));
    }
    Ok(())
}

/// Build a table over `shape` from per-tuple colours.
fn fill(
    shape: &Shape,
    palette: usize,
    mut f: impl FnMut(&[u64]) -> Result<Colour>,
) -> Result<Grid> {
    shape.validate()?;
    check_palette(palette)?;
    let mut grid = Grid::new(shape)?;
    shape.for_each_tuple(|t| {
        let c = f(t)?;
        if usize::from(c) >= palette {
            return Err(Error::Malformed(format!(
                "colour {c} at {t:?} is outside palette {palette}"
            )));
        }
        let idx = grid.index(t).expect("domain tuple inside grid");
        grid.cells[idx] = c;
        Ok(())
    })?;
    Ok(grid)
}

/// A `palette`-colouring of every domain tuple of a [`Shape`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteColouring {
    shape: Shape,
    palette: usize,
    grid: Grid,
}

impl fmt::Debug for FiniteColouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteColouring")
            .field("shape", &self.shape)
            .field("palette", &self.palette)
            .field("colours", &self.colour_string())
            .finish()
    }
}

impl FiniteColouring {
    pub fn from_fn(
        shape: Shape,
        palette: usize,
        mut f: impl FnMut(&[u64]) -> Colour,
    ) -> Result<Self> {
        let grid = fill(&shape, palette, |t| Ok(f(t)))?;
        Ok(Self {
            shape,
            palette,
            grid,
        })
    }

    pub fn try_from_fn(
        shape: Shape,
        palette: usize,
        f: impl FnMut(&[u64]) -> Result<Colour>,
    ) -> Result<Self> {
        let grid = fill(&shape, palette, f)?;
        Ok(Self {
            shape,
            palette,
            grid,
        })
    }

    /// Colours listed in the lexicographic order of [`Shape::tuples`].
    pub fn from_colours(shape: Shape, palette: usize, colours: &[Colour]) -> Result<Self> {
        let expected = shape.size();
        if colours.len() as u128 != expected {
            return Err(Error::Malformed(format!(
                "expected {expected} colours, got {}",
                colours.len()
            )));
        }
        let mut it = colours.iter();
        Self::try_from_fn(shape, palette, |_| Ok(*it.next().unwrap()))
    }

    pub fn constant(shape: Shape, palette: usize, colour: Colour) -> Result<Self> {
        Self::from_fn(shape, palette, |_| colour)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim
    }

    pub fn window(&self) -> u64 {
        self.shape.window
    }

    pub fn mode(&self) -> Mode {
        self.shape.mode
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn colour(&self, t: &[u64]) -> Option<Colour> {
        if t.len() != self.shape.dim {
            return None;
        }
        self.grid.get(t)
    }

    pub fn entries(&self) -> Vec<(Vec<u64>, Colour)> {
        self.shape
            .tuples()
            .into_iter()
            .map(|t| {
                let c = self.grid.get(&t).expect("complete table");
                (t, c)
            })
            .collect()
    }

    pub fn colours(&self) -> Vec<Colour> {
        self.entries().into_iter().map(|(_, c)| c).collect()
    }

    /// Colour digits in domain order, e.g. `"0110"`; digits above 9 are
    /// written in base 36.
    pub fn colour_string(&self) -> String {
        self.colours().iter().map(|&c| digit(c)).collect()
    }

    pub fn to_file(&self) -> ColouringFile {
        ColouringFile {
            dim: self.shape.dim,
            window: self.shape.window,
            palette: self.palette,
            mode: self.shape.mode.name().to_string(),
            entries: self.entries(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("colouring serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ColouringFile =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        file.into_colouring()
    }

    /// Short content hash of the canonical JSON form.
    pub fn digest(&self) -> String {
        digest_of(&self.to_json())
    }
}

impl Colouring for FiniteColouring {
    fn dim(&self) -> usize {
        self.shape.dim
    }

    fn colour(&self, tuple: &[u64]) -> Option<Colour> {
        FiniteColouring::colour(self, tuple)
    }
}

fn digit(c: Colour) -> char {
    char::from_digit(u32::from(c), 36).unwrap_or('?')
}

pub(crate) fn digest_of(s: &str) -> String {
    Sha256::digest(s.as_bytes())[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// On-disk JSON form shared by [`FiniteColouring`] (`"sets"` / `"vectors"`)
/// and [`DifferenceColouring`] (`"differences"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringFile {
    pub dim: usize,
    pub window: u64,
    pub palette: usize,
    pub mode: String,
    pub entries: Vec<(Vec<u64>, Colour)>,
}

impl ColouringFile {
    fn grid_for(&self, shape: &Shape) -> Result<Grid> {
        shape.validate()?;
        check_palette(self.palette)?;
        let mut grid = Grid::new(shape)?;
        for (t, c) in &self.entries {
            if !shape.contains(t) {
                return Err(Error::Malformed(format!(
                    "tuple {t:?} is outside the {} domain",
                    self.mode
                )));
            }
            if usize::from(*c) >= self.palette {
                return Err(Error::Malformed(format!(
                    "colour {c} at {t:?} is outside palette {}",
                    self.palette
                )));
            }
            let idx = grid.index(t).expect("checked domain");
            if grid.cells[idx] != UNSET {
                return Err(Error::Malformed(format!("tuple {t:?} listed twice")));
            }
            grid.cells[idx] = *c;
        }
        if self.entries.len() as u128 != shape.size() {
            return Err(Error::Malformed(format!(
                "{} entries listed but the domain has {} tuples",
                self.entries.len(),
                shape.size()
            )));
        }
        Ok(grid)
    }

    pub fn into_colouring(self) -> Result<FiniteColouring> {
        let shape = match self.mode.as_str() {
            "sets" => Shape::sets(self.dim, self.window),
            "vectors" => {
                let simplex = Shape::vectors(self.dim, self.window, VectorDomain::Simplex);
                let is_simplex = self.dim > 1
                    && self.entries.len() as u128 == simplex.size()
                    && self.entries.iter().all(|(t, _)| simplex.contains(t));
                if is_simplex {
                    simplex
                } else {
                    Shape::vectors(self.dim, self.window, VectorDomain::Box)
                }
            }
            other => {
                return Err(Error::Mismatch {
                    expected: "mode \"sets\" or \"vectors\"".into(),
                    got: format!("{other:?}"),
                })
            }
        };
        let grid = self.grid_for(&shape)?;
        Ok(FiniteColouring {
            shape,
            palette: self.palette,
            grid,
        })
    }

    pub fn into_differences(self) -> Result<DifferenceColouring> {
        if self.mode != "differences" {
            return Err(Error::Mismatch {
                expected: "mode \"differences\"".into(),
                got: format!("{:?}", self.mode),
            });
        }
        let shape = DifferenceColouring::shape_for(self.dim, self.window);
        let grid = self.grid_for(&shape)?;
        Ok(DifferenceColouring {
            inner: FiniteColouring {
                shape,
                palette: self.palette,
                grid,
            },
        })
    }
}

/// Canonical form of a translation-invariant colouring: a colour for every
/// positive difference vector `(z_1, ..., z_d)` with `z_1 + ... + z_d <= window`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DifferenceColouring {
    inner: FiniteColouring,
}

impl fmt::Debug for DifferenceColouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferenceColouring")
            .field("dim", &self.dim())
            .field("window", &self.window())
            .field("palette", &self.palette())
            .field("colours", &self.inner.colour_string())
            .finish()
    }
}

impl DifferenceColouring {
    fn shape_for(dim: usize, window: u64) -> Shape {
        Shape::vectors(dim, window, VectorDomain::Simplex)
    }

    pub fn from_fn(
        dim: usize,
        window: u64,
        palette: usize,
        f: impl FnMut(&[u64]) -> Colour,
    ) -> Result<Self> {
        Ok(Self {
            inner: FiniteColouring::from_fn(Self::shape_for(dim, window), palette, f)?,
        })
    }

    pub fn from_colours(
        dim: usize,
        window: u64,
        palette: usize,
        colours: &[Colour],
    ) -> Result<Self> {
        Ok(Self {
            inner: FiniteColouring::from_colours(Self::shape_for(dim, window), palette, colours)?,
        })
    }

    /// Read `dc(z) = c(0, z_1, z_1 + z_2, ...)` off a sets-mode colouring
    /// without checking invariance. [`to_differences`] is the checked form.
    pub fn read_off(c: &FiniteColouring) -> Result<Self> {
        if c.mode() != Mode::Sets {
            return Err(Error::Mismatch {
                expected: "sets mode".into(),
                got: c.mode().name().into(),
            });
        }
        if c.dim() < 2 {
            return Err(Error::Arity {
                min: 2,
                got: c.dim(),
            });
        }
        let mut anchored = vec![0; c.dim()];
        Self::from_fn(c.dim() - 1, c.window(), c.palette(), |z| {
            for (i, zi) in z.iter().enumerate() {
                anchored[i + 1] = anchored[i] + zi;
            }
            c.colour(&anchored).expect("anchored tuple inside window")
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn window(&self) -> u64 {
        self.inner.window()
    }

    pub fn palette(&self) -> usize {
        self.inner.palette()
    }

    pub fn colour(&self, z: &[u64]) -> Option<Colour> {
        self.inner.colour(z)
    }

    pub fn entries(&self) -> Vec<(Vec<u64>, Colour)> {
        self.inner.entries()
    }

    /// The same table viewed as a simplex-domain vectors colouring.
    pub fn as_vectors(&self) -> &FiniteColouring {
        &self.inner
    }

    pub fn to_file(&self) -> ColouringFile {
        ColouringFile {
            mode: "differences".into(),
            ..self.inner.to_file()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("colouring serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ColouringFile =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        file.into_differences()
    }
}

fn require_sets(c: &FiniteColouring) -> Result<()> {
    if c.mode() != Mode::Sets {
        return Err(Error::Mismatch {
            expected: "sets mode".into(),
            got: c.mode().name().into(),
        });
    }
    Ok(())
}

/// First pair `(anchored, shifted)` of tuples with equal successive
/// differences but different colours, scanning shifted tuples in
/// lexicographic order. Comparing against the copy anchored at 0 covers
/// every shift, since each shift class has exactly one anchored member.
pub fn invariance_witness(c: &FiniteColouring) -> Result<Option<(Vec<u64>, Vec<u64>)>> {
    require_sets(c)?;
    for (t, colour) in c.entries() {
        let base = t[0];
        if base == 0 {
            continue;
        }
        let anchored: Vec<u64> = t.iter().map(|x| x - base).collect();
        if c.colour(&anchored) != Some(colour) {
            return Ok(Some((anchored, t)));
        }
    }
    Ok(None)
}

/// Whether `c(T) = c(T + z)` for every tuple `T` and shift `z` inside the
/// window.
pub fn is_z_invariant(c: &FiniteColouring) -> Result<bool> {
    Ok(invariance_witness(c)?.is_none())
}

/// Canonical difference form of a translation-invariant sets-mode colouring
/// of arity `d + 1`.
pub fn to_differences(c: &FiniteColouring) -> Result<DifferenceColouring> {
    require_sets(c)?;
    if c.dim() < 2 {
        return Err(Error::Arity {
            min: 2,
            got: c.dim(),
        });
    }
    if let Some((first, second)) = invariance_witness(c)? {
        return Err(Error::NotInvariant { first, second });
    }
    DifferenceColouring::read_off(c)
}

/// Lift a difference colouring to a sets-mode colouring of arity `d + 1`:
/// `c(x_0 < ... < x_d) = dc(x_1 - x_0, ..., x_d - x_{d-1})`.
///
/// The result's window is `min(window, dc.window())`; spans beyond the
/// difference table have no colour.
pub fn from_differences(dc: &DifferenceColouring, window: u64) -> Result<FiniteColouring> {
    let window = window.min(dc.window());
    let mut gaps = vec![0; dc.dim()];
    FiniteColouring::from_fn(Shape::sets(dc.dim() + 1, window), dc.palette(), |t| {
        for (g, w) in gaps.iter_mut().zip(t.windows(2)) {
            *g = w[1] - w[0];
        }
        dc.colour(&gaps).expect("span within difference window")
    })
}

/// What to generate: shape parameters plus whether only translation-invariant
/// (sets-mode) colourings are wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub shape: Shape,
    pub palette: usize,
    pub invariant: bool,
}

impl GenSpec {
    pub fn sets(dim: usize, window: u64, palette: usize, invariant: bool) -> Self {
        Self {
            shape: Shape::sets(dim, window),
            palette,
            invariant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generation {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

#[derive(Debug, Clone)]
enum Base {
    Direct(Shape),
    Differences {
        dim: usize,
        window: u64,
    },
    /// Translation-invariant colourings of singletons are constant.
    Constant(Shape),
}

impl Base {
    fn cells(&self) -> u128 {
        match self {
            Base::Direct(shape) => shape.size(),
            Base::Differences { dim, window } => {
                DifferenceColouring::shape_for(*dim, *window).size()
            }
            Base::Constant(_) => 1,
        }
    }
}

/// Number of colourings an exhaustive run of `spec` yields.
pub fn enumeration_size(spec: &GenSpec) -> Result<u128> {
    let cells = base_of(spec)?.cells();
    Ok(pow_saturating(spec.palette as u128, cells))
}

fn pow_saturating(base: u128, exp: u128) -> u128 {
    if base <= 1 {
        return base;
    }
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

fn base_of(spec: &GenSpec) -> Result<Base> {
    spec.shape.validate()?;
    check_palette(spec.palette)?;
    if !spec.invariant {
        return Ok(Base::Direct(spec.shape));
    }
    if spec.shape.mode != Mode::Sets {
        return Err(Error::Mismatch {
            expected: "sets mode for invariant generation".into(),
            got: spec.shape.mode.name().into(),
        });
    }
    Ok(if spec.shape.dim == 1 {
        Base::Constant(spec.shape)
    } else {
        Base::Differences {
            dim: spec.shape.dim - 1,
            window: spec.shape.window,
        }
    })
}

/// Stream of colourings. Exhaustive runs count through colour vectors in
/// lexicographic order (the last domain tuple's colour varies fastest);
/// sampled runs draw every colour uniformly from a ChaCha stream seeded once.
pub struct ColouringStream {
    base: Base,
    palette: usize,
    cells: usize,
    digits: Vec<Colour>,
    rng: Option<ChaCha8Rng>,
    remaining: u128,
    started: bool,
}

/// Enumerate or sample colourings matching `spec`. Exhaustive enumeration
/// is refused when it would yield more than `budget` colourings.
pub fn gen_colourings(
    spec: &GenSpec,
    generation: Generation,
    budget: u64,
) -> Result<ColouringStream> {
    let base = base_of(spec)?;
    let cells = base.cells();
    let (rng, remaining) = match generation {
        Generation::Exhaustive => {
            let count = pow_saturating(spec.palette as u128, cells);
            if count > u128::from(budget) {
                return Err(Error::Budget { count, budget });
            }
            (None, count)
        }
        Generation::Sampled { seed, count } => {
            (Some(ChaCha8Rng::seed_from_u64(seed)), count as u128)
        }
    };
    if cells > MAX_CELLS {
        return Err(Error::Budget {
            count: cells,
            budget: MAX_CELLS as u64,
        });
    }
    Ok(ColouringStream {
        base,
        palette: spec.palette,
        cells: cells as usize,
        digits: vec![0; cells as usize],
        rng,
        remaining,
        started: false,
    })
}

impl ColouringStream {
    fn advance(&mut self) {
        if let Some(rng) = self.rng.as_mut() {
            for d in self.digits.iter_mut() {
                *d = rng.gen_range(0..self.palette) as Colour;
            }
            return;
        }
        if !self.started {
            return;
        }
        for d in self.digits.iter_mut().rev() {
            if usize::from(*d) + 1 < self.palette {
                *d += 1;
                return;
            }
            *d = 0;
        }
    }

    fn lift(&self) -> FiniteColouring {
        match &self.base {
            Base::Direct(shape) => {
                FiniteColouring::from_colours(*shape, self.palette, &self.digits)
            }
            Base::Differences { dim, window } => {
                DifferenceColouring::from_colours(*dim, *window, self.palette, &self.digits)
                    .and_then(|dc| from_differences(&dc, *window))
            }
            Base::Constant(shape) => {
                FiniteColouring::constant(*shape, self.palette, self.digits[0])
            }
        }
        .expect("generated colours are in range")
    }
}

impl Iterator for ColouringStream {
    type Item = FiniteColouring;

    fn next(&mut self) -> Option<FiniteColouring> {
        if self.remaining == 0 {
            return None;
        }
        self.advance();
        self.started = true;
        self.remaining -= 1;
        debug_assert_eq!(self.digits.len(), self.cells);
        Some(self.lift())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn pair_parity(window: u64) -> FiniteColouring {
        FiniteColouring::from_fn(Shape::sets(2, window), 2, |t| ((t[1] - t[0]) % 2) as Colour)
            .unwrap()
    }

    fn first_parity(window: u64) -> FiniteColouring {
        FiniteColouring::from_fn(Shape::sets(2, window), 2, |t| (t[0] % 2) as Colour).unwrap()
    }

    #[test]
    fn invariance_examples() {
        assert!(is_z_invariant(&pair_parity(8)).unwrap());
        assert!(!is_z_invariant(&first_parity(8)).unwrap());
        for dim in 1..=3 {
            let c = FiniteColouring::constant(Shape::sets(dim, 6), 3, 2).unwrap();
            assert!(is_z_invariant(&c).unwrap());
        }
        let v = FiniteColouring::constant(Shape::vectors(1, 4, VectorDomain::Box), 1, 0).unwrap();
        assert!(is_z_invariant(&v).is_err());
    }

    #[test]
    fn read_off_parity() {
        let dc = to_differences(&pair_parity(6)).unwrap();
        assert_eq!(dc.dim(), 1);
        for z in 1..=6 {
            assert_eq!(dc.colour(&[z]), Some((z % 2) as Colour));
        }
        let triple = FiniteColouring::constant(Shape::sets(3, 5), 2, 1).unwrap();
        let dc = to_differences(&triple).unwrap();
        assert_eq!(dc.dim(), 2);
        assert!(dc.entries().iter().all(|(_, c)| *c == 1));
    }

    #[test]
    fn non_invariant_is_rejected_with_witness() {
        let c = first_parity(8);
        let Err(Error::NotInvariant { first, second }) = to_differences(&c) else {
            panic!("expected rejection");
        };
        assert_eq!(first.len(), 2);
        assert_eq!(first[1] - first[0], second[1] - second[0]);
        assert_ne!(c.colour(&first), c.colour(&second));
        // lexicographically first offending tuple
        assert_eq!((first, second), (vec![0, 1], vec![1, 2]));
        // the pair the module docs use as an illustration is also a witness
        assert_ne!(c.colour(&[0, 2]), c.colour(&[1, 3]));
    }

    #[test]
    fn lift_examples() {
        let dc = DifferenceColouring::from_fn(1, 5, 3, |z| (z[0] % 3) as Colour).unwrap();
        let c = from_differences(&dc, 5).unwrap();
        assert_eq!(c.colour(&[1, 4]), Some(0));
        assert_eq!(c.colour(&[0, 2]), Some(2));
        assert_eq!(to_differences(&c).unwrap(), dc);

        let dc2 =
            DifferenceColouring::from_fn(2, 7, 5, |z| ((z[0] * 7 + z[1]) % 5) as Colour).unwrap();
        let c = from_differences(&dc2, 7).unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.colour(&[0, 3, 7]), dc2.colour(&[3, 4]));
        assert!(is_z_invariant(&c).unwrap());
    }

    #[test]
    fn lift_window_is_capped() {
        let dc = DifferenceColouring::from_fn(1, 4, 2, |z| (z[0] % 2) as Colour).unwrap();
        let c = from_differences(&dc, 9).unwrap();
        assert_eq!(c.window(), 4);
        assert_eq!(from_differences(&dc, 2).unwrap().window(), 2);
    }

    #[test]
    fn generation_counts() {
        let spec = GenSpec::sets(2, 3, 2, true);
        assert_eq!(enumeration_size(&spec).unwrap(), 8);
        let all: Vec<_> = gen_colourings(&spec, Generation::Exhaustive, 1000)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|c| is_z_invariant(c).unwrap()));
        let unique: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), 8);

        let spec = GenSpec::sets(1, 2, 2, false);
        let all: Vec<_> = gen_colourings(&spec, Generation::Exhaustive, 1000)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 8);
        assert_eq!(
            all.iter().collect::<std::collections::HashSet<_>>().len(),
            8
        );
        assert_eq!(all[0].colour_string(), "000");
        assert_eq!(all[1].colour_string(), "001");
        assert_eq!(all[7].colour_string(), "111");

        let constants: Vec<_> =
            gen_colourings(&GenSpec::sets(1, 4, 3, true), Generation::Exhaustive, 10)
                .unwrap()
                .collect();
        assert_eq!(constants.len(), 3);
    }

    #[test]
    fn generation_budget_refusal() {
        let spec = GenSpec::sets(2, 10, 3, false);
        match gen_colourings(&spec, Generation::Exhaustive, 1_000_000) {
            Err(Error::Budget { count, budget }) => {
                assert_eq!(count, 3u128.pow(55));
                assert_eq!(budget, 1_000_000);
            }
            other => panic!("expected budget refusal, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = GenSpec::sets(2, 7, 3, false);
        let a: Vec<_> = gen_colourings(&spec, Generation::Sampled { seed: 7, count: 20 }, 0)
            .unwrap()
            .collect();
        let b: Vec<_> = gen_colourings(&spec, Generation::Sampled { seed: 7, count: 20 }, 0)
            .unwrap()
            .collect();
        let c: Vec<_> = gen_colourings(&spec, Generation::Sampled { seed: 8, count: 20 }, 0)
            .unwrap()
            .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn shape_sizes_match_enumeration() {
        for dim in 1..=3 {
            for window in 1..=6 {
                for shape in [
                    Shape::sets(dim, window),
                    Shape::vectors(dim, window, VectorDomain::Box),
                    Shape::vectors(dim, window, VectorDomain::Simplex),
                ] {
                    let tuples = shape.tuples();
                    let mut visited = Vec::new();
                    shape
                        .for_each_tuple(|t| {
                            visited.push(t.to_vec());
                            Ok(())
                        })
                        .unwrap();
                    assert_eq!(visited, tuples);
                    assert_eq!(tuples.len() as u128, shape.size(), "{shape:?}");
                    assert!(tuples.windows(2).all(|w| w[0] < w[1]));
                    assert!(tuples.iter().all(|t| shape.contains(t)));
                }
            }
        }
    }

    #[test]
    fn json_shape_and_errors() {
        let c = pair_parity(2);
        assert_eq!(
            c.to_json(),
            r#"{"dim":2,"window":2,"palette":2,"mode":"sets","entries":[[[0,1],1],[[0,2],0],[[1,2],1]]}"#
        );
        assert_eq!(FiniteColouring::from_json(&c.to_json()).unwrap(), c);

        let dc = to_differences(&pair_parity(3)).unwrap();
        assert_eq!(
            dc.to_json(),
            r#"{"dim":1,"window":3,"palette":2,"mode":"differences","entries":[[[1],1],[[2],0],[[3],1]]}"#
        );
        assert_eq!(DifferenceColouring::from_json(&dc.to_json()).unwrap(), dc);

        let missing = r#"{"dim":2,"window":2,"palette":2,"mode":"sets","entries":[[[0,1],1]]}"#;
        assert!(matches!(
            FiniteColouring::from_json(missing),
            Err(Error::Malformed(_))
        ));
        let dup = r#"{"dim":1,"window":1,"palette":2,"mode":"sets","entries":[[[0],1],[[0],1]]}"#;
        assert!(matches!(
            FiniteColouring::from_json(dup),
            Err(Error::Malformed(_))
        ));
        let bad_colour =
            r#"{"dim":1,"window":1,"palette":2,"mode":"sets","entries":[[[0],1],[[1],2]]}"#;
        assert!(matches!(
            FiniteColouring::from_json(bad_colour),
            Err(Error::Malformed(_))
        ));
        let bad_mode = r#"{"dim":1,"window":1,"palette":2,"mode":"bags","entries":[]}"#;
        assert!(matches!(
            FiniteColouring::from_json(bad_mode),
            Err(Error::Mismatch { .. })
        ));
        assert!(FiniteColouring::from_json("{").is_err());
    }

    #[test]
    fn vector_domain_is_inferred() {
        let simplex =
            FiniteColouring::constant(Shape::vectors(2, 4, VectorDomain::Simplex), 2, 1).unwrap();
        let back = FiniteColouring::from_json(&simplex.to_json()).unwrap();
        assert_eq!(back.mode(), Mode::Vectors(VectorDomain::Simplex));
        let boxed =
            FiniteColouring::constant(Shape::vectors(2, 4, VectorDomain::Box), 2, 1).unwrap();
        let back = FiniteColouring::from_json(&boxed.to_json()).unwrap();
        assert_eq!(back.mode(), Mode::Vectors(VectorDomain::Box));
        assert_eq!(back, boxed);
    }

    #[test]
    fn factorization_exhaustive_small() {
        // every pair colouring on small windows: invariant iff it factors
        for window in 1..=4u64 {
            for palette in 1..=2 {
                let spec = GenSpec::sets(2, window, palette, false);
                for c in gen_colourings(&spec, Generation::Exhaustive, 1 << 12).unwrap() {
                    let factors =
                        from_differences(&DifferenceColouring::read_off(&c).unwrap(), window)
                            .unwrap()
                            == c;
                    assert_eq!(is_z_invariant(&c).unwrap(), factors, "{c:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn lifted_colourings_are_invariant(dim in 1usize..=2, window in 1u64..=10, palette in 1usize..=3, seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dc = DifferenceColouring::from_fn(dim, window, palette, |_| rng.gen_range(0..palette) as Colour).unwrap();
            let c = from_differences(&dc, window).unwrap();
            prop_assert!(is_z_invariant(&c).unwrap());
            prop_assert_eq!(to_differences(&c).unwrap(), dc);
        }
    }
}
