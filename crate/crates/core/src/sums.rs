//! Adjacent finite sums and the sequence transforms built on them.
//!
//! Documentation counts sequence positions from 1; storage is 0-based.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bitcomb::check_increasing;
use crate::error::{Error, Result};

/// Strictly increasing finite sequence of naturals.
///
/// Sets-mode windows start at 0, so a leading 0 is accepted here; operations
/// that need positive entries check for it themselves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct IncreasingSequence(Vec<u64>);

impl IncreasingSequence {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        check_increasing(&entries)?;
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<u64>> for IncreasingSequence {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IncreasingSequence> for Vec<u64> {
    fn from(s: IncreasingSequence) -> Self {
        s.0
    }
}

impl std::ops::Deref for IncreasingSequence {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

/// One element of `afs^d`: `d` consecutive gap-free block sums.
///
/// `bounds` holds the 0-based indices `k_0 <= k_1 < ... < k_d`; block `i`
/// covers `[k_0, k_1]` for `i = 0` and `[k_i + 1, k_{i+1}]` afterwards.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjacentTuple {
    pub values: Vec<u64>,
    pub bounds: Vec<usize>,
}

fn check_positive(seq: &[u64]) -> Result<()> {
    if seq.contains(&0) {
        return Err(Error::Malformed("sequence entries must be positive".into()));
    }
    Ok(())
}

/// Prefix sums `p[0] = 0, p[i+1] = seq[0] + ... + seq[i]`.
fn prefix_sums(seq: &[u64]) -> Result<Vec<u64>> {
    let mut p = Vec::with_capacity(seq.len() + 1);
    let mut acc: u64 = 0;
    p.push(0);
    for &x in seq {
        acc = acc
            .checked_add(x)
            .ok_or(Error::Overflow { op: "adjacent sum" })?;
        p.push(acc);
    }
    Ok(p)
}

/// Every adjacent `d`-tuple of adjacent sums of `seq`, one per choice of
/// block bounds, ordered by bounds.
pub fn adjacent_tuples(seq: &[u64], d: usize) -> Result<Vec<AdjacentTuple>> {
    if d == 0 {
        return Err(Error::Arity { min: 1, got: 0 });
    }
    if seq.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    check_positive(seq)?;
    let p = prefix_sums(seq)?;
    let n = seq.len();
    let mut out = Vec::new();
    // Cut points c_0 < c_1 < ... < c_d in 0..=n; block i is seq[c_i..c_{i+1}].
    let mut cuts: Vec<usize> = (0..=d).collect();
    if d > n {
        return Ok(out);
    }
    loop {
        let values = cuts.windows(2).map(|w| p[w[1]] - p[w[0]]).collect();
        let mut bounds = Vec::with_capacity(d + 1);
        bounds.push(cuts[0]);
        bounds.extend(cuts[1..].iter().map(|c| c - 1));
        out.push(AdjacentTuple { values, bounds });
        // next combination of d+1 cut points out of 0..=n
        let mut i = d;
        loop {
            if cuts[i] < n - (d - i) {
                cuts[i] += 1;
                for j in i + 1..=d {
                    cuts[j] = cuts[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
        }
    }
}

/// `afs^d(seq)` as a set of value tuples.
pub fn afs_d(seq: &[u64], d: usize) -> Result<BTreeSet<Vec<u64>>> {
    Ok(adjacent_tuples(seq, d)?
        .into_iter()
        .map(|t| t.values)
        .collect())
}

/// `afs(seq)`: the sums of contiguous runs.
pub fn afs(seq: &[u64]) -> Result<BTreeSet<u64>> {
    Ok(afs_d(seq, 1)?.into_iter().map(|v| v[0]).collect())
}

/// Greedy block regrouping into a strictly increasing sequence: the first
/// term is kept, and each later term is the shortest following block whose
/// sum exceeds the previous term. A trailing block that never exceeds the
/// previous term is dropped.
pub fn normalize(seq: &[u64]) -> Result<IncreasingSequence> {
    if seq.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    check_positive(seq)?;
    let mut out = vec![seq[0]];
    let mut acc: u64 = 0;
    for &x in &seq[1..] {
        acc = acc
            .checked_add(x)
            .ok_or(Error::Overflow { op: "normalize" })?;
        if acc > *out.last().unwrap() {
            out.push(acc);
            acc = 0;
        }
    }
    IncreasingSequence::new(out)
}

/// Subsequence starting with the two smallest elements in which each next
/// element is the least one whose gap strictly exceeds the previous gap.
pub fn gap_increasing(xs: &[u64]) -> Result<IncreasingSequence> {
    check_increasing(xs)?;
    if xs.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: xs.len(),
        });
    }
    let mut out = vec![xs[0], xs[1]];
    let mut gap = xs[1] - xs[0];
    for &x in &xs[2..] {
        let last = *out.last().unwrap();
        if x - last > gap {
            gap = x - last;
            out.push(x);
        }
    }
    IncreasingSequence::new(out)
}

/// `(y_1, y_1 + y_2, ..., y_1 + ... + y_n)`.
pub fn partial_sums(ys: &[u64]) -> Result<IncreasingSequence> {
    if ys.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    check_positive(ys)?;
    let p = prefix_sums(ys)?;
    IncreasingSequence::new(p[1..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcomb::{differences, is_apart, lambda, mu};
    use proptest::prelude::*;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn afs_examples() {
        assert_eq!(afs(&[1, 2, 4]).unwrap(), set(&[1, 2, 3, 4, 6, 7]));
        assert_eq!(afs(&[5]).unwrap(), set(&[5]));
        let pairs: BTreeSet<Vec<u64>> = [vec![1, 2], vec![1, 6], vec![2, 4], vec![3, 4]]
            .into_iter()
            .collect();
        assert_eq!(afs_d(&[1, 2, 4], 2).unwrap(), pairs);
        assert!(afs_d(&[1, 2], 3).unwrap().is_empty());
        assert_eq!(afs_d(&[1, 2], 0), Err(Error::Arity { min: 1, got: 0 }));
        assert!(afs(&[]).is_err());
        assert!(afs(&[1, 0]).is_err());
    }

    #[test]
    fn adjacent_tuple_bounds() {
        let tuples = adjacent_tuples(&[1, 2, 4], 2).unwrap();
        let bounds: Vec<_> = tuples
            .iter()
            .map(|t| (t.bounds.clone(), t.values.clone()))
            .collect();
        assert_eq!(
            bounds,
            vec![
                (vec![0, 0, 1], vec![1, 2]),
                (vec![0, 0, 2], vec![1, 6]),
                (vec![0, 1, 2], vec![3, 4]),
                (vec![1, 1, 2], vec![2, 4]),
            ]
        );
        for t in &tuples {
            assert!(t.bounds[0] <= t.bounds[1]);
            assert!(t.bounds[1..].windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[3, 1, 2, 5]).unwrap().as_slice(), &[3, 8]);
        assert_eq!(normalize(&[1, 2, 4]).unwrap().as_slice(), &[1, 2, 4]);
        assert_eq!(normalize(&[2, 2, 2, 2, 2]).unwrap().as_slice(), &[2, 4]);
        assert!(normalize(&[]).is_err());
    }

    #[test]
    fn gap_increasing_examples() {
        assert_eq!(
            gap_increasing(&[1, 2, 3, 4, 5, 10, 11, 20, 40])
                .unwrap()
                .as_slice(),
            &[1, 2, 4, 10, 20, 40]
        );
        assert_eq!(
            gap_increasing(&[1, 2, 4, 8, 16]).unwrap().as_slice(),
            &[1, 2, 4, 8, 16]
        );
        assert_eq!(gap_increasing(&[1, 2, 3]).unwrap().as_slice(), &[1, 2]);
        assert_eq!(
            gap_increasing(&[4]),
            Err(Error::TooShort { needed: 2, got: 1 })
        );
        assert!(gap_increasing(&[4, 2]).is_err());
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_sums(&[2, 3, 5]).unwrap().as_slice(), &[2, 5, 10]);
        assert_eq!(partial_sums(&[7]).unwrap().as_slice(), &[7]);
        assert_eq!(partial_sums(&[1, 2, 4]).unwrap().as_slice(), &[1, 3, 7]);
        assert!(partial_sums(&[]).is_err());
    }

    #[test]
    fn sequence_serde() {
        let s: IncreasingSequence = serde_json::from_str("[1,3,7]").unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3,7]");
        assert!(serde_json::from_str::<IncreasingSequence>("[3,1]").is_err());
    }

    /// Brute force afs^d: enumerate the cut points directly.
    fn afs_d_naive(seq: &[u64], d: usize) -> BTreeSet<Vec<u64>> {
        let n = seq.len();
        let mut out = BTreeSet::new();
        let sum = |a: usize, b: usize| seq[a..=b].iter().sum::<u64>();
        fn rec(
            start: usize,
            left: usize,
            n: usize,
            acc: &mut Vec<u64>,
            out: &mut BTreeSet<Vec<u64>>,
            sum: &dyn Fn(usize, usize) -> u64,
        ) {
            if left == 0 {
                out.insert(acc.clone());
                return;
            }
            for end in start..n {
                acc.push(sum(start, end));
                rec(end + 1, left - 1, n, acc, out, sum);
                acc.pop();
            }
        }
        for k0 in 0..n {
            rec(k0, d, n, &mut Vec::new(), &mut out, &sum);
        }
        out
    }

    proptest! {
        #[test]
        fn afs_d_matches_naive(seq in proptest::collection::vec(1u64..50, 1..8), d in 1usize..4) {
            prop_assert_eq!(afs_d(&seq, d).unwrap(), afs_d_naive(&seq, d));
        }

        #[test]
        fn normalize_subset_law(seq in proptest::collection::vec(1u64..=50, 1..=10)) {
            let y = normalize(&seq).unwrap();
            prop_assert!(y.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(afs(&y).unwrap().is_subset(&afs(&seq).unwrap()));
        }

        #[test]
        fn flattened_tuples_are_sums(seq in proptest::collection::vec(1u64..50, 1..8), d in 1usize..4) {
            let sums = afs(&seq).unwrap();
            for t in afs_d(&seq, d).unwrap() {
                prop_assert!(sums.contains(&t.iter().sum::<u64>()));
            }
        }

        #[test]
        fn telescoping(mut xs in proptest::collection::vec(0u64..1000, 2..12)) {
            xs.sort_unstable();
            xs.dedup();
            prop_assume!(xs.len() >= 2);
            let x = gap_increasing(&xs).unwrap();
            prop_assert!(differences(&x).unwrap().windows(2).all(|w| w[0] < w[1]));
            let brute: BTreeSet<u64> = (0..x.len())
                .flat_map(|i| (i + 1..x.len()).map(move |j| (i, j)))
                .map(|(i, j)| x[j] - x[i])
                .collect();
            prop_assert_eq!(afs(&differences(&x).unwrap()).unwrap(), brute);
        }

        #[test]
        fn apart_sums_keep_end_bits(parts in proptest::collection::vec((0u32..4, 0u32..4), 1..6)) {
            // build an apart sequence from (gap, width) pairs of bit blocks
            let mut seq = Vec::new();
            let mut pos = 0u32;
            for (gap, width) in parts {
                let lo = pos + gap;
                let hi = lo + width;
                seq.push(crate::bitcomb::block(lo.into(), hi.into()).unwrap());
                pos = hi + 1;
            }
            prop_assert!(is_apart(&seq).unwrap());
            for t in adjacent_tuples(&seq, 1).unwrap() {
                let (a, b) = (t.bounds[0], t.bounds[1]);
                prop_assert_eq!(lambda(t.values[0]).unwrap(), lambda(seq[a]).unwrap());
                prop_assert_eq!(mu(t.values[0]).unwrap(), mu(seq[b]).unwrap());
            }
        }
    }
}
