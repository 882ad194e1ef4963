//! The popcount-sorting unit.
//!
//! A comparison-free counting sort keyed on the '1'-bit count of each
//! word. The unit runs three stages:
//!
//! 1. popcount: each word's bit count, mapped through a [`BucketSpec`]
//!    to a bin index;
//! 2. prefix sum: the bin indices are one-hot encoded, summed into a
//!    histogram, and turned into exclusive starting addresses;
//! 3. index mapping: every element index is scattered to its bin's next
//!    free address.
//!
//! With [`BucketSpec::exact`] (9 bins) this is the accurate unit; with
//! fewer bins it is the approximate unit.

mod bitonic;

pub use bitonic::{batcher_comparator_count, bitonic_network, bitonic_sort, Comparator};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{popcount, Word, WORD_BITS};
use crate::error::{Error, Result};

/// Number of distinct popcount values of a word, `W + 1`.
pub const COUNT_VALUES: usize = WORD_BITS + 1;

/// A partition of the popcount range `[0, 8]` into `k` contiguous,
/// ordered, non-empty buckets.
///
/// `boundaries[i]` is the smallest count that falls in bucket `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BucketSpec {
    boundaries: Vec<u8>,
    #[serde(skip)]
    lut: [u8; COUNT_VALUES],
}

impl BucketSpec {
    pub fn new(boundaries: Vec<u8>) -> Result<Self> {
        let increasing = boundaries.windows(2).all(|w| w[0] < w[1]);
        let in_range = boundaries.iter().all(|&b| (1..=WORD_BITS as u8).contains(&b));
        if !increasing || !in_range {
            return Err(Error::InvalidBuckets(boundaries));
        }
        let mut lut = [0u8; COUNT_VALUES];
        for (count, slot) in lut.iter_mut().enumerate() {
            *slot = boundaries.iter().filter(|&&b| b as usize <= count).count() as u8;
        }
        Ok(BucketSpec { boundaries, lut })
    }

    /// Identity mapping: one bucket per popcount value.
    pub fn exact() -> Self {
        Self::new((1..=WORD_BITS as u8).collect()).expect("identity spec is valid")
    }

    /// Near-equal-width partition into `k` buckets; remainders go to the
    /// lowest buckets. `with_buckets(4)` is `{0,1,2} {3,4} {5,6} {7,8}`.
    pub fn with_buckets(k: usize) -> Result<Self> {
        if !(1..=COUNT_VALUES).contains(&k) {
            return Err(Error::InvalidBucketCount(k));
        }
        let (base, extra) = (COUNT_VALUES / k, COUNT_VALUES % k);
        let mut boundaries = Vec::with_capacity(k - 1);
        let mut next = 0;
        for bucket in 0..k - 1 {
            next += base + usize::from(bucket < extra);
            boundaries.push(next as u8);
        }
        Self::new(boundaries)
    }

    pub fn num_buckets(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn boundaries(&self) -> &[u8] {
        &self.boundaries
    }

    pub fn is_exact(&self) -> bool {
        self.num_buckets() == COUNT_VALUES
    }

    /// Width of the bucket index in bits, `ceil(log2(k))`.
    pub fn index_bits(&self) -> u32 {
        ceil_log2(self.num_buckets())
    }

    /// The popcount values each bucket covers.
    pub fn ranges(&self) -> Vec<std::ops::RangeInclusive<u8>> {
        let mut lo = 0u8;
        let mut out = Vec::with_capacity(self.num_buckets());
        for &b in &self.boundaries {
            out.push(lo..=b - 1);
            lo = b;
        }
        out.push(lo..=WORD_BITS as u8);
        out
    }

    #[inline]
    fn lookup(&self, count: u8) -> usize {
        self.lut[count as usize] as usize
    }
}

impl Default for BucketSpec {
    fn default() -> Self {
        Self::with_buckets(4).expect("4 buckets is valid")
    }
}

impl fmt::Display for BucketSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.ranges().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{{{}..{}}}", r.start(), r.end())?;
        }
        Ok(())
    }
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub fn bucket_map(count: u32, spec: &BucketSpec) -> Result<usize> {
    if count > WORD_BITS as u32 {
        return Err(Error::CountOutOfRange(count));
    }
    Ok(spec.lookup(count as u8))
}

/// A one-hot bin vector. Displayed with bin 0 leftmost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OneHot {
    bits: u16,
    width: u8,
}

impl OneHot {
    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn is_set(self, bin: usize) -> bool {
        bin < self.width() && self.bits >> bin & 1 == 1
    }
}

impl fmt::Display for OneHot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bin in 0..self.width() {
            f.write_str(if self.is_set(bin) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn one_hot_encode(key: usize, num_bins: usize) -> Result<OneHot> {
    if key >= num_bins || num_bins > 16 {
        return Err(Error::KeyOutOfRange { key, num_bins });
    }
    Ok(OneHot {
        bits: 1 << key,
        width: num_bins as u8,
    })
}

pub fn histogram(keys: &[usize], num_bins: usize) -> Result<Vec<usize>> {
    let mut counts = vec![0; num_bins];
    for &key in keys {
        *counts
            .get_mut(key)
            .ok_or(Error::KeyOutOfRange { key, num_bins })? += 1;
    }
    Ok(counts)
}

pub fn exclusive_prefix_sum(counts: &[usize]) -> Vec<usize> {
    counts
        .iter()
        .scan(0, |acc, &c| {
            let start = *acc;
            *acc += c;
            Some(start)
        })
        .collect()
}

/// Stable placement of every element index at its bin's next free address.
///
/// Returns the output order: `result[pos]` is the original index placed at
/// position `pos`.
pub fn scatter(keys: &[usize], starts: &[usize]) -> Result<Permutation> {
    let expected = exclusive_prefix_sum(&histogram(keys, starts.len())?);
    if expected != starts {
        return Err(Error::InconsistentStarts {
            starts: starts.to_vec(),
        });
    }
    let mut next = starts.to_vec();
    let mut out = vec![0; keys.len()];
    for (j, &key) in keys.iter().enumerate() {
        out[next[key]] = j;
        next[key] += 1;
    }
    Ok(Permutation { indices: out })
}

/// Output order of a sort: `indices[pos]` is the source index placed at `pos`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    indices: Vec<usize>,
}

impl Permutation {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let n = indices.len();
        let mut seen = vec![false; n];
        for &i in &indices {
            match seen.get_mut(i) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::NotAPermutation(n)),
            }
        }
        Ok(Permutation { indices })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            indices: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_identity(&self) -> bool {
        self.indices.iter().enumerate().all(|(p, &i)| p == i)
    }

    pub fn reversed(&self) -> Self {
        Permutation {
            indices: self.indices.iter().rev().copied().collect(),
        }
    }

    /// Reads `items` in output order. Panics if lengths differ.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.len(), "permutation length mismatch");
        self.indices.iter().map(|&i| items[i].clone()).collect()
    }
}

/// Direction of the emitted order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SortOrder {
    #[default]
    Ascending,
    Descending,
}

/// Every intermediate stage output of one sort-unit run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortTrace {
    pub popcounts: Vec<u8>,
    /// Bin index of each element after bucket mapping (and direction flip
    /// for descending order).
    pub keys: Vec<usize>,
    pub onehot: Vec<OneHot>,
    pub histogram: Vec<usize>,
    pub prefix: Vec<usize>,
    pub output: Permutation,
}

impl SortTrace {
    pub fn num_bins(&self) -> usize {
        self.histogram.len()
    }

    /// Checks the stage identities: one-hot column sums equal the
    /// histogram, the histogram sums to n, and the prefix is exclusive.
    pub fn is_consistent(&self) -> bool {
        let n = self.keys.len();
        let column_sums_match = (0..self.num_bins()).all(|b| {
            self.onehot.iter().filter(|o| o.is_set(b)).count() == self.histogram[b]
        });
        let prefix_ok = self.prefix.first() == Some(&0)
            && self
                .prefix
                .windows(2)
                .zip(&self.histogram)
                .all(|(p, &h)| p[1] == p[0] + h);
        let sorted = self
            .output
            .indices()
            .windows(2)
            .all(|w| self.keys[w[0]] <= self.keys[w[1]]);
        column_sums_match
            && self.histogram.iter().sum::<usize>() == n
            && prefix_ok
            && self.output.len() == n
            && sorted
    }
}

/// A configured sorting unit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortUnit {
    pub spec: BucketSpec,
    pub order: SortOrder,
}

impl SortUnit {
    pub fn accurate() -> Self {
        SortUnit {
            spec: BucketSpec::exact(),
            order: SortOrder::Ascending,
        }
    }

    pub fn approximate(spec: BucketSpec) -> Self {
        SortUnit {
            spec,
            order: SortOrder::Ascending,
        }
    }

    pub fn with_order(mut self, order: SortOrder) -> Self {
        self.order = order;
        self
    }

    pub fn run(&self, words: &[Word]) -> Result<SortTrace> {
        if words.is_empty() {
            return Err(Error::EmptyInput);
        }
        let bins = self.spec.num_buckets();
        let popcounts: Vec<u8> = words.iter().map(|&w| popcount(w)).collect();
        let keys = popcounts
            .iter()
            .map(|&c| {
                let b = self.spec.lookup(c);
                match self.order {
                    SortOrder::Ascending => b,
                    SortOrder::Descending => bins - 1 - b,
                }
            })
            .collect::<Vec<_>>();
        let onehot = keys
            .iter()
            .map(|&k| one_hot_encode(k, bins))
            .collect::<Result<Vec<_>>>()?;
        let histogram = histogram(&keys, bins)?;
        let prefix = exclusive_prefix_sum(&histogram);
        let output = scatter(&keys, &prefix)?;
        Ok(SortTrace {
            popcounts,
            keys,
            onehot,
            histogram,
            prefix,
            output,
        })
    }
}

/// Ascending sort-unit run under `spec`.
pub fn sort_unit(words: &[Word], spec: &BucketSpec) -> Result<SortTrace> {
    SortUnit::approximate(spec.clone()).run(words)
}
