//! Bitmask subsets of the universe `[1..n]` and their canonical enumeration.
//!
//! Element `id` occupies bit `id - 1`, so universes of up to 64 elements fit
//! in one word. The canonical order used across the crate (FULL ranks, pair
//! enumeration, canonical labels) is: by size first, then lexicographically by
//! the ascending member list.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GtError, Result};

/// Largest supported universe size.
pub const MAX_N: usize = 64;

/// A set of element ids drawn from `[1..n]`, `n <= 64`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The full universe `[1..n]`.
    pub fn universe(n: usize) -> Self {
        debug_assert!(n <= MAX_N);
        if n == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    /// Builds a subset from 1-based ids, rejecting ids outside `[1..n]` and duplicates.
    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I, n: usize) -> Result<Self> {
        let mut bits = 0u64;
        for id in ids {
            if id == 0 || id > n || id > MAX_N {
                return Err(GtError::ElementOutOfRange { id, n });
            }
            let b = 1u64 << (id - 1);
            if bits & b != 0 {
                return Err(GtError::DuplicateElement(id));
            }
            bits |= b;
        }
        Ok(Subset(bits))
    }

    /// Like [`Subset::from_ids`] but panics on invalid input. Test and fixture helper.
    pub fn of(ids: &[usize]) -> Self {
        Self::from_ids(ids.iter().copied(), MAX_N).expect("valid ids")
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, id: usize) -> bool {
        (1..=MAX_N).contains(&id) && self.0 & (1u64 << (id - 1)) != 0
    }

    pub fn with(self, id: usize) -> Self {
        Subset(self.0 | (1u64 << (id - 1)))
    }

    pub fn without(self, id: usize) -> Self {
        Subset(self.0 & !(1u64 << (id - 1)))
    }

    pub fn intersect(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: Subset) -> Self {
        Subset(self.0 ^ other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest id, if any.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Largest id, if any.
    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Member ids in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(tz + 1)
            }
        })
    }

    pub fn ids(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The `count` smallest members (all of them if fewer).
    pub fn smallest(self, count: usize) -> Subset {
        let mut out = 0u64;
        let mut rest = self.0;
        for _ in 0..count {
            if rest == 0 {
                break;
            }
            let low = rest & rest.wrapping_neg();
            out |= low;
            rest &= rest - 1;
        }
        Subset(out)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        Subset::from_ids(ids, MAX_N).map_err(serde::de::Error::custom)
    }
}

fn binom_table() -> &'static [[u128; MAX_N + 1]; MAX_N + 1] {
    static TABLE: OnceLock<[[u128; MAX_N + 1]; MAX_N + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0u128; MAX_N + 1]; MAX_N + 1];
        for n in 0..=MAX_N {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            }
        }
        t
    })
}

/// `C(n, k)` for `n <= 64`; zero when `k > n`.
pub fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        0
    } else {
        binom_table()[n][k]
    }
}

/// `Σ_{i=0}^{max_size} C(n, i)`.
pub fn count_upto(n: usize, max_size: usize) -> u128 {
    (0..=max_size.min(n)).map(|i| binom(n, i)).sum()
}

/// All `size`-subsets of `[1..n]` in lexicographic order of their member lists.
pub fn subsets_of_size(n: usize, size: usize) -> Vec<Subset> {
    let mut out = Vec::with_capacity(binom(n, size).min(1 << 24) as usize);
    for_each_subset_of_size(Subset::universe(n), size, |s| out.push(s));
    out
}

/// Visits every `size`-subset of `ground` in lexicographic order.
pub fn for_each_subset_of_size<F: FnMut(Subset)>(ground: Subset, size: usize, mut visit: F) {
    let elems: Vec<usize> = ground.iter().collect();
    let m = elems.len();
    if size > m {
        return;
    }
    if size == 0 {
        visit(Subset::EMPTY);
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let bits = idx.iter().fold(0u64, |acc, &i| acc | 1u64 << (elems[i] - 1));
        visit(Subset(bits));
        // advance to the next combination
        let mut pos = size;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < m - size + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All subsets of `[1..n]` with at most `max_size` members, in canonical order.
pub fn subsets_upto(n: usize, max_size: usize) -> Vec<Subset> {
    let mut out = Vec::with_capacity(count_upto(n, max_size).min(1 << 24) as usize);
    for s in 0..=max_size.min(n) {
        for_each_subset_of_size(Subset::universe(n), s, |x| out.push(x));
    }
    out
}

/// Position of `set` in the canonical enumeration of subsets of `[1..n]`.
///
/// Sets of smaller size come first; within one size the rank is the
/// lexicographic rank of the ascending member list.
pub fn canonical_rank(set: Subset, n: usize) -> u128 {
    let size = set.len();
    let offset: u128 = (0..size).map(|i| binom(n, i)).sum();
    let mut rank = 0u128;
    let mut prev = 0usize;
    for (j, c) in set.iter().enumerate() {
        let remaining = size - j - 1;
        for v in prev + 1..c {
            rank += binom(n - v, remaining);
        }
        prev = c;
    }
    offset + rank
}

/// Number of bits needed to name `count` distinct values: `⌈log₂ count⌉`.
pub fn ceil_log2(count: u128) -> usize {
    if count <= 1 {
        0
    } else {
        (128 - (count - 1).leading_zeros()) as usize
    }
}
