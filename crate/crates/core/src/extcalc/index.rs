use std::cmp::Ordering;
use std::fmt;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 32;

/// Strictly increasing tuple of coordinate indices, labelling the basis
/// element `dx_{i1} ^ ... ^ dx_{ik}`. Stored as a bit set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(u32);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn single(i: usize) -> Self {
        assert!(i < MAX_DIM);
        MultiIndex(1 << i)
    }

    /// Builds the index from an arbitrary list, returning the sign of the
    /// sorting permutation, or `None` when an index repeats.
    pub fn from_unsorted(indices: &[usize]) -> Option<(i8, MultiIndex)> {
        let mut acc = MultiIndex::EMPTY;
        let mut sign = 1i8;
        for &i in indices {
            let (s, next) = acc.wedge(&MultiIndex::single(i))?;
            sign *= s;
            acc = next;
        }
        Some((sign, acc))
    }

    /// Index of `0..n` with every coordinate present.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_DIM);
        if n == 32 {
            MultiIndex(u32::MAX)
        } else {
            MultiIndex((1u32 << n) - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.0;
        (0..MAX_DIM).filter(move |&i| bits & (1 << i) != 0)
    }

    pub fn max_index(&self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    /// Number of elements strictly below `i`.
    pub fn count_below(&self, i: usize) -> usize {
        (self.0 & ((1u32 << i) - 1)).count_ones() as usize
    }

    /// `dx_i ^ dx_I = sign * dx_{I + i}`.
    pub fn insert(&self, i: usize) -> Option<(i8, MultiIndex)> {
        if self.contains(i) {
            return None;
        }
        let sign = if self.count_below(i).is_multiple_of(2) { 1 } else { -1 };
        Some((sign, MultiIndex(self.0 | (1 << i))))
    }

    pub fn remove(&self, i: usize) -> MultiIndex {
        MultiIndex(self.0 & !(1 << i))
    }

    /// `dx_I ^ dx_J = sign * dx_{I + J}`; `None` when they overlap.
    pub fn wedge(&self, other: &MultiIndex) -> Option<(i8, MultiIndex)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // every pair (i in self, j in other) with i > j is an inversion
        let inversions: usize = other
            .indices()
            .map(|j| self.0.checked_shr(j as u32 + 1).unwrap_or(0).count_ones() as usize)
            .sum();
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, MultiIndex(self.0 | other.0)))
    }

    /// Complement within `0..n`.
    pub fn complement(&self, n: usize) -> MultiIndex {
        MultiIndex(!self.0 & MultiIndex::full(n).0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.indices()).finish()
    }
}
