//! Fixed-capacity segment sets.
//!
//! A [`SegmentSet`] is a bit set over the segment universe `0..n`. The word
//! vector always has exactly `ceil(n / 64)` entries and bits at or above `n`
//! are kept clear, so equality, hashing and ordering are structural.

use std::fmt;

use crate::error::Error;

/// Largest universe size accepted anywhere in the crate.
pub const MAX_SEGMENTS: usize = 4096;

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentSet {
    universe: usize,
    words: Vec<u64>,
}

impl SegmentSet {
    /// Empty set over a universe of `universe` segments.
    pub fn empty(universe: usize) -> Self {
        assert!(
            universe <= MAX_SEGMENTS,
            "universe {universe} exceeds {MAX_SEGMENTS}"
        );
        SegmentSet {
            universe,
            words: vec![0; universe.div_ceil(WORD_BITS)],
        }
    }

    /// The full universe `0..universe`.
    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        set.clear_tail();
        set
    }

    /// Builds a set from 0-based indices, rejecting anything outside the universe.
    pub fn from_indices<I>(universe: usize, indices: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = usize>,
    {
        if universe > MAX_SEGMENTS {
            return Err(Error::UniverseTooLarge { n: universe });
        }
        let mut set = Self::empty(universe);
        for idx in indices {
            if idx >= universe {
                return Err(Error::SegmentOutOfRange {
                    segment: idx,
                    n: universe,
                });
            }
            set.insert(idx);
        }
        Ok(set)
    }

    fn clear_tail(&mut self) {
        let rem = self.universe % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, idx: usize) {
        assert!(
            idx < self.universe,
            "segment {idx} outside universe {}",
            self.universe
        );
        self.words[idx / WORD_BITS] |= 1 << (idx % WORD_BITS);
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx < self.universe && self.words[idx / WORD_BITS] & (1 << (idx % WORD_BITS)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    /// True when `self` holds at least one segment that `other` lacks.
    pub fn has_any_outside(&self, other: &SegmentSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & !b != 0)
    }

    pub fn is_subset(&self, other: &SegmentSet) -> bool {
        !self.has_any_outside(other)
    }

    pub fn union(&self, other: &SegmentSet) -> SegmentSet {
        debug_assert_eq!(self.universe, other.universe);
        SegmentSet {
            universe: self.universe,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn union_with(&mut self, other: &SegmentSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference(&self, other: &SegmentSet) -> SegmentSet {
        SegmentSet {
            universe: self.universe,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn symmetric_difference(&self, other: &SegmentSet) -> SegmentSet {
        SegmentSet {
            universe: self.universe,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// `|self ∖ other|` without allocating.
    pub fn difference_len(&self, other: &SegmentSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    /// `|self ∪ other|` without allocating.
    pub fn union_len(&self, other: &SegmentSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Ascending 0-based member indices.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Members as 1-based segment ids, the external numbering.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * WORD_BITS + bit);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

impl<'a> IntoIterator for &'a SegmentSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for SegmentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
