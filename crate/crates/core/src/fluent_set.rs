//! Packed membership vectors over a model's fluent indices.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a fluent inside a [`crate::Model`]'s vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FluentId(pub u32);

impl FluentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FluentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

const WORD: usize = 64;

/// Fixed-capacity bit set. Two sets are only comparable when built for the
/// same capacity; every set produced by one model shares that model's capacity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FluentSet {
    capacity: u32,
    words: Vec<u64>,
}

impl FluentSet {
    pub fn empty(capacity: usize) -> Self {
        FluentSet {
            capacity: capacity as u32,
            words: vec![0; capacity.div_ceil(WORD)],
        }
    }

    pub fn from_ids(capacity: usize, ids: impl IntoIterator<Item = FluentId>) -> Self {
        let mut s = FluentSet::empty(capacity);
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity as usize
    }

    pub fn insert(&mut self, id: FluentId) -> bool {
        let i = id.index();
        assert!(i < self.capacity(), "fluent {i} outside capacity {}", self.capacity);
        let mask = 1u64 << (i % WORD);
        let w = &mut self.words[i / WORD];
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    pub fn remove(&mut self, id: FluentId) -> bool {
        let i = id.index();
        if i >= self.capacity() {
            return false;
        }
        let mask = 1u64 << (i % WORD);
        let w = &mut self.words[i / WORD];
        let present = *w & mask != 0;
        *w &= !mask;
        present
    }

    pub fn contains(&self, id: FluentId) -> bool {
        let i = id.index();
        i < self.capacity() && self.words[i / WORD] & (1u64 << (i % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_subset(&self, other: &FluentSet) -> bool {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &FluentSet) -> bool {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &FluentSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &FluentSet) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(FluentId((wi * WORD + bit) as u32))
            })
        })
    }
}

impl fmt::Debug for FluentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|id| id.0)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn build(cap: usize, xs: &BTreeSet<u32>) -> FluentSet {
        FluentSet::from_ids(cap, xs.iter().map(|&x| FluentId(x)))
    }

    proptest! {
        #[test]
        fn matches_btreeset_semantics(
            a in proptest::collection::btree_set(0u32..150, 0..40),
            b in proptest::collection::btree_set(0u32..150, 0..40),
        ) {
            let (sa, sb) = (build(150, &a), build(150, &b));
            prop_assert_eq!(sa.len(), a.len());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.intersects(&sb), !a.is_disjoint(&b));
            let mut u = sa.clone();
            u.union_with(&sb);
            prop_assert_eq!(u.iter().map(|f| f.0).collect::<BTreeSet<_>>(), a.union(&b).copied().collect());
            let mut d = sa.clone();
            d.difference_with(&sb);
            prop_assert_eq!(d.iter().map(|f| f.0).collect::<BTreeSet<_>>(), a.difference(&b).copied().collect());
        }
    }

    #[test]
    fn insert_remove_report_change() {
        let mut s = FluentSet::empty(70);
        assert!(s.insert(FluentId(65)));
        assert!(!s.insert(FluentId(65)));
        assert!(s.contains(FluentId(65)));
        assert!(s.remove(FluentId(65)));
        assert!(!s.remove(FluentId(65)));
        assert!(s.is_empty());
    }
}
