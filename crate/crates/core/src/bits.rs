//! Compact edge sets over canonical edge indices.

use serde::{Deserialize, Serialize};

/// Fixed-capacity bitset indexed by canonical edge ids.
///
/// The capacity is the number of edges of the owning graph; all operations
/// that combine two sets require equal capacity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeSet {
    len: usize,
    words: Vec<u64>,
}

impl EdgeSet {
    pub fn new(len: usize) -> Self {
        EdgeSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut s = EdgeSet::new(len);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    /// Capacity in bits, i.e. the edge count of the owning graph.
    pub fn capacity(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "edge index {i} out of range {}", self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &EdgeSet) -> EdgeSet {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Indices of set bits in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &EdgeSet, f: impl Fn(u64, u64) -> u64) -> EdgeSet {
        assert_eq!(self.len, other.len, "edge set capacity mismatch");
        EdgeSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl std::fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_iter_roundtrip() {
        let mut s = EdgeSet::new(130);
        for i in [0, 63, 64, 65, 129] {
            s.insert(i);
        }
        assert_eq!(s.to_vec(), vec![0, 63, 64, 65, 129]);
        assert_eq!(s.count(), 5);
        assert!(s.contains(64));
        assert!(!s.contains(1));
        s.remove(64);
        assert!(!s.contains(64));
    }

    #[test]
    fn set_algebra() {
        let a = EdgeSet::from_indices(10, &[1, 2, 3]);
        let b = EdgeSet::from_indices(10, &[3, 4]);
        assert_eq!(a.union(&b).to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 2]);
        assert_eq!(a.symmetric_difference(&b).to_vec(), vec![1, 2, 4]);
        assert!(!a.is_disjoint(&b));
        assert!(a.intersection(&b).is_subset(&a));
    }
}
