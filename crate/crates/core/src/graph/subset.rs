use std::fmt;

use smallvec::{smallvec, SmallVec};

/// A set of vertex ids stored as a fixed-width bit mask.
///
/// The width is fixed by the universe size at construction, so two subsets of
/// the same graph with equal membership are equal and hash equally. Graphs
/// of up to 128 vertices keep the mask inline.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSubset {
    words: SmallVec<[u64; 2]>,
}

impl VertexSubset {
    pub fn empty(universe: usize) -> Self {
        Self {
            words: smallvec![0; universe.div_ceil(64).max(1)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for v in 0..universe {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices(universe: usize, vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w & (1u64 << (v % 64)) != 0)
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1u64 << (v % 64));
    }

    /// Copy with `v` added.
    pub fn with(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    /// Complement within `0..universe`.
    pub fn complement(&self, universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for v in 0..universe {
            if !self.contains(v) {
                s.insert(v);
            }
        }
        s
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
