//! Dense vertex sets over a fixed host graph.
//!
//! A `VertexSet` remembers the order of the graph it belongs to so that set
//! operations across different graphs fail loudly instead of silently
//! truncating. Words are 64-bit, index `v` lives in word `v / 64`.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    host_n: usize,
    words: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl VertexSet {
    pub fn new(host_n: usize) -> Self {
        VertexSet {
            host_n,
            words: vec![0; words_for(host_n)],
        }
    }

    pub fn full(host_n: usize) -> Self {
        let mut s = Self::new(host_n);
        for v in 0..host_n {
            s.insert(v);
        }
        s
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(host_n: usize, members: I) -> Self {
        let mut s = Self::new(host_n);
        for v in members {
            s.insert(v);
        }
        s
    }

    pub fn host_n(&self) -> usize {
        self.host_n
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.host_n, "vertex {v} out of range {}", self.host_n);
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        assert!(v < self.host_n, "vertex {v} out of range {}", self.host_n);
        self.words[v / 64] &= !(1u64 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.host_n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn same_host(&self, other: &VertexSet) -> bool {
        self.host_n == other.host_n
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        debug_assert!(self.same_host(other));
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        debug_assert!(self.same_host(other));
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert!(self.same_host(other));
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert!(self.same_host(other));
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &VertexSet) {
        debug_assert!(self.same_host(other));
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.subtract(other);
        s
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(None)?;
        for v in self.iter() {
            seq.serialize_element(&v)?;
        }
        seq.end()
    }
}
