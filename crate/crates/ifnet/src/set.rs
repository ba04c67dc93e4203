//! Small sorted index sets used for transmitter and receiver labels.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A set of 1-based terminal indices, stored sorted and deduplicated.
///
/// Ordering is lexicographic on the sorted contents, which gives every
/// consumer in the crate the same deterministic iteration order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IdxSet(Vec<usize>);

impl IdxSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IdxSet(indices)
    }

    pub fn empty() -> Self {
        IdxSet(Vec::new())
    }

    pub fn singleton(i: usize) -> Self {
        IdxSet(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// True when `self` ⊆ `other`.
    pub fn is_subset(&self, other: &IdxSet) -> bool {
        let mut it = other.0.iter();
        'outer: for &x in &self.0 {
            for &y in it.by_ref() {
                if y == x {
                    continue 'outer;
                }
                if y > x {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// True when `self` ⊊ `other`.
    pub fn is_strict_subset(&self, other: &IdxSet) -> bool {
        self.0.len() < other.0.len() && self.is_subset(other)
    }

    /// Largest index mentioned, or 0 for the empty set.
    pub fn upper(&self) -> usize {
        self.max().unwrap_or(0)
    }
}

impl fmt::Display for IdxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IdxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl From<&[usize]> for IdxSet {
    fn from(s: &[usize]) -> Self {
        IdxSet::new(s.to_vec())
    }
}

impl From<Vec<usize>> for IdxSet {
    fn from(s: Vec<usize>) -> Self {
        IdxSet::new(s)
    }
}

impl<const N: usize> From<[usize; N]> for IdxSet {
    fn from(s: [usize; N]) -> Self {
        IdxSet::new(s.to_vec())
    }
}
