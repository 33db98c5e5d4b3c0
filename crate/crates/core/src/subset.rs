//! Ground sets and subsets.
//!
//! A [`Subset`] is a bitmask over `V = {0, .., n-1}` with a cached
//! cardinality. Ground sets of up to 64 elements live in a single inline
//! word; larger ground sets spill to the heap.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

/// The ground set `V = {0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::instance(
                "ground set must contain at least one element",
            ));
        }
        Ok(GroundSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn empty_set(&self) -> Subset {
        Subset::empty(self.n)
    }

    pub fn full_set(&self) -> Subset {
        Subset::full(self.n)
    }

    /// Checks that `x` was built over this ground set.
    pub fn check(&self, x: &Subset) -> Result<()> {
        if x.ground_size() != self.n {
            return Err(Error::instance(format!(
                "subset over {} elements used with ground set of {}",
                x.ground_size(),
                self.n
            )));
        }
        Ok(())
    }
}

/// A subset of `{0, .., n-1}`.
///
/// Ordering compares the bitmasks as unsigned integers (element 0 is the
/// least significant bit), which is the lexicographic tie-break order used
/// throughout the crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    n: usize,
    card: usize,
    words: SmallVec<[u64; 1]>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Subset {
            n,
            card: 0,
            words: smallvec![0; words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Subset::empty(n);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * WORD;
            let bits = n.saturating_sub(lo).min(WORD);
            *w = if bits == WORD {
                u64::MAX
            } else {
                (1u64 << bits) - 1
            };
        }
        s.card = n;
        s
    }

    /// Builds a subset of a ground set with at most 64 elements from a mask.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= WORD, "from_mask requires n <= 64");
        debug_assert!(n == WORD || mask >> n == 0, "mask has bits beyond n");
        Subset {
            n,
            card: mask.count_ones() as usize,
            words: smallvec![mask],
        }
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elems: I) -> Result<Self> {
        let mut s = Subset::empty(n);
        for j in elems {
            if j >= n {
                return Err(Error::instance(format!(
                    "element {j} outside ground set of size {n}"
                )));
            }
            s.insert(j);
        }
        Ok(s)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    /// The mask as a single word, when the ground set fits in one.
    pub fn mask(&self) -> Option<u64> {
        (self.n <= WORD).then(|| self.words[0])
    }

    pub fn contains(&self, j: usize) -> bool {
        j < self.n && self.words[j / WORD] >> (j % WORD) & 1 == 1
    }

    /// Inserts `j`; returns whether it was absent.
    pub fn insert(&mut self, j: usize) -> bool {
        assert!(
            j < self.n,
            "element {j} outside ground set of size {}",
            self.n
        );
        let w = &mut self.words[j / WORD];
        let bit = 1u64 << (j % WORD);
        if *w & bit == 0 {
            *w |= bit;
            self.card += 1;
            true
        } else {
            false
        }
    }

    /// Removes `j`; returns whether it was present.
    pub fn remove(&mut self, j: usize) -> bool {
        if j >= self.n {
            return false;
        }
        let w = &mut self.words[j / WORD];
        let bit = 1u64 << (j % WORD);
        if *w & bit != 0 {
            *w &= !bit;
            self.card -= 1;
            true
        } else {
            false
        }
    }

    pub fn with(&self, j: usize) -> Subset {
        let mut s = self.clone();
        s.insert(j);
        s
    }

    pub fn without(&self, j: usize) -> Subset {
        let mut s = self.clone();
        s.remove(j);
        s
    }

    pub fn iter(&self) -> Elements<'_> {
        Elements {
            words: &self.words,
            idx: 0,
            cur: self.words[0],
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &Subset, op: impl Fn(u64, u64) -> u64) -> Subset {
        assert_eq!(self.n, other.n, "subsets over different ground sets");
        let words: SmallVec<[u64; 1]> = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(&a, &b)| op(a, b))
            .collect();
        let card = words.iter().map(|w| w.count_ones() as usize).sum();
        Subset {
            n: self.n,
            card,
            words,
        }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Subset {
        Subset::full(self.n).difference(self)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(other.words.iter())
                .all(|(&a, &b)| a & !b == 0)
    }
}

pub struct Elements<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Elements<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl<'a> IntoIterator for &'a Subset {
    type Item = usize;
    type IntoIter = Elements<'a>;

    fn into_iter(self) -> Elements<'a> {
        self.iter()
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
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
        for (i, j) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    n: usize,
    elements: Vec<usize>,
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubsetRepr {
            n: self.n,
            elements: self.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SubsetRepr::deserialize(d)?;
        Subset::from_elements(repr.n, repr.elements).map_err(serde::de::Error::custom)
    }
}
