//! Sets of environment indices (belief supports).
//!
//! Every set belonging to one model has the same word width, so equality,
//! hashing and ordering are plain word comparisons.

use smallvec::SmallVec;
use std::fmt;

type Words = SmallVec<[u64; 4]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnvSet {
    words: Words,
}

#[inline]
fn word_count(num_envs: usize) -> usize {
    num_envs.div_ceil(64).max(1)
}

impl EnvSet {
    pub fn empty(num_envs: usize) -> Self {
        EnvSet {
            words: SmallVec::from_elem(0, word_count(num_envs)),
        }
    }

    /// The set `{0, .., num_envs - 1}`.
    pub fn full(num_envs: usize) -> Self {
        let mut set = Self::empty(num_envs);
        for (i, w) in set.words.iter_mut().enumerate() {
            let lo = i * 64;
            let remaining = num_envs.saturating_sub(lo);
            *w = if remaining >= 64 {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        set
    }

    pub fn singleton(num_envs: usize, env: usize) -> Self {
        let mut set = Self::empty(num_envs);
        set.insert(env);
        set
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(num_envs: usize, envs: I) -> Self {
        let mut set = Self::empty(num_envs);
        for e in envs {
            set.insert(e);
        }
        set
    }

    /// Largest environment count representable at this width.
    pub fn capacity(&self) -> usize {
        self.words.len() * 64
    }

    #[inline]
    pub fn insert(&mut self, env: usize) {
        self.words[env / 64] |= 1u64 << (env % 64);
    }

    #[inline]
    pub fn remove(&mut self, env: usize) {
        self.words[env / 64] &= !(1u64 << (env % 64));
    }

    #[inline]
    pub fn contains(&self, env: usize) -> bool {
        self.words
            .get(env / 64)
            .is_some_and(|w| w & (1u64 << (env % 64)) != 0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn is_subset(&self, other: &EnvSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &EnvSet) -> bool {
        self.is_subset(other) && self != other
    }

    #[inline]
    pub fn intersection(&self, other: &EnvSet) -> EnvSet {
        EnvSet {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, other: &EnvSet) -> EnvSet {
        EnvSet {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn difference(&self, other: &EnvSet) -> EnvSet {
        EnvSet {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn intersects(&self, other: &EnvSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a EnvSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

/// Zero-based, e.g. `{0,2}`.
impl fmt::Debug for EnvSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for EnvSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
