//! Dense point sets over at most [`MAX_POINTS`] points.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Upper bound on the number of points of any frame, space or model.
pub const MAX_POINTS: usize = 64;

/// A subset of `{0, .., 63}` stored as a single machine word.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_POINTS);
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        debug_assert!(x < MAX_POINTS);
        PointSet(1u64 << x)
    }

    pub fn contains(self, x: usize) -> bool {
        x < MAX_POINTS && self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1u64 << x;
    }

    pub fn remove(&mut self, x: usize) {
        self.0 &= !(1u64 << x);
    }

    pub fn with(mut self, x: usize) -> Self {
        self.insert(x);
        self
    }

    pub fn without(mut self, x: usize) -> Self {
        self.remove(x);
        self
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: PointSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Complement relative to `{0, .., n-1}`.
    pub fn complement(self, n: usize) -> Self {
        PointSet(!self.0 & PointSet::full(n).0)
    }

    /// Least element, if any.
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Shifts every element up by `offset`.
    pub fn shifted(self, offset: usize) -> Self {
        if offset >= 64 {
            PointSet(0)
        } else {
            PointSet(self.0 << offset)
        }
    }

    /// Elements in `[lo, lo + len)`, re-based to start at 0.
    pub fn window(self, lo: usize, len: usize) -> Self {
        if lo >= 64 {
            return PointSet(0);
        }
        PointSet(self.0 >> lo) & PointSet::full(len.min(64))
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// All subsets of `{0, .., n-1}` in increasing bit order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = PointSet> + Clone {
        assert!(n < 64, "subset enumeration over {n} points");
        (0..1u64 << n).map(PointSet)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

impl IntoIterator for PointSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl BitOr for PointSet {
    type Output = PointSet;
    fn bitor(self, rhs: PointSet) -> PointSet {
        PointSet(self.0 | rhs.0)
    }
}

impl BitAnd for PointSet {
    type Output = PointSet;
    fn bitand(self, rhs: PointSet) -> PointSet {
        PointSet(self.0 & rhs.0)
    }
}

impl Sub for PointSet {
    type Output = PointSet;
    fn sub(self, rhs: PointSet) -> PointSet {
        PointSet(self.0 & !rhs.0)
    }
}

/// Complement within the full 64-point universe; prefer [`PointSet::complement`].
impl Not for PointSet {
    type Output = PointSet;
    fn not(self) -> PointSet {
        PointSet(!self.0)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = ids.iter().find(|&&x| x >= MAX_POINTS) {
            return Err(serde::de::Error::custom(format!(
                "point id {bad} exceeds the {MAX_POINTS}-point limit"
            )));
        }
        Ok(ids.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let s: PointSet = [0, 3, 5].into_iter().collect();
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(4));
        assert_eq!(s.complement(6), [1, 2, 4].into_iter().collect());
        assert_eq!(s.first(), Some(0));
        assert_eq!(s.to_string(), "{0,3,5}");
        assert_eq!(PointSet::full(64).len(), 64);
        assert_eq!(s.shifted(2).window(2, 6), s);
    }

    proptest! {
        #[test]
        fn iter_matches_bits(bits in any::<u64>()) {
            let s = PointSet::from_bits(bits);
            let back: PointSet = s.iter().collect();
            prop_assert_eq!(back, s);
            prop_assert_eq!(s.iter().len(), bits.count_ones() as usize);
        }

        #[test]
        fn de_morgan(a in any::<u64>(), b in any::<u64>(), n in 1usize..=64) {
            let (a, b) = (PointSet::from_bits(a) & PointSet::full(n), PointSet::from_bits(b) & PointSet::full(n));
            prop_assert_eq!((a | b).complement(n), a.complement(n) & b.complement(n));
            prop_assert_eq!(a - b, a & b.complement(n));
        }

        #[test]
        fn serde_round_trip(bits in any::<u64>()) {
            let s = PointSet::from_bits(bits);
            let json = serde_json::to_string(&s).unwrap();
            prop_assert_eq!(serde_json::from_str::<PointSet>(&json).unwrap(), s);
        }
    }
}
