//! Bitset over the worlds of a finite model.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

/// Maximum number of worlds a model may declare.
pub const MAX_WORLDS: usize = 64;

/// Index of a world inside its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId(pub usize);

/// A set of worlds, one bit per world index.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldSet(u64);

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    /// All worlds of a model with `n` worlds.
    pub fn full(n: usize) -> WorldSet {
        debug_assert!(n <= MAX_WORLDS);
        if n == MAX_WORLDS {
            WorldSet(u64::MAX)
        } else {
            WorldSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(w: WorldId) -> WorldSet {
        WorldSet(1u64 << w.0)
    }

    pub fn from_bits(bits: u64) -> WorldSet {
        WorldSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, w: WorldId) -> bool {
        w.0 < MAX_WORLDS && self.0 & (1u64 << w.0) != 0
    }

    pub fn insert(&mut self, w: WorldId) {
        self.0 |= 1u64 << w.0;
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: WorldSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Complement relative to a model with `n` worlds.
    pub fn complement(self, n: usize) -> WorldSet {
        WorldSet(!self.0 & WorldSet::full(n).0)
    }

    pub fn iter(self) -> impl Iterator<Item = WorldId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(WorldId(i))
        })
    }

    pub fn first(self) -> Option<WorldId> {
        self.iter().next()
    }
}

impl FromIterator<WorldId> for WorldSet {
    fn from_iter<I: IntoIterator<Item = WorldId>>(iter: I) -> Self {
        let mut set = WorldSet::EMPTY;
        for w in iter {
            set.insert(w);
        }
        set
    }
}

impl BitAnd for WorldSet {
    type Output = WorldSet;
    fn bitand(self, rhs: WorldSet) -> WorldSet {
        WorldSet(self.0 & rhs.0)
    }
}

impl BitOr for WorldSet {
    type Output = WorldSet;
    fn bitor(self, rhs: WorldSet) -> WorldSet {
        WorldSet(self.0 | rhs.0)
    }
}

impl Sub for WorldSet {
    type Output = WorldSet;
    fn sub(self, rhs: WorldSet) -> WorldSet {
        WorldSet(self.0 & !rhs.0)
    }
}

impl Not for WorldSet {
    type Output = WorldSet;
    /// Raw bit complement; callers mask with [`WorldSet::full`].
    fn not(self) -> WorldSet {
        WorldSet(!self.0)
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|w| w.0)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_complement() {
        let all = WorldSet::full(3);
        assert_eq!(all.len(), 3);
        let a: WorldSet = [WorldId(0), WorldId(2)].into_iter().collect();
        assert_eq!(a.complement(3), WorldSet::singleton(WorldId(1)));
        assert_eq!(WorldSet::full(64).len(), 64);
    }

    #[test]
    fn subset_and_iter() {
        let a: WorldSet = [WorldId(1), WorldId(3)].into_iter().collect();
        let b = a | WorldSet::singleton(WorldId(0));
        assert!(a.is_subset(b));
        assert!(!b.is_subset(a));
        assert!(WorldSet::EMPTY.is_subset(a));
        assert_eq!(b.iter().map(|w| w.0).collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(a.first(), Some(WorldId(1)));
    }
}
