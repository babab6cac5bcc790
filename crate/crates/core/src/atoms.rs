//! Subsets of the ordered atom set `{1, ..., n}` packed into a `u32`.

use std::fmt;

/// Largest atom count an [`AtomSet`] can hold.
pub const MAX_ATOMS: usize = 32;

/// A subset of `{1, ..., n}`. Atom `i` lives in bit `i - 1`.
///
/// Ordering and equality are those of the underlying bit pattern, which is
/// also the canonical element order used throughout the crate. Note that
/// `a ⊆ b` implies `a.bits() <= b.bits()`, so ascending bit order is a linear
/// extension of inclusion.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet(u32);

impl AtomSet {
    pub const EMPTY: AtomSet = AtomSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        AtomSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// The full set `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ATOMS);
        if n >= 32 {
            AtomSet(u32::MAX)
        } else {
            AtomSet((1u32 << n) - 1)
        }
    }

    /// The singleton `{atom}` for a 1-based atom.
    pub fn singleton(atom: usize) -> Self {
        debug_assert!((1..=MAX_ATOMS).contains(&atom));
        AtomSet(1u32 << (atom - 1))
    }

    /// Builds a set from 1-based atoms. Returns `None` if an atom is 0 or
    /// larger than [`MAX_ATOMS`].
    pub fn from_atoms<I: IntoIterator<Item = usize>>(atoms: I) -> Option<Self> {
        let mut bits = 0u32;
        for a in atoms {
            if a == 0 || a > MAX_ATOMS {
                return None;
            }
            bits |= 1u32 << (a - 1);
        }
        Some(AtomSet(bits))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, atom: usize) -> bool {
        (1..=MAX_ATOMS).contains(&atom) && self.0 & (1u32 << (atom - 1)) != 0
    }

    pub fn is_subset(self, other: AtomSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset(self, other: AtomSet) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn intersection(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & other.0)
    }

    pub fn union(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 | other.0)
    }

    pub fn without(self, atom: usize) -> AtomSet {
        AtomSet(self.0 & !(1u32 << (atom - 1)))
    }

    pub fn with(self, atom: usize) -> AtomSet {
        AtomSet(self.0 | (1u32 << (atom - 1)))
    }

    /// Largest atom present, if any.
    pub fn max_atom(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(32 - self.0.leading_zeros() as usize)
        }
    }

    /// Whether every atom is in `1..=n`.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset(AtomSet::full(n))
    }

    /// Atoms in ascending order (1-based).
    pub fn atoms(self) -> Atoms {
        Atoms(self.0)
    }

    /// All subsets of `self`, in ascending bit order.
    pub fn subsets(self) -> impl Iterator<Item = AtomSet> {
        // Standard submask walk, reversed so the order is ascending.
        let mask = self.0;
        let mut subs = Vec::with_capacity(1usize << self.len().min(20));
        let mut s = mask;
        loop {
            subs.push(AtomSet(s));
            if s == 0 {
                break;
            }
            s = (s - 1) & mask;
        }
        subs.into_iter().rev()
    }
}

/// Iterator over the atoms of an [`AtomSet`].
pub struct Atoms(u32);

impl Iterator for Atoms {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(tz as usize + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Atoms {}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.atoms().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Compact support notation: `12` for `{1,2}`, `∅` for the empty set. Atoms
/// above 9 are separated by commas to stay unambiguous.
impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let wide = self.max_atom().unwrap_or(0) > 9;
        for (k, a) in self.atoms().enumerate() {
            if wide && k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_round_trip() {
        let s = AtomSet::from_atoms([1, 3, 4]).unwrap();
        assert_eq!(s.bits(), 0b1101);
        assert_eq!(s.atoms().collect::<Vec<_>>(), vec![1, 3, 4]);
        assert_eq!(format!("{s}"), "134");
        assert_eq!(format!("{s:?}"), "{1,3,4}");
        assert_eq!(s.max_atom(), Some(4));
        assert!(AtomSet::from_atoms([0]).is_none());
        assert!(AtomSet::from_atoms([33]).is_none());
    }

    #[test]
    fn full_and_fits() {
        assert_eq!(AtomSet::full(3).bits(), 7);
        assert_eq!(AtomSet::full(32).bits(), u32::MAX);
        assert!(AtomSet::from_bits(0b100).fits(3));
        assert!(!AtomSet::from_bits(0b1000).fits(3));
    }

    #[test]
    fn subsets_are_ascending_and_complete() {
        let s = AtomSet::from_atoms([1, 3]).unwrap();
        let subs: Vec<u32> = s.subsets().map(AtomSet::bits).collect();
        assert_eq!(subs, vec![0, 1, 4, 5]);
    }

    #[test]
    fn subset_implies_smaller_encoding() {
        for a in 0u32..64 {
            for b in 0u32..64 {
                let (x, y) = (AtomSet(a), AtomSet(b));
                if x.is_subset(y) {
                    assert!(x <= y);
                }
            }
        }
    }
}
