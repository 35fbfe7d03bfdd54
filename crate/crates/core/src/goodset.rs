use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

/// A set of goods, stored as a bitmask over the canonical good indices of an
/// instance. Instances are capped at 64 goods, which is far beyond what the
/// exact searches can handle anyway.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoodSet(u64);

impl GoodSet {
    pub const EMPTY: GoodSet = GoodSet(0);

    /// The set `{0, 1, .., m-1}`.
    pub fn universe(m: usize) -> GoodSet {
        debug_assert!(m <= 64);
        if m == 64 {
            GoodSet(u64::MAX)
        } else {
            GoodSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(index: usize) -> GoodSet {
        debug_assert!(index < 64);
        GoodSet(1u64 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> GoodSet {
        let mut set = GoodSet::EMPTY;
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> GoodSet {
        GoodSet(bits)
    }

    pub fn insert(&mut self, index: usize) {
        debug_assert!(index < 64);
        self.0 |= 1u64 << index;
    }

    pub fn remove(&mut self, index: usize) {
        debug_assert!(index < 64);
        self.0 &= !(1u64 << index);
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: GoodSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: GoodSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest contained index, if any.
    pub fn lowest(self) -> Option<usize> {
        if self.is_empty() {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Highest contained index, if any.
    pub fn highest(self) -> Option<usize> {
        if self.is_empty() {
            None
        } else {
            Some(63 - self.0.leading_zeros() as usize)
        }
    }

    /// Iterates over contained indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl BitOr for GoodSet {
    type Output = GoodSet;
    fn bitor(self, rhs: GoodSet) -> GoodSet {
        GoodSet(self.0 | rhs.0)
    }
}

impl BitAnd for GoodSet {
    type Output = GoodSet;
    fn bitand(self, rhs: GoodSet) -> GoodSet {
        GoodSet(self.0 & rhs.0)
    }
}

impl Sub for GoodSet {
    type Output = GoodSet;
    fn sub(self, rhs: GoodSet) -> GoodSet {
        GoodSet(self.0 & !rhs.0)
    }
}

impl fmt::Debug for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for GoodSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> GoodSet {
        GoodSet::from_indices(iter)
    }
}
