//! Small fixed-width index sets.
//!
//! Networks are capped at 64 nodes, 64 edges and 64 sources, which lets
//! cut enumeration run on plain `u64` masks.

use std::fmt;

/// Hard cap on nodes, edges and sources per network.
pub const MAX_ITEMS: usize = 64;

macro_rules! index_set {
    ($(#[$meta:meta])* $name:ident, $id:ty) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
        pub struct $name(pub u64);

        impl $name {
            pub const EMPTY: Self = Self(0);

            pub fn full(len: usize) -> Self {
                if len >= 64 {
                    Self(u64::MAX)
                } else {
                    Self((1u64 << len) - 1)
                }
            }

            pub fn singleton(id: $id) -> Self {
                Self(1u64 << id.0)
            }

            pub fn contains(self, id: $id) -> bool {
                self.0 >> id.0 & 1 == 1
            }

            pub fn insert(&mut self, id: $id) {
                self.0 |= 1u64 << id.0;
            }

            pub fn remove(&mut self, id: $id) {
                self.0 &= !(1u64 << id.0);
            }

            pub fn with(mut self, id: $id) -> Self {
                self.insert(id);
                self
            }

            pub fn without(mut self, id: $id) -> Self {
                self.remove(id);
                self
            }

            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            pub fn union(self, other: Self) -> Self {
                Self(self.0 | other.0)
            }

            pub fn intersection(self, other: Self) -> Self {
                Self(self.0 & other.0)
            }

            pub fn difference(self, other: Self) -> Self {
                Self(self.0 & !other.0)
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            /// Members in increasing index order.
            pub fn iter(self) -> impl Iterator<Item = $id> {
                let mut bits = self.0;
                std::iter::from_fn(move || {
                    if bits == 0 {
                        return None;
                    }
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(<$id>::from(i))
                })
            }
        }

        impl FromIterator<$id> for $name {
            fn from_iter<T: IntoIterator<Item = $id>>(iter: T) -> Self {
                let mut set = Self::EMPTY;
                for id in iter {
                    set.insert(id);
                }
                set
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter().map(|i| i.0)).finish()
            }
        }
    };
}

macro_rules! index_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
        pub struct $name(pub usize);

        impl From<usize> for $name {
            fn from(i: usize) -> Self {
                Self(i)
            }
        }
    };
}

index_id!(
    /// Dense node index (declaration order).
    NodeId
);
index_id!(
    /// Dense edge index (declaration order).
    EdgeId
);
index_id!(
    /// Zero-based source index; source `i` feeds the `i`-th argument of the
    /// target function. Reports print it one-based.
    SourceIdx
);

index_set!(
    /// Set of edges by declaration index.
    EdgeSet,
    EdgeId
);
index_set!(
    /// Set of nodes by declaration index.
    NodeSet,
    NodeId
);
index_set!(
    /// Set of sources by source index.
    SourceSet,
    SourceIdx
);

impl SourceSet {
    /// One-based indices, for display.
    pub fn one_based(self) -> Vec<usize> {
        self.iter().map(|s| s.0 + 1).collect()
    }
}
