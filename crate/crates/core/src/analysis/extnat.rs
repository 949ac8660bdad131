use std::fmt;
use std::ops::Add;

use serde::{Serialize, Serializer};

/// Natural numbers extended with infinity. Variant order makes every
/// finite value smaller than `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Finite(u64),
    Infinite,
}

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(n) => Some(n),
            ExtNat::Infinite => None,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;

    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a.checked_add(b).map_or(ExtNat::Infinite, ExtNat::Finite),
            _ => ExtNat::Infinite,
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        ExtNat::Finite(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(n) => write!(f, "{n}"),
            ExtNat::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite values as JSON numbers, infinity as the string `"inf"`.
impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtNat::Finite(n) => s.serialize_u64(*n),
            ExtNat::Infinite => s.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_is_top_and_absorbing() {
        assert!(ExtNat::Finite(u64::MAX) < ExtNat::Infinite);
        assert_eq!(ExtNat::Finite(2) + ExtNat::Infinite, ExtNat::Infinite);
        assert_eq!(ExtNat::Finite(2) + ExtNat::Finite(3), ExtNat::Finite(5));
        assert_eq!(ExtNat::Finite(1).max(ExtNat::Infinite), ExtNat::Infinite);
    }
}
