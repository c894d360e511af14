//! Dense integer ids and the string interner that assigns them.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }

            #[inline]
            pub fn from_index(i: usize) -> Self {
                Self(u32::try_from(i).expect("id space exceeds u32"))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

dense_id!(
    /// Interned paper id.
    PaperId
);
dense_id!(
    /// Interned author id.
    AuthorId
);
dense_id!(
    /// Interned venue (journal) id.
    VenueId
);
dense_id!(
    /// Interned taxonomy node id, shared by fields and disciplines.
    FieldId
);

/// Compare two external ids so that embedded digit runs sort numerically
/// (`F2 < F7 < F10`). Falls back to byte order to keep the ordering total.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        if ab[i].is_ascii_digit() && bb[j].is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let da = trim_zeros(&ab[si..i]);
            let db = trim_zeros(&bb[sj..j]);
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            if ab[i] != bb[j] {
                return ab[i].cmp(&bb[j]);
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j)).then_with(|| a.cmp(b))
}

fn trim_zeros(s: &[u8]) -> &[u8] {
    let k = s.iter().take_while(|&&c| c == b'0').count();
    &s[k.min(s.len().saturating_sub(1))..]
}

/// Assign dense ids to a set of string keys in natural order.
#[derive(Debug, Clone, Default)]
pub struct Interner {
    keys: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Interner {
    pub fn from_keys<I: IntoIterator<Item = String>>(keys: I) -> Self {
        let mut keys: Vec<String> = keys.into_iter().collect();
        keys.sort_by(|a, b| natural_cmp(a, b));
        keys.dedup();
        let lookup = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i as u32))
            .collect();
        Self { keys, lookup }
    }

    pub fn get(&self, key: &str) -> Option<u32> {
        self.lookup.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn into_keys(self) -> Vec<String> {
        self.keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order_sorts_digit_runs_numerically() {
        let mut v = vec!["F10", "F2", "F7", "A1", "F02"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, vec!["A1", "F02", "F2", "F7", "F10"]);
    }

    #[test]
    fn interner_is_order_independent() {
        let a = Interner::from_keys(["w3", "w1", "w20"].map(String::from));
        let b = Interner::from_keys(["w20", "w3", "w1", "w3"].map(String::from));
        assert_eq!(a.into_keys(), b.into_keys());
    }
}
