//! Token multisets.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::string::String;

use serde::{Deserialize, Serialize};

/// Multiset of tokens, kept sorted so iteration and serialization are stable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenBag {
    counts: BTreeMap<String, u32>,
}

impl TokenBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str) {
        self.add(token, 1);
    }

    pub fn add(&mut self, token: &str, n: u32) {
        if n == 0 {
            return;
        }
        match self.counts.get_mut(token) {
            Some(c) => *c += n,
            None => {
                self.counts.insert(token.into(), n);
            }
        }
    }

    pub fn get(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// Total number of tokens, counting repeats.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    /// Number of distinct tokens.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, String, u32> {
        self.counts.iter()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.counts.contains_key(token)
    }

    /// Multiset difference `self - other` (counts saturate at zero).
    pub fn difference(&self, other: &TokenBag) -> TokenBag {
        let counts = self
            .counts
            .iter()
            .filter_map(|(t, &c)| {
                let left = c.saturating_sub(other.get(t));
                (left > 0).then(|| (t.clone(), left))
            })
            .collect();
        TokenBag { counts }
    }
}

impl<'a> FromIterator<&'a str> for TokenBag {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut bag = TokenBag::new();
        for t in iter {
            bag.insert(t);
        }
        bag
    }
}

impl<'a> IntoIterator for &'a TokenBag {
    type Item = (&'a String, &'a u32);
    type IntoIter = btree_map::Iter<'a, String, u32>;

    fn into_iter(self) -> Self::IntoIter {
        self.counts.iter()
    }
}
