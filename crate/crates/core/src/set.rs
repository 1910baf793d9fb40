//! Ground sets and element sets.
//!
//! Elements are opaque string labels. A [`GroundSet`] fixes their canonical
//! order (insertion order) and every [`ElementSet`] is a bitmask over it, so
//! ground sets are limited to [`MAX_ELEMENTS`] elements. Subsets are ordered
//! by their mask value, i.e. element `i` is bit `i`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{MatroidError, Result};

pub const MAX_ELEMENTS: usize = 64;

/// Helpers for raw subset masks.
pub mod bits {
    /// Mask with the lowest `n` bits set.
    pub fn full(n: usize) -> u64 {
        if n >= 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn bit(i: usize) -> u64 {
        1u64 << i
    }

    pub fn len(mask: u64) -> usize {
        mask.count_ones() as usize
    }

    /// Indices of set bits, ascending.
    pub fn iter(mask: u64) -> impl Iterator<Item = usize> {
        let mut rest = mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All submasks of `mask` in increasing numeric order, starting at 0.
    pub fn subsets(mask: u64) -> impl Iterator<Item = u64> {
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some(cur.wrapping_sub(mask) & mask)
            };
            Some(cur)
        })
    }

    /// Spreads the low bits of `compact` onto the positions listed in `positions`.
    pub fn scatter(compact: u64, positions: &[usize]) -> u64 {
        iter(compact).fold(0, |acc, i| acc | (1u64 << positions[i]))
    }

    /// Inverse of [`scatter`]: collects the bits of `mask` at `positions`.
    pub fn gather(mask: u64, positions: &[usize]) -> u64 {
        positions
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (((mask >> p) & 1) << i))
    }
}

/// An ordered collection of unique element labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        MatroidError::check_budget("ground set", labels.len(), MAX_ELEMENTS)?;
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.contains(|c: char| c.is_whitespace() || c == ',') {
                return Err(MatroidError::domain(format!(
                    "invalid element label {label:?}"
                )));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(MatroidError::domain(format!(
                    "duplicate element label {label:?}"
                )));
            }
        }
        Ok(Arc::new(Self { labels, index }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn full_mask(&self) -> u64 {
        bits::full(self.len())
    }
}

/// A subset of a ground set.
#[derive(Clone)]
pub struct ElementSet {
    ground: Arc<GroundSet>,
    mask: u64,
}

impl ElementSet {
    pub fn empty(ground: &Arc<GroundSet>) -> Self {
        Self {
            ground: ground.clone(),
            mask: 0,
        }
    }

    pub fn full(ground: &Arc<GroundSet>) -> Self {
        Self {
            ground: ground.clone(),
            mask: ground.full_mask(),
        }
    }

    pub fn from_mask(ground: &Arc<GroundSet>, mask: u64) -> Result<Self> {
        if mask & !ground.full_mask() != 0 {
            return Err(MatroidError::domain("mask has bits outside the ground set"));
        }
        Ok(Self {
            ground: ground.clone(),
            mask,
        })
    }

    pub(crate) fn from_mask_unchecked(ground: &Arc<GroundSet>, mask: u64) -> Self {
        debug_assert_eq!(mask & !ground.full_mask(), 0);
        Self {
            ground: ground.clone(),
            mask,
        }
    }

    pub fn from_labels<I, S>(ground: &Arc<GroundSet>, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut mask = 0;
        for label in labels {
            let label = label.as_ref();
            let i = ground
                .position(label)
                .ok_or_else(|| MatroidError::domain(format!("unknown element {label:?}")))?;
            mask |= bits::bit(i);
        }
        Ok(Self {
            ground: ground.clone(),
            mask,
        })
    }

    /// Parses a comma-separated label list; `{}` and the empty string are the empty set.
    pub fn parse(ground: &Arc<GroundSet>, text: &str) -> Result<Self> {
        let text = text.trim();
        let text = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(text);
        Self::from_labels(
            ground,
            text.split(',').map(str::trim).filter(|s| !s.is_empty()),
        )
    }

    /// The same labels as a set over another ground set.
    pub fn to_ground(&self, ground: &Arc<GroundSet>) -> Result<Self> {
        Self::from_labels(ground, self.labels())
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        bits::len(self.mask)
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, label: &str) -> bool {
        self.ground
            .position(label)
            .is_some_and(|i| self.mask & bits::bit(i) != 0)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        bits::iter(self.mask).map(|i| self.ground.label(i))
    }

    pub fn same_universe(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ground, &other.ground) || self.ground == other.ground
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.assert_universe(other);
        self.mask & !other.mask == 0
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.assert_universe(other);
        self.mask & other.mask == 0
    }

    pub fn union(&self, other: &Self) -> Self {
        self.assert_universe(other);
        self.with_mask(self.mask | other.mask)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.assert_universe(other);
        self.with_mask(self.mask & other.mask)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.assert_universe(other);
        self.with_mask(self.mask & !other.mask)
    }

    pub fn complement(&self) -> Self {
        self.with_mask(!self.mask & self.ground.full_mask())
    }

    pub(crate) fn with_mask(&self, mask: u64) -> Self {
        Self::from_mask_unchecked(&self.ground, mask)
    }

    fn assert_universe(&self, other: &Self) {
        assert!(
            self.same_universe(other),
            "element sets over different ground sets"
        );
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask && self.same_universe(other)
    }
}

impl Eq for ElementSet {}

impl std::hash::Hash for ElementSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.mask.hash(state);
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.mask.cmp(&other.mask)
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, label) in self.labels().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            f.write_str(label)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for label in self.labels() {
            seq.serialize_element(label)?;
        }
        seq.end()
    }
}
