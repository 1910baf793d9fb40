//! Concrete finite representations: uniform, graphic, binary linear and explicit.

use std::collections::HashSet;

use crate::set::bits;

/// An independence oracle over subsets of `0..n`, given as masks.
///
/// Implementations must be pure and reentrant.
pub trait Oracle: Send + Sync {
    fn is_independent(&self, mask: u64) -> bool;

    /// Size of a maximal independent subset of `mask`.
    fn rank(&self, mask: u64) -> usize {
        let mut basis = 0;
        for i in bits::iter(mask) {
            if self.is_independent(basis | bits::bit(i)) {
                basis |= bits::bit(i);
            }
        }
        bits::len(basis)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UniformOracle {
    pub rank: usize,
}

impl Oracle for UniformOracle {
    fn is_independent(&self, mask: u64) -> bool {
        bits::len(mask) <= self.rank
    }

    fn rank(&self, mask: u64) -> usize {
        bits::len(mask).min(self.rank)
    }
}

/// Cycle matroid of a finite multigraph. Loops are one-element circuits.
#[derive(Debug, Clone)]
pub struct GraphicOracle {
    vertex_count: usize,
    edges: Vec<(u8, u8)>,
}

const MAX_VERTICES: usize = 2 * crate::set::MAX_ELEMENTS;

impl GraphicOracle {
    /// Panics if there are more than `2 * MAX_ELEMENTS` vertices, which no
    /// graph with at most `MAX_ELEMENTS` edges needs.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Self {
        assert!(vertex_count <= MAX_VERTICES, "too many vertices");
        let edges = edges
            .iter()
            .map(|&(u, v)| {
                assert!(
                    u < vertex_count && v < vertex_count,
                    "edge endpoint out of range"
                );
                (u as u8, v as u8)
            })
            .collect();
        Self {
            vertex_count,
            edges,
        }
    }

    /// Number of edges of `mask` joining distinct components, i.e. the rank.
    fn forest_size(&self, mask: u64, stop_on_cycle: bool) -> Option<usize> {
        let mut parent = [0u8; MAX_VERTICES];
        for (v, p) in parent.iter_mut().enumerate().take(self.vertex_count) {
            *p = v as u8;
        }
        fn find(parent: &mut [u8], mut v: u8) -> u8 {
            while parent[v as usize] != v {
                let up = parent[parent[v as usize] as usize];
                parent[v as usize] = up;
                v = up;
            }
            v
        }
        let mut joined = 0;
        for i in bits::iter(mask) {
            let (u, v) = self.edges[i];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                if stop_on_cycle {
                    return None;
                }
            } else {
                parent[ru as usize] = rv;
                joined += 1;
            }
        }
        Some(joined)
    }
}

impl Oracle for GraphicOracle {
    fn is_independent(&self, mask: u64) -> bool {
        self.forest_size(mask, true).is_some()
    }

    fn rank(&self, mask: u64) -> usize {
        self.forest_size(mask, false).unwrap_or(0)
    }
}

/// Column matroid of a 0/1 matrix over GF(2); column `i` is a bit vector over rows.
#[derive(Debug, Clone)]
pub struct BinaryOracle {
    columns: Vec<u64>,
}

impl BinaryOracle {
    pub fn new(columns: Vec<u64>) -> Self {
        Self { columns }
    }

    fn eliminate(&self, mask: u64, stop_on_dependence: bool) -> Option<usize> {
        // pivots[b] holds a reduced vector whose highest set bit is b
        let mut pivots = [0u64; 64];
        let mut rank = 0;
        for i in bits::iter(mask) {
            let mut v = self.columns[i];
            while v != 0 {
                let top = 63 - v.leading_zeros() as usize;
                if pivots[top] == 0 {
                    pivots[top] = v;
                    rank += 1;
                    break;
                }
                v ^= pivots[top];
            }
            if v == 0 && stop_on_dependence {
                return None;
            }
        }
        Some(rank)
    }
}

impl Oracle for BinaryOracle {
    fn is_independent(&self, mask: u64) -> bool {
        self.eliminate(mask, true).is_some()
    }

    fn rank(&self, mask: u64) -> usize {
        self.eliminate(mask, false).unwrap_or(0)
    }
}

/// Independence by table lookup.
#[derive(Debug, Clone)]
pub struct ExplicitOracle {
    family: HashSet<u64>,
}

impl ExplicitOracle {
    pub fn new(family: impl IntoIterator<Item = u64>) -> Self {
        Self {
            family: family.into_iter().collect(),
        }
    }
}

impl Oracle for ExplicitOracle {
    fn is_independent(&self, mask: u64) -> bool {
        self.family.contains(&mask)
    }
}
