//! The [`Matroid`] handle and the basis/circuit/rank primitives.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::axioms;
use crate::config::Budget;
use crate::error::{MatroidError, Result};
use crate::repr::{BinaryOracle, ExplicitOracle, GraphicOracle, Oracle, UniformOracle};
use crate::set::{bits, ElementSet, GroundSet};

/// How a matroid was built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Representation {
    Explicit,
    Uniform {
        rank: usize,
    },
    Graphic {
        vertices: Vec<String>,
        edges: Vec<(usize, usize)>,
    },
    /// `columns[i]` is column `i` as a bit vector over `rows` rows.
    LinearGf2 {
        rows: usize,
        columns: Vec<u64>,
    },
    Derived(Derivation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    Dual,
    Restriction,
    Contraction,
    DirectSum,
}

/// A finite matroid given by an independence oracle.
///
/// Cloning is cheap; the oracle and the cached rank/basis are shared.
#[derive(Clone)]
pub struct Matroid {
    ground: Arc<GroundSet>,
    oracle: Arc<dyn Oracle>,
    repr: Arc<Representation>,
    // (rank of E, canonical basis of E)
    cache: Arc<OnceLock<(usize, u64)>>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matroid")
            .field("ground", &self.ground.labels())
            .field("repr", &self.repr)
            .finish()
    }
}

impl Matroid {
    pub fn from_oracle(
        ground: Arc<GroundSet>,
        oracle: Arc<dyn Oracle>,
        repr: Representation,
    ) -> Self {
        Self {
            ground,
            oracle,
            repr: Arc::new(repr),
            cache: Arc::new(OnceLock::new()),
        }
    }

    pub fn uniform(ground: Arc<GroundSet>, rank: usize) -> Self {
        Self::from_oracle(
            ground,
            Arc::new(UniformOracle { rank }),
            Representation::Uniform { rank },
        )
    }

    /// `U_{rank,n}` on elements `e1..en`.
    pub fn uniform_n(n: usize, rank: usize) -> Result<Self> {
        let ground = GroundSet::new((1..=n).map(|i| format!("e{i}")))?;
        Ok(Self::uniform(ground, rank))
    }

    /// Every subset independent.
    pub fn free(ground: Arc<GroundSet>) -> Self {
        let n = ground.len();
        Self::uniform(ground, n)
    }

    /// Cycle matroid of a multigraph; `edges[i]` are the endpoints of element `i`.
    pub fn graphic(
        ground: Arc<GroundSet>,
        vertices: Vec<String>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if edges.len() != ground.len() {
            return Err(MatroidError::domain(format!(
                "{} edges for {} elements",
                edges.len(),
                ground.len()
            )));
        }
        if let Some(&(u, v)) = edges
            .iter()
            .find(|(u, v)| *u >= vertices.len() || *v >= vertices.len())
        {
            return Err(MatroidError::domain(format!(
                "edge endpoint {}/{} out of range",
                u, v
            )));
        }
        let oracle = GraphicOracle::new(vertices.len(), &edges);
        Ok(Self::from_oracle(
            ground,
            Arc::new(oracle),
            Representation::Graphic { vertices, edges },
        ))
    }

    /// Graphic matroid from `(label, u, v)` triples; vertices are numbered in order of appearance.
    pub fn graph(edges: &[(&str, &str, &str)]) -> Result<Self> {
        let ground = GroundSet::new(edges.iter().map(|e| e.0))?;
        let mut vertices: Vec<String> = Vec::new();
        let mut vertex = |name: &str| match vertices.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                vertices.push(name.to_string());
                vertices.len() - 1
            }
        };
        let ends: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(_, u, v)| (vertex(u), vertex(v)))
            .collect();
        Self::graphic(ground, vertices, ends)
    }

    /// Column matroid over GF(2); `rows[r][c]` is the entry at row `r`, column `c`.
    pub fn linear_gf2(ground: Arc<GroundSet>, rows: &[Vec<bool>]) -> Result<Self> {
        MatroidError::check_budget("matrix rows", rows.len(), 64)?;
        let mut columns = vec![0u64; ground.len()];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ground.len() {
                return Err(MatroidError::domain(format!(
                    "matrix row {} has {} entries, expected {}",
                    r + 1,
                    row.len(),
                    ground.len()
                )));
            }
            for (c, &entry) in row.iter().enumerate() {
                if entry {
                    columns[c] |= bits::bit(r);
                }
            }
        }
        let repr = Representation::LinearGf2 {
            rows: rows.len(),
            columns: columns.clone(),
        };
        Ok(Self::from_oracle(
            ground,
            Arc::new(BinaryOracle::new(columns)),
            repr,
        ))
    }

    /// Matroid from its family of independent sets. The independence axioms
    /// are checked, and a failing family is rejected with the first witness.
    pub fn explicit(ground: Arc<GroundSet>, family: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut family: Vec<u64> = family.into_iter().collect();
        family.sort_unstable();
        family.dedup();
        if family.iter().any(|&s| s & !ground.full_mask() != 0) {
            return Err(MatroidError::domain(
                "independent set outside the ground set",
            ));
        }
        if let Some(failure) = axioms::independence_failure(&ground, &family) {
            return Err(MatroidError::domain(format!("not a matroid: {failure}")));
        }
        Ok(Self::from_oracle(
            ground,
            Arc::new(ExplicitOracle::new(family)),
            Representation::Explicit,
        ))
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn full_mask(&self) -> u64 {
        self.ground.full_mask()
    }

    /// Independence of a raw mask over this ground set.
    pub fn indep(&self, mask: u64) -> bool {
        self.oracle.is_independent(mask)
    }

    /// Rank of a raw mask over this ground set.
    pub fn rank_of(&self, mask: u64) -> usize {
        self.oracle.rank(mask)
    }

    fn cached(&self) -> (usize, u64) {
        *self.cache.get_or_init(|| {
            let basis = greedy_extend(self, 0, self.full_mask());
            (bits::len(basis), basis)
        })
    }

    /// Rank of the whole ground set.
    pub fn full_rank(&self) -> usize {
        self.cached().0
    }

    /// The greedy basis of `E` in canonical order.
    pub fn canonical_basis_mask(&self) -> u64 {
        self.cached().1
    }

    pub fn set(&self, text: &str) -> Result<ElementSet> {
        ElementSet::parse(&self.ground, text)
    }

    pub fn set_of(&self, mask: u64) -> ElementSet {
        ElementSet::from_mask_unchecked(&self.ground, mask & self.full_mask())
    }

    pub fn empty_set(&self) -> ElementSet {
        ElementSet::empty(&self.ground)
    }

    pub fn full_set(&self) -> ElementSet {
        ElementSet::full(&self.ground)
    }

    pub(crate) fn check(&self, set: &ElementSet) -> Result<u64> {
        if Arc::ptr_eq(set.ground(), &self.ground) || **set.ground() == *self.ground {
            Ok(set.mask())
        } else {
            Err(MatroidError::UniverseMismatch)
        }
    }

    pub fn is_independent(&self, set: &ElementSet) -> Result<bool> {
        Ok(self.indep(self.check(set)?))
    }

    pub fn rank(&self, set: &ElementSet) -> Result<usize> {
        Ok(self.rank_of(self.check(set)?))
    }

    pub fn is_circuit(&self, set: &ElementSet) -> Result<bool> {
        Ok(is_circuit_mask(self, self.check(set)?))
    }

    /// Every subset evaluated identically by both oracles.
    pub fn oracle_equal(&self, other: &Matroid) -> bool {
        self.ground.labels() == other.ground.labels()
            && bits::subsets(self.full_mask()).all(|s| self.indep(s) == other.indep(s))
    }
}

/// A minimal dependent set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Circuit(ElementSet);

impl Circuit {
    pub fn new(matroid: &Matroid, members: ElementSet) -> Result<Self> {
        if matroid.is_circuit(&members)? {
            Ok(Self(members))
        } else {
            Err(MatroidError::domain(format!("{members} is not a circuit")))
        }
    }

    pub(crate) fn from_mask(matroid: &Matroid, mask: u64) -> Self {
        Self(matroid.set_of(mask))
    }

    pub fn members(&self) -> &ElementSet {
        &self.0
    }

    pub fn mask(&self) -> u64 {
        self.0.mask()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Extends independent `start` greedily within `within`, scanning in canonical order.
pub(crate) fn greedy_extend(m: &Matroid, start: u64, within: u64) -> u64 {
    let mut basis = start;
    for i in bits::iter(within & !start) {
        if m.indep(basis | bits::bit(i)) {
            basis |= bits::bit(i);
        }
    }
    basis
}

pub(crate) fn is_circuit_mask(m: &Matroid, mask: u64) -> bool {
    mask != 0 && !m.indep(mask) && bits::iter(mask).all(|i| m.indep(mask & !bits::bit(i)))
}

/// Shrinks a dependent set to a circuit, dropping removable elements in canonical order.
pub(crate) fn circuit_within(m: &Matroid, dependent: u64) -> u64 {
    debug_assert!(!m.indep(dependent));
    let mut c = dependent;
    for i in bits::iter(dependent) {
        if !m.indep(c & !bits::bit(i)) {
            c &= !bits::bit(i);
        }
    }
    c
}

/// A maximal independent `J` with `I ⊆ J ⊆ X`, extended in canonical order.
pub fn extend_to_basis(m: &Matroid, start: &ElementSet, within: &ElementSet) -> Result<ElementSet> {
    let (i, x) = (m.check(start)?, m.check(within)?);
    if i & !x != 0 {
        return Err(MatroidError::domain(format!(
            "{start} is not a subset of {within}"
        )));
    }
    if !m.indep(i) {
        return Err(MatroidError::precondition(format!("{start} is dependent")));
    }
    Ok(m.set_of(greedy_extend(m, i, x)))
}

/// Canonical greedy basis of `M|X`.
pub fn basis_of(m: &Matroid, within: &ElementSet) -> Result<ElementSet> {
    extend_to_basis(m, &m.empty_set(), within)
}

/// Minimal dependent subsets of `within`, in increasing mask order.
pub(crate) fn circuits_in(m: &Matroid, within: u64) -> Vec<u64> {
    // circuits have at most rank + 1 elements
    let max_len = m.rank_of(within) + 1;
    bits::subsets(within)
        .filter(|&s| bits::len(s) <= max_len && is_circuit_mask(m, s))
        .collect()
}

/// All circuits of `M`, each once, in canonical order.
pub fn enumerate_circuits(m: &Matroid, budget: &Budget) -> Result<Vec<Circuit>> {
    MatroidError::check_budget("circuit enumeration", m.len(), budget.circuits)?;
    Ok(circuits_in(m, m.full_mask())
        .into_iter()
        .map(|c| Circuit::from_mask(m, c))
        .collect())
}

pub(crate) fn fundamental_circuit_mask(m: &Matroid, basis: u64, x: usize) -> u64 {
    let with_x = basis | bits::bit(x);
    bits::iter(basis)
        .filter(|&b| m.indep(with_x & !bits::bit(b)))
        .fold(bits::bit(x), |acc, b| acc | bits::bit(b))
}

/// The unique circuit inside `B + x` for a basis `B` and `x ∉ B`.
pub fn fundamental_circuit(m: &Matroid, basis: &ElementSet, x: &str) -> Result<Circuit> {
    let b = m.check(basis)?;
    let xi = m
        .ground()
        .position(x)
        .ok_or_else(|| MatroidError::domain(format!("unknown element {x:?}")))?;
    if !m.indep(b) || bits::len(b) != m.full_rank() {
        return Err(MatroidError::precondition(format!(
            "{basis} is not a basis"
        )));
    }
    if b & bits::bit(xi) != 0 {
        return Err(MatroidError::precondition(format!("{x} lies in the basis")));
    }
    if m.indep(b | bits::bit(xi)) {
        return Err(MatroidError::precondition(format!(
            "{basis} + {x} is independent"
        )));
    }
    let c = fundamental_circuit_mask(m, b, xi);
    if !is_circuit_mask(m, c) {
        return Err(MatroidError::invariant(format!(
            "fundamental circuit of {x} is not a circuit"
        )));
    }
    Ok(Circuit::from_mask(m, c))
}
