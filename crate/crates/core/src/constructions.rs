//! Duality, minors, direct sums and connected components.
//!
//! Derived matroids wrap the oracle of their parent instead of materializing
//! a family, so a minor of a 20-element matroid costs nothing to build.

use std::sync::Arc;

use serde::Serialize;

use crate::config::Budget;
use crate::error::{MatroidError, Result};
use crate::matroid::{
    circuits_in, fundamental_circuit_mask, greedy_extend, is_circuit_mask, Circuit, Derivation,
    Matroid, Representation,
};
use crate::repr::Oracle;
use crate::set::{bits, ElementSet, GroundSet};

struct Dualized {
    parent: Matroid,
}

impl Oracle for Dualized {
    fn is_independent(&self, mask: u64) -> bool {
        let full = self.parent.full_mask();
        self.parent.rank_of(full & !mask) == self.parent.full_rank()
    }

    fn rank(&self, mask: u64) -> usize {
        let full = self.parent.full_mask();
        bits::len(mask) + self.parent.rank_of(full & !mask) - self.parent.full_rank()
    }
}

/// `M|X` with `positions[i]` the parent index of element `i`, after contracting `contracted`.
struct Submatroid {
    parent: Matroid,
    positions: Vec<usize>,
    // a basis of the contracted set, in parent coordinates
    contracted_basis: u64,
}

impl Oracle for Submatroid {
    fn is_independent(&self, mask: u64) -> bool {
        self.parent
            .indep(bits::scatter(mask, &self.positions) | self.contracted_basis)
    }

    fn rank(&self, mask: u64) -> usize {
        self.parent
            .rank_of(bits::scatter(mask, &self.positions) | self.contracted_basis)
            - bits::len(self.contracted_basis)
    }
}

struct Summed {
    // (part, offset into the combined ground set)
    parts: Vec<(Matroid, usize)>,
}

impl Summed {
    fn split(&self, mask: u64) -> impl Iterator<Item = (&Matroid, u64)> + '_ {
        self.parts
            .iter()
            .map(move |(part, offset)| (part, (mask >> offset) & part.full_mask()))
    }
}

impl Oracle for Summed {
    fn is_independent(&self, mask: u64) -> bool {
        self.split(mask).all(|(part, m)| part.indep(m))
    }

    fn rank(&self, mask: u64) -> usize {
        self.split(mask).map(|(part, m)| part.rank_of(m)).sum()
    }
}

/// The dual matroid: `S` is independent iff `E \ S` spans `M`.
pub fn dual(m: &Matroid) -> Matroid {
    Matroid::from_oracle(
        m.ground().clone(),
        Arc::new(Dualized { parent: m.clone() }),
        Representation::Derived(Derivation::Dual),
    )
}

/// Keeps the elements of `keep`, contracting the elements of `contract`; the
/// two masks must be disjoint. Returns the minor and the parent index of each
/// of its elements.
pub(crate) fn minor_masks(m: &Matroid, contract: u64, keep: u64) -> (Matroid, Vec<usize>) {
    debug_assert_eq!(contract & keep, 0);
    let positions: Vec<usize> = bits::iter(keep).collect();
    let ground = GroundSet::new(positions.iter().map(|&i| m.ground().label(i).to_string()))
        .expect("labels of a valid ground set");
    let contracted_basis = greedy_extend(m, 0, contract);
    let derivation = if contract == 0 {
        Derivation::Restriction
    } else {
        Derivation::Contraction
    };
    let minor = Matroid::from_oracle(
        ground,
        Arc::new(Submatroid {
            parent: m.clone(),
            positions: positions.clone(),
            contracted_basis,
        }),
        Representation::Derived(derivation),
    );
    (minor, positions)
}

/// `M|X`.
pub fn restrict(m: &Matroid, keep: &ElementSet) -> Result<Matroid> {
    let keep = m.check(keep)?;
    Ok(minor_masks(m, 0, keep).0)
}

/// `M − D = M|(E \ D)`.
pub fn delete(m: &Matroid, removed: &ElementSet) -> Result<Matroid> {
    let removed = m.check(removed)?;
    Ok(minor_masks(m, 0, m.full_mask() & !removed).0)
}

/// `M/C`: `S` is independent iff `S ∪ B_C` is, where `B_C` is the greedy basis of `C`.
pub fn contract(m: &Matroid, contracted: &ElementSet) -> Result<Matroid> {
    let c = m.check(contracted)?;
    Ok(minor_masks(m, c, m.full_mask() & !c).0)
}

/// A disjoint pair (contract, delete) naming the minor `M/C − D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorSpec {
    pub contract: ElementSet,
    pub delete: ElementSet,
}

impl MinorSpec {
    pub fn new(contract: ElementSet, delete: ElementSet) -> Result<Self> {
        if !contract.same_universe(&delete) {
            return Err(MatroidError::UniverseMismatch);
        }
        if !contract.is_disjoint(&delete) {
            return Err(MatroidError::domain(format!(
                "contract and delete overlap in {}",
                contract.intersection(&delete)
            )));
        }
        Ok(Self { contract, delete })
    }

    /// Ground set of the minor: everything neither contracted nor deleted.
    pub fn remaining(&self) -> ElementSet {
        self.contract.union(&self.delete).complement()
    }
}

/// `M/C − D`.
pub fn take_minor(m: &Matroid, spec: &MinorSpec) -> Result<Matroid> {
    let (c, d) = (m.check(&spec.contract)?, m.check(&spec.delete)?);
    if c & d != 0 {
        return Err(MatroidError::domain("contract and delete overlap"));
    }
    Ok(minor_masks(m, c, m.full_mask() & !(c | d)).0)
}

/// Direct sum; the parts must have pairwise disjoint labels.
pub fn direct_sum(parts: &[Matroid]) -> Result<Matroid> {
    let labels: Vec<String> = parts
        .iter()
        .flat_map(|p| p.ground().labels().iter().cloned())
        .collect();
    let ground = GroundSet::new(labels).map_err(|e| match e {
        MatroidError::Domain(msg) => {
            MatroidError::domain(format!("label collision in direct sum: {msg}"))
        }
        other => other,
    })?;
    let mut offset = 0;
    let parts = parts
        .iter()
        .map(|p| {
            let entry = (p.clone(), offset);
            offset += p.len();
            entry
        })
        .collect();
    Ok(Matroid::from_oracle(
        ground,
        Arc::new(Summed { parts }),
        Representation::Derived(Derivation::DirectSum),
    ))
}

/// Blocks of the common-circuit relation, ordered by their first element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentPartition {
    pub blocks: Vec<ElementSet>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// One block covering a nonempty ground set.
    pub fn is_connected(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn block_of(&self, label: &str) -> Option<&ElementSet> {
        self.blocks.iter().find(|b| b.contains(label))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn join_mask(&mut self, mask: u64) {
        let mut it = bits::iter(mask);
        if let Some(first) = it.next() {
            for i in it {
                let (a, b) = (self.find(first), self.find(i));
                self.0[a] = b;
            }
        }
    }

    fn blocks(&mut self, within: u64) -> Vec<u64> {
        let mut blocks: Vec<u64> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in bits::iter(within) {
            let r = self.find(i);
            match roots.iter().position(|&x| x == r) {
                Some(k) => blocks[k] |= bits::bit(i),
                None => {
                    roots.push(r);
                    blocks.push(bits::bit(i));
                }
            }
        }
        blocks
    }
}

/// Connected components from the enumerated circuits.
///
/// The union-find closure of "lies in a common circuit" is computed and then
/// compared against the relation itself; the relation is transitive, so a
/// closure that adds a pair is reported as an invariant violation.
pub fn components(m: &Matroid, budget: &Budget) -> Result<ComponentPartition> {
    MatroidError::check_budget("components", m.len(), budget.circuits)?;
    let circuits = circuits_in(m, m.full_mask());
    let n = m.len();
    let mut related = vec![0u64; n];
    let mut uf = UnionFind::new(n);
    for &c in &circuits {
        uf.join_mask(c);
        for i in bits::iter(c) {
            related[i] |= c;
        }
    }
    let blocks = uf.blocks(m.full_mask());
    for &block in &blocks {
        for i in bits::iter(block) {
            if bits::len(block) > 1 && related[i] & block != block {
                let missing = block & !related[i];
                let j = bits::iter(missing).next().unwrap_or(i);
                return Err(MatroidError::invariant(format!(
                    "{} and {} are linked through circuits but share none",
                    m.ground().label(i),
                    m.ground().label(j)
                )));
            }
        }
    }
    Ok(ComponentPartition {
        blocks: blocks.into_iter().map(|b| m.set_of(b)).collect(),
    })
}

/// Connected components from the fundamental circuits of the canonical basis.
///
/// Polynomial in the number of elements; agrees with [`components`] (the
/// fundamental circuits of any basis link exactly the elements of a component).
pub fn components_fast(m: &Matroid) -> ComponentPartition {
    ComponentPartition {
        blocks: component_masks(m)
            .into_iter()
            .map(|b| m.set_of(b))
            .collect(),
    }
}

pub(crate) fn component_masks(m: &Matroid) -> Vec<u64> {
    let basis = m.canonical_basis_mask();
    let mut uf = UnionFind::new(m.len());
    for x in bits::iter(m.full_mask() & !basis) {
        uf.join_mask(fundamental_circuit_mask(m, basis, x));
    }
    uf.blocks(m.full_mask())
}

/// Whether `s` (disjoint from `contracted`) is a circuit of `M/contracted`.
pub(crate) fn is_circuit_after_contracting(m: &Matroid, contracted: u64, s: u64) -> bool {
    if s == 0 || s & contracted != 0 {
        return false;
    }
    let base = m.rank_of(contracted);
    let r = |t: u64| m.rank_of(t | contracted) - base;
    r(s) < bits::len(s) && bits::iter(s).all(|i| r(s & !bits::bit(i)) == bits::len(s) - 1)
}

/// First `X' ⊆ X` (mask order) making `C ∪ X'` a circuit of `M`.
pub(crate) fn lift_mask(m: &Matroid, x: u64, c: u64) -> Option<u64> {
    bits::subsets(x).find(|&xp| is_circuit_mask(m, c | xp))
}

/// Lifts a circuit `C` of `M/X` to a circuit `C ∪ X'` of `M` with `X' ⊆ X`.
///
/// `C` is given over the ground set of `M`. The first `X'` in canonical
/// subset order is returned.
pub fn lift_circuit(
    m: &Matroid,
    contracted: &ElementSet,
    c: &ElementSet,
    budget: &Budget,
) -> Result<Circuit> {
    let (x, cm) = (m.check(contracted)?, m.check(c)?);
    if !is_circuit_after_contracting(m, x, cm) {
        return Err(MatroidError::precondition(format!(
            "{c} is not a circuit of M/{contracted}"
        )));
    }
    MatroidError::check_budget("circuit lifting", bits::len(x), budget.search)?;
    lift_mask(m, x, cm)
        .map(|xp| Circuit::from_mask(m, cm | xp))
        .ok_or_else(|| MatroidError::invariant(format!("no lift of {c} through {contracted}")))
}
