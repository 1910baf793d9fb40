//! The connectivity function.
//!
//! `κ(X)` is the number of elements that must be removed from the union of a
//! basis of `M|X` and a basis of `M − X` to make it independent. On finite
//! matroids this equals `r(X) + r(E∖X) − r(E)`; both routes are exposed and
//! checked against each other. `κ(X, Y)` minimizes `κ(U)` over
//! `X ⊆ U ⊆ E∖Y`.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::config::Budget;
use crate::error::{MatroidError, Result};
use crate::matroid::{circuit_within, greedy_extend, Matroid};
use crate::set::{bits, ElementSet};

/// A connectivity value: a natural number or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnValue {
    Finite(usize),
    Infinite,
}

impl ConnValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }
}

impl Ord for ConnValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.cmp(b),
            (Self::Finite(_), Self::Infinite) => Ordering::Less,
            (Self::Infinite, Self::Finite(_)) => Ordering::Greater,
            (Self::Infinite, Self::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ConnValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ConnValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for ConnValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => serializer.serialize_u64(*v as u64),
            Self::Infinite => serializer.serialize_str("infinite"),
        }
    }
}

fn removals_to_independence(m: &Matroid, mut s: u64) -> usize {
    // removing an element of a circuit keeps the closure, so this ends at a basis of s
    let mut removed = 0;
    while !m.indep(s) {
        let c = circuit_within(m, s);
        let last = 63 - c.leading_zeros() as usize;
        s &= !bits::bit(last);
        removed += 1;
    }
    removed
}

/// `del(I, J)`: the fewest elements whose removal makes `I ∪ J` independent.
pub fn del(m: &Matroid, i: &ElementSet, j: &ElementSet) -> Result<ConnValue> {
    let (im, jm) = (m.check(i)?, m.check(j)?);
    if !m.indep(im) {
        return Err(MatroidError::precondition(format!("{i} is dependent")));
    }
    if !m.indep(jm) {
        return Err(MatroidError::precondition(format!("{j} is dependent")));
    }
    Ok(ConnValue::Finite(removals_to_independence(m, im | jm)))
}

/// `del(I, J)` by minimizing over every removal set. Exponential in `|I ∪ J|`.
pub fn del_exhaustive(
    m: &Matroid,
    i: &ElementSet,
    j: &ElementSet,
    budget: &Budget,
) -> Result<ConnValue> {
    let (im, jm) = (m.check(i)?, m.check(j)?);
    if !m.indep(im) || !m.indep(jm) {
        return Err(MatroidError::precondition("del needs independent sets"));
    }
    let s = im | jm;
    MatroidError::check_budget("exhaustive del", bits::len(s), budget.search)?;
    let best = bits::subsets(s)
        .filter(|&f| m.indep(s & !f))
        .map(bits::len)
        .min()
        .expect("removing everything leaves the empty set");
    Ok(ConnValue::Finite(best))
}

pub(crate) fn kappa_mask(m: &Matroid, x: u64) -> usize {
    let full = m.full_mask();
    m.rank_of(x) + m.rank_of(full & !x) - m.full_rank()
}

/// `κ(X)` as `del` of the canonical greedy bases of `M|X` and `M − X`.
pub fn kappa(m: &Matroid, x: &ElementSet) -> Result<ConnValue> {
    let xm = m.check(x)?;
    let bx = greedy_extend(m, 0, xm);
    let by = greedy_extend(m, 0, m.full_mask() & !xm);
    Ok(ConnValue::Finite(removals_to_independence(m, bx | by)))
}

/// `κ(X)` from explicitly chosen bases of `M|X` and `M − X`.
pub fn kappa_with_bases(
    m: &Matroid,
    x: &ElementSet,
    bx: &ElementSet,
    by: &ElementSet,
) -> Result<ConnValue> {
    let (xm, bxm, bym) = (m.check(x)?, m.check(bx)?, m.check(by)?);
    let ym = m.full_mask() & !xm;
    let is_basis_of =
        |b: u64, within: u64| b & !within == 0 && m.indep(b) && bits::len(b) == m.rank_of(within);
    if !is_basis_of(bxm, xm) {
        return Err(MatroidError::precondition(format!(
            "{bx} is not a basis of M|{x}"
        )));
    }
    if !is_basis_of(bym, ym) {
        return Err(MatroidError::precondition(format!(
            "{by} is not a basis of M-{x}"
        )));
    }
    del(m, bx, by)
}

/// A basis of `M|X` built greedily along a random order.
pub fn random_basis<R: Rng + ?Sized>(
    m: &Matroid,
    within: &ElementSet,
    rng: &mut R,
) -> Result<ElementSet> {
    let w = m.check(within)?;
    let mut order: Vec<usize> = bits::iter(w).collect();
    order.shuffle(rng);
    let mut basis = 0;
    for i in order {
        if m.indep(basis | bits::bit(i)) {
            basis |= bits::bit(i);
        }
    }
    Ok(m.set_of(basis))
}

/// `r(X) + r(E∖X) − r(E)`.
pub fn kappa_rank_formula(m: &Matroid, x: &ElementSet) -> Result<usize> {
    Ok(kappa_mask(m, m.check(x)?))
}

/// Whether the rank formula and the `del` definition agree on `X`.
pub fn kappa_finite_equivalence(m: &Matroid, x: &ElementSet) -> Result<bool> {
    Ok(kappa(m, x)? == ConnValue::Finite(kappa_rank_formula(m, x)?))
}

/// Result of [`kappa_between`]: the value and the first minimizing `U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaBetween {
    pub value: ConnValue,
    pub witness: ElementSet,
}

struct BranchAndBound<'a> {
    m: &'a Matroid,
    // free elements, highest index first, so leaves come in increasing mask order
    free: Vec<usize>,
    rank_e: usize,
    floor: usize,
    best: usize,
    best_u: u64,
}

impl BranchAndBound<'_> {
    // u: current side containing X, bu/bw: bases of the two sides so far
    fn search(&mut self, depth: usize, u: u64, bu: u64, bw: u64) -> bool {
        // ranks only grow as the sides fill up
        let bound = (bits::len(bu) + bits::len(bw)).saturating_sub(self.rank_e);
        if bound >= self.best {
            return false;
        }
        let Some(&e) = self.free.get(depth) else {
            self.best = bound;
            self.best_u = u;
            return self.best <= self.floor;
        };
        let bit = bits::bit(e);
        let bw_next = if self.m.indep(bw | bit) { bw | bit } else { bw };
        if self.search(depth + 1, u, bu, bw_next) {
            return true;
        }
        let bu_next = if self.m.indep(bu | bit) { bu | bit } else { bu };
        self.search(depth + 1, u | bit, bu_next, bw)
    }
}

fn exhaustive_mask(m: &Matroid, x: u64, y: u64, budget: &Budget) -> Result<(usize, u64)> {
    let free_mask = m.full_mask() & !(x | y);
    MatroidError::check_budget("kappa-between scan", bits::len(free_mask), budget.search)?;
    let mut free: Vec<usize> = bits::iter(free_mask).collect();
    free.reverse();
    // κ_{M|(X∪Y)}(X) bounds κ(X, Y) from below
    let floor = m.rank_of(x) + m.rank_of(y) - m.rank_of(x | y);
    let mut search = BranchAndBound {
        m,
        free,
        rank_e: m.full_rank(),
        floor,
        best: usize::MAX,
        best_u: x,
    };
    search.search(0, x, greedy_extend(m, 0, x), greedy_extend(m, 0, y));
    Ok((search.best, search.best_u))
}

/// Largest common independent set `I` of `M1 = M/X∖Y` and `M2 = M/Y∖X`, by
/// shortest augmenting paths in the exchange graph.
fn max_common_independent(m: &Matroid, x: u64, y: u64) -> Exchange<'_> {
    let z = m.full_mask() & !(x | y);
    let mut g = Exchange {
        m,
        z,
        bx: greedy_extend(m, 0, x),
        by: greedy_extend(m, 0, y),
        i: 0,
    };
    while let Some(path) = g.augmenting_path() {
        g.i ^= path;
    }
    g
}

struct Exchange<'a> {
    m: &'a Matroid,
    z: u64,
    bx: u64,
    by: u64,
    i: u64,
}

impl Exchange<'_> {
    fn ind1(&self, s: u64) -> bool {
        self.m.indep(s | self.bx)
    }

    fn ind2(&self, s: u64) -> bool {
        self.m.indep(s | self.by)
    }

    // arcs x → y for I − x + y ∈ M1 and y → x for I − x + y ∈ M2 (x ∈ I, y ∉ I)
    fn arc(&self, from: usize, to: usize) -> bool {
        let (fb, tb) = (bits::bit(from), bits::bit(to));
        if self.i & fb != 0 {
            self.ind1((self.i & !fb) | tb)
        } else {
            self.ind2((self.i & !tb) | fb)
        }
    }

    fn sources(&self) -> u64 {
        bits::iter(self.z & !self.i)
            .filter(|&e| self.ind1(self.i | bits::bit(e)))
            .fold(0, |a, e| a | bits::bit(e))
    }

    fn sinks(&self) -> u64 {
        bits::iter(self.z & !self.i)
            .filter(|&e| self.ind2(self.i | bits::bit(e)))
            .fold(0, |a, e| a | bits::bit(e))
    }

    fn neighbours(&self, v: usize, unseen: u64, forward: bool) -> Vec<usize> {
        // arcs alternate between I and its complement
        let side = if self.i & bits::bit(v) != 0 {
            self.z & !self.i
        } else {
            self.i
        };
        bits::iter(side & unseen)
            .filter(|&u| {
                if forward {
                    self.arc(v, u)
                } else {
                    self.arc(u, v)
                }
            })
            .collect()
    }

    fn augmenting_path(&self) -> Option<u64> {
        let sinks = self.sinks();
        let mut parent = [usize::MAX; 64];
        let mut seen = self.sources();
        let mut queue: VecDeque<usize> = bits::iter(seen).collect();
        while let Some(v) = queue.pop_front() {
            if sinks & bits::bit(v) != 0 {
                let mut path = bits::bit(v);
                let mut v = v;
                while parent[v] != usize::MAX {
                    v = parent[v];
                    path |= bits::bit(v);
                }
                return Some(path);
            }
            for u in self.neighbours(v, !seen, true) {
                seen |= bits::bit(u);
                parent[u] = v;
                queue.push_back(u);
            }
        }
        None
    }

    /// Elements with a path to a sink.
    fn reaching_sinks(&self) -> u64 {
        let mut seen = self.sinks();
        let mut queue: VecDeque<usize> = bits::iter(seen).collect();
        while let Some(v) = queue.pop_front() {
            for u in self.neighbours(v, !seen, false) {
                seen |= bits::bit(u);
                queue.push_back(u);
            }
        }
        seen
    }
}

pub(crate) fn kappa_between_mask(m: &Matroid, x: u64, y: u64) -> (usize, u64) {
    let g = max_common_independent(m, x, y);
    let value = bits::len(g.i) + m.rank_of(x) + m.rank_of(y) - m.full_rank();
    // no arc enters the set of elements reaching a sink from outside it, so
    // every minimizer contains that set, and the set is itself a minimizer
    (value, x | g.reaching_sinks())
}

fn check_pair(m: &Matroid, x: &ElementSet, y: &ElementSet) -> Result<(u64, u64)> {
    let (xm, ym) = (m.check(x)?, m.check(y)?);
    if xm & ym != 0 {
        return Err(MatroidError::domain(format!(
            "{x} and {y} are not disjoint"
        )));
    }
    Ok((xm, ym))
}

/// `κ(X, Y) = min{κ(U) : X ⊆ U ⊆ E∖Y}`, exactly, by matroid intersection.
///
/// The witness is the least minimizer, which is also the first in canonical
/// subset order.
pub fn kappa_between(m: &Matroid, x: &ElementSet, y: &ElementSet) -> Result<KappaBetween> {
    let (xm, ym) = check_pair(m, x, y)?;
    let (value, u) = kappa_between_mask(m, xm, ym);
    Ok(KappaBetween {
        value: ConnValue::Finite(value),
        witness: m.set_of(u),
    })
}

/// [`kappa_between`] by branch-and-bound over every `U`, for at most
/// `budget.search` free elements.
pub fn kappa_between_exhaustive(
    m: &Matroid,
    x: &ElementSet,
    y: &ElementSet,
    budget: &Budget,
) -> Result<KappaBetween> {
    let (xm, ym) = check_pair(m, x, y)?;
    let (value, u) = exhaustive_mask(m, xm, ym, budget)?;
    Ok(KappaBetween {
        value: ConnValue::Finite(value),
        witness: m.set_of(u),
    })
}

/// A partition `(X, E∖X)` with its connectivity.
///
/// `order` is the least `k` for which this is a k-separation
/// (`κ ≤ k − 1` and both sides have at least `k` elements), if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub left: ElementSet,
    pub right: ElementSet,
    pub kappa: ConnValue,
    pub order: Option<usize>,
}

impl Separation {
    pub fn new(m: &Matroid, left: &ElementSet) -> Result<Self> {
        let xm = m.check(left)?;
        Ok(Self::from_mask(m, xm))
    }

    fn from_mask(m: &Matroid, x: u64) -> Self {
        let k = kappa_mask(m, x);
        let left = m.set_of(x);
        let right = left.complement();
        let order = (k < left.len().min(right.len())).then_some(k + 1);
        Self {
            left,
            right,
            kappa: ConnValue::Finite(k),
            order,
        }
    }

    /// Whether `(left, right)` is a k-separation.
    pub fn is_k_separation(&self, k: usize) -> bool {
        self.kappa < ConnValue::Finite(k) && self.left.len() >= k && self.right.len() >= k
    }
}

/// The first `X` (canonical order) giving an ℓ-separation with `ℓ ≤ k`.
pub fn find_separation(m: &Matroid, k: usize, budget: &Budget) -> Result<Option<Separation>> {
    if k == 0 {
        return Ok(None);
    }
    MatroidError::check_budget("separation scan", m.len(), budget.search)?;
    let full = m.full_mask();
    let n = m.len();
    Ok(bits::subsets(full)
        .filter(|&x| {
            let size = bits::len(x);
            size >= 1 && n - size >= 1
        })
        .find(|&x| {
            let smaller = bits::len(x).min(n - bits::len(x));
            kappa_mask(m, x) < k.min(smaller)
        })
        .map(|x| Separation::from_mask(m, x)))
}

/// No ℓ-separation exists for any `ℓ < k`.
pub fn is_k_connected(m: &Matroid, k: usize, budget: &Budget) -> Result<bool> {
    if k <= 1 {
        return Ok(true);
    }
    Ok(find_separation(m, k - 1, budget)?.is_none())
}

/// Finds `x ∈ X∖X'` and `y ∈ Y∖Y'` with `κ(X'+x, Y'+y) = k`, given `κ(X', Y') = k − 1`.
///
/// Returns `None` exactly when `κ(X, Y) < k`; otherwise the first pair in
/// canonical order.
pub fn grow_pair(
    m: &Matroid,
    sides: (&ElementSet, &ElementSet),
    inner: (&ElementSet, &ElementSet),
    k: usize,
) -> Result<Option<(String, String)>> {
    let (x, y) = (m.check(sides.0)?, m.check(sides.1)?);
    let (xp, yp) = (m.check(inner.0)?, m.check(inner.1)?);
    if x & y != 0 {
        return Err(MatroidError::domain("X and Y are not disjoint"));
    }
    if xp & !x != 0 || yp & !y != 0 {
        return Err(MatroidError::precondition(
            "X' and Y' must lie inside X and Y",
        ));
    }
    if k == 0 {
        return Err(MatroidError::precondition("k must be positive"));
    }
    let (current, _) = kappa_between_mask(m, xp, yp);
    if current != k - 1 {
        return Err(MatroidError::precondition(format!(
            "kappa(X', Y') = {current}, expected {}",
            k - 1
        )));
    }
    Ok(grow_pair_mask(m, x, y, xp, yp, k)?.map(|(a, b)| {
        (
            m.ground().label(a).to_string(),
            m.ground().label(b).to_string(),
        )
    }))
}

pub(crate) fn grow_pair_mask(
    m: &Matroid,
    x: u64,
    y: u64,
    xp: u64,
    yp: u64,
    k: usize,
) -> Result<Option<(usize, usize)>> {
    if kappa_between_mask(m, x, y).0 < k {
        return Ok(None);
    }
    for a in bits::iter(x & !xp) {
        for b in bits::iter(y & !yp) {
            let (value, _) = kappa_between_mask(m, xp | bits::bit(a), yp | bits::bit(b));
            if value == k {
                return Ok(Some((a, b)));
            }
        }
    }
    Err(MatroidError::invariant(
        "kappa(X, Y) >= k but no growing pair exists",
    ))
}
