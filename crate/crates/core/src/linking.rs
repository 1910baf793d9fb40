//! Tutte's linking theorem.
//!
//! For disjoint `X, Y` there is a partition `(C, D)` of `E ∖ (X ∪ Y)` with
//! `κ_{M/C−D}(X, Y) = κ_M(X, Y)`. [`linking_partition`] finds one by
//! exhaustive scan. [`constructive_linking`] follows the finitary proof:
//! grow `X′, Y′` of size `k`, build restrictions `Z_1 ⊆ … ⊆ Z_k` with
//! `κ_{M|Z_t}(X′, Y′) ≥ t` using [`breaking_circuits`], then solve `M|Z_k`
//! and delete everything else. [`infinite_kappa_chain`] is the circuit
//! chain used when the connectivity is infinite.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::Budget;
use crate::connectivity::{grow_pair_mask, kappa_between_mask, ConnValue, Separation};
use crate::constructions::{
    component_masks, is_circuit_after_contracting, minor_masks, take_minor, MinorSpec,
};
use crate::error::{MatroidError, Result};
use crate::matroid::{is_circuit_mask, Circuit, Matroid};
use crate::set::{bits, ElementSet};

/// One step of the constructive procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub stage: String,
    pub sets: BTreeMap<String, ElementSet>,
    pub kappa: Option<ConnValue>,
}

impl TraceEntry {
    fn new(
        stage: impl Into<String>,
        m: &Matroid,
        sets: &[(&str, u64)],
        kappa: Option<usize>,
    ) -> Self {
        Self {
            stage: stage.into(),
            sets: sets
                .iter()
                .map(|&(name, mask)| (name.to_string(), m.set_of(mask)))
                .collect(),
            kappa: kappa.map(ConnValue::Finite),
        }
    }
}

/// A linking partition and how it was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkingResult {
    pub spec: MinorSpec,
    pub achieved: ConnValue,
    pub target: ConnValue,
    pub trace: Vec<TraceEntry>,
}

fn check_disjoint(m: &Matroid, x: &ElementSet, y: &ElementSet) -> Result<(u64, u64)> {
    let (xm, ym) = (m.check(x)?, m.check(y)?);
    if xm & ym != 0 {
        return Err(MatroidError::domain(format!(
            "{x} and {y} are not disjoint"
        )));
    }
    Ok((xm, ym))
}

/// `κ_{M/C−D}(X, Y)` where `D` is everything outside `X ∪ Y ∪ C`.
fn minor_kappa(m: &Matroid, c: u64, x: u64, y: u64) -> usize {
    m.rank_of(x | c) + m.rank_of(y | c) - m.rank_of(c) - m.rank_of(x | y | c)
}

/// `κ_{M|Z}(X, Y)`.
fn kappa_between_within(m: &Matroid, z: u64, x: u64, y: u64) -> usize {
    let (restricted, positions) = minor_masks(m, 0, z);
    let gather = |s| bits::gather(s, &positions);
    kappa_between_mask(&restricted, gather(x), gather(y)).0
}

/// Recomputes `κ_{M/C−D}(X, Y)` on the materialized minor.
fn verify_minor(m: &Matroid, spec: &MinorSpec, x: u64, y: u64) -> Result<ConnValue> {
    let minor = take_minor(m, spec)?;
    let translate = |s: u64| m.set_of(s).to_ground(minor.ground());
    let (xs, ys) = (translate(x)?, translate(y)?);
    let (value, _) = kappa_between_mask(&minor, xs.mask(), ys.mask());
    Ok(ConnValue::Finite(value))
}

pub(crate) fn linking_partition_mask(
    m: &Matroid,
    x: u64,
    y: u64,
    budget: &Budget,
) -> Result<(u64, usize)> {
    let free = m.full_mask() & !(x | y);
    MatroidError::check_budget("linking partition scan", bits::len(free), budget.search)?;
    let (k, _) = kappa_between_mask(m, x, y);
    bits::subsets(free)
        .find(|&c| minor_kappa(m, c, x, y) == k)
        .map(|c| (c, k))
        .ok_or_else(|| MatroidError::invariant("no partition attains kappa(X, Y)"))
}

/// The first partition `(C, D)` (binary order, bit set = contract) with
/// `κ_{M/C−D}(X, Y) = κ_M(X, Y)`.
pub fn linking_partition(
    m: &Matroid,
    x: &ElementSet,
    y: &ElementSet,
    budget: &Budget,
) -> Result<LinkingResult> {
    let (xm, ym) = check_disjoint(m, x, y)?;
    let (c, k) = linking_partition_mask(m, xm, ym, budget)?;
    let d = m.full_mask() & !(xm | ym | c);
    let spec = MinorSpec::new(m.set_of(c), m.set_of(d))?;
    let achieved = verify_minor(m, &spec, xm, ym)?;
    if achieved != ConnValue::Finite(k) {
        return Err(MatroidError::invariant(format!(
            "partition achieves {achieved}, expected {k}"
        )));
    }
    Ok(LinkingResult {
        spec,
        achieved,
        target: ConnValue::Finite(k),
        trace: Vec::new(),
    })
}

/// The first k-separation `(U, E∖U)` of `M` with `X ⊆ U` and `Y ⊆ E∖U`,
/// found by scanning every such `U`.
pub fn extending_separation(
    m: &Matroid,
    x: &ElementSet,
    y: &ElementSet,
    k: usize,
    budget: &Budget,
) -> Result<Option<Separation>> {
    let (xm, ym) = check_disjoint(m, x, y)?;
    let free = m.full_mask() & !(xm | ym);
    MatroidError::check_budget("separation scan", bits::len(free), budget.search)?;
    Ok(bits::subsets(free)
        .map(|s| Separation::new(m, &m.set_of(xm | s)).expect("same ground"))
        .find(|sep| sep.is_k_separation(k)))
}

/// Components of `M/X` containing no element of `Y`.
fn components_avoiding(m: &Matroid, x: u64, y: u64) -> Vec<u64> {
    let (contracted, positions) = minor_masks(m, x, m.full_mask() & !x);
    component_masks(&contracted)
        .into_iter()
        .map(|block| bits::scatter(block, &positions))
        .filter(|block| block & y == 0)
        .collect()
}

/// A circuit `C` through `e` meeting `Y` such that `C ∖ X` is a circuit of
/// `M/X` and `C ∖ (X ∪ Y)` is a circuit of `M/(X ∪ Y)`. The first one by
/// (`C ∖ (X ∪ Y)`, `C ∩ (X ∪ Y)`) in canonical order.
fn anchored_circuit(m: &Matroid, x: u64, y: u64, e: usize) -> Option<u64> {
    let xy = x | y;
    let free = m.full_mask() & !xy & !bits::bit(e);
    let max_len = m.rank_of(m.full_mask()) - m.rank_of(xy) + 1;
    bits::subsets(free)
        .map(|s| s | bits::bit(e))
        .filter(|&s| bits::len(s) <= max_len && is_circuit_after_contracting(m, xy, s))
        .find_map(|s| {
            bits::subsets(xy).map(|a| s | a).find(|&c| {
                c & y != 0 && is_circuit_mask(m, c) && is_circuit_after_contracting(m, x, c & !x)
            })
        })
}

/// Checks that the only k-separations of `M|(X ∪ Y ∪ C)` extending `(X, Y)`
/// put all of `C ∖ (X ∪ Y)` on one side.
fn check_one_sided(m: &Matroid, x: u64, y: u64, k: usize, c: u64) -> Result<()> {
    let z = x | y | c;
    let rest = c & !(x | y);
    let rz = m.rank_of(z);
    for part in bits::subsets(rest) {
        let u = x | part;
        let kappa = m.rank_of(u) + m.rank_of(z & !u) - rz;
        if kappa < k && part != 0 && part != rest {
            return Err(MatroidError::invariant(format!(
                "circuit {} is split by a {k}-separation",
                m.set_of(c)
            )));
        }
    }
    Ok(())
}

pub(crate) fn breaking_mask(
    m: &Matroid,
    x: u64,
    y: u64,
    k: usize,
    budget: &Budget,
) -> Result<(u64, u64)> {
    if x & y != 0 {
        return Err(MatroidError::domain("X and Y are not disjoint"));
    }
    if k == 0 || bits::len(x) < k || bits::len(y) < k {
        return Err(MatroidError::precondition(format!(
            "(X, Y) is not a {k}-separation"
        )));
    }
    MatroidError::check_budget("breaking circuits", m.len(), budget.search)?;
    let restricted = m.rank_of(x) + m.rank_of(y) - m.rank_of(x | y);
    if restricted != k - 1 {
        return Err(MatroidError::precondition(format!(
            "(X, Y) is not an exact {k}-separation of M|(X u Y): kappa = {restricted}"
        )));
    }
    if kappa_between_mask(m, x, y).0 < k {
        return Err(MatroidError::precondition(format!(
            "(X, Y) extends to a {k}-separation of M"
        )));
    }

    let comp_x = components_avoiding(m, x, y);
    let comp_y = components_avoiding(m, y, x);
    for a in &comp_x {
        for b in &comp_y {
            if a & b != 0 && a != b {
                return Err(MatroidError::invariant(format!(
                    "components {} of M/X and {} of M/Y overlap",
                    m.set_of(*a),
                    m.set_of(*b)
                )));
            }
        }
    }
    let covered = comp_x.iter().chain(&comp_y).fold(x | y, |acc, b| acc | b);
    let e = bits::iter(m.full_mask() & !covered).next().ok_or_else(|| {
        MatroidError::invariant("components cover E although (X, Y) does not extend")
    })?;

    let c1 = anchored_circuit(m, x, y, e).ok_or_else(|| {
        MatroidError::invariant(format!(
            "no circuit through {} meeting Y",
            m.ground().label(e)
        ))
    })?;
    let c2 = anchored_circuit(m, y, x, e).ok_or_else(|| {
        MatroidError::invariant(format!(
            "no circuit through {} meeting X",
            m.ground().label(e)
        ))
    })?;
    check_one_sided(m, x, y, k, c1)?;
    check_one_sided(m, x, y, k, c2)?;

    let z = x | y | c1 | c2;
    if kappa_between_within(m, z, x, y) < k {
        return Err(MatroidError::invariant(format!(
            "(X, Y) still extends to a {k}-separation of M|{}",
            m.set_of(z)
        )));
    }
    Ok((c1, c2))
}

/// Two circuits `C_1, C_2` such that the exact k-separation `(X, Y)` of
/// `M|(X ∪ Y)` no longer extends to a k-separation of `M|(X ∪ Y ∪ C_1 ∪ C_2)`.
///
/// `(X, Y)` must not extend to a k-separation of `M`. Both circuits pass
/// through the first element outside `X ∪ Y` and the components of `M/X`
/// avoiding `Y` and of `M/Y` avoiding `X`; `C_1` meets `Y` and `C_2` meets `X`.
pub fn breaking_circuits(
    m: &Matroid,
    x: &ElementSet,
    y: &ElementSet,
    k: usize,
    budget: &Budget,
) -> Result<(Circuit, Circuit)> {
    let (xm, ym) = check_disjoint(m, x, y)?;
    let (c1, c2) = breaking_mask(m, xm, ym, k, budget)?;
    Ok((Circuit::from_mask(m, c1), Circuit::from_mask(m, c2)))
}

/// Whether `x` and `y` share a component of `M|s`.
fn linked_in(m: &Matroid, s: u64, x: usize, y: usize) -> bool {
    let (restricted, positions) = minor_masks(m, 0, s);
    let (gx, gy) = (
        bits::gather(bits::bit(x), &positions),
        bits::gather(bits::bit(y), &positions),
    );
    component_masks(&restricted)
        .iter()
        .any(|block| block & gx != 0 && block & gy != 0)
}

/// A circuit of `M` meeting both `a` and `b`: the first linked pair
/// `(x, y) ∈ a × b`, then everything not needed to keep them linked is dropped,
/// elements of `a ∪ b` first and each group in canonical order.
fn circuit_meeting(m: &Matroid, a: u64, b: u64) -> Option<u64> {
    let full = m.full_mask();
    let (x, y) = bits::iter(a)
        .flat_map(|x| bits::iter(b).map(move |y| (x, y)))
        .find(|&(x, y)| x != y && linked_in(m, full, x, y))?;
    let keep = bits::bit(x) | bits::bit(y);
    let mut s = full;
    let order = bits::iter((a | b) & !keep).chain(bits::iter(full & !(a | b | keep)));
    for z in order {
        if linked_in(m, s & !bits::bit(z), x, y) {
            s &= !bits::bit(z);
        }
    }
    debug_assert!(is_circuit_mask(m, s));
    Some(s)
}

/// Runs the finite-connectivity construction and returns the partition of
/// `E ∖ (X ∪ Y)` with its trace.
pub fn constructive_linking(
    m: &Matroid,
    x: &ElementSet,
    y: &ElementSet,
    budget: &Budget,
) -> Result<LinkingResult> {
    let (xm, ym) = check_disjoint(m, x, y)?;
    let full = m.full_mask();
    let (k, _) = kappa_between_mask(m, xm, ym);
    let mut trace = Vec::new();

    let (mut xp, mut yp) = (0u64, 0u64);
    for t in 1..=k {
        let (a, b) = grow_pair_mask(m, xm, ym, xp, yp, t)?.ok_or_else(|| {
            MatroidError::invariant(format!("kappa(X, Y) = {k} but growth stopped at {t}"))
        })?;
        xp |= bits::bit(a);
        yp |= bits::bit(b);
        trace.push(TraceEntry::new(
            "grow",
            m,
            &[("X'", xp), ("Y'", yp)],
            Some(t),
        ));
    }

    let mut z = xp | yp;
    if k >= 1 {
        let a = circuit_meeting(m, xp, yp)
            .ok_or_else(|| MatroidError::invariant("no circuit meets both X' and Y'"))?;
        z |= a;
        let reached = kappa_between_within(m, z, xp, yp);
        if reached < 1 {
            return Err(MatroidError::invariant("kappa_{M|Z_1}(X', Y') = 0"));
        }
        trace.push(TraceEntry::new(
            "Z_1",
            m,
            &[("A", a), ("Z", z)],
            Some(reached),
        ));
    }
    for t in 2..=k {
        let rz = m.rank_of(z);
        let free = z & !(xp | yp);
        MatroidError::check_budget("separation scan", bits::len(free), budget.search)?;
        let separations: Vec<u64> = bits::subsets(free)
            .map(|s| xp | s)
            .filter(|&l| m.rank_of(l) + m.rank_of(z & !l) - rz < t)
            .collect();
        let mut grown = z;
        for l in separations {
            let r = z & !l;
            let (c1, c2) = breaking_mask(m, l, r, t, budget)?;
            grown |= c1 | c2;
            trace.push(TraceEntry::new(
                "break",
                m,
                &[("L", l), ("R", r), ("C_1", c1), ("C_2", c2)],
                Some(t - 1),
            ));
        }
        z = grown;
        let reached = kappa_between_within(m, z, xp, yp);
        if reached < t {
            return Err(MatroidError::invariant(format!(
                "kappa_{{M|Z_{t}}}(X', Y') = {reached} < {t}"
            )));
        }
        trace.push(TraceEntry::new(
            format!("Z_{t}"),
            m,
            &[("Z", z)],
            Some(reached),
        ));
    }

    let (restricted, positions) = minor_masks(m, 0, z);
    let gather = |s| bits::gather(s, &positions);
    let (c_local, solved) = linking_partition_mask(&restricted, gather(xp), gather(yp), budget)?;
    if solved != k {
        return Err(MatroidError::invariant(format!(
            "kappa_{{M|Z_k}}(X', Y') = {solved}, expected {k}"
        )));
    }
    let c_prime = bits::scatter(c_local, &positions);
    let d_prime = full & !(xp | yp | c_prime);
    trace.push(TraceEntry::new(
        "partition",
        m,
        &[("C'", c_prime), ("D'", d_prime)],
        Some(solved),
    ));

    let c = c_prime & !(xm | ym);
    let d = d_prime & !(xm | ym);
    let spec = MinorSpec::new(m.set_of(c), m.set_of(d))?;
    let achieved = verify_minor(m, &spec, xm, ym)?;
    if achieved != ConnValue::Finite(k) {
        return Err(MatroidError::invariant(format!(
            "partition achieves {achieved}, expected {k}"
        )));
    }
    trace.push(TraceEntry::new("result", m, &[("C", c), ("D", d)], Some(k)));
    Ok(LinkingResult {
        spec,
        achieved,
        target: ConnValue::Finite(k),
        trace,
    })
}

/// Disjoint circuits `C_1, …, C_t`, each `C_{i+1}` a circuit of
/// `W/(C_1 ∪ … ∪ C_i)` meeting what is left of `X` and `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaChain {
    pub circuits: Vec<ElementSet>,
    pub c_x: ElementSet,
    pub c_y: ElementSet,
    pub c: ElementSet,
    pub c_x_independent: bool,
    pub c_y_independent: bool,
}

/// Builds the circuit chain of length `t_max` inside the window `W`.
pub fn infinite_kappa_chain(
    w: &Matroid,
    x: &ElementSet,
    y: &ElementSet,
    t_max: usize,
) -> Result<KappaChain> {
    let (xm, ym) = check_disjoint(w, x, y)?;
    let (k, _) = kappa_between_mask(w, xm, ym);
    if k < t_max {
        return Err(MatroidError::precondition(format!(
            "kappa(X, Y) = {k} < {t_max}"
        )));
    }
    let full = w.full_mask();
    let mut used = 0u64;
    let mut circuits = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let (minor, positions) = minor_masks(w, used, full & !used);
        let gather = |s| bits::gather(s, &positions);
        let local =
            circuit_meeting(&minor, gather(xm & !used), gather(ym & !used)).ok_or_else(|| {
                MatroidError::precondition(format!("chain stalls at circuit {t}: window too small"))
            })?;
        let circuit = bits::scatter(local, &positions);
        circuits.push(w.set_of(circuit));
        used |= circuit;
    }
    let (c_x, c_y, c) = (used & xm, used & ym, used & !(xm | ym));
    let independent_over_c = |s: u64| w.rank_of(s | c) - w.rank_of(c) == bits::len(s);
    let (c_x_independent, c_y_independent) = (independent_over_c(c_x), independent_over_c(c_y));
    if !c_x_independent || !c_y_independent {
        return Err(MatroidError::invariant("C_X or C_Y is dependent in W/C"));
    }
    Ok(KappaChain {
        circuits,
        c_x: w.set_of(c_x),
        c_y: w.set_of(c_y),
        c: w.set_of(c),
        c_x_independent,
        c_y_independent,
    })
}
