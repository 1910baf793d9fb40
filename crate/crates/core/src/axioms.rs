//! Exhaustive checker for the independence and circuit axioms of a
//! candidate set system.
//!
//! A candidate is given either by its independent sets or by its circuits;
//! the other family is derived and both axiom groups are checked. Failures
//! carry the smallest witness found (fewest elements, then mask order).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::config::Budget;
use crate::error::{MatroidError, Result};
use crate::set::{bits, ElementSet, GroundSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    I1,
    I2,
    I3,
    IM,
    C1,
    C2,
    C3,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self:?})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// The empty set is not independent (I1), or is a circuit (C1).
    EmptySet,
    /// `set` is independent but its subset `missing` is not.
    NotDownwardClosed {
        set: ElementSet,
        missing: ElementSet,
    },
    /// `small` is non-maximal independent, `maximal` is maximal, and no
    /// element of `maximal \ small` augments `small`.
    NoAugmentation {
        small: ElementSet,
        maximal: ElementSet,
    },
    /// Two circuits are nested.
    NestedCircuits {
        smaller: ElementSet,
        larger: ElementSet,
    },
    /// Strong elimination fails for circuit `circuit`, eliminated set `eliminated`,
    /// the circuits `family` (one per eliminated element) and the element `kept`.
    Elimination {
        circuit: ElementSet,
        eliminated: ElementSet,
        family: Vec<ElementSet>,
        kept: String,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::EmptySet => write!(f, "empty set"),
            Witness::NotDownwardClosed { set, missing } => {
                write!(f, "{set} is independent but {missing} is not")
            }
            Witness::NoAugmentation { small, maximal } => {
                write!(f, "I={small} cannot be augmented from I'={maximal}")
            }
            Witness::NestedCircuits { smaller, larger } => {
                write!(f, "circuit {smaller} inside circuit {larger}")
            }
            Witness::Elimination {
                circuit,
                eliminated,
                family,
                kept,
            } => {
                write!(f, "C={circuit}, X={eliminated}, family=[")?;
                for (n, c) in family.iter().enumerate() {
                    if n > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "], z={kept}: no circuit through z avoids X")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub failure: Option<Witness>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// A set system given by its independent sets or by its circuits.
#[derive(Debug, Clone)]
pub enum Candidate {
    Independent {
        ground: Arc<GroundSet>,
        sets: Vec<u64>,
    },
    Circuits {
        ground: Arc<GroundSet>,
        sets: Vec<u64>,
    },
}

impl Candidate {
    pub fn independent(sets: &[ElementSet]) -> Result<Self> {
        let (ground, sets) = collect_family(sets)?;
        Ok(Self::Independent { ground, sets })
    }

    pub fn circuits(ground: &Arc<GroundSet>, sets: &[ElementSet]) -> Result<Self> {
        if sets
            .iter()
            .any(|s| !Arc::ptr_eq(s.ground(), ground) && **s.ground() != **ground)
        {
            return Err(MatroidError::UniverseMismatch);
        }
        Ok(Self::Circuits {
            ground: ground.clone(),
            sets: normalize(sets.iter().map(ElementSet::mask)),
        })
    }

    /// The independent sets of a matroid, materialized.
    pub fn from_matroid(m: &crate::Matroid, budget: &Budget) -> Result<Self> {
        MatroidError::check_budget("axiom check", m.len(), budget.axioms)?;
        let sets = bits::subsets(m.full_mask())
            .filter(|&s| m.indep(s))
            .collect();
        Ok(Self::Independent {
            ground: m.ground().clone(),
            sets,
        })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        match self {
            Self::Independent { ground, .. } | Self::Circuits { ground, .. } => ground,
        }
    }
}

fn collect_family(sets: &[ElementSet]) -> Result<(Arc<GroundSet>, Vec<u64>)> {
    let ground = sets.first().map(|s| s.ground().clone()).ok_or_else(|| {
        MatroidError::domain("empty family has no ground set; use Candidate::Independent")
    })?;
    if sets.iter().any(|s| !s.same_universe(&sets[0])) {
        return Err(MatroidError::UniverseMismatch);
    }
    Ok((ground, normalize(sets.iter().map(ElementSet::mask))))
}

fn normalize(sets: impl Iterator<Item = u64>) -> Vec<u64> {
    let mut v: Vec<u64> = sets.collect();
    v.sort_unstable_by_key(|&s| (bits::len(s), s));
    v.dedup();
    v
}

/// Runs every axiom check on a candidate with at most `budget.axioms` elements.
pub fn check_axioms(candidate: &Candidate, budget: &Budget) -> Result<AxiomReport> {
    let ground = candidate.ground();
    MatroidError::check_budget("axiom check", ground.len(), budget.axioms)?;
    let full = ground.full_mask();
    let (independent, circuits) = match candidate {
        Candidate::Independent { sets, .. } => {
            let family = normalize(sets.iter().copied());
            let members: HashSet<u64> = family.iter().copied().collect();
            let circuits = minimal_outside(full, |s| members.contains(&s));
            (family, circuits)
        }
        Candidate::Circuits { sets, .. } => {
            let circuits = normalize(sets.iter().copied());
            let independent: Vec<u64> = bits::subsets(full)
                .filter(|&s| !circuits.iter().any(|&c| c & !s == 0))
                .collect();
            (normalize(independent.into_iter()), circuits)
        }
    };
    let set = |mask| ElementSet::from_mask_unchecked(ground, mask);
    let members: HashSet<u64> = independent.iter().copied().collect();

    let mut checks = vec![
        AxiomCheck {
            axiom: Axiom::I1,
            failure: (!members.contains(&0)).then_some(Witness::EmptySet),
        },
        AxiomCheck {
            axiom: Axiom::I2,
            failure: downward_failure(&independent, &members).map(|(s, t)| {
                Witness::NotDownwardClosed {
                    set: set(s),
                    missing: set(t),
                }
            }),
        },
        AxiomCheck {
            axiom: Axiom::I3,
            failure: augmentation_failure(&independent, &members).map(|(i, j)| {
                Witness::NoAugmentation {
                    small: set(i),
                    maximal: set(j),
                }
            }),
        },
        // maximal elements always exist in a finite family
        AxiomCheck {
            axiom: Axiom::IM,
            failure: None,
        },
        AxiomCheck {
            axiom: Axiom::C1,
            failure: circuits.contains(&0).then_some(Witness::EmptySet),
        },
    ];
    checks.push(AxiomCheck {
        axiom: Axiom::C2,
        failure: nested_circuits(&circuits).map(|(a, b)| Witness::NestedCircuits {
            smaller: set(a),
            larger: set(b),
        }),
    });
    checks.push(AxiomCheck {
        axiom: Axiom::C3,
        failure: elimination_failure(&circuits).map(|f| Witness::Elimination {
            circuit: set(f.circuit),
            eliminated: set(f.eliminated),
            family: f.family.into_iter().map(set).collect(),
            kept: ground.label(f.kept).to_string(),
        }),
    });
    Ok(AxiomReport { checks })
}

/// First failing independence axiom, as text. Used to validate explicit matroids.
pub(crate) fn independence_failure(ground: &Arc<GroundSet>, family: &[u64]) -> Option<String> {
    let family = normalize(family.iter().copied());
    let members: HashSet<u64> = family.iter().copied().collect();
    let set = |mask| ElementSet::from_mask_unchecked(ground, mask);
    if !members.contains(&0) {
        return Some(format!("{} fails: {}", Axiom::I1, Witness::EmptySet));
    }
    if let Some((s, t)) = downward_failure(&family, &members) {
        return Some(format!(
            "{} fails: {}",
            Axiom::I2,
            Witness::NotDownwardClosed {
                set: set(s),
                missing: set(t)
            }
        ));
    }
    augmentation_failure(&family, &members).map(|(i, j)| {
        format!(
            "{} fails: {}",
            Axiom::I3,
            Witness::NoAugmentation {
                small: set(i),
                maximal: set(j)
            }
        )
    })
}

/// Minimal subsets of `full` not accepted by `inside`.
fn minimal_outside(full: u64, inside: impl Fn(u64) -> bool) -> Vec<u64> {
    let outside: Vec<u64> = bits::subsets(full).filter(|&s| !inside(s)).collect();
    let outside_set: HashSet<u64> = outside.iter().copied().collect();
    normalize(
        outside
            .into_iter()
            .filter(|&s| bits::iter(s).all(|i| !outside_set.contains(&(s & !bits::bit(i))))),
    )
}

fn downward_failure(family: &[u64], members: &HashSet<u64>) -> Option<(u64, u64)> {
    // family is sorted by size, so the first hit has the fewest elements; for
    // a smallest violator some one-element deletion is already missing
    family.iter().find_map(|&s| {
        bits::iter(s)
            .map(|i| s & !bits::bit(i))
            .find(|t| !members.contains(t))
            .map(|t| (s, t))
    })
}

fn maximal_sets(family: &[u64]) -> Vec<u64> {
    family
        .iter()
        .copied()
        .filter(|&s| !family.iter().any(|&t| t != s && s & !t == 0))
        .collect()
}

fn augmentation_failure(family: &[u64], members: &HashSet<u64>) -> Option<(u64, u64)> {
    let maximal = maximal_sets(family);
    let maximal_lookup: HashSet<u64> = maximal.iter().copied().collect();
    let mut best: Option<(u64, u64)> = None;
    let key = |(i, j): (u64, u64)| (bits::len(i) + bits::len(j), i, j);
    for &i in family.iter().filter(|s| !maximal_lookup.contains(s)) {
        for &j in &maximal {
            let augments = bits::iter(j & !i).any(|x| members.contains(&(i | bits::bit(x))));
            if !augments && best.is_none_or(|b| key((i, j)) < key(b)) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn nested_circuits(circuits: &[u64]) -> Option<(u64, u64)> {
    circuits.iter().enumerate().find_map(|(n, &a)| {
        circuits[n + 1..]
            .iter()
            .find(|&&b| b != a && a & !b == 0)
            .map(|&b| (a, b))
    })
}

struct EliminationFailure {
    circuit: u64,
    eliminated: u64,
    family: Vec<u64>,
    kept: usize,
}

/// Strong circuit elimination over every admissible tuple.
///
/// For fixed `C` and `X ⊆ C` only the union of the chosen circuits matters,
/// so the reachable unions are enumerated instead of the tuples themselves.
fn elimination_failure(circuits: &[u64]) -> Option<EliminationFailure> {
    let through = |z: usize, allowed: u64| {
        circuits
            .iter()
            .any(|&c| c & bits::bit(z) != 0 && c & !allowed == 0)
    };
    for &c in circuits {
        for x_set in bits::subsets(c).skip(1) {
            // union -> one choice of circuits producing it
            let mut reachable: HashMap<u64, Vec<u64>> = HashMap::from([(0u64, Vec::new())]);
            for x in bits::iter(x_set) {
                let options: Vec<u64> = circuits
                    .iter()
                    .copied()
                    .filter(|&cx| cx & x_set == bits::bit(x))
                    .collect();
                let mut next: HashMap<u64, Vec<u64>> = HashMap::new();
                for (union, choice) in &reachable {
                    for &cx in &options {
                        next.entry(union | cx).or_insert_with(|| {
                            let mut v = choice.clone();
                            v.push(cx);
                            v
                        });
                    }
                }
                reachable = next;
                if reachable.is_empty() {
                    break;
                }
            }
            let mut unions: Vec<(&u64, &Vec<u64>)> = reachable.iter().collect();
            unions.sort_unstable_by_key(|(u, _)| **u);
            for (&union, choice) in unions {
                let allowed = (c | union) & !x_set;
                if let Some(kept) = bits::iter(c & !union).find(|&z| !through(z, allowed)) {
                    return Some(EliminationFailure {
                        circuit: c,
                        eliminated: x_set,
                        family: choice.clone(),
                        kept,
                    });
                }
            }
        }
    }
    None
}
