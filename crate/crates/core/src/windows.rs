//! Finite windows onto infinite finitary matroids.
//!
//! An [`InfiniteFamily`] names an infinite matroid through an increasing
//! sequence of finite restrictions `window(0) ⊆ window(1) ⊆ …`. Element labels
//! are positional (`rung[3]`, `a7`) and keep their meaning in every window, so
//! a finite query set is simply a list of labels. The grammar is documented in
//! `FAMILIES.md`.
//!
//! Windows are restrictions of the infinite matroid, so `κ` computed on them
//! is a lower bound for the true value and grows with the window. An upper
//! bound comes from a [`CertifiedSeparation`]; when both meet the value is
//! certified.

use std::fmt;

use serde::Serialize;

use crate::config::Budget;
use crate::connectivity::{kappa_between_mask, kappa_mask, ConnValue};
use crate::constructions::{component_masks, minor_masks, MinorSpec};
use crate::error::{MatroidError, Result};
use crate::linking::{constructive_linking, LinkingResult};
use crate::matroid::Matroid;
use crate::set::{bits, ElementSet, GroundSet, MAX_ELEMENTS};

/// The built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfiniteFamily {
    /// Finite-cycle matroid of the ladder infinite in both directions.
    DoubleLadder,
    /// Rank-`k` uniform matroid on `a1, a2, …`.
    InfiniteUniform(usize),
    /// Cycle matroid of a finite rooted tree, growing in depth and branching.
    /// Illustrative only: the matroid of the infinite tree whose circuits are
    /// double rays is not finitary and is not modelled.
    OmegaTree,
    /// Two vertices joined by infinitely many paths of length two.
    Theta,
    /// The double ladder with every rung deleted.
    LadderRails,
}

impl InfiniteFamily {
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        if let Some(k) = id
            .strip_prefix("infinite-uniform(")
            .and_then(|s| s.strip_suffix(')'))
        {
            let k = k
                .trim()
                .parse()
                .map_err(|_| MatroidError::domain(format!("bad rank in family id {id:?}")))?;
            return Ok(Self::InfiniteUniform(k));
        }
        match id {
            "double-ladder" => Ok(Self::DoubleLadder),
            "omega-tree" => Ok(Self::OmegaTree),
            "theta" => Ok(Self::Theta),
            "ladder-rails" => Ok(Self::LadderRails),
            _ => Err(MatroidError::domain(format!("unknown family {id:?}"))),
        }
    }

    fn edges(&self, n: usize) -> Vec<(String, String, String)> {
        let n = n as i64;
        let t = |i: i64| format!("T{i}");
        let b = |i: i64| format!("B{i}");
        match self {
            Self::DoubleLadder | Self::LadderRails => {
                let rungs = matches!(self, Self::DoubleLadder);
                let mut edges = Vec::new();
                for i in -n..=n {
                    if rungs {
                        edges.push((format!("rung[{i}]"), t(i), b(i)));
                    }
                    edges.push((format!("railT[{i}]"), t(i), t(i + 1)));
                    edges.push((format!("railB[{i}]"), b(i), b(i + 1)));
                }
                if rungs {
                    edges.push((format!("rung[{}]", n + 1), t(n + 1), b(n + 1)));
                }
                edges
            }
            Self::Theta => (0..=n + 1)
                .flat_map(|i| {
                    [
                        (format!("x[{i}]"), "u".to_string(), format!("w{i}")),
                        (format!("y[{i}]"), format!("w{i}"), "v".to_string()),
                    ]
                })
                .collect(),
            Self::OmegaTree => {
                let mut edges = Vec::new();
                let mut frontier = vec![Vec::<i64>::new()];
                for _ in 0..n {
                    let mut next = Vec::new();
                    for path in &frontier {
                        for c in 0..n {
                            let mut child = path.clone();
                            child.push(c);
                            edges.push((
                                tree_label(&child),
                                vertex_name(path),
                                vertex_name(&child),
                            ));
                            next.push(child);
                        }
                    }
                    frontier = next;
                }
                edges
            }
            Self::InfiniteUniform(_) => Vec::new(),
        }
    }

    /// Number of elements of `window(n)`, without building it.
    pub fn window_size(&self, n: usize) -> usize {
        match self {
            Self::DoubleLadder => 6 * n + 4,
            Self::LadderRails => 4 * n + 2,
            Self::Theta => 2 * n + 4,
            Self::InfiniteUniform(_) => n,
            Self::OmegaTree => (1..=n as u32)
                .map(|d| n.saturating_pow(d))
                .fold(0, usize::saturating_add),
        }
    }

    /// The finite restriction of the family to its `n`-th window.
    pub fn window(&self, n: usize) -> Result<Matroid> {
        MatroidError::check_budget("window size", self.window_size(n), MAX_ELEMENTS)?;
        match self {
            Self::InfiniteUniform(k) => {
                let ground = GroundSet::new((1..=n).map(|i| format!("a{i}")))?;
                Ok(Matroid::uniform(ground, *k))
            }
            _ => {
                let edges = self.edges(n);
                let triples: Vec<(&str, &str, &str)> = edges
                    .iter()
                    .map(|(l, u, v)| (l.as_str(), u.as_str(), v.as_str()))
                    .collect();
                Matroid::graph(&triples)
            }
        }
    }

    /// The least window containing `label`.
    pub fn window_of(&self, label: &str) -> Result<usize> {
        let unknown = || MatroidError::domain(format!("{label:?} is not an element of {self}"));
        let index = |prefix: &str| -> Option<i64> {
            label.strip_prefix(prefix)?.strip_suffix(']')?.parse().ok()
        };
        let n = match self {
            Self::DoubleLadder | Self::LadderRails => {
                if let Some(i) = index("rung[").filter(|_| *self == Self::DoubleLadder) {
                    (-i).max(i - 1).max(0)
                } else if let Some(i) = index("railT[").or_else(|| index("railB[")) {
                    i.abs()
                } else {
                    return Err(unknown());
                }
            }
            Self::Theta => {
                let i = index("x[")
                    .or_else(|| index("y["))
                    .filter(|&i| i >= 0)
                    .ok_or_else(unknown)?;
                (i - 1).max(0)
            }
            Self::InfiniteUniform(_) => {
                let i: i64 = label
                    .strip_prefix('a')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(unknown)?;
                if i < 1 {
                    return Err(unknown());
                }
                i
            }
            Self::OmegaTree => {
                let path = label
                    .strip_prefix("t[")
                    .and_then(|s| s.strip_suffix(']'))
                    .map(|s| {
                        s.split('.')
                            .map(str::parse::<i64>)
                            .collect::<std::result::Result<Vec<_>, _>>()
                    })
                    .and_then(|p| p.ok())
                    .filter(|p| !p.is_empty() && p.iter().all(|&c| c >= 0))
                    .ok_or_else(unknown)?;
                let widest = path.iter().max().map_or(0, |&c| c + 1);
                widest.max(path.len() as i64)
            }
        };
        Ok(n as usize)
    }

    /// The least window at which independence of the given finite set is
    /// decided. For every built-in family a finite set's verdict depends only
    /// on the set itself, so this is the first window containing it.
    pub fn exactness_radius<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        labels
            .iter()
            .try_fold(0, |acc, l| Ok(acc.max(self.window_of(l.as_ref())?)))
    }
}

fn tree_label(path: &[i64]) -> String {
    let parts: Vec<String> = path.iter().map(i64::to_string).collect();
    format!("t[{}]", parts.join("."))
}

fn vertex_name(path: &[i64]) -> String {
    let parts: Vec<String> = path.iter().map(i64::to_string).collect();
    format!("v{}", parts.join("."))
}

impl fmt::Display for InfiniteFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DoubleLadder => f.write_str("double-ladder"),
            Self::InfiniteUniform(k) => write!(f, "infinite-uniform({k})"),
            Self::OmegaTree => f.write_str("omega-tree"),
            Self::Theta => f.write_str("theta"),
            Self::LadderRails => f.write_str("ladder-rails"),
        }
    }
}

impl Serialize for InfiniteFamily {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The side `U` of a separation of the infinite matroid, described finitely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "template", rename_all = "kebab-case")]
pub enum SeparationTemplate {
    /// `U` is the given finite set.
    FiniteSide { labels: Vec<String> },
    /// `U` is everything except the given finite set.
    CofiniteSide { labels: Vec<String> },
    /// Double ladder: rungs `≤ i` and rails `< i`.
    LadderCut { rung: i64 },
    /// Ladder rails: the top rail.
    RailsSplit,
}

impl SeparationTemplate {
    /// Parses `finite-side:a,b`, `cofinite-side:a,b`, `ladder-cut:i` or `rails-split`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let labels = |s: &str| {
            s.split(',')
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect()
        };
        if let Some(rest) = text.strip_prefix("finite-side:") {
            Ok(Self::FiniteSide {
                labels: labels(rest),
            })
        } else if let Some(rest) = text.strip_prefix("cofinite-side:") {
            Ok(Self::CofiniteSide {
                labels: labels(rest),
            })
        } else if let Some(rest) = text.strip_prefix("ladder-cut:") {
            let rung = rest
                .trim()
                .parse()
                .map_err(|_| MatroidError::domain(format!("bad rung index in {text:?}")))?;
            Ok(Self::LadderCut { rung })
        } else if text == "rails-split" {
            Ok(Self::RailsSplit)
        } else {
            Err(MatroidError::domain(format!(
                "unknown separation template {text:?}"
            )))
        }
    }

    /// `U ∩ window(n)`.
    pub fn side(&self, family: &InfiniteFamily, window: &Matroid) -> Result<ElementSet> {
        let ground = window.ground();
        let pick = |keep: &dyn Fn(&str) -> bool| {
            let labels: Vec<&str> = ground
                .labels()
                .iter()
                .map(String::as_str)
                .filter(|l| keep(l))
                .collect();
            ElementSet::from_labels(ground, labels)
        };
        match (self, family) {
            (Self::FiniteSide { labels }, _) => ElementSet::from_labels(ground, labels),
            (Self::CofiniteSide { labels }, _) => {
                Ok(ElementSet::from_labels(ground, labels)?.complement())
            }
            (Self::LadderCut { rung }, InfiniteFamily::DoubleLadder) => pick(&|l| {
                let at = |prefix: &str| {
                    l.strip_prefix(prefix)
                        .and_then(|s| s.strip_suffix(']'))
                        .and_then(|s| s.parse::<i64>().ok())
                };
                match at("rung[") {
                    Some(i) => i <= *rung,
                    None => at("railT[")
                        .or_else(|| at("railB["))
                        .is_some_and(|i| i < *rung),
                }
            }),
            (Self::RailsSplit, InfiniteFamily::LadderRails) => pick(&|l| l.starts_with("railT[")),
            _ => Err(MatroidError::domain(format!(
                "template {self} does not apply to {family}"
            ))),
        }
    }

    /// A proven upper bound on `κ(U)` in the infinite matroid.
    fn bound(&self, family: &InfiniteFamily) -> Result<usize> {
        match (self, family) {
            // κ(S) ≤ r(S) for finite S, and r(S) is decided in its first window
            (Self::FiniteSide { labels } | Self::CofiniteSide { labels }, _) => {
                let w = family.window(family.exactness_radius(labels)?)?;
                w.rank(&ElementSet::from_labels(w.ground(), labels)?)
            }
            // spanning trees of the two halves share exactly the two ends of the cut rung
            (Self::LadderCut { .. }, InfiniteFamily::DoubleLadder) => Ok(1),
            // the rails are the two components of the rung-deleted ladder
            (Self::RailsSplit, InfiniteFamily::LadderRails) => Ok(0),
            _ => Err(MatroidError::domain(format!(
                "template {self} does not apply to {family}"
            ))),
        }
    }
}

impl fmt::Display for SeparationTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FiniteSide { labels } => write!(f, "finite-side:{}", labels.join(",")),
            Self::CofiniteSide { labels } => write!(f, "cofinite-side:{}", labels.join(",")),
            Self::LadderCut { rung } => write!(f, "ladder-cut:{rung}"),
            Self::RailsSplit => f.write_str("rails-split"),
        }
    }
}

/// A separation `(U, E∖U)` of the infinite matroid that is a k-separation
/// in the sense `κ(U) ≤ k − 1`, checked on windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedSeparation {
    pub template: SeparationTemplate,
    pub k: usize,
    /// `(n, κ_{window(n)}(U ∩ window(n)))` for every window checked.
    pub checked: Vec<(usize, usize)>,
}

impl CertifiedSeparation {
    pub fn kappa_bound(&self) -> usize {
        self.k - 1
    }
}

/// Validates a separation template on windows `0..=max_window` (those that
/// fit in memory) and returns it with `k = bound + 1`.
pub fn certified_separation(
    family: &InfiniteFamily,
    template: &str,
    max_window: usize,
) -> Result<CertifiedSeparation> {
    let template = SeparationTemplate::parse(template)?;
    let bound = template.bound(family)?;
    let first = match &template {
        SeparationTemplate::FiniteSide { labels } | SeparationTemplate::CofiniteSide { labels } => {
            family.exactness_radius(labels)?
        }
        _ => 0,
    };
    let mut checked = Vec::new();
    for n in first..=max_window {
        if family.window_size(n) > MAX_ELEMENTS {
            break;
        }
        let w = family.window(n)?;
        let u = template.side(family, &w)?;
        let value = kappa_mask(&w, u.mask());
        if value > bound {
            return Err(MatroidError::invariant(format!(
                "{template}: kappa = {value} on window {n} exceeds the bound {bound}"
            )));
        }
        checked.push((n, value));
    }
    Ok(CertifiedSeparation {
        template,
        k: bound + 1,
        checked,
    })
}

/// When to stop growing windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizationPolicy {
    pub max_window: usize,
    pub plateau_length: usize,
    pub budget: Budget,
}

impl Default for StabilizationPolicy {
    fn default() -> Self {
        Self {
            max_window: 8,
            plateau_length: 3,
            budget: Budget::default(),
        }
    }
}

/// `κ_{window(n)}(X, Y)` for successive `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizationReport {
    pub family: InfiniteFamily,
    pub x: Vec<String>,
    pub y: Vec<String>,
    /// `(n, κ_{window(n)}(X, Y))`, a lower bound for the infinite value.
    pub values: Vec<(usize, usize)>,
    /// First window of the plateau, if one of the required length was seen.
    pub stable_at: Option<usize>,
    pub certified_value: Option<ConnValue>,
    pub certificate: Option<CertifiedSeparation>,
}

impl StabilizationReport {
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0].1 <= w[1].1)
    }
}

fn candidate_templates(
    family: &InfiniteFamily,
    x: &[String],
    y: &[String],
    max_window: usize,
) -> Vec<SeparationTemplate> {
    let mut out = vec![
        SeparationTemplate::FiniteSide { labels: x.to_vec() },
        SeparationTemplate::CofiniteSide { labels: y.to_vec() },
        SeparationTemplate::FiniteSide { labels: y.to_vec() },
        SeparationTemplate::CofiniteSide { labels: x.to_vec() },
    ];
    match family {
        InfiniteFamily::DoubleLadder => {
            let reach = max_window as i64 + 1;
            out.extend((-reach..=reach).map(|rung| SeparationTemplate::LadderCut { rung }));
        }
        InfiniteFamily::LadderRails => out.push(SeparationTemplate::RailsSplit),
        _ => {}
    }
    out
}

/// Whether `U` has `X` on one side and `Y` on the other.
fn separates(u: &ElementSet, x: &ElementSet, y: &ElementSet) -> bool {
    (x.is_subset(u) && y.is_disjoint(u)) || (y.is_subset(u) && x.is_disjoint(u))
}

/// Computes `κ(X, Y)` on windows from the exactness radius of `X ∪ Y` up to
/// a plateau of `plateau_length` equal values or `max_window`. The plateau
/// value is certified when a separation template with a matching bound
/// separates `X` from `Y`.
pub fn stabilized_kappa_between(
    family: &InfiniteFamily,
    x: &[String],
    y: &[String],
    policy: &StabilizationPolicy,
) -> Result<StabilizationReport> {
    let all: Vec<&String> = x.iter().chain(y).collect();
    let start = family.exactness_radius(&all)?;
    if start > policy.max_window {
        return Err(MatroidError::domain(format!(
            "X and Y first fit in window {start}, beyond max window {}",
            policy.max_window
        )));
    }
    let mut values: Vec<(usize, usize)> = Vec::new();
    let mut stable_at = None;
    for n in start..=policy.max_window {
        let w = family.window(n)?;
        let (xs, ys) = (
            ElementSet::from_labels(w.ground(), x)?,
            ElementSet::from_labels(w.ground(), y)?,
        );
        if xs.mask() & ys.mask() != 0 {
            return Err(MatroidError::domain("X and Y are not disjoint"));
        }
        let (value, _) = kappa_between_mask(&w, xs.mask(), ys.mask());
        if let Some(&(_, last)) = values.last() {
            if value < last {
                return Err(MatroidError::invariant(format!(
                    "window {n} lowered kappa from {last} to {value}"
                )));
            }
        }
        values.push((n, value));
        let run = values
            .iter()
            .rev()
            .take_while(|&&(_, v)| v == value)
            .count();
        if run >= policy.plateau_length.max(1) {
            stable_at = Some(values[values.len() - run].0);
            break;
        }
    }

    let mut certified_value = None;
    let mut certificate = None;
    if let (Some(n), Some(&(_, plateau))) = (stable_at, values.last()) {
        let w = family.window(n)?;
        let (xs, ys) = (
            ElementSet::from_labels(w.ground(), x)?,
            ElementSet::from_labels(w.ground(), y)?,
        );
        for template in candidate_templates(family, x, y, policy.max_window) {
            let Ok(bound) = template.bound(family) else {
                continue;
            };
            if bound != plateau {
                continue;
            }
            let Ok(u) = template.side(family, &w) else {
                continue;
            };
            if !separates(&u, &xs, &ys) {
                continue;
            }
            let cert = certified_separation(family, &template.to_string(), policy.max_window)?;
            certified_value = Some(ConnValue::Finite(plateau));
            certificate = Some(cert);
            break;
        }
    }
    Ok(StabilizationReport {
        family: *family,
        x: x.to_vec(),
        y: y.to_vec(),
        values,
        stable_at,
        certified_value,
        certificate,
    })
}

/// A linking partition found inside a finite window. Every element outside
/// the window is deleted as well.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowedLinking {
    pub window: usize,
    pub certified_value: ConnValue,
    pub result: LinkingResult,
}

/// Runs [`constructive_linking`] in the first window of a certified plateau.
pub fn windowed_linking(
    family: &InfiniteFamily,
    x: &[String],
    y: &[String],
    policy: &StabilizationPolicy,
) -> Result<WindowedLinking> {
    let report = stabilized_kappa_between(family, x, y, policy)?;
    let (Some(n), Some(value)) = (report.stable_at, report.certified_value) else {
        return Err(MatroidError::precondition(
            "kappa(X, Y) has no certified value within the window limit",
        ));
    };
    let w = family.window(n)?;
    let (xs, ys) = (
        ElementSet::from_labels(w.ground(), x)?,
        ElementSet::from_labels(w.ground(), y)?,
    );
    let result = constructive_linking(&w, &xs, &ys, &policy.budget)?;
    if result.achieved != value {
        return Err(MatroidError::invariant(format!(
            "window {n} linking achieves {}, certified value is {value}",
            result.achieved
        )));
    }
    Ok(WindowedLinking {
        window: n,
        certified_value: value,
        result,
    })
}

/// Outcome of trying every contract/delete split of the rungs of a
/// double-ladder window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RungPartitionCheck {
    pub window: usize,
    pub partitions_checked: usize,
    /// Splits whose minor is 2-connected.
    pub two_connected: usize,
    /// The first such split, if any.
    pub witness: Option<MinorSpec>,
    /// Deleting every rung leaves a disconnected matroid.
    pub deleting_all_disconnects: bool,
    /// Contracting any single rung strictly inside the window, keeping the
    /// others, leaves a disconnected matroid.
    pub interior_contraction_disconnects: bool,
}

fn connected_minor(m: &Matroid, contract: u64, delete: u64) -> bool {
    let (minor, _) = minor_masks(m, contract, m.full_mask() & !(contract | delete));
    component_masks(&minor).len() <= 1
}

/// Checks every partition `(A, B)` of the rungs of `window(n)` for a
/// 2-connected `window(n)/A − B`.
pub fn rung_partition_check(n: usize, budget: &Budget) -> Result<RungPartitionCheck> {
    let family = InfiniteFamily::DoubleLadder;
    let w = family.window(n)?;
    let labels = w.ground().labels();
    let rung_positions: Vec<usize> = (0..w.len())
        .filter(|&i| labels[i].starts_with("rung["))
        .collect();
    let rungs = rung_positions
        .iter()
        .fold(0u64, |acc, &i| acc | bits::bit(i));
    MatroidError::check_budget("rung partitions", bits::len(rungs), budget.search)?;

    let mut partitions_checked = 0;
    let mut two_connected = 0;
    let mut witness = None;
    for a in bits::subsets(rungs) {
        partitions_checked += 1;
        let b = rungs & !a;
        // a matroid is 2-connected iff it is connected
        if connected_minor(&w, a, b) {
            two_connected += 1;
            if witness.is_none() {
                witness = Some(MinorSpec::new(w.set_of(a), w.set_of(b))?);
            }
        }
    }
    let deleting_all_disconnects = !connected_minor(&w, 0, rungs);
    let interior = &rung_positions[1..rung_positions.len() - 1];
    let interior_contraction_disconnects = interior
        .iter()
        .all(|&i| !connected_minor(&w, bits::bit(i), 0));
    Ok(RungPartitionCheck {
        window: n,
        partitions_checked,
        two_connected,
        witness,
        deleting_all_disconnects,
        interior_contraction_disconnects,
    })
}
