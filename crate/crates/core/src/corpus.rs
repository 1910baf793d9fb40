//! Test corpora: small matroids of every representation and set systems
//! that fail the axioms.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::axioms::{Axiom, Candidate};
use crate::constructions::direct_sum;
use crate::matroid::Matroid;
use crate::set::GroundSet;

/// A named corpus matroid.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub matroid: Matroid,
}

fn entry(name: impl Into<String>, matroid: Matroid) -> Entry {
    Entry {
        name: name.into(),
        matroid,
    }
}

/// `U_{k,n}` for `1 ≤ n ≤ max_n` and `0 ≤ k ≤ n`.
pub fn uniform(max_n: usize) -> Vec<Entry> {
    (1..=max_n)
        .flat_map(|n| {
            (0..=n).map(move |k| entry(format!("U{k},{n}"), Matroid::uniform_n(n, k).unwrap()))
        })
        .collect()
}

type Graph = Vec<(usize, usize)>;

fn vertex_count(g: &Graph) -> usize {
    g.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0)
}

fn canonical(g: &Graph) -> Graph {
    let n = vertex_count(g);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Graph> = None;
    loop {
        let mut image: Graph = g
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Connected simple graphs with `1..=max_edges` edges, one per isomorphism
/// class, each with edges sorted.
pub fn connected_graphs(max_edges: usize) -> Vec<Graph> {
    let mut all = Vec::new();
    let mut layer: BTreeSet<Graph> = BTreeSet::from([vec![(0, 1)]]);
    for _ in 1..=max_edges {
        let mut next = BTreeSet::new();
        for g in &layer {
            let n = vertex_count(g);
            // a new edge between existing vertices, or to one new vertex
            for u in 0..n {
                for v in u + 1..=n {
                    if g.contains(&(u, v)) {
                        continue;
                    }
                    let mut h = g.clone();
                    h.push((u, v));
                    next.insert(canonical(&h));
                }
            }
        }
        all.extend(std::mem::replace(&mut layer, next));
    }
    all
}

/// Graphic matroids of all connected simple graphs with at most `max_edges`
/// edges. Edge `i` of the sorted edge list is element `e{i+1}`.
pub fn graphic(max_edges: usize) -> Vec<Entry> {
    connected_graphs(max_edges)
        .into_iter()
        .map(|g| {
            let ground = GroundSet::new((1..=g.len()).map(|i| format!("e{i}"))).unwrap();
            let vertices = (0..vertex_count(&g)).map(|v| format!("v{v}")).collect();
            let desc: Vec<String> = g.iter().map(|(u, v)| format!("{u}{v}")).collect();
            entry(
                format!("graph[{}]", desc.join(" ")),
                Matroid::graphic(ground, vertices, g).unwrap(),
            )
        })
        .collect()
}

/// `count` random binary matroids with 4 to 8 columns and 2 to 4 rows.
pub fn random_gf2(count: usize, seed: u64) -> Vec<Entry> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let cols = rng.gen_range(4..=8);
            let rows = rng.gen_range(2..=4);
            let matrix: Vec<Vec<bool>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_bool(0.5)).collect())
                .collect();
            let ground = GroundSet::new((1..=cols).map(|c| format!("c{c}"))).unwrap();
            entry(
                format!("gf2#{i}"),
                Matroid::linear_gf2(ground, &matrix).unwrap(),
            )
        })
        .collect()
}

fn triangle(tag: &str) -> Matroid {
    let e = |i| format!("{tag}{i}");
    let (a, b, c) = (e(1), e(2), e(3));
    Matroid::graph(&[(&a, "x", "y"), (&b, "y", "z"), (&c, "z", "x")]).unwrap()
}

/// Hand-picked matroids with loops, coloops, parallel classes and several components.
pub fn named() -> Vec<Entry> {
    let fano_rows = [
        vec![true, false, false, true, true, false, true],
        vec![false, true, false, true, false, true, true],
        vec![false, false, true, false, true, true, true],
    ];
    let fano = Matroid::linear_gf2(
        GroundSet::new((1..=7).map(|i| format!("f{i}"))).unwrap(),
        &fano_rows,
    )
    .unwrap();
    vec![
        entry(
            "two-triangles",
            direct_sum(&[triangle("p"), triangle("q")]).unwrap(),
        ),
        entry(
            "loop-parallel-coloop",
            Matroid::graph(&[
                ("l", "x", "x"),
                ("p", "x", "y"),
                ("q", "x", "y"),
                ("c", "y", "z"),
            ])
            .unwrap(),
        ),
        entry(
            "k4",
            Matroid::graph(&[
                ("e12", "1", "2"),
                ("e13", "1", "3"),
                ("e14", "1", "4"),
                ("e23", "2", "3"),
                ("e24", "2", "4"),
                ("e34", "3", "4"),
            ])
            .unwrap(),
        ),
        entry("fano", fano),
        entry(
            "ladder-2",
            Matroid::graph(&[
                ("r0", "t0", "b0"),
                ("t0", "t0", "t1"),
                ("b0", "b0", "b1"),
                ("r1", "t1", "b1"),
                ("t1", "t1", "t2"),
                ("b1", "b1", "b2"),
                ("r2", "t2", "b2"),
            ])
            .unwrap(),
        ),
        entry(
            "u24+u12",
            direct_sum(&[Matroid::uniform_n(4, 2).unwrap(), {
                let g = GroundSet::new(["f1", "f2"]).unwrap();
                Matroid::uniform(g, 1)
            }])
            .unwrap(),
        ),
    ]
}

/// Uniform (`n ≤ 8`), graphic (`≤ 6` edges), 10 random binary and the named matroids.
pub fn standard() -> Vec<Entry> {
    let mut all = uniform(8);
    all.extend(graphic(6));
    all.extend(random_gf2(10, 0x5eed));
    all.extend(named());
    all
}

/// A set system that is not a matroid and the first axiom it breaks.
#[derive(Debug, Clone)]
pub struct NonMatroid {
    pub name: &'static str,
    pub candidate: Candidate,
    pub fails: Axiom,
}

fn family(labels: &[&str], sets: &[&str], circuits: bool) -> Candidate {
    let ground: Arc<GroundSet> = GroundSet::new(labels.iter().copied()).unwrap();
    let masks: Vec<u64> = sets
        .iter()
        .map(|s| crate::ElementSet::parse(&ground, s).unwrap().mask())
        .collect();
    if circuits {
        Candidate::Circuits {
            ground,
            sets: masks,
        }
    } else {
        Candidate::Independent {
            ground,
            sets: masks,
        }
    }
}

/// Ten set systems, each violating a known axiom.
pub fn non_matroids() -> Vec<NonMatroid> {
    let abc = ["a", "b", "c"];
    let abcd = ["a", "b", "c", "d"];
    let abcde = ["a", "b", "c", "d", "e"];
    let nm = |name, candidate, fails| NonMatroid {
        name,
        candidate,
        fails,
    };
    vec![
        nm("no-empty-set", family(&abc, &["a", "b"], false), Axiom::I1),
        nm(
            "pair-without-singleton",
            family(&abc, &["{}", "a,b"], false),
            Axiom::I2,
        ),
        nm(
            "triple-without-pair",
            family(&abc, &["{}", "a", "b", "c", "a,b,c"], false),
            Axiom::I2,
        ),
        nm(
            "one-sided-pair",
            family(&abc, &["{}", "a", "b", "c", "a,b"], false),
            Axiom::I3,
        ),
        nm(
            "two-disjoint-pairs",
            family(&abcd, &["{}", "a", "b", "c", "d", "a,b", "c,d"], false),
            Axiom::I3,
        ),
        nm(
            "unbalanced-star",
            family(
                &abcd,
                &["{}", "a", "b", "c", "d", "a,b", "a,c", "a,d", "b,c"],
                false,
            ),
            Axiom::I3,
        ),
        nm(
            "empty-circuit",
            family(&abc, &["{}", "a,b"], true),
            Axiom::C1,
        ),
        nm(
            "nested-circuits",
            family(&abc, &["a,b", "a,b,c"], true),
            Axiom::C2,
        ),
        nm(
            "path-circuits",
            family(&abc, &["a,b", "b,c"], true),
            Axiom::C3,
        ),
        nm(
            "bowtie-circuits",
            family(&abcde, &["a,b,c", "c,d,e"], true),
            Axiom::C3,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::check_axioms;
    use crate::Budget;

    #[test]
    fn graph_counts_match_known_sequence() {
        // connected simple graphs by edge count: 1, 1, 3, 5, 12, 30
        let graphs = connected_graphs(6);
        let counts: Vec<usize> = (1..=6)
            .map(|m| graphs.iter().filter(|g| g.len() == m).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 5, 12, 30]);
    }

    #[test]
    fn random_corpus_is_reproducible() {
        let a = random_gf2(3, 7);
        let b = random_gf2(3, 7);
        for (x, y) in a.iter().zip(&b) {
            assert!(x.matroid.oracle_equal(&y.matroid));
        }
    }

    #[test]
    fn non_matroids_fail_their_axiom() {
        for nm in non_matroids() {
            let report = check_axioms(&nm.candidate, &Budget::default()).unwrap();
            let check = report.get(nm.fails).unwrap();
            assert!(
                check.failure.is_some(),
                "{} should fail {}",
                nm.name,
                nm.fails
            );
        }
    }
}
