//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every expected value is recomputed here from ranks or by brute force, never
//! taken from the code under test.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use matroid_kappa::axioms::{check_axioms, Candidate};
use matroid_kappa::connectivity::{is_k_connected, kappa, kappa_with_bases, random_basis};
use matroid_kappa::constructions::{components, dual, take_minor};
use matroid_kappa::corpus::{self, Entry};
use matroid_kappa::linking::{
    breaking_circuits, constructive_linking, infinite_kappa_chain, linking_partition,
};
use matroid_kappa::set::bits;
use matroid_kappa::windows::{rung_partition_check, stabilized_kappa_between, StabilizationPolicy};
use matroid_kappa::{Budget, ConnValue, GroundSet, InfiniteFamily, Matroid};

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn verdict(ok: bool, detail: String) -> Outcome {
    Outcome { passed: ok, detail }
}

fn within(limit: Duration, elapsed: Duration, outcome: Outcome) -> Outcome {
    if elapsed > limit {
        fail(format!(
            "{} but took {elapsed:.1?} (limit {limit:?})",
            outcome.detail
        ))
    } else {
        outcome
    }
}

/// κ(X) from ranks.
fn rank_kappa(m: &Matroid, x: u64) -> usize {
    m.rank_of(x) + m.rank_of(m.full_mask() & !x) - m.full_rank()
}

/// κ(X, Y) by minimizing the rank formula over every U.
fn brute_kappa_between(m: &Matroid, x: u64, y: u64) -> usize {
    bits::subsets(m.full_mask() & !(x | y))
        .map(|s| rank_kappa(m, x | s))
        .min()
        .unwrap()
}

fn value(v: ConnValue) -> usize {
    v.finite().expect("finite matroid")
}

fn small(corpus: &[Entry], max: usize) -> impl Iterator<Item = &Entry> {
    corpus.iter().filter(move |e| e.matroid.len() <= max)
}

fn axiom_suite(corpus: &[Entry]) -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let mut problems = Vec::new();
    for e in corpus {
        let candidate = Candidate::from_matroid(&e.matroid, &budget).unwrap();
        let report = check_axioms(&candidate, &budget).unwrap();
        if !report.all_passed() {
            problems.push(format!("{} rejected", e.name));
        }
    }
    let non = corpus::non_matroids();
    for nm in &non {
        let report = check_axioms(&nm.candidate, &budget).unwrap();
        if report
            .get(nm.fails)
            .and_then(|c| c.failure.as_ref())
            .is_none()
        {
            problems.push(format!("{} not caught by {}", nm.name, nm.fails));
        }
    }
    let ok = problems.is_empty() && corpus.len() >= 30 && non.len() >= 10;
    let detail = format!(
        "{} matroids accepted, {} non-matroids rejected {:?}",
        corpus.len(),
        non.len(),
        problems
    );
    within(
        Duration::from_secs(60),
        start.elapsed(),
        verdict(ok, detail),
    )
}

fn finite_rank_equivalence(corpus: &[Entry]) -> Outcome {
    let mut checked = 0usize;
    for e in small(corpus, 8) {
        let m = &e.matroid;
        for x in bits::subsets(m.full_mask()) {
            checked += 1;
            if value(kappa(m, &m.set_of(x)).unwrap()) != rank_kappa(m, x) {
                return fail(format!("{}: X = {}", e.name, m.set_of(x)));
            }
        }
    }
    pass(format!("{checked} subsets, zero mismatches"))
}

fn duality_invariance(corpus: &[Entry]) -> Outcome {
    let mut checked = 0usize;
    for e in small(corpus, 8) {
        let m = &e.matroid;
        let d = dual(m);
        for x in bits::subsets(m.full_mask()) {
            checked += 1;
            let s = m.set_of(x);
            if kappa(m, &s).unwrap() != kappa(&d, &s).unwrap() {
                return fail(format!("{}: X = {s}", e.name));
            }
        }
    }
    pass(format!("{checked} subsets, zero mismatches"))
}

/// Matroids on 9 and 10 elements for the random part of the submodularity check.
fn larger_matroids() -> Vec<Matroid> {
    let mut out: Vec<Matroid> = (0..=10)
        .map(|k| Matroid::uniform_n(10, k).unwrap())
        .collect();
    out.push(Matroid::uniform_n(9, 4).unwrap());
    let k5: Vec<(String, String, String)> = (0..5)
        .flat_map(|u| (u + 1..5).map(move |v| (format!("e{u}{v}"), u.to_string(), v.to_string())))
        .collect();
    let edges: Vec<(&str, &str, &str)> = k5
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    out.push(Matroid::graph(&edges).unwrap());
    let mut rng = StdRng::seed_from_u64(10);
    for cols in [9, 10, 10, 10] {
        let rows: Vec<Vec<bool>> = (0..4)
            .map(|_| (0..cols).map(|_| rng.gen_bool(0.5)).collect())
            .collect();
        let ground = GroundSet::new((1..=cols).map(|c| format!("c{c}"))).unwrap();
        out.push(Matroid::linear_gf2(ground, &rows).unwrap());
    }
    out
}

fn submodularity(corpus: &[Entry]) -> Outcome {
    let k = |m: &Matroid, x: u64| value(kappa(m, &m.set_of(x)).unwrap());
    let mut pairs = 0usize;
    let mut violations = 0usize;
    for e in small(corpus, 6) {
        let m = &e.matroid;
        let table: Vec<usize> = bits::subsets(m.full_mask()).map(|x| k(m, x)).collect();
        for x in bits::subsets(m.full_mask()) {
            for y in bits::subsets(m.full_mask()) {
                pairs += 1;
                let [a, b, c, d] = [x, y, x | y, x & y].map(|s| table[s as usize]);
                if a + b < c + d {
                    violations += 1;
                }
            }
        }
    }
    let exhaustive = pairs;
    let larger = larger_matroids();
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..10_000 {
        let m = &larger[rng.gen_range(0..larger.len())];
        let (x, y) = (
            rng.gen::<u64>() & m.full_mask(),
            rng.gen::<u64>() & m.full_mask(),
        );
        pairs += 1;
        if k(m, x) + k(m, y) < k(m, x | y) + k(m, x & y) {
            violations += 1;
        }
    }
    verdict(
        violations == 0,
        format!(
            "{exhaustive} exhaustive + {} random pairs, {violations} violations",
            pairs - exhaustive
        ),
    )
}

fn basis_independence(corpus: &[Entry]) -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut trials = 0usize;
    for e in corpus {
        let m = &e.matroid;
        for x in bits::subsets(m.full_mask()) {
            let xs = m.set_of(x);
            let greedy = kappa(m, &xs).unwrap();
            for _ in 0..50 {
                trials += 1;
                let bx = random_basis(m, &xs, &mut rng).unwrap();
                let by = random_basis(m, &xs.complement(), &mut rng).unwrap();
                if kappa_with_bases(m, &xs, &bx, &by).unwrap() != greedy {
                    return fail(format!("{}: X = {xs}, B_X = {bx}, B_Y = {by}", e.name));
                }
            }
        }
    }
    pass(format!(
        "{trials} random basis pairs agree with the greedy value"
    ))
}

fn two_connected_iff_connected(corpus: &[Entry]) -> Outcome {
    let budget = Budget::default();
    let mut checked = 0usize;
    for e in corpus {
        let m = &e.matroid;
        let loopless = (0..m.len()).all(|i| m.indep(bits::bit(i)));
        if !loopless || m.len() < 2 {
            continue;
        }
        checked += 1;
        let two = is_k_connected(m, 2, &budget).unwrap();
        if two != components(m, &budget).unwrap().is_connected() {
            return fail(format!("{}: 2-connected = {two}", e.name));
        }
    }
    pass(format!("{checked} loop-free matroids agree"))
}

/// Disjoint (X, Y) with |X|, |Y| ∈ {1, 2}, in canonical order.
fn small_pairs(m: &Matroid) -> impl Iterator<Item = (u64, u64)> + '_ {
    let full = m.full_mask();
    let sized = move |s: u64| (1..=2).contains(&bits::len(s));
    bits::subsets(full)
        .filter(move |&x| sized(x))
        .flat_map(move |x| {
            bits::subsets(full & !x)
                .filter(move |&y| sized(y))
                .map(move |y| (x, y))
        })
}

fn tutte_linking(corpus: &[Entry]) -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let mut instances = 0usize;
    let mut constructive = 0usize;
    for e in corpus {
        let m = &e.matroid;
        for (x, y) in small_pairs(m)
            .filter(|&(x, y)| bits::len(m.full_mask() & !(x | y)) <= 10)
            .take(200)
        {
            instances += 1;
            let (xs, ys) = (m.set_of(x), m.set_of(y));
            let target = brute_kappa_between(m, x, y);
            let result = linking_partition(m, &xs, &ys, &budget).unwrap();
            let minor = take_minor(m, &result.spec).unwrap();
            let (mx, my) = (
                xs.to_ground(minor.ground()).unwrap(),
                ys.to_ground(minor.ground()).unwrap(),
            );
            let achieved = brute_kappa_between(&minor, mx.mask(), my.mask());
            if achieved != target || result.achieved != ConnValue::Finite(target) {
                return fail(format!(
                    "{}: X = {xs}, Y = {ys}: {achieved} != {target}",
                    e.name
                ));
            }
            if target <= 3 {
                constructive += 1;
                let built = constructive_linking(m, &xs, &ys, &budget).unwrap();
                if built.achieved != ConnValue::Finite(target) {
                    return fail(format!(
                        "{}: constructive gives {} for {xs}, {ys}",
                        e.name, built.achieved
                    ));
                }
            }
        }
    }
    let detail = format!("{instances} instances exact, {constructive} constructive runs agree");
    within(Duration::from_secs(600), start.elapsed(), pass(detail))
}

/// Whether some U with X ⊆ U ⊆ Z∖Y gives a k-separation of M|Z.
fn extends_within(m: &Matroid, z: u64, x: u64, y: u64, k: usize) -> bool {
    let rz = m.rank_of(z);
    bits::subsets(z & !(x | y)).any(|s| {
        let u = x | s;
        let w = z & !u;
        m.rank_of(u) + m.rank_of(w) - rz < k && bits::len(u) >= k && bits::len(w) >= k
    })
}

fn break_instances(corpus: &[Entry]) -> Vec<(usize, u64, u64, usize)> {
    let mut out = Vec::new();
    for (i, e) in corpus.iter().enumerate() {
        let m = &e.matroid;
        let full = m.full_mask();
        let mut taken = 0;
        'pairs: for x in bits::subsets(full) {
            for y in bits::subsets(full & !x) {
                let k = m.rank_of(x) + m.rank_of(y) - m.rank_of(x | y) + 1;
                if bits::len(x) < k || bits::len(y) < k || x | y == full {
                    continue;
                }
                if extends_within(m, full, x, y, k) {
                    continue;
                }
                out.push((i, x, y, k));
                taken += 1;
                if taken == 2 {
                    break 'pairs;
                }
            }
        }
    }
    out
}

fn breaking_postcondition(corpus: &[Entry]) -> Outcome {
    let budget = Budget::default();
    let instances = break_instances(corpus);
    let mut verified = 0usize;
    for &(i, x, y, k) in &instances {
        let m = &corpus[i].matroid;
        let (xs, ys) = (m.set_of(x), m.set_of(y));
        let (c1, c2) = match breaking_circuits(m, &xs, &ys, k, &budget) {
            Ok(pair) => pair,
            Err(err) => {
                return fail(format!(
                    "{}: X = {xs}, Y = {ys}, k = {k}: {err}",
                    corpus[i].name
                ))
            }
        };
        let z = x | y | c1.mask() | c2.mask();
        let circuits_ok = [c1.mask(), c2.mask()]
            .iter()
            .all(|&c| m.is_circuit(&m.set_of(c)).unwrap());
        if bits::len(z) > 12 || !circuits_ok || extends_within(m, z, x, y, k) {
            return fail(format!(
                "{}: X = {xs}, Y = {ys}: {c1}, {c2} do not block",
                corpus[i].name
            ));
        }
        verified += 1;
    }
    verdict(
        verified >= 20,
        format!("{verified} instances blocked, exhaustive scan on each restriction"),
    )
}

fn windowed_monotonicity() -> Outcome {
    let policy = StabilizationPolicy {
        max_window: 10,
        plateau_length: 5,
        budget: Budget::default(),
    };
    let ladder: Vec<(&str, &str)> = vec![
        ("rung[0]", "rung[3]"),
        ("rung[0]", "rung[1]"),
        ("rung[-1]", "rung[2]"),
        ("railT[0]", "railB[0]"),
        ("railT[0]", "railT[2]"),
        ("railT[0],railB[0]", "railT[3],railB[3]"),
        ("rung[0],railT[0]", "rung[2],railB[2]"),
        ("rung[-2],rung[-1]", "rung[2],rung[3]"),
        ("railT[-1],railB[-1],rung[0]", "railT[1],railB[1]"),
        ("rung[0]", "railT[4]"),
    ];
    let uniform: Vec<(usize, &str, &str)> = vec![
        (1, "a1", "a2"),
        (2, "a1", "a2"),
        (2, "a1,a2", "a3,a4"),
        (3, "a1", "a2"),
        (3, "a1,a2", "a3"),
        (3, "a1,a2,a3", "a4,a5,a6"),
        (4, "a1,a2", "a3,a4"),
        (4, "a1,a2,a3", "a4,a5"),
        (5, "a1,a2,a3", "a4,a5,a6"),
        (2, "a3", "a5"),
    ];
    let split = |s: &str| s.split(',').map(String::from).collect::<Vec<_>>();
    let mut queries: Vec<(InfiniteFamily, &str, &str)> = ladder
        .iter()
        .map(|&(x, y)| (InfiniteFamily::DoubleLadder, x, y))
        .collect();
    queries.extend(
        uniform
            .iter()
            .map(|&(k, x, y)| (InfiniteFamily::InfiniteUniform(k), x, y)),
    );
    let mut shortest = usize::MAX;
    for (family, x, y) in &queries {
        let report = match stabilized_kappa_between(family, &split(x), &split(y), &policy) {
            Ok(r) => r,
            Err(err) => return fail(format!("{family} {x} | {y}: {err}")),
        };
        shortest = shortest.min(report.values.len());
        let ok = report.values.windows(2).all(|w| w[0].1 <= w[1].1);
        if !ok || report.values.len() < 5 {
            return fail(format!("{family} {x} | {y}: values {:?}", report.values));
        }
    }
    pass(format!(
        "{} reports non-decreasing, at least {shortest} windows each",
        queries.len()
    ))
}

fn double_ladder_counterexample() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [2, 3] {
        let check = rung_partition_check(n, &budget).unwrap();
        ok &= check.two_connected == 0 && check.deleting_all_disconnects;
        let first = check.witness.as_ref().map_or("none".to_string(), |w| {
            format!("contract {} delete {}", w.contract, w.delete)
        });
        lines.push(format!(
            "window {n}: {} of {} rung partitions 2-connected (first: {first}), deleting all rungs disconnects: {}",
            check.two_connected, check.partitions_checked, check.deleting_all_disconnects
        ));
    }
    within(
        Duration::from_secs(120),
        start.elapsed(),
        verdict(ok, lines.join("; ")),
    )
}

/// Theta windows n = 2..=6, each with three parallel paths at both ends of the
/// window: X their `x` edges, Y their `y` edges.
fn chain_instances() -> Vec<(InfiniteFamily, usize, String, String)> {
    let side = |tag: &str, from: usize| {
        (from..from + 3)
            .map(|i| format!("{tag}[{i}]"))
            .collect::<Vec<_>>()
            .join(",")
    };
    (2..=6)
        .flat_map(|n| {
            [0, n - 1].map(|from| (InfiniteFamily::Theta, n, side("x", from), side("y", from)))
        })
        .collect()
}

fn kappa_chain() -> Outcome {
    let mut done = 0usize;
    for (family, n, x, y) in chain_instances() {
        let w = family.window(n).unwrap();
        let (xs, ys) = (w.set(&x).unwrap(), w.set(&y).unwrap());
        if brute_kappa_between(&w, xs.mask(), ys.mask()) < 3 {
            return fail(format!("{family} window {n}: kappa({x}; {y}) < 3"));
        }
        let chain = match infinite_kappa_chain(&w, &xs, &ys, 3) {
            Ok(c) => c,
            Err(err) => return fail(format!("{family} window {n}: {err}")),
        };
        let mut used = 0u64;
        for c in &chain.circuits {
            let cm = c.mask();
            let rest = |s: u64| s & !used;
            // C_t is a circuit of W/(C_1 ∪ … ∪ C_{t−1}) meeting what is left of X and Y
            let is_circuit = w.rank_of(cm | used) - w.rank_of(used) == bits::len(cm) - 1
                && bits::iter(cm).all(|e| {
                    let smaller = cm & !bits::bit(e);
                    w.rank_of(smaller | used) - w.rank_of(used) == bits::len(smaller)
                });
            if cm & used != 0
                || !is_circuit
                || cm & rest(xs.mask()) == 0
                || cm & rest(ys.mask()) == 0
            {
                return fail(format!("{family} window {n}: bad circuit {c}"));
            }
            used |= cm;
        }
        let c = used & !(xs.mask() | ys.mask());
        let cx = used & xs.mask();
        let independent = w.rank_of(cx | c) - w.rank_of(c) == bits::len(cx);
        if chain.circuits.len() != 3 || !independent || chain.c.mask() != c {
            return fail(format!(
                "{family} window {n}: C_X = {} dependent in W/C",
                w.set_of(cx)
            ));
        }
        done += 1;
    }
    verdict(
        done >= 10,
        format!("{done} chains of 3 disjoint circuits, C_X independent in W/C"),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() -> ExitCode {
    let corpus = corpus::standard();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("axiom suite", Box::new(|| axiom_suite(&corpus))),
        (
            "finite-rank equivalence",
            Box::new(|| finite_rank_equivalence(&corpus)),
        ),
        (
            "duality invariance",
            Box::new(|| duality_invariance(&corpus)),
        ),
        ("submodularity", Box::new(|| submodularity(&corpus))),
        (
            "basis-independence of del",
            Box::new(|| basis_independence(&corpus)),
        ),
        (
            "2-connected iff connected",
            Box::new(|| two_connected_iff_connected(&corpus)),
        ),
        ("Tutte linking", Box::new(|| tutte_linking(&corpus))),
        (
            "breaking circuits block extension",
            Box::new(|| breaking_postcondition(&corpus)),
        ),
        ("windowed monotonicity", Box::new(windowed_monotonicity)),
        (
            "double-ladder rung partitions",
            Box::new(double_ladder_counterexample),
        ),
        ("infinite-kappa chain", Box::new(kappa_chain)),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        failures += usize::from(!outcome.passed);
        println!(
            "{status} [{:>2}] {name}: {} ({:.2?})",
            n + 1,
            outcome.detail,
            start.elapsed()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
