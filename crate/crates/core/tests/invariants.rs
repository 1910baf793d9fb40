use std::sync::OnceLock;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use matroid_kappa::connectivity::{
    kappa, kappa_between, kappa_between_exhaustive, kappa_with_bases, random_basis,
};
use matroid_kappa::constructions::{components, components_fast, dual, take_minor};
use matroid_kappa::corpus::{self, Entry};
use matroid_kappa::matroid::{enumerate_circuits, fundamental_circuit};
use matroid_kappa::set::bits;
use matroid_kappa::{Budget, ConnValue, Matroid, MinorSpec};

fn corpus() -> &'static [Entry] {
    static CORPUS: OnceLock<Vec<Entry>> = OnceLock::new();
    CORPUS.get_or_init(corpus::standard)
}

/// A corpus matroid with a random subset mask.
fn matroid_and_masks(count: usize) -> impl Strategy<Value = (usize, Vec<u64>)> {
    (
        0..corpus().len(),
        proptest::collection::vec(any::<u64>(), count),
    )
        .prop_map(|(i, masks)| {
            let full = corpus()[i].matroid.full_mask();
            (i, masks.into_iter().map(|s| s & full).collect())
        })
}

fn k(m: &Matroid, mask: u64) -> ConnValue {
    kappa(m, &m.set_of(mask)).unwrap()
}

fn rank_kappa(m: &Matroid, mask: u64) -> usize {
    m.rank_of(mask) + m.rank_of(m.full_mask() & !mask) - m.full_rank()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kappa_is_self_dual((i, masks) in matroid_and_masks(1)) {
        let m = &corpus()[i].matroid;
        prop_assert_eq!(k(m, masks[0]), k(&dual(m), masks[0]));
    }

    #[test]
    fn kappa_matches_rank_formula((i, masks) in matroid_and_masks(1)) {
        let m = &corpus()[i].matroid;
        prop_assert_eq!(k(m, masks[0]), ConnValue::Finite(rank_kappa(m, masks[0])));
    }

    #[test]
    fn kappa_is_submodular((i, masks) in matroid_and_masks(2)) {
        let m = &corpus()[i].matroid;
        let (x, y) = (masks[0], masks[1]);
        let lhs = rank_kappa(m, x) + rank_kappa(m, y);
        prop_assert!(lhs >= rank_kappa(m, x | y) + rank_kappa(m, x & y));
    }

    #[test]
    fn del_ignores_basis_choice((i, masks) in matroid_and_masks(1), seed in any::<u64>()) {
        let m = &corpus()[i].matroid;
        let x = m.set_of(masks[0]);
        let mut rng = StdRng::seed_from_u64(seed);
        let bx = random_basis(m, &x, &mut rng).unwrap();
        let by = random_basis(m, &x.complement(), &mut rng).unwrap();
        prop_assert_eq!(kappa_with_bases(m, &x, &bx, &by).unwrap(), kappa(m, &x).unwrap());
    }

    #[test]
    fn kappa_between_is_exact((i, masks) in matroid_and_masks(2)) {
        let m = &corpus()[i].matroid;
        let (x, y) = (masks[0], masks[1] & !masks[0]);
        let fast = kappa_between(m, &m.set_of(x), &m.set_of(y)).unwrap();
        let slow = kappa_between_exhaustive(m, &m.set_of(x), &m.set_of(y), &Budget::default()).unwrap();
        prop_assert_eq!(&fast, &slow);
        let free = m.full_mask() & !(x | y);
        let first = bits::subsets(free).map(|s| x | s).min_by_key(|&u| rank_kappa(m, u)).unwrap();
        prop_assert_eq!(fast.witness.mask(), first);
    }

    #[test]
    fn minors_do_not_raise_kappa_between((i, masks) in matroid_and_masks(3), contract_bias in any::<u64>()) {
        let m = &corpus()[i].matroid;
        let (x, y) = (masks[0], masks[1] & !masks[0]);
        let removed = masks[2] & !(x | y);
        let c = removed & contract_bias;
        let spec = MinorSpec::new(m.set_of(c), m.set_of(removed & !c)).unwrap();
        let minor = take_minor(m, &spec).unwrap();
        let (xs, ys) = (m.set_of(x).to_ground(minor.ground()).unwrap(), m.set_of(y).to_ground(minor.ground()).unwrap());
        let before = kappa_between(m, &m.set_of(x), &m.set_of(y)).unwrap().value;
        let after = kappa_between(&minor, &xs, &ys).unwrap().value;
        prop_assert!(after <= before);
    }

    #[test]
    fn independence_is_downward_closed((i, masks) in matroid_and_masks(1)) {
        let m = &corpus()[i].matroid;
        let b = matroid_kappa::matroid::extend_to_basis(m, &m.set_of(masks[0] & m.canonical_basis_mask()), &m.full_set())
            .unwrap()
            .mask();
        for s in bits::subsets(b) {
            prop_assert!(m.indep(s));
        }
    }

    #[test]
    fn bases_exchange((i, seed) in (0..corpus().len(), any::<u64>())) {
        let m = &corpus()[i].matroid;
        let mut rng = StdRng::seed_from_u64(seed);
        let b1 = random_basis(m, &m.full_set(), &mut rng).unwrap().mask();
        let b2 = random_basis(m, &m.full_set(), &mut rng).unwrap().mask();
        for e in bits::iter(b1 & !b2) {
            let found = bits::iter(b2 & !b1).any(|f| m.indep((b1 & !bits::bit(e)) | bits::bit(f)));
            prop_assert!(found);
        }
    }

    #[test]
    fn fundamental_circuits_are_unique((i, seed) in (0..corpus().len(), any::<u64>())) {
        let m = &corpus()[i].matroid;
        let mut rng = StdRng::seed_from_u64(seed);
        let b = random_basis(m, &m.full_set(), &mut rng).unwrap();
        for e in bits::iter(m.full_mask() & !b.mask()) {
            let label = m.ground().label(e);
            let c = fundamental_circuit(m, &b, label).unwrap();
            let span = b.mask() | bits::bit(e);
            let inside: Vec<u64> = bits::subsets(span).filter(|&s| m.is_circuit(&m.set_of(s)).unwrap()).collect();
            prop_assert_eq!(inside, vec![c.mask()]);
        }
    }

    #[test]
    fn components_agree(i in 0..corpus().len()) {
        let m = &corpus()[i].matroid;
        prop_assert_eq!(components(m, &Budget::default()).unwrap(), components_fast(m));
    }
}

#[test]
fn circuits_and_cocircuits_never_meet_in_one_element() {
    for entry in corpus() {
        let m = &entry.matroid;
        let circuits = enumerate_circuits(m, &Budget::default()).unwrap();
        let cocircuits = enumerate_circuits(&dual(m), &Budget::default()).unwrap();
        for c in &circuits {
            for d in &cocircuits {
                assert_ne!(
                    bits::len(c.mask() & d.mask()),
                    1,
                    "{}: {c} and {d}",
                    entry.name
                );
            }
        }
    }
}
