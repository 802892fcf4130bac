//! Algebraic invariants under random inputs.

use bianchi_core::congruence::{coset_of, coset_table, degree_one_primes, LevelIdeal};
use bianchi_core::exactla::{snf, EuclideanRing, Integers, Matrix};
use bianchi_core::polymod::{act_ekl, act_ekl_mod, Weight};
use bianchi_core::presentations::{load_presentation, GroupId, Word};
use bianchi_core::ring::{QuadInt, ResidueField, RingId, Z};
use num_bigint::BigInt;
use proptest::prelude::*;

const DS: [u32; 5] = [1, 2, 3, 7, 11];

fn ring() -> impl Strategy<Value = RingId> {
    prop::sample::select(DS.to_vec()).prop_map(|d| RingId::new(d).unwrap())
}

fn elem(ring: RingId, bound: i64) -> impl Strategy<Value = QuadInt> {
    (-bound..=bound, -bound..=bound).prop_map(move |(a, b)| ring.elem(a, b))
}

fn ring_and_pair(bound: i64) -> impl Strategy<Value = (RingId, QuadInt, QuadInt)> {
    ring().prop_flat_map(move |r| (Just(r), elem(r, bound), elem(r, bound)))
}

/// A group and a random word in its generators.
fn word(d: u32, max_len: usize) -> impl Strategy<Value = (GroupId, Vec<(usize, i32)>)> {
    let id = GroupId::psl(d).unwrap();
    let n = load_presentation(id).unwrap().ngens();
    (Just(id), prop::collection::vec((0..n, prop::sample::select(vec![1, -1])), 0..max_len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn euclidean_division((r, a, b) in ring_and_pair(1 << 40)) {
        prop_assume!(!b.is_zero());
        let (q, rem) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &rem, a);
        prop_assert!(rem.norm() < b.norm(), "in O_{}", r.d());
    }

    #[test]
    fn norm_is_multiplicative((_r, a, b) in ring_and_pair(1 << 40)) {
        prop_assert_eq!((&a * &b).norm(), &a.norm() * &b.norm());
        prop_assert_eq!((&a * &a.conj()).a, a.norm());
    }

    #[test]
    fn canonical_associate((r, a, _b) in ring_and_pair(1000)) {
        let c = a.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(c.is_associate(&a));
        for u in r.units() {
            prop_assert_eq!((&u * &a).canonical(), c.clone());
        }
        let (c2, unit) = a.canonical_with_unit();
        prop_assert_eq!(&unit * &a, c2);
        prop_assert_eq!(unit.norm(), Z::from(1));
    }

    #[test]
    fn bezout((_r, a, b) in ring_and_pair(1 << 20)) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let (g, u, v) = a.xgcd(&b).unwrap();
        prop_assert_eq!(&(&u * &a) + &(&v * &b), g.clone());
        prop_assert!(g.divides(&a) && g.divides(&b));
        prop_assert!(g.is_associate(&a.gcd(&b).unwrap()));
    }

    #[test]
    fn z_arithmetic_matches_bigint(a in any::<i64>(), b in any::<i64>()) {
        let (x, y) = (Z::from(a), Z::from(b));
        let (ba, bb) = (BigInt::from(a), BigInt::from(b));
        prop_assert_eq!((&x + &y).to_big(), &ba + &bb);
        prop_assert_eq!((&x - &y).to_big(), &ba - &bb);
        prop_assert_eq!((&x * &y).to_big(), &ba * &bb);
        prop_assert_eq!(Z::from_big(&ba * &bb), &x * &y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn action_is_a_right_action(
        (id, g) in prop::sample::select(DS.to_vec()).prop_flat_map(|d| word(d, 6)),
        h in prop::collection::vec((0usize..2, prop::sample::select(vec![1, -1])), 0..6),
        k in 0u32..4,
        l in 0u32..4,
    ) {
        let p = load_presentation(id).unwrap();
        let ring = id.ring;
        let w = Weight::new(k, l);
        let mg = p.evaluate(&Word::from_letters(g));
        let mh = p.evaluate(&Word::from_letters(h));
        let lhs = act_ekl(ring, &(&mg * &mh), w);
        let rhs = act_ekl(ring, &mg, w).mul(&ring, &act_ekl(ring, &mh, w));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_commutes_with_reduction(
        (id, g) in prop::sample::select(DS.to_vec()).prop_flat_map(|d| word(d, 8)),
        k in 0u32..4,
        l in 0u32..4,
        p_idx in 0usize..4,
    ) {
        let ring = id.ring;
        let pi = degree_one_primes(ring, 11, 200)[p_idx].clone();
        let field = ResidueField::new(&pi).unwrap();
        let m = load_presentation(id).unwrap().evaluate(&Word::from_letters(g));
        let w = Weight::new(k, l);
        prop_assert_eq!(act_ekl_mod(&field, &m, w), act_ekl(ring, &m, w).map(|x| field.reduce(x)));
    }

    #[test]
    fn smith_divisors_over_o_d((r, a, b) in ring_and_pair(50), c in -50i64..=50, e in -50i64..=50) {
        let m = Matrix::from_rows(2, vec![vec![a.clone(), b.clone()], vec![r.elem(c, 1), r.elem(e, -2)]]);
        let det = &(&a * &r.elem(e, -2)) - &(&b * &r.elem(c, 1));
        prop_assume!(!det.is_zero());
        let dec = snf(&r, &m);
        prop_assert_eq!(dec.rank, 0);
        for pair in dec.divisors.windows(2) {
            prop_assert!(pair[0].divides(&pair[1]));
        }
        for x in &dec.divisors {
            prop_assert_eq!(x.canonical(), x.clone());
        }
        prop_assert_eq!(dec.torsion_order(), det.norm());
    }

    #[test]
    fn smith_divisors_over_z(entries in prop::collection::vec(-30i64..=30, 9)) {
        let m = Matrix::from_fn(3, 3, |i, j| Z::from(entries[3 * i + j]));
        let e = |i: usize, j: usize| entries[3 * i + j];
        let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        let dec = snf(&Integers, &m);
        for pair in dec.divisors.windows(2) {
            prop_assert!(Integers.divides(&pair[0], &pair[1]));
        }
        if det == 0 {
            prop_assert!(dec.rank > 0);
        } else {
            prop_assert_eq!(dec.rank, 0);
            prop_assert_eq!(dec.torsion_order(), Z::from(det.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coset_table_follows_the_group(
        (id, letters) in prop::sample::select(DS.to_vec()).prop_flat_map(|d| word(d, 12)),
        norm_idx in 0usize..3,
    ) {
        let p = load_presentation(id).unwrap();
        let pi = degree_one_primes(id.ring, 5, 120)[norm_idx].clone();
        let level = LevelIdeal::from_generator(&pi).unwrap();
        let table = coset_table(&p, &level).unwrap();
        let mut c = 0;
        for &(g, e) in &letters {
            c = table.perm(g, e)[c];
        }
        prop_assert_eq!(c, coset_of(&level, &p.evaluate(&Word::from_letters(letters.clone()))));
        prop_assert_eq!(coset_of(&level, table.transversal(c)), c);
    }
}
