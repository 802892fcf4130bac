//! Congruence subgroups checked against independent routes to the same groups.

use std::time::Duration;

use bianchi_core::congruence::{
    abelianization_with, coset_table, coset_table_seeded, degree_one_primes, lmr_predicate, lmr_primes, schreier_relations,
    LevelIdeal,
};
use bianchi_core::h1::homology_subgroup_trivial;
use bianchi_core::presentations::{load_presentation, GroupId};
use bianchi_core::ring::arith::is_probable_prime;
use bianchi_core::ring::{RingId, Z};

/// Prime ideals of O_1 with norm at most `bound`, both members of each
/// conjugate pair.
fn prime_levels_o1(bound: u64) -> Vec<LevelIdeal> {
    let ring = RingId::new(1).unwrap();
    let mut out = Vec::new();
    for pi in degree_one_primes(ring, 2, bound) {
        out.push(LevelIdeal::from_generator(&pi).unwrap());
        let conj = LevelIdeal::from_generator(&pi.conj()).unwrap();
        if conj.generator != pi {
            out.push(conj);
        }
    }
    for p in [3, 7] {
        out.push(LevelIdeal::from_generator(&ring.int(p)).unwrap());
    }
    out
}

#[test]
fn reidemeister_schreier_matches_shapiro_homology() {
    let p = load_presentation(GroupId::psl(1).unwrap()).unwrap();
    let levels = prime_levels_o1(100);
    assert_eq!(levels.len(), 25);
    for level in &levels {
        let table = coset_table(&p, level).unwrap();
        let rs = schreier_relations(&p, &table).cokernel();
        let fox = homology_subgroup_trivial(&p, &table).unwrap();
        assert_eq!(rs.rank, fox.rank, "rank at {level}");
        assert_eq!(rs.divisor_norms, fox.divisor_norms, "torsion at {level}");
    }
}

#[test]
fn transversal_choice_does_not_matter() {
    let ring = RingId::new(2).unwrap();
    let p = load_presentation(GroupId::psl(2).unwrap()).unwrap();
    for pi in degree_one_primes(ring, 2, 150) {
        let level = LevelIdeal::from_generator(&pi).unwrap();
        let base = schreier_relations(&p, &coset_table(&p, &level).unwrap()).cokernel();
        for seed in [1, 7] {
            let table = coset_table_seeded(&p, &level, seed).unwrap();
            assert_eq!(schreier_relations(&p, &table).cokernel(), base, "seed {seed} at {level}");
        }
    }
}

#[test]
fn lmr_predicate_has_both_outcomes() {
    let p = load_presentation(GroupId::psl(1).unwrap()).unwrap();
    let qs = lmr_primes(20);
    assert_eq!(qs.len(), 20);
    let outcomes: Vec<bool> = qs.iter().map(|q| lmr_predicate(&p, q).unwrap()).collect();
    assert!(outcomes.iter().any(|b| *b) && outcomes.iter().any(|b| !*b), "{outcomes:?}");
}

#[test]
fn unfactored_cofactors_are_reported() {
    // the torsion at this level has three prime factors above 10^5
    let ring = RingId::new(1).unwrap();
    let pi = degree_one_primes(ring, 4937, 4937).pop().unwrap();
    let level = LevelIdeal::from_generator(&pi).unwrap();
    let p = load_presentation(GroupId::psl(1).unwrap()).unwrap();
    let quick = abelianization_with(&p, &level, Duration::ZERO).unwrap();
    assert!(!quick.unfactored.is_empty());
    for c in &quick.unfactored {
        assert!(!is_probable_prime(&c.to_big()), "{c} reported as unfactored but prime");
        assert!(quick.decomposition.divisor_norms.iter().any(|n| n.div_mod_floor(c).1 == Z::ZERO));
    }
    let full = abelianization_with(&p, &level, Duration::from_secs(30)).unwrap();
    assert!(full.unfactored.is_empty());
    assert_eq!(full.torsion_primes.last().unwrap(), &"157824962047".parse::<Z>().unwrap());
    assert_eq!(quick.decomposition, full.decomposition);
}
