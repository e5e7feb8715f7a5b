mod common;

use cancellable::lattice::{hermite_normal_form, intersect, Echelon, RationalLattice};
use cancellable::rank1::rational;
use cancellable::treegroup::member;
use common::lattice::{check_instance, random_instance, Tally};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[test]
fn member_matches_enumeration_on_random_instances() {
    let mut rng = common::rng(7);
    let mut tally = Tally::default();
    for _ in 0..200 {
        let inst = random_instance(&mut rng);
        check_instance(&inst, &mut rng, &mut tally).unwrap();
    }
    assert!(tally.members > 0 && tally.members < tally.queries, "{tally:?}");
}

#[test]
fn hnf_of_a_known_matrix() {
    let hf = hermite_normal_form(&ints(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]));
    assert_eq!(hf.hnf, ints(&[&[2, 0, 120], &[0, 2, 20], &[0, 0, 156]]));
    assert_eq!(hf.rank, 3);
}

#[test]
fn intersection_of_coordinate_lattices() {
    // 2ℤ × ℤ ∩ ℤ × 3ℤ = 2ℤ × 3ℤ
    let a = ints(&[&[2, 0], &[0, 1]]);
    let b = ints(&[&[1, 0], &[0, 3]]);
    assert_eq!(intersect(&a, &b, 2), ints(&[&[2, 0], &[0, 3]]));
    let line = ints(&[&[1, 1]]);
    let axis = ints(&[&[1, 0]]);
    assert!(intersect(&line, &axis, 2).is_empty());
}

#[test]
fn rational_lattice_scales_by_the_common_denominator() {
    let gens = vec![vec![rational(1, 2), rational(1, 3)], vec![rational(0, 1), rational(1, 1)]];
    let lat = RationalLattice::new(&gens, 2, true);
    assert_eq!(lat.denominator(), &BigInt::from(6));
    assert!(lat.contains(&[rational(1, 2), rational(4, 3)]));
    assert!(!lat.contains(&[rational(1, 4), rational(0, 1)]));
    assert_eq!(lat.witness(&[rational(1, 1), rational(2, 3)]).unwrap(), vec![(0, BigInt::from(2))]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn echelon_insertion_order_does_not_matter(
        rows in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 4), 1..6),
    ) {
        let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut fwd = Echelon::new(4, false);
        let mut rev = Echelon::new(4, false);
        for (i, r) in m.iter().enumerate() {
            fwd.insert(r.clone(), i);
        }
        for (i, r) in m.iter().enumerate().rev() {
            rev.insert(r.clone(), i);
        }
        prop_assert_eq!(fwd.basis(), rev.basis());
    }

    #[test]
    fn witnesses_reproduce_combinations(
        gens in proptest::collection::vec(proptest::collection::vec((-3i64..=3, 1i64..=3), 3), 1..5),
        coeffs in proptest::collection::vec(-4i64..=4, 5),
    ) {
        let gens: Vec<Vec<BigRational>> = gens
            .iter()
            .map(|g| g.iter().map(|&(n, d)| rational(n, d)).collect())
            .collect();
        let mut v = vec![rational(0, 1); 3];
        for (g, &c) in gens.iter().zip(&coeffs) {
            for (a, x) in v.iter_mut().zip(g) {
                *a += x * BigRational::from_integer(c.into());
            }
        }
        prop_assert!(member(&v, &gens).is_some());
    }
}

#[test]
fn tally_counts_queries() {
    let mut rng = common::rng(1);
    let mut tally = Tally::default();
    let inst = random_instance(&mut rng);
    check_instance(&inst, &mut rng, &mut tally).unwrap();
    assert_eq!(tally.queries, 16);
}
