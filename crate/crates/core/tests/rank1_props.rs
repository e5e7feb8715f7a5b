use std::collections::BTreeSet;

use cancellable::rank1::{rational, ExtendedHeight, Rank1Group};
use cancellable::stablerange::{is_cancellable, CancelBasis, CancelInput, Verdict};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn height() -> impl Strategy<Value = ExtendedHeight> {
    prop_oneof![
        (0u32..4).prop_map(ExtendedHeight::Finite),
        Just(ExtendedHeight::Infinite),
    ]
}

fn group() -> impl Strategy<Value = Rank1Group> {
    proptest::collection::vec(height(), PRIMES.len()).prop_map(|hs| {
        Rank1Group::new(PRIMES.iter().zip(hs).map(|(&p, h)| (BigUint::from(p), h))).unwrap()
    })
}

/// n / ∏ p^e over PRIMES, with exponents below 6.
fn element() -> impl Strategy<Value = BigRational> {
    (-50i64..=50, proptest::collection::vec(0u32..6, PRIMES.len())).prop_map(|(n, es)| {
        let d: i64 = PRIMES.iter().zip(es).map(|(&p, e)| (p as i64).pow(e)).product();
        rational(n, d)
    })
}

/// Membership from the definition: v_p(denominator) ≤ height(p) for every p.
fn by_definition(g: &Rank1Group, x: &BigRational) -> bool {
    let mut d = x.denom().clone();
    for &p in &PRIMES {
        let mut k = 0;
        while &d % p == BigInt::from(0) {
            d /= p;
            k += 1;
        }
        if !g.height(&BigUint::from(p)).admits(k) {
            return false;
        }
    }
    d == BigInt::from(1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn membership_follows_the_height_map(g in group(), x in element()) {
        prop_assert_eq!(g.contains(&x), by_definition(&g, &x));
    }

    #[test]
    fn members_form_a_subgroup(g in group(), x in element(), y in element()) {
        if g.contains(&x) && g.contains(&y) {
            prop_assert!(g.contains(&(&x + &y)));
            prop_assert!(g.contains(&(&x - &y)));
        }
        prop_assert!(g.contains(&rational(0, 1)));
        prop_assert!(g.contains(&rational(1, 1)));
    }

    #[test]
    fn raising_a_height_only_adds_elements(g in group(), k in 0usize..PRIMES.len(), x in element()) {
        let p = BigUint::from(PRIMES[k]);
        let mut bigger = g.clone();
        bigger.set_height(p, ExtendedHeight::Infinite).unwrap();
        if g.contains(&x) {
            prop_assert!(bigger.contains(&x));
        }
    }

    /// Division by p is an automorphism exactly for the infinite-height primes.
    #[test]
    fn infinite_height_means_p_divisible(g in group(), k in 0usize..PRIMES.len()) {
        let p = PRIMES[k];
        let divisible = (1..8u32).all(|e| g.contains(&rational(1, (p as i64).pow(e))));
        prop_assert_eq!(divisible, g.height(&BigUint::from(p)).is_infinite());
        prop_assert_eq!(g.contains(&rational(1, p as i64)), g.height(&BigUint::from(p)).admits(1));
    }

    #[test]
    fn endomorphism_ring_inverts_infinite_heights(g in group()) {
        let inverted: BTreeSet<BigUint> = g
            .heights()
            .filter(|(_, h)| h.is_infinite())
            .map(|(p, _)| p.clone())
            .collect();
        let ring = g.endomorphism_ring();
        prop_assert_eq!(ring.inverted_primes().unwrap(), &inverted);
    }

    /// E(G) is ℤ localized at finitely many primes here, never ℚ, so only
    /// ℤ itself cancels.
    #[test]
    fn finitely_many_infinite_heights_cancel_only_for_z(g in group()) {
        let v = is_cancellable(CancelInput::Group(&g));
        if g.is_trivially_z() {
            prop_assert_eq!(v.verdict, Verdict::Yes);
            prop_assert!(matches!(v.basis, CancelBasis::IsZ));
        } else {
            prop_assert_eq!(v.verdict, Verdict::No);
        }
    }

    #[test]
    fn group_files_roundtrip(g in group()) {
        let g = g.with_label("random");
        prop_assert_eq!(g.to_string().parse::<Rank1Group>().unwrap(), g);
    }
}

#[test]
fn heights_reject_composites() {
    let mut g = Rank1Group::integers();
    assert!(g.set_height(BigUint::from(9u32), ExtendedHeight::Infinite).is_err());
}
