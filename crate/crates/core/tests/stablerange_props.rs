mod common;

use std::collections::BTreeSet;

use cancellable::ntheory::{is_prime_u64, is_quadratic_residue};
use cancellable::stablerange::{
    check_certificate, find_obstruction, has_one_in_stable_range, parse_description, solve_unit,
    Certificate, ColumnRule, PrimeSetDescription, SolveError, Verdict,
};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::Rng;

fn b(n: u64) -> BigUint {
    BigUint::from(n)
}

fn small_primes() -> Vec<u64> {
    (2..60).filter(|&p| is_prime_u64(p)).collect()
}

/// Whether n is ± a product of primes from `s` (n ≠ 0).
fn is_s_unit(mut n: i128, s: &BTreeSet<u64>) -> bool {
    if n == 0 {
        return false;
    }
    n = n.abs();
    for &p in s {
        while n % p as i128 == 0 {
            n /= p as i128;
        }
    }
    n == 1
}

fn products_up_to(s: &BTreeSet<u64>, len: usize, cap: i128) -> Vec<i128> {
    let mut out = vec![1i128];
    let mut layer = vec![1i128];
    for _ in 0..len {
        let next: Vec<i128> = layer
            .iter()
            .flat_map(|&x| s.iter().map(move |&p| x * p as i128))
            .filter(|&x| x <= cap)
            .collect();
        out.extend(&next);
        layer = next;
    }
    out
}

fn subset(mask: u32) -> BTreeSet<u64> {
    small_primes()
        .into_iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, p)| p)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// A "no" is sound: no h = n/d with small n and S-smooth d makes
    /// α₁ + α₂h a unit of ℤ_S.
    #[test]
    fn finite_no_resists_small_witnesses(mask in 0u32..(1 << 10)) {
        let s = subset(mask);
        let desc = PrimeSetDescription::finite(s.iter().map(|&p| b(p))).unwrap();
        let v = has_one_in_stable_range(&desc);
        prop_assert_eq!(v.verdict, Verdict::No);
        prop_assert!(check_certificate(&desc, &v));
        let Certificate::Obstruction(o) = &v.certificate else { panic!("no obstruction") };
        let (a1, a2) = (o.alpha1.to_i128().unwrap(), o.alpha2.to_i128().unwrap());
        for d in products_up_to(&s, 2, 10_000) {
            for n in -40i128..=40 {
                prop_assert!(!is_s_unit(a1 * d + a2 * n, &s), "h = {}/{}", n, d);
            }
        }
        let residues = common::signed_products(
            &s.iter().map(|&p| b(p)).collect::<Vec<_>>(), 4, a2 as u64);
        prop_assert!(!residues.contains(&((a1 % a2) as u64)));
    }

    /// A "yes" for a cofinite set: small coprime pairs always admit some h
    /// with α₁ + α₂h a unit.
    #[test]
    fn cofinite_yes_admits_witnesses(mask in 0u32..(1 << 6), a1 in 1i128..200, a2 in 2i128..200) {
        prop_assume!(a1.gcd(&a2) == 1);
        let ex = subset(mask);
        let desc = PrimeSetDescription::cofinite(ex.iter().map(|&p| b(p))).unwrap();
        let v = has_one_in_stable_range(&desc);
        prop_assert_eq!(v.verdict, Verdict::Yes);
        prop_assert!(check_certificate(&desc, &v));
        let unit = |x: i128| x != 0 && ex.iter().all(|&p| x % p as i128 != 0);
        prop_assert!((-500..500).any(|h| unit(a1 + a2 * h)));
    }

    #[test]
    fn total_rules_solve_random_probes(seed in any::<u64>()) {
        let seq = common::seq();
        let mut rng = common::rng(seed);
        let rule = common::random_rule(&mut rng, true);
        let rows = rule.j_of_i().len();
        let desc = PrimeSetDescription::column_union(seq.clone(), rule.clone()).unwrap();
        let v = has_one_in_stable_range(&desc);
        prop_assert_eq!(v.verdict, Verdict::Yes);
        prop_assert!(check_certificate(&desc, &v));
        let members = desc.known_members();
        let mut solved = 0;
        for _ in 0..10 {
            let i = rng.gen_range(0..rows.min(3));
            let mut alpha2 = BigUint::one();
            for (p, e) in seq.a_factorization(i).iter() {
                if !members.contains(p) {
                    alpha2 *= p.pow(rng.gen_range(0..=e));
                }
            }
            let a1 = loop {
                let c: u64 = rng.gen_range(1..1_000_000);
                let c = b(c);
                if c.gcd(&alpha2).is_one() && members.iter().all(|p| !(&c % p).is_zero()) {
                    break c;
                }
            };
            let sol = solve_unit(&desc, &BigInt::from(a1.clone()), &alpha2).unwrap();
            prop_assert!(sol.checks_out());
            prop_assert!(rule.includes(sol.column.0, sol.column.1));
            for (p, _) in &sol.word {
                prop_assert!(desc.contains(p) == Some(true));
            }
            let u = sol.word.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.modpow(e, &alpha2) % &alpha2);
            prop_assert!(((a1 * u) % &alpha2) == (BigUint::one() % &alpha2));
            solved += 1;
        }
        prop_assert_eq!(solved, 10);
    }

    #[test]
    fn cutoff_rules_are_refuted_by_quadratic_residues(seed in any::<u64>()) {
        let seq = common::seq();
        let mut rng = common::rng(seed);
        let rule = common::random_rule(&mut rng, false);
        let ColumnRule::Cutoff { i_star, .. } = rule else { unreachable!() };
        let desc = PrimeSetDescription::column_union(seq.clone(), rule).unwrap();
        let o = find_obstruction(&desc, 1000).unwrap();
        let q = seq.q(i_star).unwrap();
        prop_assert_eq!(&o.alpha2, q);
        prop_assert!(!is_quadratic_residue(&BigInt::from(o.alpha1.clone()), q).unwrap());
        for p in desc.known_members() {
            prop_assert!(is_quadratic_residue(&BigInt::from(p), q).unwrap());
        }
        let v = has_one_in_stable_range(&desc);
        prop_assert_eq!(v.verdict, Verdict::No);
        prop_assert!(check_certificate(&desc, &v));
    }
}

#[test]
fn solve_unit_rejects_bad_inputs() {
    let seq = common::seq();
    let desc = PrimeSetDescription::column_union(seq.clone(), ColumnRule::Total { j_of_i: vec![0, 0] }).unwrap();
    assert!(matches!(
        solve_unit(&desc, &BigInt::from(6), &b(3)),
        Err(SolveError::NotCoprime { .. })
    ));
    assert!(matches!(
        solve_unit(&desc, &BigInt::from(5), &b(3)),
        Err(SolveError::SharesDescribedPrime(_))
    ));
    assert!(matches!(
        solve_unit(&desc, &BigInt::from(2), &b(7)),
        Err(SolveError::StageNotBuilt { .. })
    ));
    let finite = PrimeSetDescription::finite([b(5)]).unwrap();
    assert_eq!(solve_unit(&finite, &BigInt::from(2), &b(3)), Err(SolveError::NotTotal));
}

#[test]
fn missing_stage_is_unknown() {
    let seq = common::seq();
    let desc = PrimeSetDescription::column_union(seq, ColumnRule::Total { j_of_i: vec![0, 5] }).unwrap();
    let v = has_one_in_stable_range(&desc);
    assert_eq!(v.verdict, Verdict::Unknown);
    assert!(matches!(v.certificate, Certificate::MissingStage { needed: 6, built: 3 }));
    assert!(check_certificate(&desc, &v));
}

#[test]
fn description_files_report_line_numbers() {
    let err = parse_description("kind finite\nprimes 5 x\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let err = parse_description("kind column-union\nrule cutoff 2\nrow 0 0\n").unwrap_err();
    assert!(err.to_string().contains("line"), "{err}");
}
