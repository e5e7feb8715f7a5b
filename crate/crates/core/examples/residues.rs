//! Quadratic residues, reciprocity, primes in progressions and unit group
//! generators.
//!
//! cargo run --example residues -- 61

use cancellable::ntheory::{
    crt_combine, dirichlet_search, is_quadratic_residue, reciprocity_check, sieve,
    unit_group_generators, Congruence,
};
use num_bigint::{BigInt, BigUint};

fn main() {
    let q: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("an odd prime"))
        .unwrap_or(61);
    let qb = BigUint::from(q);
    let residues: Vec<u64> = (1..q)
        .filter(|&a| is_quadratic_residue(&BigInt::from(a), &qb).unwrap())
        .collect();
    println!("{} residues mod {q}: {residues:?}", residues.len());

    let odd: Vec<u64> = sieve(100).into_iter().filter(|&p| p > 2).map(u64::from).collect();
    let mut pairs = 0;
    for (i, p) in odd.iter().enumerate() {
        for r in &odd[i + 1..] {
            assert!(reciprocity_check(&BigUint::from(*p), &BigUint::from(*r)).unwrap());
            pairs += 1;
        }
    }
    println!("reciprocity holds for all {pairs} pairs of odd primes below 100");

    let p = dirichlet_search(&BigInt::from(1), &BigUint::from(60u32), &BigInt::from(0)).unwrap();
    println!("least prime = 1 mod 60: {p}");

    let c = crt_combine(&[
        Congruence::new(BigInt::from(1), BigUint::from(61u32)).unwrap(),
        Congruence::new(BigInt::from(2), BigUint::from(3u32)).unwrap(),
    ])
    .unwrap();
    println!("x = 1 mod 61 and x = 2 mod 3: {c}");

    for n in [3u32, 8, 366] {
        let g = unit_group_generators(&BigUint::from(n)).unwrap();
        let g: Vec<String> = g.iter().map(ToString::to_string).collect();
        println!("(Z/{n})^x generated by {}", g.join(", "));
    }
}
