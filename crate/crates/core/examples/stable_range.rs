//! Decide whether 1 is in the stable range of ℤ localized at a prime set,
//! with a certificate that is checked independently.
//!
//! cargo run --example stable_range

use std::sync::Arc;

use cancellable::primeseq::PrimeSequence;
use cancellable::stablerange::{
    check_certificate, has_one_in_stable_range, solve_unit, ColumnRule, PrimeSetDescription,
};
use num_bigint::{BigInt, BigUint};

fn show(name: &str, desc: &PrimeSetDescription) {
    let v = has_one_in_stable_range(desc);
    println!("== {name}");
    print!("{v}");
    println!("certificate checks: {}\n", check_certificate(desc, &v));
}

fn main() {
    let primes = |ps: &[u64]| ps.iter().map(|&p| BigUint::from(p)).collect::<Vec<_>>();
    show("Z (no primes inverted)", &PrimeSetDescription::finite([]).unwrap());
    show("Z[1/5, 1/7]", &PrimeSetDescription::finite(primes(&[5, 7])).unwrap());
    show("all primes but 3", &PrimeSetDescription::cofinite(primes(&[3])).unwrap());

    let seq = Arc::new(PrimeSequence::build(2).unwrap());
    let total = PrimeSetDescription::column_union(seq.clone(), ColumnRule::Total { j_of_i: vec![0, 0] }).unwrap();
    show("columns P_{i,j}, j >= 0, rows 0 and 1", &total);
    let cutoff = PrimeSetDescription::column_union(seq, ColumnRule::Cutoff { i_star: 1, j_of_i: vec![0] }).unwrap();
    show("row 0 only", &cutoff);

    let sol = solve_unit(&total, &BigInt::from(7), &BigUint::from(61u32)).unwrap();
    let word: Vec<String> = sol.word.iter().map(|(p, e)| format!("{p}^{e}")).collect();
    println!(
        "7u = 1 mod 61 with u = {} from P_{{{},{}}}, u mod 61 = {}",
        word.join(" "),
        sol.column.0,
        sol.column.1,
        sol.u_mod
    );
}
