//! Exact membership in finitely generated subgroups of ℚ^n.
//!
//! cargo run --example lattice_membership

use cancellable::lattice::{hermite_normal_form, intersect};
use cancellable::rank1::rational;
use cancellable::treegroup::member;
use num_bigint::BigInt;

fn main() {
    let gens = vec![
        vec![rational(1, 2), rational(1, 3), rational(0, 1)],
        vec![rational(0, 1), rational(1, 1), rational(2, 5)],
        vec![rational(1, 1), rational(0, 1), rational(1, 1)],
    ];
    for v in [
        vec![rational(3, 2), rational(4, 3), rational(7, 5)],
        vec![rational(1, 4), rational(0, 1), rational(0, 1)],
    ] {
        let shown: Vec<String> = v.iter().map(ToString::to_string).collect();
        match member(&v, &gens) {
            Some(w) => println!("({}) = {w:?} over the generators", shown.join(", ")),
            None => println!("({}) is not in the group", shown.join(", ")),
        }
    }

    let m: Vec<Vec<BigInt>> = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let hf = hermite_normal_form(&m);
    println!("HNF rows: {:?}", hf.hnf);
    let a: Vec<Vec<BigInt>> = vec![vec![2.into(), 0.into()], vec![0.into(), 1.into()]];
    let b: Vec<Vec<BigInt>> = vec![vec![1.into(), 1.into()], vec![0.into(), 3.into()]];
    println!("2Z x Z meets <(1,1), (0,3)> in {:?}", intersect(&a, &b, 2));
}
