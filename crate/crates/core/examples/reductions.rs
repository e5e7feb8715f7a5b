//! Quantifier tables to groups and rings: heights of G(x), its
//! cancellation verdict, and the ring R(x).
//!
//! cargo run --example reductions

use std::sync::Arc;

use cancellable::primeseq::PrimeSequence;
use cancellable::reduction::{build_group, build_ring, classify, QuantifierTable2, QuantifierTable4};

fn main() {
    let seq = Arc::new(PrimeSequence::build(2).unwrap());
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");
    for file in ["total.pi4", "cutoff.pi4"] {
        let text = std::fs::read_to_string(format!("{data}/{file}")).unwrap();
        let table = QuantifierTable4::parse(&text).unwrap();
        println!("== {file}: {}", table.label());
        let g = build_group(&table, &seq).unwrap();
        print!("{g}");
        print!("{}", classify(&table, seq.clone()).unwrap());
        println!();
    }
    let text = std::fs::read_to_string(format!("{data}/ring.pi2")).unwrap();
    let table = QuantifierTable2::parse(&text).unwrap();
    println!("== ring.pi2: {}", table.label());
    print!("{}", build_ring(&table, seq).unwrap());
}
