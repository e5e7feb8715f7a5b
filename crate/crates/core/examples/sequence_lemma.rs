//! Build the prime sequence stage by stage and check every invariant.
//!
//! cargo run --release --example sequence_lemma -- 3

use std::time::Instant;

use cancellable::primeseq::PrimeSequence;

fn digits(n: &num_bigint::BigUint) -> String {
    let s = n.to_string();
    if s.len() <= 24 {
        s
    } else {
        format!("{}...{} ({} digits)", &s[..8], &s[s.len() - 8..], s.len())
    }
}

fn main() {
    let stages: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("stage count"))
        .unwrap_or(2);
    let start = Instant::now();
    let seq = PrimeSequence::build(stages).expect("build");
    println!("built {stages} stages in {:.2?}", start.elapsed());
    for s in 0..=stages {
        println!("a_{s} = {}", digits(seq.a(s).unwrap()));
        if s > 0 {
            println!("q_{s} = {}   r_{s} = {}", digits(seq.q(s).unwrap()), seq.r(s).unwrap());
        }
    }
    for ((i, j), col) in seq.columns() {
        let shown: Vec<String> = col.iter().map(digits).collect();
        println!("P_{{{i},{j}}} = {{{}}}", shown.join(", "));
    }
    let start = Instant::now();
    let report = seq.verify_invariants();
    print!("{report}");
    println!("verified in {:.2?}", start.elapsed());
}
