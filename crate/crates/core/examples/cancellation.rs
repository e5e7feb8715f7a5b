//! Rank-1 groups given by height maps, their endomorphism rings and
//! cancellation verdicts.
//!
//! cargo run --example cancellation

use cancellable::rank1::{rational, Rank1Group};
use cancellable::stablerange::{is_cancellable, CancelInput};

fn main() {
    let groups = [
        "label Z\n",
        "label Z[1/5] with 7 of height 2\n5 inf\n7 2\n",
        "label heights 1 at 2 and 3\n2 1\n3 1\n",
        "label Z[1/2, 1/3]\n2 inf\n3 inf\n",
    ];
    for text in groups {
        let g: Rank1Group = text.parse().unwrap();
        println!("== {}", g.label());
        for x in [rational(1, 2), rational(1, 25), rational(3, 49), rational(1, 343)] {
            println!("  {x} in G: {}", g.contains(&x));
        }
        let ring = g.endomorphism_ring();
        let inverted: Vec<String> = ring.inverted_primes().unwrap().iter().map(ToString::to_string).collect();
        println!("  E(G) = Z[1/p : p in {{{}}}]", inverted.join(", "));
        print!("{}", is_cancellable(CancelInput::Group(&g)));
        println!();
    }
}
