//! Split the tree group along a path into A ⊕ B⁰ ⊕ B¹ and probe its pure
//! components.
//!
//! cargo run --release --example tree_decomposition

use std::time::Instant;

use cancellable::treegroup::probe::{default_window, safe_bound};
use cancellable::treegroup::{
    pure_component_probe, verify_decomposition, GeneratorSet, GroupLattice, ProbeFamily, TreeT,
    Truncation,
};

fn main() {
    let tree = TreeT::new([vec![0], vec![0, 0], vec![0, 0, 0], vec![1]]).unwrap();
    let trunc = Truncation::covering(&tree, 2, 2, 3, 2).unwrap();
    let start = Instant::now();
    let set = GeneratorSet::build(&tree, &trunc).unwrap();
    let lattice = GroupLattice::new(&set, false);
    println!(
        "{} generators over {} coordinates, rank {}, denominator {} digits ({:.2?})",
        set.len(),
        set.coordinates().len(),
        lattice.rank(),
        lattice.lattice().denominator().to_string().len(),
        start.elapsed()
    );
    print!("{}", set.allocation());

    let start = Instant::now();
    let report = verify_decomposition(&set, &lattice, &[0, 0, 0]).unwrap();
    println!("{report}");
    println!("({:.2?})", start.elapsed());

    let window = default_window(&set);
    for fam in [ProbeFamily::T, ProbeFamily::XIndex(0), ProbeFamily::R(0), ProbeFamily::R(1)] {
        let start = Instant::now();
        let bound = safe_bound(&fam.primes(&set), fam.required_height(trunc.k_max), 2);
        let r = pure_component_probe(&fam, &set, &lattice, &window, bound);
        println!("{r} ({:.2?})", start.elapsed());
    }
}
