pub mod cli;
pub mod lattice;
pub mod ntheory;
pub mod primeseq;
pub mod rank1;
pub mod reduction;
pub mod stablerange;
pub mod treegroup;
