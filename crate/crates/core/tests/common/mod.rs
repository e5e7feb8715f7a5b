#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use cancellable::primeseq::PrimeSequence;
use cancellable::reduction::{Bounds4, QuantifierTable4};
use cancellable::stablerange::ColumnRule;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod lattice;

pub const STAGES: usize = 3;

pub fn seq() -> Arc<PrimeSequence> {
    static SEQ: OnceLock<Arc<PrimeSequence>> = OnceLock::new();
    SEQ.get_or_init(|| Arc::new(PrimeSequence::build(STAGES).unwrap()))
        .clone()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Π⁰₄ table decidable with `STAGES` stages. Row 0 always succeeds at
/// j = 0; a total table flags a column in every row, a cutoff table leaves
/// some row i ≥ 1 without one.
pub fn random_table4(rng: &mut impl Rng, total: bool) -> QuantifierTable4 {
    let i_max = rng.gen_range(if total { 0 } else { 1 }..=2);
    let j_max = rng.gen_range(0..=STAGES - i_max);
    let bounds = Bounds4 {
        i_max,
        j_max,
        u_max: rng.gen_range(0..=2),
        v_max: rng.gen_range(0..=1),
    };
    let cut = (!total).then(|| rng.gen_range(1..=i_max));
    let mut flags = vec![(0, 0)];
    for i in 1..=i_max {
        let flagged = match cut {
            None => true,
            Some(c) => i < c || (i > c && rng.gen_bool(0.5)),
        };
        if flagged {
            flags.push((i, rng.gen_range(0..=j_max)));
        }
    }
    let mut entries = Vec::new();
    for i in 0..=i_max {
        for j in 0..=j_max {
            let flagged = flags.contains(&(i, j));
            for u in 0..=bounds.u_max {
                for v in 0..=bounds.v_max {
                    if rng.gen_bool(0.4) {
                        entries.push((i, j, u, v));
                    }
                }
                if flagged {
                    entries.push((i, j, u, rng.gen_range(0..=bounds.v_max)));
                }
            }
        }
    }
    let label = if total { "random total" } else { "random cutoff" };
    QuantifierTable4::new(label, bounds, entries, flags).expect("flags hold by construction")
}

/// Random column rule decidable with `STAGES` stages: the largest
/// threshold plus the last row index stays within the built stages.
pub fn random_rule(rng: &mut impl Rng, total: bool) -> ColumnRule {
    let rows = if total {
        rng.gen_range(1..=STAGES + 1)
    } else {
        rng.gen_range(1..=STAGES)
    };
    let j_of_i = (0..rows).map(|_| rng.gen_range(0..=STAGES + 1 - rows)).collect();
    if total {
        ColumnRule::Total { j_of_i }
    } else {
        ColumnRule::Cutoff { i_star: rows, j_of_i }
    }
}

/// ±products of at most `len` factors from `primes`, reduced mod m.
pub fn signed_products(primes: &[BigUint], len: usize, m: u64) -> BTreeSet<u64> {
    let residues: Vec<u64> = primes
        .iter()
        .map(|p| (p % m).to_u64().unwrap())
        .collect();
    let mut layer: BTreeSet<u64> = BTreeSet::from([1 % m]);
    let mut all = layer.clone();
    for _ in 0..len {
        let next: BTreeSet<u64> = layer
            .iter()
            .flat_map(|&x| residues.iter().map(move |&r| (x as u128 * r as u128 % m as u128) as u64))
            .collect();
        all.extend(next.iter().copied());
        layer = next;
    }
    let negatives: Vec<u64> = all.iter().map(|&x| (m - x) % m).collect();
    all.extend(negatives);
    all
}
