//! Exact membership and divisibility in a finitely generated subgroup of ℚ^n.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::generators::GeneratorSet;
use super::{Coordinates, GroupElement};
use crate::lattice::{RationalLattice, Witness};

/// Membership for `v` in the span of `gens`, with an integer witness that
/// has been re-checked by exact arithmetic.
pub fn member(v: &[BigRational], gens: &[Vec<BigRational>]) -> Option<Witness> {
    let lat = RationalLattice::new(gens, v.len(), true);
    let w = lat.witness(v)?;
    assert!(combination_equals(&w, gens, v), "witness does not reproduce the vector");
    Some(w)
}

fn combination_equals(w: &Witness, gens: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    let mut acc = vec![BigRational::zero(); v.len()];
    for (i, c) in w {
        let c = BigRational::from_integer(c.clone());
        for (a, g) in acc.iter_mut().zip(&gens[*i]) {
            *a += &c * g;
        }
    }
    acc == v
}

/// The group generated by a [`GeneratorSet`], ready for repeated queries.
#[derive(Clone, Debug)]
pub struct GroupLattice {
    coords: Coordinates,
    rows: Vec<Vec<BigRational>>,
    lattice: RationalLattice,
}

impl GroupLattice {
    pub fn new(set: &GeneratorSet, track: bool) -> Self {
        Self::from_rows(set.coordinates().clone(), set.rows(), track)
    }

    pub fn from_rows(coords: Coordinates, rows: Vec<Vec<BigRational>>, track: bool) -> Self {
        let lattice = RationalLattice::new(&rows, coords.len(), track);
        Self { coords, rows, lattice }
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coords
    }

    pub fn lattice(&self) -> &RationalLattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.coords
            .vector(e)
            .is_some_and(|v| self.lattice.contains(&v))
    }

    /// Needs a lattice built with tracking.
    pub fn witness(&self, e: &GroupElement) -> Option<Witness> {
        let v = self.coords.vector(e)?;
        let w = self.lattice.witness(&v)?;
        assert!(combination_equals(&w, &self.rows, &v), "witness does not reproduce the vector");
        Some(w)
    }
}

/// Largest k ≤ k_max with e/p^k in the group.
pub fn divisibility_height(e: &GroupElement, p: u64, lat: &GroupLattice, k_max: u32) -> u32 {
    let p = BigInt::from(p);
    let mut k = 0;
    while k < k_max && lat.contains(&e.over(&p.clone().pow(k + 1))) {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank1::rational;

    #[test]
    fn planar_example() {
        let gens = vec![
            vec![rational(1, 2), rational(0, 1)],
            vec![rational(0, 1), rational(1, 3)],
        ];
        let w = member(&[rational(1, 1), rational(1, 1)], &gens).unwrap();
        assert_eq!(w, vec![(0, BigInt::from(2)), (1, BigInt::from(3))]);
        assert!(member(&[rational(1, 4), rational(0, 1)], &gens).is_none());
    }
}
