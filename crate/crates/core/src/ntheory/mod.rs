//! Exact modular and prime arithmetic.

pub mod factor;
pub mod primality;
pub mod unit_group;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use factor::{factorize, factorize_u64, Factorization};
pub use primality::{is_prime, is_prime_u64, jacobi, next_prime, nth_prime, sieve};
pub use unit_group::{greedy_generators, Subgroup, UnitGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NtError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("modulus must be an odd prime, got 2")]
    TwoNotAllowed,
    #[error("{value} is divisible by {modulus}")]
    DivisibleByModulus { value: BigInt, modulus: BigUint },
    #[error("inputs must be distinct primes, got {0} twice")]
    EqualPrimes(BigUint),
    #[error("gcd({a}, {d}) = {gcd}, expected 1")]
    NotCoprime { a: BigInt, d: BigUint, gcd: BigUint },
    #[error("no prime found after scanning {scanned} candidates from {start} (ceiling reached)")]
    SearchCeiling { start: BigUint, scanned: u64 },
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(BigUint, BigUint),
    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: BigUint, modulus: BigUint },
    #[error("could not factor {0}")]
    FactorizationFailed(BigUint),
    #[error("discrete logarithm in a subgroup of prime order {0} is beyond the search limit")]
    LogTooLarge(BigUint),
    #[error("discrete logarithm not found")]
    LogNotFound,
    #[error("modulus {0} is too small")]
    ModulusTooSmall(BigUint),
    #[error("closure of a subgroup modulo {0} is too large to enumerate")]
    TooLarge(BigUint),
}

/// A value that has passed [`is_prime`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(BigUint);

impl Prime {
    pub fn new(value: impl Into<BigUint>) -> Result<Self, NtError> {
        let value = value.into();
        if is_prime(&value) {
            Ok(Self(value))
        } else {
            Err(NtError::NotPrime(value))
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// x ≡ residue (mod modulus), with 0 ≤ residue < modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    residue: BigUint,
    modulus: BigUint,
}

impl Congruence {
    pub fn new(residue: impl Into<BigInt>, modulus: impl Into<BigUint>) -> Result<Self, NtError> {
        let modulus = modulus.into();
        if modulus.is_zero() {
            return Err(NtError::ModulusTooSmall(modulus));
        }
        let m = BigInt::from(modulus.clone());
        let residue = residue.into().mod_floor(&m).to_biguint().unwrap();
        Ok(Self { residue, modulus })
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn holds(&self, x: &BigUint) -> bool {
        x % &self.modulus == self.residue
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x ≡ {} (mod {})", self.residue, self.modulus)
    }
}

fn require_odd_prime(q: &BigUint) -> Result<(), NtError> {
    if *q == BigUint::from(2u32) {
        return Err(NtError::TwoNotAllowed);
    }
    if !is_prime(q) {
        return Err(NtError::NotPrime(q.clone()));
    }
    Ok(())
}

/// Euler's criterion: a is a square mod q iff a^((q-1)/2) ≡ 1.
pub fn is_quadratic_residue(a: &BigInt, q: &BigUint) -> Result<bool, NtError> {
    require_odd_prime(q)?;
    let qi = BigInt::from(q.clone());
    let r = a.mod_floor(&qi).to_biguint().unwrap();
    if r.is_zero() {
        return Err(NtError::DivisibleByModulus {
            value: a.clone(),
            modulus: q.clone(),
        });
    }
    Ok(r.modpow(&((q - 1u32) >> 1u32), q).is_one())
}

/// Whether the residue statuses of p mod q and q mod p agree with the
/// reciprocity law: equal unless p ≡ q ≡ 3 (mod 4), in which case opposite.
pub fn reciprocity_check(p: &BigUint, q: &BigUint) -> Result<bool, NtError> {
    require_odd_prime(p)?;
    require_odd_prime(q)?;
    if p == q {
        return Err(NtError::EqualPrimes(p.clone()));
    }
    let p_mod_q = is_quadratic_residue(&BigInt::from(p.clone()), q)?;
    let q_mod_p = is_quadratic_residue(&BigInt::from(q.clone()), p)?;
    let both_three = (p % 4u32).to_u32() == Some(3) && (q % 4u32).to_u32() == Some(3);
    Ok((p_mod_q == q_mod_p) != both_three)
}

pub const DEFAULT_SEARCH_CEILING: u64 = 10_000_000;

/// Outcome of an ascending scan of an arithmetic progression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRecord {
    pub congruence: Congruence,
    pub lower_bound: BigInt,
    pub first_candidate: BigUint,
    pub candidates_scanned: u64,
    pub prime: BigUint,
}

/// Smallest prime p > lower_bound with p ≡ a (mod d), scanning at most
/// `ceiling` candidates.
pub fn dirichlet_scan(
    a: &BigInt,
    d: &BigUint,
    lower_bound: &BigInt,
    ceiling: u64,
) -> Result<ScanRecord, NtError> {
    if d.is_zero() {
        return Err(NtError::ModulusTooSmall(d.clone()));
    }
    let congruence = Congruence::new(a.clone(), d.clone())?;
    let g = congruence.residue().gcd(d);
    if !g.is_one() && !d.is_one() {
        return Err(NtError::NotCoprime {
            a: a.clone(),
            d: d.clone(),
            gcd: g,
        });
    }
    let start = if lower_bound.is_negative() {
        BigUint::zero()
    } else {
        lower_bound.magnitude() + 1u32
    };
    let offset = (congruence.residue() + d - &start % d) % d;
    let first = &start + offset;
    let mut c = first.clone();
    for scanned in 1..=ceiling {
        if is_prime(&c) {
            return Ok(ScanRecord {
                congruence,
                lower_bound: lower_bound.clone(),
                first_candidate: first,
                candidates_scanned: scanned,
                prime: c,
            });
        }
        c += d;
    }
    Err(NtError::SearchCeiling {
        start: first,
        scanned: ceiling,
    })
}

/// Smallest prime p > lower_bound with p ≡ a (mod d).
pub fn dirichlet_search(a: &BigInt, d: &BigUint, lower_bound: &BigInt) -> Result<Prime, NtError> {
    dirichlet_scan(a, d, lower_bound, DEFAULT_SEARCH_CEILING).map(|r| Prime(r.prime))
}

/// Combine pairwise-coprime congruences into one modulo their product.
pub fn crt_combine(list: &[Congruence]) -> Result<Congruence, NtError> {
    for (i, a) in list.iter().enumerate() {
        for b in &list[i + 1..] {
            if !a.modulus.gcd(&b.modulus).is_one() {
                return Err(NtError::NonCoprimeModuli(a.modulus.clone(), b.modulus.clone()));
            }
        }
    }
    let mut acc = Congruence {
        residue: BigUint::zero(),
        modulus: BigUint::one(),
    };
    for c in list {
        let inv = unit_group::mod_inverse(&acc.modulus, &c.modulus).expect("coprime moduli");
        let diff = (&c.residue + &c.modulus - &acc.residue % &c.modulus) % &c.modulus;
        let k = diff * inv % &c.modulus;
        let residue = &acc.residue + &acc.modulus * k;
        let modulus = &acc.modulus * &c.modulus;
        acc = Congruence {
            residue: residue % &modulus,
            modulus,
        };
    }
    Ok(acc)
}

/// Greedy generators of (ℤ/nℤ)^×: repeatedly the smallest unit outside the
/// subgroup generated so far.
pub fn unit_group_generators(n: &BigUint) -> Result<Vec<BigUint>, NtError> {
    if *n < BigUint::from(2u32) {
        return Err(NtError::ModulusTooSmall(n.clone()));
    }
    greedy_generators(&UnitGroup::for_modulus(n, &[])?)
}

const CLOSURE_LIMIT: u64 = 1 << 24;

/// Closure of `gens` under multiplication mod n, by explicit enumeration.
pub fn subgroup_generated(n: u64, gens: &[u64]) -> Result<BTreeSet<u64>, NtError> {
    if n < 2 {
        return Err(NtError::ModulusTooSmall(BigUint::from(n)));
    }
    if n > CLOSURE_LIMIT {
        return Err(NtError::TooLarge(BigUint::from(n)));
    }
    for &g in gens {
        if g.gcd(&n) != 1 {
            return Err(NtError::NonUnit {
                value: BigUint::from(g),
                modulus: BigUint::from(n),
            });
        }
    }
    let mut set = BTreeSet::from([1u64]);
    let mut frontier = vec![1u64];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = ((x as u128 * g as u128) % n as u128) as u64;
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn residues_mod_seven() {
        let q = b(7);
        assert!(is_quadratic_residue(&BigInt::from(1), &q).unwrap());
        assert!(is_quadratic_residue(&BigInt::from(2), &q).unwrap());
        assert!(!is_quadratic_residue(&BigInt::from(3), &q).unwrap());
        assert!(is_quadratic_residue(&BigInt::from(-3), &q).unwrap());
        assert!(is_quadratic_residue(&BigInt::from(7), &q).is_err());
        assert!(is_quadratic_residue(&BigInt::from(1), &b(2)).is_err());
        assert!(is_quadratic_residue(&BigInt::from(1), &b(9)).is_err());
    }

    #[test]
    fn reciprocity_examples() {
        assert!(reciprocity_check(&b(13), &b(17)).unwrap());
        assert!(reciprocity_check(&b(3), &b(7)).unwrap());
        assert!(reciprocity_check(&b(5), &b(5)).is_err());
        assert!(reciprocity_check(&b(2), &b(5)).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        let s = |a: i64, d: u64, lb: i64| dirichlet_search(&a.into(), &b(d), &lb.into());
        assert_eq!(s(1, 12, 0).unwrap().value(), &b(13));
        assert_eq!(s(1, 4, 13).unwrap().value(), &b(17));
        assert!(matches!(s(2, 4, 0), Err(NtError::NotCoprime { .. })));
        assert_eq!(s(0, 1, 0).unwrap().value(), &b(2));
        assert_eq!(s(-1, 4, -10).unwrap().value(), &b(3));
    }

    #[test]
    fn dirichlet_ceiling_is_reported() {
        let r = dirichlet_scan(&BigInt::from(1), &b(1_000_000), &BigInt::from(0), 3);
        assert!(matches!(r, Err(NtError::SearchCeiling { scanned: 3, .. })));
    }

    #[test]
    fn crt_examples() {
        let c = |r: i64, m: u64| Congruence::new(r, b(m)).unwrap();
        assert_eq!(crt_combine(&[c(1, 13), c(2, 3)]).unwrap(), c(14, 39));
        assert_eq!(crt_combine(&[c(0, 5)]).unwrap(), c(0, 5));
        assert_eq!(
            crt_combine(&[c(1, 4), c(1, 6)]),
            Err(NtError::NonCoprimeModuli(b(4), b(6)))
        );
    }

    #[test]
    fn generator_examples() {
        assert_eq!(unit_group_generators(&b(3)).unwrap(), vec![b(2)]);
        assert_eq!(unit_group_generators(&b(8)).unwrap(), vec![b(3), b(5)]);
        assert!(unit_group_generators(&b(2)).unwrap().is_empty());
        assert!(unit_group_generators(&b(1)).is_err());
    }

    #[test]
    fn closure_examples() {
        assert_eq!(subgroup_generated(7, &[2]).unwrap(), BTreeSet::from([1, 2, 4]));
        assert_eq!(subgroup_generated(7, &[3]).unwrap(), (1..7).collect());
        assert_eq!(subgroup_generated(5, &[]).unwrap(), BTreeSet::from([1]));
        assert!(subgroup_generated(6, &[2]).is_err());
    }

    #[test]
    fn prime_newtype() {
        assert!(Prime::new(b(61)).is_ok());
        assert_eq!(Prime::new(b(91)), Err(NtError::NotPrime(b(91))));
    }
}
