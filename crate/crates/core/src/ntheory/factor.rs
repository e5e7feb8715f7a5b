use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::primality::{is_prime, small_primes};
use super::NtError;

/// Prime factorization, primes ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    factors: BTreeMap<BigUint, u32>,
}

impl Factorization {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (BigUint, u32)>>(pairs: I) -> Self {
        let mut f = Self::new();
        for (p, e) in pairs {
            f.add(p, e);
        }
        f
    }

    pub fn add(&mut self, p: BigUint, e: u32) {
        if e > 0 {
            *self.factors.entry(p).or_insert(0) += e;
        }
    }

    pub fn merge(&mut self, other: &Factorization) {
        for (p, e) in &other.factors {
            self.add(p.clone(), *e);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, u32)> {
        self.factors.iter().map(|(p, e)| (p, *e))
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.keys()
    }

    pub fn exponent(&self, p: &BigUint) -> u32 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Euler's totient of the factored value.
    pub fn totient(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, (p, e)| {
            acc * p.pow(e - 1) * (p - 1u32)
        })
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

const TRIAL_LIMIT: u32 = 1 << 16;
const RHO_ITERATIONS: u64 = 1 << 22;

/// Factor `n`, first dividing out the supplied prime hints, then by trial
/// division and Pollard-Brent rho for what is left.
pub fn factorize(n: &BigUint, hints: &[BigUint]) -> Result<Factorization, NtError> {
    if n.is_zero() {
        return Err(NtError::FactorizationFailed(n.clone()));
    }
    let mut out = Factorization::new();
    let mut rest = n.clone();
    for h in hints {
        if h <= &BigUint::one() {
            continue;
        }
        let e = strip(&mut rest, h);
        out.add(h.clone(), e);
    }
    for &p in small_primes() {
        let p = BigUint::from(p);
        let e = strip(&mut rest, &p);
        out.add(p, e);
    }
    let mut d = 1001u32;
    while d < TRIAL_LIMIT && rest > BigUint::one() {
        let big_d = BigUint::from(d);
        if &big_d * &big_d > rest {
            break;
        }
        let e = strip(&mut rest, &big_d);
        out.add(big_d, e);
        d += 2;
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            out.add(m, 1);
            continue;
        }
        let f = pollard_brent(&m).ok_or_else(|| NtError::FactorizationFailed(m.clone()))?;
        let g = &m / &f;
        stack.push(f);
        stack.push(g);
    }
    Ok(out)
}

fn strip(n: &mut BigUint, p: &BigUint) -> u32 {
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        *n = q;
        e += 1;
    }
}

fn pollard_brent(n: &BigUint) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    for c in 1u32..20 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut iterations = 0u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = 128.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += steps;
            }
            r *= 2;
            iterations += r;
            if iterations > RHO_ITERATIONS {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Factor a machine word.
pub fn factorize_u64(n: u64) -> Factorization {
    factorize(&BigUint::from(n), &[]).expect("word-sized inputs always factor")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_roundtrip() {
        for n in 1u64..3000 {
            let f = factorize_u64(n);
            assert_eq!(f.value(), BigUint::from(n));
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn rho_splits_semiprime() {
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(998_244_353u64);
        let f = factorize(&(&p * &q), &[]).unwrap();
        assert_eq!(f.exponent(&p), 1);
        assert_eq!(f.exponent(&q), 1);
    }

    #[test]
    fn hints_are_used_first() {
        let big = (BigUint::one() << 127u32) - 1u32;
        let n = &big * &big * 12u32;
        let f = factorize(&n, std::slice::from_ref(&big)).unwrap();
        assert_eq!(f.exponent(&big), 2);
        assert_eq!(f.exponent(&BigUint::from(2u32)), 2);
        assert_eq!(f.exponent(&BigUint::from(3u32)), 1);
    }

    #[test]
    fn totient_of_366() {
        assert_eq!(factorize_u64(366).totient(), BigUint::from(120u32));
    }
}
