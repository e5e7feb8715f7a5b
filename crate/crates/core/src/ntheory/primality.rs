//! Primality testing.
//!
//! Below 2^64 the Miller-Rabin test with the first twelve prime bases is
//! deterministic. Up to 3.3e24 the first thirteen prime bases are
//! deterministic. Above that we run those thirteen bases together with a
//! strong Lucas test (Baillie-PSW); no composite is known to pass it.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Trial-division primes (all primes below 1000).
pub(crate) fn small_primes() -> &'static [u32] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(1000))
}

/// Sieve of Eratosthenes, primes strictly below `limit`.
pub fn sieve(limit: u32) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit];
    let mut out = Vec::new();
    for i in 2..limit {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j < limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &small_primes()[..25] {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    BASES[..12].iter().all(|&a| strong_probable_prime_u64(n, a))
}

fn strong_probable_prime(n: &BigUint, a: u64) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(a).modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    debug_assert!(n.is_odd());
    let mut a = a.mod_floor(&BigInt::from(n.clone())).magnitude().clone();
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1u32;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn is_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

fn half_mod(x: BigInt, n: &BigInt) -> BigInt {
    let x = if x.is_odd() { x + n } else { x };
    (x >> 1u32).mod_floor(n)
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas(n: &BigUint) -> bool {
    if is_square(n) {
        return false;
    }
    let mut d_abs: i64 = 5;
    let d = loop {
        let d = if (d_abs / 2) % 2 == 0 { d_abs } else { -d_abs };
        match jacobi(&BigInt::from(d), n) {
            -1 => break d,
            // (d/n) = 0 means gcd(d, n) > 1; n is prime only when it equals |d|.
            0 if BigUint::from(d_abs as u64) != *n => return false,
            _ => {}
        }
        d_abs += 2;
    };
    let modulus = BigInt::from_biguint(Sign::Plus, n.clone());
    let p = BigInt::one();
    let q = BigInt::from((1 - d) / 4);
    let dd = BigInt::from(d);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    // Left-to-right binary ladder computing U_k, V_k, Q^k.
    let mut u = BigInt::zero();
    let mut v = BigInt::from(2);
    let mut qk = BigInt::one();
    let bits = k.bits();
    for i in (0..bits).rev() {
        // double
        u = (&u * &v).mod_floor(&modulus);
        v = (&v * &v - &qk * 2u32).mod_floor(&modulus);
        qk = (&qk * &qk).mod_floor(&modulus);
        if k.bit(i) {
            let nu = half_mod(&p * &u + &v, &modulus);
            let nv = half_mod(&dd * &u + &p * &v, &modulus);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(&modulus);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - &qk * 2u32).mod_floor(&modulus);
        qk = (&qk * &qk).mod_floor(&modulus);
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// 3,317,044,064,679,887,385,961,981: below this bound the first thirteen
/// prime bases decide primality.
fn deterministic_bound() -> BigUint {
    BigUint::parse_bytes(b"3317044064679887385961981", 10).unwrap()
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    for &p in small_primes() {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !BASES.iter().all(|&a| strong_probable_prime(n, a)) {
        return false;
    }
    if *n < deterministic_bound() {
        return true;
    }
    strong_lucas(n)
}

/// The k-th prime, 1-based.
pub fn nth_prime(k: usize) -> u64 {
    assert!(k >= 1);
    let mut count = 0;
    let mut candidate = 1u64;
    loop {
        candidate += 1;
        if is_prime_u64(candidate) {
            count += 1;
            if count == k {
                return candidate;
            }
        }
    }
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: &BigUint) -> BigUint {
    let mut c = n + 1u32;
    while !is_prime(&c) {
        c += 1u32;
    }
    c
}
