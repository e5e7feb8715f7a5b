//! Structure of (ℤ/nℤ)^× for factored n.
//!
//! The group splits over the prime powers of n into cyclic components
//! (two of them for 2^e with e ≥ 3). Subgroup questions are answered one
//! Sylow ℓ-part at a time. When the ℓ-part is cyclic (ℓ divides the order of
//! a single component) element orders decide membership and no discrete
//! logarithm is taken; this is what keeps the very large prime factors of
//! q − 1 tractable. Otherwise elements become vectors of ℓ-adic discrete logs
//! and membership is lattice membership.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::factor::{factorize, Factorization};
use super::NtError;
use crate::lattice::Echelon;

/// Largest ℓ for which baby-step giant-step logs are attempted.
pub const LOG_PRIME_LIMIT: u64 = 1 << 36;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Cyclic,
    /// ⟨−1⟩ inside (ℤ/2^eℤ)^×, e ≥ 3.
    Sign,
    /// ⟨5⟩ inside (ℤ/2^eℤ)^×, e ≥ 3.
    Five,
}

#[derive(Clone, Debug)]
struct Component {
    modulus: BigUint,
    kind: Kind,
    generator: BigUint,
    order: BigUint,
    order_factors: Factorization,
}

impl Component {
    fn project(&self, x: &BigUint) -> BigUint {
        let r = x % &self.modulus;
        let three_mod_four = (&r % 4u32).to_u32() == Some(3);
        match self.kind {
            Kind::Cyclic => r,
            Kind::Sign => {
                if three_mod_four {
                    &self.modulus - 1u32
                } else {
                    BigUint::one()
                }
            }
            Kind::Five => {
                if three_mod_four {
                    &self.modulus - r
                } else {
                    r
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
struct SylowPart {
    ell: BigUint,
    /// (component index, ℓ-adic valuation of its order)
    members: Vec<(usize, u32)>,
}

impl SylowPart {
    fn max_exponent(&self) -> u32 {
        self.members.iter().map(|m| m.1).max().unwrap_or(0)
    }

    fn is_cyclic(&self) -> bool {
        self.members.len() == 1
    }
}

/// (ℤ/nℤ)^× with its cyclic decomposition.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    modulus: BigUint,
    factorization: Factorization,
    components: Vec<Component>,
    parts: Vec<SylowPart>,
}

pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a % m);
    let m_i = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_i);
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&m_i).to_biguint()
}

fn primitive_root(p: &BigUint, e: u32, p_minus_1: &Factorization) -> BigUint {
    let one = BigUint::one();
    let pm1 = p - 1u32;
    let mut g = BigUint::from(2u32);
    if *p == BigUint::from(2u32) {
        return one;
    }
    loop {
        let ok = p_minus_1
            .primes()
            .all(|l| g.modpow(&(&pm1 / l), p) != one);
        if ok {
            break;
        }
        g += 1u32;
    }
    if e >= 2 {
        let p2 = p * p;
        if g.modpow(&pm1, &p2) == one {
            g += p;
        }
    }
    g
}

impl UnitGroup {
    /// Build from a factorization of n. `hints` are primes that help factor
    /// p − 1 for the primes p dividing n.
    pub fn new(n: &Factorization, hints: &[BigUint]) -> Result<Self, NtError> {
        let two = BigUint::from(2u32);
        let mut components = Vec::new();
        for (p, e) in n.iter() {
            let pe = p.pow(e);
            if *p == two {
                match e {
                    1 => {}
                    2 => components.push(Component {
                        modulus: pe,
                        kind: Kind::Cyclic,
                        generator: BigUint::from(3u32),
                        order: two.clone(),
                        order_factors: Factorization::from_pairs([(two.clone(), 1)]),
                    }),
                    _ => {
                        components.push(Component {
                            modulus: pe.clone(),
                            kind: Kind::Sign,
                            generator: &pe - 1u32,
                            order: two.clone(),
                            order_factors: Factorization::from_pairs([(two.clone(), 1)]),
                        });
                        components.push(Component {
                            modulus: pe,
                            kind: Kind::Five,
                            generator: BigUint::from(5u32),
                            order: two.pow(e - 2),
                            order_factors: Factorization::from_pairs([(two.clone(), e - 2)]),
                        });
                    }
                }
                continue;
            }
            let p_minus_1 = factorize(&(p - 1u32), hints)?;
            let mut order_factors = p_minus_1.clone();
            order_factors.add(p.clone(), e - 1);
            let generator = primitive_root(p, e, &p_minus_1);
            components.push(Component {
                order: order_factors.value(),
                modulus: pe,
                kind: Kind::Cyclic,
                generator,
                order_factors,
            });
        }
        let mut by_ell: std::collections::BTreeMap<BigUint, Vec<(usize, u32)>> = Default::default();
        for (idx, c) in components.iter().enumerate() {
            for (l, w) in c.order_factors.iter() {
                by_ell.entry(l.clone()).or_default().push((idx, w));
            }
        }
        let parts = by_ell
            .into_iter()
            .map(|(ell, members)| SylowPart { ell, members })
            .collect();
        Ok(Self {
            modulus: n.value(),
            factorization: n.clone(),
            components,
            parts,
        })
    }

    pub fn for_modulus(n: &BigUint, hints: &[BigUint]) -> Result<Self, NtError> {
        if n.is_zero() {
            return Err(NtError::ModulusTooSmall(n.clone()));
        }
        let f = factorize(n, hints)?;
        Self::new(&f, hints)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn order(&self) -> BigUint {
        self.components.iter().map(|c| c.order.clone()).product()
    }

    /// Exponent of the group (Carmichael λ).
    pub fn exponent(&self) -> BigUint {
        self.components
            .iter()
            .fold(BigUint::one(), |acc, c| acc.lcm(&c.order))
    }

    pub fn is_unit(&self, x: &BigUint) -> bool {
        x.gcd(&self.modulus).is_one()
    }

    fn check_unit(&self, x: &BigUint) -> Result<(), NtError> {
        if self.is_unit(x) {
            Ok(())
        } else {
            Err(NtError::NonUnit {
                value: x.clone(),
                modulus: self.modulus.clone(),
            })
        }
    }

    /// ℓ-part of x inside component `c`, an element of order dividing ℓ^w.
    fn ell_projection(&self, c: usize, ell: &BigUint, w: u32, x: &BigUint) -> BigUint {
        let comp = &self.components[c];
        let cofactor = &comp.order / ell.pow(w);
        comp.project(x).modpow(&cofactor, &comp.modulus)
    }

    fn ell_base(&self, c: usize, ell: &BigUint, w: u32) -> BigUint {
        let comp = &self.components[c];
        let cofactor = &comp.order / ell.pow(w);
        comp.generator.modpow(&cofactor, &comp.modulus)
    }

    /// Smallest k with y^(ℓ^k) = 1.
    fn ell_order_exponent(y: &BigUint, ell: &BigUint, modulus: &BigUint) -> u32 {
        let mut k = 0;
        let mut y = y.clone();
        while !y.is_one() {
            y = y.modpow(ell, modulus);
            k += 1;
        }
        k
    }

    /// Discrete log of `y` to base `h`, where h has order ℓ^w (Pohlig-Hellman).
    fn ell_log(
        h: &BigUint,
        y: &BigUint,
        ell: &BigUint,
        w: u32,
        modulus: &BigUint,
    ) -> Result<BigUint, NtError> {
        if w == 0 {
            return Ok(BigUint::zero());
        }
        let ell_small = ell
            .to_u64()
            .filter(|&l| l <= LOG_PRIME_LIMIT)
            .ok_or_else(|| NtError::LogTooLarge(ell.clone()))?;
        let gamma = h.modpow(&ell.pow(w - 1), modulus);
        let h_inv = mod_inverse(h, modulus).expect("generator is a unit");
        let mut x = BigUint::zero();
        let mut ell_k = BigUint::one();
        for k in 0..w {
            let shifted = h_inv.modpow(&x, modulus) * y % modulus;
            let hk = shifted.modpow(&ell.pow(w - 1 - k), modulus);
            let d = bsgs(&gamma, &hk, ell_small, modulus)?;
            x += &ell_k * d;
            ell_k *= ell;
        }
        Ok(x)
    }

    fn log_vector(&self, part: &SylowPart, x: &BigUint) -> Result<Vec<BigInt>, NtError> {
        part.members
            .iter()
            .map(|&(c, w)| {
                let y = self.ell_projection(c, &part.ell, w, x);
                let h = self.ell_base(c, &part.ell, w);
                Self::ell_log(&h, &y, &part.ell, w, &self.components[c].modulus).map(BigInt::from)
            })
            .collect()
    }

    fn relation_rows(part: &SylowPart) -> Vec<Vec<BigInt>> {
        let n = part.members.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigInt::from(part.ell.pow(part.members[i].1))
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Exponents e_k (mod the group exponent) with ∏ gens[k]^e_k = target,
    /// or `None` when target is outside the subgroup the gens generate.
    pub fn express(
        &self,
        target: &BigUint,
        gens: &[BigUint],
    ) -> Result<Option<Vec<BigUint>>, NtError> {
        self.check_unit(target)?;
        for g in gens {
            self.check_unit(g)?;
        }
        let mut residues: Vec<Vec<(BigUint, BigUint)>> = vec![Vec::new(); gens.len()];
        for part in &self.parts {
            let modulus_l = part.ell.pow(part.max_exponent());
            let mut ech = Echelon::new(part.members.len(), true);
            for (k, g) in gens.iter().enumerate() {
                ech.insert(self.log_vector(part, g)?, k);
            }
            for (i, row) in Self::relation_rows(part).into_iter().enumerate() {
                ech.insert(row, gens.len() + i);
            }
            let t = self.log_vector(part, target)?;
            let Some(combo) = ech.solve(&t) else {
                return Ok(None);
            };
            let m = BigInt::from(modulus_l.clone());
            for (k, res) in residues.iter_mut().enumerate() {
                let c = combo.get(&k).cloned().unwrap_or_default();
                let r = c.mod_floor(&m).to_biguint().unwrap();
                res.push((r, modulus_l.clone()));
            }
        }
        let exps = residues
            .into_iter()
            .map(|congruences| {
                congruences
                    .into_iter()
                    .fold((BigUint::zero(), BigUint::one()), |(r1, m1), (r2, m2)| {
                        crt_pair(&r1, &m1, &r2, &m2)
                    })
                    .0
            })
            .collect();
        Ok(Some(exps))
    }
}

fn crt_pair(r1: &BigUint, m1: &BigUint, r2: &BigUint, m2: &BigUint) -> (BigUint, BigUint) {
    let inv = mod_inverse(m1, m2).expect("coprime moduli");
    let r1m = r1 % m2;
    let diff = (r2 + m2 - r1m) % m2;
    let k = diff * inv % m2;
    let m = m1 * m2;
    ((r1 + m1 * k) % &m, m)
}

fn bsgs(g: &BigUint, t: &BigUint, order: u64, modulus: &BigUint) -> Result<u64, NtError> {
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table: HashMap<BigUint, u64> = HashMap::with_capacity(m as usize);
    let mut cur = BigUint::one();
    for j in 0..m {
        table.entry(cur.clone()).or_insert(j);
        cur = cur * g % modulus;
    }
    let g_inv = mod_inverse(g, modulus).expect("unit");
    let factor = g_inv.modpow(&BigUint::from(m), modulus);
    let mut gamma = t.clone();
    for i in 0..=m {
        if let Some(j) = table.get(&gamma) {
            return Ok((i * m + j) % order.max(1));
        }
        gamma = gamma * &factor % modulus;
    }
    Err(NtError::LogNotFound)
}

#[derive(Clone, Debug)]
enum PartState {
    Cyclic { max_exp: u32 },
    Lattice { echelon: Echelon },
}

/// A subgroup of a [`UnitGroup`] grown one generator at a time.
#[derive(Clone, Debug)]
pub struct Subgroup<'a> {
    group: &'a UnitGroup,
    states: Vec<PartState>,
    generators: Vec<BigUint>,
}

impl<'a> Subgroup<'a> {
    pub fn trivial(group: &'a UnitGroup) -> Self {
        let states = group
            .parts
            .iter()
            .map(|part| {
                if part.is_cyclic() {
                    PartState::Cyclic { max_exp: 0 }
                } else {
                    let mut echelon = Echelon::new(part.members.len(), false);
                    for (i, row) in UnitGroup::relation_rows(part).into_iter().enumerate() {
                        echelon.insert(row, i);
                    }
                    PartState::Lattice { echelon }
                }
            })
            .collect();
        Self {
            group,
            states,
            generators: Vec::new(),
        }
    }

    pub fn generated_by(group: &'a UnitGroup, gens: &[BigUint]) -> Result<Self, NtError> {
        let mut s = Self::trivial(group);
        for g in gens {
            s.add(g)?;
        }
        Ok(s)
    }

    pub fn generators(&self) -> &[BigUint] {
        &self.generators
    }

    pub fn add(&mut self, g: &BigUint) -> Result<(), NtError> {
        self.group.check_unit(g)?;
        for (part, state) in self.group.parts.iter().zip(self.states.iter_mut()) {
            match state {
                PartState::Cyclic { max_exp } => {
                    let (c, w) = part.members[0];
                    let y = self.group.ell_projection(c, &part.ell, w, g);
                    let k = UnitGroup::ell_order_exponent(
                        &y,
                        &part.ell,
                        &self.group.components[c].modulus,
                    );
                    *max_exp = (*max_exp).max(k);
                }
                PartState::Lattice { echelon } => {
                    let v = self.group.log_vector(part, g)?;
                    echelon.insert(v, 0);
                }
            }
        }
        self.generators.push(g.clone());
        Ok(())
    }

    pub fn contains(&self, x: &BigUint) -> Result<bool, NtError> {
        self.group.check_unit(x)?;
        for (part, state) in self.group.parts.iter().zip(&self.states) {
            let inside = match state {
                PartState::Cyclic { max_exp } => {
                    let (c, w) = part.members[0];
                    let y = self.group.ell_projection(c, &part.ell, w, x);
                    UnitGroup::ell_order_exponent(&y, &part.ell, &self.group.components[c].modulus)
                        <= *max_exp
                }
                PartState::Lattice { echelon } => {
                    echelon.contains(&self.group.log_vector(part, x)?)
                }
            };
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn order(&self) -> BigUint {
        self.group
            .parts
            .iter()
            .zip(&self.states)
            .map(|(part, state)| match state {
                PartState::Cyclic { max_exp } => part.ell.pow(*max_exp),
                PartState::Lattice { echelon } => {
                    let full: BigUint = part.members.iter().map(|&(_, w)| part.ell.pow(w)).product();
                    let idx = echelon.pivot_product().to_biguint().unwrap();
                    full / idx
                }
            })
            .product()
    }

    pub fn is_whole(&self) -> bool {
        self.order() == self.group.order()
    }
}

/// Greedy generating set: repeatedly add the smallest unit outside the
/// subgroup generated so far.
pub fn greedy_generators(group: &UnitGroup) -> Result<Vec<BigUint>, NtError> {
    let mut sub = Subgroup::trivial(group);
    let mut candidate = BigUint::from(2u32);
    while !sub.is_whole() {
        if group.is_unit(&candidate) && !sub.contains(&candidate)? {
            sub.add(&candidate)?;
        }
        candidate += 1u32;
    }
    Ok(sub.generators)
}
