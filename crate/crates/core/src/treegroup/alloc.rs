//! Disjoint prime families: t = 2, Q, P_⟨kind,payload⟩ and R_s.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Node;

/// Cantor pairing ⟨a,b⟩ = (a+b)(a+b+1)/2 + b.
pub fn cantor_pair(a: u128, b: u128) -> u128 {
    let s = a.checked_add(b).expect("pairing overflow");
    s.checked_mul(s + 1).expect("pairing overflow") / 2 + b
}

/// Code of a node: ⟨⟩ ↦ 0 and σ⌢n ↦ 1 + ⟨code σ, n⟩.
pub fn node_code(n: &[u64]) -> u128 {
    n.iter().fold(0, |c, &k| 1 + cantor_pair(c, k as u128))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyTag {
    Q,
    /// P_⟨kind,payload⟩. Kinds: 0 x_i, 1 y_i, 2 x_σ, 3 x_i+x_j, 4 y_i+y_j,
    /// 5 x_i+x_σ, 6 x_σ+x_ρ, 8 x_i+y_i.
    P { kind: u8, payload: u128 },
    R(usize),
}

impl FamilyTag {
    pub fn p_index(&self) -> Option<u128> {
        match self {
            FamilyTag::P { kind, payload } => Some(cantor_pair(*kind as u128, *payload)),
            _ => None,
        }
    }

    pub fn x_index(i: usize) -> Self {
        FamilyTag::P { kind: 0, payload: i as u128 }
    }

    pub fn y_index(i: usize) -> Self {
        FamilyTag::P { kind: 1, payload: i as u128 }
    }

    pub fn x_node(n: &[u64]) -> Self {
        FamilyTag::P { kind: 2, payload: node_code(n) }
    }

    pub fn x_pair(i: usize, j: usize) -> Self {
        FamilyTag::P { kind: 3, payload: cantor_pair(i as u128, j as u128) }
    }

    pub fn y_pair(i: usize, j: usize) -> Self {
        FamilyTag::P { kind: 4, payload: cantor_pair(i as u128, j as u128) }
    }

    pub fn x_index_node(i: usize, n: &[u64]) -> Self {
        FamilyTag::P { kind: 5, payload: cantor_pair(i as u128, node_code(n)) }
    }

    /// Unordered: the smaller code goes first.
    pub fn node_pair(a: &[u64], b: &[u64]) -> Self {
        let (ca, cb) = (node_code(a), node_code(b));
        FamilyTag::P { kind: 6, payload: cantor_pair(ca.min(cb), ca.max(cb)) }
    }

    pub fn xy(i: usize) -> Self {
        FamilyTag::P { kind: 8, payload: i as u128 }
    }

    /// Dealing order Q, P_0, R_0, P_1, R_1, …
    fn deal_key(&self) -> (u8, u128, u8) {
        match self {
            FamilyTag::Q => (0, 0, 0),
            FamilyTag::P { .. } => (1, self.p_index().unwrap(), 0),
            FamilyTag::R(s) => (1, *s as u128, 1),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::Q => write!(f, "Q"),
            FamilyTag::P { kind, payload } => write!(f, "P<{kind},{payload}>"),
            FamilyTag::R(s) => write!(f, "R{s}"),
        }
    }
}

/// Odd primes dealt round-robin to the needed families, w to each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeAllocation {
    families: BTreeMap<FamilyTag, Vec<u64>>,
    owner: BTreeMap<u64, FamilyTag>,
}

pub const T_PRIME: u64 = 2;

pub fn allocate_primes(needed: &BTreeSet<FamilyTag>, w: usize) -> PrimeAllocation {
    let mut order: Vec<&FamilyTag> = needed.iter().collect();
    order.sort_by_key(|f| f.deal_key());
    let mut families: BTreeMap<FamilyTag, Vec<u64>> = BTreeMap::new();
    let mut owner = BTreeMap::new();
    let mut p = T_PRIME;
    for _ in 0..w {
        for f in &order {
            p = next_odd_prime(p);
            families.entry((*f).clone()).or_default().push(p);
            owner.insert(p, (*f).clone());
        }
    }
    PrimeAllocation { families, owner }
}

fn next_odd_prime(mut p: u64) -> u64 {
    loop {
        p += 1;
        if p > 2 && crate::ntheory::is_prime_u64(p) {
            return p;
        }
    }
}

impl PrimeAllocation {
    pub fn t(&self) -> u64 {
        T_PRIME
    }

    pub fn primes(&self, f: &FamilyTag) -> &[u64] {
        self.families.get(f).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn family_of(&self, p: u64) -> Option<&FamilyTag> {
        self.owner.get(&p)
    }

    pub fn families(&self) -> impl Iterator<Item = (&FamilyTag, &[u64])> {
        self.families.iter().map(|(f, v)| (f, v.as_slice()))
    }

    pub fn q(&self) -> &[u64] {
        self.primes(&FamilyTag::Q)
    }

    pub fn r(&self, s: usize) -> &[u64] {
        self.primes(&FamilyTag::R(s))
    }
}

impl fmt::Display for PrimeAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "t {T_PRIME}")?;
        let mut fams: Vec<_> = self.families.iter().collect();
        fams.sort_by_key(|(t, _)| t.deal_key());
        for (tag, ps) in fams {
            let ps: Vec<String> = ps.iter().map(u64::to_string).collect();
            writeln!(f, "{tag} {}", ps.join(" "))?;
        }
        Ok(())
    }
}

/// Node whose code is `c`, if `c` is the code of some node.
pub fn decode_node(mut c: u128) -> Node {
    let mut rev = Vec::new();
    while c > 0 {
        let (a, b) = cantor_unpair(c - 1);
        rev.push(b as u64);
        c = a;
    }
    rev.reverse();
    rev
}

pub fn cantor_unpair(z: u128) -> (u128, u128) {
    let mut w = ((((8 * z + 1) as f64).sqrt() - 1.0) / 2.0) as u128;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let b = z - w * (w + 1) / 2;
    (w - b, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_prime_dealing() {
        let needed = BTreeSet::from([FamilyTag::Q, FamilyTag::x_index(0), FamilyTag::R(0)]);
        let a = allocate_primes(&needed, 1);
        assert_eq!(a.q(), &[3]);
        assert_eq!(a.primes(&FamilyTag::x_index(0)), &[5]);
        assert_eq!(a.r(0), &[7]);
    }

    #[test]
    fn families_disjoint() {
        let needed: BTreeSet<FamilyTag> = [FamilyTag::Q, FamilyTag::R(0), FamilyTag::R(1)]
            .into_iter()
            .chain((0..4).map(FamilyTag::y_index))
            .collect();
        let a = allocate_primes(&needed, 3);
        let mut all = BTreeSet::new();
        for (_, ps) in a.families() {
            assert_eq!(ps.len(), 3);
            for p in ps {
                assert!(all.insert(*p));
            }
        }
        assert!(!all.contains(&2));
    }

    #[test]
    fn codes_invert() {
        for n in [vec![], vec![0], vec![0, 0], vec![0, 0, 0], vec![1], vec![3, 1, 4]] {
            assert_eq!(decode_node(node_code(&n)), n);
        }
        assert_eq!(node_code(&[0]), 1);
        assert_eq!(node_code(&[0, 0]), 2);
        assert_eq!(node_code(&[1]), 3);
        assert_eq!(node_code(&[0, 0, 0]), 4);
    }
}
