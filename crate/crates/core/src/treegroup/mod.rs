//! Finite windows onto the tree-indexed group H_T ⊂ ℚ^ω.
//!
//! The basis of ℚ^ω is {x_i^s, y_i^s, x_σ^s, z}. A [`Truncation`] keeps the
//! copies s < S_max, the indices i ≤ I_max and the nodes of a finite tree,
//! and materializes W primes per family and exponents up to K_max. Every
//! question is then a question about one finitely generated subgroup of ℚ^n.

pub mod alloc;
pub mod decomposition;
pub mod generators;
pub mod membership;
pub mod probe;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use crate::lattice::{hermite_normal_form, HermiteForm};
pub use alloc::{allocate_primes, cantor_pair, node_code, FamilyTag, PrimeAllocation};
pub use decomposition::{verify_decomposition, DecompositionReport, IdentityFamily};
pub use generators::{enumerate_generators, Generator, GeneratorSet, Shape};
pub use membership::{divisibility_height, member, GroupLattice};
pub use probe::{pure_component_probe, ProbeFamily, ProbeResult};

/// A finite sequence of naturals.
pub type Node = Vec<u64>;

pub fn node_string(n: &[u64]) -> String {
    let parts: Vec<String> = n.iter().map(|x| x.to_string()).collect();
    format!("<{}>", parts.join(","))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("node {} appears before its parent", node_string(.0))]
    ParentMissing(Node),
    #[error("node {} listed twice", node_string(.0))]
    Duplicate(Node),
    #[error("node {} is not in the tree", node_string(.0))]
    NotInTree(Node),
    #[error("truncation bounds must be positive")]
    EmptyTruncation,
}

/// A finite prefix-closed set of sequences, in an order that lists every
/// node after its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeT {
    order: Vec<Node>,
    nodes: BTreeSet<Node>,
}

impl TreeT {
    /// The root is added first when missing.
    pub fn new(order: impl IntoIterator<Item = Node>) -> Result<Self, TreeError> {
        let mut t = Self {
            order: vec![Vec::new()],
            nodes: BTreeSet::from([Vec::new()]),
        };
        for n in order {
            if n.is_empty() && t.order.len() == 1 {
                continue;
            }
            t.push(n)?;
        }
        Ok(t)
    }

    fn push(&mut self, n: Node) -> Result<(), TreeError> {
        if self.nodes.contains(&n) {
            return Err(TreeError::Duplicate(n));
        }
        if !self.nodes.contains(&n[..n.len() - 1]) {
            return Err(TreeError::ParentMissing(n));
        }
        self.nodes.insert(n.clone());
        self.order.push(n);
        Ok(())
    }

    /// The chain ⟨⟩ ⊂ π|1 ⊂ … ⊂ π.
    pub fn path(pi: &[u64]) -> Self {
        Self::new((1..=pi.len()).map(|k| pi[..k].to_vec())).expect("a chain is a tree")
    }

    /// Add `extra` nodes (and nothing else) after the current ones.
    pub fn extended(&self, extra: impl IntoIterator<Item = Node>) -> Result<Self, TreeError> {
        let mut t = self.clone();
        for n in extra {
            t.push(n)?;
        }
        Ok(t)
    }

    pub fn enumeration(&self) -> &[Node] {
        &self.order
    }

    pub fn contains(&self, n: &[u64]) -> bool {
        self.nodes.contains(n)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// One node per line as `a/b/c`; the root is `/` or may be omitted.
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut t = Self::new([])?;
        let mut root_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if line == "/" {
                if root_seen || t.order.len() > 1 {
                    return Err(TreeError::Parse {
                        line: line_no,
                        msg: "the root must come first and once".into(),
                    });
                }
                root_seen = true;
                continue;
            }
            let node = parse_node(line).map_err(|msg| TreeError::Parse { line: line_no, msg })?;
            t.push(node).map_err(|e| TreeError::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
        }
        Ok(t)
    }
}

impl fmt::Display for TreeT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.order {
            if n.is_empty() {
                writeln!(f, "/")?;
            } else {
                let parts: Vec<String> = n.iter().map(|x| x.to_string()).collect();
                writeln!(f, "{}", parts.join("/"))?;
            }
        }
        Ok(())
    }
}

/// `0/1/2` → ⟨0,1,2⟩; empty or `/` → ⟨⟩.
pub fn parse_node(s: &str) -> Result<Node, String> {
    let s = s.trim().trim_matches('/');
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('/')
        .map(|x| x.trim().parse::<u64>().map_err(|_| format!("bad node component {x:?}")))
        .collect()
}

/// Desk-scale window: copies s < s_max, indices i ≤ i_max, divisibility
/// exponents up to k_max, w primes per family, and the nodes of the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub s_max: usize,
    pub i_max: usize,
    pub k_max: u32,
    pub w: usize,
    pub nodes: Vec<Node>,
}

impl Truncation {
    pub fn covering(tree: &TreeT, s_max: usize, i_max: usize, k_max: u32, w: usize) -> Result<Self, TreeError> {
        if s_max == 0 || k_max == 0 || w == 0 {
            return Err(TreeError::EmptyTruncation);
        }
        Ok(Self {
            s_max,
            i_max,
            k_max,
            w,
            nodes: tree.enumeration().to_vec(),
        })
    }

    pub fn copies(&self) -> std::ops::Range<usize> {
        0..self.s_max
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.i_max
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisSym {
    Z,
    X { s: usize, i: usize },
    Y { s: usize, i: usize },
    XNode { s: usize, node: Node },
}

impl BasisSym {
    pub fn copy(&self) -> Option<usize> {
        match self {
            BasisSym::Z => None,
            BasisSym::X { s, .. } | BasisSym::Y { s, .. } | BasisSym::XNode { s, .. } => Some(*s),
        }
    }
}

impl fmt::Display for BasisSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisSym::Z => write!(f, "z"),
            BasisSym::X { s, i } => write!(f, "x{i}^{s}"),
            BasisSym::Y { s, i } => write!(f, "y{i}^{s}"),
            BasisSym::XNode { s, node } => write!(f, "x{}^{s}", node_string(node)),
        }
    }
}

/// Finite-support vector of ℚ^ω; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    terms: BTreeMap<BasisSym, BigRational>,
}

impl GroupElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(sym: BasisSym) -> Self {
        Self::from_terms([(sym, BigRational::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisSym, BigRational)>) -> Self {
        let mut e = Self::zero();
        for (s, c) in terms {
            e.add_term(s, c);
        }
        e
    }

    /// Integer combination of basis symbols.
    pub fn int_terms(terms: impl IntoIterator<Item = (BasisSym, i64)>) -> Self {
        Self::from_terms(terms.into_iter().map(|(s, c)| (s, BigRational::from_integer(c.into()))))
    }

    pub fn add_term(&mut self, sym: BasisSym, c: BigRational) {
        let entry = self.terms.entry(sym.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisSym, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, sym: &BasisSym) -> BigRational {
        self.terms.get(sym).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (s, c) in &other.terms {
            e.add_term(s.clone(), c.clone());
        }
        e
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&BigRational::from_integer(BigInt::from(-1))))
    }

    pub fn scaled(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
        }
    }

    pub fn times(&self, k: &BigInt) -> Self {
        self.scaled(&BigRational::from_integer(k.clone()))
    }

    pub fn over(&self, d: &BigInt) -> Self {
        self.scaled(&BigRational::new(BigInt::one(), d.clone()))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &BasisSym> {
        self.terms.keys()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            let neg = c < &BigRational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if a.is_one() {
                write!(f, "{s}")?;
            } else if a.denom().is_one() {
                write!(f, "{}{s}", a.numer())?;
            } else if a.numer().is_one() {
                write!(f, "{s}/{}", a.denom())?;
            } else {
                write!(f, "({}/{}){s}", a.numer(), a.denom())?;
            }
        }
        Ok(())
    }
}

/// Coordinate order of a truncation: z, then per copy s the x_i, y_i and
/// node coordinates.
#[derive(Clone, Debug)]
pub struct Coordinates {
    syms: Vec<BasisSym>,
    index: BTreeMap<BasisSym, usize>,
}

impl Coordinates {
    pub fn new(trunc: &Truncation) -> Self {
        let mut syms = vec![BasisSym::Z];
        for s in trunc.copies() {
            syms.extend(trunc.indices().map(|i| BasisSym::X { s, i }));
            syms.extend(trunc.indices().map(|i| BasisSym::Y { s, i }));
            syms.extend(trunc.nodes.iter().map(|n| BasisSym::XNode { s, node: n.clone() }));
        }
        let index = syms.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Self { syms, index }
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn symbols(&self) -> &[BasisSym] {
        &self.syms
    }

    pub fn index(&self, s: &BasisSym) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Dense vector, or `None` when the element leaves the window.
    pub fn vector(&self, e: &GroupElement) -> Option<Vec<BigRational>> {
        let mut v = vec![BigRational::zero(); self.syms.len()];
        for (s, c) in e.terms() {
            v[self.index(s)?] = c.clone();
        }
        Some(v)
    }

    pub fn element(&self, v: &[BigRational]) -> GroupElement {
        GroupElement::from_terms(self.syms.iter().cloned().zip(v.iter().cloned()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_order_checked() {
        assert!(TreeT::new([vec![0], vec![0, 1]]).is_ok());
        assert_eq!(
            TreeT::new([vec![0, 1]]),
            Err(TreeError::ParentMissing(vec![0, 1]))
        );
        assert_eq!(TreeT::new([vec![0], vec![0]]), Err(TreeError::Duplicate(vec![0])));
    }

    #[test]
    fn tree_file_roundtrip() {
        let t = TreeT::parse("/\n0\n0/0\n1 # off the path\n").unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(TreeT::parse(&t.to_string()).unwrap(), t);
        assert!(matches!(
            TreeT::parse("0/0\n"),
            Err(TreeError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn element_arithmetic() {
        let x = GroupElement::basis(BasisSym::X { s: 0, i: 0 });
        let z = GroupElement::basis(BasisSym::Z);
        let e = x.plus(&z).over(&BigInt::from(3));
        assert_eq!(e.minus(&e), GroupElement::zero());
        assert_eq!(e.times(&BigInt::from(3)), x.plus(&z));
        assert_eq!(e.to_string(), "z/3 + x0^0/3");
    }
}
