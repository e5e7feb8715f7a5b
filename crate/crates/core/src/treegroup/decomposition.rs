//! H_T = A ⊕ ⊕_s B^s along a path π, where B^s is spanned by the vectors
//! b_i^s = y_i^s + x_{π|i}^s and A by the remaining x, y-free coordinates.
//!
//! Each generator is split using explicit identities whose terms are
//! themselves generators, and the split is then confirmed independently on
//! the lattice: H ∩ V_A and the H ∩ V_{B^s} meet trivially and sum to H.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::generators::{GeneratorSet, Shape};
use super::membership::GroupLattice;
use super::{node_string, BasisSym, GroupElement, Node, TreeError};
use crate::lattice::{hnf_basis, intersect, Echelon, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityFamily {
    /// No y coordinate: the generator already lies in A.
    AOnly,
    /// y = −x_{π|i} + b_i.
    Integral,
    /// y/q^k = −x_{π|i}/q^k + (y + x_{π|i})/q^k.
    Q,
    /// y_i/p^k through item (7) at π|max(i,k).
    P1,
    /// (y_i + y_j)/p through item (8) at π|j.
    P4,
    /// (x_i + y_i)/p through item (9) at π|i.
    P8,
    /// Item (7) at σ, moved onto the path.
    Derived7,
    /// Item (8) at σ, moved onto the path.
    Derived8,
    /// Item (9) at σ, moved onto the path.
    Derived9,
}

impl fmt::Display for IdentityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IdentityFamily::AOnly => "A-only",
            IdentityFamily::Integral => "integral",
            IdentityFamily::Q => "Q",
            IdentityFamily::P1 => "P1",
            IdentityFamily::P4 => "P4",
            IdentityFamily::P8 => "P8",
            IdentityFamily::Derived7 => "derived-7",
            IdentityFamily::Derived8 => "derived-8",
            IdentityFamily::Derived9 => "derived-9",
        };
        f.write_str(s)
    }
}

/// Integer combination of generators.
pub type Combo = BTreeMap<usize, BigInt>;

#[derive(Clone, Debug)]
pub struct GeneratorSplit {
    pub generator: usize,
    pub family: IdentityFamily,
    pub a_combo: Combo,
    /// Copy index and combination for the B-part.
    pub b_combo: Option<(usize, Combo)>,
    pub a_part: GroupElement,
    pub b_part: GroupElement,
    pub failure: Option<String>,
}

impl GeneratorSplit {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCheck {
    pub h_rank: usize,
    pub a_rank: usize,
    pub b_ranks: Vec<usize>,
    pub pairwise_trivial: bool,
    pub sum_is_h: bool,
}

impl LatticeCheck {
    pub fn passed(&self) -> bool {
        self.pairwise_trivial && self.sum_is_h
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub path: Node,
    pub splits: Vec<GeneratorSplit>,
    pub lattice: LatticeCheck,
}

impl DecompositionReport {
    pub fn identities_hold(&self) -> bool {
        self.splits.iter().all(GeneratorSplit::ok)
    }

    pub fn passed(&self) -> bool {
        self.identities_hold() && self.lattice.passed()
    }

    pub fn family_counts(&self) -> BTreeMap<IdentityFamily, usize> {
        let mut m = BTreeMap::new();
        for s in &self.splits {
            *m.entry(s.family).or_insert(0) += 1;
        }
        m
    }

    pub fn failures(&self) -> impl Iterator<Item = &GeneratorSplit> {
        self.splits.iter().filter(|s| !s.ok())
    }
}

impl fmt::Display for DecompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "path {}", node_string(&self.path))?;
        writeln!(f, "generators {}", self.splits.len())?;
        for (fam, n) in self.family_counts() {
            writeln!(f, "  {fam}: {n}")?;
        }
        let failed = self.failures().count();
        writeln!(f, "identity failures {failed}")?;
        for s in self.failures().take(10) {
            writeln!(f, "  generator {}: {}", s.generator, s.failure.as_deref().unwrap_or(""))?;
        }
        let l = &self.lattice;
        writeln!(f, "rank H {} = A {} + B {:?}", l.h_rank, l.a_rank, l.b_ranks)?;
        writeln!(f, "pairwise intersections trivial: {}", l.pairwise_trivial)?;
        writeln!(f, "A + sum B = H: {}", l.sum_is_h)?;
        write!(f, "decomposition {}", if self.passed() { "holds" } else { "FAILS" })
    }
}

struct Splitter<'a> {
    set: &'a GeneratorSet,
    path: &'a [u64],
}

impl Splitter<'_> {
    fn on_path(&self, n: usize) -> Result<Node, String> {
        if n > self.path.len() {
            return Err(format!("path too short for prefix of length {n}"));
        }
        Ok(self.path[..n].to_vec())
    }

    fn find(&self, shape: Shape, prime: Option<u64>, exp: u32) -> Result<usize, String> {
        self.set
            .find(&shape, prime, exp)
            .ok_or_else(|| format!("missing generator {shape} over {prime:?}^{exp}"))
    }

    fn evaluate(&self, c: &Combo) -> GroupElement {
        c.iter().fold(GroupElement::zero(), |acc, (i, k)| {
            acc.plus(&self.set.get(*i).element.times(k))
        })
    }

    fn in_a(e: &GroupElement) -> bool {
        e.symbols().all(|s| !matches!(s, BasisSym::Y { .. }))
    }

    fn in_b(&self, e: &GroupElement, s: usize) -> bool {
        let mut ys = BTreeMap::new();
        let mut xs = BTreeMap::new();
        for (sym, c) in e.terms() {
            match sym {
                BasisSym::Y { s: t, i } if *t == s && *i <= self.path.len() => {
                    ys.insert(self.path[..*i].to_vec(), c.clone());
                }
                BasisSym::XNode { s: t, node } if *t == s && self.path.starts_with(node) => {
                    xs.insert(node.clone(), c.clone());
                }
                _ => return false,
            }
        }
        ys == xs
    }

    /// (family, A-combination, B-combination with its copy).
    #[allow(clippy::type_complexity)]
    fn identity(&self, gi: usize) -> Result<(IdentityFamily, Combo, Option<(usize, Combo)>), String> {
        let g = self.set.get(gi);
        let one = BigInt::one();
        let combo = |terms: &[(usize, BigInt)]| -> Combo {
            let mut c = Combo::new();
            for (i, k) in terms {
                let e = c.entry(*i).or_insert_with(BigInt::zero);
                *e += k;
                if e.is_zero() {
                    c.remove(i);
                }
            }
            c
        };
        let (p, k) = (g.prime, g.exponent);
        match &g.shape {
            Shape::Single(BasisSym::Y { s, i }) => {
                let (s, i) = (*s, *i);
                let tau = self.on_path(i)?;
                let x = BasisSym::XNode { s, node: tau.clone() };
                if p.is_none() {
                    let xb = self.find(Shape::Single(x), None, 0)?;
                    return Ok((
                        IdentityFamily::Integral,
                        combo(&[(xb, -one.clone())]),
                        Some((s, combo(&[(gi, one.clone()), (xb, one)]))),
                    ));
                }
                if g.item == 1 {
                    let xq = self.find(Shape::Single(x), p, k)?;
                    return Ok((
                        IdentityFamily::Q,
                        combo(&[(xq, -one.clone())]),
                        Some((s, combo(&[(gi, one.clone()), (xq, one)]))),
                    ));
                }
                let m = i.max(k as usize);
                let tau = self.on_path(m)?;
                let scale = BigInt::from(p.unwrap()).pow(m as u32 - k);
                let second = self.find(Shape::Seven { s, node: tau.clone(), i, second: true }, p, m as u32)?;
                let first = self.find(Shape::Seven { s, node: tau, i, second: false }, p, m as u32)?;
                Ok((
                    IdentityFamily::P1,
                    combo(&[(second, -scale.clone())]),
                    Some((s, combo(&[(first, scale)]))),
                ))
            }
            Shape::YPair { s, i, j } => {
                let tau = self.on_path(*j)?;
                let first = self.find(Shape::Eight { s: *s, node: tau.clone(), i: *i, second: false }, p, 1)?;
                let second = self.find(Shape::Eight { s: *s, node: tau, i: *i, second: true }, p, 1)?;
                Ok((
                    IdentityFamily::P4,
                    combo(&[(second, -one.clone())]),
                    Some((*s, combo(&[(first, one)]))),
                ))
            }
            Shape::XY { s, i } => {
                let tau = self.on_path(*i)?;
                let first = self.find(Shape::Nine { s: *s, node: tau.clone(), second: false }, p, 1)?;
                let second = self.find(Shape::Nine { s: *s, node: tau, second: true }, p, 1)?;
                Ok((
                    IdentityFamily::P8,
                    combo(&[(second, one.clone())]),
                    Some((*s, combo(&[(first, one)]))),
                ))
            }
            Shape::Seven { s, node, i, second: false } => {
                let tau = self.on_path(node.len())?;
                let own = self.find(Shape::Seven { s: *s, node: node.clone(), i: *i, second: true }, p, k)?;
                let t2 = self.find(Shape::Seven { s: *s, node: tau.clone(), i: *i, second: true }, p, k)?;
                let t1 = self.find(Shape::Seven { s: *s, node: tau, i: *i, second: false }, p, k)?;
                Ok((
                    IdentityFamily::Derived7,
                    combo(&[(own, one.clone()), (t2, -one.clone())]),
                    Some((*s, combo(&[(t1, one)]))),
                ))
            }
            Shape::Eight { s, node, i, second: false } => {
                let tau = self.on_path(node.len())?;
                let own = self.find(Shape::Eight { s: *s, node: node.clone(), i: *i, second: true }, p, 1)?;
                let t2 = self.find(Shape::Eight { s: *s, node: tau.clone(), i: *i, second: true }, p, 1)?;
                let t1 = self.find(Shape::Eight { s: *s, node: tau, i: *i, second: false }, p, 1)?;
                Ok((
                    IdentityFamily::Derived8,
                    combo(&[(own, one.clone()), (t2, -one.clone())]),
                    Some((*s, combo(&[(t1, one)]))),
                ))
            }
            Shape::Nine { s, node, second: false } => {
                let tau = self.on_path(node.len())?;
                let own = self.find(Shape::Nine { s: *s, node: node.clone(), second: true }, p, 1)?;
                let t2 = self.find(Shape::Nine { s: *s, node: tau.clone(), second: true }, p, 1)?;
                let t1 = self.find(Shape::Nine { s: *s, node: tau, second: false }, p, 1)?;
                Ok((
                    IdentityFamily::Derived9,
                    combo(&[(t2, one.clone()), (own, -one.clone())]),
                    Some((*s, combo(&[(t1, one)]))),
                ))
            }
            _ => Ok((IdentityFamily::AOnly, combo(&[(gi, one)]), None)),
        }
    }

    fn split(&self, gi: usize) -> GeneratorSplit {
        let g = self.set.get(gi);
        let fallback = if Self::in_a(&g.element) { IdentityFamily::AOnly } else { IdentityFamily::Integral };
        let (family, a_combo, b_combo) = match self.identity(gi) {
            Ok(t) => t,
            Err(msg) => {
                return GeneratorSplit {
                    generator: gi,
                    family: fallback,
                    a_combo: Combo::new(),
                    b_combo: None,
                    a_part: GroupElement::zero(),
                    b_part: GroupElement::zero(),
                    failure: Some(msg),
                }
            }
        };
        let a_part = self.evaluate(&a_combo);
        let b_part = b_combo.as_ref().map_or_else(GroupElement::zero, |(_, c)| self.evaluate(c));
        let failure = if !Self::in_a(&a_part) {
            Some(format!("A-part {a_part} has a y coordinate"))
        } else if let Some((s, _)) = b_combo.as_ref().filter(|(s, _)| !self.in_b(&b_part, *s)) {
            Some(format!("B-part {b_part} is not in B^{s}"))
        } else if a_part.plus(&b_part) != g.element {
            Some(format!("parts do not sum to {}", g.element))
        } else {
            None
        };
        GeneratorSplit { generator: gi, family, a_combo, b_combo, a_part, b_part, failure }
    }
}

/// Column roles in adapted coordinates: A, B^s, or unpaired.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    A,
    B(usize),
    Unpaired,
}

pub fn verify_decomposition(
    set: &GeneratorSet,
    lattice: &GroupLattice,
    path: &[u64],
) -> Result<DecompositionReport, TreeError> {
    for n in 0..=path.len() {
        if !set.truncation().nodes.iter().any(|m| m.as_slice() == &path[..n]) {
            return Err(TreeError::NotInTree(path[..n].to_vec()));
        }
    }
    let sp = Splitter { set, path };
    let splits = (0..set.len()).map(|i| sp.split(i)).collect();
    Ok(DecompositionReport {
        path: path.to_vec(),
        splits,
        lattice: lattice_check(set, lattice, path),
    })
}

fn lattice_check(set: &GeneratorSet, lattice: &GroupLattice, path: &[u64]) -> LatticeCheck {
    let coords = set.coordinates();
    let n = coords.len();
    let trunc = set.truncation();
    let mut roles = vec![Role::A; n];
    // (y column, partner x column)
    let mut pairs = Vec::new();
    for (col, sym) in coords.symbols().iter().enumerate() {
        if let BasisSym::Y { s, i } = sym {
            roles[col] = match (*i <= path.len())
                .then(|| coords.index(&BasisSym::XNode { s: *s, node: path[..*i].to_vec() }))
                .flatten()
            {
                Some(x) => {
                    pairs.push((col, x));
                    Role::B(*s)
                }
                None => Role::Unpaired,
            };
        }
    }
    let h: IntMatrix = lattice
        .lattice()
        .scaled_basis()
        .into_iter()
        .map(|mut row| {
            for &(y, x) in &pairs {
                let t = &row[x] - &row[y];
                row[x] = t;
            }
            row
        })
        .collect();
    let h_hnf = hnf_basis(&h, n);
    let a = restrict(&h, &roles, |r| r == Role::A);
    let bs: Vec<IntMatrix> = trunc
        .copies()
        .map(|s| restrict(&h, &roles, |r| r == Role::B(s)))
        .collect();
    let mut parts = vec![&a];
    parts.extend(bs.iter());
    let mut pairwise_trivial = true;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !intersect(parts[i], parts[j], n).is_empty() {
                pairwise_trivial = false;
            }
        }
    }
    let stacked: IntMatrix = parts.iter().flat_map(|m| m.iter().cloned()).collect();
    LatticeCheck {
        h_rank: h_hnf.len(),
        a_rank: a.len(),
        b_ranks: bs.iter().map(Vec::len).collect(),
        pairwise_trivial,
        sum_is_h: hnf_basis(&stacked, n) == h_hnf,
    }
}

/// Intersection of the row lattice with the coordinate subspace of the kept
/// columns: eliminate the other columns first and keep the rows that vanish
/// on them.
fn restrict(rows: &IntMatrix, roles: &[Role], keep: impl Fn(Role) -> bool) -> IntMatrix {
    let n = roles.len();
    let mut order: Vec<usize> = (0..n).filter(|&c| !keep(roles[c])).collect();
    let others = order.len();
    order.extend((0..n).filter(|&c| keep(roles[c])));
    let mut e = Echelon::new(n, false);
    for (i, row) in rows.iter().enumerate() {
        e.insert(order.iter().map(|&c| row[c].clone()).collect(), i);
    }
    e.basis()
        .into_iter()
        .filter(|row| row[..others].iter().all(Zero::is_zero))
        .map(|row| {
            let mut out = vec![BigInt::zero(); n];
            for (k, &c) in order.iter().enumerate() {
                out[c] = row[k].clone();
            }
            out
        })
        .collect()
}

/// Projection of a rational vector onto B^s along A and the other copies,
/// in standard coordinates: y_i keeps its coefficient and x_{π|i} copies it.
pub fn b_projection(e: &GroupElement, path: &[u64], s: usize) -> GroupElement {
    GroupElement::from_terms(e.terms().flat_map(|(sym, c)| match sym {
        BasisSym::Y { s: t, i } if *t == s && *i <= path.len() => vec![
            (sym.clone(), c.clone()),
            (BasisSym::XNode { s, node: path[..*i].to_vec() }, c.clone()),
        ],
        _ => Vec::new(),
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{TreeT, Truncation};
    use super::*;

    #[test]
    fn small_path_decomposes() {
        let tree = TreeT::new([vec![0], vec![0, 0], vec![1]]).unwrap();
        let trunc = Truncation::covering(&tree, 1, 1, 2, 1).unwrap();
        let set = GeneratorSet::build(&tree, &trunc).unwrap();
        let lat = GroupLattice::new(&set, false);
        let r = verify_decomposition(&set, &lat, &[0, 0]).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.lattice.h_rank, set.coordinates().len());
    }

    #[test]
    fn short_path_reports_failure() {
        let tree = TreeT::new([vec![0], vec![0, 0]]).unwrap();
        let trunc = Truncation::covering(&tree, 1, 1, 2, 1).unwrap();
        let set = GeneratorSet::build(&tree, &trunc).unwrap();
        let lat = GroupLattice::new(&set, false);
        let r = verify_decomposition(&set, &lat, &[0]).unwrap();
        assert!(!r.identities_hold());
    }
}
