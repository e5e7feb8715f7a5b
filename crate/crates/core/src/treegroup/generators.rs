//! Generators (0)–(9) of H_T restricted to a truncation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Pow;

use super::alloc::{allocate_primes, FamilyTag, PrimeAllocation, T_PRIME};
use super::{node_string, BasisSym, Coordinates, GroupElement, Node, TreeError, TreeT, Truncation};

/// Which combination of basis vectors a generator divides.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    /// A basis vector itself, or one divided by a prime power.
    Single(BasisSym),
    XPair { s: usize, i: usize, j: usize },
    YPair { s: usize, i: usize, j: usize },
    XIndexNode { s: usize, i: usize, node: Node },
    NodePair { s: usize, a: Node, b: Node },
    XY { s: usize, i: usize },
    ZLink { s: usize },
    /// (y_i + x_{σ|i}) or, when `second`, x_{σ|i}.
    Seven { s: usize, node: Node, i: usize, second: bool },
    /// (y_i + x_{σ|i}) + (y_n + x_σ) or, when `second`, x_{σ|i} + x_σ.
    Eight { s: usize, node: Node, i: usize, second: bool },
    /// y_n + x_σ or, when `second`, x_n − x_σ.
    Nine { s: usize, node: Node, second: bool },
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Single(b) => write!(f, "{b}"),
            Shape::XPair { s, i, j } => write!(f, "x{i}^{s}+x{j}^{s}"),
            Shape::YPair { s, i, j } => write!(f, "y{i}^{s}+y{j}^{s}"),
            Shape::XIndexNode { s, i, node } => write!(f, "x{i}^{s}+x{}^{s}", node_string(node)),
            Shape::NodePair { s, a, b } => {
                write!(f, "x{}^{s}+x{}^{s}", node_string(a), node_string(b))
            }
            Shape::XY { s, i } => write!(f, "x{i}^{s}+y{i}^{s}"),
            Shape::ZLink { s } => write!(f, "z+x0^{s}"),
            Shape::Seven { s, node, i, second } => {
                let x = node_string(&node[..*i]);
                if *second {
                    write!(f, "x{x}^{s}")
                } else {
                    write!(f, "y{i}^{s}+x{x}^{s}")
                }
            }
            Shape::Eight { s, node, i, second } => {
                let (xi, xn, n) = (node_string(&node[..*i]), node_string(node), node.len());
                if *second {
                    write!(f, "x{xi}^{s}+x{xn}^{s}")
                } else {
                    write!(f, "y{i}^{s}+x{xi}^{s}+y{n}^{s}+x{xn}^{s}")
                }
            }
            Shape::Nine { s, node, second } => {
                let (xn, n) = (node_string(node), node.len());
                if *second {
                    write!(f, "x{n}^{s}-x{xn}^{s}")
                } else {
                    write!(f, "y{n}^{s}+x{xn}^{s}")
                }
            }
        }
    }
}

impl Shape {
    pub fn numerator(&self) -> GroupElement {
        use BasisSym::*;
        let x = |s: usize, i: usize| X { s, i };
        let y = |s: usize, i: usize| Y { s, i };
        let xn = |s: usize, n: &[u64]| XNode { s, node: n.to_vec() };
        let e = |t: Vec<(BasisSym, i64)>| GroupElement::int_terms(t);
        match self {
            Shape::Single(b) => GroupElement::basis(b.clone()),
            Shape::XPair { s, i, j } => e(vec![(x(*s, *i), 1), (x(*s, *j), 1)]),
            Shape::YPair { s, i, j } => e(vec![(y(*s, *i), 1), (y(*s, *j), 1)]),
            Shape::XIndexNode { s, i, node } => e(vec![(x(*s, *i), 1), (xn(*s, node), 1)]),
            Shape::NodePair { s, a, b } => e(vec![(xn(*s, a), 1), (xn(*s, b), 1)]),
            Shape::XY { s, i } => e(vec![(x(*s, *i), 1), (y(*s, *i), 1)]),
            Shape::ZLink { s } => e(vec![(Z, 1), (x(*s, 0), 1)]),
            Shape::Seven { s, node, i, second } => {
                let base = e(vec![(xn(*s, &node[..*i]), 1)]);
                if *second {
                    base
                } else {
                    base.plus(&e(vec![(y(*s, *i), 1)]))
                }
            }
            Shape::Eight { s, node, i, second } => {
                let n = node.len();
                let base = e(vec![(xn(*s, &node[..*i]), 1), (xn(*s, node), 1)]);
                if *second {
                    base
                } else {
                    base.plus(&e(vec![(y(*s, *i), 1), (y(*s, n), 1)]))
                }
            }
            Shape::Nine { s, node, second } => {
                let n = node.len();
                if *second {
                    e(vec![(x(*s, n), 1), (xn(*s, node), -1)])
                } else {
                    e(vec![(y(*s, n), 1), (xn(*s, node), 1)])
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    /// Construction item 0–9.
    pub item: u8,
    pub shape: Shape,
    pub prime: Option<u64>,
    pub exponent: u32,
    pub family: Option<FamilyTag>,
    pub element: GroupElement,
}

impl Generator {
    pub fn key(&self) -> (Shape, Option<u64>, u32) {
        (self.shape.clone(), self.prime, self.exponent)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ", self.item)?;
        match self.prime {
            None => write!(f, "{}", self.shape),
            Some(p) if self.exponent == 1 => write!(f, "({})/{p}", self.shape),
            Some(p) => write!(f, "({})/{p}^{}", self.shape, self.exponent),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Divisor {
    None,
    T,
    Family(FamilyTag),
}

struct Template {
    item: u8,
    shape: Shape,
    divisor: Divisor,
    exponents: Vec<u32>,
}

fn templates(trunc: &Truncation) -> Vec<Template> {
    let mut out = Vec::new();
    let k_all: Vec<u32> = (1..=trunc.k_max).collect();
    let mut push = |item, shape, divisor, exponents: &[u32]| {
        out.push(Template { item, shape, divisor, exponents: exponents.to_vec() })
    };
    let coords = Coordinates::new(trunc);
    for b in coords.symbols() {
        push(0, Shape::Single(b.clone()), Divisor::None, &[0]);
    }
    for b in coords.symbols() {
        push(1, Shape::Single(b.clone()), Divisor::Family(FamilyTag::Q), &k_all);
    }
    push(1, Shape::Single(BasisSym::Z), Divisor::T, &k_all);
    let fam = Divisor::Family;
    for s in trunc.copies() {
        for i in trunc.indices() {
            push(2, Shape::Single(BasisSym::X { s, i }), fam(FamilyTag::x_index(i)), &k_all);
            push(2, Shape::Single(BasisSym::Y { s, i }), fam(FamilyTag::y_index(i)), &k_all);
        }
        for n in &trunc.nodes {
            let sym = BasisSym::XNode { s, node: n.clone() };
            push(2, Shape::Single(sym), fam(FamilyTag::x_node(n)), &k_all);
        }
        for i in trunc.indices() {
            for j in i + 1..=trunc.i_max {
                push(3, Shape::XPair { s, i, j }, fam(FamilyTag::x_pair(i, j)), &[1]);
                push(3, Shape::YPair { s, i, j }, fam(FamilyTag::y_pair(i, j)), &[1]);
            }
        }
        for i in trunc.indices() {
            for n in &trunc.nodes {
                let shape = Shape::XIndexNode { s, i, node: n.clone() };
                push(4, shape, fam(FamilyTag::x_index_node(i, n)), &[1]);
            }
        }
        for (ai, a) in trunc.nodes.iter().enumerate() {
            for b in &trunc.nodes[ai + 1..] {
                let (a, b) = if super::node_code(a) < super::node_code(b) { (a, b) } else { (b, a) };
                let shape = Shape::NodePair { s, a: a.clone(), b: b.clone() };
                push(4, shape, fam(FamilyTag::node_pair(a, b)), &[1]);
            }
        }
        for i in trunc.indices() {
            push(5, Shape::XY { s, i }, fam(FamilyTag::xy(i)), &[1]);
        }
        push(6, Shape::ZLink { s }, fam(FamilyTag::R(s)), &[1]);
        for sigma in &trunc.nodes {
            let n = sigma.len();
            if n > 0 {
                for i in 0..=n.min(trunc.i_max) {
                    for second in [false, true] {
                        let shape = Shape::Seven { s, node: sigma.clone(), i, second };
                        push(7, shape, fam(FamilyTag::y_index(i)), &[n as u32]);
                    }
                }
            }
            if n > trunc.i_max {
                continue;
            }
            for i in 0..n {
                for second in [false, true] {
                    let shape = Shape::Eight { s, node: sigma.clone(), i, second };
                    push(8, shape, fam(FamilyTag::y_pair(i, n)), &[1]);
                }
            }
            for second in [false, true] {
                let shape = Shape::Nine { s, node: sigma.clone(), second };
                push(9, shape, fam(FamilyTag::xy(n)), &[1]);
            }
        }
    }
    out
}

/// Families the truncation draws primes from.
pub fn needed_families(trunc: &Truncation) -> BTreeSet<FamilyTag> {
    templates(trunc)
        .into_iter()
        .filter_map(|t| match t.divisor {
            Divisor::Family(f) => Some(f),
            _ => None,
        })
        .collect()
}

/// Generator list of a truncation, sorted by item and then by shape, prime
/// and exponent.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    trunc: Truncation,
    alloc: PrimeAllocation,
    coords: Coordinates,
    gens: Vec<Generator>,
    index: HashMap<(Shape, Option<u64>, u32), usize>,
}

pub fn enumerate_generators(
    tree: &TreeT,
    trunc: &Truncation,
    alloc: &PrimeAllocation,
) -> Result<GeneratorSet, TreeError> {
    for n in &trunc.nodes {
        if !tree.contains(n) {
            return Err(TreeError::NotInTree(n.clone()));
        }
    }
    let mut gens = Vec::new();
    for t in templates(trunc) {
        let numer = t.shape.numerator();
        let (primes, family): (Vec<u64>, Option<FamilyTag>) = match &t.divisor {
            Divisor::None => {
                gens.push(Generator {
                    item: t.item,
                    shape: t.shape,
                    prime: None,
                    exponent: 0,
                    family: None,
                    element: numer,
                });
                continue;
            }
            Divisor::T => (vec![T_PRIME], None),
            Divisor::Family(f) => (alloc.primes(f).to_vec(), Some(f.clone())),
        };
        for p in primes {
            for &k in &t.exponents {
                let d = BigInt::from(p).pow(k);
                gens.push(Generator {
                    item: t.item,
                    shape: t.shape.clone(),
                    prime: Some(p),
                    exponent: k,
                    family: family.clone(),
                    element: numer.over(&d),
                });
            }
        }
    }
    gens.sort_by(|a, b| (a.item, &a.shape, a.prime, a.exponent).cmp(&(b.item, &b.shape, b.prime, b.exponent)));
    let index = gens.iter().enumerate().map(|(i, g)| (g.key(), i)).collect();
    Ok(GeneratorSet {
        trunc: trunc.clone(),
        alloc: alloc.clone(),
        coords: Coordinates::new(trunc),
        gens,
        index,
    })
}

impl GeneratorSet {
    /// Allocate primes for exactly this truncation and enumerate.
    pub fn build(tree: &TreeT, trunc: &Truncation) -> Result<Self, TreeError> {
        let alloc = allocate_primes(&needed_families(trunc), trunc.w);
        enumerate_generators(tree, trunc, &alloc)
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn allocation(&self) -> &PrimeAllocation {
        &self.alloc
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coords
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn find(&self, shape: &Shape, prime: Option<u64>, exponent: u32) -> Option<usize> {
        self.index.get(&(shape.clone(), prime, exponent)).copied()
    }

    pub fn get(&self, idx: usize) -> &Generator {
        &self.gens[idx]
    }

    /// Dense rows in coordinate order.
    pub fn rows(&self) -> Vec<Vec<num_rational::BigRational>> {
        self.gens
            .iter()
            .map(|g| self.coords.vector(&g.element).expect("generators stay in the window"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acceptance_tree() -> TreeT {
        TreeT::new([vec![0], vec![0, 0], vec![0, 0, 0], vec![1]]).unwrap()
    }

    #[test]
    fn items_seven_from_single_node() {
        let tree = TreeT::new([vec![0]]).unwrap();
        let trunc = Truncation::covering(&tree, 1, 1, 1, 1).unwrap();
        let g = GeneratorSet::build(&tree, &trunc).unwrap();
        let sevens: Vec<String> = g
            .generators()
            .iter()
            .filter(|g| g.item == 7 && !matches!(g.shape, Shape::Seven { second: true, .. }))
            .map(|g| g.shape.to_string())
            .collect();
        assert_eq!(sevens, ["y0^0+x<>^0", "y1^0+x<0>^0"]);
    }

    #[test]
    fn root_only_tree_has_no_seven_or_eight() {
        let tree = TreeT::new([]).unwrap();
        let trunc = Truncation::covering(&tree, 1, 0, 1, 1).unwrap();
        let g = GeneratorSet::build(&tree, &trunc).unwrap();
        assert!(g.generators().iter().all(|g| g.item != 7 && g.item != 8));
        assert_eq!(g.generators().iter().filter(|g| g.item == 9).count(), 2);
    }

    #[test]
    fn clipping_drops_out_of_window_indices() {
        let tree = acceptance_tree();
        let trunc = Truncation::covering(&tree, 1, 1, 2, 1).unwrap();
        let g = GeneratorSet::build(&tree, &trunc).unwrap();
        for gen in g.generators() {
            assert!(g.coordinates().vector(&gen.element).is_some(), "{gen}");
        }
        assert!(!g.generators().iter().any(|g| matches!(&g.shape, Shape::Nine { node, .. } if node.len() > 1)));
    }

    #[test]
    fn acceptance_window_size() {
        let tree = acceptance_tree();
        let trunc = Truncation::covering(&tree, 2, 2, 3, 2).unwrap();
        let g = GeneratorSet::build(&tree, &trunc).unwrap();
        assert_eq!(g.coordinates().len(), 23);
        let mut seen = BTreeSet::new();
        for gen in g.generators() {
            assert!(seen.insert(gen.key()));
        }
    }
}
