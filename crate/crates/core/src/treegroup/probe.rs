//! Pure subgroups cut out by divisibility: inside a small box of the window,
//! the elements divisible by every prime of a family to the required height
//! must be exactly the box points of the expected pure subgroup.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::alloc::{FamilyTag, T_PRIME};
use super::generators::GeneratorSet;
use super::membership::{divisibility_height, GroupLattice};
use super::{BasisSym, GroupElement};
use crate::lattice::rational_rank;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeFamily {
    /// {t}; pure subgroup ⟨z⟩.
    T,
    /// P_⟨0,i⟩; pure subgroup ⟨x_i^s : s⟩.
    XIndex(usize),
    /// P_⟨2,σ⟩; pure subgroup ⟨x_σ^s : s⟩.
    XNode(Vec<u64>),
    /// R_s; pure subgroup ⟨z + x_0^s⟩.
    R(usize),
}

impl ProbeFamily {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "t" => Some(ProbeFamily::T),
            _ => {
                if let Some(r) = s.strip_prefix('r') {
                    return r.parse().ok().map(ProbeFamily::R);
                }
                if let Some(x) = s.strip_prefix("x<") {
                    let inner = x.strip_suffix('>')?;
                    return super::parse_node(&inner.replace(',', "/")).ok().map(ProbeFamily::XNode);
                }
                s.strip_prefix('x')?.parse().ok().map(ProbeFamily::XIndex)
            }
        }
    }

    pub fn primes(&self, set: &GeneratorSet) -> Vec<u64> {
        let alloc = set.allocation();
        match self {
            ProbeFamily::T => vec![T_PRIME],
            ProbeFamily::XIndex(i) => alloc.primes(&FamilyTag::x_index(*i)).to_vec(),
            ProbeFamily::XNode(n) => alloc.primes(&FamilyTag::x_node(n)).to_vec(),
            ProbeFamily::R(s) => alloc.r(*s).to_vec(),
        }
    }

    /// K_max for the families with prime-power items, 1 for R_s.
    pub fn required_height(&self, k_max: u32) -> u32 {
        match self {
            ProbeFamily::R(_) => 1,
            _ => k_max,
        }
    }

    pub fn expected_span(&self, copies: usize) -> Vec<GroupElement> {
        match self {
            ProbeFamily::T => vec![GroupElement::basis(BasisSym::Z)],
            ProbeFamily::XIndex(i) => (0..copies)
                .map(|s| GroupElement::basis(BasisSym::X { s, i: *i }))
                .collect(),
            ProbeFamily::XNode(n) => (0..copies)
                .map(|s| GroupElement::basis(BasisSym::XNode { s, node: n.clone() }))
                .collect(),
            ProbeFamily::R(s) => vec![GroupElement::int_terms([
                (BasisSym::Z, 1),
                (BasisSym::X { s: *s, i: 0 }, 1),
            ])],
        }
    }
}

impl fmt::Display for ProbeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeFamily::T => write!(f, "t"),
            ProbeFamily::XIndex(i) => write!(f, "x{i}"),
            ProbeFamily::XNode(n) => write!(f, "x{}", super::node_string(n)),
            ProbeFamily::R(s) => write!(f, "r{s}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub family: ProbeFamily,
    pub primes: Vec<u64>,
    pub required_height: u32,
    pub coeff_bound: i64,
    pub points_checked: usize,
    pub found: BTreeSet<GroupElement>,
    pub expected: BTreeSet<GroupElement>,
}

impl ProbeResult {
    pub fn matches(&self) -> bool {
        !self.primes.is_empty() && self.found == self.expected
    }
}

impl fmt::Display for ProbeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "family {} primes {:?} height {} box ±{} ({} points)",
            self.family, self.primes, self.required_height, self.coeff_bound, self.points_checked
        )?;
        writeln!(f, "divisible {} expected {}", self.found.len(), self.expected.len())?;
        for e in self.found.symmetric_difference(&self.expected).take(5) {
            writeln!(f, "  mismatch {e}")?;
        }
        write!(f, "{}", if self.matches() { "pure" } else { "NOT pure" })
    }
}

/// Largest box radius that divisibility by p^h cannot reach: (p^h − 1)/2,
/// capped at `cap`.
pub fn safe_bound(primes: &[u64], height: u32, cap: i64) -> i64 {
    primes
        .iter()
        .map(|&p| {
            let ph = BigInt::from(p).pow(height);
            let b: BigInt = (ph - 1) / 2;
            i64::try_from(b).unwrap_or(i64::MAX)
        })
        .fold(cap, i64::min)
}

pub fn pure_component_probe(
    family: &ProbeFamily,
    set: &GeneratorSet,
    lattice: &GroupLattice,
    window: &[BasisSym],
    coeff_bound: i64,
) -> ProbeResult {
    let trunc = set.truncation();
    let primes = family.primes(set);
    let required_height = family.required_height(trunc.k_max);
    let span = family.expected_span(trunc.s_max);
    let span_rows: Vec<Vec<BigRational>> = span
        .iter()
        .map(|e| lattice.coordinates().vector(e).expect("span inside the window"))
        .collect();
    let span_rank = rational_rank(&span_rows);
    let mut found = BTreeSet::new();
    let mut expected = BTreeSet::new();
    let mut coeffs = vec![-coeff_bound; window.len()];
    let mut points = 0;
    loop {
        let e = GroupElement::int_terms(window.iter().cloned().zip(coeffs.iter().copied()));
        points += 1;
        if !primes.is_empty()
            && primes
                .iter()
                .all(|&p| divisibility_height(&e, p, lattice, required_height) >= required_height)
        {
            found.insert(e.clone());
        }
        let v = lattice.coordinates().vector(&e).expect("window inside the coordinates");
        let mut rows = span_rows.clone();
        rows.push(v.clone());
        if v.iter().all(Zero::is_zero) || rational_rank(&rows) == span_rank {
            expected.insert(e);
        }
        let Some(pos) = coeffs.iter().position(|&c| c < coeff_bound) else {
            break;
        };
        coeffs[pos] += 1;
        for c in &mut coeffs[..pos] {
            *c = -coeff_bound;
        }
    }
    ProbeResult {
        family: family.clone(),
        primes,
        required_height,
        coeff_bound,
        points_checked: points,
        found,
        expected,
    }
}

/// The box coordinates {z, x_0^0, x_0^1, y_0^0, x_⟨⟩^0}, restricted to those
/// present in the truncation.
pub fn default_window(set: &GeneratorSet) -> Vec<BasisSym> {
    [
        BasisSym::Z,
        BasisSym::X { s: 0, i: 0 },
        BasisSym::X { s: 1, i: 0 },
        BasisSym::Y { s: 0, i: 0 },
        BasisSym::XNode { s: 0, node: Vec::new() },
    ]
    .into_iter()
    .filter(|b| set.coordinates().index(b).is_some())
    .collect()
}
