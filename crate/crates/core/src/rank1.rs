//! Rank-1 torsion-free groups: subgroups of ℚ containing 1, described by
//! a height for each prime.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ntheory::is_prime;
use crate::stablerange::PrimeSetDescription;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedHeight {
    Finite(u32),
    Infinite,
}

impl ExtendedHeight {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedHeight::Infinite)
    }

    pub fn admits(&self, k: u32) -> bool {
        match self {
            ExtendedHeight::Finite(h) => k <= *h,
            ExtendedHeight::Infinite => true,
        }
    }
}

impl fmt::Display for ExtendedHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedHeight::Finite(h) => write!(f, "{h}"),
            ExtendedHeight::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0} is not prime")]
    NotPrime(BigUint),
}

/// {c/d ∈ ℚ : p^k ∥ d implies k ≤ height(p)}; unlisted primes have height 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rank1Group {
    heights: BTreeMap<BigUint, ExtendedHeight>,
    label: String,
}

impl Rank1Group {
    /// ℤ
    pub fn integers() -> Self {
        Self::default()
    }

    pub fn new<I>(heights: I) -> Result<Self, GroupError>
    where
        I: IntoIterator<Item = (BigUint, ExtendedHeight)>,
    {
        let mut g = Self::default();
        for (p, h) in heights {
            g.set_height(p, h)?;
        }
        Ok(g)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_height(&mut self, p: BigUint, h: ExtendedHeight) -> Result<(), GroupError> {
        if !is_prime(&p) {
            return Err(GroupError::NotPrime(p));
        }
        if h == ExtendedHeight::Finite(0) {
            self.heights.remove(&p);
        } else {
            self.heights.insert(p, h);
        }
        Ok(())
    }

    pub fn height(&self, p: &BigUint) -> ExtendedHeight {
        self.heights
            .get(p)
            .copied()
            .unwrap_or(ExtendedHeight::Finite(0))
    }

    /// Primes with nonzero height.
    pub fn heights(&self) -> impl Iterator<Item = (&BigUint, ExtendedHeight)> {
        self.heights.iter().map(|(p, h)| (p, *h))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let mut d = x.denom().magnitude().clone();
        for (p, h) in &self.heights {
            let mut k = 0u32;
            loop {
                let (q, r) = d.div_rem(p);
                if !r.is_zero() {
                    break;
                }
                d = q;
                k += 1;
            }
            if !h.admits(k) {
                return false;
            }
        }
        d.is_one()
    }

    /// E(G) = ℤ[1/p : height(p) = ∞].
    pub fn endomorphism_ring(&self) -> LocalizationRing {
        let inverted = self
            .heights
            .iter()
            .filter(|(_, h)| h.is_infinite())
            .map(|(p, _)| p.clone())
            .collect();
        LocalizationRing {
            inverted: PrimeSetDescription::Finite(inverted),
        }
    }

    /// True only for the literal all-zero height map.
    pub fn is_trivially_z(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self, GroupError> {
        text.parse()
    }
}

impl FromStr for Rank1Group {
    type Err = GroupError;

    /// One `prime height` pair per line, height a natural number or `inf`;
    /// `#` starts a comment and an optional `label <text>` line names the group.
    fn from_str(text: &str) -> Result<Self, GroupError> {
        let mut g = Rank1Group::default();
        let mut seen = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| GroupError::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("label") {
                g.label = rest.trim().to_string();
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [p, h] = fields[..] else {
                return Err(err(format!("expected `prime height`, got {line:?}")));
            };
            let p = BigUint::from_str(p).map_err(|_| err(format!("bad prime {p:?}")))?;
            let h = match h {
                "inf" => ExtendedHeight::Infinite,
                n => ExtendedHeight::Finite(n.parse().map_err(|_| err(format!("bad height {n:?}")))?),
            };
            if !seen.insert(p.clone()) {
                return Err(err(format!("prime {p} listed twice")));
            }
            g.set_height(p, h).map_err(|e| err(e.to_string()))?;
        }
        Ok(g)
    }
}

impl fmt::Display for Rank1Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.label.is_empty() {
            writeln!(f, "label {}", self.label)?;
        }
        for (p, h) in &self.heights {
            writeln!(f, "{p} {h}")?;
        }
        Ok(())
    }
}

/// ℤ localized at a set of primes.
#[derive(Clone, Debug)]
pub struct LocalizationRing {
    pub inverted: PrimeSetDescription,
}

impl LocalizationRing {
    pub fn inverted_primes(&self) -> Option<&BTreeSet<BigUint>> {
        match &self.inverted {
            PrimeSetDescription::Finite(s) => Some(s),
            _ => None,
        }
    }
}

/// n/d in lowest terms.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn membership_examples() {
        let z = Rank1Group::integers();
        assert!(z.contains(&rational(1, 1)));
        assert!(!z.contains(&rational(1, 5)));
        let g = Rank1Group::new([(b(5), ExtendedHeight::Infinite)]).unwrap();
        assert!(g.contains(&rational(1, 25)));
        let g = Rank1Group::new([(b(5), ExtendedHeight::Finite(1))]).unwrap();
        assert!(!g.contains(&rational(1, 25)));
        assert!(g.contains(&rational(7, 5)));
    }

    #[test]
    fn endomorphism_examples() {
        let g = Rank1Group::new([
            (b(5), ExtendedHeight::Infinite),
            (b(7), ExtendedHeight::Finite(3)),
        ])
        .unwrap();
        assert_eq!(
            g.endomorphism_ring().inverted_primes().unwrap(),
            &BTreeSet::from([b(5)])
        );
        assert!(Rank1Group::integers()
            .endomorphism_ring()
            .inverted_primes()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn trivially_z() {
        assert!(Rank1Group::integers().is_trivially_z());
        assert!(!Rank1Group::new([(b(5), ExtendedHeight::Finite(1))])
            .unwrap()
            .is_trivially_z());
        assert!(Rank1Group::new([(b(5), ExtendedHeight::Finite(0))])
            .unwrap()
            .is_trivially_z());
    }

    #[test]
    fn file_roundtrip() {
        let text = "# sample\nlabel G\n7 3\n5 inf\n";
        let g: Rank1Group = text.parse().unwrap();
        assert_eq!(g.height(&b(5)), ExtendedHeight::Infinite);
        assert_eq!(g.to_string().parse::<Rank1Group>().unwrap(), g);
        assert!(matches!(
            "5 inf\n6 1\n".parse::<Rank1Group>(),
            Err(GroupError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            "5 inf\n5 1\n".parse::<Rank1Group>(),
            Err(GroupError::Parse { line: 2, .. })
        ));
    }
}
