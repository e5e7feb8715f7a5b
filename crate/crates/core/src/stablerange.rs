//! Stable range 1 for localizations ℤ_M, and cancellation for rank-1 groups.
//!
//! For a saturated multiplicative set M, 1 is in the stable range of ℤ_M iff
//! for all coprime α₁, α₂ some m ∈ M and b ∈ ℤ give α₁m + α₂b ∈ M. A pair
//! (α₁, α₂) with α₁ outside the subgroup H of (ℤ/α₂)^× generated by −1 and
//! the primes of M is therefore a refutation, and solving α₁u ≡ 1 (mod α₂)
//! with u ∈ M is the positive side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::ntheory::{
    dirichlet_search, factorize, is_prime, is_prime_u64, is_quadratic_residue, sieve,
    subgroup_generated, NtError, UnitGroup,
};
use crate::primeseq::PrimeSequence;
use crate::rank1::Rank1Group;

/// Default largest modulus tried by [`find_obstruction`].
pub const DEFAULT_OBSTRUCTION_BOUND: u64 = 1000;

/// Which columns P_{i,j} of a sequence a description takes.
///
/// `j_of_i[i]` is the least j at which row i succeeds. Column (i, j) is
/// included when row i is covered and j ≥ max_{i' ≤ i} j_of_i[i'].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnRule {
    /// Every row i ≤ I_max = j_of_i.len() − 1 succeeds.
    Total { j_of_i: Vec<usize> },
    /// Rows i < i_star succeed; row i_star fails for every j.
    Cutoff { i_star: usize, j_of_i: Vec<usize> },
}

impl ColumnRule {
    pub fn j_of_i(&self) -> &[usize] {
        match self {
            ColumnRule::Total { j_of_i } | ColumnRule::Cutoff { j_of_i, .. } => j_of_i,
        }
    }

    /// Covered rows with their thresholds max_{i' ≤ i} j_of_i[i'].
    pub fn thresholds(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut m = 0;
        for &j in self.j_of_i() {
            m = m.max(j);
            out.push(m);
        }
        out
    }

    pub fn includes(&self, i: usize, j: usize) -> bool {
        self.thresholds().get(i).is_some_and(|&t| j >= t)
    }

    /// Stage that must be built before the rule can be decided.
    pub fn required_stage(&self) -> usize {
        let rows = self
            .thresholds()
            .iter()
            .enumerate()
            .map(|(i, t)| i + t)
            .max()
            .unwrap_or(0);
        match self {
            ColumnRule::Total { .. } => rows,
            ColumnRule::Cutoff { i_star, .. } => rows.max(*i_star),
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            ColumnRule::Total { j_of_i } if j_of_i.is_empty() => {
                Err("a total rule needs at least row 0".into())
            }
            ColumnRule::Cutoff { i_star, j_of_i } if j_of_i.len() != *i_star => Err(format!(
                "a cutoff at {i_star} needs rows 0..{i_star}, got {}",
                j_of_i.len()
            )),
            _ => Ok(()),
        }
    }
}

/// A set of primes with a finite description.
#[derive(Clone, Debug)]
pub enum PrimeSetDescription {
    Finite(BTreeSet<BigUint>),
    /// All primes except the listed ones.
    Cofinite(BTreeSet<BigUint>),
    ColumnUnion {
        seq: Arc<PrimeSequence>,
        rule: ColumnRule,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DescriptionError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("malformed column rule: {0}")]
    Rule(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn checked_primes<I: IntoIterator<Item = BigUint>>(ps: I) -> Result<BTreeSet<BigUint>, DescriptionError> {
    ps.into_iter()
        .map(|p| if is_prime(&p) { Ok(p) } else { Err(DescriptionError::NotPrime(p)) })
        .collect()
}

impl PrimeSetDescription {
    pub fn finite<I: IntoIterator<Item = BigUint>>(ps: I) -> Result<Self, DescriptionError> {
        Ok(Self::Finite(checked_primes(ps)?))
    }

    pub fn cofinite<I: IntoIterator<Item = BigUint>>(excluded: I) -> Result<Self, DescriptionError> {
        Ok(Self::Cofinite(checked_primes(excluded)?))
    }

    pub fn column_union(seq: Arc<PrimeSequence>, rule: ColumnRule) -> Result<Self, DescriptionError> {
        rule.validate().map_err(DescriptionError::Rule)?;
        Ok(Self::ColumnUnion { seq, rule })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Finite(_) => "finite",
            Self::Cofinite(_) => "cofinite",
            Self::ColumnUnion { .. } => "column-union",
        }
    }

    /// Included columns among the built stages.
    pub fn included_columns(&self) -> Vec<(usize, usize)> {
        let Self::ColumnUnion { seq, rule } = self else {
            return Vec::new();
        };
        let s = seq.stages_built();
        let mut out = Vec::new();
        for (i, t) in rule.thresholds().into_iter().enumerate() {
            for j in t..=s.saturating_sub(i) {
                if i + j <= s {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The explicitly known members: the list for Finite, the built
    /// included columns for ColumnUnion, nothing for Cofinite.
    pub fn known_members(&self) -> BTreeSet<BigUint> {
        match self {
            Self::Finite(s) => s.clone(),
            Self::Cofinite(_) => BTreeSet::new(),
            Self::ColumnUnion { seq, .. } => self
                .included_columns()
                .into_iter()
                .flat_map(|(i, j)| seq.column(i, j).unwrap_or_default())
                .collect(),
        }
    }

    /// Membership, as far as it is decided by the built data.
    pub fn contains(&self, p: &BigUint) -> Option<bool> {
        match self {
            Self::Finite(s) => Some(s.contains(p)),
            Self::Cofinite(ex) => Some(is_prime(p) && !ex.contains(p)),
            Self::ColumnUnion { seq, rule } => {
                for ((i, j), col) in seq.columns() {
                    if col.contains(p) {
                        return Some(rule.includes(i, j));
                    }
                }
                None
            }
        }
    }

    /// Text form; see [`parse_description`].
    pub fn to_file_string(&self) -> String {
        let list = |s: &BTreeSet<BigUint>| {
            s.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
        };
        match self {
            Self::Finite(s) => format!("kind finite\nprimes {}\n", list(s)),
            Self::Cofinite(s) => format!("kind cofinite\nexcluded {}\n", list(s)),
            Self::ColumnUnion { rule, .. } => rule_to_string(rule),
        }
    }
}

fn rule_to_string(rule: &ColumnRule) -> String {
    let mut out = String::from("kind column-union\n");
    match rule {
        ColumnRule::Total { .. } => out += "rule total\n",
        ColumnRule::Cutoff { i_star, .. } => out += &format!("rule cutoff {i_star}\n"),
    }
    for (i, j) in rule.j_of_i().iter().enumerate() {
        out += &format!("row {i} {j}\n");
    }
    out
}

/// A parsed description file. Column unions still need a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedDescription {
    Finite(BTreeSet<BigUint>),
    Cofinite(BTreeSet<BigUint>),
    ColumnUnion(ColumnRule),
}

impl ParsedDescription {
    pub fn resolve(self, seq: impl FnOnce(&ColumnRule) -> Arc<PrimeSequence>) -> PrimeSetDescription {
        match self {
            Self::Finite(s) => PrimeSetDescription::Finite(s),
            Self::Cofinite(s) => PrimeSetDescription::Cofinite(s),
            Self::ColumnUnion(rule) => PrimeSetDescription::ColumnUnion {
                seq: seq(&rule),
                rule,
            },
        }
    }
}

/// Parse a description file:
///
/// ```text
/// kind finite          kind cofinite        kind column-union
/// primes 5 7           excluded 2           rule cutoff 2
///                                           row 0 0
///                                           row 1 3
/// ```
///
/// `#` starts a comment. A `rule total` file lists rows 0..=I_max; a
/// `rule cutoff N` file lists rows 0..N.
pub fn parse_description(text: &str) -> Result<ParsedDescription, DescriptionError> {
    let mut kind: Option<(usize, String)> = None;
    let mut primes: Vec<BigUint> = Vec::new();
    let mut rule: Option<(usize, Option<usize>)> = None;
    let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let err = |msg: String| DescriptionError::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let nat = |s: &str| -> Result<usize, DescriptionError> {
            s.parse().map_err(|_| err(format!("expected a natural number, got {s:?}")))
        };
        match f[0] {
            "kind" if kind.is_none() && f.len() == 2 => kind = Some((line_no, f[1].to_string())),
            "kind" => return Err(err("exactly one `kind <name>` line is allowed".into())),
            "primes" | "excluded" => {
                let expected = if f[0] == "primes" { "finite" } else { "cofinite" };
                if kind.as_ref().map(|k| k.1.as_str()) != Some(expected) {
                    return Err(err(format!("`{}` belongs to kind {expected}", f[0])));
                }
                for s in &f[1..] {
                    let p = BigUint::from_str(s).map_err(|_| err(format!("bad integer {s:?}")))?;
                    if !is_prime(&p) {
                        return Err(err(format!("{p} is not prime")));
                    }
                    primes.push(p);
                }
            }
            "rule" => {
                if rule.is_some() {
                    return Err(err("duplicate rule line".into()));
                }
                rule = Some(match f[1..] {
                    ["total"] => (line_no, None),
                    ["cutoff", n] => (line_no, Some(nat(n)?)),
                    _ => return Err(err("expected `rule total` or `rule cutoff <i*>`".into())),
                });
            }
            "row" => {
                let [i, j] = f[1..] else {
                    return Err(err("expected `row <i> <j>`".into()));
                };
                if rows.insert(nat(i)?, nat(j)?).is_some() {
                    return Err(err(format!("row {i} listed twice")));
                }
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }
    let Some((kind_line, kind)) = kind else {
        return Err(DescriptionError::Parse {
            line: last_line.max(1),
            msg: "missing `kind` line".into(),
        });
    };
    let set: BTreeSet<BigUint> = primes.into_iter().collect();
    match kind.as_str() {
        "finite" => Ok(ParsedDescription::Finite(set)),
        "cofinite" => Ok(ParsedDescription::Cofinite(set)),
        "column-union" => {
            let Some((rule_line, cutoff)) = rule else {
                return Err(DescriptionError::Parse {
                    line: kind_line,
                    msg: "column-union needs a `rule` line".into(),
                });
            };
            let n = rows.len();
            if rows.keys().copied().ne(0..n) {
                return Err(DescriptionError::Parse {
                    line: rule_line,
                    msg: "rows must be 0, 1, ..., without gaps".into(),
                });
            }
            let j_of_i: Vec<usize> = rows.into_values().collect();
            let rule = match cutoff {
                None => ColumnRule::Total { j_of_i },
                Some(i_star) => ColumnRule::Cutoff { i_star, j_of_i },
            };
            rule.validate().map_err(|msg| DescriptionError::Parse {
                line: rule_line,
                msg,
            })?;
            Ok(ParsedDescription::ColumnUnion(rule))
        }
        other => Err(DescriptionError::Parse {
            line: kind_line,
            msg: format!("unknown kind {other:?}"),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Why H misses α₁.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueProof {
    /// H listed element by element (small α₂).
    Enumerated {
        generators: Vec<u64>,
        subgroup: Vec<u64>,
    },
    /// α₂ is a prime ≡ 1 (mod 4), every listed prime is a square mod α₂
    /// and α₁ is not, so H lies in the squares and misses α₁.
    Quadratic { residues: Vec<BigUint> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub alpha1: BigUint,
    pub alpha2: BigUint,
    pub proof: ResidueProof,
}

/// u ≡ α₁⁻¹ (mod α₂) as a product of primes from one column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSolution {
    pub alpha1: BigInt,
    pub alpha2: BigUint,
    pub column: (usize, usize),
    /// (prime, exponent) with exponent > 0; empty means u = 1.
    pub word: Vec<(BigUint, BigUint)>,
    /// u mod α₂
    pub u_mod: BigUint,
}

impl UnitSolution {
    /// u itself, if it has at most `max_bits` bits.
    pub fn value(&self, max_bits: u64) -> Option<BigUint> {
        let mut bits = 0u64;
        for (p, e) in &self.word {
            bits = bits.saturating_add(p.bits().saturating_mul(e.to_u64()?));
        }
        if bits > max_bits {
            return None;
        }
        Some(
            self.word
                .iter()
                .map(|(p, e)| p.pow(e.to_u32().unwrap()))
                .product(),
        )
    }

    pub fn checks_out(&self) -> bool {
        let m = BigInt::from(self.alpha2.clone());
        let a = self.alpha1.mod_floor(&m);
        let u: BigUint = self
            .word
            .iter()
            .fold(BigUint::one() % &self.alpha2, |acc, (p, e)| {
                acc * p.modpow(e, &self.alpha2) % &self.alpha2
            });
        u == self.u_mod && (a * BigInt::from(u)).mod_floor(&m) == BigInt::one().mod_floor(&m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// All but finitely many primes inverted.
    Cofinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    ClosedForm(ClosedForm),
    UnitRecipe { probes: Vec<UnitSolution> },
    Obstruction(Obstruction),
    MissingStage { needed: usize, built: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableRangeVerdict {
    pub verdict: Verdict,
    pub certificate: Certificate,
    /// Largest modulus tried by a bounded search, when one ran.
    pub search_bound_used: Option<u64>,
}

impl fmt::Display for StableRangeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        if let Some(b) = self.search_bound_used {
            writeln!(f, "search bound: {b}")?;
        }
        match &self.certificate {
            Certificate::ClosedForm(ClosedForm::Cofinite) => writeln!(
                f,
                "certificate: closed form, all but finitely many primes are inverted"
            ),
            Certificate::UnitRecipe { probes } => {
                writeln!(f, "certificate: unit recipe, {} probes", probes.len())?;
                for p in probes {
                    let word: Vec<String> = p.word.iter().map(|(q, e)| format!("{q}^{e}")).collect();
                    writeln!(
                        f,
                        "  alpha1 {} alpha2 {} column {} {} u_mod {} word {}",
                        p.alpha1,
                        p.alpha2,
                        p.column.0,
                        p.column.1,
                        p.u_mod,
                        if word.is_empty() { "1".into() } else { word.join("*") }
                    )?;
                }
                Ok(())
            }
            Certificate::Obstruction(o) => {
                writeln!(f, "certificate: obstruction alpha1 {} alpha2 {}", o.alpha1, o.alpha2)?;
                match &o.proof {
                    ResidueProof::Enumerated {
                        generators,
                        subgroup,
                    } => {
                        writeln!(f, "  generators mod alpha2: {generators:?}")?;
                        writeln!(f, "  subgroup: {subgroup:?}")
                    }
                    ResidueProof::Quadratic { residues } => {
                        writeln!(f, "  alpha2 prime, 1 mod 4; alpha1 is a non-residue")?;
                        let shown: Vec<String> = residues.iter().map(|r| r.to_string()).collect();
                        writeln!(f, "  residues: {}", shown.join(" "))
                    }
                }
            }
            Certificate::MissingStage { needed, built } => {
                writeln!(f, "missing stage: needs {needed}, built {built}")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("unit recipes exist only for column unions with a total rule")]
    NotTotal,
    #[error("gcd({alpha1}, {alpha2}) != 1")]
    NotCoprime { alpha1: BigInt, alpha2: BigUint },
    #[error("{0} is in the described set and shares a factor with the inputs")]
    SharesDescribedPrime(BigUint),
    #[error("alpha2 = {alpha2} divides no built a_i; {}", match .needed { Some(s) => format!("stage {s} is required"), None => "the required stage cannot be predicted".into() })]
    StageNotBuilt {
        alpha2: BigUint,
        needed: Option<usize>,
        built: usize,
    },
    #[error(transparent)]
    Nt(#[from] NtError),
}

/// Stage at which the prime power p^e first divides a_i, as predicted from
/// a_0 = 3, the built q_k and the enumeration r_k. Future q_k exceed
/// 4 a_{k−1}, so the prediction is exact for p ≤ 4 a_{s*}.
fn predicted_stage(seq: &PrimeSequence, p: &BigUint, e: u32) -> Option<usize> {
    let s_star = seq.stages_built();
    let mut hits: Vec<usize> = Vec::new();
    if *p == BigUint::from(3u32) {
        hits.push(0);
    }
    if let Some(k) = (1..=s_star).find(|&k| seq.q(k) == Some(p)) {
        hits.push(k);
    }
    let bound = seq.a(s_star).unwrap() * 4u32;
    let p_small = p.to_u64().filter(|&v| v < 1 << 24)?;
    if *p > bound {
        return None;
    }
    let n = sieve(p_small as u32 + 1).len();
    // r_k = p exactly when v2(k) = n − 1.
    let step = 1usize.checked_shl(n as u32 - 1)?;
    hits.extend((0..e as usize).map(|t| step * (2 * t + 1)));
    hits.sort_unstable();
    hits.get(e as usize - 1).copied()
}

fn stage_for_modulus(seq: &PrimeSequence, m: &BigUint) -> Option<usize> {
    let f = factorize(m, &seq.known_primes()).ok()?;
    let stage = f
        .iter()
        .map(|(p, e)| predicted_stage(seq, p, e))
        .try_fold(0usize, |acc, s| s.map(|s| acc.max(s)));
    stage
}

/// Solve α₁u ≡ 1 (mod α₂) with u a product of primes of the column
/// P_{i,J(i)}, i least with α₂ | a_i.
pub fn solve_unit(
    desc: &PrimeSetDescription,
    alpha1: &BigInt,
    alpha2: &BigUint,
) -> Result<UnitSolution, SolveError> {
    let PrimeSetDescription::ColumnUnion {
        seq,
        rule: rule @ ColumnRule::Total { .. },
    } = desc
    else {
        return Err(SolveError::NotTotal);
    };
    if alpha2.is_zero() || !alpha1.magnitude().gcd(alpha2).is_one() {
        return Err(SolveError::NotCoprime {
            alpha1: alpha1.clone(),
            alpha2: alpha2.clone(),
        });
    }
    for p in desc.known_members() {
        if (alpha2 % &p).is_zero() || (alpha1.magnitude() % &p).is_zero() {
            return Err(SolveError::SharesDescribedPrime(p));
        }
    }
    let thresholds = rule.thresholds();
    let built = seq.stages_built();
    let not_built = |needed| SolveError::StageNotBuilt {
        alpha2: alpha2.clone(),
        needed,
        built,
    };
    let Some(i) = seq.first_stage_divisible_by(alpha2) else {
        return Err(not_built(stage_for_modulus(seq, alpha2)));
    };
    let Some(&j) = thresholds.get(i) else {
        // Rows past I_max are not described; the column would need row i.
        return Err(not_built(None));
    };
    if i + j > built {
        return Err(not_built(Some(i + j)));
    }
    let column = seq.column(i, j).expect("built column");
    let hints = seq.known_primes();
    let group = UnitGroup::for_modulus(alpha2, &hints)?;
    let m = BigInt::from(alpha2.clone());
    let target = crate::ntheory::unit_group::mod_inverse(
        &alpha1.mod_floor(&m).to_biguint().unwrap(),
        alpha2,
    )
    .expect("coprime");
    let gens: Vec<BigUint> = column.iter().map(|p| p % alpha2).collect();
    let exps = if alpha2.is_one() {
        Some(vec![BigUint::zero(); gens.len()])
    } else {
        group.express(&target, &gens)?
    };
    let exps = exps.expect("column primes generate (Z/a_i)^x and hence (Z/alpha2)^x");
    let word: Vec<(BigUint, BigUint)> = column
        .into_iter()
        .zip(exps)
        .filter(|(_, e)| !e.is_zero())
        .collect();
    let u_mod = word.iter().fold(BigUint::one() % alpha2, |acc, (p, e)| {
        acc * p.modpow(e, alpha2) % alpha2
    });
    Ok(UnitSolution {
        alpha1: alpha1.clone(),
        alpha2: alpha2.clone(),
        column: (i, j),
        word,
        u_mod,
    })
}

/// Moduli in search order: primes ascending, then composites ascending.
fn moduli(bound: u64) -> impl Iterator<Item = u64> {
    let primes = (3..=bound).filter(|&n| is_prime_u64(n));
    let composites = (4..=bound).filter(|&n| !is_prime_u64(n));
    primes.chain(composites)
}

fn residues_mod(ps: &BTreeSet<BigUint>, m: u64) -> Option<Vec<u64>> {
    let mb = BigUint::from(m);
    ps.iter()
        .map(|p| {
            let r = (p % &mb).to_u64().unwrap();
            (r.gcd(&m) == 1).then_some(r)
        })
        .collect()
}

/// Search α₂ ≤ bound (primes first) for a prime α₁ outside `members`
/// whose residue lies outside H = ⟨−1, members⟩ mod α₂.
fn enumerated_obstruction(members: &BTreeSet<BigUint>, cofinite: bool, bound: u64) -> Option<Obstruction> {
    for alpha2 in moduli(bound) {
        let gens = if cofinite {
            // Every prime below 4α₂ that is not excluded; by Dirichlet these
            // already reach every unit class that infinitely many primes do.
            sieve((4 * alpha2) as u32)
                .into_iter()
                .map(|p| p as u64)
                .filter(|&p| alpha2 % p != 0 && !members.contains(&BigUint::from(p)))
                .map(|p| p % alpha2)
                .collect()
        } else {
            match residues_mod(members, alpha2) {
                Some(g) => g,
                None => continue,
            }
        };
        let mut all = gens;
        all.push(alpha2 - 1);
        let h = subgroup_generated(alpha2, &all).ok()?;
        let phi = (1..alpha2).filter(|x| x.gcd(&alpha2) == 1).count();
        if h.len() == phi {
            continue;
        }
        let limit = alpha2 * 64 + 1000;
        let alpha1 = (2..limit).find(|&p| {
            is_prime_u64(p)
                && alpha2 % p != 0
                && (cofinite == members.contains(&BigUint::from(p)))
                && !h.contains(&(p % alpha2))
        });
        if let Some(a1) = alpha1 {
            return Some(Obstruction {
                alpha1: BigUint::from(a1),
                alpha2: BigUint::from(alpha2),
                proof: ResidueProof::Enumerated {
                    generators: all,
                    subgroup: h.into_iter().collect(),
                },
            });
        }
    }
    None
}

fn least_nonresidue_prime(q: &BigUint) -> BigUint {
    let mut p = BigUint::from(2u32);
    loop {
        if &p != q && is_quadratic_residue(&BigInt::from(p.clone()), q) == Ok(false) {
            return p;
        }
        p = crate::ntheory::next_prime(&p);
    }
}

/// Prime α₂ ≡ 1 (mod 8 ∏F): then −1, 2 and every odd p ∈ F are squares
/// mod α₂ by reciprocity, and any non-residue prime α₁ is an obstruction.
fn quadratic_obstruction(members: &BTreeSet<BigUint>) -> Result<Obstruction, NtError> {
    let modulus: BigUint = members.iter().product::<BigUint>() * 8u32;
    let alpha2 = dirichlet_search(&BigInt::one(), &modulus, &BigInt::zero())?.into_inner();
    Ok(Obstruction {
        alpha1: least_nonresidue_prime(&alpha2),
        alpha2,
        proof: ResidueProof::Quadratic {
            residues: members.iter().cloned().collect(),
        },
    })
}

fn cutoff_obstruction(desc: &PrimeSetDescription, i_star: usize, seq: &PrimeSequence) -> Option<Obstruction> {
    let q = seq.q(i_star)?.clone();
    Some(Obstruction {
        alpha1: least_nonresidue_prime(&q),
        alpha2: q,
        proof: ResidueProof::Quadratic {
            residues: desc.known_members().into_iter().collect(),
        },
    })
}

/// Bounded search for (α₁, α₂) refuting stable range 1.
pub fn find_obstruction(desc: &PrimeSetDescription, bound: u64) -> Option<Obstruction> {
    match desc {
        PrimeSetDescription::Finite(s) => enumerated_obstruction(s, false, bound),
        PrimeSetDescription::Cofinite(ex) => enumerated_obstruction(ex, true, bound),
        PrimeSetDescription::ColumnUnion { seq, rule } => match rule {
            ColumnRule::Total { .. } => None,
            ColumnRule::Cutoff { i_star: 0, .. } => {
                enumerated_obstruction(&BTreeSet::new(), false, bound)
            }
            ColumnRule::Cutoff { i_star, .. } => {
                if rule.required_stage() > seq.stages_built() {
                    return None;
                }
                cutoff_obstruction(desc, *i_star, seq)
            }
        },
    }
}

fn recipe_probes(desc: &PrimeSetDescription, seq: &PrimeSequence, rows: usize) -> Vec<(BigInt, BigUint)> {
    let members = desc.known_members();
    let mut probes = Vec::new();
    for i in 0..rows {
        let mut alpha2 = seq.a(i).unwrap().clone();
        for p in &members {
            while (&alpha2 % p).is_zero() {
                alpha2 /= p;
            }
        }
        let alpha1s = (2u64..)
            .filter(|&p| is_prime_u64(p))
            .map(BigUint::from)
            .filter(|p| !(&alpha2 % p).is_zero() && !members.contains(p))
            .take(2);
        for a1 in alpha1s {
            probes.push((BigInt::from(a1), alpha2.clone()));
        }
    }
    probes
}

/// Solve a recipe probe, dropping from α₂ the primes p whose p − 1 needs a
/// discrete log beyond [`LOG_PRIME_LIMIT`](crate::ntheory::unit_group::LOG_PRIME_LIMIT).
/// q_k − 1 is divisible by q_{k−1}, so from stage 3 on the full a_i is out of reach.
fn solve_within_log_limit(
    desc: &PrimeSetDescription,
    seq: &PrimeSequence,
    alpha1: &BigInt,
    mut alpha2: BigUint,
) -> Option<UnitSolution> {
    loop {
        match solve_unit(desc, alpha1, &alpha2) {
            Ok(sol) => return Some(sol),
            Err(SolveError::Nt(NtError::LogTooLarge(ell))) => {
                let f = factorize(&alpha2, &seq.known_primes()).ok()?;
                let before = alpha2.clone();
                for (p, e) in f.iter() {
                    if ((p - 1u32) % &ell).is_zero() {
                        alpha2 /= p.pow(e);
                    }
                }
                if alpha2 == before || alpha2.is_one() {
                    return None;
                }
            }
            Err(_) => return None,
        }
    }
}

pub fn has_one_in_stable_range(desc: &PrimeSetDescription) -> StableRangeVerdict {
    stable_range_with_bound(desc, DEFAULT_OBSTRUCTION_BOUND)
}

pub fn stable_range_with_bound(desc: &PrimeSetDescription, bound: u64) -> StableRangeVerdict {
    let finite_no = |members: &BTreeSet<BigUint>| {
        let obstruction = enumerated_obstruction(members, false, bound)
            .or_else(|| quadratic_obstruction(members).ok())
            .expect("a prime 1 mod 8 prod F exists");
        StableRangeVerdict {
            verdict: Verdict::No,
            certificate: Certificate::Obstruction(obstruction),
            search_bound_used: Some(bound),
        }
    };
    match desc {
        PrimeSetDescription::Cofinite(_) => StableRangeVerdict {
            verdict: Verdict::Yes,
            certificate: Certificate::ClosedForm(ClosedForm::Cofinite),
            search_bound_used: None,
        },
        PrimeSetDescription::Finite(s) => finite_no(s),
        PrimeSetDescription::ColumnUnion { seq, rule } => {
            let needed = rule.required_stage();
            let built = seq.stages_built();
            if let ColumnRule::Cutoff { i_star: 0, .. } = rule {
                return finite_no(&BTreeSet::new());
            }
            if needed > built {
                return StableRangeVerdict {
                    verdict: Verdict::Unknown,
                    certificate: Certificate::MissingStage { needed, built },
                    search_bound_used: None,
                };
            }
            match rule {
                ColumnRule::Total { j_of_i } => {
                    let probes = recipe_probes(desc, seq, j_of_i.len())
                        .into_iter()
                        .filter_map(|(a1, a2)| solve_within_log_limit(desc, seq, &a1, a2))
                        .collect();
                    StableRangeVerdict {
                        verdict: Verdict::Yes,
                        certificate: Certificate::UnitRecipe { probes },
                        search_bound_used: None,
                    }
                }
                ColumnRule::Cutoff { i_star, .. } => StableRangeVerdict {
                    verdict: Verdict::No,
                    certificate: Certificate::Obstruction(
                        cutoff_obstruction(desc, *i_star, seq).expect("q_{i*} built"),
                    ),
                    search_bound_used: None,
                },
            }
        }
    }
}

fn check_obstruction(desc: &PrimeSetDescription, o: &Obstruction) -> bool {
    let (a1, a2) = (&o.alpha1, &o.alpha2);
    if !is_prime(a1) || *a2 < BigUint::from(3u32) || !a1.gcd(a2).is_one() {
        return false;
    }
    let (members, cutoff) = match desc {
        PrimeSetDescription::Finite(s) => (s.clone(), None),
        PrimeSetDescription::Cofinite(_) => return false,
        PrimeSetDescription::ColumnUnion { seq, rule } => match rule {
            ColumnRule::Total { .. } => return false,
            ColumnRule::Cutoff { i_star: 0, .. } => (BTreeSet::new(), None),
            ColumnRule::Cutoff { i_star, .. } => {
                (desc.known_members(), Some(seq.q(*i_star).cloned()))
            }
        },
    };
    if members.contains(a1) || members.iter().any(|p| (a2 % p).is_zero()) {
        return false;
    }
    match &o.proof {
        ResidueProof::Enumerated {
            generators,
            subgroup,
        } => {
            if cutoff.is_some() {
                return false;
            }
            let Some(m) = a2.to_u64() else { return false };
            let Some(mut expected) = residues_mod(&members, m) else {
                return false;
            };
            expected.push(m - 1);
            let Ok(h) = subgroup_generated(m, &expected) else {
                return false;
            };
            *generators == expected
                && subgroup.iter().copied().eq(h.iter().copied())
                && !h.contains(&(a1 % m).to_u64().unwrap())
        }
        ResidueProof::Quadratic { residues } => {
            if let Some(q) = cutoff {
                if q.as_ref() != Some(a2) {
                    return false;
                }
            }
            let qr = |x: &BigUint| is_quadratic_residue(&BigInt::from(x.clone()), a2);
            is_prime(a2)
                && (a2 % 4u32).is_one()
                && residues.iter().cloned().collect::<BTreeSet<_>>() == members
                && residues.iter().all(|p| qr(p) == Ok(true))
                && qr(a1) == Ok(false)
        }
    }
}

/// Re-verify a verdict's certificate from scratch.
pub fn check_certificate(desc: &PrimeSetDescription, v: &StableRangeVerdict) -> bool {
    match (&v.verdict, &v.certificate) {
        (Verdict::Yes, Certificate::ClosedForm(ClosedForm::Cofinite)) => {
            matches!(desc, PrimeSetDescription::Cofinite(_))
        }
        (Verdict::No, Certificate::Obstruction(o)) => check_obstruction(desc, o),
        (Verdict::Yes, Certificate::UnitRecipe { probes }) => {
            let PrimeSetDescription::ColumnUnion {
                rule: rule @ ColumnRule::Total { .. },
                seq,
            } = desc
            else {
                return false;
            };
            !probes.is_empty()
                && probes.iter().all(|p| {
                    let column = seq.column(p.column.0, p.column.1).unwrap_or_default();
                    p.checks_out()
                        && rule.includes(p.column.0, p.column.1)
                        && p.word.iter().all(|(q, _)| column.contains(q))
                        && solve_unit(desc, &p.alpha1, &p.alpha2).as_ref() == Ok(p)
                })
        }
        (Verdict::Unknown, Certificate::MissingStage { needed, built }) => match desc {
            PrimeSetDescription::ColumnUnion { seq, rule } => {
                *built == seq.stages_built() && *needed == rule.required_stage() && needed > built
            }
            _ => false,
        },
        _ => false,
    }
}

/// What is being asked to cancel.
#[derive(Clone, Copy, Debug)]
pub enum CancelInput<'a> {
    Group(&'a Rank1Group),
    /// E(G) given by its inverted primes, with whether G is ℤ.
    Ring {
        inverted: &'a PrimeSetDescription,
        is_z: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CancelBasis {
    IsZ,
    StableRange(StableRangeVerdict),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancellationVerdict {
    pub verdict: Verdict,
    pub basis: CancelBasis,
    pub caveat: Option<String>,
}

pub const RATIONALS_CAVEAT: &str = "every prime is inverted, so the group is Q; the criterion is applied literally here although Q is commonly listed as not cancellable, and the criterion is usually stated for finite-rank groups";

/// A rank-1 group cancels iff it is ℤ or 1 is in the stable range of E(G).
pub fn is_cancellable(input: CancelInput<'_>) -> CancellationVerdict {
    let (desc, is_z) = match input {
        CancelInput::Group(g) => (g.endomorphism_ring().inverted, g.is_trivially_z()),
        CancelInput::Ring { inverted, is_z } => (inverted.clone(), is_z),
    };
    if is_z {
        return CancellationVerdict {
            verdict: Verdict::Yes,
            basis: CancelBasis::IsZ,
            caveat: None,
        };
    }
    let caveat = match &desc {
        PrimeSetDescription::Cofinite(ex) if ex.is_empty() => Some(RATIONALS_CAVEAT.to_string()),
        _ => None,
    };
    let sr = has_one_in_stable_range(&desc);
    CancellationVerdict {
        verdict: sr.verdict,
        basis: CancelBasis::StableRange(sr),
        caveat,
    }
}

impl fmt::Display for CancellationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cancellable: {}", self.verdict)?;
        match &self.basis {
            CancelBasis::IsZ => writeln!(f, "basis: the group is Z")?,
            CancelBasis::StableRange(v) => {
                writeln!(f, "basis: stable range of the endomorphism ring")?;
                write!(f, "{v}")?;
            }
        }
        if let Some(c) = &self.caveat {
            writeln!(f, "caveat: {c}")?;
        }
        Ok(())
    }
}
