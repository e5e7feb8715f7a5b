//! The sequences a_i, q_i, r_i and the prime sets P_{i,j}.
//!
//! Stage 0 fixes a_0 = 3 and P_{0,0}. Stage s ≥ 1 picks
//!
//! * q_s, the least prime ≡ 1 modulo 4 · ∏ P_{i,j} (i + j < s) · ∏ a_i (i < s),
//! * r_s from [`r_enumeration`], and a_s = a_{s-1} q_s r_s,
//! * for i = 0..=s and j = s − i, one prime per greedy generator g of
//!   (ℤ/a_iℤ)^×: the least prime ≡ 1 (mod q_{i+1}⋯q_s) and ≡ g (mod a_i)
//!   above every prime placed so far (and at least 5).
//!
//! Every search is recorded so that minimality can be re-checked.

pub mod cache;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ntheory::{
    crt_combine, dirichlet_scan, greedy_generators, is_prime, is_quadratic_residue,
    nth_prime, Congruence, Factorization, NtError, ScanRecord, Subgroup, UnitGroup,
    DEFAULT_SEARCH_CEILING,
};

/// Stages that build in seconds; beyond this the moduli have hundreds of digits.
pub const DEFAULT_STAGE_CAP: usize = 3;

#[derive(Debug, Error)]
pub enum SeqError {
    #[error(transparent)]
    Nt(#[from] NtError),
    #[error("invariant {clause} failed: {detail}")]
    Invariant { clause: Clause, detail: String },
    #[error(transparent)]
    Cache(#[from] cache::CacheError),
}

/// The i-th element of an enumeration of the primes in which every prime
/// occurs infinitely often: for i = 2^a (2b + 1), the (a + 1)-th prime.
pub fn r_enumeration(i: usize) -> BigUint {
    assert!(i >= 1, "the enumeration starts at 1");
    BigUint::from(nth_prime(i.trailing_zeros() as usize + 1))
}

/// One prime of a set P_{i,j} together with the search that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnPrime {
    pub prime: BigUint,
    pub generator: BigUint,
    pub scan: ScanRecord,
}

/// Raw tables, no invariants assumed. Used to load caches and to build
/// deliberately broken sequences in tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceParts {
    /// a_0..a_s
    pub a: Vec<BigUint>,
    /// q_1..q_s (index k − 1)
    pub q: Vec<BigUint>,
    /// r_1..r_s (index k − 1)
    pub r: Vec<BigUint>,
    pub q_scans: Vec<ScanRecord>,
    pub columns: BTreeMap<(usize, usize), Vec<ColumnPrime>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSequence {
    parts: SequenceParts,
}

impl PrimeSequence {
    pub fn build(stages: usize) -> Result<Self, SeqError> {
        Self::build_with_ceiling(stages, DEFAULT_SEARCH_CEILING)
    }

    pub fn build_with_ceiling(stages: usize, ceiling: u64) -> Result<Self, SeqError> {
        let mut seq = Self::stage_zero(ceiling)?;
        seq.extend_with_ceiling(stages, ceiling)?;
        Ok(seq)
    }

    fn stage_zero(ceiling: u64) -> Result<Self, SeqError> {
        let mut seq = Self {
            parts: SequenceParts {
                a: vec![BigUint::from(3u32)],
                q: Vec::new(),
                r: Vec::new(),
                q_scans: Vec::new(),
                columns: BTreeMap::new(),
            },
        };
        seq.place_diagonal(0, ceiling)?;
        Ok(seq)
    }

    /// Build further stages on top of the existing ones.
    pub fn extend(&mut self, stages: usize) -> Result<(), SeqError> {
        self.extend_with_ceiling(stages, DEFAULT_SEARCH_CEILING)
    }

    pub fn extend_with_ceiling(&mut self, stages: usize, ceiling: u64) -> Result<(), SeqError> {
        while self.stages_built() < stages {
            let s = self.stages_built() + 1;
            let scan = dirichlet_scan(
                &BigInt::one(),
                &q_modulus(&self.parts, s),
                &BigInt::zero(),
                ceiling,
            )?;
            let q = scan.prime.clone();
            let r = r_enumeration(s);
            let a = self.parts.a[s - 1].clone() * &q * &r;
            self.parts.q.push(q);
            self.parts.r.push(r);
            self.parts.q_scans.push(scan);
            self.parts.a.push(a);
            self.place_diagonal(s, ceiling)?;
        }
        Ok(())
    }

    fn place_diagonal(&mut self, s: usize, ceiling: u64) -> Result<(), SeqError> {
        let mut floor = placement_floor(&self.parts, s);
        let hints = self.known_primes();
        for i in 0..=s {
            let group = UnitGroup::for_modulus(&self.parts.a[i], &hints)?;
            let gens = greedy_generators(&group)?;
            let q_block = q_block(&self.parts, i, s);
            let mut column = Vec::with_capacity(gens.len());
            for g in gens {
                let c = column_congruence(&q_block, &g, &self.parts.a[i])?;
                let scan = dirichlet_scan(
                    &BigInt::from(c.residue().clone()),
                    c.modulus(),
                    &BigInt::from(floor.clone()),
                    ceiling,
                )?;
                floor = scan.prime.clone();
                column.push(ColumnPrime {
                    prime: scan.prime.clone(),
                    generator: g,
                    scan,
                });
            }
            self.parts.columns.insert((i, s - i), column);
        }
        Ok(())
    }

    pub fn from_parts_unchecked(parts: SequenceParts) -> Self {
        Self { parts }
    }

    /// Accepts the tables only if every invariant holds.
    pub fn from_parts(parts: SequenceParts) -> Result<Self, SeqError> {
        let seq = Self { parts };
        let report = seq.verify_invariants();
        if let Some(c) = report.first_failure() {
            return Err(SeqError::Invariant {
                clause: c.clause,
                detail: c.counterexample.clone().unwrap_or_default(),
            });
        }
        Ok(seq)
    }

    pub fn parts(&self) -> &SequenceParts {
        &self.parts
    }

    pub fn into_parts(self) -> SequenceParts {
        self.parts
    }

    pub fn stages_built(&self) -> usize {
        self.parts.a.len() - 1
    }

    pub fn a(&self, i: usize) -> Option<&BigUint> {
        self.parts.a.get(i)
    }

    /// q_k for k ≥ 1.
    pub fn q(&self, k: usize) -> Option<&BigUint> {
        k.checked_sub(1).and_then(|i| self.parts.q.get(i))
    }

    /// r_k for k ≥ 1.
    pub fn r(&self, k: usize) -> Option<&BigUint> {
        k.checked_sub(1).and_then(|i| self.parts.r.get(i))
    }

    /// The primes of P_{i,j}, if i + j is a built stage.
    pub fn column(&self, i: usize, j: usize) -> Option<Vec<BigUint>> {
        self.parts
            .columns
            .get(&(i, j))
            .map(|c| c.iter().map(|e| e.prime.clone()).collect())
    }

    pub fn column_entries(&self, i: usize, j: usize) -> Option<&[ColumnPrime]> {
        self.parts.columns.get(&(i, j)).map(|v| v.as_slice())
    }

    pub fn columns(&self) -> impl Iterator<Item = ((usize, usize), Vec<BigUint>)> + '_ {
        self.parts
            .columns
            .iter()
            .map(|(k, v)| (*k, v.iter().map(|e| e.prime.clone()).collect()))
    }

    /// Every prime the construction has touched; used to factor q − 1 and a_i.
    pub fn known_primes(&self) -> Vec<BigUint> {
        let mut set: BTreeSet<BigUint> = [2u32, 3].into_iter().map(BigUint::from).collect();
        set.extend(self.parts.q.iter().cloned());
        set.extend(self.parts.r.iter().cloned());
        for col in self.parts.columns.values() {
            set.extend(col.iter().map(|e| e.prime.clone()));
        }
        set.into_iter().collect()
    }

    /// a_i = 3 · ∏_{k ≤ i} q_k r_k, factored from the stored tables.
    pub fn a_factorization(&self, i: usize) -> Factorization {
        let mut f = Factorization::from_pairs([(BigUint::from(3u32), 1)]);
        for k in 0..i {
            f.add(self.parts.q[k].clone(), 1);
            f.add(self.parts.r[k].clone(), 1);
        }
        f
    }

    /// (ℤ/a_iℤ)^× with its cyclic decomposition.
    pub fn unit_group(&self, i: usize) -> Result<UnitGroup, NtError> {
        let f = self.a_factorization(i);
        if f.value() == self.parts.a[i] {
            UnitGroup::new(&f, &self.known_primes())
        } else {
            UnitGroup::for_modulus(&self.parts.a[i], &self.known_primes())
        }
    }

    /// Least i with m | a_i among built stages.
    pub fn first_stage_divisible_by(&self, m: &BigUint) -> Option<usize> {
        self.parts.a.iter().position(|a| (a % m).is_zero())
    }

    pub fn verify_invariants(&self) -> InvariantReport {
        verify(&self.parts)
    }
}

fn q_modulus(parts: &SequenceParts, s: usize) -> BigUint {
    let mut m = BigUint::from(4u32);
    for ((i, j), col) in &parts.columns {
        if i + j < s {
            for e in col {
                m *= &e.prime;
            }
        }
    }
    for a in &parts.a[..s] {
        m *= a;
    }
    m
}

/// q_{i+1} ⋯ q_s
fn q_block(parts: &SequenceParts, i: usize, s: usize) -> BigUint {
    parts.q[i..s].iter().product()
}

fn column_congruence(q_block: &BigUint, g: &BigUint, a_i: &BigUint) -> Result<Congruence, NtError> {
    crt_combine(&[
        Congruence::new(1, q_block.clone())?,
        Congruence::new(BigInt::from(g.clone()), a_i.clone())?,
    ])
}

/// Largest prime placed before the stage-s columns (q_s included), or 4.
fn placement_floor(parts: &SequenceParts, s: usize) -> BigUint {
    let mut floor = BigUint::from(4u32);
    for q in &parts.q[..s.min(parts.q.len())] {
        floor = floor.max(q.clone());
    }
    for ((i, j), col) in &parts.columns {
        if i + j < s {
            for e in col {
                floor = floor.max(e.prime.clone());
            }
        }
    }
    floor
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clause {
    Shape,
    Primality,
    Generation,
    Residues,
    Recurrence,
    Coprimality,
    Disjointness,
    Provenance,
}

impl Clause {
    pub const ALL: [Clause; 8] = [
        Clause::Shape,
        Clause::Primality,
        Clause::Generation,
        Clause::Residues,
        Clause::Recurrence,
        Clause::Coprimality,
        Clause::Disjointness,
        Clause::Provenance,
    ];

    /// Item number in the sequence lemma, for the five lemma clauses.
    pub fn number(&self) -> Option<u8> {
        match self {
            Clause::Generation => Some(1),
            Clause::Residues => Some(2),
            Clause::Recurrence => Some(3),
            Clause::Coprimality => Some(4),
            Clause::Disjointness => Some(5),
            _ => None,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Clause::Shape => "shape",
            Clause::Primality => "primality",
            Clause::Generation => "(1) P_{i,j} generates (Z/a_i)^x",
            Clause::Residues => "(2) P_{i,j} residues mod q_k, k > i",
            Clause::Recurrence => "(3) a_0 = 3, a_{i+1} = a_i q_{i+1} r_{i+1}",
            Clause::Coprimality => "(4) gcd(q_i, a_j) = 1 for j < i",
            Clause::Disjointness => "(5) q_k outside every P_{i,j}, P sets disjoint",
            Clause::Provenance => "provenance and minimality",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseResult {
    pub clause: Clause,
    pub checked: usize,
    pub counterexample: Option<String>,
}

impl ClauseResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub stages: usize,
    pub clauses: Vec<ClauseResult>,
}

impl InvariantReport {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed())
    }

    pub fn clause(&self, clause: Clause) -> &ClauseResult {
        self.clauses.iter().find(|c| c.clause == clause).unwrap()
    }

    pub fn first_failure(&self) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| !c.passed())
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stages built: {}", self.stages)?;
        for c in &self.clauses {
            match &c.counterexample {
                None => writeln!(f, "  pass  {} ({} checks)", c.clause, c.checked)?,
                Some(why) => writeln!(f, "  FAIL  {}: {}", c.clause, why)?,
            }
        }
        Ok(())
    }
}

struct Checker {
    clause: Clause,
    checked: usize,
    counterexample: Option<String>,
}

impl Checker {
    fn new(clause: Clause) -> Self {
        Self {
            clause,
            checked: 0,
            counterexample: None,
        }
    }

    /// Records one check; keeps the first counterexample.
    fn check(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(why());
        }
    }

    fn finish(self) -> ClauseResult {
        ClauseResult {
            clause: self.clause,
            checked: self.checked,
            counterexample: self.counterexample,
        }
    }
}

fn verify(parts: &SequenceParts) -> InvariantReport {
    let mut shape = Checker::new(Clause::Shape);
    let s_star = parts.a.len().saturating_sub(1);
    shape.check(!parts.a.is_empty(), || "no stages".into());
    shape.check(
        parts.q.len() == s_star && parts.r.len() == s_star && parts.q_scans.len() == s_star,
        || format!("a has {} entries but q, r have {}, {}", parts.a.len(), parts.q.len(), parts.r.len()),
    );
    for i in 0..=s_star {
        for j in 0..=(s_star - i) {
            shape.check(parts.columns.contains_key(&(i, j)), || {
                format!("P_{{{i},{j}}} missing")
            });
        }
    }
    for &(i, j) in parts.columns.keys() {
        shape.check(i + j <= s_star, || format!("P_{{{i},{j}}} beyond stage {s_star}"));
    }
    let shape = shape.finish();
    if !shape.passed() || parts.a.is_empty() {
        let mut clauses = vec![shape];
        for c in &Clause::ALL[1..] {
            clauses.push(ClauseResult {
                clause: *c,
                checked: 0,
                counterexample: Some("tables malformed".into()),
            });
        }
        return InvariantReport {
            stages: s_star,
            clauses,
        };
    }

    let mut hints: BTreeSet<BigUint> = [2u32, 3].into_iter().map(BigUint::from).collect();
    hints.extend(parts.q.iter().cloned());
    hints.extend(parts.r.iter().cloned());
    for col in parts.columns.values() {
        hints.extend(col.iter().map(|e| e.prime.clone()));
    }
    let hints: Vec<BigUint> = hints.into_iter().collect();

    let mut primality = Checker::new(Clause::Primality);
    for (k, q) in parts.q.iter().enumerate() {
        primality.check(is_prime(q), || format!("q_{} = {q} is not prime", k + 1));
    }
    for (k, r) in parts.r.iter().enumerate() {
        primality.check(is_prime(r), || format!("r_{} = {r} is not prime", k + 1));
    }
    for ((i, j), col) in &parts.columns {
        for e in col {
            let p = &e.prime;
            primality.check(is_prime(p) && *p >= BigUint::from(5u32), || {
                format!("{p} in P_{{{i},{j}}} is not a prime >= 5")
            });
        }
    }

    let mut generation = Checker::new(Clause::Generation);
    let mut groups: BTreeMap<usize, Result<UnitGroup, NtError>> = BTreeMap::new();
    for ((i, j), col) in &parts.columns {
        let group = groups
            .entry(*i)
            .or_insert_with(|| UnitGroup::for_modulus(&parts.a[*i], &hints));
        let primes: Vec<BigUint> = col.iter().map(|e| e.prime.clone()).collect();
        let outcome = match group {
            Ok(g) => Subgroup::generated_by(g, &primes).map(|h| (h.order(), g.order())),
            Err(e) => Err(e.clone()),
        };
        generation.check(matches!(&outcome, Ok((h, g)) if h == g), || match &outcome {
            Ok((h, g)) => format!(
                "P_{{{i},{j}}} generates a subgroup of order {h} in a group of order {g} (a_{i} = {})",
                parts.a[*i]
            ),
            Err(e) => format!("P_{{{i},{j}}}: {e}"),
        });
    }

    let mut residues = Checker::new(Clause::Residues);
    for ((i, j), col) in &parts.columns {
        for e in col {
            for k in (i + 1)..=s_star {
                let qk = &parts.q[k - 1];
                let ok = is_quadratic_residue(&BigInt::from(e.prime.clone()), qk);
                residues.check(matches!(ok, Ok(true)), || {
                    format!("{} in P_{{{i},{j}}} is not a residue mod q_{k} = {qk}", e.prime)
                });
            }
        }
    }

    let mut recurrence = Checker::new(Clause::Recurrence);
    recurrence.check(parts.a[0] == BigUint::from(3u32), || {
        format!("a_0 = {}", parts.a[0])
    });
    for i in 1..=s_star {
        let expected = &parts.a[i - 1] * &parts.q[i - 1] * &parts.r[i - 1];
        recurrence.check(parts.a[i] == expected, || {
            format!("a_{i} = {} but a_{} q_{i} r_{i} = {expected}", parts.a[i], i - 1)
        });
    }

    let mut coprimality = Checker::new(Clause::Coprimality);
    for i in 1..=s_star {
        for j in 0..i {
            let q = &parts.q[i - 1];
            let g = q.gcd(&parts.a[j]);
            coprimality.check(g.is_one(), || {
                format!("gcd(q_{i}, a_{j}) = gcd({q}, {}) = {g}", parts.a[j])
            });
        }
    }

    let mut disjoint = Checker::new(Clause::Disjointness);
    let mut owner: BTreeMap<&BigUint, (usize, usize)> = BTreeMap::new();
    for ((i, j), col) in &parts.columns {
        for e in col {
            let prev = owner.insert(&e.prime, (*i, *j));
            disjoint.check(prev.is_none(), || {
                let (pi, pj) = prev.unwrap();
                format!("{} lies in P_{{{pi},{pj}}} and P_{{{i},{j}}}", e.prime)
            });
        }
    }
    for (k, q) in parts.q.iter().enumerate() {
        let hit = owner.get(q);
        disjoint.check(hit.is_none(), || {
            let (i, j) = hit.unwrap();
            format!("q_{} = {q} lies in P_{{{i},{j}}}", k + 1)
        });
    }

    let provenance = verify_provenance(parts, &groups);

    InvariantReport {
        stages: s_star,
        clauses: vec![
            shape,
            primality.finish(),
            generation.finish(),
            residues.finish(),
            recurrence.finish(),
            coprimality.finish(),
            disjoint.finish(),
            provenance,
        ],
    }
}

/// Every progression between the recorded first candidate and the chosen
/// prime holds only composites.
fn scan_is_minimal(scan: &ScanRecord) -> Result<(), String> {
    let d = scan.congruence.modulus();
    let lb = &scan.lower_bound;
    let start = if lb.sign() == num_bigint::Sign::Minus {
        BigUint::zero()
    } else {
        lb.magnitude() + 1u32
    };
    let offset = (scan.congruence.residue() + d - &start % d) % d;
    let first = &start + offset;
    if first != scan.first_candidate {
        return Err(format!(
            "first candidate recorded as {} but the progression starts at {first}",
            scan.first_candidate
        ));
    }
    if scan.prime < first || !((&scan.prime - &first) % d).is_zero() {
        return Err(format!("{} is not in the scanned progression", scan.prime));
    }
    let steps = (&scan.prime - &first) / d + 1u32;
    if steps != BigUint::from(scan.candidates_scanned) {
        return Err(format!(
            "{} candidates recorded, {steps} implied",
            scan.candidates_scanned
        ));
    }
    let mut c = first;
    while c < scan.prime {
        if is_prime(&c) {
            return Err(format!("{c} is a smaller prime in the progression"));
        }
        c += d;
    }
    Ok(())
}

fn verify_provenance(
    parts: &SequenceParts,
    groups: &BTreeMap<usize, Result<UnitGroup, NtError>>,
) -> ClauseResult {
    let mut chk = Checker::new(Clause::Provenance);
    let s_star = parts.a.len() - 1;
    for k in 1..=s_star {
        chk.check(parts.r[k - 1] == r_enumeration(k), || {
            format!("r_{k} = {} but the enumeration gives {}", parts.r[k - 1], r_enumeration(k))
        });
        let scan = &parts.q_scans[k - 1];
        let expected = Congruence::new(1, q_modulus(parts, k)).unwrap();
        chk.check(scan.congruence == expected && scan.lower_bound.is_zero(), || {
            format!("q_{k} was searched under {} instead of {expected}", scan.congruence)
        });
        chk.check(scan.prime == parts.q[k - 1], || {
            format!("q_{k} = {} but its scan found {}", parts.q[k - 1], scan.prime)
        });
        let minimal = scan_is_minimal(scan);
        chk.check(minimal.is_ok(), || format!("q_{k}: {}", minimal.unwrap_err()));
    }
    for s in 0..=s_star {
        let mut floor = placement_floor(parts, s);
        for i in 0..=s {
            let Some(col) = parts.columns.get(&(i, s - i)) else {
                continue;
            };
            let gens = match groups.get(&i) {
                Some(Ok(g)) => greedy_generators(g).map_err(|e| e.to_string()),
                Some(Err(e)) => Err(e.to_string()),
                None => Err("unit group unavailable".into()),
            };
            let recorded: Vec<&BigUint> = col.iter().map(|e| &e.generator).collect();
            chk.check(
                matches!(&gens, Ok(g) if g.iter().collect::<Vec<_>>() == recorded),
                || format!("P_{{{i},{}}} generators {:?} differ from greedy {:?}", s - i, recorded, gens),
            );
            let qb = q_block(parts, i, s);
            for e in col {
                let expected = column_congruence(&qb, &e.generator, &parts.a[i]);
                chk.check(
                    matches!(&expected, Ok(c) if *c == e.scan.congruence),
                    || format!("{} was searched under {}", e.prime, e.scan.congruence),
                );
                chk.check(e.scan.lower_bound == BigInt::from(floor.clone()), || {
                    format!("{} searched above {} instead of {floor}", e.prime, e.scan.lower_bound)
                });
                chk.check(e.scan.prime == e.prime, || {
                    format!("{} differs from its scan result {}", e.prime, e.scan.prime)
                });
                let minimal = scan_is_minimal(&e.scan);
                chk.check(minimal.is_ok(), || {
                    format!("{} in P_{{{i},{}}}: {}", e.prime, s - i, minimal.unwrap_err())
                });
                floor = floor.max(e.prime.clone());
            }
        }
    }
    chk.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn r_enumeration_values() {
        let got: Vec<BigUint> = (1..=8).map(r_enumeration).collect();
        let want: Vec<BigUint> = [2u64, 3, 2, 5, 2, 3, 2, 7].into_iter().map(b).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn stage_zero_and_one() {
        let s0 = PrimeSequence::build(0).unwrap();
        assert_eq!(s0.a(0), Some(&b(3)));
        assert_eq!(s0.column(0, 0), Some(vec![b(5)]));
        let s1 = PrimeSequence::build(1).unwrap();
        assert_eq!(s1.q(1), Some(&b(61)));
        assert_eq!(s1.r(1), Some(&b(2)));
        assert_eq!(s1.a(1), Some(&b(366)));
        assert!(s1.verify_invariants().all_passed(), "{}", s1.verify_invariants());
    }

    #[test]
    fn prefix_stable() {
        let s1 = PrimeSequence::build(1).unwrap();
        let mut s = PrimeSequence::build(0).unwrap();
        s.extend(1).unwrap();
        assert_eq!(s, s1);
    }

    #[test]
    fn emptied_column_fails_generation() {
        let mut parts = PrimeSequence::build(1).unwrap().into_parts();
        parts.columns.get_mut(&(0, 0)).unwrap().clear();
        let report = PrimeSequence::from_parts_unchecked(parts).verify_invariants();
        assert!(!report.clause(Clause::Generation).passed());
    }

    #[test]
    fn replaced_q_fails_coprimality() {
        let mut parts = PrimeSequence::build(1).unwrap().into_parts();
        parts.q[0] = b(3);
        let report = PrimeSequence::from_parts_unchecked(parts).verify_invariants();
        assert!(!report.clause(Clause::Coprimality).passed());
    }
}
