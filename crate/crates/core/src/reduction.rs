//! From quantifier tables to groups and rings.
//!
//! A Π⁰₄ table holds a relation R(i', j', u, v) on a finite window together
//! with flags asserting that (∀u)(∃v) R(i', j', u, v) holds outright. Each
//! prime p ∈ P_{i,j} receives height m where m is the largest bound with
//! (∀i' ≤ i)(∃j' ≤ j)(∀u ≤ m)(∃v) R, and height ∞ when flags witness the
//! unbounded condition. A Π⁰₂ table S(i, j) selects columns the same way,
//! without the inner quantifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::primeseq::PrimeSequence;
use crate::rank1::{ExtendedHeight, Rank1Group};
use crate::stablerange::{
    is_cancellable, CancelInput, CancellationVerdict, ColumnRule, PrimeSetDescription,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("entry {0:?} lies outside the declared bounds")]
    OutOfBounds(Vec<usize>),
    #[error("flag ({0}, {1}) is set but (forall u <= U)(exists v <= V) R fails at u = {2}")]
    FlagContradicted(usize, usize, usize),
    #[error("flag (0, 0) must be set so that the group is not Z; make row 0 succeed at j = 0")]
    NotNormalized,
    #[error("the sequence has {built} stages, the table needs {needed}")]
    InsufficientStages { needed: usize, built: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds4 {
    pub i_max: usize,
    pub j_max: usize,
    pub u_max: usize,
    pub v_max: usize,
}

/// R(x; i', j', u, v) on i' ≤ I, j' ≤ J, u ≤ U, v ≤ V, with total flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifierTable4 {
    label: String,
    bounds: Bounds4,
    entries: BTreeSet<(usize, usize, usize, usize)>,
    flags: BTreeSet<(usize, usize)>,
}

impl QuantifierTable4 {
    /// Checks bounds and that every flag agrees with the bounded slice.
    pub fn new(
        label: impl Into<String>,
        bounds: Bounds4,
        entries: impl IntoIterator<Item = (usize, usize, usize, usize)>,
        flags: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TableError> {
        let t = Self {
            label: label.into(),
            bounds,
            entries: entries.into_iter().collect(),
            flags: flags.into_iter().collect(),
        };
        let b = t.bounds;
        for &(i, j, u, v) in &t.entries {
            if i > b.i_max || j > b.j_max || u > b.u_max || v > b.v_max {
                return Err(TableError::OutOfBounds(vec![i, j, u, v]));
            }
        }
        for &(i, j) in &t.flags {
            if i > b.i_max || j > b.j_max {
                return Err(TableError::OutOfBounds(vec![i, j]));
            }
            if let Some(u) = (0..=b.u_max).find(|&u| !t.exists_v(i, j, u)) {
                return Err(TableError::FlagContradicted(i, j, u));
            }
        }
        Ok(t)
    }

    pub fn from_fn(
        label: impl Into<String>,
        bounds: Bounds4,
        r: impl Fn(usize, usize, usize, usize) -> bool,
        flags: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TableError> {
        let mut entries = Vec::new();
        for i in 0..=bounds.i_max {
            for j in 0..=bounds.j_max {
                for u in 0..=bounds.u_max {
                    for v in 0..=bounds.v_max {
                        if r(i, j, u, v) {
                            entries.push((i, j, u, v));
                        }
                    }
                }
            }
        }
        Self::new(label, bounds, entries, flags)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bounds(&self) -> Bounds4 {
        self.bounds
    }

    pub fn r(&self, i: usize, j: usize, u: usize, v: usize) -> bool {
        self.entries.contains(&(i, j, u, v))
    }

    pub fn flag(&self, i: usize, j: usize) -> bool {
        self.flags.contains(&(i, j))
    }

    fn exists_v(&self, i: usize, j: usize, u: usize) -> bool {
        (0..=self.bounds.v_max).any(|v| self.r(i, j, u, v))
    }

    /// (∀u ≤ m)(∃v ≤ V) R(i', j', u, v)
    pub fn bounded_success(&self, i: usize, j: usize, m: usize) -> bool {
        (0..=m.min(self.bounds.u_max)).all(|u| self.exists_v(i, j, u))
    }

    /// (∀i' ≤ i)(∃j' ≤ j)(∀u ≤ m)(∃v ≤ V) R
    pub fn condition(&self, i: usize, j: usize, m: usize) -> bool {
        let j = j.min(self.bounds.j_max);
        (0..=i).all(|i2| (0..=j).any(|j2| self.bounded_success(i2, j2, m)))
    }

    /// (∀i' ≤ i)(∃j' ≤ j) flag(i', j')
    pub fn flagged_condition(&self, i: usize, j: usize) -> bool {
        let j = j.min(self.bounds.j_max);
        (0..=i).all(|i2| (0..=j).any(|j2| self.flag(i2, j2)))
    }

    /// Height given to the primes of P_{i,j}.
    pub fn height(&self, i: usize, j: usize) -> ExtendedHeight {
        if self.flagged_condition(i, j) {
            return ExtendedHeight::Infinite;
        }
        let m = (0..=self.bounds.u_max)
            .rev()
            .find(|&m| self.condition(i, j, m))
            .unwrap_or(0);
        ExtendedHeight::Finite(m as u32)
    }

    /// Least flagged j for each row, up to the first row without one.
    fn flagged_rows(&self) -> (Vec<usize>, Option<usize>) {
        let mut j_of_i = Vec::new();
        for i in 0..=self.bounds.i_max {
            match (0..=self.bounds.j_max).find(|&j| self.flag(i, j)) {
                Some(j) => j_of_i.push(j),
                None => return (j_of_i, Some(i)),
            }
        }
        (j_of_i, None)
    }

    pub fn is_total(&self) -> bool {
        self.flagged_rows().1.is_none()
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut p = TableParser::new(text, "pi4 v1")?;
        let mut bounds = None;
        let mut entries = Vec::new();
        let mut flags = Vec::new();
        while let Some((line, f)) = p.next_record() {
            match (f[0].as_str(), f.len()) {
                ("bounds", 5) => {
                    let n = p.nats(line, &f[1..])?;
                    bounds = Some(Bounds4 {
                        i_max: n[0],
                        j_max: n[1],
                        u_max: n[2],
                        v_max: n[3],
                    });
                }
                ("flag", 3) => {
                    let n = p.nats(line, &f[1..])?;
                    flags.push((n[0], n[1]));
                }
                ("true", 5) => {
                    let n = p.nats(line, &f[1..])?;
                    entries.push((n[0], n[1], n[2], n[3]));
                }
                _ => return Err(parse_err(line, format!("unexpected record {:?}", f.join(" ")))),
            }
        }
        let bounds = bounds.ok_or_else(|| parse_err(2, "missing `bounds I J U V`".into()))?;
        Self::new(p.label, bounds, entries, flags)
    }
}

impl fmt::Display for QuantifierTable4 {
    /// The table file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.bounds;
        writeln!(f, "pi4 v1")?;
        writeln!(f, "label {}", self.label)?;
        writeln!(f, "bounds {} {} {} {}", b.i_max, b.j_max, b.u_max, b.v_max)?;
        for (i, j) in &self.flags {
            writeln!(f, "flag {i} {j}")?;
        }
        for (i, j, u, v) in &self.entries {
            writeln!(f, "true {i} {j} {u} {v}")?;
        }
        Ok(())
    }
}

/// S(x; i, j) on i ≤ I, j ≤ J.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifierTable2 {
    label: String,
    i_max: usize,
    j_max: usize,
    entries: BTreeSet<(usize, usize)>,
}

impl QuantifierTable2 {
    pub fn new(
        label: impl Into<String>,
        i_max: usize,
        j_max: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TableError> {
        let entries: BTreeSet<_> = entries.into_iter().collect();
        if let Some(&(i, j)) = entries.iter().find(|&&(i, j)| i > i_max || j > j_max) {
            return Err(TableError::OutOfBounds(vec![i, j]));
        }
        Ok(Self {
            label: label.into(),
            i_max,
            j_max,
            entries,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.i_max, self.j_max)
    }

    pub fn s(&self, i: usize, j: usize) -> bool {
        self.entries.contains(&(i, j))
    }

    /// (∀i' ≤ i)(∃j' ≤ j) S(i', j')
    pub fn condition(&self, i: usize, j: usize) -> bool {
        let j = j.min(self.j_max);
        (0..=i).all(|i2| (0..=j).any(|j2| self.s(i2, j2)))
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut p = TableParser::new(text, "pi2 v1")?;
        let mut bounds = None;
        let mut entries = Vec::new();
        while let Some((line, f)) = p.next_record() {
            match (f[0].as_str(), f.len()) {
                ("bounds", 3) => {
                    let n = p.nats(line, &f[1..])?;
                    bounds = Some((n[0], n[1]));
                }
                ("true", 3) => {
                    let n = p.nats(line, &f[1..])?;
                    entries.push((n[0], n[1]));
                }
                _ => return Err(parse_err(line, format!("unexpected record {:?}", f.join(" ")))),
            }
        }
        let (i, j) = bounds.ok_or_else(|| parse_err(2, "missing `bounds I J`".into()))?;
        Self::new(p.label, i, j, entries)
    }
}

impl fmt::Display for QuantifierTable2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pi2 v1")?;
        writeln!(f, "label {}", self.label)?;
        writeln!(f, "bounds {} {}", self.i_max, self.j_max)?;
        for (i, j) in &self.entries {
            writeln!(f, "true {i} {j}")?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, msg: String) -> TableError {
    TableError::Parse { line, msg }
}

struct TableParser<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    label: String,
}

impl<'a> TableParser<'a> {
    fn new(text: &'a str, header: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().enumerate();
        let first = lines.next().map(|(_, l)| l.trim()).unwrap_or_default();
        if first != header {
            return Err(parse_err(1, format!("expected header {header:?}, got {first:?}")));
        }
        Ok(Self {
            lines,
            label: String::new(),
        })
    }

    /// Next non-comment record other than `label`.
    fn next_record(&mut self) -> Option<(usize, Vec<String>)> {
        for (idx, raw) in self.lines.by_ref() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("label") {
                self.label = rest.trim().to_string();
                continue;
            }
            return Some((idx + 1, line.split_whitespace().map(String::from).collect()));
        }
        None
    }

    fn nats(&self, line: usize, fields: &[String]) -> Result<Vec<usize>, TableError> {
        fields
            .iter()
            .map(|s| s.parse().map_err(|_| parse_err(line, format!("expected a natural number, got {s:?}"))))
            .collect()
    }
}

fn require_stages(seq: &PrimeSequence, needed: usize) -> Result<(), TableError> {
    let built = seq.stages_built();
    if built < needed {
        Err(TableError::InsufficientStages { needed, built })
    } else {
        Ok(())
    }
}

fn check_normalized(table: &QuantifierTable4) -> Result<(), TableError> {
    if table.flag(0, 0) {
        Ok(())
    } else {
        Err(TableError::NotNormalized)
    }
}

/// G(x): each p ∈ P_{i,j} (i ≤ I_max, i + j built) gets the table's height.
/// Primes of rows past I_max lie outside the window and keep height 0.
pub fn build_group(table: &QuantifierTable4, seq: &PrimeSequence) -> Result<Rank1Group, TableError> {
    check_normalized(table)?;
    let b = table.bounds();
    require_stages(seq, b.i_max + b.j_max)?;
    let mut heights = Vec::new();
    for ((i, j), col) in seq.columns() {
        if i > b.i_max {
            continue;
        }
        let h = table.height(i, j);
        heights.extend(col.into_iter().map(|p| (p, h)));
    }
    Ok(Rank1Group::new(heights)
        .expect("column entries are prime")
        .with_label(table.label()))
}

/// M as a column union: total when every row i ≤ I_max has a flagged j,
/// otherwise cut off at the least row without one.
pub fn characterize_m(table: &QuantifierTable4, seq: Arc<PrimeSequence>) -> Result<PrimeSetDescription, TableError> {
    check_normalized(table)?;
    let b = table.bounds();
    require_stages(&seq, b.i_max + b.j_max)?;
    let (j_of_i, cut) = table.flagged_rows();
    let rule = match cut {
        None => ColumnRule::Total { j_of_i },
        Some(i_star) => ColumnRule::Cutoff { i_star, j_of_i },
    };
    Ok(PrimeSetDescription::column_union(seq, rule).expect("rule shape follows the table"))
}

/// Cancellability of G(x), which is never ℤ for a normalized table.
pub fn classify(table: &QuantifierTable4, seq: Arc<PrimeSequence>) -> Result<CancellationVerdict, TableError> {
    let desc = characterize_m(table, seq)?;
    Ok(is_cancellable(CancelInput::Ring {
        inverted: &desc,
        is_z: false,
    }))
}

/// Per-column membership in M_x, each read off the table by a finite lookup.
#[derive(Clone, Debug)]
pub struct RingReport {
    pub description: PrimeSetDescription,
    pub columns: BTreeMap<(usize, usize), bool>,
    /// The lookups agree with the column rule on every built column.
    pub consistent: bool,
}

impl fmt::Display for RingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.description.to_file_string())?;
        writeln!(f, "column membership (finite table lookup):")?;
        for ((i, j), inside) in &self.columns {
            writeln!(f, "  P_{{{i},{j}}} {}", if *inside { "in" } else { "out" })?;
        }
        writeln!(
            f,
            "every column decided by lookup: {}",
            if self.consistent { "yes" } else { "no" }
        )
    }
}

/// R(x) = ℤ_{M_x} with M_x = {p ∈ P_{i,j} : (∀i' ≤ i)(∃j' ≤ j) S(i', j')}.
pub fn build_ring(table: &QuantifierTable2, seq: Arc<PrimeSequence>) -> Result<RingReport, TableError> {
    let (i_max, j_max) = table.bounds();
    require_stages(&seq, i_max + j_max)?;
    let mut j_of_i = Vec::new();
    let mut cut = None;
    for i in 0..=i_max {
        match (0..=j_max).find(|&j| table.s(i, j)) {
            Some(j) => j_of_i.push(j),
            None => {
                cut = Some(i);
                break;
            }
        }
    }
    let rule = match cut {
        None => ColumnRule::Total { j_of_i },
        Some(i_star) => ColumnRule::Cutoff { i_star, j_of_i },
    };
    let mut columns = BTreeMap::new();
    let mut consistent = true;
    for ((i, j), _) in seq.columns() {
        if i > i_max {
            continue;
        }
        let inside = table.condition(i, j);
        consistent &= inside == rule.includes(i, j);
        columns.insert((i, j), inside);
    }
    Ok(RingReport {
        description: PrimeSetDescription::column_union(seq, rule).expect("rule shape follows the table"),
        columns,
        consistent,
    })
}

/// {p : height(p) = ∞}
pub fn infinite_height_primes(g: &Rank1Group) -> BTreeSet<BigUint> {
    g.heights()
        .filter(|(_, h)| h.is_infinite())
        .map(|(p, _)| p.clone())
        .collect()
}
