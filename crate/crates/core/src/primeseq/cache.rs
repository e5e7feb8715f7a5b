//! Text cache for a [`PrimeSequence`].
//!
//! ```text
//! cancellable-primeseq v1
//! stages <s>
//! a <i> <a_i>
//! q <k> <q_k> <scan>
//! r <k> <r_k>
//! p <i> <j> <prime> <generator> <scan>
//! sha256 <hex digest of every preceding line, newline-terminated>
//! ```
//!
//! `<scan>` is `<residue> <modulus> <lower_bound> <first_candidate> <candidates_scanned>`.
//! Records are written stage by stage; within a stage, q and r come first,
//! then a, then the columns in ascending i. All integers are decimal.
//! Loading checks the version, the digest and every invariant.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{ColumnPrime, PrimeSequence, SeqError, SequenceParts};
use crate::ntheory::{Congruence, ScanRecord};

pub const HEADER: &str = "cancellable-primeseq v1";
pub const FILE_NAME: &str = "primeseq.cache";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported cache version: {0:?}")]
    Version(String),
    #[error("checksum mismatch (file truncated or edited)")]
    Checksum,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn scan_fields(s: &ScanRecord) -> String {
    format!(
        "{} {} {} {} {}",
        s.congruence.residue(),
        s.congruence.modulus(),
        s.lower_bound,
        s.first_candidate,
        s.candidates_scanned
    )
}

pub fn to_string(seq: &PrimeSequence) -> String {
    let p = seq.parts();
    let mut body = format!("{HEADER}\nstages {}\n", seq.stages_built());
    for s in 0..=seq.stages_built() {
        if s > 0 {
            body += &format!("q {s} {} {}\n", p.q[s - 1], scan_fields(&p.q_scans[s - 1]));
            body += &format!("r {s} {}\n", p.r[s - 1]);
        }
        body += &format!("a {s} {}\n", p.a[s]);
        for i in 0..=s {
            for e in p.columns.get(&(i, s - i)).map(Vec::as_slice).unwrap_or(&[]) {
                body += &format!(
                    "p {i} {} {} {} {}\n",
                    s - i,
                    e.prime,
                    e.generator,
                    scan_fields(&e.scan)
                );
            }
        }
    }
    let sum = digest(&body);
    body + &format!("sha256 {sum}\n")
}

pub fn save(seq: &PrimeSequence, path: &Path) -> Result<(), CacheError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, to_string(seq))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<PrimeSequence, SeqError> {
    let text = fs::read_to_string(path).map_err(CacheError::from)?;
    from_str(&text)
}

/// Parse without checking invariants (the digest is still checked).
pub fn parse_parts(text: &str) -> Result<SequenceParts, CacheError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != HEADER {
        return Err(CacheError::Version(header.to_string()));
    }
    let Some(pos) = text.rfind("sha256 ") else {
        return Err(CacheError::Checksum);
    };
    let (body, tail) = text.split_at(pos);
    let stated = tail.trim_start_matches("sha256 ").trim_end();
    if !body.ends_with('\n') || digest(body) != stated {
        return Err(CacheError::Checksum);
    }

    let mut parts = SequenceParts {
        a: Vec::new(),
        q: Vec::new(),
        r: Vec::new(),
        q_scans: Vec::new(),
        columns: BTreeMap::new(),
    };
    let mut stages = None;
    for (idx, line) in body.lines().enumerate().skip(1) {
        let lineno = idx + 1;
        let err = |msg: String| CacheError::Parse { line: lineno, msg };
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |k: usize| -> Result<BigUint, CacheError> {
            let s = f.get(k).ok_or_else(|| err(format!("missing field {k}")))?;
            BigUint::from_str(s).map_err(|e| err(format!("{s:?}: {e}")))
        };
        let index = |k: usize| -> Result<usize, CacheError> {
            let s = f.get(k).ok_or_else(|| err(format!("missing field {k}")))?;
            s.parse().map_err(|e| err(format!("{s:?}: {e}")))
        };
        let scan = |k: usize, prime: &BigUint| -> Result<ScanRecord, CacheError> {
            let lb_s = f.get(k + 2).ok_or_else(|| err("missing lower bound".into()))?;
            let lower_bound = BigInt::from_str(lb_s).map_err(|e| err(format!("{lb_s:?}: {e}")))?;
            let scanned_s = f.get(k + 4).ok_or_else(|| err("missing scan count".into()))?;
            let candidates_scanned = scanned_s
                .parse()
                .map_err(|e| err(format!("{scanned_s:?}: {e}")))?;
            let congruence = Congruence::new(BigInt::from(num(k)?), num(k + 1)?)
                .map_err(|e| err(e.to_string()))?;
            if f.len() != k + 5 {
                return Err(err("trailing fields".into()));
            }
            Ok(ScanRecord {
                congruence,
                lower_bound,
                first_candidate: num(k + 3)?,
                candidates_scanned,
                prime: prime.clone(),
            })
        };
        match f.first().copied() {
            Some("stages") => stages = Some(index(1)?),
            Some("a") => {
                if index(1)? != parts.a.len() {
                    return Err(err("a records out of order".into()));
                }
                parts.a.push(num(2)?);
            }
            Some("q") => {
                if index(1)? != parts.q.len() + 1 {
                    return Err(err("q records out of order".into()));
                }
                let q = num(2)?;
                parts.q_scans.push(scan(3, &q)?);
                parts.q.push(q);
            }
            Some("r") => {
                if index(1)? != parts.r.len() + 1 {
                    return Err(err("r records out of order".into()));
                }
                parts.r.push(num(2)?);
            }
            Some("p") => {
                let key = (index(1)?, index(2)?);
                let prime = num(3)?;
                let entry = ColumnPrime {
                    generator: num(4)?,
                    scan: scan(5, &prime)?,
                    prime,
                };
                parts.columns.entry(key).or_default().push(entry);
            }
            _ => return Err(err(format!("unrecognized record {line:?}"))),
        }
    }
    let stages = stages.ok_or(CacheError::Parse {
        line: 2,
        msg: "missing stages record".into(),
    })?;
    if parts.a.len() != stages + 1 {
        return Err(CacheError::Parse {
            line: 2,
            msg: format!("declares {stages} stages, holds {}", parts.a.len().saturating_sub(1)),
        });
    }
    // Empty columns leave no record; restore them so the shape check sees them.
    for i in 0..=stages {
        for j in 0..=(stages - i) {
            parts.columns.entry((i, j)).or_default();
        }
    }
    Ok(parts)
}

pub fn from_str(text: &str) -> Result<PrimeSequence, SeqError> {
    PrimeSequence::from_parts(parse_parts(text)?)
}
