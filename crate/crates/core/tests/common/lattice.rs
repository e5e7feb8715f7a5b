//! Small lattice instances and brute-force oracles.

use std::collections::HashSet;

use cancellable::lattice::{determinant, hermite_normal_form, hnf_basis, Echelon};
use cancellable::treegroup::member;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub const COEFF: i64 = 3;

#[derive(Clone, Debug)]
pub struct Instance {
    pub gens: Vec<Vec<i64>>,
    pub ncols: usize,
}

pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let ncols = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=6);
    let gens = (0..m)
        .map(|_| (0..ncols).map(|_| rng.gen_range(-COEFF..=COEFF)).collect())
        .collect();
    Instance { gens, ncols }
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn rat(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// Σ c_i g_i over all c ∈ [−COEFF, COEFF]^m.
pub fn enumerate(inst: &Instance) -> HashSet<Vec<i64>> {
    let mut reached = HashSet::from([vec![0; inst.ncols]]);
    for g in &inst.gens {
        let mut next = HashSet::with_capacity(reached.len() * 7);
        for v in &reached {
            for c in -COEFF..=COEFF {
                next.insert(v.iter().zip(g).map(|(a, b)| a + c * b).collect::<Vec<_>>());
            }
        }
        reached = next;
    }
    reached
}

/// Unique rational coefficients of `v` over the generators, or `None` when
/// they are dependent. `Some(None)` means v is outside the ℚ-span.
fn rational_coefficients(inst: &Instance, v: &[i64]) -> Option<Option<Vec<BigRational>>> {
    let m = inst.gens.len();
    // Columns are generators, last column is v.
    let mut a: Vec<Vec<BigRational>> = (0..inst.ncols)
        .map(|j| {
            let mut row: Vec<BigRational> = inst.gens.iter().map(|g| BigRational::from_integer(g[j].into())).collect();
            row.push(BigRational::from_integer(v[j].into()));
            row
        })
        .collect();
    let mut r = 0;
    for c in 0..=m {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            if c < m {
                return None;
            }
            continue;
        };
        if c == m {
            return Some(None);
        }
        a.swap(r, p);
        let inv = BigRational::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pr = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    Some(Some((0..m).map(|k| a[k][m].clone()).collect()))
}

fn fractional(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Exact membership without Hermite forms. Over a ℚ-independent subset B of
/// the generators, every other generator has rational coefficients; the
/// lattice is ℤ^B plus the finite group their fractional parts generate in
/// (ℚ/ℤ)^B, enumerated by closure.
pub fn oracle(inst: &Instance, reached: &HashSet<Vec<i64>>, v: &[i64]) -> bool {
    if reached.contains(v) {
        return true;
    }
    let mut basis = Instance { gens: Vec::new(), ncols: inst.ncols };
    let mut others = Vec::new();
    for g in &inst.gens {
        let mut trial = basis.clone();
        trial.gens.push(g.clone());
        if rational_coefficients(&trial, &vec![0; inst.ncols]).is_some() {
            basis = trial;
        } else {
            others.push(g);
        }
    }
    let coeffs = |w: &[i64]| -> Option<Vec<BigRational>> {
        rational_coefficients(&basis, w).expect("independent by construction")
    };
    let Some(target) = coeffs(v) else {
        return false;
    };
    let steps: Vec<Vec<BigRational>> = others
        .iter()
        .map(|g| coeffs(g).expect("inside the span").iter().map(fractional).collect())
        .collect();
    let start: Vec<BigRational> = vec![BigRational::zero(); basis.gens.len()];
    let mut seen = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    while let Some(x) = frontier.pop() {
        for st in &steps {
            let y: Vec<BigRational> = x.iter().zip(st).map(|(a, b)| fractional(&(a + b))).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.contains(&target.iter().map(fractional).collect::<Vec<_>>())
}

#[derive(Debug, Default)]
pub struct Tally {
    pub queries: usize,
    pub members: usize,
    /// Members not reached with coefficients in [−COEFF, COEFF].
    pub beyond_enumeration: usize,
}

/// Every check on one instance; `Err` describes the first disagreement.
pub fn check_instance(inst: &Instance, rng: &mut impl Rng, tally: &mut Tally) -> Result<(), String> {
    let gens: Vec<Vec<BigRational>> = inst.gens.iter().map(|g| rat(g)).collect();
    let reached = enumerate(inst);
    let mut reached_list: Vec<&Vec<i64>> = reached.iter().collect();
    reached_list.sort();
    let mut targets: Vec<Vec<i64>> = (0..8)
        .map(|_| reached_list[rng.gen_range(0..reached_list.len())].clone())
        .collect();
    for _ in 0..8 {
        targets.push((0..inst.ncols).map(|_| rng.gen_range(-4..=4)).collect());
    }
    for v in &targets {
        tally.queries += 1;
        let got = member(&rat(v), &gens);
        let expected = oracle(inst, &reached, v);
        if got.is_some() != expected {
            return Err(format!("{inst:?}: member({v:?}) = {}, oracle {expected}", got.is_some()));
        }
        tally.members += usize::from(expected);
        tally.beyond_enumeration += usize::from(expected && !reached.contains(v));
    }

    let m: Vec<Vec<BigInt>> = inst.gens.iter().map(|g| big(g)).collect();
    let hf = hermite_normal_form(&m);
    let again = hermite_normal_form(&hf.hnf);
    if again.hnf != hf.hnf {
        return Err(format!("{inst:?}: HNF not idempotent"));
    }
    for (i, row) in hf.transform.iter().enumerate() {
        let mut acc = vec![BigInt::zero(); inst.ncols];
        for (c, g) in row.iter().zip(&m) {
            for (a, x) in acc.iter_mut().zip(g) {
                *a += c * x;
            }
        }
        if acc != hf.hnf[i] {
            return Err(format!("{inst:?}: transform row {i} does not reproduce the HNF"));
        }
    }
    if !determinant(&hf.transform).abs().is_one() {
        return Err(format!("{inst:?}: transform is not unimodular"));
    }
    let nonzero: Vec<Vec<BigInt>> = hf.hnf[..hf.rank].to_vec();
    if hnf_basis(&m, inst.ncols) != nonzero {
        return Err(format!("{inst:?}: incremental and dense HNF differ"));
    }
    let mut ech = Echelon::new(inst.ncols, false);
    for (i, row) in nonzero.iter().enumerate() {
        ech.insert(row.clone(), i);
    }
    if m.iter().any(|g| !ech.contains(g)) {
        return Err(format!("{inst:?}: a generator left the HNF lattice"));
    }
    for row in &nonzero {
        let r: Vec<BigRational> = row.iter().cloned().map(BigRational::from_integer).collect();
        if member(&r, &gens).is_none() {
            return Err(format!("{inst:?}: HNF row {row:?} is not in the original lattice"));
        }
    }
    Ok(())
}
