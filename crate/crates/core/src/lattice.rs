//! Exact integer lattices.
//!
//! Row lattices over ℤ in Hermite normal form: pivots positive, entries above
//! each pivot reduced into `[0, pivot)`, zero rows last. Two engines are kept:
//! [`hermite_normal_form`] works on a dense matrix and returns the unimodular
//! transform, [`Echelon`] inserts rows one at a time and tracks sparse
//! combinations of the inserted rows. Both produce the same canonical form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Sparse integer combination of input rows, keyed by input index.
pub type Combination = BTreeMap<usize, BigInt>;

/// Result of [`hermite_normal_form`]: `transform * input = hnf`.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub hnf: IntMatrix,
    pub transform: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Extended gcd with a nonnegative gcd: returns (g, s, t) with s*a + t*b = g.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn axpy(target: &mut [BigInt], k: &BigInt, src: &[BigInt]) {
    if k.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t += k * s;
        }
    }
}

/// Replace rows (x, y) by (s x + t y, u x + v y).
fn combine_rows(
    x: &[BigInt],
    y: &[BigInt],
    s: &BigInt,
    t: &BigInt,
    u: &BigInt,
    v: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let a = x.iter().zip(y).map(|(p, q)| s * p + t * q).collect();
    let b = x.iter().zip(y).map(|(p, q)| u * p + v * q).collect();
    (a, b)
}

/// Row-style Hermite normal form of a dense integer matrix.
pub fn hermite_normal_form(m: &[Vec<BigInt>]) -> HermiteForm {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut h: IntMatrix = m.to_vec();
    let mut u: IntMatrix = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Gather the gcd of column c (rows r..) into row r.
        for k in (r + 1)..rows {
            if h[k][c].is_zero() {
                continue;
            }
            if h[r][c].is_zero() {
                h.swap(r, k);
                u.swap(r, k);
                continue;
            }
            let a = h[r][c].clone();
            let b = h[k][c].clone();
            let (g, s, t) = xgcd(&a, &b);
            let bu = &b / &g;
            let av = -(&a / &g);
            let (nr, nk) = combine_rows(&h[r], &h[k], &s, &t, &bu, &av);
            h[r] = nr;
            h[k] = nk;
            let (ur, uk) = combine_rows(&u[r], &u[k], &s, &t, &bu, &av);
            u[r] = ur;
            u[k] = uk;
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut().chain(u[r].iter_mut()) {
                *x = -x.clone();
            }
        }
        let pivot_row = h[r].clone();
        let pivot_u = u[r].clone();
        for i in 0..r {
            let q = h[i][c].div_floor(&pivot_row[c]);
            if !q.is_zero() {
                let nq = -q;
                axpy(&mut h[i], &nq, &pivot_row);
                axpy(&mut u[i], &nq, &pivot_u);
            }
        }
        pivots.push(c);
        r += 1;
    }
    HermiteForm {
        hnf: h,
        transform: u,
        rank: r,
        pivots,
    }
}

/// Determinant by fraction-free Bareiss elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: IntMatrix = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match ((k + 1)..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[derive(Clone, Debug)]
struct EchelonRow {
    v: Vec<BigInt>,
    combo: Combination,
}

/// Incremental Hermite basis of a row lattice.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Option<EchelonRow>>,
    track: bool,
}

fn combo_axpy(target: &mut Combination, k: &BigInt, src: &Combination) {
    if k.is_zero() {
        return;
    }
    for (idx, c) in src {
        let e = target.entry(*idx).or_insert_with(BigInt::zero);
        *e += k * c;
        if e.is_zero() {
            target.remove(idx);
        }
    }
}

fn combo_scale(c: &Combination, k: &BigInt) -> Combination {
    if k.is_zero() {
        return Combination::new();
    }
    c.iter().map(|(i, x)| (*i, x * k)).collect()
}

impl Echelon {
    pub fn new(ncols: usize, track: bool) -> Self {
        Self {
            ncols,
            rows: vec![None; ncols],
            track,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn pivot(&self, col: usize) -> Option<&BigInt> {
        self.rows[col].as_ref().map(|r| &r.v[col])
    }

    /// Product of the pivots: the index of the lattice in ℤ^n when full rank.
    pub fn pivot_product(&self) -> BigInt {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(c, r)| r.as_ref().map(|r| r.v[c].clone()))
            .product()
    }

    /// Insert a row; `tag` names it in tracked combinations.
    pub fn insert(&mut self, v: Vec<BigInt>, tag: usize) {
        assert_eq!(v.len(), self.ncols);
        let mut combo = Combination::new();
        if self.track {
            combo.insert(tag, BigInt::one());
        }
        self.insert_with_combo(v, combo);
    }

    fn insert_with_combo(&mut self, mut v: Vec<BigInt>, mut combo: Combination) {
        for c in 0..self.ncols {
            if v[c].is_zero() {
                continue;
            }
            match self.rows[c].take() {
                None => {
                    if v[c].is_negative() {
                        for x in v.iter_mut() {
                            *x = -x.clone();
                        }
                        combo = combo_scale(&combo, &BigInt::from(-1));
                    }
                    let mut row = EchelonRow { v, combo };
                    self.reduce_tail(&mut row, c);
                    self.rows[c] = Some(row);
                    self.reduce_above(c);
                    return;
                }
                Some(existing) => {
                    let a = existing.v[c].clone();
                    let b = v[c].clone();
                    if (&b % &a).is_zero() {
                        let q = -(&b / &a);
                        axpy(&mut v, &q, &existing.v);
                        if self.track {
                            combo_axpy(&mut combo, &q, &existing.combo);
                        }
                        self.rows[c] = Some(existing);
                        continue;
                    }
                    let (g, s, t) = xgcd(&a, &b);
                    let bu = &b / &g;
                    let av = -(&a / &g);
                    let (nr, nv) = combine_rows(&existing.v, &v, &s, &t, &bu, &av);
                    let (ncombo_r, ncombo_v) = if self.track {
                        let mut cr = combo_scale(&existing.combo, &s);
                        combo_axpy(&mut cr, &t, &combo);
                        let mut cv = combo_scale(&existing.combo, &bu);
                        combo_axpy(&mut cv, &av, &combo);
                        (cr, cv)
                    } else {
                        (Combination::new(), Combination::new())
                    };
                    let mut row = EchelonRow {
                        v: nr,
                        combo: ncombo_r,
                    };
                    if row.v[c].is_negative() {
                        for x in row.v.iter_mut() {
                            *x = -x.clone();
                        }
                        row.combo = combo_scale(&row.combo, &BigInt::from(-1));
                    }
                    self.reduce_tail(&mut row, c);
                    self.rows[c] = Some(row);
                    self.reduce_above(c);
                    v = nv;
                    combo = ncombo_v;
                }
            }
        }
    }

    /// Reduce entries right of `c` in `row` against existing pivots.
    fn reduce_tail(&self, row: &mut EchelonRow, c: usize) {
        self.reduce_from(row, c + 1);
    }

    fn reduce_from(&self, row: &mut EchelonRow, from: usize) {
        for c2 in from..self.ncols {
            if row.v[c2].is_zero() {
                continue;
            }
            if let Some(p) = &self.rows[c2] {
                let q = row.v[c2].div_floor(&p.v[c2]);
                if !q.is_zero() {
                    let nq = -q;
                    axpy(&mut row.v, &nq, &p.v);
                    if self.track {
                        combo_axpy(&mut row.combo, &nq, &p.combo);
                    }
                }
            }
        }
    }

    /// Re-reduce every row above pivot `c` from column `c` on.
    fn reduce_above(&mut self, c: usize) {
        for c0 in 0..c {
            if let Some(mut row) = self.rows[c0].take() {
                self.reduce_from(&mut row, c);
                self.rows[c0] = Some(row);
            }
        }
    }

    /// Membership: returns the combination of inserted rows that produces
    /// `v` (empty when not tracking), or `None` if `v` is not in the lattice.
    pub fn solve(&self, v: &[BigInt]) -> Option<Combination> {
        let mut rem = v.to_vec();
        let mut combo = Combination::new();
        for c in 0..self.ncols {
            if rem[c].is_zero() {
                continue;
            }
            let row = self.rows[c].as_ref()?;
            let (q, r) = rem[c].div_rem(&row.v[c]);
            if !r.is_zero() {
                return None;
            }
            let nq = -q.clone();
            axpy(&mut rem, &nq, &row.v);
            if self.track {
                combo_axpy(&mut combo, &q, &row.combo);
            }
        }
        Some(combo)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.solve(v).is_some()
    }

    /// Basis rows in Hermite normal form, ordered by pivot column.
    pub fn basis(&self) -> IntMatrix {
        self.rows.iter().flatten().map(|r| r.v.clone()).collect()
    }

    /// Pivot columns in order.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.rows[c].is_some()).collect()
    }
}

/// Lattice spanned by the rows of `m`, in Hermite normal form.
pub fn hnf_basis(m: &[Vec<BigInt>], ncols: usize) -> IntMatrix {
    let mut e = Echelon::new(ncols, false);
    for (i, row) in m.iter().enumerate() {
        e.insert(row.clone(), i);
    }
    e.basis()
}

/// Intersection of two row lattices, in Hermite normal form.
///
/// Stacks both bases and reads the relations off the zero rows of the
/// transform: a row (a, b) with aB₁ + bB₂ = 0 gives aB₁ ∈ L₁ ∩ L₂.
pub fn intersect(b1: &[Vec<BigInt>], b2: &[Vec<BigInt>], ncols: usize) -> IntMatrix {
    if b1.is_empty() || b2.is_empty() {
        return Vec::new();
    }
    let stacked: IntMatrix = b1.iter().chain(b2).cloned().collect();
    let hf = hermite_normal_form(&stacked);
    let mut vectors = Vec::new();
    for row in &hf.transform[hf.rank..] {
        let mut v = vec![BigInt::zero(); ncols];
        for (coef, basis_row) in row[..b1.len()].iter().zip(b1) {
            axpy(&mut v, coef, basis_row);
        }
        vectors.push(v);
    }
    hnf_basis(&vectors, ncols)
}

/// A finitely generated subgroup of ℚ^n, held as an integer lattice at a
/// common denominator.
#[derive(Clone, Debug)]
pub struct RationalLattice {
    denominator: BigInt,
    echelon: Echelon,
    generators: usize,
}

/// Membership witness: integer coefficients on the generators.
pub type Witness = Vec<(usize, BigInt)>;

impl RationalLattice {
    pub fn new(generators: &[Vec<BigRational>], ncols: usize, track: bool) -> Self {
        let denominator = generators
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut echelon = Echelon::new(ncols, track);
        for (i, g) in generators.iter().enumerate() {
            let row = scale_row(g, &denominator).expect("denominator divides every entry");
            echelon.insert(row, i);
        }
        Self {
            denominator,
            echelon,
            generators: generators.len(),
        }
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    /// Integer basis of the lattice scaled by the common denominator.
    pub fn scaled_basis(&self) -> IntMatrix {
        self.echelon.basis()
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        match scale_row(v, &self.denominator) {
            Some(row) => self.echelon.contains(&row),
            None => false,
        }
    }

    /// Coefficients expressing `v` over the generators, when tracking.
    pub fn witness(&self, v: &[BigRational]) -> Option<Witness> {
        let row = scale_row(v, &self.denominator)?;
        self.echelon
            .solve(&row)
            .map(|c| c.into_iter().filter(|(_, x)| !x.is_zero()).collect())
    }
}

/// `v * d` as integers, or `None` when some entry's denominator does not divide `d`.
pub fn scale_row(v: &[BigRational], d: &BigInt) -> Option<Vec<BigInt>> {
    v.iter()
        .map(|x| {
            let (q, r) = (x.numer() * d).div_rem(x.denom());
            r.is_zero().then_some(q)
        })
        .collect()
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                let pr = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}
