//! Exact arithmetic on finitely generated free Z-modules.
//!
//! Everything lives in `Z^n` with its standard basis. A sublattice is given by
//! a generator matrix whose columns span it; [`lattice_basis`] turns any
//! generating set into the canonical column Hermite form, so two sublattices
//! are equal exactly when their canonical bases are equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};

pub type IntVec = Vec<BigInt>;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ivec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vadd(a: &[BigInt], b: &[BigInt]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[BigInt], b: &[BigInt]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vscale(c: &BigInt, a: &[BigInt]) -> IntVec {
    a.iter().map(|x| c * x).collect()
}

pub fn vneg(a: &[BigInt]) -> IntVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[BigInt]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// gcd of all entries (0 for the zero vector).
pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Reduce `a` into `[0, m)`; `m = 0` leaves `a` unchanged.
pub fn reduce_mod(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_zero() {
        a.clone()
    } else {
        a.mod_floor(m)
    }
}

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "IntMatrix data length");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &BigInt) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn diagonal(d: &[BigInt]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    /// Build from rows; `cols` is needed when there are no rows.
    pub fn from_rows(rows: &[IntVec], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Build from columns; `rows` is needed when there are no columns.
    pub fn from_cols(cols: &[IntVec], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rs: Vec<IntVec> = rows.iter().map(|r| ivec(r)).collect();
        Self::from_rows(&rs, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    fn at(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> IntVec {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<IntVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn col_vecs(&self) -> Vec<IntVec> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.at(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> IntVec {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn hstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack rows");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn vstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(&self, other: &IntMatrix) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rs: Vec<IntVec> = idx.iter().map(|&i| self.row(i)).collect();
        Self::from_rows(&rs, self.cols)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let cs: Vec<IntVec> = idx.iter().map(|&j| self.col(j)).collect();
        Self::from_cols(&cs, self.rows)
    }

    pub fn row_range(&self, start: usize, end: usize) -> Self {
        self.select_rows(&(start..end).collect::<Vec<_>>())
    }

    pub fn col_range(&self, start: usize, end: usize) -> Self {
        self.select_cols(&(start..end).collect::<Vec<_>>())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[a] += c * row[b]
    fn add_row(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(b, j) * c;
            *self.at(a, j) += v;
        }
    }

    /// col[a] += c * col[b]
    fn add_col(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, b) * c;
            *self.at(i, a) += v;
        }
    }

    fn neg_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.get(a, j);
            self.set(a, j, v);
        }
    }

    fn neg_col(&mut self, a: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, a);
            self.set(i, a, v);
        }
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        if !self.is_square() {
            return None;
        }
        let snf = smith_normal_form(self);
        if !snf.s.is_identity() {
            return None;
        }
        // U M V = I  =>  M^{-1} = V U
        Some(snf.v.mul(&snf.u))
    }
}

/// `U * M * V = S`, with `S` diagonal and nonzero diagonal entries ascending
/// under divisibility. The inverses of `U` and `V` are carried along.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> IntVec {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Nonzero diagonal entries in descending divisibility order (largest first).
    pub fn invariant_factors_desc(&self) -> IntVec {
        let mut d: IntVec = self
            .diagonal()
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect();
        d.reverse();
        d
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (r, c) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);

    'outer: for t in 0..r.min(c) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = s.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = s.get(i, t) / s.get(t, t);
                let nq = -&q;
                s.add_row(i, t, &nq);
                u.add_row(i, t, &nq);
                u_inv.add_col(t, i, &q);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = s.get(t, j) / s.get(t, t);
                let nq = -&q;
                s.add_col(j, t, &nq);
                v.add_col(j, t, &nq);
                v_inv.add_row(t, j, &q);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let piv = s.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !s.get(i, j).is_multiple_of(&piv)));
            if let Some(i) = bad {
                let one = BigInt::one();
                s.add_row(t, i, &one);
                u.add_row(t, i, &one);
                u_inv.add_col(i, t, &-one);
                continue;
            }
            break;
        }
        if s.get(t, t).is_negative() {
            s.neg_row(t);
            u.neg_row(t);
            u_inv.neg_col(t);
        }
    }
    SmithDecomposition {
        u,
        s,
        v,
        u_inv,
        v_inv,
    }
}

/// Row Hermite normal form: echelon rows with positive pivots and entries
/// above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hnf_rows(m: &IntMatrix) -> IntMatrix {
    let mut a = m.clone();
    let (r, c) = (a.rows, a.cols);
    let mut pr = 0;
    for j in 0..c {
        if pr == r {
            break;
        }
        // gcd-combine rows pr.. in column j into row pr
        for i in pr + 1..r {
            if a.get(i, j).is_zero() {
                continue;
            }
            if a.get(pr, j).is_zero() {
                a.swap_rows(pr, i);
                continue;
            }
            let (x, y) = (a.get(pr, j).clone(), a.get(i, j).clone());
            let (g, p, q) = xgcd(&x, &y);
            let (xg, yg) = (&x / &g, &y / &g);
            let row_p = a.row(pr);
            let row_i = a.row(i);
            for k in 0..c {
                a.set(pr, k, &p * &row_p[k] + &q * &row_i[k]);
                a.set(i, k, &xg * &row_i[k] - &yg * &row_p[k]);
            }
        }
        if a.get(pr, j).is_zero() {
            continue;
        }
        if a.get(pr, j).is_negative() {
            a.neg_row(pr);
        }
        let piv = a.get(pr, j).clone();
        for i in 0..pr {
            let q = a.get(i, j).div_floor(&piv);
            a.add_row(i, pr, &-q);
        }
        pr += 1;
    }
    a.row_range(0, pr)
}

/// Canonical basis (columns) of the lattice spanned by the columns of `gens`.
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let h = hnf_rows(&gens.transpose());
    let t = h.transpose();
    if t.rows == 0 {
        IntMatrix::zeros(gens.rows, 0)
    } else {
        t
    }
}

pub fn same_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    lattice_basis(a) == lattice_basis(b)
}

/// Integer solution of `m x = b`, if one exists.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<IntVec> {
    assert_eq!(m.rows, b.len(), "solve shape");
    let snf = smith_normal_form(m);
    let ub = snf.u.mul_vec(b);
    let d = snf.diagonal();
    let mut y = vec![BigInt::zero(); m.cols];
    for (i, ubi) in ub.iter().enumerate() {
        let di = d.get(i).cloned().unwrap_or_else(BigInt::zero);
        if di.is_zero() {
            if !ubi.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ubi.div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Solve `m X = b` column by column.
pub fn solve_matrix(m: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    let cols: Option<Vec<IntVec>> = b.col_vecs().iter().map(|c| solve(m, c)).collect();
    cols.map(|cs| IntMatrix::from_cols(&cs, m.cols))
}

pub fn contains(lattice: &IntMatrix, v: &[BigInt]) -> bool {
    solve(lattice, v).is_some()
}

pub fn contains_all(lattice: &IntMatrix, gens: &IntMatrix) -> bool {
    gens.col_vecs().iter().all(|c| contains(lattice, c))
}

/// Canonical basis of the integer kernel `{x : m x = 0}`.
pub fn kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    lattice_basis(&snf.v.col_range(r, m.cols))
}

pub fn rank_of(gens: &IntMatrix) -> usize {
    gens.rank()
}

/// `A^⊤ = {x : n x ∈ ZA for some n > 0}`.
pub fn saturation(a: &IntMatrix, ambient_rank: usize) -> IntMatrix {
    assert_eq!(a.rows, ambient_rank, "saturation ambient rank");
    if a.cols == 0 {
        return IntMatrix::zeros(ambient_rank, 0);
    }
    let snf = smith_normal_form(a);
    let r = snf.rank();
    lattice_basis(&snf.u_inv.col_range(0, r))
}

/// `A^⊥ = {y : <x, y> = 0 for all x ∈ A}` under the dot product.
pub fn annihilator(a: &IntMatrix, ambient_rank: usize) -> IntMatrix {
    assert_eq!(a.rows, ambient_rank, "annihilator ambient rank");
    if a.cols == 0 {
        return IntMatrix::identity(ambient_rank);
    }
    kernel(&a.transpose())
}

pub fn lattice_sum(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    lattice_basis(&a.hstack(b))
}

pub fn lattice_intersection(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let k = kernel(&a.hstack(&b.neg()));
    lattice_basis(&a.mul(&k.row_range(0, a.cols)))
}

/// Index of a full-rank sublattice, `None` if the quotient is infinite.
pub fn index(lattice: &IntMatrix) -> Option<BigInt> {
    let b = lattice_basis(lattice);
    if b.cols != b.rows {
        return None;
    }
    Some(b.det().abs())
}

/// Right inverse `σ` of a surjective map `π` (so `π σ = I`).
pub fn right_inverse(pi: &IntMatrix) -> Result<IntMatrix> {
    let snf = smith_normal_form(pi);
    if snf.rank() != pi.rows || snf.diagonal().iter().any(|d| !d.is_one()) {
        return Err(Error::NotSurjective(
            "map has no integral right inverse".into(),
        ));
    }
    // π = U^{-1} [I 0] V^{-1}  =>  σ = V [I; 0] U
    Ok(snf.v.col_range(0, pi.rows).mul(&snf.u))
}

/// Surjection `X → Z^{n-r}` whose kernel is the saturated lattice `l`.
pub fn free_quotient_map(l: &IntMatrix, ambient_rank: usize) -> IntMatrix {
    let sat = saturation(l, ambient_rank);
    if sat.cols == 0 {
        return IntMatrix::identity(ambient_rank);
    }
    let snf = smith_normal_form(&sat);
    let r = snf.rank();
    snf.u.row_range(r, ambient_rank)
}

/// Basis `(x_i)` of `Z^n` with divisors `d_i` such that `(d_i x_i)` spans the
/// designated sublattice. Divisors are descending under divisibility; free
/// directions get divisor 0 and come first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedBasis {
    pub basis: IntMatrix,
    pub divisors: IntVec,
}

impl AdaptedBasis {
    /// The nontrivial finite divisors, i.e. the invariant factors of the torsion part.
    pub fn invariant_factors(&self) -> IntVec {
        self.divisors
            .iter()
            .filter(|d| **d > BigInt::one())
            .cloned()
            .collect()
    }
}

pub fn adapted_basis(kernel_gens: &IntMatrix, ambient_rank: usize) -> Result<AdaptedBasis> {
    if kernel_gens.rows != ambient_rank {
        return Err(Error::Dimension(format!(
            "generators live in Z^{} but the ambient rank is {}",
            kernel_gens.rows, ambient_rank
        )));
    }
    let snf = smith_normal_form(kernel_gens);
    let d = snf.diagonal();
    let mut divisors: IntVec = (0..ambient_rank)
        .map(|i| d.get(i).cloned().unwrap_or_else(BigInt::zero))
        .collect();
    divisors.reverse();
    let order: Vec<usize> = (0..ambient_rank).rev().collect();
    Ok(AdaptedBasis {
        basis: snf.u_inv.select_cols(&order),
        divisors,
    })
}

/// Presentation of an abelian group `⊕ Z/d_i` (descending divisibility,
/// `d_s > 1`) together with the surjection from `Z^n` onto it. A divisor 0
/// marks a free summand; these only occur for quotients by non-full-rank
/// lattices and always sit at the front.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAbPresentation {
    pub invariant_factors: IntVec,
    pub ambient_rank: usize,
    pub projection: IntMatrix,
}

impl FinAbPresentation {
    /// The group `⊕ Z/d_i` with the identity-like surjection from `Z^s`.
    pub fn standard(invariant_factors: IntVec) -> Self {
        let s = invariant_factors.len();
        FinAbPresentation {
            invariant_factors,
            ambient_rank: s,
            projection: IntMatrix::identity(s),
        }
    }

    pub fn trivial(ambient_rank: usize) -> Self {
        FinAbPresentation {
            invariant_factors: vec![],
            ambient_rank,
            projection: IntMatrix::zeros(0, ambient_rank),
        }
    }

    /// `Z/4+Z/2`, `Z`, or `0`.
    pub fn label(&self) -> String {
        if self.invariant_factors.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| {
                if d.is_zero() {
                    "Z".to_string()
                } else {
                    format!("Z/{d}")
                }
            })
            .collect();
        parts.join("+")
    }

    pub fn num_factors(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.invariant_factors.iter().all(|d| !d.is_zero())
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.is_finite() {
            Some(self.invariant_factors.iter().product())
        } else {
            None
        }
    }

    pub fn reduce(&self, a: &[BigInt]) -> IntVec {
        a.iter()
            .zip(&self.invariant_factors)
            .map(|(x, d)| reduce_mod(x, d))
            .collect()
    }

    /// Reduce each column of a map into the group.
    pub fn reduce_map(&self, m: &IntMatrix) -> IntMatrix {
        let cols: Vec<IntVec> = m.col_vecs().iter().map(|c| self.reduce(c)).collect();
        IntMatrix::from_cols(&cols, self.num_factors())
    }

    pub fn project(&self, x: &[BigInt]) -> IntVec {
        self.reduce(&self.projection.mul_vec(x))
    }

    pub fn relations(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.invariant_factors)
    }

    pub fn same_element(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    pub fn maps_equal(&self, a: &IntMatrix, b: &IntMatrix) -> bool {
        self.reduce_map(a) == self.reduce_map(b)
    }

    /// Is the map (columns are images of generators) onto the group?
    pub fn is_surjective(&self, h: &IntMatrix) -> bool {
        if h.rows != self.num_factors() {
            return false;
        }
        let gens = h.hstack(&self.relations());
        let snf = smith_normal_form(&gens);
        snf.rank() == self.num_factors()
            && snf
                .diagonal()
                .iter()
                .take(self.num_factors())
                .all(|d| d.is_one())
    }

    /// Some `x` with `h x = a` in the group.
    pub fn preimage(&self, h: &IntMatrix, a: &[BigInt]) -> Option<IntVec> {
        let gens = h.hstack(&self.relations());
        solve(&gens, a).map(|x| x[..h.cols].to_vec())
    }

    /// Kernel of `h: Z^m → A` as a lattice basis.
    pub fn kernel_of(&self, h: &IntMatrix) -> IntMatrix {
        let k = kernel(&h.hstack(&self.relations()));
        lattice_basis(&k.row_range(0, h.cols))
    }

    /// Every element of a finite group, in lexicographic order.
    pub fn elements(&self) -> Vec<IntVec> {
        let mut out = vec![vec![]];
        for d in &self.invariant_factors {
            let n: u64 = d.try_into().expect("finite group with small factors");
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for e in &out {
                for k in 0..n {
                    let mut e2 = e.clone();
                    e2.push(BigInt::from(k));
                    next.push(e2);
                }
            }
            out = next;
        }
        out
    }
}

/// Presentation of `Z^n / L` where the columns of `gens` span `L`.
pub fn quotient_presentation(gens: &IntMatrix, ambient_rank: usize) -> FinAbPresentation {
    assert_eq!(gens.rows, ambient_rank, "quotient ambient rank");
    let snf = smith_normal_form(gens);
    let d = snf.diagonal();
    let mut keep: Vec<(usize, BigInt)> = (0..ambient_rank)
        .map(|i| (i, d.get(i).cloned().unwrap_or_else(BigInt::zero)))
        .filter(|(_, x)| !x.is_one())
        .collect();
    keep.reverse();
    let rows: Vec<usize> = keep.iter().map(|(i, _)| *i).collect();
    let invariant_factors: IntVec = keep.into_iter().map(|(_, x)| x).collect();
    let pres = FinAbPresentation {
        invariant_factors,
        ambient_rank,
        projection: snf.u.select_rows(&rows),
    };
    let p = pres.reduce_map(&pres.projection);
    FinAbPresentation {
        projection: p,
        ..pres
    }
}

/// The torsion summand of `Z^n / L` with a surjection onto it.
pub fn torsion_presentation(gens: &IntMatrix, ambient_rank: usize) -> FinAbPresentation {
    let full = quotient_presentation(gens, ambient_rank);
    let idx: Vec<usize> = (0..full.num_factors())
        .filter(|&i| !full.invariant_factors[i].is_zero())
        .collect();
    FinAbPresentation {
        invariant_factors: idx
            .iter()
            .map(|&i| full.invariant_factors[i].clone())
            .collect(),
        ambient_rank,
        projection: full.projection.select_rows(&idx),
    }
}

/// Torsion invariant factors of `Z^n / L` (descending) and its free rank.
pub fn quotient_invariants(gens: &IntMatrix, ambient_rank: usize) -> (IntVec, usize) {
    let p = quotient_presentation(gens, ambient_rank);
    let free = p.invariant_factors.iter().filter(|d| d.is_zero()).count();
    let tors = p
        .invariant_factors
        .into_iter()
        .filter(|d| !d.is_zero())
        .collect();
    (tors, free)
}

/// The fibre lattice `{(x1, x2) : h1(x1) = h2(x2)}` with its two projections.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    /// Columns: basis of the fibre lattice inside `Z^{n1+n2}`.
    pub basis: IntMatrix,
    /// Coordinates of the basis in the first factor (`n1 × r`).
    pub incl1: IntMatrix,
    /// Coordinates of the basis in the second factor (`n2 × r`).
    pub incl2: IntMatrix,
}

pub fn fiber_product(
    h1: &IntMatrix,
    h2: &IntMatrix,
    a: &FinAbPresentation,
) -> Result<FiberProduct> {
    let s = a.num_factors();
    if h1.rows != s || h2.rows != s {
        return Err(Error::Dimension(
            "maps do not land in the given group".into(),
        ));
    }
    if !a.is_surjective(h1) {
        return Err(Error::NotSurjective("h1".into()));
    }
    if !a.is_surjective(h2) {
        return Err(Error::NotSurjective("h2".into()));
    }
    let (n1, n2) = (h1.cols, h2.cols);
    let basis = a.kernel_of(&h1.hstack(&h2.neg()));
    Ok(FiberProduct {
        incl1: basis.row_range(0, n1),
        incl2: basis.row_range(n1, n1 + n2),
        basis,
    })
}
