//! Exact integer and rational linear algebra: Smith normal form, saturated
//! kernels, lattice indices, and rational linear-program feasibility.
//!
//! Everything here works over arbitrary-precision scalars; there is no
//! floating point anywhere in the crate.

pub mod lp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision integer used throughout the crate.
pub type Int = BigInt;
/// Arbitrary-precision rational; `num_rational` keeps values in lowest terms
/// with a positive denominator, which is exactly the invariant we need.
pub type Rat = BigRational;

pub fn rat_from_int(n: impl Into<Int>) -> Rat {
    Rat::from_integer(n.into())
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Int>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Int>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        IntMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix::new(rows, cols, vec![Int::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    pub fn from_columns(dim: usize, columns: &[Vec<Int>]) -> Self {
        let mut m = IntMatrix::zero(dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length must match dimension");
            for i in 0..dim {
                *m.at_mut(i, j) = col[i].clone();
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Int>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zero(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for j in 0..cols {
                *m.at_mut(i, j) = row[j].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut m = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Int::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k) * other.at(k, j);
                }
                *m.at_mut(i, j) = acc;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k) * &v[k];
                }
                acc
            })
            .collect()
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<Int>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        int_rows_rank(&mut work)
    }

    /// Determinant of a square matrix by Bareiss elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a: Vec<Vec<Int>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return Int::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Exact inverse of a unimodular integer matrix.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix, Error> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let rows: Vec<Vec<Rat>> = (0..n)
            .map(|i| self.row(i).iter().map(|x| rat_from_int(x.clone())).collect())
            .collect();
        let inv = rat_inverse(&rows).ok_or(Error::DependentGenerators)?;
        let mut out = IntMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                if !inv[i][j].is_integer() {
                    return Err(Error::Internal("matrix is not unimodular".into()));
                }
                *out.at_mut(i, j) = inv[i][j].to_integer();
            }
        }
        Ok(out)
    }
}

/// Smith normal form `left * m * right = diag`, with `left`, `right`
/// unimodular and `diag[i]` dividing `diag[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub left: IntMatrix,
    pub diag: Vec<Int>,
    pub right: IntMatrix,
}

impl SnfDecomposition {
    /// The diagonal as a full rows x cols matrix.
    pub fn diag_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut d = IntMatrix::zero(rows, cols);
        for (i, v) in self.diag.iter().enumerate() {
            *d.at_mut(i, i) = v.clone();
        }
        d
    }

    pub fn nonzero_count(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Pivot selection: smallest nonzero absolute value, ties broken by lowest
/// (row, col) in row-major order. Keeps the decomposition reproducible.
fn snf_find_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(Int, usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = a.at(i, j);
            if v.is_zero() {
                continue;
            }
            let abs = v.abs();
            match &best {
                Some((b, _, _)) if *b <= abs => {}
                _ => best = Some((abs, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut left = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);
    let steps = rows.min(cols);

    let swap_rows = |a: &mut IntMatrix, l: &mut IntMatrix, x: usize, y: usize| {
        if x == y {
            return;
        }
        for j in 0..a.cols() {
            let tmp = a.at(x, j).clone();
            *a.at_mut(x, j) = a.at(y, j).clone();
            *a.at_mut(y, j) = tmp;
        }
        for j in 0..l.cols() {
            let tmp = l.at(x, j).clone();
            *l.at_mut(x, j) = l.at(y, j).clone();
            *l.at_mut(y, j) = tmp;
        }
    };
    let swap_cols = |a: &mut IntMatrix, r: &mut IntMatrix, x: usize, y: usize| {
        if x == y {
            return;
        }
        for i in 0..a.rows() {
            let tmp = a.at(i, x).clone();
            *a.at_mut(i, x) = a.at(i, y).clone();
            *a.at_mut(i, y) = tmp;
        }
        for i in 0..r.rows() {
            let tmp = r.at(i, x).clone();
            *r.at_mut(i, x) = r.at(i, y).clone();
            *r.at_mut(i, y) = tmp;
        }
    };

    'outer: for t in 0..steps {
        loop {
            let Some((pi, pj)) = snf_find_pivot(&a, t) else {
                break 'outer;
            };
            swap_rows(&mut a, &mut left, t, pi);
            swap_cols(&mut a, &mut right, t, pj);

            // Clear column t below the pivot and row t to its right.
            let mut clean = true;
            for i in t + 1..rows {
                if a.at(i, t).is_zero() {
                    continue;
                }
                let q = a.at(i, t) / a.at(t, t);
                if !q.is_zero() {
                    for j in 0..cols {
                        let sub = &q * a.at(t, j);
                        *a.at_mut(i, j) -= sub;
                    }
                    for j in 0..rows {
                        let sub = &q * left.at(t, j);
                        *left.at_mut(i, j) -= sub;
                    }
                }
                if !a.at(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a.at(t, j).is_zero() {
                    continue;
                }
                let q = a.at(t, j) / a.at(t, t);
                if !q.is_zero() {
                    for i in 0..rows {
                        let sub = &q * a.at(i, t);
                        *a.at_mut(i, j) -= sub;
                    }
                    for i in 0..cols {
                        let sub = &q * right.at(i, t);
                        *right.at_mut(i, j) -= sub;
                    }
                }
                if !a.at(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }

            // Pivot must divide the rest of the block, or we fold the
            // offending row in and keep reducing.
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(a.at(i, j) % a.at(t, t)).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    for j in 0..cols {
                        let add = a.at(i, j).clone();
                        *a.at_mut(t, j) += add;
                    }
                    for j in 0..rows {
                        let add = left.at(i, j).clone();
                        *left.at_mut(t, j) += add;
                    }
                }
                None => break,
            }
        }
    }

    for t in 0..steps {
        if a.at(t, t).is_negative() {
            for j in 0..cols {
                let neg = -a.at(t, j).clone();
                *a.at_mut(t, j) = neg;
            }
            for j in 0..rows {
                let neg = -left.at(t, j).clone();
                *left.at_mut(t, j) = neg;
            }
        }
    }

    let diag = (0..steps).map(|t| a.at(t, t).clone()).collect();
    SnfDecomposition { left, diag, right }
}

/// Index `[sat(L) : L]` of the lattice spanned by the columns inside its
/// saturation; equals the product of the nonzero Smith diagonal entries.
pub fn lattice_index(generators: &IntMatrix) -> Result<Int, Error> {
    let snf = smith_normal_form(generators);
    if snf.nonzero_count() < generators.cols() {
        return Err(Error::DependentGenerators);
    }
    Ok(snf.diag.iter().filter(|d| !d.is_zero()).product())
}

/// Basis of the saturated integer kernel `{x : m x = 0}`, returned as the
/// columns of a matrix. Columns are sign-normalized so their first nonzero
/// entry is positive.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let steps = m.rows().min(m.cols());
    let mut columns = Vec::new();
    for j in 0..m.cols() {
        let free = j >= steps || snf.diag[j].is_zero();
        if free {
            let mut col = snf.right.column(j);
            if let Some(first) = col.iter().find(|x| !x.is_zero()) {
                if first.is_negative() {
                    for x in &mut col {
                        *x = -std::mem::take(x);
                    }
                }
            }
            columns.push(col);
        }
    }
    IntMatrix::from_columns(m.cols(), &columns)
}

/// Divide out the gcd of the entries, preserving direction.
pub fn primitive(v: &[Int]) -> Result<Vec<Int>, Error> {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Clear denominators and primitivize a rational vector.
pub fn primitive_from_rational(v: &[Rat]) -> Result<Vec<Int>, Error> {
    let mut lcm = Int::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<Int> = v.iter().map(|x| (x * rat_from_int(lcm.clone())).to_integer()).collect();
    primitive(&ints)
}

/// Rank of integer rows by fraction-free forward elimination. Destroys `work`.
pub fn int_rows_rank(work: &mut [Vec<Int>]) -> usize {
    let rows = work.len();
    if rows == 0 {
        return 0;
    }
    let cols = work[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let Some(p) = (rank..rows).find(|&i| !work[i][col].is_zero()) else {
            col += 1;
            continue;
        };
        work.swap(rank, p);
        for i in rank + 1..rows {
            if work[i][col].is_zero() {
                continue;
            }
            let a = work[rank][col].clone();
            let b = work[i][col].clone();
            let g = a.gcd(&b);
            let a = a / &g;
            let b = b / &g;
            for j in col..cols {
                let v = &work[i][j] * &a - &work[rank][j] * &b;
                work[i][j] = v;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Rank of a set of integer vectors (as rows).
pub fn vectors_rank(vectors: &[Vec<Int>]) -> usize {
    let mut work: Vec<Vec<Int>> = vectors.to_vec();
    int_rows_rank(&mut work)
}

/// Reduced row echelon form over the rationals. Returns the reduced rows
/// (zero rows dropped) and the pivot column of each.
pub fn rref(mut rows: Vec<Vec<Rat>>) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let nrows = rows.len();
    if nrows == 0 {
        return (rows, Vec::new());
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for j in c..ncols {
            rows[r][j] = &rows[r][j] * &inv;
        }
        for i in 0..nrows {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in c..ncols {
                let sub = &f * &rows[r][j];
                rows[i][j] = &rows[i][j] - &sub;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// One exact solution of `A x = b` (free variables set to zero), or `None`
/// when the system is inconsistent.
pub fn solve_exact(a_rows: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a_rows.len(), b.len(), "system shape mismatch");
    let ncols = a_rows.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rat>> = a_rows
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    if aug.is_empty() {
        return Some(vec![Rat::zero(); ncols]);
    }
    let (reduced, pivots) = rref(std::mem::take(&mut aug));
    let mut x = vec![Rat::zero(); ncols];
    for (row, &p) in reduced.iter().zip(&pivots) {
        if p == ncols {
            return None; // pivot in the constant column: inconsistent
        }
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Exact inverse over the rationals; `None` when singular.
pub fn rat_inverse(rows: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = rows.len();
    let mut aug: Vec<Vec<Rat>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "inverse needs a square matrix");
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            r
        })
        .collect();
    let (reduced, pivots) = rref(std::mem::take(&mut aug));
    if reduced.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(reduced.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Integer adjugate scaled to have nonnegative "determinant": returns a
/// matrix `D` with `D * m = |det m| * I`, for square nonsingular `m`.
pub fn scaled_dual_rows(m: &IntMatrix) -> Result<IntMatrix, Error> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "dual rows need a square matrix");
    let det = m.det();
    if det.is_zero() {
        return Err(Error::DependentGenerators);
    }
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| m.row(i).iter().map(|x| rat_from_int(x.clone())).collect())
        .collect();
    let inv = rat_inverse(&rows).ok_or(Error::DependentGenerators)?;
    let scale = rat_from_int(det.abs());
    let mut out = IntMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = &inv[i][j] * &scale;
            debug_assert!(v.is_integer(), "adjugate entries must be integral");
            *out.at_mut(i, j) = v.to_integer();
        }
    }
    Ok(out)
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn rat_vec_from_int(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| rat_from_int(x.clone())).collect()
}
