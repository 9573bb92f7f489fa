//! Dense exact-rational matrices and integer lattice reductions.
//!
//! Sizes here are small (charts and idempotents up to rank ~10), so the
//! implementations favor clarity over asymptotics: plain Gauss-Jordan with
//! exact pivots, and a column-style Hermite reduction for integer spans.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::BadInput("ragged matrix rows".into()));
        }
        Ok(QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        QMat {
            rows: rows.len(),
            cols: rows.first().map(|x| x.len()).unwrap_or(0),
            data: rows
                .iter()
                .flatten()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect(),
        }
    }

    pub fn from_bigint_rows(rows: &[Vec<BigInt>]) -> Self {
        QMat {
            rows: rows.len(),
            cols: rows.first().map(|x| x.len()).unwrap_or(0),
            data: rows
                .iter()
                .flatten()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> QMat {
        let mut out = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &QMat) -> Result<QMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x*", self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k) * other.at(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}", self.cols),
                got: format!("{}", v.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k) * &v[k];
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &QMat) -> Result<QMat> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QMat) -> Result<QMat> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &QMat, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<QMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(QMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn neg(&self) -> QMat {
        self.scale(&-BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..i {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Copy of the block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> QMat {
        let mut out = QMat::zero(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.at(i, j).clone());
            }
        }
        out
    }

    /// Write `block` into `self` with top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &QMat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.at(i, j).clone());
            }
        }
    }

    /// Determinant by fraction-preserving Gaussian elimination.
    pub fn det(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: "square".into(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => return Ok(BigRational::zero()),
            };
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(pivot, j).clone();
                    a.set(pivot, j, a.at(col, j).clone());
                    a.set(col, j, tmp);
                }
                det = -det;
            }
            let p = a.at(col, col).clone();
            det *= &p;
            for r in col + 1..n {
                let f = a.at(r, col) / &p;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a.at(r, j) - &f * a.at(col, j);
                    a.set(r, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan; `DegenerateForm` when singular.
    pub fn inverse(&self) -> Result<QMat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: "square".into(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.at(r, col).is_zero())
                .ok_or(Error::DegenerateForm)?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(pivot, j).clone();
                    a.set(pivot, j, a.at(col, j).clone());
                    a.set(col, j, tmp);
                    let tmp = inv.at(pivot, j).clone();
                    inv.set(pivot, j, inv.at(col, j).clone());
                    inv.set(col, j, tmp);
                }
            }
            let p = a.at(col, col).clone();
            for j in 0..n {
                let v = a.at(col, j) / &p;
                a.set(col, j, v);
                let v = inv.at(col, j) / &p;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    let v = a.at(r, j) - &f * a.at(col, j);
                    a.set(r, j, v);
                    let v = inv.at(r, j) - &f * inv.at(col, j);
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }

    /// Rank via Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..a.cols {
            let pivot = (row..a.rows).find(|&r| !a.at(r, col).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => continue,
            };
            if pivot != row {
                for j in 0..a.cols {
                    let tmp = a.at(pivot, j).clone();
                    a.set(pivot, j, a.at(row, j).clone());
                    a.set(row, j, tmp);
                }
            }
            let p = a.at(row, col).clone();
            for r in row + 1..a.rows {
                let f = a.at(r, col) / &p;
                if f.is_zero() {
                    continue;
                }
                for j in col..a.cols {
                    let v = a.at(r, j) - &f * a.at(row, j);
                    a.set(r, j, v);
                }
            }
            rank += 1;
            row += 1;
            if row == a.rows {
                break;
            }
        }
        rank
    }

    /// True iff every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.denom().is_one())
    }

    /// lcm of the entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for v in &self.data {
            l = l.lcm(v.denom());
        }
        l
    }

    /// Entries as integers, assuming `is_integral`.
    pub fn to_bigint_rows(&self) -> Result<Vec<Vec<BigInt>>> {
        if !self.is_integral() {
            return Err(Error::InconsistentData("matrix is not integral".into()));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).to_integer()).collect())
            .collect())
    }
}

/// Column-style Hermite reduction: given an integer matrix whose columns span
/// a full-rank sublattice of Z^n, return a lower-triangular n x n basis of
/// that span (diagonal entries positive).
///
/// The product of the diagonal equals the index of the span in Z^n.
pub fn hermite_column_basis(mat: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let n = mat.len();
    if n == 0 {
        return Err(Error::BadInput("empty matrix".into()));
    }
    let k = mat[0].len();
    if mat.iter().any(|r| r.len() != k) {
        return Err(Error::BadInput("ragged matrix rows".into()));
    }
    // Work on columns.
    let mut cols: Vec<Vec<BigInt>> = (0..k).map(|j| (0..n).map(|i| mat[i][j].clone()).collect()).collect();
    let mut fixed = 0usize; // number of pivot columns already placed
    for row in 0..n {
        // Clear row `row` across columns `fixed+1..` by gcd column ops.
        loop {
            let mut idx: Option<usize> = None;
            for j in fixed..cols.len() {
                if !cols[j][row].is_zero()
                    && (idx.is_none()
                        || cols[j][row].abs() < cols[idx.unwrap()][row].abs())
                {
                    idx = Some(j);
                }
            }
            let j0 = match idx {
                None => {
                    return Err(Error::InconsistentData(
                        "column span is not full rank".into(),
                    ))
                }
                Some(j) => j,
            };
            cols.swap(fixed, j0);
            let mut done = true;
            let head = cols[fixed][row].clone();
            for j in fixed + 1..cols.len() {
                if cols[j][row].is_zero() {
                    continue;
                }
                let q = cols[j][row].div_floor(&head);
                if !q.is_zero() {
                    for i in 0..n {
                        let v = &cols[j][i] - &q * &cols[fixed][i];
                        cols[j][i] = v;
                    }
                }
                if !cols[j][row].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        // Normalize pivot sign.
        if cols[fixed][row].is_negative() {
            for i in 0..n {
                cols[fixed][i] = -cols[fixed][i].clone();
            }
        }
        // Reduce earlier pivot columns against this one for a canonical form.
        let head = cols[fixed][row].clone();
        for j in 0..fixed {
            let q = cols[j][row].div_floor(&head);
            if !q.is_zero() {
                for i in 0..n {
                    let v = &cols[j][i] - &q * &cols[fixed][i];
                    cols[j][i] = v;
                }
            }
        }
        fixed += 1;
    }
    // The first n columns now form a lower-triangular basis: column t was
    // cleared in rows < t by the earlier passes and carries its pivot at
    // (t, t). Assemble as row-major n x n.
    let mut basis = vec![vec![BigInt::zero(); n]; n];
    for (t, col) in cols.iter().take(n).enumerate() {
        for i in 0..n {
            basis[i][t] = col[i].clone();
        }
        for row_val in col.iter().take(t) {
            if !row_val.is_zero() {
                return Err(Error::InconsistentData(
                    "hermite reduction left a nonzero above the pivot".into(),
                ));
            }
        }
    }
    Ok(basis)
}

/// Index `[Z^n : span(cols)]` as the diagonal product of the Hermite basis.
pub fn span_index_in_standard(mat: &[Vec<BigInt>]) -> Result<BigInt> {
    let basis = hermite_column_basis(mat)?;
    let mut idx = BigInt::one();
    for (i, row) in basis.iter().enumerate() {
        idx *= row[i].clone();
    }
    Ok(idx.abs())
}
