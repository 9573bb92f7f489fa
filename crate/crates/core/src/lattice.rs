//! Integral quadratic lattices and the scalar invariants of rational vectors.
//!
//! A vector `v != 0` has a unique positive rational `a(v)` making `a(v) v`
//! integral and primitive. The value `qbar(v) = a(v)^2 Q(v,v)` is invariant
//! under nonzero rational scaling, and for `qbar != 0` decomposes uniquely as
//! `u * nu^2` with `u` square-free and `nu > 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{gcd_all, lcm_all, squarefree_decompose};
use crate::matrix::QMat;
use crate::{Error, Result};

/// Non-degenerate integral symmetric bilinear form with its signature.
///
/// The signature `(r, s)` counts negative and positive squares, so the form
/// `-I_r (+) I_s` has signature exactly `(r, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadLattice {
    m: usize,
    gram: Vec<Vec<BigInt>>,
    signature: (usize, usize),
}

impl QuadLattice {
    pub fn new(gram: Vec<Vec<BigInt>>) -> Result<Self> {
        let m = gram.len();
        if m == 0 || gram.iter().any(|r| r.len() != m) {
            return Err(Error::BadInput("gram matrix must be square and nonempty".into()));
        }
        for i in 0..m {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::BadInput("gram matrix must be symmetric".into()));
                }
            }
        }
        let qm = QMat::from_bigint_rows(&gram);
        let (diag, _) = diagonalize_qmat(&qm)?; // fails on det = 0
        let signature = signature_of_diag(&diag);
        Ok(QuadLattice { m, gram, signature })
    }

    pub fn from_diagonal(entries: &[i64]) -> Result<Self> {
        let m = entries.len();
        let mut gram = vec![vec![BigInt::zero(); m]; m];
        for (i, &e) in entries.iter().enumerate() {
            gram[i][i] = BigInt::from(e);
        }
        QuadLattice::new(gram)
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn gram_qmat(&self) -> QMat {
        QMat::from_bigint_rows(&self.gram)
    }

    /// `(r, s)` = (number of negative squares, number of positive squares).
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    /// Exact value `v^t Q v`.
    pub fn value(&self, v: &RatVector) -> Result<BigRational> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: format!("{}", self.m),
                got: format!("{}", v.len()),
            });
        }
        let mut acc = BigRational::zero();
        for i in 0..self.m {
            for j in 0..self.m {
                if self.gram[i][j].is_zero() {
                    continue;
                }
                acc += BigRational::from_integer(self.gram[i][j].clone()) * &v.0[i] * &v.0[j];
            }
        }
        Ok(acc)
    }
}

/// Exact rational vector. Coordinates are kept in lowest terms by the
/// underlying rational type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatVector(pub Vec<BigRational>);

impl RatVector {
    pub fn from_integers(v: &[i64]) -> Self {
        RatVector(
            v.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn scale(&self, c: &BigRational) -> RatVector {
        RatVector(self.0.iter().map(|x| x * c).collect())
    }
}

/// The invariants of a nonzero anisotropic vector: `qbar = u * nu^2` exactly,
/// `u` square-free carrying the sign, `nu > 0`, and `a * v` integral
/// primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorInvariants {
    pub a: BigRational,
    pub qbar: BigInt,
    pub u: BigInt,
    pub nu: BigInt,
}

/// True iff `v` is a nonzero integer vector with coordinate gcd 1
/// (equivalently, nonzero image modulo every prime).
pub fn is_primitive(v: &[BigInt]) -> bool {
    !v.iter().all(|x| x.is_zero()) && gcd_all(v).is_one()
}

/// The unique positive rational `a` with `a * v` integral and primitive.
pub fn primitive_scale(v: &RatVector) -> Result<BigRational> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let denoms: Vec<BigInt> = v.0.iter().map(|x| x.denom().clone()).collect();
    let l = lcm_all(&denoms);
    let scaled: Vec<BigInt> = v
        .0
        .iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let g = gcd_all(&scaled);
    Ok(BigRational::new(l, g))
}

/// The scale-invariant value `a(v)^2 Q(v,v)`, always an integer. Zero exactly
/// when `v` is isotropic.
pub fn qbar(lattice: &QuadLattice, v: &RatVector) -> Result<BigInt> {
    let a = primitive_scale(v)?;
    let val = lattice.value(v)?;
    let q = &a * &a * val;
    debug_assert!(q.denom().is_one());
    Ok(q.to_integer())
}

/// Full invariant tuple; rejects isotropic vectors, where the square-free
/// decomposition is undefined.
pub fn vector_invariants(lattice: &QuadLattice, v: &RatVector) -> Result<VectorInvariants> {
    let a = primitive_scale(v)?;
    let qb = qbar(lattice, v)?;
    if qb.is_zero() {
        return Err(Error::IsotropicVector);
    }
    let (u, nu) = squarefree_decompose(&qb)?;
    debug_assert_eq!(&u * &nu * &nu, qb);
    Ok(VectorInvariants { a, qbar: qb, u, nu })
}

/// Exact signature of a non-degenerate symmetric rational matrix.
pub fn signature_of(gram: &QMat) -> Result<(usize, usize)> {
    let (diag, _) = diagonalize_qmat(gram)?;
    Ok(signature_of_diag(&diag))
}

fn signature_of_diag(diag: &[BigRational]) -> (usize, usize) {
    let r = diag.iter().filter(|d| d.is_negative()).count();
    let s = diag.iter().filter(|d| d.is_positive()).count();
    (r, s)
}

/// Congruence diagonalization of the lattice form: rationals `a_1..a_m` and
/// invertible `P` with `P^t Q P = diag(a_1..a_m)`.
pub fn diagonalize(lattice: &QuadLattice) -> Result<(Vec<BigRational>, QMat)> {
    diagonalize_qmat(&lattice.gram_qmat())
}

/// Symmetric Gaussian elimination with exact pivots. When a diagonal pivot
/// vanishes, we first add the row/column of a vector pairing nontrivially
/// with it; one of the two sign choices always produces a nonzero pivot.
pub fn diagonalize_qmat(gram: &QMat) -> Result<(Vec<BigRational>, QMat)> {
    if gram.rows() != gram.cols() || !gram.is_symmetric() {
        return Err(Error::BadInput("diagonalize needs a symmetric square matrix".into()));
    }
    let n = gram.rows();
    let mut g = gram.clone();
    let mut p = QMat::identity(n);

    // Column operation col_i += f * col_j (with the matching row op on g,
    // keeping g congruent to the input), recorded in p.
    fn add_col(g: &mut QMat, p: &mut QMat, i: usize, j: usize, f: &BigRational) {
        let n = g.rows();
        for row in 0..n {
            let v = g.at(row, i) + f * g.at(row, j);
            g.set(row, i, v);
        }
        for col in 0..n {
            let v = g.at(i, col) + f * g.at(j, col);
            g.set(i, col, v);
        }
        for row in 0..n {
            let v = p.at(row, i) + f * p.at(row, j);
            p.set(row, i, v);
        }
    }

    for i in 0..n {
        if g.at(i, i).is_zero() {
            let partner = (i + 1..n).find(|&j| !g.at(i, j).is_zero());
            match partner {
                None => return Err(Error::DegenerateForm),
                Some(j) => {
                    let one = BigRational::one();
                    add_col(&mut g, &mut p, i, j, &one);
                    if g.at(i, i).is_zero() {
                        // composing with -2 makes the net operation
                        // col_i -= col_j; the pivots 2a+b and -2a+b cannot
                        // both vanish when a != 0
                        let minus_two = BigRational::from_integer(BigInt::from(-2));
                        add_col(&mut g, &mut p, i, j, &minus_two);
                    }
                    debug_assert!(!g.at(i, i).is_zero());
                }
            }
        }
        let pivot = g.at(i, i).clone();
        for j in i + 1..n {
            if g.at(i, j).is_zero() {
                continue;
            }
            let f = -(g.at(i, j) / &pivot);
            add_col(&mut g, &mut p, j, i, &f);
        }
    }

    let diag: Vec<BigRational> = (0..n).map(|i| g.at(i, i).clone()).collect();
    if diag.iter().any(|d| d.is_zero()) {
        return Err(Error::DegenerateForm);
    }
    debug_assert_eq!(
        p.transpose().mul(gram).unwrap().mul(&p).unwrap(),
        {
            let mut d = QMat::zero(n, n);
            for (i, v) in diag.iter().enumerate() {
                d.set(i, i, v.clone());
            }
            d
        }
    );
    Ok((diag, p))
}
