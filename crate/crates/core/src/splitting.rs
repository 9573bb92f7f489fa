//! Rational idempotents on symplectic lattices: denominators, the split
//! lattice `V' = span_Z{e(V), (1-e)(V)}`, and the index identity
//! `[V':V] * [(1/nu)V : V'] = nu^{2g}`.
//!
//! The two indices are computed by genuinely different routes (rational
//! determinants vs. Hermite reduction of integer spans), so the identity is
//! a real cross-check of both implementations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;

use crate::arith::gcd_all;
use crate::matrix::{hermite_column_basis, span_index_in_standard, QMat};
use crate::{Error, Result};

/// Standard symplectic lattice of genus `g`: `Z^{2g}` with the form
/// `J = [[0, I_g], [-I_g, 0]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticLattice {
    g: usize,
}

impl SymplecticLattice {
    pub fn new(g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::BadInput("genus must be positive".into()));
        }
        Ok(SymplecticLattice { g })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn dim(&self) -> usize {
        2 * self.g
    }

    /// The symplectic Gram matrix `J`.
    pub fn j_matrix(&self) -> QMat {
        let g = self.g;
        let mut j = QMat::zero(2 * g, 2 * g);
        let one = BigRational::one();
        for i in 0..g {
            j.set(i, g + i, one.clone());
            j.set(g + i, i, -one.clone());
        }
        j
    }
}

/// The outcome of splitting along an idempotent.
#[derive(Debug, Clone)]
pub struct SplitData {
    pub e: QMat,
    /// rank of `e`; even (= 2k) when `e` projects onto a symplectic factor.
    pub rank: usize,
    /// the denominator: the unique `nu > 0` with `nu e` integral primitive.
    pub nu: BigInt,
    /// columns form a Z-basis of `V'`.
    pub vprime_basis: QMat,
    /// `[V' : V]`.
    pub index: BigInt,
}

fn check_idempotent(e: &QMat) -> Result<()> {
    if e.rows() != e.cols() {
        return Err(Error::DimensionMismatch {
            expected: "square".into(),
            got: format!("{}x{}", e.rows(), e.cols()),
        });
    }
    if e.mul(e)? != *e {
        return Err(Error::NotIdempotent);
    }
    if e.is_zero() || *e == QMat::identity(e.rows()) {
        return Err(Error::TrivialIdempotent);
    }
    Ok(())
}

/// The unique `nu > 0` with `nu e` integral and primitive.
///
/// `nu` is the lcm of the entry denominators; primitivity of `nu e` is then
/// automatic for a nontrivial idempotent, but it is asserted rather than
/// assumed.
pub fn idempotent_denominator(e: &QMat) -> Result<BigInt> {
    check_idempotent(e)?;
    let nu = e.denominator_lcm();
    let scaled = e.scale(&BigRational::from_integer(nu.clone()));
    let entries: Vec<BigInt> = scaled.to_bigint_rows()?.into_iter().flatten().collect();
    if !gcd_all(&entries).is_one() {
        return Err(Error::InconsistentData(
            "nu * e is not primitive; e is not an idempotent of the expected shape".into(),
        ));
    }
    Ok(nu)
}

/// Split the standard lattice along `e`: compute a basis of
/// `V' = span_Z{e(V), (1-e)(V)}` by Hermite reduction of `[nu e | nu (1-e)]`
/// and the index `[V' : V]` as `|det|` of the standard basis expressed in
/// `V'`-coordinates.
pub fn split_lattice(lattice: &SymplecticLattice, e: &QMat) -> Result<SplitData> {
    let n = lattice.dim();
    if e.rows() != n || e.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", e.rows(), e.cols()),
        });
    }
    let nu = idempotent_denominator(e)?;
    let rank = e.rank();

    let nu_rat = BigRational::from_integer(nu.clone());
    let one_minus_e = QMat::identity(n).sub(e)?;
    let scaled_e = e.scale(&nu_rat).to_bigint_rows()?;
    let scaled_ce = one_minus_e.scale(&nu_rat).to_bigint_rows()?;
    // columns of [nu e | nu (1-e)] span nu V'
    let mut concat: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = scaled_e[i].clone();
        row.extend(scaled_ce[i].iter().cloned());
        concat.push(row);
    }
    let nu_vprime_basis = hermite_column_basis(&concat)?;
    // V' basis = (1/nu) * basis(nu V')
    let vprime_basis = QMat::from_bigint_rows(&nu_vprime_basis).scale(&nu_rat.recip());

    // standard basis in V'-coordinates; integrality certifies V inside V'
    let coords = vprime_basis.inverse()?;
    if !coords.is_integral() {
        return Err(Error::InconsistentData(
            "standard lattice does not embed in the split lattice".into(),
        ));
    }
    let index = coords.det()?.to_integer().abs();
    if index < BigInt::one() {
        return Err(Error::InconsistentData("index came out below 1".into()));
    }
    Ok(SplitData {
        e: e.clone(),
        rank,
        nu,
        vprime_basis,
        index,
    })
}

/// Verify `[V':V] * [(1/nu)V : V'] = nu^{2g}`, recomputing the second index
/// by Hermite reduction of `nu * basis(V')` inside `Z^{2g}`. Implies
/// `[V':V]` divides `nu^{2g}`.
pub fn verify_index_identity(lattice: &SymplecticLattice, data: &SplitData) -> Result<bool> {
    let nu_rat = BigRational::from_integer(data.nu.clone());
    let scaled = data.vprime_basis.scale(&nu_rat);
    if !scaled.is_integral() {
        return Err(Error::InconsistentData(
            "V' basis does not have denominators dividing nu".into(),
        ));
    }
    // [(1/nu)V : V'] = [Z^{2g} : nu V']
    let second = span_index_in_standard(&scaled.to_bigint_rows()?)?;
    let target = data.nu.pow(2 * lattice.g() as u32);
    Ok(&data.index * &second == target)
}

/// Optional compatibility check with the symplectic form:
/// `e^t J e + (1-e)^t J (1-e) = J`.
pub fn is_symplectic_compatible(lattice: &SymplecticLattice, e: &QMat) -> Result<bool> {
    let j = lattice.j_matrix();
    let c = QMat::identity(lattice.dim()).sub(e)?;
    let lhs = e
        .transpose()
        .mul(&j)?
        .mul(e)?
        .add(&c.transpose().mul(&j)?.mul(&c)?)?;
    Ok(lhs == j)
}

/// Random nontrivial rational idempotent with denominator at most `nu_cap`,
/// built by conjugating a coordinate projector by a random integer matrix of
/// small nonzero determinant (unimodular shears composed with one or two
/// small column scalings, so denominators stay within reach of the cap).
pub fn random_idempotent<R: Rng>(
    lattice: &SymplecticLattice,
    nu_cap: u64,
    rng: &mut R,
) -> (QMat, BigInt) {
    let n = lattice.dim();
    loop {
        let rank = rng.gen_range(1..n);
        let mut proj = QMat::zero(n, n);
        for i in 0..rank {
            proj.set(i, i, BigRational::one());
        }
        let mut u = QMat::identity(n);
        // interleave unimodular shears with one or two small column
        // scalings; a scaling that is not separated from the projector by
        // shears would commute with it and leave the conjugate integral
        let mut scalings_left = rng.gen_range(1..=2u32);
        for step in 0..2 * n + 2 {
            if scalings_left > 0 && (step % n == n / 2) {
                let col = rng.gen_range(0..n);
                let d = BigRational::from_integer(BigInt::from(rng.gen_range(2..=4i64)));
                for row in 0..n {
                    let v = u.at(row, col) * &d;
                    u.set(row, col, v);
                }
                scalings_left -= 1;
                continue;
            }
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(rng.gen_range(-2..=2i64)));
            // column shear: col_i += c * col_j (unimodular)
            for row in 0..n {
                let v = u.at(row, i) + &c * u.at(row, j);
                u.set(row, i, v);
            }
        }
        let e = u.mul(&proj).unwrap().mul(&u.inverse().unwrap()).unwrap();
        debug_assert_eq!(e.mul(&e).unwrap(), e);
        if e.is_zero() || e == QMat::identity(n) {
            continue;
        }
        let nu = e.denominator_lcm();
        // cross-check against the construction: the only non-unimodular
        // factors are the column scalings, so nu divides |det U|
        debug_assert!({
            use num_traits::Zero;
            (u.det().unwrap().to_integer().abs() % &nu).is_zero()
        });
        if nu <= BigInt::from(nu_cap) {
            return (e, nu);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn half_projector() -> QMat {
        QMat::from_rows(vec![
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(1, 2), rat(1, 2)],
        ])
        .unwrap()
    }

    #[test]
    fn denominator_examples() {
        let lat = SymplecticLattice::new(2).unwrap();
        let n = lat.dim();
        let mut proj = QMat::zero(n, n);
        proj.set(0, 0, BigRational::one());
        assert_eq!(idempotent_denominator(&proj).unwrap(), BigInt::one());

        let e = half_projector();
        assert_eq!(idempotent_denominator(&e).unwrap(), BigInt::from(2));

        assert_eq!(
            idempotent_denominator(&QMat::identity(2)),
            Err(Error::TrivialIdempotent)
        );
        assert_eq!(
            idempotent_denominator(&QMat::zero(2, 2)),
            Err(Error::TrivialIdempotent)
        );
        let not_idem = QMat::from_int_rows(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(idempotent_denominator(&not_idem), Err(Error::NotIdempotent));
    }

    #[test]
    fn integral_idempotent_splits_trivially() {
        let lat = SymplecticLattice::new(1).unwrap();
        let mut proj = QMat::zero(2, 2);
        proj.set(0, 0, BigRational::one());
        let data = split_lattice(&lat, &proj).unwrap();
        assert_eq!(data.nu, BigInt::one());
        assert_eq!(data.index, BigInt::one());
        assert!(verify_index_identity(&lat, &data).unwrap());
    }

    #[test]
    fn genus_one_half_projector() {
        let lat = SymplecticLattice::new(1).unwrap();
        let e = half_projector();
        let data = split_lattice(&lat, &e).unwrap();
        assert_eq!(data.nu, BigInt::from(2));
        assert_eq!(data.rank, 1);
        // V' contains (1/2)(1,1) and (1/2)(1,-1); index [V':V] = 2 and the
        // identity 2 * 2 = 2^2 holds
        assert_eq!(data.index, BigInt::from(2));
        assert!(verify_index_identity(&lat, &data).unwrap());
    }

    #[test]
    fn complement_has_same_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for g in 1..=3usize {
            let lat = SymplecticLattice::new(g).unwrap();
            for _ in 0..20 {
                let (e, nu) = random_idempotent(&lat, 12, &mut rng);
                let c = QMat::identity(lat.dim()).sub(&e).unwrap();
                assert_eq!(idempotent_denominator(&c).unwrap(), nu);
                let de = split_lattice(&lat, &e).unwrap();
                let dc = split_lattice(&lat, &c).unwrap();
                assert_eq!(de.index, dc.index);
                assert_eq!(de.vprime_basis, dc.vprime_basis);
            }
        }
    }

    #[test]
    fn index_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for g in 1..=4usize {
            let lat = SymplecticLattice::new(g).unwrap();
            for _ in 0..25 {
                let (e, nu) = random_idempotent(&lat, 12, &mut rng);
                let data = split_lattice(&lat, &e).unwrap();
                assert_eq!(data.nu, nu);
                assert!(verify_index_identity(&lat, &data).unwrap());
                // index divides nu^{2g}
                let target = nu.pow(2 * g as u32);
                assert!((target % &data.index).is_zero());
                // V <= V' <= (1/nu) V
                let coords = data.vprime_basis.inverse().unwrap();
                assert!(coords.is_integral());
                let scaled = data
                    .vprime_basis
                    .scale(&BigRational::from_integer(data.nu.clone()));
                assert!(scaled.is_integral());
            }
        }
    }

    #[test]
    fn symplectic_compatibility_check() {
        let lat = SymplecticLattice::new(2).unwrap();
        // block projector onto the first symplectic plane: compatible
        let mut e = QMat::zero(4, 4);
        e.set(0, 0, BigRational::one());
        e.set(2, 2, BigRational::one());
        assert!(is_symplectic_compatible(&lat, &e).unwrap());
        // projector onto a non-symplectic pair: not compatible
        let mut f = QMat::zero(4, 4);
        f.set(0, 0, BigRational::one());
        f.set(1, 1, BigRational::one());
        assert!(!is_symplectic_compatible(&lat, &f).unwrap());
    }
}
