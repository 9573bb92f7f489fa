//! Explicit coordinates for SO(r,s): the isotropic chart, its Lie algebra and
//! minimal parabolic, the torus cutoff, Siegel-region inequalities, and the
//! quadric projection `tau_ell`.
//!
//! Conventions. The group preserves `Q = -I_r (+) I_s` with `r >= s >= 1`.
//! The `w`-coordinates are
//!
//! ```text
//! w_i = x_i - x_{r+i}   (1 <= i <= s)
//! w_i = x_i             (s+1 <= i <= r)
//! w_i = x_i + x_{i-r}   (r+1 <= i <= m)
//! ```
//!
//! so `w = S x` with the block matrices stored on the chart. In these
//! coordinates the form becomes `Q_S = (S^-1)^t Q (S^-1)`, whose quadric
//! sections are described by
//!
//! ```text
//! orbit_value(w) = sum_{i<=s} w_i w_{r+i} + sum_{s<j<=r} w_j^2 = -w^t Q_S w.
//! ```
//!
//! We normalize orbit constants against `orbit_value`, i.e. a quadric is
//! `{orbit_value(w) = c}`; this is proportional to `w^t Q_S w = c'` with
//! `c' = -c`, and nothing downstream depends on which proportionality is
//! fixed. All indices `i`, `ell` in this module are 1-based to match the
//! coordinate conventions above.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::matrix::QMat;
use crate::{Error, Result};

/// Comparison slack for the floating-point region predicate.
pub const FLOAT_SLACK: f64 = 1.0 / ((1u64 << 40) as f64);

/// The change-of-basis data for one signature split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiegelChart {
    r: usize,
    s: usize,
    s_mat: QMat,
    s_inv: QMat,
    q_s: QMat,
}

/// Region parameters: torus cutoff `t` and the two constants appearing in
/// the Siegel-region inequalities. All must be positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiegelRegionParams {
    pub t: BigRational,
    pub c: BigRational,
    pub kappa: BigRational,
}

impl SiegelRegionParams {
    pub fn new(t: BigRational, c: BigRational, kappa: BigRational) -> Result<Self> {
        if !t.is_positive() || !c.is_positive() || !kappa.is_positive() {
            return Err(Error::BadInput("region parameters must be positive".into()));
        }
        Ok(SiegelRegionParams { t, c, kappa })
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

/// Build the chart for signature `(r, s)`, `r >= s >= 1`.
///
/// The construction cross-checks itself: `S * S^-1 = I` and the computed
/// `Q_S` must equal its block closed form.
pub fn build_chart(r: usize, s: usize) -> Result<SiegelChart> {
    if s < 1 || r < s {
        return Err(Error::BadSignature { r, s });
    }
    let m = r + s;
    let one = BigRational::one();

    let mut s_mat = QMat::zero(m, m);
    for i in 0..s {
        s_mat.set(i, i, one.clone());
        s_mat.set(i, r + i, -one.clone());
    }
    for i in s..r {
        s_mat.set(i, i, one.clone());
    }
    for i in 0..s {
        s_mat.set(r + i, r + i, one.clone());
        s_mat.set(r + i, i, one.clone());
    }

    let mut s_inv = QMat::zero(m, m);
    for i in 0..s {
        s_inv.set(i, i, half());
        s_inv.set(i, r + i, half());
    }
    for i in s..r {
        s_inv.set(i, i, one.clone());
    }
    for i in 0..s {
        s_inv.set(r + i, i, -half());
        s_inv.set(r + i, r + i, half());
    }

    if s_mat.mul(&s_inv)? != QMat::identity(m) {
        return Err(Error::InconsistentData("S * S^-1 != I".into()));
    }

    let mut q_std = QMat::zero(m, m);
    for i in 0..r {
        q_std.set(i, i, -one.clone());
    }
    for i in r..m {
        q_std.set(i, i, one.clone());
    }
    let q_s = s_inv.transpose().mul(&q_std)?.mul(&s_inv)?;

    // closed block form: off-diagonal corners -1/2 I_s, middle -I_{r-s}
    let mut expected = QMat::zero(m, m);
    for i in 0..s {
        expected.set(i, r + i, -half());
        expected.set(r + i, i, -half());
    }
    for i in s..r {
        expected.set(i, i, -one.clone());
    }
    if q_s != expected {
        return Err(Error::InconsistentData("computed Q_S disagrees with its block form".into()));
    }

    Ok(SiegelChart { r, s, s_mat, s_inv, q_s })
}

impl SiegelChart {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.r + self.s
    }

    pub fn s_mat(&self) -> &QMat {
        &self.s_mat
    }

    pub fn s_inv(&self) -> &QMat {
        &self.s_inv
    }

    pub fn q_s(&self) -> &QMat {
        &self.q_s
    }

    /// `w = S x`.
    pub fn to_w(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        self.s_mat.mul_vec(x)
    }

    /// `x = S^-1 w`.
    pub fn to_x(&self, w: &[BigRational]) -> Result<Vec<BigRational>> {
        self.s_inv.mul_vec(w)
    }

    fn check_square(&self, w: &QMat) -> Result<()> {
        let m = self.m();
        if w.rows() != m || w.cols() != m {
            return Err(Error::DimensionMismatch {
                expected: format!("{m}x{m}"),
                got: format!("{}x{}", w.rows(), w.cols()),
            });
        }
        Ok(())
    }

    fn check_vec(&self, w: &[BigRational]) -> Result<()> {
        if w.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}", self.m()),
                got: format!("{}", w.len()),
            });
        }
        Ok(())
    }
}

/// Membership in the Lie algebra in `w`-coordinates: `W^t Q_S + Q_S W = 0`.
pub fn in_lie_algebra(chart: &SiegelChart, w: &QMat) -> Result<bool> {
    chart.check_square(w)?;
    let lhs = w.transpose().mul(chart.q_s())?.add(&chart.q_s().mul(w)?)?;
    Ok(lhs.is_zero())
}

/// Membership in the minimal parabolic subalgebra: inside the Lie algebra,
/// with `W_21 = 0`, `W_31 = 0` and upper-triangular `W_11`.
pub fn in_parabolic(chart: &SiegelChart, w: &QMat) -> Result<bool> {
    if !in_lie_algebra(chart, w)? {
        return Err(Error::NotInLieAlgebra);
    }
    let (r, s, m) = (chart.r(), chart.s(), chart.m());
    if !w.block(s, r, 0, s).is_zero() || !w.block(r, m, 0, s).is_zero() {
        return Ok(false);
    }
    for i in 0..s {
        for j in 0..i {
            if !w.at(i, j).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Torus membership: `a` is the diagonal (in `w`-coordinates, positive
/// entries) of a group element, and the cutoff conditions are
/// `a_i >= t a_{i+1}` for `1 <= i <= s-1` and `a_s >= t`.
///
/// Returns `NotInGroup` unless `a_i a_{r+i} = 1` for `i <= s` and the middle
/// entries are 1.
pub fn in_torus_a_t(chart: &SiegelChart, a: &[BigRational], t: &BigRational) -> Result<bool> {
    chart.check_vec(a)?;
    let (r, s) = (chart.r(), chart.s());
    if a.iter().any(|x| !x.is_positive()) {
        return Err(Error::NotInGroup);
    }
    for i in 0..s {
        if !(&a[i] * &a[r + i]).is_one() {
            return Err(Error::NotInGroup);
        }
    }
    for item in a.iter().take(r).skip(s) {
        if !item.is_one() {
            return Err(Error::NotInGroup);
        }
    }
    for i in 0..s.saturating_sub(1) {
        if &a[i] < &(t * &a[i + 1]) {
            return Ok(false);
        }
    }
    Ok(&a[s - 1] >= t)
}

/// Smallest 1-based index `ell` in `{r+1, .., m}` with `w_ell != 0`.
pub fn ell_index(chart: &SiegelChart, w: &[BigRational]) -> Result<Option<usize>> {
    chart.check_vec(w)?;
    for i in chart.r() + 1..=chart.m() {
        if !w[i - 1].is_zero() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// The Siegel-region inequalities, exactly:
///
/// - if `ell(w)` is defined: `|w_ell|^-1 + kappa > c |w_i|` for `i <= s` and
///   `kappa > |w_i|` for `s+1 <= i <= m`;
/// - otherwise `||w|| < kappa` (Euclidean, compared via squares).
pub fn in_siegel_region(
    chart: &SiegelChart,
    w: &[BigRational],
    params: &SiegelRegionParams,
) -> Result<bool> {
    chart.check_vec(w)?;
    let s = chart.s();
    match ell_index(chart, w)? {
        None => {
            let norm_sq: BigRational = w.iter().map(|x| x * x).sum();
            Ok(norm_sq < &params.kappa * &params.kappa)
        }
        Some(ell) => {
            let w_ell_abs = w[ell - 1].abs();
            let lhs = w_ell_abs.recip() + &params.kappa;
            for wi in w.iter().take(s) {
                if lhs <= &params.c * wi.abs() {
                    return Ok(false);
                }
            }
            for wi in w.iter().take(chart.m()).skip(s) {
                if params.kappa <= wi.abs() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Floating-point variant for Monte-Carlo use; comparisons carry an additive
/// slack of [`FLOAT_SLACK`] on the side of acceptance.
pub fn in_siegel_region_f64(chart: &SiegelChart, w: &[f64], c: f64, kappa: f64) -> Result<bool> {
    if w.len() != chart.m() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}", chart.m()),
            got: format!("{}", w.len()),
        });
    }
    let s = chart.s();
    let ell = (chart.r() + 1..=chart.m()).find(|&i| w[i - 1] != 0.0);
    match ell {
        None => {
            let norm_sq: f64 = w.iter().map(|x| x * x).sum();
            Ok(norm_sq < kappa * kappa + FLOAT_SLACK)
        }
        Some(ell) => {
            let lhs = 1.0 / w[ell - 1].abs() + kappa;
            for wi in w.iter().take(s) {
                if lhs + FLOAT_SLACK <= c * wi.abs() {
                    return Ok(false);
                }
            }
            for wi in w.iter().take(chart.m()).skip(s) {
                if kappa + FLOAT_SLACK <= wi.abs() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Quadric value whose level sets are the group orbits:
/// `sum_{i<=s} w_i w_{r+i} + sum_{s<j<=r} w_j^2`, equal to `-w^t Q_S w`.
pub fn orbit_value(chart: &SiegelChart, w: &[BigRational]) -> Result<BigRational> {
    chart.check_vec(w)?;
    let (r, s) = (chart.r(), chart.s());
    let mut acc = BigRational::zero();
    for i in 0..s {
        acc += &w[i] * &w[r + i];
    }
    for wi in w.iter().take(r).skip(s) {
        acc += wi * wi;
    }
    Ok(acc)
}

/// The projection dropping coordinate `ell - r` and multiplying the
/// remaining first-block coordinates by `w_ell`:
///
/// `(w_1 w_ell, .., w_{ell-r-1} w_ell, w_{ell-r+1} w_ell, .., w_s w_ell,
///   w_{s+1}, .., w_m)`.
pub fn tau_ell(chart: &SiegelChart, w: &[BigRational], ell: usize) -> Result<Vec<BigRational>> {
    chart.check_vec(w)?;
    let (r, s, m) = (chart.r(), chart.s(), chart.m());
    if ell < r + 1 || ell > m {
        return Err(Error::BadIndex { index: ell });
    }
    let w_ell = &w[ell - 1];
    let mut out = Vec::with_capacity(m - 1);
    for i in 1..=s {
        if i == ell - r {
            continue;
        }
        out.push(&w[i - 1] * w_ell);
    }
    for wi in w.iter().take(m).skip(s) {
        out.push(wi.clone());
    }
    Ok(out)
}

/// Inverse of [`tau_ell`] on `{w_ell != 0}` intersected with the quadric
/// `{orbit_value = c_orb}`: read `w_ell` among the unmultiplied coordinates,
/// divide the multiplied block by it, and solve the quadric equation for the
/// omitted coordinate `w_{ell-r}`.
pub fn tau_ell_invert(
    chart: &SiegelChart,
    y: &[BigRational],
    ell: usize,
    c_orb: &BigRational,
) -> Result<Vec<BigRational>> {
    let (r, s, m) = (chart.r(), chart.s(), chart.m());
    if ell < r + 1 || ell > m {
        return Err(Error::BadIndex { index: ell });
    }
    if y.len() != m - 1 {
        return Err(Error::DimensionMismatch {
            expected: format!("{}", m - 1),
            got: format!("{}", y.len()),
        });
    }
    // Unmultiplied coordinates w_{s+1}..w_m sit at y[j-2] for j in s+1..=m.
    let w_ell = y[ell - 2].clone();
    if w_ell.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let mut w = vec![BigRational::zero(); m];
    for j in s + 1..=m {
        w[j - 1] = y[j - 2].clone();
    }
    let i0 = ell - r;
    for i in 1..=s {
        if i == i0 {
            continue;
        }
        let pos = if i < i0 { i - 1 } else { i - 2 };
        w[i - 1] = &y[pos] / &w_ell;
    }
    // orbit_value = w_{i0} w_ell + (all other terms); solve for w_{i0}.
    let mut rest = BigRational::zero();
    for i in 1..=s {
        if i == i0 {
            continue;
        }
        rest += &w[i - 1] * &w[r + i - 1];
    }
    for wi in w.iter().take(r).skip(s) {
        rest += wi * wi;
    }
    w[i0 - 1] = (c_orb - rest) / &w_ell;

    if tau_ell(chart, &w, ell)? != y {
        return Err(Error::NotOnQuadric);
    }
    if &orbit_value(chart, &w)? != c_orb {
        return Err(Error::NotOnQuadric);
    }
    Ok(w)
}

/// Lie bracket `[a, b] = ab - ba`.
pub fn bracket(a: &QMat, b: &QMat) -> Result<QMat> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Exact exponential of a nilpotent matrix (finite series). Errors if the
/// matrix is not nilpotent.
pub fn exp_nilpotent(w: &QMat) -> Result<QMat> {
    let n = w.rows();
    let mut acc = QMat::identity(n);
    let mut power = QMat::identity(n);
    let mut factorial = BigInt::one();
    for k in 1..=n + 1 {
        power = power.mul(w)?;
        if power.is_zero() {
            return Ok(acc);
        }
        if k > n {
            return Err(Error::UnsupportedQuery("matrix is not nilpotent".into()));
        }
        factorial *= BigInt::from(k as u64);
        let term = power.scale(&BigRational::new(BigInt::one(), factorial.clone()));
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

fn random_rat<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> BigRational {
    BigRational::new(
        BigInt::from(rng.gen_range(-max_num..=max_num)),
        BigInt::from(rng.gen_range(1..=max_den)),
    )
}

/// Random element of the Lie algebra in `w`-coordinates, built from its free
/// block parameters.
pub fn random_lie_element<R: Rng>(chart: &SiegelChart, rng: &mut R) -> QMat {
    let (r, s, m) = (chart.r(), chart.s(), chart.m());
    let mid = r - s;
    let mut w = QMat::zero(m, m);

    // W11 arbitrary s x s
    let mut w11 = QMat::zero(s, s);
    for i in 0..s {
        for j in 0..s {
            w11.set(i, j, random_rat(rng, 4, 3));
        }
    }
    // W21, W23 arbitrary (r-s) x s
    let mut w21 = QMat::zero(mid, s);
    let mut w23 = QMat::zero(mid, s);
    for i in 0..mid {
        for j in 0..s {
            w21.set(i, j, random_rat(rng, 4, 3));
            w23.set(i, j, random_rat(rng, 4, 3));
        }
    }
    // W13, W31 antisymmetric s x s; W22 antisymmetric (r-s) x (r-s)
    let mut w13 = QMat::zero(s, s);
    let mut w31 = QMat::zero(s, s);
    for i in 0..s {
        for j in 0..i {
            let v = random_rat(rng, 4, 3);
            w13.set(i, j, v.clone());
            w13.set(j, i, -v);
            let v = random_rat(rng, 4, 3);
            w31.set(i, j, v.clone());
            w31.set(j, i, -v);
        }
    }
    let mut w22 = QMat::zero(mid, mid);
    for i in 0..mid {
        for j in 0..i {
            let v = random_rat(rng, 4, 3);
            w22.set(i, j, v.clone());
            w22.set(j, i, -v);
        }
    }

    let minus_two = BigRational::from_integer(BigInt::from(-2));
    w.paste(0, 0, &w11);
    w.paste(0, s, &w23.transpose().scale(&minus_two));
    w.paste(0, r, &w13);
    w.paste(s, 0, &w21);
    w.paste(s, s, &w22);
    w.paste(s, r, &w23);
    w.paste(r, 0, &w31);
    w.paste(r, s, &w21.transpose().scale(&minus_two));
    w.paste(r, r, &w11.transpose().neg());
    w
}

/// Random element of the parabolic subalgebra (upper-triangular `W11`,
/// `W21 = W31 = 0`).
pub fn random_parabolic_element<R: Rng>(chart: &SiegelChart, rng: &mut R) -> QMat {
    let (r, s, m) = (chart.r(), chart.s(), chart.m());
    let mid = r - s;
    let mut w = QMat::zero(m, m);

    let mut y = QMat::zero(s, s);
    for i in 0..s {
        for j in i..s {
            y.set(i, j, random_rat(rng, 4, 3));
        }
    }
    let mut w23 = QMat::zero(mid, s);
    for i in 0..mid {
        for j in 0..s {
            w23.set(i, j, random_rat(rng, 4, 3));
        }
    }
    let mut w13 = QMat::zero(s, s);
    for i in 0..s {
        for j in 0..i {
            let v = random_rat(rng, 4, 3);
            w13.set(i, j, v.clone());
            w13.set(j, i, -v);
        }
    }
    let mut w22 = QMat::zero(mid, mid);
    for i in 0..mid {
        for j in 0..i {
            let v = random_rat(rng, 4, 3);
            w22.set(i, j, v.clone());
            w22.set(j, i, -v);
        }
    }

    let minus_two = BigRational::from_integer(BigInt::from(-2));
    w.paste(0, 0, &y);
    w.paste(0, s, &w23.transpose().scale(&minus_two));
    w.paste(0, r, &w13);
    w.paste(s, s, &w22);
    w.paste(s, r, &w23);
    w.paste(r, r, &y.transpose().neg());
    w
}

/// Random rational vector on the quadric `{orbit_value = c_orb}` with
/// `ell(w)` defined (hence `w_ell != 0` by definition of `ell`).
pub fn random_on_quadric<R: Rng>(
    chart: &SiegelChart,
    c_orb: &BigRational,
    rng: &mut R,
) -> Vec<BigRational> {
    let (r, s, m) = (chart.r(), chart.s(), chart.m());
    let mut w: Vec<BigRational> = (0..m).map(|_| random_rat(rng, 6, 4)).collect();
    // force one pairing coordinate nonzero so the quadric can be solved
    let i0 = rng.gen_range(1..=s);
    if w[r + i0 - 1].is_zero() {
        w[r + i0 - 1] = BigRational::new(
            BigInt::from(rng.gen_range(1..=6) * if rng.gen_bool(0.5) { 1 } else { -1 }),
            BigInt::from(rng.gen_range(1..=4)),
        );
    }
    let mut rest = BigRational::zero();
    for i in 1..=s {
        if i == i0 {
            continue;
        }
        rest += &w[i - 1] * &w[r + i - 1];
    }
    for wi in w.iter().take(r).skip(s) {
        rest += wi * wi;
    }
    w[i0 - 1] = (c_orb - rest) / &w[r + i0 - 1];
    debug_assert_eq!(&orbit_value(chart, &w).unwrap(), c_orb);
    w
}
