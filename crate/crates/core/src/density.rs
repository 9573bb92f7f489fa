//! Exact p-adic local densities of diagonal quadratic forms at odd primes.
//!
//! For `B(x) = sum a_i x_i^2` with unit diagonal entries mod p, and target
//! `t = p^{2k} u` with `u` square-free prime to p, the local density is
//!
//! ```text
//! alpha_p(t, B) = lim_e  #{x mod p^e : B(x) = t mod p^e} / p^{(m-1) e}
//! ```
//!
//! Two independent evaluations are provided:
//!
//! - [`alpha_bruteforce`]: exact solution counting mod `p^e` via per-variable
//!   value distributions and cyclic convolution, O(m p^{2e}) instead of
//!   O(p^{em}). The limit stabilizes once `e >= 2k+2`.
//! - [`alpha_closed`]: the closed form. Writing `w(j) = -mj/2 + j +
//!   min(2k-j, 0)/2` and `chi = ((-1)^m det Q / p)`, the value is
//!
//!   ```text
//!   1 + sum_{j even, 1<=j<=2k+1} (1 - 1/p) p^{w(j)}
//!     + sum_{j odd,  1<=j<=2k+1} p^{w(j)} chi (*)_j
//!   ```
//!
//!   with `(*)_j` given by four cases split on `2k - j >= 0` vs `= -1` and
//!   the parity of `m` (see `star_factor`). The even-`j` factor `(1 - 1/p)`
//!   is forced by the counting oracle, which is the ground truth here: it is
//!   the Ramanujan-sum mass `phi(p^j)/p^j` that every even layer
//!   contributes. Half-integer powers of p are carried symbolically and must
//!   cancel before a value is returned.
//!
//! p = 2 is excluded throughout: over Z[1/2] every unimodular lattice
//! becomes diagonalizable and odd places see no difference, so all density
//! machinery is restricted to odd p.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factorize_u64, is_prime_u64, legendre, rational_prime_power, squarefree_decompose};
use crate::{Error, Result};

/// Default cap compared against p^(2e), the work factor of one convolution
/// pass. Matches a 2 GiB budget read as a unitless count.
pub const DEFAULT_MEM_BUDGET: u64 = 2 * 1024 * 1024 * 1024;

/// A validated density query: odd prime p, unit diagonal entries,
/// target `t = p^{2k} u` with `u` square-free and prime to p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityQuery {
    p: u64,
    diag: Vec<BigInt>,
    k: u32,
    u: BigInt,
}

impl DensityQuery {
    pub fn new(p: u64, diag: Vec<BigInt>, k: u32, u: BigInt) -> Result<Self> {
        if p < 3 || !is_prime_u64(p) {
            return Err(Error::UnsupportedQuery(format!("p = {p} is not an odd prime")));
        }
        if diag.is_empty() {
            return Err(Error::UnsupportedQuery("empty diagonal".into()));
        }
        let pb = BigInt::from(p);
        for a in &diag {
            if a.mod_floor(&pb).is_zero() {
                return Err(Error::UnsupportedQuery(format!("p = {p} divides diagonal entry {a}")));
            }
        }
        if u.is_zero() || u.mod_floor(&pb).is_zero() {
            return Err(Error::UnsupportedQuery(format!("u = {u} must be nonzero and prime to p")));
        }
        let (_, nu) = squarefree_decompose(&u)?;
        if !nu.is_one() {
            return Err(Error::UnsupportedQuery(format!("u = {u} is not square-free")));
        }
        Ok(DensityQuery { p, diag, k, u })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[BigInt] {
        &self.diag
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    /// The represented target `t = p^{2k} u`.
    pub fn target(&self) -> BigInt {
        BigInt::from(self.p).pow(2 * self.k) * &self.u
    }

    pub fn det(&self) -> BigInt {
        self.diag.iter().product()
    }
}

/// Exact rational density value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityValue(pub BigRational);

/// `coeff * p^(half/2)`. Terms of the closed form are assembled in this
/// symbolic domain; conversion to a rational demands even `half`, so a
/// surviving square root is reported as a hard error instead of being
/// silently approximated.
#[derive(Debug, Clone)]
struct HalfPower {
    coeff: BigRational,
    half: i64,
}

impl HalfPower {
    fn into_rational(self, p: u64) -> Result<BigRational> {
        if self.coeff.is_zero() {
            return Ok(BigRational::zero());
        }
        if self.half.rem_euclid(2) != 0 {
            return Err(Error::NonCancellingHalfPower);
        }
        Ok(self.coeff * rational_prime_power(p, self.half / 2))
    }
}

fn sign_pow(sign: i8, exp: u32) -> i8 {
    if sign == 0 {
        return if exp == 0 { 1 } else { 0 };
    }
    if exp % 2 == 0 {
        1
    } else {
        sign
    }
}

/// Closed-form local density. Exact; equals [`alpha_bruteforce`] at any
/// stabilized precision.
pub fn alpha_closed(q: &DensityQuery) -> Result<DensityValue> {
    let p = q.p;
    let m = q.m() as i64;
    let m_odd = m % 2 != 0;
    let two_k = 2 * q.k as i64;

    let det = q.det();
    let chi_arg = if m_odd { -det.clone() } else { det.clone() };
    let chi = legendre(&chi_arg, p);
    debug_assert!(chi != 0);
    let leg_minus_one = legendre(&BigInt::from(-1), p);
    let leg_u = legendre(&q.u, p);
    debug_assert!(leg_u != 0);

    let one_minus_p_inv =
        BigRational::one() - rational_prime_power(p, -1);

    let mut total = BigRational::one(); // j = 0
    for j in 1..=two_k + 1 {
        // 2 w(j) = -mj + 2j + min(2k - j, 0)
        let mut half = -m * j + 2 * j + std::cmp::min(two_k - j, 0);
        let coeff: BigRational = if j % 2 == 0 {
            one_minus_p_inv.clone()
        } else if two_k - j >= 0 {
            if m_odd {
                continue; // the star factor vanishes
            }
            let s = chi * sign_pow(leg_minus_one, (m / 2) as u32);
            &one_minus_p_inv * BigRational::from_integer(BigInt::from(s))
        } else {
            // j = 2k + 1
            if m_odd {
                let s = chi * sign_pow(leg_minus_one, ((m + 1) / 2) as u32) * leg_u;
                BigRational::from_integer(BigInt::from(s))
            } else {
                // star factor carries an extra -p^{-1/2}
                half -= 1;
                let s = -chi * sign_pow(leg_minus_one, (m / 2) as u32);
                BigRational::from_integer(BigInt::from(s))
            }
        };
        total += HalfPower { coeff, half }.into_rational(p)?;
    }

    if total.is_negative() {
        return Err(Error::InconsistentData(format!(
            "closed-form density came out negative: {total}"
        )));
    }
    Ok(DensityValue(total))
}

/// Cache of convolved count tables keyed by (p, e, #residue-class entries,
/// #non-residue-class entries). Convolution is commutative, so the table
/// depends only on that multiset.
#[derive(Default)]
pub struct ConvCache {
    base: HashMap<(u64, u32, bool), Rc<Vec<u64>>>,
    tables: HashMap<(u64, u32, u32, u32), Rc<Vec<u128>>>,
}

impl ConvCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn base_distribution(&mut self, p: u64, e: u32, residue: bool) -> Rc<Vec<u64>> {
        if let Some(d) = self.base.get(&(p, e, residue)) {
            return d.clone();
        }
        let n = p.pow(e);
        let a = if residue {
            1u64
        } else {
            // smallest quadratic non-residue mod p
            (2..p).find(|&c| legendre(&BigInt::from(c), p) == -1).unwrap()
        };
        let mut d = vec![0u64; n as usize];
        for x in 0..n {
            let t = (a as u128 * x as u128 % n as u128 * x as u128 % n as u128) as usize;
            d[t] += 1;
        }
        let rc = Rc::new(d);
        self.base.insert((p, e, residue), rc.clone());
        rc
    }

    fn table(&mut self, p: u64, e: u32, n_res: u32, n_non: u32) -> Rc<Vec<u128>> {
        if let Some(t) = self.tables.get(&(p, e, n_res, n_non)) {
            return t.clone();
        }
        let t = if n_res + n_non == 1 {
            let base = self.base_distribution(p, e, n_res == 1);
            Rc::new(base.iter().map(|&v| v as u128).collect::<Vec<u128>>())
        } else {
            let (prev, residue) = if n_res > 0 {
                (self.table(p, e, n_res - 1, n_non), true)
            } else {
                (self.table(p, e, n_res, n_non - 1), false)
            };
            let base = self.base_distribution(p, e, residue);
            Rc::new(cyclic_convolve(&prev, &base))
        };
        self.tables.insert((p, e, n_res, n_non), t.clone());
        t
    }
}

fn cyclic_convolve(a: &[u128], b: &[u64]) -> Vec<u128> {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    let mut out = vec![0u128; n];
    for (s, &av) in a.iter().enumerate() {
        if av == 0 {
            continue;
        }
        // out[(s + x) mod n] += av * b[x], with the mod unrolled into two
        // contiguous passes
        let wrap = n - s;
        for x in 0..wrap {
            out[s + x] += av * b[x] as u128;
        }
        for x in wrap..n {
            out[x - wrap] += av * b[x] as u128;
        }
    }
    out
}

/// Brute-force density at precision `e` with the default budget.
pub fn alpha_bruteforce(q: &DensityQuery, e: u32) -> Result<DensityValue> {
    let mut cache = ConvCache::new();
    alpha_bruteforce_with(q, e, DEFAULT_MEM_BUDGET, &mut cache)
}

/// Brute-force density at precision `e`: the exact rational
/// `#{x in (Z/p^e)^m : B(x) = t} / p^{(m-1)e}`.
pub fn alpha_bruteforce_with(
    q: &DensityQuery,
    e: u32,
    budget: u64,
    cache: &mut ConvCache,
) -> Result<DensityValue> {
    if e < 1 {
        return Err(Error::UnsupportedQuery("precision e must be >= 1".into()));
    }
    let p = q.p;
    // Work bound: one convolution pass is p^(2e) multiply-adds.
    let work = (p as f64).powi(2 * e as i32);
    if work > budget as f64 {
        return Err(Error::PrecisionTooLarge { p, e, budget });
    }
    // The count tables must fit u128: total mass is p^(e m).
    if (q.m() as f64) * (e as f64) * (p as f64).log2() > 126.0 {
        return Err(Error::PrecisionTooLarge { p, e, budget });
    }

    let (mut n_res, mut n_non) = (0u32, 0u32);
    for a in &q.diag {
        match legendre(a, p) {
            1 => n_res += 1,
            -1 => n_non += 1,
            _ => unreachable!("validated unit diagonal"),
        }
    }
    let table = cache.table(p, e, n_res, n_non);
    let n = BigInt::from(p).pow(e);
    let t_idx = q.target().mod_floor(&n).to_usize().unwrap();
    let count = BigInt::from(table[t_idx]);
    let denom = BigInt::from(p).pow(e * (q.m() as u32 - 1));
    Ok(DensityValue(BigRational::new(count, denom)))
}

/// The corollary lower bound `(1 - 2 p^{1-m/2}) / (1 - p^{1-m/2})`.
///
/// For odd `m` the quantity `p^{1-m/2}` is irrational; comparisons against
/// it are done exactly on squared forms, so the bound is represented by
/// `q^2 = p^{2-m}` rather than by a rational value.
#[derive(Debug, Clone)]
pub struct AlphaLowerBound {
    pub m: usize,
    pub p: u64,
    /// `q^2` where the bound is `(1-2q)/(1-q)`, `q = p^{1-m/2}`.
    pub q_squared: BigRational,
    /// True when the bound is <= 0 and hence carries no information.
    pub vacuous: bool,
}

pub fn alpha_lower_bound(m: usize, p: u64) -> Result<AlphaLowerBound> {
    if !is_prime_u64(p) || p < 3 {
        return Err(Error::UnsupportedQuery(format!("p = {p} is not an odd prime")));
    }
    if m <= 2 {
        return Err(Error::UnsupportedQuery(
            "lower bound needs m >= 3 (denominator vanishes at m = 2)".into(),
        ));
    }
    let q_squared = rational_prime_power(p, 2 - m as i64);
    // bound <= 0 iff 2q >= 1 iff 4 q^2 >= 1
    let vacuous = &q_squared * BigRational::from_integer(BigInt::from(4)) >= BigRational::one();
    Ok(AlphaLowerBound { m, p, q_squared, vacuous })
}

impl AlphaLowerBound {
    /// Exact test `alpha >= (1-2q)/(1-q)` with `q = sqrt(q_squared)`.
    ///
    /// Since `0 < q < 1`, the inequality is equivalent to
    /// `alpha - 1 >= q (alpha - 2)`, which is decided by sign analysis and
    /// squaring.
    pub fn is_satisfied_by(&self, alpha: &BigRational) -> bool {
        let one = BigRational::one();
        let two = BigRational::from_integer(BigInt::from(2));
        let a = alpha - one; // alpha - 1
        let c = alpha - two; // alpha - 2
        if c.is_negative() || c.is_zero() {
            if !a.is_negative() {
                return true;
            }
            // both sides <= 0: compare magnitudes squared
            &a * &a <= &self.q_squared * &c * &c
        } else {
            if a.is_negative() {
                return false;
            }
            &a * &a >= &self.q_squared * &c * &c
        }
    }

    /// The bound itself when it is rational (even m).
    pub fn exact_value(&self) -> Option<BigRational> {
        if self.m % 2 != 0 {
            return None;
        }
        let q = rational_prime_power(self.p, (2 - self.m as i64) / 2);
        let one = BigRational::one();
        let two = BigRational::from_integer(BigInt::from(2));
        Some((one.clone() - two * &q) / (one - q))
    }

    pub fn value_f64(&self) -> f64 {
        let q = self.q_squared.to_f64().unwrap().sqrt();
        (1.0 - 2.0 * q) / (1.0 - q)
    }
}

/// The measure of the denominator-`p^k` ball on the orbit:
/// `p^{(m-2)k} * alpha_p(p^{2k} u, B)`.
pub fn local_volume(q: &DensityQuery) -> Result<BigRational> {
    let alpha = alpha_closed(q)?;
    let scale = rational_prime_power(q.p, (q.m() as i64 - 2) * q.k as i64);
    Ok(scale * alpha.0)
}

/// Euler-product lower-bound data for denominator `nu`.
#[derive(Debug, Clone)]
pub struct ProductLowerBound {
    pub m: usize,
    pub nu: u64,
    /// `prod_{p | nu} p^{(m-2) e_p(nu)}` over all primes; equals `nu^{m-2}`.
    pub nu_power: BigInt,
    /// Per-prime density bounds over the odd primes dividing nu. The prime 2
    /// is deliberately absent: the density machinery works away from 2.
    pub odd_prime_bounds: Vec<AlphaLowerBound>,
}

pub fn product_lower_bound(m: usize, nu: u64) -> Result<ProductLowerBound> {
    if m < 3 {
        return Err(Error::UnsupportedQuery("need m >= 3".into()));
    }
    if nu < 1 {
        return Err(Error::UnsupportedQuery("need nu >= 1".into()));
    }
    let mut nu_power = BigInt::one();
    let mut odd_prime_bounds = Vec::new();
    for (p, e) in factorize_u64(nu) {
        nu_power *= BigInt::from(p).pow((m as u32 - 2) * e);
        if p > 2 {
            odd_prime_bounds.push(alpha_lower_bound(m, p)?);
        }
    }
    Ok(ProductLowerBound { m, nu, nu_power, odd_prime_bounds })
}

impl ProductLowerBound {
    pub fn bound_factor_f64(&self) -> f64 {
        self.odd_prime_bounds.iter().map(|b| b.value_f64()).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64, diag: &[i64], k: u32, u: i64) -> DensityQuery {
        DensityQuery::new(
            p,
            diag.iter().map(|&a| BigInt::from(a)).collect(),
            k,
            BigInt::from(u),
        )
        .unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn query_validation() {
        assert!(DensityQuery::new(2, vec![BigInt::one()], 0, BigInt::one()).is_err());
        assert!(DensityQuery::new(9, vec![BigInt::one()], 0, BigInt::one()).is_err());
        assert!(DensityQuery::new(3, vec![BigInt::from(3)], 0, BigInt::one()).is_err());
        assert!(DensityQuery::new(3, vec![BigInt::one()], 0, BigInt::from(4)).is_err());
        assert!(DensityQuery::new(3, vec![BigInt::one()], 0, BigInt::from(3)).is_err());
        assert!(DensityQuery::new(5, vec![BigInt::one()], 1, BigInt::from(-2)).is_ok());
    }

    #[test]
    fn brute_force_m1_examples() {
        // x^2 = 1 mod 3: two solutions, alpha = 2
        let v = alpha_bruteforce(&q(3, &[1], 0, 1), 1).unwrap();
        assert_eq!(v.0, rat(2, 1));
        // non-residue target: empty
        let v = alpha_bruteforce(&q(3, &[1], 0, 2), 3).unwrap();
        assert_eq!(v.0, rat(0, 1));
        // t = 9: x in {3y : y^2 = 1 mod 3}; alpha = 6
        let v = alpha_bruteforce(&q(3, &[1], 1, 1), 4).unwrap();
        assert_eq!(v.0, rat(6, 1));
    }

    #[test]
    fn closed_matches_hand_counts() {
        assert_eq!(alpha_closed(&q(3, &[1], 0, 1)).unwrap().0, rat(2, 1));
        assert_eq!(alpha_closed(&q(3, &[1], 0, 2)).unwrap().0, rat(0, 1));
        assert_eq!(alpha_closed(&q(3, &[1], 1, 1)).unwrap().0, rat(6, 1));
        // m = 2, t = 9, p = 3: 108 solutions mod 81, alpha = 4/3
        assert_eq!(alpha_closed(&q(3, &[1, 1], 1, 1)).unwrap().0, rat(4, 3));
        assert_eq!(
            alpha_bruteforce(&q(3, &[1, 1], 1, 1), 4).unwrap().0,
            rat(4, 3)
        );
    }

    #[test]
    fn closed_equals_bruteforce_small_grid() {
        let mut cache = ConvCache::new();
        for p in [3u64, 5] {
            for diag in [vec![1i64], vec![1, 1], vec![-1, 1, 1], vec![1, 1, 1]] {
                for k in [0u32, 1] {
                    for u in [1i64, -1, 2] {
                        let query = q(p, &diag, k, u);
                        let e = 2 * k + 2;
                        let closed = alpha_closed(&query).unwrap();
                        let brute =
                            alpha_bruteforce_with(&query, e, DEFAULT_MEM_BUDGET, &mut cache)
                                .unwrap();
                        assert_eq!(
                            closed.0, brute.0,
                            "p={p} diag={diag:?} k={k} u={u}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn unit_invariance_mod_squares() {
        // scaling a diagonal entry by a square does not change the density
        let mut cache = ConvCache::new();
        let a = q(5, &[1, 1, 1], 0, 1);
        let b = q(5, &[4, 1, 1], 0, 1); // 4 = 2^2
        let va = alpha_bruteforce_with(&a, 2, DEFAULT_MEM_BUDGET, &mut cache).unwrap();
        let vb = alpha_bruteforce_with(&b, 2, DEFAULT_MEM_BUDGET, &mut cache).unwrap();
        assert_eq!(va.0, vb.0);
        assert_eq!(alpha_closed(&a).unwrap().0, alpha_closed(&b).unwrap().0);
    }

    #[test]
    fn precision_budget() {
        let query = q(7, &[1, 1, 1], 1, 1);
        let mut cache = ConvCache::new();
        let err = alpha_bruteforce_with(&query, 5, 1000, &mut cache);
        assert!(matches!(err, Err(Error::PrecisionTooLarge { .. })));
    }

    #[test]
    fn lower_bound_examples() {
        let b = alpha_lower_bound(6, 3).unwrap();
        assert!(!b.vacuous);
        assert_eq!(b.exact_value().unwrap(), rat(7, 8));
        assert!(b.is_satisfied_by(&rat(7, 8)));
        assert!(b.is_satisfied_by(&rat(1, 1)));
        assert!(!b.is_satisfied_by(&rat(6, 8)));

        // odd m: irrational bound, squared comparison
        let b = alpha_lower_bound(5, 3).unwrap();
        assert!(!b.vacuous);
        let approx = b.value_f64();
        for alpha in [rat(1, 2), rat(3, 4), rat(1, 1), rat(2, 1), rat(5, 4)] {
            let exact = b.is_satisfied_by(&alpha);
            let float = alpha.to_f64().unwrap() >= approx;
            assert_eq!(exact, float, "alpha = {alpha}");
        }

        // m = 3, p = 3: q = 3^{-1/2} > 1/2, bound vacuous
        let b = alpha_lower_bound(3, 3).unwrap();
        assert!(b.vacuous);
        assert!(alpha_lower_bound(2, 3).is_err());
    }

    #[test]
    fn local_volume_scaling() {
        // k = 0: equals alpha
        let q0 = q(3, &[1, 1, 1, 1, 1, 1], 0, 1);
        assert_eq!(local_volume(&q0).unwrap(), alpha_closed(&q0).unwrap().0);
        // m = 6, p = 3, k = 1: 3^4 * alpha
        let q1 = q(3, &[1, 1, 1, 1, 1, 1], 1, 1);
        assert_eq!(
            local_volume(&q1).unwrap(),
            rat(81, 1) * alpha_closed(&q1).unwrap().0
        );
    }

    #[test]
    fn local_volume_ratio_approaches_p_to_m_minus_2() {
        // alpha(p^{2k} u, B) converges as k grows (geometric tails), so
        // local_volume(k+1) / local_volume(k) -> p^{m-2}
        let p = 3u64;
        let m = 6usize;
        let vol = |k: u32| {
            local_volume(&q(p, &vec![1i64; m], k, 1)).unwrap()
        };
        let scale = rat(3i64.pow(4), 1);
        for k in [2u32, 3, 4] {
            let ratio = vol(k + 1) / vol(k);
            let rel = (ratio / &scale - BigRational::one()).abs();
            assert!(rel < rat(1, 100), "k={k}: relative gap {rel}");
        }
    }

    #[test]
    fn product_bound_identity() {
        let b = product_lower_bound(6, 12).unwrap();
        assert_eq!(b.nu_power, BigInt::from(12u64.pow(4)));
        let b = product_lower_bound(6, 1).unwrap();
        assert_eq!(b.nu_power, BigInt::one());
        assert!(b.odd_prime_bounds.is_empty());
        // nu = 30: odd primes 3 and 5 only
        let b = product_lower_bound(6, 30).unwrap();
        let ps: Vec<u64> = b.odd_prime_bounds.iter().map(|x| x.p).collect();
        assert_eq!(ps, vec![3, 5]);
    }
}
