//! Enumeration of rational points with bounded denominator on indefinite
//! quadrics, restricted to boxes or (box-intersected) Siegel regions.
//!
//! A point `v` with `nu v` integral is searched as `z = nu v` over an
//! integer box, Q(z,z) = nu^2 u. The search is depth-first with exact
//! interval pruning and a closed-form bottom layer (the last coordinate is
//! recovered by solving a quadratic, not scanned), which keeps the node
//! count at the size of the (m-1)-dimensional grid.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

use crate::lattice::{diagonalize, primitive_scale, vector_invariants, QuadLattice, RatVector};
use crate::siegel::{build_chart, in_siegel_region, SiegelChart, SiegelRegionParams};
use crate::{Error, Result};

/// Caps keeping the i128 search arithmetic comfortably overflow-free.
const COORD_CAP: i64 = 1 << 20;
const GRAM_CAP: i64 = 1 << 20;

/// Search region. Siegel regions are unbounded, so they carry a mandatory
/// sup-norm box in `w`-coordinates; `w_sup = None` is rejected at run time.
#[derive(Debug, Clone)]
pub enum Region {
    /// Per-coordinate rational bounds `lo_i <= v_i <= hi_i`.
    Box { bounds: Vec<(BigRational, BigRational)> },
    /// Siegel-region inequalities with constants `c`, `kappa`, intersected
    /// with `max_i |w_i| <= w_sup`.
    Siegel {
        c: BigRational,
        kappa: BigRational,
        w_sup: Option<BigRational>,
    },
}

impl Region {
    pub fn symmetric_box(m: usize, bound: BigRational) -> Region {
        Region::Box {
            bounds: (0..m).map(|_| (-bound.clone(), bound.clone())).collect(),
        }
    }
}

/// One enumeration task: lattice, orbit value `u`, denominator `nu`, region.
#[derive(Debug, Clone)]
pub struct EnumSpec {
    pub lattice: QuadLattice,
    pub target_u: BigInt,
    pub nu: u64,
    pub region: Region,
}

/// How a Siegel region sits over the lattice: the form must be diagonal with
/// entries +-1; after an overall sign flip and a coordinate permutation it
/// becomes `-I_r (+) I_s` with `r >= s`, where the standard chart lives.
struct SiegelEmbedding {
    chart: SiegelChart,
    /// arranged coordinate j reads original coordinate `perm[j]`
    perm: Vec<usize>,
    params: SiegelRegionParams,
    w_sup: BigRational,
}

impl SiegelEmbedding {
    fn new(lattice: &QuadLattice, c: &BigRational, kappa: &BigRational, w_sup: &BigRational) -> Result<Self> {
        let m = lattice.rank();
        let mut entries = Vec::with_capacity(m);
        for i in 0..m {
            for j in 0..m {
                if i != j && !lattice.gram()[i][j].is_zero() {
                    return Err(Error::UnsupportedQuery(
                        "Siegel regions require a diagonal +-1 form".into(),
                    ));
                }
            }
            let d = &lattice.gram()[i][i];
            if d.abs() != BigInt::one() {
                return Err(Error::UnsupportedQuery(
                    "Siegel regions require a diagonal +-1 form".into(),
                ));
            }
            entries.push(if d.is_negative() { -1i64 } else { 1 });
        }
        let neg = entries.iter().filter(|&&d| d < 0).count();
        let pos = m - neg;
        // replace Q by -Q if needed so that r >= s
        let sign = if neg >= pos { 1i64 } else { -1 };
        let (r, s) = if neg >= pos { (neg, pos) } else { (pos, neg) };
        let mut perm: Vec<usize> = Vec::with_capacity(m);
        for (i, &d) in entries.iter().enumerate() {
            if d * sign < 0 {
                perm.push(i);
            }
        }
        for (i, &d) in entries.iter().enumerate() {
            if d * sign > 0 {
                perm.push(i);
            }
        }
        let chart = build_chart(r, s)?;
        let params = SiegelRegionParams::new(BigRational::one(), c.clone(), kappa.clone())?;
        Ok(SiegelEmbedding {
            chart,
            perm,
            params,
            w_sup: w_sup.clone(),
        })
    }

    fn w_coords(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        let arranged: Vec<BigRational> = self.perm.iter().map(|&i| v[i].clone()).collect();
        self.chart.to_w(&arranged)
    }

    fn contains(&self, v: &[BigRational]) -> Result<bool> {
        let w = self.w_coords(v)?;
        if w.iter().any(|wi| wi.abs() > self.w_sup) {
            return Ok(false);
        }
        in_siegel_region(&self.chart, &w, &self.params)
    }
}

enum RegionCtx {
    Box,
    Siegel(SiegelEmbedding),
}

struct Search {
    m: usize,
    gram: Vec<Vec<i64>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    target: i128,
    order: Vec<usize>,
}

fn rational_floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

fn rational_ceil(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

fn to_capped_i64(x: &BigInt, cap: i64, what: &str) -> Result<i64> {
    let v = x
        .to_i64()
        .ok_or_else(|| Error::ValueTooLarge(format!("{what} out of range")))?;
    if v.abs() > cap {
        return Err(Error::ValueTooLarge(format!("{what} exceeds cap {cap}")));
    }
    Ok(v)
}

fn prepare(spec: &EnumSpec) -> Result<(Search, RegionCtx)> {
    let m = spec.lattice.rank();
    if spec.nu < 1 {
        return Err(Error::BadInput("nu must be >= 1".into()));
    }
    let nu_big = BigInt::from(spec.nu);
    let nu_rat = BigRational::from_integer(nu_big.clone());

    let (z_bounds, ctx): (Vec<(BigInt, BigInt)>, RegionCtx) = match &spec.region {
        Region::Box { bounds } => {
            if bounds.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: format!("{m}"),
                    got: format!("{}", bounds.len()),
                });
            }
            let zb = bounds
                .iter()
                .map(|(lo, hi)| {
                    (rational_ceil(&(lo * &nu_rat)), rational_floor(&(hi * &nu_rat)))
                })
                .collect();
            (zb, RegionCtx::Box)
        }
        Region::Siegel { c, kappa, w_sup } => {
            let w_sup = w_sup.as_ref().ok_or(Error::RegionUnbounded)?;
            if !w_sup.is_positive() {
                return Err(Error::BadInput("w_sup must be positive".into()));
            }
            let emb = SiegelEmbedding::new(&spec.lattice, c, kappa, w_sup)?;
            // every row of |S^-1| sums to 1, so max|x_i| <= max|w_i| <= w_sup
            let b = w_sup * &nu_rat;
            let zb = (0..m)
                .map(|_| (rational_ceil(&-b.clone()), rational_floor(&b)))
                .collect();
            (zb, RegionCtx::Siegel(emb))
        }
    };

    let mut lo = Vec::with_capacity(m);
    let mut hi = Vec::with_capacity(m);
    for (l, h) in &z_bounds {
        lo.push(to_capped_i64(l, COORD_CAP, "box bound * nu")?);
        hi.push(to_capped_i64(h, COORD_CAP, "box bound * nu")?);
    }

    let mut gram = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = to_capped_i64(&spec.lattice.gram()[i][j], GRAM_CAP, "gram entry")?;
        }
    }

    let target_big = &nu_big * &nu_big * &spec.target_u;
    let target = target_big
        .to_i128()
        .ok_or_else(|| Error::ValueTooLarge("nu^2 u out of range".into()))?;

    // search deepest-pruning coordinates first: descending |d_i| of the
    // congruence diagonalization (for diagonal forms these are the diagonal
    // entries themselves), ties by index
    let (diag, _) = diagonalize(&spec.lattice)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let da = diag[a].abs();
        let db = diag[b].abs();
        db.partial_cmp(&da).unwrap().then(a.cmp(&b))
    });

    Ok((Search { m, gram, lo, hi, target, order }, ctx))
}

fn interval_mul(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    let cands = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    (
        *cands.iter().min().unwrap(),
        *cands.iter().max().unwrap(),
    )
}

fn interval_scale(c: i128, iv: (i128, i128)) -> (i128, i128) {
    if c >= 0 {
        (c * iv.0, c * iv.1)
    } else {
        (c * iv.1, c * iv.0)
    }
}

fn isqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    if n < 2 {
        return Some(n);
    }
    // Newton from above converges in a few steps; settle exactly after.
    let mut x = (n as f64).sqrt() as i128 + 2;
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    if x * x == n {
        Some(x)
    } else {
        None
    }
}

impl Search {
    /// Solutions z of Q(z,z) = target in the box, lexicographically sorted.
    fn run(&self) -> Vec<Vec<i64>> {
        let m = self.m;
        let mut z = vec![0i64; m];
        // linear[i] = 2 * sum over assigned j of gram[i][j] z_j
        let mut linear = vec![0i128; m];
        let mut out = Vec::new();
        self.dfs(0, 0, &mut z, &mut linear, &mut out);
        out.sort();
        out
    }

    fn dfs(
        &self,
        depth: usize,
        partial: i128,
        z: &mut Vec<i64>,
        linear: &mut Vec<i128>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let m = self.m;
        if depth == m - 1 {
            self.solve_last(depth, partial, z, linear, out);
            return;
        }
        let i = self.order[depth];
        if self.lo[i] > self.hi[i] {
            return;
        }
        for zi in self.lo[i]..=self.hi[i] {
            z[i] = zi;
            let contrib =
                self.gram[i][i] as i128 * zi as i128 * zi as i128 + linear[i] * zi as i128;
            let new_partial = partial + contrib;
            if self.prunable(depth + 1, new_partial, z) {
                continue;
            }
            // update linear sums for unassigned coordinates
            for d in depth + 1..m {
                let u = self.order[d];
                linear[u] += 2 * self.gram[u][i] as i128 * zi as i128;
            }
            self.dfs(depth + 1, new_partial, z, linear, out);
            for d in depth + 1..m {
                let u = self.order[d];
                linear[u] -= 2 * self.gram[u][i] as i128 * zi as i128;
            }
        }
    }

    /// Exact interval bound on the value contribution of the unassigned
    /// coordinates; prune when the needed residue falls outside.
    fn prunable(&self, depth: usize, partial: i128, z: &[i64]) -> bool {
        let m = self.m;
        let needed = self.target - partial;
        let mut min = 0i128;
        let mut max = 0i128;
        for d in depth..m {
            let i = self.order[d];
            let iv = (self.lo[i] as i128, self.hi[i] as i128);
            // a_ii z_i^2
            let sq_min = if self.lo[i] <= 0 && 0 <= self.hi[i] {
                0i128
            } else {
                std::cmp::min(iv.0 * iv.0, iv.1 * iv.1)
            };
            let sq_max = std::cmp::max(iv.0 * iv.0, iv.1 * iv.1);
            let (a, b) = interval_scale(self.gram[i][i] as i128, (sq_min, sq_max));
            min += a;
            max += b;
            // linear part from assigned coordinates: recompute from z to
            // keep this function independent of the mutable scratch state
            let mut bi = 0i128;
            for dd in 0..depth {
                let j = self.order[dd];
                bi += 2 * self.gram[i][j] as i128 * z[j] as i128;
            }
            let (a, b) = interval_scale(bi, iv);
            min += a;
            max += b;
            // cross terms among unassigned
            for d2 in d + 1..m {
                let j = self.order[d2];
                if self.gram[i][j] == 0 {
                    continue;
                }
                let jv = (self.lo[j] as i128, self.hi[j] as i128);
                let prod = interval_mul(iv, jv);
                let (a, b) = interval_scale(2 * self.gram[i][j] as i128, prod);
                min += a;
                max += b;
            }
        }
        needed < min || needed > max
    }

    /// Bottom layer: alpha z^2 + beta z + gamma = 0 solved in closed form.
    fn solve_last(
        &self,
        depth: usize,
        partial: i128,
        z: &mut Vec<i64>,
        linear: &mut Vec<i128>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let i = self.order[depth];
        let alpha = self.gram[i][i] as i128;
        let beta = linear[i];
        let gamma = partial - self.target;
        let lo = self.lo[i] as i128;
        let hi = self.hi[i] as i128;
        let push = |zi: i128, z: &mut Vec<i64>, out: &mut Vec<Vec<i64>>| {
            if zi < lo || zi > hi {
                return;
            }
            z[i] = zi as i64;
            debug_assert_eq!(self.full_value(z), self.target);
            out.push(z.clone());
        };
        if alpha == 0 {
            if beta == 0 {
                if gamma == 0 {
                    for zi in lo..=hi {
                        push(zi, z, out);
                    }
                }
            } else if gamma % beta == 0 {
                push(-gamma / beta, z, out);
            }
            return;
        }
        let disc = beta * beta - 4 * alpha * gamma;
        if let Some(sq) = isqrt_i128(disc) {
            for root_num in [-beta + sq, -beta - sq] {
                if root_num % (2 * alpha) == 0 {
                    push(root_num / (2 * alpha), z, out);
                }
                if sq == 0 {
                    break;
                }
            }
        }
    }

    fn full_value(&self, z: &[i64]) -> i128 {
        let mut acc = 0i128;
        for i in 0..self.m {
            for j in 0..self.m {
                acc += self.gram[i][j] as i128 * z[i] as i128 * z[j] as i128;
            }
        }
        acc
    }
}

fn accept_region(ctx: &RegionCtx, v: &[BigRational]) -> Result<bool> {
    match ctx {
        RegionCtx::Box => Ok(true),
        RegionCtx::Siegel(emb) => emb.contains(v),
    }
}

/// Exactly the `v` in `(1/nu) Z^m` with `Q(v,v) = u` inside the region.
pub fn enumerate_points(spec: &EnumSpec) -> Result<Vec<RatVector>> {
    let (search, ctx) = prepare(spec)?;
    let nu_rat = BigRational::from_integer(BigInt::from(spec.nu));
    let mut points = Vec::new();
    for z in search.run() {
        let v = RatVector(
            z.iter()
                .map(|&zi| BigRational::from_integer(BigInt::from(zi)) / &nu_rat)
                .collect(),
        );
        if !accept_region(&ctx, v.coords())? {
            continue;
        }
        check_hit(spec, &v)?;
        points.push(v);
    }
    points.sort();
    Ok(points)
}

/// Denominator bookkeeping asserted on every accepted point: the point
/// satisfies the quadric equation exactly, `nu v` is integral, and for a
/// square-free target the square part of `qbar` divides `nu`.
fn check_hit(spec: &EnumSpec, v: &RatVector) -> Result<()> {
    let val = spec.lattice.value(v)?;
    if val != BigRational::from_integer(spec.target_u.clone()) {
        return Err(Error::InconsistentData("enumerated point misses the quadric".into()));
    }
    if !spec.target_u.is_zero() {
        let inv = vector_invariants(&spec.lattice, v)?;
        let a = primitive_scale(v)?;
        if &a * &a * BigRational::from_integer(spec.target_u.clone())
            != BigRational::from_integer(inv.qbar.clone())
        {
            return Err(Error::InconsistentData("qbar inconsistent with orbit value".into()));
        }
        let (_, nu_sq) = crate::arith::squarefree_decompose(&spec.target_u)?;
        if nu_sq.is_one() {
            // target u square-free: nu(v) must divide the denominator
            let nu_big = BigInt::from(spec.nu);
            if !(&nu_big % &inv.nu).is_zero() {
                return Err(Error::InconsistentData(
                    "vector square-part does not divide the search denominator".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Independent oracle: scan the whole integer grid and filter. Only viable
/// for small boxes; used to cross-check the pruned search.
pub fn naive_grid_points(spec: &EnumSpec) -> Result<Vec<RatVector>> {
    let (search, ctx) = prepare(spec)?;
    let m = search.m;
    let mut points = Vec::new();
    let mut z = vec![0i64; m];
    fn rec(
        search: &Search,
        ctx: &RegionCtx,
        spec: &EnumSpec,
        z: &mut Vec<i64>,
        idx: usize,
        points: &mut Vec<RatVector>,
    ) -> Result<()> {
        if idx == search.m {
            if search.full_value(z) == search.target {
                let nu_rat = BigRational::from_integer(BigInt::from(spec.nu));
                let v = RatVector(
                    z.iter()
                        .map(|&zi| BigRational::from_integer(BigInt::from(zi)) / &nu_rat)
                        .collect(),
                );
                if accept_region(ctx, v.coords())? {
                    points.push(v);
                }
            }
            return Ok(());
        }
        for zi in search.lo[idx]..=search.hi[idx] {
            z[idx] = zi;
            rec(search, ctx, spec, z, idx + 1, points)?;
        }
        Ok(())
    }
    rec(&search, &ctx, spec, &mut z, 0, &mut points)?;
    points.sort();
    Ok(points)
}

/// One representative per nonzero-rational-scaling class: normalize to the
/// primitive integral vector with positive leading sign.
pub fn dedup_by_scaling(points: &[RatVector]) -> Vec<RatVector> {
    let mut set: BTreeSet<RatVector> = BTreeSet::new();
    for v in points {
        if v.is_zero() {
            set.insert(v.clone());
            continue;
        }
        let a = primitive_scale(v).expect("nonzero");
        let mut w = v.scale(&a);
        if let Some(first) = w.0.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                w = w.scale(&-BigRational::one());
            }
        }
        set.insert(w);
    }
    set.into_iter().collect()
}

/// A point-count series over increasing denominators with its log-log fit.
#[derive(Debug, Clone)]
pub struct CountRow {
    pub nu: u64,
    pub count: usize,
    pub classes: usize,
}

#[derive(Debug, Clone)]
pub struct CountSeries {
    pub rows: Vec<CountRow>,
    pub slope: f64,
    pub intercept: f64,
    /// root-mean-square residual of the fit, in log space
    pub residual: f64,
}

/// Ordinary least squares on (x, y) pairs; returns (slope, intercept, rms).
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::InsufficientData);
    }
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::InsufficientData);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rms = (points
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, intercept, rms))
}

/// Run the enumeration for each `nu` and fit `log(count)` against
/// `log(nu)`. Rows with zero counts are kept in the table but dropped from
/// the fit; fewer than three nonzero counts is an error.
pub fn count_series(
    lattice: &QuadLattice,
    target_u: &BigInt,
    region: &Region,
    nu_list: &[u64],
) -> Result<CountSeries> {
    if nu_list.len() < 4 {
        return Err(Error::BadInput("need at least four denominators".into()));
    }
    if nu_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadInput("denominators must be strictly increasing".into()));
    }
    let mut rows = Vec::new();
    for &nu in nu_list {
        let spec = EnumSpec {
            lattice: lattice.clone(),
            target_u: target_u.clone(),
            nu,
            region: region.clone(),
        };
        let pts = enumerate_points(&spec)?;
        let classes = dedup_by_scaling(&pts).len();
        rows.push(CountRow { nu, count: pts.len(), classes });
    }
    let fit_points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.count > 0)
        .map(|r| ((r.nu as f64).ln(), (r.count as f64).ln()))
        .collect();
    if fit_points.len() < 3 {
        return Err(Error::InsufficientData);
    }
    let (slope, intercept, residual) = fit_line(&fit_points)?;
    Ok(CountSeries { rows, slope, intercept, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(diag: &[i64]) -> QuadLattice {
        QuadLattice::from_diagonal(diag).unwrap()
    }

    fn spec_box(diag: &[i64], u: i64, nu: u64, b: i64) -> EnumSpec {
        EnumSpec {
            lattice: lat(diag),
            target_u: BigInt::from(u),
            nu,
            region: Region::symmetric_box(diag.len(), BigRational::from_integer(BigInt::from(b))),
        }
    }

    #[test]
    fn twelve_points_on_the_cone_shell() {
        // Q = diag(-1,1,1), u = 1, nu = 1, sup-norm box 1:
        // (0,+-1,0), (0,0,+-1), (+-1,+-1,+-1)
        let pts = enumerate_points(&spec_box(&[-1, 1, 1], 1, 1, 1)).unwrap();
        assert_eq!(pts.len(), 12);
        for v in &pts {
            assert_eq!(
                lat(&[-1, 1, 1]).value(v).unwrap(),
                BigRational::from_integer(BigInt::one())
            );
        }
    }

    #[test]
    fn denominator_monotonicity() {
        let p1 = enumerate_points(&spec_box(&[-1, 1, 1], 1, 1, 1)).unwrap();
        let p2 = enumerate_points(&spec_box(&[-1, 1, 1], 1, 2, 1)).unwrap();
        let s1: BTreeSet<_> = p1.into_iter().collect();
        let s2: BTreeSet<_> = p2.into_iter().collect();
        assert!(s1.is_subset(&s2));
        assert!(s2.len() > s1.len());
    }

    #[test]
    fn definite_form_cannot_represent_negative() {
        let pts = enumerate_points(&spec_box(&[1, 1, 1], -1, 2, 3)).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn pruned_search_equals_naive_grid() {
        for diag in [vec![-1i64, 1, 1], vec![-1, -1, 1, 1]] {
            for u in -2..=2i64 {
                for nu in [1u64, 2, 3] {
                    for b in [1i64, 2] {
                        let spec = spec_box(&diag, u, nu, b);
                        let fast = enumerate_points(&spec).unwrap();
                        let slow = naive_grid_points(&spec).unwrap();
                        assert_eq!(fast, slow, "diag={diag:?} u={u} nu={nu} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn off_diagonal_forms_match_oracle() {
        // cross terms exercise the interval pruning and the zero-pivot
        // completion move in the search ordering
        let hyp = QuadLattice::new(vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ])
        .unwrap();
        let mixed = QuadLattice::new(vec![
            vec![BigInt::from(2), BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(1), BigInt::from(-1), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(1)],
        ])
        .unwrap();
        for lattice in [hyp, mixed] {
            for u in -3..=3i64 {
                for nu in [1u64, 2] {
                    let spec = EnumSpec {
                        lattice: lattice.clone(),
                        target_u: BigInt::from(u),
                        nu,
                        region: Region::symmetric_box(
                            lattice.rank(),
                            BigRational::from_integer(BigInt::from(3)),
                        ),
                    };
                    let fast = enumerate_points(&spec).unwrap();
                    let slow = naive_grid_points(&spec).unwrap();
                    assert_eq!(fast, slow, "u={u} nu={nu} m={}", lattice.rank());
                }
            }
        }
    }

    #[test]
    fn rank_one_form() {
        let pts = enumerate_points(&spec_box(&[1], 4, 1, 3)).unwrap();
        assert_eq!(
            pts,
            vec![RatVector::from_integers(&[-2]), RatVector::from_integers(&[2])]
        );
    }

    #[test]
    fn asymmetric_box_bounds() {
        // box [0, 2] x [-1, 1] x [0, 1] keeps only the non-negative corner
        // of the nu = 1 shell
        let lattice = lat(&[-1, 1, 1]);
        let spec = EnumSpec {
            lattice,
            target_u: BigInt::one(),
            nu: 1,
            region: Region::Box {
                bounds: vec![
                    (BigRational::zero(), BigRational::from_integer(BigInt::from(2))),
                    (-BigRational::one(), BigRational::one()),
                    (BigRational::zero(), BigRational::one()),
                ],
            },
        };
        let fast = enumerate_points(&spec).unwrap();
        let slow = naive_grid_points(&spec).unwrap();
        assert_eq!(fast, slow);
        for v in &fast {
            assert!(!v.coords()[0].is_negative());
            assert!(!v.coords()[2].is_negative());
        }
        assert!(!fast.is_empty());
    }

    #[test]
    fn siegel_region_requires_box() {
        let spec = EnumSpec {
            lattice: lat(&[-1, 1, 1]),
            target_u: BigInt::one(),
            nu: 1,
            region: Region::Siegel {
                c: BigRational::one(),
                kappa: BigRational::from_integer(BigInt::from(8)),
                w_sup: None,
            },
        };
        assert!(matches!(enumerate_points(&spec), Err(Error::RegionUnbounded)));
    }

    #[test]
    fn siegel_region_enumeration_is_oracle_consistent() {
        let region = Region::Siegel {
            c: BigRational::one(),
            kappa: BigRational::from_integer(BigInt::from(8)),
            w_sup: Some(BigRational::from_integer(BigInt::from(3))),
        };
        for nu in [1u64, 2] {
            let spec = EnumSpec {
                lattice: lat(&[-1, 1, 1]),
                target_u: BigInt::one(),
                nu,
                region: region.clone(),
            };
            let fast = enumerate_points(&spec).unwrap();
            let slow = naive_grid_points(&spec).unwrap();
            assert_eq!(fast, slow);
            assert!(!fast.is_empty());
        }
    }

    #[test]
    fn siegel_embedding_places_w_coordinates() {
        // diag(-1,1,1) has one negative square, so the chart lives on the
        // sign-flipped, reordered form -I_2 (+) I_1. Hand transfer:
        // v = (0,1,0)  -> w = (1,0,1),  sup-norm 1
        // v = (0,0,1)  -> w = (0,1,0),  sup-norm 1
        // v = (1,1,1)  -> w = (0,1,2),  sup-norm 2
        // so w_sup = 1 keeps exactly the four axis points of the 12-point
        // shell, and w_sup = 2 readmits the eight corner points.
        let mk = |w_sup: i64| EnumSpec {
            lattice: lat(&[-1, 1, 1]),
            target_u: BigInt::one(),
            nu: 1,
            region: Region::Siegel {
                c: BigRational::one(),
                kappa: BigRational::from_integer(BigInt::from(10)),
                w_sup: Some(BigRational::from_integer(BigInt::from(w_sup))),
            },
        };
        let tight = enumerate_points(&mk(1)).unwrap();
        assert_eq!(tight.len(), 4);
        for v in &tight {
            assert_eq!(v.coords()[0], BigRational::from_integer(BigInt::from(0)));
        }
        let wide = enumerate_points(&mk(2)).unwrap();
        assert_eq!(wide.len(), 12);
    }

    #[test]
    fn isqrt_exact() {
        for n in [0i128, 1, 2, 3, 4, 99, 100, 1 << 62, (1 << 31) * (1 << 31)] {
            match isqrt_i128(n) {
                Some(r) => assert_eq!(r * r, n),
                None => {
                    let r = (n as f64).sqrt() as i128;
                    for c in r.saturating_sub(2)..=r + 2 {
                        assert_ne!(c * c, n);
                    }
                }
            }
        }
        assert_eq!(isqrt_i128(-4), None);
    }

    #[test]
    fn dedup_examples() {
        let pts = vec![
            RatVector::from_integers(&[0, 1, 0]),
            RatVector::from_integers(&[0, 2, 0]),
            RatVector::from_integers(&[0, -1, 0]),
        ];
        assert_eq!(dedup_by_scaling(&pts).len(), 1);
        let pts = enumerate_points(&spec_box(&[-1, 1, 1], 1, 1, 1)).unwrap();
        let classes = dedup_by_scaling(&pts);
        // sign pairs collapse: 12 points -> 6 classes
        assert_eq!(classes.len(), 6);
    }

    #[test]
    fn synthetic_power_law_slope() {
        // counts exactly nu^3
        let pts: Vec<(f64, f64)> = [1u64, 2, 4, 8, 16]
            .iter()
            .map(|&nu| ((nu as f64).ln(), ((nu * nu * nu) as f64).ln()))
            .collect();
        let (slope, _, resid) = fit_line(&pts).unwrap();
        assert!((slope - 3.0).abs() < 1e-9);
        assert!(resid < 1e-9);
        // constant series
        let pts: Vec<(f64, f64)> = [1u64, 2, 4, 8]
            .iter()
            .map(|&nu| ((nu as f64).ln(), (5f64).ln()))
            .collect();
        let (slope, _, _) = fit_line(&pts).unwrap();
        assert!(slope.abs() < 1e-9);
    }

    #[test]
    fn count_series_runs_and_is_monotone() {
        let region = Region::symmetric_box(3, BigRational::from_integer(BigInt::from(2)));
        let series = count_series(
            &lat(&[-1, 1, 1]),
            &BigInt::one(),
            &region,
            &[1, 2, 4, 8],
        )
        .unwrap();
        assert_eq!(series.rows.len(), 4);
        for w in series.rows.windows(2) {
            // 1 | 2 | 4 | 8: divisibility chain, counts must not decrease
            assert!(w[0].count <= w[1].count);
        }
        assert!(series.slope.is_finite());
    }

    #[test]
    fn count_series_validation() {
        let region = Region::symmetric_box(3, BigRational::from_integer(BigInt::from(2)));
        let l = lat(&[-1, 1, 1]);
        assert!(count_series(&l, &BigInt::one(), &region, &[1, 2, 4]).is_err());
        assert!(count_series(&l, &BigInt::one(), &region, &[1, 2, 2, 4]).is_err());
        // positive definite form, negative u: all counts zero
        let ld = lat(&[1, 1, 1]);
        assert!(matches!(
            count_series(&ld, &BigInt::from(-1), &region, &[1, 2, 3, 4]),
            Err(Error::InsufficientData)
        ));
    }
}
