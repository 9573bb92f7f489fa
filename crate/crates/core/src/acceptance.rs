//! Cross-validation suite: every advertised identity and bound, run end to
//! end with pinned tolerances and a fixed seed.
//!
//! Each criterion is an independent function returning a [`CriterionResult`];
//! the suite runner strings them together and the determinism criterion
//! re-runs everything and compares the rendered reports byte for byte.
//! Details never contain wall-clock data, so renders are reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{big_pow, factorize_u64};
use crate::density::{
    alpha_bruteforce_with, alpha_closed, alpha_lower_bound, ConvCache, DensityQuery,
    DEFAULT_MEM_BUDGET,
};
use crate::enumerate::{
    count_series, enumerate_points, naive_grid_points, EnumSpec, Region,
};
use crate::exponents::{jacobian_split_exponent, nl_hypersurface_exponents};
use crate::lattice::QuadLattice;
use crate::siegel::{
    bracket, build_chart, ell_index, in_lie_algebra, in_parabolic, orbit_value,
    random_lie_element, random_on_quadric, random_parabolic_element, tau_ell, tau_ell_invert,
};
use crate::splitting::{random_idempotent, split_lattice, verify_index_identity, SymplecticLattice};

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 20260810;

/// Slope ceiling slack in the empirical exponent criterion.
pub const SLOPE_SLACK: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CriterionResult {
    fn new(id: u32, name: &'static str) -> Self {
        CriterionResult { id, name, passed: true, details: Vec::new() }
    }

    fn fail(&mut self, msg: String) {
        self.passed = false;
        self.details.push(format!("FAIL: {msg}"));
    }

    fn note(&mut self, msg: String) {
        self.details.push(msg);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// Canonical textual rendering; the determinism criterion compares these
    /// byte for byte across runs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("seed: {}\n", self.seed));
        for c in &self.criteria {
            out.push_str(&format!(
                "criterion {:2} {:<28} {}\n",
                c.id,
                c.name,
                if c.passed { "PASS" } else { "FAIL" }
            ));
            for d in &c.details {
                out.push_str(&format!("    {d}\n"));
            }
        }
        out
    }
}

/// The density grid shared by criteria 1 and 2 and the `density-grid`
/// subcommand: p in {3,5,7}, m in {3..6}, k in {0,1}, u in {1,-1,2}, and two
/// diagonals per cell (all +1, and -1 in the first slot).
pub fn density_grid() -> Vec<DensityQuery> {
    let mut grid = Vec::new();
    for p in [3u64, 5, 7] {
        for m in [3usize, 4, 5, 6] {
            for k in [0u32, 1] {
                for u in [1i64, -1, 2] {
                    for first in [1i64, -1] {
                        let mut diag = vec![BigInt::one(); m];
                        diag[0] = BigInt::from(first);
                        grid.push(
                            DensityQuery::new(p, diag, k, BigInt::from(u))
                                .expect("grid query is valid"),
                        );
                    }
                }
            }
        }
    }
    grid
}

/// 1. Closed form vs. counting oracle: exact rational equality at
///    e = 2k+3, and stabilization between e = 2k+2 and e = 2k+3.
pub fn criterion_1_density_oracle() -> CriterionResult {
    let mut res = CriterionResult::new(1, "density oracle equivalence");
    let mut cache = ConvCache::new();
    let mut checked = 0usize;
    for q in density_grid() {
        let e_lo = 2 * q.k() + 2;
        let e_hi = 2 * q.k() + 3;
        let closed = match alpha_closed(&q) {
            Ok(v) => v,
            Err(e) => {
                res.fail(format!("alpha_closed failed on {q:?}: {e}"));
                continue;
            }
        };
        let hi = match alpha_bruteforce_with(&q, e_hi, DEFAULT_MEM_BUDGET, &mut cache) {
            Ok(v) => v,
            Err(e) => {
                res.fail(format!("brute force failed on {q:?}: {e}"));
                continue;
            }
        };
        let lo = alpha_bruteforce_with(&q, e_lo, DEFAULT_MEM_BUDGET, &mut cache)
            .expect("lower precision is cheaper");
        if closed.0 != hi.0 {
            res.fail(format!(
                "closed {} != oracle {} at p={} m={} k={} u={} diag={:?}",
                closed.0,
                hi.0,
                q.p(),
                q.m(),
                q.k(),
                q.u(),
                q.diag()
            ));
        }
        if lo.0 != hi.0 {
            res.fail(format!(
                "no stabilization between e={} and e={} at p={} m={} k={} u={}",
                e_lo,
                e_hi,
                q.p(),
                q.m(),
                q.k(),
                q.u()
            ));
        }
        checked += 1;
    }
    res.note(format!("{checked} grid queries, exact rational equality and stabilization"));
    res
}

/// 2. Corollary lower bound on all grid points with m in {5, 6}; odd m is
///    compared on squared rational forms.
pub fn criterion_2_density_lower_bound() -> CriterionResult {
    let mut res = CriterionResult::new(2, "density lower bound");
    let mut checked = 0usize;
    for q in density_grid() {
        if q.m() != 5 && q.m() != 6 {
            continue;
        }
        let alpha = alpha_closed(&q).expect("grid query").0;
        let bound = alpha_lower_bound(q.m(), q.p()).expect("m >= 5");
        if bound.vacuous {
            res.fail(format!("bound vacuous at m={} p={}", q.m(), q.p()));
            continue;
        }
        if !bound.is_satisfied_by(&alpha) {
            res.fail(format!(
                "alpha = {} violates the bound at p={} m={} k={} u={}",
                alpha,
                q.p(),
                q.m(),
                q.k(),
                q.u()
            ));
        }
        checked += 1;
    }
    res.note(format!("{checked} grid points with m in {{5,6}}, zero violations"));
    res
}

/// 3. `prod_{p | nu} p^{(m-2) e_p} = nu^{m-2}` exactly, for nu up to 10^4
///    and m in {5, 6, 52}.
pub fn criterion_3_exponent_identity() -> CriterionResult {
    let mut res = CriterionResult::new(3, "nu power identity");
    let mut checked = 0usize;
    for m in [5u32, 6, 52] {
        for nu in 1..=10_000u64 {
            let mut prod = BigInt::one();
            for (p, e) in factorize_u64(nu) {
                prod *= big_pow(&BigInt::from(p), (m - 2) * e);
            }
            let direct = big_pow(&BigInt::from(nu), m - 2);
            if prod != direct {
                res.fail(format!("identity failed at nu={nu} m={m}"));
            }
            checked += 1;
        }
    }
    res.note(format!("{checked} (nu, m) pairs, exact integer equality"));
    res
}

/// 4. Chart identities and bracket closure on seeded random elements for
///    (r,s) in {(2,1), (2,2), (3,2), (4,3)}.
pub fn criterion_4_chart_identities(seed: u64) -> CriterionResult {
    let mut res = CriterionResult::new(4, "chart identities + brackets");
    for (r, s) in [(2usize, 1usize), (2, 2), (3, 2), (4, 3)] {
        let chart = match build_chart(r, s) {
            Ok(c) => c,
            Err(e) => {
                res.fail(format!("chart ({r},{s}) failed to build: {e}"));
                continue;
            }
        };
        // S * S^-1 = I and the Q_S block identity are enforced inside
        // build_chart; re-assert the product explicitly.
        let prod = chart.s_mat().mul(chart.s_inv()).expect("square");
        if prod != crate::matrix::QMat::identity(chart.m()) {
            res.fail(format!("S * S^-1 != I for ({r},{s})"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((r as u64) << 8 | s as u64));
        // 125 pairs per predicate per signature: 1000 bracket closures total
        for n in 0..125 {
            let a = random_lie_element(&chart, &mut rng);
            let b = random_lie_element(&chart, &mut rng);
            let ok = in_lie_algebra(&chart, &a).unwrap()
                && in_lie_algebra(&chart, &b).unwrap()
                && in_lie_algebra(&chart, &bracket(&a, &b).unwrap()).unwrap();
            if !ok {
                res.fail(format!("Lie closure failed at ({r},{s}) sample {n}"));
                break;
            }
            let pa = random_parabolic_element(&chart, &mut rng);
            let pb = random_parabolic_element(&chart, &mut rng);
            let ok = in_parabolic(&chart, &pa).unwrap()
                && in_parabolic(&chart, &bracket(&pa, &pb).unwrap()).unwrap();
            if !ok {
                res.fail(format!("parabolic closure failed at ({r},{s}) sample {n}"));
                break;
            }
        }
    }
    res.note("1000 seeded bracket closures across 4 signatures, exact".into());
    res
}

/// 5. tau_ell round-trip on 1000 seeded on-quadric vectors per signature.
pub fn criterion_5_tau_roundtrip(seed: u64) -> CriterionResult {
    let mut res = CriterionResult::new(5, "tau_ell round-trip");
    for (r, s) in [(2usize, 2usize), (3, 2)] {
        let chart = build_chart(r, s).expect("valid signature");
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((r as u64) << 16 | s as u64));
        for n in 0..1000 {
            let c_orb = BigRational::new(
                BigInt::from(rand::Rng::gen_range(&mut rng, -6..=6i64)),
                BigInt::from(rand::Rng::gen_range(&mut rng, 1..=4i64)),
            );
            let w = random_on_quadric(&chart, &c_orb, &mut rng);
            let ell = ell_index(&chart, &w).unwrap().expect("generator defines ell");
            debug_assert_eq!(orbit_value(&chart, &w).unwrap(), c_orb);
            let y = tau_ell(&chart, &w, ell).unwrap();
            match tau_ell_invert(&chart, &y, ell, &c_orb) {
                Ok(back) if back == w => {}
                other => {
                    res.fail(format!(
                        "round-trip failed at ({r},{s}) sample {n}: {other:?}"
                    ));
                    break;
                }
            }
        }
    }
    res.note("2 signatures x 1000 seeded on-quadric vectors, exact".into());
    res
}

/// 6. Pruned enumeration equals the naive full-grid oracle on every small
///    box configuration.
pub fn criterion_6_enumeration_oracle() -> CriterionResult {
    let mut res = CriterionResult::new(6, "enumeration oracle");
    let mut checked = 0usize;
    for diag in [vec![-1i64, 1, 1], vec![-1, -1, 1, 1]] {
        let lattice = QuadLattice::from_diagonal(&diag).expect("non-degenerate");
        for side in 1..=5i64 {
            for u in -2..=2i64 {
                for nu in [1u64, 2, 3] {
                    let spec = EnumSpec {
                        lattice: lattice.clone(),
                        target_u: BigInt::from(u),
                        nu,
                        region: Region::symmetric_box(
                            diag.len(),
                            BigRational::from_integer(BigInt::from(side)),
                        ),
                    };
                    let fast = enumerate_points(&spec).expect("search");
                    let slow = naive_grid_points(&spec).expect("oracle");
                    if fast != slow {
                        res.fail(format!(
                            "mismatch at diag={diag:?} side={side} u={u} nu={nu}: {} vs {}",
                            fast.len(),
                            slow.len()
                        ));
                    }
                    checked += 1;
                }
            }
        }
    }
    res.note(format!("{checked} box configurations, exact set equality"));
    res
}

/// 7. Empirical exponent ceiling for the Siegel-region count series, with
///    divisibility monotonicity and a box-saturation diagnostic.
pub fn criterion_7_empirical_exponent() -> CriterionResult {
    let mut res = CriterionResult::new(7, "empirical exponent ceiling");
    let lattice = QuadLattice::from_diagonal(&[-1, 1, 1]).expect("non-degenerate");
    // signature (1,2); the chart flips to (r,s) = (2,1), and the bound
    // min(m+s-2, m+r-2) = 2 is symmetric in the flip
    let ceiling = 2.0 + SLOPE_SLACK;
    let nu_list = [1u64, 2, 4, 8, 16];
    let region = |w_sup: i64| Region::Siegel {
        c: BigRational::one(),
        kappa: BigRational::from_integer(BigInt::from(8)),
        w_sup: Some(BigRational::from_integer(BigInt::from(w_sup))),
    };
    match count_series(&lattice, &BigInt::one(), &region(8), &nu_list) {
        Err(e) => res.fail(format!("count series failed: {e}")),
        Ok(series) => {
            for row in &series.rows {
                res.note(format!(
                    "nu={:2} count={} classes={}",
                    row.nu, row.count, row.classes
                ));
            }
            res.note(format!(
                "slope={:.6} residual={:.6} ceiling={ceiling}",
                series.slope, series.residual
            ));
            if !(series.slope <= ceiling) {
                res.fail(format!("slope {} exceeds ceiling {ceiling}", series.slope));
            }
            // the nu list is a divisibility chain, so counts must not drop
            for w in series.rows.windows(2) {
                if w[0].count > w[1].count || w[0].classes > w[1].classes {
                    res.fail(format!(
                        "count not monotone from nu={} to nu={}",
                        w[0].nu, w[1].nu
                    ));
                }
            }
            // box-saturation diagnostic: a larger box must not change the
            // story; the fitted slope should move only marginally
            match count_series(&lattice, &BigInt::one(), &region(12), &nu_list) {
                Err(e) => res.fail(format!("saturation series failed: {e}")),
                Ok(sat) => {
                    res.note(format!(
                        "saturation check at w_sup=12: slope={:.6}",
                        sat.slope
                    ));
                    if !(sat.slope <= ceiling) {
                        res.fail(format!(
                            "slope {} at the larger box exceeds ceiling {ceiling}",
                            sat.slope
                        ));
                    }
                }
            }
        }
    }
    res
}

/// 8. Exponent calculators: pinned values for d in {5,6} and (g,k) in
///    {(2,1), (3,1)}, plus the exhaustive symplectic dimension identity.
pub fn criterion_8_exponent_calculators() -> CriterionResult {
    let mut res = CriterionResult::new(8, "exponent calculators");
    let expect = |res: &mut CriterionResult, d: i64, m: i64, upper: i64, lower: i64| {
        match nl_hypersurface_exponents(d) {
            Err(e) => res.fail(format!("d={d} failed: {e}")),
            Ok((up, lo)) => {
                let got_m = up.derivation.iter().find(|(n, _)| n == "m").unwrap().1;
                if (got_m, up.exponent, lo.exponent) != (m, upper, lower) {
                    res.fail(format!(
                        "d={d}: got (m, upper, lower) = ({got_m}, {}, {}), want ({m}, {upper}, {lower})",
                        up.exponent, lo.exponent
                    ));
                }
            }
        }
    };
    expect(&mut res, 5, 52, 58, 50);
    expect(&mut res, 6, 105, 123, 103);

    for (g, k, want) in [(2i64, 1i64, 8i64), (3, 1, 16)] {
        match jacobian_split_exponent(g, k) {
            Err(e) => res.fail(format!("(g,k)=({g},{k}) failed: {e}")),
            Ok(rep) if rep.exponent != want => {
                res.fail(format!("(g,k)=({g},{k}): got {}, want {want}", rep.exponent))
            }
            Ok(_) => {}
        }
    }
    let mut identity_checked = 0usize;
    for g in 2..=10i64 {
        for k in 1..=g - 1 {
            match jacobian_split_exponent(g, k) {
                Err(e) => res.fail(format!("identity run (g,k)=({g},{k}) failed: {e}")),
                Ok(rep) => {
                    let id = rep
                        .derivation
                        .iter()
                        .find(|(n, _)| n == "dimension_identity")
                        .unwrap()
                        .1;
                    if id != 8 * k * (g - k) {
                        res.fail(format!("dimension identity broke at (g,k)=({g},{k})"));
                    }
                    identity_checked += 1;
                }
            }
        }
    }
    res.note(format!(
        "pinned values for d in {{5,6}}, (g,k) in {{(2,1),(3,1)}}; identity on {identity_checked} (g,k) pairs"
    ));
    res
}

/// 9. Split-lattice index identity on 200 seeded idempotents per genus.
pub fn criterion_9_split_identity(seed: u64) -> CriterionResult {
    let mut res = CriterionResult::new(9, "split-lattice index identity");
    for g in 1..=4usize {
        let lattice = SymplecticLattice::new(g).expect("positive genus");
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (g as u64) << 32);
        let mut nontrivial = 0usize;
        for n in 0..200 {
            let (e, nu) = random_idempotent(&lattice, 12, &mut rng);
            if nu > BigInt::one() {
                nontrivial += 1;
            }
            let data = match split_lattice(&lattice, &e) {
                Ok(d) => d,
                Err(err) => {
                    res.fail(format!("split failed at g={g} sample {n}: {err}"));
                    break;
                }
            };
            match verify_index_identity(&lattice, &data) {
                Ok(true) => {}
                other => {
                    res.fail(format!("index identity failed at g={g} sample {n}: {other:?}"));
                    break;
                }
            }
            let target = data.nu.pow(2 * g as u32);
            if !(target % &data.index).is_zero() {
                res.fail(format!("index does not divide nu^(2g) at g={g} sample {n}"));
                break;
            }
        }
        res.note(format!("g={g}: 200 idempotents, {nontrivial} with nu > 1"));
    }
    res
}

/// Criteria 1 through 9 in order.
pub fn run_criteria(seed: u64) -> AcceptanceReport {
    let criteria = vec![
        criterion_1_density_oracle(),
        criterion_2_density_lower_bound(),
        criterion_3_exponent_identity(),
        criterion_4_chart_identities(seed),
        criterion_5_tau_roundtrip(seed),
        criterion_6_enumeration_oracle(),
        criterion_7_empirical_exponent(),
        criterion_8_exponent_calculators(),
        criterion_9_split_identity(seed),
    ];
    AcceptanceReport { seed, criteria }
}

/// 10. Determinism: two full runs with the same seed render byte-identically.
///     Returns the first report plus the determinism criterion.
pub fn run_full(seed: u64) -> (AcceptanceReport, CriterionResult) {
    let first = run_criteria(seed);
    let second = run_criteria(seed);
    let mut det = CriterionResult::new(10, "determinism");
    if first.render() != second.render() {
        det.fail("two runs with the same seed rendered differently".into());
    } else {
        det.note(format!("two full runs, {} rendered bytes each, identical", first.render().len()));
    }
    (first, det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_expected_size() {
        assert_eq!(density_grid().len(), 3 * 4 * 2 * 3 * 2);
    }

    #[test]
    fn render_is_stable() {
        let rep = AcceptanceReport {
            seed: 1,
            criteria: vec![CriterionResult::new(1, "x")],
        };
        assert_eq!(rep.render(), rep.render());
    }
}
