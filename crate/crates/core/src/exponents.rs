//! Closed-form growth-exponent calculators with full derivations.
//!
//! Every report recomputes its intermediate quantities and stores them, so a
//! consumer can re-derive the exponent from the inputs without trusting the
//! arithmetic here.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExponentContext {
    NlUpper,
    NlLower,
    NlGeneralQ,
    SiegelOrbit,
    JacobianSplit,
}

/// An exponent together with the named intermediate values that produce it.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    pub context: ExponentContext,
    pub inputs: Vec<(String, i64)>,
    pub exponent: i64,
    pub derivation: Vec<(String, i64)>,
    pub flags: Vec<String>,
}

fn ck_mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b)
        .ok_or_else(|| Error::ValueTooLarge("exponent arithmetic overflowed i64".into()))
}

fn ck_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b)
        .ok_or_else(|| Error::ValueTooLarge("exponent arithmetic overflowed i64".into()))
}

/// Hypersurface count invariants for degree `d >= 5`:
/// `b2 = d^3 - 4d^2 + 6d - 2`, `h02 = (d-1)(d-2)(d-3)/6`, `m = b2 - 1`,
/// upper exponent `m + 2 h02 - 2`, lower exponent `m - 2`.
///
/// Returns the `(upper, lower)` reports; both carry the whole derivation.
pub fn nl_hypersurface_exponents(d: i64) -> Result<(ExponentReport, ExponentReport)> {
    if d < 5 {
        return Err(Error::BadDegree { d });
    }
    let d2 = ck_mul(d, d)?;
    let d3 = ck_mul(d2, d)?;
    let b2 = ck_add(ck_add(d3, ck_mul(-4, d2)?)?, ck_add(ck_mul(6, d)?, -2)?)?;
    let prod = ck_mul(ck_mul(d - 1, d - 2)?, d - 3)?;
    // three consecutive integers are divisible by 6
    debug_assert_eq!(prod % 6, 0);
    let h02 = prod / 6;
    let m = b2 - 1;
    let upper = ck_add(m, ck_mul(2, h02)?)? - 2;
    let lower = m - 2;

    let derivation = vec![
        ("b2".to_string(), b2),
        ("h02".to_string(), h02),
        ("m".to_string(), m),
        ("upper".to_string(), upper),
        ("lower".to_string(), lower),
    ];
    let inputs = vec![("d".to_string(), d)];
    let upper_report = ExponentReport {
        context: ExponentContext::NlUpper,
        inputs: inputs.clone(),
        exponent: upper,
        derivation: derivation.clone(),
        flags: vec![],
    };
    let lower_report = ExponentReport {
        context: ExponentContext::NlLower,
        inputs,
        exponent: lower,
        derivation,
        flags: vec![],
    };
    Ok((upper_report, lower_report))
}

/// General signature bound `m^2 + min(r^2 + s^2, 2 r s) - 2`.
pub fn nl_general_q_exponent(r: i64, s: i64) -> Result<i64> {
    if r < 0 || s < 0 || r + s < 1 {
        return Err(Error::BadInput("need r, s >= 0 and m = r + s >= 1".into()));
    }
    let m = ck_add(r, s)?;
    let sq = ck_add(ck_mul(r, r)?, ck_mul(s, s)?)?;
    let cross = ck_mul(2, ck_mul(r, s)?)?;
    Ok(ck_add(ck_mul(m, m)?, std::cmp::min(sq, cross))? - 2)
}

pub fn nl_general_q_report(r: i64, s: i64) -> Result<ExponentReport> {
    let exponent = nl_general_q_exponent(r, s)?;
    let m = r + s;
    Ok(ExponentReport {
        context: ExponentContext::NlGeneralQ,
        inputs: vec![("r".to_string(), r), ("s".to_string(), s)],
        exponent,
        derivation: vec![
            ("m".to_string(), m),
            ("m_squared".to_string(), m * m),
            ("r2_plus_s2".to_string(), r * r + s * s),
            ("two_rs".to_string(), 2 * r * s),
        ],
        flags: vec![],
    })
}

/// Orbit point-count bound `min(m + s - 2, m + r - 2, 2 dim X)`.
pub fn siegel_orbit_exponent(r: i64, s: i64, dim_x: i64) -> Result<i64> {
    if r < 0 || s < 0 || dim_x < 0 {
        return Err(Error::BadInput("need r, s, dimX >= 0".into()));
    }
    let m = ck_add(r, s)?;
    Ok([m + s - 2, m + r - 2, 2 * dim_x].into_iter().min().unwrap())
}

pub fn siegel_orbit_report(r: i64, s: i64, dim_x: i64) -> Result<ExponentReport> {
    let exponent = siegel_orbit_exponent(r, s, dim_x)?;
    let m = r + s;
    Ok(ExponentReport {
        context: ExponentContext::SiegelOrbit,
        inputs: vec![
            ("r".to_string(), r),
            ("s".to_string(), s),
            ("dimX".to_string(), dim_x),
        ],
        exponent,
        derivation: vec![
            ("m_plus_s_minus_2".to_string(), m + s - 2),
            ("m_plus_r_minus_2".to_string(), m + r - 2),
            ("two_dimX".to_string(), 2 * dim_x),
        ],
        flags: vec![],
    })
}

/// `dim Sp_g = g(2g+1)` as a derivation helper.
fn dim_sp(g: i64) -> i64 {
    g * (2 * g + 1)
}

/// Split-Jacobian exponent `8 k (g - k)` for `g >= 2`, `1 <= k <= g-1`.
///
/// The derivation also records the symplectic dimension identity
/// `2 (dim Sp_g - dim Sp_k - dim Sp_{g-k}) = 8 k (g-k)` and fails loudly if
/// it does not hold. The report is flagged when `k > g/2`, the range where
/// only the lower-bound statement applies.
pub fn jacobian_split_exponent(g: i64, k: i64) -> Result<ExponentReport> {
    if g < 2 || k < 1 || k > g - 1 {
        return Err(Error::BadRange { g, k });
    }
    let exponent = ck_mul(8, ck_mul(k, g - k)?)?;
    let dim_g = dim_sp(g);
    let dim_k = dim_sp(k);
    let dim_gk = dim_sp(g - k);
    let identity = 2 * (dim_g - dim_k - dim_gk);
    if identity != exponent {
        return Err(Error::InconsistentData(format!(
            "dimension identity broke: 2({dim_g} - {dim_k} - {dim_gk}) != {exponent}"
        )));
    }
    let mut flags = Vec::new();
    if 2 * k > g {
        flags.push("outside_upper_theorem_range".to_string());
    }
    Ok(ExponentReport {
        context: ExponentContext::JacobianSplit,
        inputs: vec![("g".to_string(), g), ("k".to_string(), k)],
        exponent,
        derivation: vec![
            ("dim_sp_g".to_string(), dim_g),
            ("dim_sp_k".to_string(), dim_k),
            ("dim_sp_g_minus_k".to_string(), dim_gk),
            ("dimension_identity".to_string(), identity),
        ],
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypersurface_d5_d6() {
        let (up, lo) = nl_hypersurface_exponents(5).unwrap();
        let get = |r: &ExponentReport, k: &str| {
            r.derivation.iter().find(|(n, _)| n == k).unwrap().1
        };
        assert_eq!(get(&up, "b2"), 53);
        assert_eq!(get(&up, "h02"), 4);
        assert_eq!(get(&up, "m"), 52);
        assert_eq!(up.exponent, 58);
        assert_eq!(lo.exponent, 50);

        let (up, lo) = nl_hypersurface_exponents(6).unwrap();
        assert_eq!(get(&up, "b2"), 106);
        assert_eq!(get(&up, "h02"), 10);
        assert_eq!(get(&up, "m"), 105);
        assert_eq!(up.exponent, 123);
        assert_eq!(lo.exponent, 103);

        assert!(matches!(nl_hypersurface_exponents(4), Err(Error::BadDegree { .. })));
    }

    #[test]
    fn hypersurface_gap_is_2_h02() {
        for d in 5..=40 {
            let (up, lo) = nl_hypersurface_exponents(d).unwrap();
            let h02 = up.derivation.iter().find(|(n, _)| n == "h02").unwrap().1;
            assert_eq!(up.exponent - lo.exponent, 2 * h02);
            // integrality of the h02 formula
            assert_eq!((d - 1) * (d - 2) * (d - 3) % 6, 0);
        }
    }

    #[test]
    fn general_q() {
        assert_eq!(nl_general_q_exponent(1, 1).unwrap(), 4);
        assert_eq!(nl_general_q_exponent(2, 0).unwrap(), 2);
        for (r, s) in [(2, 1), (3, 5), (0, 4)] {
            assert_eq!(
                nl_general_q_exponent(r, s).unwrap(),
                nl_general_q_exponent(s, r).unwrap()
            );
        }
    }

    #[test]
    fn orbit_exponent() {
        assert_eq!(siegel_orbit_exponent(2, 1, 100).unwrap(), 2);
        assert_eq!(siegel_orbit_exponent(2, 1, 0).unwrap(), 0);
        // r = s: the two signature terms tie at m + s - 2
        assert_eq!(siegel_orbit_exponent(3, 3, 50).unwrap(), 7);
        // never exceeds m + min(r,s) - 2
        for r in 0..6i64 {
            for s in 0..6i64 {
                let e = siegel_orbit_exponent(r, s, 1000).unwrap();
                assert!(e <= r + s + r.min(s) - 2);
            }
        }
    }

    #[test]
    fn jacobian_examples_and_identity() {
        assert_eq!(jacobian_split_exponent(2, 1).unwrap().exponent, 8);
        assert_eq!(jacobian_split_exponent(3, 1).unwrap().exponent, 16);
        for g in 2..=10 {
            for k in 1..=g - 1 {
                let rep = jacobian_split_exponent(g, k).unwrap();
                assert_eq!(rep.exponent, 8 * k * (g - k));
                let flagged = rep.flags.iter().any(|f| f == "outside_upper_theorem_range");
                assert_eq!(flagged, 2 * k > g);
            }
        }
        assert!(matches!(jacobian_split_exponent(1, 1), Err(Error::BadRange { .. })));
        assert!(matches!(jacobian_split_exponent(3, 3), Err(Error::BadRange { .. })));
    }
}
