//! Command-line front end. Every run echoes its resolved configuration into
//! the output header; exact values are rendered as `num/den` strings and
//! floats carry twelve significant digits plus a type tag.
//!
//! Exit codes: 0 success, 1 domain error (with a structured error object on
//! stdout), 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use hodge_asymp::acceptance::{self, run_full, DEFAULT_SEED};
use hodge_asymp::density::{
    alpha_bruteforce_with, alpha_closed, ConvCache, DensityQuery, DEFAULT_MEM_BUDGET,
};
use hodge_asymp::enumerate::{count_series, dedup_by_scaling, enumerate_points, EnumSpec, Region};
use hodge_asymp::exponents::{
    jacobian_split_exponent, nl_general_q_report, nl_hypersurface_exponents, siegel_orbit_report,
    ExponentReport,
};
use hodge_asymp::io::{
    format_rational, load_gram, load_rational_matrix, parse_int_list, parse_rational,
    parse_rational_vector, qmat_to_json, ratvec_to_json,
};
use hodge_asymp::lattice::{vector_invariants, QuadLattice};
use hodge_asymp::siegel::build_chart;
use hodge_asymp::splitting::{
    is_symplectic_compatible, random_idempotent, split_lattice, verify_index_identity,
    SymplecticLattice,
};
use hodge_asymp::{Error, Result};

/// Environment variable overriding the memory budget (bytes).
const MEM_ENV: &str = "HODGE_ASYMP_MEM";

#[derive(Parser)]
#[command(
    name = "hodge-asymp",
    version,
    about = "Exact-arithmetic toolkit for quadratic lattices, Siegel charts, p-adic densities, and growth exponents",
    long_about = None
)]
struct Cli {
    /// Seed for randomized subcommands; defaults to a fixed constant so runs
    /// are reproducible
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Budget (bytes) for the density counting oracle; overrides the
    /// HODGE_ASYMP_MEM environment variable
    #[arg(long, global = true)]
    mem_budget: Option<u64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scalar invariants a, qbar, u, nu of a rational vector on a lattice
    ///
    /// Output: JSON {config, m, signature, a, qbar, u, nu}.
    Invariants {
        /// gram matrix file: {"m": int, "gram": [[int]]}
        #[arg(long)]
        gram: PathBuf,
        /// comma-separated exact rationals, e.g. 2/3,1,1
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },

    /// Chart matrices S, S^-1, Q_S for signature (r, s), r >= s >= 1
    ///
    /// Output: JSON with row-major matrices of "num/den" strings.
    Chart {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },

    /// Rational points v with Q(v,v) = u and nu*v integral, inside a box or
    /// a Siegel region
    ///
    /// Output: JSON lines; first line is the config object, then one JSON
    /// array of "num/den" coordinates per point.
    Enumerate {
        #[arg(long)]
        gram: PathBuf,
        /// orbit value Q(v,v)
        #[arg(long, allow_negative_numbers = true)]
        u: i64,
        /// denominator bound: points lie in (1/nu) Z^m
        #[arg(long)]
        nu: u64,
        /// sup-norm bound (exact rational): bounds v without --siegel,
        /// bounds the w-coordinates with it
        #[arg(long = "box")]
        box_bound: String,
        /// "c,kappa" switches on the Siegel-region inequalities (the form
        /// must be diagonal +-1)
        #[arg(long)]
        siegel: Option<String>,
    },

    /// Counts over a denominator list with a log-log slope fit
    ///
    /// Output: CSV with columns nu,count,classes,log_nu,log_count, then
    /// comment lines with slope, intercept and rms residual.
    CountSeries {
        /// gram matrix file: {"m": int, "gram": [[int]]}
        #[arg(long)]
        gram: PathBuf,
        /// orbit value Q(v,v)
        #[arg(long, allow_negative_numbers = true)]
        u: i64,
        /// sup-norm bound (exact rational): bounds v without --siegel,
        /// bounds the w-coordinates with it
        #[arg(long = "box")]
        box_bound: String,
        /// "c,kappa" switches on the Siegel-region inequalities (the form
        /// must be diagonal +-1)
        #[arg(long)]
        siegel: Option<String>,
        /// strictly increasing, at least four entries, e.g. 1,2,4,8,16
        #[arg(long = "nu-list")]
        nu_list: String,
    },

    /// Local density alpha_p(p^{2k} u, B) of a diagonal form
    ///
    /// Output: JSON {config, value: "num/den", method, stabilized}.
    Density {
        /// odd prime
        #[arg(long)]
        p: u64,
        /// target valuation: t = p^{2k} u
        #[arg(long)]
        k: u32,
        /// square-free part of the target, prime to p
        #[arg(long, allow_negative_numbers = true)]
        u: i64,
        /// comma-separated diagonal entries, all prime to p
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
        /// "closed" or "brute"
        #[arg(long, default_value = "closed")]
        method: String,
        /// counting precision (brute only); default 2k+3
        #[arg(long)]
        e: Option<u32>,
    },

    /// Closed form vs. counting oracle over the whole verification grid
    ///
    /// Output: CSV with columns p,m,k,u,diag,closed,brute,stabilized,equal.
    DensityGrid,

    /// Growth-exponent calculators
    #[command(subcommand)]
    Exponent(ExponentCmd),

    /// Split the standard symplectic lattice along a rational idempotent
    ///
    /// Output: JSON {config, g, rank, nu, index, vprime_basis,
    /// identity_ok, symplectic_compatible}.
    Split {
        #[arg(long)]
        g: usize,
        /// idempotent file: {"e": [["p/q", ...], ...]} of size 2g x 2g
        #[arg(long)]
        e: PathBuf,
    },

    /// Random idempotent splits with the index identity checked
    ///
    /// Output: CSV with columns case,nu,rank,index,identity_ok.
    SplitFuzz {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        cases: usize,
    },

    /// Run the verification suite; exits nonzero if any criterion fails
    Acceptance,
}

#[derive(Subcommand)]
enum ExponentCmd {
    /// Hypersurface invariants b2, h02, m and both exponents from the degree
    Nl {
        #[arg(long)]
        d: i64,
    },
    /// General signature bound m^2 + min(r^2+s^2, 2rs) - 2
    NlQ {
        #[arg(long)]
        r: i64,
        #[arg(long)]
        s: i64,
    },
    /// Orbit point-count bound min(m+s-2, m+r-2, 2 dimX)
    Orbit {
        #[arg(long)]
        r: i64,
        #[arg(long)]
        s: i64,
        #[arg(long)]
        dimx: i64,
    },
    /// Split-Jacobian exponent 8k(g-k) with the dimension identity
    Jacobian {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        k: i64,
    },
}

fn main() -> ExitCode {
    // restore default SIGPIPE behavior so piping into `head` ends quietly
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let mem_budget = cli
        .mem_budget
        .or_else(|| std::env::var(MEM_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_MEM_BUDGET);
    match run(cli.cmd, seed, mem_budget) {
        Ok(code) => code,
        Err(err) => {
            let obj = json!({
                "error": { "kind": err.kind(), "message": err.to_string() }
            });
            println!("{obj}");
            ExitCode::from(1)
        }
    }
}

fn config_json(cmd: &str, seed: u64, mem_budget: u64, args: serde_json::Value) -> serde_json::Value {
    json!({
        "subcommand": cmd,
        "args": args,
        "seed": seed,
        "mem_budget": mem_budget,
    })
}

fn parse_siegel_constants(s: &str) -> Result<(BigRational, BigRational)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::BadInput("--siegel expects \"c,kappa\"".into()));
    }
    Ok((parse_rational(parts[0])?, parse_rational(parts[1])?))
}

fn build_region(
    lattice: &QuadLattice,
    box_bound: &str,
    siegel: &Option<String>,
) -> Result<Region> {
    let bound = parse_rational(box_bound)?;
    if !bound.is_positive() {
        return Err(Error::BadInput("--box must be positive".into()));
    }
    match siegel {
        None => Ok(Region::symmetric_box(lattice.rank(), bound)),
        Some(s) => {
            let (c, kappa) = parse_siegel_constants(s)?;
            Ok(Region::Siegel { c, kappa, w_sup: Some(bound) })
        }
    }
}

fn exponent_report_json(rep: &ExponentReport) -> serde_json::Value {
    json!({
        "context": format!("{:?}", rep.context),
        "inputs": rep.inputs.iter().map(|(k, v)| json!({"name": k, "value": v})).collect::<Vec<_>>(),
        "exponent": rep.exponent,
        "derivation": rep.derivation.iter().map(|(k, v)| json!({"name": k, "value": v})).collect::<Vec<_>>(),
        "flags": rep.flags,
    })
}

fn run(cmd: Cmd, seed: u64, mem_budget: u64) -> Result<ExitCode> {
    match cmd {
        Cmd::Invariants { gram, v } => {
            let lattice = load_gram(&gram)?;
            let vector = parse_rational_vector(&v)?;
            let inv = vector_invariants(&lattice, &vector)?;
            let config = config_json(
                "invariants",
                seed,
                mem_budget,
                json!({"gram": gram.display().to_string(), "v": v}),
            );
            let (r, s) = lattice.signature();
            let out = json!({
                "config": config,
                "m": lattice.rank(),
                "signature": [r, s],
                "a": format_rational(&inv.a),
                "qbar": inv.qbar.to_string(),
                "u": inv.u.to_string(),
                "nu": inv.nu.to_string(),
            });
            println!("{out}");
        }
        Cmd::Chart { r, s } => {
            let chart = build_chart(r, s)?;
            let config = config_json("chart", seed, mem_budget, json!({"r": r, "s": s}));
            let out = json!({
                "config": config,
                "r": r,
                "s": s,
                "S": qmat_to_json(chart.s_mat()),
                "S_inv": qmat_to_json(chart.s_inv()),
                "Q_S": qmat_to_json(chart.q_s()),
            });
            println!("{out}");
        }
        Cmd::Enumerate { gram, u, nu, box_bound, siegel } => {
            let lattice = load_gram(&gram)?;
            let region = build_region(&lattice, &box_bound, &siegel)?;
            let spec = EnumSpec {
                lattice,
                target_u: BigInt::from(u),
                nu,
                region,
            };
            let points = enumerate_points(&spec)?;
            let classes = dedup_by_scaling(&points);
            let config = config_json(
                "enumerate",
                seed,
                mem_budget,
                json!({
                    "gram": gram.display().to_string(),
                    "u": u,
                    "nu": nu,
                    "box": box_bound,
                    "siegel": siegel,
                }),
            );
            println!(
                "{}",
                json!({"config": config, "count": points.len(), "classes": classes.len()})
            );
            for p in &points {
                println!("{}", ratvec_to_json(p));
            }
        }
        Cmd::CountSeries { gram, u, box_bound, siegel, nu_list } => {
            let lattice = load_gram(&gram)?;
            let region = build_region(&lattice, &box_bound, &siegel)?;
            let nus: Vec<u64> = parse_int_list(&nu_list)?
                .into_iter()
                .map(|x| u64::try_from(x).map_err(|_| Error::BadInput("nu must be positive".into())))
                .collect::<Result<_>>()?;
            let series = count_series(&lattice, &BigInt::from(u), &region, &nus)?;
            let config = config_json(
                "count-series",
                seed,
                mem_budget,
                json!({
                    "gram": gram.display().to_string(),
                    "u": u,
                    "box": box_bound,
                    "siegel": siegel,
                    "nu_list": nu_list,
                }),
            );
            println!("# config: {config}");
            println!("nu,count,classes,log_nu,log_count");
            for row in &series.rows {
                let (lnu, lc) = if row.count > 0 {
                    (
                        format!("{:.11e}", (row.nu as f64).ln()),
                        format!("{:.11e}", (row.count as f64).ln()),
                    )
                } else {
                    (format!("{:.11e}", (row.nu as f64).ln()), String::new())
                };
                println!("{},{},{},{},{}", row.nu, row.count, row.classes, lnu, lc);
            }
            // footer floats: 12 significant digits, tagged by name
            println!("# slope_float = {:.11e}", series.slope);
            println!("# intercept_float = {:.11e}", series.intercept);
            println!("# residual_rms_float = {:.11e}", series.residual);
        }
        Cmd::Density { p, k, u, diag, method, e } => {
            let entries: Vec<BigInt> = parse_int_list(&diag)?
                .into_iter()
                .map(BigInt::from)
                .collect();
            let query = DensityQuery::new(p, entries, k, BigInt::from(u))?;
            let config = config_json(
                "density",
                seed,
                mem_budget,
                json!({
                    "p": p, "k": k, "u": u, "diag": diag,
                    "method": method, "e": e,
                }),
            );
            let (value, stabilized, method_used) = match method.as_str() {
                "closed" => (alpha_closed(&query)?.0, true, "closed"),
                "brute" => {
                    let e = e.unwrap_or(2 * k + 3);
                    let mut cache = ConvCache::new();
                    let val = alpha_bruteforce_with(&query, e, mem_budget, &mut cache)?.0;
                    let stabilized = if e >= 2 {
                        alpha_bruteforce_with(&query, e - 1, mem_budget, &mut cache)?.0 == val
                    } else {
                        false
                    };
                    (val, stabilized, "brute")
                }
                other => {
                    return Err(Error::BadInput(format!(
                        "unknown method {other:?}; use closed or brute"
                    )))
                }
            };
            let out = json!({
                "config": config,
                "value": format_rational(&value),
                "method": method_used,
                "stabilized": stabilized,
            });
            println!("{out}");
        }
        Cmd::DensityGrid => {
            let config = config_json("density-grid", seed, mem_budget, json!({}));
            println!("# config: {config}");
            println!("p,m,k,u,diag,closed,brute,stabilized,equal");
            let mut cache = ConvCache::new();
            let mut all_equal = true;
            for q in acceptance::density_grid() {
                let closed = alpha_closed(&q)?.0;
                let e_hi = 2 * q.k() + 3;
                let brute = alpha_bruteforce_with(&q, e_hi, mem_budget, &mut cache)?.0;
                let lo = alpha_bruteforce_with(&q, e_hi - 1, mem_budget, &mut cache)?.0;
                let equal = closed == brute;
                all_equal &= equal;
                let diag_str = q
                    .diag()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    q.p(),
                    q.m(),
                    q.k(),
                    q.u(),
                    diag_str,
                    format_rational(&closed),
                    format_rational(&brute),
                    lo == brute,
                    equal
                );
            }
            println!("# all_equal = {all_equal}");
            if !all_equal {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Exponent(sub) => {
            let (config_args, body) = match sub {
                ExponentCmd::Nl { d } => {
                    let (upper, lower) = nl_hypersurface_exponents(d)?;
                    (
                        json!({"variant": "nl", "d": d}),
                        json!({
                            "upper": exponent_report_json(&upper),
                            "lower": exponent_report_json(&lower),
                        }),
                    )
                }
                ExponentCmd::NlQ { r, s } => {
                    let rep = nl_general_q_report(r, s)?;
                    (
                        json!({"variant": "nl-q", "r": r, "s": s}),
                        exponent_report_json(&rep),
                    )
                }
                ExponentCmd::Orbit { r, s, dimx } => {
                    let rep = siegel_orbit_report(r, s, dimx)?;
                    (
                        json!({"variant": "orbit", "r": r, "s": s, "dimx": dimx}),
                        exponent_report_json(&rep),
                    )
                }
                ExponentCmd::Jacobian { g, k } => {
                    let rep = jacobian_split_exponent(g, k)?;
                    (
                        json!({"variant": "jacobian", "g": g, "k": k}),
                        exponent_report_json(&rep),
                    )
                }
            };
            let config = config_json("exponent", seed, mem_budget, config_args);
            println!("{}", json!({"config": config, "report": body}));
        }
        Cmd::Split { g, e } => {
            let lattice = SymplecticLattice::new(g)?;
            let idem = load_rational_matrix(&e)?;
            let data = split_lattice(&lattice, &idem)?;
            let identity_ok = verify_index_identity(&lattice, &data)?;
            let compatible = is_symplectic_compatible(&lattice, &idem)?;
            let config = config_json(
                "split",
                seed,
                mem_budget,
                json!({"g": g, "e": e.display().to_string()}),
            );
            let out = json!({
                "config": config,
                "g": g,
                "rank": data.rank,
                "nu": data.nu.to_string(),
                "index": data.index.to_string(),
                "vprime_basis": qmat_to_json(&data.vprime_basis),
                "identity_ok": identity_ok,
                "symplectic_compatible": compatible,
            });
            println!("{out}");
        }
        Cmd::SplitFuzz { g, cases } => {
            let lattice = SymplecticLattice::new(g)?;
            let config = config_json(
                "split-fuzz",
                seed,
                mem_budget,
                json!({"g": g, "cases": cases}),
            );
            println!("# config: {config}");
            println!("case,nu,rank,index,identity_ok");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut all_ok = true;
            for case in 0..cases {
                let (e, _) = random_idempotent(&lattice, 12, &mut rng);
                let data = split_lattice(&lattice, &e)?;
                let ok = verify_index_identity(&lattice, &data)?;
                all_ok &= ok;
                println!("{case},{},{},{},{ok}", data.nu, data.rank, data.index);
            }
            println!("# all_ok = {all_ok}");
            if !all_ok {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Acceptance => {
            let config = config_json("acceptance", seed, mem_budget, json!({}));
            println!("# config: {config}");
            let (report, det) = run_full(seed);
            print!("{}", report.render());
            println!(
                "criterion {:2} {:<28} {}",
                det.id,
                det.name,
                if det.passed { "PASS" } else { "FAIL" }
            );
            for d in &det.details {
                println!("    {d}");
            }
            let ok = report.all_passed() && det.passed;
            println!("overall: {}", if ok { "PASS" } else { "FAIL" });
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
