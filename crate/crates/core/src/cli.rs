//! Command-line surface: constants tables (figure data), the verification
//! suite, deficit evaluation for user mixtures, zero tables, and regularity
//! probes. Exit code 0 on success, 1 on verification/internal failure, 2 on
//! usage errors.

use std::collections::BTreeSet;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis;
use crate::bessel::{self, Order};
use crate::coefficients::{self, SphereDim};
use crate::error::{Error, Result};
use crate::sharp::{self, CaseTag, ZeroHint, ZeroRole};
use crate::sphere_oracle::{self, CircleFunction};
use crate::stability::{self, HarmonicMixture};

/// Environment variable selecting the worker-pool size.
pub const WORKERS_ENV: &str = "AGMON_WORKERS";

#[derive(Parser)]
#[command(
    name = "agmon",
    about = "Sharp constants and stability of the Agmon-Hormander estimate on the sphere",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate C_d, S_d, cases, maximiser and equality degrees over rho.
    Constants(ConstantsArgs),
    /// Run the cross-verification suites; nonzero exit on any failure.
    Verify(VerifyArgs),
    /// Evaluate the deficit and sandwich bounds for a harmonic mixture.
    Deficit(DeficitArgs),
    /// Tabulate Bessel zeros used by the hint mechanism.
    Zeros(ZerosArgs),
    /// Probe regularity (kinks of C_d, jumps and kinks of S_d).
    Probe(ProbeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Sphere dimension d >= 2.
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// rho values: "start:stop:step" or a comma-separated list.
    #[arg(long)]
    rho: Option<String>,
    /// Designate rho as an exact Bessel zero: "nu:K", "nu+1:K" or "nu+2:K".
    #[arg(long)]
    at_zero: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced grids; the subset finishes in well under a minute.
    #[arg(long)]
    quick: bool,
    /// Seed for the randomized property checks.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Self-test: perturb one coefficient by 1 + 1e-6; the suite must fail.
    #[arg(long, hide = true)]
    perturb: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct DeficitArgs {
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    at_zero: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Mixture as degree=weight pairs, e.g. 0=1 1=0.5.
    #[arg(required = true)]
    mixture: Vec<String>,
}

#[derive(Args)]
struct ZerosArgs {
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Largest abscissa to search.
    #[arg(long, default_value_t = 50.0)]
    x_max: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Zero designator "nu:K" / "nu+1:K" (C kink + S jump) or "nu+2:K"
    /// (S kink).
    #[arg(long)]
    at_zero: Option<String>,
    /// Probe C_d for smoothness at a plain location instead.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("{WORKERS_ENV} must be a positive integer, got {v:?}");
                return 2;
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap uses exit code 2 for usage errors and 0 for --help/--version
            e.exit();
        }
    };
    let outcome = match cli.command {
        Command::Constants(a) => cmd_constants(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Deficit(a) => cmd_deficit(&a),
        Command::Zeros(a) => cmd_zeros(&a),
        Command::Probe(a) => cmd_probe(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Domain(_) => 2,
                _ => 1,
            }
        }
    }
}

fn parse_rho_spec(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::Usage(format!("rho spec {spec:?}: {msg}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| bad(&format!("bad number {p:?}"))))
            .collect::<Result<_>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(start > 0.0) || !(step > 0.0) || stop < start {
            return Err(bad("need start > 0, step > 0, stop >= start"));
        }
        let n = ((stop - start) / step).round() as usize;
        let n = if start + n as f64 * step <= stop + 1e-12 * step { n } else { n - 1 };
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    let values: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad(&format!("bad number {p:?}"))))
        .collect::<Result<_>>()?;
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(bad("rho values must be positive"));
    }
    Ok(values)
}

fn parse_hint(spec: &str) -> Result<ZeroHint> {
    let bad = || Error::Usage(format!("zero designator {spec:?}: expected nu:K, nu+1:K or nu+2:K"));
    let (role_str, idx_str) = spec.rsplit_once(':').ok_or_else(bad)?;
    let role = match role_str {
        "nu" => ZeroRole::Nu,
        "nu+1" => ZeroRole::NuPlusOne,
        "nu+2" => ZeroRole::NuPlusTwo,
        _ => return Err(bad()),
    };
    let index: usize = idx_str.parse().map_err(|_| bad())?;
    if index == 0 {
        return Err(Error::Usage("zero indices are 1-based".into()));
    }
    Ok(ZeroHint { role, index })
}

/// 17 significant digits: lossless binary64 round-trip.
fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_degrees(degrees: &BTreeSet<u32>) -> String {
    degrees
        .iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join("|")
}

fn case_name(case: CaseTag) -> &'static str {
    match case {
        CaseTag::PosProduct => "pos_product",
        CaseTag::NegProduct => "neg_product",
        CaseTag::NuZero => "nu_zero",
        CaseTag::NuPlusOneZero => "nu_plus_one_zero",
    }
}

#[derive(Serialize)]
struct ConstantsRow {
    rho: f64,
    c_d: Option<f64>,
    s_d: Option<f64>,
    case: Option<String>,
    maximisers: Option<BTreeSet<u32>>,
    equality: Option<BTreeSet<u32>>,
    status: String,
}

fn constants_row(dim: SphereDim, rho: f64, hint: Option<ZeroHint>) -> Result<ConstantsRow> {
    let sharp_hint = hint.filter(|h| h.role != ZeroRole::NuPlusTwo);
    let ambiguous = |rho| ConstantsRow {
        rho,
        c_d: None,
        s_d: None,
        case: None,
        maximisers: None,
        equality: None,
        status: "AMBIGUOUS".into(),
    };
    let c = match sharp::sharp_constant(dim, rho, sharp_hint) {
        Ok(c) => c,
        Err(Error::AmbiguousAtZero { .. }) => return Ok(ambiguous(rho)),
        Err(e) => return Err(e),
    };
    let s = match stability::stability_constant(dim, rho, hint) {
        Ok(s) => s,
        Err(Error::AmbiguousAtZero { .. }) | Err(Error::Domain(_)) => return Ok(ambiguous(rho)),
        Err(e) => return Err(e),
    };
    Ok(ConstantsRow {
        rho,
        c_d: Some(c.value),
        s_d: Some(s.value),
        case: Some(case_name(c.case()).into()),
        maximisers: Some(c.argmax_degrees().clone()),
        equality: Some(s.equality_degrees.clone()),
        status: "ok".into(),
    })
}

fn print_constants_rows(rows: &[ConstantsRow], format: Format) {
    match format {
        Format::Csv => {
            println!("rho,c_d,s_d,case,maximisers,equality,status");
            for r in rows {
                println!(
                    "{},{},{},{},{},{},{}",
                    fmt_real(r.rho),
                    r.c_d.map(fmt_real).unwrap_or_default(),
                    r.s_d.map(fmt_real).unwrap_or_default(),
                    r.case.clone().unwrap_or_default(),
                    r.maximisers.as_ref().map(fmt_degrees).unwrap_or_default(),
                    r.equality.as_ref().map(fmt_degrees).unwrap_or_default(),
                    r.status
                );
            }
        }
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(rows).expect("serializable"));
        }
    }
}

fn cmd_constants(args: &ConstantsArgs) -> Result<i32> {
    let dim = SphereDim::new(args.d)?;
    let hint = args.at_zero.as_deref().map(parse_hint).transpose()?;
    let rows = if let Some(h) = hint {
        if args.rho.is_some() {
            return Err(Error::Usage("--rho and --at-zero are mutually exclusive".into()));
        }
        let z = sharp::resolve_hint(dim, h)?;
        vec![constants_row(dim, z, Some(h))?]
    } else {
        let spec = args
            .rho
            .as_deref()
            .ok_or_else(|| Error::Usage("one of --rho or --at-zero is required".into()))?;
        let grid = parse_rho_spec(spec)?;
        use rayon::prelude::*;
        grid.par_iter()
            .map(|&rho| constants_row(dim, rho, None))
            .collect::<Result<Vec<_>>>()?
    };
    print_constants_rows(&rows, args.format);
    Ok(0)
}

fn parse_mixture(tokens: &[String]) -> Result<HarmonicMixture> {
    let mut pairs = Vec::new();
    for t in tokens {
        let (k, w) = t
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("mixture token {t:?}: expected degree=weight")))?;
        let k: u32 = k
            .parse()
            .map_err(|_| Error::Usage(format!("mixture token {t:?}: bad degree {k:?}")))?;
        let w: f64 = w
            .parse()
            .map_err(|_| Error::Usage(format!("mixture token {t:?}: bad weight {w:?}")))?;
        pairs.push((k, w));
    }
    HarmonicMixture::from_pairs(&pairs).map_err(|e| Error::Usage(e.to_string()))
}

fn cmd_deficit(args: &DeficitArgs) -> Result<i32> {
    let dim = SphereDim::new(args.d)?;
    let hint = args.at_zero.as_deref().map(parse_hint).transpose()?;
    let rho = match (args.rho, hint) {
        (Some(rho), None) => rho,
        (None, Some(h)) => sharp::resolve_hint(dim, h)?,
        _ => return Err(Error::Usage("exactly one of --rho or --at-zero is required".into())),
    };
    let f = parse_mixture(&args.mixture)?;
    let report = stability::deficit(&f, dim, rho, hint)?;
    let sharp_hint = hint.filter(|h| h.role != ZeroRole::NuPlusTwo);
    let c = sharp::sharp_constant(dim, rho, sharp_hint)?;
    let s = stability::stability_constant(dim, rho, hint)?;
    let support: BTreeSet<u32> = f.weights().keys().cloned().collect();
    let on_m: BTreeSet<u32> = support.intersection(c.argmax_degrees()).cloned().collect();
    let on_e: BTreeSet<u32> = support.intersection(&s.equality_degrees).cloned().collect();
    match args.format {
        Format::Json => {
            let doc = json!({
                "d": args.d,
                "rho": rho,
                "deficit": report.deficit,
                "distance_sq": report.distance_sq,
                "lower": report.lower,
                "upper": report.upper,
                "support_on_maximisers": on_m,
                "support_on_equality": on_e,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Csv => {
            println!("rho,deficit,distance_sq,lower,upper,support_on_maximisers,support_on_equality");
            println!(
                "{},{},{},{},{},{},{}",
                fmt_real(rho),
                fmt_real(report.deficit),
                fmt_real(report.distance_sq),
                fmt_real(report.lower),
                fmt_real(report.upper),
                fmt_degrees(&on_m),
                fmt_degrees(&on_e)
            );
        }
    }
    Ok(0)
}

fn cmd_zeros(args: &ZerosArgs) -> Result<i32> {
    let dim = SphereDim::new(args.d)?;
    let mut rows = Vec::new();
    for role_k in 0..3u32 {
        let order = dim.order(role_k);
        let table = bessel::zeros_up_to(order, args.x_max)?;
        for (i, &z) in table.zeros().iter().enumerate() {
            let residual = bessel::eval_j(order, z)?.value;
            rows.push((order, i + 1, z, residual));
        }
    }
    match args.format {
        Format::Csv => {
            println!("order,index,zero,residual");
            for (order, index, zero, residual) in rows {
                println!("{order},{index},{},{}", fmt_real(zero), fmt_real(residual));
            }
        }
        Format::Json => {
            let doc: Vec<_> = rows
                .iter()
                .map(|(order, index, zero, residual)| {
                    json!({
                        "order": order.to_string(),
                        "index": index,
                        "zero": zero,
                        "residual": residual,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
    }
    Ok(0)
}

fn cmd_probe(args: &ProbeArgs) -> Result<i32> {
    let dim = SphereDim::new(args.d)?;
    let doc = match (args.at_zero.as_deref(), args.rho) {
        (Some(spec), None) => {
            let hint = parse_hint(spec)?;
            match hint.role {
                ZeroRole::Nu | ZeroRole::NuPlusOne => {
                    let kink = analysis::probe_c_kink(dim, hint)?;
                    let jump = analysis::probe_s_jump(dim, hint)?;
                    json!({ "c_kink": kink, "s_jump": jump })
                }
                ZeroRole::NuPlusTwo => {
                    let kink = analysis::probe_s_kink_at_jnu2(dim, hint)?;
                    json!({ "s_kink": kink })
                }
            }
        }
        (None, Some(rho)) => {
            let probe = analysis::probe_c_at(dim, rho)?;
            json!({ "c_probe": probe })
        }
        _ => return Err(Error::Usage("exactly one of --at-zero or --rho is required".into())),
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("serializable")),
        Format::Csv => {
            println!("probe,location,left_slope,right_slope,measured_gap,classification");
            for (name, p) in doc.as_object().expect("object") {
                if let Some(loc) = p.get("location") {
                    println!(
                        "{},{},{},{},{},{}",
                        name,
                        loc,
                        p.get("left_slope").unwrap_or(&json!(null)),
                        p.get("right_slope").unwrap_or(&json!(null)),
                        p.get("measured_gap").unwrap_or(&json!(null)),
                        p.get("classification").unwrap_or(&json!(null)),
                    );
                }
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    max_residual: f64,
    detail: String,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            pass: true,
            max_residual: 0.0,
            detail: String::new(),
        }
    }

    fn observe(&mut self, residual: f64, tol: f64, context: &dyn Fn() -> String) {
        self.max_residual = self.max_residual.max(residual);
        if residual > tol && self.pass {
            self.pass = false;
            self.detail = format!("residual {residual} > {tol} at {}", context());
        }
    }

    fn fail(&mut self, detail: String) {
        if self.pass {
            self.pass = false;
            self.detail = detail;
        }
    }
}

fn check_bessel_structure(quick: bool) -> Result<Check> {
    let mut c = Check::new("bessel_structure");
    let x_max = if quick { 25.0 } else { 50.0 };
    for d in [2u32, 3] {
        let dim = SphereDim::new(d)?;
        let mut prev = bessel::zeros_up_to(dim.nu(), x_max)?;
        for k in 1..=6u32 {
            let next = bessel::zeros_up_to(dim.order(k), x_max)?;
            if !prev.interlaces(&next) {
                c.fail(format!("interlacing failed between {} and {}", prev.order(), next.order()));
            }
            prev = next;
        }
        for m in 1..=4u32 {
            let report = bessel::check_bourget(dim.nu(), m, x_max, 1e-3)?;
            if !report.pass {
                c.fail(format!("Bourget separation below 1e-3 for gap {m} at d={d}"));
            }
        }
        // sign of (J_alpha J_{alpha+1}) at every tabulated zero of J_{alpha+2}
        for k in 0..3u32 {
            let a = dim.order(k);
            let table = bessel::zeros_up_to(a.offset(2), x_max)?;
            for &z in table.zeros() {
                let ja = bessel::eval_j(a, z)?.value;
                let jb = bessel::eval_j(a.succ(), z)?.value;
                if ja * jb <= 0.0 {
                    c.fail(format!("product sign check failed at zero {z} of {}", a.offset(2)));
                }
                c.max_residual = c.max_residual.max(0.0);
            }
        }
    }
    Ok(c)
}

fn check_oracle_equivalence(quick: bool, perturb: bool) -> Result<Check> {
    let mut c = Check::new("oracle_equivalence");
    let factor = if perturb { 1.0 + 1e-6 } else { 1.0 };
    let k_top = if quick { 3 } else { 6 };
    let rho_step = if quick { 2.5 } else { 0.5 };
    for d in [2u32, 3, 4, 5] {
        let dim = SphereDim::new(d)?;
        let mut rho = 0.5;
        while rho <= 30.0 {
            for k in 0..=k_top {
                let closed = coefficients::lambda_closed(k, dim, rho)?.value * factor;
                let quad = coefficients::lambda_quadrature(k, dim, rho)?.value;
                c.observe((closed - quad).abs(), 1e-10, &|| format!("d={d} k={k} rho={rho}"));
            }
            rho += rho_step;
        }
    }
    Ok(c)
}

fn check_identity_suite(quick: bool, seed: u64) -> Result<Check> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut c = Check::new("identity_suite");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = if quick { 100 } else { 1000 };
    for _ in 0..trials {
        let d = rng.gen_range(2..=7u32);
        let k = rng.gen_range(0..=8u32);
        let rho = 0.2 + 29.8 * rng.gen::<f64>();
        let dim = SphereDim::new(d)?;
        let seq = coefficients::lambda_sequence(dim, rho, k as usize + 3)?;
        let ctx = || format!("d={d} k={k} rho={rho}");
        // consecutive gap = product of neighbouring orders
        let gap1 = coefficients::gap_consecutive(k, dim, rho)?;
        c.observe(((seq[k as usize] - seq[k as usize + 1]) - gap1).abs(), 1e-11, &ctx);
        // two-apart gap = scaled square
        let gap2 = coefficients::gap_two_apart(k, dim, rho)?;
        c.observe(((seq[k as usize] - seq[k as usize + 2]) - gap2).abs(), 1e-11, &ctx);
        // alternative quadratic form agrees with the closed form
        let alt = coefficients::lambda_alternative(k, dim, rho)?.value;
        c.observe((seq[k as usize] - alt).abs(), 1e-11, &ctx);
        // selector combination: sum of three products = rearranged form
        let a = stability::j_frak(dim, rho)?;
        let b = stability::j_frak_sum(dim, rho)?;
        c.observe((a - b).abs(), 1e-11, &ctx);
        // and it telescopes the 0 -> 3 gap
        let seq4 = coefficients::lambda_sequence(dim, rho, 4)?;
        c.observe(((seq4[0] - seq4[3]) - a).abs(), 1e-11, &ctx);
    }
    Ok(c)
}

fn grid(quick: bool, points: usize) -> Vec<f64> {
    let n = if quick { points / 10 } else { points };
    (1..=n).map(|i| 0.05 + 29.95 * i as f64 / n as f64).collect()
}

fn check_sharp_equivalence(quick: bool) -> Result<Check> {
    use rayon::prelude::*;
    let mut c = Check::new("sharp_equivalence");
    for d in 2..=6u32 {
        let dim = SphereDim::new(d)?;
        let results: Vec<Result<Option<String>>> = grid(quick, 600)
            .par_iter()
            .map(|&rho| {
                let direct = match sharp::sharp_constant(dim, rho, None) {
                    Ok(v) => v,
                    Err(Error::AmbiguousAtZero { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let brute = sharp::certified_max(dim, rho)?;
                if (direct.value - brute.value).abs() > 1e-10 {
                    return Ok(Some(format!("value mismatch at d={d} rho={rho}")));
                }
                if direct.argmax_degrees() != &brute.argmax {
                    return Ok(Some(format!("argmax mismatch at d={d} rho={rho}")));
                }
                let chains = sharp::verify_chains(dim, rho, None)?;
                if !chains.pass() {
                    return Ok(Some(format!("chain violation at d={d} rho={rho}")));
                }
                Ok(None)
            })
            .collect();
        for r in results {
            if let Some(msg) = r? {
                c.fail(msg);
            }
        }
        for role in [ZeroRole::Nu, ZeroRole::NuPlusOne] {
            for index in 1..=(if quick { 2 } else { 5 }) {
                let hint = ZeroHint { role, index };
                let z = sharp::resolve_hint(dim, hint)?;
                let direct = sharp::sharp_constant(dim, z, Some(hint))?;
                let brute = sharp::certified_max(dim, z)?;
                if (direct.value - brute.value).abs() > 1e-10
                    || direct.argmax_degrees() != &brute.argmax
                {
                    c.fail(format!("hinted mismatch at d={d} {role:?}:{index}"));
                }
                if !sharp::verify_chains(dim, z, Some(hint))?.pass() {
                    c.fail(format!("hinted chain violation at d={d} {role:?}:{index}"));
                }
            }
        }
    }
    // symmetry breaking is visible on a plain interval of d=2
    let brute = sharp::certified_max(SphereDim::new(2)?, 3.0)?;
    if brute.argmax != BTreeSet::from([1]) {
        c.fail("no symmetry breaking at d=2, rho=3".into());
    }
    Ok(c)
}

fn check_stability_equivalence(quick: bool, seed: u64) -> Result<Check> {
    use rayon::prelude::*;
    let mut c = Check::new("stability_equivalence");
    for d in 2..=6u32 {
        let dim = SphereDim::new(d)?;
        let results: Vec<Result<Option<String>>> = grid(quick, 600)
            .par_iter()
            .map(|&rho| {
                let direct = match stability::stability_constant(dim, rho, None) {
                    Ok(v) => v,
                    Err(Error::AmbiguousAtZero { .. }) | Err(Error::Domain(_)) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let brute = stability::brute_force_stability(dim, rho, None)?;
                if (direct.value - brute.value).abs() > 1e-10 {
                    return Ok(Some(format!("value mismatch at d={d} rho={rho}")));
                }
                if !brute.confirms(&direct.equality_degrees) {
                    return Ok(Some(format!("equality-set mismatch at d={d} rho={rho}")));
                }
                Ok(None)
            })
            .collect();
        for r in results {
            if let Some(msg) = r? {
                c.fail(msg);
            }
        }
    }
    let trials = if quick { 500 } else { 10_000 };
    for &(d, rho) in &[(2u32, 1.0f64), (2, 3.0), (3, 7.3), (4, 11.4), (5, 5.9)] {
        let report = stability::verify_sandwich(SphereDim::new(d)?, rho, trials, seed, None)?;
        if !report.pass() {
            c.fail(format!(
                "sandwich violated at d={d} rho={rho}: {}",
                report.violations[0]
            ));
        }
    }
    let hint = ZeroHint { role: ZeroRole::Nu, index: 1 };
    let dim2 = SphereDim::new(2)?;
    let z = sharp::resolve_hint(dim2, hint)?;
    let report = stability::verify_sandwich(dim2, z, trials, seed.wrapping_add(1), Some(hint))?;
    if !report.pass() {
        c.fail(format!("sandwich violated at hinted zero: {}", report.violations[0]));
    }
    Ok(c)
}

fn check_regularity(quick: bool) -> Result<Check> {
    let mut c = Check::new("regularity");
    let dim2 = SphereDim::new(2)?;
    let spots = [(ZeroRole::Nu, 1), (ZeroRole::NuPlusOne, 1), (ZeroRole::Nu, 2)];
    for &(role, index) in &spots {
        let hint = ZeroHint { role, index };
        let kink = analysis::probe_c_kink(dim2, hint)?;
        if kink.classification != analysis::ProbeClass::Kink {
            c.fail(format!("no kink of C_2 at {role:?}:{index}"));
        }
        c.observe(
            (kink.measured_gap - kink.predicted_gap.unwrap()).abs(),
            1e-5,
            &|| format!("C kink {role:?}:{index}"),
        );
        let jump = analysis::probe_s_jump(dim2, hint)?;
        if jump.classification != analysis::ProbeClass::Jump
            || jump.value_at_zero <= 1e-2
            || jump.left_values[2] >= 1e-3
            || jump.right_values[2] >= 1e-3
        {
            c.fail(format!("jump of S_2 not confirmed at {role:?}:{index}"));
        }
    }
    let hint = ZeroHint { role: ZeroRole::NuPlusTwo, index: 1 };
    let kink = analysis::probe_s_kink_at_jnu2(dim2, hint)?;
    if kink.classification != analysis::ProbeClass::Kink {
        c.fail("no kink of S_2 at the first zero of J_2".into());
    }
    c.observe(
        (kink.measured_gap - kink.predicted_gap.unwrap()).abs(),
        1e-5,
        &|| "S kink at first zero of J_2".into(),
    );
    c.observe((analysis::lambda0_origin_slope(dim2)? - 0.5).abs(), 1e-4, &|| "origin d=2".into());
    let top = if quick { 3 } else { 6 };
    for d in 3..=top {
        let s = analysis::lambda0_origin_slope(SphereDim::new(d)?)?;
        c.observe(s.abs(), 1e-4, &|| format!("origin d={d}"));
    }
    let list = if quick {
        vec![100.0, 200.0]
    } else {
        vec![100.0, 200.0, 400.0, 800.0, 1600.0]
    };
    for k in 0..=3u32 {
        let r = analysis::limit_check(dim2, k, &list)?;
        c.observe(r.sup_scaled_residual, 1.0, &|| format!("limit k={k}"));
    }
    Ok(c)
}

fn check_sphere_oracle(quick: bool, seed: u64) -> Result<Check> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rayon::prelude::*;
    let mut c = Check::new("sphere_oracle");
    let dim2 = sphere_oracle::circle();
    let rhos: &[f64] = if quick { &[0.5, 3.0, 8.0] } else { &[0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0] };
    let k_top = if quick { 4 } else { 8 };
    let results: Vec<Result<Option<String>>> = rhos
        .par_iter()
        .map(|&rho| {
            for k in 0..=k_top {
                let f = CircleFunction::pure_mode(k as i32);
                let got = sphere_oracle::ball_energy(&f, rho)?;
                let want = coefficients::lambda_closed(k, dim2, rho)?.value * std::f64::consts::TAU;
                if (got - want).abs() > 1e-6 * want.max(1.0) {
                    return Ok(Some(format!("energy mismatch at k={k} rho={rho}")));
                }
            }
            Ok(None)
        })
        .collect();
    for r in results {
        if let Some(msg) = r? {
            c.fail(msg);
        }
    }
    let n_grid = if quick { 10 } else { 50 };
    let argmax_results: Vec<Result<Option<String>>> = (1..=n_grid)
        .into_par_iter()
        .map(|i| {
            let rho = 0.4 + 12.0 * i as f64 / n_grid as f64;
            let direct = match sharp::sharp_constant(dim2, rho, None) {
                Ok(v) => v,
                Err(Error::AmbiguousAtZero { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let brute = sphere_oracle::brute_rayleigh_argmax(rho, 10)?;
            if &brute != direct.argmax_degrees() {
                return Ok(Some(format!("Rayleigh argmax mismatch at rho={rho}")));
            }
            Ok(None)
        })
        .collect();
    for r in argmax_results {
        if let Some(msg) = r? {
            c.fail(msg);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = if quick { 20 } else { 100 };
    for _ in 0..trials {
        let k = rng.gen_range(0..=8i32);
        let r = 0.1 + 14.9 * rng.gen::<f64>();
        let phi = std::f64::consts::TAU * rng.gen::<f64>();
        let xi = [r * phi.cos(), r * phi.sin()];
        let got = sphere_oracle::extension_at(&CircleFunction::pure_mode(k), xi);
        let jk = bessel::eval_j(Order::integer(k as u32), r)?.value;
        let expected = std::f64::consts::TAU
            * num_complex::Complex64::i().powi(-k)
            * jk
            * num_complex::Complex64::from_polar(1.0, k as f64 * phi);
        c.observe((got - expected).norm(), 1e-10, &|| format!("pointwise k={k} r={r}"));
    }
    Ok(c)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let checks = vec![
        check_bessel_structure(args.quick)?,
        check_oracle_equivalence(args.quick, args.perturb)?,
        check_identity_suite(args.quick, args.seed)?,
        check_sharp_equivalence(args.quick)?,
        check_stability_equivalence(args.quick, args.seed)?,
        check_regularity(args.quick)?,
        check_sphere_oracle(args.quick, args.seed)?,
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    match args.format {
        Format::Json => {
            let doc = json!({
                "seed": args.seed,
                "quick": args.quick,
                "pass": all_pass,
                "checks": checks,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Csv => {
            println!("check,pass,max_residual,detail");
            for c in &checks {
                println!("{},{},{},{}", c.name, c.pass, fmt_real(c.max_residual), c.detail);
            }
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_spec_forms() {
        assert_eq!(parse_rho_spec("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_rho_spec("3").unwrap(), vec![3.0]);
        assert_eq!(parse_rho_spec("1,2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
        assert!(parse_rho_spec("0:1:0.1").is_err());
        assert!(parse_rho_spec("1:2").is_err());
        assert!(parse_rho_spec("a,b").is_err());
        let grid = parse_rho_spec("0.01:15:0.01").unwrap();
        assert_eq!(grid.len(), 1500);
        assert!((grid[1499] - 15.0).abs() < 1e-9);
    }

    #[test]
    fn hint_designators() {
        assert_eq!(
            parse_hint("nu:1").unwrap(),
            ZeroHint { role: ZeroRole::Nu, index: 1 }
        );
        assert_eq!(
            parse_hint("nu+1:3").unwrap(),
            ZeroHint { role: ZeroRole::NuPlusOne, index: 3 }
        );
        assert_eq!(
            parse_hint("nu+2:2").unwrap(),
            ZeroHint { role: ZeroRole::NuPlusTwo, index: 2 }
        );
        assert!(parse_hint("mu:1").is_err());
        assert!(parse_hint("nu:0").is_err());
        assert!(parse_hint("nu").is_err());
    }

    #[test]
    fn mixture_spec_errors_name_the_token() {
        let err = parse_mixture(&["0=1".into(), "x=2".into()]).unwrap_err();
        assert!(err.to_string().contains("x=2"), "{err}");
    }

    #[test]
    fn real_formatting_round_trips() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 2.404825557695773e0, 1e-15] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn ambiguous_rows_keep_the_run_alive() {
        let dim = SphereDim::new(2).unwrap();
        let z = sharp::resolve_hint(dim, ZeroHint { role: ZeroRole::Nu, index: 1 }).unwrap();
        let row = constants_row(dim, z, None).unwrap();
        assert_eq!(row.status, "AMBIGUOUS");
        assert!(row.c_d.is_none());
        let row = constants_row(dim, 1.0, None).unwrap();
        assert_eq!(row.status, "ok");
        assert!(row.c_d.is_some());
    }
}
