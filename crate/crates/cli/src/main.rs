//! Command line front end for the supercurv verification kernel.
//!
//! Exit codes: 0 all checks pass, 1 a check fails, 2 usage or
//! configuration error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use supercurv_core::grassmann::AlgebraConfig;
use supercurv_core::superfield::{CurveSpec, OddPoly, Poly};
use supercurv_core::verify::{
    self, expected_for, CheckOptions, VerificationReport, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use supercurv_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "supercurv",
    version,
    about = "Verification kernel for constant curvature supersymmetric surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Sample points per check
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// RNG seed; falls back to SUPERCURV_SEED, then the built-in default
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Jet truncation orders: "auto", "d" or "dplus,dminus"
    #[arg(long, global = true, default_value = "auto")]
    jet_order: String,
    /// Override the primary tolerance of the selected checks
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report to a file instead of stdout
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian curvature of tower members over a curve family
    Curvature {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Tower index, or "all"
        #[arg(long, default_value = "all")]
        k: String,
        #[arg(long, value_enum, default_value_t = Family::Both)]
        curve: Family,
        /// Odd coefficient polynomial "c0,c1,..." for the gsv family
        #[arg(long)]
        xi: Option<String>,
    },
    /// Euler-Lagrange equation and conservation laws, with negative control
    El {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Family::Gsv)]
        curve: Family,
        #[arg(long)]
        xi: Option<String>,
    },
    /// Uniqueness obstruction for higher odd coefficients
    GsvUniqueness {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Holomorphic Grassmannian solutions from random supervector towers
    Prop1 {
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Projector rank index, or "all"
        #[arg(long, default_value = "all")]
        k: String,
    },
    /// Mixed-solution criterion for the first tower member
    Prop2 {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Rank-2 duality via the anti-holomorphic wedge dual
    G2n {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Coefficient polynomial "c0,c1,..." per odd direction; repeatable
        #[arg(long)]
        a: Vec<String>,
    },
    /// Superspace operator algebra on random elements
    Algebra,
    /// Sphere embedding of the body surface in su(N)
    Sphere {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Every check at acceptance-scale parameters
    Suite {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Family {
    Veronese,
    Gsv,
    Both,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Serialize)]
struct RunOutput {
    version: String,
    config: BTreeMap<String, String>,
    checks: Vec<VerificationReport>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Truncation(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let seed = resolve_seed(cli.run.seed)?;
    let samples = cli.run.samples.unwrap_or(DEFAULT_SAMPLES);
    let opts = CheckOptions {
        orders: parse_jet_order(&cli.run.jet_order)?,
        tol: cli.run.tol,
    };
    if let Some(t) = opts.tol {
        if !(t > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {t}")));
        }
    }

    let reports = dispatch(&cli.command, samples, seed, &opts)?;
    let out = RunOutput {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: describe(&cli.command, &cli.run, samples, seed, &opts),
        checks: reports,
    };

    let rendered = match cli.run.format {
        Format::Json => render_json(&out)?,
        Format::Csv => render_csv(&out)?,
        Format::Table => render_table(&out),
    };
    match &cli.run.output {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout();
            stdout
                .write_all(rendered.as_bytes())
                .map_err(|e| Error::Config(format!("stdout: {e}")))?;
        }
    }
    Ok(out.checks.iter().all(|r| r.passed()))
}

fn dispatch(
    cmd: &Command,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    match cmd {
        Command::Curvature { n, k, curve, xi } => {
            let n = *n;
            let ks = parse_index_list(k, n, "k")?;
            for spec in family_specs(*curve, n, xi.as_deref())? {
                for &k in &ks {
                    reports.push(verify::check_constant_curvature(&spec, k, samples, seed, opts)?);
                }
            }
            if n == 2 {
                reports.push(verify::check_cp1_holomorphic(samples.max(2), seed, opts)?);
            }
        }
        Command::El { n, k, curve, xi } => {
            let n = *n;
            if *curve == Family::Both {
                return Err(Error::Config("el takes a single curve family".into()));
            }
            for spec in family_specs(*curve, n, xi.as_deref())? {
                reports.push(verify::check_el(&spec, *k, samples, seed, opts)?);
            }
            if n >= 3 {
                reports.push(verify::check_el_negative(n, samples, seed, opts)?);
            }
        }
        Command::GsvUniqueness { n } => {
            reports.push(verify::check_gsv_uniqueness(*n, samples, seed, opts)?);
        }
        Command::Prop1 { n, k } => {
            let n = *n;
            let ms = parse_index_list(k, n.min(3), "k")?;
            for &m in &ms {
                reports.push(verify::check_prop1(n, m, samples, seed, opts)?);
            }
        }
        Command::Prop2 { n } => {
            reports.push(verify::check_prop2(*n, samples, seed, opts)?);
        }
        Command::G2n { n, a } => {
            let n = *n;
            if n < 3 {
                return Err(Error::Config("g2n needs --n >= 3".into()));
            }
            let coeffs: Vec<Poly> = if a.is_empty() {
                (0..n - 2).map(|_| Poly::constant(Complex64::ONE)).collect()
            } else {
                a.iter().map(|s| parse_poly(s)).collect::<Result<_>>()?
            };
            reports.push(verify::check_g2n(n, &coeffs, samples, seed, opts)?);
        }
        Command::Algebra => {
            reports.push(verify::check_operator_algebra(seed, samples, opts)?);
        }
        Command::Sphere { n } => {
            reports.push(verify::check_sphere_embedding(*n, samples, seed, opts)?);
        }
        Command::Suite { n_max } => {
            reports = verify::suite(*n_max, samples, seed, opts)?;
        }
    }
    Ok(reports)
}

fn family_specs(curve: Family, n: usize, xi: Option<&str>) -> Result<Vec<CurveSpec>> {
    let gsv = || -> Result<CurveSpec> {
        match xi {
            Some(raw) => Ok(CurveSpec::gsv(
                n,
                OddPoly {
                    gen: AlgebraConfig::epsilon(1),
                    poly: parse_poly(raw)?,
                },
            )),
            None => Ok(verify::default_gsv(n)),
        }
    };
    Ok(match curve {
        Family::Veronese => vec![CurveSpec::veronese(n)],
        Family::Gsv => vec![gsv()?],
        Family::Both => vec![CurveSpec::veronese(n), gsv()?],
    })
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("SUPERCURV_SEED") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("SUPERCURV_SEED is not a valid seed: {raw:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn parse_jet_order(raw: &str) -> Result<Option<(usize, usize)>> {
    let raw = raw.trim();
    if raw == "auto" {
        return Ok(None);
    }
    let bad = || Error::Config(format!("invalid --jet-order {raw:?}: expected \"auto\", \"d\" or \"dplus,dminus\""));
    let parts: Vec<&str> = raw.split(',').collect();
    let orders = match parts.as_slice() {
        [d] => {
            let d: usize = d.trim().parse().map_err(|_| bad())?;
            (d, d)
        }
        [dp, dm] => (
            dp.trim().parse().map_err(|_| bad())?,
            dm.trim().parse().map_err(|_| bad())?,
        ),
        _ => return Err(bad()),
    };
    if orders.0 < 2 || orders.1 < 2 {
        return Err(Error::Config(format!(
            "--jet-order {raw:?} too small: each order must be at least 2"
        )));
    }
    Ok(Some(orders))
}

/// "all" or a single index below `count`.
fn parse_index_list(raw: &str, count: usize, flag: &str) -> Result<Vec<usize>> {
    let raw = raw.trim();
    if raw == "all" {
        return Ok((0..count).collect());
    }
    let k: usize = raw
        .parse()
        .map_err(|_| Error::Config(format!("invalid --{flag} {raw:?}: expected an index or \"all\"")))?;
    if k >= count {
        return Err(Error::Config(format!("--{flag} {k} out of range (< {count})")));
    }
    Ok(vec![k])
}

/// Complex literal "a+bi": both parts optional, e.g. "2", "-1.5i", "0.8+0.3i".
fn parse_complex(raw: &str) -> Result<Complex64> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("invalid complex literal {raw:?}: expected \"a+bi\""));
    if s.is_empty() {
        return Err(bad());
    }
    if !s.ends_with('i') {
        return s.parse().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    }
    let mantissa = &s[..s.len() - 1];
    // split at the last +/- that is neither leading nor an exponent sign
    let bytes = mantissa.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(i) => (&mantissa[..i], &mantissa[i..]),
        None => ("0", mantissa),
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| bad())?,
    };
    let re = if re_str.is_empty() {
        0.0
    } else {
        re_str.parse().map_err(|_| bad())?
    };
    Ok(Complex64::new(re, im))
}

/// Coefficient list "c0,c1,..." of complex literals, constant term first.
fn parse_poly(raw: &str) -> Result<Poly> {
    let coeffs: Vec<Complex64> = raw
        .split(',')
        .map(parse_complex)
        .collect::<Result<_>>()?;
    if coeffs.is_empty() {
        return Err(Error::Config("empty coefficient list".into()));
    }
    Ok(Poly(coeffs))
}

fn describe(
    cmd: &Command,
    run: &RunArgs,
    samples: usize,
    seed: u64,
    opts: &CheckOptions,
) -> BTreeMap<String, String> {
    let mut config = BTreeMap::new();
    let name = match cmd {
        Command::Curvature { .. } => "curvature",
        Command::El { .. } => "el",
        Command::GsvUniqueness { .. } => "gsv-uniqueness",
        Command::Prop1 { .. } => "prop1",
        Command::Prop2 { .. } => "prop2",
        Command::G2n { .. } => "g2n",
        Command::Algebra => "algebra",
        Command::Sphere { .. } => "sphere",
        Command::Suite { .. } => "suite",
    };
    config.insert("command".into(), name.into());
    config.insert("samples".into(), samples.to_string());
    config.insert("seed".into(), seed.to_string());
    config.insert("jet_order".into(), run.jet_order.clone());
    if let Some((dp, dm)) = opts.orders {
        config.insert("jet_orders_resolved".into(), format!("{dp},{dm}"));
    }
    if let Some(t) = opts.tol {
        config.insert("tol".into(), format!("{t:e}"));
    }
    config
}

fn render_json(out: &RunOutput) -> Result<String> {
    let mut s = serde_json::to_string_pretty(out)
        .map_err(|e| Error::Config(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Largest positive residual of a sample; negative controls are excluded.
fn residual_max(sample: &supercurv_core::verify::SampleRecord) -> f64 {
    sample
        .residuals
        .iter()
        .filter(|(k, _)| !k.starts_with("neg_"))
        .map(|(_, v)| *v)
        .fold(0.0, f64::max)
}

fn render_csv(out: &RunOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record([
        "check_name",
        "N",
        "k",
        "point_re",
        "point_im",
        "residual_max",
        "K_body_re",
        "K_expected",
        "K_abs_err",
        "soul_max",
        "verdict",
    ])
    .map_err(io_err)?;
    for report in &out.checks {
        let n = report.params.n.map(|v| v.to_string()).unwrap_or_default();
        let k = report.params.k.map(|v| v.to_string()).unwrap_or_default();
        let expected = expected_for(report);
        for sample in &report.samples {
            let (body, exp, err, soul) = match (&sample.curvature, expected) {
                (Some(c), Some(e)) => (
                    format!("{:.16e}", c.body.re),
                    format!("{e:.16e}"),
                    format!("{:.16e}", (c.body.re - e).abs()),
                    format!("{:.16e}", c.soul_max),
                ),
                (Some(c), None) => (
                    format!("{:.16e}", c.body.re),
                    String::new(),
                    String::new(),
                    format!("{:.16e}", c.soul_max),
                ),
                _ => Default::default(),
            };
            w.write_record([
                report.name.as_str(),
                n.as_str(),
                k.as_str(),
                &format!("{:.16e}", sample.point.re),
                &format!("{:.16e}", sample.point.im),
                &format!("{:.16e}", residual_max(sample)),
                &body,
                &exp,
                &err,
                &soul,
                report.verdict.as_str(),
            ])
            .map_err(io_err)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?)
        .map_err(|e| Error::Config(format!("csv: {e}")))
}

fn render_table(out: &RunOutput) -> String {
    let mut s = String::new();
    let mut passed = 0usize;
    for report in &out.checks {
        let p = &report.params;
        let ident = [
            p.n.map(|n| format!("N={n}")),
            p.k.map(|k| format!("k={k}")),
            p.curve.clone().map(|c| format!("curve={c}")),
        ]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join(" ");
        s.push_str(&format!(
            "{:<28} {:<24} tol={:<9.1e} wall={:>6.3}s  {}\n",
            report.name,
            ident,
            report.tolerance,
            report.wall_time_s,
            report.verdict
        ));
        let expected = expected_for(report);
        for sample in &report.samples {
            let mut line = format!(
                "    ({:>7.3},{:>7.3})  res_max={:.3e}",
                sample.point.re, sample.point.im,
                residual_max(sample)
            );
            if let Some(c) = &sample.curvature {
                line.push_str(&format!("  K={:.12}", c.body.re));
                if let Some(e) = expected {
                    line.push_str(&format!("  K_err={:.3e}", (c.body.re - e).abs()));
                }
                line.push_str(&format!("  soul={:.3e}", c.soul_max));
            }
            for (key, v) in sample.residuals.iter().filter(|(k, _)| k.starts_with("neg_")) {
                line.push_str(&format!("  {key}={v:.3e}"));
            }
            line.push('\n');
            s.push_str(&line);
        }
        if report.passed() {
            passed += 1;
        }
    }
    s.push_str(&format!("{passed}/{} checks passed\n", out.checks.len()));
    s
}
