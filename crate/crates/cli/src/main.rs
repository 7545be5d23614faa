//! `isoconvex` — decide polyconvexity / rank-one convexity of conformally
//! invariant planar energies from the command line.
//!
//! Exit codes: 0 consistent with polyconvexity, 1 not rank-one convex,
//! 2 inconclusive, 64 usage error, 65 malformed input (expressions,
//! matrices, registration failures).

mod report;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use isoconvex::criteria::{
    check_separate_convexity, check_volumetric_convexity, run_scalar_criteria, CheckConfig, Verdict,
};
use isoconvex::oracle::{run_oracle, SampleSpec};
use isoconvex::planar::{dist_euclid_sq_so2, distortion_k, qc_hull_dist_sq_so2, svd2, Mat2};
use isoconvex::repr::{scalar_quartet, EnergyRep};
use isoconvex::zoo::{self, Params, ZooEntry};
use isoconvex::{expr, Error};

use report::{overall, ConfigEcho, EnergyDesc, Report};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;

#[derive(Parser)]
#[command(
    name = "isoconvex",
    version,
    about = "Convexity analysis for conformally invariant planar elastic energies",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the analytic criteria, optionally cross-checked by the oracle
    Check(CheckArgs),
    /// Tabulate an energy across all four scalar representations as CSV
    Convert(ConvertArgs),
    /// Distance, hull, and invariant values for one matrix
    Dist(DistArgs),
    /// Run only the rank-one sampling oracle
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReprArg {
    H,
    F,
    Ftilde,
    Z,
    G,
}

impl ReprArg {
    fn as_str(self) -> &'static str {
        match self {
            ReprArg::H => "h",
            ReprArg::F => "f",
            ReprArg::Ftilde => "ftilde",
            ReprArg::Z => "z",
            ReprArg::G => "g",
        }
    }

    fn variables(self) -> &'static [&'static str] {
        match self {
            ReprArg::H => &["t"],
            ReprArg::F => &["theta"],
            ReprArg::Ftilde => &["eta"],
            ReprArg::Z => &["r"],
            ReprArg::G => &["l1", "l2"],
        }
    }
}

#[derive(Args)]
struct EnergyArgs {
    /// Catalog energy name (see README for the list)
    #[arg(long, conflicts_with = "expr")]
    zoo: Option<String>,

    /// Scalar energy as an expression in the representation's variable
    #[arg(long, requires = "repr")]
    expr: Option<String>,

    /// Representation of --expr: which variable the expression uses
    #[arg(long, value_enum)]
    repr: Option<ReprArg>,

    /// Energy parameter, repeatable: --param k=0.25
    #[arg(long = "param", value_name = "KEY=VALUE")]
    param: Vec<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    energy: EnergyArgs,

    /// Ratio grid as min,max,n (t-space; defaults to 1.000001,1000,2048)
    #[arg(long)]
    grid: Option<String>,

    /// Absolute slack for the >= 0 criteria
    #[arg(long = "tol-abs")]
    tol_abs: Option<f64>,

    /// Also run the sampling oracle with this many points
    #[arg(long, value_name = "N")]
    oracle: Option<usize>,

    /// Oracle seed
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Emit the JSON report (default)
    #[arg(long)]
    json: bool,

    /// Emit a human-readable summary instead of JSON
    #[arg(long, conflicts_with = "json")]
    text: bool,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    energy: EnergyArgs,

    /// Number of grid rows
    #[arg(long, default_value_t = 33)]
    points: usize,

    /// Ratio grid as min,max,n (n is ignored in favor of --points)
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args)]
struct DistArgs {
    /// Matrix entries a11,a12,a21,a22
    #[arg(long)]
    matrix: String,

    /// Quantity: dist | hull | k | invariants
    #[arg(long, value_enum)]
    what: WhatArg,

    /// Emit JSON instead of plain values
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhatArg {
    Dist,
    Hull,
    #[value(alias = "K")]
    K,
    Invariants,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    energy: EnergyArgs,

    /// Number of sample points
    #[arg(long, default_value_t = 10_000)]
    samples: usize,

    /// Sampling seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EX_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EX_DATAERR,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownEnergy { .. }
            | Error::UnknownParam { .. }
            | Error::ParamOutOfRange { .. }
            | Error::InvalidConfig { .. } => EX_USAGE,
            _ => EX_DATAERR,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EX_USAGE)
                }
            };
        }
    };
    let outcome = match cli.cmd {
        Cmd::Check(args) => cmd_check(args),
        Cmd::Convert(args) => cmd_convert(args),
        Cmd::Dist(args) => cmd_dist(args),
        Cmd::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("isoconvex: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_params(raw: &[String]) -> Result<Params, Failure> {
    let mut params = BTreeMap::new();
    for item in raw {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--param {item}: expected KEY=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Failure::usage(format!("--param {item}: \"{value}\" is not a number")))?;
        params.insert(key.trim().to_string(), value);
    }
    Ok(params)
}

/// Replace whole-word occurrences of each parameter name with its value,
/// parenthesized. The grammar itself has no user constants.
fn substitute_params(src: &str, params: &Params) -> String {
    let bytes = src.as_bytes();
    let mut out = String::with_capacity(src.len());
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            let word = &src[start..i];
            match params.get(word) {
                Some(v) => out.push_str(&format!("({v})")),
                None => out.push_str(word),
            }
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

enum EnergySource {
    Zoo(Box<ZooEntry>),
    Expr { rep: EnergyRep, repr: ReprArg },
}

impl EnergySource {
    fn describe(&self, raw_src: Option<&str>, params: &Params) -> EnergyDesc {
        match self {
            EnergySource::Zoo(entry) => EnergyDesc {
                source: "zoo",
                name_or_src: entry.name.clone(),
                params: entry.params.clone(),
            },
            EnergySource::Expr { .. } => EnergyDesc {
                source: "expr",
                name_or_src: raw_src.unwrap_or_default().to_string(),
                params: params.clone(),
            },
        }
    }

    fn representation(&self) -> String {
        match self {
            EnergySource::Zoo(entry) => entry.energy.kind().as_str().to_string(),
            EnergySource::Expr { repr, .. } => repr.as_str().to_string(),
        }
    }
}

fn build_energy(args: &EnergyArgs) -> Result<(EnergySource, Params), Failure> {
    let params = parse_params(&args.param)?;
    match (&args.zoo, &args.expr) {
        (Some(name), None) => {
            let entry = zoo::make(name, &params)?;
            Ok((EnergySource::Zoo(Box::new(entry)), params))
        }
        (None, Some(src)) => {
            let repr = args.repr.expect("clap enforces --repr with --expr");
            for var in repr.variables() {
                if params.contains_key(*var) {
                    return Err(Failure::usage(format!(
                        "--param {var}=... collides with the {} representation variable",
                        repr.as_str()
                    )));
                }
            }
            let substituted = substitute_params(src, &params);
            let ast = expr::parse(&substituted, repr.variables()).map_err(Failure::from)?;
            let rep = match repr {
                ReprArg::H => {
                    let f = expr::to_scalar_fn(&ast, "t")?;
                    EnergyRep::ratio_h(src.clone(), f)?
                }
                ReprArg::F => EnergyRep::log_sq_f(src.clone(), expr::to_scalar_fn(&ast, "theta")?),
                ReprArg::Ftilde => {
                    EnergyRep::strain_ftilde(src.clone(), expr::to_scalar_fn(&ast, "eta")?)
                }
                ReprArg::Z => EnergyRep::distortion_z(src.clone(), expr::to_scalar_fn(&ast, "r")?),
                ReprArg::G => EnergyRep::symmetric_g(src.clone(), expr::to_symmetric_fn(&ast)?),
            };
            Ok((EnergySource::Expr { rep, repr }, params))
        }
        (None, None) => Err(Failure::usage(
            "select an energy with --zoo NAME or --expr SRC --repr R",
        )),
        (Some(_), Some(_)) => unreachable!("clap marks --zoo and --expr as conflicting"),
    }
}

fn build_config(grid: Option<&str>, tol_abs: Option<f64>) -> Result<CheckConfig, Failure> {
    let mut cfg = CheckConfig::default();
    if let Some(spec) = grid {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() != 3 {
            return Err(Failure::usage(format!("--grid {spec}: expected min,max,n")));
        }
        cfg.grid_min = parts[0]
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("--grid: bad min \"{}\"", parts[0])))?;
        cfg.grid_max = parts[1]
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("--grid: bad max \"{}\"", parts[1])))?;
        cfg.grid_n = parts[2]
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("--grid: bad n \"{}\"", parts[2])))?;
    }
    if let Some(t) = tol_abs {
        cfg.tol_abs = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_checks(source: &EnergySource, cfg: &CheckConfig) -> Result<Vec<Verdict>, Failure> {
    let mut checks = Vec::new();
    match source {
        EnergySource::Zoo(entry) => {
            if let Some(target) = entry.criteria_target() {
                checks.extend(run_scalar_criteria(target, cfg)?);
            }
            if let Some(vol) = &entry.volumetric {
                checks.push(check_volumetric_convexity(vol, cfg)?);
            }
        }
        EnergySource::Expr { rep, .. } => {
            // For g-form inputs the separate convexity of g itself comes
            // first; the scalar criteria then apply to the isochoric
            // reduction h(t) = g(sqrt t, 1/sqrt t).
            if let Some(g) = rep.symmetric_g_payload() {
                checks.push(check_separate_convexity(g, cfg)?);
            }
            checks.extend(run_scalar_criteria(rep, cfg)?);
        }
    }
    Ok(checks)
}

fn cmd_check(args: CheckArgs) -> Result<u8, Failure> {
    let (source, raw_params) = build_energy(&args.energy)?;
    let cfg = build_config(args.grid.as_deref(), args.tol_abs)?;
    let checks = run_checks(&source, &cfg)?;

    let (oracle_spec, oracle_report) = match args.oracle {
        Some(n) => {
            let spec = SampleSpec {
                n_points: n,
                seed: args.seed,
                ..SampleSpec::default()
            };
            spec.validate()?;
            let w = match &source {
                EnergySource::Zoo(entry) => entry.energy.as_matrix_fn(),
                EnergySource::Expr { rep, .. } => rep.as_matrix_fn(),
            };
            let report = run_oracle(&*w, &spec);
            (Some(spec), Some(report))
        }
        None => (None, None),
    };

    let verdict = overall(&checks, oracle_report.as_ref());
    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION"),
        energy: source.describe(args.energy.expr.as_deref(), &raw_params),
        representation: source.representation(),
        checks,
        oracle: oracle_report,
        config: ConfigEcho {
            check: cfg,
            oracle: oracle_spec,
        },
        overall: verdict,
    };
    if args.text {
        print!("{}", report::render_text(&report));
    } else {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    }
    Ok(verdict.exit_code() as u8)
}

fn cmd_convert(args: ConvertArgs) -> Result<u8, Failure> {
    let (source, _) = build_energy(&args.energy)?;
    if args.points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    let mut cfg = build_config(args.grid.as_deref(), None)?;
    if args.grid.is_none() {
        cfg.grid_min = 1.0; // the scalar forms are all defined at t = 1
    }
    let target = match &source {
        EnergySource::Zoo(entry) => entry
            .criteria_target()
            .ok_or_else(|| {
                Failure::data(format!(
                    "{} has no scalar representation to tabulate",
                    entry.name
                ))
            })?
            .clone(),
        EnergySource::Expr { rep, .. } => rep.clone(),
    };
    let q = scalar_quartet(&target)?;

    let n = args.points;
    let (la, lb) = (cfg.grid_min.ln(), cfg.grid_max.ln());
    println!("t,h,theta,f,eta,ftilde,r,z");
    for i in 0..n {
        let t = if i == 0 {
            cfg.grid_min
        } else if i == n - 1 {
            cfg.grid_max
        } else {
            (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
        };
        let l = t.ln();
        let theta = l * l;
        let eta = 0.5 * theta;
        let r = 0.5 * (t + 1.0 / t);
        println!(
            "{},{},{},{},{},{},{},{}",
            t,
            q.h.eval(t),
            theta,
            q.f.eval(theta),
            eta,
            q.ftilde.eval(eta),
            r,
            q.z.eval(r)
        );
    }
    Ok(0)
}

fn cmd_dist(args: DistArgs) -> Result<u8, Failure> {
    let parts: Vec<&str> = args.matrix.split(',').collect();
    if parts.len() != 4 {
        return Err(Failure::data(format!(
            "--matrix {}: expected a11,a12,a21,a22",
            args.matrix
        )));
    }
    let mut entries = [0.0f64; 4];
    for (slot, raw) in entries.iter_mut().zip(&parts) {
        *slot = raw
            .trim()
            .parse()
            .map_err(|_| Failure::data(format!("--matrix: \"{raw}\" is not a number")))?;
    }
    let f = Mat2::new(entries[0], entries[1], entries[2], entries[3]).map_err(Failure::from)?;

    match args.what {
        WhatArg::Dist => println!("{}", dist_euclid_sq_so2(&f)),
        WhatArg::Hull => println!("{}", qc_hull_dist_sq_so2(&f)),
        WhatArg::K => println!("{}", distortion_k(&f).map_err(Failure::from)?),
        WhatArg::Invariants => {
            let sv = svd2(&f).map_err(Failure::from)?;
            if args.json {
                let inv = isoconvex::planar::invariants2(&f).map_err(Failure::from)?;
                let obj = serde_json::json!({
                    "lambda1": sv.lambda1,
                    "lambda2": sv.lambda2,
                    "t": inv.ratio,
                    "theta": inv.theta,
                    "eta": inv.eta,
                    "K": inv.distortion,
                });
                println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            } else {
                println!("lambda1 {}", sv.lambda1);
                println!("lambda2 {}", sv.lambda2);
                println!("t {}", sv.ratio());
                println!("theta {}", sv.theta());
                println!("eta {}", sv.eta());
                println!("K {}", sv.distortion());
            }
        }
    }
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    let (source, _) = build_energy(&args.energy)?;
    let spec = SampleSpec {
        n_points: args.samples,
        seed: args.seed,
        ..SampleSpec::default()
    };
    spec.validate()?;
    let w = match &source {
        EnergySource::Zoo(entry) => entry.energy.as_matrix_fn(),
        EnergySource::Expr { rep, .. } => rep.as_matrix_fn(),
    };
    let report = run_oracle(&*w, &spec);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(match report.status {
        isoconvex::OracleStatus::ConsistentConvex => 0,
        isoconvex::OracleStatus::Violation => 1,
    })
}
