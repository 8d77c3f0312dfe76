//! `mzpoly`: orbit polynomials, Misiurewicz polynomials, p-adic Newton
//! polygons, closed-form verification reports, and irreducibility
//! certificates for the degree-d cyclic-automorphism rational family.
//!
//! Every run is deterministic: the same resolved configuration produces
//! byte-identical output, all numbers are decimal strings or integers, and
//! nothing in any emitted file depends on time or environment.
//!
//! Exit codes: 0 success (and all checks passed), 1 a check or certificate
//! fell short, 2 bad usage or configuration, 3 resource guard tripped,
//! 4 internal identity violation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use misiurewicz::modp::FactorError;
use misiurewicz::padic::principal_polygon;
use misiurewicz::verify::summarize;
use misiurewicz::{
    audit, certify_polynomial, CertifyError, CertifyOptions, IrreducibilityCertificate,
    OrbitError, OrbitTable, PolyError, Prime, SizeGuard, Verdict, VerifyError, VerifyOptions,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "mzpoly",
    version,
    about = "Misiurewicz polynomials, Newton polygons, and irreducibility certificates",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one orbit level: numerator r_n and denominator s_n
    Orbit(OrbitArgs),
    /// Construct the Misiurewicz polynomial G_m with degree and polygon
    Misiurewicz(MisiurewiczArgs),
    /// Run the closed-form verification suite and stream check reports
    Verify(VerifyArgs),
    /// Assemble and self-audit an irreducibility certificate for G_m
    Certify(CertifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Family degree (a prime >= 3 for everything except plain orbits)
    #[arg(long)]
    d: Option<u64>,
    /// Output format
    #[arg(long, value_enum)]
    output: Option<OutputFormat>,
    /// Write the primary output to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the resolved configuration and tool versions to this file
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// JSON file with the same fields as the flags; flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coefficient bit-volume budget for polynomial arithmetic
    #[arg(long)]
    size_cap: Option<u128>,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Orbit level n >= 0
    #[arg(long)]
    n: Option<u64>,
}

#[derive(Args)]
struct MisiurewiczArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Portrait preperiod m >= 1
    #[arg(long)]
    m: Option<u64>,
    /// Construction route
    #[arg(long, value_enum)]
    route: Option<Route>,
    /// Polygon prime (defaults to d)
    #[arg(long)]
    p: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest portrait preperiod to verify (>= 2)
    #[arg(long)]
    max_m: Option<u64>,
    /// Worker threads for check families (report order is unaffected)
    #[arg(long)]
    parallel: Option<usize>,
    /// Corrupt the orbit table first; the suite must then fail
    #[arg(long, hide = true)]
    inject_corruption: bool,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Portrait preperiod m >= 1
    #[arg(long)]
    m: Option<u64>,
    /// Polygon prime (defaults to d)
    #[arg(long)]
    p: Option<u64>,
    /// Comma-separated auxiliary factorization primes (skips the scan)
    #[arg(long, value_delimiter = ',')]
    aux_primes: Option<Vec<u64>>,
    /// p-adic root-counting precision (power of p to refine to)
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Pretty => "pretty",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Route {
    Direct,
    Tau,
    Both,
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Tau => "tau",
            Route::Both => "both",
        }
    }
}

/// Config-file schema: every flag, all optional. Flags win on conflict.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d: Option<u64>,
    n: Option<u64>,
    m: Option<u64>,
    route: Option<Route>,
    max_m: Option<u64>,
    p: Option<u64>,
    aux_primes: Option<Vec<u64>>,
    precision: Option<u32>,
    size_cap: Option<u128>,
    output: Option<OutputFormat>,
    out: Option<PathBuf>,
    parallel: Option<usize>,
}

/// The fully resolved run configuration, as recorded in manifests.
#[derive(Serialize)]
struct ResolvedConfig {
    command: &'static str,
    d: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    route: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aux_primes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    precision: Option<u32>,
    size_cap: String,
    output: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    parallel: Option<usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    tool_version: &'static str,
    library: &'static str,
    library_version: &'static str,
    config: &'a ResolvedConfig,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(context: &str, err: std::io::Error) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: format!("{context}: {err}"),
        }
    }
}

fn poly_exit_code(err: &PolyError) -> u8 {
    match err {
        PolyError::ResourceExhausted { .. } => EXIT_RESOURCE,
        PolyError::NotDivisible => EXIT_INTERNAL,
    }
}

fn orbit_exit_code(err: &OrbitError) -> u8 {
    match err {
        OrbitError::Poly(inner) => poly_exit_code(inner),
        _ => EXIT_USAGE,
    }
}

fn certify_exit_code(err: &CertifyError) -> u8 {
    match err {
        CertifyError::Orbit(inner) => orbit_exit_code(inner),
        // Evidence gathering came up empty; the input was fine but no
        // conclusion is available, which counts as a failed check.
        CertifyError::Factor(FactorError::NoUsablePrime) => EXIT_CHECK_FAILED,
        CertifyError::Factor(_) => EXIT_CHECK_FAILED,
        CertifyError::Newton(_) => EXIT_INTERNAL,
        CertifyError::Prime(_) => EXIT_USAGE,
        CertifyError::BadInput { .. } => EXIT_USAGE,
    }
}

fn verify_exit_code(err: &VerifyError) -> u8 {
    match err {
        VerifyError::Orbit(inner) => orbit_exit_code(inner),
        VerifyError::Newton(_) => EXIT_INTERNAL,
        VerifyError::Certify(inner) => certify_exit_code(inner),
        _ => EXIT_USAGE,
    }
}

impl From<OrbitError> for Failure {
    fn from(err: OrbitError) -> Failure {
        Failure {
            code: orbit_exit_code(&err),
            message: err.to_string(),
        }
    }
}

impl From<CertifyError> for Failure {
    fn from(err: CertifyError) -> Failure {
        Failure {
            code: certify_exit_code(&err),
            message: err.to_string(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(err: VerifyError) -> Failure {
        Failure {
            code: verify_exit_code(&err),
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Orbit(args) => cmd_orbit(args),
        Command::Misiurewicz(args) => cmd_misiurewicz(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Certify(args) => cmd_certify(args),
    }
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|err| Failure::io(&format!("cannot read config {}", path.display()), err))?;
    serde_json::from_str(&text)
        .map_err(|err| Failure::usage(format!("bad config {}: {err}", path.display())))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("{flag} is required (flag or config file)")))
}

fn family_prime(d: u64) -> Result<Prime, Failure> {
    Prime::new(d).map_err(|_| Failure::usage(format!("family degree {d} must be prime")))
}

fn resolve_guard(cap: Option<u128>) -> Result<SizeGuard, Failure> {
    match cap {
        None => Ok(SizeGuard::default()),
        Some(0) => Err(Failure::usage("--size-cap must be positive")),
        Some(cap) => Ok(SizeGuard::new(cap)),
    }
}

/// Write the primary output (stdout unless `--out` was given).
fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|err| Failure::io(&format!("cannot write {}", path.display()), err)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_manifest(path: Option<&Path>, config: &ResolvedConfig) -> Result<(), Failure> {
    let Some(path) = path else {
        return Ok(());
    };
    let manifest = Manifest {
        tool: "mzpoly",
        tool_version: env!("CARGO_PKG_VERSION"),
        library: "misiurewicz",
        library_version: misiurewicz::VERSION,
        config,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(path, text)
        .map_err(|err| Failure::io(&format!("cannot write manifest {}", path.display()), err))
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report serializes")
}

fn json_block<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// orbit

#[derive(Serialize)]
struct OrbitOutput {
    d: u64,
    n: u64,
    deg_r: u64,
    deg_s: u64,
    r: misiurewicz::PolyDump,
    s: misiurewicz::PolyDump,
}

fn cmd_orbit(args: OrbitArgs) -> Result<u8, Failure> {
    let file = load_file_config(args.common.config.as_deref())?;
    let d = require(args.common.d.or(file.d), "--d")?;
    let n = require(args.n.or(file.n), "--n")?;
    let output = args.common.output.or(file.output).unwrap_or(OutputFormat::Json);
    let out_path = args.common.out.or(file.out);
    let cap = args.common.size_cap.or(file.size_cap);
    let guard = resolve_guard(cap)?;
    family_prime(d)?;

    let mut table = OrbitTable::with_guard(d, guard)?;
    table.extend_to(n)?;
    let r = table.r(n);
    let s = table.s(n);
    let payload = OrbitOutput {
        d,
        n,
        deg_r: r.degree().finite().unwrap_or(0) as u64,
        deg_s: s.degree().finite().unwrap_or(0) as u64,
        r: r.dump(),
        s: s.dump(),
    };

    let text = match output {
        OutputFormat::Json => json_block(&payload),
        OutputFormat::Csv => {
            let mut csv = String::from("poly,i,coeff\n");
            for (name, dump) in [("r", &payload.r), ("s", &payload.s)] {
                for (i, coeff) in dump.coeffs.iter().enumerate() {
                    let _ = writeln!(csv, "{name},{i},{coeff}");
                }
            }
            csv
        }
        OutputFormat::Pretty => format!(
            "orbit level {n} for d = {d}\n\
             deg r_{n} = {}, deg s_{n} = {}\n\
             r_{n} = {r}\n\
             s_{n} = {s}\n",
            payload.deg_r, payload.deg_s
        ),
    };
    emit(&text, out_path.as_deref())?;

    let resolved = ResolvedConfig {
        command: "orbit",
        d,
        n: Some(n),
        m: None,
        route: None,
        max_m: None,
        p: None,
        aux_primes: None,
        precision: None,
        size_cap: guard.cap().to_string(),
        output: output.name(),
        parallel: None,
    };
    write_manifest(args.common.manifest.as_deref(), &resolved)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// misiurewicz

#[derive(Serialize)]
struct MisiurewiczOutput {
    d: u64,
    m: u64,
    p: u64,
    route: &'static str,
    degree: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    routes_agree: Option<bool>,
    poly: misiurewicz::PolyDump,
    polygon: misiurewicz::padic::PolygonJson,
}

fn cmd_misiurewicz(args: MisiurewiczArgs) -> Result<u8, Failure> {
    let file = load_file_config(args.common.config.as_deref())?;
    let d = require(args.common.d.or(file.d), "--d")?;
    let m = require(args.m.or(file.m), "--m")?;
    let route = args.route.or(file.route).unwrap_or(Route::Direct);
    let p_value = args.p.or(file.p).unwrap_or(d);
    let output = args.common.output.or(file.output).unwrap_or(OutputFormat::Json);
    let out_path = args.common.out.or(file.out);
    let guard = resolve_guard(args.common.size_cap.or(file.size_cap))?;
    family_prime(d)?;
    let p = Prime::new(p_value)
        .map_err(|_| Failure::usage(format!("polygon prime {p_value} must be prime")))?;
    if m == 0 {
        return Err(Failure::usage("--m must be at least 1"));
    }

    let mut table = OrbitTable::with_guard(d, guard)?;
    let (g, routes_agree) = match route {
        Route::Direct => (table.misiurewicz_direct(m)?, None),
        Route::Tau => (table.misiurewicz_via_tau(m)?, None),
        Route::Both => {
            let direct = table.misiurewicz_direct(m)?;
            let via_tau = table.misiurewicz_via_tau(m)?;
            if direct != via_tau {
                return Err(Failure {
                    code: EXIT_INTERNAL,
                    message: format!("construction routes disagree at d = {d}, m = {m}"),
                });
            }
            (direct, Some(true))
        }
    };
    let polygon = principal_polygon(&g, p).map_err(|err| Failure {
        code: EXIT_INTERNAL,
        message: err.to_string(),
    })?;
    let payload = MisiurewiczOutput {
        d,
        m,
        p: p.get(),
        route: route.name(),
        degree: g.degree().finite().unwrap_or(0) as u64,
        routes_agree,
        poly: g.dump(),
        polygon: polygon.to_json(p),
    };

    let text = match output {
        OutputFormat::Json => json_block(&payload),
        OutputFormat::Csv => polygon.to_csv(),
        OutputFormat::Pretty => {
            let mut s = format!(
                "Misiurewicz polynomial for d = {d}, m = {m} ({} route)\n\
                 degree = {}\n\
                 polygon at p = {} is {}\n",
                route.name(),
                payload.degree,
                p.get(),
                polygon.render()
            );
            if routes_agree == Some(true) {
                s.push_str("direct and tau routes agree exactly\n");
            }
            let _ = writeln!(s, "G_{m} = {g}");
            s
        }
    };
    emit(&text, out_path.as_deref())?;

    let resolved = ResolvedConfig {
        command: "misiurewicz",
        d,
        n: None,
        m: Some(m),
        route: Some(route.name()),
        max_m: None,
        p: Some(p.get()),
        aux_primes: None,
        precision: None,
        size_cap: guard.cap().to_string(),
        output: output.name(),
        parallel: None,
    };
    write_manifest(args.common.manifest.as_deref(), &resolved)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a misiurewicz::VerifySummary,
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let file = load_file_config(args.common.config.as_deref())?;
    let d = require(args.common.d.or(file.d), "--d")?;
    let max_m = require(args.max_m.or(file.max_m), "--max-m")?;
    let parallel = args.parallel.or(file.parallel).unwrap_or(1);
    let output = args.common.output.or(file.output).unwrap_or(OutputFormat::Json);
    let out_path = args.common.out.or(file.out);
    let guard = resolve_guard(args.common.size_cap.or(file.size_cap))?;
    if parallel == 0 {
        return Err(Failure::usage("--parallel must be at least 1"));
    }

    let options = VerifyOptions {
        parallel,
        inject_corruption: args.inject_corruption,
        guard,
        certify: CertifyOptions {
            guard,
            ..CertifyOptions::default()
        },
    };
    let reports = misiurewicz::run_all(d, max_m, &options)?;
    let summary = summarize(&reports);

    let text = match output {
        OutputFormat::Json => {
            let mut s = String::new();
            for report in &reports {
                s.push_str(&json_line(report));
                s.push('\n');
            }
            s.push_str(&json_line(&SummaryLine { summary: &summary }));
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("check_id,d,index,p,passed\n");
            for r in &reports {
                let index = r.index.map(|v| v.to_string()).unwrap_or_default();
                let p = r.p.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(s, "{},{},{},{},{}", r.check_id, r.d, index, p, r.passed);
            }
            let _ = writeln!(s, "total,{},,,{}", summary.total, summary.failed == 0);
            s
        }
        OutputFormat::Pretty => {
            let mut s = String::new();
            for r in &reports {
                let place = match (r.index, r.p) {
                    (Some(i), Some(p)) => format!(" [{i}, p={p}]"),
                    (Some(i), None) => format!(" [{i}]"),
                    (None, Some(p)) => format!(" [p={p}]"),
                    (None, None) => String::new(),
                };
                if r.passed {
                    let _ = writeln!(s, "ok   {} d={}{place}: {}", r.check_id, r.d, r.actual);
                } else {
                    let _ = writeln!(
                        s,
                        "FAIL {} d={}{place}: expected {} but got {}",
                        r.check_id, r.d, r.expected, r.actual
                    );
                }
            }
            let _ = writeln!(
                s,
                "{} checks, {} passed, {} failed",
                summary.total, summary.passed, summary.failed
            );
            s
        }
    };
    emit(&text, out_path.as_deref())?;

    let resolved = ResolvedConfig {
        command: "verify",
        d,
        n: None,
        m: None,
        route: None,
        max_m: Some(max_m),
        p: None,
        aux_primes: None,
        precision: None,
        size_cap: guard.cap().to_string(),
        output: output.name(),
        parallel: Some(parallel),
    };
    write_manifest(args.common.manifest.as_deref(), &resolved)?;
    Ok(if summary.failed == 0 { 0 } else { EXIT_CHECK_FAILED })
}

// ---------------------------------------------------------------------------
// certify

fn cmd_certify(args: CertifyArgs) -> Result<u8, Failure> {
    let file = load_file_config(args.common.config.as_deref())?;
    let d = require(args.common.d.or(file.d), "--d")?;
    let m = require(args.m.or(file.m), "--m")?;
    let p_value = args.p.or(file.p).unwrap_or(d);
    let aux_primes = args.aux_primes.or(file.aux_primes);
    let precision = args
        .precision
        .or(file.precision)
        .unwrap_or(misiurewicz::padic::DEFAULT_ROOT_PRECISION);
    let output = args.common.output.or(file.output).unwrap_or(OutputFormat::Json);
    let out_path = args.common.out.or(file.out);
    let guard = resolve_guard(args.common.size_cap.or(file.size_cap))?;
    family_prime(d)?;
    let p = Prime::new(p_value)
        .map_err(|_| Failure::usage(format!("certificate prime {p_value} must be prime")))?;
    if m == 0 {
        return Err(Failure::usage("--m must be at least 1"));
    }
    if precision == 0 {
        return Err(Failure::usage("--precision must be at least 1"));
    }

    let opts = CertifyOptions {
        aux_primes: aux_primes.clone(),
        precision,
        guard,
        ..CertifyOptions::default()
    };
    let mut table = OrbitTable::with_guard(d, guard)?;
    let g = table.misiurewicz_direct(m)?;
    let analysis = certify_polynomial(&g, p, &opts)?;
    let certificate = IrreducibilityCertificate { d, m, analysis };

    // Every certificate leaving the tool must replay from its own
    // recorded evidence; a mismatch is an internal defect, not a verdict.
    if let Err(err) = audit(&certificate.analysis) {
        return Err(Failure {
            code: EXIT_INTERNAL,
            message: format!("emitted certificate failed self-audit: {err}"),
        });
    }

    let text = match output {
        OutputFormat::Json => json_block(&certificate),
        OutputFormat::Csv => {
            let mut s = String::from("x,y\n");
            for v in &certificate.analysis.polygon.vertices {
                let _ = writeln!(s, "{},{}", v[0], v[1]);
            }
            s
        }
        OutputFormat::Pretty => {
            let a = &certificate.analysis;
            let mut s = format!(
                "irreducibility certificate for d = {d}, m = {m} (p = {})\n\
                 primitive degree = {}, leading gap = {}, content removed = {}\n\
                 polygon bound = {}\n",
                p.get(),
                a.degree,
                a.leading_gap,
                a.content_removed,
                a.polygon_bound
            );
            for line in &a.narrative {
                let _ = writeln!(s, "  {line}");
            }
            let _ = writeln!(s, "verdict: {}", a.verdict);
            s
        }
    };
    emit(&text, out_path.as_deref())?;

    let resolved = ResolvedConfig {
        command: "certify",
        d,
        n: None,
        m: Some(m),
        route: None,
        max_m: None,
        p: Some(p.get()),
        aux_primes,
        precision: Some(precision),
        size_cap: guard.cap().to_string(),
        output: output.name(),
        parallel: None,
    };
    write_manifest(args.common.manifest.as_deref(), &resolved)?;

    Ok(match certificate.analysis.verdict {
        Verdict::IrreducibleOverQ | Verdict::IrreducibleOverQd => 0,
        Verdict::LargeFactorOnly | Verdict::Inconclusive => EXIT_CHECK_FAILED,
    })
}
