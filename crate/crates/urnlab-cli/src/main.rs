//! Command-line interface: batch analysis of balanced subtractive urn
//! models with reproducible, manifest-backed runs.
//!
//! Exit codes: 0 ok, 1 usage/parse, 2 tenability, 3 numeric tolerance.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use urnlab_core::error::UrnError;
use urnlab_core::hp;
use urnlab_core::urn::{validate, UrnSpec};

#[derive(Parser)]
#[command(
    name = "urnlab",
    version,
    about = "Exact and asymptotic analysis of balanced two-color urns with subtraction",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// JSON file with keys {"a","b","s","a0","b0"}
    #[arg(long, conflicts_with_all = ["a", "b", "s", "a0", "b0"])]
    spec: Option<PathBuf>,
    /// Black-diagonal magnitude of the replacement matrix
    #[arg(long)]
    a: Option<u64>,
    /// White-diagonal magnitude
    #[arg(long)]
    b: Option<u64>,
    /// Balance (population growth per step)
    #[arg(long)]
    s: Option<u64>,
    /// Initial black balls
    #[arg(long)]
    a0: Option<u64>,
    /// Initial white balls
    #[arg(long)]
    b0: Option<u64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DistFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the analytic profile of an urn: tenability, rho by two routes,
    /// moment slopes, singularity exponents, elliptic verdict, kite vertices
    Analyze {
        #[command(flatten)]
        spec: SpecArgs,
        /// Output directory for the run manifest
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Exact law of the black count at time n
    Dist {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: DistFormat,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Table of exact vs closed-form factorial moments
    Moments {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 3)]
        r_max: u32,
        #[arg(long, default_value_t = 40)]
        n_max: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Large-deviation rate curve on a grid of deviation levels
    Rate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Monte Carlo simulation of urn histories
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        trials: u64,
        /// Horizon (number of steps per trial)
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Enumerate the elliptic urns with balance up to s-max
    Classify {
        #[arg(long, default_value_t = 10)]
        s_max: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Kite geometry and fundamental-polygon boundary data
    Kite {
        #[command(flatten)]
        spec: SpecArgs,
        /// Boundary samples per kite edge
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!(
                "{}",
                serde_json::json!({
                    "error": e.message,
                    "kind": e.kind,
                    "exit_code": code,
                })
            );
            ExitCode::from(code)
        }
    }
}

struct CliError {
    message: String,
    kind: &'static str,
}

impl From<UrnError> for CliError {
    fn from(e: UrnError) -> Self {
        let kind = match e {
            UrnError::NonPositiveParameter(_) => "non-positive-parameter",
            UrnError::TenabilityViolation(_) => "tenability-violation",
            UrnError::ToleranceNotMet { .. } => "tolerance-not-met",
            UrnError::TailTooLarge { .. } => "tail-too-large",
            UrnError::PrecisionLoss(_) => "precision-loss",
            UrnError::RootNotBracketed { .. } => "root-not-bracketed",
            UrnError::BranchTrackingFailure { .. } => "branch-tracking-failure",
            UrnError::OutOfRange(_) => "out-of-range",
            UrnError::PoleAt(_) => "pole",
            _ => "internal",
        };
        CliError {
            message: e.to_string(),
            kind,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            message: e.to_string(),
            kind: "io",
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e.kind {
        "tenability-violation" | "non-positive-parameter" => 2,
        "parse" | "out-of-range" | "io" => 1,
        _ => 3,
    }
}

impl SpecArgs {
    fn resolve(&self) -> Result<UrnSpec, CliError> {
        if let Some(path) = &self.spec {
            let text = std::fs::read_to_string(path)?;
            let spec: UrnSpec = serde_json::from_str(&text).map_err(|e| CliError {
                message: format!("cannot parse {}: {e}", path.display()),
                kind: "parse",
            })?;
            return Ok(spec);
        }
        match (self.a, self.b, self.s, self.a0, self.b0) {
            (Some(a), Some(b), Some(s), Some(a0), Some(b0)) => Ok(UrnSpec::new(a, b, s, a0, b0)),
            _ => Err(CliError {
                message: "supply either --spec FILE or all of --a --b --s --a0 --b0".into(),
                kind: "parse",
            }),
        }
    }
}

/// %.g-style significant-digit formatting (12 digits by default).
fn sig(x: f64) -> String {
    format_sig(x, 12)
}

fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.*e}", digits - 1)
    }
}

fn rational_str(r: &num_rational::BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn complex_str(z: num_complex::Complex64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", sig(z.re), sig(z.im))
    } else {
        format!("{}-{}i", sig(z.re), sig(-z.im))
    }
}

/// Writes the run manifest next to the outputs.
fn write_manifest(
    out: &Path,
    command: &str,
    spec: Option<&UrnSpec>,
    parameters: serde_json::Value,
    outputs: &[String],
) -> Result<(), CliError> {
    std::fs::create_dir_all(out)?;
    let manifest = serde_json::json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "spec": spec,
        "parameters": parameters,
        "outputs": outputs,
    });
    let path = out.join(format!("{command}.manifest.json"));
    std::fs::write(
        &path,
        format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )?;
    Ok(())
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError {
            message: e.to_string(),
            kind: "internal",
        }
    }
}

fn out_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)?;
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze { ref out, .. }
        | Command::Dist { ref out, .. }
        | Command::Moments { ref out, .. }
        | Command::Rate { ref out, .. }
        | Command::Simulate { ref out, .. }
        | Command::Classify { ref out, .. }
        | Command::Kite { ref out, .. } => out_dir(out)?,
    }
    match command {
        Command::Analyze { spec, out } => analyze(&spec.resolve()?, &out),
        Command::Dist {
            spec,
            n,
            format,
            out,
        } => dist(&spec.resolve()?, n, format, &out),
        Command::Moments {
            spec,
            r_max,
            n_max,
            out,
        } => moments(&spec.resolve()?, r_max, n_max, &out),
        Command::Rate { spec, grid, out } => rate(&spec.resolve()?, grid, &out),
        Command::Simulate {
            spec,
            trials,
            n,
            seed,
            out,
        } => simulate(&spec.resolve()?, trials, n, seed, &out),
        Command::Classify { s_max, out } => classify(s_max, &out),
        Command::Kite { spec, samples, out } => kite(&spec.resolve()?, samples, &out),
    }
}

fn analyze(spec: &UrnSpec, out: &Path) -> Result<(), CliError> {
    let d = validate(spec)?;
    let digits = hp::precision_digits();
    let prec = hp::precision_bits();
    let profile = urnlab_core::analytic::analytic_profile(spec)?;
    let rho_quad = urnlab_core::analytic::rho_quadrature(spec, prec)?;
    let slopes = urnlab_core::moments::asymptotic_moments(spec)?;
    let verdict = urnlab_core::elliptic::classify(spec)?;
    let geometry = urnlab_core::analytic::kite(spec)?;

    println!(
        "urn (-{}, {}; {}, -{})  started from (a0, b0) = ({}, {})",
        spec.a,
        spec.a + spec.s,
        spec.b + spec.s,
        spec.b,
        spec.a0,
        spec.b0
    );
    println!(
        "tenable: yes   t0 = {}   h = {}   population at n: {} + {} n",
        d.t0, d.h, d.t0, spec.s
    );
    println!("rho (Gamma route):      {}", sig(profile.rho.to_f64()));
    println!("rho (quadrature route): {}", sig(rho_quad.to_f64()));
    println!(
        "rho to {} digits: {}",
        digits,
        hp::to_decimal_string(&profile.rho, digits as usize)
    );
    println!("mean slope:     {}", rational_str(&slopes.mean_slope));
    println!("variance slope: {}", rational_str(&slopes.variance_slope));
    let ratio = |r: &num_rational::Rational64| -> String {
        if *r.denom() == 1 {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    };
    println!(
        "puiseux exponent h/s: {}   singular exponent -t0/s: {}",
        ratio(&profile.puiseux_exponent),
        ratio(&profile.singular_exponent)
    );
    let psi = urnlab_core::series::psi_series_at_zero(spec, urnlab_core::series::DEFAULT_ORDER)?;
    let psi_display = urnlab_core::series::FormalSeries::new(
        "z",
        psi.offset,
        psi.step,
        psi.coeffs.iter().take(4).cloned().collect(),
    );
    println!("psi at the origin: {psi_display}");
    let se = urnlab_core::series::singular_expansion(spec, 4)?;
    let w_label = if spec.s == 1 { "(rho - z)".to_string() } else { format!("{}(rho - z)", spec.s) };
    println!(
        "singular expansion against W = {}: a_1 = {}, a_2 = {}, a_3 = {}",
        w_label,
        rational_str(&se.a_k[1]),
        rational_str(&se.a_k[2]),
        rational_str(&se.a_k[3])
    );
    match verdict.matched_case {
        Some(case) => println!("elliptic: case {case} ({})", verdict.reason),
        None => println!("elliptic: no ({})", verdict.reason),
    }
    println!(
        "kite vertices: {}, {}, {}, {}   ({} kites in the fundamental polygon)",
        complex_str(geometry.vertices[0]),
        complex_str(geometry.vertices[1]),
        complex_str(geometry.vertices[2]),
        complex_str(geometry.vertices[3]),
        geometry.polygon_vertex_count
    );
    println!(
        "kite angles:   {}, {}, {}, {}",
        sig(geometry.angles[0]),
        sig(geometry.angles[1]),
        sig(geometry.angles[2]),
        sig(geometry.angles[3])
    );
    write_manifest(out, "analyze", Some(spec), serde_json::json!({}), &[])?;
    Ok(())
}

fn dist(spec: &UrnSpec, n: u64, format: DistFormat, out: &Path) -> Result<(), CliError> {
    let d = urnlab_core::exact::exact_distribution(spec, n)?;
    let file = match format {
        DistFormat::Csv => {
            let path = out.join("dist.csv");
            std::fs::write(&path, d.to_csv())?;
            "dist.csv"
        }
        DistFormat::Json => {
            let path = out.join("dist.json");
            std::fs::write(
                &path,
                format!("{}\n", serde_json::to_string_pretty(&d.to_json())?),
            )?;
            "dist.json"
        }
    };
    println!("wrote {}", out.join(file).display());
    let fmt = if format == DistFormat::Csv {
        "csv"
    } else {
        "json"
    };
    write_manifest(
        out,
        "dist",
        Some(spec),
        serde_json::json!({"n": n, "format": fmt}),
        &[file.to_string()],
    )
}

fn moments(spec: &UrnSpec, r_max: u32, n_max: u64, out: &Path) -> Result<(), CliError> {
    let csv = urnlab_core::moments::moment_table_csv(spec, r_max, n_max)?;
    let path = out.join("moments.csv");
    std::fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    write_manifest(
        out,
        "moments",
        Some(spec),
        serde_json::json!({"r_max": r_max, "n_max": n_max}),
        &["moments.csv".to_string()],
    )
}

fn rate(spec: &UrnSpec, grid: usize, out: &Path) -> Result<(), CliError> {
    let points = urnlab_core::deviation::rate_curve(spec, grid)?;
    let path = out.join("rate.csv");
    std::fs::write(&path, urnlab_core::deviation::rate_csv(&points))?;
    println!("wrote {}", path.display());
    write_manifest(
        out,
        "rate",
        Some(spec),
        serde_json::json!({"grid": grid}),
        &["rate.csv".to_string()],
    )
}

fn simulate(spec: &UrnSpec, trials: u64, n: u64, seed: u64, out: &Path) -> Result<(), CliError> {
    let config = urnlab_core::simulate::SimConfig {
        trials,
        horizon: n,
        seed,
    };
    let hist = urnlab_core::simulate::simulate(spec, &config)?;
    let path = out.join("simulate.csv");
    std::fs::write(&path, hist.to_csv())?;
    println!("wrote {}", path.display());
    let mut outputs = vec!["simulate.csv".to_string()];
    match urnlab_core::simulate::clt_report(spec, n) {
        Ok(report) => {
            let j = urnlab_core::simulate::clt_report_json(&report);
            std::fs::write(
                out.join("clt.json"),
                format!("{}\n", serde_json::to_string_pretty(&j)?),
            )?;
            println!("wrote {}", out.join("clt.json").display());
            outputs.push("clt.json".to_string());
        }
        Err(UrnError::DegenerateDistribution(_)) => {
            println!("clt report skipped: the law at n = {n} is deterministic");
        }
        Err(e) => return Err(e.into()),
    }
    write_manifest(
        out,
        "simulate",
        Some(spec),
        serde_json::json!({"trials": trials, "n": n, "seed": seed}),
        &outputs,
    )
}

fn classify(s_max: u64, out: &Path) -> Result<(), CliError> {
    let specs = urnlab_core::elliptic::enumerate_elliptic(s_max);
    let json = urnlab_core::elliptic::verdicts_json(&specs);
    let path = out.join("classify.json");
    std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&json)?))?;
    println!("{} elliptic urns with balance <= {}", specs.len(), s_max);
    println!("wrote {}", path.display());
    write_manifest(
        out,
        "classify",
        None,
        serde_json::json!({"s_max": s_max}),
        &["classify.json".to_string()],
    )
}

fn kite(spec: &UrnSpec, samples: usize, out: &Path) -> Result<(), CliError> {
    let geometry = urnlab_core::analytic::kite(spec)?;
    let boundary = urnlab_core::analytic::polygon_boundary_points(spec, samples)?;
    let json = serde_json::json!({
        "vertices": geometry.vertices.iter().map(|v| vec![v.re, v.im]).collect::<Vec<_>>(),
        "angles": geometry.angles,
        "polygon_vertex_count": geometry.polygon_vertex_count,
        "ray_argument": geometry.ray_argument,
    });
    std::fs::write(
        out.join("kite.json"),
        format!("{}\n", serde_json::to_string_pretty(&json)?),
    )?;
    std::fs::write(
        out.join("polygon.csv"),
        urnlab_core::analytic::boundary_csv(&boundary),
    )?;
    println!(
        "wrote {} and {}",
        out.join("kite.json").display(),
        out.join("polygon.csv").display()
    );
    write_manifest(
        out,
        "kite",
        Some(spec),
        serde_json::json!({"samples": samples}),
        &["kite.json".to_string(), "polygon.csv".to_string()],
    )
}
