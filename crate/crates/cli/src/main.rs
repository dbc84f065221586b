//! `umbilic`: curve analysis, umbilical-surface detection and constant-torsion
//! curve synthesis on the command line.
//!
//! Exit codes: 0 when the curve lies on an umbilical surface (or the RM relation
//! holds), 1 when it does not, 2 when the data are inconclusive, 3 on errors.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use umbilic_core::acceptance::{self, Options};
use umbilic_core::detect::{detect_rm_linear_relation, detect_with, DetectConfig, Verdict};
use umbilic_core::frames::{frenet_apparatus_with, rm_apparatus_with, FrenetOptions, SampledCurve};
use umbilic_core::io::{parse_table, read_curve, read_upper_halfspace, write_curve, write_frenet, write_upper_halfspace, FileModel};
use umbilic_core::spaceform::{classify_surface, SpaceForm};
use umbilic_core::synth::{
    synthesize_geodesic_sphere_s3, synthesize_horosphere, synthesize_on_surface, trimmed_domain, Branch, HorosphereParams,
    SphereParams, SurfaceCurveParams,
};
use umbilic_core::Execution;

#[derive(Parser)]
#[command(name = "umbilic", version, about = "Curves of constant torsion on umbilical surfaces of H3, S3 and R3")]
struct Cli {
    /// Run every per-sample map on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frenet apparatus of a curve as CSV (s, kappa, tau, kappa_prime).
    Analyze {
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = umbilic_core::frames::KAPPA_MIN)]
        kappa_min: f64,
    },
    /// Decide whether a curve lies on a totally umbilical surface.
    Detect(DetectArgs),
    /// Generate a constant-torsion curve on an umbilical surface.
    Synthesize(SynthArgs),
    /// Convert between the hyperboloid and the upper half-space model.
    Convert {
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the acceptance checks and print one line per criterion.
    Selftest {
        #[arg(long, default_value_t = 1e-3)]
        ds: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Frenet,
    Rm,
}

#[derive(Args)]
struct DetectArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "frenet")]
    mode: Mode,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    tau_zero_tol: Option<f64>,
    #[arg(long)]
    c_spread_tol: Option<f64>,
    #[arg(long)]
    horosphere_band: Option<f64>,
    #[arg(long)]
    kappa_min: Option<f64>,
    #[arg(long)]
    kappa_prime_min: Option<f64>,
    #[arg(long)]
    beta_spread_tol: Option<f64>,
    #[arg(long)]
    fourth_order_tol: Option<f64>,
    /// Analyzed range of s, as `lo,hi`.
    #[arg(long, value_parser = parse_pair)]
    window: Option<(f64, f64)>,
    /// RM mode: largest residual accepted as a linear relation.
    #[arg(long, default_value_t = 1e-4)]
    relation_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfaceArg {
    Horosphere,
    S3Sphere,
    Equidistant,
    H3Sphere,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "horosphere")]
    surface: SurfaceArg,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Phase `a` in `κ = |H|/sin(τs + a)`.
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    /// Arc length at the initial conditions.
    #[arg(long)]
    s0: Option<f64>,
    /// Arc-length range as `lo,hi`; the trimmed maximal domain when absent.
    #[arg(long, value_parser = parse_pair)]
    range: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1e-3)]
    ds: f64,
    /// Surface parameter σ (s3-sphere, equidistant and h3-sphere).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    x1: f64,
    #[arg(long, default_value_t = 0.0)]
    x2: f64,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// φ' at s0; completed to unit speed when absent.
    #[arg(long)]
    dphi: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    dtheta: f64,
    #[arg(long, value_enum, default_value = "plus")]
    branch: BranchArg,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the upper half-space image (hyperbolic surfaces only).
    #[arg(long)]
    upper_halfspace: Option<PathBuf>,
}

fn parse_pair(text: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = text.split_once(',').ok_or("expected two numbers as lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number '{a}'"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number '{b}'"))?;
    if !(lo < hi) {
        return Err(format!("need lo < hi, got {lo},{hi}"));
    }
    Ok((lo, hi))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe (`| head`) is not an error
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn load(path: &Path) -> Result<SampledCurve> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let curve = match parse_table(&text)?.model {
        FileModel::UpperHalfSpace => read_upper_halfspace(&text),
        FileModel::Form(_) => read_curve(&text),
    };
    curve.with_context(|| format!("parsing {}", path.display()))
}

fn analyze(input: &Path, output: Option<&Path>, kappa_min: f64, execution: Execution) -> Result<u8> {
    let curve = load(input)?;
    let frenet = frenet_apparatus_with(&curve, &FrenetOptions { kappa_min, execution })?;
    emit(output, &write_frenet(&frenet))?;
    let trusted: Vec<usize> = frenet.trusted().collect();
    let stat = |v: &[f64]| {
        let vals: Vec<f64> = trusted.iter().map(|&i| v[i]).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min, max, vals.iter().sum::<f64>() / vals.len().max(1) as f64)
    };
    let (kmin, kmax, _) = stat(&frenet.kappa);
    let (tmin, tmax, tmean) = stat(&frenet.tau);
    eprintln!(
        "{} samples ({} interior): kappa in [{kmin:.6e}, {kmax:.6e}], tau in [{tmin:.6e}, {tmax:.6e}] mean {tmean:.6e}",
        frenet.len(),
        trusted.len()
    );
    Ok(0)
}

fn detect(args: &DetectArgs, execution: Execution) -> Result<u8> {
    let curve = load(&args.input)?;
    let output = args.output.as_deref();
    match args.mode {
        Mode::Rm => {
            let rm = rm_apparatus_with(&curve, None, execution)?;
            let rel = detect_rm_linear_relation(&rm)?;
            emit(output, &(serde_json::to_string_pretty(&rel)? + "\n"))?;
            Ok(if rel.residual < args.relation_tol { 0 } else { 1 })
        }
        Mode::Frenet => {
            let d = DetectConfig::default();
            let cfg = DetectConfig {
                tau_zero_tol: args.tau_zero_tol.unwrap_or(d.tau_zero_tol),
                c_spread_tol: args.c_spread_tol.unwrap_or(d.c_spread_tol),
                horosphere_band: args.horosphere_band.unwrap_or(d.horosphere_band),
                kappa_min: args.kappa_min.unwrap_or(d.kappa_min),
                kappa_prime_min: args.kappa_prime_min.unwrap_or(d.kappa_prime_min),
                beta_spread_tol: args.beta_spread_tol.unwrap_or(d.beta_spread_tol),
                fourth_order_tol: args.fourth_order_tol.unwrap_or(d.fourth_order_tol),
                window: args.window,
                execution,
            };
            let report = detect_with(&curve, &cfg)?;
            emit(output, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(match report.verdict {
                Verdict::TotallyGeodesic | Verdict::UmbilicalNonGeodesic => 0,
                Verdict::NotUmbilical => 1,
                Verdict::Inconclusive => 2,
            })
        }
    }
}

fn synthesize(a: &SynthArgs) -> Result<u8> {
    let branch = match a.branch {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    };
    if a.tau == 0.0 {
        bail!("--tau must be non-zero");
    }
    let range = a.range.unwrap_or_else(|| trimmed_domain(a.tau, a.phase));
    let describe = || format!("--tau {} --phase {} --range {},{}", a.tau, a.phase, range.0, range.1);
    let syn = match a.surface {
        SurfaceArg::Horosphere => {
            if a.sigma.is_some() {
                bail!("--sigma does not apply to the horosphere");
            }
            let mut p = HorosphereParams::figure(a.tau);
            p.phase = a.phase;
            p.s_range = range;
            p.ds = a.ds;
            p.x1_0 = a.x1;
            p.x2_0 = a.x2;
            p.branch = branch;
            if let Some(s0) = a.s0 {
                p.s0 = s0;
            }
            synthesize_horosphere(&p)
        }
        SurfaceArg::S3Sphere => {
            let mut p = SphereParams::figure(a.tau);
            p.sigma = a.sigma.unwrap_or(p.sigma);
            p.phase = a.phase;
            p.s_range = range;
            p.ds = a.ds;
            p.phi0 = a.phi;
            p.theta0 = a.theta;
            p.dtheta0 = a.dtheta;
            p.dphi0 = match a.dphi {
                Some(v) => v,
                None => SphereParams::unit_speed_dphi(p.sigma, a.phi, a.dtheta).context("--dtheta")?,
            };
            p.branch = branch;
            if let Some(s0) = a.s0 {
                p.s0 = s0;
            }
            synthesize_geodesic_sphere_s3(&p)
        }
        SurfaceArg::Equidistant | SurfaceArg::H3Sphere => {
            let (axis, default_sigma) = match a.surface {
                SurfaceArg::Equidistant => (vec![1.0, 0.0, 0.0, 0.0], 1.5),
                _ => (vec![0.0, 0.0, 0.0, 1.0], 2.0),
            };
            let sigma = a.sigma.unwrap_or(default_sigma);
            let surface = classify_surface(&DVector::from_vec(axis), sigma, SpaceForm::Hyperbolic)
                .with_context(|| format!("--sigma {sigma}"))?;
            let mut p = SurfaceCurveParams::new(surface, a.tau);
            p.phase = a.phase;
            p.s_range = range;
            p.ds = a.ds;
            if let Some(s0) = a.s0 {
                p.s0 = s0;
            }
            synthesize_on_surface(&p)
        }
    }
    .with_context(describe)?;
    emit(a.output.as_deref(), &write_curve(&syn.curve))?;
    if let Some(path) = &a.upper_halfspace {
        emit(Some(path), &write_upper_halfspace(&syn.curve)?)?;
    }
    Ok(0)
}

fn convert(input: &Path, output: Option<&Path>) -> Result<u8> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let out = match parse_table(&text)?.model {
        FileModel::UpperHalfSpace => write_curve(&read_upper_halfspace(&text)?),
        FileModel::Form(SpaceForm::Hyperbolic) => write_upper_halfspace(&read_curve(&text)?)?,
        FileModel::Form(form) => bail!("no other model for c = {}", form.c()),
    };
    emit(output, &out)?;
    Ok(0)
}

fn selftest(ds: f64, seed: u64) -> u8 {
    let results = acceptance::run_all(&Options { ds, seed });
    let mut out = String::new();
    for r in &results {
        out.push_str(&r.line());
        out.push('\n');
    }
    let _ = emit(None, &out);
    if results.iter().all(|r| r.passed) {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<u8> {
    let execution = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Analyze { input, output, kappa_min } => analyze(&input, output.as_deref(), kappa_min, execution),
        Command::Detect(args) => detect(&args, execution),
        Command::Synthesize(args) => synthesize(&args),
        Command::Convert { input, output } => convert(&input, output.as_deref()),
        Command::Selftest { ds, seed } => Ok(selftest(ds, seed)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
