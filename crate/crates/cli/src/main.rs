mod scheme;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use expsub_core::bspline::{normalized_symbol, Normalization};
use expsub_core::correction::hermite_correction;
use expsub_core::engine::{run, BoundaryPolicy, RefinedData};
use expsub_core::frequency::{GammaSet, Theta};
use expsub_core::io::{read_table, table_to_components, write_curve, write_values};
use expsub_core::laurent::RealMask;
use expsub_core::pseudo::{asymptotic_report, family_oracle_4pt, family_oracle_6pt, SchemeFamily};
use expsub_core::scalar::Dd;

use scheme::{parse_levels, parse_theta, SchemeArgs};
use verify::{Report, Selection};

/// Imaginary parts larger than this make a symbol unrepresentable as a real mask.
const REALIZE_TOL: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "expsub", version, about = "Exponential B-spline and pseudo-spline subdivision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Level-k pseudo-spline mask as JSON.
    Symbol {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long, value_enum, default_value_t = MaskFormat::Json)]
        format: MaskFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Level-k exponential B-spline symbol of Γ.
    Bspline {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0)]
        level: u32,
        /// `auto`, `zero`, or `pair:I` for the I-th frequency pair.
        #[arg(long, default_value = "auto", value_parser = parse_normalization)]
        normalize: Normalization,
        #[arg(long, value_enum, default_value_t = MaskFormat::Json)]
        format: MaskFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Correction factor c with a = B c, as mask JSON and as a Laurent polynomial.
    Correction {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0)]
        level: u32,
    },
    /// Closed-form family masks for rho = 2 or 3.
    MaskOracle {
        #[arg(long)]
        rho: u32,
        #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
        theta: Theta,
        #[arg(long, default_value_t = 0)]
        level: u32,
    },
    /// Refine sampled data read from CSV (`t,value` or `t,x,y`).
    Refine {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        input: PathBuf,
        /// Number of subdivision steps.
        #[arg(long, default_value_t = 1)]
        levels: u32,
        /// Level of the input grid.
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long, value_enum, default_value_t = Boundary::Trim)]
        boundary: Boundary,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Samples of the basic limit function, refined from a unit impulse.
    Limit {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 8)]
        levels: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the property checks on a family of masks or on a single mask file.
    Verify {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Level range `a..b` (inclusive) or a single level.
        #[arg(long, default_value = "0..6", value_parser = parse_levels)]
        levels: (u32, u32),
        /// Check this mask file instead of the constructed family; its level is the start of `--levels`.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        generation: bool,
        #[arg(long)]
        reproduction: bool,
        #[arg(long)]
        symmetry: bool,
        #[arg(long)]
        interpolatory: bool,
        #[arg(long)]
        asymptotic: bool,
        #[arg(long)]
        decay: bool,
        /// Tolerance for every residual check; falls back to EXPSUB_TOL.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Pretty)]
        format: ReportFormat,
    },
    /// Distance of each level mask to its stationary limit, with sum-rule defects.
    CompareStationary {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value = "0..10", value_parser = parse_levels)]
        levels: (u32, u32),
        #[arg(long, value_enum, default_value_t = ReportFormat::Pretty)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MaskFormat {
    Json,
    Pretty,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Pretty,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Boundary {
    Trim,
    Zeropad,
}

impl From<Boundary> for BoundaryPolicy {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Trim => BoundaryPolicy::Trim,
            Boundary::Zeropad => BoundaryPolicy::ZeroPad,
        }
    }
}

fn parse_normalization(s: &str) -> std::result::Result<Normalization, String> {
    match s {
        "auto" => Ok(Normalization::Auto),
        "zero" => Ok(Normalization::Zero),
        _ => s
            .strip_prefix("pair:")
            .and_then(|i| i.parse().ok())
            .map(Normalization::Pair)
            .ok_or_else(|| format!("expected auto, zero or pair:I, got {s:?}")),
    }
}

fn env_tol() -> Result<Option<f64>> {
    match std::env::var("EXPSUB_TOL") {
        Ok(v) => {
            let t: f64 = v.trim().parse().with_context(|| format!("EXPSUB_TOL={v:?}"))?;
            if !(t > 0.0 && t.is_finite()) {
                bail!("EXPSUB_TOL must be a positive number, got {v:?}");
            }
            Ok(Some(t))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(anyhow!("EXPSUB_TOL: {e}")),
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_mask(mask: &RealMask, format: MaskFormat, output: &Option<PathBuf>) -> Result<()> {
    let mut out = sink(output)?;
    match format {
        MaskFormat::Json => writeln!(out, "{}", mask.to_json())?,
        MaskFormat::Pretty => writeln!(out, "{}", mask.to_laurent::<f64>())?,
    }
    out.flush()?;
    Ok(())
}

fn emit_report(report: &Report, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Pretty => print!("{}", report.pretty()),
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(report)?),
    }
    Ok(())
}

fn family(scheme: &SchemeArgs) -> Result<SchemeFamily> {
    let (g, sub) = scheme.resolve()?;
    Ok(SchemeFamily::new(g, sub)?)
}

fn gamma_only(scheme: &SchemeArgs) -> Result<GammaSet> {
    Ok(scheme.resolve()?.0)
}

/// Ok(true) when everything passed, Ok(false) on a failed verification.
fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Symbol { scheme, level, format, output } => {
            let fam = family(&scheme)?;
            emit_mask(&*fam.symbol_at(level)?, format, &output)?;
        }
        Command::Bspline { scheme, level, normalize, format, output } => {
            let g = gamma_only(&scheme)?;
            let b = normalized_symbol::<Dd>(&g, normalize, level)?;
            emit_mask(&b.poly.realize(REALIZE_TOL)?, format, &output)?;
        }
        Command::Correction { scheme, level } => {
            let (g, sub) = scheme.resolve()?;
            let c = hermite_correction::<Dd>(&g, &sub, level)?;
            println!("{}", c.poly.realize(REALIZE_TOL)?.to_json());
            println!("{}", c.poly.convert::<f64>());
        }
        Command::MaskOracle { rho, theta, level } => {
            let mask = match rho {
                2 => family_oracle_4pt(theta, level),
                3 => family_oracle_6pt(theta, level),
                _ => bail!("closed forms exist only for --rho 2 and --rho 3"),
            };
            println!("{}", mask.to_json());
        }
        Command::Refine { scheme, input, levels, level, boundary, output } => {
            let fam = family(&scheme)?;
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let (_, rows) = read_table(file)?;
            let parts = table_to_components(&rows, level, fam.p())?;
            let refined = parts
                .iter()
                .map(|d| run(&fam, d, levels, boundary.into()))
                .collect::<expsub_core::Result<Vec<_>>>()?;
            let out = sink(&output)?;
            match refined.as_slice() {
                [v] => write_values(out, v)?,
                [x, y] => write_curve(out, x, y)?,
                _ => bail!("expected 1 or 2 value columns, got {}", refined.len()),
            }
        }
        Command::Limit { scheme, levels, output } => {
            let fam = family(&scheme)?;
            let phi = run(&fam, &RefinedData::delta(0, fam.p()), levels, BoundaryPolicy::ZeroPad)?;
            write_values(sink(&output)?, &phi)?;
        }
        Command::Verify {
            scheme,
            levels,
            mask,
            all,
            generation,
            reproduction,
            symmetry,
            interpolatory,
            asymptotic,
            decay,
            tol,
            format,
        } => {
            let tol = match tol {
                Some(t) if !(t > 0.0 && t.is_finite()) => bail!("--tol must be positive, got {t}"),
                Some(t) => Some(t),
                None => env_tol()?,
            };
            let picked = Selection { generation, reproduction, symmetry, interpolatory, asymptotic, decay };
            let sel = if all || !picked.any() { Selection::all() } else { picked };
            let report = match mask {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let m = RealMask::from_json(&text).with_context(|| format!("in {}", path.display()))?;
                    let (g, sub) = scheme.resolve()?;
                    verify::verify_mask(&m, &g, &sub, levels.0, sel, tol, interpolatory)
                }
                None => verify::verify_family(&family(&scheme)?, levels, sel, tol, interpolatory)?,
            };
            emit_report(&report, format)?;
            return Ok(report.passed);
        }
        Command::CompareStationary { scheme, levels, format } => {
            let fam = family(&scheme)?;
            let rows = asymptotic_report(&fam, levels.0..=levels.1)?;
            match format {
                ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
                ReportFormat::Pretty => {
                    println!("stationary limit {}", fam.stationary_limit().to_json());
                    println!("{:>4} {:>12} {:>12} {:>12} {:>8}", "k", "sup_dist", "ratio", "|a(1)-2|", "|a(-1)|");
                    let mut prev: Option<f64> = None;
                    for r in &rows {
                        let ratio = prev.filter(|p| *p > 0.0).map_or(String::from("-"), |p| format!("{:.4}", r.sup_dist / p));
                        let at_minus_one = r.minus_one.first().copied().unwrap_or(0.0);
                        println!("{:>4} {:>12.4e} {:>12} {:>12.4e} {:>8.1e}", r.k, r.sup_dist, ratio, r.sum_defect, at_minus_one);
                        prev = Some(r.sup_dist);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
