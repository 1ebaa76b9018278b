//! Command-line front end: configure a shape, run a computation, emit
//! CSV/JSON artifacts, or run the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/configuration
//! error, 3 numerical/solver failure. Errors also emit a JSON record on
//! stderr. The only recognized environment variable is `LAYERPOT_OUT_DIR`,
//! which prefixes relative output paths.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use layerpot::analysis::trace_report_from;
use layerpot::config::Config;
use layerpot::error::LayerpotError;
use layerpot::explorer::{positive_eigenvalue_search, sweep_ellipses, sweep_ellipsoids};
use layerpot::geometry::{Curve2D, Surface3D};
use layerpot::io::{
    nodal_csv_rows, spectrum_csv_rows, write_csv_rows, write_json, write_matrix_binary,
    write_matrix_csv,
};
use layerpot::nodal::{nodal_bound_report, real_eigenfunctions, DEFAULT_EPSILON};
use layerpot::operators::{assemble_dlp_2d, assemble_dlp_3d};
use layerpot::spectral::eigenpairs;
use layerpot::verify::{run_all, VerifyParams};

#[derive(Parser)]
#[command(
    name = "layerpot",
    version,
    about = "Spectral laboratory for double layer potentials on curves and ellipsoids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Shape and grid flags shared by the computation commands. Flags override
/// the config file; defaults are N=256, grid 32x64, eps=0.1, p=2.
#[derive(Args, Clone)]
struct ShapeArgs {
    /// Key=value config file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// circle | ellipse | fourier | sphere | ellipsoid
    #[arg(long)]
    shape: Option<String>,
    /// Circle or sphere radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Ellipse focal parameter.
    #[arg(long)]
    c: Option<f64>,
    /// Ellipse radial parameter.
    #[arg(long = "R")]
    r_param: Option<f64>,
    /// Fourier modes as k:re:im,k:re:im,...
    #[arg(long)]
    modes: Option<String>,
    /// Ellipsoid semi-axes.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    /// 2D node count (even, >= 16).
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// 3D grid as THETAxPHI.
    #[arg(long, default_value = "32x64")]
    grid: String,
}

impl ShapeArgs {
    fn config(&self) -> Result<Config, LayerpotError> {
        let base = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let mut flags = Config::default();
        if let Some(v) = &self.shape {
            flags.set("shape", v.clone());
        }
        if let Some(v) = self.radius {
            flags.set("radius", v.to_string());
        }
        if let Some(v) = self.c {
            flags.set("c", v.to_string());
        }
        if let Some(v) = self.r_param {
            flags.set("R", v.to_string());
        }
        if let Some(v) = &self.modes {
            flags.set("modes", v.clone());
        }
        if let Some(v) = self.a {
            flags.set("a", v.to_string());
        }
        if let Some(v) = self.b {
            flags.set("b", v.to_string());
        }
        if let Some(v) = self.c3 {
            flags.set("c3", v.to_string());
        }
        Ok(base.overlay(&flags))
    }

    fn is_3d(&self) -> Result<bool, LayerpotError> {
        let cfg = self.config()?;
        match cfg.get("shape") {
            Some("sphere") | Some("ellipsoid") => Ok(true),
            Some(_) => Ok(false),
            None => Err(LayerpotError::Config("missing shape".into())),
        }
    }

    fn curve(&self) -> Result<Curve2D, LayerpotError> {
        self.config()?.curve()
    }

    fn surface(&self) -> Result<Surface3D, LayerpotError> {
        self.config()?.surface()
    }

    fn grid_3d(&self) -> Result<(usize, usize), LayerpotError> {
        let (t, p) = self
            .grid
            .split_once('x')
            .ok_or_else(|| LayerpotError::Config("grid must look like 32x64".into()))?;
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| LayerpotError::Config(format!("bad grid component {s:?}")))
        };
        Ok((parse(t)?, parse(p)?))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, singular values and residuals of the configured shape.
    Spectrum {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Output file; .json for the spectrum record, .csv for per-eigenvalue rows.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also dump the Nystrom matrix (.bin flat binary or .csv).
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Trace identities tr(K), tr(K*K) and the isoperimetric defect (2D).
    Trace {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nodal counts, annulus zero counts and the logarithmic-law ratios (2D).
    Nodal {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Strip half-width for the annulus count.
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
        /// Smallest |lambda| to include.
        #[arg(long, default_value_t = 1e-8)]
        floor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweeps over shape families.
    Sweep {
        /// ellipse | ellipsoid | oblate
        #[arg(long, default_value = "ellipsoid")]
        family: String,
        /// Grid values: ellipse radii, ellipsoid semi-axes, or oblate aspects.
        #[arg(long, value_delimiter = ',', default_value = "1.0,1.1,1.25,1.5")]
        values: Vec<f64>,
        /// Schatten exponent.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// 2D node count (ellipse family).
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// 3D grid as THETAxPHI.
        #[arg(long, default_value = "32x64")]
        grid: String,
        /// Resumable CSV ledger path.
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// JSON summary output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the full verification suite and prints one line per check.
    Verify {
        /// Smaller grids, tolerances relaxed 10x.
        #[arg(long)]
        quick: bool,
    },
}

fn out_path(path: &Path) -> PathBuf {
    match std::env::var_os("LAYERPOT_OUT_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn dump_matrix(path: &Path, a: &ndarray::Array2<f64>) -> Result<(), LayerpotError> {
    let path = out_path(path);
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => write_matrix_csv(&path, a),
        _ => write_matrix_binary(&path, a),
    }
}

fn run(cli: Cli) -> Result<bool, LayerpotError> {
    match cli.command {
        Command::Spectrum {
            shape,
            out,
            dump_matrix: dump,
        } => {
            let t0 = Instant::now();
            let matrix = if shape.is_3d()? {
                let (nt, np) = shape.grid_3d()?;
                assemble_dlp_3d(&shape.surface()?, nt, np)?
            } else {
                assemble_dlp_2d(&shape.curve()?, shape.n)?
            };
            if let Some(path) = &dump {
                dump_matrix(path, &matrix.a)?;
            }
            let spec = eigenpairs(&matrix)?;
            eprintln!(
                "layerpot {} spectrum shape={} grid={} wall={:.2}s",
                env!("CARGO_PKG_VERSION"),
                spec.shape_label,
                spec.grid_label,
                t0.elapsed().as_secs_f64()
            );
            let record = spec.to_record();
            match &out {
                Some(path) if path.extension().and_then(|e| e.to_str()) == Some("csv") => {
                    write_csv_rows(&out_path(path), &spectrum_csv_rows(&spec))?;
                }
                Some(path) => write_json(&out_path(path), &record)?,
                None => println!("{}", serde_json::to_string_pretty(&record)?),
            }
            Ok(true)
        }
        Command::Trace { shape, out } => {
            let t0 = Instant::now();
            let matrix = assemble_dlp_2d(&shape.curve()?, shape.n)?;
            let report = trace_report_from(&matrix)?;
            eprintln!(
                "layerpot {} trace shape={} N={} wall={:.2}s",
                env!("CARGO_PKG_VERSION"),
                report.shape,
                report.n,
                t0.elapsed().as_secs_f64()
            );
            println!(
                "trace_K = {:.12}\ntr(K*K) = {:.12}\ndefect = {:.3e}",
                report.trace_k, report.trace_kstark_svd, report.defect
            );
            if let Some(path) = &out {
                write_json(&out_path(path), &report)?;
            }
            Ok(true)
        }
        Command::Nodal {
            shape,
            eps,
            floor,
            out,
        } => {
            let t0 = Instant::now();
            let curve = shape.curve()?;
            let matrix = assemble_dlp_2d(&curve, shape.n)?;
            let spec = eigenpairs(&matrix)?;
            let efs = real_eigenfunctions(&spec, &curve, floor);
            let report = nodal_bound_report(&efs, &curve, eps)?;
            eprintln!(
                "layerpot {} nodal shape={} N={} pairs={} wall={:.2}s",
                env!("CARGO_PKG_VERSION"),
                curve.label(),
                shape.n,
                report.rows.len(),
                t0.elapsed().as_secs_f64()
            );
            for row in &report.rows {
                println!(
                    "lambda={:+.6e} real_zeros={} annulus_zeros={} ratio={:.4}",
                    row.lambda, row.real_zeros, row.annulus_zeros, row.ratio
                );
            }
            println!(
                "empirical_constant={:.4} super_logarithmic={}",
                report.empirical_constant, report.super_logarithmic
            );
            if let Some(path) = &out {
                let rows = nodal_csv_rows(curve.label(), shape.n, &report.rows);
                write_csv_rows(&out_path(path), &rows)?;
            }
            Ok(true)
        }
        Command::Sweep {
            family,
            values,
            p,
            n,
            grid,
            ledger,
            out,
        } => {
            let t0 = Instant::now();
            let ledger = ledger.as_deref().map(out_path);
            let parse_grid = || -> Result<(usize, usize), LayerpotError> {
                let (t, q) = grid
                    .split_once('x')
                    .ok_or_else(|| LayerpotError::Config("grid must look like 32x64".into()))?;
                Ok((
                    t.parse()
                        .map_err(|_| LayerpotError::Config(format!("bad grid {grid:?}")))?,
                    q.parse()
                        .map_err(|_| LayerpotError::Config(format!("bad grid {grid:?}")))?,
                ))
            };
            match family.as_str() {
                "ellipsoid" => {
                    let (nt, np) = parse_grid()?;
                    let mut axes = Vec::new();
                    for &b in &values {
                        for &c in &values {
                            axes.push((b, c));
                        }
                    }
                    let sweep = sweep_ellipsoids(&axes, p, nt, np, ledger.as_deref())?;
                    let summary = sweep.summary.as_ref().unwrap();
                    println!("{}", serde_json::to_string_pretty(summary)?);
                    if let Some(path) = &out {
                        write_json(&out_path(path), summary)?;
                    }
                }
                "ellipse" => {
                    let sweep = sweep_ellipses(&values, 2.0, n, ledger.as_deref())?;
                    for row in &sweep.rows {
                        println!(
                            "{} defect={:.6e}",
                            row.shape,
                            row.defect.unwrap_or(f64::NAN)
                        );
                    }
                    if let Some(path) = &out {
                        write_json(&out_path(path), &sweep.rows)?;
                    }
                }
                "oblate" => {
                    let (nt, np) = parse_grid()?;
                    let findings = positive_eigenvalue_search(&values, nt, np)?;
                    for f in &findings {
                        println!(
                            "aspect={} positive_eigenvalues={:?}",
                            f.aspect, f.positive_eigenvalues
                        );
                    }
                    if let Some(path) = &out {
                        write_json(&out_path(path), &findings)?;
                    }
                }
                other => {
                    return Err(LayerpotError::Config(format!(
                        "unknown sweep family {other:?}"
                    )))
                }
            }
            eprintln!(
                "layerpot {} sweep family={family} wall={:.2}s",
                env!("CARGO_PKG_VERSION"),
                t0.elapsed().as_secs_f64()
            );
            Ok(true)
        }
        Command::Verify { quick } => {
            let params = if quick {
                VerifyParams::quick()
            } else {
                VerifyParams::standard()
            };
            let t0 = Instant::now();
            let ok = run_all(&params, |c| println!("{}", c.line()));
            println!(
                "overall: {} ({:.1}s)",
                if ok { "PASS" } else { "FAIL" },
                t0.elapsed().as_secs_f64()
            );
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let (kind, code) = match &err {
                LayerpotError::Config(_)
                | LayerpotError::InvalidArgument(_)
                | LayerpotError::InvalidShape(_)
                | LayerpotError::InvalidGrid(_) => ("usage", 2),
                _ => ("solver", 3),
            };
            eprintln!(
                "{}",
                serde_json::json!({ "error": err.to_string(), "kind": kind })
            );
            ExitCode::from(code)
        }
    }
}
