use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ncfun_core::linalg::operator_norm;
use ncfun_core::ncderiv::{dk_diag, dk_fd, dk_multilinear};
use ncfun_core::ncfun::from_realization;
use ncfun_core::realization::{check_isometry, contractivity_scan};
use ncfun_core::taylor::{taylor_expand_with, ExtractOptions};
use ncfun_core::verify::{relative_gap, run_suite};
use ncfun_core::{ComplexMatrix, MatrixTuple, NcFunction, Realization};
use serde::Serialize;

use crate::config::CliConfig;
use crate::error::CliError;
use crate::format::{
    DiagnosticsFile, HandleFile, HandleKind, IsometryFile, LoadedHandle, MatrixFile, PointFile,
    PolyFile, PropertyFile, RealizationFile, ScanFile,
};
use crate::io::{emit, read_json, to_json, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "ncfun", version, about = "Evaluate, differentiate, expand and check free NC functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized commands; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a handle at a point.
    Eval {
        #[arg(long)]
        handle: PathBuf,
        #[arg(long)]
        point: PathBuf,
    },
    /// k-th NC derivative at a point.
    Derive {
        #[arg(long)]
        handle: PathBuf,
        #[arg(long)]
        point: PathBuf,
        /// JSON array of points; one direction, or k for `polarized`.
        #[arg(long)]
        directions: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Method::Block)]
        method: Method,
        /// Step for `fd` and for the cross-check.
        #[arg(long, default_value_t = 1e-3)]
        lambda: f64,
        /// Also compare the block result with the average of the `+lambda`
        /// and `-lambda` finite differences and report the gap on stderr.
        #[arg(long)]
        cross_check: bool,
    },
    /// Taylor expansion at 0 up to a degree.
    Expand {
        #[arg(long)]
        handle: PathBuf,
        #[arg(long)]
        maxdeg: usize,
    },
    /// Evaluate a realization at a point of its δ-ball.
    RealizeEval {
        #[arg(long)]
        handle: PathBuf,
        #[arg(long)]
        point: PathBuf,
    },
    /// Isometry residual of a realization's colligation.
    RealizeCheck {
        #[arg(long)]
        handle: PathBuf,
    },
    /// Sampled sup-norm of a realization at one dimension.
    RealizeScan {
        #[arg(long)]
        handle: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Run the property suite against a handle.
    Verify {
        #[arg(long)]
        handle: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Block-bidiagonal evaluation.
    Block,
    /// Finite differences with step `--lambda`.
    Fd,
    /// Polarization over the given directions.
    Polarized,
}

struct Context {
    config: CliConfig,
    seed: u64,
    out: Option<PathBuf>,
}

impl Context {
    fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn handle(&self, path: &Path) -> Result<LoadedHandle, CliError> {
        read_json::<HandleFile>(path)?.load(self.config.truncation)
    }

    fn check_dim(&self, n: usize) -> Result<(), CliError> {
        if n > self.config.max_dim {
            return Err(CliError::Usage(format!(
                "dimension {n} exceeds the configured cap {}",
                self.config.max_dim
            )));
        }
        Ok(())
    }

    fn point(&self, path: &Path) -> Result<MatrixTuple, CliError> {
        let x = read_json::<PointFile>(path)?.to_tuple()?;
        self.check_dim(x.dim())?;
        Ok(x)
    }

    /// A realization file, or a handle file of kind `realization`.
    fn realization(&self, path: &Path) -> Result<(Realization, LoadedHandle), CliError> {
        let value: serde_json::Value = read_json(path)?;
        if value.get("kind").is_some() {
            let file: HandleFile = serde_json::from_value(value)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
            if file.kind != HandleKind::Realization {
                return Err(CliError::Usage(format!("{} is not a realization", path.display())));
            }
            let handle = file.load(self.config.truncation)?;
            let r = handle.realization().expect("kind checked").clone();
            Ok((r, handle))
        } else {
            let file: RealizationFile = serde_json::from_value(value)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
            let r = file.to_realization()?;
            Ok((r.clone(), LoadedHandle::Builtin(from_realization(r))))
        }
    }
}

fn note(stderr: &mut dyn Write, msg: impl std::fmt::Display) {
    // diagnostics are best effort
    let _ = writeln!(stderr, "{msg}");
}

fn diagnostic<T: Serialize>(stderr: &mut dyn Write, value: &T) {
    let _ = stderr.write_all(to_json(value).as_bytes());
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => read_json::<CliConfig>(path)?,
        None => CliConfig::default(),
    };
    config.validate()?;
    let ctx = Context {
        seed: cli.seed.unwrap_or(config.seed),
        out: cli.out.clone().or_else(|| config.out.clone()),
        config,
    };
    match cli.command {
        Command::Eval { handle, point } => {
            let f = ctx.handle(&handle)?;
            let x = ctx.point(&point)?;
            eval_and_emit(&f, &x, &ctx, stdout, stderr)
        }
        Command::Derive {
            handle,
            point,
            directions,
            k,
            method,
            lambda,
            cross_check,
        } => {
            let f = ctx.handle(&handle)?;
            let x = ctx.point(&point)?;
            let dirs = read_json::<Vec<PointFile>>(&directions)?
                .iter()
                .map(PointFile::to_tuple)
                .collect::<Result<Vec<_>, _>>()?;
            let m = derive(&f, &x, &dirs, k, method, lambda)?;
            if cross_check {
                let h = single_direction(&dirs, "--cross-check")?;
                let block = dk_diag(&f, &x, h, k)?;
                let fd = symmetric_fd(&f, &x, h, k, lambda)?;
                let gap = relative_gap(&block, &fd);
                let tolerance = ctx.config.tolerance("cross_check");
                diagnostic(
                    stderr,
                    &serde_json::json!({
                        "cross_check": {
                            "k": k,
                            "lambda": lambda,
                            "fd_scheme": "symmetric",
                            "block_vs_fd": gap,
                            "tolerance": tolerance,
                            "within_tolerance": gap <= tolerance,
                        }
                    }),
                );
            }
            emit(&MatrixFile::from_matrix(&m), ctx.out(), stdout)
        }
        Command::Expand { handle, maxdeg } => {
            let f = ctx.handle(&handle)?;
            let opts = ExtractOptions {
                scalar_tol: ctx.config.tolerance("scalar"),
                word_cap: ctx.config.word_cap,
                ..ExtractOptions::default()
            };
            let t = taylor_expand_with(&f, maxdeg, &opts)?;
            let diagnostics = DiagnosticsFile::new(&t, opts.scalar_tol);
            emit(&PolyFile::from_poly(&t.polynomial()), ctx.out(), stdout)?;
            match ctx.out() {
                Some(out) => {
                    let mut path = out.as_os_str().to_owned();
                    path.push(".diagnostics.json");
                    let path = PathBuf::from(path);
                    write_atomic(&path, &to_json(&diagnostics))?;
                    note(stdout, path.display());
                }
                None => diagnostic(stderr, &diagnostics),
            }
            Ok(())
        }
        Command::RealizeEval { handle, point } => {
            let (_, f) = ctx.realization(&handle)?;
            let x = ctx.point(&point)?;
            eval_and_emit(&f, &x, &ctx, stdout, stderr)
        }
        Command::RealizeCheck { handle } => {
            let (r, _) = ctx.realization(&handle)?;
            let residual = check_isometry(&r)?;
            let tolerance = ctx.config.tolerance("isometry");
            let report = IsometryFile {
                isometry_residual: residual,
                tolerance,
                isometric: residual <= tolerance,
            };
            emit(&report, ctx.out(), stdout)?;
            if !report.isometric {
                return Err(CliError::Failed(format!(
                    "colligation is not an isometry: residual {residual:e} > {tolerance:e}"
                )));
            }
            Ok(())
        }
        Command::RealizeScan { handle, n, samples } => {
            let (r, _) = ctx.realization(&handle)?;
            ctx.check_dim(n)?;
            let report = contractivity_scan(&r, n, samples, ctx.seed)?;
            emit(&ScanFile::from(&report), ctx.out(), stdout)?;
            if !report.passed {
                return Err(CliError::Failed(format!(
                    "sampled norm {} exceeds 1 at n = {n}",
                    report.max_norm
                )));
            }
            Ok(())
        }
        Command::Verify { handle } => {
            let f = ctx.handle(&handle)?;
            let reports = run_suite(&f, &ctx.config.suite_config(ctx.seed));
            let files: Vec<PropertyFile> = reports.iter().map(PropertyFile::from).collect();
            emit(&files, ctx.out(), stdout)?;
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("failed properties: {}", failed.join(", "))))
            }
        }
    }
}

fn eval_and_emit(
    f: &LoadedHandle,
    x: &MatrixTuple,
    ctx: &Context,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let value = f.eval(x)?;
    note(stderr, format_args!("operator norm: {}", operator_norm(&value)?));
    emit(&MatrixFile::from_matrix(&value), ctx.out(), stdout)
}

/// Mean of the one-sided sums at `lambda` and `-lambda`; the O(lambda)
/// error terms cancel.
fn symmetric_fd(
    f: &LoadedHandle,
    x: &MatrixTuple,
    h: &MatrixTuple,
    k: usize,
    lambda: f64,
) -> Result<ComplexMatrix, CliError> {
    let plus = dk_fd(f, x, h, k, lambda)?;
    let minus = dk_fd(f, x, h, k, -lambda)?;
    Ok((&plus + &minus).scale(ncfun_core::C64::new(0.5, 0.0)))
}

fn single_direction<'a>(dirs: &'a [MatrixTuple], what: &str) -> Result<&'a MatrixTuple, CliError> {
    match dirs {
        [h] => Ok(h),
        _ => Err(CliError::Usage(format!(
            "{what} needs exactly one direction, got {}",
            dirs.len()
        ))),
    }
}

fn derive(
    f: &LoadedHandle,
    x: &MatrixTuple,
    dirs: &[MatrixTuple],
    k: usize,
    method: Method,
    lambda: f64,
) -> Result<ComplexMatrix, CliError> {
    if k == 0 {
        return Ok(f.eval(x)?);
    }
    Ok(match method {
        Method::Block => dk_diag(f, x, single_direction(dirs, "--method block")?, k)?,
        Method::Fd => dk_fd(f, x, single_direction(dirs, "--method fd")?, k, lambda)?,
        Method::Polarized => {
            let hs = match dirs.len() {
                1 => vec![dirs[0].clone(); k],
                len if len == k => dirs.to_vec(),
                len => {
                    return Err(CliError::Usage(format!(
                        "--method polarized needs 1 or {k} directions, got {len}"
                    )))
                }
            };
            dk_multilinear(f, x, &hs)?
        }
    })
}
