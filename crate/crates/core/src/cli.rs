//! The `dplap` command line: `verify`, `sample`, `counterexample`, `chords`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::radial::{log_radii, touching_from_above};
use crate::scenario::{run, sample_grid, RunOptions, Scenario};
use crate::superposition::{counterexample, Counterexample, CounterexampleKind};
use crate::RadialFundamental;

/// Exit code: every suite returned its expected verdict.
pub const EXIT_OK: i32 = 0;
/// Exit code: a suite disagreed with its expected verdict, or a precondition failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit code: the input could not be read or validated.
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dplap",
    version,
    about = "Dominative p-Laplacian checks, grids and counterexamples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the suites selected by a scenario and write a JSON report.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        tol_scale: Option<f64>,
        /// Record wall-clock runtime in the report (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate the operators on the scenario's planar grid and write CSV.
    Sample {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid resolution per axis, overriding the scenario.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Build a perturbation that breaks superposition at the scenario's base point.
    Counterexample {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate one-sided chord limits and touching fundamental solutions.
    Chords {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated radii, overriding the scenario.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Linear,
    Fundsol,
    Reflection,
}

impl From<KindArg> for CounterexampleKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Linear => CounterexampleKind::Linear,
            KindArg::Fundsol => CounterexampleKind::Fundsol,
            KindArg::Reflection => CounterexampleKind::Reflection,
        }
    }
}

/// Error carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: msg.into(),
    }
}

fn load(path: &Path) -> Result<(Scenario, Vec<u8>), Failure> {
    let raw = std::fs::read(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&raw).map_err(|e| invalid(format!("{}: not UTF-8: {e}", path.display())))?;
    let scenario = Scenario::from_json(text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok((scenario, raw))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| invalid(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn library(e: Error) -> Failure {
    invalid(e.to_string())
}

pub fn cmd_verify(scenario: &Path, out: Option<&Path>, opts: RunOptions, timing: bool) -> Result<i32, Failure> {
    let start = Instant::now();
    let (s, raw) = load(scenario)?;
    let mut report = run(&s, &raw, opts).map_err(library)?;
    if timing {
        report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    }
    emit(out, &to_json(&report)?)?;
    for suite in &report.suites {
        log::info!(
            "{:?}: passed = {}, expected = {}",
            suite.suite,
            suite.passed,
            suite.expected_pass
        );
    }
    Ok(if report.all_as_expected { EXIT_OK } else { EXIT_FAIL })
}

fn fmt_cell(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn cmd_sample(scenario: &Path, out: Option<&Path>, points: Option<usize>) -> Result<i32, Failure> {
    let (s, _) = load(scenario)?;
    let mut grid = s
        .grid
        .clone()
        .ok_or_else(|| invalid("scenario has no `grid` section"))?;
    if let Some(m) = points {
        grid.resolution = [m, m];
    }
    let field = s.combined_field().map_err(library)?;
    let rows = sample_grid(&field, s.p, &grid, s.sampling.exclusion_radius).map_err(library)?;
    let mut csv = String::from("x,y,value,|grad|,lambda_max,D_p,Delta_p\n");
    for r in rows {
        write!(csv, "{},{}", fmt_cell(r.x), fmt_cell(r.y)).expect("write to string");
        match r.values {
            Some(v) => {
                for x in v {
                    write!(csv, ",{}", fmt_cell(x)).expect("write to string");
                }
            }
            None => csv.push_str(",,,,,"),
        }
        csv.push('\n');
    }
    emit(out, &csv)?;
    Ok(EXIT_OK)
}

/// Counterexample together with its witness recomputed from the jet of `u + v`.
#[derive(Debug, Serialize)]
pub struct CounterexampleArtifact {
    pub scenario: String,
    pub counterexample: Counterexample,
    pub recomputed_witness: f64,
}

pub fn cmd_counterexample(kind: CounterexampleKind, scenario: &Path, out: Option<&Path>) -> Result<i32, Failure> {
    let (s, _) = load(scenario)?;
    let spec = s
        .counterexample
        .clone()
        .ok_or_else(|| invalid("scenario has no `counterexample` section"))?;
    let u = s.combined_field().map_err(library)?;
    let ce = match counterexample(kind, &u, &spec.x0, s.p, spec.s, spec.eps) {
        Ok(ce) => ce,
        Err(e @ (Error::Precondition(_) | Error::NeedsLargerScale { .. } | Error::NeedsSmallerStep { .. })) => {
            return Err(Failure {
                code: EXIT_FAIL,
                message: e.to_string(),
            });
        }
        Err(e) => return Err(library(e)),
    };
    let recomputed = ce.recompute_witness(&u).map_err(library)?;
    let artifact = CounterexampleArtifact {
        scenario: s.name.clone(),
        counterexample: ce,
        recomputed_witness: recomputed,
    };
    emit(out, &to_json(&artifact)?)?;
    Ok(if recomputed > 0.0 { EXIT_OK } else { EXIT_FAIL })
}

pub fn cmd_chords(scenario: &Path, out: Option<&Path>, radii: Option<Vec<f64>>) -> Result<i32, Failure> {
    let (s, _) = load(scenario)?;
    let spec = s
        .chords
        .clone()
        .ok_or_else(|| invalid("scenario has no `chords` section"))?;
    let mut radii = radii.unwrap_or(spec.radii);
    if let Some(bad) = radii.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(invalid(format!("radii must be finite and >= 0, got {bad}")));
    }
    if radii.is_empty() {
        radii = log_radii(0.1, 10.0, 25);
        radii.extend_from_slice(spec.profile.kink_radii());
        radii.sort_by(f64::total_cmp);
    }
    let rf = RadialFundamental::new(s.n, s.p).map_err(library)?;
    let mut csv = String::from("b,C_b_minus,C_b_plus,touch_C1,touch_ok\n");
    let mut all_ok = true;
    for b in radii {
        match touching_from_above(&spec.profile, b, &rf) {
            Ok(t) => {
                let (cm, cp) = match t.limits {
                    Some(l) => (fmt_cell(l.c_minus), fmt_cell(l.c_plus)),
                    None => (String::new(), String::new()),
                };
                all_ok &= t.touches;
                writeln!(csv, "{},{cm},{cp},{},{}", fmt_cell(b), fmt_cell(t.c1()), t.touches).expect("write to string");
            }
            Err(Error::Singular { .. }) => {
                writeln!(csv, "{},pole,pole,,pole", fmt_cell(b)).expect("write to string");
            }
            Err(Error::InvalidProfile(msg)) => {
                log::warn!("b = {b}: {msg}");
                all_ok = false;
                writeln!(csv, "{},,,,false", fmt_cell(b)).expect("write to string");
            }
            Err(e) => return Err(library(e)),
        }
    }
    emit(out, &csv)?;
    Ok(if all_ok { EXIT_OK } else { EXIT_FAIL })
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Verify {
            scenario,
            out,
            seed,
            points,
            tol_scale,
            timing,
        } => cmd_verify(
            &scenario,
            out.as_deref(),
            RunOptions {
                seed,
                points,
                tol_scale,
            },
            timing,
        ),
        Command::Sample { scenario, out, points } => cmd_sample(&scenario, out.as_deref(), points),
        Command::Counterexample { kind, scenario, out } => cmd_counterexample(kind.into(), &scenario, out.as_deref()),
        Command::Chords { scenario, out, radii } => cmd_chords(&scenario, out.as_deref(), radii),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("dplap: {}", f.message);
            f.code
        }
    }
}
