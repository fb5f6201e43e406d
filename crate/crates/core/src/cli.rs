//! The `rearrange` command-line front end.
//!
//! Every subcommand writes JSON (or CSV with `--csv`) to standard output.
//! Exit codes: 0 on success, 1 when a verification suite finds a violation,
//! 2 on any input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::constants::{cp_constant, extremal_curve, sharpness_profile};
use crate::covering::{decompose_indices, IntervalFamily};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::io::{read_json, InstanceFile};
use crate::maximal::MaximalProfile;
use crate::stepfn::{distribution, rearrange, StepFunction};
use crate::verify::{random_instance, run_suite, Instance, SuiteKind, SuiteOptions};

/// Environment variable holding the default tolerance for bisections.
pub const TOL_ENV: &str = "REARRANGE_TOL";

#[derive(Parser, Debug)]
#[command(name = "rearrange", version, about = "Exact maximal functions and rearrangements on the real line")]
struct Cli {
    /// Suppress the version banner on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symmetric decreasing rearrangement f* of an instance.
    Rearrange {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Distribution function t ↦ μ(f > t).
    Distfn {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Maximal function queries.
    Maximal {
        #[command(subcommand)]
        op: MaximalOp,
    },
    /// Split a family of open intervals into two disjoint subfamilies.
    Cover {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Certified bracket for the weak-type constant C_p.
    Cp {
        #[arg(long)]
        p: Rational,
        #[arg(long, env = TOL_ENV, default_value = "1e-12")]
        tol: Rational,
    },
    /// Extremal configuration at a point t.
    Sharpness {
        #[arg(long)]
        p: Rational,
        #[arg(long)]
        t: Rational,
        #[arg(long, env = TOL_ENV, default_value = "1e-12")]
        tol: Rational,
        /// Emit the curve s ↦ b(s) as CSV instead of the JSON summary.
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Run a seeded verification suite.
    Verify {
        kind: VerifyKind,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exponent for the weak-norm suite.
        #[arg(long, default_value = "2")]
        p: Rational,
        /// Additive budget for the weak-norm suite.
        #[arg(long, default_value = "1e-9")]
        tol: Rational,
        /// Emit per-instance margins as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// CSV samples (x, value) for plotting.
    EmitPlot {
        what: PlotKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Print a seeded random instance file.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        size: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MaximalOp {
    /// M_μ f(x).
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
    },
    /// E_λ = {M_μ f > λ} with its measure.
    Superlevel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        lambda: Rational,
    },
    /// (M_μ f)*(x), bracketed.
    Star {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, env = TOL_ENV, default_value = "1e-12")]
        tol: Rational,
    },
    /// Weak-L^p norm of M_μ f.
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: Rational,
    },
    /// All critical averages.
    Critical {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerifyKind {
    Thm1,
    Thm2,
    Hl,
    Ds,
    Replay,
}

impl From<VerifyKind> for SuiteKind {
    fn from(k: VerifyKind) -> Self {
        match k {
            VerifyKind::Thm1 => SuiteKind::Thm1,
            VerifyKind::Thm2 => SuiteKind::Thm2,
            VerifyKind::Hl => SuiteKind::Hl,
            VerifyKind::Ds => SuiteKind::Ds,
            VerifyKind::Replay => SuiteKind::Replay,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlotKind {
    /// The input step function.
    F,
    /// Its rearrangement f*.
    Rearranged,
    /// M_μ f.
    Maximal,
    /// t ↦ μ(f > t).
    Distribution,
}

enum Outcome {
    Ok,
    Violation,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let text = e.to_string();
                    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
                    let _ = writeln!(err, "{line}");
                    2
                }
            };
        }
    };
    if !cli.quiet {
        let _ = writeln!(err, "rearrange {}", env!("CARGO_PKG_VERSION"));
    }
    match execute(cli.command, out) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Violation) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    InstanceFile::load(path)?.into_instance()
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Argument(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Argument(format!("cannot write output: {e}")))
}

fn emit_text(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::Argument(format!("cannot write output: {e}")))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Rearrange { input } => {
            let inst = load(&input)?;
            emit_json(out, &rearrange(&inst.function, &inst.measure)?)?;
        }
        Command::Distfn { input } => {
            let inst = load(&input)?;
            emit_json(out, &distribution(&inst.function, &inst.measure))?;
        }
        Command::Maximal { op } => maximal(op, out)?,
        Command::Cover { input } => {
            let family: IntervalFamily = read_json(&input)?;
            let split = decompose_indices(&family);
            let pick = |ix: &[usize]| IntervalFamily::new(ix.iter().map(|&i| family.intervals[i].clone()).collect());
            emit_json(
                out,
                &json!({
                    "first_indices": split.first,
                    "second_indices": split.second,
                    "first": pick(&split.first),
                    "second": pick(&split.second),
                }),
            )?;
        }
        Command::Cp { p, tol } => emit_json(out, &cp_constant(&p, &tol)?)?,
        Command::Sharpness { p, t, tol, csv, samples } => {
            if csv {
                let mut text = String::from("x,value\n");
                for (s, b) in extremal_curve(&p, &t, samples)? {
                    text.push_str(&format!("{s},{b}\n"));
                }
                emit_text(out, &text)?;
            } else {
                emit_json(out, &sharpness_profile(&p, &t, &tol)?)?;
            }
        }
        Command::Verify { kind, instances, seed, p, tol, csv } => {
            let options = SuiteOptions { p, tol };
            let outcome = run_suite(kind.into(), instances, seed, &options);
            if csv {
                emit_text(out, &outcome.to_csv())?;
            } else {
                emit_json(out, &outcome)?;
            }
            if !outcome.all_passed() {
                return Ok(Outcome::Violation);
            }
        }
        Command::EmitPlot { what, input, samples } => {
            let inst = load(&input)?;
            emit_text(out, &plot(what, &inst, samples)?)?;
        }
        Command::Gen { seed, size } => {
            emit_text(out, &InstanceFile::from_instance(&random_instance(seed, size)).to_json())?;
            emit_text(out, "\n")?;
        }
    }
    Ok(Outcome::Ok)
}

fn maximal(op: MaximalOp, out: &mut dyn Write) -> Result<()> {
    match op {
        MaximalOp::Eval { input, x } => {
            let inst = load(&input)?;
            let value = MaximalProfile::new(&inst.function, &inst.measure).maximal_at(&x)?;
            emit_json(out, &json!({ "x": x, "value": value }))
        }
        MaximalOp::Superlevel { input, lambda } => {
            let inst = load(&input)?;
            emit_json(out, &MaximalProfile::new(&inst.function, &inst.measure).superlevel(&lambda)?)
        }
        MaximalOp::Star { input, x, tol } => {
            let inst = load(&input)?;
            let bracket = MaximalProfile::new(&inst.function, &inst.measure).rearranged_at(&x, &tol)?;
            emit_json(out, &json!({ "x": x, "bracket": bracket }))
        }
        MaximalOp::Norm { input, p } => {
            let inst = load(&input)?;
            let norm = MaximalProfile::new(&inst.function, &inst.measure).weak_norm(&p)?;
            emit_json(out, &json!({ "p": p, "norm": norm }))
        }
        MaximalOp::Critical { input } => {
            let inst = load(&input)?;
            emit_json(out, &MaximalProfile::new(&inst.function, &inst.measure).critical_lambdas())
        }
    }
}

/// `(x, value)` at every breakpoint and midpoint, with a zero margin on
/// both sides, so that plots render true staircases.
fn staircase(f: &StepFunction) -> Vec<(f64, f64)> {
    let xs = f.breakpoints();
    let mut rows = Vec::new();
    let (Some(first), Some(last)) = (xs.first().cloned(), xs.last().cloned()) else {
        return vec![(-1.0, 0.0), (1.0, 0.0)];
    };
    rows.push(((&first - Rational::one()).to_f64(), 0.0));
    for w in xs.windows(2) {
        let v = f.value_at(&w[0]).to_f64();
        rows.push((w[0].to_f64(), v));
        rows.push((w[0].midpoint(&w[1]).to_f64(), v));
        rows.push((w[1].to_f64(), v));
    }
    rows.push((last.to_f64(), 0.0));
    rows.push(((&last + Rational::one()).to_f64(), 0.0));
    rows
}

fn plot(what: PlotKind, inst: &Instance, samples: usize) -> Result<String> {
    let rows: Vec<(f64, f64)> = match what {
        PlotKind::F => staircase(&inst.function),
        PlotKind::Rearranged => staircase(&rearrange(&inst.function, &inst.measure)?),
        PlotKind::Maximal => {
            let mut xs = inst.function.breakpoints();
            xs.extend(inst.measure.breakpoints());
            xs.sort();
            let lo = xs.first().cloned().unwrap_or_else(Rational::zero) - Rational::one();
            let hi = xs.last().cloned().unwrap_or_else(Rational::zero) + Rational::one();
            let n = samples.max(2) as i64;
            xs.extend((0..=n).map(|i| &lo + (&hi - &lo) * Rational::frac(i, n)));
            xs.sort();
            xs.dedup();
            let profile = MaximalProfile::new(&inst.function, &inst.measure);
            xs.iter()
                .filter_map(|x| profile.maximal_at(x).ok().map(|v| (x.to_f64(), v.to_f64())))
                .collect()
        }
        PlotKind::Distribution => {
            let d = distribution(&inst.function, &inst.measure);
            let mut ts = d.critical_values();
            ts.push(Rational::zero());
            let top = inst.function.max_value() + Rational::one();
            ts.push(top);
            ts.sort();
            ts.dedup();
            let mids: Vec<Rational> = ts.windows(2).map(|w| w[0].midpoint(&w[1])).collect();
            ts.extend(mids);
            ts.sort();
            ts.iter()
                .map(|t| d.eval(t).map(|m| (t.to_f64(), m.to_f64())))
                .collect::<Result<_>>()?
        }
    };
    let mut text = String::from("x,value\n");
    for (x, v) in rows {
        text.push_str(&format!("{x},{v}\n"));
    }
    Ok(text)
}
