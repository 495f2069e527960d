//! Command-line frontend: validate effect files, evaluate strengths along
//! rays, compare effects in the Loewner order, classify attainable strength
//! sets, run the property suite, and reconstruct effects from samples.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use effectscope::error::Error;
use effectscope::io::{load_effect, Report, SamplesFile};
use effectscope::lambda_range::lambda_range_classify;
use effectscope::oracle::{haar_rays, strength_by_bisection, RayGenerator};
use effectscope::reconstruct::reconstruct_effect;
use effectscope::strength::{evaluate_strength, is_saturated, strength, witness_ray};
use effectscope::suite::{run_check, CheckConfig};
use effectscope::{loewner_leq, Ray, Tolerances};

#[derive(Parser)]
#[command(
    name = "effectscope",
    version,
    about = "Strength functions of quantum effect operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// PSD slack used by Loewner comparisons and feasibility tests.
    #[arg(long = "tol-psd", value_name = "EPS")]
    tol_psd: Option<f64>,

    /// Range-membership cutoff (the single zero-eigenvalue threshold).
    #[arg(long = "tol-range", value_name = "EPS")]
    tol_range: Option<f64>,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(eps) = self.tol_psd {
            tol.eps_psd = eps;
        }
        if let Some(eps) = self.tol_range {
            tol.eps_range = eps;
        }
        tol
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate an effect file and report its spectrum
    Validate {
        effect: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate strengths along an inline ray or seeded random rays
    Strength {
        effect: PathBuf,
        /// Inline ray: comma-separated complex components, e.g. "1,0.5-0.5i"
        #[arg(long, value_name = "COMPONENTS", conflicts_with = "seed")]
        ray: Option<String>,
        /// Seed for sampled rays (required unless --ray is given)
        #[arg(long)]
        seed: Option<u64>,
        /// Number of sampled rays
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two effects in the Loewner order
    Compare {
        effect_a: PathBuf,
        effect_b: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the attainable strength set against the spectrum
    #[command(name = "lambda-range")]
    LambdaRange {
        effect: PathBuf,
        /// Seed for the sampled rays
        #[arg(long)]
        seed: u64,
        /// Number of random rays sampled on top of the structured set
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suite; exits 1 if any property fails
    Check {
        /// Seed for all random corpora
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Hilbert-space dimensions to cover
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        /// Trials per property and dimension
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct an effect from a strength-samples file
    Reconstruct {
        samples: PathBuf,
        /// Expected dimension; must match the file when given
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, out, exit)) => {
            let text = report.render();
            if let Some(path) = out {
                if let Err(err) = std::fs::write(&path, &text) {
                    eprintln!("effectscope: cannot write {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            ExitCode::from(exit)
        }
        Err(err) => {
            eprintln!("effectscope: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Exit-code contract: 0 success, 1 property failure, 2 parse/usage,
/// 3 not an effect, 4 dimension mismatch, 5 singular or inconsistent
/// reconstruction, 6 numerical failure.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::NonFiniteEntry { .. }
        | Error::ZeroVector
        | Error::InvalidSample { .. }
        | Error::InvalidTolerance { .. } => 2,
        Error::NotAnEffect { .. } => 3,
        Error::DimensionMismatch { .. } => 4,
        Error::SingularSystem { .. } | Error::InconsistentKernel { .. } => 5,
        Error::NonConvergence { .. }
        | Error::DomainError { .. }
        | Error::NotInvertible { .. }
        | Error::SearchExhausted { .. } => 6,
    }
}

type CommandOutput = (Report, Option<PathBuf>, u8);

fn run(command: Command) -> Result<CommandOutput, Error> {
    match command {
        Command::Validate { effect, tol, out } => cmd_validate(&effect, tol, out),
        Command::Strength {
            effect,
            ray,
            seed,
            n,
            tol,
            out,
        } => cmd_strength(&effect, ray, seed, n, tol, out),
        Command::Compare {
            effect_a,
            effect_b,
            tol,
            out,
        } => cmd_compare(&effect_a, &effect_b, tol, out),
        Command::LambdaRange {
            effect,
            seed,
            n,
            tol,
            out,
        } => cmd_lambda_range(&effect, seed, n, tol, out),
        Command::Check {
            seed,
            dims,
            trials,
            tol,
            out,
        } => cmd_check(seed, dims, trials, tol, out),
        Command::Reconstruct {
            samples,
            dim,
            tol,
            out,
        } => cmd_reconstruct(&samples, dim, tol, out),
    }
}

fn cmd_validate(path: &Path, tol: TolArgs, out: Option<PathBuf>) -> Result<CommandOutput, Error> {
    let tolerances = tol.tolerances();
    let loaded = load_effect(path, tolerances)?;
    let mut report = Report::new("validate", tolerances);
    report.push_input(format!("effect:{}:{}", path.display(), loaded.digest));
    for warning in &loaded.warnings {
        report.warn(warning.clone());
    }
    report.results = json!({
        "dim": loaded.effect.dim(),
        "label": loaded.label,
        "eigenvalues": loaded.effect.eigenvalues(),
        "is_effect": true,
        "is_projection": loaded.effect.is_projection(),
        "max_asymmetry": loaded.effect.matrix().max_asymmetry(),
    });
    Ok((report, out, 0))
}

fn cmd_strength(
    path: &Path,
    ray_spec: Option<String>,
    seed: Option<u64>,
    n: usize,
    tol: TolArgs,
    out: Option<PathBuf>,
) -> Result<CommandOutput, Error> {
    let tolerances = tol.tolerances();
    let loaded = load_effect(path, tolerances)?;
    let effect = &loaded.effect;
    let mut report = Report::new("strength", tolerances);
    report.push_input(format!("effect:{}:{}", path.display(), loaded.digest));
    for warning in &loaded.warnings {
        report.warn(warning.clone());
    }

    let rays: Vec<Ray> = match (&ray_spec, seed) {
        (Some(spec), _) => {
            report.push_input(format!("ray:{spec}"));
            let components = parse_complex_vector(spec)?;
            if components.len() != effect.dim() {
                return Err(Error::DimensionMismatch {
                    left: effect.dim(),
                    right: components.len(),
                });
            }
            vec![Ray::from_components(&components)?]
        }
        (None, Some(seed)) => {
            if n == 0 {
                return Err(Error::Parse {
                    detail: "--n must be at least 1".into(),
                });
            }
            report.push_input(format!("seed:{seed}"));
            report.push_input(format!("n:{n}"));
            let mut gen = RayGenerator::new(seed, effect.dim());
            haar_rays(&mut gen, n)
        }
        (None, None) => {
            return Err(Error::Parse {
                detail: "give either --ray or --seed (with --n) to choose rays".into(),
            })
        }
    };

    let mut rows = Vec::with_capacity(rays.len());
    for (index, ray) in rays.iter().enumerate() {
        let eval = evaluate_strength(effect, ray)?;
        let bisection = strength_by_bisection(effect, ray, &tolerances)?;
        if eval.borderline {
            report.warn(format!(
                "BorderlineRange: ray {index} has range residual {:.3e}",
                eval.range_residual
            ));
        }
        rows.push(json!({
            "ray": ray,
            "closed_form": eval.value,
            "bisection": bisection,
            "expectation": effect.expectation(ray),
            "in_range": eval.in_range,
            "borderline": eval.borderline,
            "saturated": is_saturated(effect, ray)?,
        }));
    }
    report.results = json!({ "dim": effect.dim(), "rows": rows });
    Ok((report, out, 0))
}

fn cmd_compare(
    path_a: &Path,
    path_b: &Path,
    tol: TolArgs,
    out: Option<PathBuf>,
) -> Result<CommandOutput, Error> {
    let tolerances = tol.tolerances();
    let a = load_effect(path_a, tolerances)?;
    let b = load_effect(path_b, tolerances)?;
    let mut report = Report::new("compare", tolerances);
    report.push_input(format!("effect_a:{}:{}", path_a.display(), a.digest));
    report.push_input(format!("effect_b:{}:{}", path_b.display(), b.digest));
    for warning in a.warnings.iter().chain(&b.warnings) {
        report.warn(warning.clone());
    }

    let leq = loewner_leq(&a.effect, &b.effect)?;
    let geq = loewner_leq(&b.effect, &a.effect)?;
    let verdict = match (leq, geq) {
        (true, true) => "=",
        (true, false) => "<=",
        (false, true) => ">=",
        (false, false) => "incomparable",
    };
    // A strict or incomparable verdict comes with a ray certifying the
    // non-dominated direction, reported with both strengths.
    let witness = match (leq, geq) {
        (true, true) => None,
        (true, false) => witness_ray(&b.effect, &a.effect)?,
        _ => witness_ray(&a.effect, &b.effect)?,
    };
    let witness_payload = match witness {
        Some(ray) => {
            let sa = strength(&a.effect, &ray)?;
            let sb = strength(&b.effect, &ray)?;
            json!({ "ray": ray, "strength_a": sa, "strength_b": sb })
        }
        None => serde_json::Value::Null,
    };
    report.results = json!({ "verdict": verdict, "witness": witness_payload });
    Ok((report, out, 0))
}

fn cmd_lambda_range(
    path: &Path,
    seed: u64,
    n: usize,
    tol: TolArgs,
    out: Option<PathBuf>,
) -> Result<CommandOutput, Error> {
    if n == 0 {
        return Err(Error::Parse {
            detail: "--n must be at least 1".into(),
        });
    }
    let tolerances = tol.tolerances();
    let loaded = load_effect(path, tolerances)?;
    let mut report = Report::new("lambda-range", tolerances);
    report.push_input(format!("effect:{}:{}", path.display(), loaded.digest));
    report.push_input(format!("seed:{seed}"));
    report.push_input(format!("n:{n}"));
    for warning in &loaded.warnings {
        report.warn(warning.clone());
    }
    let mut gen = RayGenerator::new(seed, loaded.effect.dim());
    let classified = lambda_range_classify(&loaded.effect, &mut gen, n)?;
    for violation in &classified.violations {
        if violation.reason == "borderline_range" {
            report.warn(format!(
                "BorderlineRange: sampled value {} near the range boundary",
                violation.value
            ));
        }
    }
    report.results = serde_json::to_value(&classified).expect("report serializes");
    Ok((report, out, 0))
}

fn cmd_check(
    seed: u64,
    dims: Vec<usize>,
    trials: usize,
    tol: TolArgs,
    out: Option<PathBuf>,
) -> Result<CommandOutput, Error> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Parse {
            detail: "--dims must list positive dimensions".into(),
        });
    }
    if trials == 0 {
        return Err(Error::Parse {
            detail: "--trials must be at least 1".into(),
        });
    }
    let tolerances = tol.tolerances();
    let cfg = CheckConfig {
        seed,
        dims,
        trials,
        tol: tolerances,
    };
    let outcome = run_check(&cfg)?;
    let mut report = Report::new("check", tolerances);
    report.push_input(format!("seed:{seed}"));
    report.push_input(format!("dims:{:?}", cfg.dims));
    report.push_input(format!("trials:{trials}"));
    let exit = if outcome.all_passed { 0 } else { 1 };
    report.results = serde_json::to_value(&outcome).expect("report serializes");
    Ok((report, out, exit))
}

fn cmd_reconstruct(
    path: &Path,
    dim: Option<usize>,
    tol: TolArgs,
    out: Option<PathBuf>,
) -> Result<CommandOutput, Error> {
    let tolerances = tol.tolerances();
    let bytes = std::fs::read(path)?;
    let digest = format!("sha256:{}", effectscope::io::sha256_hex(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
        detail: e.to_string(),
    })?;
    let file = SamplesFile::parse(&text)?;
    if let Some(expected) = dim {
        if expected != file.dim {
            return Err(Error::DimensionMismatch {
                left: expected,
                right: file.dim,
            });
        }
    }
    let samples = file.to_samples()?;
    let mut report = Report::new("reconstruct", tolerances);
    report.push_input(format!("samples:{}:{}", path.display(), digest));
    report.push_input(format!("dim:{}", file.dim));
    let result = reconstruct_effect(&samples, file.dim, &tolerances)?;
    report.results = json!({
        "dim": file.dim,
        "entries": result.effect.matrix().to_pairs(),
        "eigenvalues": result.effect.eigenvalues(),
        "residual": result.residual,
        "conditioning": result.conditioning,
        "kernel_dim": result.kernel_dim,
    });
    Ok((report, out, 0))
}

/// Parses "1,0.5-0.5i,2i" into complex components.
fn parse_complex_vector(spec: &str) -> Result<Vec<Complex64>, Error> {
    spec.split(',').map(parse_complex).collect()
}

fn parse_complex(token: &str) -> Result<Complex64, Error> {
    let cleaned: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse {
            detail: "empty ray component".into(),
        });
    }
    let parse_real = |s: &str| -> Result<f64, Error> {
        s.parse::<f64>().map_err(|_| Error::Parse {
            detail: format!("cannot parse '{s}' as a number"),
        })
    };
    if let Some(body) = cleaned.strip_suffix(['i', 'I']) {
        // Split an "a+bi" / "a-bi" form at the sign of the imaginary part:
        // the last '+'/'-' that is neither leading nor part of an exponent.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..body.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("", body),
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => parse_real(s)?,
        };
        let re = if re_str.is_empty() {
            0.0
        } else {
            parse_real(re_str)?
        };
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(parse_real(&cleaned)?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let cases = [
            ("1", Complex64::new(1.0, 0.0)),
            ("-0.5", Complex64::new(-0.5, 0.0)),
            ("i", Complex64::new(0.0, 1.0)),
            ("-i", Complex64::new(0.0, -1.0)),
            ("2i", Complex64::new(0.0, 2.0)),
            ("1+i", Complex64::new(1.0, 1.0)),
            ("1-2i", Complex64::new(1.0, -2.0)),
            ("-1.5+0.25i", Complex64::new(-1.5, 0.25)),
            ("1e-3+2e-4i", Complex64::new(1e-3, 2e-4)),
            (" 1 + 2i ", Complex64::new(1.0, 2.0)),
        ];
        for (text, expected) in cases {
            let got = parse_complex(text).unwrap();
            assert_eq!(got, expected, "parsing {text}");
        }
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        let v = parse_complex_vector("1,1").unwrap();
        assert_eq!(v.len(), 2);
    }
}
