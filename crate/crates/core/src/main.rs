//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification, 2 malformed arguments or
//! configuration, 3 evaluation error. Errors are written to standard error
//! as a JSON object `{"error": kind, "message": text}`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use weierstrass::eisenstein::{eisenstein_coefficients, lattice_sum_e, EisensteinWeight, QTruncation};
use weierstrass::reduction::{reduce, ModularQuantity};
use weierstrass::symbolic::{differentiate, parse_expr, DiffVar};
use weierstrass::verify::{run_identity_suite, DEFAULT_SEED};
use weierstrass::{Engine, Error, TolerancePolicy, UpperHalfPoint};

/// Environment variable naming the tolerance config file.
const CONFIG_ENV: &str = "WEIERSTRASS_CONFIG";

#[derive(Parser, Debug)]
#[command(name = "weierstrass", version, about = "Weierstrass elliptic functions and quasimodular forms on H x C")]
struct Cli {
    /// Tolerance config file (key = value); overrides $WEIERSTRASS_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    tol_file: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at (tau, z).
    Eval {
        #[arg(long = "fn", value_enum)]
        func: EvalFn,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Option<Complex64>,
    },
    /// Reduce tau into the fundamental domain and z into the period cell.
    Reduce {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Option<Complex64>,
    },
    /// Differentiate an expression in z or tau.
    Diff {
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum)]
        var: Var,
    },
    /// Run the identity suite.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Print q-expansion coefficients, or the term table of wp0 / zeta0.
    Series {
        #[arg(long = "fn", value_enum)]
        func: SeriesFn,
        #[arg(long)]
        order: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum EvalFn {
    Wp,
    Wp1,
    Zeta,
    E2,
    E4,
    E6,
    G2,
    G3,
    Delta,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Var {
    Z,
    Tau,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SeriesFn {
    Wp0,
    Zeta0,
    E2,
    E4,
    E6,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let part = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {:?}", t.trim()));
    let v = Complex64::new(part(re)?, part(im)?);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite value {s:?}"))
    }
}

enum Failure {
    Usage(Error),
    Eval(Error),
    Verification,
}

fn emit_error(e: &Error) {
    eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
}

fn complex_json(v: Complex64) -> Value {
    json!({ "re": v.re, "im": v.im })
}

fn load_policy(flag: Option<PathBuf>) -> Result<TolerancePolicy, Error> {
    let path = flag.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        None => Ok(TolerancePolicy::default()),
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            TolerancePolicy::from_config_str(&text)
        }
    }
}

fn upper(v: Complex64) -> Result<UpperHalfPoint, Failure> {
    UpperHalfPoint::new(v).map_err(Failure::Usage)
}

fn eval(engine: &Engine, func: EvalFn, tau: Complex64, z: Option<Complex64>) -> Result<Value, Failure> {
    let tau = upper(tau)?;
    let needs_z = matches!(func, EvalFn::Wp | EvalFn::Wp1 | EvalFn::Zeta);
    let (value, est_error) = match (needs_z, z) {
        (true, None) => return Err(Failure::Usage(Error::Config("--z is required for wp, wp1 and zeta".into()))),
        (true, Some(z)) => {
            let w = match func {
                EvalFn::Wp => engine.wp_anywhere(tau, z),
                EvalFn::Wp1 => engine.wp_prime_anywhere(tau, z),
                _ => engine.zeta_anywhere(tau, z),
            }
            .map_err(Failure::Eval)?;
            (w.value, w.est_error)
        }
        (false, _) => {
            let which = match func {
                EvalFn::E2 => ModularQuantity::E2,
                EvalFn::E4 => ModularQuantity::E4,
                EvalFn::E6 => ModularQuantity::E6,
                EvalFn::G2 => ModularQuantity::G2,
                EvalFn::G3 => ModularQuantity::G3,
                _ => ModularQuantity::Delta,
            };
            let w = engine.modular_anywhere(tau, which).map_err(Failure::Eval)?;
            (w.value, w.est_error)
        }
    };
    Ok(json!({ "re": value.re, "im": value.im, "est_error": est_error }))
}

fn reduce_cmd(tau: Complex64, z: Option<Complex64>) -> Result<Value, Failure> {
    let tau = upper(tau)?;
    let r = reduce(tau, z.unwrap_or_default()).map_err(Failure::Eval)?;
    let mut out = json!({
        "gamma": { "a": r.gamma.a, "b": r.gamma.b, "c": r.gamma.c, "d": r.gamma.d },
        "tau_star": complex_json(r.tau_star.value()),
        "scale": complex_json(r.scale),
    });
    if z.is_some() {
        out["m"] = json!(r.m);
        out["n"] = json!(r.n);
        out["z_star"] = complex_json(r.z_star);
    }
    Ok(out)
}

/// Integer coefficients of `E₂ₖ`, confirmed against the lattice sum at `i` and `2i`.
fn eisenstein_series(weight: EisensteinWeight, order: usize) -> Result<Value, Failure> {
    let coeffs = eisenstein_coefficients(weight, order);
    let check_order = order.max(QTruncation::DEFAULT_ORDER);
    let full = eisenstein_coefficients(weight, check_order);
    let radius = if weight == EisensteinWeight::Two { 5000 } else { 400 };
    for tau in [UpperHalfPoint::i(), UpperHalfPoint::from_parts(0.0, 2.0).expect("2i")] {
        let q = tau.nome();
        let mut series = Complex64::new(0.0, 0.0);
        let mut qn = Complex64::new(1.0, 0.0);
        for c in &full {
            series += qn * (*c as f64);
            qn *= q;
        }
        let oracle = lattice_sum_e(tau, weight, radius) / weight.full_sum_scale();
        let gap = (series - oracle).norm() / 1f64.max(oracle.norm());
        if gap > 1e-8 {
            return Err(Failure::Eval(Error::DegenerateConfiguration(format!(
                "q-series disagrees with the lattice sum at tau = {}: relative gap {gap:e}",
                tau.value()
            ))));
        }
    }
    Ok(json!(coeffs))
}

/// Term tables of the literal series. Each `m`-indexed term is a function of
/// `u = e^{2πiz}` and is printed as text rather than expanded in powers of `q`.
fn term_table(func: SeriesFn, order: usize) -> Value {
    let terms: Vec<Value> = match func {
        SeriesFn::Wp0 => (0..=order)
            .map(|m| {
                let term = if m == 0 {
                    "u/(1 - u)^2 + 1/12".to_string()
                } else {
                    format!("q^{m}*u/(1 - q^{m}*u)^2 + q^{m}/u/(1 - q^{m}/u)^2 - 2*q^{m}/(1 - q^{m})^2")
                };
                json!({ "m": m, "term": term })
            })
            .collect(),
        _ => (0..=order)
            .map(|m| {
                let term = if m == 0 {
                    "-u/(1 - u) - 1/2".to_string()
                } else {
                    format!("-q^{m}*u/(1 - q^{m}*u) + q^{m}/u/(1 - q^{m}/u)")
                };
                json!({ "m": m, "term": term })
            })
            .collect(),
    };
    let (name, prefactor, extra) = match func {
        SeriesFn::Wp0 => ("wp0", "(2*pi*I)^2", Value::Null),
        _ => ("zeta0", "2*pi*I", json!("eta1*z, eta1 = (2*pi*I)^2/12*(24*sum_m q^m/(1 - q^m)^2 - 1)")),
    };
    let mut out = json!({ "fn": name, "order": order, "prefactor": prefactor, "terms": terms });
    if !extra.is_null() {
        out["plus"] = extra;
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    let policy = load_policy(cli.tol_file).map_err(Failure::Usage)?;
    let engine = Engine::new(policy.clone(), QTruncation::default()).map_err(Failure::Usage)?;
    match cli.command {
        Command::Eval { func, tau, z } => println!("{}", eval(&engine, func, tau, z)?),
        Command::Reduce { tau, z } => println!("{}", reduce_cmd(tau, z)?),
        Command::Diff { expr, var } => {
            let e = parse_expr(&expr).map_err(Failure::Usage)?;
            let v = match var {
                Var::Z => DiffVar::Z,
                Var::Tau => DiffVar::Tau,
            };
            println!("{}", differentiate(&e, v));
        }
        Command::Verify { seed, json: _, csv } => {
            let report = run_identity_suite(seed, &policy).map_err(Failure::Eval)?;
            if csv {
                print!("{}", report.to_csv().map_err(Failure::Eval)?);
            } else {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            }
            if !report.all_passed() {
                return Err(Failure::Verification);
            }
        }
        Command::Series { func, order } => {
            let out = match func {
                SeriesFn::E2 => eisenstein_series(EisensteinWeight::Two, order)?,
                SeriesFn::E4 => eisenstein_series(EisensteinWeight::Four, order)?,
                SeriesFn::E6 => eisenstein_series(EisensteinWeight::Six, order)?,
                SeriesFn::Wp0 | SeriesFn::Zeta0 => term_table(func, order),
            };
            println!("{out}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            eprintln!("{}", json!({ "error": "Usage", "message": msg.trim_end() }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            emit_error(&e);
            ExitCode::from(2)
        }
        Err(Failure::Eval(e)) => {
            emit_error(&e);
            ExitCode::from(3)
        }
    }
}
