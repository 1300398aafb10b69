//! `cloneforge`: transform, classify and evaluate pseudo-Boolean
//! function tables, build and run circuit gadgets, compute
//! approximation plans, and replay the verification suite.
//!
//! Exit codes: 0 on success, 1 on I/O or schema problems, 2 on domain
//! precondition violations.

use clap::{Parser, Subcommand};
use cloneforge_core::{circuit, fourier, ising, json, membership, verify, Error, DEFAULT_TOL};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cloneforge",
    about = "Pseudo-Boolean function tables, spectra, circuits and clone membership",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walsh-Hadamard transform of a function (JSON in, JSON out).
    Transform {
        /// Apply the unnormalized inverse instead.
        #[arg(long)]
        inverse: bool,
        /// Input file, `-` for standard input.
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Class membership report with witnesses.
    Classify {
        #[arg(long, default_value = "-")]
        input: String,
        /// Growth factor for the block-monotonicity verdict.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Evaluate a circuit on all terminal assignments (index order).
    EvalCircuit {
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Emit a named gadget circuit as JSON.
    BuildGadget {
        /// One of: eq-match, ising-half-match, sdp3 A B C D,
        /// sym4 C0 C2 C4, even-eq, even-ising LAMBDA.
        name: String,
        /// Numeric parameters for the parameterized gadgets.
        params: Vec<f64>,
    },
    /// Compute an approximation plan for a target.
    Approximate {
        /// `ising:<lambda>`, `forceodd4`, or `const:<z>`.
        #[arg(long)]
        target: String,
        /// Requested sup-norm error.
        #[arg(long)]
        eps: f64,
        /// Source Ising weight for stretch plans (defaults: 2 above 1,
        /// 1/2 below).
        #[arg(long)]
        source: Option<f64>,
    },
    /// Evaluate a product-summation formula to a function table.
    EvalPps {
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Run the verification suite (all checks, or selected ids).
    VerifyPaper {
        /// Run only the named checks; repeatable.
        #[arg(long)]
        only: Vec<String>,
        /// Run everything (the default when no --only is given).
        #[arg(long)]
        all: bool,
    },
}

enum CliError {
    Io(String),
    Schema(String),
    Domain(Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Schema(_) => 1,
            CliError::Domain(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) => format!("i/o error: {m}"),
            CliError::Schema(m) => format!("input error: {m}"),
            CliError::Domain(e) => format!("error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(_) => CliError::Schema(e.to_string()),
            other => CliError::Domain(other),
        }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(e.to_string()))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("CLONEFORGE_TOL") {
        Ok(text) => text
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| CliError::Io(format!("CLONEFORGE_TOL={text:?} is not a tolerance"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = tolerance()?;
    match cli.command {
        Command::Transform { inverse, input } => {
            let f = json::table_from_json(&read_input(&input)?)?;
            let image = if inverse {
                fourier::inverse_transform(&f)
            } else {
                fourier::transform(&f)
            };
            println!("{}", json::table_to_json(&image));
        }
        Command::Classify { input, alpha } => {
            let f = json::table_from_json(&read_input(&input)?)?;
            let report = membership::classify(&f, alpha, tol)?;
            println!("{}", json::report_to_json(&report));
        }
        Command::EvalCircuit { input } => {
            let circuit = json::circuit_from_json(&read_input(&input)?)?;
            let implemented = circuit.implemented_function()?;
            println!("{}", json::values_to_json(implemented.values()));
        }
        Command::BuildGadget { name, params } => {
            let take = |n: usize| -> Result<Vec<f64>, CliError> {
                if params.len() != n {
                    return Err(CliError::Schema(format!(
                        "gadget {name:?} takes {n} parameters, got {}",
                        params.len()
                    )));
                }
                Ok(params.clone())
            };
            let (gadget, scale) = match name.as_str() {
                "eq-match" => {
                    take(0)?;
                    (circuit::gadget_eq_match(), 1.0)
                }
                "ising-half-match" => {
                    take(0)?;
                    (circuit::gadget_ising_half_match(), 1.0)
                }
                "sdp3" => {
                    let p = take(4)?;
                    (circuit::gadget_sdp3(p[0], p[1], p[2], p[3])?, 1.0)
                }
                "sym4" => {
                    let p = take(3)?;
                    (circuit::gadget_sym4(p[0], p[1], p[2])?, 1.0)
                }
                "even-eq" => {
                    take(0)?;
                    (circuit::gadget_even_eq(), 0.5)
                }
                "even-ising" => {
                    let p = take(1)?;
                    circuit::gadget_even_ising(p[0])?
                }
                other => {
                    return Err(CliError::Schema(format!("unknown gadget {other:?}")));
                }
            };
            println!("{}", json::gadget_to_json(&gadget, scale));
        }
        Command::Approximate {
            target,
            eps,
            source,
        } => {
            if let Some(lambda_text) = target.strip_prefix("ising:") {
                let lambda: f64 = lambda_text
                    .parse()
                    .map_err(|_| CliError::Schema(format!("bad Ising weight {lambda_text:?}")))?;
                let plan = if lambda >= 1.0 {
                    ising::stretch_plan_antiferro(source.unwrap_or(2.0), lambda, eps)?
                } else {
                    ising::stretch_plan_ferro(source.unwrap_or(0.5), lambda, eps)?
                };
                println!("{}", json::stretch_plan_to_json(&plan));
            } else if target == "forceodd4" {
                let approx = ising::force_odd4_approx(eps)?;
                println!("{}", json::force_odd_approx_to_json(&approx));
            } else if let Some(z_text) = target.strip_prefix("const:") {
                let z: f64 = z_text
                    .parse()
                    .map_err(|_| CliError::Schema(format!("bad constant {z_text:?}")))?;
                let approx = ising::dirichlet_const(z, eps)?;
                println!("{}", json::dirichlet_to_json(&approx));
            } else {
                return Err(CliError::Schema(format!(
                    "unknown target {target:?}; expected ising:<lambda>, forceodd4 or const:<z>"
                )));
            }
        }
        Command::EvalPps { input } => {
            let formula = json::formula_from_json(&read_input(&input)?)?;
            println!("{}", json::table_to_json(&formula.eval()));
        }
        Command::VerifyPaper { only, all } => {
            let results = if only.is_empty() || all {
                verify::run_all(tol)
            } else {
                let mut selected = Vec::new();
                for id in &only {
                    match verify::run_check(id, tol) {
                        Some(result) => selected.push(result),
                        None => {
                            return Err(CliError::Schema(format!(
                                "unknown check {id:?}; known ids: {}",
                                verify::check_ids().join(", ")
                            )));
                        }
                    }
                }
                selected
            };
            let mut failed = 0usize;
            for result in &results {
                let status = if result.passed { "PASS" } else { "FAIL" };
                println!("{status} {} - {}", result.id, result.title);
                for line in &result.details {
                    println!("    {line}");
                }
                if !result.passed {
                    failed += 1;
                }
            }
            println!(
                "{} checks: {} passed, {} failed",
                results.len(),
                results.len() - failed,
                failed
            );
            if failed > 0 {
                return Err(CliError::Domain(Error::VerificationFailed(format!(
                    "{failed} checks failed"
                ))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.code())
        }
    }
}
