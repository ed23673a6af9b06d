//! `spectral`: batch front end for the spectral-transfer library.
//!
//! Every command prints one JSON document (or writes it to `--out`).
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 resource budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use spectral_transfer::io::{inline_or_file, load_function, parse_symmetric};
use spectral_transfer::lift::{lift_stratification, SpectralFn, SpectralKind};
use spectral_transfer::matdecomp::{default_grouping_tol, eig_sym, random_symmetric};
use spectral_transfer::polyfun::{conjugate_stratification, stratify, SymmetryMode};
use spectral_transfer::idlab::proximal_identification_run;
use spectral_transfer::suite::{load_suite, run_suite};
use spectral_transfer::Error;

#[derive(Parser, Debug)]
#[command(name = "spectral", version, about = "Spectral lifts of symmetric polyhedral functions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Eigenvalue grouping tolerance (default 1e-8·(1 + ‖X‖_F)).
    #[arg(long = "tol.grouping", global = true)]
    tol_grouping: Option<f64>,
    /// Seed for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the timestamp field, making output byte-identical across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ordered eigendecomposition X = Uᵀ Diag(λ) U.
    Eig {
        /// JSON rows, inline or as a file path.
        #[arg(long)]
        matrix: String,
    },
    /// Strata, duality pairing, symmetric orbits and lifted dimensions.
    Stratify {
        /// Function definition file.
        #[arg(long)]
        function: PathBuf,
    },
    /// Proximal point run X_{k+1} = prox_{tF}(X_k) with eigenvalue patterns.
    ProxPath {
        #[arg(long)]
        function: PathBuf,
        /// Starting matrix, inline JSON or file path.
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        /// Size of a seeded symmetric perturbation added to the start.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
    /// Runs a verification suite; exit code 0 iff every probe meets its
    /// expectation.
    Verify {
        #[arg(long)]
        suite: PathBuf,
    },
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn load_spectral(path: &Path) -> Result<SpectralFn, Failure> {
    let file = load_function(path)?;
    Ok(file.to_spectral()?)
}

/// Returns the output document and whether verification passed.
fn run(cli: &Cli) -> Result<(Value, bool), Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Eig { matrix } => {
            let x = parse_symmetric(&inline_or_file(matrix)?)?;
            let e = eig_sym(&x)?;
            let grouping = c.tol_grouping.unwrap_or_else(|| default_grouping_tol(&x));
            Ok((
                json!({
                    "command": "eig",
                    "tolerances": { "grouping": grouping },
                    "lambda": e.lambda,
                    "U": e.u.as_matrix().to_rows(),
                    "residual": e.residual(&x),
                    "orthogonality_defect": e.u.as_matrix().orthogonality_defect(),
                }),
                true,
            ))
        }
        Command::Stratify { function } => {
            let file = load_function(function)?;
            let f = file.to_function()?;
            let strat = stratify(&f)?;
            let conj = conjugate_stratification(&f, &strat)?;
            let lifted = if file.kind == SpectralKind::Eigenvalue && f.symmetry_mode() != SymmetryMode::Plain {
                let l = lift_stratification(&SpectralFn::eigen(f.clone())?)?;
                serde_json::to_value(&l.pairs).expect("serializable")
            } else {
                Value::Null
            };
            Ok((
                json!({
                    "command": "stratify",
                    "tolerances": { "exact": 0.0 },
                    "n": f.n,
                    "symmetry_mode": f.symmetry_mode(),
                    "strata": strat.strata_json(),
                    "closure_order": strat.closure_order,
                    "sym_orbits": strat.sym_orbits,
                    "pairing": conj.pairing_json(&strat),
                    "bijection": conj.is_bijection(),
                    "lifted": lifted,
                }),
                true,
            ))
        }
        Command::ProxPath { function, matrix, t, max_iter, perturb } => {
            let f = load_spectral(function)?;
            let mut x0 = parse_symmetric(&inline_or_file(matrix)?)?;
            if *perturb != 0.0 {
                let seed = c.seed.ok_or_else(|| Failure::Input("--perturb needs --seed".into()))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let z = random_symmetric(x0.n(), &mut rng);
                x0 = x0.add(&z.scale(*perturb / z.frobenius_norm().max(f64::MIN_POSITIVE)));
            }
            let grouping = c.tol_grouping.unwrap_or_else(|| default_grouping_tol(&x0));
            let trace = proximal_identification_run(&f, &x0, *t, *max_iter, grouping)?;
            Ok((
                json!({
                    "command": "prox-path",
                    "tolerances": { "grouping": grouping, "fixed_point": 1e-12 },
                    "seed": c.seed,
                    "trace": trace,
                }),
                true,
            ))
        }
        Command::Verify { suite } => {
            let s = load_suite(suite)?;
            let base = suite.parent().unwrap_or(Path::new("."));
            let report = run_suite(&s, base)?;
            let pass = report.pass;
            Ok((json!({ "command": "verify", "report": report }), pass))
        }
    }
}

fn emit(doc: &Value, common: &Common) -> Result<(), String> {
    let mut doc = doc.clone();
    if !common.no_timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc["timestamp"] = json!(secs);
    }
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, pass)) => {
            if let Err(msg) = emit(&doc, &cli.common) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}
