use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crnf::cr_tensors::{report, GenericSubmanifold};
use crnf::equivalence::{equivalent_with_tol, search_normalizations};
use crnf::error::{Error, Result};
use crnf::full_nf::{normal_form, NormalizationP, NormalizationPJson};
use crnf::linalg::takagi;
use crnf::parse::{parse_hypersurface, parse_input, Input};
use crnf::partial_nf::{aut_dim_bound, matrix_from_json, matrix_to_json, partial_nf, MatrixJson};

/// Normal forms of real hypersurfaces at generic Levi degeneracies.
#[derive(Parser, Debug)]
#[command(name = "crnf", version)]
struct Cli {
    /// Truncation order (weighted degree).
    #[arg(long, global = true, default_value_t = 8)]
    trunc: i32,
    /// Weighted degree of the normal form.
    #[arg(long, global = true)]
    degree: Option<u32>,
    /// Comparison tolerance for `equiv` (at least 1e-6 is used).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of CR variables when it cannot be read off the input.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// JSON output instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Nondegeneracy, dim E_j and the tensors psi_j.
    Invariants {
        input: String,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
    },
    /// Partial normal form and case tag.
    PartialNf { input: String },
    /// Complete normal form through --degree.
    NormalForm {
        input: String,
        /// JSON file with normalization parameters (identity if omitted).
        #[arg(long)]
        normalization: Option<String>,
    },
    /// Compare two hypersurfaces through their normal forms.
    Equiv {
        a: String,
        b: String,
        #[arg(long)]
        normalization_a: Option<String>,
        #[arg(long)]
        normalization_b: Option<String>,
        /// Heuristic: try this many random normalizations for B (uses --seed).
        #[arg(long, default_value_t = 0)]
        search: usize,
    },
    /// Takagi factorization of a complex symmetric matrix given as JSON rows
    /// of [re, im] pairs.
    Takagi { matrix: String },
    /// Bound on the dimension of the stability group.
    AutBound {
        /// Comma separated lambda_1..lambda_{n-1}.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
}

fn read_arg(arg: &str) -> Result<String> {
    if std::path::Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Error::Input(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn load_p(path: Option<&String>, n: usize) -> Result<NormalizationP> {
    match path {
        None => Ok(NormalizationP::identity(n)),
        Some(p) => {
            let j: NormalizationPJson =
                serde_json::from_str(&read_arg(p)?).map_err(|e| Error::Input(format!("normalization: {e}")))?;
            NormalizationP::from_json(&j)
        }
    }
}

fn emit<T: Serialize>(cli: &Cli, v: &T) {
    let value = serde_json::to_value(v).expect("serializable report");
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth a panic
    let _ = if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())
    } else {
        match value {
            serde_json::Value::Object(map) => map.iter().try_for_each(|(k, v)| writeln!(out, "{k}: {v}")),
            other => writeln!(out, "{other}"),
        }
    };
}

fn degree(cli: &Cli) -> Result<u32> {
    let d = cli.degree.unwrap_or(cli.trunc.max(4) as u32);
    if d < 4 || d as i32 > cli.trunc {
        return Err(Error::Input(format!("need 4 <= degree <= trunc, got degree {d}, trunc {}", cli.trunc)));
    }
    Ok(d)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Invariants { input, kmax } => {
            let m = match parse_input(input, cli.n, cli.trunc)? {
                Input::Hyper(h) => GenericSubmanifold::from_hypersurface(&h),
                Input::Generic(g) => g,
            };
            emit(cli, &report(&m, *kmax)?);
        }
        Cmd::PartialNf { input } => {
            let m = parse_hypersurface(input, cli.n, cli.trunc)?;
            emit(cli, &partial_nf(&m)?.to_json());
        }
        Cmd::NormalForm { input, normalization } => {
            let m = parse_hypersurface(input, cli.n, cli.trunc)?;
            let p = load_p(normalization.as_ref(), m.n())?;
            emit(cli, &normal_form(&m, &p, degree(cli)?)?.to_json());
        }
        Cmd::Equiv { a, b, normalization_a, normalization_b, search } => {
            let ma = parse_hypersurface(a, cli.n, cli.trunc)?;
            let mb = parse_hypersurface(b, cli.n, cli.trunc)?;
            let pa = load_p(normalization_a.as_ref(), ma.n())?;
            let pb = load_p(normalization_b.as_ref(), mb.n())?;
            let d = degree(cli)?;
            let tol = cli.tol.max(1e-6);
            let rep = if *search > 0 {
                search_normalizations(&ma, &mb, &pa, d, *search, cli.seed, tol)?
            } else {
                equivalent_with_tol(&ma, &mb, &pa, &pb, d, tol)?
            };
            emit(cli, &rep);
        }
        Cmd::Takagi { matrix } => {
            let j: MatrixJson =
                serde_json::from_str(&read_arg(matrix)?).map_err(|e| Error::Input(format!("matrix: {e}")))?;
            let t = takagi(&matrix_from_json(&j)?)?;
            emit(cli, &json!({"lambda": t.lambda, "U": matrix_to_json(&t.u)}));
        }
        Cmd::AutBound { lambda } => {
            let lam = lambda
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Input(format!("lambda: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            emit(cli, &json!({"n": lam.len() + 1, "bound": aut_dim_bound(lam.len() + 1, &lam)}));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
