//! `conjucirc`: fidelity tables, optimality certificates, Young-diagram
//! reports and the inversion demo.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use conjucirc::circuit::{conjugation_fidelity, inversion_simulation, theory_fidelity};
use conjucirc::haar::{haar_unitary, HaarSampler};
use conjucirc::performance::{certify_with_tol, mc_performance_operator, performance_operator};
use conjucirc::young::{
    c_lambda_closed, irrep_dim, multiplicity, optimal_fidelity, partitions, to_f64,
};
use conjucirc::Error;

const AFTER_HELP: &str = "\
Tolerances: algebraic identities use --tol (default 1e-9); Monte Carlo
quantities are judged by a 3-sigma rule (5 sigma for entrywise Ω checks).

CSV columns, in order:
  fidelity  d,k,samples,seed,theory,observed_min,observed_max,observed_mean
  certify   d,k,primal_value,theory_value,dual_c,dual_c_value,min_eig_gap,
            feasibility_residuals.<name>...,tolerance,complete,valid
  young     partition,irrep_dim,multiplicity,c_lambda,c_lambda_value,maximizer
  invert    d,k,samples,successes,success_rate,success_probability,
            binomial_stderr,theory_success_rate,conditional_fidelity,theory_fidelity
  omega     d,k,mc_samples,seed,max_abs_diff,max_z_score,trace,theory_trace,consistent
  table     d,k,theory,theory_value

Exit codes: 0 success, 1 certificate or consistency failure, 2 usage error.
The environment variable CONJUCIRC_SIZE_CAP overrides the operator side cap.";

#[derive(Parser, Debug)]
#[command(name = "conjucirc", version, about = "Optimal parallel conjugation of unknown unitaries", after_help = AFTER_HELP)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct DimArgs {
    /// Qudit dimension.
    #[arg(long)]
    d: usize,
    /// Number of parallel uses of the unitary.
    #[arg(long)]
    k: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Circuit fidelity on Haar-random unitaries against (k+1)/(d(d-k)).
    Fidelity {
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, visible_alias = "trials", default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Primal value, dual constant and eigenvalue gap of the optimality certificate.
    Certify {
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Young diagrams with at most d rows: d_λ, m_λ and c(λ).
    Young {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Probabilistic inversion: conjugation followed by a transposition gadget.
    Invert {
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, visible_alias = "trials", default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the performance operator with its Monte Carlo estimate.
    Omega {
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, default_value_t = 10_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimal fidelity for every 2 <= d <= dmax and 1 <= k <= d-1.
    Table {
        #[arg(long)]
        dmax: usize,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange(_) | Error::InvalidPartition(_) | Error::ZeroMultiplicity(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn check_dk(d: usize, k: usize) -> Result<(), Failure> {
    if d < 2 || k == 0 || k >= d {
        return Err(Failure::Usage(format!(
            "need d >= 2 and 1 <= k <= d-1, got d={d}, k={k}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct FidelityReport {
    d: usize,
    k: usize,
    samples: usize,
    seed: u64,
    theory: f64,
    observed_min: f64,
    observed_max: f64,
    observed_mean: f64,
}

#[derive(Serialize)]
struct YoungRow {
    partition: String,
    irrep_dim: u64,
    multiplicity: String,
    c_lambda: String,
    c_lambda_value: f64,
    maximizer: bool,
}

#[derive(Serialize)]
struct InvertReport {
    d: usize,
    k: usize,
    samples: usize,
    successes: usize,
    success_rate: f64,
    success_probability: f64,
    binomial_stderr: f64,
    theory_success_rate: f64,
    conditional_fidelity: f64,
    theory_fidelity: f64,
}

#[derive(Serialize)]
struct OmegaReport {
    d: usize,
    k: usize,
    mc_samples: usize,
    seed: u64,
    max_abs_diff: f64,
    max_z_score: f64,
    trace: f64,
    theory_trace: f64,
    consistent: bool,
}

#[derive(Serialize)]
struct TableRow {
    d: usize,
    k: usize,
    theory: String,
    theory_value: f64,
}

/// Rows to print plus whether the run counts as a success.
type Output = (Vec<Value>, bool);

fn rows<T: Serialize>(items: &[T]) -> Vec<Value> {
    items
        .iter()
        .map(|x| serde_json::to_value(x).expect("serializable"))
        .collect()
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Fidelity {
            dims,
            samples,
            seed,
        } => {
            check_dk(dims.d, dims.k)?;
            if samples == 0 {
                return Err(Failure::Usage("--samples must be positive".into()));
            }
            let mut values = Vec::with_capacity(samples);
            for i in 0..samples {
                let u = HaarSampler::stream(seed, i as u64).special_unitary(dims.d);
                values.push(conjugation_fidelity(dims.d, dims.k, &u)?);
            }
            let report = FidelityReport {
                d: dims.d,
                k: dims.k,
                samples,
                seed,
                theory: theory_fidelity(dims.d, dims.k),
                observed_min: values.iter().cloned().fold(f64::INFINITY, f64::min),
                observed_max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                observed_mean: values.iter().sum::<f64>() / samples as f64,
            };
            Ok((rows(&[report]), true))
        }
        Command::Certify { dims, tol } => {
            check_dk(dims.d, dims.k)?;
            if tol.is_nan() || tol <= 0.0 {
                return Err(Failure::Usage("--tol must be positive".into()));
            }
            let report = certify_with_tol(dims.d, dims.k, tol)?;
            let valid = report.valid;
            Ok((rows(&[report]), valid))
        }
        Command::Young { n, d } => {
            if n == 0 || d == 0 {
                return Err(Failure::Usage("need n >= 1 and d >= 1".into()));
            }
            let shapes = partitions(n, d);
            let cs = shapes
                .iter()
                .map(|l| c_lambda_closed(l, d))
                .collect::<Result<Vec<_>, _>>()?;
            let best = cs.iter().max().cloned();
            let table: Vec<YoungRow> = shapes
                .iter()
                .zip(&cs)
                .map(|(l, c)| YoungRow {
                    partition: l.to_string(),
                    irrep_dim: irrep_dim(l),
                    multiplicity: multiplicity(l, d).to_string(),
                    c_lambda: c.to_string(),
                    c_lambda_value: to_f64(c),
                    maximizer: Some(c) == best.as_ref(),
                })
                .collect();
            Ok((rows(&table), true))
        }
        Command::Invert {
            dims,
            samples,
            seed,
        } => {
            check_dk(dims.d, dims.k)?;
            if samples == 0 {
                return Err(Failure::Usage("--samples must be positive".into()));
            }
            let u = haar_unitary(dims.d, seed);
            let r = inversion_simulation(dims.d, dims.k, &u, samples, seed)?;
            let q = 1.0 / (dims.d * dims.d) as f64;
            let ok = (r.success_rate - q).abs() <= 3.0 * r.binomial_stderr;
            let report = InvertReport {
                d: r.d,
                k: r.k,
                samples: r.samples,
                successes: r.successes,
                success_rate: r.success_rate,
                success_probability: r.success_probability,
                binomial_stderr: r.binomial_stderr,
                theory_success_rate: q,
                conditional_fidelity: r.conditional_fidelity,
                theory_fidelity: r.theory_fidelity,
            };
            Ok((rows(&[report]), ok))
        }
        Command::Omega {
            dims,
            mc_samples,
            seed,
        } => {
            if dims.d < 2 || dims.k < 1 {
                return Err(Failure::Usage("need d >= 2 and k >= 1".into()));
            }
            if mc_samples < 2 {
                return Err(Failure::Usage("--mc-samples must be at least 2".into()));
            }
            let omega = performance_operator(dims.d, dims.k)?;
            let mc = mc_performance_operator(dims.d, dims.k, mc_samples, seed)?;
            let z = mc.max_z_score(&omega, 1e-12);
            let report = OmegaReport {
                d: dims.d,
                k: dims.k,
                mc_samples,
                seed,
                max_abs_diff: mc.mean.max_abs_diff(&omega),
                max_z_score: z,
                trace: omega.trace().re,
                theory_trace: (dims.d as f64).powi(dims.k as i32 - 1),
                consistent: z <= 5.0,
            };
            let ok = report.consistent;
            Ok((rows(&[report]), ok))
        }
        Command::Table { dmax } => {
            if dmax < 2 {
                return Err(Failure::Usage("--dmax must be at least 2".into()));
            }
            let mut table = Vec::new();
            for d in 2..=dmax {
                for k in 1..d {
                    let f = optimal_fidelity(d, k);
                    table.push(TableRow {
                        d,
                        k,
                        theory: f.to_string(),
                        theory_value: to_f64(&f),
                    });
                }
            }
            Ok((rows(&table), true))
        }
    }
}

/// Flatten nested objects into `parent.child` keys, preserving order.
fn flatten(value: &Value, prefix: &str, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(v, &key, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(rows: &[Value], format: Format) -> String {
    match format {
        Format::Json => {
            let body = if rows.len() == 1 {
                rows[0].clone()
            } else {
                Value::Array(rows.to_vec())
            };
            serde_json::to_string_pretty(&body).expect("serializable") + "\n"
        }
        Format::Csv => {
            let flat: Vec<Vec<(String, String)>> = rows
                .iter()
                .map(|r| {
                    let mut out = Vec::new();
                    flatten(r, "", &mut out);
                    out
                })
                .collect();
            let mut s = String::new();
            if let Some(first) = flat.first() {
                let header: Vec<String> = first.iter().map(|(k, _)| csv_field(k)).collect();
                s.push_str(&header.join(","));
                s.push('\n');
            }
            for row in &flat {
                let cells: Vec<String> = row.iter().map(|(_, v)| csv_field(v)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (i, r) in rows.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                let mut out = Vec::new();
                flatten(r, "", &mut out);
                let width = out.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in out {
                    s.push_str(&format!("{k:<width$}  {v}\n"));
                }
            }
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((rows, ok)) => {
            print!("{}", render(&rows, cli.format));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `conjucirc --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
