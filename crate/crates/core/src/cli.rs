//! Command-line front end.
//!
//! Exit codes make the tool scriptable as a predicate: 0 = YES (feasible /
//! not identically zero), 1 = NO, 2 = usage or parse error, 3 = invalid
//! instance. Every randomized run's report carries the seed that replays
//! it, whether user-supplied or drawn from entropy.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use crate::decider::{
    decide_oracle_certified, decide_slocc, make_witness, DecideError, DecisionParams,
    DecisionReport,
};
use crate::linalg::{GaussianRational, Mat};
use crate::pit::{parse_formula, pit_to_slocc};
use crate::states::{charlie_slices, schmidt_rank, BipartiteState, PureTensor3, StateError};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "slocc-pit",
    version,
    about = "Decide tripartite-to-bipartite SLOCC convertibility, and polynomial identities via reduction to it"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide conversion of a tripartite state to a rank-d bipartite state.
    Decide {
        /// State file: JSON {"dims": [dA,dB,dC], "entries": [{i,j,k,re,im},..]}.
        state: PathBuf,
        /// Target Schmidt rank d.
        #[arg(long)]
        target_rank: usize,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Decide whether a formula's polynomial is identically zero.
    #[command(group(ArgGroup::new("input").required(true).args(["formula", "file"])))]
    Pit {
        /// Formula text, e.g. "x1*x2 + 3/4".
        formula: Option<String>,
        /// Read the formula from a file instead.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Build Charlie's measurement witness for explicit coefficients.
    Witness {
        state: PathBuf,
        /// Comma-separated coefficients over the nonzero slices, e.g. "1,2+3i,-1/2".
        #[arg(long, value_delimiter = ',', required = true)]
        coeffs: Vec<GaussianRational>,
    },
    /// Certified exact decision via the symbolic oracle (small instances).
    Oracle {
        state: PathBuf,
        #[arg(long)]
        target_rank: usize,
        /// Seed for the witness search.
        #[arg(long)]
        seed: Option<u64>,
        /// Emit the JSON report: bare `--json` to stdout, `--json PATH` to a file.
        #[arg(long, num_args = 0..=1)]
        json: Option<Option<PathBuf>>,
    },
    /// Print the Charlie-index slice matrices of a state.
    Slices { state: PathBuf },
    /// Print the Schmidt rank of a bipartite state (d_C = 1).
    SchmidtRank { state: PathBuf },
}

#[derive(Args, Debug)]
pub struct RunFlags {
    /// Sample set size M (default 64 * target rank; must exceed 2d).
    #[arg(long)]
    pub set_size: Option<u64>,
    /// Number of independent sampling trials.
    #[arg(long, default_value_t = 20)]
    pub trials: u32,
    /// RNG seed; drawn from entropy when omitted, always echoed in the report.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decide with the exact symbolic oracle instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Emit the JSON report: bare `--json` to stdout (replacing the summary),
    /// or `--json PATH` to write it to a file.
    #[arg(long, num_args = 0..=1)]
    pub json: Option<Option<PathBuf>>,
}

impl RunFlags {
    fn params(&self, target_rank: usize) -> DecisionParams {
        DecisionParams {
            set_size: self.set_size.unwrap_or(64 * target_rank.max(1) as u64),
            trials: self.trials,
            seed: self.seed.unwrap_or_else(rand::random),
        }
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

pub fn dispatch(cli: Cli) -> i32 {
    match cli.command {
        Command::Decide { state, target_rank, run } => run_decide(&state, target_rank, &run),
        Command::Pit { formula, file, run } => run_pit(formula.as_deref(), file.as_deref(), &run),
        Command::Witness { state, coeffs } => run_witness(&state, &coeffs),
        Command::Oracle { state, target_rank, seed, json } => {
            run_oracle(&state, target_rank, seed, &json)
        }
        Command::Slices { state } => run_slices(&state),
        Command::SchmidtRank { state } => run_schmidt_rank(&state),
    }
}

fn run_decide(state: &Path, target_rank: usize, run: &RunFlags) -> i32 {
    let psi = match load_tensor(state) {
        Ok(psi) => psi,
        Err(code) => return code,
    };
    let params = run.params(target_rank);
    match decide_slocc(&psi, target_rank, &params, run.exact) {
        Ok(report) => emit_decision(&report, None, &run.json),
        Err(e) => decide_error(e),
    }
}

fn run_pit(formula_text: Option<&str>, file: Option<&Path>, run: &RunFlags) -> i32 {
    let text = match (formula_text, file) {
        (Some(t), None) => t.to_string(),
        (None, Some(path)) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        _ => unreachable!("clap enforces exactly one input"),
    };
    let formula = match parse_formula(text.trim()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let (psi, target) = pit_to_slocc(&formula);
    let params = run.params(target);
    let stats = FormulaStats {
        formula_size: formula.size(),
        variable_count: formula.var_count(),
        matrix_dim: target,
    };
    match decide_slocc(&psi, target, &params, run.exact) {
        Ok(report) => emit_decision(&report, Some(stats), &run.json),
        Err(e) => decide_error(e),
    }
}

fn run_witness(state: &Path, coeffs: &[GaussianRational]) -> i32 {
    let psi = match load_tensor(state) {
        Ok(psi) => psi,
        Err(code) => return code,
    };
    let basis = charlie_slices(&psi);
    match make_witness(&psi, &basis, coeffs) {
        Ok(witness) => {
            println!("{}", pretty(&witness));
            EXIT_YES
        }
        Err(e) => decide_error(e),
    }
}

fn run_oracle(
    state: &Path,
    target_rank: usize,
    seed: Option<u64>,
    json: &Option<Option<PathBuf>>,
) -> i32 {
    let psi = match load_tensor(state) {
        Ok(psi) => psi,
        Err(code) => return code,
    };
    let params = DecisionParams::defaults_for(target_rank, seed.unwrap_or_else(rand::random));
    match decide_oracle_certified(&psi, target_rank, &params) {
        Ok(report) => emit_decision(&report, None, json),
        Err(e) => decide_error(e),
    }
}

fn run_slices(state: &Path) -> i32 {
    let psi = match load_tensor(state) {
        Ok(psi) => psi,
        Err(code) => return code,
    };
    let basis = charlie_slices(&psi);
    let out = SlicesOut {
        shape: [basis.d_b(), basis.d_a()],
        count: basis.len(),
        charlie_indices: psi.nonzero_slice_indices(),
        slices: basis.mats().to_vec(),
    };
    println!("{}", pretty(&out));
    EXIT_YES
}

fn run_schmidt_rank(state: &Path) -> i32 {
    let psi = match load_tensor(state) {
        Ok(psi) => psi,
        Err(code) => return code,
    };
    match BipartiteState::from_tensor(&psi) {
        Ok(phi) => {
            println!("{}", schmidt_rank(&phi));
            EXIT_YES
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

#[derive(Serialize, Clone, Copy)]
struct FormulaStats {
    formula_size: usize,
    variable_count: usize,
    matrix_dim: usize,
}

#[derive(Serialize)]
struct PitReport<'a> {
    #[serde(flatten)]
    stats: FormulaStats,
    #[serde(flatten)]
    decision: &'a DecisionReport,
}

#[derive(Serialize)]
struct SlicesOut {
    shape: [usize; 2],
    count: usize,
    charlie_indices: Vec<usize>,
    slices: Vec<Mat>,
}

fn load_tensor(path: &Path) -> Result<PureTensor3, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })?;
    PureTensor3::from_json(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        match e {
            StateError::Json(_) => EXIT_USAGE,
            _ => EXIT_INVALID,
        }
    })
}

fn decide_error(e: DecideError) -> i32 {
    eprintln!("error: {e}");
    EXIT_INVALID
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// Prints the verdict and routes the JSON report per `--json`; returns the
/// exit code implied by the answer.
fn emit_decision(
    report: &DecisionReport,
    stats: Option<FormulaStats>,
    json: &Option<Option<PathBuf>>,
) -> i32 {
    let rendered = match stats {
        Some(stats) => pretty(&PitReport { stats, decision: report }),
        None => pretty(report),
    };
    match json {
        Some(Some(path)) => {
            if let Err(e) = fs::write(path, rendered.as_bytes()) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            print_summary(report, stats);
        }
        Some(None) => println!("{rendered}"),
        None => print_summary(report, stats),
    }
    match report.answer {
        crate::decider::Answer::Yes => EXIT_YES,
        crate::decider::Answer::No => EXIT_NO,
    }
}

fn print_summary(report: &DecisionReport, stats: Option<FormulaStats>) {
    if let Some(stats) = stats {
        println!(
            "formula size: {}  variables: {}  matrix dim: {}",
            stats.formula_size, stats.variable_count, stats.matrix_dim
        );
    }
    println!("answer: {}", report.answer);
    println!("target rank: {}", report.target_rank);
    println!("method: {}", report.method);
    println!("error bound: {}", report.error_bound);
    println!(
        "set size: {}  trials: {}  seed: {}",
        report.params.set_size, report.params.trials, report.params.seed
    );
    if let Some(witness) = &report.witness {
        println!("witness rank: {}", witness.rank);
        println!("outcome probability: {}", witness.outcome_probability);
        let u: Vec<String> = witness.u.iter().map(ToString::to_string).collect();
        println!("witness u: [{}]", u.join(", "));
    }
}
