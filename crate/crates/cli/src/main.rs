mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "multiquad", version, about = "Totally real multiquadratic fields: bases, shapes and counts")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate fields by discriminant, or describe one field given by --gens.
    Fields(FieldsArgs),
    /// Local densities, brute-force checks and Euler products.
    Density(DensityArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
    /// Compare field counts with the predicted main term at checkpoints.
    Experiment(ExperimentArgs),
    /// Evaluate the volume function F of a window.
    Volume(VolumeArgs),
    /// Print Gram matrices of the integral basis.
    Gram(GramArgs),
}

#[derive(Args, Debug)]
pub struct FieldsArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long = "max-disc")]
    pub max_disc: Option<u128>,
    /// Comma-separated generators; describes a single field.
    #[arg(long)]
    pub gens: Option<String>,
    #[arg(long)]
    pub case: Option<u8>,
    /// R_2,...,R_l (integers, p/q, decimals or inf).
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, default_value_t = 3)]
    pub ell: u32,
    /// A single prime.
    #[arg(long)]
    pub p: Option<u64>,
    /// All odd primes up to this bound, or the Euler product cutoff.
    #[arg(long)]
    pub pmax: Option<u64>,
    #[arg(long)]
    pub bruteforce: bool,
    #[arg(long)]
    pub euler: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "fields-per-case", default_value_t = 10)]
    pub fields_per_case: usize,
    #[arg(long, hide = true)]
    pub fault: Option<String>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Flat key=value file; flags override its entries.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Comma-separated discriminant bounds, ascending.
    #[arg(long)]
    pub checkpoints: Option<String>,
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub pmax: Option<u64>,
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    #[arg(long)]
    pub window: String,
    /// Also integrate numerically to this relative tolerance.
    #[arg(long)]
    pub quadrature: Option<f64>,
    /// Print F as a polynomial in L_j = log R_j.
    #[arg(long)]
    pub symbolic: bool,
}

#[derive(Args, Debug)]
pub struct GramArgs {
    #[arg(long)]
    pub gens: String,
    /// Gram matrix of the projection orthogonal to 1 instead of the full one.
    #[arg(long)]
    pub projected: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Fields(a) => commands::fields(a),
        Command::Density(a) => commands::density(a),
        Command::Verify(a) => commands::verify(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Volume(a) => commands::volume(a),
        Command::Gram(a) => commands::gram(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Budget(_) => 2,
                CliError::Check(_) => 3,
                CliError::Invalid(_) => 1,
            })
        }
    }
}
