use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gapkit::verify::Suite;
use gapkit::{Command, RunConfig};

#[derive(Parser)]
#[command(name = "gapkit", version, about = "Beurling-Malliavin densities, gap characteristics and gap measures")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Cmd {
    /// Upper and lower BM density of a set.
    Density,
    /// Gap characteristic by the density formula and the Gram oracle.
    Gap,
    /// Completeness radius by the density formula and the defect oracle.
    Radius,
    /// Cauchy-decay and Fourier-scan gap tests on a measure file.
    Gaptest,
    /// Transport a gap measure onto a positive perturbation.
    Transport,
    /// Run a verification suite, or all of them.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Option<Suite>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

#[derive(Args)]
struct Flags {
    /// Set in the set DSL, e.g. `lattice-minus:alpha=1,residues=0 mod 3`.
    #[arg(long, global = true)]
    set: Option<String>,
    /// Base set for `transport` and `verify prop23`.
    #[arg(long, global = true)]
    base: Option<String>,
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long, global = true)]
    window: Option<usize>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    gap: Option<f64>,
    #[arg(long, global = true)]
    b: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Removed residues (`0 1 mod 5`) or indices (`0 3 7`).
    #[arg(long, global = true)]
    removed: Option<String>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    y_max: Option<f64>,
    /// Input measure file for `gaptest`.
    #[arg(long, global = true)]
    measure: Option<PathBuf>,
    /// Output measure file: the witness of `gap` or the result of `transport`.
    #[arg(long, global = true)]
    witness: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// TOML file with the same keys as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Flags {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            set: self.set.clone(),
            base: self.base.clone(),
            radius: self.radius,
            window: self.window,
            delta: self.delta,
            gap: self.gap,
            b: self.b,
            seed: self.seed,
            alpha: self.alpha,
            removed: self.removed.clone(),
            trials: self.trials,
            y_max: self.y_max,
            measure: self.measure.clone(),
            witness: self.witness.clone(),
            json: self.json.clone(),
            csv: self.csv.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = std::env::var("GAPKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let command = match cli.command {
        Cmd::Density => Command::Density,
        Cmd::Gap => Command::Gap,
        Cmd::Radius => Command::Radius,
        Cmd::Gaptest => Command::Gaptest,
        Cmd::Transport => Command::Transport,
        Cmd::Verify { suite } => Command::Verify(suite),
    };
    let flags = cli.flags.to_config();
    let cfg = match &cli.flags.config {
        Some(path) => match RunConfig::load(path) {
            Ok(file) => file.merged(&flags),
            Err(e) => {
                eprintln!("gapkit: {e}");
                return ExitCode::from(2);
            }
        },
        None => flags,
    };
    let result = gapkit::run(command, &cfg).and_then(|out| {
        gapkit::emit(command, &cfg, &out, &mut std::io::stdout().lock())?;
        Ok(out.passed)
    });
    match result {
        Ok(Some(false)) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gapkit: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
