use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qst::runner::convergence;
use qst::{simulate, Error, Overrides, Result, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "qst",
    version,
    about = "Phonon-mediated photon-to-qubit state transfer simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV time series plus a JSON summary.
    Simulate(RunArgs),
    /// Check a config file without running anything.
    Validate(RunArgs),
    /// Re-run at dt, dt/2 and dt/4 and report the final-value differences.
    Convergence(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    /// Rapidities (1/ns); replaces the config list.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    v: Option<Vec<f64>>,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<ScenarioConfig> {
        let overrides = Overrides {
            scenario: self.scenario,
            v: self.v.clone(),
            out: self.out.clone(),
        };
        let cfg = ScenarioConfig::load(&self.config, &overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(args) => {
            let cfg = args.load()?;
            println!("{}: ok ({} run(s))", args.config.display(), cfg.v.len());
        }
        Command::Simulate(args) => {
            let cfg = args.load()?;
            let (outcome, written) = simulate(&cfg, args.jobs as usize)?;
            for r in &outcome.runs {
                let (peak, at) = r.peak();
                let label = if r.record.fidelity.is_some() {
                    "F"
                } else {
                    "P3"
                };
                println!(
                    "v = {:<5} peak {label} = {peak:.6} at t = {at:.3} ns, final {label} = {:.6} ({:.1} s)",
                    r.v,
                    r.final_value(),
                    r.elapsed_s
                );
            }
            for p in &written {
                println!("wrote {}", p.display());
            }
        }
        Command::Convergence(args) => {
            let cfg = args.load()?;
            println!(
                "{:>6} {:>22} {:>12} {:>12} {:>8}",
                "v", "final(dt/4)", "|d(dt)|", "|d(dt/2)|", "ratio"
            );
            for c in convergence(&cfg, args.jobs as usize)? {
                println!(
                    "{:>6} {:>22.15} {:>12.3e} {:>12.3e} {:>8.2}",
                    c.v, c.values[2], c.diffs[0], c.diffs[1], c.ratio
                );
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
            eprintln!("error: {e}");
            ExitCode::from(Error::exit_code(&e) as u8)
        }
    }
}
