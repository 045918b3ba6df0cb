//! `vff`: train the spectral ansatz, compare fast-forwarding with Trotter
//! evolution, inspect the learned spectrum, or evaluate an LHST cost.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spectral_vff::experiment::{
    cmd_cost, cmd_fast_forward, cmd_spectrum, cmd_train, exit_code, ExperimentConfig,
};
use spectral_vff::Result;

#[derive(Parser)]
#[command(
    name = "vff",
    version,
    about = "Variational fast-forwarding of a two-spin Ising chain"
)]
struct Cli {
    /// TOML experiment config; missing keys take their defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    shots: Option<u64>,
    /// Gradient-descent steps
    #[arg(long, global = true, value_name = "N")]
    steps: Option<usize>,
    /// Calibration JSON enabling trajectory noise
    #[arg(long, global = true, value_name = "PATH")]
    noise: Option<PathBuf>,
    /// Exact costs and gradients instead of shot estimates
    #[arg(long, global = true)]
    analytic: bool,
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write circuits.txt when training
    #[arg(long, global = true)]
    dump_circuits: bool,
    /// Print the effective config as TOML and exit
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Train V = W D W† against one Trotter step
    Train,
    /// Write fidelity.csv comparing fast-forwarded and Trotterized evolution
    FastForward {
        /// Trained ansatz; defaults to <out>/ansatz.json
        #[arg(long, value_name = "PATH")]
        ansatz: Option<PathBuf>,
    },
    /// Compare the learned diagonal with the exact spectrum
    Spectrum {
        #[arg(long, value_name = "PATH")]
        ansatz: Option<PathBuf>,
    },
    /// LHST cost between two circuit files
    Cost { u: PathBuf, v: PathBuf },
}

fn config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default().resolved(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.shots {
        cfg.shots = s;
    }
    if let Some(s) = cli.steps {
        cfg.schedule.n_steps = s;
    }
    if let Some(p) = &cli.noise {
        cfg.noise = Some(p.clone());
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    cfg.analytic |= cli.analytic;
    cfg.dump_circuits |= cli.dump_circuits;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = config(&cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let ansatz_path = |p: &Option<PathBuf>| {
        p.clone()
            .unwrap_or_else(|| cfg.output_dir.join("ansatz.json"))
    };
    match &cli.command {
        None => {
            return Err(spectral_vff::Error::Config(
                "no subcommand given; use train, fast-forward, spectrum or cost".into(),
            ))
        }
        Some(Command::Train) => {
            let out = cmd_train(&cfg)?;
            let last = out.trace.rows.last().expect("trace has the initial row");
            println!(
                "step {}: raw cost {:.6}, ideal cost {:.6}",
                last.j, last.raw_cost, last.ideal_cost
            );
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
        Some(Command::FastForward { ansatz }) => {
            let out = cmd_fast_forward(&cfg, &ansatz_path(ansatz))?;
            print!("{}", out.csv);
            println!("wrote {}", cfg.output_dir.join("fidelity.csv").display());
        }
        Some(Command::Spectrum { ansatz }) => {
            print!("{}", cmd_spectrum(&cfg, &ansatz_path(ansatz))?);
        }
        Some(Command::Cost { u, v }) => {
            let c = cmd_cost(&cfg, u, v)?;
            println!("{}", serde_json::to_string_pretty(&c)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
