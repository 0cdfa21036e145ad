use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use latticeaf::harness::{run_experiment, Command, ExperimentConfig, LatticeFamily};
use latticeaf::{AlphaMode, Error};

#[derive(Parser)]
#[command(
    name = "latticeaf",
    version,
    about = "Lattice-coded amplify-and-forward experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analytic quantities of a network (layered or ISI reduction).
    Analyze {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lattice codec over a layered network, per power offset.
    SimulateLayered {
        file: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Precoded lattice codec over the ISI reduction of any network.
    SimulateIsi {
        file: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
        /// Feedforward filter length.
        #[arg(long, default_value_t = 64)]
        ff_len: usize,
        /// Feedforward samples before the cursor.
        #[arg(long, default_value_t = 0)]
        lookback: usize,
        /// Interleaver rows (default: ISI memory + 16).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Monte Carlo second moment of a base lattice.
    LatticeInfo {
        #[arg(long, value_enum, default_value_t = Family::E8)]
        lattice: Family,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum, default_value_t = Family::E8)]
    lattice: Family,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Nesting ratio M.
    #[arg(long, default_value_t = 4)]
    ratio: u32,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Alpha::Mmse)]
    alpha: Alpha,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated power offsets in dB applied to every node.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0",
        allow_hyphen_values = true
    )]
    power_offsets_db: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Zn,
    Dn,
    E8,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alpha {
    Paper,
    Mmse,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl SimArgs {
    fn apply(self, cfg: &mut ExperimentConfig) -> Option<PathBuf> {
        cfg.lattice = match self.lattice {
            Family::Zn => LatticeFamily::Zn,
            Family::Dn => LatticeFamily::Dn,
            Family::E8 => LatticeFamily::E8,
        };
        cfg.dim = self.dim;
        cfg.ratio = self.ratio;
        cfg.trials = self.trials;
        cfg.seed = self.seed;
        cfg.alpha = match self.alpha {
            Alpha::Paper => AlphaMode::Paper,
            Alpha::Mmse => AlphaMode::FullMmse,
        };
        cfg.workers = self.workers.unwrap_or_else(default_workers);
        cfg.power_offsets_db = self.power_offsets_db;
        self.out
    }
}

fn family(f: Family) -> LatticeFamily {
    match f {
        Family::Zn => LatticeFamily::Zn,
        Family::Dn => LatticeFamily::Dn,
        Family::E8 => LatticeFamily::E8,
    }
}

fn config(cli: Cli) -> (ExperimentConfig, Option<PathBuf>) {
    let mut cfg = ExperimentConfig::default();
    let out = match cli.command {
        Cmd::Analyze { file, out } => {
            cfg.command = Command::Analyze;
            cfg.network = Some(file);
            out
        }
        Cmd::SimulateLayered { file, sim } => {
            cfg.command = Command::SimulateLayered;
            cfg.network = Some(file);
            sim.apply(&mut cfg)
        }
        Cmd::SimulateIsi {
            file,
            sim,
            ff_len,
            lookback,
            depth,
        } => {
            cfg.command = Command::SimulateIsi;
            cfg.network = Some(file);
            cfg.ff_len = ff_len;
            cfg.lookback = lookback;
            cfg.depth = depth;
            sim.apply(&mut cfg)
        }
        Cmd::LatticeInfo {
            lattice,
            dim,
            samples,
            seed,
            out,
        } => {
            cfg.command = Command::LatticeInfo;
            cfg.lattice = family(lattice);
            cfg.dim = dim;
            cfg.samples = samples;
            cfg.seed = seed;
            out
        }
    };
    (cfg, out)
}

fn run(cli: Cli) -> Result<(), Error> {
    let (cfg, out) = config(cli);
    let table = run_experiment(&cfg)?;
    match out {
        Some(path) => table.write_to_path(path),
        None => table.write(std::io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(std::io::stderr(), "{line}");
            ExitCode::FAILURE
        }
    }
}
