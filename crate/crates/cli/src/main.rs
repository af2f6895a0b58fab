//! `pilotwave` — run quantum-circuit trajectory simulations from the
//! command line.
//!
//! Exit codes: 0 success, 1 physics/verification failure (including
//! ambiguous readout), 2 usage or parse error, 3 integration failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{pick, resolve_out, FileConfig, RunSettings};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files or values: exit 2.
    Usage(String),
    /// The physics or a verification failed: exit 1.
    Physics(String),
    /// Trajectory integration failed (node encounter): exit 3.
    Integration(String),
    /// I/O and other runtime trouble: exit 1.
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Physics(_) | CliError::Runtime(_) => 1,
            CliError::Integration(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Physics(m)
            | CliError::Integration(m)
            | CliError::Runtime(m) => m,
        }
    }
}

impl From<pilotwave::Error> for CliError {
    fn from(e: pilotwave::Error) -> Self {
        use pilotwave::Error as E;
        match &e {
            E::NodeEncounter { .. } => CliError::Integration(e.to_string()),
            E::UnknownGate { .. }
            | E::InvalidCircuit { .. }
            | E::InvalidConfig { .. }
            | E::InvalidSampler { .. }
            | E::FractionOutOfRange { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Physics(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pilotwave",
    version,
    about = "Pilot-wave trajectory simulation of small quantum circuits",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Physical model: bell | well.
    #[arg(long)]
    model: Option<String>,
    /// Ensemble size.
    #[arg(short, long)]
    n: Option<usize>,
    /// RNG seed (recorded in every output).
    #[arg(long)]
    seed: Option<u64>,
    /// Integrator step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Particle mass (well model).
    #[arg(long)]
    mass: Option<f64>,
    /// Bell pointer coupling strength.
    #[arg(long)]
    g: Option<f64>,
    /// Bell pointer packet width.
    #[arg(long)]
    sigma: Option<f64>,
    /// Bell measurement duration.
    #[arg(long = "delta-t")]
    delta_t: Option<f64>,
    /// Well meter coupling a.
    #[arg(long)]
    a: Option<f64>,
    /// Well meter duration.
    #[arg(long = "meter-dt")]
    meter_dt: Option<f64>,
    /// Well meter packet width.
    #[arg(long = "sigma-z")]
    sigma_z: Option<f64>,
    /// Histogram bins in density outputs.
    #[arg(long)]
    bins: Option<usize>,
    /// RK4 step cap per schedule segment (long waits are coarsened to
    /// this many steps; their field varies on the much slower 1/ω scale).
    #[arg(long = "max-steps")]
    max_steps: Option<usize>,
    /// Keep the free Hamiltonian switched on during drive pulses.
    #[arg(long = "include-free-evolution")]
    include_free_evolution: bool,
    /// Custom initial density (JSON histogram) instead of equilibrium.
    #[arg(long)]
    sampler: Option<PathBuf>,
    /// Output directory (default: $PILOTWAVE_OUTPUT_DIR or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self, default_model: &str, default_n: usize) -> Result<RunSettings, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let settings = RunSettings {
            model: pick(self.model.clone(), file.model.clone(), default_model.into()),
            n: pick(self.n, file.n, default_n),
            seed: pick(self.seed, file.seed, 0),
            dt: pick(self.dt, file.dt, 1e-3),
            mass: pick(self.mass, file.mass, 1e4),
            g: pick(self.g, file.g, 1.0),
            sigma: pick(self.sigma, file.sigma, 0.05),
            delta_t: pick(self.delta_t, file.delta_t, 1.0),
            a: pick(self.a, file.a, 0.05),
            meter_dt: pick(self.meter_dt, file.meter_dt, 1.0),
            sigma_z: pick(self.sigma_z, file.sigma_z, 0.05),
            bins: pick(self.bins, file.bins, 50),
            max_steps: pick(self.max_steps, file.max_steps, 4000),
            include_free_evolution: self.include_free_evolution
                || file.include_free_evolution.unwrap_or(false),
            sampler: self.sampler.clone().or(file.sampler),
            out: resolve_out(self.out.clone(), file.out),
        };
        Ok(settings)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the Deutsch algorithm end to end.
    Deutsch {
        /// Oracle id: f0 | f1 | f2 | f3.
        #[arg(long)]
        oracle: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Integrate trajectories for a single gate (well model).
    Gate {
        /// Gate name: hadamard | t | cnot | free.
        #[arg(long)]
        gate: String,
        /// Initial state labels over {0, 1, +, -}, one per qubit.
        #[arg(long)]
        from: Option<String>,
        /// Duration of a free-evolution run (default: one beat period).
        #[arg(long)]
        duration: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify drive matrix elements by explicit quadrature.
    Verify {
        #[arg(long, default_value_t = 16)]
        panels: usize,
        #[arg(long, default_value_t = 12)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a circuit JSON into a generator schedule.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value = "bell")]
        model: String,
        #[arg(long, default_value_t = 1e4)]
        mass: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw initial-configuration samples without integrating.
    Sample {
        /// Initial state labels (well model), e.g. "01" or "+".
        #[arg(long, default_value = "01")]
        state: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Deutsch { oracle, common } => {
            let settings = common.resolve("bell", 100)?;
            commands::cmd_deutsch(&oracle, &settings)
        }
        Command::Gate { gate, from, duration, common } => {
            let settings = common.resolve("well", 20)?;
            commands::cmd_gate(&gate, from.as_deref(), duration, &settings)
        }
        Command::Verify { panels, points, tolerance, out } => {
            let out = out.or_else(|| std::env::var_os("PILOTWAVE_OUTPUT_DIR").map(PathBuf::from));
            commands::cmd_verify(panels, points, tolerance, out)
        }
        Command::Compile { circuit, model, mass, out } => {
            let out = resolve_out(out, None);
            commands::cmd_compile(&circuit, &model, mass, &out)
        }
        Command::Sample { state, common } => {
            let settings = common.resolve("well", 1000)?;
            commands::cmd_sample(&state, &settings)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
