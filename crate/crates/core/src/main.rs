use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use noma_underlay::config::SweepSpec;
use noma_underlay::sweep::{emit, find_crossovers, run_sweep, Format};
use noma_underlay::validation::validate;
use noma_underlay::{Error, Result};

/// Rate and outage sweeps for NOMA relaying under an interference cap.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every requested column over the grid and write the table.
    Sweep(Common),
    /// Report where the NOMA sum rate overtakes OMA, per antenna setup.
    Crossover(Common),
    /// Compare every analytic rate and outage with simulation.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Allowed distance in standard errors.
        #[arg(long, default_value_t = 3.0)]
        k_sigma: f64,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["config", "paper_defaults"])))]
struct Common {
    /// TOML sweep configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Use the built-in evaluation scenario.
    #[arg(long)]
    paper_defaults: bool,
    /// Override the simulation seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the number of simulated draws per grid point.
    #[arg(long, value_name = "N")]
    samples: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

impl Common {
    fn spec(&self) -> Result<SweepSpec> {
        let mut spec = match &self.config {
            Some(path) => SweepSpec::from_file(path)?,
            None => SweepSpec::default_scenario(),
        };
        if let Some(seed) = self.seed {
            spec.sim = spec.sim.with_seed(seed);
        }
        if let Some(n) = self.samples {
            spec.sim = spec.sim.with_samples(n)?;
        }
        Ok(spec)
    }

    fn write_text(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
                context: format!("writing {}", path.display()),
                source: e,
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn crossover_report(common: &Common) -> Result<()> {
    let table = run_sweep(&common.spec()?)?;
    let found = find_crossovers(&table)?;
    let mut text = String::new();
    match common.format {
        OutputFormat::Csv => {
            text.push_str("n_r,n_d,q_db,at_boundary\n");
            for (a, c) in &found {
                match c {
                    Some(c) => text.push_str(&format!(
                        "{},{},{:.16e},{}\n",
                        a.n_r(),
                        a.n_d(),
                        c.q_db,
                        c.at_boundary
                    )),
                    None => text.push_str(&format!("{},{},NA,NA\n", a.n_r(), a.n_d())),
                }
            }
        }
        OutputFormat::Json => {
            let items: Vec<String> = found
                .iter()
                .map(|(a, c)| {
                    let (q, b) = match c {
                        Some(c) => (format!("{:.16e}", c.q_db), c.at_boundary.to_string()),
                        None => ("null".into(), "null".into()),
                    };
                    format!(
                        "{{\"n_r\":{},\"n_d\":{},\"q_db\":{q},\"at_boundary\":{b}}}",
                        a.n_r(),
                        a.n_d()
                    )
                })
                .collect();
            text.push_str(&format!("[{}]\n", items.join(",")));
        }
    }
    common.write_text(&text)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep(common) => {
            let table = run_sweep(&common.spec()?)?;
            emit(&table, common.format.into(), common.out.as_ref())?;
            Ok(true)
        }
        Command::Crossover(common) => {
            crossover_report(&common)?;
            Ok(true)
        }
        Command::Validate { common, k_sigma } => {
            let checks = validate(&common.spec()?)?;
            let mut text = String::new();
            let mut failed = 0;
            for c in &checks {
                let ok = c.passes(k_sigma);
                failed += usize::from(!ok);
                text.push_str(&format!("{} {c}\n", if ok { "PASS" } else { "FAIL" }));
            }
            text.push_str(&format!(
                "{} of {} checks within {k_sigma} standard errors\n",
                checks.len() - failed,
                checks.len()
            ));
            common.write_text(&text)?;
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
