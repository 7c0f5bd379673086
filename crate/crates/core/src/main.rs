use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use shadownet::experiments::{self, read_table, ExperimentId, ExperimentSpec};
use shadownet::Error;

const OUT_DIR_ENV: &str = "SHADOWNET_OUT_DIR";

/// Regenerate figure data and bound tables as CSV.
#[derive(Parser, Debug)]
#[command(name = "shadownet", version)]
struct Cli {
    /// Experiment id: fig2..fig8, throughput, bounds or detection.
    #[arg(long, required_unless_present_any = ["replay", "list"])]
    experiment: Option<String>,

    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Runs (or traces) per grid point.
    #[arg(long)]
    trials: Option<usize>,

    /// Samples per trace.
    #[arg(long)]
    n: Option<usize>,

    /// INI file with [system] [channel] [scheduler] [detector] [experiment] sections.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory; defaults to $SHADOWNET_OUT_DIR, then ./results.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override one setting, e.g. --set system.pt=10. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,

    /// Re-run the experiment recorded in the metadata of an emitted CSV.
    #[arg(long, conflicts_with_all = ["experiment", "config"])]
    replay: Option<PathBuf>,

    /// Print the experiment ids and exit.
    #[arg(long)]
    list: bool,
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec, Error> {
    let mut spec = match (&cli.replay, &cli.experiment) {
        (Some(path), _) => ExperimentSpec::from_metadata(&read_table(path)?.metadata)?,
        (None, Some(id)) => ExperimentSpec::new(id.parse::<ExperimentId>()?),
        (None, None) => return Err(Error::Config("--experiment is required".into())),
    };
    if let Some(path) = &cli.config {
        spec.settings.apply_ini_file(path)?;
    }
    for assignment in &cli.set {
        spec.settings.apply_assignment(assignment)?;
    }
    if let Some(seed) = cli.seed {
        spec.set("experiment.seed", seed)?;
    }
    if let Some(trials) = cli.trials {
        spec.set("experiment.trials", trials)?;
    }
    if let Some(n) = cli.n {
        spec.set("experiment.n", n)?;
    }
    Ok(spec)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn exit_code(err: &Error) -> ExitCode {
    if err.is_validation() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if cli.list {
        for id in ExperimentId::ALL {
            println!("{id}");
        }
        return ExitCode::SUCCESS;
    }
    let spec = match build_spec(&cli) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let dir = out_dir(&cli);
    if let Err(source) = std::fs::create_dir_all(&dir) {
        let e = Error::Io { path: dir, source };
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match experiments::run_to_dir(&spec, &dir) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
