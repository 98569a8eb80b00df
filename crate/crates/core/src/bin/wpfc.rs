use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wpfc::harness::{parse_config, run_experiment, Experiment, PartialConfig, SnapshotFormat};
use wpfc::rotation::DtRule;
use wpfc::{Boundary, Error, Scheme};

#[derive(Parser)]
#[command(name = "wpfc", version, about = "Semi-Lagrangian PFC/WPFC benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV output.
    Run(RunArgs),
    /// List the experiment and scheme names.
    List,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn json_value<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|e| e.to_string())
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RunArgs {
    #[arg(long, value_parser = parse_with::<Experiment>)]
    experiment: Option<Experiment>,
    /// Comma-separated scheme list.
    #[arg(long, value_delimiter = ',', value_parser = parse_with::<Scheme>)]
    scheme: Option<Vec<Scheme>>,
    /// Comma-separated resolutions (cells per axis, or N_v for plasma runs).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// JSON config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the 128³ rotation grid.
    #[arg(long)]
    long: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Plasma time step.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_parser = json_value::<DtRule>)]
    dt_rule: Option<DtRule>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    diag_every: Option<usize>,
    /// Snapshot interval in plasma time units.
    #[arg(long)]
    snapshot_every: Option<f64>,
    #[arg(long, value_parser = json_value::<SnapshotFormat>)]
    snapshot_format: Option<SnapshotFormat>,
    #[arg(long, value_parser = json_value::<Boundary>)]
    v_boundary: Option<Boundary>,
    #[arg(long)]
    scan_points: Option<usize>,
}

impl RunArgs {
    fn flags(self) -> (Option<PathBuf>, PartialConfig) {
        let partial = PartialConfig {
            experiment: self.experiment,
            scheme: self.scheme,
            n: self.n,
            c: self.c,
            p: self.p,
            eps: self.eps,
            dt: self.dt,
            dt_rule: self.dt_rule,
            t_end: self.t_end,
            out: self.out,
            long: self.long.then_some(true),
            workers: self.workers,
            diag_every: self.diag_every,
            snapshot_every: self.snapshot_every,
            snapshot_format: self.snapshot_format,
            v_boundary: self.v_boundary,
            scan_points: self.scan_points,
        };
        (self.config, partial)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::List => {
            println!("experiments:");
            Experiment::ALL.iter().for_each(|e| println!("  {e}"));
            println!("schemes:");
            Scheme::ALL.iter().for_each(|s| println!("  {s}"));
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let (path, flags) = args.flags();
            let cfg = match parse_config(path.as_deref(), flags) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run_experiment(&cfg) {
                Ok(summary) => {
                    print!("{}", summary.table);
                    for f in &summary.files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(if matches!(e, Error::Config(_)) { 1 } else { 2 })
                }
            }
        }
    }
}
