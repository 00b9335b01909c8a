use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cylscat::config::{preset, RunConfig, PRESETS};
use cylscat::experiment::{compare_separable, compare_text, oracle_csv, oracle_predictions, report_text, run_experiment, run_probe};
use cylscat::ScatterError;

#[derive(Parser)]
#[command(name = "cylscat", version, about = "Scattering resonances on cylinders and half-cylinders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// TOML run configuration.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Use a named preset instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Override the output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<RunConfig, ScatterError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => unreachable!("clap requires one source"),
        };
        if let Some(out) = &self.output {
            cfg.output = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Locate resonances, fit the counting function and write the report.
    Run(Source),
    /// Resonances of the one-dimensional profile mapped onto the sheet.
    Oracle(Source),
    /// Match cylinder resonances against the mapped oracle resonances.
    Compare {
        #[command(flatten)]
        source: Source,
        /// Largest accepted deviation per matched pair.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Refinement probe of det(I + B) across the fit window.
    Probe(Source),
    /// List preset names.
    Presets,
    /// Print a preset as TOML.
    ShowPreset { name: String },
}

fn run(cli: Cli) -> Result<bool, ScatterError> {
    match cli.command {
        Command::Run(src) => {
            let cfg = src.load()?;
            let o = run_experiment(&cfg)?;
            print!("{}", report_text(&o));
            println!("output: {}", cfg.output.display());
            Ok(o.verdict.success())
        }
        Command::Oracle(src) => {
            let cfg = src.load()?;
            let v = cfg.validate()?;
            let pred = oracle_predictions(&v)?;
            fs::create_dir_all(&cfg.output)?;
            fs::write(cfg.output.join("oracle.csv"), oracle_csv(&pred))?;
            println!("predicted: {}", pred.iter().map(|p| p.multiplicity as usize).sum::<usize>());
            println!("output: {}", cfg.output.join("oracle.csv").display());
            Ok(true)
        }
        Command::Compare { source, tol } => {
            let cfg = source.load()?;
            let r = compare_separable(&cfg, tol)?;
            let text = compare_text(&r);
            fs::create_dir_all(&cfg.output)?;
            fs::write(cfg.output.join("compare.txt"), &text)?;
            print!("{text}");
            let probe_ok = r.probes.iter().all(|p| p.max_change() <= cfg.probe.tolerance);
            Ok(r.bijective() && r.max_deviation() <= tol && probe_ok)
        }
        Command::Probe(src) => {
            let cfg = src.load()?;
            let reports = run_probe(&cfg)?;
            let mut ok = true;
            for rep in &reports {
                for s in &rep.samples {
                    println!("{:?} k = {} change = {:.3e}", rep.refinement, s.k, s.change);
                }
                ok &= rep.max_change() <= cfg.probe.tolerance;
            }
            println!("tolerance: {:.1e}", cfg.probe.tolerance);
            Ok(ok)
        }
        Command::Presets => {
            for name in PRESETS {
                println!("{name}");
            }
            Ok(true)
        }
        Command::ShowPreset { name } => {
            print!("{}", preset(&name)?.to_toml());
            Ok(true)
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
