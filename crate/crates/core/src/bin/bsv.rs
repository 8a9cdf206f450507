use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bsv::dispersion::MaterialTable;
use bsv::scenario::{
    analytic_period, default_jobs, load_scenario, parse_values, run_scenario, run_sweep, write_outputs,
    write_sweep_csv, SweepSpec,
};
use bsv::Error;

#[derive(Parser)]
#[command(name = "bsv", version, about = "Schmidt-mode simulation of bright squeezed vacuum")]
struct Cli {
    /// Material table JSON replacing the built-in one.
    #[arg(long, global = true)]
    materials: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write report.json, spectrum.csv and mode files.
    Run {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one numeric field and write sweep.csv.
    Sweep {
        file: PathBuf,
        /// Field path, e.g. geometry.gvd_length or gain.
        #[arg(long)]
        param: Option<String>,
        /// `a,b,c` or `linspace:start:stop:count`.
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Keep the base point's pump path and lock phase for every point.
        #[arg(long)]
        hold_derived: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic fringe period (um) of a GVD medium.
    Period { medium: String, pump_nm: f64 },
    /// Check a scenario file and list every problem.
    Validate { file: PathBuf },
}

fn out_dir(explicit: Option<PathBuf>, configured: Option<&String>, name: &str) -> PathBuf {
    explicit
        .or_else(|| configured.map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").join(name))
}

fn execute(cli: Cli) -> Result<(), Error> {
    let table = match &cli.materials {
        Some(p) => MaterialTable::from_json(&std::fs::read_to_string(p)?)?,
        None => MaterialTable::builtin(),
    };
    match cli.command {
        Command::Validate { file } => {
            let cfg = load_scenario(&file, &table)?;
            println!("{}: ok ({})", file.display(), cfg.name);
        }
        Command::Period { medium, pump_nm } => {
            let p = analytic_period(table.get(&medium)?, pump_nm)?;
            println!("{p:.6} um");
        }
        Command::Run { file, out } => {
            let cfg = load_scenario(&file, &table)?;
            let res = run_scenario(&cfg, &table)?;
            let dir = out_dir(out, cfg.outputs.dir.as_ref(), &cfg.name);
            write_outputs(&res, &dir)?;
            for r in &res.report.results {
                println!(
                    "G={} K={:.4} g2={} fwhm_nm={}",
                    r.gain,
                    r.schmidt_number,
                    r.g2.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                    r.envelope_fwhm.map(|w| format!("{:.3}", w.nm)).unwrap_or_else(|| "-".into()),
                );
                for note in &r.notes {
                    println!("  note: {note}");
                }
            }
            println!("wrote {}", dir.display());
        }
        Command::Sweep {
            file,
            param,
            values,
            jobs,
            hold_derived,
            out,
        } => {
            let cfg = load_scenario(&file, &table)?;
            let base = SweepSpec::from_config(&cfg)?;
            let param = param
                .or_else(|| base.as_ref().map(|s| s.param.clone()))
                .ok_or_else(|| Error::Precondition("no --param and no [sweep] section".into()))?;
            let values = match values {
                Some(v) => parse_values(&v)?,
                None => base
                    .as_ref()
                    .map(|s| s.values.clone())
                    .ok_or_else(|| Error::Precondition("no --values and no [sweep] section".into()))?,
            };
            let spec = SweepSpec {
                param,
                values,
                jobs: jobs.or(base.as_ref().map(|s| s.jobs)).unwrap_or_else(default_jobs),
                hold_derived: hold_derived || base.as_ref().is_some_and(|s| s.hold_derived),
            };
            let rows = run_sweep(&cfg, &spec, &table)?;
            let dir = out_dir(out, cfg.outputs.dir.as_ref(), &cfg.name);
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("sweep.csv");
            write_sweep_csv(&path, &rows)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} rows ({failed} failed), wrote {}", rows.len(), path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
