use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xkerr_cli::config::{self, default_out, ParamFile, ParamValue};
use xkerr_cli::presets::PRESETS;
use xkerr_cli::{run, CliError, Command, Format, RunConfig};

#[derive(Parser)]
#[command(name = "xkerr", version, about = "Generalized cross-Kerr optomechanics: sweeps and figure data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Effective couplings and validity report from circuit parameters.
    Couplings(RunArgs),
    /// Steady-state g2/g3 along a sweep.
    G2trace(RunArgs),
    /// Steady-state g2 over a two-dimensional grid, with validity mask.
    G2map(RunArgs),
    /// Photon-statistics classes over a grid.
    Pbmap(RunArgs),
    /// g2/g3 versus thermal occupation.
    Thermal(RunArgs),
    /// Wigner snapshots of cat generation under the master equation.
    Cat(RunArgs),
    /// Wigner function of the analytic cat state.
    Wigner(RunArgs),
    /// Wigner negativity along a trajectory.
    Negativity(RunArgs),
    /// Logarithmic negativity of the linearized strong-drive branch.
    Entangle(RunArgs),
    /// Effective frequencies and Routh–Hurwitz stability.
    Stability(RunArgs),
    /// Re-run exactly the configuration stored in a manifest.
    Rerun {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    preset: Option<String>,
    /// Parameter file (TOML, or JSON by extension).
    #[arg(long)]
    params: Option<PathBuf>,
    /// `key=start:stop:steps [unit]` or `key=v1,v2,… [unit]`; replaces the preset sweeps.
    #[arg(long)]
    sweep: Vec<String>,
    /// Parameter override `key=value`, e.g. `kappa=10 krad/s`.
    #[arg(long = "set")]
    set: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    threads: Option<usize>,
    /// Cavity truncation.
    #[arg(long)]
    na: Option<usize>,
    /// Mechanical truncation.
    #[arg(long)]
    nm: Option<usize>,
    /// Number of cat components.
    #[arg(long)]
    k: Option<u32>,
    /// Residual and hygiene tolerance.
    #[arg(long, default_value_t = config::DEFAULT_TOL)]
    tol: f64,
    /// Evaluate points that fail the validity conditions.
    #[arg(long)]
    force: bool,
}

fn configure(command: Command, a: RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let file = a.params.as_deref().map(ParamFile::load).transpose()?;
    let mut overrides = a.set.iter().map(|s| config::parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    for (key, v) in [("n_a", a.na), ("n_m", a.nm), ("k", a.k.map(|k| k as usize))] {
        if let Some(v) = v {
            overrides.push((key.to_string(), ParamValue::Number(v as f64)));
        }
    }
    let mut cfg = config::assemble(command, a.preset.as_deref(), file, &overrides, &a.sweep)?;
    cfg.format = a.format;
    cfg.threads = a.threads;
    cfg.tol = a.tol;
    cfg.force = a.force;
    cfg.check()?;
    Ok((cfg, a.out.unwrap_or_else(|| default_out(command))))
}

fn execute(cmd: Cmd) -> Result<(), (CliError, Option<PathBuf>)> {
    let (cfg, out) = match cmd {
        Cmd::Presets => {
            for p in PRESETS {
                println!("{:8} {}", p.name, p.about);
            }
            return Ok(());
        }
        Cmd::Rerun { manifest, out, threads } => {
            RunConfig::load_manifest(&manifest).map(|mut cfg| {
                if threads.is_some() {
                    cfg.threads = threads;
                }
                (cfg, out)
            })
        }
        Cmd::Couplings(a) => configure(Command::Couplings, a),
        Cmd::G2trace(a) => configure(Command::G2trace, a),
        Cmd::G2map(a) => configure(Command::G2map, a),
        Cmd::Pbmap(a) => configure(Command::Pbmap, a),
        Cmd::Thermal(a) => configure(Command::Thermal, a),
        Cmd::Cat(a) => configure(Command::Cat, a),
        Cmd::Wigner(a) => configure(Command::Wigner, a),
        Cmd::Negativity(a) => configure(Command::Negativity, a),
        Cmd::Entangle(a) => configure(Command::Entangle, a),
        Cmd::Stability(a) => configure(Command::Stability, a),
    }
    .map_err(|e| (e, None))?;
    let summary = run(&cfg, &out).map_err(|e| (e, Some(out.clone())))?;
    eprintln!(
        "{}: {} points, {} failed, {} masked -> {}",
        cfg.command.name(),
        summary.points,
        summary.failed,
        summary.masked,
        out.display()
    );
    match summary.error {
        Some(e) => Err((e, Some(out))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err((e, out)) => {
            let record = serde_json::to_string(&e.record()).expect("record serializes");
            eprintln!("{record}");
            if let Some(dir) = out.filter(|d| d.is_dir()) {
                let _ = std::fs::write(dir.join("error.json"), &record);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
