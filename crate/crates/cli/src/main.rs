use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mhdecay_core::config::{load_config, RunConfig};
use mhdecay_core::io::write_ndjson;
use mhdecay_core::run::{self, evolve_config, fit_all, write_evolved, Evolved};
use mhdecay_core::suite::{suite_settings, verify};

#[derive(Parser)]
#[command(name = "mhdecay", version, about = "Double-null evolution and energy decay diagnostics on Schwarzschild")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (dotted `key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output.dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the nonlinear system and write history.csv.
    Evolve(RunArgs),
    /// Evolve a single (s, l) mode and write history.csv.
    Modes(RunArgs),
    /// Full run: history, energy report, fits and invariant suite.
    Diagnose(RunArgs),
    /// Trace the configured curves and fit decay exponents.
    Fit(RunArgs),
    /// Grid-halving study with fitted orders.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, default_value = "default")]
        suite: String,
        /// Optional directory for acceptance.ndjson.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(args: &RunArgs) -> Result<(RunConfig, PathBuf)> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let cfg = load_config(&text).with_context(|| format!("loading {}", args.config.display()))?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    Ok((cfg, out))
}

fn ndjson<S: serde::Serialize>(items: impl IntoIterator<Item = S>, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    write_ndjson(items, &mut f)?;
    f.flush()?;
    Ok(())
}

fn evolve(args: &RunArgs, want_mode: bool) -> Result<bool> {
    let (cfg, out) = load(args)?;
    if cfg.mode_spec().is_some() != want_mode {
        bail!("config sector does not match subcommand (use `{}`)", if want_mode { "evolve" } else { "modes" });
    }
    let ev = evolve_config(&cfg)?;
    let path = out.join("history.csv");
    write_evolved(&cfg, &ev, &path)?;
    let g = ev.grid();
    let kind = match ev {
        Evolved::Nonlinear(_) => "nonlinear",
        Evolved::Mode(_) => "mode",
    };
    println!("{kind} history {}x{} -> {}", g.nw(), g.nv(), path.display());
    Ok(true)
}

fn diagnose(args: &RunArgs) -> Result<bool> {
    let (cfg, out) = load(args)?;
    let art = run::run(&cfg, &out)?;
    for c in &art.suite.checks {
        println!("{} {}: {:e} (limit {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
    for f in &art.files {
        println!("wrote {}", f.display());
    }
    Ok(art.suite.passed())
}

fn fit(args: &RunArgs) -> Result<bool> {
    let (cfg, out) = load(args)?;
    let ev = evolve_config(&cfg)?;
    let fits = fit_all(&cfg, &ev);
    for f in &fits {
        match (&f.fit, &f.fit_error) {
            (Some(p), _) => {
                println!("{} {:?}: p = {:.4} on [{}, {}]", f.curve, f.quantity, p.p, p.window[0], p.window[1])
            }
            (None, Some(e)) => println!("{} {:?}: no fit ({e})", f.curve, f.quantity),
            (None, None) => println!("{} {:?}: no fit", f.curve, f.quantity),
        }
    }
    ndjson(&fits, &out.join("fits.ndjson"))?;
    Ok(true)
}

fn convergence(args: &RunArgs, levels: usize) -> Result<bool> {
    let (cfg, out) = load(args)?;
    let rep = run::convergence(&cfg, levels)?;
    println!("deltas {:?}", rep.deltas);
    for e in &rep.entries {
        let order = e.order.map_or_else(|| "n/a".to_string(), |p| format!("{p:.3}"));
        println!("{:<28} order {order:>7}  values {:?}", e.name, e.values);
    }
    ndjson(std::iter::once(&rep), &out.join("convergence.ndjson"))?;
    Ok(true)
}

fn verify_cmd(suite: &str, out: Option<&Path>) -> Result<bool> {
    let settings = suite_settings(suite)?;
    let rep = verify(&settings);
    for r in &rep.results {
        println!("{r}");
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        ndjson(&rep.results, &dir.join("acceptance.ndjson"))?;
    }
    Ok(rep.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Evolve(a) => evolve(a, false),
        Command::Modes(a) => evolve(a, true),
        Command::Diagnose(a) => diagnose(a),
        Command::Fit(a) => fit(a),
        Command::Convergence { run, levels } => convergence(run, *levels),
        Command::Verify { suite, out } => verify_cmd(suite, out.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
