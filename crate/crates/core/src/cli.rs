//! Command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{init_document, ConfigError, ProjectConfig};
use crate::coverage::{bin_trace, histogram_intersection, occupied_fraction, overlap, CoverageMap};
use crate::engine::{self, batch_run, read_trace, write_trace, Trace};
use crate::eval::{evaluate, precondition_states, train, PreconditionConfig};

#[derive(Debug, Parser)]
#[command(name = "thermex", version, about = "Building thermal dynamics data generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a commented default configuration.
    Init {
        #[arg(default_value = "thermex.toml")]
        path: PathBuf,
        /// Overwrite an existing file.
        #[arg(long)]
        force: bool,
    },
    /// Simulate one run and write its trace.
    Generate {
        #[arg(short, long, default_value = "thermex.toml")]
        config: PathBuf,
        #[arg(long, env = "THERMEX_SEED")]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
        /// Draw the building and presets from the variation spec.
        #[arg(long)]
        sample: bool,
    },
    /// Simulate `n` sampled buildings with seeds seed, seed + 1, ...
    Batch {
        #[arg(short, long, default_value = "thermex.toml")]
        config: PathBuf,
        #[arg(short, long)]
        n: usize,
        #[arg(long, env = "THERMEX_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Bin traces into (temperature, signal) occupancy maps and compare them.
    Coverage {
        #[arg(long, num_args = 1.., required = true)]
        traces: Vec<PathBuf>,
        /// Grid as TEMPxSIGNAL bins, e.g. 80x21; repeated values must agree.
        #[arg(long)]
        bins: Vec<String>,
        /// Temperature axis as LO:HI in °C.
        #[arg(long)]
        temp_range: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Train a predictor per trace and score it on the February-1 scenario.
    Eval {
        #[arg(short, long, default_value = "thermex.toml")]
        config: PathBuf,
        #[arg(long = "train-trace", required = true)]
        train_traces: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn base_dir(config: &Path) -> PathBuf {
    config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load(config: &Path) -> Result<ProjectConfig, CliError> {
    Ok(ProjectConfig::load(config)?)
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Init { path, force } => cmd_init(&path, force),
        Command::Generate {
            config,
            seed,
            out,
            sample,
        } => cmd_generate(&config, seed, &out, sample),
        Command::Batch {
            config,
            n,
            seed,
            out_dir,
            workers,
        } => cmd_batch(&config, n, seed, &out_dir, workers),
        Command::Coverage {
            traces,
            bins,
            temp_range,
            out,
        } => cmd_coverage(&traces, &bins, temp_range.as_deref(), &out),
        Command::Eval {
            config,
            train_traces,
            out,
        } => cmd_eval(&config, &train_traces, &out),
    }
}

pub fn cmd_init(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Config(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    write_file(path, &init_document())?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_generate(config: &Path, seed: Option<u64>, out: &Path, sample: bool) -> Result<(), CliError> {
    let cfg = load(config)?;
    let seed = seed.unwrap_or(cfg.run.seed);
    let template = cfg.template(&base_dir(config))?;
    let spec = cfg.variation_spec()?;
    let run = template
        .instantiate(seed, sample.then_some(&spec))
        .map_err(runtime)?;
    let trace = engine::run(&run).map_err(runtime)?;
    write_trace(&trace, out).map_err(runtime)?;
    println!("wrote {} ({} rows, seed {seed})", out.display(), trace.len());
    Ok(())
}

pub fn cmd_batch(
    config: &Path,
    n: usize,
    seed: Option<u64>,
    out_dir: &Path,
    workers: usize,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let cfg = load(config)?;
    let seed = seed.unwrap_or(cfg.run.seed);
    let template = cfg.template(&base_dir(config))?;
    let spec = cfg.variation_spec()?;
    std::fs::create_dir_all(out_dir).map_err(|e| runtime(format!("{}: {e}", out_dir.display())))?;

    let results = batch_run(n, &template, &spec, seed, workers.max(1));
    let varied: Vec<_> = spec.iter().map(|(name, param, _)| (name.to_string(), param)).collect();
    let mut index = String::from("run,seed,file,status");
    for (name, _) in &varied {
        let _ = write!(index, ",{name}");
    }
    index.push_str(",q_nominal\n");
    let mut failures = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let run_seed = seed.wrapping_add(i as u64);
        let file = format!("run_{i:04}.csv");
        match r {
            Ok(trace) => {
                write_trace(trace, &out_dir.join(&file)).map_err(runtime)?;
                let _ = write!(index, "{i},{run_seed},{file},ok");
                for (_, p) in &varied {
                    let _ = write!(index, ",{}", p.get(&trace.meta.building));
                }
                let _ = writeln!(index, ",{}", trace.meta.building.q_nominal);
            }
            Err(e) => {
                let _ = write!(index, "{i},{run_seed},,failed");
                index.push_str(&",".repeat(varied.len() + 1));
                index.push('\n');
                failures.push(e.to_string());
            }
        }
    }
    write_file(&out_dir.join("index.csv"), &index)?;
    println!(
        "wrote {} traces to {} ({} failed)",
        n - failures.len(),
        out_dir.display(),
        failures.len()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(failures.join("\n")))
    }
}

/// Parses `TxS`, e.g. `80x21`.
pub fn parse_bins(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("--bins `{s}`: expected TEMPxSIGNAL, e.g. 80x21"));
    let (t, sig) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let t: usize = t.trim().parse().map_err(|_| bad())?;
    let sig: usize = sig.trim().parse().map_err(|_| bad())?;
    if t == 0 || sig == 0 {
        return Err(bad());
    }
    Ok((t, sig))
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("--temp-range `{s}`: expected LO:HI with LO < HI"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn stems(paths: &[PathBuf]) -> Vec<String> {
    let raw: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "trace".into())
        })
        .collect();
    raw.iter()
        .enumerate()
        .map(|(i, s)| {
            if raw.iter().filter(|r| *r == s).count() > 1 {
                format!("{i}_{s}")
            } else {
                s.clone()
            }
        })
        .collect()
}

pub fn cmd_coverage(
    traces: &[PathBuf],
    bins: &[String],
    temp_range: Option<&str>,
    out: &Path,
) -> Result<(), CliError> {
    let defaults = crate::config::CoverageSection::default();
    let parsed = bins.iter().map(|b| parse_bins(b)).collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = parsed.first() {
        if let Some(other) = parsed.iter().find(|b| *b != first) {
            return Err(CliError::Config(format!(
                "mismatched bin specs {}x{} and {}x{}: maps on different grids cannot be compared",
                first.0, first.1, other.0, other.1
            )));
        }
    }
    let (nt, ns) = parsed
        .first()
        .copied()
        .unwrap_or((defaults.temp_bins, defaults.signal_bins));
    let range = match temp_range {
        Some(s) => parse_range(s)?,
        None => (defaults.temp_lo_c, defaults.temp_hi_c),
    };
    std::fs::create_dir_all(out).map_err(|e| runtime(format!("{}: {e}", out.display())))?;

    let names = stems(traces);
    let mut maps: Vec<CoverageMap> = Vec::new();
    let mut summary = String::from("trace,rows,overflow,occupied_fraction,signal_fraction\n");
    for (path, name) in traces.iter().zip(&names) {
        let trace: Trace = read_trace(path).map_err(runtime)?;
        let m = bin_trace(&trace, range, nt, ns).map_err(|e| CliError::Config(e.to_string()))?;
        m.write(&out.join(format!("{name}.csv"))).map_err(runtime)?;
        let _ = writeln!(
            summary,
            "{name},{},{},{},{}",
            trace.len(),
            m.overflow,
            occupied_fraction(&m),
            m.signal_fraction()
        );
        println!(
            "{name}: occupied {:.4}, signal bins {:.3}, overflow {}",
            occupied_fraction(&m),
            m.signal_fraction(),
            m.overflow
        );
        maps.push(m);
    }
    write_file(&out.join("summary.csv"), &summary)?;
    let mut table = String::from("a,b,jaccard,histogram_intersection\n");
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            let jac = overlap(&maps[i], &maps[j]).map_err(runtime)?;
            let hi = histogram_intersection(&maps[i], &maps[j]).map_err(runtime)?;
            let _ = writeln!(table, "{},{},{jac},{hi}", names[i], names[j]);
        }
    }
    write_file(&out.join("overlap.csv"), &table)?;
    Ok(())
}

pub fn cmd_eval(config: &Path, train_traces: &[PathBuf], out: &Path) -> Result<(), CliError> {
    let cfg = load(config)?;
    let spec = cfg.eval.feature_spec()?;
    let building = cfg.building()?;
    let mut pre = PreconditionConfig::new(building.clone(), cfg.boundary(&base_dir(config))?);
    pre.dt = cfg.run.dt_s;
    pre.levels = cfg.eval.levels.clone();
    pre.actions = cfg.eval.actions.clone();
    pre.history_len = spec.lookback;
    let scenario = precondition_states(&pre).map_err(|e| CliError::Config(e.to_string()))?;

    let mut comparison = String::from("trace,arc,pairwise_arc,mean_ae,validation_mae,train_samples\n");
    for (path, name) in train_traces.iter().zip(stems(train_traces)) {
        let trace = read_trace(path).map_err(runtime)?;
        let (model, report) = train(&[&trace], &spec, cfg.eval.lambda).map_err(runtime)?;
        let r = evaluate(&model, &scenario, &building, cfg.eval.eps).map_err(runtime)?;
        let extra = serde_json::json!({
            "train_trace": path.display().to_string(),
            "lambda": model.lambda,
            "lookback": spec.lookback,
            "channels": spec.channels,
            "target": spec.target,
            "train": report,
            "notes": model.notes,
        });
        r.write(&out.join(&name), extra).map_err(runtime)?;
        let val = report.validation_mae.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            comparison,
            "{name},{},{},{},{val},{}",
            r.arc, r.pairwise_arc, r.mean_ae, report.train_samples
        );
        println!("{name}: ARC {:.3}, mean AE {:.3} K", r.arc, r.mean_ae);
    }
    write_file(&out.join("comparison.csv"), &comparison)?;
    Ok(())
}
