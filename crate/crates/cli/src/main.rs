//! `fracstiff`: kernel tables, benchmark solves and solver comparisons.
//!
//! Exit codes: 0 success, 1 integration failure, 2 invalid input,
//! 3 failed assertion (`max_error`, bench agreement), 4 I/O error.

mod config;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracstiff::benchmarks::catalog;
use fracstiff::{LinalgMode, Status, SumOfExponentials};
use serde_json::json;

use config::{RunConfig, Settings};

/// Fractional differential equations by kernel compression and Radau IIA.
#[derive(Parser)]
#[command(name = "fracstiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sum-of-exponentials table for the kernel t^(α-1)/Γ(α).
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "t-end", visible_alias = "t_end")]
        t_end: f64,
        /// Table file; the table goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a built-in problem and write the solution CSV and stats JSON.
    Solve(RunArgs),
    /// Time the same solve with dense and structured linear algebra.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Repetitions per mode; the fastest counts.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// List the built-in problems.
    List {
        /// Machine-readable descriptors.
        #[arg(long)]
        json: bool,
    },
}

/// Run settings. Every flag except `--config` is also a config-file key.
#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem name, or a config-file path.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// by-species | by-gridpoint
    #[arg(long)]
    ordering: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Kernel accuracy; defaults to tol.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "t-end", visible_alias = "t_end")]
    t_end: Option<String>,
    #[arg(long = "grid-d", visible_alias = "grid_d")]
    grid_d: Option<String>,
    /// dense | structured | banded
    #[arg(long)]
    linalg: Option<String>,
    /// volt1 | volt2 | auto
    #[arg(long)]
    formulation: Option<String>,
    /// Number of equally spaced output points.
    #[arg(long)]
    outputs: Option<String>,
    #[arg(long = "out-csv", visible_alias = "out_csv")]
    out_csv: Option<String>,
    #[arg(long = "out-stats", visible_alias = "out_stats")]
    out_stats: Option<String>,
    /// Fail with exit code 3 when the endpoint error exceeds this.
    #[arg(long = "max-error", visible_alias = "max_error")]
    max_error: Option<String>,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub enum Failure {
    Integration(String),
    Input(String),
    Assertion(String),
    Io(String),
}

impl Failure {
    pub fn message(&self) -> &str {
        match self {
            Failure::Integration(m) | Failure::Input(m) | Failure::Assertion(m) | Failure::Io(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Integration(_) => 1,
            Failure::Input(_) => 2,
            Failure::Assertion(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl From<fracstiff::Error> for Failure {
    fn from(e: fracstiff::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, Failure> {
        let mut flags = Settings::default();
        let pairs = [
            ("problem", &self.problem),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("ordering", &self.ordering),
            ("tol", &self.tol),
            ("eps", &self.eps),
            ("t_end", &self.t_end),
            ("grid_d", &self.grid_d),
            ("linalg", &self.linalg),
            ("formulation", &self.formulation),
            ("outputs", &self.outputs),
            ("out_csv", &self.out_csv),
            ("out_stats", &self.out_stats),
            ("max_error", &self.max_error),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v.as_str())?;
            }
        }
        let mut base = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        // `--problem path/to/run.cfg` names a config file instead of a problem
        if let Some(p) = &self.problem {
            let is_name = catalog().iter().any(|c| c.name == p);
            if !is_name && std::path::Path::new(p).is_file() {
                base = base.merged(&Settings::load(p.as_ref())?);
                flags.remove("problem");
            }
        }
        Ok(base.merged(&flags))
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))
}

fn cmd_kernel(alpha: f64, eps: f64, t_end: f64, out: Option<PathBuf>) -> Result<(), Failure> {
    let soe = SumOfExponentials::new(alpha, eps, t_end)?;
    let worst = soe.verify(1000)?;
    let p = soe.params();
    let summary = format!(
        "alpha {alpha}  eps {eps:e}  T {t_end}\ndelta {:e}\nh {:.6}\nM {}  N {}  terms {}\nmax relative error {worst:.3e} (1000 samples on [delta, T])",
        p.delta(),
        p.h(),
        p.m_lo(),
        p.n_hi(),
        soe.len()
    );
    match out {
        Some(path) => {
            let mut w = create(&path)?;
            soe.write_table(&mut w)?;
            w.flush()?;
            println!("{summary}");
        }
        None => {
            soe.write_table(io::stdout().lock())?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn check_status(status: Status, t_final: f64) -> Result<(), Failure> {
    match status {
        Status::Success => Ok(()),
        s => Err(Failure::Integration(format!("integration stopped at t = {t_final}: {}", s.as_str()))),
    }
}

fn cmd_solve(args: &RunArgs) -> Result<(), Failure> {
    let cfg = RunConfig::from_settings(&args.settings()?)?;
    let run = run::solve(&cfg, None)?;
    match &cfg.out_csv {
        Some(path) => run::write_csv(&run, &mut create(path)?)?,
        None => run::write_csv(&run, &mut io::stdout().lock())?,
    }
    let stats = serde_json::to_string_pretty(&run::stats_json(&cfg, &run)).expect("serializable");
    match &cfg.out_stats {
        Some(path) => {
            let mut w = create(path)?;
            writeln!(w, "{stats}")?;
            w.flush()?;
        }
        None => eprintln!("{stats}"),
    }
    check_status(run.report.status, run.report.t_final)?;
    if let Some(limit) = cfg.max_error {
        match run.endpoint_error() {
            Some(e) if e <= limit => {}
            Some(e) => return Err(Failure::Assertion(format!("endpoint error {e:e} exceeds max_error {limit:e}"))),
            None => return Err(Failure::Assertion("max_error given but no truth is known at the endpoint".into())),
        }
    }
    Ok(())
}

fn cmd_bench(args: &RunArgs, repeat: usize) -> Result<(), Failure> {
    let mut settings = args.settings()?;
    if settings.get("outputs").is_none() {
        settings.set("outputs", "20")?;
    }
    let cfg = RunConfig::from_settings(&settings)?;
    let fast_mode = match cfg.linalg {
        Some(LinalgMode::FullDense) => {
            return Err(Failure::Input("bench compares against dense; choose structured or banded".into()))
        }
        Some(m) => m,
        None => run::default_mode(&run::build(&cfg)?),
    };
    // sequential repetitions, best time kept
    let best = |mode| -> Result<run::Run, Failure> {
        let mut best: Option<run::Run> = None;
        for _ in 0..repeat.max(1) {
            let r = run::solve(&cfg, Some(mode))?;
            check_status(r.report.status, r.report.t_final)?;
            if best.as_ref().is_none_or(|b| r.report.wall_time < b.report.wall_time) {
                best = Some(r);
            }
        }
        Ok(best.expect("at least one repetition"))
    };
    let dense = best(LinalgMode::FullDense)?;
    let fast = best(fast_mode)?;
    let diff = run::trajectory_difference(&fast.report, &dense.report);
    let speedup = dense.report.wall_time / fast.report.wall_time;
    println!("problem {}  dimension {}", dense.bench.name, dense.system.total_dim());
    println!("{:<12} {:>12} {:>8} {:>8}", "mode", "wall_s", "nstep", "njac");
    for r in [&dense, &fast] {
        println!("{:<12} {:>12.6} {:>8} {:>8}", r.mode.as_str(), r.report.wall_time, r.report.stats.nstep, r.report.stats.njac);
    }
    println!("speedup {speedup:.1}x");
    println!("agreement {diff:.3e}");
    if let Some(path) = &cfg.out_stats {
        let doc = json!({
            "dense": run::stats_json(&cfg, &dense),
            "fast": run::stats_json(&cfg, &fast),
            "speedup": speedup,
            "agreement": diff,
        });
        let mut w = create(path)?;
        writeln!(w, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
        w.flush()?;
    }
    if !(diff <= 1e-10) {
        return Err(Failure::Assertion(format!("trajectories differ by {diff:e} (limit 1e-10)")));
    }
    Ok(())
}

fn cmd_list(as_json: bool) -> Result<(), Failure> {
    let specs = catalog();
    let text = if as_json {
        let doc: Vec<_> = specs
            .iter()
            .map(|s| {
                let params: Vec<_> = s
                    .parameters
                    .iter()
                    .map(|(name, kind, default, meaning)| {
                        json!({"name": name, "kind": kind, "default": default, "meaning": meaning})
                    })
                    .collect();
                json!({"name": s.name, "summary": s.summary, "parameters": params, "truth": s.truth})
            })
            .collect();
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    } else {
        let mut text = String::new();
        for s in specs {
            text += &format!("{}: {}\n", s.name, s.summary);
            for (name, kind, default, meaning) in s.parameters {
                text += &format!("    {name} ({kind}, default {default}): {meaning}\n");
            }
            text += &format!("    truth: {}\n", s.truth);
        }
        text
    };
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kernel { alpha, eps, t_end, out } => cmd_kernel(alpha, eps, t_end, out),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench { run, repeat } => cmd_bench(&run, repeat),
        Command::List { json } => cmd_list(json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
