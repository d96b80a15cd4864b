//! Building, solving and reporting one configured run.

use std::io::Write;

use fracstiff::benchmarks::{self, Benchmark, ErrorMeasure, Ordering, Truth};
use fracstiff::linalg::Structure;
use fracstiff::{augment, integrate, AugmentedSystem, IntegratorConfig, LinalgMode, SolveReport, StructuredSolver};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::Failure;

pub fn build(cfg: &RunConfig) -> Result<Benchmark, Failure> {
    let b = match cfg.problem.as_str() {
        "example1" => benchmarks::example1(cfg.alpha.unwrap_or(0.5), cfg.formulation)?,
        "brusselator" => benchmarks::brusselator()?,
        "multiterm" => benchmarks::multiterm(cfg.alpha.unwrap_or(0.5))?,
        "pde1d" => benchmarks::pde1d(
            cfg.alpha.unwrap_or(1.0 / 3.0),
            cfg.beta.unwrap_or(5.0 / 3.0),
            cfg.grid_d.unwrap_or(100),
        )?,
        "reaction_diffusion" => benchmarks::reaction_diffusion(
            cfg.alpha.unwrap_or(0.5),
            cfg.grid_d.unwrap_or(1000),
            cfg.ordering.unwrap_or(Ordering::ByGridpoint),
        )?,
        "decay" => benchmarks::decay()?,
        other => return Err(Failure::Input(format!("unknown problem '{other}'"))),
    };
    Ok(b)
}

/// Banded problems default to the banded solver, all others to the
/// dense-head one.
pub fn default_mode(b: &Benchmark) -> LinalgMode {
    match b.ivp.structure() {
        Structure::Banded { .. } => LinalgMode::BandedHead,
        Structure::Dense => LinalgMode::DenseHead,
    }
}

/// A finished (possibly failed) integration with everything needed to report it.
pub struct Run {
    pub bench: Benchmark,
    pub system: AugmentedSystem,
    pub mode: LinalgMode,
    pub t_end: f64,
    pub report: SolveReport,
}

impl Run {
    /// Error against the truth at the last sample, when known there.
    pub fn endpoint_error(&self) -> Option<f64> {
        let t = *self.report.t_samples.last()?;
        self.bench.error_at(t, self.report.y_samples.last()?)
    }
}

pub fn output_points(t_end: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| if k == n { t_end } else { t_end * k as f64 / n as f64 }).collect()
}

pub fn solve(cfg: &RunConfig, mode: Option<LinalgMode>) -> Result<Run, Failure> {
    let bench = build(cfg)?;
    let t_end = cfg.t_end.unwrap_or(bench.t_end);
    let mode = mode.or(cfg.linalg).unwrap_or_else(|| default_mode(&bench));
    let system = augment(&bench.ivp, cfg.eps, t_end)?;
    let icfg = IntegratorConfig::with_tolerance(cfg.tol);
    let mut solver = StructuredSolver::new(mode);
    let report = integrate(&system, &icfg, &mut solver, &output_points(t_end, cfg.outputs))?;
    Ok(Run { bench, system, mode, t_end, report })
}

/// `t,y_1,…,y_d[,err]`; the error column appears when an exact solution is known.
pub fn write_csv(run: &Run, out: &mut dyn Write) -> std::io::Result<()> {
    let d = run.system.head_dim();
    let exact = matches!(run.bench.truth, Truth::Exact(_));
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("y_{i}")));
    if exact {
        header.push("err".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for (t, y) in run.report.t_samples.iter().zip(&run.report.y_samples) {
        let mut row = vec![format!("{t:e}")];
        row.extend(y.iter().map(|v| format!("{v:e}")));
        if exact {
            row.push(format!("{:e}", run.bench.error_at(*t, y).unwrap_or(f64::NAN)));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

fn measure_name(m: ErrorMeasure) -> &'static str {
    match m {
        ErrorMeasure::RelativeFirst => "relative_first",
        ErrorMeasure::AbsoluteFirst => "absolute_first",
        ErrorMeasure::RelativeComponents => "relative_components",
        ErrorMeasure::RelativeMax => "relative_max",
    }
}

/// JSON-safe number: non-finite values become `null`.
fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn stats_json(cfg: &RunConfig, run: &Run) -> Value {
    let s = run.report.stats;
    let kernels: Vec<Value> = run
        .system
        .kernels()
        .iter()
        .map(|k| {
            let p = k.params();
            json!({
                "order": num(p.delta_order()),
                "kernel_alpha": num(p.alpha()),
                "eps": num(p.eps()),
                "t_end": num(p.t_end()),
                "delta": num(p.delta()),
                "h": num(p.h()),
                "M": p.m_lo(),
                "N": p.n_hi(),
                "terms": p.n_terms(),
            })
        })
        .collect();
    let params: serde_json::Map<String, Value> =
        run.bench.params.iter().map(|(k, v)| (k.to_string(), num(*v))).collect();
    json!({
        "problem": run.bench.name,
        "params": params,
        "config": {
            "tol": num(cfg.tol),
            "eps": num(cfg.eps),
            "t_end": num(run.t_end),
            "linalg": run.mode.as_str(),
            "outputs": cfg.outputs,
        },
        "dimension": {
            "head": run.system.head_dim(),
            "integrals": run.system.blocks().len(),
            "total": run.system.total_dim(),
        },
        "kernels": kernels,
        "status": run.report.status.as_str(),
        "t_final": num(run.report.t_final),
        "stats": {
            "nstep": s.nstep,
            "naccpt": s.naccpt,
            "nrejct": s.nrejct,
            "nfcn": s.nfcn,
            "njac": s.njac,
            "ndec": s.ndec,
            "nsol": s.nsol,
            "newton_iterations": s.newton_iterations,
        },
        "wall_time": num(run.report.wall_time),
        "error": run.endpoint_error().map_or(Value::Null, num),
        "error_measure": measure_name(run.bench.measure),
    })
}

/// Largest deviation between two runs' samples relative to the largest
/// sample magnitude of `reference`.
pub fn trajectory_difference(a: &SolveReport, reference: &SolveReport) -> f64 {
    if a.t_samples != reference.t_samples {
        return f64::INFINITY;
    }
    let mut diff = 0.0f64;
    let mut scale = f64::MIN_POSITIVE;
    for (ya, yr) in a.y_samples.iter().zip(&reference.y_samples) {
        for (x, y) in ya.iter().zip(yr) {
            diff = diff.max((x - y).abs());
            scale = scale.max(y.abs());
        }
    }
    diff / scale
}
