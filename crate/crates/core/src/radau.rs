//! Three-stage Radau IIA (order 5) for `M y' = f(t, y)` with diagonal,
//! possibly singular `M`.
//!
//! Follows the classical RADAU5 design: simplified Newton on the transformed
//! stage system (one real and one complex linear solve per iteration),
//! embedded error estimate, Gustafsson's predictive step controller, Jacobian
//! and factorization reuse, and collocation dense output.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A system `M y' = f(t, y)` the integrator can advance.
pub trait ImplicitSystem {
    type Jacobian;
    fn dim(&self) -> usize;
    /// Number of leading components stored in the output samples.
    fn output_dim(&self) -> usize {
        self.dim()
    }
    /// Diagonal of `M`.
    fn mass(&self) -> &[f64];
    fn initial_state(&self) -> Vec<f64>;
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]);
    fn jacobian(&self, t: f64, y: &[f64]) -> Self::Jacobian;
    /// Rejects algebraic rows whose residual at `t = 0` exceeds `tol(row)`.
    fn check_initial(&self, tol: &dyn Fn(usize) -> f64) -> Result<()> {
        let y0 = self.initial_state();
        let mut f = vec![0.0; self.dim()];
        self.rhs(0.0, &y0, &mut f);
        for (row, (&m, &r)) in self.mass().iter().zip(&f).enumerate() {
            if m == 0.0 && !(r.abs() <= tol(row)) {
                return Err(Error::Inconsistent { row, residual: r });
            }
        }
        Ok(())
    }
}

/// Factors and solves `(s M - J) x = b` for the real and the complex shift.
pub trait LinearSolver<J> {
    fn factorize(&mut self, jac: &J, mass: &[f64], real_shift: f64, complex_shift: Complex64) -> Result<()>;
    fn solve_real(&mut self, rhs: &mut [f64]);
    /// Solves with the complex shift; `re + i·im` is overwritten by the solution.
    fn solve_complex(&mut self, re: &mut [f64], im: &mut [f64]);
}

/// Scalar or per-component tolerance.
#[derive(Debug, Clone, PartialEq)]
pub enum Tolerance {
    Scalar(f64),
    PerComponent(Vec<f64>),
}

impl Tolerance {
    pub fn at(&self, i: usize) -> f64 {
        match self {
            Tolerance::Scalar(v) => *v,
            Tolerance::PerComponent(v) => v[i],
        }
    }

    fn min(&self) -> f64 {
        match self {
            Tolerance::Scalar(v) => *v,
            Tolerance::PerComponent(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    fn validate(&self, n: usize, what: &'static str) -> Result<()> {
        if let Tolerance::PerComponent(v) = self {
            if v.len() != n {
                return Err(Error::Dimension { what, got: v.len(), expected: n });
            }
        }
        if !(self.min() > 0.0) {
            return Err(Error::InvalidArgument(format!("{what} must be positive")));
        }
        Ok(())
    }
}

impl From<f64> for Tolerance {
    fn from(v: f64) -> Self {
        Tolerance::Scalar(v)
    }
}

/// Integrator settings. Defaults are the classical RADAU5 constants.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: Tolerance,
    pub atol: Tolerance,
    /// First step; chosen by [`initial_step`] when `None`.
    pub h_init: Option<f64>,
    /// Step cap; defaults to the integration interval.
    pub h_max: Option<f64>,
    pub max_steps: usize,
    pub newton_max_iter: usize,
    /// Newton stopping tolerance; derived from `rtol` when `None`.
    pub newton_tol: Option<f64>,
    pub jacobian_reuse: bool,
    /// Contraction rate below which the Jacobian is kept.
    pub jacobian_threshold: f64,
    /// Step ratios within this band keep the factorization.
    pub step_ratio_band: (f64, f64),
    pub safety: f64,
    /// Bounds of `h_new / h`.
    pub fac_min: f64,
    pub fac_max: f64,
    pub predictive: bool,
    /// Consecutive failed Newton iterations tolerated before giving up.
    pub max_newton_failures: usize,
    /// Constant step without error control (order studies).
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: Tolerance::Scalar(1e-6),
            atol: Tolerance::Scalar(1e-6),
            h_init: None,
            h_max: None,
            max_steps: 1_000_000,
            newton_max_iter: 7,
            newton_tol: None,
            jacobian_reuse: true,
            jacobian_threshold: 0.001,
            step_ratio_band: (1.0, 1.2),
            safety: 0.9,
            fac_min: 0.2,
            fac_max: 8.0,
            predictive: true,
            max_newton_failures: 20,
            fixed_step: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        IntegratorConfig { rtol: tol.into(), atol: tol.into(), ..Default::default() }
    }

    fn validate(&self, n: usize) -> Result<()> {
        self.rtol.validate(n, "rtol")?;
        self.atol.validate(n, "atol")?;
        if !(self.fac_min < 1.0 && self.fac_max > 1.0 && self.fac_min > 0.0) {
            return Err(Error::InvalidArgument("step factors need 0 < fac_min < 1 < fac_max".into()));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(Error::InvalidArgument("safety must lie in (0,1)".into()));
        }
        if self.newton_max_iter == 0 || self.max_steps == 0 {
            return Err(Error::InvalidArgument("iteration and step limits must be positive".into()));
        }
        for (name, v) in [("h_init", self.h_init), ("h_max", self.h_max), ("fixed_step", self.fixed_step)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{name} must be positive")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    MaxSteps,
    /// Newton did not converge after repeated step reductions, or the
    /// iteration matrix stayed singular.
    NewtonFailure,
    StepUnderflow,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::MaxSteps => "max-steps",
            Status::NewtonFailure => "newton-failure",
            Status::StepUnderflow => "step-underflow",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub nstep: usize,
    pub naccpt: usize,
    pub nrejct: usize,
    pub nfcn: usize,
    pub njac: usize,
    /// Factorizations; each covers the real and the complex matrix.
    pub ndec: usize,
    /// Linear solves, real and complex counted separately.
    pub nsol: usize,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: Status,
    /// Output points reached; shorter than requested after a failure.
    pub t_samples: Vec<f64>,
    /// Leading `output_dim` components at each output point.
    pub y_samples: Vec<Vec<f64>>,
    pub t_final: f64,
    pub final_state: Vec<f64>,
    pub stats: Stats,
    /// Seconds spent in [`integrate`].
    pub wall_time: f64,
}

const EPS: f64 = f64::EPSILON;

mod tableau {
    pub const SQ6: f64 = 2.449_489_742_783_178;
    pub const C1: f64 = (4.0 - SQ6) / 10.0;
    pub const C2: f64 = (4.0 + SQ6) / 10.0;
    pub const C1M1: f64 = C1 - 1.0;
    pub const C2M1: f64 = C2 - 1.0;
    pub const C1MC2: f64 = C1 - C2;
    pub const DD1: f64 = -(13.0 + 7.0 * SQ6) / 3.0;
    pub const DD2: f64 = (-13.0 + 7.0 * SQ6) / 3.0;
    pub const DD3: f64 = -1.0 / 3.0;

    /// Eigenvector basis `T` of `A^-1` (third column is `(1, 0)` in rows 2..3).
    pub const T: [[f64; 3]; 3] = [
        [9.123_239_487_089_294_279_2e-2, -0.141_255_295_020_954_208_43, -3.002_919_410_514_742_449_2e-2],
        [0.241_717_932_707_107_018_96, 0.204_129_352_293_799_931_99, 0.382_942_112_757_261_937_79],
        [0.966_048_182_615_092_936_19, 1.0, 0.0],
    ];
    pub const TI: [[f64; 3]; 3] = [
        [4.325_579_890_063_155_351_0, 0.339_199_251_815_809_869_54, 0.541_770_539_935_874_871_19],
        [-4.178_718_591_551_904_727_3, -0.327_682_820_761_062_387_08, 0.476_623_554_500_550_451_96],
        [-0.502_872_634_945_786_875_95, 2.571_926_949_855_605_429_2, -0.596_039_204_828_224_924_97],
    ];

    /// Real eigenvalue `γ̂` and complex pair `α ± iβ` of `A^-1`.
    pub fn eigenvalues() -> (f64, f64, f64) {
        let c81 = 81f64.cbrt();
        let c9 = 9f64.cbrt();
        let u1 = (6.0 + c81 - c9) / 30.0;
        let alph = (12.0 - c81 + c9) / 60.0;
        let beta = (c81 + c9) * 3f64.sqrt() / 60.0;
        let cno = alph * alph + beta * beta;
        (1.0 / u1, alph / cno, beta / cno)
    }
}

fn rms(v: &[f64], scal: &[f64]) -> f64 {
    let s: f64 = v.iter().zip(scal).map(|(x, s)| (x / s) * (x / s)).sum();
    (s / v.len().max(1) as f64).sqrt()
}

/// First step from the scaled sizes of `y0` and `y'(0)` on the differential
/// rows; `1e-6` of the interval when either is negligible. Never exceeds
/// `h_max`.
pub fn initial_step<S: ImplicitSystem>(sys: &S, cfg: &IntegratorConfig, t_end: f64) -> f64 {
    let span = (t_end).abs().max(f64::MIN_POSITIVE);
    let h_max = cfg.h_max.unwrap_or(span).min(span);
    let y0 = sys.initial_state();
    let mut f0 = vec![0.0; y0.len()];
    sys.rhs(0.0, &y0, &mut f0);
    let mass = sys.mass();
    let (mut s0, mut s1, mut count) = (0.0, 0.0, 0usize);
    for i in 0..y0.len() {
        if mass[i] == 0.0 {
            continue;
        }
        let sc = cfg.atol.at(i) + cfg.rtol.at(i) * y0[i].abs();
        s0 += (y0[i] / sc).powi(2);
        s1 += (f0[i] / mass[i] / sc).powi(2);
        count += 1;
    }
    let n = count.max(1) as f64;
    let (d0, d1) = ((s0 / n).sqrt(), (s1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    if h.is_finite() && h > 0.0 {
        h.min(h_max)
    } else {
        (1e-6 * span).min(h_max)
    }
}

/// Integrates from `t = 0` to the last output point and samples the state at
/// every output point by the collocation polynomial.
///
/// Configuration and input errors are returned as `Err`; integration failures
/// yield a report with a non-success status and the samples reached so far.
pub fn integrate<S, L>(sys: &S, cfg: &IntegratorConfig, solver: &mut L, output_points: &[f64]) -> Result<SolveReport>
where
    S: ImplicitSystem,
    L: LinearSolver<S::Jacobian>,
{
    let start = Instant::now();
    let n = sys.dim();
    cfg.validate(n)?;
    if sys.mass().len() != n {
        return Err(Error::Dimension { what: "mass", got: sys.mass().len(), expected: n });
    }
    let Some(&t_end) = output_points.last() else {
        return Err(Error::InvalidArgument("no output points".into()));
    };
    if output_points.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || output_points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("output points must be finite, non-negative and increasing".into()));
    }
    let y0 = sys.initial_state();
    sys.check_initial(&|i| cfg.atol.at(i) + cfg.rtol.at(i) * y0[i].abs())?;

    let mut run = Run::new(sys, cfg, output_points, y0);
    let status = if t_end == 0.0 { Status::Success } else { run.advance(solver, t_end) };
    let Run { stats, t_samples, y_samples, x, y, .. } = run;
    Ok(SolveReport {
        status,
        t_samples,
        y_samples,
        t_final: x,
        final_state: y,
        stats,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

enum Next {
    Jacobian,
    Decompose,
    Step,
}

struct Run<'a, S: ImplicitSystem> {
    sys: &'a S,
    cfg: &'a IntegratorConfig,
    outputs: &'a [f64],
    next_out: usize,
    out_dim: usize,
    rtol: Vec<f64>,
    atol: Vec<f64>,
    stats: Stats,
    t_samples: Vec<f64>,
    y_samples: Vec<Vec<f64>>,
    x: f64,
    y: Vec<f64>,
    /// Collocation polynomial of the last accepted step.
    cont: [Vec<f64>; 3],
    x_old: f64,
    h_old: f64,
}

impl<'a, S: ImplicitSystem> Run<'a, S> {
    fn new(sys: &'a S, cfg: &'a IntegratorConfig, outputs: &'a [f64], y0: Vec<f64>) -> Self {
        let n = y0.len();
        // Tolerances are mapped to the order-3 error estimate scale.
        let mut rtol = vec![0.0; n];
        let mut atol = vec![0.0; n];
        for i in 0..n {
            let r = cfg.rtol.at(i);
            let q = 0.1 * r.powf(2.0 / 3.0);
            atol[i] = q * cfg.atol.at(i) / r;
            rtol[i] = q;
        }
        let mut run = Run {
            sys,
            cfg,
            outputs,
            next_out: 0,
            out_dim: sys.output_dim().min(n),
            rtol,
            atol,
            stats: Stats::default(),
            t_samples: Vec::with_capacity(outputs.len()),
            y_samples: Vec::with_capacity(outputs.len()),
            x: 0.0,
            y: y0,
            cont: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            x_old: 0.0,
            h_old: 0.0,
        };
        while run.next_out < outputs.len() && outputs[run.next_out] == 0.0 {
            run.record(0.0, None);
        }
        run
    }

    fn record(&mut self, t: f64, dense: Option<f64>) {
        let sample = match dense {
            None => self.y[..self.out_dim].to_vec(),
            Some(s) => (0..self.out_dim)
                .map(|i| {
                    let [c1, c2, c3] = &self.cont;
                    self.y[i] + s * (c1[i] + (s - tableau::C2M1) * (c2[i] + (s - tableau::C1M1) * c3[i]))
                })
                .collect(),
        };
        self.t_samples.push(t);
        self.y_samples.push(sample);
        self.next_out += 1;
    }

    fn emit_outputs(&mut self) {
        while self.next_out < self.outputs.len() && self.outputs[self.next_out] <= self.x {
            let t = self.outputs[self.next_out];
            if t == self.x {
                self.record(t, None);
            } else {
                self.record(t, Some((t - self.x) / self.h_old));
            }
        }
    }

    fn scal(&self) -> Vec<f64> {
        self.y.iter().enumerate().map(|(i, yi)| self.atol[i] + self.rtol[i] * yi.abs()).collect()
    }

    fn advance<L: LinearSolver<S::Jacobian>>(&mut self, solver: &mut L, x_end: f64) -> Status {
        use tableau::*;
        let cfg = self.cfg;
        let n = self.y.len();
        let mass = self.sys.mass().to_vec();
        let (u1, alph, beta) = eigenvalues();
        let nit = cfg.newton_max_iter;
        let fixed = cfg.fixed_step;

        let rtol_min = self.rtol.iter().copied().fold(f64::INFINITY, f64::min);
        let fnewt = cfg.newton_tol.unwrap_or_else(|| (10.0 * EPS / rtol_min).max(0.03f64.min(rtol_min.sqrt())));
        let cfac = cfg.safety * (1 + 2 * nit) as f64;
        let (facr, facl) = (1.0 / cfg.fac_max, 1.0 / cfg.fac_min);
        let thet = cfg.jacobian_threshold;
        let (quot1, quot2) = cfg.step_ratio_band;
        let h_max = cfg.h_max.unwrap_or(x_end).min(x_end);

        let mut h = match fixed {
            Some(hf) => hf,
            None => cfg.h_init.unwrap_or_else(|| initial_step(self.sys, cfg, x_end)),
        }
        .min(h_max);
        let mut last = false;
        if self.x + h * 1.0001 >= x_end {
            h = x_end - self.x;
            last = true;
        }

        let mut z = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut w = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut stage = vec![0.0; n];
        let mut fz = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut y0f = vec![0.0; n];
        self.sys.rhs(self.x, &self.y, &mut y0f);
        self.stats.nfcn += 1;
        let mut scal = self.scal();

        let mut jac: Option<S::Jacobian> = None;
        let mut first = true;
        let mut reject = false;
        let mut caljac = false;
        let mut faccon = 1.0f64;
        let mut theta: f64;
        let mut h_acc = 0.0;
        let mut err_acc = 0.0;
        let mut nsing = 0usize;
        let mut newton_failures = 0usize;
        let mut next = Next::Jacobian;

        loop {
            match next {
                Next::Jacobian => {
                    jac = Some(self.sys.jacobian(self.x, &self.y));
                    self.stats.njac += 1;
                    caljac = true;
                    next = Next::Decompose;
                }
                Next::Decompose => {
                    let shift_c = Complex64::new(alph / h, beta / h);
                    let ok = solver.factorize(jac.as_ref().expect("jacobian"), &mass, u1 / h, shift_c);
                    if ok.is_err() {
                        nsing += 1;
                        if nsing >= 5 || fixed.is_some() {
                            return Status::NewtonFailure;
                        }
                        h *= 0.5;
                        reject = true;
                        last = false;
                        next = if caljac { Next::Decompose } else { Next::Jacobian };
                        continue;
                    }
                    self.stats.ndec += 1;
                    next = Next::Step;
                }
                Next::Step => {
                    self.stats.nstep += 1;
                    if self.stats.nstep > cfg.max_steps {
                        return Status::MaxSteps;
                    }
                    if !(h.abs() >= 10.0 * EPS * self.x.abs()) || h.abs() < f64::MIN_POSITIVE {
                        return Status::StepUnderflow;
                    }
                    let fac1 = u1 / h;
                    let (alphn, betan) = (alph / h, beta / h);

                    // starting values
                    if first {
                        for v in z.iter_mut().chain(w.iter_mut()) {
                            v.iter_mut().for_each(|x| *x = 0.0);
                        }
                    } else {
                        let c3q = h / self.h_old;
                        let (c1q, c2q) = (C1 * c3q, C2 * c3q);
                        let [k1, k2, k3] = &self.cont;
                        for i in 0..n {
                            let p = |q: f64| q * (k1[i] + (q - C2M1) * (k2[i] + (q - C1M1) * k3[i]));
                            let zi = [p(c1q), p(c2q), p(c3q)];
                            for s in 0..3 {
                                z[s][i] = zi[s];
                                w[s][i] = TI[s][0] * zi[0] + TI[s][1] * zi[1] + TI[s][2] * zi[2];
                            }
                        }
                    }

                    // simplified Newton
                    faccon = faccon.max(EPS).powf(0.8);
                    theta = thet.abs();
                    let mut newt = 0usize;
                    let mut dynold = 0.0f64;
                    let mut thqold = 0.0f64;
                    let mut slow = None;
                    let converged = loop {
                        if newt >= nit {
                            break false;
                        }
                        for (s, c) in [C1, C2, 1.0].into_iter().enumerate() {
                            for i in 0..n {
                                stage[i] = self.y[i] + z[s][i];
                            }
                            self.sys.rhs(self.x + c * h, &stage, &mut fz[s]);
                        }
                        self.stats.nfcn += 3;
                        // transformed residuals
                        for i in 0..n {
                            let a = [fz[0][i], fz[1][i], fz[2][i]];
                            let mw = [-mass[i] * w[0][i], -mass[i] * w[1][i], -mass[i] * w[2][i]];
                            let r: [f64; 3] = std::array::from_fn(|s| TI[s][0] * a[0] + TI[s][1] * a[1] + TI[s][2] * a[2]);
                            z[0][i] = r[0] + mw[0] * fac1;
                            z[1][i] = r[1] + mw[1] * alphn - mw[2] * betan;
                            z[2][i] = r[2] + mw[2] * alphn + mw[1] * betan;
                        }
                        let [z1, z2, z3] = &mut z;
                        solver.solve_real(z1);
                        solver.solve_complex(z2, z3);
                        self.stats.nsol += 2;
                        self.stats.newton_iterations += 1;
                        newt += 1;
                        let dyno = {
                            let s: f64 = (0..n)
                                .map(|i| {
                                    let d = scal[i];
                                    (z[0][i] / d).powi(2) + (z[1][i] / d).powi(2) + (z[2][i] / d).powi(2)
                                })
                                .sum();
                            (s / (3 * n) as f64).sqrt()
                        };
                        if newt > 1 && newt < nit {
                            let thq = dyno / dynold;
                            theta = if newt == 2 { thq } else { (thq * thqold).sqrt() };
                            thqold = thq;
                            if theta < 0.99 {
                                faccon = theta / (1.0 - theta);
                                let dyth = faccon * dyno * theta.powi((nit - 1 - newt) as i32) / fnewt;
                                if dyth >= 1.0 && fixed.is_none() {
                                    let qnewt = dyth.clamp(1e-4, 20.0);
                                    slow = Some(0.8 * qnewt.powf(-1.0 / (4.0 + (nit - 1 - newt) as f64)));
                                    break false;
                                }
                            } else {
                                break false;
                            }
                        }
                        dynold = dyno.max(EPS);
                        for i in 0..n {
                            for s in 0..3 {
                                w[s][i] += z[s][i];
                            }
                            for s in 0..3 {
                                z[s][i] = T[s][0] * w[0][i] + T[s][1] * w[1][i] + T[s][2] * w[2][i];
                            }
                        }
                        if faccon * dyno <= fnewt {
                            break true;
                        }
                    };

                    if !converged {
                        if fixed.is_some() {
                            return Status::NewtonFailure;
                        }
                        reject = true;
                        last = false;
                        if let Some(hhfac) = slow {
                            h *= hhfac;
                        } else {
                            newton_failures += 1;
                            if newton_failures > cfg.max_newton_failures {
                                return Status::NewtonFailure;
                            }
                            h *= 0.5;
                        }
                        next = if caljac { Next::Decompose } else { Next::Jacobian };
                        continue;
                    }
                    newton_failures = 0;

                    // error estimate
                    let (err, hnew_quot) = if fixed.is_some() {
                        (0.0, 1.0)
                    } else {
                        let (hee1, hee2, hee3) = (DD1 / h, DD2 / h, DD3 / h);
                        let mut f2 = vec![0.0; n];
                        let mut cont = vec![0.0; n];
                        for i in 0..n {
                            let f1 = hee1 * z[0][i] + hee2 * z[1][i] + hee3 * z[2][i];
                            f2[i] = mass[i] * f1;
                            cont[i] = f2[i] + y0f[i];
                        }
                        solver.solve_real(&mut cont);
                        self.stats.nsol += 1;
                        let mut err = rms(&cont, &scal).max(1e-10);
                        if err >= 1.0 && (first || reject) {
                            for i in 0..n {
                                stage[i] = self.y[i] + cont[i];
                            }
                            let mut f1 = vec![0.0; n];
                            self.sys.rhs(self.x, &stage, &mut f1);
                            self.stats.nfcn += 1;
                            for i in 0..n {
                                cont[i] = f1[i] + f2[i];
                            }
                            solver.solve_real(&mut cont);
                            self.stats.nsol += 1;
                            err = rms(&cont, &scal).max(1e-10);
                        }
                        let fac = cfg.safety.min(cfac / (newt + 2 * nit) as f64);
                        (err, (err.powf(0.25) / fac).clamp(facr, facl))
                    };
                    let mut quot = hnew_quot;

                    if err < 1.0 {
                        first = false;
                        self.stats.naccpt += 1;
                        if cfg.predictive && fixed.is_none() {
                            if self.stats.naccpt > 1 {
                                let facgus = (h_acc / h * (err * err / err_acc).powf(0.25) / cfg.safety).clamp(facr, facl);
                                quot = quot.max(facgus);
                            }
                            h_acc = h;
                            err_acc = err.max(1e-2);
                        }
                        let mut hnew = h / quot;
                        self.x_old = self.x;
                        self.h_old = h;
                        self.x = if last { x_end } else { self.x + h };
                        let [k1, k2, k3] = &mut self.cont;
                        for i in 0..n {
                            let (z1, z2, z3) = (z[0][i], z[1][i], z[2][i]);
                            self.y[i] += z3;
                            k1[i] = (z2 - z3) / C2M1;
                            let ak = (z1 - z2) / C1MC2;
                            let acont3 = (ak - z1 / C1) / C2;
                            k2[i] = (ak - k1[i]) / C1M1;
                            k3[i] = k2[i] - acont3;
                        }
                        scal = self.scal();
                        self.emit_outputs();
                        caljac = false;
                        if last {
                            return Status::Success;
                        }
                        self.sys.rhs(self.x, &self.y, &mut y0f);
                        self.stats.nfcn += 1;
                        if let Some(hf) = fixed {
                            hnew = hf;
                        }
                        hnew = hnew.min(h_max);
                        if reject {
                            hnew = hnew.min(h);
                        }
                        reject = false;
                        let reuse = cfg.jacobian_reuse && fixed.is_none() && theta <= thet;
                        if self.x + hnew / quot1 >= x_end || (fixed.is_some() && self.x + hnew * (1.0 + 1e-12) >= x_end) {
                            h = x_end - self.x;
                            last = true;
                        } else {
                            let qt = hnew / h;
                            if reuse && qt >= quot1 && qt <= quot2 {
                                next = Next::Step;
                                continue;
                            }
                            h = hnew;
                        }
                        next = if reuse { Next::Decompose } else { Next::Jacobian };
                    } else {
                        reject = true;
                        last = false;
                        if first {
                            h *= 0.1;
                        } else {
                            h /= quot;
                        }
                        if self.stats.naccpt >= 1 {
                            self.stats.nrejct += 1;
                        }
                        next = if caljac { Next::Decompose } else { Next::Jacobian };
                    }
                }
            }
        }
    }
}
