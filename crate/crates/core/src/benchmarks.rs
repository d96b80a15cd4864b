//! Built-in test problems with exact solutions or reference values.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::{Coupling, CouplingKind, HeadMatrix, SparseRow, Structure};
use crate::problem::{
    from_caputo_volt1, from_caputo_volt1_split, from_caputo_volt2, CaputoRhs, FractionalIvp, IntegroDifferential,
};

/// How a Caputo equation of order above one is rewritten.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Algebraic form with the kernel split in the augmentation.
    Volt1,
    /// Integro-differential form with an order `α - m + 1` integral.
    Volt2,
    /// `Volt1` below order 1.5, `Volt2` above.
    Auto,
}

impl Formulation {
    fn resolve(self, alpha: f64) -> Formulation {
        match self {
            Formulation::Auto if alpha < 1.5 => Formulation::Volt1,
            Formulation::Auto => Formulation::Volt2,
            f => f,
        }
    }
}

/// Unknown ordering of the reaction-diffusion system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// All grid values of species 1, then 2, then 3. The Jacobian handed to
    /// the solver keeps only the three central diagonals.
    BySpecies,
    /// The three species of each grid point together; exact 7-band Jacobian.
    ByGridpoint,
}

type ExactFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Source of truth for error measurement.
#[derive(Clone)]
pub enum Truth {
    /// Exact solution of the output components.
    Exact(ExactFn),
    /// Reference values at one time.
    Reference { t: f64, values: Vec<f64> },
    None,
}

/// Error measure against the truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMeasure {
    /// `|y_0 - y*_0| / |y*_0|`.
    RelativeFirst,
    /// `|y_0 - y*_0|`.
    AbsoluteFirst,
    /// Euclidean norm of the componentwise relative deviations.
    RelativeComponents,
    /// `max |y - y*| / max |y*|`.
    RelativeMax,
}

/// A built problem together with its truth.
#[derive(Clone)]
pub struct Benchmark {
    pub name: &'static str,
    pub params: Vec<(&'static str, f64)>,
    pub ivp: FractionalIvp,
    /// Default horizon.
    pub t_end: f64,
    pub truth: Truth,
    pub measure: ErrorMeasure,
}

impl std::fmt::Debug for Benchmark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Benchmark").field("name", &self.name).field("params", &self.params).finish_non_exhaustive()
    }
}

impl Benchmark {
    /// Truth at `t`, if known there.
    pub fn truth_at(&self, t: f64) -> Option<Vec<f64>> {
        match &self.truth {
            Truth::Exact(f) => Some(f(t)),
            Truth::Reference { t: tr, values } if *tr == t => Some(values.clone()),
            _ => None,
        }
    }

    /// Error of the output components `y` at `t`.
    pub fn error_at(&self, t: f64, y: &[f64]) -> Option<f64> {
        let exact = self.truth_at(t)?;
        Some(measure(self.measure, y, &exact))
    }
}

pub fn measure(kind: ErrorMeasure, y: &[f64], exact: &[f64]) -> f64 {
    match kind {
        ErrorMeasure::RelativeFirst => (y[0] - exact[0]).abs() / exact[0].abs(),
        ErrorMeasure::AbsoluteFirst => (y[0] - exact[0]).abs(),
        ErrorMeasure::RelativeComponents => {
            y.iter().zip(exact).map(|(a, b)| ((a - b) / b).powi(2)).sum::<f64>().sqrt()
        }
        ErrorMeasure::RelativeMax => {
            let num = y.iter().zip(exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            num / exact.iter().map(|b| b.abs()).fold(0.0, f64::max)
        }
    }
}

/// Machine-readable description of a built-in problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub summary: &'static str,
    /// `(name, kind, default, meaning)`.
    pub parameters: &'static [(&'static str, &'static str, &'static str, &'static str)],
    pub truth: &'static str,
}

pub fn catalog() -> Vec<BenchmarkSpec> {
    vec![
        BenchmarkSpec {
            name: "example1",
            summary: "scalar nonlinear Caputo equation with a polynomial-in-t^(α/2) solution",
            parameters: &[
                ("alpha", "real", "0.5", "order, non-integer, in (0,2)"),
                ("formulation", "volt1|volt2|auto", "auto", "rewrite for alpha > 1"),
                ("t_end", "real", "1", "horizon"),
            ],
            truth: "exact: y(t) = (1.5 t^(α/2) - t^4)^2",
        },
        BenchmarkSpec {
            name: "brusselator",
            summary: "fractional Brusselator, orders 1.3 and 0.8, A=1, B=3",
            parameters: &[("t_end", "real", "220", "horizon; reference only at 220")],
            truth: "reference at t=220: y1=1.0097684171, y2=2.1581264031",
        },
        BenchmarkSpec {
            name: "multiterm",
            summary: "multi-order linear equation y'''+D^(α+2)y+y''+4y'+D^α y+4y=6cos t as an index-1 DAE",
            parameters: &[("alpha", "real", "0.5", "order in (0,1)"), ("t_end", "real", "5000", "horizon")],
            truth: "exact: y(t) = √2 sin(t + π/4)",
        },
        BenchmarkSpec {
            name: "pde1d",
            summary: "time-fractional heat equation on (0,1) by central differences, banded",
            parameters: &[
                ("alpha", "real", "1/3", "order in (0,2), non-integer"),
                ("beta", "real", "5/3", "exponent of the exact solution, beta ≥ alpha"),
                ("grid_d", "integer", "100", "interior grid points"),
                ("t_end", "real", "1000", "horizon"),
            ],
            truth: "exact: u(x,t) = x(1-x)(t^β+1)/2",
        },
        BenchmarkSpec {
            name: "reaction_diffusion",
            summary: "three-species reaction-diffusion system with memory, banded",
            parameters: &[
                ("alpha", "real", "0.5", "order in (0,1)"),
                ("grid_d", "integer", "1000", "interior grid points"),
                ("ordering", "by-species|by-gridpoint", "by-gridpoint", "unknown ordering and Jacobian variant"),
                ("t_end", "real", "30", "horizon"),
            ],
            truth: "none",
        },
        BenchmarkSpec {
            name: "decay",
            summary: "y' = -y without integral terms",
            parameters: &[("t_end", "real", "1", "horizon")],
            truth: "exact: y(t) = e^(-t)",
        },
    ]
}

struct Example1 {
    alpha: f64,
    c0: f64,
    c1: f64,
    c2: f64,
}

impl CaputoRhs for Example1 {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let a = self.alpha;
        let s = 1.5 * t.powf(a / 2.0) - t.powi(4);
        // y^(3/2) extended as y·sqrt|y| so Newton iterates may cross zero
        out[0] = self.c0 - self.c1 * t.powf(4.0 - a / 2.0) + self.c2 * t.powf(8.0 - a) + s * s * s
            - y[0] * y[0].abs().sqrt();
    }
    fn jacobian(&self, _t: f64, y: &[f64], jac: &mut HeadMatrix) {
        jac.set(0, 0, -1.5 * y[0].abs().sqrt());
    }
}

/// Scalar test equation with exact solution `(1.5 t^(α/2) - t^4)^2`, `y(0) = 0`.
pub fn example1(alpha: f64, formulation: Formulation) -> Result<Benchmark> {
    if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
        return Err(Error::InvalidArgument(format!("example1 needs a non-integer alpha in (0,2), got {alpha}")));
    }
    let rhs = Arc::new(Example1 {
        alpha,
        c0: 9.0 * gamma(1.0 + alpha) / 4.0,
        c1: 3.0 * gamma(5.0 + alpha / 2.0) / gamma(5.0 - alpha / 2.0),
        c2: gamma(9.0) / gamma(9.0 - alpha),
    });
    let ivp = if alpha < 1.0 {
        from_caputo_volt1(alpha, rhs, vec![0.0])?
    } else {
        match formulation.resolve(alpha) {
            Formulation::Volt2 => from_caputo_volt2(alpha, rhs, vec![0.0], vec![vec![0.0]])?,
            _ => from_caputo_volt1_split(alpha, rhs, vec![0.0], vec![vec![0.0]])?,
        }
    };
    let exact: ExactFn = Arc::new(move |t: f64| {
        let s = 1.5 * t.powf(alpha / 2.0) - t.powi(4);
        vec![s * s]
    });
    Ok(Benchmark {
        name: "example1",
        params: vec![("alpha", alpha)],
        ivp,
        t_end: 1.0,
        truth: Truth::Exact(exact),
        measure: ErrorMeasure::RelativeFirst,
    })
}

/// Location of the maximum of the example1 solution.
pub fn example1_peak(alpha: f64) -> f64 {
    (3.0 * alpha / 16.0).powf(1.0 / (4.0 - alpha / 2.0))
}

const BRUSS_A: f64 = 1.0;
const BRUSS_B: f64 = 3.0;

struct Brusselator;

impl IntegroDifferential for Brusselator {
    fn rhs(&self, _t: f64, y: &[f64], integrals: &[f64], out: &mut [f64]) {
        out[0] = 1.0 + integrals[0];
        out[1] = 2.8 + integrals[1] - y[1];
    }
    fn integrands(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        let q = y[0] * y[0] * y[1];
        out[0] = BRUSS_A - (BRUSS_B + 1.0) * y[0] + q;
        out[1] = BRUSS_B * y[0] - q;
    }
    fn jac_y(&self, _t: f64, _y: &[f64], _integrals: &[f64], jac: &mut HeadMatrix) {
        jac.set(1, 1, -1.0);
    }
    fn jac_integrals(&self, _t: f64, _y: &[f64], _integrals: &[f64], coupling: &mut Coupling) {
        coupling.set(0, 0, 1.0);
        coupling.set(1, 1, 1.0);
    }
    fn jac_integrands(&self, _t: f64, y: &[f64], rows: &mut [SparseRow]) {
        let p = 2.0 * y[0] * y[1];
        let s = y[0] * y[0];
        rows[0].set(0, -(BRUSS_B + 1.0) + p);
        rows[0].set(1, s);
        rows[1].set(0, BRUSS_B - p);
        rows[1].set(1, -s);
    }
}

/// Fractional Brusselator with orders 1.3 and 0.8.
///
/// `y1` (order 1.3) is integro-differential: `y1' = y1'(0) + J^0.3 f1`;
/// `y2` (order 0.8) is algebraic: `0 = y2(0) + J^0.8 f2 - y2`.
pub fn brusselator() -> Result<Benchmark> {
    let ivp = FractionalIvp::new(
        Arc::new(Brusselator),
        vec![1.0, 0.0],
        vec![0.3, 0.8],
        Structure::Dense,
        CouplingKind::Diagonal,
        vec![1.2, 2.8],
    )?;
    Ok(Benchmark {
        name: "brusselator",
        params: vec![("alpha1", 1.3), ("alpha2", 0.8), ("A", BRUSS_A), ("B", BRUSS_B)],
        ivp,
        t_end: 220.0,
        truth: Truth::Reference { t: 220.0, values: vec![1.0097684171, 2.1581264031] },
        measure: ErrorMeasure::RelativeComponents,
    })
}

struct MultiTerm;

impl IntegroDifferential for MultiTerm {
    fn rhs(&self, t: f64, y: &[f64], integrals: &[f64], out: &mut [f64]) {
        out[0] = y[1];
        out[1] = y[2];
        out[2] = y[3];
        out[3] = y[3] + integrals[0] + y[2] + 4.0 * y[1] + integrals[1] + 4.0 * y[0] - 6.0 * t.cos();
    }
    fn integrands(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[3];
        out[1] = y[1];
    }
    fn jac_y(&self, _t: f64, _y: &[f64], _integrals: &[f64], jac: &mut HeadMatrix) {
        jac.set(0, 1, 1.0);
        jac.set(1, 2, 1.0);
        jac.set(2, 3, 1.0);
        for (c, v) in [(0, 4.0), (1, 4.0), (2, 1.0), (3, 1.0)] {
            jac.set(3, c, v);
        }
    }
    fn jac_integrals(&self, _t: f64, _y: &[f64], _integrals: &[f64], coupling: &mut Coupling) {
        coupling.set(3, 0, 1.0);
        coupling.set(3, 1, 1.0);
    }
    fn jac_integrands(&self, _t: f64, _y: &[f64], rows: &mut [SparseRow]) {
        rows[0].set(3, 1.0);
        rows[1].set(1, 1.0);
    }
}

/// `y''' + D^(α+2) y + y'' + 4y' + D^α y + 4y = 6 cos t` as three
/// differential rows and one algebraic row in `(y, y', y'', y''')`.
pub fn multiterm(alpha: f64) -> Result<Benchmark> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("multiterm needs alpha in (0,1), got {alpha}")));
    }
    let (y0, y1, y2) = (1.0, 1.0, -1.0);
    let y3 = 6.0 - y2 - 4.0 * y1 - 4.0 * y0;
    let ivp = FractionalIvp::new(
        Arc::new(MultiTerm),
        vec![1.0, 1.0, 1.0, 0.0],
        vec![1.0 - alpha; 2],
        Structure::Dense,
        CouplingKind::Dense,
        vec![y0, y1, y2, y3],
    )?;
    let exact: ExactFn = Arc::new(|t: f64| {
        let (s, c) = (t + FRAC_PI_4).sin_cos();
        vec![SQRT_2 * s, SQRT_2 * c, -SQRT_2 * s, -SQRT_2 * c]
    });
    Ok(Benchmark {
        name: "multiterm",
        params: vec![("alpha", alpha)],
        ivp,
        t_end: 5000.0,
        truth: Truth::Exact(exact),
        measure: ErrorMeasure::AbsoluteFirst,
    })
}

/// Root of `z^(α+2) + z^α + z^3 + z^2 + 4z + 4` continued by Newton from
/// the seed `1.65686 i` (principal branch).
pub fn multiterm_root(alpha: f64) -> Complex64 {
    let mut z = Complex64::new(0.0, 1.65686);
    for _ in 0..100 {
        let l = z.powf(alpha + 2.0) + z.powf(alpha) + z * z * z + z * z + 4.0 * z + 4.0;
        let dl = (alpha + 2.0) * z.powf(alpha + 1.0) + alpha * z.powf(alpha - 1.0) + 3.0 * z * z + 2.0 * z + 4.0;
        let step = l / dl;
        z -= step;
        if step.norm() < 1e-15 * z.norm() {
            break;
        }
    }
    z
}

/// Order at which the root pair of [`multiterm_root`] crosses the imaginary
/// axis, by bisection on `[lo, hi]`.
pub fn multiterm_critical_alpha(mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let unstable = |a: f64| multiterm_root(a).re > 0.0;
    if unstable(lo) || !unstable(hi) {
        return Err(Error::InvalidArgument(format!("no stability crossing bracketed by [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if unstable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

struct Heat {
    d: usize,
    inv_dx2: f64,
    xs: Vec<f64>,
    alpha: f64,
    beta: f64,
    coef: f64,
}

impl CaputoRhs for Heat {
    fn dim(&self) -> usize {
        self.d
    }
    fn structure(&self) -> Structure {
        Structure::Banded { lower: 1, upper: 1 }
    }
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let tb = t.powf(self.beta);
        let ta = t.powf(self.beta - self.alpha);
        let d = self.d;
        for i in 0..d {
            let left = if i > 0 { y[i - 1] } else { 0.0 };
            let right = if i + 1 < d { y[i + 1] } else { 0.0 };
            let x = self.xs[i];
            out[i] = (left - 2.0 * y[i] + right) * self.inv_dx2 + 0.5 * x * (1.0 - x) * self.coef * ta + tb + 1.0;
        }
    }
    fn jacobian(&self, _t: f64, _y: &[f64], jac: &mut HeadMatrix) {
        for i in 0..self.d {
            jac.set(i, i, -2.0 * self.inv_dx2);
            if i > 0 {
                jac.set(i, i - 1, self.inv_dx2);
            }
            if i + 1 < self.d {
                jac.set(i, i + 1, self.inv_dx2);
            }
        }
    }
}

/// `D^α u = u_xx + f` on `(0,1)` with zero boundary values, discretized by
/// central differences on `d` interior points, with exact solution
/// `u = x(1-x)(t^β+1)/2`.
pub fn pde1d(alpha: f64, beta: f64, d: usize) -> Result<Benchmark> {
    if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
        return Err(Error::InvalidArgument(format!("pde1d needs a non-integer alpha in (0,2), got {alpha}")));
    }
    if !(beta >= alpha) {
        return Err(Error::InvalidArgument(format!("pde1d needs beta ≥ alpha, got beta={beta}")));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("pde1d needs at least two grid points".into()));
    }
    let dx = 1.0 / (d + 1) as f64;
    let xs: Vec<f64> = (1..=d).map(|i| i as f64 * dx).collect();
    let profile: Vec<f64> = xs.iter().map(|x| 0.5 * x * (1.0 - x)).collect();
    let rhs = Arc::new(Heat {
        d,
        inv_dx2: 1.0 / (dx * dx),
        xs,
        alpha,
        beta,
        coef: beta * gamma(beta) / gamma(beta + 1.0 - alpha),
    });
    let ivp = if alpha < 1.0 {
        from_caputo_volt1(alpha, rhs, profile.clone())?
    } else {
        // u_t(x, 0) vanishes for beta > 1 and equals the profile for beta = 1
        let slope = if beta == 1.0 { 1.0 } else { 0.0 };
        let v0 = profile.iter().map(|p| p * slope).collect();
        from_caputo_volt2(alpha, rhs, profile.clone(), vec![v0])?
    };
    let exact: ExactFn = Arc::new(move |t: f64| {
        let s = t.powf(beta) + 1.0;
        profile.iter().map(|p| p * s).collect()
    });
    Ok(Benchmark {
        name: "pde1d",
        params: vec![("alpha", alpha), ("beta", beta), ("grid_d", d as f64)],
        ivp,
        t_end: 1000.0,
        truth: Truth::Exact(exact),
        measure: ErrorMeasure::RelativeMax,
    })
}

const RD_K: f64 = 0.5;
const RD_K1: f64 = 1.0;
const RD_K2: f64 = 2.0;
const RD_K3: f64 = 3.0;

struct ReactionDiffusion {
    d: usize,
    inv_dx2: f64,
    ordering: Ordering,
}

impl ReactionDiffusion {
    fn index(&self, species: usize, i: usize) -> usize {
        match self.ordering {
            Ordering::BySpecies => species * self.d + i,
            Ordering::ByGridpoint => 3 * i + species,
        }
    }
}

impl CaputoRhs for ReactionDiffusion {
    fn dim(&self) -> usize {
        3 * self.d
    }
    fn structure(&self) -> Structure {
        match self.ordering {
            Ordering::BySpecies => Structure::Banded { lower: 1, upper: 1 },
            Ordering::ByGridpoint => Structure::Banded { lower: 3, upper: 3 },
        }
    }
    fn eval(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        let d = self.d;
        for i in 0..d {
            let u: [f64; 3] = std::array::from_fn(|s| y[self.index(s, i)]);
            let q = RD_K1 * u[0] * u[1];
            let reaction = [-q + (RD_K2 + RD_K3) * u[2], -q + RD_K2 * u[2], q - (RD_K2 + RD_K3) * u[2]];
            for s in 0..3 {
                let left = if i > 0 { y[self.index(s, i - 1)] } else { 0.0 };
                let right = if i + 1 < d { y[self.index(s, i + 1)] } else { 0.0 };
                out[self.index(s, i)] = RD_K * (left - 2.0 * u[s] + right) * self.inv_dx2 + reaction[s];
            }
        }
    }
    fn jacobian(&self, _t: f64, y: &[f64], jac: &mut HeadMatrix) {
        let d = self.d;
        let diff = RD_K * self.inv_dx2;
        for i in 0..d {
            let u: [f64; 3] = std::array::from_fn(|s| y[self.index(s, i)]);
            // ∂reaction_s/∂u_c
            let r = [
                [-RD_K1 * u[1], -RD_K1 * u[0], RD_K2 + RD_K3],
                [-RD_K1 * u[1], -RD_K1 * u[0], RD_K2],
                [RD_K1 * u[1], RD_K1 * u[0], -(RD_K2 + RD_K3)],
            ];
            for s in 0..3 {
                let row = self.index(s, i);
                if i > 0 {
                    jac.set(row, self.index(s, i - 1), diff);
                }
                if i + 1 < d {
                    jac.set(row, self.index(s, i + 1), diff);
                }
                match self.ordering {
                    Ordering::BySpecies => jac.set(row, row, -2.0 * diff + r[s][s]),
                    Ordering::ByGridpoint => {
                        for c in 0..3 {
                            let v = if c == s { -2.0 * diff + r[s][c] } else { r[s][c] };
                            jac.set(row, self.index(c, i), v);
                        }
                    }
                }
            }
        }
    }
}

/// Three-species reaction-diffusion system with memory on `d` interior
/// points, `K = 0.5`, `k1 = 1`, `k2 = 2`, `k3 = 3`.
pub fn reaction_diffusion(alpha: f64, d: usize, ordering: Ordering) -> Result<Benchmark> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("reaction_diffusion needs alpha in (0,1), got {alpha}")));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("reaction_diffusion needs at least two grid points".into()));
    }
    let dx = 1.0 / (d + 1) as f64;
    let rhs = ReactionDiffusion { d, inv_dx2: 1.0 / (dx * dx), ordering };
    let mut y0 = vec![0.0; 3 * d];
    for i in 0..d {
        let x = (i + 1) as f64 * dx;
        y0[rhs.index(0, i)] = 0.5 * x * (1.0 - x);
        y0[rhs.index(1, i)] = x * x * (1.0 - x);
        y0[rhs.index(2, i)] = 1.5 * x * (1.0 - x) * (1.0 - x);
    }
    let ivp = from_caputo_volt1(alpha, Arc::new(rhs), y0)?;
    Ok(Benchmark {
        name: "reaction_diffusion",
        params: vec![("alpha", alpha), ("grid_d", d as f64)],
        ivp,
        t_end: 30.0,
        truth: Truth::None,
        measure: ErrorMeasure::RelativeMax,
    })
}

/// Maps a by-gridpoint state to by-species order.
pub fn gridpoint_to_species(y: &[f64]) -> Vec<f64> {
    let d = y.len() / 3;
    (0..3).flat_map(|s| (0..d).map(move |i| y[3 * i + s])).collect()
}

struct Decay;

impl IntegroDifferential for Decay {
    fn rhs(&self, _t: f64, y: &[f64], _integrals: &[f64], out: &mut [f64]) {
        out[0] = -y[0];
    }
    fn integrands(&self, _t: f64, _y: &[f64], _out: &mut [f64]) {}
    fn jac_y(&self, _t: f64, _y: &[f64], _integrals: &[f64], jac: &mut HeadMatrix) {
        jac.set(0, 0, -1.0);
    }
    fn jac_integrals(&self, _t: f64, _y: &[f64], _integrals: &[f64], _coupling: &mut Coupling) {}
    fn jac_integrands(&self, _t: f64, _y: &[f64], _rows: &mut [SparseRow]) {}
}

/// `y' = -y`, `y(0) = 1`, with no integral terms.
pub fn decay() -> Result<Benchmark> {
    let ivp = FractionalIvp::new(Arc::new(Decay), vec![1.0], vec![], Structure::Dense, CouplingKind::Dense, vec![1.0])?;
    Ok(Benchmark {
        name: "decay",
        params: vec![],
        ivp,
        t_end: 1.0,
        truth: Truth::Exact(Arc::new(|t: f64| vec![(-t).exp()])),
        measure: ErrorMeasure::RelativeFirst,
    })
}
