//! Sum-of-exponentials compression of the fractional kernel `t^(α-1)/Γ(α)`.
//!
//! The kernel is written as an integral over `e^(-x t)` on a logarithmic
//! variable and discretized by the trapezoidal rule. The parameters are chosen
//! so that the relative error stays below `3·eps` on `[δ, T]`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use statrs::function::erf::erf;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Largest admissible value of the contour parameter `a`.
const A_MAX: f64 = PI / 2.0 - 1e-8;
/// Smallest `ln γ_M` accepted; below this the exponent is subnormal.
const MIN_LN_EXPONENT: f64 = -700.0;

/// The fractional kernel `t^(α-1)/Γ(α)`.
pub fn kernel(alpha: f64, t: f64) -> f64 {
    t.powf(alpha - 1.0) / gamma(alpha)
}

/// Parameters of the trapezoidal discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    alpha: f64,
    delta_order: f64,
    eps: f64,
    t_end: f64,
    delta: f64,
    h: f64,
    m_lo: i64,
    n_hi: i64,
}

impl KernelParams {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// Order used for `δ`. Equals `alpha` except for split kernels, where `δ`
    /// belongs to the unsplit order.
    pub fn delta_order(&self) -> f64 {
        self.delta_order
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn t_end(&self) -> f64 {
        self.t_end
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn m_lo(&self) -> i64 {
        self.m_lo
    }
    pub fn n_hi(&self) -> i64 {
        self.n_hi
    }
    pub fn n_terms(&self) -> usize {
        (self.n_hi - self.m_lo) as usize
    }
}

/// Chooses `δ, h, M, N` for kernel order `alpha`, accuracy `eps` and horizon `t_end`.
pub fn choose_parameters(alpha: f64, eps: f64, t_end: f64) -> Result<KernelParams> {
    choose_parameters_split(alpha, alpha, eps, t_end)
}

/// Like [`choose_parameters`], but with `δ` computed from `delta_order`.
///
/// Used for the kernel split of orders above one: the exponentials
/// approximate `t^(α0-1)/Γ(α0)` while the lower validity bound comes from the
/// full order.
pub fn choose_parameters_split(
    alpha: f64,
    delta_order: f64,
    eps: f64,
    t_end: f64,
) -> Result<KernelParams> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::KernelOrder(alpha));
    }
    if !(delta_order > 0.0 && delta_order.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta order must be positive, got {delta_order}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Accuracy(eps));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive and finite, got {t_end}")));
    }
    let g1 = gamma(1.0 - alpha) * eps;
    if g1 >= 1.0 {
        return Err(Error::AccuracyTooLarge { alpha, eps, reason: "Γ(1-α)·eps ≥ 1, so x* ≤ 0" });
    }
    let x_hi = -g1.ln();

    let delta = (gamma(delta_order + 1.0) * eps).powf(1.0 / delta_order);
    if t_end <= delta {
        return Err(Error::HorizonTooShort { t_end, delta });
    }

    let a_raw = PI / 2.0 * (1.0 - (1.0 - alpha) / ((2.0 - alpha) * (1.0 / eps).ln()));
    if a_raw <= 0.0 {
        return Err(Error::AccuracyTooLarge { alpha, eps, reason: "the trapezoidal contour parameter is not positive" });
    }
    let a = a_raw.min(A_MAX);
    let h = 2.0 * PI * a / (1.0 + 2.0 / eps * a.cos().powf(alpha - 1.0)).ln();

    // ln of x_lo = (Γ(2-α)·eps)^(1/(1-α)), which underflows for α near 1
    let ln_x_lo = (gamma(2.0 - alpha) * eps).ln() / (1.0 - alpha);
    let lo = ((ln_x_lo - t_end.ln()) / h).floor();
    if lo * h < MIN_LN_EXPONENT {
        return Err(Error::InvalidArgument(format!(
            "alpha={alpha} is too close to 1 for eps={eps}: the smallest exponent e^({:.0}) underflows",
            lo * h
        )));
    }
    let m_lo = lo as i64;
    let n_hi = ((x_hi / delta).ln() / h).ceil() as i64;
    if n_hi <= m_lo {
        return Err(Error::AccuracyTooLarge { alpha, eps, reason: "empty exponential sum" });
    }
    Ok(KernelParams { alpha, delta_order, eps, t_end, delta, h, m_lo, n_hi })
}

/// Weights and exponents of `Σ c_i e^(-γ_i t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumOfExponentials {
    params: KernelParams,
    weights: Vec<f64>,
    exponents: Vec<f64>,
}

impl SumOfExponentials {
    /// Trapezoidal nodes `i = M..N-1`.
    pub fn build(params: KernelParams) -> Self {
        let KernelParams { alpha, h, m_lo, n_hi, .. } = params;
        let scale = h * (PI * alpha).sin() / PI;
        let (weights, exponents) = (m_lo..n_hi)
            .map(|i| {
                let x = i as f64 * h;
                (scale * ((1.0 - alpha) * x).exp(), x.exp())
            })
            .unzip();
        SumOfExponentials { params, weights, exponents }
    }

    pub fn new(alpha: f64, eps: f64, t_end: f64) -> Result<Self> {
        Ok(Self::build(choose_parameters(alpha, eps, t_end)?))
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }
    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }
    pub fn eps(&self) -> f64 {
        self.params.eps
    }
    pub fn valid_from(&self) -> f64 {
        self.params.delta
    }
    pub fn valid_to(&self) -> f64 {
        self.params.t_end
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ c_i e^(-γ_i t)`. The certificate only covers `[δ, T]`.
    pub fn eval(&self, t: f64) -> f64 {
        self.weights.iter().zip(&self.exponents).map(|(c, g)| c * (-g * t).exp()).sum()
    }

    /// Maximum relative error against the exact kernel over `n_samples`
    /// log-uniform points on `[δ, T]`, endpoints included.
    pub fn verify(&self, n_samples: usize) -> Result<f64> {
        if n_samples < 2 {
            return Err(Error::InvalidArgument("verify needs at least two samples".into()));
        }
        let alpha = self.params.alpha;
        let (lo, hi) = (self.valid_from().ln(), self.valid_to().ln());
        let worst = (0..n_samples)
            .map(|k| {
                let t = (lo + (hi - lo) * k as f64 / (n_samples - 1) as f64).exp();
                let exact = kernel(alpha, t);
                (exact - self.eval(t)).abs() / exact
            })
            .fold(0.0, f64::max);
        Ok(worst)
    }

    /// Writes the coefficient table: one header line with
    /// `alpha eps T delta h M N`, then `index c_i gamma_i` per term.
    pub fn write_table<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let p = &self.params;
        writeln!(
            out,
            "# {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {} {}",
            p.alpha, p.eps, p.t_end, p.delta, p.h, p.m_lo, p.n_hi
        )?;
        for (k, (c, g)) in self.weights.iter().zip(&self.exponents).enumerate() {
            writeln!(out, "{} {:.16e} {:.16e}", p.m_lo + k as i64, c, g)?;
        }
        Ok(())
    }

    /// Reads a table written by [`write_table`](Self::write_table).
    pub fn read_table<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let io = |line: usize, e: std::io::Error| Error::Parse { line, message: e.to_string() };
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty table".into() })?;
        let header = header.map_err(|e| io(1, e))?;
        let fields: Vec<&str> = header
            .strip_prefix('#')
            .ok_or(Error::Parse { line: 1, message: "missing '#' header".into() })?
            .split_whitespace()
            .collect();
        if fields.len() != 7 {
            return Err(Error::Parse { line: 1, message: format!("expected 7 header fields, got {}", fields.len()) });
        }
        let real = |s: &str, line: usize| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse { line, message: format!("bad number '{s}'") })
        };
        let int = |s: &str, line: usize| -> Result<i64> {
            s.parse().map_err(|_| Error::Parse { line, message: format!("bad integer '{s}'") })
        };
        let alpha = real(fields[0], 1)?;
        let params = KernelParams {
            alpha,
            delta_order: alpha,
            eps: real(fields[1], 1)?,
            t_end: real(fields[2], 1)?,
            delta: real(fields[3], 1)?,
            h: real(fields[4], 1)?,
            m_lo: int(fields[5], 1)?,
            n_hi: int(fields[6], 1)?,
        };
        let mut weights = Vec::new();
        let mut exponents = Vec::new();
        for (k, line) in lines {
            let n = k + 1;
            let line = line.map_err(|e| io(n, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse { line: n, message: "expected 'index c gamma'".into() });
            }
            let idx = int(parts[0], n)?;
            if idx != params.m_lo + weights.len() as i64 {
                return Err(Error::Parse { line: n, message: format!("unexpected index {idx}") });
            }
            weights.push(real(parts[1], n)?);
            exponents.push(real(parts[2], n)?);
        }
        if weights.len() != params.n_terms() {
            return Err(Error::Parse {
                line: weights.len() + 1,
                message: format!("expected {} terms, found {}", params.n_terms(), weights.len()),
            });
        }
        Ok(SumOfExponentials { params, weights, exponents })
    }
}

/// Solution of `u(t) = m + l·(J^{1/2} u)(t)`, the bound on the perturbation
/// growth caused by the kernel approximation, in closed form for order 1/2.
pub fn perturbation_bound_half(l: f64, m: f64, t: f64) -> Result<f64> {
    if !(l > 0.0) || !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("l and m must be positive, got l={l}, m={m}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be non-negative, got {t}")));
    }
    let sp = PI.sqrt();
    Ok(m / (2.0 * l) * (-sp + (2.0 * l + sp) * (l * l * t).exp() * (1.0 + erf(l * t.sqrt()))))
}
