#![allow(dead_code)]

use std::sync::Arc;

use fracstiff::linalg::{Coupling, CouplingKind, DenseMatrix, HeadMatrix, SparseRow, Structure};
use fracstiff::radau::ImplicitSystem;
use fracstiff::{BlockSpec, FractionalIvp, StructuredJacobian, SumOfExponentials};
use rand::rngs::StdRng;
use rand::Rng;
use statrs::function::gamma::gamma;

/// Largest deviation of an analytic derivative from a central difference,
/// relative to `max(1, |fd|)`.
#[derive(Debug, Default, Clone, Copy)]
pub struct FdReport {
    pub jac_y: f64,
    pub jac_integrals: f64,
    pub jac_integrands: f64,
}

impl FdReport {
    pub fn max(&self) -> f64 {
        self.jac_y.max(self.jac_integrals).max(self.jac_integrands)
    }
}

/// Deviation beyond the rounding noise of the difference quotient.
pub fn rel(a: f64, fd: f64, plus: f64, minus: f64, h: f64) -> f64 {
    let noise = 10.0 * f64::EPSILON * plus.abs().max(minus.abs()) / h;
    ((a - fd).abs() - noise).max(0.0) / fd.abs().max(1.0)
}

fn step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Central differences of `F` in `y` and `I`, and of `G` in `y`.
pub fn fd_check(p: &FractionalIvp, t: f64, y: &[f64], integrals: &[f64]) -> FdReport {
    let (d, ni) = (p.dim(), p.n_integrals());
    let model = p.model();
    let mut head = p.new_head();
    model.jac_y(t, y, integrals, &mut head);
    let mut coupling = p.new_coupling();
    model.jac_integrals(t, y, integrals, &mut coupling);
    let mut rows = p.new_gradient_rows();
    model.jac_integrands(t, y, &mut rows);

    let mut report = FdReport::default();
    let (mut fp, mut fm) = (vec![0.0; d], vec![0.0; d]);
    let (mut gp, mut gm) = (vec![0.0; ni], vec![0.0; ni]);
    for c in 0..d {
        let h = step(y[c]);
        let (mut yp, mut ym) = (y.to_vec(), y.to_vec());
        yp[c] += h;
        ym[c] -= h;
        model.rhs(t, &yp, integrals, &mut fp);
        model.rhs(t, &ym, integrals, &mut fm);
        for r in 0..d {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            report.jac_y = report.jac_y.max(rel(head.get(r, c), fd, fp[r], fm[r], h));
        }
        model.integrands(t, &yp, &mut gp);
        model.integrands(t, &ym, &mut gm);
        for j in 0..ni {
            let fd = (gp[j] - gm[j]) / (2.0 * h);
            report.jac_integrands = report.jac_integrands.max(rel(rows[j].get(c), fd, gp[j], gm[j], h));
        }
    }
    for j in 0..ni {
        let h = step(integrals[j]);
        let (mut ip, mut im) = (integrals.to_vec(), integrals.to_vec());
        ip[j] += h;
        im[j] -= h;
        model.rhs(t, y, &ip, &mut fp);
        model.rhs(t, y, &im, &mut fm);
        for r in 0..d {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            report.jac_integrals = report.jac_integrals.max(rel(coupling.get(r, j), fd, fp[r], fm[r], h));
        }
    }
    report
}

/// `(J^α g)(t)` by the product rectangle rule with `g` sampled at the right
/// end of each of `n` cells.
pub fn rl_integral(alpha: f64, g: impl Fn(f64) -> f64, t: f64, n: usize) -> f64 {
    let dt = t / n as f64;
    let scale = 1.0 / gamma(alpha + 1.0);
    (1..=n)
        .map(|k| {
            let (a, b) = (t - (k - 1) as f64 * dt, t - k as f64 * dt);
            scale * (a.powf(alpha) - b.max(0.0).powf(alpha)) * g(k as f64 * dt)
        })
        .sum()
}

/// Midpoint-sampled variant of [`rl_integral`], second order for smooth `g`.
pub fn rl_integral_mid(alpha: f64, g: impl Fn(f64) -> f64, t: f64, n: usize) -> f64 {
    let dt = t / n as f64;
    let scale = 1.0 / gamma(alpha + 1.0);
    (1..=n)
        .map(|k| {
            let (a, b) = (t - (k - 1) as f64 * dt, t - k as f64 * dt);
            scale * (a.powf(alpha) - b.max(0.0).powf(alpha)) * g((k as f64 - 0.5) * dt)
        })
        .sum()
}

/// Exponential sum with the given terms, through the table format.
pub fn soe_from_terms(alpha0: f64, weights: &[f64], exponents: &[f64]) -> Arc<SumOfExponentials> {
    let mut table = format!("# {alpha0:e} 1e-3 10 1e-6 0.5 0 {}\n", weights.len());
    for (k, (c, g)) in weights.iter().zip(exponents).enumerate() {
        table.push_str(&format!("{k} {c:e} {g:e}\n"));
    }
    Arc::new(SumOfExponentials::read_table(table.as_bytes()).unwrap())
}

pub fn random_block(rng: &mut StdRng, offset: usize) -> BlockSpec {
    let m = rng.gen_range(1..=3usize);
    let alpha0 = rng.gen_range(0.1..0.9);
    let n = rng.gen_range(1..=6usize);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
    let mut exponents: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0f64..3.0).exp()).collect();
    exponents.sort_by(f64::total_cmp);
    let order = alpha0 + (m - 1) as f64;
    BlockSpec::new(order, soe_from_terms(alpha0, &weights, &exponents), offset).unwrap()
}

pub fn random_instance(rng: &mut StdRng) -> (StructuredJacobian, Vec<f64>) {
    let d = rng.gen_range(1..=5usize);
    let ni = rng.gen_range(0..=3usize);
    let mut head = HeadMatrix::zeros(Structure::Dense, d);
    for i in 0..d {
        for j in 0..d {
            head.set(i, j, rng.gen_range(-1.0..1.0));
        }
        // keep the head comfortably nonsingular
        head.add(i, i, -3.0);
    }
    let mut coupling = Coupling::zeros(CouplingKind::Dense, d, ni);
    let mut gradients = Vec::new();
    let mut blocks = Vec::new();
    let mut offset = d;
    for j in 0..ni {
        let mut g = SparseRow::zeros(0, d);
        for i in 0..d {
            coupling.set(i, j, rng.gen_range(-1.0..1.0));
            g.set(i, rng.gen_range(-1.0..1.0));
        }
        gradients.push(g);
        let b = random_block(rng, offset);
        offset += b.len();
        blocks.push(b);
    }
    let mut mass: Vec<f64> = (0..d).map(|_| if rng.gen_bool(0.3) { 0.0 } else { 1.0 }).collect();
    mass.resize(offset, 1.0);
    (StructuredJacobian { head, coupling, gradients, blocks: blocks.into() }, mass)
}

pub type Rhs = Box<dyn Fn(f64, &[f64], &mut [f64])>;
pub type Jac = Box<dyn Fn(f64, &[f64]) -> DenseMatrix<f64>>;

/// Small dense test system.
pub struct Ode {
    pub mass: Vec<f64>,
    pub y0: Vec<f64>,
    pub f: Rhs,
    pub j: Jac,
}

impl ImplicitSystem for Ode {
    type Jacobian = DenseMatrix<f64>;
    fn dim(&self) -> usize {
        self.y0.len()
    }
    fn mass(&self) -> &[f64] {
        &self.mass
    }
    fn initial_state(&self) -> Vec<f64> {
        self.y0.clone()
    }
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.f)(t, y, out)
    }
    fn jacobian(&self, t: f64, y: &[f64]) -> DenseMatrix<f64> {
        (self.j)(t, y)
    }
}

pub fn scalar(lambda: f64, forcing: fn(f64) -> f64, y0: f64) -> Ode {
    Ode {
        mass: vec![1.0],
        y0: vec![y0],
        f: Box::new(move |t, y, out| out[0] = lambda * y[0] + forcing(t)),
        j: Box::new(move |_, _| {
            let mut m = DenseMatrix::zeros(1, 1);
            m[(0, 0)] = lambda;
            m
        }),
    }
}
