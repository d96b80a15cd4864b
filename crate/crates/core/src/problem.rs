//! The general problem `M y' = F(t, y, I)` with Riemann-Liouville integrals
//! `I_j(t) = (1/Γ(α_j)) ∫_0^t (t-s)^(α_j-1) G_j(s, y(s)) ds`, and the standard
//! rewrites of a Caputo equation `D^α y = f(t, y)` into that shape.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Coupling, CouplingKind, HeadMatrix, SparseRow, Structure};

/// Callbacks of an integro-differential model.
///
/// Every integrand `G_j` is scalar; vector integrands are expressed as several
/// terms. Jacobian callbacks receive zeroed storage and only need to fill
/// nonzeros. Implementations must be pure functions of their arguments.
pub trait IntegroDifferential: Send + Sync {
    /// `F(t, y, I)`.
    fn rhs(&self, t: f64, y: &[f64], integrals: &[f64], out: &mut [f64]);
    /// All integrands `G_j(t, y)`.
    fn integrands(&self, t: f64, y: &[f64], out: &mut [f64]);
    /// `∂F/∂y`.
    fn jac_y(&self, t: f64, y: &[f64], integrals: &[f64], jac: &mut HeadMatrix);
    /// `∂F/∂I`.
    fn jac_integrals(&self, t: f64, y: &[f64], integrals: &[f64], coupling: &mut Coupling);
    /// `∂G_j/∂y`, one row per term.
    fn jac_integrands(&self, t: f64, y: &[f64], rows: &mut [SparseRow]);
}

/// Right-hand side `f(t, y)` of a Caputo equation `D^α y = f(t, y)`.
pub trait CaputoRhs: Send + Sync {
    fn dim(&self) -> usize;
    /// Pattern of `∂f/∂y`.
    fn structure(&self) -> Structure {
        Structure::Dense
    }
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]);
    /// `∂f/∂y` into zeroed storage of shape [`structure`](Self::structure).
    fn jacobian(&self, t: f64, y: &[f64], jac: &mut HeadMatrix);
}

type EvalFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;
type JacFn = dyn Fn(f64, &[f64], &mut HeadMatrix) + Send + Sync;

/// [`CaputoRhs`] from a pair of closures.
pub struct FnRhs {
    dim: usize,
    structure: Structure,
    f: Box<EvalFn>,
    df: Box<JacFn>,
}

impl FnRhs {
    pub fn new(
        dim: usize,
        f: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
        df: impl Fn(f64, &[f64], &mut HeadMatrix) + Send + Sync + 'static,
    ) -> Self {
        FnRhs { dim, structure: Structure::Dense, f: Box::new(f), df: Box::new(df) }
    }

    pub fn with_structure(mut self, structure: Structure) -> Self {
        self.structure = structure;
        self
    }
}

impl CaputoRhs for FnRhs {
    fn dim(&self) -> usize {
        self.dim
    }
    fn structure(&self) -> Structure {
        self.structure
    }
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.f)(t, y, out)
    }
    fn jacobian(&self, t: f64, y: &[f64], jac: &mut HeadMatrix) {
        (self.df)(t, y, jac)
    }
}

/// A problem `M y' = F(t, y, I)` on `[0, T]` with diagonal `M`.
#[derive(Clone)]
pub struct FractionalIvp {
    model: Arc<dyn IntegroDifferential>,
    mass: Vec<f64>,
    orders: Vec<f64>,
    structure: Structure,
    coupling: CouplingKind,
    y0: Vec<f64>,
}

impl std::fmt::Debug for FractionalIvp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FractionalIvp")
            .field("dim", &self.dim())
            .field("mass", &self.mass)
            .field("orders", &self.orders)
            .field("structure", &self.structure)
            .field("coupling", &self.coupling)
            .finish_non_exhaustive()
    }
}

impl FractionalIvp {
    /// `orders[j]` is `α_j`. A banded structure requires a diagonal coupling,
    /// hence one integral per component.
    pub fn new(
        model: Arc<dyn IntegroDifferential>,
        mass: Vec<f64>,
        orders: Vec<f64>,
        structure: Structure,
        coupling: CouplingKind,
        y0: Vec<f64>,
    ) -> Result<Self> {
        let d = y0.len();
        if d == 0 {
            return Err(Error::InvalidArgument("problem dimension must be at least 1".into()));
        }
        if mass.len() != d {
            return Err(Error::Dimension { what: "mass", got: mass.len(), expected: d });
        }
        if let Some(&bad) = orders.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidArgument(format!("integral orders must be positive, got {bad}")));
        }
        if coupling == CouplingKind::Diagonal && orders.len() != d {
            return Err(Error::Dimension { what: "integral terms of a diagonal coupling", got: orders.len(), expected: d });
        }
        if matches!(structure, Structure::Banded { .. }) && coupling != CouplingKind::Diagonal {
            return Err(Error::IncompatibleMode { mode: "banded", reason: "banded structure needs a diagonal ∂F/∂I" });
        }
        Ok(FractionalIvp { model, mass, orders, structure, coupling, y0 })
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }
    pub fn n_integrals(&self) -> usize {
        self.orders.len()
    }
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }
    pub fn orders(&self) -> &[f64] {
        &self.orders
    }
    pub fn structure(&self) -> Structure {
        self.structure
    }
    pub fn coupling_kind(&self) -> CouplingKind {
        self.coupling
    }
    pub fn y0(&self) -> &[f64] {
        &self.y0
    }
    pub fn model(&self) -> &Arc<dyn IntegroDifferential> {
        &self.model
    }
    pub fn is_dae(&self) -> bool {
        self.mass.contains(&0.0)
    }

    pub fn new_head(&self) -> HeadMatrix {
        HeadMatrix::zeros(self.structure, self.dim())
    }

    pub fn new_coupling(&self) -> Coupling {
        Coupling::zeros(self.coupling, self.dim(), self.n_integrals())
    }

    /// Storage for `∂G_j/∂y`: full rows for dense problems, band segments of
    /// row `j` for banded ones.
    pub fn new_gradient_rows(&self) -> Vec<SparseRow> {
        (0..self.n_integrals()).map(|j| SparseRow::for_row(self.structure, self.dim(), j)).collect()
    }

    /// Residual of the algebraic rows at `t = 0` with all integrals zero.
    pub fn algebraic_residuals(&self) -> Vec<(usize, f64)> {
        let mut f = vec![0.0; self.dim()];
        self.model.rhs(0.0, &self.y0, &vec![0.0; self.n_integrals()], &mut f);
        (0..self.dim()).filter(|&i| self.mass[i] == 0.0).map(|i| (i, f[i])).collect()
    }

    /// Fails on the first algebraic row whose residual exceeds `tol(i)`.
    pub fn check_consistency(&self, tol: impl Fn(usize) -> f64) -> Result<()> {
        for (row, residual) in self.algebraic_residuals() {
            if !(residual.abs() <= tol(row)) {
                return Err(Error::Inconsistent { row, residual });
            }
        }
        Ok(())
    }
}

/// `D^α y = f(t, y)` with `0 < α < 1`, rewritten as the algebraic system
/// `0 = y0 + I - y` with `I_j = J^α f_j`.
pub fn from_caputo_volt1(alpha: f64, f: Arc<dyn CaputoRhs>, y0: Vec<f64>) -> Result<FractionalIvp> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "from_caputo_volt1 needs 0 < alpha < 1, got {alpha}; use from_caputo_volt2 or the split form"
        )));
    }
    volt1(alpha, f, y0, Vec::new())
}

/// `D^α y = f(t, y)` with `α > 1` non-integer as `0 = T(t) + I - y`, where
/// `T` is the Taylor polynomial of the initial data and `I` carries the full
/// order `α`; the augmentation splits the kernel.
///
/// `derivs0[k-1]` is `y^(k)(0)` for `k = 1..ceil(α)-1`.
pub fn from_caputo_volt1_split(
    alpha: f64,
    f: Arc<dyn CaputoRhs>,
    y0: Vec<f64>,
    derivs0: Vec<Vec<f64>>,
) -> Result<FractionalIvp> {
    let m = chain_order(alpha)?;
    check_derivs(&derivs0, m, y0.len())?;
    volt1(alpha, f, y0, derivs0)
}

fn chain_order(alpha: f64) -> Result<usize> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
    }
    if alpha.fract() == 0.0 {
        return Err(Error::IntegerOrder(alpha));
    }
    Ok(alpha.ceil() as usize)
}

fn check_derivs(derivs0: &[Vec<f64>], m: usize, d: usize) -> Result<()> {
    if derivs0.len() != m - 1 {
        return Err(Error::Dimension { what: "initial derivatives", got: derivs0.len(), expected: m - 1 });
    }
    if let Some(v) = derivs0.iter().find(|v| v.len() != d) {
        return Err(Error::Dimension { what: "initial derivative vector", got: v.len(), expected: d });
    }
    Ok(())
}

fn volt1(alpha: f64, f: Arc<dyn CaputoRhs>, y0: Vec<f64>, derivs0: Vec<Vec<f64>>) -> Result<FractionalIvp> {
    let d = y0.len();
    if f.dim() != d {
        return Err(Error::Dimension { what: "y0", got: d, expected: f.dim() });
    }
    let mut taylor = vec![y0.clone()];
    let mut factorial = 1.0;
    for (k, v) in derivs0.into_iter().enumerate() {
        factorial *= (k + 1) as f64;
        taylor.push(v.into_iter().map(|x| x / factorial).collect());
    }
    let structure = f.structure();
    let model = Volt1 { f, taylor, structure };
    FractionalIvp::new(Arc::new(model), vec![0.0; d], vec![alpha; d], structure, CouplingKind::Diagonal, y0)
}

struct Volt1 {
    f: Arc<dyn CaputoRhs>,
    /// Taylor coefficients `y^(k)(0)/k!`.
    taylor: Vec<Vec<f64>>,
    structure: Structure,
}

impl IntegroDifferential for Volt1 {
    fn rhs(&self, t: f64, y: &[f64], integrals: &[f64], out: &mut [f64]) {
        for i in 0..y.len() {
            let poly = self.taylor.iter().rev().fold(0.0, |acc, c| acc * t + c[i]);
            out[i] = poly + integrals[i] - y[i];
        }
    }
    fn integrands(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.f.eval(t, y, out)
    }
    fn jac_y(&self, _t: f64, y: &[f64], _integrals: &[f64], jac: &mut HeadMatrix) {
        for i in 0..y.len() {
            jac.set(i, i, -1.0);
        }
    }
    fn jac_integrals(&self, _t: f64, y: &[f64], _integrals: &[f64], coupling: &mut Coupling) {
        for i in 0..y.len() {
            coupling.set(i, i, 1.0);
        }
    }
    fn jac_integrands(&self, t: f64, y: &[f64], rows: &mut [SparseRow]) {
        let mut jac = HeadMatrix::zeros(self.structure, y.len());
        self.f.jacobian(t, y, &mut jac);
        copy_rows(&jac, rows);
    }
}

fn copy_rows(jac: &HeadMatrix, rows: &mut [SparseRow]) {
    for (i, row) in rows.iter_mut().enumerate() {
        for col in row.start..row.end().min(jac.dim()) {
            row.values[col - row.start] = jac.get(i, col);
        }
    }
}

/// `D^α y = f(t, y)` with `α > 1` non-integer, `m = ceil(α)`, as the
/// integro-differential system
/// `y' = u_1, u_k' = u_(k+1), u_(m-2)' = y^(m-1)(0) + J^(α-m+1) f`.
///
/// The state is `(y, u_1, …, u_(m-2))` with unit mass. `derivs0[k-1]` is
/// `y^(k)(0)` for `k = 1..m-1`.
pub fn from_caputo_volt2(
    alpha: f64,
    f: Arc<dyn CaputoRhs>,
    y0: Vec<f64>,
    derivs0: Vec<Vec<f64>>,
) -> Result<FractionalIvp> {
    let m = chain_order(alpha)?;
    let d = y0.len();
    check_derivs(&derivs0, m, d)?;
    if f.dim() != d {
        return Err(Error::Dimension { what: "y0", got: d, expected: f.dim() });
    }
    let mut state0 = y0;
    for v in &derivs0[..m - 2] {
        state0.extend_from_slice(v);
    }
    let n = state0.len();
    let (structure, coupling) = if m == 2 { (f.structure(), CouplingKind::Diagonal) } else { (Structure::Dense, CouplingKind::Dense) };
    let model = Volt2 { f, d, m, top: derivs0[m - 2].clone() };
    FractionalIvp::new(Arc::new(model), vec![1.0; n], vec![alpha - (m - 1) as f64; d], structure, coupling, state0)
}

struct Volt2 {
    f: Arc<dyn CaputoRhs>,
    d: usize,
    m: usize,
    /// `y^(m-1)(0)`.
    top: Vec<f64>,
}

impl IntegroDifferential for Volt2 {
    fn rhs(&self, _t: f64, y: &[f64], integrals: &[f64], out: &mut [f64]) {
        let d = self.d;
        let last = (self.m - 2) * d;
        out[..last].copy_from_slice(&y[d..last + d]);
        for i in 0..d {
            out[last + i] = self.top[i] + integrals[i];
        }
    }
    fn integrands(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.f.eval(t, &y[..self.d], out)
    }
    fn jac_y(&self, _t: f64, _y: &[f64], _integrals: &[f64], jac: &mut HeadMatrix) {
        for r in 0..(self.m - 2) * self.d {
            jac.set(r, r + self.d, 1.0);
        }
    }
    fn jac_integrals(&self, _t: f64, _y: &[f64], _integrals: &[f64], coupling: &mut Coupling) {
        let last = (self.m - 2) * self.d;
        for i in 0..self.d {
            coupling.set(last + i, i, 1.0);
        }
    }
    fn jac_integrands(&self, t: f64, y: &[f64], rows: &mut [SparseRow]) {
        let mut jac = HeadMatrix::zeros(self.f.structure(), self.d);
        self.f.jacobian(t, &y[..self.d], &mut jac);
        copy_rows(&jac, rows);
    }
}

/// Adds `I_j` as an extra algebraic unknown `y_(d+1)` with the row
/// `0 = I_j - y_(d+1)`; `F` then reads `y_(d+1)` in place of `I_j`.
pub fn attach_integral_output(p: &FractionalIvp, j: usize) -> Result<FractionalIvp> {
    if j >= p.n_integrals() {
        return Err(Error::InvalidArgument(format!("integral index {j} out of range 0..{}", p.n_integrals())));
    }
    let mut mass = p.mass.clone();
    mass.push(0.0);
    let mut y0 = p.y0.clone();
    y0.push(0.0);
    let model = Attached { inner: p.clone(), j };
    FractionalIvp::new(Arc::new(model), mass, p.orders.clone(), Structure::Dense, CouplingKind::Dense, y0)
}

struct Attached {
    inner: FractionalIvp,
    j: usize,
}

impl Attached {
    fn substituted(&self, y: &[f64], integrals: &[f64]) -> Vec<f64> {
        let mut ii = integrals.to_vec();
        ii[self.j] = y[self.inner.dim()];
        ii
    }
}

impl IntegroDifferential for Attached {
    fn rhs(&self, t: f64, y: &[f64], integrals: &[f64], out: &mut [f64]) {
        let d = self.inner.dim();
        let ii = self.substituted(y, integrals);
        self.inner.model.rhs(t, &y[..d], &ii, &mut out[..d]);
        out[d] = integrals[self.j] - y[d];
    }
    fn integrands(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.inner.model.integrands(t, &y[..self.inner.dim()], out)
    }
    fn jac_y(&self, t: f64, y: &[f64], integrals: &[f64], jac: &mut HeadMatrix) {
        let d = self.inner.dim();
        let ii = self.substituted(y, integrals);
        let mut head = self.inner.new_head();
        self.inner.model.jac_y(t, &y[..d], &ii, &mut head);
        let mut coupling = self.inner.new_coupling();
        self.inner.model.jac_integrals(t, &y[..d], &ii, &mut coupling);
        for r in 0..d {
            for c in 0..d {
                let v = head.get(r, c);
                if v != 0.0 {
                    jac.set(r, c, v);
                }
            }
            jac.set(r, d, coupling.get(r, self.j));
        }
        jac.set(d, d, -1.0);
    }
    fn jac_integrals(&self, t: f64, y: &[f64], integrals: &[f64], coupling: &mut Coupling) {
        let d = self.inner.dim();
        let ii = self.substituted(y, integrals);
        let mut inner = self.inner.new_coupling();
        self.inner.model.jac_integrals(t, &y[..d], &ii, &mut inner);
        for r in 0..d {
            for c in 0..self.inner.n_integrals() {
                if c != self.j {
                    coupling.set(r, c, inner.get(r, c));
                }
            }
        }
        coupling.set(d, self.j, 1.0);
    }
    fn jac_integrands(&self, t: f64, y: &[f64], rows: &mut [SparseRow]) {
        let d = self.inner.dim();
        let mut inner = self.inner.new_gradient_rows();
        self.inner.model.jac_integrands(t, &y[..d], &mut inner);
        for (row, src) in rows.iter_mut().zip(&inner) {
            for col in src.start..src.end() {
                row.set(col, src.get(col));
            }
        }
    }
}
