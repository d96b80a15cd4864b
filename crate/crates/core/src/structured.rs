//! Solves `(s𝓜 - 𝓙) u = a` for the arrow-shaped Jacobian of an augmented
//! system by eliminating the exponential blocks.
//!
//! Block `j` has `(sI - J_j)` lower bidiagonal with diagonal `s + γ_i` and
//! subdiagonal `-(k-1)`, so its inverse is applied by a forward recurrence in
//! `O(m_j n_j)`. Eliminating the blocks leaves the head system
//! `(sM - Ĵ) u_0 = â_0` with `Ĵ = J + Σ_j ĉ_j (∂F/∂I_j)(∂G_j/∂y)`, where
//! `ĉ_j` is the block response read at the coupled states. For a banded
//! problem (diagonal `∂F/∂I`, banded `∂G/∂y`) `Ĵ` keeps the head bandwidths.
//! `Re(s) > 0` and `γ_i > 0` keep every `s + γ_i` away from zero.

use std::sync::Arc;

use num_complex::Complex64;

use crate::augment::{BlockSpec, StructuredJacobian};
use crate::error::{Error, Result};
use crate::linalg::{BandLu, BandMatrix, Coupling, DenseLu, DenseMatrix, HeadMatrix, Scalar, SparseRow};
use crate::radau::LinearSolver;

/// Default cap on the dimension of a materialized dense matrix.
pub const DENSE_CAP: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinalgMode {
    /// Reference: LU of the fully materialized matrix.
    FullDense,
    /// Block elimination with a dense head.
    DenseHead,
    /// Block elimination with a banded head; needs a banded problem.
    BandedHead,
}

impl LinalgMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LinalgMode::FullDense => "dense",
            LinalgMode::DenseHead => "structured",
            LinalgMode::BandedHead => "banded",
        }
    }
}

#[derive(Debug, Clone)]
enum HeadLu<T> {
    Dense(DenseLu<T>),
    Banded(BandLu<T>),
}

/// Factorization of `(s𝓜 - 𝓙)` by block elimination.
#[derive(Debug, Clone)]
pub struct StructuredLu<T> {
    shift: T,
    head: HeadLu<T>,
    blocks: Arc<[BlockSpec]>,
    /// `1/(s + γ_i)` per block.
    recips: Vec<Vec<T>>,
    chat: Vec<T>,
    coupling: Coupling,
    gradients: Vec<SparseRow>,
}

/// Block response `ĉ = p Σ_i c_i w_(i,m)` with `(sI - J_j) w = e`.
fn block_response<T: Scalar>(b: &BlockSpec, recips: &[T]) -> T {
    let m = b.chain_len();
    let mut total = T::zero();
    for (&c, &r) in b.weights().iter().zip(recips) {
        let mut w = r;
        for k in 1..m {
            w = w * r * k as f64;
        }
        total += w * c;
    }
    total * b.prefactor()
}

/// Schur-reduced head `sM - Ĵ` before factorization.
#[derive(Debug, Clone, PartialEq)]
pub enum ReducedHead<T> {
    Dense(DenseMatrix<T>),
    Banded(BandMatrix<T>),
}

fn reciprocals<T: Scalar>(jac: &StructuredJacobian, s: T) -> Vec<Vec<T>> {
    jac.blocks
        .iter()
        .map(|b| b.exponents().iter().map(|&g| T::from_real(1.0) / (s + T::from_real(g))).collect())
        .collect()
}

/// Assembles `sM - Ĵ` with `Ĵ = ∂F/∂y + Σ_j ĉ_j (∂F/∂I_j)(∂G_j/∂y)`.
///
/// In [`LinalgMode::BandedHead`] the result keeps the head bandwidths.
pub fn reduced_head<T: Scalar>(jac: &StructuredJacobian, mass: &[f64], s: T, mode: LinalgMode) -> Result<ReducedHead<T>> {
    let chat: Vec<T> = jac.blocks.iter().zip(reciprocals(jac, s)).map(|(b, r)| block_response(b, &r)).collect();
    assemble(jac, mass, s, &chat, mode)
}

fn assemble<T: Scalar>(
    jac: &StructuredJacobian,
    mass: &[f64],
    s: T,
    chat: &[T],
    mode: LinalgMode,
) -> Result<ReducedHead<T>> {
    let d = jac.head_dim();
    if mass.len() < d {
        return Err(Error::Dimension { what: "mass", got: mass.len(), expected: d });
    }
    match mode {
        LinalgMode::FullDense => {
            Err(Error::IncompatibleMode { mode: "dense", reason: "use the full-dense reference solver" })
        }
        LinalgMode::DenseHead => {
            let mut a: DenseMatrix<T> = jac.head.to_dense().map(|v| -T::from_real(v));
            for i in 0..d {
                a[(i, i)] += s * mass[i];
            }
            for (j, g) in jac.gradients.iter().enumerate() {
                for (row, f) in jac.coupling.column(j) {
                    let scale = chat[j] * f;
                    let r = a.row_mut(row);
                    for (col, &v) in (g.start..).zip(&g.values) {
                        r[col] -= scale * v;
                    }
                }
            }
            Ok(ReducedHead::Dense(a))
        }
        LinalgMode::BandedHead => {
            let (HeadMatrix::Banded(h), Coupling::Diagonal(f)) = (&jac.head, &jac.coupling) else {
                return Err(Error::IncompatibleMode { mode: "banded", reason: "needs a banded head and a diagonal ∂F/∂I" });
            };
            let mut a: BandMatrix<T> = h.map(|v| -T::from_real(v));
            for i in 0..d {
                a.add(i, i, s * mass[i]);
            }
            for (j, g) in jac.gradients.iter().enumerate() {
                if g.values.is_empty() {
                    continue;
                }
                if !(a.in_band(j, g.start) && a.in_band(j, g.end() - 1)) {
                    return Err(Error::IncompatibleMode { mode: "banded", reason: "∂G_j/∂y leaves the head band" });
                }
                let scale = chat[j] * f[j];
                for (col, &v) in (g.start..).zip(&g.values) {
                    a.add(j, col, -(scale * v));
                }
            }
            Ok(ReducedHead::Banded(a))
        }
    }
}

impl<T: Scalar> StructuredLu<T> {
    pub fn factorize(jac: &StructuredJacobian, mass: &[f64], s: T, mode: LinalgMode) -> Result<Self> {
        let recips = reciprocals(jac, s);
        let chat: Vec<T> = jac.blocks.iter().zip(&recips).map(|(b, r)| block_response(b, r)).collect();
        let head = match assemble(jac, mass, s, &chat, mode)? {
            ReducedHead::Dense(a) => HeadLu::Dense(DenseLu::factor(a)?),
            ReducedHead::Banded(a) => HeadLu::Banded(BandLu::factor(&a)?),
        };
        Ok(StructuredLu {
            shift: s,
            head,
            blocks: jac.blocks.clone(),
            recips,
            chat,
            coupling: jac.coupling.clone(),
            gradients: jac.gradients.clone(),
        })
    }

    pub fn shift(&self) -> T {
        self.shift
    }

    /// `ĉ_j` per block.
    pub fn chat(&self) -> &[T] {
        &self.chat
    }

    pub fn head_dim(&self) -> usize {
        match &self.head {
            HeadLu::Dense(lu) => lu.dim(),
            HeadLu::Banded(lu) => lu.dim(),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.head_dim() + self.blocks.iter().map(BlockSpec::len).sum::<usize>()
    }

    pub fn solve_in_place(&self, a: &mut [T]) -> Result<()> {
        let d = self.head_dim();
        if a.len() != self.total_dim() {
            return Err(Error::Dimension { what: "right-hand side", got: a.len(), expected: self.total_dim() });
        }
        let (head, tail) = a.split_at_mut(d);
        for (j, b) in self.blocks.iter().enumerate() {
            let m = b.chain_len();
            let z = &mut tail[b.offset() - d..b.offset() - d + b.len()];
            let mut sum = T::zero();
            for ((zi, &r), &c) in z.chunks_exact_mut(m).zip(&self.recips[j]).zip(b.weights()) {
                zi[0] = zi[0] * r;
                for k in 1..m {
                    zi[k] = (zi[k] + zi[k - 1] * k as f64) * r;
                }
                sum += zi[m - 1] * c;
            }
            sum = sum * b.prefactor();
            match &self.coupling {
                Coupling::Diagonal(f) => head[j] += sum * f[j],
                Coupling::Dense(f) => {
                    for row in 0..d {
                        let v = f[(row, j)];
                        if v != 0.0 {
                            head[row] += sum * v;
                        }
                    }
                }
            }
        }
        match &self.head {
            HeadLu::Dense(lu) => lu.solve_in_place(head),
            HeadLu::Banded(lu) => lu.solve_in_place(head),
        }
        for (j, b) in self.blocks.iter().enumerate() {
            let beta = self.gradients[j].dot(head);
            if beta == T::zero() {
                continue;
            }
            let m = b.chain_len();
            let z = &mut tail[b.offset() - d..b.offset() - d + b.len()];
            for (zi, &r) in z.chunks_exact_mut(m).zip(&self.recips[j]) {
                let mut w = beta * r;
                zi[0] += w;
                for k in 1..m {
                    w = w * r * k as f64;
                    zi[k] += w;
                }
            }
        }
        Ok(())
    }
}

/// The explicit matrix `s𝓜 - 𝓙`.
pub fn materialize_dense<T: Scalar>(jac: &StructuredJacobian, mass: &[f64], s: T, cap: usize) -> Result<DenseMatrix<T>> {
    let n = jac.total_dim();
    if n > cap {
        return Err(Error::TooLarge { dim: n, cap });
    }
    if mass.len() != n {
        return Err(Error::Dimension { what: "mass", got: mass.len(), expected: n });
    }
    let d = jac.head_dim();
    let mut a = DenseMatrix::zeros(n, n);
    for (i, &m) in mass.iter().enumerate() {
        a[(i, i)] = s * m;
    }
    for i in 0..d {
        for j in 0..d {
            let v = jac.head.get(i, j);
            if v != 0.0 {
                a[(i, j)] -= T::from_real(v);
            }
        }
    }
    for (j, b) in jac.blocks.iter().enumerate() {
        let m = b.chain_len();
        let column = jac.coupling.column(j);
        let g = &jac.gradients[j];
        for (i, (&c, &gamma)) in b.weights().iter().zip(b.exponents()).enumerate() {
            let base = b.offset() + i * m;
            for &(row, f) in &column {
                a[(row, base + m - 1)] -= T::from_real(f * b.prefactor() * c);
            }
            for k in 0..m {
                let r = base + k;
                a[(r, r)] += T::from_real(gamma);
                if k == 0 {
                    for (col, &v) in (g.start..).zip(&g.values) {
                        a[(r, col)] -= T::from_real(v);
                    }
                } else {
                    a[(r, r - 1)] -= T::from_real(k as f64);
                }
            }
        }
    }
    Ok(a)
}

#[derive(Debug, Clone)]
enum Factor<T> {
    Structured(StructuredLu<T>),
    Dense(DenseLu<T>),
}

impl<T: Scalar> Factor<T> {
    fn new(jac: &StructuredJacobian, mass: &[f64], s: T, mode: LinalgMode, cap: usize) -> Result<Self> {
        match mode {
            LinalgMode::FullDense => Ok(Factor::Dense(DenseLu::factor(materialize_dense(jac, mass, s, cap)?)?)),
            _ => Ok(Factor::Structured(StructuredLu::factorize(jac, mass, s, mode)?)),
        }
    }

    fn solve(&self, a: &mut [T]) {
        match self {
            Factor::Structured(f) => f.solve_in_place(a).expect("solve dimension"),
            Factor::Dense(f) => f.solve_in_place(a),
        }
    }
}

/// [`LinearSolver`] for augmented systems in any [`LinalgMode`].
#[derive(Debug, Clone)]
pub struct StructuredSolver {
    mode: LinalgMode,
    cap: usize,
    real: Option<Factor<f64>>,
    complex: Option<Factor<Complex64>>,
    scratch: Vec<Complex64>,
}

impl StructuredSolver {
    pub fn new(mode: LinalgMode) -> Self {
        StructuredSolver { mode, cap: DENSE_CAP, real: None, complex: None, scratch: Vec::new() }
    }

    pub fn with_dense_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn mode(&self) -> LinalgMode {
        self.mode
    }
}

impl LinearSolver<StructuredJacobian> for StructuredSolver {
    fn factorize(&mut self, jac: &StructuredJacobian, mass: &[f64], real_shift: f64, complex_shift: Complex64) -> Result<()> {
        self.real = Some(Factor::new(jac, mass, real_shift, self.mode, self.cap)?);
        self.complex = Some(Factor::new(jac, mass, complex_shift, self.mode, self.cap)?);
        Ok(())
    }

    fn solve_real(&mut self, rhs: &mut [f64]) {
        self.real.as_ref().expect("factorize before solve").solve(rhs);
    }

    fn solve_complex(&mut self, re: &mut [f64], im: &mut [f64]) {
        self.scratch.clear();
        self.scratch.extend(re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)));
        self.complex.as_ref().expect("factorize before solve").solve(&mut self.scratch);
        for ((r, i), v) in re.iter_mut().zip(im.iter_mut()).zip(&self.scratch) {
            *r = v.re;
            *i = v.im;
        }
    }
}

/// [`LinearSolver`] for a plain dense Jacobian.
#[derive(Debug, Clone, Default)]
pub struct DenseSolver {
    real: Option<DenseLu<f64>>,
    complex: Option<DenseLu<Complex64>>,
    scratch: Vec<Complex64>,
}

impl DenseSolver {
    pub fn new() -> Self {
        Self::default()
    }
}

fn shifted<T: Scalar>(jac: &DenseMatrix<f64>, mass: &[f64], s: T) -> DenseMatrix<T> {
    let mut a = jac.map(|v| -T::from_real(v));
    for (i, &m) in mass.iter().enumerate() {
        a[(i, i)] += s * m;
    }
    a
}

impl LinearSolver<DenseMatrix<f64>> for DenseSolver {
    fn factorize(&mut self, jac: &DenseMatrix<f64>, mass: &[f64], real_shift: f64, complex_shift: Complex64) -> Result<()> {
        self.real = Some(DenseLu::factor(shifted(jac, mass, real_shift))?);
        self.complex = Some(DenseLu::factor(shifted(jac, mass, complex_shift))?);
        Ok(())
    }

    fn solve_real(&mut self, rhs: &mut [f64]) {
        self.real.as_ref().expect("factorize before solve").solve_in_place(rhs);
    }

    fn solve_complex(&mut self, re: &mut [f64], im: &mut [f64]) {
        self.scratch.clear();
        self.scratch.extend(re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)));
        self.complex.as_ref().expect("factorize before solve").solve_in_place(&mut self.scratch);
        for ((r, i), v) in re.iter_mut().zip(im.iter_mut()).zip(&self.scratch) {
            *r = v.re;
            *i = v.im;
        }
    }
}
