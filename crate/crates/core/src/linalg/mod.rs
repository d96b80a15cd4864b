//! Dense and banded matrices with LU factorizations over real or complex scalars.

mod banded;
mod dense;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

pub use banded::{BandLu, BandMatrix};
pub use dense::{DenseLu, DenseMatrix};

/// Field the factorizations are generic over: `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    /// Magnitude used for pivot selection.
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        // |re| + |im| is the LINPACK pivot measure; cheaper than the norm.
        self.re.abs() + self.im.abs()
    }
}

/// Shape of the `d×d` head Jacobian `∂F/∂y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Dense,
    Banded { lower: usize, upper: usize },
}

/// Storage for `∂F/∂y` as handed to user callbacks.
#[derive(Debug, Clone, PartialEq)]
pub enum HeadMatrix {
    Dense(DenseMatrix<f64>),
    Banded(BandMatrix<f64>),
}

impl HeadMatrix {
    pub fn zeros(structure: Structure, n: usize) -> Self {
        match structure {
            Structure::Dense => HeadMatrix::Dense(DenseMatrix::zeros(n, n)),
            Structure::Banded { lower, upper } => HeadMatrix::Banded(BandMatrix::zeros(n, lower, upper)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            HeadMatrix::Dense(m) => m.rows(),
            HeadMatrix::Banded(m) => m.dim(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            HeadMatrix::Dense(m) => m[(i, j)],
            HeadMatrix::Banded(m) => m.get(i, j),
        }
    }

    /// Panics if `(i, j)` lies outside a banded pattern.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        match self {
            HeadMatrix::Dense(m) => m[(i, j)] = v,
            HeadMatrix::Banded(m) => m.set(i, j, v),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let old = self.get(i, j);
        self.set(i, j, old + v);
    }

    pub fn to_dense(&self) -> DenseMatrix<f64> {
        match self {
            HeadMatrix::Dense(m) => m.clone(),
            HeadMatrix::Banded(m) => m.to_dense(),
        }
    }
}

/// A row vector that is zero outside `start..start+values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub start: usize,
    pub values: Vec<f64>,
}

impl SparseRow {
    pub fn zeros(start: usize, len: usize) -> Self {
        SparseRow { start, values: vec![0.0; len] }
    }

    /// Segment covering row `row` of a `dim×dim` matrix with the given structure.
    pub fn for_row(structure: Structure, dim: usize, row: usize) -> Self {
        match structure {
            Structure::Dense => SparseRow::zeros(0, dim),
            Structure::Banded { lower, upper } => {
                let lo = row.saturating_sub(lower);
                let hi = (row + upper + 1).min(dim);
                SparseRow::zeros(lo, hi - lo)
            }
        }
    }

    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }

    pub fn get(&self, col: usize) -> f64 {
        if col >= self.start && col < self.end() {
            self.values[col - self.start]
        } else {
            0.0
        }
    }

    /// Panics if `col` is outside the stored segment.
    pub fn set(&mut self, col: usize, v: f64) {
        assert!(
            col >= self.start && col < self.end(),
            "column {col} outside row segment {}..{}",
            self.start,
            self.end()
        );
        self.values[col - self.start] = v;
    }

    pub fn fill(&mut self, v: f64) {
        self.values.iter_mut().for_each(|x| *x = v);
    }

    pub fn dot<T: Scalar>(&self, x: &[T]) -> T {
        let mut s = T::zero();
        for (v, xi) in self.values.iter().zip(&x[self.start..self.end()]) {
            s += *xi * *v;
        }
        s
    }
}

/// `∂F/∂I` with one column per integral term.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// Full `d×d_I` matrix.
    Dense(DenseMatrix<f64>),
    /// Square diagonal; term `j` feeds only row `j`.
    Diagonal(Vec<f64>),
}

/// Which [`Coupling`] variant a problem fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    Dense,
    Diagonal,
}

impl Coupling {
    pub fn zeros(kind: CouplingKind, dim: usize, n_integrals: usize) -> Self {
        match kind {
            CouplingKind::Dense => Coupling::Dense(DenseMatrix::zeros(dim, n_integrals)),
            CouplingKind::Diagonal => Coupling::Diagonal(vec![0.0; n_integrals]),
        }
    }

    pub fn get(&self, row: usize, j: usize) -> f64 {
        match self {
            Coupling::Dense(m) => m[(row, j)],
            Coupling::Diagonal(v) => {
                if row == j {
                    v[j]
                } else {
                    0.0
                }
            }
        }
    }

    /// Panics on an off-diagonal entry of a diagonal coupling.
    pub fn set(&mut self, row: usize, j: usize, value: f64) {
        match self {
            Coupling::Dense(m) => m[(row, j)] = value,
            Coupling::Diagonal(v) => {
                assert_eq!(row, j, "diagonal coupling has no entry ({row}, {j})");
                v[j] = value;
            }
        }
    }

    /// Nonzero pattern of column `j` as `(row, value)` pairs.
    pub fn column(&self, j: usize) -> Vec<(usize, f64)> {
        match self {
            Coupling::Dense(m) => (0..m.rows()).map(|i| (i, m[(i, j)])).filter(|&(_, v)| v != 0.0).collect(),
            Coupling::Diagonal(v) => vec![(j, v[j])],
        }
    }
}
