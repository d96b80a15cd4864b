use super::{DenseMatrix, Scalar};
use crate::error::{Error, Result};

/// Square band matrix with `lower` sub- and `upper` superdiagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix<T> {
    n: usize,
    lower: usize,
    upper: usize,
    /// Row `i` holds columns `i-lower ..= i+upper`.
    data: Vec<T>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        BandMatrix { n, lower, upper, data: vec![T::zero(); n * (lower + upper + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn lower(&self) -> usize {
        self.lower
    }
    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.lower >= i && j <= i + self.upper
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.lower + self.upper + 1) + j + self.lower - i
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::zero()
        }
    }

    /// Panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band ({}, {})", self.lower, self.upper);
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band ({}, {})", self.lower, self.upper);
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Columns `lo..=hi` that row `i` can hold.
    pub fn row_span(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.lower), (i + self.upper).min(self.n - 1))
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (lo, hi) = self.row_span(i);
            for j in lo..=hi {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> BandMatrix<U> {
        BandMatrix {
            n: self.n,
            lower: self.lower,
            upper: self.upper,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let (lo, hi) = self.row_span(i);
                let mut s = T::zero();
                for j in lo..=hi {
                    s += self.get(i, j) * x[j];
                }
                s
            })
            .collect()
    }
}

/// Banded LU with partial pivoting. Row interchanges widen the upper band
/// to `lower + upper`.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    lower: usize,
    /// Upper bandwidth of `U`, i.e. `lower + upper`.
    width_u: usize,
    /// Row `i` holds columns `i-lower ..= i+width_u`.
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> BandLu<T> {
    fn stride(&self) -> usize {
        self.lower + self.width_u + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.stride() + j + self.lower - i
    }

    pub fn factor(a: &BandMatrix<T>) -> Result<Self> {
        let n = a.n;
        let lower = a.lower;
        let width_u = a.lower + a.upper;
        let mut lu = BandLu { n, lower, width_u, data: vec![T::zero(); n * (lower + width_u + 1)], pivots: vec![0; n] };
        for i in 0..n {
            let (lo, hi) = a.row_span(i);
            for j in lo..=hi {
                let k = lu.idx(i, j);
                lu.data[k] = a.get(i, j);
            }
        }
        for k in 0..n {
            let last = (k + lower).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.idx(k, k)].modulus();
            for i in k + 1..=last {
                let v = lu.data[lu.idx(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular { pivot: k });
            }
            lu.pivots[k] = p;
            let col_end = (k + width_u).min(n - 1);
            if p != k {
                for j in k..=col_end {
                    let (x, y) = (lu.idx(k, j), lu.idx(p, j));
                    lu.data.swap(x, y);
                }
            }
            let piv = lu.data[lu.idx(k, k)];
            for i in k + 1..=last {
                let ik = lu.idx(i, k);
                let l = lu.data[ik] / piv;
                lu.data[ik] = l;
                if l != T::zero() {
                    for j in k + 1..=col_end {
                        let u = lu.data[lu.idx(k, j)];
                        let ij = lu.idx(i, j);
                        lu.data[ij] -= l * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length");
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != T::zero() {
                for i in k + 1..=(k + self.lower).min(n - 1) {
                    b[i] -= self.data[self.idx(i, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + self.width_u).min(n - 1) {
                s -= self.data[self.idx(i, j)] * b[j];
            }
            b[i] = s / self.data[self.idx(i, i)];
        }
    }
}
