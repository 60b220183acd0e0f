//! Fixed-size dense matrices for the 7-state / 4-measurement filter.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<const R: usize, const C: usize>(pub [[f64; C]; R]);

pub type Vector<const N: usize> = [f64; N];

impl<const R: usize, const C: usize> Matrix<R, C> {
    pub const fn zeros() -> Self {
        Self([[0.0; C]; R])
    }

    pub fn transpose(&self) -> Matrix<C, R> {
        let mut out = Matrix::<C, R>::zeros();
        for i in 0..R {
            for j in 0..C {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Vector<C>) -> Vector<R> {
        let mut out = [0.0; R];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl<const N: usize> Matrix<N, N> {
    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(d: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, &v) in d.iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn diagonal(&self) -> [f64; N] {
        std::array::from_fn(|i| self.0[i][i])
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Largest absolute difference between mirrored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in (i + 1)..N {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        for i in 0..N {
            for j in (i + 1)..N {
                let m = 0.5 * (self.0[i][j] + self.0[j][i]);
                self.0[i][j] = m;
                self.0[j][i] = m;
            }
        }
    }

    /// Inverse of a symmetric positive-definite matrix via Cholesky.
    /// `None` when the matrix is not numerically positive definite.
    pub fn spd_inverse(&self) -> Option<Self> {
        let mut l = Self::zeros();
        for i in 0..N {
            for j in 0..=i {
                let mut sum = self.0[i][j];
                for k in 0..j {
                    sum -= l.0[i][k] * l.0[j][k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return None;
                    }
                    l.0[i][i] = sum.sqrt();
                } else {
                    l.0[i][j] = sum / l.0[j][j];
                }
            }
        }
        // L^-1, lower triangular
        let mut linv = Self::zeros();
        for i in 0..N {
            linv.0[i][i] = 1.0 / l.0[i][i];
            for j in 0..i {
                let mut sum = 0.0;
                for k in j..i {
                    sum -= l.0[i][k] * linv.0[k][j];
                }
                linv.0[i][j] = sum / l.0[i][i];
            }
        }
        // A^-1 = L^-T L^-1
        let mut inv = Self::zeros();
        for i in 0..N {
            for j in 0..=i {
                let mut sum = 0.0;
                for k in i..N {
                    sum += linv.0[k][i] * linv.0[k][j];
                }
                inv.0[i][j] = sum;
                inv.0[j][i] = sum;
            }
        }
        Some(inv)
    }
}

impl<const R: usize, const C: usize> Index<(usize, usize)> for Matrix<R, C> {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl<const R: usize, const C: usize> IndexMut<(usize, usize)> for Matrix<R, C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl<const R: usize, const K: usize, const C: usize> Mul<Matrix<K, C>> for Matrix<R, K> {
    type Output = Matrix<R, C>;

    fn mul(self, rhs: Matrix<K, C>) -> Matrix<R, C> {
        let mut out = Matrix::<R, C>::zeros();
        for i in 0..R {
            for k in 0..K {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..C {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const R: usize, const C: usize> Add for Matrix<R, C> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl<const R: usize, const C: usize> Sub for Matrix<R, C> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}
