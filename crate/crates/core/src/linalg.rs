//! Minimal dense 4×4 / 4-vector arithmetic.
//!
//! Hand-rolled rather than borrowed from a linear-algebra crate so that the
//! arithmetic performed per product is fixed (16 multiplications and 12
//! additions for a matrix-vector product) and works for any [`Field`].

use std::ops::{Index, IndexMut};

use crate::scalar::{Field, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat4<T> {
    m: [[T; 4]; 4],
}

impl<T> Mat4<T> {
    pub const fn from_rows(m: [[T; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn rows(&self) -> &[[T; 4]; 4] {
        &self.m
    }

    pub fn into_rows(self) -> [[T; 4]; 4] {
        self.m
    }
}

impl<T: Field> Mat4<T> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn zeros() -> Self {
        Self::from_fn(|_, _| T::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i].clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(|i, j| -self.m[i][j].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_fn(|i, j| self.m[i][j].clone() * s.clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j].clone() + rhs.m[i][j].clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j].clone() - rhs.m[i][j].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::from_fn(|i, j| {
            let mut acc = self.m[i][0].clone() * rhs.m[0][j].clone();
            for k in 1..4 {
                acc = acc + self.m[i][k].clone() * rhs.m[k][j].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T; 4]) -> [T; 4] {
        std::array::from_fn(|i| {
            let row = &self.m[i];
            let mut acc = row[0].clone() * v[0].clone();
            for k in 1..4 {
                acc = acc + row[k].clone() * v[k].clone();
            }
            acc
        })
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> T {
        let mut acc = T::zero();
        for row in &self.m {
            for x in row {
                acc = acc + x.clone() * x.clone();
            }
        }
        acc
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn determinant(&self) -> T {
        let m = &self.m;
        let minor = |skip: usize| -> T {
            let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
            let a = |r: usize, c: usize| m[r][cols[c]].clone();
            a(1, 0) * (a(2, 1) * a(3, 2) - a(2, 2) * a(3, 1))
                - a(1, 1) * (a(2, 0) * a(3, 2) - a(2, 2) * a(3, 0))
                + a(1, 2) * (a(2, 0) * a(3, 1) - a(2, 1) * a(3, 0))
        };
        let mut det = T::zero();
        for (c, x) in m[0].iter().enumerate() {
            let term = x.clone() * minor(c);
            det = if c % 2 == 0 { det + term } else { det - term };
        }
        det
    }
}

impl<T: Real> Mat4<T> {
    pub fn frobenius(&self) -> T {
        self.frobenius_sq().sqrt()
    }

    /// ‖self − other‖_F
    pub fn distance(&self, other: &Self) -> T {
        self.sub(other).frobenius()
    }
}

impl<T> Index<(usize, usize)> for Mat4<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.m[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.m[i][j]
    }
}
