//! Dense Gaussian elimination over an abstract field.
//!
//! The same elimination code runs over [`Rational`] (exact) and `f64`
//! (Shapley iteration), so both solvers share one implementation.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::rational::{int, Rational};

pub trait Field:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_usize(n: usize) -> Self;
    fn abs(&self) -> Self;
    /// Zero test. Exact for rationals, tolerance-based for floats.
    fn is_negligible(&self) -> bool;
    /// `self >= other`, up to the field's tolerance.
    fn geq(&self, other: &Self) -> bool;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_usize(n: usize) -> Self {
        int(n as i64)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_negligible(&self) -> bool {
        Zero::is_zero(self)
    }
    fn geq(&self, other: &Self) -> bool {
        self >= other
    }
}

pub const F64_EPS: f64 = 1e-11;

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_usize(n: usize) -> Self {
        n as f64
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_negligible(&self) -> bool {
        f64::abs(*self) < F64_EPS
    }
    fn geq(&self, other: &Self) -> bool {
        *self >= *other - F64_EPS
    }
}

/// Solves `a · x = b` for square `a`. Returns `None` when `a` is singular.
pub fn solve<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Option<Vec<F>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        // largest pivot keeps the float path stable; harmless for rationals
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_negligible())
            .max_by(|&r, &s| {
                a[r][col]
                    .abs()
                    .partial_cmp(&a[s][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_negligible() {
                continue;
            }
            let factor = a[r][col].clone() / p.clone();
            for c in col..n {
                let delta = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[r] = b[r].clone() - delta;
        }
    }
    Some((0..n).map(|i| b[i].clone() / a[i][i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn exact_solve() {
        // x + y = 1, 3x + y = 2  => x = 1/2, y = 1/2
        let a = vec![vec![int(1), int(1)], vec![int(3), int(1)]];
        let x = solve(a, vec![int(1), int(2)]).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn singular_is_none() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve(a, vec![int(1), int(2)]).is_none());
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(a, vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn float_solve_needs_pivoting() {
        let a = vec![vec![0.0, 1.0], vec![1.0, 1.0]];
        let x = solve(a, vec![2.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
