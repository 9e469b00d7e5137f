//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Solves `a · x = b` for a square nonsingular `a`.
///
/// Panics if `a` is singular; callers only pass systems built from states
/// that leave their component with positive probability.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("linear system is singular");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for k in col..n {
            a[col][k] *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for k in col..n {
                let delta = &f * &a[col][k];
                a[r][k] -= delta;
            }
            let delta = &f * &b[col];
            b[r] -= delta;
        }
    }
    b
}
