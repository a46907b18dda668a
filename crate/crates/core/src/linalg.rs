//! Fraction-free Gaussian elimination (Bareiss) for small exact systems.

use num::bigint::BigInt;
use num::{Integer, One, Zero};
use thiserror::Error;

use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square or does not match the right-hand side")]
    Shape,
    #[error("matrix is singular")]
    Singular,
}

/// Clears denominators row by row (each row scaled by the lcm of its
/// denominators, the right-hand side included).
fn integer_rows(matrix: &[Vec<Rational>], rhs: Option<&[Rational]>) -> Vec<Vec<BigInt>> {
    matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut entries: Vec<&Rational> = row.iter().collect();
            if let Some(b) = rhs {
                entries.push(&b[i]);
            }
            let lcm = entries.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            entries.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect()
}

/// Bareiss elimination in place on an `n x m` integer matrix (`m >= n`).
/// Returns the sign of the row permutation, or `None` if singular.
fn eliminate(a: &mut [Vec<BigInt>]) -> Option<i32> {
    let n = a.len();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !a[i][k].is_zero())?;
        if pivot != k {
            a.swap(pivot, k);
            sign = -sign;
        }
        let cols = a[k].len();
        for i in k + 1..n {
            for j in k + 1..cols {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                // exact by Sylvester's identity
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Some(sign)
}

pub fn determinant(matrix: &[Vec<Rational>]) -> Result<Rational, LinalgError> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(LinalgError::Shape);
    }
    if n == 0 {
        return Ok(Rational::one());
    }
    let scales: Vec<BigInt> = matrix
        .iter()
        .map(|row| row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom())))
        .collect();
    let mut a = integer_rows(matrix, None);
    match eliminate(&mut a) {
        None => Ok(Rational::zero()),
        Some(sign) => {
            let det = &a[n - 1][n - 1] * BigInt::from(sign);
            let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
            Ok(Rational::new(det, scale).expect("positive scale"))
        }
    }
}

/// Solves `matrix * x = rhs` exactly.
pub fn solve(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    let n = matrix.len();
    if rhs.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(LinalgError::Shape);
    }
    let mut a = integer_rows(matrix, Some(rhs));
    eliminate(&mut a).ok_or(LinalgError::Singular)?;
    // back substitution on the upper-triangular integer system
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            acc = &acc - &(&Rational::from_integer(a[i][j].clone()) * &x[j]);
        }
        let pivot = Rational::from_integer(a[i][i].clone());
        x[i] = acc.checked_div(&pivot).map_err(|_| LinalgError::Singular)?;
    }
    Ok(x)
}
