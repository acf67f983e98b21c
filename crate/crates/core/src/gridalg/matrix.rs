//! Small dense matrices over ℚ(α).

use super::GridError;
use crate::exactfield::{AlgebraicNumber, Field, Rational};

pub type NfMatrix = Vec<Vec<AlgebraicNumber>>;

pub fn identity(field: &Field, d: usize) -> NfMatrix {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| AlgebraicNumber::from_int(field, (i == j) as i64))
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &NfMatrix, b: &NfMatrix) -> NfMatrix {
    let field = a[0][0].field().clone();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(AlgebraicNumber::zero(&field), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat(v: &[AlgebraicNumber], m: &NfMatrix) -> Vec<AlgebraicNumber> {
    let field = v[0].field().clone();
    (0..m[0].len())
        .map(|j| {
            v.iter()
                .zip(m.iter())
                .fold(AlgebraicNumber::zero(&field), |acc, (x, row)| acc + x * &row[j])
        })
        .collect()
}

pub fn vec_mat_rational(v: &[AlgebraicNumber], m: &[Vec<Rational>]) -> Vec<AlgebraicNumber> {
    let field = v[0].field().clone();
    (0..m[0].len())
        .map(|j| {
            v.iter()
                .zip(m.iter())
                .fold(AlgebraicNumber::zero(&field), |acc, (x, row)| acc + x.scale(&row[j]))
        })
        .collect()
}

/// Gauss–Jordan inverse; errors on a singular matrix.
pub fn mat_inv(m: &NfMatrix) -> Result<NfMatrix, GridError> {
    let n = m.len();
    let field = m[0][0].field().clone();
    let id = identity(&field, n);
    let mut a: Vec<Vec<AlgebraicNumber>> = m
        .iter()
        .zip(id)
        .map(|(row, e)| row.iter().cloned().chain(e).collect())
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&i| !a[i][col].is_zero())
            .ok_or(GridError::Singular)?;
        a.swap(col, p);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn det(m: &NfMatrix) -> Result<AlgebraicNumber, GridError> {
    let n = m.len();
    let field = m[0][0].field().clone();
    let mut a = m.clone();
    let mut acc = AlgebraicNumber::one(&field);
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Ok(AlgebraicNumber::zero(&field));
        };
        if p != col {
            a.swap(col, p);
            acc = -acc;
        }
        acc = &acc * &a[col][col];
        let inv = a[col][col].inv()?;
        let pivot = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] * &inv;
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = &*x - &(&f * y);
            }
        }
    }
    Ok(acc)
}

pub fn to_f64(m: &NfMatrix) -> Vec<Vec<f64>> {
    m.iter()
        .map(|row| row.iter().map(AlgebraicNumber::to_f64).collect())
        .collect()
}

pub fn to_strings(m: &NfMatrix) -> Vec<Vec<Vec<String>>> {
    m.iter()
        .map(|row| row.iter().map(AlgebraicNumber::to_strings).collect())
        .collect()
}

/// Columns of an r×d matrix as vectors.
pub fn columns(m: &NfMatrix) -> Vec<Vec<AlgebraicNumber>> {
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}
