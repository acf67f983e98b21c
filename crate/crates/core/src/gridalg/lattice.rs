//! Integer and rational linear algebra: echelon forms, integer kernels and
//! Hermite normal forms of small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactfield::rational::lcm_denominators;
use crate::exactfield::Rational;

/// Reduced row echelon form; returns only the nonzero rows.
pub fn rref(mut rows: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// Basis of the rational null space {x : rows·x = 0}.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let r = rref(rows.to_vec(), ncols);
    let pivots: Vec<usize> = r
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Scales a rational vector to a primitive integer vector (zero stays zero).
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let l = lcm_denominators(v.iter());
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// ℤ-basis of {x ∈ ℤⁿ : A x = 0}. The result is saturated in ℤⁿ.
pub fn integer_kernel(a: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    // Column transform U with columns stored as rows of `u`.
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    let mut p = 0;
    for i in 0..m.len() {
        if p == n {
            break;
        }
        loop {
            let best = (p..n)
                .filter(|&j| !m[i][j].is_zero())
                .min_by_key(|&j| m[i][j].abs());
            let Some(j0) = best else { break };
            swap_cols(&mut m, &mut u, p, j0);
            let mut done = true;
            for j in p + 1..n {
                if m[i][j].is_zero() {
                    continue;
                }
                let q = m[i][j].div_floor(&m[i][p]);
                col_axpy(&mut m, &mut u, j, p, &q);
                if !m[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !m[i][p].is_zero() {
            p += 1;
        }
    }
    u.drain(p..).collect()
}

fn swap_cols(m: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in m.iter_mut() {
        row.swap(a, b);
    }
    u.swap(a, b);
}

/// column j -= q · column p.
fn col_axpy(m: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], j: usize, p: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let t = &row[p] * q;
        row[j] -= t;
    }
    let up = u[p].clone();
    for (x, y) in u[j].iter_mut().zip(&up) {
        *x -= y * q;
    }
}

/// Row Hermite normal form of an integer matrix; zero rows are dropped.
/// Pivots are positive and entries above each pivot lie in [0, pivot).
pub fn hnf_rows(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut t = 0;
    for col in 0..ncols {
        if t == rows.len() {
            break;
        }
        loop {
            let best = (t..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by_key(|&i| rows[i][col].abs());
            let Some(i0) = best else { break };
            rows.swap(t, i0);
            let mut done = true;
            for i in t + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[t][col]);
                let pivot = rows[t].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= y * &q;
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if t < rows.len() && !rows[t][col].is_zero() {
            if rows[t][col].is_negative() {
                for x in rows[t].iter_mut() {
                    *x = -x.clone();
                }
            }
            let pivot = rows[t].clone();
            for i in 0..t {
                let q = rows[i][col].div_floor(&pivot[col]);
                if !q.is_zero() {
                    for (x, y) in rows[i].iter_mut().zip(&pivot) {
                        *x -= y * &q;
                    }
                }
            }
            t += 1;
        }
    }
    rows.truncate(t);
    rows
}

pub fn to_rational_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect()
}

pub fn dot_int_rat(a: &[BigInt], v: &[Rational]) -> Rational {
    a.iter()
        .zip(v)
        .fold(Rational::zero(), |acc, (x, y)| acc + y * Rational::from_integer(x.clone()))
}

/// Inverse of a square rational matrix, if invertible.
pub fn inverse_rational(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Rational::from_integer(BigInt::from((i == j) as i32))));
            r
        })
        .collect();
    let r = rref(aug, 2 * n);
    if r.len() < n || (0..n).any(|i| r[i][i] != Rational::one()) {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}
