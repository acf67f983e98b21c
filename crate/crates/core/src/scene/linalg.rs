//! Small dense float helpers for d ≤ 3.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        n => {
            let mut a: Vec<Vec<f64>> = m.to_vec();
            let mut d = 1.0;
            for col in 0..n {
                let piv = (col..n)
                    .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                    .unwrap_or(col);
                if a[piv][col] == 0.0 {
                    return 0.0;
                }
                if piv != col {
                    a.swap(piv, col);
                    d = -d;
                }
                d *= a[col][col];
                for i in col + 1..n {
                    let f = a[i][col] / a[col][col];
                    for k in col..n {
                        a[i][k] -= f * a[col][k];
                    }
                }
            }
            d
        }
    }
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(piv, col);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for k in 0..2 * n {
                        a[i][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Pairwise size reduction until no step shortens a row. Returns the reduced
/// rows and the integer change of basis U with reduced = U·rows.
pub fn reduce_basis(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let n = rows.len();
    let mut b = rows.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    for _ in 0..1000 {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mu = (dot(&b[i], &b[j]) / dot(&b[j], &b[j])).round();
                if mu != 0.0 {
                    let bj = b[j].clone();
                    let candidate: Vec<f64> = b[i].iter().zip(&bj).map(|(x, y)| x - mu * y).collect();
                    if dot(&candidate, &candidate) < dot(&b[i], &b[i]) * (1.0 - 1e-12) {
                        b[i] = candidate;
                        let uj = u[j].clone();
                        for (x, y) in u[i].iter_mut().zip(uj) {
                            *x -= mu as i64 * y;
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dot(&b[i], &b[i]).total_cmp(&dot(&b[j], &b[j])));
    let b2: Vec<Vec<f64>> = order.iter().map(|&i| b[i].clone()).collect();
    let u2: Vec<Vec<i64>> = order.iter().map(|&i| u[i].clone()).collect();
    (b2, u2)
}
