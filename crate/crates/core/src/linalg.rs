//! Exact integer linear algebra on small dense matrices: fraction-free
//! (Bareiss) determinants and ranks, and `f64` determinants for the
//! floating-point cross-checks.

/// Determinant of a square matrix by Bareiss elimination. Panics on overflow.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    match n {
        1 => return m[0][0],
        2 => return m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => {}
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .expect("overflow in Bareiss elimination");
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Rank of a (possibly rectangular) integer matrix by fraction-free elimination.
pub fn rank_i128(m: &[Vec<i128>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let num = a[i][j]
                    .checked_mul(a[rank][c])
                    .and_then(|x| x.checked_sub(a[i][c].checked_mul(a[rank][j])?))
                    .expect("overflow in Bareiss elimination");
                a[i][j] = num / prev;
            }
            a[i][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    rank
}

/// Determinant by partial-pivot LU in `f64`.
pub fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// The `d` maximal minors of a `d x (d+1)` matrix given by columns:
/// entry `i` is the determinant with column `i` deleted.
pub fn maximal_minors(columns: &[Vec<i128>]) -> Vec<i128> {
    let n = columns.len();
    (0..n)
        .map(|skip| {
            let d = n - 1;
            let mat: Vec<Vec<i128>> = (0..d)
                .map(|row| {
                    (0..n)
                        .filter(|&c| c != skip)
                        .map(|c| columns[c][row])
                        .collect()
                })
                .collect();
            det_i128(&mat)
        })
        .collect()
}

pub fn maximal_minors_f64(columns: &[Vec<f64>]) -> Vec<f64> {
    let n = columns.len();
    (0..n)
        .map(|skip| {
            let d = n - 1;
            let mat: Vec<Vec<f64>> = (0..d)
                .map(|row| {
                    (0..n)
                        .filter(|&c| c != skip)
                        .map(|c| columns[c][row])
                        .collect()
                })
                .collect();
            det_f64(&mat)
        })
        .collect()
}
