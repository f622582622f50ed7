//! The regular simplex inscribed in the unit sphere of `R^d`, its edge length
//! `δ_d` and volume `V_d`.

use serde::Serialize;

use crate::linalg::{det_f64, maximal_minors_f64};

#[derive(Clone, Debug, Serialize)]
pub struct SimplexFamily {
    pub d: usize,
    pub vertices: Vec<Vec<f64>>,
    pub delta: f64,
    /// Largest deviation of a vertex norm from 1.
    pub norm_error: f64,
    /// Largest deviation of a pairwise distance from `delta`.
    pub distance_error: f64,
}

/// Vertices by the recursion `σ_i^(d) = (-1/d, sqrt(1 - 1/d²) σ_i^(d-1))`,
/// `σ_{d+1}^(d) = (1, 0, ..., 0)`, starting from `{-1, 1}` on the line.
pub fn simplex_vertices(d: usize) -> SimplexFamily {
    assert!(d >= 1, "dimension must be positive");
    let mut vs: Vec<Vec<f64>> = vec![vec![-1.0], vec![1.0]];
    for k in 2..=d {
        let kf = k as f64;
        let scale = (1.0 - 1.0 / (kf * kf)).sqrt();
        let mut next: Vec<Vec<f64>> = vs
            .iter()
            .map(|v| {
                let mut w = vec![-1.0 / kf];
                w.extend(v.iter().map(|x| scale * x));
                w
            })
            .collect();
        let mut apex = vec![0.0; k];
        apex[0] = 1.0;
        next.push(apex);
        vs = next;
    }
    let delta = delta_closed(d);
    let norm_error = vs
        .iter()
        .map(|v| (v.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut distance_error: f64 = 0.0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let dist = vs[i].iter().zip(&vs[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            distance_error = distance_error.max((dist - delta).abs());
        }
    }
    SimplexFamily {
        d,
        vertices: vs,
        delta,
        norm_error,
        distance_error,
    }
}

/// `δ_d = sqrt(2(d+1)/d)`.
pub fn delta_closed(d: usize) -> f64 {
    (2.0 * (d as f64 + 1.0) / d as f64).sqrt()
}

/// `δ_1 = 2`, `δ_d = sqrt(1 - 1/d²) δ_{d-1}`.
pub fn delta_recursive(d: usize) -> f64 {
    (2..=d).fold(2.0, |acc, k| {
        let kf = k as f64;
        acc * (1.0 - 1.0 / (kf * kf)).sqrt()
    })
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// `V_d = (1/d!) sqrt((d+1)^(d+1) / d^d)`.
pub fn vd_closed(d: usize) -> f64 {
    let df = d as f64;
    ((df + 1.0).powf(df + 1.0) / df.powf(df)).sqrt() / factorial(d)
}

/// `V_d` from the Cayley–Menger determinant of `d+1` points at mutual distance `δ_d`.
pub fn vd_cayley_menger(d: usize) -> f64 {
    let n = d + 2;
    let e = delta_closed(d).powi(2);
    let m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i, j) {
                    (0, 0) => 0.0,
                    (0, _) | (_, 0) => 1.0,
                    _ if i == j => 0.0,
                    _ => e,
                })
                .collect()
        })
        .collect();
    let sign = if (d + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let v2 = sign * det_f64(&m) / (2f64.powi(d as i32) * factorial(d).powi(2));
    v2.sqrt()
}

/// `V_d` as `|det(σ_i - σ_{d+1})| / d!` on the explicit vertices.
pub fn vd_edge_det(d: usize) -> f64 {
    let s = simplex_vertices(d);
    let apex = &s.vertices[d];
    let m: Vec<Vec<f64>> = (0..d)
        .map(|r| (0..d).map(|c| s.vertices[c][r] - apex[r]).collect())
        .collect();
    det_f64(&m).abs() / factorial(d)
}

/// Volume of `L` on real generators: `Σ |det A_i|`.
pub fn zonotope_volume_f64(generators: &[Vec<f64>]) -> f64 {
    maximal_minors_f64(generators).iter().map(|m| m.abs()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct VdReport {
    pub d: usize,
    pub closed_form: f64,
    pub cayley_menger: f64,
    pub edge_det: f64,
    /// `d! V_d` from the closed form.
    pub d_factorial_vd: f64,
    /// Volume of `L` on the simplex vertices.
    pub zonotope_volume: f64,
    pub max_discrepancy: f64,
}

/// Computes `V_d` three ways and `d! V_d` against the volume of `L(σ^(d))`.
pub fn cayley_menger_vd(d: usize) -> VdReport {
    let closed_form = vd_closed(d);
    let cayley_menger = vd_cayley_menger(d);
    let edge_det = vd_edge_det(d);
    let zonotope_volume = zonotope_volume_f64(&simplex_vertices(d).vertices);
    let d_factorial_vd = factorial(d) * closed_form;
    let max_discrepancy = [
        (closed_form - cayley_menger).abs(),
        (closed_form - edge_det).abs(),
        (d_factorial_vd - zonotope_volume).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    VdReport {
        d,
        closed_form,
        cayley_menger,
        edge_det,
        d_factorial_vd,
        zonotope_volume,
        max_discrepancy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_vertices() {
        let s = simplex_vertices(2);
        let h = 3f64.sqrt() / 2.0;
        let expect = [[-0.5, -h], [-0.5, h], [1.0, 0.0]];
        for (v, e) in s.vertices.iter().zip(expect) {
            assert!((v[0] - e[0]).abs() < 1e-15 && (v[1] - e[1]).abs() < 1e-15);
        }
        assert!((s.delta - 3f64.sqrt()).abs() < 1e-15);
        assert!(s.distance_error < 1e-12 && s.norm_error < 1e-12);
    }

    #[test]
    fn distances() {
        assert_eq!(simplex_vertices(1).delta, 2.0);
        assert!((simplex_vertices(3).delta - 2.0 * 2f64.sqrt() / 3f64.sqrt()).abs() < 1e-15);
        for d in 1..=12 {
            let s = simplex_vertices(d);
            assert!(s.distance_error < 1e-12 && s.norm_error < 1e-12, "d={d}");
        }
    }

    #[test]
    fn delta_recursion() {
        for d in 1..=64 {
            assert!((delta_recursive(d) - delta_closed(d)).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn volumes() {
        assert!((vd_closed(1) - 2.0).abs() < 1e-15);
        assert!((vd_closed(2) - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
        let r3 = cayley_menger_vd(3);
        assert!((r3.d_factorial_vd - 16.0 / (3.0 * 3f64.sqrt())).abs() < 1e-12);
        for d in 1..=8 {
            let r = cayley_menger_vd(d);
            assert!(r.max_discrepancy < 1e-9, "{r:?}");
        }
    }
}
