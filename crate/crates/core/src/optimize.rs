//! Derivative-free maximization of the area / volume objectives: the hexagon
//! area `S(α, β)`, the reduced dodecahedron volume `V(θ, θ₁)` and the full
//! five-angle volume, plus a local-maximality probe for the regular simplex.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{simplex_vertices, zonotope_volume_f64};

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("{name} = {value} outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

fn check(name: &'static str, value: f64, ok: bool, range: &'static str) -> Result<(), OptimizeError> {
    if ok {
        Ok(())
    } else {
        Err(OptimizeError::Domain { name, value, range })
    }
}

/// `sin α + sin β - sin(α + β)`: area of the hexagon on three unit vectors
/// separated by the angles `α`, `β`.
pub fn hexagon_area(alpha: f64, beta: f64) -> Result<f64, OptimizeError> {
    check("alpha", alpha, alpha > 0.0 && alpha < PI, "(0, pi)")?;
    check("beta", beta, beta > 0.0 && beta < PI, "(0, pi)")?;
    Ok(hexagon_raw(&[alpha, beta]))
}

fn hexagon_raw(x: &[f64]) -> f64 {
    x[0].sin() + x[1].sin() - (x[0] + x[1]).sin()
}

/// `2 sin θ sin θ₁ + 2 sin(θ/2) sin 2θ₁`.
pub fn dodeca_reduced(theta: f64, theta1: f64) -> Result<f64, OptimizeError> {
    check("theta", theta, theta > 0.0 && theta < PI, "(0, pi)")?;
    check("theta1", theta1, theta1 > 0.0 && theta1 <= PI / 2.0, "(0, pi/2]")?;
    Ok(dodeca_reduced_raw(&[theta, theta1]))
}

fn dodeca_reduced_raw(x: &[f64]) -> f64 {
    2.0 * x[0].sin() * x[1].sin() + 2.0 * (x[0] / 2.0).sin() * (2.0 * x[1]).sin()
}

/// Volume of the rhombic dodecahedron on `w_1 = e_1`, `w_2 = (cos θ, sin θ, 0)`
/// and `w_3`, `w_4` with latitudes `θ₁`, `θ₂` and longitudes `φ₁`, `φ₂`.
pub fn dodeca_full(
    theta: f64,
    theta1: f64,
    theta2: f64,
    phi1: f64,
    phi2: f64,
) -> Result<f64, OptimizeError> {
    check("theta", theta, theta > 0.0 && theta < PI, "(0, pi)")?;
    check("theta1", theta1, theta1 > 0.0 && theta1 <= PI / 2.0, "(0, pi/2]")?;
    check("theta2", theta2, (-PI / 2.0..0.0).contains(&theta2), "[-pi/2, 0)")?;
    check("phi1", phi1, (PI..=2.0 * PI).contains(&phi1), "[pi, 2pi]")?;
    check("phi2", phi2, (PI..=2.0 * PI).contains(&phi2), "[pi, 2pi]")?;
    Ok(dodeca_full_raw(&[theta, theta1, theta2, phi1, phi2]))
}

fn dodeca_full_raw(x: &[f64]) -> f64 {
    let (t, t1, t2, p1, p2) = (x[0], x[1], x[2], x[3], x[4]);
    let a = t1.cos() * p1.sin() * t2.sin() - t1.sin() * t2.cos() * p2.sin();
    let b = t1.cos() * p1.cos() * t2.sin() - t1.sin() * t2.cos() * p2.cos();
    t.sin() * (t1.sin() - t2.sin()) + a.abs() + (t.cos() * a - t.sin() * b).abs()
}

/// The four unit vectors parametrized by [`dodeca_full`].
pub fn dodeca_generators(theta: f64, theta1: f64, theta2: f64, phi1: f64, phi2: f64) -> Vec<Vec<f64>> {
    let unit = |lat: f64, lon: f64| vec![lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()];
    vec![
        vec![1.0, 0.0, 0.0],
        vec![theta.cos(), theta.sin(), 0.0],
        unit(theta1, phi1),
        unit(theta2, phi2),
    ]
}

#[derive(Clone, Debug)]
pub struct ObjectiveSpec {
    pub name: &'static str,
    /// Closed box domain, one interval per variable.
    pub bounds: Vec<(f64, f64)>,
    pub eval: fn(&[f64]) -> f64,
    pub symmetries: Vec<&'static str>,
}

impl ObjectiveSpec {
    pub fn arity(&self) -> usize {
        self.bounds.len()
    }

    pub fn hexagon() -> Self {
        ObjectiveSpec {
            name: "hexagon",
            bounds: vec![(0.0, PI), (0.0, PI)],
            eval: hexagon_raw,
            symmetries: vec!["alpha <-> beta"],
        }
    }

    pub fn dodeca_reduced() -> Self {
        ObjectiveSpec {
            name: "dodeca-reduced",
            bounds: vec![(0.0, PI), (0.0, PI / 2.0)],
            eval: dodeca_reduced_raw,
            symmetries: vec![],
        }
    }

    pub fn dodeca_full() -> Self {
        ObjectiveSpec {
            name: "dodeca-full",
            bounds: vec![
                (0.0, PI),
                (0.0, PI / 2.0),
                (-PI / 2.0, 0.0),
                (PI, 2.0 * PI),
                (PI, 2.0 * PI),
            ],
            eval: dodeca_full_raw,
            symmetries: vec!["(theta1, phi1) <-> (-theta2, phi2)"],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximizeResult {
    pub objective: &'static str,
    pub argmax: Vec<f64>,
    pub value: f64,
    /// Largest absolute central-difference gradient component at `argmax`.
    pub gradient: f64,
    pub evaluations: u64,
    /// `(iteration, value)` improvements of the winning refinement.
    pub trace: Vec<(usize, f64)>,
}

const FD_STEP: f64 = 1e-6;
/// `(value, point, evaluations, trace)` of one compass run.
type Run = (f64, Vec<f64>, u64, Vec<(usize, f64)>);
const REFINE_STARTS: usize = 16;
const RESTARTS_5D: usize = 64;

/// Higher value first, then the lexicographically smaller point.
fn better(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| {
        a.1.iter()
            .zip(&b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

pub fn gradient_max_abs(obj: &ObjectiveSpec, x: &[f64]) -> f64 {
    (0..x.len())
        .map(|k| {
            let mut hi = x.to_vec();
            let mut lo = x.to_vec();
            hi[k] += FD_STEP;
            lo[k] -= FD_STEP;
            (((obj.eval)(&hi) - (obj.eval)(&lo)) / (2.0 * FD_STEP)).abs()
        })
        .fold(0.0, f64::max)
}

/// Compass search: poll `±step_k e_k`, move on improvement, halve all steps
/// after a failed sweep.
fn compass(obj: &ObjectiveSpec, start: Vec<f64>, step: Vec<f64>, iters: usize) -> Run {
    let mut x = start;
    let mut fx = (obj.eval)(&x);
    let mut step = step;
    let mut evals = 1u64;
    let mut trace = vec![(0, fx)];
    for it in 1..=iters {
        let mut moved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                let (lo, hi) = obj.bounds[k];
                y[k] = (y[k] + dir * step[k]).clamp(lo, hi);
                if y[k] == x[k] {
                    continue;
                }
                let fy = (obj.eval)(&y);
                evals += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    moved = true;
                    trace.push((it, fx));
                    break;
                }
            }
        }
        if !moved {
            step.iter_mut().for_each(|s| *s *= 0.5);
            if step.iter().all(|&s| s < 1e-13) {
                break;
            }
        }
    }
    (fx, x, evals, trace)
}

/// Grid search over cell centres, then compass refinement from the best
/// `REFINE_STARTS` cells (plus seeded random restarts for five variables).
/// Deterministic for fixed arguments.
pub fn maximize(obj: &ObjectiveSpec, grid_n: usize, refine_iters: usize, seed: u64) -> MaximizeResult {
    assert!(grid_n >= 8, "grid_n must be at least 8");
    let n = obj.arity();
    let h: Vec<f64> = obj.bounds.iter().map(|(lo, hi)| (hi - lo) / grid_n as f64).collect();
    let total = grid_n.pow(n as u32);
    let point = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            x[k] = obj.bounds[k].0 + (idx % grid_n) as f64 * h[k] + h[k] / 2.0;
            idx /= grid_n;
        }
        x
    };
    let mut cells: Vec<(f64, Vec<f64>)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let x = point(i);
            ((obj.eval)(&x), x)
        })
        .collect();
    cells.par_sort_by(better);
    cells.truncate(REFINE_STARTS);

    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = cells.into_iter().map(|(_, x)| (x, h.clone())).collect();
    if n >= 5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RESTARTS_5D {
            let x: Vec<f64> = obj.bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
            starts.push((x, h.clone()));
        }
    }
    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|(x, step)| compass(obj, x, step, refine_iters))
        .collect();
    let evaluations = total as u64 + runs.iter().map(|r| r.2).sum::<u64>();
    let best = runs
        .into_iter()
        .min_by(|a, b| better(&(a.0, a.1.clone()), &(b.0, b.1.clone())))
        .expect("at least one start");
    MaximizeResult {
        objective: obj.name,
        gradient: gradient_max_abs(obj, &best.1),
        argmax: best.1,
        value: best.0,
        evaluations,
        trace: best.3,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplexEvidence {
    pub d: usize,
    pub trials: usize,
    pub eps: f64,
    pub base_volume: f64,
    /// Largest `volume(perturbed) - volume(base)` seen; negative when every
    /// perturbation lost volume.
    pub max_increase: f64,
    pub passed: bool,
    /// Local maximality is proved for `d <= 3`; beyond that this is evidence only.
    pub proven: bool,
}

/// Moves every simplex vertex along a random tangent direction by `eps`,
/// projects back to the sphere, and compares the volume of `L`.
pub fn simplex_local_max_evidence(d: usize, trials: usize, eps: f64, seed: u64) -> SimplexEvidence {
    assert!(d >= 2, "dimension must be at least 2");
    let base = simplex_vertices(d).vertices;
    let base_volume = zonotope_volume_f64(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_increase = f64::NEG_INFINITY;
    for _ in 0..trials {
        let moved: Vec<Vec<f64>> = base
            .iter()
            .map(|v| {
                let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let dot: f64 = g.iter().zip(v).map(|(a, b)| a * b).sum();
                let t: Vec<f64> = g.iter().zip(v).map(|(a, b)| a - dot * b).collect();
                let tn = t.iter().map(|x| x * x).sum::<f64>().sqrt();
                let w: Vec<f64> = v.iter().zip(&t).map(|(a, b)| a + eps * b / tn).collect();
                let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                w.into_iter().map(|x| x / wn).collect()
            })
            .collect();
        max_increase = max_increase.max(zonotope_volume_f64(&moved) - base_volume);
    }
    SimplexEvidence {
        d,
        trials,
        eps,
        base_volume,
        max_increase,
        passed: max_increase <= 1e-9,
        proven: d <= 3,
    }
}
