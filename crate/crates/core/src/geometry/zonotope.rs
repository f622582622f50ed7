//! The polytope `L(w_1, ..., w_{d+1})` of `d+1` positively dependent integer
//! generators: the union of the parallelepipeds `L_i` spanned by all generators
//! but `w_i`, which equals the union of the translates `w_i + L_i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::GeometryError;
use crate::lattice::LatticeVector;
use crate::linalg::det_i128;
use crate::support::{analyze, SupportClass, SupportMatrix};
use crate::zerosum::ZsSequence;

/// A point with rational coordinates `num / den`, `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    pub num: Vec<i128>,
    pub den: i128,
}

impl RationalPoint {
    pub fn new(num: Vec<i128>, den: i128) -> Self {
        assert!(den > 0, "denominator must be positive");
        RationalPoint { num, den }
    }

    pub fn integer(v: &[i64]) -> Self {
        RationalPoint {
            num: v.iter().map(|&x| x as i128).collect(),
            den: 1,
        }
    }
}

/// One parallelepiped `L_i`, stored through the adjugate of its edge matrix so
/// that the coordinates of `x` are `adj · x / det`.
#[derive(Clone, Debug)]
struct Piece {
    det: i128,
    adj: Vec<Vec<i128>>,
}

impl Piece {
    fn new(cols: &[&LatticeVector]) -> Piece {
        let d = cols.len();
        let a: Vec<Vec<i128>> = (0..d)
            .map(|r| cols.iter().map(|c| c.coords()[r] as i128).collect())
            .collect();
        let det = det_i128(&a);
        let mut adj = vec![vec![0i128; d]; d];
        if d == 1 {
            adj[0][0] = 1;
        } else {
            for (j, row) in adj.iter_mut().enumerate() {
                for (k, entry) in row.iter_mut().enumerate() {
                    // cofactor of a[k][j]
                    let minor: Vec<Vec<i128>> = (0..d)
                        .filter(|&r| r != k)
                        .map(|r| (0..d).filter(|&c| c != j).map(|c| a[r][c]).collect())
                        .collect();
                    let sign = if (j + k) % 2 == 0 { 1 } else { -1 };
                    *entry = sign * det_i128(&minor);
                }
            }
        }
        Piece { det, adj }
    }

    /// Whether `num / den` has all coordinates in `[0, 1]`.
    fn contains(&self, num: &[i128], den: i128) -> bool {
        let s = self.det.signum();
        let top = self.det.abs() * den;
        self.adj.iter().all(|row| {
            let y = s * row.iter().zip(num).map(|(a, x)| a * x).sum::<i128>();
            (0..=top).contains(&y)
        })
    }

    /// Whether `num` is a nonnegative combination of the edges.
    fn cone_contains(&self, num: &[i128]) -> bool {
        let s = self.det.signum();
        self.adj
            .iter()
            .all(|row| s * row.iter().zip(num).map(|(a, x)| a * x).sum::<i128>() >= 0)
    }

    /// Integer values of the last coordinate `t` with `(prefix, t)` in the
    /// piece; `None` when empty.
    fn row_interval(&self, prefix: &[i128]) -> Option<(i128, i128)> {
        let d = self.adj.len();
        let s = self.det.signum();
        let top = self.det.abs();
        let (mut lo, mut hi) = (i128::MIN, i128::MAX);
        for row in &self.adj {
            // s * (a + b t) in [0, top]
            let a: i128 = s * (0..d - 1).map(|k| row[k] * prefix[k]).sum::<i128>();
            let b = s * row[d - 1];
            if b == 0 {
                if !(0..=top).contains(&a) {
                    return None;
                }
                continue;
            }
            // 0 <= a + b t <= top
            let (l, h) = if b > 0 {
                (ceil_div(-a, b), floor_div(top - a, b))
            } else {
                (ceil_div(top - a, b), floor_div(-a, b))
            };
            lo = lo.max(l);
            hi = hi.min(h);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) { q - 1 } else { q }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

#[derive(Clone, Debug)]
pub struct Zonotope {
    support: SupportMatrix,
    pieces: Vec<Piece>,
}

impl Zonotope {
    /// Requires `d+1` positively dependent generators in `Z^d`.
    pub fn new(generators: &[LatticeVector]) -> Result<Zonotope, GeometryError> {
        let support = analyze(generators)?;
        if support.class != SupportClass::PositivelyDependent {
            return Err(GeometryError::NotPositivelyDependent(support.class));
        }
        let pieces = (0..generators.len())
            .map(|i| {
                let cols: Vec<&LatticeVector> = generators
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, c)| c)
                    .collect();
                Piece::new(&cols)
            })
            .collect();
        Ok(Zonotope { support, pieces })
    }

    pub fn dim(&self) -> usize {
        self.support.d
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.support.columns
    }

    pub fn support_matrix(&self) -> &SupportMatrix {
        &self.support
    }

    /// `k · P`, i.e. the same body on scaled generators.
    pub fn dilate(&self, k: i64) -> Result<Zonotope, GeometryError> {
        let gens: Vec<LatticeVector> = self
            .generators()
            .iter()
            .map(|g| g.checked_scale(k))
            .collect::<Result<_, _>>()
            .map_err(|_| GeometryError::Overflow)?;
        Zonotope::new(&gens)
    }

    /// Index of the first parallelepiped `L_i` containing `x`.
    pub fn piece_containing(&self, x: &RationalPoint) -> Option<usize> {
        self.pieces.iter().position(|p| p.contains(&x.num, x.den))
    }

    pub fn contains(&self, x: &RationalPoint) -> bool {
        self.piece_containing(x).is_some()
    }

    pub fn contains_int(&self, x: &[i64]) -> bool {
        self.contains(&RationalPoint::integer(x))
    }

    /// Membership in `⋃ (w_i + L_i)`.
    pub fn contains_translated(&self, x: &RationalPoint) -> bool {
        self.pieces.iter().zip(self.generators()).any(|(p, w)| {
            let shifted: Vec<i128> = x
                .num
                .iter()
                .zip(w.coords())
                .map(|(a, &c)| a - x.den * c as i128)
                .collect();
            p.contains(&shifted, x.den)
        })
    }

    /// Membership of a direction in some cone `K_i` spanned by all generators but `w_i`.
    pub fn in_some_cone(&self, y: &[i128]) -> bool {
        self.pieces.iter().any(|p| p.cone_contains(y))
    }

    /// Per-axis `[min, max]` of the body.
    pub fn bounding_box(&self) -> Vec<(i64, i64)> {
        (0..self.dim())
            .map(|k| {
                let cs = self.generators().iter().map(|g| g.coords()[k]);
                (cs.clone().filter(|&c| c < 0).sum(), cs.filter(|&c| c > 0).sum())
            })
            .collect()
    }

    /// `Σ |det A_i|`, the volume of the body.
    pub fn volume(&self) -> i128 {
        self.support.minors.iter().map(|m| m.abs()).sum()
    }

    /// Exact number of integer points: each row along the last axis meets each
    /// parallelepiped in an interval; the union of those is counted.
    pub fn lattice_count(&self) -> u64 {
        let d = self.dim();
        let bbox = self.bounding_box();
        if d == 1 {
            return (bbox[0].1 - bbox[0].0 + 1) as u64;
        }
        let (lo0, hi0) = bbox[0];
        (lo0..=hi0)
            .into_par_iter()
            .map(|x0| {
                let mut total = 0u64;
                let mut prefix: Vec<i128> = vec![x0 as i128];
                prefix.extend(bbox[1..d - 1].iter().map(|b| b.0 as i128));
                let mut intervals: Vec<(i128, i128)> = Vec::with_capacity(d + 1);
                loop {
                    intervals.clear();
                    intervals.extend(self.pieces.iter().filter_map(|p| p.row_interval(&prefix)));
                    intervals.sort_unstable();
                    let mut reach = i128::MIN;
                    for &(l, h) in &intervals {
                        let l = l.max(reach + 1);
                        if h >= l {
                            total += (h - l + 1) as u64;
                            reach = h;
                        }
                    }
                    // odometer over axes 1..d-1
                    let mut k = d - 1;
                    loop {
                        k -= 1;
                        if k == 0 {
                            return total;
                        }
                        prefix[k] += 1;
                        if prefix[k] <= bbox[k].1 as i128 {
                            break;
                        }
                        prefix[k] = bbox[k].0 as i128;
                    }
                }
            })
            .sum()
    }

    /// Integer-point count by testing every point of the bounding box.
    pub fn lattice_count_scan(&self) -> u64 {
        let bbox = self.bounding_box();
        let (lo0, hi0) = bbox[0];
        (lo0..=hi0)
            .into_par_iter()
            .map(|x0| {
                let mut count = 0u64;
                let mut p: Vec<i64> = bbox.iter().map(|b| b.0).collect();
                p[0] = x0;
                loop {
                    if self.contains_int(&p) {
                        count += 1;
                    }
                    let mut k = p.len();
                    loop {
                        k -= 1;
                        if k == 0 {
                            return count;
                        }
                        p[k] += 1;
                        if p[k] <= bbox[k].1 {
                            break;
                        }
                        p[k] = bbox[k].0;
                    }
                }
            })
            .sum()
    }

    /// Monte-Carlo check of both decompositions, the volume and the cone cover.
    pub fn tiling_check(&self, samples: usize, seed: u64) -> TilingReport {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // sample points on the grid (1/den) Z^d
        let den: i128 = 1 << 12;
        let bbox = self.bounding_box();
        let box_volume: f64 = bbox.iter().map(|(l, h)| (h - l) as f64).product();
        let (mut hits, mut mismatches) = (0usize, 0usize);
        for _ in 0..samples {
            let num: Vec<i128> = bbox
                .iter()
                .map(|&(l, h)| rng.random_range(l as i128 * den..=h as i128 * den))
                .collect();
            let x = RationalPoint::new(num, den);
            let a = self.contains(&x);
            if a {
                hits += 1;
            }
            if a != self.contains_translated(&x) {
                mismatches += 1;
            }
        }
        let mut cone_misses = 0usize;
        for _ in 0..samples {
            let y: Vec<i128> = (0..d).map(|_| rng.random_range(-den..=den)).collect();
            if !self.in_some_cone(&y) {
                cone_misses += 1;
            }
        }
        let f = hits as f64 / samples.max(1) as f64;
        let mc_volume = f * box_volume;
        let sigma = box_volume * (f * (1.0 - f) / samples.max(1) as f64).sqrt();
        let exact = self.volume() as f64;
        // grid discretization adds at most about one cell layer
        let slack = box_volume * 2.0 * d as f64 / den as f64;
        TilingReport {
            samples,
            hits,
            decomposition_mismatches: mismatches,
            cone_misses,
            exact_volume: exact,
            mc_volume,
            sigma,
            volume_ok: (mc_volume - exact).abs() <= 3.0 * sigma + slack,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TilingReport {
    pub samples: usize,
    /// Sampled bounding-box points inside `⋃ L_i`.
    pub hits: usize,
    /// Points in exactly one of `⋃ L_i` and `⋃ (w_i + L_i)`.
    pub decomposition_mismatches: usize,
    /// Random directions outside every cone.
    pub cone_misses: usize,
    pub exact_volume: f64,
    pub mc_volume: f64,
    pub sigma: f64,
    /// Monte-Carlo volume within 3σ of the exact one.
    pub volume_ok: bool,
}

impl TilingReport {
    pub fn covers(&self) -> bool {
        self.decomposition_mismatches == 0 && self.cone_misses == 0
    }

    pub fn passed(&self) -> bool {
        self.covers() && self.volume_ok
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Reordering {
    /// Support index emitted at each step.
    pub order: Vec<usize>,
    pub partial_sums: Vec<LatticeVector>,
}

impl Reordering {
    pub fn sums_distinct(&self) -> bool {
        let mut s: Vec<&LatticeVector> = self.partial_sums.iter().collect();
        s.sort();
        s.windows(2).all(|w| w[0] != w[1])
    }
}

/// Orders a zero-sum sequence on `d+1` positively dependent vectors so that every
/// partial sum stays in `L(support)`: while the running sum lies in `L_i`, the
/// next element is a copy of `w_i` (smallest such `i`).
pub fn greedy_reorder(s: &ZsSequence) -> Result<Reordering, GeometryError> {
    let z = Zonotope::new(s.support())?;
    let d = z.dim();
    let mut left: Vec<u64> = s.mults().to_vec();
    let mut cur = vec![0i64; d];
    let n = s.len() as usize;
    let mut order = Vec::with_capacity(n);
    let mut partial_sums = Vec::with_capacity(n);
    for step in 0..n {
        let x = RationalPoint::integer(&cur);
        let stuck = || GeometryError::StuckStep {
            step,
            sum: LatticeVector::new(cur.clone()),
        };
        let i = z.piece_containing(&x).ok_or_else(stuck)?;
        if left[i] == 0 {
            return Err(stuck());
        }
        left[i] -= 1;
        for (c, w) in cur.iter_mut().zip(s.support()[i].coords()) {
            *c += w;
        }
        if !z.contains_int(&cur) {
            return Err(GeometryError::StuckStep {
                step: step + 1,
                sum: LatticeVector::new(cur.clone()),
            });
        }
        order.push(i);
        partial_sums.push(LatticeVector::new(cur.clone()));
    }
    Ok(Reordering { order, partial_sums })
}
