//! Integer lattice vectors, finite ground sets of `Z^d`, and the hyperoctahedral
//! symmetry group used to canonicalize supports.
//!
//! All arithmetic is exact over `i64`; every operation that can overflow goes
//! through a checked path and reports [`LatticeError::Overflow`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("invalid ground set: {0}")]
    InvalidGroundSet(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A point of `Z^d`. Ordering is lexicographic on the coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "lattice vectors have dimension >= 1");
        LatticeVector(coords)
    }

    pub fn zero(d: usize) -> Self {
        LatticeVector::new(vec![0; d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    fn check_dim(&self, other: &Self) -> Result<(), LatticeError> {
        if self.dim() != other.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check_dim(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(LatticeError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(LatticeVector)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check_dim(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b).ok_or(LatticeError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(LatticeVector)
    }

    pub fn checked_scale(&self, k: i64) -> Result<Self, LatticeError> {
        self.0
            .iter()
            .map(|a| a.checked_mul(k).ok_or(LatticeError::Overflow))
            .collect::<Result<Vec<_>, _>>()
            .map(LatticeVector)
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }

    /// Squared Euclidean norm.
    pub fn norm2(&self) -> i128 {
        self.0.iter().map(|&a| (a as i128) * (a as i128)).sum()
    }

    pub fn linf(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<const D: usize> From<[i64; D]> for LatticeVector {
    fn from(a: [i64; D]) -> Self {
        LatticeVector::new(a.to_vec())
    }
}

/// The norm a ground set is a ball of, with its radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormBall {
    /// `max_i |v_i| <= r`
    Linf(i64),
    /// `sum_i v_i^2 <= r^2`
    L2(i64),
}

impl NormBall {
    pub fn contains(&self, v: &LatticeVector) -> bool {
        match *self {
            NormBall::Linf(r) => v.linf() <= r,
            NormBall::L2(r) => v.norm2() <= (r as i128) * (r as i128),
        }
    }

    pub fn scaled(&self, k: i64) -> NormBall {
        match *self {
            NormBall::Linf(r) => NormBall::Linf(r * k),
            NormBall::L2(r) => NormBall::L2(r * k),
        }
    }

    /// Half-width of the smallest cube containing the ball.
    pub fn linf_radius(&self) -> i64 {
        match *self {
            NormBall::Linf(r) | NormBall::L2(r) => r,
        }
    }
}

/// A finite subset of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundSet {
    /// `[-m, m]^d`
    Box { m: i64, d: usize },
    /// Lattice points of the closed Euclidean ball of radius `m`.
    Ball { m: i64, d: usize },
    /// Sorted, deduplicated list of points.
    Explicit { d: usize, points: Vec<LatticeVector> },
}

impl GroundSet {
    pub fn cube(m: i64, d: usize) -> Self {
        assert!(m >= 0 && d >= 1);
        GroundSet::Box { m, d }
    }

    pub fn ball(m: i64, d: usize) -> Self {
        assert!(m >= 0 && d >= 1);
        GroundSet::Ball { m, d }
    }

    pub fn explicit(points: Vec<LatticeVector>) -> Result<Self, LatticeError> {
        let d = points
            .first()
            .map(LatticeVector::dim)
            .ok_or_else(|| LatticeError::InvalidGroundSet("empty point list".into()))?;
        if let Some(bad) = points.iter().find(|p| p.dim() != d) {
            return Err(LatticeError::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        let points: Vec<_> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        Ok(GroundSet::Explicit { d, points })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, LatticeError> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let coords = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|e| LatticeError::Parse(format!("line {}: {e}", lineno + 1)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            points.push(LatticeVector::new(coords));
        }
        GroundSet::explicit(points)
    }

    pub fn dim(&self) -> usize {
        match self {
            GroundSet::Box { d, .. } | GroundSet::Ball { d, .. } | GroundSet::Explicit { d, .. } => {
                *d
            }
        }
    }

    /// Smallest `r` with the set inside `[-r, r]^d`.
    pub fn linf_radius(&self) -> i64 {
        match self {
            GroundSet::Box { m, .. } | GroundSet::Ball { m, .. } => *m,
            GroundSet::Explicit { points, .. } => points.iter().map(LatticeVector::linf).max().unwrap_or(0),
        }
    }

    /// The norm ball the set lives in. Explicit sets are bounded in the sup norm.
    pub fn norm_ball(&self) -> NormBall {
        match self {
            GroundSet::Box { m, .. } => NormBall::Linf(*m),
            GroundSet::Ball { m, .. } => NormBall::L2(*m),
            GroundSet::Explicit { .. } => NormBall::Linf(self.linf_radius()),
        }
    }

    pub fn contains(&self, v: &LatticeVector) -> Result<bool, LatticeError> {
        if v.dim() != self.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(match self {
            GroundSet::Box { m, .. } => v.linf() <= *m,
            GroundSet::Ball { m, .. } => v.norm2() <= (*m as i128) * (*m as i128),
            GroundSet::Explicit { points, .. } => points.binary_search(v).is_ok(),
        })
    }

    /// All points, in lexicographic order.
    pub fn enumerate(&self) -> Vec<LatticeVector> {
        match self {
            GroundSet::Explicit { points, .. } => points.clone(),
            GroundSet::Box { m, d } | GroundSet::Ball { m, d } => {
                let mut out = Vec::new();
                let mut cur = vec![-*m; *d];
                loop {
                    let v = LatticeVector(cur.clone());
                    if self.contains(&v).unwrap_or(false) {
                        out.push(v);
                    }
                    // odometer, last coordinate fastest
                    let mut i = *d;
                    loop {
                        if i == 0 {
                            return out;
                        }
                        i -= 1;
                        if cur[i] < *m {
                            cur[i] += 1;
                            break;
                        }
                        cur[i] = -*m;
                    }
                }
            }
        }
    }

    /// Whether every signed coordinate permutation maps the set onto itself.
    pub fn is_symmetric(&self) -> bool {
        match self {
            GroundSet::Box { .. } | GroundSet::Ball { .. } => true,
            GroundSet::Explicit { d, points } => {
                let group = SymmetryElement::group(*d);
                points.iter().all(|p| {
                    group
                        .iter()
                        .all(|g| points.binary_search(&g.apply(p)).is_ok())
                })
            }
        }
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundSet::Box { m, d } => write!(f, "box:{m}:{d}"),
            GroundSet::Ball { m, d } => write!(f, "ball:{m}:{d}"),
            GroundSet::Explicit { d, points } => write!(f, "explicit[{} points, d={d}]", points.len()),
        }
    }
}

impl FromStr for GroundSet {
    type Err = LatticeError;

    /// Accepts `box:m:d`, `ball:m:d` and `file:PATH`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("file:") {
            return GroundSet::from_file(path);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, m, d] = parts.as_slice() else {
            return Err(LatticeError::Parse(format!("expected kind:m:d, got `{s}`")));
        };
        let m: i64 = m
            .parse()
            .map_err(|_| LatticeError::Parse(format!("bad radius `{m}`")))?;
        let d: usize = d
            .parse()
            .map_err(|_| LatticeError::Parse(format!("bad dimension `{d}`")))?;
        if m < 0 || d == 0 {
            return Err(LatticeError::InvalidGroundSet(format!(
                "need m >= 0 and d >= 1, got m={m}, d={d}"
            )));
        }
        match *kind {
            "box" => Ok(GroundSet::Box { m, d }),
            "ball" => Ok(GroundSet::Ball { m, d }),
            other => Err(LatticeError::Parse(format!("unknown ground set kind `{other}`"))),
        }
    }
}

/// A signed permutation of coordinates: `(g v)_i = signs[i] * v[perm[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetryElement {
    perm: Vec<usize>,
    signs: Vec<i64>,
}

impl SymmetryElement {
    pub fn identity(d: usize) -> Self {
        SymmetryElement {
            perm: (0..d).collect(),
            signs: vec![1; d],
        }
    }

    pub fn new(perm: Vec<usize>, signs: Vec<i64>) -> Self {
        assert_eq!(perm.len(), signs.len());
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            assert!(p < perm.len() && !seen[p], "not a permutation");
            seen[p] = true;
        }
        assert!(signs.iter().all(|s| *s == 1 || *s == -1));
        SymmetryElement { perm, signs }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(v.dim(), self.dim());
        LatticeVector(
            self.perm
                .iter()
                .zip(&self.signs)
                .map(|(&p, &s)| s * v.0[p])
                .collect(),
        )
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let signs = self
            .perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| s * other.signs[p])
            .collect();
        SymmetryElement { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let d = self.dim();
        let mut perm = vec![0; d];
        let mut signs = vec![1; d];
        for i in 0..d {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SymmetryElement { perm, signs }
    }

    /// All `2^d * d!` signed permutations, in a fixed order.
    pub fn group(d: usize) -> Vec<SymmetryElement> {
        let mut perms = Vec::new();
        permutations(&mut (0..d).collect::<Vec<_>>(), 0, &mut perms);
        perms.sort();
        let mut out = Vec::with_capacity(perms.len() << d);
        for perm in perms {
            for mask in 0..(1u32 << d) {
                let signs = (0..d)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect();
                out.push(SymmetryElement {
                    perm: perm.clone(),
                    signs,
                });
            }
        }
        out
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Lexicographically smallest image of `vs` under the signed-permutation group,
/// optionally also minimizing over reorderings of the list ("column permutations").
pub fn canonical_orbit_representative(
    vs: &[LatticeVector],
    with_column_perms: bool,
) -> Vec<LatticeVector> {
    let Some(first) = vs.first() else {
        return Vec::new();
    };
    let mut best: Option<Vec<LatticeVector>> = None;
    for g in SymmetryElement::group(first.dim()) {
        let mut image: Vec<_> = vs.iter().map(|v| g.apply(v)).collect();
        if with_column_perms {
            image.sort();
        }
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    best.unwrap()
}

/// Canonical form of a weighted support (points with multiplicities), minimizing
/// over the signed-permutation group and over reorderings of the pairs.
pub fn canonical_weighted(pairs: &[(LatticeVector, u64)]) -> Vec<(LatticeVector, u64)> {
    let Some((first, _)) = pairs.first() else {
        return Vec::new();
    };
    let mut best: Option<Vec<(LatticeVector, u64)>> = None;
    for g in SymmetryElement::group(first.dim()) {
        let mut image: Vec<_> = pairs.iter().map(|(v, k)| (g.apply(v), *k)).collect();
        image.sort();
        if best.as_ref().is_none_or(|b| image.cmp(b) == Ordering::Less) {
            best = Some(image);
        }
    }
    best.unwrap()
}

/// Lexicographically smallest point in the orbit of `v`: the absolute values
/// sorted in decreasing order, all negated.
pub fn orbit_min_point(v: &LatticeVector) -> LatticeVector {
    let mut abs: Vec<i64> = v.0.iter().map(|c| c.abs()).collect();
    abs.sort_unstable_by(|a, b| b.cmp(a));
    LatticeVector(abs.into_iter().map(|c| -c).collect())
}
