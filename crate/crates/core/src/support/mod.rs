//! Support matrices: `d x (d+1)` integer matrices whose columns are a candidate
//! support. Their maximal minors determine the integer kernel by Cramer's rule,
//! and with it the unique minimal zero-sum sequence carried by the support.

mod enumerate;

pub use enumerate::{
    davenport_support_dp1, theorem3_uniqueness_check, Dp1Options, Dp1Result, SupportOrbit,
    UniquenessReport,
};

use serde::Serialize;
use thiserror::Error;

use crate::lattice::LatticeVector;
use crate::linalg::{maximal_minors, rank_i128};
use crate::primes::gcd;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SupportError {
    #[error("expected {expected} columns of dimension {dim}, got {found}")]
    Shape {
        expected: usize,
        dim: usize,
        found: usize,
    },
    #[error("degenerate support ({0:?}): rank < d or a vanishing maximal minor")]
    Degenerate(SupportClass),
    #[error("ground set has {points} points, over the enumeration budget of {budget}")]
    TooLarge { points: usize, budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SupportClass {
    /// Rank `d`, all minors nonzero, kernel entries of one sign.
    PositivelyDependent,
    /// Rank `d`, all minors nonzero, kernel entries of both signs.
    MixedSigns,
    /// Rank below `d`; every maximal minor vanishes.
    RankDeficient,
    /// Rank `d` but some maximal minor vanishes (some `d` columns are dependent).
    MinorZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportMatrix {
    pub d: usize,
    pub columns: Vec<LatticeVector>,
    /// `minors[i] = det(A_i)`, the determinant with column `i` deleted.
    pub minors: Vec<i128>,
    /// gcd of the absolute minors (0 when all vanish).
    pub delta: i128,
    /// Primitive kernel vector with first nonzero entry positive; `None` when rank < d.
    pub kernel: Option<Vec<i128>>,
    pub class: SupportClass,
}

impl SupportMatrix {
    pub fn rank_is_full(&self) -> bool {
        self.class != SupportClass::RankDeficient
    }

    /// Kernel entries in absolute value, i.e. the multiplicities of the minimal
    /// zero-sum sequence on this support when it is positively dependent.
    pub fn multiplicities(&self) -> Option<Vec<u64>> {
        match (self.class, &self.kernel) {
            (SupportClass::PositivelyDependent, Some(k)) => {
                Some(k.iter().map(|x| x.unsigned_abs() as u64).collect())
            }
            _ => None,
        }
    }
}

/// Minors, Δ, primitive kernel and classification of `d+1` columns in `Z^d`.
pub fn analyze(columns: &[LatticeVector]) -> Result<SupportMatrix, SupportError> {
    let d = columns.first().map(LatticeVector::dim).unwrap_or(0);
    if d == 0 || columns.len() != d + 1 || columns.iter().any(|c| c.dim() != d) {
        return Err(SupportError::Shape {
            expected: d + 1,
            dim: d,
            found: columns.len(),
        });
    }
    let cols: Vec<Vec<i128>> = columns
        .iter()
        .map(|c| c.coords().iter().map(|&x| x as i128).collect())
        .collect();
    let minors = maximal_minors(&cols);
    let delta = minors.iter().fold(0, |g, &x| gcd(g, x));
    if delta == 0 {
        return Ok(SupportMatrix {
            d,
            columns: columns.to_vec(),
            minors,
            delta,
            kernel: None,
            class: SupportClass::RankDeficient,
        });
    }
    // Cramer: r_i = (-1)^i det(A_i) spans the kernel when rank = d.
    let mut kernel: Vec<i128> = minors
        .iter()
        .enumerate()
        .map(|(i, &m)| if i % 2 == 0 { m / delta } else { -m / delta })
        .collect();
    if kernel.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        kernel.iter_mut().for_each(|x| *x = -*x);
    }
    let class = if minors.contains(&0) {
        SupportClass::MinorZero
    } else if kernel.iter().all(|&x| x > 0) {
        SupportClass::PositivelyDependent
    } else {
        SupportClass::MixedSigns
    };
    Ok(SupportMatrix {
        d,
        columns: columns.to_vec(),
        minors,
        delta,
        kernel: Some(kernel),
        class,
    })
}

/// `ℓ_A = Σ|det A_i| / Δ(A)`: the least ℓ1-norm of a nonzero integer kernel vector.
pub fn ell_of(a: &SupportMatrix) -> Result<u64, SupportError> {
    match a.class {
        SupportClass::PositivelyDependent | SupportClass::MixedSigns => {
            let sum: i128 = a.minors.iter().map(|m| m.abs()).sum();
            Ok((sum / a.delta) as u64)
        }
        other => Err(SupportError::Degenerate(other)),
    }
}

/// Primitive generator of the kernel of the matrix with the given columns,
/// when that kernel is one-dimensional. Works for any number of columns.
pub fn one_dim_kernel(columns: &[LatticeVector]) -> Option<Vec<i128>> {
    let k = columns.len();
    let d = columns.first()?.dim();
    let rows: Vec<Vec<i128>> = (0..d)
        .map(|r| columns.iter().map(|c| c.coords()[r] as i128).collect())
        .collect();
    if k == 0 || rank_i128(&rows) != k - 1 {
        return None;
    }
    // pick k-1 independent rows
    let mut chosen: Vec<Vec<i128>> = Vec::new();
    for row in &rows {
        chosen.push(row.clone());
        if rank_i128(&chosen) < chosen.len() {
            chosen.pop();
        }
        if chosen.len() == k - 1 {
            break;
        }
    }
    let cols: Vec<Vec<i128>> = (0..k)
        .map(|c| chosen.iter().map(|r| r[c]).collect())
        .collect();
    let minors = if k == 1 { vec![1] } else { maximal_minors(&cols) };
    let g = minors.iter().fold(0, |g, &x| gcd(g, x));
    let mut kernel: Vec<i128> = minors
        .iter()
        .enumerate()
        .map(|(i, &m)| if i % 2 == 0 { m / g } else { -m / g })
        .collect();
    if kernel.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        kernel.iter_mut().for_each(|x| *x = -*x);
    }
    Some(kernel)
}
