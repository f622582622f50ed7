//! Sequences over `Z^d` (multisets stored as support + multiplicities), the
//! zero-sum and minimality predicates, and exact Davenport-constant search.

mod bitset;
mod minimal;
mod search;

pub use bitset::SumSet;
pub use minimal::{is_minimal_zero_sum, MinimalityCertificate, MinimalityVerdict, Strategy};
pub use search::{
    davenport_exact, davenport_support_k_small, DavenportResult, SearchBudget, SupportKResult,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{canonical_weighted, LatticeError, LatticeVector};

#[derive(Debug, Error)]
pub enum ZsError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("strategy `{0:?}` does not apply to this sequence")]
    StrategyNotApplicable(Strategy),
    #[error("minimality undecided: {0}")]
    Undecided(String),
    #[error("search budget exceeded; verified lower bound {lower_bound}")]
    BudgetExceeded {
        lower_bound: u64,
        witness: Option<Box<ZsSequence>>,
    },
    #[error("unsupported ground set: {0}")]
    Unsupported(String),
}

/// A finite multiset of lattice vectors.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZsSequence {
    support: Vec<LatticeVector>,
    mults: Vec<u64>,
}

impl ZsSequence {
    pub fn new(support: Vec<LatticeVector>, mults: Vec<u64>) -> Result<Self, ZsError> {
        if support.len() != mults.len() {
            return Err(ZsError::InvalidSequence(format!(
                "{} support vectors but {} multiplicities",
                support.len(),
                mults.len()
            )));
        }
        if support.is_empty() {
            return Err(ZsError::InvalidSequence("empty sequence".into()));
        }
        if mults.contains(&0) {
            return Err(ZsError::InvalidSequence("multiplicities must be positive".into()));
        }
        let d = support[0].dim();
        if let Some(bad) = support.iter().find(|v| v.dim() != d) {
            return Err(LatticeError::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            }
            .into());
        }
        let mut sorted: Vec<&LatticeVector> = support.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ZsError::InvalidSequence("support vectors must be distinct".into()));
        }
        Ok(ZsSequence { support, mults })
    }

    /// Builds a sequence from its elements, merging repeats. The support is sorted.
    pub fn from_elements<I: IntoIterator<Item = LatticeVector>>(elems: I) -> Result<Self, ZsError> {
        let mut counts: BTreeMap<LatticeVector, u64> = BTreeMap::new();
        for e in elems {
            *counts.entry(e).or_default() += 1;
        }
        let (support, mults) = counts.into_iter().unzip();
        ZsSequence::new(support, mults)
    }

    pub fn from_pairs(pairs: Vec<(LatticeVector, u64)>) -> Result<Self, ZsError> {
        let (support, mults) = pairs.into_iter().unzip();
        ZsSequence::new(support, mults)
    }

    pub fn support(&self) -> &[LatticeVector] {
        &self.support
    }

    pub fn mults(&self) -> &[u64] {
        &self.mults
    }

    pub fn dim(&self) -> usize {
        self.support[0].dim()
    }

    /// Total multiplicity `‖S‖`.
    pub fn len(&self) -> u64 {
        self.mults.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn pairs(&self) -> Vec<(LatticeVector, u64)> {
        self.support.iter().cloned().zip(self.mults.iter().copied()).collect()
    }

    /// Canonical form under signed coordinate permutations and reordering.
    pub fn canonical(&self) -> Vec<(LatticeVector, u64)> {
        canonical_weighted(&self.pairs())
    }

    pub fn sum(&self) -> Result<LatticeVector, ZsError> {
        let d = self.dim();
        let mut acc = vec![0i64; d];
        for (v, &k) in self.support.iter().zip(&self.mults) {
            let k = i64::try_from(k).map_err(|_| LatticeError::Overflow)?;
            for (a, &c) in acc.iter_mut().zip(v.coords()) {
                *a = c
                    .checked_mul(k)
                    .and_then(|x| a.checked_add(x))
                    .ok_or(LatticeError::Overflow)?;
            }
        }
        Ok(LatticeVector::new(acc))
    }

    pub fn is_zero_sum(&self) -> Result<bool, ZsError> {
        Ok(self.sum()?.is_zero())
    }

    /// Text form: a `d k` header, then one `c1 ... cd : mult` line per support vector.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.dim(), self.support.len());
        for (v, k) in self.support.iter().zip(&self.mults) {
            let coords: Vec<String> = v.coords().iter().map(i64::to_string).collect();
            s.push_str(&format!("{} : {}\n", coords.join(" "), k));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self, ZsError> {
        let bad = |msg: String| ZsError::from(LatticeError::Parse(msg));
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad header `{header}`"))))
            .collect::<Result<_, _>>()?;
        let [d, k] = nums[..] else {
            return Err(bad(format!("header must be `d k`, got `{header}`")));
        };
        let mut support = Vec::with_capacity(k);
        let mut mults = Vec::with_capacity(k);
        for _ in 0..k {
            let line = lines.next().ok_or_else(|| bad("fewer lines than announced".into()))?;
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| bad(format!("missing `:` in `{line}`")))?;
            let coords: Vec<i64> = lhs
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(format!("bad coordinate `{t}`"))))
                .collect::<Result<_, _>>()?;
            if coords.len() != d {
                return Err(LatticeError::DimensionMismatch {
                    expected: d,
                    found: coords.len(),
                }
                .into());
            }
            let mult: u64 = rhs
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad multiplicity `{rhs}`")))?;
            support.push(LatticeVector::new(coords));
            mults.push(mult);
        }
        if lines.next().is_some() {
            return Err(bad("more lines than announced".into()));
        }
        ZsSequence::new(support, mults)
    }
}

impl FromStr for ZsSequence {
    type Err = ZsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ZsSequence::parse_text(s)
    }
}

impl fmt::Debug for ZsSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (v, k)) in self.support.iter().zip(&self.mults).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}x{k}")?;
        }
        write!(f, "]")
    }
}

/// Exact sum of all elements of `s`, counted with multiplicity.
pub fn sequence_sum(s: &ZsSequence) -> Result<LatticeVector, ZsError> {
    s.sum()
}
