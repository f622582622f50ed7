//! `D^(d+1)` by enumerating every `(d+1)`-subset of the nonzero ground points.
//!
//! A subset of full rank with all maximal minors nonzero carries at most one
//! minimal zero-sum sequence using every element: the kernel is spanned by the
//! primitive Cramer vector, so the sequence exists iff that vector is one-signed,
//! and its length is `ℓ_A`. If some minor vanishes while the rank is `d`, the
//! kernel vector has a zero entry and no sequence uses the whole subset.
//!
//! Rank-deficient subsets are not enumerated further. A zero-sum sequence
//! spanning an `r`-dimensional subspace can be ordered with partial sums in
//! `r·conv(X)` (Steinitz), those partial sums are pairwise distinct when the
//! sequence is minimal, and the subspace projects injectively onto some `r`
//! coordinates, so its length is at most `(2 r M + 1)^r` with `M` the
//! sup-norm radius of the ground set. The result is flagged certified when
//! the maximum found beats that bound (or no rank-deficient subset exists).

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{analyze, ell_of, SupportClass, SupportError};
use crate::lattice::{canonical_weighted, orbit_min_point, GroundSet, LatticeVector};
use crate::linalg::rank_i128;
use crate::primes::{gcd, q_of};

#[derive(Clone, Debug)]
pub struct Dp1Options {
    /// Refuse ground sets with more nonzero points than this.
    pub max_points: usize,
    /// Keep at most this many maximizing orbits.
    pub max_orbits: usize,
}

impl Default for Dp1Options {
    fn default() -> Self {
        Dp1Options {
            max_points: 6000,
            max_orbits: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SupportOrbit {
    pub support: Vec<LatticeVector>,
    pub mults: Vec<u64>,
}

impl SupportOrbit {
    fn from_key(key: &[(LatticeVector, u64)]) -> Self {
        SupportOrbit {
            support: key.iter().map(|(v, _)| v.clone()).collect(),
            mults: key.iter().map(|(_, k)| *k).collect(),
        }
    }

    pub fn len(&self) -> u64 {
        self.mults.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Dp1Result {
    /// 0 when no subset is positively dependent.
    pub value: u64,
    /// Canonical maximizing orbits, sorted.
    pub orbits: Vec<SupportOrbit>,
    pub truncated: bool,
    /// Length bound covering rank-deficient subsets, when any were met.
    pub degenerate_bound: Option<u64>,
    pub certified: bool,
    /// Subsets examined (after symmetry reduction).
    pub examined: u64,
}

type Key = Vec<(LatticeVector, u64)>;

#[derive(Default)]
struct Partial {
    best: u64,
    keys: BTreeSet<Key>,
    truncated: bool,
    min_deficient_rank: Option<usize>,
    max_deficient_rank: usize,
    examined: u64,
}

impl Partial {
    fn offer(&mut self, len: u64, cols: &[&LatticeVector], mults: &[u64], cap: usize) {
        if len < self.best {
            return;
        }
        if len > self.best {
            self.best = len;
            self.keys.clear();
            self.truncated = false;
        }
        let pairs: Key = cols.iter().map(|c| (*c).clone()).zip(mults.iter().copied()).collect();
        self.keys.insert(canonical_weighted(&pairs));
        if self.keys.len() > cap {
            self.keys.pop_last();
            self.truncated = true;
        }
    }

    fn deficient(&mut self, rank: usize) {
        self.max_deficient_rank = self.max_deficient_rank.max(rank);
        self.min_deficient_rank = Some(self.min_deficient_rank.map_or(rank, |r| r.min(rank)));
    }

    fn merge(mut self, other: Partial, cap: usize) -> Partial {
        if other.best > self.best {
            self.best = other.best;
            self.keys = other.keys;
            self.truncated = other.truncated;
        } else if other.best == self.best {
            self.keys.extend(other.keys);
            self.truncated |= other.truncated;
        }
        while self.keys.len() > cap {
            self.keys.pop_last();
            self.truncated = true;
        }
        self.max_deficient_rank = self.max_deficient_rank.max(other.max_deficient_rank);
        self.min_deficient_rank = match (self.min_deficient_rank, other.min_deficient_rank) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.examined += other.examined;
        self
    }
}

fn det2(a: &LatticeVector, b: &LatticeVector) -> i128 {
    let (a, b) = (a.coords(), b.coords());
    a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
}

/// Rank of a set of vectors.
fn rank_of(cols: &[&LatticeVector]) -> usize {
    let rows: Vec<Vec<i128>> = cols
        .iter()
        .map(|c| c.coords().iter().map(|&x| x as i128).collect())
        .collect();
    rank_i128(&rows)
}

/// `D^(d+1)(g)` with all maximizing orbits (support and multiplicities).
pub fn davenport_support_dp1(g: &GroundSet, opts: &Dp1Options) -> Result<Dp1Result, SupportError> {
    let d = g.dim();
    let points: Vec<LatticeVector> = g.enumerate().into_iter().filter(|p| !p.is_zero()).collect();
    if points.len() > opts.max_points {
        return Err(SupportError::TooLarge {
            points: points.len(),
            budget: opts.max_points,
        });
    }
    let symmetric = g.is_symmetric();
    let firsts: Vec<usize> = (0..points.len())
        .filter(|&i| !symmetric || orbit_min_point(&points[i]) == points[i])
        .collect();
    let cap = opts.max_orbits;

    let total = firsts
        .par_iter()
        .map(|&i| {
            let p = &points[i];
            let rest: Vec<&LatticeVector> = points[i + 1..]
                .iter()
                .filter(|q| !symmetric || orbit_min_point(q) >= *p)
                .collect();
            let mut part = Partial::default();
            if d == 2 {
                planar_branch(p, &rest, &mut part, cap);
            } else {
                let mut chosen = vec![p];
                generic_branch(&rest, 0, d, &mut chosen, &mut part, cap);
            }
            part
        })
        .reduce(Partial::default, |a, b| a.merge(b, cap));

    let m = g.linf_radius() as u64;
    let degenerate_bound = total.min_deficient_rank.map(|_| {
        (1..=total.max_deficient_rank)
            .map(|r| (2 * r as u64 * m + 1).pow(r as u32))
            .max()
            .unwrap_or(0)
    });
    let certified = degenerate_bound.is_none_or(|b| total.best > b);
    Ok(Dp1Result {
        value: total.best,
        orbits: total.keys.iter().map(|k| SupportOrbit::from_key(k)).collect(),
        truncated: total.truncated,
        degenerate_bound,
        certified,
        examined: total.examined,
    })
}

fn planar_branch(p: &LatticeVector, rest: &[&LatticeVector], part: &mut Partial, cap: usize) {
    for (j, q) in rest.iter().enumerate() {
        let m2 = det2(p, q);
        for r in &rest[j + 1..] {
            part.examined += 1;
            let m0 = det2(q, r);
            let m1 = det2(p, r);
            // kernel (m0, -m1, m2) up to scale
            let k = [m0, -m1, m2];
            if k.contains(&0) {
                if k.iter().all(|&x| x == 0) {
                    part.deficient(1);
                }
                continue;
            }
            let pos = k.iter().all(|&x| x > 0);
            if !pos && !k.iter().all(|&x| x < 0) {
                continue;
            }
            let delta = gcd(gcd(m0, m1), m2);
            let len = ((m0.abs() + m1.abs() + m2.abs()) / delta) as u64;
            if len >= part.best {
                let mults: Vec<u64> = k.iter().map(|x| (x.abs() / delta) as u64).collect();
                part.offer(len, &[p, q, r], &mults, cap);
            }
        }
    }
}

fn generic_branch<'a>(
    rest: &[&'a LatticeVector],
    from: usize,
    d: usize,
    chosen: &mut Vec<&'a LatticeVector>,
    part: &mut Partial,
    cap: usize,
) {
    if chosen.len() == d + 1 {
        part.examined += 1;
        let cols: Vec<LatticeVector> = chosen.iter().map(|c| (*c).clone()).collect();
        let a = analyze(&cols).expect("shape is d+1 columns");
        match a.class {
            SupportClass::PositivelyDependent => {
                let len = ell_of(&a).expect("nondegenerate");
                let mults = a.multiplicities().expect("positively dependent");
                part.offer(len, chosen, &mults, cap);
            }
            SupportClass::RankDeficient => {
                part.deficient(rank_of(chosen));
            }
            _ => {}
        }
        return;
    }
    for i in from..rest.len() {
        chosen.push(rest[i]);
        generic_branch(rest, i + 1, d, chosen, part, cap);
        chosen.pop();
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub m: u64,
    pub value: u64,
    pub formula_value: u64,
    pub expected: SupportOrbit,
    pub orbits: Vec<SupportOrbit>,
    pub unique: bool,
    pub matches: bool,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.unique && self.matches && self.value == self.formula_value
    }
}

/// Compares the maximizing orbits of `D^(3)` over the square box of radius `m`
/// with the orbit of the explicit sequence `S(m)`.
pub fn theorem3_uniqueness_check(m: u64) -> Result<UniquenessReport, SupportError> {
    let g = GroundSet::cube(m as i64, 2);
    let r = davenport_support_dp1(&g, &Dp1Options::default())?;
    let s = crate::constructions::box2_s(m as i64)
        .expect("m >= 2")
        .sequence;
    let expected = SupportOrbit::from_key(&s.canonical());
    let formula_value = 4 * m * m - q_of(m).expect("m >= 2");
    Ok(UniquenessReport {
        m,
        value: r.value,
        formula_value,
        unique: r.orbits.len() == 1 && !r.truncated,
        matches: r.orbits.first() == Some(&expected),
        expected,
        orbits: r.orbits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zerosum::{davenport_support_k_small, is_minimal_zero_sum, SearchBudget, Strategy, ZsSequence};

    #[test]
    fn small_boxes() {
        let r = davenport_support_dp1(&GroundSet::cube(2, 2), &Dp1Options::default()).unwrap();
        assert_eq!(r.value, 13);
        assert_eq!(r.orbits.len(), 1);
        assert!(r.certified);
        for m in 3..=5i64 {
            let r = davenport_support_dp1(&GroundSet::cube(m, 2), &Dp1Options::default()).unwrap();
            assert_eq!(r.value, 4 * (m * m) as u64 - q_of(m as u64).unwrap(), "m={m}");
        }
    }

    #[test]
    fn agrees_with_dfs_on_small_sets() {
        let sets = [
            GroundSet::cube(1, 2),
            GroundSet::cube(2, 2),
            GroundSet::ball(2, 2),
            // Δ = 2 and Δ = 4 supports
            GroundSet::explicit(
                [[2i64, 0], [0, 2], [-2, -2], [1, 1], [-1, 0], [2, -2]]
                    .into_iter()
                    .map(LatticeVector::from)
                    .collect(),
            )
            .unwrap(),
            GroundSet::explicit(
                [[2i64, 0], [0, 1], [-2, -1], [-1, -1], [3, 1]]
                    .into_iter()
                    .map(LatticeVector::from)
                    .collect(),
            )
            .unwrap(),
        ];
        let budget = SearchBudget::default();
        for g in &sets {
            let dp1 = davenport_support_dp1(g, &Dp1Options::default()).unwrap();
            let dfs = davenport_support_k_small(g, g.dim() + 1, &budget).unwrap();
            assert_eq!(dp1.value, dfs.value, "{g}");
            let mut a: Vec<_> = dp1.orbits.iter().map(|o| (o.support.clone(), o.mults.clone())).collect();
            let mut b: Vec<_> = dfs
                .witnesses
                .iter()
                .map(|w| {
                    let c = w.canonical();
                    (c.iter().map(|x| x.0.clone()).collect(), c.iter().map(|x| x.1).collect())
                })
                .collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "{g}");
        }
    }

    #[test]
    fn orbits_are_minimal() {
        let r = davenport_support_dp1(&GroundSet::ball(4, 2), &Dp1Options::default()).unwrap();
        for o in &r.orbits {
            let s = ZsSequence::new(o.support.clone(), o.mults.clone()).unwrap();
            assert_eq!(s.len(), r.value);
            assert!(is_minimal_zero_sum(&s, Strategy::Kernel).unwrap().minimal);
        }
    }

    #[test]
    fn rank_deficient_sets_are_bounded() {
        // a purely one-dimensional ground set: every triple is rank deficient
        let g = GroundSet::explicit(
            (-3i64..=3).filter(|&x| x != 0).map(|x| LatticeVector::from([x, 0])).collect(),
        )
        .unwrap();
        let r = davenport_support_dp1(&g, &Dp1Options::default()).unwrap();
        assert_eq!(r.value, 0);
        assert_eq!(r.degenerate_bound, Some(7));
        assert!(!r.certified);
    }

    #[test]
    fn uniqueness_small() {
        let r = theorem3_uniqueness_check(2).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.value, 13);
        let mut mults = r.expected.mults.clone();
        mults.sort();
        assert_eq!(mults, vec![2, 5, 6]);
    }

    #[test]
    fn too_large_is_refused() {
        let opts = Dp1Options {
            max_points: 10,
            ..Dp1Options::default()
        };
        assert!(matches!(
            davenport_support_dp1(&GroundSet::cube(2, 2), &opts),
            Err(SupportError::TooLarge { points: 24, .. })
        ));
    }
}
