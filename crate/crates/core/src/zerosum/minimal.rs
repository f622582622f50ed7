//! Minimality of zero-sum sequences, with certificates that can be re-checked
//! without the search that produced them.
//!
//! Three deciders:
//! * kernel: when the support matrix has a one-dimensional kernel, every
//!   zero-sum sub-multiset is a multiple of its primitive generator, so the
//!   sequence is minimal iff its multiplicities *are* that generator;
//! * exhaustive: remove one element and grow the set of achievable nonempty
//!   sub-multiset sums in a bitset; the sequence is minimal iff 0 never appears;
//! * lattice enumeration: solve for the pivot multiplicities over every
//!   assignment of the free ones inside the multiplicity box.

use serde::Serialize;

use super::bitset::SumSet;
use super::{ZsError, ZsSequence};
use crate::lattice::LatticeVector;
use crate::support::one_dim_kernel;

/// Largest sum box (in bits) the exhaustive decider will allocate.
const EXHAUSTIVE_MAX_BITS: u128 = 1 << 28;
/// Largest number of free-variable assignments the lattice enumeration will visit.
const LATTICE_ENUM_MAX: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    Auto,
    Exhaustive,
    Kernel,
    LatticeEnum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MinimalityCertificate {
    /// The sum is not zero.
    NonZeroSum { sum: LatticeVector },
    /// One-dimensional kernel with primitive generator `kernel`; minimal iff
    /// the multiplicities equal it.
    KernelPrimitive { kernel: Vec<i128> },
    /// Sub-multiset sums of `S` minus one copy of `removed` (there are
    /// `reachable` of them) avoid 0, or contain it when not minimal.
    ExhaustiveSubset { removed: LatticeVector, reachable: u64 },
    /// Every assignment of the free multiplicities was checked; `witness` is a
    /// proper nonempty zero-sum sub-multiset when one exists.
    KernelLatticeEnum {
        free: Vec<usize>,
        visited: u64,
        witness: Option<Vec<u64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityVerdict {
    pub minimal: bool,
    pub certificate: MinimalityCertificate,
}

impl MinimalityCertificate {
    /// Re-derives the verdict this certificate supports for `s` and compares.
    pub fn recheck(&self, s: &ZsSequence, minimal: bool) -> bool {
        let Ok(sum) = s.sum() else { return false };
        match self {
            MinimalityCertificate::NonZeroSum { sum: claimed } => {
                !minimal && !sum.is_zero() && *claimed == sum
            }
            MinimalityCertificate::KernelPrimitive { kernel } => {
                if !sum.is_zero() || one_dim_kernel(s.support()).as_ref() != Some(kernel) {
                    return false;
                }
                let matches = kernel
                    .iter()
                    .zip(s.mults())
                    .all(|(&r, &c)| r >= 0 && r as u128 == c as u128);
                matches == minimal
            }
            MinimalityCertificate::ExhaustiveSubset { removed, .. } => {
                let idx = s.support().iter().position(|v| v == removed);
                match (sum.is_zero(), idx) {
                    (true, Some(i)) => exhaustive_zero_free(s, i) == Some(minimal),
                    _ => false,
                }
            }
            MinimalityCertificate::KernelLatticeEnum { witness, .. } => {
                if !sum.is_zero() {
                    return false;
                }
                match witness {
                    Some(w) => !minimal && is_proper_zero_sum(s, w),
                    None => minimal && lattice_enum(s).is_some_and(|(w, _, _)| w.is_none()),
                }
            }
        }
    }
}

fn is_proper_zero_sum(s: &ZsSequence, counts: &[u64]) -> bool {
    if counts.len() != s.support_size()
        || counts.iter().zip(s.mults()).any(|(k, c)| k > c)
        || counts.iter().all(|&k| k == 0)
        || counts == s.mults()
    {
        return false;
    }
    let d = s.dim();
    (0..d).all(|row| {
        s.support()
            .iter()
            .zip(counts)
            .map(|(v, &k)| v.coords()[row] as i128 * k as i128)
            .sum::<i128>()
            == 0
    })
}

/// Decides whether `s` is a minimal zero-sum sequence.
pub fn is_minimal_zero_sum(
    s: &ZsSequence,
    strategy: Strategy,
) -> Result<MinimalityVerdict, ZsError> {
    let sum = s.sum()?;
    if !sum.is_zero() {
        return Ok(MinimalityVerdict {
            minimal: false,
            certificate: MinimalityCertificate::NonZeroSum { sum },
        });
    }
    match strategy {
        Strategy::Kernel => by_kernel(s).ok_or(ZsError::StrategyNotApplicable(strategy)),
        Strategy::Exhaustive => by_exhaustive(s).ok_or(ZsError::StrategyNotApplicable(strategy)),
        Strategy::LatticeEnum => by_lattice(s).ok_or(ZsError::StrategyNotApplicable(strategy)),
        Strategy::Auto => by_kernel(s)
            .or_else(|| by_exhaustive(s))
            .or_else(|| by_lattice(s))
            .ok_or_else(|| {
                ZsError::Undecided(format!(
                    "support of size {} has kernel dimension >= 2 and the multiplicity box is too large",
                    s.support_size()
                ))
            }),
    }
}

fn by_kernel(s: &ZsSequence) -> Option<MinimalityVerdict> {
    let kernel = one_dim_kernel(s.support())?;
    // s is zero-sum with positive multiplicities, so mults = t * kernel, t >= 1
    let minimal = kernel
        .iter()
        .zip(s.mults())
        .all(|(&r, &c)| r as u128 == c as u128);
    Some(MinimalityVerdict {
        minimal,
        certificate: MinimalityCertificate::KernelPrimitive { kernel },
    })
}

fn by_exhaustive(s: &ZsSequence) -> Option<MinimalityVerdict> {
    let half = sum_box(s);
    if SumSet::capacity(&half)? > EXHAUSTIVE_MAX_BITS {
        return None;
    }
    let (minimal, reachable) = exhaustive_run(s, 0);
    Some(MinimalityVerdict {
        minimal,
        certificate: MinimalityCertificate::ExhaustiveSubset {
            removed: s.support()[0].clone(),
            reachable,
        },
    })
}

fn sum_box(s: &ZsSequence) -> Vec<i64> {
    (0..s.dim())
        .map(|k| {
            s.support()
                .iter()
                .zip(s.mults())
                .map(|(v, &c)| v.coords()[k].abs() * c as i64)
                .sum()
        })
        .collect()
}

fn exhaustive_zero_free(s: &ZsSequence, removed: usize) -> Option<bool> {
    let half = sum_box(s);
    if SumSet::capacity(&half)? > EXHAUSTIVE_MAX_BITS {
        return None;
    }
    Some(exhaustive_run(s, removed).0)
}

/// Whether `s` minus one copy of `support[removed]` is zero-sum free, and the
/// number of distinct nonempty sub-multiset sums it has.
fn exhaustive_run(s: &ZsSequence, removed: usize) -> (bool, u64) {
    let half = sum_box(s);
    let mut cur = SumSet::new(&half);
    let mut next = SumSet::new(&half);
    let zero = vec![0i64; s.dim()];
    for (i, (v, &c)) in s.support().iter().zip(s.mults()).enumerate() {
        let copies = if i == removed { c - 1 } else { c };
        let neg: Vec<i64> = v.coords().iter().map(|x| -x).collect();
        let off = cur.offset(v.coords());
        for _ in 0..copies {
            if v.is_zero() || cur.contains(&neg) {
                return (false, cur.count());
            }
            next.copy_from(&cur);
            next.or_shifted(&cur, off);
            next.insert(v.coords());
            std::mem::swap(&mut cur, &mut next);
        }
    }
    debug_assert!(!cur.contains(&zero));
    (true, cur.count())
}

fn by_lattice(s: &ZsSequence) -> Option<MinimalityVerdict> {
    let (witness, free, visited) = lattice_enum(s)?;
    Some(MinimalityVerdict {
        minimal: witness.is_none(),
        certificate: MinimalityCertificate::KernelLatticeEnum {
            free,
            visited,
            witness,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Q {
    n: i128,
    d: i128,
}

impl Q {
    fn new(n: i128, d: i128) -> Q {
        let g = crate::primes::gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Q {
            n: s * n / g,
            d: s * d / g,
        }
    }
    fn int(n: i128) -> Q {
        Q { n, d: 1 }
    }
    fn sub(self, o: Q) -> Q {
        Q::new(self.n * o.d - o.n * self.d, self.d * o.d)
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.n * o.n, self.d * o.d)
    }
    fn div(self, o: Q) -> Q {
        Q::new(self.n * o.d, self.d * o.n)
    }
}

/// Enumerates the kernel inside the multiplicity box by free variables.
/// Returns `(witness, free columns, assignments visited)`, or `None` when the
/// box is over budget.
fn lattice_enum(s: &ZsSequence) -> Option<(Option<Vec<u64>>, Vec<usize>, u64)> {
    let k = s.support_size();
    let d = s.dim();
    let mut rows: Vec<Vec<Q>> = (0..d)
        .map(|r| s.support().iter().map(|v| Q::int(v.coords()[r] as i128)).collect())
        .collect();
    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..d).find(|&i| rows[i][c].n != 0) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c];
        for j in 0..k {
            rows[r][j] = rows[r][j].div(lead);
        }
        for i in 0..d {
            if i != r && rows[i][c].n != 0 {
                let f = rows[i][c];
                for j in 0..k {
                    rows[i][j] = rows[i][j].sub(f.mul(rows[r][j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == d {
            break;
        }
    }
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    let total = free
        .iter()
        .try_fold(1u128, |acc, &f| acc.checked_mul(s.mults()[f] as u128 + 1))?;
    if total > LATTICE_ENUM_MAX {
        return None;
    }
    let mults = s.mults();
    let mut assign = vec![0u64; free.len()];
    let mut visited = 0u64;
    loop {
        visited += 1;
        let mut counts = vec![0u64; k];
        for (&f, &a) in free.iter().zip(&assign) {
            counts[f] = a;
        }
        let mut ok = true;
        for (row, &p) in pivots.iter().enumerate() {
            // x_p = -sum_f R[row][f] x_f
            let mut val = Q::int(0);
            for (&f, &a) in free.iter().zip(&assign) {
                val = val.sub(rows[row][f].mul(Q::int(a as i128)));
            }
            if val.d != 1 || val.n < 0 || val.n > mults[p] as i128 {
                ok = false;
                break;
            }
            counts[p] = val.n as u64;
        }
        if ok && counts.iter().any(|&c| c > 0) && counts != mults {
            return Some((Some(counts), free, visited));
        }
        // odometer over the free box
        let mut i = 0;
        loop {
            if i == free.len() {
                return Some((None, free, visited));
            }
            if assign[i] < mults[free[i]] {
                assign[i] += 1;
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Strategy;
    use proptest::prelude::*;

    fn seq(pairs: &[(&[i64], u64)]) -> ZsSequence {
        ZsSequence::new(
            pairs.iter().map(|(v, _)| LatticeVector::new(v.to_vec())).collect(),
            pairs.iter().map(|(_, k)| *k).collect(),
        )
        .unwrap()
    }

    fn all_strategies(s: &ZsSequence) -> Vec<MinimalityVerdict> {
        [Strategy::Kernel, Strategy::Exhaustive, Strategy::LatticeEnum]
            .into_iter()
            .filter_map(|st| is_minimal_zero_sum(s, st).ok())
            .collect()
    }

    #[test]
    fn u_minus_u() {
        let s = seq(&[(&[2, -1], 1), (&[-2, 1], 1)]);
        for v in all_strategies(&s) {
            assert!(v.minimal);
            assert!(v.certificate.recheck(&s, true));
        }
    }

    #[test]
    fn s1_of_5() {
        let s = seq(&[(&[0, 5], 18), (&[-4, -2], 15), (&[3, -3], 20)]);
        assert_eq!(s.len(), 53);
        let v = is_minimal_zero_sum(&s, Strategy::Auto).unwrap();
        assert!(v.minimal);
        assert!(matches!(v.certificate, MinimalityCertificate::KernelPrimitive { .. }));
        let e = is_minimal_zero_sum(&s, Strategy::Exhaustive).unwrap();
        assert!(e.minimal);
        assert!(e.certificate.recheck(&s, true));
    }

    #[test]
    fn doubled_pair_is_not_minimal() {
        let s = seq(&[(&[1, 0], 2), (&[-1, 0], 2)]);
        let verdicts = all_strategies(&s);
        assert_eq!(verdicts.len(), 3);
        for v in verdicts {
            assert!(!v.minimal);
            assert!(v.certificate.recheck(&s, false));
            assert!(!v.certificate.recheck(&s, true));
        }
    }

    #[test]
    fn nonzero_sum_is_not_minimal() {
        let s = seq(&[(&[1, 0], 1)]);
        let v = is_minimal_zero_sum(&s, Strategy::Auto).unwrap();
        assert!(!v.minimal);
        assert!(v.certificate.recheck(&s, false));
    }

    #[test]
    fn kernel_rank_two_needs_other_strategy() {
        // four vectors in the plane: kernel of dimension 2
        let s = seq(&[(&[1, 0], 1), (&[0, 1], 1), (&[-1, 0], 1), (&[0, -1], 1)]);
        assert!(matches!(
            is_minimal_zero_sum(&s, Strategy::Kernel),
            Err(ZsError::StrategyNotApplicable(Strategy::Kernel))
        ));
        let v = is_minimal_zero_sum(&s, Strategy::Auto).unwrap();
        assert!(!v.minimal);
        let l = is_minimal_zero_sum(&s, Strategy::LatticeEnum).unwrap();
        assert!(!l.minimal);
        assert!(l.certificate.recheck(&s, false));
        // five vectors containing the pair (1,0), (-1,0)
        let m = seq(&[(&[2, 1], 1), (&[-1, 1], 1), (&[-1, -2], 1), (&[1, 0], 1), (&[-1, 0], 1)]);
        assert!(!is_minimal_zero_sum(&m, Strategy::LatticeEnum).unwrap().minimal);
        let m2 = seq(&[(&[2, 1], 1), (&[-1, 1], 1), (&[0, -1], 1), (&[-1, -1], 1)]);
        let v2 = is_minimal_zero_sum(&m2, Strategy::LatticeEnum).unwrap();
        let e2 = is_minimal_zero_sum(&m2, Strategy::Exhaustive).unwrap();
        assert_eq!(v2.minimal, e2.minimal);
    }

    /// Brute force over all count vectors in the multiplicity box.
    fn brute_minimal(s: &ZsSequence) -> bool {
        if !s.is_zero_sum().unwrap() {
            return false;
        }
        let mults = s.mults();
        let mut counts = vec![0u64; mults.len()];
        loop {
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return true;
                }
                if counts[i] < mults[i] {
                    counts[i] += 1;
                    break;
                }
                counts[i] = 0;
                i += 1;
            }
            if is_proper_zero_sum(s, &counts) {
                return false;
            }
        }
    }

    proptest! {
        #[test]
        fn strategies_agree(
            cols in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 2), 3),
            scale in 1u64..=2,
        ) {
            let support: Vec<_> = cols.into_iter().map(LatticeVector::new).collect();
            let Ok(a) = crate::support::analyze(&support) else { return Ok(()); };
            let Some(mults) = a.multiplicities() else { return Ok(()); };
            let mults: Vec<u64> = mults.iter().map(|m| m * scale).collect();
            let s = ZsSequence::new(support, mults).unwrap();
            let verdicts = all_strategies(&s);
            prop_assert!(!verdicts.is_empty());
            for v in &verdicts {
                prop_assert_eq!(v.minimal, scale == 1);
                prop_assert!(v.certificate.recheck(&s, v.minimal));
            }
        }

        #[test]
        fn strategies_match_brute_force_3d(
            pts in proptest::collection::btree_map(
                proptest::collection::vec(-2i64..=2, 3), 1u64..=3, 2..5)
        ) {
            let mut pairs: Vec<_> = pts.into_iter().map(|(v, k)| (LatticeVector::new(v), k)).collect();
            // complete to a zero-sum sequence when the negated sum is small
            let partial = ZsSequence::from_pairs(pairs.clone()).unwrap();
            let neg = partial.sum().unwrap().neg();
            if neg.is_zero() || neg.linf() > 2 { return Ok(()); }
            match pairs.iter_mut().find(|(v, _)| *v == neg) {
                Some(p) => p.1 += 1,
                None => pairs.push((neg, 1)),
            }
            let s = ZsSequence::from_pairs(pairs).unwrap();
            let expect = brute_minimal(&s);
            for v in all_strategies(&s) {
                prop_assert_eq!(v.minimal, expect);
            }
            prop_assert_eq!(is_minimal_zero_sum(&s, Strategy::Auto).unwrap().minimal, expect);
        }
    }
}
