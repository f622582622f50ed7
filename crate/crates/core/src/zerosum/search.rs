//! Exact Davenport constants of small ground sets by depth-first search.
//!
//! Search space: zero-sum-free multisets `T` over `X \ {0}`, enumerated in
//! non-decreasing element order. Appending `-σ(T)` to such a `T` gives a minimal
//! zero-sum sequence whenever `-σ(T) ∈ X`, and every minimal zero-sum sequence
//! arises this way (delete any one element), so
//! `D(X) = 1 + max{|T| : T zero-sum free, -σ(T) ∈ X}`.
//!
//! The set of nonempty sub-multiset sums of `T` is kept as a bitset; appending
//! `x` is legal iff `-x` is not already a sub-sum.
//!
//! Termination certificate. Every zero-sum sequence of vectors of norm `<= r`
//! in `R^d` can be reordered so all partial sums have norm `<= d r` (Steinitz
//! lemma with the Grinberg–Sevastyanov constant). In such an ordering of a
//! minimal zero-sum sequence of length `N > L`, the first `L` elements form a
//! zero-sum-free multiset whose sum lies in the region `K = d·X`. So if no
//! zero-sum-free multiset of length exactly `L` has its sum in `K`, then
//! `D(X) <= L` and a search capped at `|T| <= L` is exhaustive. The cap is
//! raised until that happens or the budget runs out.
//!
//! Symmetry: when `X` is invariant under signed coordinate permutations, each
//! orbit of multisets has a member whose smallest element `p` is the smallest
//! point of its own orbit and whose other elements `q` all satisfy
//! `orbit_min(q) >= p`; only those members are visited.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::bitset::SumSet;
use super::{ZsError, ZsSequence};
use crate::lattice::{canonical_weighted, orbit_min_point, GroundSet, LatticeVector, NormBall};

type OrbitKey = Vec<(LatticeVector, u64)>;

#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Total DFS nodes across all cap iterations.
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
    /// First length cap tried.
    pub initial_cap: usize,
    /// Give up (with a lower bound) rather than raise the cap past this.
    pub max_cap: usize,
    /// Maximizing orbits kept (the lexicographically smallest ones).
    pub max_orbits: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 20_000_000_000,
            max_time: None,
            initial_cap: 8,
            max_cap: 96,
            max_orbits: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DavenportResult {
    pub value: u64,
    /// Smallest maximizing orbit in canonical form.
    pub witness: ZsSequence,
    pub orbits: Vec<ZsSequence>,
    pub nodes: u64,
    /// Length cap at which the Steinitz certificate closed.
    pub certified_cap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportKResult {
    pub k: usize,
    /// 0 when no minimal zero-sum sequence has a support of size exactly `k`.
    pub value: u64,
    pub witnesses: Vec<ZsSequence>,
    pub nodes: u64,
    pub certified_cap: usize,
}

/// `D(g)` with a canonical witness.
pub fn davenport_exact(g: &GroundSet, budget: &SearchBudget) -> Result<DavenportResult, ZsError> {
    let out = run(g, None, budget)?;
    let Some(witness) = out.orbits.first().cloned() else {
        return Err(ZsError::Unsupported(format!("{g} carries no zero-sum sequence")));
    };
    Ok(DavenportResult {
        value: out.value,
        witness,
        orbits: out.orbits,
        nodes: out.nodes,
        certified_cap: out.cap,
    })
}

/// `D^(k)(g)`: only sequences whose support has exactly `k` elements count.
pub fn davenport_support_k_small(
    g: &GroundSet,
    k: usize,
    budget: &SearchBudget,
) -> Result<SupportKResult, ZsError> {
    if k == 0 {
        return Err(ZsError::InvalidSequence("support size must be positive".into()));
    }
    let out = run(g, Some(k), budget)?;
    Ok(SupportKResult {
        k,
        value: out.value,
        witnesses: out.orbits,
        nodes: out.nodes,
        certified_cap: out.cap,
    })
}

struct RunOutput {
    value: u64,
    orbits: Vec<ZsSequence>,
    nodes: u64,
    cap: usize,
}

fn to_sequence(key: &OrbitKey) -> ZsSequence {
    ZsSequence::from_pairs(key.clone()).expect("canonical orbit keys are valid sequences")
}

fn run(g: &GroundSet, support_k: Option<usize>, budget: &SearchBudget) -> Result<RunOutput, ZsError> {
    let d = g.dim();
    let points: Vec<LatticeVector> = g.enumerate().into_iter().filter(|p| !p.is_zero()).collect();
    let region = g.norm_ball().scaled(d as i64);
    let symmetric = g.is_symmetric();
    let branches: Vec<Vec<LatticeVector>> = points
        .iter()
        .filter(|p| !symmetric || orbit_min_point(p) == **p)
        .map(|p| {
            points
                .iter()
                .filter(|q| *q >= p && (!symmetric || orbit_min_point(q) >= *p))
                .cloned()
                .collect()
        })
        .collect();

    let shared = Shared {
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
        start: Instant::now(),
        budget: budget.clone(),
    };
    let mut cap = budget.initial_cap.clamp(1, budget.max_cap.max(1));
    loop {
        let problem = Problem {
            ground: g,
            d,
            region,
            support_k,
            cap,
            half: vec![cap as i64 * g.linf_radius(); d],
        };
        let outcomes: Vec<BranchOutcome> = branches
            .par_iter()
            .map(|elems| Worker::new(&problem, elems, &shared).run())
            .collect();

        let mut best = 0u64;
        let mut orbits: BTreeSet<OrbitKey> = BTreeSet::new();
        if g.contains(&LatticeVector::zero(d))? && support_k.is_none_or(|k| k == 1) {
            best = 1;
            orbits.insert(vec![(LatticeVector::zero(d), 1)]);
        }
        let mut hit_cap = false;
        for o in outcomes {
            hit_cap |= o.hit_cap;
            if o.best > best {
                best = o.best;
                orbits.clear();
            }
            if o.best == best && best > 0 {
                orbits.extend(o.orbits);
            }
        }
        let orbits: Vec<ZsSequence> = orbits.iter().take(budget.max_orbits).map(to_sequence).collect();
        let nodes = shared.nodes.load(Ordering::Relaxed);
        if shared.abort.load(Ordering::Relaxed) {
            return Err(ZsError::BudgetExceeded {
                lower_bound: best,
                witness: orbits.first().cloned().map(Box::new),
            });
        }
        if !hit_cap {
            return Ok(RunOutput {
                value: best,
                orbits,
                nodes,
                cap,
            });
        }
        if cap >= budget.max_cap {
            return Err(ZsError::BudgetExceeded {
                lower_bound: best,
                witness: orbits.first().cloned().map(Box::new),
            });
        }
        // run cost grows steeply with the cap, so step gently
        cap = (cap + (cap / 6).max(1)).min(budget.max_cap);
    }
}

struct Shared {
    nodes: AtomicU64,
    abort: AtomicBool,
    start: Instant,
    budget: SearchBudget,
}

struct Problem<'a> {
    ground: &'a GroundSet,
    d: usize,
    region: NormBall,
    support_k: Option<usize>,
    cap: usize,
    half: Vec<i64>,
}

#[derive(Default)]
struct BranchOutcome {
    best: u64,
    orbits: BTreeSet<OrbitKey>,
    hit_cap: bool,
}

struct Worker<'a> {
    p: &'a Problem<'a>,
    shared: &'a Shared,
    elems: &'a [LatticeVector],
    neg: Vec<Vec<i64>>,
    offsets: Vec<isize>,
    /// Per-coordinate min / max over `elems[j..]`.
    suffix_min: Vec<Vec<i64>>,
    suffix_max: Vec<Vec<i64>>,
    levels: Vec<SumSet>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    stack: Vec<usize>,
    sigma: Vec<i64>,
    support: usize,
    local_nodes: u64,
    out: BranchOutcome,
}

impl<'a> Worker<'a> {
    fn new(p: &'a Problem<'a>, elems: &'a [LatticeVector], shared: &'a Shared) -> Self {
        let d = p.d;
        let n = elems.len();
        let mut suffix_min = vec![vec![i64::MAX; d]; n + 1];
        let mut suffix_max = vec![vec![i64::MIN; d]; n + 1];
        for j in (0..n).rev() {
            for k in 0..d {
                let c = elems[j].coords()[k];
                suffix_min[j][k] = suffix_min[j + 1][k].min(c);
                suffix_max[j][k] = suffix_max[j + 1][k].max(c);
            }
        }
        let levels: Vec<SumSet> = (0..=p.cap).map(|_| SumSet::new(&p.half)).collect();
        let offsets = elems.iter().map(|e| levels[0].offset(e.coords())).collect();
        Worker {
            p,
            shared,
            elems,
            neg: elems.iter().map(|e| e.neg().into_coords()).collect(),
            offsets,
            suffix_min,
            suffix_max,
            levels,
            lo: vec![0; d],
            hi: vec![0; d],
            stack: Vec::with_capacity(p.cap),
            sigma: vec![0; d],
            support: 0,
            local_nodes: 0,
            out: BranchOutcome::default(),
        }
    }

    fn run(mut self) -> BranchOutcome {
        if !self.elems.is_empty() && !self.shared.abort.load(Ordering::Relaxed) {
            // the branch's first element is forced
            if self.push(0, 0) {
                self.dfs(1, 0);
            }
        }
        self.shared.nodes.fetch_add(self.local_nodes, Ordering::Relaxed);
        self.out
    }

    /// Appends `elems[j]` at depth `depth` if the result stays zero-sum free
    /// and can still reach the Steinitz region. Returns false when rejected.
    fn push(&mut self, depth: usize, j: usize) -> bool {
        let new_support = depth == 0 || self.stack[depth - 1] != j;
        if let Some(k) = self.p.support_k {
            if new_support && self.support == k {
                return false;
            }
        }
        if self.levels[depth].contains(&self.neg[j]) {
            return false;
        }
        let x = self.elems[j].coords();
        let rem = (self.p.cap - depth - 1) as i64;
        let r = self.p.region.linf_radius();
        for k in 0..self.p.d {
            let s = self.sigma[k] + x[k];
            let hi = s + rem * self.suffix_max[j][k].max(0);
            let lo = s + rem * self.suffix_min[j][k].min(0);
            if hi < -r || lo > r {
                return false;
            }
        }
        // Only sub-sums that a later element can still complete to its own
        // negative matter: with `rem` elements left from `elems[j..]`, those
        // lie in the window below, which shrinks along every branch.
        for k in 0..self.p.d {
            let (smin, smax) = (self.suffix_min[j][k], self.suffix_max[j][k]);
            let w = self.p.half[k];
            self.lo[k] = (-smax - rem * smax.max(0)).max(-w);
            self.hi[k] = (-smin - rem * smin.min(0)).min(w);
        }
        let (head, tail) = self.levels.split_at_mut(depth + 1);
        let (cur, next) = (&head[depth], &mut tail[0]);
        next.union_shifted_window(cur, self.offsets[j], &self.lo, &self.hi);
        next.insert(x);
        for (s, c) in self.sigma.iter_mut().zip(x) {
            *s += c;
        }
        self.stack.push(j);
        if new_support {
            self.support += 1;
        }
        true
    }

    fn pop(&mut self) {
        let j = self.stack.pop().unwrap();
        for (s, c) in self.sigma.iter_mut().zip(self.elems[j].coords()) {
            *s -= c;
        }
        if self.stack.last() != Some(&j) {
            self.support -= 1;
        }
    }

    fn tick(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes & 0xFFF == 0 {
            let total = self.shared.nodes.fetch_add(0x1000, Ordering::Relaxed) + 0x1000;
            self.local_nodes -= 0x1000;
            let b = &self.shared.budget;
            if total > b.max_nodes || b.max_time.is_some_and(|t| self.shared.start.elapsed() > t) {
                self.shared.abort.store(true, Ordering::Relaxed);
            }
        }
        !self.shared.abort.load(Ordering::Relaxed)
    }

    fn dfs(&mut self, depth: usize, last: usize) {
        if !self.tick() {
            return;
        }
        self.record_candidate(depth);
        if depth == self.p.cap {
            if self.p.region.contains(&LatticeVector::new(self.sigma.clone())) {
                self.out.hit_cap = true;
            }
            return;
        }
        for j in last..self.elems.len() {
            if self.push(depth, j) {
                self.dfs(depth + 1, j);
                self.pop();
            }
        }
    }

    fn record_candidate(&mut self, depth: usize) {
        let closing = LatticeVector::new(self.sigma.iter().map(|s| -s).collect());
        if !self.p.ground.contains(&closing).unwrap_or(false) {
            return;
        }
        let len = depth as u64 + 1;
        if len < self.out.best {
            return;
        }
        let mut pairs: OrbitKey = Vec::with_capacity(self.support + 1);
        for &j in &self.stack {
            match pairs.last_mut() {
                Some((v, c)) if *v == self.elems[j] => *c += 1,
                _ => pairs.push((self.elems[j].clone(), 1)),
            }
        }
        match pairs.iter_mut().find(|(v, _)| *v == closing) {
            Some((_, c)) => *c += 1,
            None => pairs.push((closing, 1)),
        }
        if self.p.support_k.is_some_and(|k| pairs.len() != k) {
            return;
        }
        if len > self.out.best {
            self.out.best = len;
            self.out.orbits.clear();
        }
        self.out.orbits.insert(canonical_weighted(&pairs));
        if self.out.orbits.len() > self.shared.budget.max_orbits {
            self.out.orbits.pop_last();
        }
    }
}
