//! Small-prime utilities: `q(m)` (the least prime not dividing `m`), the largest
//! prime below a bound, and a scan checking `q(m) <= 1 + 4 ln m`.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_SIEVE_LIMIT: u64 = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrimeError {
    #[error("argument {0} is below the admissible minimum {1}")]
    TooSmall(u64, u64),
}

/// Sieve of Eratosthenes up to `limit`; queries beyond fall back to trial division.
#[derive(Clone, Debug)]
pub struct PrimeCache {
    limit: u64,
    is_prime: Vec<bool>,
}

impl PrimeCache {
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(2);
        let n = limit as usize;
        let mut is_prime = vec![true; n + 1];
        is_prime[0] = false;
        is_prime[1] = false;
        let mut i = 2;
        while i * i <= n {
            if is_prime[i] {
                for j in (i * i..=n).step_by(i) {
                    is_prime[j] = false;
                }
            }
            i += 1;
        }
        PrimeCache { limit, is_prime }
    }

    /// Process-wide cache with the default limit.
    pub fn global() -> &'static PrimeCache {
        static CACHE: OnceLock<PrimeCache> = OnceLock::new();
        CACHE.get_or_init(|| PrimeCache::new(DEFAULT_SIEVE_LIMIT))
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit {
            self.is_prime[n as usize]
        } else {
            is_prime_trial(n)
        }
    }

    /// Smallest prime not dividing `m`.
    pub fn q_of(&self, m: u64) -> Result<u64, PrimeError> {
        if m < 2 {
            return Err(PrimeError::TooSmall(m, 2));
        }
        let mut p = 2;
        loop {
            if self.is_prime(p) && !m.is_multiple_of(p) {
                return Ok(p);
            }
            p += 1;
        }
    }

    pub fn largest_prime_leq(&self, x: u64) -> Result<u64, PrimeError> {
        if x < 2 {
            return Err(PrimeError::TooSmall(x, 2));
        }
        let mut p = x;
        while !self.is_prime(p) {
            p -= 1;
        }
        Ok(p)
    }

    /// Largest prime `p` with `pred(p)`, searching downward from `start`.
    /// `pred` must be monotone (true for all small enough `p`).
    pub fn largest_prime_where(&self, start: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
        let mut p = start;
        while p >= 2 {
            if pred(p) && self.is_prime(p) {
                return Some(p);
            }
            p -= 1;
        }
        None
    }

    /// Checks `q(m) <= 1 + 4 ln m` and `q(m) < m` for `3 <= m <= m_max`.
    pub fn check_lemma_qq(&self, m_max: u64) -> LemmaQqReport {
        let mut report = LemmaQqReport {
            m_max,
            checked: 0,
            max_q: 0,
            max_q_at: 0,
            min_slack: f64::INFINITY,
            min_slack_at: 0,
            first_violation: None,
        };
        for m in 3..=m_max {
            let q = self.q_of(m).expect("m >= 3");
            let slack = 1.0 + 4.0 * (m as f64).ln() + 1e-9 - q as f64;
            report.checked += 1;
            if q > report.max_q {
                report.max_q = q;
                report.max_q_at = m;
            }
            if slack < report.min_slack {
                report.min_slack = slack;
                report.min_slack_at = m;
            }
            if report.first_violation.is_none() && (slack < 0.0 || q >= m) {
                report.first_violation = Some(m);
            }
        }
        report
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaQqReport {
    pub m_max: u64,
    pub checked: u64,
    pub max_q: u64,
    pub max_q_at: u64,
    /// Smallest value of `1 + 4 ln m - q(m)` over the range.
    pub min_slack: f64,
    pub min_slack_at: u64,
    pub first_violation: Option<u64>,
}

impl LemmaQqReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn q_of(m: u64) -> Result<u64, PrimeError> {
    PrimeCache::global().q_of(m)
}

pub fn largest_prime_leq(x: u64) -> Result<u64, PrimeError> {
    PrimeCache::global().largest_prime_leq(x)
}

pub fn check_lemma_qq(m_max: u64) -> LemmaQqReport {
    PrimeCache::global().check_lemma_qq(m_max)
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
