//! Rejection sampling of `[H_0 | H_1]` keys whose certified failure bound
//! is below a target.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::dfr::{qc_analyzer, BoundReport};
use crate::code::build_qc2;
use crate::decoder::Thresholds;
use crate::error::{Error, Result};
use crate::montecarlo::trial_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdStrategy {
    Fixed(u64),
    Optimize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeygenPolicy {
    pub p: usize,
    pub v: usize,
    pub t: u64,
    /// Accept iff the bound is strictly below `2^target_log2`.
    pub target_log2: i64,
    pub max_attempts: u64,
    pub seed: u64,
    pub strategy: ThresholdStrategy,
    /// Worker threads; `0` uses the global pool.
    #[serde(default)]
    pub workers: usize,
}

impl KeygenPolicy {
    pub fn new(p: usize, v: usize, t: u64, target_log2: i64, seed: u64) -> Self {
        Self { p, v, t, target_log2, max_attempts: 1000, seed, strategy: ThresholdStrategy::Optimize, workers: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.v == 0 || self.v > self.p {
            return Err(Error::Config(format!("need 1 <= v <= p, got v = {}, p = {}", self.v, self.p)));
        }
        // A target of 0 is accepted: it admits any bound below 1.
        if self.target_log2 > 0 {
            return Err(Error::Config(format!("target log2 {} must not be positive", self.target_log2)));
        }
        if self.t > 2 * self.p as u64 {
            return Err(Error::Config(format!("t = {} exceeds n = {}", self.t, 2 * self.p)));
        }
        if let ThresholdStrategy::Fixed(b) = self.strategy {
            if b == 0 || b > self.v as u64 {
                return Err(Error::Config(format!("threshold {b} outside [1, {}]", self.v)));
            }
        }
        Ok(())
    }
}

/// A sampled key and its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyRecord {
    pub p: usize,
    pub v: usize,
    pub t: u64,
    pub s0: Vec<usize>,
    pub s1: Vec<usize>,
    pub b: u64,
    /// Exact bound numerator as a decimal string.
    pub numerator: String,
    pub log2_bound: f64,
    pub accepted: bool,
    /// Attempts consumed up to and including this key.
    pub attempts: u64,
    pub seed: u64,
    /// Stream index the supports were drawn from.
    pub index: u64,
}

impl KeyRecord {
    /// Recomputes the certificate from the supports and compares the exact
    /// numerator.
    pub fn verify(&self) -> Result<bool> {
        let h = build_qc2(self.p, &self.s0, &self.s1)?;
        let report = qc_analyzer(&h, self.t)?.th4(self.t, &Thresholds::Uniform(self.b as usize))?;
        Ok(report.numerator.to_string() == self.numerator)
    }
}

/// Uniform `v`-subset of `0..p`, sorted.
pub fn sample_circulant_support<R: Rng + ?Sized>(p: usize, v: usize, rng: &mut R) -> Result<Vec<usize>> {
    if v > p {
        return Err(Error::Domain(format!("support weight {v} exceeds block size {p}")));
    }
    let mut s = rand::seq::index::sample(rng, p, v).into_vec();
    s.sort_unstable();
    Ok(s)
}

/// Draws the supports of attempt `index` and certifies them.
pub fn evaluate_attempt(policy: &KeygenPolicy, index: u64) -> Result<KeyRecord> {
    let mut rng = trial_rng(policy.seed, index);
    let s0 = sample_circulant_support(policy.p, policy.v, &mut rng)?;
    let s1 = sample_circulant_support(policy.p, policy.v, &mut rng)?;
    let h = build_qc2(policy.p, &s0, &s1)?;
    let analyzer = qc_analyzer(&h, policy.t)?;
    let mut record = KeyRecord {
        p: policy.p,
        v: policy.v,
        t: policy.t,
        s0,
        s1,
        b: 0,
        numerator: String::new(),
        log2_bound: 0.0,
        accepted: false,
        attempts: index + 1,
        seed: policy.seed,
        index,
    };
    // Two equal columns can never be told apart.
    if analyzer.max_gamma() as usize >= policy.v {
        log::debug!("attempt {index}: duplicate columns, rejected");
        return Ok(record);
    }
    let (b, report): (u64, BoundReport) = match policy.strategy {
        ThresholdStrategy::Fixed(b) => (b, analyzer.th4(policy.t, &Thresholds::Uniform(b as usize))?),
        ThresholdStrategy::Optimize => analyzer.optimize(policy.t)?,
    };
    record.b = b;
    record.numerator = report.numerator.to_string();
    record.log2_bound = report.log2_bound;
    record.accepted = report.is_below_log2(policy.target_log2);
    Ok(record)
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// First accepted key by attempt index. Attempts run in parallel batches;
/// the lowest accepted index wins, so the result does not depend on the
/// worker count.
pub fn rejection_sample_key(policy: &KeygenPolicy) -> Result<KeyRecord> {
    policy.validate()?;
    in_pool(policy.workers, || {
        let batch = (rayon::current_num_threads() as u64).max(1);
        let mut next = 0u64;
        while next < policy.max_attempts {
            let end = (next + batch).min(policy.max_attempts);
            let records = (next..end)
                .into_par_iter()
                .map(|i| evaluate_attempt(policy, i))
                .collect::<Result<Vec<_>>>()?;
            if let Some(r) = records.into_iter().find(|r| r.accepted) {
                return Ok(r);
            }
            next = end;
        }
        Err(Error::NoKeyFound { attempts: policy.max_attempts })
    })?
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub policy: KeygenPolicy,
    pub keys: Vec<KeyRecord>,
    pub accepted: u64,
    pub fraction: f64,
}

/// Certifies `n_keys` independent draws and reports how many meet the
/// target.
pub fn acceptance_rate_experiment(policy: &KeygenPolicy, n_keys: u64) -> Result<AcceptanceReport> {
    policy.validate()?;
    let keys = in_pool(policy.workers, || {
        (0..n_keys).into_par_iter().map(|i| evaluate_attempt(policy, i)).collect::<Result<Vec<_>>>()
    })??;
    let accepted = keys.iter().filter(|k| k.accepted).count() as u64;
    let fraction = if n_keys == 0 { 0.0 } else { accepted as f64 / n_keys as f64 };
    Ok(AcceptanceReport { policy: policy.clone(), keys, accepted, fraction })
}
