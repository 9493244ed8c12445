//! Monte Carlo estimation of the single-iteration failure rate.
//!
//! Trial `k` draws its error pattern from a ChaCha8 stream selected by `k`
//! under the plan's seed, and trials are evaluated in batches whose
//! failures are scanned in index order. The estimate is therefore the same
//! for any number of workers.

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binom::binomial;
use crate::code::ParityCheckMatrix;
use crate::decoder::{SparseDecoder, Thresholds};
use crate::error::{Error, Result};

/// Partial Fisher-Yates sampler of uniform `t`-subsets of `0..n`. The
/// permutation is restored after each draw, so a draw costs `O(t)`.
#[derive(Debug, Clone)]
pub struct ErrorSampler {
    perm: Vec<u32>,
    swaps: Vec<u32>,
}

impl ErrorSampler {
    pub fn new(n: usize) -> Self {
        Self { perm: (0..n as u32).collect(), swaps: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Writes a uniform `t`-subset into `out` (unsorted).
    pub fn sample_into<R: Rng + ?Sized>(&mut self, t: usize, rng: &mut R, out: &mut Vec<usize>) -> Result<()> {
        let n = self.perm.len();
        if t > n {
            return Err(Error::Domain(format!("error weight {t} exceeds length {n}")));
        }
        out.clear();
        for k in 0..t {
            let j = rng.gen_range(k..n);
            self.perm.swap(k, j);
            self.swaps.push(j as u32);
            out.push(self.perm[k] as usize);
        }
        for k in (0..t).rev() {
            let j = self.swaps[k] as usize;
            self.perm.swap(k, j);
        }
        self.swaps.clear();
        Ok(())
    }
}

/// Uniform weight-`t` vector of length `n`.
pub fn sample_error<R: Rng + ?Sized>(n: usize, t: usize, rng: &mut R) -> Result<Vec<bool>> {
    let mut support = Vec::with_capacity(t);
    ErrorSampler::new(n).sample_into(t, rng, &mut support)?;
    let mut e = vec![false; n];
    for i in support {
        e[i] = true;
    }
    Ok(e)
}

/// RNG for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub t: usize,
    pub stop_failures: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
}

impl TrialPlan {
    pub fn new(t: usize, max_trials: u64, seed: u64) -> Self {
        Self { t, stop_failures: 100, max_trials, seed, workers: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stop_failures == 0 {
            return Err(Error::Config("stop_failures must be at least 1".into()));
        }
        if self.max_trials < self.stop_failures {
            return Err(Error::Config(format!(
                "max_trials ({}) is below stop_failures ({})",
                self.max_trials, self.stop_failures
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfrEstimate {
    pub t: usize,
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub std_err: f64,
    pub seed: u64,
}

impl DfrEstimate {
    fn new(t: usize, trials: u64, failures: u64, seed: u64) -> Self {
        let p_hat = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
        let std_err = if trials == 0 { 0.0 } else { (p_hat * (1.0 - p_hat) / trials as f64).sqrt() };
        Self { t, trials, failures, p_hat, std_err, seed }
    }
}

fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

const FIRST_BATCH: u64 = 1 << 10;
const MAX_BATCH: u64 = 1 << 16;

/// Runs single-iteration decoding on uniformly drawn weight-`t` errors until
/// `stop_failures` failures (`e' != e`) or `max_trials` trials.
pub fn estimate_dfr(h: &ParityCheckMatrix, plan: &TrialPlan, thresholds: &Thresholds) -> Result<DfrEstimate> {
    plan.validate()?;
    thresholds.validate(h)?;
    if plan.t > h.n() {
        return Err(Error::Domain(format!("error weight {} exceeds length {}", plan.t, h.n())));
    }
    run_in_pool(plan.workers, || {
        let mut done = 0u64;
        let mut failures = 0u64;
        let mut batch = FIRST_BATCH;
        while done < plan.max_trials {
            let end = (done + batch).min(plan.max_trials);
            let failed: Vec<u64> = (done..end)
                .into_par_iter()
                .map_init(
                    || (SparseDecoder::new(h), ErrorSampler::new(h.n()), Vec::with_capacity(plan.t)),
                    |(dec, sampler, support), k| {
                        let mut rng = trial_rng(plan.seed, k);
                        sampler.sample_into(plan.t, &mut rng, support).expect("t checked");
                        (!dec.decodes_exactly(h, support, thresholds)).then_some(k)
                    },
                )
                .flatten()
                .collect();
            for k in failed {
                failures += 1;
                if failures == plan.stop_failures {
                    return DfrEstimate::new(plan.t, k + 1, failures, plan.seed);
                }
            }
            done = end;
            log::debug!("t={} trials={done} failures={failures}", plan.t);
            batch = (batch * 2).min(MAX_BATCH);
        }
        DfrEstimate::new(plan.t, done, failures, plan.seed)
    })
}

/// Largest `C(n, t)` accepted by [`exhaustive_dfr`].
pub const EXHAUSTIVE_MAX_PATTERNS: u64 = 10_000_000;

/// Exact failure count over all weight-`t` patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactDfr {
    pub failures: u64,
    pub patterns: u64,
}

impl ExactDfr {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / self.patterns as f64
    }
}

/// Decodes every weight-`t` pattern. Refuses when `C(n, t)` exceeds
/// [`EXHAUSTIVE_MAX_PATTERNS`].
pub fn exhaustive_dfr(h: &ParityCheckMatrix, t: usize, thresholds: &Thresholds) -> Result<ExactDfr> {
    thresholds.validate(h)?;
    let n = h.n();
    if t > n {
        return Err(Error::Domain(format!("error weight {t} exceeds length {n}")));
    }
    let patterns = binomial(n as u64, t as u64);
    if patterns > BigUint::from(EXHAUSTIVE_MAX_PATTERNS) {
        return Err(Error::Guard(format!("C({n}, {t}) = {patterns} patterns exceed {EXHAUSTIVE_MAX_PATTERNS}")));
    }
    let mut dec = SparseDecoder::new(h);
    let mut idx: Vec<usize> = (0..t).collect();
    let mut failures = 0u64;
    let mut count = 0u64;
    loop {
        count += 1;
        if !dec.decodes_exactly(h, &idx, thresholds) {
            failures += 1;
        }
        let mut k = t;
        while k > 0 && idx[k - 1] == n - t + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for q in k..t {
            idx[q] = idx[q - 1] + 1;
        }
    }
    Ok(ExactDfr { failures, patterns: count })
}

/// Failure rate over a binary symmetric channel with crossover `rho`:
/// every bit is in error independently with probability `rho`.
pub fn estimate_bsc(
    h: &ParityCheckMatrix,
    rho: f64,
    trials: u64,
    seed: u64,
    thresholds: &Thresholds,
    workers: usize,
) -> Result<DfrEstimate> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("crossover probability {rho} not in [0, 1]")));
    }
    thresholds.validate(h)?;
    run_in_pool(workers, || {
        let failures = (0..trials)
            .into_par_iter()
            .map_init(
                || (SparseDecoder::new(h), Vec::new()),
                |(dec, support), k| {
                    let mut rng = trial_rng(seed, k);
                    support.clear();
                    support.extend((0..h.n()).filter(|_| rng.gen_bool(rho)));
                    u64::from(!dec.decodes_exactly(h, support, thresholds))
                },
            )
            .sum();
        DfrEstimate::new(0, trials, failures, seed)
    })
}
