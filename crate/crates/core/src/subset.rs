//! Counting fixed-size subsets of a nonnegative integer vector whose sum
//! exceeds a threshold.
//!
//! Given `a` of length `l`, a size `m` and a threshold `alpha`, the quantity of
//! interest is the number of index sets `B` with `|B| = m` and
//! `sum_{i in B} a_i > alpha`. Only the histogram of `a` matters, so the vector
//! is first compressed into `(value, multiplicity)` levels. The count is then
//! obtained through its complement (subsets with sum `<= alpha`), split by the
//! number `j` of distinct values the subset touches: for every increasing
//! tuple of levels `i_0 < ... < i_{j-1}` that can fit under `alpha`, the
//! multiplicities `m_1..m_{j-1}` of the upper levels are enumerated with their
//! largest admissible values, and the lowest level takes the remaining
//! `m_0 = m - sum m_u >= 1` positions. Each configuration contributes
//! `C(lambda_{i_0}, m_0) * prod C(lambda_{i_u}, m_u)`.
//!
//! The number of configurations visited is independent of `l` and bounded by
//! `omega * m^(omega-1) * e^omega` where `omega` is the number of levels,
//! which makes the routine practical on long, sparse adjacency rows.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::binom::{binomial, BinomialRow};
use crate::error::{Error, Result};

/// One level of a compressed vector: `multiplicity` entries equal to `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    pub value: u64,
    pub multiplicity: u64,
}

/// Run-length histogram of a nonnegative integer vector, levels sorted by
/// strictly increasing value. Zeros are an ordinary level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompressedVector {
    len: u64,
    levels: Vec<Level>,
}

impl CompressedVector {
    /// Compresses a vector of unsigned entries.
    pub fn from_values(a: &[u64]) -> Self {
        let mut sorted = a.to_vec();
        sorted.sort_unstable();
        let mut levels: Vec<Level> = Vec::new();
        for v in sorted {
            match levels.last_mut() {
                Some(last) if last.value == v => last.multiplicity += 1,
                _ => levels.push(Level { value: v, multiplicity: 1 }),
            }
        }
        Self { len: a.len() as u64, levels }
    }

    /// Builds a compressed vector from explicit levels. Values must be
    /// strictly increasing and multiplicities positive.
    pub fn from_levels(levels: Vec<Level>) -> Result<Self> {
        for w in levels.windows(2) {
            if w[0].value >= w[1].value {
                return Err(Error::Domain(format!(
                    "level values must be strictly increasing ({} then {})",
                    w[0].value, w[1].value
                )));
            }
        }
        if levels.iter().any(|l| l.multiplicity == 0) {
            return Err(Error::Domain("level multiplicities must be positive".into()));
        }
        let len = levels.iter().map(|l| l.multiplicity).sum();
        Ok(Self { len, levels })
    }

    /// Total length `l`.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Number of distinct values (`omega`).
    pub fn distinct(&self) -> usize {
        self.levels.len()
    }

    /// Sum of all entries.
    pub fn total(&self) -> u128 {
        self.levels.iter().map(|l| l.value as u128 * l.multiplicity as u128).sum()
    }

    /// Expands back to a sorted vector. Intended for small instances.
    pub fn expand(&self) -> Vec<u64> {
        self.levels
            .iter()
            .flat_map(|l| std::iter::repeat(l.value).take(l.multiplicity as usize))
            .collect()
    }

    /// Sum of the `z` largest entries.
    pub fn top_sum(&self, z: u64) -> u128 {
        let mut left = z;
        let mut acc = 0u128;
        for l in self.levels.iter().rev() {
            if left == 0 {
                break;
            }
            let take = left.min(l.multiplicity);
            acc += take as u128 * l.value as u128;
            left -= take;
        }
        acc
    }
}

/// Compresses an integer vector; negative entries are a domain error.
pub fn compress(a: &[i64]) -> Result<CompressedVector> {
    let mut values = Vec::with_capacity(a.len());
    for (i, &x) in a.iter().enumerate() {
        if x < 0 {
            return Err(Error::Domain(format!("entry {i} is negative ({x})")));
        }
        values.push(x as u64);
    }
    Ok(CompressedVector::from_values(&values))
}

/// Result of a counting pass together with the number of configurations the
/// enumeration evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountStats {
    /// Subsets with sum `> alpha`.
    pub exceeding: BigUint,
    /// Subsets with sum `<= alpha`.
    pub at_most: BigUint,
    pub configurations: u64,
}

/// Reusable counter over one compressed vector. Binomial rows for every
/// level are cached up to `max_m`, so repeated queries (e.g. a threshold
/// sweep) only pay for the enumeration.
#[derive(Debug, Clone)]
pub struct SubsetCounter {
    cv: CompressedVector,
    max_m: u64,
    level_rows: Vec<BinomialRow>,
    total_row: BinomialRow,
}

impl SubsetCounter {
    pub fn new(cv: &CompressedVector, max_m: u64) -> Self {
        let max_m = max_m.min(cv.len);
        let level_rows = cv
            .levels
            .iter()
            .map(|l| BinomialRow::new(l.multiplicity, max_m))
            .collect();
        Self { cv: cv.clone(), max_m, level_rows, total_row: BinomialRow::new(cv.len, max_m) }
    }

    pub fn vector(&self) -> &CompressedVector {
        &self.cv
    }

    /// Number of size-`m` subsets whose sum exceeds `alpha`.
    pub fn count_exceeding(&self, m: u64, alpha: u64) -> Result<BigUint> {
        Ok(self.count_detailed(m, alpha)?.exceeding)
    }

    pub fn count_detailed(&self, m: u64, alpha: u64) -> Result<CountStats> {
        if m > self.cv.len {
            return Err(Error::Domain(format!(
                "subset size {m} exceeds vector length {}",
                self.cv.len
            )));
        }
        if m > self.max_m {
            return Err(Error::Domain(format!(
                "subset size {m} exceeds the counter's prepared maximum {}",
                self.max_m
            )));
        }
        let mut configurations = 0u64;
        let at_most = self.count_at_most(m, alpha, &mut configurations);
        let total = self.total_row.get(m);
        debug_assert!(&at_most <= total);
        let exceeding = total - &at_most;
        Ok(CountStats { exceeding, at_most, configurations })
    }

    fn binom(&self, level: usize, k: u64) -> &BigUint {
        self.level_rows[level].get(k)
    }

    /// Subsets of size `m` with sum `<= alpha`, summed over the number `j`
    /// of distinct values they contain.
    fn count_at_most(&self, m: u64, alpha: u64, configurations: &mut u64) -> BigUint {
        if m == 0 {
            // Only the empty subset, whose sum 0 never exceeds alpha.
            return BigUint::one();
        }
        let levels = &self.cv.levels;
        let omega = levels.len();
        let alpha = alpha as i128;
        let m_i = m as i128;
        let mut acc = BigUint::zero();

        // j = 1: all m entries share one value y with m*y <= alpha.
        for (u, l) in levels.iter().enumerate() {
            *configurations += 1;
            if (l.value as i128) * m_i > alpha {
                break;
            }
            acc += self.binom(u, m);
        }

        let max_j = (m as usize).min(omega);
        let mut tuple = Vec::with_capacity(max_j);
        for j in 2..=max_j {
            for i0 in 0..=(omega - j) {
                let budget = alpha - m_i * levels[i0].value as i128;
                if budget < 0 {
                    break;
                }
                tuple.clear();
                tuple.push(i0);
                self.choose_levels(j, i0 + 1, 0, budget, m, &mut tuple, &mut acc, configurations);
            }
        }
        acc
    }

    /// Extends `tuple` with increasing level indices until it holds `j`
    /// levels, keeping `sum (y_{i_u} - y_{i_0}) <= budget`.
    #[allow(clippy::too_many_arguments)]
    fn choose_levels(
        &self,
        j: usize,
        start: usize,
        diff_sum: i128,
        budget: i128,
        m: u64,
        tuple: &mut Vec<usize>,
        acc: &mut BigUint,
        configurations: &mut u64,
    ) {
        let levels = &self.cv.levels;
        let base = levels[tuple[0]].value as i128;
        let remaining = (j - tuple.len()) as i128;
        if remaining == 0 {
            self.enumerate_multiplicities(tuple, budget, m, acc, configurations);
            return;
        }
        let last_start = levels.len() - remaining as usize;
        for idx in start..=last_start {
            let d = levels[idx].value as i128 - base;
            // Values are increasing, so every later pick costs at least d.
            if diff_sum + remaining * d > budget {
                break;
            }
            tuple.push(idx);
            self.choose_levels(j, idx + 1, diff_sum + d, budget, m, tuple, acc, configurations);
            tuple.pop();
        }
    }

    fn enumerate_multiplicities(
        &self,
        tuple: &[usize],
        budget: i128,
        m: u64,
        acc: &mut BigUint,
        configurations: &mut u64,
    ) {
        let levels = &self.cv.levels;
        let base = levels[tuple[0]].value as i128;
        let diffs: Vec<i128> = tuple.iter().map(|&i| levels[i].value as i128 - base).collect();
        // suffix[q] = sum_{z >= q} diffs[z]
        let mut suffix = vec![0i128; diffs.len() + 1];
        for q in (1..diffs.len()).rev() {
            suffix[q] = suffix[q + 1] + diffs[q];
        }
        let ctx = MultiplicityCtx { tuple, diffs: &diffs, suffix: &suffix, m };
        self.multiplicity_level(&ctx, 1, budget, 0, BigUint::one(), acc, configurations);
    }

    /// Picks `m_q` for `q >= 1`. `spent` is `sum_{u<q} m_u (y_{i_u} - y_{i_0})`
    /// already charged to `budget`; `used` is `sum_{u<q} m_u`.
    #[allow(clippy::too_many_arguments)]
    fn multiplicity_level(
        &self,
        ctx: &MultiplicityCtx<'_>,
        q: usize,
        budget: i128,
        used: u64,
        prod: BigUint,
        acc: &mut BigUint,
        configurations: &mut u64,
    ) {
        let j = ctx.tuple.len();
        if q == j {
            *configurations += 1;
            // m_0 >= 1: the lowest level must actually appear.
            let m0 = ctx.m - used;
            let c0 = self.binom(ctx.tuple[0], m0);
            if !c0.is_zero() {
                *acc += prod * c0;
            }
            return;
        }
        let level = ctx.tuple[q];
        let lambda = self.cv.levels[level].multiplicity;
        let room = budget - ctx.suffix[q + 1];
        if room < ctx.diffs[q] {
            return;
        }
        let by_budget = (room / ctx.diffs[q]) as u64;
        // Leave one position for each later level and for the lowest level.
        let by_size = ctx.m.saturating_sub(used + (j - q) as u64);
        let m_max = lambda.min(by_budget).min(by_size);
        if m_max == 0 {
            return;
        }
        for mq in 1..=m_max {
            let next = &prod * self.binom(level, mq);
            self.multiplicity_level(
                ctx,
                q + 1,
                budget - mq as i128 * ctx.diffs[q],
                used + mq,
                next,
                acc,
                configurations,
            );
        }
    }
}

struct MultiplicityCtx<'a> {
    tuple: &'a [usize],
    diffs: &'a [i128],
    suffix: &'a [i128],
    m: u64,
}

/// Number of size-`m` subsets of the vector behind `cv` whose sum exceeds
/// `alpha`.
pub fn count_exceeding(cv: &CompressedVector, m: u64, alpha: u64) -> Result<BigUint> {
    SubsetCounter::new(cv, m).count_exceeding(m, alpha)
}

/// Upper bound on the configurations the enumeration may visit:
/// `omega * m^(omega-1) * e^omega`.
pub fn configuration_bound(omega: usize, m: u64) -> f64 {
    if omega == 0 {
        return 0.0;
    }
    let w = omega as f64;
    w * (m as f64).powf(w - 1.0) * w.exp()
}

/// Largest vector length accepted by [`count_exceeding_bruteforce`].
pub const BRUTEFORCE_MAX_LEN: usize = 25;

/// Literal enumeration of all size-`m` index subsets. Test oracle only.
pub fn count_exceeding_bruteforce(a: &[u64], m: usize, alpha: u64) -> Result<BigUint> {
    if a.len() > BRUTEFORCE_MAX_LEN {
        return Err(Error::Guard(format!(
            "brute-force enumeration limited to length {BRUTEFORCE_MAX_LEN}, got {}",
            a.len()
        )));
    }
    if m > a.len() {
        return Err(Error::Domain(format!("subset size {m} exceeds length {}", a.len())));
    }
    fn walk(a: &[u64], start: usize, left: usize, sum: u128, alpha: u128, count: &mut u64) {
        if left == 0 {
            if sum > alpha {
                *count += 1;
            }
            return;
        }
        for i in start..=(a.len() - left) {
            walk(a, i + 1, left - 1, sum + a[i] as u128, alpha, count);
        }
    }
    let mut count = 0u64;
    walk(a, 0, m, 0, alpha as u128, &mut count);
    Ok(BigUint::from(count))
}

/// Closed-form count for a binary vector of length `l` and weight `m`:
/// the number of size-`x` subsets containing more than `alpha` ones.
pub fn theta(l: u64, x: u64, m: u64, alpha: u64) -> BigUint {
    if alpha >= m || x <= alpha {
        return BigUint::zero();
    }
    let mut acc = BigUint::zero();
    for j in (alpha + 1)..=m.min(x) {
        if x - j > l.saturating_sub(m) {
            continue;
        }
        acc += binomial(m, j) * binomial(l - m, x - j);
    }
    acc
}
