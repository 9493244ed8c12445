//! Certified upper bounds on the single-iteration decoding failure rate.
//!
//! For weight-`t` errors, bit `i` can only be decided wrongly if
//!
//! * `e_i = 1` and the `t - 1` other error positions overlap column `i` in
//!   more than `v_i - b_i` checks in total, or
//! * `e_i = 0` and the `t` error positions overlap column `i` in more than
//!   `b_i - 1` checks in total.
//!
//! Both events are counted exactly on the punctured `Gamma` row of `i`
//! with the subset counter. A union bound over bits, divided by `C(n, t)`,
//! bounds the failure probability.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binom::{log2_ratio, BinomialRow};
use crate::code::gamma::{max_overlap, qc2_row_profiles, RowProfile};
use crate::code::{ParityCheckMatrix, Structure};
use crate::decoder::Thresholds;
use crate::error::{Error, Result};
use crate::subset::{theta, SubsetCounter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Per-bit union bound over punctured rows.
    Th4,
    /// Odd regular weight with `b = ceil(v/2)`, one count per full row.
    Th4bis,
    /// Closed form for regular girth-6 codes.
    Th5,
    /// Union bound over the two block representatives of a QC2 code.
    Qc,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Th4 => "th4",
            Method::Th4bis => "th4bis",
            Method::Th5 => "th5",
            Method::Qc => "qc",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "th4" => Ok(Method::Th4),
            "th4bis" => Ok(Method::Th4bis),
            "th5" => Ok(Method::Th5),
            "qc" => Ok(Method::Qc),
            other => Err(Error::Config(format!("unknown bound method `{other}`"))),
        }
    }
}

/// A failure-rate bound `min{1, numerator / denominator}` kept as exact
/// integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: u64,
    pub thresholds: Thresholds,
    /// Unclamped union-bound numerator.
    pub numerator: BigUint,
    /// `C(n, t)`.
    pub denominator: BigUint,
    /// `log2` of the clamped bound; `-inf` when the numerator is zero.
    pub log2_bound: f64,
    pub method: Method,
}

impl BoundReport {
    fn new(t: u64, thresholds: Thresholds, numerator: BigUint, denominator: BigUint, method: Method) -> Self {
        let log2_bound = if numerator.is_zero() {
            f64::NEG_INFINITY
        } else {
            log2_ratio(&numerator, &denominator).min(0.0)
        };
        Self { t, thresholds, numerator, denominator, log2_bound, method }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// The clamped bound as a float.
    pub fn value(&self) -> f64 {
        self.log2_bound.exp2()
    }

    /// Exact test of `bound < 2^target`.
    pub fn is_below_log2(&self, target: i64) -> bool {
        if self.numerator.is_zero() {
            return true;
        }
        if target > 0 {
            return true;
        }
        if target == 0 {
            return self.numerator < self.denominator;
        }
        (&self.numerator << (-target) as u64) < self.denominator
    }

    /// Bit length of the numerator.
    pub fn numerator_bits(&self) -> u64 {
        self.numerator.bits()
    }
}

struct Class {
    multiplicity: u64,
    col_weight: u64,
    owner: usize,
    punctured: SubsetCounter,
    full_vector: crate::subset::CompressedVector,
    full: OnceLock<SubsetCounter>,
}

/// Bound evaluator for one code and all error weights up to `max_t`.
/// Counters and binomial rows are prepared once and shared across weights
/// and thresholds.
pub struct DfrAnalyzer {
    n: u64,
    max_t: u64,
    classes: Vec<Class>,
    denominators: BinomialRow,
    max_gamma: u64,
}

impl DfrAnalyzer {
    pub fn new(profiles: &[RowProfile], max_t: u64) -> Self {
        let n = profiles.first().map_or(0, |p| p.gamma.length + 1);
        let max_t = max_t.min(n);
        let classes = profiles
            .par_iter()
            .map(|p| Class {
                multiplicity: p.multiplicity as u64,
                col_weight: p.col_weight as u64,
                owner: p.column(),
                punctured: SubsetCounter::new(&p.gamma.punctured(), max_t),
                full_vector: p.gamma.full(),
                full: OnceLock::new(),
            })
            .collect();
        Self { n, max_t, classes, denominators: BinomialRow::new(n, max_t), max_gamma: max_overlap(profiles) }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn max_t(&self) -> u64 {
        self.max_t
    }

    /// Smallest column weight over the classes.
    pub fn v_star(&self) -> u64 {
        self.classes.iter().map(|c| c.col_weight).min().unwrap_or(0)
    }

    fn regular_weight(&self) -> Option<u64> {
        let v = self.classes.first()?.col_weight;
        self.classes.iter().all(|c| c.col_weight == v).then_some(v)
    }

    fn check_t(&self, t: u64) -> Result<()> {
        if t > self.n {
            return Err(Error::Domain(format!("error weight {t} exceeds code length {}", self.n)));
        }
        if t > self.max_t {
            return Err(Error::Domain(format!("error weight {t} exceeds the prepared maximum {}", self.max_t)));
        }
        Ok(())
    }

    /// Threshold of a class. Per-bit thresholds must be constant over the
    /// columns a class stands for (`owner .. owner + multiplicity`).
    fn class_threshold(&self, class: &Class, th: &Thresholds) -> Result<u64> {
        let b = match th {
            Thresholds::Uniform(b) => *b,
            Thresholds::PerBit(bs) => {
                if bs.len() as u64 != self.n {
                    return Err(Error::Dimension { expected: self.n as usize, got: bs.len() });
                }
                let block = &bs[class.owner..class.owner + class.multiplicity as usize];
                if block.iter().any(|&x| x != block[0]) {
                    return Err(Error::Config(format!(
                        "per-bit thresholds differ within the column class of {}",
                        class.owner
                    )));
                }
                block[0]
            }
        } as u64;
        if b == 0 || b > class.col_weight {
            return Err(Error::Config(format!(
                "threshold {b} outside [1, {}] for column {}",
                class.col_weight, class.owner
            )));
        }
        Ok(b)
    }

    fn th4_term(&self, class: &Class, t: u64, b: u64) -> BigUint {
        let mut term = BigUint::zero();
        if t >= 1 {
            term += class.punctured.count_exceeding(t - 1, class.col_weight - b).expect("t checked");
        }
        if t < self.n {
            term += class.punctured.count_exceeding(t, b - 1).expect("t checked");
        }
        term * class.multiplicity
    }

    fn th4_numerator(&self, t: u64, th: &Thresholds) -> Result<BigUint> {
        self.check_t(t)?;
        let bs = self.classes.iter().map(|c| self.class_threshold(c, th)).collect::<Result<Vec<_>>>()?;
        Ok(self
            .classes
            .par_iter()
            .zip(bs.par_iter())
            .map(|(c, &b)| self.th4_term(c, t, b))
            .reduce(BigUint::zero, |a, b| a + b))
    }

    /// Union bound over every column class.
    pub fn th4(&self, t: u64, th: &Thresholds) -> Result<BoundReport> {
        let num = self.th4_numerator(t, th)?;
        Ok(BoundReport::new(t, th.clone(), num, self.denominators.get(t).clone(), Method::Th4))
    }

    /// For odd regular weight `v` and `b = ceil(v/2)` the two error events
    /// of a bit merge into one count on its full `Gamma` row with
    /// threshold `(v - 1)/2`.
    pub fn th4bis(&self, t: u64) -> Result<BoundReport> {
        self.check_t(t)?;
        let v = self
            .regular_weight()
            .ok_or_else(|| Error::Precondition("column weights are not regular".into()))?;
        if v % 2 == 0 {
            return Err(Error::Precondition(format!("column weight {v} is even")));
        }
        let num = self
            .classes
            .par_iter()
            .map(|c| {
                let counter = c.full.get_or_init(|| SubsetCounter::new(&c.full_vector, self.max_t));
                counter.count_exceeding(t, (v - 1) / 2).expect("t checked") * c.multiplicity
            })
            .reduce(BigUint::zero, |a, b| a + b);
        Ok(BoundReport::new(
            t,
            Thresholds::Uniform(v.div_ceil(2) as usize),
            num,
            self.denominators.get(t).clone(),
            Method::Th4bis,
        ))
    }

    /// Scalar threshold in `[1, v*]` minimizing the bound at weight `t`;
    /// ties go to the smaller threshold.
    pub fn optimize(&self, t: u64) -> Result<(u64, BoundReport)> {
        self.check_t(t)?;
        let v_star = self.v_star();
        if v_star == 0 {
            return Err(Error::Precondition("no columns".into()));
        }
        let mut best: Option<(u64, BigUint)> = None;
        for b in 1..=v_star {
            let num = self.th4_numerator(t, &Thresholds::Uniform(b as usize))?;
            if best.as_ref().is_none_or(|(_, cur)| &num < cur) {
                let zero = num.is_zero();
                best = Some((b, num));
                if zero {
                    break;
                }
            }
        }
        let (b, num) = best.expect("v* >= 1");
        let th = Thresholds::Uniform(b as usize);
        Ok((b, BoundReport::new(t, th, num, self.denominators.get(t).clone(), Method::Th4)))
    }

    /// Largest off-diagonal `Gamma` entry.
    pub fn max_gamma(&self) -> u64 {
        self.max_gamma
    }
}

/// Union bound over the given column classes.
pub fn dfr_bound(profiles: &[RowProfile], t: u64, thresholds: &Thresholds) -> Result<BoundReport> {
    DfrAnalyzer::new(profiles, t).th4(t, thresholds)
}

/// Single-count form for odd regular column weight and `b = ceil(v/2)`.
pub fn dfr_bound_regular_odd(profiles: &[RowProfile], t: u64) -> Result<BoundReport> {
    DfrAnalyzer::new(profiles, t).th4bis(t)
}

/// Closed form `n theta(n, t, v(w-1), (v-1)/2) / C(n, t)` for a
/// `(v, w)`-regular girth-6 code with odd `v` and `b = ceil(v/2)`.
pub fn dfr_bound_girth6_regular(n: u64, v: u64, w: u64, t: u64) -> Result<BoundReport> {
    if v % 2 == 0 {
        return Err(Error::Precondition(format!("column weight {v} is even")));
    }
    if v == 0 || w == 0 || v * (w - 1) >= n {
        return Err(Error::Precondition(format!("(v, w) = ({v}, {w}) inconsistent with n = {n}")));
    }
    if t > n {
        return Err(Error::Domain(format!("error weight {t} exceeds code length {n}")));
    }
    let num = theta(n, t, v * (w - 1), (v - 1) / 2) * n;
    let den = crate::binom::binomial(n, t);
    Ok(BoundReport::new(t, Thresholds::Uniform(v.div_ceil(2) as usize), num, den, Method::Th5))
}

/// [`dfr_bound_girth6_regular`] with its preconditions checked on `h`.
pub fn dfr_bound_girth6_for(h: &ParityCheckMatrix, t: u64) -> Result<BoundReport> {
    let v = h
        .regular_col_weight()
        .ok_or_else(|| Error::Precondition("column weights are not regular".into()))?;
    let w = h
        .regular_row_weight()
        .ok_or_else(|| Error::Precondition("row weights are not regular".into()))?;
    if crate::bounds::max_col_intersection(h) > 1 {
        return Err(Error::Precondition("girth is 4".into()));
    }
    dfr_bound_girth6_regular(h.n() as u64, v as u64, w as u64, t)
}

/// Union bound for `[H_0 | H_1]` from the two block representatives,
/// computed directly from the supports.
pub fn dfr_bound_qc(h: &ParityCheckMatrix, t: u64, b: u64) -> Result<BoundReport> {
    let mut r = qc_analyzer(h, t)?.th4(t, &Thresholds::Uniform(b as usize))?;
    r.method = Method::Qc;
    Ok(r)
}

/// Analyzer over the two block representatives of a QC2 code.
pub fn qc_analyzer(h: &ParityCheckMatrix, max_t: u64) -> Result<DfrAnalyzer> {
    match h.structure() {
        Structure::Qc2 { p, s0, s1, .. } => Ok(DfrAnalyzer::new(&qc2_row_profiles(*p, s0, s1), max_t)),
        _ => Err(Error::Precondition("matrix is not a two-block circulant code".into())),
    }
}

/// Threshold in `[1, v*]` with the smallest bound (ties to the smaller).
pub fn optimize_threshold(profiles: &[RowProfile], t: u64) -> Result<(u64, BoundReport)> {
    DfrAnalyzer::new(profiles, t).optimize(t)
}

/// Tail mass cut from the binomial sum.
const BSC_TAIL_LOG2: f64 = -128.0;

/// Failure bound over a binary symmetric channel with crossover `rho`:
/// the weight-`l` bounds averaged over the binomial weight distribution.
/// The sum stops once the remaining tail is below `2^-128`, and that tail
/// (bounded by a geometric series) is added in full.
pub fn bsc_failure_bound(profiles: &[RowProfile], rho: f64, thresholds: &Thresholds) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("crossover probability {rho} not in [0, 1]")));
    }
    let n = profiles.first().map_or(0, |p| p.gamma.length + 1);
    if rho == 0.0 {
        return Ok(0.0);
    }
    if rho == 1.0 {
        return Ok(DfrAnalyzer::new(profiles, n).th4(n, thresholds)?.value());
    }
    let ln_odds = (rho / (1.0 - rho)).ln();
    let tail_ln = BSC_TAIL_LOG2 * std::f64::consts::LN_2;
    let mut ln_pmf = Vec::new();
    let mut cur = n as f64 * (1.0 - rho).ln();
    let mut tail = 0.0;
    for l in 0..=n {
        ln_pmf.push(cur);
        if l == n {
            break;
        }
        let ratio_ln = ((n - l) as f64 / (l + 1) as f64).ln() + ln_odds;
        if ratio_ln < 0.0 {
            // Later terms shrink at least geometrically with this ratio.
            let r = ratio_ln.exp();
            let bound_ln = cur + ratio_ln - (1.0 - r).ln();
            if bound_ln < tail_ln {
                tail = bound_ln.exp();
                break;
            }
        }
        cur += ratio_ln;
    }
    let analyzer = DfrAnalyzer::new(profiles, ln_pmf.len() as u64 - 1);
    let mut acc = tail;
    for (l, lp) in ln_pmf.iter().enumerate() {
        let b = analyzer.th4(l as u64, thresholds)?;
        if !b.is_zero() {
            acc += b.value() * lp.exp();
        }
    }
    Ok(acc.min(1.0))
}

/// Float value of a report's unclamped ratio, for diagnostics.
pub fn raw_ratio(r: &BoundReport) -> f64 {
    match (r.numerator.to_f64(), r.denominator.to_f64()) {
        (Some(a), Some(b)) if b.is_finite() && a.is_finite() => a / b,
        _ => log2_ratio(&r.numerator, &r.denominator).exp2(),
    }
}
