//! Parallel bit-flipping decoding.
//!
//! One iteration computes, for every bit `i`, the number `sigma_i` of
//! unsatisfied checks it participates in and flips all bits with
//! `sigma_i >= b_i` at once. The certified bounds concern exactly this
//! single pass; further iterations are available for exploration only.

use serde::{Deserialize, Serialize};

use crate::code::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Flipping thresholds, one shared value or one per bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Thresholds {
    Uniform(usize),
    PerBit(Vec<usize>),
}

impl Thresholds {
    #[inline]
    pub fn get(&self, i: usize) -> usize {
        match self {
            Thresholds::Uniform(b) => *b,
            Thresholds::PerBit(bs) => bs[i],
        }
    }

    /// Checks `1 <= b_i <= v_i` for every column.
    pub fn validate(&self, h: &ParityCheckMatrix) -> Result<()> {
        if let Thresholds::PerBit(bs) = self {
            if bs.len() != h.n() {
                return Err(Error::Dimension { expected: h.n(), got: bs.len() });
            }
        }
        for i in 0..h.n() {
            let (b, v) = (self.get(i), h.col_weight(i));
            if b == 0 || b > v {
                return Err(Error::Config(format!("threshold b_{i} = {b} outside [1, {v}]")));
            }
        }
        Ok(())
    }
}

impl From<usize> for Thresholds {
    fn from(b: usize) -> Self {
        Thresholds::Uniform(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfConfig {
    pub thresholds: Thresholds,
    /// Number of iterations; only `1` is covered by the bounds.
    pub max_iterations: usize,
}

impl BfConfig {
    pub fn single(thresholds: impl Into<Thresholds>) -> Self {
        Self { thresholds: thresholds.into(), max_iterations: 1 }
    }

    pub fn validate(&self, h: &ParityCheckMatrix) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        self.thresholds.validate(h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    /// Estimated error vector.
    pub e_prime: Vec<bool>,
    /// Unsatisfied-check counts of the last iteration.
    pub counters: Vec<usize>,
    pub iterations_run: usize,
    /// Whether `s + e' H^T` is zero.
    pub syndrome_zero: bool,
}

impl DecodeOutcome {
    pub fn flip_set(&self) -> Vec<usize> {
        support_of(&self.e_prime)
    }
}

pub fn support_of(x: &[bool]) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// `sigma_i = |S(h_i) ∩ S(s)|` for every column.
pub fn unsatisfied_counts(h: &ParityCheckMatrix, s: &[bool]) -> Result<Vec<usize>> {
    if s.len() != h.r() {
        return Err(Error::Dimension { expected: h.r(), got: s.len() });
    }
    let mut sigma = vec![0usize; h.n()];
    for (j, _) in s.iter().enumerate().filter(|(_, &x)| x) {
        for &c in h.row(j) {
            sigma[c as usize] += 1;
        }
    }
    Ok(sigma)
}

/// Decodes syndrome `s`. With `max_iterations > 1` the flip step is repeated
/// on the residual syndrome (updated by XOR of the flipped columns) until it
/// vanishes or the iteration budget runs out.
pub fn bf_decode(h: &ParityCheckMatrix, s: &[bool], cfg: &BfConfig) -> Result<DecodeOutcome> {
    cfg.validate(h)?;
    let mut syn = s.to_vec();
    let mut e_prime = vec![false; h.n()];
    let mut counters = unsatisfied_counts(h, &syn)?;
    let mut iterations_run = 0;
    loop {
        let flips: Vec<usize> = (0..h.n()).filter(|&i| counters[i] >= cfg.thresholds.get(i)).collect();
        iterations_run += 1;
        for &i in &flips {
            e_prime[i] ^= true;
            for &row in h.col(i) {
                syn[row as usize] ^= true;
            }
        }
        let zero = !syn.iter().any(|&x| x);
        if zero || iterations_run == cfg.max_iterations || flips.is_empty() {
            return Ok(DecodeOutcome { e_prime, counters, iterations_run, syndrome_zero: zero });
        }
        counters = unsatisfied_counts(h, &syn)?;
    }
}

/// `f_i = e_i XOR e'_i`: the decoder decided wrongly on bit `i`.
pub fn decision_flags(e: &[bool], e_prime: &[bool]) -> Result<Vec<bool>> {
    if e.len() != e_prime.len() {
        return Err(Error::Dimension { expected: e.len(), got: e_prime.len() });
    }
    Ok(e.iter().zip(e_prime).map(|(a, b)| a ^ b).collect())
}

/// Scratch space for repeated single-iteration decodes of sparse errors.
///
/// Only the checks touched by the error and the bits adjacent to an
/// unsatisfied check are visited, so a trial costs `O(t v + |U| w)` with
/// `U` the unsatisfied checks. A bit never reached has `sigma = 0` and is
/// never flipped.
#[derive(Debug, Clone)]
pub struct SparseDecoder {
    syn: Vec<u8>,
    sigma: Vec<u32>,
    in_error: Vec<bool>,
    rows: Vec<u32>,
    cols: Vec<u32>,
}

impl SparseDecoder {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        Self {
            syn: vec![0; h.r()],
            sigma: vec![0; h.n()],
            in_error: vec![false; h.n()],
            rows: Vec::new(),
            cols: Vec::new(),
        }
    }

    /// Whether one iteration maps the syndrome of `support` (distinct column
    /// indices) back to exactly `support`.
    pub fn decodes_exactly(&mut self, h: &ParityCheckMatrix, support: &[usize], thresholds: &Thresholds) -> bool {
        for &i in support {
            self.in_error[i] = true;
            for &row in h.col(i) {
                let s = &mut self.syn[row as usize];
                if *s == 0 {
                    self.rows.push(row);
                }
                // 1 = unsatisfied, 2 = touched but satisfied.
                *s = if *s == 1 { 2 } else { 1 };
            }
        }
        for &row in &self.rows {
            if self.syn[row as usize] == 1 {
                for &c in h.row(row as usize) {
                    let sg = &mut self.sigma[c as usize];
                    if *sg == 0 {
                        self.cols.push(c);
                    }
                    *sg += 1;
                }
            }
        }
        let mut ok = true;
        let mut hits = 0usize;
        for &c in &self.cols {
            let c = c as usize;
            if self.sigma[c] as usize >= thresholds.get(c) {
                if self.in_error[c] {
                    hits += 1;
                } else {
                    ok = false;
                }
            }
        }
        ok &= hits == support.len();

        for &row in &self.rows {
            self.syn[row as usize] = 0;
        }
        for &c in &self.cols {
            self.sigma[c as usize] = 0;
        }
        for &i in support {
            self.in_error[i] = false;
        }
        self.rows.clear();
        self.cols.clear();
        ok
    }
}
