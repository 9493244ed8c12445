//! Error weights that one decoding iteration is guaranteed to correct.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::gamma::{distinct_row_profiles, max_overlap, RowProfile};
use crate::code::ParityCheckMatrix;
use crate::error::{Error, Result};

/// `mu(H, z)`: the largest sum of `z` entries of a punctured `Gamma` row.
pub fn mu_z(profiles: &[RowProfile], z: u64) -> u64 {
    profiles.iter().map(|p| p.gamma.top_sum(z)).max().unwrap_or(0)
}

/// Maximum column intersection `delta`, the largest off-diagonal `Gamma`
/// entry.
pub fn max_col_intersection(h: &ParityCheckMatrix) -> u64 {
    max_overlap(&distinct_row_profiles(h))
}

pub const DELTA_Z_MAX_N: usize = 64;
pub const DELTA_Z_MAX_Z: usize = 4;

/// `delta(H, z)`: over all columns `i` and all sets `M` of `z` other
/// columns, the largest weight of the XOR of the columns in `M` restricted
/// to the rows of column `i`. Exhaustive, so only small matrices are
/// accepted.
pub fn delta_z(h: &ParityCheckMatrix, z: usize) -> Result<u64> {
    if h.n() > DELTA_Z_MAX_N || z > DELTA_Z_MAX_Z {
        return Err(Error::Guard(format!(
            "delta(H, z) enumeration limited to n <= {DELTA_Z_MAX_N}, z <= {DELTA_Z_MAX_Z} (got n = {}, z = {z})",
            h.n()
        )));
    }
    if z == 0 {
        return Ok(0);
    }
    let n = h.n();
    let mut best = 0u64;
    for i in 0..n {
        let rows = h.col(i);
        if rows.len() > 64 {
            return Err(Error::Guard(format!("column {i} weight exceeds 64")));
        }
        // Column j restricted to the rows of column i, as a bit mask.
        let masks: Vec<u64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let cj = h.col(j);
                rows.iter()
                    .enumerate()
                    .filter(|(_, r)| cj.binary_search(r).is_ok())
                    .fold(0u64, |m, (k, _)| m | 1 << k)
            })
            .collect();
        if masks.len() < z {
            continue;
        }
        let mut idx: Vec<usize> = (0..z).collect();
        loop {
            let x = idx.iter().fold(0u64, |acc, &k| acc ^ masks[k]);
            best = best.max(x.count_ones() as u64);
            // Next combination in lexicographic order.
            let mut k = z;
            while k > 0 && idx[k - 1] == masks.len() - z + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for q in k..z {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    Ok(best)
}

/// A correction radius; `Unbounded` when no two columns overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Radius {
    Finite(u64),
    Unbounded,
}

impl Radius {
    /// The radius capped at `n`.
    pub fn capped(self, n: u64) -> u64 {
        match self {
            Radius::Finite(t) => t.min(n),
            Radius::Unbounded => n,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(t) => write!(f, "{t}"),
            Radius::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Majority-logic radius `floor(v* / (2 delta))`.
pub fn t_majority(v_star: u64, delta: u64) -> Radius {
    if delta == 0 {
        Radius::Unbounded
    } else {
        Radius::Finite(v_star / (2 * delta))
    }
}

/// Admissible thresholds `[lo, hi]` for weight-`t` errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRange {
    pub t: u64,
    pub lo: u64,
    pub hi: u64,
}

impl ThresholdRange {
    pub fn contains(&self, b: u64) -> bool {
        (self.lo..=self.hi).contains(&b)
    }
}

/// Largest `t` with `v* > mu(H, t) + mu(H, t - 1)` together with the
/// threshold interval `[mu(H, t) + 1, v* - mu(H, t - 1)]` for each
/// `t = 1..=t_M`. Since `mu` is nondecreasing in `t` the condition holds on
/// a prefix, and thresholds from the `t` interval also serve every smaller
/// weight.
pub fn t_mu(profiles: &[RowProfile], v_star: u64) -> (u64, Vec<ThresholdRange>) {
    let n = profiles.first().map_or(0, |p| p.gamma.length + 1);
    let mut ranges = Vec::new();
    let mut prev = 0u64;
    let mut t = 0u64;
    while t < n {
        let cur = mu_z(profiles, t + 1);
        if v_star <= cur + prev {
            break;
        }
        t += 1;
        ranges.push(ThresholdRange { t, lo: cur + 1, hi: v_star - prev });
        prev = cur;
    }
    (t, ranges)
}

/// Radius of the `delta(H, z)` criterion: the largest `t` (searched up to
/// the enumeration guard) with `v* > delta(H, t) + delta(H, t - 1)`. Small
/// matrices only.
pub fn delta_radius(h: &ParityCheckMatrix) -> Result<u64> {
    let v_star = h.min_col_weight() as u64;
    let mut deltas = vec![0u64];
    let mut best = 0;
    for t in 1..=DELTA_Z_MAX_Z.min(h.n()) {
        deltas.push(delta_z(h, t)?);
        if v_star > deltas[t] + deltas[t - 1] {
            best = t as u64;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilityReport {
    pub n: u64,
    pub v_star: u64,
    pub delta: u64,
    pub t_majority: Radius,
    pub t_mu: u64,
    /// `mu(H, z)` for `z = 0..=t_mu + 1`.
    pub mu_values: Vec<u64>,
    pub threshold_ranges: Vec<ThresholdRange>,
}

pub fn capability(h: &ParityCheckMatrix) -> CapabilityReport {
    capability_from_profiles(&distinct_row_profiles(h), h.min_col_weight() as u64)
}

pub fn capability_from_profiles(profiles: &[RowProfile], v_star: u64) -> CapabilityReport {
    let delta = max_overlap(profiles);
    let (t, ranges) = t_mu(profiles, v_star);
    CapabilityReport {
        n: profiles.first().map_or(0, |p| p.gamma.length + 1),
        v_star,
        delta,
        t_majority: t_majority(v_star, delta),
        t_mu: t,
        mu_values: (0..=t + 1).map(|z| mu_z(profiles, z)).collect(),
        threshold_ranges: ranges,
    }
}

/// Closed forms of the iterative-decoding guarantee of Chilappagari et al.
/// for column weight `v` and girth `g`: the largest error weight strictly
/// below their bound.
pub fn chilappagari_bound(v: u64, g: u64) -> Result<u64> {
    let ceil_div = |a: u64, b: u64| a.div_ceil(b);
    match g {
        4 => Ok(0),
        6 => Ok(ceil_div(v + 2, 4) - 1),
        8 => Ok(ceil_div(v, 2) - 1),
        10 => Ok(ceil_div(v * v + 4, 8) - 1),
        _ => Err(Error::Domain(format!("girth {g} not supported (expected 4, 6, 8 or 10)"))),
    }
}

/// One comparison cell: our one-iteration radius against the iterative
/// guarantee, for girth `g` and column weight `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub g: u64,
    pub v: u64,
    /// `floor(v/2)` for `g > 4`. For `g = 4` the radius is
    /// `floor(v/(2 delta))` at least, and at least 1 for any matrix without
    /// repeated columns, which is what is reported.
    pub ours: u64,
    pub theirs: u64,
}

impl Table1Row {
    pub fn improves(&self) -> bool {
        self.ours > self.theirs
    }
}

pub fn table1(vs: impl IntoIterator<Item = u64> + Clone) -> Vec<Table1Row> {
    let mut out = Vec::new();
    for g in [4, 6, 8, 10] {
        for v in vs.clone() {
            let ours = if g == 4 { 1 } else { v / 2 };
            let theirs = chilappagari_bound(v, g).expect("supported girth");
            out.push(Table1Row { g, v, ours, theirs });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::gamma::{all_row_profiles, tests::dense_gamma, tests::random_matrix};
    use crate::code::matrix::build_qc2;
    use crate::code::search::search_girth6_qc2;
    use crate::decoder::{bf_decode, BfConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mu_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let h = random_matrix(&mut rng, 6, 9, 0.4);
            let g = dense_gamma(&h);
            let profiles = all_row_profiles(&h);
            for z in 0..9u64 {
                let oracle = (0..h.n())
                    .map(|i| {
                        let mut row: Vec<u64> = (0..h.n()).filter(|&j| j != i).map(|j| g[i][j]).collect();
                        row.sort_unstable_by(|a, b| b.cmp(a));
                        row.iter().take(z as usize).sum::<u64>()
                    })
                    .max()
                    .unwrap();
                assert_eq!(mu_z(&profiles, z), oracle);
            }
            assert_eq!(delta_z(&h, 1).unwrap(), max_col_intersection(&h));
            assert_eq!(delta_z(&h, 0).unwrap(), 0);
            for z in 1..=3 {
                assert!(delta_z(&h, z).unwrap() <= mu_z(&profiles, z as u64));
            }
        }
    }

    #[test]
    fn girth_six_mu_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (s0, s1) = search_girth6_qc2(211, 5, &mut rng, 1000).unwrap().unwrap();
        let h = build_qc2(211, &s0, &s1).unwrap();
        let profiles = distinct_row_profiles(&h);
        for z in 0..=40 {
            assert_eq!(mu_z(&profiles, z), z);
        }
        assert_eq!(max_col_intersection(&h), 1);
    }

    #[test]
    fn duplicate_columns_give_zero_radius() {
        let h = ParityCheckMatrix::from_rows(&[vec![0, 1, 2], vec![0, 1], vec![2]], None).unwrap();
        assert_eq!(max_col_intersection(&h), 2);
        assert_eq!(t_majority(2, 2), Radius::Finite(0));
        assert_eq!(capability(&h).t_mu, 0);
    }

    #[test]
    fn majority_radius_examples() {
        assert_eq!(t_majority(25, 2), Radius::Finite(6));
        assert_eq!(t_majority(13, 1), Radius::Finite(6));
        assert_eq!(t_majority(7, 0), Radius::Unbounded);
    }

    #[test]
    fn regular_girth_six_radius_and_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let (s0, s1) = search_girth6_qc2(701, 13, &mut rng, 10_000).unwrap().unwrap();
        let h = build_qc2(701, &s0, &s1).unwrap();
        let rep = capability(&h);
        assert_eq!(rep.t_mu, 6);
        assert_eq!(rep.threshold_ranges.last().unwrap(), &ThresholdRange { t: 6, lo: 7, hi: 8 });
        assert_eq!(rep.t_majority, Radius::Finite(6));

        let profiles = distinct_row_profiles(&h);
        let mut p14 = profiles.clone();
        for p in &mut p14 {
            p.col_weight = 14;
        }
        let (t, ranges) = t_mu(&p14, 14);
        assert_eq!(t, 7);
        assert_eq!(ranges.last().unwrap(), &ThresholdRange { t: 7, lo: 8, hi: 8 });
    }

    #[test]
    fn radii_are_ordered_and_exhaustively_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mut checked = 0;
        for round in 0..40 {
            let v = 3 + round % 3;
            let cols: Vec<Vec<usize>> =
                (0..14).map(|_| rand::seq::index::sample(&mut rng, 24, v).into_vec()).collect();
            let h = ParityCheckMatrix::from_column_supports(24, &cols).unwrap();
            let rep = capability(&h);
            if let Radius::Finite(tm) = rep.t_majority {
                assert!(tm <= rep.t_mu);
            }
            assert!(delta_radius(&h).unwrap() >= rep.t_mu.min(DELTA_Z_MAX_Z as u64));
            for range in &rep.threshold_ranges {
                assert!(range.lo <= range.hi);
            }
            // Every pattern of weight <= t_M decodes with any admissible b.
            if let Some(range) = rep.threshold_ranges.last() {
                checked += 1;
                for b in range.lo..=range.hi {
                    let cfg = BfConfig::single(b as usize);
                    for mask in 0u32..1 << h.n() {
                        if mask.count_ones() as u64 > range.t {
                            continue;
                        }
                        let e: Vec<bool> = (0..h.n()).map(|i| mask >> i & 1 == 1).collect();
                        let out = bf_decode(&h, &h.syndrome(&e).unwrap(), &cfg).unwrap();
                        assert_eq!(out.e_prime, e);
                    }
                }
            }
        }
        assert!(checked > 5);
    }

    #[test]
    fn delta_z_guard() {
        let h = build_qc2(40, &[0, 1], &[0, 3]).unwrap();
        assert!(matches!(delta_z(&h, 2), Err(Error::Guard(_))));
    }

    #[test]
    fn chilappagari_examples() {
        assert_eq!(chilappagari_bound(13, 6).unwrap(), 3);
        assert_eq!(chilappagari_bound(7, 8).unwrap(), 3);
        assert_eq!(chilappagari_bound(8, 8).unwrap(), 3);
        for v in 1..50 {
            assert_eq!(chilappagari_bound(v, 4).unwrap(), 0);
        }
        assert!(chilappagari_bound(5, 12).is_err());
    }

    /// The general expression, `1/2 + v/4 sum_{i<k} ((v-2)/2)^i` for
    /// `g = 4k + 2` and `sum_{i<k} ((v-2)/2)^i` for `g = 4k`, evaluated in
    /// exact dyadic arithmetic; the guarantee is the largest integer below it.
    fn general_sum(v: u64, g: u64) -> u64 {
        // Work in units of 2^-s with s large enough for k <= 2.
        let s = 8u32;
        let one = 1i128 << s;
        let q = (v as i128 - 2) * one / 2;
        let k = if g % 4 == 2 { (g - 2) / 4 } else { g / 4 };
        let mut sum = 0i128;
        let mut pow = one;
        for _ in 0..k {
            sum += pow;
            pow = pow * q / one;
        }
        let x = if g % 4 == 2 { one / 2 + v as i128 * sum / 4 } else { sum };
        // Largest integer strictly below x / 2^s.
        ((x - 1).div_euclid(one)) as u64
    }

    #[test]
    fn closed_forms_match_general_sum() {
        for g in [4, 6, 8, 10] {
            for v in 2..=100 {
                assert_eq!(chilappagari_bound(v, g).unwrap(), general_sum(v, g), "g={g} v={v}");
            }
        }
    }

    #[test]
    fn table_rows() {
        let rows = table1(1..=100);
        let at = |g, v| rows.iter().find(|r| r.g == g && r.v == v).copied().unwrap();
        assert_eq!((at(6, 13).ours, at(6, 13).theirs), (6, 3));
        assert_eq!((at(8, 8).ours, at(8, 8).theirs), (4, 3));
        let g10: Vec<u64> = rows.iter().filter(|r| r.g == 10 && r.improves()).map(|r| r.v).collect();
        assert_eq!(g10, vec![2]);
    }
}
