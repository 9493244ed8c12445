//! Rows of the column adjacency matrix `Gamma`, where `gamma[i][j]` is the
//! number of rows shared by columns `i` and `j` (zero on the diagonal).

use serde::{Deserialize, Serialize};

use super::matrix::{ParityCheckMatrix, Structure};
use crate::subset::{CompressedVector, Level};

/// One row of `Gamma` in compressed form. Only nonzero values are stored;
/// the remaining positions of the punctured row (length `n - 1`) are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GammaRow {
    pub owner_col: usize,
    /// Length of the punctured row, `n - 1`.
    pub length: u64,
    /// `(value, multiplicity)` pairs, nonzero values ascending.
    pub entries: Vec<(u64, u64)>,
}

impl GammaRow {
    fn from_overlap_counts(owner_col: usize, length: u64, mut counts: Vec<u64>) -> Self {
        counts.sort_unstable();
        let mut entries: Vec<(u64, u64)> = Vec::new();
        for c in counts {
            match entries.last_mut() {
                Some((v, m)) if *v == c => *m += 1,
                _ => entries.push((c, 1)),
            }
        }
        Self { owner_col, length, entries }
    }

    /// Largest entry (0 for an all-zero row).
    pub fn max_value(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.0)
    }

    /// Number of nonzero entries.
    pub fn nonzero_count(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Sum of the `z` largest entries.
    pub fn top_sum(&self, z: u64) -> u64 {
        let mut left = z;
        let mut acc = 0;
        for &(v, m) in self.entries.iter().rev() {
            if left == 0 {
                break;
            }
            let take = left.min(m);
            acc += take * v;
            left -= take;
        }
        acc
    }

    fn compressed_with_zeros(&self, len: u64) -> CompressedVector {
        let zeros = len - self.nonzero_count();
        let mut levels = Vec::with_capacity(self.entries.len() + 1);
        if zeros > 0 {
            levels.push(Level { value: 0, multiplicity: zeros });
        }
        levels.extend(self.entries.iter().map(|&(value, multiplicity)| Level { value, multiplicity }));
        CompressedVector::from_levels(levels).expect("gamma row levels are strictly increasing")
    }

    /// The punctured row (diagonal removed, length `n - 1`).
    pub fn punctured(&self) -> CompressedVector {
        self.compressed_with_zeros(self.length)
    }

    /// The full row (diagonal zero kept, length `n`).
    pub fn full(&self) -> CompressedVector {
        self.compressed_with_zeros(self.length + 1)
    }
}

/// Row `i` of `Gamma`, built by scattering over the checks of column `i`;
/// the cost is `O(v_i * w_max)` regardless of `n`.
pub fn adjacency_row(h: &ParityCheckMatrix, i: usize) -> GammaRow {
    let mut neighbours: Vec<u32> = Vec::with_capacity(h.col_weight(i) * h.max_row_weight());
    for &row in h.col(i) {
        neighbours.extend(h.row(row as usize).iter().copied().filter(|&c| c as usize != i));
    }
    neighbours.sort_unstable();
    let mut counts = Vec::new();
    let mut k = 0;
    while k < neighbours.len() {
        let start = k;
        while k < neighbours.len() && neighbours[k] == neighbours[start] {
            k += 1;
        }
        counts.push((k - start) as u64);
    }
    GammaRow::from_overlap_counts(i, h.n() as u64 - 1, counts)
}

/// A `Gamma` row standing for `multiplicity` columns that share its value
/// multiset and column weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowProfile {
    pub gamma: GammaRow,
    pub multiplicity: usize,
    /// Weight `v_i` of the representative column.
    pub col_weight: usize,
}

impl RowProfile {
    pub fn column(&self) -> usize {
        self.gamma.owner_col
    }
}

/// One profile per column, ignoring any quasi-cyclic structure.
pub fn all_row_profiles(h: &ParityCheckMatrix) -> Vec<RowProfile> {
    (0..h.n())
        .map(|i| RowProfile { gamma: adjacency_row(h, i), multiplicity: 1, col_weight: h.col_weight(i) })
        .collect()
}

/// Distinct row profiles. For quasi-cyclic matrices all rows belonging to
/// the same circulant block column are equal up to a cyclic shift, so one
/// representative per block column (multiplicity `p`) suffices.
pub fn distinct_row_profiles(h: &ParityCheckMatrix) -> Vec<RowProfile> {
    match h.structure() {
        Structure::Explicit => all_row_profiles(h),
        Structure::Qc2 { p, s0, s1, .. } => {
            let [a, b] = qc2_row_profiles(*p, s0, s1);
            vec![a, b]
        }
        Structure::Monomial { p, w, .. } => (0..*w)
            .map(|k| {
                let col = k * p;
                RowProfile { gamma: adjacency_row(h, col), multiplicity: *p, col_weight: h.col_weight(col) }
            })
            .collect(),
    }
}

/// Rows 0 and `p` of `Gamma` for `[H_0 | H_1]`, computed from the cyclic
/// difference multisets of the two supports without materializing the
/// matrix. The overlap of column 0 of block `a` with column `j` of block `b`
/// is the number of pairs `(x, y)` in `S_a x S_b` with `x - y = j (mod p)`.
pub fn qc2_row_profiles(p: usize, s0: &[usize], s1: &[usize]) -> [RowProfile; 2] {
    let n = 2 * p as u64;
    let v = s0.len();
    let diffs = |sa: &[usize], sb: &[usize], skip_zero: bool, out: &mut Vec<u64>| {
        let mut d: Vec<usize> = Vec::with_capacity(sa.len() * sb.len());
        for &x in sa {
            for &y in sb {
                let shift = (x + p - y) % p;
                if !(skip_zero && shift == 0) {
                    d.push(shift);
                }
            }
        }
        d.sort_unstable();
        let mut k = 0;
        while k < d.len() {
            let start = k;
            while k < d.len() && d[k] == d[start] {
                k += 1;
            }
            out.push((k - start) as u64);
        }
    };
    let mut row0 = Vec::new();
    diffs(s0, s0, true, &mut row0);
    diffs(s0, s1, false, &mut row0);
    let mut row_p = Vec::new();
    diffs(s1, s0, false, &mut row_p);
    diffs(s1, s1, true, &mut row_p);
    [
        RowProfile { gamma: GammaRow::from_overlap_counts(0, n - 1, row0), multiplicity: p, col_weight: v },
        RowProfile { gamma: GammaRow::from_overlap_counts(p, n - 1, row_p), multiplicity: p, col_weight: v },
    ]
}

/// Largest off-diagonal entry of `Gamma` over the given profiles.
pub fn max_overlap(profiles: &[RowProfile]) -> u64 {
    profiles.iter().map(|p| p.gamma.max_value()).max().unwrap_or(0)
}
