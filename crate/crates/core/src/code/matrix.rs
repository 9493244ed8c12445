use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// How a parity-check matrix was built. Quasi-cyclic structures let the
/// analysis work on one representative column per circulant block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Structure {
    Explicit,
    /// `[H_0 | H_1]` with two `p x p` circulants of column weight `v`.
    Qc2 { p: usize, v: usize, s0: Vec<usize>, s1: Vec<usize> },
    /// `v x w` array of shifted `p x p` identities.
    Monomial { p: usize, v: usize, w: usize, shifts: Vec<Vec<usize>> },
}

/// Sparse binary `r x n` matrix stored as sorted supports in both
/// orientations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    r: usize,
    col_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    row_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    structure: Structure,
}

fn to_csr(outer: usize, lists: &[Vec<u32>]) -> (Vec<usize>, Vec<u32>) {
    let mut ptr = Vec::with_capacity(outer + 1);
    let mut idx = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    ptr.push(0);
    for l in lists {
        idx.extend_from_slice(l);
        ptr.push(idx.len());
    }
    (ptr, idx)
}

fn transpose(n_out: usize, lists: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); n_out];
    for (i, l) in lists.iter().enumerate() {
        for &j in l {
            out[j as usize].push(i as u32);
        }
    }
    out
}

impl ParityCheckMatrix {
    fn from_columns(r: usize, mut cols: Vec<Vec<u32>>, structure: Structure) -> Self {
        for c in cols.iter_mut() {
            c.sort_unstable();
        }
        let rows = transpose(r, &cols);
        let (col_ptr, col_idx) = to_csr(cols.len(), &cols);
        let (row_ptr, row_idx) = to_csr(r, &rows);
        Self { n: cols.len(), r, col_ptr, col_idx, row_ptr, row_idx, structure }
    }

    /// Builds an unstructured matrix from row supports. `n` defaults to one
    /// past the largest column index.
    pub fn from_rows(rows: &[Vec<usize>], n: Option<usize>) -> Result<Self> {
        let max_col = rows.iter().flatten().copied().max();
        let n = match (n, max_col) {
            (Some(n), Some(mc)) if mc >= n => {
                return Err(Error::InvalidSpec(format!(
                    "column index {mc} out of range for n = {n}"
                )))
            }
            (Some(n), _) => n,
            (None, Some(mc)) => mc + 1,
            (None, None) => 0,
        };
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (j, row) in rows.iter().enumerate() {
            let mut seen = row.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSpec(format!("row {j} has a duplicate entry")));
            }
            for &c in row {
                cols[c].push(j as u32);
            }
        }
        if let Some(i) = cols.iter().position(Vec::is_empty) {
            return Err(Error::InvalidSpec(format!("column {i} has weight 0")));
        }
        let h = Self::from_columns(rows.len(), cols, Structure::Explicit);
        let dups = h.duplicate_column_pairs();
        if !dups.is_empty() {
            log::warn!(
                "matrix has {} duplicate column pair(s), e.g. {:?}; such columns cannot be told apart",
                dups.len(),
                dups[0]
            );
        }
        Ok(h)
    }

    /// Builds an unstructured matrix directly from column supports.
    pub fn from_column_supports(r: usize, cols: &[Vec<usize>]) -> Result<Self> {
        if let Some(bad) = cols.iter().flatten().find(|&&x| x >= r) {
            return Err(Error::InvalidSpec(format!("row index {bad} out of range for r = {r}")));
        }
        let rows: Vec<Vec<usize>> = transpose(
            r,
            &cols
                .iter()
                .map(|c| c.iter().map(|&x| x as u32).collect())
                .collect::<Vec<_>>(),
        )
        .into_iter()
        .map(|row| row.into_iter().map(|x| x as usize).collect())
        .collect();
        Self::from_rows(&rows, Some(cols.len()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// `S(h_i)`, sorted.
    #[inline]
    pub fn col(&self, i: usize) -> &[u32] {
        &self.col_idx[self.col_ptr[i]..self.col_ptr[i + 1]]
    }

    /// Column indices of the ones in row `j`, sorted.
    #[inline]
    pub fn row(&self, j: usize) -> &[u32] {
        &self.row_idx[self.row_ptr[j]..self.row_ptr[j + 1]]
    }

    pub fn col_weight(&self, i: usize) -> usize {
        self.col_ptr[i + 1] - self.col_ptr[i]
    }

    pub fn row_weight(&self, j: usize) -> usize {
        self.row_ptr[j + 1] - self.row_ptr[j]
    }

    pub fn col_weights(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.col_weight(i)).collect()
    }

    /// Minimum column weight `v*`.
    pub fn min_col_weight(&self) -> usize {
        (0..self.n).map(|i| self.col_weight(i)).min().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        (0..self.n).map(|i| self.col_weight(i)).max().unwrap_or(0)
    }

    pub fn max_row_weight(&self) -> usize {
        (0..self.r).map(|j| self.row_weight(j)).max().unwrap_or(0)
    }

    /// `Some(v)` when every column has weight `v`.
    pub fn regular_col_weight(&self) -> Option<usize> {
        let v = self.col_weight(0);
        (0..self.n).all(|i| self.col_weight(i) == v).then_some(v)
    }

    /// `Some(w)` when every row has weight `w`.
    pub fn regular_row_weight(&self) -> Option<usize> {
        if self.r == 0 {
            return None;
        }
        let w = self.row_weight(0);
        (0..self.r).all(|j| self.row_weight(j) == w).then_some(w)
    }

    /// `1 - r/n`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.r as f64 / self.n as f64
    }

    /// Circulant block size, if the matrix is quasi-cyclic.
    pub fn block_size(&self) -> Option<usize> {
        match &self.structure {
            Structure::Explicit => None,
            Structure::Qc2 { p, .. } | Structure::Monomial { p, .. } => Some(*p),
        }
    }

    /// Checks that the row-oriented storage is the transpose of the
    /// column-oriented one.
    pub fn is_transpose_consistent(&self) -> bool {
        let cols: Vec<Vec<u32>> = (0..self.n).map(|i| self.col(i).to_vec()).collect();
        let rows = transpose(self.r, &cols);
        rows.iter().enumerate().all(|(j, row)| row.as_slice() == self.row(j))
    }

    /// Pairs of columns with identical supports.
    pub fn duplicate_column_pairs(&self) -> Vec<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| self.col(a).cmp(self.col(b)));
        let mut out = Vec::new();
        for w in order.windows(2) {
            if self.col(w[0]) == self.col(w[1]) {
                out.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        out
    }

    /// `s = e H^T` over GF(2).
    pub fn syndrome(&self, e: &[bool]) -> Result<Vec<bool>> {
        if e.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: e.len() });
        }
        let mut s = vec![false; self.r];
        for (i, _) in e.iter().enumerate().filter(|(_, &x)| x) {
            for &j in self.col(i) {
                s[j as usize] ^= true;
            }
        }
        Ok(s)
    }

    /// Syndrome of the error with the given support.
    pub fn syndrome_of_support(&self, support: &[usize]) -> Vec<bool> {
        let mut s = vec![false; self.r];
        for &i in support {
            for &j in self.col(i) {
                s[j as usize] ^= true;
            }
        }
        s
    }

    /// Dense `r x n` 0/1 rendering. Intended for small matrices.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.n]; self.r];
        for i in 0..self.n {
            for &j in self.col(i) {
                d[j as usize][i] = 1;
            }
        }
        d
    }

    /// Row supports as plain vectors.
    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        (0..self.r).map(|j| self.row(j).iter().map(|&x| x as usize).collect()).collect()
    }

    /// Hex SHA-256 over the dimensions and column supports; identifies the
    /// matrix independently of how it was described.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.r as u64).to_le_bytes());
        hasher.update((self.n as u64).to_le_bytes());
        for i in 0..self.n {
            hasher.update((self.col_weight(i) as u32).to_le_bytes());
            for &j in self.col(i) {
                hasher.update(j.to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn check_support(name: &str, p: usize, s: &[usize]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidSpec(format!("support {name} is empty")));
    }
    if let Some(&x) = s.iter().find(|&&x| x >= p) {
        return Err(Error::InvalidSpec(format!("support {name} entry {x} not in [0, {}]", p - 1)));
    }
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidSpec(format!("support {name} repeats entry {}", w[0])));
    }
    Ok(())
}

/// `[H_0 | H_1]` where column `j` of block `i` is `S_i` cyclically shifted
/// down by `j`.
pub fn build_qc2(p: usize, s0: &[usize], s1: &[usize]) -> Result<ParityCheckMatrix> {
    if p == 0 {
        return Err(Error::InvalidSpec("block size p must be positive".into()));
    }
    check_support("S0", p, s0)?;
    check_support("S1", p, s1)?;
    if s0.len() != s1.len() {
        return Err(Error::InvalidSpec(format!(
            "supports must have equal weight (|S0| = {}, |S1| = {})",
            s0.len(),
            s1.len()
        )));
    }
    let mut cols = Vec::with_capacity(2 * p);
    for s in [s0, s1] {
        for j in 0..p {
            cols.push(s.iter().map(|&x| ((x + j) % p) as u32).collect());
        }
    }
    let mut s0 = s0.to_vec();
    let mut s1 = s1.to_vec();
    s0.sort_unstable();
    s1.sort_unstable();
    let v = s0.len();
    Ok(ParityCheckMatrix::from_columns(p, cols, Structure::Qc2 { p, v, s0, s1 }))
}

/// `v x w` array of `p x p` identities, block `(a, k)` shifted down by
/// `shifts[a][k]`.
pub fn build_monomial(p: usize, shifts: &[Vec<usize>]) -> Result<ParityCheckMatrix> {
    if p == 0 {
        return Err(Error::InvalidSpec("block size p must be positive".into()));
    }
    let v = shifts.len();
    if v == 0 {
        return Err(Error::InvalidSpec("shift matrix has no rows".into()));
    }
    let w = shifts[0].len();
    if w == 0 || shifts.iter().any(|row| row.len() != w) {
        return Err(Error::InvalidSpec("shift matrix rows must be nonempty and equal length".into()));
    }
    if let Some(&bad) = shifts.iter().flatten().find(|&&s| s >= p) {
        return Err(Error::InvalidSpec(format!("shift {bad} not in [0, {}]", p - 1)));
    }
    let mut cols = Vec::with_capacity(w * p);
    for k in 0..w {
        for c in 0..p {
            cols.push(
                (0..v).map(|a| (a * p + (c + shifts[a][k]) % p) as u32).collect::<Vec<u32>>(),
            );
        }
    }
    Ok(ParityCheckMatrix::from_columns(
        v * p,
        cols,
        Structure::Monomial { p, v, w, shifts: shifts.to_vec() },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_syndrome(h: &ParityCheckMatrix, e: &[bool]) -> Vec<bool> {
        h.to_dense()
            .iter()
            .map(|row| row.iter().zip(e).filter(|(&hij, &ej)| hij == 1 && ej).count() % 2 == 1)
            .collect()
    }

    #[test]
    fn qc2_permutation_blocks() {
        let h = build_qc2(3, &[0], &[1]).unwrap();
        assert_eq!((h.r(), h.n()), (3, 6));
        assert_eq!(h.col_weights(), vec![1; 6]);
        let d = h.to_dense();
        assert_eq!(d[0], vec![1, 0, 0, 0, 0, 1]);
        assert_eq!(d[1], vec![0, 1, 0, 1, 0, 0]);
        assert_eq!(d[2], vec![0, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn qc2_hand_expanded_column() {
        let h = build_qc2(5, &[0, 1, 3], &[0, 2, 3]).unwrap();
        assert_eq!((h.r(), h.n()), (5, 10));
        // Column 7 is column 2 of H_1: {0,2,3} + 2 = {2,4,0}.
        assert_eq!(h.col(7), &[0, 2, 4]);
        assert_eq!(h.col(0), &[0, 1, 3]);
        assert_eq!(h.col(4), &[0, 2, 4]); // {0,1,3} + 4 = {4,0,2}
        assert_eq!(h.regular_col_weight(), Some(3));
        assert_eq!(h.regular_row_weight(), Some(6));
        assert!(h.is_transpose_consistent());
    }

    #[test]
    fn qc2_rejects_bad_supports() {
        assert!(matches!(build_qc2(5, &[0, 0], &[1, 2]), Err(Error::InvalidSpec(_))));
        assert!(matches!(build_qc2(5, &[0, 5], &[1, 2]), Err(Error::InvalidSpec(_))));
        assert!(matches!(build_qc2(5, &[0, 1], &[1]), Err(Error::InvalidSpec(_))));
        assert!(matches!(build_qc2(5, &[], &[]), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn monomial_examples() {
        let h = build_monomial(4, &[vec![0, 0]]).unwrap();
        assert_eq!((h.r(), h.n()), (4, 8));
        for c in 0..4 {
            assert_eq!(h.col(c), h.col(c + 4));
        }
        assert_eq!(h.duplicate_column_pairs().len(), 4);

        let h = build_monomial(7, &[vec![0, 1, 3], vec![0, 2, 6]]).unwrap();
        assert_eq!((h.r(), h.n()), (14, 21));
        assert_eq!(h.col_weights(), vec![2; 21]);
        assert_eq!(h.regular_row_weight(), Some(3));
        // Column 8 = block 1, offset 1: rows 1+1 and 7 + (1+2).
        assert_eq!(h.col(8), &[2, 10]);
        assert!(h.is_transpose_consistent());

        assert!(matches!(build_monomial(7, &[vec![0, 7]]), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn monomial_table_dimensions() {
        let shifts: Vec<Vec<usize>> =
            (0..15).map(|a| (0..43).map(|k| (a * k) % 97).collect()).collect();
        let h = build_monomial(97, &shifts).unwrap();
        assert_eq!((h.n(), h.r()), (4171, 1455));
        assert_eq!(h.regular_col_weight(), Some(15));
        assert_eq!(h.regular_row_weight(), Some(43));
        assert!((h.design_rate() - 0.65).abs() < 0.01);
    }

    #[test]
    fn syndrome_basics() {
        let h = build_qc2(5, &[0, 1, 3], &[0, 2, 3]).unwrap();
        assert_eq!(h.syndrome(&[false; 10]).unwrap(), vec![false; 5]);
        assert!(matches!(h.syndrome(&[false; 9]), Err(Error::Dimension { .. })));
        // Column pairs that coincide form a codeword.
        let dup = build_monomial(4, &[vec![0, 0]]).unwrap();
        let mut e = vec![false; 8];
        e[1] = true;
        e[5] = true;
        assert_eq!(dup.syndrome(&e).unwrap(), vec![false; 4]);
    }

    #[test]
    fn syndrome_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r = rng.gen_range(2..12);
            let n = rng.gen_range(2..20);
            let cols: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let mut c: Vec<usize> = (0..r).filter(|_| rng.gen_bool(0.4)).collect();
                    if c.is_empty() {
                        c.push(rng.gen_range(0..r));
                    }
                    c
                })
                .collect();
            let h = ParityCheckMatrix::from_column_supports(r, &cols).unwrap();
            assert!(h.is_transpose_consistent());
            let e: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
            assert_eq!(h.syndrome(&e).unwrap(), dense_syndrome(&h, &e));
        }
    }

    #[test]
    fn explicit_rejects_zero_weight_column() {
        assert!(matches!(
            ParityCheckMatrix::from_rows(&[vec![0, 2]], Some(3)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            ParityCheckMatrix::from_rows(&[vec![0, 3]], Some(3)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            ParityCheckMatrix::from_rows(&[vec![0, 0, 1]], None),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn fingerprint_depends_on_content_only() {
        let a = build_qc2(5, &[0, 1, 3], &[0, 2, 3]).unwrap();
        let b = ParityCheckMatrix::from_rows(&a.row_supports(), Some(10)).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = build_qc2(5, &[0, 1, 4], &[0, 2, 3]).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
