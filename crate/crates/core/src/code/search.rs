//! Randomized constructions of girth-6 quasi-cyclic codes.
//!
//! A `[H_0 | H_1]` code has no 4-cycles iff the cyclic differences `x - y`
//! (`x != y`) inside each support are all distinct and the two difference
//! sets are disjoint. The search builds both supports greedily in a random
//! order and restarts on a dead end.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Array-code shifts `shifts[a][k] = a * k mod p`. For prime `p` and
/// `v, w <= p` the resulting monomial code has girth at least 6.
pub fn array_shifts(p: usize, v: usize, w: usize) -> Vec<Vec<usize>> {
    (0..v).map(|a| (0..w).map(|k| (a * k) % p).collect()).collect()
}

fn try_extend(p: usize, set: &mut Vec<usize>, used: &mut [bool], cand: usize) -> bool {
    let mut fresh = Vec::with_capacity(2 * set.len());
    for &x in set.iter() {
        if x == cand {
            return false;
        }
        let d1 = (cand + p - x) % p;
        let d2 = p - d1;
        if used[d1] || used[d2] || fresh.contains(&d1) || d1 == d2 {
            return false;
        }
        fresh.push(d1);
        fresh.push(d2);
    }
    for d in fresh {
        used[d] = true;
    }
    set.push(cand);
    true
}

/// Searches supports `(S_0, S_1)` of weight `v` such that the QC2 code of
/// block size `p` has girth at least 6. Returns `None` after
/// `max_restarts` failed greedy passes.
pub fn search_girth6_qc2<R: Rng>(p: usize, v: usize, rng: &mut R, max_restarts: usize) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if v == 0 || v > p {
        return Err(Error::Domain(format!("need 1 <= v <= p, got v={v}, p={p}")));
    }
    let mut order: Vec<usize> = (0..p).collect();
    for _ in 0..max_restarts {
        let mut used = vec![false; p];
        let mut sets: [Vec<usize>; 2] = [Vec::with_capacity(v), Vec::with_capacity(v)];
        let mut ok = true;
        for set in sets.iter_mut() {
            order.shuffle(rng);
            for &c in &order {
                if set.len() == v {
                    break;
                }
                try_extend(p, set, &mut used, c);
            }
            if set.len() < v {
                ok = false;
                break;
            }
        }
        if ok {
            let [mut s0, mut s1] = sets;
            s0.sort_unstable();
            s1.sort_unstable();
            return Ok(Some((s0, s1)));
        }
    }
    Ok(None)
}

/// Random `v x w` shift matrix with girth at least 6, found by column-wise
/// rejection: a new column `k` is kept if no 4-cycle
/// `s[a][k] - s[b][k] = s[a][k'] - s[b][k'] (mod p)` arises with earlier
/// columns. Returns `None` after `max_restarts` dead ends.
pub fn search_girth6_monomial<R: Rng>(p: usize, v: usize, w: usize, rng: &mut R, max_restarts: usize) -> Result<Option<Vec<Vec<usize>>>> {
    if v == 0 || w == 0 || p == 0 {
        return Err(Error::Domain("p, v and w must be positive".into()));
    }
    const COLUMN_TRIES: usize = 200;
    for _ in 0..max_restarts {
        let mut cols: Vec<Vec<usize>> = Vec::with_capacity(w);
        // used[a][b] marks differences s[a][k] - s[b][k] already taken.
        let mut used = vec![vec![false; p]; v * v];
        let mut dead = false;
        while cols.len() < w {
            let mut placed = false;
            for _ in 0..COLUMN_TRIES {
                let col: Vec<usize> = (0..v).map(|_| rng.gen_range(0..p)).collect();
                let clash = (0..v).any(|a| (a + 1..v).any(|b| used[a * v + b][(col[a] + p - col[b]) % p]));
                if clash {
                    continue;
                }
                for a in 0..v {
                    for b in a + 1..v {
                        used[a * v + b][(col[a] + p - col[b]) % p] = true;
                    }
                }
                cols.push(col);
                placed = true;
                break;
            }
            if !placed {
                dead = true;
                break;
            }
        }
        if !dead {
            return Ok(Some((0..v).map(|a| cols.iter().map(|c| c[a]).collect()).collect()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::girth::girth;
    use crate::code::matrix::{build_monomial, build_qc2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qc2_search_yields_girth_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (s0, s1) = search_girth6_qc2(131, 5, &mut rng, 100).unwrap().unwrap();
        let h = build_qc2(131, &s0, &s1).unwrap();
        assert!(girth(&h, 8).lower_bound() >= 6);
    }

    #[test]
    fn monomial_search_yields_girth_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shifts = search_girth6_monomial(31, 3, 8, &mut rng, 100).unwrap().unwrap();
        let h = build_monomial(31, &shifts).unwrap();
        assert!(girth(&h, 8).lower_bound() >= 6);
    }

    #[test]
    fn array_shifts_are_girth_six() {
        let h = build_monomial(11, &array_shifts(11, 3, 7)).unwrap();
        assert!(girth(&h, 8).lower_bound() >= 6);
    }

    #[test]
    fn impossible_search_gives_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(search_girth6_qc2(7, 4, &mut rng, 5).unwrap(), None);
    }
}
