use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{ParityCheckMatrix, Structure};

/// Default search depth; enough to tell girth 4, 6 and "at least 8" apart.
pub const DEFAULT_GIRTH_CUTOFF: usize = 8;

/// Tanner-graph girth, either exact or known to exceed the search cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Girth {
    Exact(usize),
    /// No cycle of length `<= cutoff`; the girth is at least this value.
    AtLeast(usize),
}

impl Girth {
    /// Lower bound on the girth (the exact value when known).
    pub fn lower_bound(self) -> usize {
        match self {
            Girth::Exact(g) | Girth::AtLeast(g) => g,
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            Girth::Exact(g) => Some(g),
            Girth::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Exact(g) => write!(f, "{g}"),
            Girth::AtLeast(g) => write!(f, ">={g}"),
        }
    }
}

/// Girth of the Tanner graph, searched up to `cutoff` (rounded up to an even
/// number, at least 4).
///
/// Breadth-first search is run from variable nodes; a non-tree edge met at
/// depth `d` closes a cycle through the root of length at most `2d + 2`.
/// For quasi-cyclic matrices the cyclic automorphism maps every variable
/// node onto one of the block representatives, so only those are searched.
pub fn girth(h: &ParityCheckMatrix, cutoff: usize) -> Girth {
    let cutoff = (cutoff.max(4) + 1) & !1;
    let roots: Vec<usize> = match h.structure() {
        Structure::Explicit => (0..h.n()).collect(),
        Structure::Qc2 { p, .. } => vec![0, *p],
        Structure::Monomial { p, w, .. } => (0..*w).map(|k| k * p).collect(),
    };
    let mut search = Bfs::new(h.n() + h.r());
    let mut best = usize::MAX;
    for root in roots {
        let limit = best.min(cutoff);
        if let Some(len) = search.shortest_cycle_through(h, root, limit) {
            best = best.min(len);
            if best == 4 {
                break;
            }
        }
    }
    if best <= cutoff {
        Girth::Exact(best)
    } else {
        Girth::AtLeast(cutoff + 2)
    }
}

struct Bfs {
    dist: Vec<u32>,
    parent: Vec<u32>,
    touched: Vec<u32>,
    queue: std::collections::VecDeque<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl Bfs {
    fn new(nodes: usize) -> Self {
        Self {
            dist: vec![UNSEEN; nodes],
            parent: vec![UNSEEN; nodes],
            touched: Vec::new(),
            queue: std::collections::VecDeque::new(),
        }
    }

    /// Nodes `0..n` are variables, `n..n+r` are checks.
    fn shortest_cycle_through(&mut self, h: &ParityCheckMatrix, root: usize, limit: usize) -> Option<usize> {
        let n = h.n();
        for &t in &self.touched {
            self.dist[t as usize] = UNSEEN;
            self.parent[t as usize] = UNSEEN;
        }
        self.touched.clear();
        self.queue.clear();

        self.dist[root] = 0;
        self.touched.push(root as u32);
        self.queue.push_back(root as u32);
        let mut best: Option<usize> = None;

        while let Some(u) = self.queue.pop_front() {
            let u = u as usize;
            let d = self.dist[u] as usize;
            let bound = best.unwrap_or(usize::MAX).min(limit);
            if 2 * d + 2 > bound {
                break;
            }
            let neighbours: &[u32] = if u < n { h.col(u) } else { h.row(u - n) };
            for &x in neighbours {
                let x = if u < n { x as usize + n } else { x as usize };
                if x as u32 == self.parent[u] {
                    continue;
                }
                if self.dist[x] == UNSEEN {
                    self.dist[x] = d as u32 + 1;
                    self.parent[x] = u as u32;
                    self.touched.push(x as u32);
                    self.queue.push_back(x as u32);
                } else {
                    let len = d + self.dist[x] as usize + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
        best.filter(|&b| b <= limit)
    }
}
