use std::collections::{HashMap, VecDeque};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("relation contains a cycle through {0}")]
    Cyclic(String),
    #[error("vertex {0} out of range 1..={1}")]
    BadVertex(usize, usize),
    #[error("vertex {0} is neither a sink nor a source")]
    NotSinkOrSource(usize),
    #[error("vertex {0} is not a sink")]
    NotSink(usize),
    #[error("vertex {0} is not a source")]
    NotSource(usize),
    #[error("bad orientation string '{0}'")]
    BadOrientation(String),
    #[error("level {0} outside 0..={1}")]
    BadLevel(i64, i64),
    #[error("map is not monotone: {0:?}")]
    NotMonotone(Vec<usize>),
    #[error("vertex counts differ: {0} vs {1}")]
    CountMismatch(usize, usize),
}

/// A finite poset, stored through its covering relations and full order matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    hasse: Vec<(usize, usize)>,
    leq: Vec<Vec<bool>>,
    arrow_index: HashMap<(usize, usize), usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Poset {
    /// Builds the poset generated by `relations` (pairs `a < b`); the stored
    /// arrows are the covering relations of the generated order.
    pub fn generated(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Poset, ShapeError> {
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in relations {
            succ[a].push(b);
        }
        for s in 0..n {
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &succ[x] {
                    if y == s {
                        return Err(ShapeError::Cyclic(labels[s].clone()));
                    }
                    if !leq[s][y] {
                        leq[s][y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut hasse = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && !(0..n).any(|c| c != a && c != b && leq[a][c] && leq[c][b]) {
                    hasse.push((a, b));
                }
            }
        }
        Ok(Poset::assemble(labels, hasse, leq))
    }

    /// Trusted constructor: `hasse` must be exactly the covers of `leq`.
    pub(crate) fn assemble(labels: Vec<String>, hasse: Vec<(usize, usize)>, leq: Vec<Vec<bool>>) -> Poset {
        let n = labels.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut arrow_index = HashMap::new();
        for (i, &(s, t)) in hasse.iter().enumerate() {
            out[s].push(i);
            inc[t].push(i);
            arrow_index.insert((s, t), i);
        }
        Poset { labels, hasse, leq, arrow_index, out, inc }
    }

    pub fn point() -> Poset {
        Poset::assemble(vec!["*".into()], vec![], vec![vec![true]])
    }

    pub fn chain(n: usize) -> Poset {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        let rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::generated(labels, &rel).expect("chain is acyclic")
    }

    pub fn antichain(n: usize) -> Poset {
        Poset::generated((1..=n).map(|i| i.to_string()).collect(), &[]).expect("antichain")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn arrow(&self, s: usize, t: usize) -> Option<usize> {
        self.arrow_index.get(&(s, t)).copied()
    }

    pub fn out_arrows(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_arrows(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn opposite(&self) -> Poset {
        let n = self.len();
        let leq = (0..n).map(|a| (0..n).map(|b| self.leq[b][a]).collect()).collect();
        let hasse = self.hasse.iter().map(|&(s, t)| (t, s)).collect();
        Poset::assemble(self.labels.clone(), hasse, leq)
    }

    /// Product order; element `(x, y)` has index `x * other.len() + y`.
    pub fn product(&self, other: &Poset) -> Poset {
        let (n, m) = (self.len(), other.len());
        let mut labels = Vec::with_capacity(n * m);
        for x in 0..n {
            for y in 0..m {
                labels.push(format!("({},{})", self.labels[x], other.labels[y]));
            }
        }
        let mut leq = vec![vec![false; n * m]; n * m];
        for x in 0..n {
            for y in 0..m {
                for x2 in 0..n {
                    if !self.leq[x][x2] {
                        continue;
                    }
                    for y2 in 0..m {
                        if other.leq[y][y2] {
                            leq[x * m + y][x2 * m + y2] = true;
                        }
                    }
                }
            }
        }
        let mut hasse = Vec::new();
        for x in 0..n {
            for y in 0..m {
                for &(a, b) in &self.hasse {
                    if a == x {
                        hasse.push((x * m + y, b * m + y));
                    }
                }
                for &(a, b) in &other.hasse {
                    if a == y {
                        hasse.push((x * m + y, x * m + b));
                    }
                }
            }
        }
        Poset::assemble(labels, hasse, leq)
    }

    /// Full subposet on `elems` (in the given order).
    pub fn induced(&self, elems: &[usize]) -> Poset {
        let labels = elems.iter().map(|&e| self.labels[e].clone()).collect();
        let k = elems.len();
        let leq: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| self.leq[elems[i]][elems[j]]).collect()).collect();
        let mut hasse = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if a != b && leq[a][b] && !(0..k).any(|c| c != a && c != b && leq[a][c] && leq[c][b]) {
                    hasse.push((a, b));
                }
            }
        }
        Poset::assemble(labels, hasse, leq)
    }

    /// A chain of covering arrows from `a` to `b` (indices into [`Poset::hasse`]).
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if !self.leq[a][b] {
            return None;
        }
        let mut route = Vec::new();
        let mut cur = a;
        while cur != b {
            let next = self.out[cur].iter().copied().find(|&e| self.leq[self.hasse[e].1][b])?;
            route.push(next);
            cur = self.hasse[next].1;
        }
        Some(route)
    }

    /// Strict chains `c0 < c1 < ... < cp` of length exactly `p`.
    pub fn chains(&self, p: usize) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for _ in 0..p {
            let mut next = Vec::new();
            for c in &out {
                let last = *c.last().unwrap();
                for j in 0..n {
                    if self.lt(last, j) {
                        let mut d = c.clone();
                        d.push(j);
                        next.push(d);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Whether the covering graph has no two distinct paths between the same pair
    /// (so the path category is free and the incidence algebra hereditary).
    pub fn is_free(&self) -> bool {
        let n = self.len();
        // count Hasse paths with a DP in a topological order
        let order = self.topological_order();
        for s in 0..n {
            let mut count = vec![0u64; n];
            count[s] = 1;
            for &v in &order {
                if count[v] == 0 {
                    continue;
                }
                for &e in &self.out[v] {
                    let t = self.hasse[e].1;
                    count[t] += count[v];
                    if count[t] > 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.inc[v].len()).collect();
        let mut q: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &e in &self.out[v] {
                let t = self.hasse[e].1;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    q.push_back(t);
                }
            }
        }
        order
    }
}
