use std::fmt;

use serde::{Deserialize, Serialize};

use super::mesh::MeshVertex;
use super::poset::{Poset, ShapeError};

/// Direction of the edge between vertices `i` and `i+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    /// `i -> i+1`
    F,
    /// `i <- i+1`
    B,
}

/// An orientation of the line graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineQuiver {
    dirs: Vec<Dir>,
}

impl LineQuiver {
    pub fn new(dirs: Vec<Dir>) -> LineQuiver {
        LineQuiver { dirs }
    }

    /// All arrows forward.
    pub fn linear(n: usize) -> LineQuiver {
        assert!(n >= 1);
        LineQuiver { dirs: vec![Dir::F; n - 1] }
    }

    /// Parses `"FFB"` style strings (`>`/`<` also accepted) and the display
    /// form `"1<-2->3"`; `"-"`, `"1"` or `""` is A_1.
    pub fn parse(s: &str) -> Result<LineQuiver, ShapeError> {
        let mut t: String = s.trim().to_string();
        if t.contains("->") || t.contains("<-") || t == "1" {
            let expected: String = (1..=t.matches("->").count() + t.matches("<-").count() + 1).map(|i| i.to_string()).collect();
            let digits: String = t.chars().filter(|c| c.is_ascii_digit()).collect();
            if digits != expected {
                return Err(ShapeError::BadOrientation(s.to_string()));
            }
            t = t.replace("->", ">").replace("<-", "<").chars().filter(|c| !c.is_ascii_digit()).collect();
        }
        if t.is_empty() || t == "-" {
            return Ok(LineQuiver { dirs: vec![] });
        }
        let dirs = t
            .chars()
            .map(|c| match c {
                'F' | 'f' | '>' => Ok(Dir::F),
                'B' | 'b' | '<' => Ok(Dir::B),
                _ => Err(ShapeError::BadOrientation(s.to_string())),
            })
            .collect::<Result<_, _>>()?;
        Ok(LineQuiver { dirs })
    }

    pub fn all_orientations(n: usize) -> Vec<LineQuiver> {
        let mut out = Vec::new();
        for mask in 0..(1u32 << (n - 1)) {
            let dirs = (0..n - 1).map(|i| if mask >> i & 1 == 0 { Dir::F } else { Dir::B }).collect();
            out.push(LineQuiver { dirs });
        }
        out
    }

    pub fn n(&self) -> usize {
        self.dirs.len() + 1
    }

    pub fn dirs(&self) -> &[Dir] {
        &self.dirs
    }

    pub fn code(&self) -> String {
        if self.dirs.is_empty() {
            return "-".into();
        }
        self.dirs.iter().map(|d| if *d == Dir::F { 'F' } else { 'B' }).collect()
    }

    fn check(&self, a: usize) -> Result<(), ShapeError> {
        if a == 0 || a > self.n() {
            Err(ShapeError::BadVertex(a, self.n()))
        } else {
            Ok(())
        }
    }

    /// Arrows as `(source, target)`, 1-based, index `i` is the edge between `i+1` and `i+2`.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        self.dirs
            .iter()
            .enumerate()
            .map(|(i, d)| match d {
                Dir::F => (i + 1, i + 2),
                Dir::B => (i + 2, i + 1),
            })
            .collect()
    }

    /// Every arrow at `a` points into `a`.
    pub fn is_sink(&self, a: usize) -> bool {
        if self.check(a).is_err() {
            return false;
        }
        let left_ok = a == 1 || self.dirs[a - 2] == Dir::F;
        let right_ok = a == self.n() || self.dirs[a - 1] == Dir::B;
        left_ok && right_ok
    }

    pub fn is_source(&self, a: usize) -> bool {
        if self.check(a).is_err() {
            return false;
        }
        let left_ok = a == 1 || self.dirs[a - 2] == Dir::B;
        let right_ok = a == self.n() || self.dirs[a - 1] == Dir::F;
        left_ok && right_ok
    }

    pub fn sinks(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&a| self.is_sink(a)).collect()
    }

    pub fn sources(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&a| self.is_source(a)).collect()
    }

    pub fn neighbours(&self, a: usize) -> Vec<usize> {
        let mut v = Vec::new();
        if a > 1 {
            v.push(a - 1);
        }
        if a < self.n() {
            v.push(a + 1);
        }
        v
    }

    /// Flips every arrow at `a`, which must be a sink or a source.
    pub fn reflect(&self, a: usize) -> Result<LineQuiver, ShapeError> {
        self.check(a)?;
        if !self.is_sink(a) && !self.is_source(a) {
            return Err(ShapeError::NotSinkOrSource(a));
        }
        let mut dirs = self.dirs.clone();
        let flip = |d: Dir| if d == Dir::F { Dir::B } else { Dir::F };
        if a > 1 {
            dirs[a - 2] = flip(dirs[a - 2]);
        }
        if a < self.n() {
            dirs[a - 1] = flip(dirs[a - 1]);
        }
        Ok(LineQuiver { dirs })
    }

    pub fn opposite(&self) -> LineQuiver {
        LineQuiver { dirs: self.dirs.iter().map(|d| if *d == Dir::F { Dir::B } else { Dir::F }).collect() }
    }

    /// Path order: `a <= b` iff there is a directed path from `a` to `b`.
    /// Element `v - 1` stands for vertex `v`.
    pub fn poset(&self) -> Poset {
        let labels = (1..=self.n()).map(|i| i.to_string()).collect();
        let rel: Vec<_> = self.arrows().into_iter().map(|(s, t)| (s - 1, t - 1)).collect();
        Poset::generated(labels, &rel).expect("a line quiver is acyclic")
    }

    /// Path-order comparison on 1-based vertices.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let want = if a <= b { Dir::F } else { Dir::B };
        (lo..hi).all(|i| self.dirs[i - 1] == want)
    }

    /// Admissible sequence of sinks: repeatedly reflect the largest sink not yet used.
    pub fn admissible_sequence(&self) -> Vec<usize> {
        let mut q = self.clone();
        let mut used = vec![false; self.n() + 1];
        let mut seq = Vec::with_capacity(self.n());
        for _ in 0..self.n() {
            let a = (1..=self.n())
                .rev()
                .find(|&a| !used[a] && q.is_sink(a))
                .expect("an unreflected sink always exists");
            used[a] = true;
            seq.push(a);
            q = q.reflect(a).expect("sink");
        }
        seq
    }

    /// Checks that `seq` lists every vertex once and each is a sink at its turn.
    pub fn is_admissible(&self, seq: &[usize]) -> bool {
        if seq.len() != self.n() {
            return false;
        }
        let mut seen = vec![false; self.n() + 1];
        let mut q = self.clone();
        for &a in seq {
            if a == 0 || a > self.n() || seen[a] || !q.is_sink(a) {
                return false;
            }
            seen[a] = true;
            q = q.reflect(a).expect("sink");
        }
        q == *self
    }

    /// Every admissible sequence, by brute force.
    pub fn all_admissible_sequences(&self) -> Vec<Vec<usize>> {
        fn rec(q: &LineQuiver, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == q.n() {
                out.push(cur.clone());
                return;
            }
            for a in 1..=q.n() {
                if !used[a] && q.is_sink(a) {
                    used[a] = true;
                    cur.push(a);
                    rec(&q.reflect(a).unwrap(), used, cur, out);
                    cur.pop();
                    used[a] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(self, &mut vec![false; self.n() + 1], &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for LineQuiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for (i, d) in self.dirs.iter().enumerate() {
            match d {
                Dir::F => write!(f, "->{}", i + 2)?,
                Dir::B => write!(f, "<-{}", i + 2)?,
            }
        }
        Ok(())
    }
}

/// An embedding `Q -> M_n` sending vertex `l` to `(columns[l-1], l)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    columns: Vec<i64>,
}

/// One reflection in a transport path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// reflect at a sink, moving its column one step left
    Plus(usize),
    /// reflect at a source, moving its column one step right
    Minus(usize),
}

impl Embedding {
    /// The canonical embedding: level `n` sits in column 0 and each backward
    /// arrow `l <- l+1` moves level `l` one column to the right of level `l+1`.
    pub fn canonical(q: &LineQuiver) -> Embedding {
        let n = q.n();
        let mut columns = vec![0i64; n];
        for l in (1..n).rev() {
            columns[l - 1] = columns[l] + if q.dirs[l - 1] == Dir::B { 1 } else { 0 };
        }
        Embedding { columns }
    }

    pub fn from_columns(columns: Vec<i64>) -> Result<Embedding, ShapeError> {
        for w in columns.windows(2) {
            if w[0] - w[1] != 0 && w[0] - w[1] != 1 {
                return Err(ShapeError::BadOrientation(format!("{columns:?}")));
            }
        }
        Ok(Embedding { columns })
    }

    pub fn columns(&self) -> &[i64] {
        &self.columns
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// The orientation this embedding realizes.
    pub fn quiver(&self) -> LineQuiver {
        LineQuiver::new(
            self.columns.windows(2).map(|w| if w[0] == w[1] { Dir::F } else { Dir::B }).collect(),
        )
    }

    pub fn vertex(&self, l: usize) -> MeshVertex {
        MeshVertex::new(self.columns[l - 1], l as i64)
    }

    pub fn translate(&self, dk: i64) -> Embedding {
        Embedding { columns: self.columns.iter().map(|c| c + dk).collect() }
    }

    /// Embedding of the reflected quiver: the column of `a` moves left at a
    /// sink and right at a source, all other vertices stay.
    pub fn reflect_at(&self, a: usize) -> Result<Embedding, ShapeError> {
        let q = self.quiver();
        let mut columns = self.columns.clone();
        if q.is_sink(a) {
            columns[a - 1] -= 1;
        } else if q.is_source(a) {
            columns[a - 1] += 1;
        } else {
            return Err(ShapeError::NotSinkOrSource(a));
        }
        Ok(Embedding { columns })
    }

    /// Reflections carrying `self` to `target`, always existing for equal `n`.
    pub fn transport_path(&self, target: &Embedding) -> Result<Vec<Step>, ShapeError> {
        if self.n() != target.n() {
            return Err(ShapeError::CountMismatch(self.n(), target.n()));
        }
        let n = self.n();
        let mut cur = self.clone();
        let mut steps = Vec::new();
        loop {
            let delta: Vec<i64> = (0..n).map(|i| cur.columns[i] - target.columns[i]).collect();
            let max = *delta.iter().max().unwrap();
            let min = *delta.iter().min().unwrap();
            if max == 0 && min == 0 {
                return Ok(steps);
            }
            let q = cur.quiver();
            let step = if max > 0 {
                let a = (1..=n).find(|&a| delta[a - 1] == max && q.is_sink(a)).expect("sink in top region");
                Step::Plus(a)
            } else {
                let a = (1..=n).find(|&a| delta[a - 1] == min && q.is_source(a)).expect("source in bottom region");
                Step::Minus(a)
            };
            let a = match step {
                Step::Plus(a) | Step::Minus(a) => a,
            };
            cur = cur.reflect_at(a)?;
            steps.push(step);
        }
    }
}

/// The relation between embeddings of `Q` and `sigma_a Q` required for reflections:
/// they agree away from `a`, and the column of `a` drops by one.
pub fn satisfies_reflection_hypothesis(iq: &Embedding, iq2: &Embedding, a: usize) -> bool {
    iq.n() == iq2.n()
        && (1..=iq.n()).all(|l| {
            if l == a {
                iq2.columns[l - 1] == iq.columns[l - 1] - 1
            } else {
                iq2.columns[l - 1] == iq.columns[l - 1]
            }
        })
}
