use std::fmt;

use serde::{Deserialize, Serialize};

use super::poset::{Poset, ShapeError};

/// A vertex `(k, l)` of the mesh category; `l` runs over `0..=n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeshVertex {
    pub k: i64,
    pub l: i64,
}

impl MeshVertex {
    pub const fn new(k: i64, l: i64) -> MeshVertex {
        MeshVertex { k, l }
    }

    pub fn is_boundary(&self, n: usize) -> bool {
        self.l == 0 || self.l == n as i64 + 1
    }

    /// Arc coordinates `(k, k + l)`.
    pub fn arc(&self) -> (i64, i64) {
        (self.k, self.k + self.l)
    }

    pub fn from_arc(a: i64, b: i64) -> MeshVertex {
        MeshVertex::new(a, b - a)
    }

    pub fn leq(&self, other: &MeshVertex) -> bool {
        self.k <= other.k && self.k + self.l <= other.k + other.l
    }
}

impl fmt::Display for MeshVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

fn check_level(n: usize, v: MeshVertex) -> Result<(), ShapeError> {
    if v.l < 0 || v.l > n as i64 + 1 {
        Err(ShapeError::BadLevel(v.l, n as i64 + 1))
    } else {
        Ok(())
    }
}

/// Flip `(k,l) -> (k+l, n+1-l)`.
pub fn mesh_map_f(n: usize, v: MeshVertex) -> Result<MeshVertex, ShapeError> {
    check_level(n, v)?;
    Ok(MeshVertex::new(v.k + v.l, n as i64 + 1 - v.l))
}

pub fn mesh_map_f_inv(n: usize, v: MeshVertex) -> Result<MeshVertex, ShapeError> {
    check_level(n, v)?;
    let l = n as i64 + 1 - v.l;
    Ok(MeshVertex::new(v.k - l, l))
}

/// Translation `(k,l) -> (k-1, l)`.
pub fn mesh_map_t(n: usize, v: MeshVertex) -> Result<MeshVertex, ShapeError> {
    check_level(n, v)?;
    Ok(MeshVertex::new(v.k - 1, v.l))
}

pub fn mesh_map_t_inv(n: usize, v: MeshVertex) -> Result<MeshVertex, ShapeError> {
    check_level(n, v)?;
    Ok(MeshVertex::new(v.k + 1, v.l))
}

/// `s = f t`: `(k,l) -> (k+l-1, n+1-l)`.
pub fn mesh_map_s(n: usize, v: MeshVertex) -> Result<MeshVertex, ShapeError> {
    check_level(n, v)?;
    Ok(MeshVertex::new(v.k + v.l - 1, n as i64 + 1 - v.l))
}

pub fn mesh_map_s_inv(n: usize, v: MeshVertex) -> Result<MeshVertex, ShapeError> {
    mesh_map_t_inv(n, mesh_map_f_inv(n, v)?)
}

/// The order-reversing self-map `(k,l) -> (-k-l, l)` identifying `M_n` with its opposite.
pub fn mesh_anti(v: MeshVertex) -> MeshVertex {
    MeshVertex::new(-v.k - v.l, v.l)
}

/// A mesh square: `a -> c` vertical, `a -> b` diagonal, both into `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshSquare {
    pub a: MeshVertex,
    pub b: MeshVertex,
    pub c: MeshVertex,
    pub p: MeshVertex,
}

impl MeshSquare {
    /// The square with upper-left corner `(k,l)`, `1 <= l <= n`.
    pub fn at(k: i64, l: i64) -> MeshSquare {
        MeshSquare {
            a: MeshVertex::new(k, l),
            c: MeshVertex::new(k, l + 1),
            b: MeshVertex::new(k + 1, l - 1),
            p: MeshVertex::new(k + 1, l),
        }
    }
}

/// Vertices with `kmin <= k <= kmax` and all levels `0..=n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshWindow {
    pub n: usize,
    pub kmin: i64,
    pub kmax: i64,
}

impl MeshWindow {
    pub fn new(n: usize, kmin: i64, kmax: i64) -> MeshWindow {
        assert!(kmin <= kmax, "empty window");
        MeshWindow { n, kmin, kmax }
    }

    /// Columns `-1 ..= n+2`.
    pub fn canonical(n: usize) -> MeshWindow {
        MeshWindow::new(n, -1, n as i64 + 2)
    }

    pub fn levels(&self) -> i64 {
        self.n as i64 + 2
    }

    pub fn len(&self) -> usize {
        ((self.kmax - self.kmin + 1) * self.levels()) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: MeshVertex) -> bool {
        v.k >= self.kmin && v.k <= self.kmax && v.l >= 0 && v.l <= self.n as i64 + 1
    }

    pub fn index(&self, v: MeshVertex) -> Option<usize> {
        self.contains(v).then(|| ((v.k - self.kmin) * self.levels() + v.l) as usize)
    }

    pub fn vertex(&self, i: usize) -> MeshVertex {
        let i = i as i64;
        MeshVertex::new(self.kmin + i / self.levels(), i % self.levels())
    }

    pub fn vertices(&self) -> Vec<MeshVertex> {
        (0..self.len()).map(|i| self.vertex(i)).collect()
    }

    pub fn interior(&self) -> Vec<MeshVertex> {
        self.vertices().into_iter().filter(|v| !v.is_boundary(self.n)).collect()
    }

    /// All squares lying entirely in the window.
    pub fn squares(&self) -> Vec<MeshSquare> {
        let mut out = Vec::new();
        for k in self.kmin..self.kmax {
            for l in 1..=self.n as i64 {
                out.push(MeshSquare::at(k, l));
            }
        }
        out
    }

    pub fn poset(&self) -> Poset {
        let verts = self.vertices();
        let labels = verts.iter().map(|v| v.to_string()).collect();
        let m = verts.len();
        let leq = (0..m).map(|i| (0..m).map(|j| verts[i].leq(&verts[j])).collect()).collect();
        let mut hasse = Vec::new();
        let top = self.n as i64 + 1;
        for (i, v) in verts.iter().enumerate() {
            if v.l < top {
                hasse.push((i, self.index(MeshVertex::new(v.k, v.l + 1)).unwrap()));
            }
            if v.l >= 1 {
                if let Some(j) = self.index(MeshVertex::new(v.k + 1, v.l - 1)) {
                    hasse.push((i, j));
                }
            }
        }
        Poset::assemble(labels, hasse, leq)
    }
}

/// Element `t^a f^b` of `G_n = <f, t | ft = tf, f^2 = t^{-(n+1)}>`, kept with `b` in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymmetryElem {
    pub a: i64,
    pub b: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupStructure {
    /// `Z + Z/2`, for odd `n`
    ZPlusZ2,
    /// infinite cyclic, generated by `f t^{n/2}`, for even `n`
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryGroup {
    pub n: usize,
}

impl SymmetryGroup {
    pub fn new(n: usize) -> SymmetryGroup {
        SymmetryGroup { n }
    }

    /// Normal form of `t^a f^b` using `f^2 = t^{-(n+1)}`.
    pub fn normal_form(&self, a: i64, b: i64) -> SymmetryElem {
        let q = b.div_euclid(2);
        SymmetryElem { a: a - (self.n as i64 + 1) * q, b: b.rem_euclid(2) }
    }

    pub fn identity(&self) -> SymmetryElem {
        SymmetryElem { a: 0, b: 0 }
    }
    pub fn t(&self) -> SymmetryElem {
        SymmetryElem { a: 1, b: 0 }
    }
    pub fn f(&self) -> SymmetryElem {
        SymmetryElem { a: 0, b: 1 }
    }
    pub fn s(&self) -> SymmetryElem {
        SymmetryElem { a: 1, b: 1 }
    }

    pub fn mul(&self, x: SymmetryElem, y: SymmetryElem) -> SymmetryElem {
        self.normal_form(x.a + y.a, x.b + y.b)
    }

    pub fn inv(&self, x: SymmetryElem) -> SymmetryElem {
        self.normal_form(-x.a, -x.b)
    }

    pub fn pow(&self, x: SymmetryElem, e: i64) -> SymmetryElem {
        self.normal_form(x.a * e, x.b * e)
    }

    pub fn structure(&self) -> GroupStructure {
        if self.n % 2 == 1 {
            GroupStructure::ZPlusZ2
        } else {
            GroupStructure::Z
        }
    }

    /// For even `n`: the exponent `e` with `x = (f t^{n/2})^e`.
    pub fn generator_exponent(&self, x: SymmetryElem) -> Option<i64> {
        if self.n % 2 == 1 {
            return None;
        }
        // t = g^{-2}, f = g^{n+1}
        Some(-2 * x.a + (self.n as i64 + 1) * x.b)
    }

    pub fn apply(&self, x: SymmetryElem, v: MeshVertex) -> MeshVertex {
        let mut w = v;
        for _ in 0..x.b {
            w = mesh_map_f(self.n, w).expect("level in band");
        }
        MeshVertex::new(w.k - x.a, w.l)
    }
}

/// Objects `(a, b)` with `a <= b`; a morphism `(a,b) -> (a',b')` needs `a' <= a` and `b <= b'`.
#[derive(Debug, Clone)]
pub struct TwistedArrowCategory {
    pub objects: Vec<(usize, usize)>,
    pub poset: Poset,
}

impl TwistedArrowCategory {
    pub fn source(&self, i: usize) -> usize {
        self.objects[i].0
    }
    pub fn target(&self, i: usize) -> usize {
        self.objects[i].1
    }
}

pub fn twisted_arrow(p: &Poset) -> TwistedArrowCategory {
    let mut objects = Vec::new();
    for a in 0..p.len() {
        for b in 0..p.len() {
            if p.leq(a, b) {
                objects.push((a, b));
            }
        }
    }
    let labels = objects.iter().map(|(a, b)| format!("{}<={}", p.label(*a), p.label(*b))).collect();
    let mut rel = Vec::new();
    for (i, &(a, b)) in objects.iter().enumerate() {
        for (j, &(a2, b2)) in objects.iter().enumerate() {
            if i != j && p.leq(a2, a) && p.leq(b, b2) {
                rel.push((i, j));
            }
        }
    }
    let poset = Poset::generated(labels, &rel).expect("twisted order is acyclic");
    TwistedArrowCategory { objects, poset }
}

/// `{(a,b) : a <= b}` in `Q x Q^op`, 1-based vertices.
pub fn sieve_of_diagonal(q: &super::LineQuiver) -> Vec<(usize, usize)> {
    let n = q.n();
    let mut out = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            if q.leq(a, b) {
                out.push((a, b));
            }
        }
    }
    out
}

/// `{(a,b) : b <= a}` in `Q x Q^op`, 1-based vertices.
pub fn cosieve_of_diagonal(q: &super::LineQuiver) -> Vec<(usize, usize)> {
    sieve_of_diagonal(q).into_iter().map(|(a, b)| (b, a)).collect()
}

/// Map `M_m -> M_n` induced by a monotone `alpha: {1..m} -> {1..n}` (`alpha[i-1]` is `alpha(i)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedAlpha {
    pub m: usize,
    pub n: usize,
    values: Vec<usize>,
}

impl InducedAlpha {
    pub fn new(m: usize, n: usize, values: Vec<usize>) -> Result<InducedAlpha, ShapeError> {
        if values.len() != m || values.iter().any(|&x| x == 0 || x > n) || values.windows(2).any(|w| w[0] > w[1]) {
            return Err(ShapeError::NotMonotone(values));
        }
        Ok(InducedAlpha { m, n, values })
    }

    pub fn identity(n: usize) -> InducedAlpha {
        InducedAlpha { m: n, n, values: (1..=n).collect() }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Periodic extension to the integers.
    pub fn hat(&self, x: i64) -> i64 {
        let p = self.m as i64 + 1;
        let q = x.div_euclid(p);
        let i = x.rem_euclid(p);
        let base = if i == 0 { 0 } else { self.values[(i - 1) as usize] as i64 };
        base + (self.n as i64 + 1) * q
    }

    pub fn apply(&self, v: MeshVertex) -> MeshVertex {
        let k = self.hat(v.k);
        MeshVertex::new(k, self.hat(v.k + v.l) - k)
    }

    /// `beta . self`.
    pub fn then(&self, beta: &InducedAlpha) -> InducedAlpha {
        assert_eq!(self.n, beta.m);
        InducedAlpha { m: self.m, n: beta.n, values: self.values.iter().map(|&x| beta.values[x - 1]).collect() }
    }
}
