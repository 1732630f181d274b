//! Bounded chain complexes of poset representations.
//!
//! Grading is homological: `d: C_i -> C_{i-1}`. A complex over a product
//! shape `P x R` doubles as a diagram of complexes over `R` indexed by `P`,
//! which is how coherent diagrams and bimodules are stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{Field, Matrix};
use crate::rep::{decompose, interval_sum_rep, same_shape, Interval, Multiset, Rep, RepMap};
use crate::shapes::{LineQuiver, Poset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("d^2 != 0 at degree {deg}, vertex {vertex}")]
    NotComplex { deg: i64, vertex: usize },
    #[error("differential does not commute with arrow {arrow} at degree {deg}")]
    NotNatural { deg: i64, arrow: usize },
    #[error("not a chain map at degree {deg}, vertex {vertex}")]
    NotChainMap { deg: i64, vertex: usize },
    #[error("shapes differ")]
    ShapeMismatch,
    #[error("malformed complex data: {0}")]
    Malformed(String),
}

/// A bounded complex; degrees outside `lo..=hi` are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    shape: Arc<Poset>,
    field: Field,
    lo: i64,
    dims: Vec<Vec<usize>>,
    maps: Vec<Vec<Matrix>>,
    diffs: Vec<Vec<Matrix>>,
}

/// Degreewise, vertexwise components of a chain map; absent degrees are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainMap {
    pub comps: BTreeMap<i64, Vec<Matrix>>,
}

impl Complex {
    pub fn zero(shape: Arc<Poset>, field: Field) -> Complex {
        Complex { shape, field, lo: 0, dims: vec![], maps: vec![], diffs: vec![] }
    }

    /// Assembles a complex on degrees `lo..=hi` from closures giving the
    /// dimension, arrow matrix and differential `C_i(v) -> C_{i-1}(v)`.
    pub fn build(
        shape: Arc<Poset>,
        field: Field,
        lo: i64,
        hi: i64,
        dim: impl Fn(i64, usize) -> usize,
        mut arrow: impl FnMut(i64, usize) -> Matrix,
        mut diff: impl FnMut(i64, usize) -> Matrix,
    ) -> Complex {
        if hi < lo {
            return Complex::zero(shape, field);
        }
        let nv = shape.len();
        let ne = shape.hasse().len();
        let dims: Vec<Vec<usize>> = (lo..=hi).map(|i| (0..nv).map(|v| dim(i, v)).collect()).collect();
        let maps = (lo..=hi).map(|i| (0..ne).map(|e| arrow(i, e)).collect()).collect();
        let diffs = (lo..=hi)
            .map(|i| {
                (0..nv)
                    .map(|v| if i == lo { Matrix::zeros(field, 0, dims[0][v]) } else { diff(i, v) })
                    .collect()
            })
            .collect();
        let mut c = Complex { shape, field, lo, dims, maps, diffs };
        c.trim();
        c
    }

    /// Like [`Complex::build`] but validates every matrix shape and identity.
    pub fn from_raw(
        shape: Arc<Poset>,
        field: Field,
        lo: i64,
        dims: Vec<Vec<usize>>,
        maps: Vec<Vec<Matrix>>,
        diffs: Vec<Vec<Matrix>>,
    ) -> Result<Complex, ComplexError> {
        let len = dims.len();
        if maps.len() != len || diffs.len() != len {
            return Err(ComplexError::Malformed("degree counts differ".into()));
        }
        let hasse = shape.hasse().to_vec();
        for d in 0..len {
            if dims[d].len() != shape.len() || maps[d].len() != hasse.len() || diffs[d].len() != shape.len() {
                return Err(ComplexError::Malformed(format!("degree {}", lo + d as i64)));
            }
            for (e, &(s, t)) in hasse.iter().enumerate() {
                let m = &maps[d][e];
                if m.rows() != dims[d][t] || m.cols() != dims[d][s] {
                    return Err(ComplexError::Malformed(format!("arrow {e} in degree {}", lo + d as i64)));
                }
            }
            for v in 0..shape.len() {
                let below = if d == 0 { 0 } else { dims[d - 1][v] };
                let m = &diffs[d][v];
                if m.rows() != below || m.cols() != dims[d][v] {
                    return Err(ComplexError::Malformed(format!("differential at vertex {v}")));
                }
            }
        }
        let mut c = Complex { shape, field, lo, dims, maps, diffs };
        c.check()?;
        c.trim();
        Ok(c)
    }

    pub fn from_rep(rep: &Rep, deg: i64) -> Complex {
        let field = rep.field();
        Complex {
            shape: rep.shape().clone(),
            field,
            lo: deg,
            dims: vec![rep.dims().to_vec()],
            maps: vec![rep.maps().to_vec()],
            diffs: vec![rep.dims().iter().map(|&d| Matrix::zeros(field, 0, d)).collect()],
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Complex {
        self.trim();
        self
    }

    fn trim(&mut self) {
        while self.dims.last().is_some_and(|d| d.iter().all(|&x| x == 0)) {
            self.dims.pop();
            self.maps.pop();
            self.diffs.pop();
        }
        while self.dims.first().is_some_and(|d| d.iter().all(|&x| x == 0)) {
            self.dims.remove(0);
            self.maps.remove(0);
            self.diffs.remove(0);
            self.lo += 1;
            if let Some(first) = self.diffs.first_mut() {
                for (v, m) in first.iter_mut().enumerate() {
                    *m = Matrix::zeros(self.field, 0, self.dims[0][v]);
                }
            }
        }
        if self.dims.is_empty() {
            self.lo = 0;
        }
    }

    pub fn shape(&self) -> &Arc<Poset> {
        &self.shape
    }
    pub fn field(&self) -> Field {
        self.field
    }
    /// Lowest nonzero degree (0 for the zero complex).
    pub fn lo(&self) -> i64 {
        self.lo
    }
    /// Highest nonzero degree (`lo - 1` for the zero complex).
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }
    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }
    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo()..=self.hi()
    }

    fn idx(&self, deg: i64) -> Option<usize> {
        let d = deg - self.lo;
        (d >= 0 && (d as usize) < self.dims.len()).then_some(d as usize)
    }

    pub fn dim(&self, deg: i64, v: usize) -> usize {
        self.idx(deg).map_or(0, |d| self.dims[d][v])
    }

    /// Total dimension over all degrees and vertices.
    pub fn size(&self) -> usize {
        self.dims.iter().flatten().sum()
    }

    pub fn arrow_map(&self, deg: i64, e: usize) -> Matrix {
        match self.idx(deg) {
            Some(d) => self.maps[d][e].clone(),
            None => {
                let (s, t) = self.shape.hasse()[e];
                Matrix::zeros(self.field, self.dim(deg, t), self.dim(deg, s))
            }
        }
    }

    /// `d_deg: C_deg(v) -> C_{deg-1}(v)`.
    pub fn diff(&self, deg: i64, v: usize) -> Matrix {
        match self.idx(deg) {
            Some(d) if d > 0 => self.diffs[d][v].clone(),
            _ => Matrix::zeros(self.field, self.dim(deg - 1, v), self.dim(deg, v)),
        }
    }

    /// Structure map `C_deg(a) -> C_deg(b)` for `a <= b`.
    pub fn map_between(&self, deg: i64, a: usize, b: usize) -> Matrix {
        let path = self.shape.path(a, b).expect("a <= b");
        let mut m = Matrix::identity(self.field, self.dim(deg, a));
        for e in path {
            m = self.arrow_map(deg, e).mul(&m);
        }
        m
    }

    pub fn term(&self, deg: i64) -> Rep {
        let dims: Vec<usize> = (0..self.shape.len()).map(|v| self.dim(deg, v)).collect();
        let maps = (0..self.shape.hasse().len()).map(|e| self.arrow_map(deg, e)).collect();
        Rep::new_unchecked(self.shape.clone(), self.field, dims, maps).expect("consistent")
    }

    pub fn check(&self) -> Result<(), ComplexError> {
        for deg in self.degrees() {
            for v in 0..self.shape.len() {
                if !self.diff(deg - 1, v).mul(&self.diff(deg, v)).is_zero() {
                    return Err(ComplexError::NotComplex { deg, vertex: v });
                }
            }
            for (e, &(s, t)) in self.shape.hasse().iter().enumerate() {
                if self.arrow_map(deg - 1, e).mul(&self.diff(deg, s)) != self.diff(deg, t).mul(&self.arrow_map(deg, e)) {
                    return Err(ComplexError::NotNatural { deg, arrow: e });
                }
            }
            let term = self.term(deg);
            term.check_commutative().map_err(|_| ComplexError::NotNatural { deg, arrow: usize::MAX })?;
        }
        Ok(())
    }

    /// `(Σ^k C)_i = C_{i-k}`, differential multiplied by `(-1)^k`.
    pub fn shift(&self, k: i64) -> Complex {
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        let mut c = self.clone();
        c.lo += k;
        for layer in c.diffs.iter_mut() {
            for m in layer.iter_mut() {
                *m = m.scale(sign);
            }
        }
        c
    }

    pub fn direct_sum(parts: &[&Complex]) -> Complex {
        let first = parts.first().expect("nonempty sum");
        let shape = first.shape.clone();
        let field = first.field;
        let lo = parts.iter().filter(|c| !c.is_zero()).map(|c| c.lo()).min().unwrap_or(0);
        let hi = parts.iter().filter(|c| !c.is_zero()).map(|c| c.hi()).max().unwrap_or(-1);
        let blocks = |mats: Vec<Matrix>| Matrix::block_diag(field, &mats.iter().collect::<Vec<_>>());
        Complex::build(
            shape,
            field,
            lo,
            hi,
            |i, v| parts.iter().map(|c| c.dim(i, v)).sum(),
            |i, e| blocks(parts.iter().map(|c| c.arrow_map(i, e)).collect()),
            |i, v| blocks(parts.iter().map(|c| c.diff(i, v)).collect()),
        )
    }

    /// Pullback along an order-preserving `obj: shape -> self.shape`.
    pub fn restrict(&self, shape: Arc<Poset>, obj: &[usize]) -> Complex {
        let sh = shape.clone();
        Complex::build(
            shape,
            self.field,
            self.lo(),
            self.hi(),
            |i, v| self.dim(i, obj[v]),
            |i, e| {
                let (s, t) = sh.hasse()[e];
                self.map_between(i, obj[s], obj[t])
            },
            |i, v| self.diff(i, obj[v]),
        )
    }

    /// For a complex over `P x R` (index `p * |R| + r`), the complex over `R` at `p`.
    pub fn eval_first(&self, r_shape: &Arc<Poset>, p: usize) -> Complex {
        let m = r_shape.len();
        let obj: Vec<usize> = (0..m).map(|r| p * m + r).collect();
        self.restrict(r_shape.clone(), &obj)
    }

    /// The structure map `eval_first(a) -> eval_first(b)` for `a <= b` in `P`.
    pub fn map_first(&self, r_shape: &Arc<Poset>, a: usize, b: usize) -> ChainMap {
        let m = r_shape.len();
        let mut comps = BTreeMap::new();
        for i in self.degrees() {
            comps.insert(i, (0..m).map(|r| self.map_between(i, a * m + r, b * m + r)).collect());
        }
        ChainMap { comps }
    }

    /// Vertexwise homology dimension.
    pub fn homology_dim(&self, deg: i64, v: usize) -> usize {
        let c = self.dim(deg, v);
        if c == 0 {
            return 0;
        }
        c - self.diff(deg, v).rank() - self.diff(deg + 1, v).rank()
    }

    pub fn homology_dims(&self, deg: i64) -> Vec<usize> {
        (0..self.shape.len()).map(|v| self.homology_dim(deg, v)).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|i| (0..self.shape.len()).all(|v| self.homology_dim(i, v) == 0))
    }

    pub fn homology(&self, deg: i64) -> Homology {
        Homology::compute(self, deg)
    }

    /// Total homology dimension summed over degrees and vertices.
    pub fn homology_size(&self) -> usize {
        self.degrees().map(|i| self.homology_dims(i).iter().sum::<usize>()).sum()
    }

    /// The same data over an isomorphic copy of the shape (same element indexing).
    pub fn reshape(&self, shape: Arc<Poset>) -> Complex {
        let obj: Vec<usize> = (0..shape.len()).collect();
        self.restrict(shape, &obj)
    }

    /// A smaller quasi-isomorphic complex, obtained by discarding acyclic subcomplexes.
    pub fn minimized(&self) -> Complex {
        let zero = Complex::zero(self.shape.clone(), self.field);
        let mut cur = self.clone();
        while let Some((c, _)) = reduce_relative(&cur, &zero, &ChainMap::zero()) {
            if c.size() >= cur.size() {
                break;
            }
            cur = c;
        }
        cur
    }

    /// `⊕ Σ^i H_i` with zero differential.
    pub fn formal(&self) -> Complex {
        let hs: Vec<Rep> = self.degrees().map(|i| self.homology(i).rep).collect();
        let parts: Vec<Complex> = hs.iter().zip(self.degrees()).map(|(h, i)| Complex::from_rep(h, i)).collect();
        if parts.is_empty() {
            return Complex::zero(self.shape.clone(), self.field);
        }
        Complex::direct_sum(&parts.iter().collect::<Vec<_>>())
    }
}

/// A chosen basis of `H_i` at every vertex, with the induced representation.
#[derive(Debug, Clone)]
pub struct Homology {
    pub rep: Rep,
    /// Cycle representatives, `C_i(v) x h_v`.
    pub reps: Vec<Matrix>,
    /// Left inverse on cycles: coordinates of a cycle's homology class.
    pub coords: Vec<Matrix>,
}

impl Homology {
    fn compute(c: &Complex, deg: i64) -> Homology {
        let field = c.field;
        let nv = c.shape.len();
        let mut reps = Vec::with_capacity(nv);
        let mut coords = Vec::with_capacity(nv);
        for v in 0..nv {
            let n = c.dim(deg, v);
            let z = c.diff(deg, v).kernel_basis();
            let b = c.diff(deg + 1, v).image_basis();
            let bz = if b.cols() == 0 {
                Matrix::zeros(field, z.cols(), 0)
            } else {
                z.solve(&b).expect("fields agree").expect("boundaries are cycles")
            };
            let comp = bz.complement_basis();
            let h = z.mul(&comp);
            let w = Matrix::hstack(field, n, &[&b, &h]);
            let l = if w.cols() == 0 { Matrix::zeros(field, 0, n) } else { w.left_inverse().expect("full column rank") };
            coords.push(l.block(b.cols(), h.cols(), 0, n));
            reps.push(h);
        }
        let dims: Vec<usize> = reps.iter().map(|m| m.cols()).collect();
        let maps = c
            .shape
            .hasse()
            .iter()
            .enumerate()
            .map(|(e, &(s, t))| coords[t].mul(&c.arrow_map(deg, e)).mul(&reps[s]))
            .collect();
        let rep = Rep::new_unchecked(c.shape.clone(), field, dims, maps).expect("consistent");
        Homology { rep, reps, coords }
    }
}

impl ChainMap {
    pub fn zero() -> ChainMap {
        ChainMap::default()
    }

    pub fn identity(c: &Complex) -> ChainMap {
        let mut comps = BTreeMap::new();
        for i in c.degrees() {
            comps.insert(i, (0..c.shape.len()).map(|v| Matrix::identity(c.field, c.dim(i, v))).collect());
        }
        ChainMap { comps }
    }

    pub fn from_rep_map(f: &RepMap, deg: i64) -> ChainMap {
        ChainMap { comps: BTreeMap::from([(deg, f.comps.clone())]) }
    }

    /// Component `X_i(v) -> Y_i(v)`, zero when absent.
    pub fn comp(&self, src: &Complex, tgt: &Complex, deg: i64, v: usize) -> Matrix {
        self.comps
            .get(&deg)
            .map(|c| c[v].clone())
            .unwrap_or_else(|| Matrix::zeros(src.field, tgt.dim(deg, v), src.dim(deg, v)))
    }

    pub fn compose(&self, first: &ChainMap, src: &Complex, mid: &Complex, tgt: &Complex) -> ChainMap {
        let mut comps = BTreeMap::new();
        for i in src.degrees() {
            comps.insert(
                i,
                (0..src.shape.len()).map(|v| self.comp(mid, tgt, i, v).mul(&first.comp(src, mid, i, v))).collect(),
            );
        }
        ChainMap { comps }
    }

    pub fn add(&self, other: &ChainMap, src: &Complex, tgt: &Complex) -> ChainMap {
        let mut comps = BTreeMap::new();
        for i in src.degrees() {
            comps.insert(
                i,
                (0..src.shape.len()).map(|v| self.comp(src, tgt, i, v).add(&other.comp(src, tgt, i, v))).collect(),
            );
        }
        ChainMap { comps }
    }

    pub fn scale(&self, s: i64) -> ChainMap {
        ChainMap { comps: self.comps.iter().map(|(&i, c)| (i, c.iter().map(|m| m.scale(s)).collect())).collect() }
    }

    /// `Σ^k f`; the shifted differentials carry the same sign on both sides.
    pub fn shift(&self, k: i64) -> ChainMap {
        ChainMap { comps: self.comps.iter().map(|(&i, c)| (i + k, c.clone())).collect() }
    }

    pub fn check(&self, src: &Complex, tgt: &Complex) -> Result<(), ComplexError> {
        if !same_shape(&src.shape, &tgt.shape) {
            return Err(ComplexError::ShapeMismatch);
        }
        let lo = src.lo().min(tgt.lo());
        let hi = src.hi().max(tgt.hi()) + 1;
        for i in lo..=hi {
            for v in 0..src.shape.len() {
                let a = tgt.diff(i, v).mul(&self.comp(src, tgt, i, v));
                let b = self.comp(src, tgt, i - 1, v).mul(&src.diff(i, v));
                if a != b {
                    return Err(ComplexError::NotChainMap { deg: i, vertex: v });
                }
            }
            for (e, &(s, t)) in src.shape.hasse().iter().enumerate() {
                let a = tgt.arrow_map(i, e).mul(&self.comp(src, tgt, i, s));
                let b = self.comp(src, tgt, i, t).mul(&src.arrow_map(i, e));
                if a != b {
                    return Err(ComplexError::NotChainMap { deg: i, vertex: t });
                }
            }
        }
        Ok(())
    }

    pub fn homology_map(&self, src: &Complex, tgt: &Complex, deg: i64, hs: &Homology, ht: &Homology) -> RepMap {
        RepMap {
            comps: (0..src.shape.len())
                .map(|v| ht.coords[v].mul(&self.comp(src, tgt, deg, v)).mul(&hs.reps[v]))
                .collect(),
        }
    }

    pub fn is_quasi_iso(&self, src: &Complex, tgt: &Complex) -> bool {
        cone(src, tgt, self).is_acyclic()
    }
}

/// `cone(f)_i = X_{i-1} ⊕ Y_i`, `d = [[-d_X, 0], [f, d_Y]]`.
pub fn cone(x: &Complex, y: &Complex, f: &ChainMap) -> Complex {
    let field = x.field;
    let lo = (x.lo() + 1).min(y.lo());
    let hi = (x.hi() + 1).max(y.hi());
    let (lo, hi) = match (x.is_zero(), y.is_zero()) {
        (true, true) => (0, -1),
        (true, false) => (y.lo(), y.hi()),
        (false, true) => (x.lo() + 1, x.hi() + 1),
        _ => (lo, hi),
    };
    Complex::build(
        x.shape.clone(),
        field,
        lo,
        hi,
        |i, v| x.dim(i - 1, v) + y.dim(i, v),
        |i, e| Matrix::block_diag(field, &[&x.arrow_map(i - 1, e), &y.arrow_map(i, e)]),
        |i, v| {
            let (a0, a1, b0, b1) = (x.dim(i - 1, v), y.dim(i, v), x.dim(i - 2, v), y.dim(i - 1, v));
            let mut m = Matrix::zeros(field, b0 + b1, a0 + a1);
            m.set_block(0, 0, &x.diff(i - 1, v).neg());
            m.set_block(b0, 0, &f.comp(x, y, i - 1, v));
            m.set_block(b0, a0, &y.diff(i, v));
            m
        },
    )
}

/// Inclusion `Y -> cone(f)`.
pub fn cone_inclusion(x: &Complex, y: &Complex, c: &Complex) -> ChainMap {
    let mut comps = BTreeMap::new();
    for i in y.degrees() {
        comps.insert(
            i,
            (0..y.shape.len())
                .map(|v| {
                    let mut m = Matrix::zeros(y.field, c.dim(i, v), y.dim(i, v));
                    m.set_block(x.dim(i - 1, v), 0, &Matrix::identity(y.field, y.dim(i, v)));
                    m
                })
                .collect(),
        );
    }
    ChainMap { comps }
}

/// `fib(f)_i = X_i ⊕ Y_{i+1}`, `d = [[d_X, 0], [-f, -d_Y]]`, with the projection to `X`.
pub fn fiber(x: &Complex, y: &Complex, f: &ChainMap) -> (Complex, ChainMap) {
    let field = x.field;
    let (lo, hi) = match (x.is_zero(), y.is_zero()) {
        (true, true) => (0, -1),
        (true, false) => (y.lo() - 1, y.hi() - 1),
        (false, true) => (x.lo(), x.hi()),
        _ => (x.lo().min(y.lo() - 1), x.hi().max(y.hi() - 1)),
    };
    let fib = Complex::build(
        x.shape.clone(),
        field,
        lo,
        hi,
        |i, v| x.dim(i, v) + y.dim(i + 1, v),
        |i, e| Matrix::block_diag(field, &[&x.arrow_map(i, e), &y.arrow_map(i + 1, e)]),
        |i, v| {
            let (a0, a1, b0, b1) = (x.dim(i, v), y.dim(i + 1, v), x.dim(i - 1, v), y.dim(i, v));
            let mut m = Matrix::zeros(field, b0 + b1, a0 + a1);
            m.set_block(0, 0, &x.diff(i, v));
            m.set_block(b0, 0, &f.comp(x, y, i, v).neg());
            m.set_block(b0, a0, &y.diff(i + 1, v).neg());
            m
        },
    );
    let mut comps = BTreeMap::new();
    for i in fib.degrees() {
        comps.insert(
            i,
            (0..x.shape.len())
                .map(|v| {
                    let mut m = Matrix::zeros(field, x.dim(i, v), fib.dim(i, v));
                    m.set_block(0, 0, &Matrix::identity(field, x.dim(i, v)));
                    m
                })
                .collect(),
        );
    }
    (fib, ChainMap { comps })
}

/// Whether the strictly commuting square `A -f-> B -h-> P`, `A -g-> C -k-> P`
/// is homotopy bicartesian, tested vertexwise through the total cofiber.
#[allow(clippy::too_many_arguments)]
pub fn is_bicartesian(
    a: &Complex,
    b: &Complex,
    c: &Complex,
    p: &Complex,
    f: &ChainMap,
    g: &ChainMap,
    h: &ChainMap,
    k: &ChainMap,
) -> bool {
    let field = a.field;
    let bc = Complex::direct_sum(&[b, c]);
    let mut u = BTreeMap::new();
    for i in a.degrees() {
        u.insert(
            i,
            (0..a.shape.len())
                .map(|v| Matrix::vstack(field, a.dim(i, v), &[&f.comp(a, b, i, v), &g.comp(a, c, i, v)]))
                .collect(),
        );
    }
    let u = ChainMap { comps: u };
    let cu = cone(a, &bc, &u);
    let mut psi = BTreeMap::new();
    for i in cu.degrees() {
        psi.insert(
            i,
            (0..a.shape.len())
                .map(|v| {
                    let z = Matrix::zeros(field, p.dim(i, v), a.dim(i - 1, v));
                    Matrix::hstack(field, p.dim(i, v), &[&z, &h.comp(b, p, i, v), &k.comp(c, p, i, v).neg()])
                })
                .collect(),
        );
    }
    let psi = ChainMap { comps: psi };
    debug_assert!(psi.check(&cu, p).is_ok());
    cone(&cu, p, &psi).is_acyclic()
}

/// Projection onto the quotient by the column span of `u`, and a section of it.
fn quotient_by(u: &Matrix, dim: usize) -> (Matrix, Matrix) {
    let field = u.field();
    let basis = u.image_basis();
    if basis.cols() == 0 {
        return (Matrix::identity(field, dim), Matrix::identity(field, dim));
    }
    let comp = basis.complement_basis();
    let full = Matrix::hstack(field, dim, &[&basis, &comp]).inverse().expect("basis");
    let pi = full.block(basis.cols(), comp.cols(), 0, dim);
    (pi, comp)
}

/// `P / K` for a family of subspaces `K` stable under arrows and differentials,
/// with the quotient map.
pub fn quotient(p: &Complex, k: &HashMap<(i64, usize), Matrix>) -> (Complex, ChainMap) {
    let field = p.field();
    let r = p.shape().clone();
    let m = r.len();
    let mut proj: HashMap<(i64, usize), (Matrix, Matrix)> = HashMap::new();
    for i in p.lo() - 1..=p.hi() + 1 {
        for v in 0..m {
            let d = p.dim(i, v);
            let u = k.get(&(i, v)).cloned().unwrap_or_else(|| Matrix::zeros(field, d, 0));
            proj.insert((i, v), quotient_by(&u, d));
        }
    }
    let get = |i: i64, v: usize| &proj[&(i, v)];
    let rh = r.clone();
    let out = Complex::build(
        r.clone(),
        field,
        p.lo(),
        p.hi(),
        |i, v| get(i, v).0.rows(),
        |i, e| {
            let (s, t) = rh.hasse()[e];
            get(i, t).0.mul(&p.arrow_map(i, e)).mul(&get(i, s).1)
        },
        |i, v| get(i - 1, v).0.mul(&p.diff(i, v)).mul(&get(i, v).1),
    );
    let mut comps = BTreeMap::new();
    for i in out.degrees() {
        comps.insert(i, (0..m).map(|v| get(i, v).0.clone()).collect());
    }
    (out, ChainMap { comps })
}

/// For a complex of vector spaces `(V, d)` on degrees `lo..=hi` with subcomplexes
/// `S` and `T` (column spans), an acyclic subcomplex `K ⊇ T` with `K ∩ S = 0`
/// that is as large as the quotient `V / (S + T)` allows. `None` unless `T` is
/// acyclic and meets `S` trivially.
fn pick_acyclic(
    field: Field,
    (lo, hi): (i64, i64),
    dims: &BTreeMap<i64, usize>,
    diff: &BTreeMap<i64, Matrix>,
    sub: &BTreeMap<i64, Matrix>,
    forced: &BTreeMap<i64, Matrix>,
) -> Option<BTreeMap<i64, Matrix>> {
    let tdiff = |i: i64| -> usize {
        if i <= lo || i > hi {
            0
        } else {
            diff[&i].mul(&forced[&i]).rank()
        }
    };
    let mut bars = BTreeMap::new();
    for i in lo..=hi {
        let ti = &forced[&i];
        let both = Matrix::hstack(field, dims[&i], &[&sub[&i], ti]);
        if both.rank() != sub[&i].rank() + ti.cols() || ti.cols() != tdiff(i) + tdiff(i + 1) {
            return None;
        }
        bars.insert(i, quotient_by(&both, dims[&i]));
    }
    // lift a complement of the kernel of the induced differential in each degree
    let mut lifted: BTreeMap<i64, Matrix> = BTreeMap::new();
    for i in lo..=hi {
        let (_, sec) = &bars[&i];
        let y = if i > lo {
            let (pi_below, _) = &bars[&(i - 1)];
            let (_, piv) = pi_below.mul(&diff[&i]).mul(sec).rref();
            sec.select_cols(&piv)
        } else {
            Matrix::zeros(field, dims[&i], 0)
        };
        lifted.insert(i, y);
    }
    let mut k = BTreeMap::new();
    for i in lo..=hi {
        let dy = if i < hi { diff[&(i + 1)].mul(&lifted[&(i + 1)]) } else { Matrix::zeros(field, dims[&i], 0) };
        k.insert(i, Matrix::hstack(field, dims[&i], &[&forced[&i], &lifted[&i], &dy]));
    }
    Some(k)
}

/// Discards an acyclic subcomplex of `p` meeting the image of `s` trivially, so
/// an injective `s` stays injective after composing with the quotient map.
/// The subspaces must form a subrepresentation: they are first chosen along a
/// topological order (pushing forward what is already chosen), and when that
/// gets stuck, in reverse order inside preimages of later choices.
pub fn reduce_relative(p: &Complex, src: &Complex, s: &ChainMap) -> Option<(Complex, ChainMap)> {
    let k = reduce_forward(p, src, s).or_else(|| reduce_backward(p, src, s))?;
    if k.values().all(|m| m.cols() == 0) {
        return None;
    }
    Some(quotient(p, &k))
}

type Choice = HashMap<(i64, usize), Matrix>;

fn vertex_data(p: &Complex, r: usize) -> (BTreeMap<i64, usize>, BTreeMap<i64, Matrix>) {
    let dims = p.degrees().map(|i| (i, p.dim(i, r))).collect();
    let diffs = p.degrees().map(|i| (i, p.diff(i, r))).collect();
    (dims, diffs)
}

fn reduce_forward(p: &Complex, src: &Complex, s: &ChainMap) -> Option<Choice> {
    let field = p.field();
    let shape = p.shape().clone();
    let range = (p.lo(), p.hi());
    let mut k: Choice = HashMap::new();
    for r in shape.topological_order() {
        let forced = |i: i64| -> Matrix {
            let parts: Vec<Matrix> = shape
                .in_arrows(r)
                .iter()
                .filter_map(|&e| k.get(&(i, shape.hasse()[e].0)).map(|b| p.arrow_map(i, e).mul(b)))
                .collect();
            Matrix::hstack(field, p.dim(i, r), &parts.iter().collect::<Vec<_>>()).image_basis()
        };
        let t: BTreeMap<i64, Matrix> = p.degrees().map(|i| (i, forced(i))).collect();
        let sub: BTreeMap<i64, Matrix> = p.degrees().map(|i| (i, s.comp(src, p, i, r))).collect();
        let (dims, diffs) = vertex_data(p, r);
        for (i, m) in pick_acyclic(field, range, &dims, &diffs, &sub, &t)? {
            k.insert((i, r), m);
        }
    }
    Some(k)
}

fn reduce_backward(p: &Complex, src: &Complex, s: &ChainMap) -> Option<Choice> {
    let field = p.field();
    let shape = p.shape().clone();
    let (lo, hi) = (p.lo(), p.hi());
    let mut k: Choice = HashMap::new();
    let mut order = shape.topological_order();
    order.reverse();
    for r in order {
        // W = vectors sent into the chosen subspaces along every outgoing arrow
        let mut w = BTreeMap::new();
        for i in lo..=hi {
            let d = p.dim(i, r);
            let rows: Vec<Matrix> = shape
                .out_arrows(r)
                .iter()
                .map(|&e| {
                    let t = shape.hasse()[e].1;
                    let kt = &k[&(i, t)];
                    let pi = if kt.cols() == 0 { Matrix::identity(field, p.dim(i, t)) } else { kt.cokernel_projection() };
                    pi.mul(&p.arrow_map(i, e))
                })
                .collect();
            let wi = if rows.is_empty() {
                Matrix::identity(field, d)
            } else {
                Matrix::vstack(field, d, &rows.iter().collect::<Vec<_>>()).kernel_basis()
            };
            w.insert(i, wi);
        }
        let coords = |i: i64, m: &Matrix| -> Matrix {
            let wi = &w[&i];
            if wi.cols() == 0 {
                return Matrix::zeros(field, 0, m.cols());
            }
            wi.left_inverse().expect("basis").mul(m)
        };
        let dims: BTreeMap<i64, usize> = (lo..=hi).map(|i| (i, w[&i].cols())).collect();
        let diffs: BTreeMap<i64, Matrix> = (lo..=hi)
            .map(|i| {
                let below = if i > lo { dims[&(i - 1)] } else { 0 };
                let m = if i > lo { coords(i - 1, &p.diff(i, r).mul(&w[&i])) } else { Matrix::zeros(field, below, dims[&i]) };
                (i, m)
            })
            .collect();
        let sub: BTreeMap<i64, Matrix> = (lo..=hi)
            .map(|i| {
                let si = s.comp(src, p, i, r);
                let wi = &w[&i];
                let ker = Matrix::hstack(field, p.dim(i, r), &[wi, &si.neg()]).kernel_basis();
                (i, ker.block(0, wi.cols(), 0, ker.cols()).image_basis())
            })
            .collect();
        let none: BTreeMap<i64, Matrix> = (lo..=hi).map(|i| (i, Matrix::zeros(field, dims[&i], 0))).collect();
        let kw = pick_acyclic(field, (lo, hi), &dims, &diffs, &sub, &none)?;
        for (i, m) in kw {
            k.insert((i, r), w[&i].mul(&m));
        }
    }
    Some(k)
}

/// An object of `D^b(kQ)` in normal form: interval summands per degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DerivedObject(pub BTreeMap<i64, Multiset>);

impl DerivedObject {
    pub fn new() -> DerivedObject {
        DerivedObject::default()
    }

    pub fn single(iv: Interval, deg: i64) -> DerivedObject {
        DerivedObject(BTreeMap::from([(deg, Multiset::single(iv))]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(|m| m.is_empty())
    }

    /// Total number of indecomposable summands.
    pub fn count(&self) -> usize {
        self.0.values().map(|m| m.count()).sum()
    }

    /// The unique summand, if indecomposable.
    pub fn as_single(&self) -> Option<(Interval, i64)> {
        let nz: Vec<_> = self.0.iter().filter(|(_, m)| !m.is_empty()).collect();
        match nz.as_slice() {
            [(&d, m)] => m.as_single().map(|iv| (iv, d)),
            _ => None,
        }
    }

    pub fn shift(&self, k: i64) -> DerivedObject {
        DerivedObject(self.0.iter().map(|(&d, m)| (d + k, m.clone())).collect())
    }

    pub fn to_complex(&self, q: &LineQuiver, field: Field) -> Complex {
        let reps: Vec<(i64, Rep)> = self.0.iter().map(|(&d, m)| (d, interval_sum_rep(q, field, m))).collect();
        let parts: Vec<Complex> = reps.iter().map(|(d, r)| Complex::from_rep(r, *d)).collect();
        if parts.is_empty() {
            return Complex::zero(Arc::new(q.poset()), field);
        }
        let shape = parts[0].shape.clone();
        let parts: Vec<Complex> = parts.into_iter().map(|c| Complex { shape: shape.clone(), ..c }).collect();
        Complex::direct_sum(&parts.iter().collect::<Vec<_>>())
    }
}

impl fmt::Display for DerivedObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&d, m) in self.0.iter().rev() {
            for (iv, mult) in m.iter() {
                let base = match d {
                    0 => iv.to_string(),
                    1 => format!("Σ{iv}"),
                    _ => format!("Σ^{d}{iv}"),
                };
                parts.push(if mult == 1 { base } else { format!("({base})^{mult}") });
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology decomposition of a complex of `kQ`-modules.
pub fn normal_form(q: &LineQuiver, c: &Complex) -> DerivedObject {
    let mut out = BTreeMap::new();
    for i in c.degrees() {
        let m = decompose(q, &c.homology(i).rep);
        if !m.is_empty() {
            out.insert(i, m);
        }
    }
    DerivedObject(out)
}

/// `dim Hom_D(X, Σ^d Y)` over a hereditary line quiver.
pub fn derived_hom_dim(q: &LineQuiver, x: &Complex, y: &Complex, d: i64) -> usize {
    debug_assert_eq!(q.n(), x.shape.len());
    hereditary_hom_dim(x, y, d)
}

/// `dim Hom_D(X, Σ^d Y)` over a poset whose incidence algebra is hereditary
/// (a free poset), via `Ext^1 = Hom - χ` on homology.
pub fn hereditary_hom_dim(x: &Complex, y: &Complex, d: i64) -> usize {
    let hx: BTreeMap<i64, Rep> = x.degrees().map(|i| (i, x.homology(i).rep)).collect();
    let hy: BTreeMap<i64, Rep> = y.degrees().map(|i| (i, y.homology(i).rep)).collect();
    let euler = |a: &Rep, b: &Rep| -> i64 {
        let diag: i64 = (0..a.shape().len()).map(|v| (a.dim(v) * b.dim(v)) as i64).sum();
        diag - a.shape().hasse().iter().map(|&(s, t)| (a.dim(s) * b.dim(t)) as i64).sum::<i64>()
    };
    let mut total = 0;
    for (&i, a) in &hx {
        if a.is_zero() {
            continue;
        }
        if let Some(b) = hy.get(&(i - d)) {
            total += a.hom_dim(b).expect("same shape");
        }
        if let Some(b) = hy.get(&(i - d + 1)) {
            let h = a.hom_dim(b).expect("same shape") as i64;
            total += (h - euler(a, b)) as usize;
        }
    }
    total
}

/// Degreewise isomorphism of homology representations.
pub fn homology_isomorphic(a: &Complex, b: &Complex) -> bool {
    if a.homology_size() != b.homology_size() {
        return false;
    }
    let lo = a.lo().min(b.lo());
    let hi = a.hi().max(b.hi());
    (lo..=hi).all(|i| {
        if a.homology_dims(i) != b.homology_dims(i) {
            return false;
        }
        let ha = a.homology(i).rep;
        let hb = b.homology(i).rep;
        ha.is_zero() || ha.is_isomorphic(&hb)
    })
}
