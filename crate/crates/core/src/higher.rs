//! Higher triangles in the homotopy category of complexes of vector spaces.
//!
//! An [`NTriangle`] stores graded vector spaces on a window of `M_n`, graded
//! matrices on its covering arrows and the identifications
//! `phi_v: F(f v) -> Σ F(v)`. Standard triangles come from coherent diagrams
//! built by [`build_ar`]: values and maps are taken on homology, and `phi` is
//! read off the square `v -> (k, n+1)`, `v -> (k+l, 0)` with far corner `f v`.
//! A triangle produced from a coherent diagram remembers it, which lets
//! [`canonical_mismatch`] compare its `phi` with the one of the restricted
//! diagram on the nose.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ar::{build_ar, ARDiagram, ArError};
use crate::derived::{cone, is_bicartesian, ChainMap, Complex, Homology};
use crate::linalg::{Field, Matrix};
use crate::rep::{random_invertible, Rep, RepMap};
use crate::shapes::{mesh_map_f, mesh_map_f_inv, InducedAlpha, LineQuiver, MeshSquare, MeshVertex, MeshWindow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HigherError {
    #[error(transparent)]
    Ar(#[from] ArError),
    #[error("vertex {0} outside the stored window")]
    OutsideWindow(MeshVertex),
    #[error("window too narrow to extend: need at least {0} columns")]
    NarrowWindow(i64),
    #[error("square at {0} is not bicartesian")]
    NotBicartesian(MeshVertex),
    #[error("triangles live on different windows or levels")]
    Mismatch,
    #[error("malformed base: {0}")]
    BadBase(String),
}

/// A graded vector space, `degree -> dimension`, zero entries omitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Graded(pub BTreeMap<i64, usize>);

impl Graded {
    pub fn new(dims: impl IntoIterator<Item = (i64, usize)>) -> Graded {
        let mut m = BTreeMap::new();
        for (d, k) in dims {
            if k > 0 {
                *m.entry(d).or_insert(0) += k;
            }
        }
        Graded(m)
    }

    pub fn dim(&self, i: i64) -> usize {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.keys().copied()
    }

    /// `Σ^k`: degree `i` moves to `i + k`.
    pub fn shift(&self, k: i64) -> Graded {
        Graded(self.0.iter().map(|(&d, &m)| (d + k, m)).collect())
    }

    fn of_homology(hom: &BTreeMap<i64, Homology>) -> Graded {
        Graded::new(hom.iter().map(|(&i, h)| (i, h.rep.dim(0))))
    }
}

impl fmt::Display for Graded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(&d, &m)| {
                let base = if m == 1 { "k".to_string() } else { format!("k^{m}") };
                if d == 0 {
                    base
                } else {
                    format!("{base}[{d}]")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A degree-preserving linear map between graded spaces; one matrix for
/// every degree where source and target are both nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedMap(pub BTreeMap<i64, Matrix>);

impl GradedMap {
    pub fn build(src: &Graded, tgt: &Graded, mut comp: impl FnMut(i64) -> Matrix) -> GradedMap {
        let mut m = BTreeMap::new();
        for i in src.degrees() {
            if tgt.dim(i) > 0 {
                let c = comp(i);
                assert_eq!((c.rows(), c.cols()), (tgt.dim(i), src.dim(i)), "graded component size at {i}");
                m.insert(i, c);
            }
        }
        GradedMap(m)
    }

    pub fn zero(field: Field, src: &Graded, tgt: &Graded) -> GradedMap {
        GradedMap::build(src, tgt, |i| Matrix::zeros(field, tgt.dim(i), src.dim(i)))
    }

    pub fn identity(field: Field, g: &Graded) -> GradedMap {
        GradedMap::build(g, g, |i| Matrix::identity(field, g.dim(i)))
    }

    pub fn comp(&self, field: Field, i: i64, src: &Graded, tgt: &Graded) -> Matrix {
        self.0.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(field, tgt.dim(i), src.dim(i)))
    }

    /// `self . first` for `a -first-> b -self-> c`.
    pub fn after(&self, first: &GradedMap, field: Field, a: &Graded, b: &Graded, c: &Graded) -> GradedMap {
        GradedMap::build(a, c, |i| self.comp(field, i, b, c).mul(&first.comp(field, i, a, b)))
    }

    pub fn add(&self, other: &GradedMap, field: Field, src: &Graded, tgt: &Graded) -> GradedMap {
        GradedMap::build(src, tgt, |i| self.comp(field, i, src, tgt).add(&other.comp(field, i, src, tgt)))
    }

    pub fn scale(&self, s: i64) -> GradedMap {
        GradedMap(self.0.iter().map(|(&i, m)| (i, m.scale(s))).collect())
    }

    pub fn shift(&self, k: i64) -> GradedMap {
        GradedMap(self.0.iter().map(|(&i, m)| (i + k, m.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(|m| m.is_zero())
    }

    pub fn is_iso(&self, src: &Graded, tgt: &Graded) -> bool {
        src == tgt && self.0.len() == src.0.len() && self.0.values().all(|m| m.is_invertible())
    }

    pub fn inverse(&self, src: &Graded, tgt: &Graded) -> Option<GradedMap> {
        if !self.is_iso(src, tgt) {
            return None;
        }
        Some(GradedMap(self.0.iter().map(|(&i, m)| (i, m.inverse().expect("checked invertible"))).collect()))
    }
}

/// The linear base `X_1 -> ... -> X_n` of a triangle, in the homotopy category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Base {
    pub field: Field,
    pub values: Vec<Graded>,
    /// `maps[l-1]: X_l -> X_{l+1}`.
    pub maps: Vec<GradedMap>,
}

impl Base {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn zero(n: usize, field: Field) -> Base {
        Base { field, values: vec![Graded::default(); n], maps: vec![GradedMap::default(); n.saturating_sub(1)] }
    }

    /// Random graded dimensions up to `max_dim` in degrees `0` and `1`, random maps.
    pub fn random<R: Rng + ?Sized>(n: usize, field: Field, max_dim: usize, rng: &mut R) -> Base {
        let values: Vec<Graded> =
            (0..n).map(|_| Graded::new((0..2).map(|d| (d, rng.gen_range(0..=max_dim))))).collect();
        let maps = (1..n)
            .map(|l| {
                let (s, t) = (&values[l - 1], &values[l]);
                GradedMap::build(s, t, |i| Matrix::random(field, t.dim(i), s.dim(i), rng))
            })
            .collect();
        Base { field, values, maps }
    }

    pub fn check(&self) -> Result<(), HigherError> {
        if self.maps.len() + 1 != self.n().max(1) {
            return Err(HigherError::BadBase(format!("{} values, {} maps", self.n(), self.maps.len())));
        }
        for (l, m) in self.maps.iter().enumerate() {
            let (s, t) = (&self.values[l], &self.values[l + 1]);
            if *m != GradedMap::build(s, t, |i| m.comp(self.field, i, s, t)) {
                return Err(HigherError::BadBase(format!("map {} has wrong degrees or sizes", l + 1)));
            }
        }
        Ok(())
    }

    /// The degree-`d` part as a representation of the linear quiver.
    pub fn degree_rep(&self, d: i64) -> Rep {
        let q = LineQuiver::linear(self.n());
        let shape = Arc::new(q.poset());
        let dims: Vec<usize> = self.values.iter().map(|g| g.dim(d)).collect();
        let maps = shape
            .hasse()
            .iter()
            .map(|&(s, t)| self.maps[s].comp(self.field, d, &self.values[s], &self.values[t]))
            .collect();
        Rep::new_unchecked(shape, self.field, dims, maps).expect("sizes match")
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.values.iter().flat_map(|g| g.degrees()).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// The base as a complex with zero differential over the linear quiver.
    pub fn to_complex(&self) -> Complex {
        let q = LineQuiver::linear(self.n());
        let shape = Arc::new(q.poset());
        let ds = self.degrees();
        if ds.is_empty() {
            return Complex::zero(shape, self.field);
        }
        let sh = shape.clone();
        Complex::build(
            shape,
            self.field,
            ds[0],
            *ds.last().unwrap(),
            |i, v| self.values[v].dim(i),
            |i, e| {
                let (s, t) = sh.hasse()[e];
                self.maps[s].comp(self.field, i, &self.values[s], &self.values[t])
            },
            |i, v| Matrix::zeros(self.field, self.values[v].dim(i - 1), self.values[v].dim(i)),
        )
    }

    /// A random morphism `self -> other` of graded representations.
    pub fn random_morphism<R: Rng + ?Sized>(&self, other: &Base, rng: &mut R) -> Vec<GradedMap> {
        let field = self.field;
        let mut comps: Vec<BTreeMap<i64, Matrix>> = vec![BTreeMap::new(); self.n()];
        for d in self.degrees() {
            let (a, b) = (self.degree_rep(d), other.degree_rep(d));
            let basis = a.hom_space(&b).expect("same shape");
            let mut acc: Vec<Matrix> = (0..self.n()).map(|l| Matrix::zeros(field, b.dim(l), a.dim(l))).collect();
            for f in &basis {
                let c = Matrix::random(field, 1, 1, rng);
                for (l, m) in f.comps.iter().enumerate() {
                    acc[l] = acc[l].add(&m.scale_by(&c));
                }
            }
            for (l, m) in acc.into_iter().enumerate() {
                if m.rows() > 0 && m.cols() > 0 {
                    comps[l].insert(d, m);
                }
            }
        }
        comps.into_iter().map(GradedMap).collect()
    }
}

/// Maps of mesh categories along which triangles are pulled back.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Pull {
    T,
    TInv,
    F(usize),
    Alpha(InducedAlpha),
}

impl Pull {
    fn apply(&self, v: MeshVertex) -> MeshVertex {
        match self {
            Pull::T => MeshVertex::new(v.k - 1, v.l),
            Pull::TInv => MeshVertex::new(v.k + 1, v.l),
            Pull::F(n) => mesh_map_f(*n, v).expect("level in range"),
            Pull::Alpha(a) => a.apply(v),
        }
    }
}

/// The coherent diagram a triangle was read off from, precomposed with `rho`.
#[derive(Debug, Clone)]
struct Model {
    diagram: Arc<ARDiagram>,
    /// `rho = pulls[0] . pulls[1] . ...`.
    pulls: Vec<Pull>,
}

impl Model {
    fn place(&self, v: MeshVertex) -> MeshVertex {
        self.pulls.iter().rev().fold(v, |w, p| p.apply(w))
    }

    fn with(&self, p: Pull) -> Model {
        let mut pulls = self.pulls.clone();
        pulls.push(p);
        Model { diagram: self.diagram.clone(), pulls }
    }
}

/// Homology of the values of a coherent diagram, computed once per vertex.
struct HomologyCache<'a> {
    d: &'a ARDiagram,
    data: HashMap<MeshVertex, (Complex, BTreeMap<i64, Homology>)>,
}

impl<'a> HomologyCache<'a> {
    fn new(d: &'a ARDiagram) -> Self {
        HomologyCache { d, data: HashMap::new() }
    }

    fn get(&mut self, v: MeshVertex) -> Result<&(Complex, BTreeMap<i64, Homology>), HigherError> {
        if !self.data.contains_key(&v) {
            let c = self.d.value(v)?;
            let hom = c.degrees().map(|i| (i, c.homology(i))).filter(|(_, h)| h.rep.dim(0) > 0).collect();
            self.data.insert(v, (c, hom));
        }
        Ok(&self.data[&v])
    }

    fn graded(&mut self, v: MeshVertex) -> Result<Graded, HigherError> {
        Ok(Graded::of_homology(&self.get(v)?.1))
    }

    /// The map induced on homology by `u <= w`.
    fn map(&mut self, u: MeshVertex, w: MeshVertex) -> Result<GradedMap, HigherError> {
        let (gu, gw) = (self.graded(u)?, self.graded(w)?);
        let cm = self.d.map(u, w)?;
        let (cu, hu) = self.get(u)?.clone();
        let (cw, hw) = self.get(w)?.clone();
        Ok(GradedMap::build(&gu, &gw, |i| hw[&i].coords[0].mul(&cm.comp(&cu, &cw, i, 0)).mul(&hu[&i].reps[0])))
    }

    /// `H(p) -> H(Σ a)` from a commuting square `a -> b -> p`, `a -> c -> p`
    /// with acyclic `b` and `c`: the comparison `cone(a -> b ⊕ c) -> p` is
    /// inverted on homology and followed by the projection to `Σ a`.
    fn connecting(&mut self, a: MeshVertex, b: MeshVertex, c: MeshVertex, p: MeshVertex) -> Result<GradedMap, HigherError> {
        let field = self.d.complex.field();
        let (ga, gp) = (self.graded(a)?, self.graded(p)?);
        let sa = ga.shift(1);
        if gp.is_zero() && ga.is_zero() {
            return Ok(GradedMap::default());
        }
        let (xa, ha) = self.get(a)?.clone();
        let (xb, _) = self.get(b)?.clone();
        let (xc, _) = self.get(c)?.clone();
        let (xp, hp) = self.get(p)?.clone();
        let (f, g, h, k) = (self.d.map(a, b)?, self.d.map(a, c)?, self.d.map(b, p)?, self.d.map(c, p)?);
        let y = Complex::direct_sum(&[&xb, &xc]);
        let mut fg = ChainMap::default();
        for i in xa.degrees() {
            fg.comps.insert(i, vec![Matrix::vstack(field, xa.dim(i, 0), &[&f.comp(&xa, &xb, i, 0), &g.comp(&xa, &xc, i, 0)])]);
        }
        let cn = cone(&xa, &y, &fg);
        let mut sq_bad = false;
        let out = GradedMap::build(&gp, &sa, |i| {
            let hc = cn.homology(i);
            let (da, db, dc) = (xa.dim(i - 1, 0), xb.dim(i, 0), xc.dim(i, 0));
            let kappa = Matrix::hstack(
                field,
                xp.dim(i, 0),
                &[&Matrix::zeros(field, xp.dim(i, 0), da), &h.comp(&xb, &xp, i, 0), &k.comp(&xc, &xp, i, 0).neg()],
            );
            let kstar = hp[&i].coords[0].mul(&kappa).mul(&hc.reps[0]);
            let proj = Matrix::hstack(field, da, &[&Matrix::identity(field, da), &Matrix::zeros(field, da, db + dc)]);
            let pstar = ha[&(i - 1)].coords[0].mul(&proj).mul(&hc.reps[0]);
            match kstar.inverse() {
                Ok(inv) => pstar.mul(&inv),
                Err(_) => {
                    sq_bad = true;
                    Matrix::zeros(field, sa.dim(i), gp.dim(i))
                }
            }
        });
        if sq_bad || !out.is_iso(&gp, &sa) {
            return Err(HigherError::NotBicartesian(a));
        }
        Ok(out)
    }
}

/// An `n`-triangle on a window of `M_n`.
#[derive(Debug, Clone)]
pub struct NTriangle {
    pub n: usize,
    pub field: Field,
    pub window: MeshWindow,
    values: BTreeMap<MeshVertex, Graded>,
    arrows: BTreeMap<(MeshVertex, MeshVertex), GradedMap>,
    phi: BTreeMap<MeshVertex, GradedMap>,
    model: Option<Model>,
}

impl PartialEq for NTriangle {
    fn eq(&self, other: &NTriangle) -> bool {
        self.n == other.n
            && self.field == other.field
            && self.window == other.window
            && self.values == other.values
            && self.arrows == other.arrows
            && self.phi == other.phi
    }
}

/// Covering arrows of the mesh inside a window.
pub fn window_arrows(w: &MeshWindow) -> Vec<(MeshVertex, MeshVertex)> {
    let mut out = Vec::new();
    let top = w.n as i64 + 1;
    for v in w.vertices() {
        if v.l < top {
            out.push((v, MeshVertex::new(v.k, v.l + 1)));
        }
        let d = MeshVertex::new(v.k + 1, v.l - 1);
        if v.l >= 1 && w.contains(d) {
            out.push((v, d));
        }
    }
    out
}

/// Interior vertices `v` of `w` with `f v` in `w`.
pub fn phi_domain(w: &MeshWindow) -> Vec<MeshVertex> {
    w.interior().into_iter().filter(|&v| w.contains(mesh_map_f(w.n, v).expect("level"))).collect()
}

fn model_window(n: usize) -> MeshWindow {
    let p = n as i64 + 1;
    MeshWindow::new(n, -1 - 2 * p, n as i64 + 2 + 3 * p)
}

/// A triangle isomorphism or morphism, one graded map per window vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleMap {
    pub comps: BTreeMap<MeshVertex, GradedMap>,
}

/// Result of [`is_distinguished`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub distinguished: bool,
    pub reason: Option<String>,
}

impl NTriangle {
    /// Assembles a triangle from raw data; missing entries are zero.
    pub fn from_parts(
        n: usize,
        field: Field,
        window: MeshWindow,
        values: BTreeMap<MeshVertex, Graded>,
        arrows: BTreeMap<(MeshVertex, MeshVertex), GradedMap>,
        phi: BTreeMap<MeshVertex, GradedMap>,
    ) -> NTriangle {
        let mut t = NTriangle { n, field, window, values: BTreeMap::new(), arrows: BTreeMap::new(), phi: BTreeMap::new(), model: None };
        for v in window.vertices() {
            t.values.insert(v, values.get(&v).cloned().unwrap_or_default());
        }
        for (u, w) in window_arrows(&window) {
            let (gu, gw) = (t.values[&u].clone(), t.values[&w].clone());
            let m = arrows.get(&(u, w)).cloned().unwrap_or_default();
            t.arrows.insert((u, w), GradedMap::build(&gu, &gw, |i| m.comp(field, i, &gu, &gw)));
        }
        for v in phi_domain(&window) {
            let (src, tgt) = (t.value_at_f(v), t.values[&v].shift(1));
            let m = phi.get(&v).cloned().unwrap_or_default();
            t.phi.insert(v, GradedMap::build(&src, &tgt, |i| m.comp(field, i, &src, &tgt)));
        }
        t
    }

    fn value_at_f(&self, v: MeshVertex) -> Graded {
        self.values[&mesh_map_f(self.n, v).expect("level")].clone()
    }

    pub fn value(&self, v: MeshVertex) -> Option<&Graded> {
        self.values.get(&v)
    }

    pub fn arrow(&self, u: MeshVertex, w: MeshVertex) -> Option<&GradedMap> {
        self.arrows.get(&(u, w))
    }

    pub fn phi(&self, v: MeshVertex) -> Option<&GradedMap> {
        self.phi.get(&v)
    }

    pub fn has_model(&self) -> bool {
        self.model.is_some()
    }

    pub fn values(&self) -> &BTreeMap<MeshVertex, Graded> {
        &self.values
    }

    pub fn arrows(&self) -> &BTreeMap<(MeshVertex, MeshVertex), GradedMap> {
        &self.arrows
    }

    pub fn phis(&self) -> &BTreeMap<MeshVertex, GradedMap> {
        &self.phi
    }

    /// Forgets the coherent diagram, keeping only homotopy-category data.
    pub fn forget_model(&self) -> NTriangle {
        NTriangle { model: None, ..self.clone() }
    }

    /// `F(u <= w)`, composed along covering arrows.
    pub fn map_le(&self, u: MeshVertex, w: MeshVertex) -> Result<GradedMap, HigherError> {
        for x in [u, w] {
            if !self.window.contains(x) {
                return Err(HigherError::OutsideWindow(x));
            }
        }
        assert!(u.leq(&w), "{u} is not below {w}");
        let top = self.n as i64 + 1;
        let (mut a, mut b) = u.arc();
        let (a1, b1) = w.arc();
        let mut acc = GradedMap::identity(self.field, &self.values[&u]);
        while (a, b) != (a1, b1) {
            let cur = MeshVertex::from_arc(a, b);
            let next = if a < a1 && b - a >= 1 {
                (a + 1, b)
            } else {
                debug_assert!(b < b1 && b + 1 - a <= top);
                (a, b + 1)
            };
            let nv = MeshVertex::from_arc(next.0, next.1);
            let e = &self.arrows[&(cur, nv)];
            acc = e.after(&acc, self.field, &self.values[&u], &self.values[&cur], &self.values[&nv]);
            (a, b) = next;
        }
        Ok(acc)
    }

    /// The base `F(0,1) -> ... -> F(0,n)` along the linear embedding.
    pub fn base(&self) -> Base {
        let values: Vec<Graded> = (1..=self.n).map(|l| self.values[&MeshVertex::new(0, l as i64)].clone()).collect();
        let maps = (1..self.n)
            .map(|l| self.arrows[&(MeshVertex::new(0, l as i64), MeshVertex::new(0, l as i64 + 1))].clone())
            .collect();
        Base { field: self.field, values, maps }
    }

    /// Boundary vanishing, commuting mesh squares, `phi` invertible and natural.
    pub fn validate(&self) -> Result<(), String> {
        let field = self.field;
        for v in self.window.vertices() {
            if v.is_boundary(self.n) && !self.values[&v].is_zero() {
                return Err(format!("boundary value at {v}"));
            }
        }
        for sq in self.window.squares() {
            let left = self.arrows[&(sq.b, sq.p)].after(&self.arrows[&(sq.a, sq.b)], field, &self.values[&sq.a], &self.values[&sq.b], &self.values[&sq.p]);
            let right = self.arrows[&(sq.c, sq.p)].after(&self.arrows[&(sq.a, sq.c)], field, &self.values[&sq.a], &self.values[&sq.c], &self.values[&sq.p]);
            if left != right {
                return Err(format!("square at {} does not commute", sq.a));
            }
        }
        for (&v, p) in &self.phi {
            if !p.is_iso(&self.value_at_f(v), &self.values[&v].shift(1)) {
                return Err(format!("phi at {v} is not invertible"));
            }
        }
        for (u, w) in window_arrows(&self.window) {
            let (Some(pu), Some(pw)) = (self.phi.get(&u), self.phi.get(&w)) else { continue };
            let (fu, fw) = (mesh_map_f(self.n, u).unwrap(), mesh_map_f(self.n, w).unwrap());
            let ffe = self.map_le(fu, fw).map_err(|e| e.to_string())?;
            let lhs = pw.after(&ffe, field, &self.values[&fu], &self.values[&fw], &self.values[&w].shift(1));
            let se = self.arrows[&(u, w)].shift(1);
            let rhs = se.after(pu, field, &self.values[&fu], &self.values[&u].shift(1), &self.values[&w].shift(1));
            if lhs != rhs {
                return Err(format!("phi is not natural along {u} -> {w}"));
            }
        }
        Ok(())
    }

    /// The same triangle on a wider window.
    pub fn extended(&self, kmin: i64, kmax: i64) -> Result<NTriangle, HigherError> {
        let kmin = kmin.min(self.window.kmin);
        let kmax = kmax.max(self.window.kmax);
        let target = MeshWindow::new(self.n, kmin, kmax);
        if target == self.window {
            return Ok(self.clone());
        }
        if let Some(m) = &self.model {
            if let Ok(t) = from_model(m, self.n, target) {
                return Ok(t);
            }
        }
        let mut t = self.forget_model();
        while t.window.kmax < kmax {
            t = t.extend_right()?;
        }
        while t.window.kmin > kmin {
            t = t.extend_left()?;
        }
        Ok(t)
    }

    fn extend_right(&self) -> Result<NTriangle, HigherError> {
        let n = self.n;
        let width = self.window.kmax - self.window.kmin + 1;
        if width < n as i64 + 1 {
            return Err(HigherError::NarrowWindow(n as i64 + 1));
        }
        let field = self.field;
        let k = self.window.kmax + 1;
        let mut t = self.clone();
        t.window = MeshWindow::new(n, self.window.kmin, k);
        let top = n as i64 + 1;
        for l in 0..=top {
            let w = MeshVertex::new(k, l);
            if l == 0 || l == top {
                t.values.insert(w, Graded::default());
                continue;
            }
            let v = mesh_map_f_inv(n, w).expect("level");
            let g = t.values[&v].shift(1);
            t.values.insert(w, g.clone());
            t.phi.insert(v, GradedMap::identity(field, &g));
        }
        for l in 0..=top {
            let w = MeshVertex::new(k, l);
            let mut preds = Vec::new();
            if l >= 1 {
                preds.push(MeshVertex::new(k, l - 1));
            }
            if l < top {
                preds.push(MeshVertex::new(k - 1, l + 1));
            }
            for u in preds {
                let (gu, gw) = (t.values[&u].clone(), t.values[&w].clone());
                let m = if u.is_boundary(n) || w.is_boundary(n) {
                    GradedMap::zero(field, &gu, &gw)
                } else {
                    let (fu, fw) = (mesh_map_f_inv(n, u).unwrap(), mesh_map_f_inv(n, w).unwrap());
                    let pu = t.phi.get(&fu).ok_or(HigherError::NarrowWindow(n as i64 + 1))?;
                    let se = t.arrows[&(fu, fw)].shift(1);
                    se.after(pu, field, &gu, &t.values[&fu].shift(1), &gw)
                };
                t.arrows.insert((u, w), m);
            }
        }
        Ok(t)
    }

    fn extend_left(&self) -> Result<NTriangle, HigherError> {
        let n = self.n;
        let width = self.window.kmax - self.window.kmin + 1;
        if width < n as i64 + 1 {
            return Err(HigherError::NarrowWindow(n as i64 + 1));
        }
        let field = self.field;
        let k = self.window.kmin - 1;
        let mut t = self.clone();
        t.window = MeshWindow::new(n, k, self.window.kmax);
        let top = n as i64 + 1;
        for l in 0..=top {
            let v = MeshVertex::new(k, l);
            if l == 0 || l == top {
                t.values.insert(v, Graded::default());
                continue;
            }
            let fv = mesh_map_f(n, v).expect("level");
            let g = t.values[&fv].clone();
            t.values.insert(v, g.shift(-1));
            t.phi.insert(v, GradedMap::identity(field, &g));
        }
        for l in (0..=top).rev() {
            let v = MeshVertex::new(k, l);
            let mut succs = Vec::new();
            if l < top {
                succs.push(MeshVertex::new(k, l + 1));
            }
            if l >= 1 {
                succs.push(MeshVertex::new(k + 1, l - 1));
            }
            for u in succs {
                let (gv, gu) = (t.values[&v].clone(), t.values[&u].clone());
                let m = if u.is_boundary(n) || v.is_boundary(n) {
                    GradedMap::zero(field, &gv, &gu)
                } else {
                    let (fv, fu) = (mesh_map_f(n, v).unwrap(), mesh_map_f(n, u).unwrap());
                    let pu = t.phi.get(&u).ok_or(HigherError::NarrowWindow(n as i64 + 1))?;
                    let fe = t.arrows[&(fv, fu)].clone();
                    pu.after(&fe, field, &t.values[&fv], &t.values[&fu], &gu.shift(1)).shift(-1)
                };
                t.arrows.insert((v, u), m);
            }
        }
        Ok(t)
    }

    /// Restriction along `rho: M_m -> M_n` commuting with the flips, with
    /// `phi` multiplied by `sign`.
    fn pull(&self, m: usize, pull: Pull, sign: i64) -> Result<NTriangle, HigherError> {
        let field = self.field;
        let window = MeshWindow::canonical(m).with_columns(self.window_for(m, &pull));
        let mut need: Vec<MeshVertex> = window.vertices().iter().map(|&v| pull.apply(v)).collect();
        for v in phi_domain(&window) {
            let fv = mesh_map_f(self.n, pull.apply(v)).expect("level");
            need.push(fv);
        }
        let kmin = need.iter().map(|v| v.k).min().unwrap();
        let kmax = need.iter().map(|v| v.k).max().unwrap();
        let big = self.extended(kmin, kmax)?;
        let mut values = BTreeMap::new();
        for v in window.vertices() {
            values.insert(v, big.values[&pull.apply(v)].clone());
        }
        let mut arrows = BTreeMap::new();
        for (u, w) in window_arrows(&window) {
            arrows.insert((u, w), big.map_le(pull.apply(u), pull.apply(w))?);
        }
        let mut phi = BTreeMap::new();
        for v in phi_domain(&window) {
            let rv = pull.apply(v);
            let p = match big.phi.get(&rv) {
                Some(p) => p.scale(sign),
                None => GradedMap::default(),
            };
            phi.insert(v, p);
        }
        let mut t = NTriangle::from_parts(m, field, window, values, arrows, phi);
        t.model = big.model.as_ref().map(|md| md.with(pull));
        Ok(t)
    }

    fn window_for(&self, m: usize, pull: &Pull) -> (i64, i64) {
        match pull {
            Pull::Alpha(_) => (MeshWindow::canonical(m).kmin, MeshWindow::canonical(m).kmax),
            _ => (self.window.kmin, self.window.kmax),
        }
    }

    /// Translate `t^*(F, phi) = (F t, phi t)`.
    pub fn translate(&self) -> Result<NTriangle, HigherError> {
        self.pull(self.n, Pull::T, 1)
    }

    pub fn translate_inv(&self) -> Result<NTriangle, HigherError> {
        self.pull(self.n, Pull::TInv, 1)
    }

    /// Flipped triangle `(F f, -phi f)`.
    pub fn flip(&self) -> Result<NTriangle, HigherError> {
        self.pull(self.n, Pull::F(self.n), -1)
    }

    /// `(F f, phi f)`, without the sign; a negative control.
    pub fn flip_unsigned(&self) -> Result<NTriangle, HigherError> {
        self.pull(self.n, Pull::F(self.n), 1)
    }

    /// Inverse image `(F alpha_*, phi alpha_*)` along a monotone `alpha: [m] -> [n]`.
    pub fn inverse_image(&self, alpha: &InducedAlpha) -> Result<NTriangle, HigherError> {
        if alpha.n != self.n {
            return Err(HigherError::Mismatch);
        }
        self.pull(alpha.m, Pull::Alpha(alpha.clone()), 1)
    }

    /// Transport of structure along vertexwise automorphisms (identity where absent).
    pub fn transport(&self, mu: &BTreeMap<MeshVertex, GradedMap>) -> NTriangle {
        let field = self.field;
        let get = |v: &MeshVertex| mu.get(v).cloned().unwrap_or_else(|| GradedMap::identity(field, &self.values[v]));
        let inv = |v: &MeshVertex| get(v).inverse(&self.values[v], &self.values[v]).expect("automorphism");
        let mut t = self.forget_model();
        for ((u, w), e) in &self.arrows {
            let (gu, gw) = (&self.values[u], &self.values[w]);
            t.arrows.insert((*u, *w), get(w).after(&e.after(&inv(u), field, gu, gu, gw), field, gu, gw, gw));
        }
        for (v, p) in &self.phi {
            let fv = mesh_map_f(self.n, *v).unwrap();
            let (gf, gs) = (&self.values[&fv], self.values[v].shift(1));
            let left = p.after(&inv(&fv), field, gf, gf, &gs);
            t.phi.insert(*v, get(v).shift(1).after(&left, field, gf, &gs, &gs));
        }
        t
    }

    /// Random automorphisms at every interior vertex, then transport.
    pub fn random_isomorphic<R: Rng + ?Sized>(&self, rng: &mut R) -> NTriangle {
        let mut mu = BTreeMap::new();
        for v in self.window.interior() {
            let g = &self.values[&v];
            mu.insert(v, GradedMap::build(g, g, |i| random_invertible(self.field, g.dim(i), rng)));
        }
        self.transport(&mu)
    }

    /// Adds `k` in degree `deg + j` at every `f^j v` in the window, with zero
    /// maps and identity `phi` on the new summands; a negative control that is
    /// still an `n`-triangle.
    pub fn corrupt(&self, v: MeshVertex, deg: i64) -> NTriangle {
        let field = self.field;
        let mut orbit = BTreeMap::new();
        let mut w = v;
        let mut j = 0;
        while self.window.contains(w) && !w.is_boundary(self.n) {
            orbit.insert(w, deg + j);
            w = mesh_map_f(self.n, w).unwrap();
            j += 1;
        }
        let mut w = mesh_map_f_inv(self.n, v).unwrap();
        let mut j = -1;
        while self.window.contains(w) && !w.is_boundary(self.n) {
            orbit.insert(w, deg + j);
            w = mesh_map_f_inv(self.n, w).unwrap();
            j -= 1;
        }
        let grow = |g: &Graded, x: Option<&i64>| match x {
            Some(&d) => Graded::new(g.0.iter().map(|(&a, &b)| (a, b)).chain([(d, 1)])),
            None => g.clone(),
        };
        let values: BTreeMap<MeshVertex, Graded> = self.values.iter().map(|(w, g)| (*w, grow(g, orbit.get(w)))).collect();
        // old basis first in every degree, the new vector last
        let pad = |m: &Matrix, r: usize, c: usize, corner: bool| {
            let mut out = Matrix::zeros(field, r, c);
            out.set_block(0, 0, m);
            if corner && r > m.rows() && c > m.cols() {
                out.set_block(m.rows(), m.cols(), &Matrix::identity(field, 1));
            }
            out
        };
        let mut arrows = BTreeMap::new();
        for ((u, w), e) in &self.arrows {
            let (su, sw) = (&self.values[u], &self.values[w]);
            let (gu, gw) = (&values[u], &values[w]);
            arrows.insert((*u, *w), GradedMap::build(gu, gw, |i| pad(&e.comp(field, i, su, sw), gw.dim(i), gu.dim(i), false)));
        }
        let mut phi = BTreeMap::new();
        for (x, p) in &self.phi {
            let fx = mesh_map_f(self.n, *x).unwrap();
            let (sf, ss) = (&self.values[&fx], self.values[x].shift(1));
            let (gf, gs) = (&values[&fx], values[x].shift(1));
            let both = orbit.contains_key(x) && orbit.contains_key(&fx);
            phi.insert(*x, GradedMap::build(gf, &gs, |i| pad(&p.comp(field, i, sf, &ss), gs.dim(i), gf.dim(i), both)));
        }
        NTriangle::from_parts(self.n, field, self.window, values, arrows, phi)
    }
}

trait WithColumns {
    fn with_columns(self, cols: (i64, i64)) -> MeshWindow;
}

impl WithColumns for MeshWindow {
    fn with_columns(self, cols: (i64, i64)) -> MeshWindow {
        MeshWindow::new(self.n, cols.0, cols.1)
    }
}

fn from_model(m: &Model, n: usize, window: MeshWindow) -> Result<NTriangle, HigherError> {
    let d = &m.diagram;
    let field = d.complex.field();
    let mut cache = HomologyCache::new(d);
    let top = n as i64 + 1;
    let mut values = BTreeMap::new();
    for v in window.vertices() {
        let g = if v.is_boundary(n) { Graded::default() } else { cache.graded(m.place(v))? };
        values.insert(v, g);
    }
    let mut arrows = BTreeMap::new();
    for (u, w) in window_arrows(&window) {
        let e = if u.is_boundary(n) || w.is_boundary(n) {
            GradedMap::default()
        } else {
            cache.map(m.place(u), m.place(w))?
        };
        arrows.insert((u, w), e);
    }
    let mut phi = BTreeMap::new();
    for v in phi_domain(&window) {
        let a = m.place(v);
        let b = m.place(MeshVertex::new(v.k, top));
        let c = m.place(MeshVertex::new(v.k + v.l, 0));
        let p = m.place(mesh_map_f(n, v).unwrap());
        phi.insert(v, cache.connecting(a, b, c, p)?);
    }
    let mut t = NTriangle::from_parts(n, field, window, values, arrows, phi);
    t.model = Some(m.clone());
    Ok(t)
}

/// The standard `n`-triangle of a complex over `Q`, on the canonical window.
pub fn standard_triangle(q: &LineQuiver, x: &Complex) -> Result<NTriangle, HigherError> {
    let n = q.n();
    let d = build_ar(q, x, model_window(n))?;
    let m = Model { diagram: Arc::new(d), pulls: Vec::new() };
    from_model(&m, n, MeshWindow::canonical(n))
}

/// Graded isomorphisms `from -> to` of bases, degree by degree.
fn base_isomorphism(from: &Base, to: &Base) -> Option<Vec<GradedMap>> {
    if from.values != to.values {
        return None;
    }
    let mut comps: Vec<BTreeMap<i64, Matrix>> = vec![BTreeMap::new(); from.n()];
    for d in from.degrees() {
        let iso: RepMap = from.degree_rep(d).isomorphism(&to.degree_rep(d))?;
        for (l, m) in iso.comps.into_iter().enumerate() {
            if m.rows() > 0 {
                comps[l].insert(d, m);
            }
        }
    }
    Some(comps.into_iter().map(GradedMap).collect())
}

fn base_fixed(t: &NTriangle, maps: &[GradedMap]) -> BTreeMap<MeshVertex, GradedMap> {
    maps.iter().enumerate().map(|(l, m)| (MeshVertex::new(0, l as i64 + 1), m.clone())).filter(|(v, _)| t.window.contains(*v)).collect()
}

/// A distinguished triangle whose base is exactly `base`.
pub fn fill_base(base: &Base) -> Result<NTriangle, HigherError> {
    base.check()?;
    let n = base.n();
    let s = standard_triangle(&LineQuiver::linear(n), &base.to_complex())?;
    let rho = base_isomorphism(&s.base(), base).ok_or_else(|| HigherError::BadBase("round trip lost the base".into()))?;
    let mut t = s.transport(&base_fixed(&s, &rho));
    // transport conjugates the base maps; they are exactly the given ones now
    for l in 1..n {
        let (u, w) = (MeshVertex::new(0, l as i64), MeshVertex::new(0, l as i64 + 1));
        debug_assert_eq!(t.arrows[&(u, w)], base.maps[l - 1]);
        t.arrows.insert((u, w), base.maps[l - 1].clone());
    }
    Ok(t)
}

/// Whether `mu` is a morphism of triangles `src -> tgt`.
pub fn is_morphism(src: &NTriangle, tgt: &NTriangle, mu: &TriangleMap) -> bool {
    let field = src.field;
    let get = |v: &MeshVertex| mu.comps.get(v).cloned().unwrap_or_default();
    for ((u, w), e) in &src.arrows {
        let (su, sw, tu, tw) = (&src.values[u], &src.values[w], &tgt.values[u], &tgt.values[w]);
        let a = get(w).after(e, field, su, sw, tw);
        let b = tgt.arrows[&(*u, *w)].after(&get(u), field, su, tu, tw);
        if a != b {
            return false;
        }
    }
    for (v, p) in &src.phi {
        let Some(p2) = tgt.phi.get(v) else { continue };
        let fv = mesh_map_f(src.n, *v).unwrap();
        let (sf, ss, tf, ts) = (&src.values[&fv], src.values[v].shift(1), &tgt.values[&fv], tgt.values[v].shift(1));
        let a = p2.after(&get(&fv), field, sf, tf, &ts);
        let b = get(v).shift(1).after(p, field, sf, &ss, &ts);
        if a != b {
            return false;
        }
    }
    true
}

/// `vec` of a matrix, row by row, as a column.
fn vec_of(m: &Matrix) -> Matrix {
    m.reshape(m.rows() * m.cols(), 1)
}

/// Solves for a triangle morphism `src -> tgt` with prescribed components
/// at `fixed`. Free components start from the identity where sizes agree, so
/// the identity is returned whenever it is a solution.
fn solve_morphism(src: &NTriangle, tgt: &NTriangle, fixed: &BTreeMap<MeshVertex, GradedMap>) -> Option<TriangleMap> {
    if src.n != tgt.n || src.window != tgt.window {
        return None;
    }
    let field = src.field;
    // unknown blocks (vertex, degree) -> (offset, rows, cols)
    let mut blocks: BTreeMap<(MeshVertex, i64), (usize, usize, usize)> = BTreeMap::new();
    let mut nvar = 0;
    let mut guess: BTreeMap<MeshVertex, GradedMap> = BTreeMap::new();
    for v in src.window.interior() {
        let (s, t) = (&src.values[&v], &tgt.values[&v]);
        if let Some(f) = fixed.get(&v) {
            guess.insert(v, GradedMap::build(s, t, |i| f.comp(field, i, s, t)));
            continue;
        }
        guess.insert(v, GradedMap::build(s, t, |i| {
            if s.dim(i) == t.dim(i) {
                Matrix::identity(field, s.dim(i))
            } else {
                Matrix::zeros(field, t.dim(i), s.dim(i))
            }
        }));
        for i in s.degrees() {
            if t.dim(i) > 0 {
                blocks.insert((v, i), (nvar, t.dim(i), s.dim(i)));
                nvar += t.dim(i) * s.dim(i);
            }
        }
    }
    let zero_for = |v: &MeshVertex| GradedMap::zero(field, &src.values[v], &tgt.values[v]);
    let guess_at = |v: &MeshVertex| guess.get(v).cloned().unwrap_or_else(|| zero_for(v));
    // equations: list of (rows, terms (block, coefficient), rhs)
    struct Eq {
        rows: usize,
        terms: Vec<(usize, Matrix)>,
        rhs: Matrix,
    }
    let mut eqs: Vec<Eq> = Vec::new();
    // adds M X N for X = mu_{v,i}
    let add_term = |terms: &mut Vec<(usize, Matrix)>, rhs: &mut Matrix, v: MeshVertex, i: i64, m: &Matrix, nn: &Matrix| {
        let known = guess_at(&v).comp(field, i, &src.values[&v], &tgt.values[&v]);
        if known.rows() > 0 && known.cols() > 0 {
            *rhs = rhs.sub(&vec_of(&m.mul(&known).mul(nn)));
        }
        if let Some(&(off, _, _)) = blocks.get(&(v, i)) {
            terms.push((off, m.kron(&nn.transpose())));
        }
    };
    for ((u, w), e) in &src.arrows {
        let e2 = &tgt.arrows[&(*u, *w)];
        for i in src.values[u].degrees() {
            let (p, q) = (tgt.values[w].dim(i), src.values[u].dim(i));
            if p == 0 {
                continue;
            }
            let mut terms = Vec::new();
            let mut rhs = Matrix::zeros(field, p * q, 1);
            let fe = e.comp(field, i, &src.values[u], &src.values[w]);
            let ge = e2.comp(field, i, &tgt.values[u], &tgt.values[w]);
            add_term(&mut terms, &mut rhs, *w, i, &Matrix::identity(field, p), &fe);
            add_term(&mut terms, &mut rhs, *u, i, &ge.neg(), &Matrix::identity(field, q));
            eqs.push(Eq { rows: p * q, terms, rhs });
        }
    }
    for (v, p1) in &src.phi {
        let Some(p2) = tgt.phi.get(v) else { continue };
        let fv = mesh_map_f(src.n, *v).unwrap();
        for i in src.values[&fv].degrees() {
            let (p, q) = (tgt.values[v].dim(i - 1), src.values[&fv].dim(i));
            if p == 0 {
                continue;
            }
            let mut terms = Vec::new();
            let mut rhs = Matrix::zeros(field, p * q, 1);
            let a = p2.comp(field, i, &tgt.values[&fv], &tgt.values[v].shift(1));
            let b = p1.comp(field, i, &src.values[&fv], &src.values[v].shift(1));
            add_term(&mut terms, &mut rhs, fv, i, &a, &Matrix::identity(field, q));
            add_term(&mut terms, &mut rhs, *v, i - 1, &Matrix::identity(field, p).neg(), &b);
            eqs.push(Eq { rows: p * q, terms, rhs });
        }
    }
    let nrows: usize = eqs.iter().map(|e| e.rows).sum();
    let mut delta = Matrix::zeros(field, nvar, 1);
    if nrows > 0 {
        let mut a = Matrix::zeros(field, nrows, nvar);
        let mut b = Matrix::zeros(field, nrows, 1);
        let mut r0 = 0;
        for e in &eqs {
            for (off, c) in &e.terms {
                a.add_block(r0, *off, c);
            }
            b.set_block(r0, 0, &e.rhs);
            r0 += e.rows;
        }
        if nvar == 0 {
            if !b.is_zero() {
                return None;
            }
        } else {
            delta = a.solve(&b).expect("fields agree")?;
        }
    }
    let mut comps = BTreeMap::new();
    for v in src.window.vertices() {
        let (s, t) = (&src.values[&v], &tgt.values[&v]);
        let g = guess_at(&v);
        comps.insert(
            v,
            GradedMap::build(s, t, |i| {
                let k = g.comp(field, i, s, t);
                match blocks.get(&(v, i)) {
                    Some(&(off, r, c)) => k.add(&delta.block(off, r * c, 0, 1).reshape(r, c)),
                    None => k,
                }
            }),
        );
    }
    let mu = TriangleMap { comps };
    debug_assert!(is_morphism(src, tgt, &mu));
    Some(mu)
}

/// Extends a morphism of bases to a morphism of triangles.
pub fn extend_morphism(src: &NTriangle, tgt: &NTriangle, base_map: &[GradedMap]) -> Option<TriangleMap> {
    if base_map.len() != src.n {
        return None;
    }
    solve_morphism(src, tgt, &base_fixed(src, base_map))
}

/// Rebuilds the standard triangle of `base(t)` and looks for an isomorphism
/// onto `t` extending an isomorphism of bases.
pub fn is_distinguished(t: &NTriangle) -> Verdict {
    let no = |r: String| Verdict { distinguished: false, reason: Some(r) };
    if let Err(e) = t.validate() {
        return no(format!("not a triangle: {e}"));
    }
    let base = t.base();
    let s = match standard_triangle(&LineQuiver::linear(t.n), &base.to_complex()) {
        Ok(s) => s,
        Err(e) => return no(e.to_string()),
    };
    let s = if s.window == t.window {
        s
    } else {
        match s.extended(t.window.kmin, t.window.kmax) {
            Ok(x) => x,
            Err(e) => return no(e.to_string()),
        }
    };
    let Some(rho) = base_isomorphism(&s.base(), &base) else {
        return no("base of the rebuilt triangle differs".into());
    };
    let Some(mu) = solve_morphism(&s, t, &base_fixed(&s, &rho)) else {
        return no("no morphism from the rebuilt triangle extends the base isomorphism".into());
    };
    for (v, m) in &mu.comps {
        if !m.is_iso(&s.values[v], &t.values[v]) {
            return no(format!("comparison is not invertible at {v}: {} vs {}", s.values[v], t.values[v]));
        }
    }
    Verdict { distinguished: true, reason: None }
}

/// First vertex where the data of `t` differs from the standard triangle of
/// the coherent diagram it was restricted from; `None` when they agree or
/// when `t` carries no diagram.
pub fn canonical_mismatch(t: &NTriangle) -> Result<Option<String>, HigherError> {
    let Some(m) = &t.model else { return Ok(None) };
    let c = from_model(m, t.n, t.window)?;
    for v in t.window.vertices() {
        if c.values[&v] != t.values[&v] {
            return Ok(Some(format!("value at {v}")));
        }
    }
    for (k, e) in &t.arrows {
        if c.arrows[k] != *e {
            return Ok(Some(format!("arrow {} -> {}", k.0, k.1)));
        }
    }
    for (v, p) in &t.phi {
        if c.phi[v] != *p {
            return Ok(Some(format!("phi at {v}")));
        }
    }
    Ok(None)
}

/// Boundary vanishing and bicartesian mesh squares of the diagram behind `t`, restricted to its window.
pub fn model_is_exact(t: &NTriangle) -> Result<bool, HigherError> {
    let Some(m) = &t.model else { return Ok(false) };
    let d = &m.diagram;
    for v in t.window.vertices() {
        if v.is_boundary(t.n) && !d.value(m.place(v))?.is_acyclic() {
            return Ok(false);
        }
    }
    for sq in t.window.squares() {
        let MeshSquare { a, b, c, p } = sq;
        let (pa, pb, pc, pp) = (m.place(a), m.place(b), m.place(c), m.place(p));
        let ok = is_bicartesian(
            &d.value(pa)?,
            &d.value(pb)?,
            &d.value(pc)?,
            &d.value(pp)?,
            &d.map(pa, pb)?,
            &d.map(pa, pc)?,
            &d.map(pb, pp)?,
            &d.map(pc, pp)?,
        );
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the randomized axiom battery for one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StcReport {
    pub n: usize,
    pub samples: usize,
    pub stc0: usize,
    pub stc1: usize,
    pub stc2: usize,
    pub stc3: usize,
    /// Samples whose standard triangle has a nonzero `phi`.
    pub sign_eligible: usize,
    /// Among those, samples where the unsigned flip disagrees with the restricted diagram.
    pub sign_detected: usize,
    /// Samples where the corrupted triangle was rejected.
    pub corrupt_rejected: usize,
    pub failures: Vec<String>,
}

impl StcReport {
    pub fn ok(&self) -> bool {
        let s = self.samples;
        self.failures.is_empty()
            && [self.stc0, self.stc1, self.stc2, self.stc3, self.corrupt_rejected].iter().all(|&x| x == s)
            && self.sign_detected == self.sign_eligible
            && self.sign_eligible > 0
    }
}

fn random_alpha<R: Rng + ?Sized>(n: usize, rng: &mut R) -> InducedAlpha {
    let m = rng.gen_range(1..=n + 1);
    let mut vals: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=n)).collect();
    vals.sort_unstable();
    InducedAlpha::new(m, n, vals).expect("monotone")
}

/// (STC0)-(STC3) on `samples` random bases for one `n`, plus the sign and corruption controls.
pub fn stc_suite<R: Rng + ?Sized>(n: usize, samples: usize, field: Field, max_dim: usize, rng: &mut R) -> StcReport {
    let mut rep = StcReport { n, samples, ..Default::default() };
    let fail = |rep: &mut StcReport, what: String| {
        if rep.failures.len() < 10 {
            rep.failures.push(what);
        }
    };
    let orientations = LineQuiver::all_orientations(n);
    for s in 0..samples {
        let x = Base::random(n, field, max_dim, rng);
        let y = Base::random(n, field, max_dim, rng);
        // STC1
        let tx = match fill_base(&x) {
            Ok(t) => t,
            Err(e) => {
                fail(&mut rep, format!("sample {s}: fill failed: {e}"));
                continue;
            }
        };
        if tx.base() == x && is_distinguished(&tx).distinguished {
            rep.stc1 += 1;
        } else {
            fail(&mut rep, format!("sample {s}: STC1"));
        }
        // STC0 and the corruption control
        let iso = tx.random_isomorphic(rng);
        if is_distinguished(&iso).distinguished {
            rep.stc0 += 1;
        } else {
            fail(&mut rep, format!("sample {s}: STC0"));
        }
        let v = MeshVertex::new(rng.gen_range(0..=1), rng.gen_range(1..=n as i64));
        if !is_distinguished(&tx.corrupt(v, 0)).distinguished {
            rep.corrupt_rejected += 1;
        } else {
            fail(&mut rep, format!("sample {s}: corrupted triangle accepted"));
        }
        // STC2
        let ty = match fill_base(&y) {
            Ok(t) => t,
            Err(e) => {
                fail(&mut rep, format!("sample {s}: fill failed: {e}"));
                continue;
            }
        };
        let theta = x.random_morphism(&y, rng);
        match extend_morphism(&tx, &ty, &theta) {
            Some(mu) if is_morphism(&tx, &ty, &mu) => rep.stc2 += 1,
            _ => fail(&mut rep, format!("sample {s}: STC2")),
        }
        // STC3 on a standard triangle of a random orientation
        let q = &orientations[rng.gen_range(0..orientations.len())];
        let xq = Complex::from_rep(&crate::rep::random_line_rep(q, field, max_dim, rng), 0);
        let t = match standard_triangle(q, &xq) {
            Ok(t) => t,
            Err(e) => {
                fail(&mut rep, format!("sample {s}: {e}"));
                continue;
            }
        };
        let alpha = random_alpha(n, rng);
        let ops: Vec<(&str, Result<NTriangle, HigherError>)> = vec![
            ("inverse image", t.inverse_image(&alpha)),
            ("translate", t.translate()),
            ("inverse translate", t.translate_inv()),
            ("flip", t.flip()),
        ];
        let mut all = true;
        for (name, r) in ops {
            let good = match r {
                Ok(u) => {
                    is_distinguished(&u).distinguished
                        && matches!(canonical_mismatch(&u), Ok(None))
                        && matches!(model_is_exact(&u), Ok(true))
                }
                Err(_) => false,
            };
            if !good {
                all = false;
                fail(&mut rep, format!("sample {s}: STC3 {name} ({q})"));
            }
        }
        if all {
            rep.stc3 += 1;
        }
        if t.phis().values().any(|p| !p.is_zero()) {
            rep.sign_eligible += 1;
            match t.flip_unsigned().map(|u| canonical_mismatch(&u)) {
                Ok(Ok(Some(_))) => rep.sign_detected += 1,
                _ => fail(&mut rep, format!("sample {s}: unsigned flip agrees with the restricted diagram")),
            }
        }
    }
    rep
}

