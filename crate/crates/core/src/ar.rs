//! Coherent Auslander-Reiten diagrams on windows of the mesh category.
//!
//! [`build_ar`] places a complex over `Q x R` along a translate of the
//! canonical embedding `i_Q`, pads the boundary with zeros (bottom) and cones
//! of identities (top), and fills every square forward as a strict pushout.
//! Forward arrows of the seed slice are made degreewise injective first, so
//! each strict pushout is a homotopy pushout.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::derived::{cone, cone_inclusion, reduce_relative, homology_isomorphic, is_bicartesian, normal_form, ChainMap, Complex, DerivedObject};
use crate::functors::point;
use crate::linalg::Matrix;
use crate::shapes::{mesh_map_f, Dir, Embedding, LineQuiver, MeshVertex, MeshWindow, Poset, ShapeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArError {
    #[error("window [{kmin},{kmax}] does not contain the embedded quiver")]
    WindowTooSmall { kmin: i64, kmax: i64 },
    #[error("input has {got} elements, expected {expected}")]
    ShapeMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("vertex {0} outside the window")]
    OutsideWindow(MeshVertex),
    #[error("vertex list is not order preserving for {0}")]
    NotMonotone(String),
}

/// A coherent diagram on a window, valued in complexes over `R`.
#[derive(Debug, Clone)]
pub struct ARDiagram {
    pub q: LineQuiver,
    pub window: MeshWindow,
    pub r_shape: Arc<Poset>,
    /// Set when `R` is the path order of a line quiver, enabling normal forms.
    pub r_quiver: Option<LineQuiver>,
    /// The whole diagram as one complex over `window x R`.
    pub complex: Complex,
}

/// Whether every forward (`l -> l+1`) structure map of `x` is degreewise injective.
fn forward_injective(q: &LineQuiver, x: &Complex, m: usize) -> bool {
    for (l, d) in q.dirs().iter().enumerate() {
        if *d != Dir::F {
            continue;
        }
        for i in x.degrees() {
            for r in 0..m {
                let mat = x.map_between(i, l * m + r, (l + 1) * m + r);
                if mat.rank() != mat.cols() {
                    return false;
                }
            }
        }
    }
    true
}

/// The total complex of the standard projective resolution in the first variable:
/// `⊕_{s->t} P_t ⊗ X(s) -> ⊕_v P_v ⊗ X(v)`, quasi-isomorphic to `x`, with
/// injective structure maps along `Q`.
pub fn projective_model(q: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Complex {
    let field = x.field();
    let m = r.len();
    let n = q.n();
    let shape = x.shape().clone();
    let arrows: Vec<(usize, usize)> = q.arrows().into_iter().map(|(s, t)| (s - 1, t - 1)).collect();
    // summands: P0 indexed by vertex v, P1 indexed by arrow; value at (u, r) is X(v or s)(r) when reachable
    let p0_on = |v: usize, u: usize| q.leq(v + 1, u + 1);
    let p1_on = |e: usize, u: usize| q.leq(arrows[e].1 + 1, u + 1);
    let d_p0 = |i: i64, u: usize, rv: usize| -> Vec<(usize, usize)> {
        // (vertex, dim) for P0 summands present at (u, r) in degree i
        (0..n).filter(|&v| p0_on(v, u)).map(|v| (v, x.dim(i, v * m + rv))).collect()
    };
    let d_p1 = |i: i64, u: usize, rv: usize| -> Vec<(usize, usize)> {
        (0..arrows.len()).filter(|&e| p1_on(e, u)).map(|e| (e, x.dim(i, arrows[e].0 * m + rv))).collect()
    };
    let dim = |i: i64, w: usize| -> usize {
        let (u, rv) = (w / m, w % m);
        d_p0(i, u, rv).iter().map(|p| p.1).sum::<usize>() + d_p1(i - 1, u, rv).iter().map(|p| p.1).sum::<usize>()
    };
    let sh = shape.clone();
    Complex::build(
        shape,
        field,
        x.lo(),
        x.hi() + 1,
        dim,
        |i, e| {
            let (s, t) = sh.hasse()[e];
            let (us, rs, ut, rt) = (s / m, s % m, t / m, t % m);
            let mut mat = Matrix::zeros(field, dim(i, t), dim(i, s));
            if us == ut {
                // R-arrow: X's own map within each summand
                let (src0, tgt0) = (d_p0(i, us, rs), d_p0(i, ut, rt));
                let (mut ro, mut co) = (0, 0);
                for (&(v, ds), &(_, dt)) in src0.iter().zip(tgt0.iter()) {
                    mat.set_block(ro, co, &x.map_between(i, v * m + rs, v * m + rt));
                    ro += dt;
                    co += ds;
                }
                for (&(a, ds), &(_, dt)) in d_p1(i - 1, us, rs).iter().zip(d_p1(i - 1, ut, rt).iter()) {
                    let sv = arrows[a].0;
                    mat.set_block(ro, co, &x.map_between(i - 1, sv * m + rs, sv * m + rt));
                    ro += dt;
                    co += ds;
                }
            } else {
                // Q-arrow: inclusion of the summands present at the source
                let place = |list_s: Vec<(usize, usize)>, list_t: Vec<(usize, usize)>, ro0: usize, co0: usize, mat: &mut Matrix| {
                    let mut co = co0;
                    for (key, ds) in list_s {
                        let mut ro = ro0;
                        for &(k2, dt) in &list_t {
                            if k2 == key {
                                mat.set_block(ro, co, &Matrix::identity(field, ds));
                            }
                            ro += dt;
                        }
                        co += ds;
                    }
                };
                let (s0, t0) = (d_p0(i, us, rs), d_p0(i, ut, rs));
                let (s0n, t0n) = (s0.iter().map(|p| p.1).sum(), t0.iter().map(|p| p.1).sum());
                place(s0, t0, 0, 0, &mut mat);
                place(d_p1(i - 1, us, rs), d_p1(i - 1, ut, rs), t0n, s0n, &mut mat);
            }
            mat
        },
        |i, w| {
            let (u, rv) = (w / m, w % m);
            let (s0, t0) = (d_p0(i, u, rv), d_p0(i - 1, u, rv));
            let (s1, t1) = (d_p1(i - 1, u, rv), d_p1(i - 2, u, rv));
            let s0n: usize = s0.iter().map(|p| p.1).sum();
            let t0n: usize = t0.iter().map(|p| p.1).sum();
            let mut mat = Matrix::zeros(field, dim(i - 1, w), dim(i, w));
            // d_X on P0
            let (mut ro, mut co) = (0, 0);
            for (&(v, ds), &(_, dt)) in s0.iter().zip(t0.iter()) {
                mat.set_block(ro, co, &x.diff(i, v * m + rv));
                ro += dt;
                co += ds;
            }
            // -d_X on P1
            let (mut ro, mut co) = (t0n, s0n);
            for (&(e, ds), &(_, dt)) in s1.iter().zip(t1.iter()) {
                mat.set_block(ro, co, &x.diff(i - 1, arrows[e].0 * m + rv).neg());
                ro += dt;
                co += ds;
            }
            // resolution differential P1 ⊗ X_{i-1} -> P0 ⊗ X_{i-1}: identity into P_s, minus X_α into P_t
            let mut co = s0n;
            for &(e, ds) in &s1 {
                let (sv, tv) = arrows[e];
                let mut ro = 0;
                for &(v, dt) in &t0 {
                    if v == sv {
                        mat.add_block(ro, co, &Matrix::identity(field, ds));
                    }
                    if v == tv {
                        mat.add_block(ro, co, &x.map_between(i - 1, sv * m + rv, tv * m + rv).neg());
                    }
                    ro += dt;
                }
                co += ds;
            }
            mat
        },
    )
}

/// Strict pushout of `b <-f- a -g-> c`, with the two maps into it.
fn pushout(a: &Complex, b: &Complex, c: &Complex, f: &ChainMap, g: &ChainMap) -> (Complex, ChainMap, ChainMap) {
    let field = a.field();
    let r = a.shape().clone();
    let m = r.len();
    let lo = b.lo().min(c.lo());
    let hi = b.hi().max(c.hi());
    if b.is_zero() && c.is_zero() {
        return (Complex::zero(r, field), ChainMap::zero(), ChainMap::zero());
    }
    let mut proj: HashMap<(i64, usize), (Matrix, Matrix)> = HashMap::new();
    for i in lo - 1..=hi + 1 {
        for v in 0..m {
            let (db, dc) = (b.dim(i, v), c.dim(i, v));
            let u = Matrix::vstack(field, a.dim(i, v), &[&f.comp(a, b, i, v), &g.comp(a, c, i, v).neg()]);
            let pi = if u.cols() == 0 { Matrix::identity(field, db + dc) } else { u.cokernel_projection() };
            let sec = if pi.rows() == 0 { Matrix::zeros(field, db + dc, 0) } else { pi.right_inverse().expect("full row rank") };
            proj.insert((i, v), (pi, sec));
        }
    }
    let get = |i: i64, v: usize| proj.get(&(i, v)).expect("degree in range");
    let rh = r.clone();
    let p = Complex::build(
        r.clone(),
        field,
        lo,
        hi,
        |i, v| get(i, v).0.rows(),
        |i, e| {
            let (s, t) = rh.hasse()[e];
            let bd = Matrix::block_diag(field, &[&b.arrow_map(i, e), &c.arrow_map(i, e)]);
            get(i, t).0.mul(&bd).mul(&get(i, s).1)
        },
        |i, v| {
            let bd = Matrix::block_diag(field, &[&b.diff(i, v), &c.diff(i, v)]);
            get(i - 1, v).0.mul(&bd).mul(&get(i, v).1)
        },
    );
    let mut to_b = BTreeMap::new();
    let mut to_c = BTreeMap::new();
    for i in lo..=hi {
        let (mut cb, mut cc) = (Vec::new(), Vec::new());
        for v in 0..m {
            let (pi, _) = get(i, v);
            let (db, dc) = (b.dim(i, v), c.dim(i, v));
            cb.push(pi.block(0, pi.rows(), 0, db));
            cc.push(pi.block(0, pi.rows(), db, dc));
        }
        to_b.insert(i, cb);
        to_c.insert(i, cc);
    }
    // chain maps must be defined on the trimmed complex's degrees only
    let trim = |mut cm: BTreeMap<i64, Vec<Matrix>>| {
        cm.retain(|i, _| (p.lo()..=p.hi()).contains(i));
        ChainMap { comps: cm }
    };
    let (hb, hc) = (trim(to_b), trim(to_c));
    (p, hb, hc)
}

/// The embedding columns used for the seed slice and the suspension it carries.
fn seed(q: &LineQuiver, window: &MeshWindow) -> Result<(Vec<i64>, i64), ArError> {
    let cols = Embedding::canonical(q).columns().to_vec();
    let cmax = *cols.iter().max().unwrap_or(&0);
    if window.kmin > 0 || window.kmax < cmax {
        return Err(ArError::WindowTooSmall { kmin: window.kmin, kmax: window.kmax });
    }
    let p = q.n() as i64 + 1;
    let mut j = 0;
    while cmax - j * p >= window.kmin {
        j += 1;
    }
    Ok((cols.iter().map(|c| c - j * p).collect(), -2 * j))
}

/// Builds the coherent diagram of `x` (a complex over `Q x R`) on `window`.
pub fn build_ar_first(q: &LineQuiver, x: &Complex, r: &Arc<Poset>, window: MeshWindow) -> Result<ARDiagram, ArError> {
    let n = q.n();
    let m = r.len();
    if x.shape().len() != n * m {
        return Err(ArError::ShapeMismatch { got: x.shape().len(), expected: n * m });
    }
    if window.n != n {
        return Err(ArError::WindowTooSmall { kmin: window.kmin, kmax: window.kmax });
    }
    let field = x.field();
    let (slice, shift) = seed(q, &window)?;
    let model = if forward_injective(q, x, m) { x.clone() } else { projective_model(q, x, r) };
    let model = model.shift(shift);
    let top = n as i64 + 1;
    let mut vals: HashMap<MeshVertex, Complex> = HashMap::new();
    let mut maps: HashMap<(MeshVertex, MeshVertex), ChainMap> = HashMap::new();
    let zero = Complex::zero(r.clone(), field);
    let slice_v = |l: usize| MeshVertex::new(slice[l - 1], l as i64);
    for l in 1..=n {
        vals.insert(slice_v(l), model.eval_first(r, l - 1));
    }
    for l in 1..n {
        let (a, b) = (l - 1, l);
        let (src, tgt) = match q.dirs()[l - 1] {
            Dir::F => (a, b),
            Dir::B => (b, a),
        };
        maps.insert((slice_v(src + 1), slice_v(tgt + 1)), model.map_first(r, src, tgt));
    }
    let cmin = *slice.iter().min().unwrap();
    for kk in cmin..=window.kmax {
        for l in 1..=n {
            let v = MeshVertex::new(kk, l as i64);
            if kk <= slice[l - 1] {
                continue;
            }
            let sq = crate::shapes::MeshSquare::at(kk - 1, l as i64);
            let get = |w: MeshVertex| vals.get(&w).cloned().unwrap_or_else(|| zero.clone());
            let (a, b, c) = (get(sq.a), get(sq.b), get(sq.c));
            let f = maps.get(&(sq.a, sq.b)).cloned().unwrap_or_default();
            let g = maps.get(&(sq.a, sq.c)).cloned().unwrap_or_default();
            let (p, hb, hc) = pushout(&a, &b, &c, &f, &g);
            let (mut p, mut hb, mut hc) = (p, hb, hc);
            while let Some((small, q)) = reduce_relative(&p, &b, &hb) {
                if small.size() >= p.size() {
                    break;
                }
                hb = q.compose(&hb, &b, &p, &small);
                hc = q.compose(&hc, &c, &p, &small);
                p = small;
            }
            vals.insert(v, p);
            maps.insert((sq.b, v), hb);
            maps.insert((sq.c, v), hc);
        }
        if kk >= slice[n - 1] {
            let below = MeshVertex::new(kk, n as i64);
            let x_top = vals[&below].clone();
            let id = ChainMap::identity(&x_top);
            let cyl = cone(&x_top, &x_top, &id);
            let inc = cone_inclusion(&x_top, &x_top, &cyl);
            maps.insert((below, MeshVertex::new(kk, top)), inc);
            vals.insert(MeshVertex::new(kk, top), cyl);
        }
    }
    let wshape = Arc::new(window.poset());
    let full = Arc::new(wshape.product(r));
    let wverts = window.vertices();
    let value = |w: usize| -> &Complex { vals.get(&wverts[w]).unwrap_or(&zero) };
    let lo = wverts.iter().filter_map(|v| vals.get(v)).filter(|c| !c.is_zero()).map(|c| c.lo()).min().unwrap_or(0);
    let hi = wverts.iter().filter_map(|v| vals.get(v)).filter(|c| !c.is_zero()).map(|c| c.hi()).max().unwrap_or(-1);
    let fs = full.clone();
    let complex = Complex::build(
        full.clone(),
        field,
        lo,
        hi,
        |i, v| value(v / m).dim(i, v % m),
        |i, e| {
            let (s, t) = fs.hasse()[e];
            let (ws, rs, wt, rt) = (s / m, s % m, t / m, t % m);
            if ws == wt {
                let re = r.arrow(rs, rt).expect("R arrow");
                value(ws).arrow_map(i, re)
            } else {
                let key = (wverts[ws], wverts[wt]);
                let (cs, ct) = (value(ws), value(wt));
                match maps.get(&key) {
                    Some(cm) => cm.comp(cs, ct, i, rs),
                    None => Matrix::zeros(field, ct.dim(i, rs), cs.dim(i, rs)),
                }
            }
        },
        |i, v| value(v / m).diff(i, v % m),
    );
    Ok(ARDiagram { q: q.clone(), window, r_shape: r.clone(), r_quiver: None, complex })
}

/// The coherent diagram of a complex of `kQ`-modules on `window`.
pub fn build_ar(q: &LineQuiver, x: &Complex, window: MeshWindow) -> Result<ARDiagram, ArError> {
    let mut d = build_ar_first(q, x, &point(), window)?;
    d.r_quiver = Some(LineQuiver::linear(1));
    Ok(d)
}

/// Outcome of a vertexwise check, naming the first failures.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, pass: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !pass {
            self.failures.push(what());
        }
    }
}

impl ARDiagram {
    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn index(&self, v: MeshVertex) -> Option<usize> {
        self.window.index(v)
    }

    /// Value at `v`, a complex over `R`.
    pub fn value(&self, v: MeshVertex) -> Result<Complex, ArError> {
        let i = self.index(v).ok_or(ArError::OutsideWindow(v))?;
        Ok(self.complex.eval_first(&self.r_shape, i))
    }

    /// The structure map `value(u) -> value(v)` for `u <= v`.
    pub fn map(&self, u: MeshVertex, v: MeshVertex) -> Result<ChainMap, ArError> {
        let a = self.index(u).ok_or(ArError::OutsideWindow(u))?;
        let b = self.index(v).ok_or(ArError::OutsideWindow(v))?;
        Ok(self.complex.map_first(&self.r_shape, a, b))
    }

    /// Adds a stray copy of `k` at `v` (first element of `R`, lowest degree) with
    /// zero maps to and from it; a negative control for the checks.
    pub fn corrupt(&mut self, v: MeshVertex) {
        let m = self.r_shape.len();
        let spot = self.index(v).expect("vertex in window") * m;
        let c = self.complex.clone();
        let field = c.field();
        let d0 = c.lo();
        let extra = |d: i64, w: usize| usize::from(d == d0 && w == spot);
        let pad = |mat: Matrix, rows: usize, cols: usize| {
            let mut out = Matrix::zeros(field, mat.rows() + rows, mat.cols() + cols);
            out.set_block(0, 0, &mat);
            out
        };
        let sh = c.shape().clone();
        self.complex = Complex::build(
            c.shape().clone(),
            field,
            c.lo(),
            c.hi(),
            |d, w| c.dim(d, w) + extra(d, w),
            |d, e| {
                let (s, t) = sh.hasse()[e];
                pad(c.arrow_map(d, e), extra(d, t), extra(d, s))
            },
            |d, w| pad(c.diff(d, w), extra(d - 1, w), extra(d, w)),
        );
    }

    /// Whether two values agree: normal forms when `R` is a line quiver,
    /// otherwise degreewise homology isomorphism.
    pub fn same_value(&self, a: &Complex, b: &Complex) -> bool {
        match &self.r_quiver {
            Some(rq) => normal_form(rq, a) == normal_form(rq, b),
            None => homology_isomorphic(a, b),
        }
    }

    pub fn check_boundary(&self) -> Report {
        let mut rep = Report::default();
        let top = self.n() as i64 + 1;
        for v in self.window.vertices() {
            if v.l == 0 || v.l == top {
                let c = self.value(v).expect("in window");
                rep.record(c.is_acyclic(), || format!("boundary {v} not acyclic"));
            }
        }
        rep
    }

    pub fn check_squares(&self) -> Report {
        let mut rep = Report::default();
        for sq in self.window.squares() {
            let (a, b, c, p) = (
                self.value(sq.a).unwrap(),
                self.value(sq.b).unwrap(),
                self.value(sq.c).unwrap(),
                self.value(sq.p).unwrap(),
            );
            let f = self.map(sq.a, sq.b).unwrap();
            let g = self.map(sq.a, sq.c).unwrap();
            let h = self.map(sq.b, sq.p).unwrap();
            let k = self.map(sq.c, sq.p).unwrap();
            rep.record(is_bicartesian(&a, &b, &c, &p, &f, &g, &h, &k), || format!("square at {} not bicartesian", sq.a));
        }
        rep
    }

    /// `value(f v) ≅ Σ value(v)` for interior `v` with `f v` in the window.
    pub fn check_flip_sigma(&self) -> Report {
        let mut rep = Report::default();
        for v in self.window.interior() {
            let fv = mesh_map_f(self.n(), v).expect("level in range");
            if !self.window.contains(fv) {
                continue;
            }
            let a = self.value(fv).unwrap();
            let b = self.value(v).unwrap().shift(1);
            rep.record(self.same_value(&a, &b), || format!("value at f{v} = {fv} is not Σ of value at {v}"));
        }
        rep
    }

    /// Restriction along `l -> verts[l-1]`, returning a complex over `q2 x R`.
    pub fn restrict_to(&self, q2: &LineQuiver, verts: &[MeshVertex]) -> Result<Complex, ArError> {
        if verts.len() != q2.n() {
            return Err(ArError::ShapeMismatch { got: verts.len(), expected: q2.n() });
        }
        for (s, t) in q2.arrows() {
            if !verts[s - 1].leq(&verts[t - 1]) {
                return Err(ArError::NotMonotone(q2.to_string()));
            }
        }
        let m = self.r_shape.len();
        let mut obj = Vec::with_capacity(verts.len() * m);
        for v in verts {
            let w = self.index(*v).ok_or(ArError::OutsideWindow(*v))?;
            for r in 0..m {
                obj.push(w * m + r);
            }
        }
        let shape = Arc::new(q2.poset().product(&self.r_shape));
        Ok(self.complex.restrict(shape, &obj))
    }

    /// Restriction along an embedding.
    pub fn restrict_embedding(&self, e: &Embedding) -> Result<Complex, ArError> {
        let verts: Vec<MeshVertex> = (1..=e.n()).map(|l| e.vertex(l)).collect();
        self.restrict_to(&e.quiver(), &verts)
    }
}

/// Whether some boundary vertex lies between `u` and `v`.
pub fn through_boundary(n: usize, u: MeshVertex, v: MeshVertex) -> bool {
    let top = n as i64 + 1;
    (u.k..=v.k).any(|k| {
        [MeshVertex::new(k, 0), MeshVertex::new(k, top)].iter().any(|w| u.leq(w) && w.leq(&v))
    })
}

/// Nonzero morphisms of the mesh category with zero boundary: `u <= v` and no boundary vertex between.
pub fn hammock(n: usize, u: MeshVertex, v: MeshVertex) -> bool {
    !u.is_boundary(n) && !v.is_boundary(n) && u.leq(&v) && !through_boundary(n, u, v)
}

/// Number of `f`-orbits of interior vertices, counted on a window spanning a full period.
pub fn mesh_orbit_count(n: usize) -> usize {
    let p = n as i64 + 1;
    let mut reps = BTreeSet::new();
    for k in 0..p {
        for l in 1..=n as i64 {
            let v = MeshVertex::new(k, l);
            let norm = |w: MeshVertex| MeshVertex::new(w.k.rem_euclid(p), w.l);
            let fv = mesh_map_f(n, v).expect("level");
            // f^2 is a translation by a period, so {v, f v} covers the orbit mod p
            reps.insert(norm(v).min(norm(fv)));
        }
    }
    reps.len()
}

/// Distinct values up to suspension among interior vertices of `d`; needs a line quiver `R`.
pub fn suspension_orbits(d: &ARDiagram) -> Option<usize> {
    let rq = d.r_quiver.as_ref()?;
    let mut classes = BTreeSet::new();
    for v in d.window.interior() {
        let nf = normal_form(rq, &d.value(v).ok()?);
        if let Some((iv, _)) = nf.as_single() {
            classes.insert(iv);
        } else if !nf.is_zero() {
            return None;
        }
    }
    Some(classes.len())
}

/// Normal forms of all interior values when `R` is a line quiver.
pub fn value_table(d: &ARDiagram) -> Option<BTreeMap<MeshVertex, DerivedObject>> {
    let rq = d.r_quiver.as_ref()?;
    Some(d.window.interior().into_iter().map(|v| (v, normal_form(rq, &d.value(v).unwrap()))).collect())
}
