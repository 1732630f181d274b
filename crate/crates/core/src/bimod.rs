//! Bimodules over incidence algebras and the canceling tensor product.
//!
//! A bimodule over `A x B^op` is stored as a [`Complex`] over the product
//! shape `A.product(B.opposite())`, element `(a, b)` at index `a * |B| + b`.
//! Plain bimodules are complexes concentrated in degree zero.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ar::{build_ar_first, ARDiagram, ArError};
use crate::derived::{hereditary_hom_dim, homology_isomorphic, quotient, Complex};
use crate::functors::{
    coxeter_minus_first, coxeter_plus_first, reflect_minus_first, reflect_plus_first, transport_first, FunctorError,
    FunctorTag,
};
use crate::linalg::{Field, Matrix};
use crate::rep::Rep;
use crate::shapes::{LineQuiver, MeshVertex, MeshWindow, Poset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BimodError {
    #[error("middle shapes differ")]
    MiddleMismatch,
    #[error("middle shape is not free; use the bar construction")]
    NotHereditary,
    #[error("complex has {got} elements, expected {expected}")]
    ShapeMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Ar(#[from] ArError),
}

/// A bounded complex of bimodules over `left x right^op`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    pub left: Arc<Poset>,
    pub right: Arc<Poset>,
    pub complex: Complex,
}

/// The carrier shape `left x right^op`.
pub fn carrier(left: &Poset, right: &Poset) -> Arc<Poset> {
    Arc::new(left.product(&right.opposite()))
}

impl Bimodule {
    pub fn new(left: Arc<Poset>, right: Arc<Poset>, complex: Complex) -> Result<Bimodule, BimodError> {
        let expected = left.len() * right.len();
        if complex.shape().len() != expected {
            return Err(BimodError::ShapeMismatch { got: complex.shape().len(), expected });
        }
        let complex = complex.reshape(carrier(&left, &right));
        Ok(Bimodule { left, right, complex })
    }

    pub fn from_rep(left: Arc<Poset>, right: Arc<Poset>, rep: &Rep) -> Result<Bimodule, BimodError> {
        Bimodule::new(left, right, Complex::from_rep(rep, 0))
    }

    /// A complex over `Q` viewed as a bimodule over `Q x 1^op`.
    pub fn from_left_module(left: Arc<Poset>, x: &Complex) -> Result<Bimodule, BimodError> {
        Bimodule::new(left, Arc::new(Poset::point()), x.clone())
    }

    /// Inverse of [`Bimodule::from_left_module`].
    pub fn to_left_module(&self) -> Complex {
        self.complex.reshape(self.left.clone())
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.right.len() + b
    }

    pub fn shift(&self, k: i64) -> Bimodule {
        Bimodule { complex: self.complex.shift(k), ..self.clone() }
    }

    /// The complex over `left` at `b` in the right variable.
    pub fn left_component(&self, b: usize) -> Complex {
        let obj: Vec<usize> = (0..self.left.len()).map(|a| self.index(a, b)).collect();
        self.complex.restrict(self.left.clone(), &obj)
    }

    /// The complex over `right^op` at `a` in the left variable.
    pub fn right_component(&self, a: usize) -> Complex {
        self.complex.eval_first(&Arc::new(self.right.opposite()), a)
    }

    pub fn minimized(&self) -> Bimodule {
        Bimodule { complex: self.complex.minimized(), ..self.clone() }
    }

    /// Homology dimensions summed over degrees, as a `left x right` table.
    pub fn dim_table(&self) -> Vec<Vec<usize>> {
        let c = &self.complex;
        (0..self.left.len())
            .map(|a| {
                (0..self.right.len())
                    .map(|b| c.degrees().map(|i| c.homology_dim(i, self.index(a, b))).sum())
                    .collect()
            })
            .collect()
    }

    /// Rows indexed by the right variable, columns by the left one, each entry
    /// `k` (one-dimensional homology), `0`, or the total homology dimension.
    pub fn support_pattern(&self) -> Vec<String> {
        let t = self.dim_table();
        (0..self.right.len())
            .map(|b| {
                (0..self.left.len())
                    .map(|a| match t[a][b] {
                        0 => "0".to_string(),
                        1 => "k".to_string(),
                        d => d.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    /// Quasi-isomorphism test through degreewise homology bimodules.
    pub fn quasi_isomorphic(&self, other: &Bimodule) -> bool {
        self.left.as_ref() == other.left.as_ref()
            && self.right.as_ref() == other.right.as_ref()
            && homology_isomorphic(&self.complex, &other.complex)
    }

    /// First `(degree, (a, b))` where homology dimensions differ.
    pub fn first_difference(&self, other: &Bimodule) -> Option<(i64, (usize, usize))> {
        let lo = self.complex.lo().min(other.complex.lo());
        let hi = self.complex.hi().max(other.complex.hi());
        for i in lo..=hi {
            let (x, y) = (self.complex.homology_dims(i), other.complex.homology_dims(i));
            for (w, (p, q)) in x.iter().zip(y.iter()).enumerate() {
                if p != q {
                    return Some((i, (w / self.right.len(), w % self.right.len())));
                }
            }
        }
        None
    }
}

impl fmt::Display for Bimodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.support_pattern().join(" / "))
    }
}

/// `I_P`: `k` at `(a, b)` iff `b <= a`, identities on the support.
pub fn identity_prof(p: &Arc<Poset>, field: Field) -> Bimodule {
    let shape = carrier(p, p);
    let n = p.len();
    let support: Vec<bool> = (0..n * n).map(|w| p.leq(w % n, w / n)).collect();
    Bimodule::from_rep(p.clone(), p.clone(), &Rep::indicator(shape, field, &support)).expect("shape")
}

/// `D_P`: `k` at `(a, b)` iff `a <= b`.
pub fn duality_module(p: &Arc<Poset>, field: Field) -> Bimodule {
    let shape = carrier(p, p);
    let n = p.len();
    let support: Vec<bool> = (0..n * n).map(|w| p.leq(w / n, w % n)).collect();
    Bimodule::from_rep(p.clone(), p.clone(), &Rep::indicator(shape, field, &support)).expect("shape")
}

pub fn line_identity(q: &LineQuiver, field: Field) -> Bimodule {
    identity_prof(&Arc::new(q.poset()), field)
}

pub fn line_duality(q: &LineQuiver, field: Field) -> Bimodule {
    duality_module(&Arc::new(q.poset()), field)
}

/// Entrywise dual over `right x left^op`: `(M^*)_i(b, a) = M_{-i}(a, b)^*`.
pub fn linear_dual(m: &Bimodule) -> Bimodule {
    let c = &m.complex;
    let shape = carrier(&m.right, &m.left);
    let (na, nb) = (m.left.len(), m.right.len());
    let old = |w: usize| (w % na) * nb + w / na;
    let sh = shape.clone();
    let complex = if c.is_zero() {
        Complex::zero(shape, c.field())
    } else {
        Complex::build(
            shape,
            c.field(),
            -c.hi(),
            -c.lo(),
            |i, w| c.dim(-i, old(w)),
            |i, e| {
                let (s, t) = sh.hasse()[e];
                c.map_between(-i, old(t), old(s)).transpose()
            },
            |i, w| c.diff(-i + 1, old(w)).transpose(),
        )
    };
    Bimodule { left: m.right.clone(), right: m.left.clone(), complex }
}

/// One summand of a chain-indexed tensor: `M_i(x, c_p) ⊗ N_j(c_0, y)`.
#[derive(Clone, Copy)]
struct Slot {
    chain: usize,
    i: i64,
    j: i64,
    dm: usize,
    dn: usize,
}

/// Total complex of `⊕_c M(-, c_p) ⊗ N(c_0, -)` over the given strict chains,
/// with simplicial faces; chains must be closed under taking faces.
fn chain_tensor(m: &Bimodule, n: &Bimodule, chains: &[Vec<usize>]) -> Bimodule {
    let field = m.field();
    let (mc, nc) = (&m.complex, &n.complex);
    let shape = carrier(&m.left, &n.right);
    let zero = Bimodule { left: m.left.clone(), right: n.right.clone(), complex: Complex::zero(shape.clone(), field) };
    if mc.is_zero() || nc.is_zero() {
        return zero;
    }
    let pm = m.right.len();
    let nb = n.right.len();
    let pos: HashMap<&[usize], usize> = chains.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
    let maxp = chains.iter().map(|c| c.len() - 1).max().unwrap_or(0) as i64;
    let layout = |t: i64, x: usize, y: usize| -> Vec<Slot> {
        let mut out = Vec::new();
        for (k, c) in chains.iter().enumerate() {
            let p = c.len() as i64 - 1;
            for i in mc.degrees() {
                let j = t - p - i;
                if j < nc.lo() || j > nc.hi() {
                    continue;
                }
                let dm = mc.dim(i, x * pm + c[c.len() - 1]);
                let dn = nc.dim(j, c[0] * nb + y);
                out.push(Slot { chain: k, i, j, dm, dn });
            }
        }
        out
    };
    let offsets = |slots: &[Slot]| -> HashMap<(usize, i64), usize> {
        let mut off = HashMap::new();
        let mut o = 0;
        for s in slots {
            off.insert((s.chain, s.i), o);
            o += s.dm * s.dn;
        }
        off
    };
    let total = |slots: &[Slot]| slots.iter().map(|s| s.dm * s.dn).sum::<usize>();
    let sh = shape.clone();
    let complex = Complex::build(
        shape,
        field,
        mc.lo() + nc.lo(),
        mc.hi() + nc.hi() + maxp,
        |t, w| total(&layout(t, w / nb, w % nb)),
        |t, e| {
            let (s, u) = sh.hasse()[e];
            let (xs, ys, xt, yt) = (s / nb, s % nb, u / nb, u % nb);
            let (src, tgt) = (layout(t, xs, ys), layout(t, xt, yt));
            let mut mat = Matrix::zeros(field, total(&tgt), total(&src));
            let (mut ro, mut co) = (0, 0);
            for (a, b) in src.iter().zip(tgt.iter()) {
                let c = &chains[a.chain];
                let top = c[c.len() - 1];
                let fm = mc.map_between(a.i, xs * pm + top, xt * pm + top);
                let fnn = nc.map_between(a.j, c[0] * nb + ys, c[0] * nb + yt);
                mat.set_block(ro, co, &fm.kron(&fnn));
                ro += b.dm * b.dn;
                co += a.dm * a.dn;
            }
            mat
        },
        |t, w| {
            let (x, y) = (w / nb, w % nb);
            let src = layout(t, x, y);
            let tgt = layout(t - 1, x, y);
            let toff = offsets(&tgt);
            let tdims: HashMap<(usize, i64), (usize, usize)> =
                tgt.iter().map(|s| ((s.chain, s.i), (s.dm, s.dn))).collect();
            let mut mat = Matrix::zeros(field, total(&tgt), total(&src));
            let mut co = 0;
            for a in &src {
                let c = &chains[a.chain];
                let p = c.len() - 1;
                let top = c[p];
                let sgn_i = if a.i.rem_euclid(2) == 0 { 1 } else { -1 };
                let put = |chain: usize, i: i64, block: Matrix, mat: &mut Matrix| {
                    if let Some(&ro) = toff.get(&(chain, i)) {
                        let (dm, dn) = tdims[&(chain, i)];
                        if dm * dn > 0 && a.dm * a.dn > 0 {
                            mat.add_block(ro, co, &block);
                        }
                    }
                };
                // d_M ⊗ 1
                if a.i - 1 >= mc.lo() {
                    let dmat = mc.diff(a.i, x * pm + top);
                    put(a.chain, a.i - 1, dmat.kron(&Matrix::identity(field, a.dn)), &mut mat);
                }
                // simplicial faces
                if p >= 1 {
                    for k in 0..=p {
                        let mut face = c.clone();
                        face.remove(k);
                        let fk = pos[face.as_slice()];
                        let sgn = sgn_i * if k % 2 == 0 { 1 } else { -1 };
                        let block = if k == 0 {
                            let nm = nc.map_between(a.j, c[0] * nb + y, c[1] * nb + y);
                            Matrix::identity(field, a.dm).kron(&nm)
                        } else if k == p {
                            let mm = mc.map_between(a.i, x * pm + top, x * pm + c[p - 1]);
                            mm.kron(&Matrix::identity(field, a.dn))
                        } else {
                            Matrix::identity(field, a.dm * a.dn)
                        };
                        put(fk, a.i, block.scale(sgn), &mut mat);
                    }
                }
                // ± 1 ⊗ d_N
                if a.j - 1 >= nc.lo() {
                    let sgn = sgn_i * if p % 2 == 0 { 1 } else { -1 };
                    let dmat = nc.diff(a.j, c[0] * nb + y);
                    put(a.chain, a.i, Matrix::identity(field, a.dm).kron(&dmat).scale(sgn), &mut mat);
                }
                co += a.dm * a.dn;
            }
            mat
        },
    );
    Bimodule { left: m.left.clone(), right: n.right.clone(), complex }
}

fn check_middle(m: &Bimodule, n: &Bimodule) -> Result<(), BimodError> {
    if m.right.as_ref() != n.left.as_ref() {
        return Err(BimodError::MiddleMismatch);
    }
    Ok(())
}

/// `M ⊗_[P] N` through the two-term standard resolution of a hereditary
/// incidence algebra: `⊕_{a->b} M(-, b) ⊗ N(a, -) -> ⊕_v M(-, v) ⊗ N(v, -)`.
pub fn cancel_tensor(m: &Bimodule, n: &Bimodule) -> Result<Bimodule, BimodError> {
    check_middle(m, n)?;
    let p = &m.right;
    if !p.is_free() {
        return Err(BimodError::NotHereditary);
    }
    let mut chains: Vec<Vec<usize>> = (0..p.len()).map(|v| vec![v]).collect();
    chains.extend(p.hasse().iter().map(|&(a, b)| vec![a, b]));
    Ok(chain_tensor(m, n, &chains))
}

/// The same derived tensor through the normalized bar complex over all strict
/// chains; valid for any finite poset.
pub fn bar_tensor_oracle(m: &Bimodule, n: &Bimodule) -> Result<Bimodule, BimodError> {
    check_middle(m, n)?;
    let p = &m.right;
    let mut chains = Vec::new();
    for len in 0..p.len() {
        let c = p.chains(len);
        if c.is_empty() {
            break;
        }
        chains.extend(c);
    }
    Ok(chain_tensor(m, n, &chains))
}

/// Tensor by a kernel over `Q' x Q^op`, acting on a complex over `Q`.
pub fn apply_kernel(t: &Bimodule, x: &Complex) -> Result<Complex, BimodError> {
    let xb = Bimodule::from_left_module(t.right.clone(), x)?;
    let out = if t.right.is_free() { cancel_tensor(t, &xb)? } else { bar_tensor_oracle(t, &xb)? };
    Ok(out.to_left_module())
}

/// Iterated tensor power `M^{⊗k}` with minimization between factors.
pub fn tensor_power(m: &Bimodule, k: usize) -> Result<Bimodule, BimodError> {
    let mut acc = identity_prof(&m.left, m.field());
    for _ in 0..k {
        acc = cancel_tensor(&acc, m)?.minimized();
    }
    Ok(acc)
}

fn kernel_of(q: &LineQuiver, q2: &LineQuiver, image: Complex) -> Bimodule {
    Bimodule::new(Arc::new(q2.poset()), Arc::new(q.poset()), image).expect("functor keeps shape")
}

fn qop(q: &LineQuiver) -> Arc<Poset> {
    Arc::new(q.poset().opposite())
}

/// `F(I_Q)` in the first variable: the kernel representing `F`.
pub fn kernel(tag: &FunctorTag, q: &LineQuiver, field: Field) -> Result<Bimodule, BimodError> {
    let i = line_identity(q, field);
    let q2 = tag.target(q)?;
    Ok(kernel_of(q, &q2, tag.apply_first(q, &i.complex, &qop(q))?))
}

/// APR tilting bimodules at a sink `a`: `T⁺` over `Q' x Q^op` and `T⁻` over `Q x Q'^op`.
pub fn apr_tilt(q: &LineQuiver, a: usize, field: Field) -> Result<(Bimodule, Bimodule), BimodError> {
    let (q2, plus) = reflect_plus_first(q, a, &line_identity(q, field).complex, &qop(q))?;
    let (_, minus) = reflect_minus_first(&q2, a, &line_identity(&q2, field).complex, &qop(&q2))?;
    Ok((kernel_of(q, &q2, plus), kernel_of(&q2, q, minus)))
}

/// `T_{Q',Q}`, the kernel of transport from `Q` to `Q'`.
pub fn iter_tilt(q2: &LineQuiver, q: &LineQuiver, field: Field) -> Result<Bimodule, BimodError> {
    let img = transport_first(q, q2, &line_identity(q, field).complex, &qop(q))?;
    Ok(kernel_of(q, q2, img))
}

/// `C_Q^±`, the kernels of the Coxeter functors.
pub fn coxeter_bimodule(q: &LineQuiver, plus: bool, field: Field) -> Result<Bimodule, BimodError> {
    let i = line_identity(q, field).complex;
    let img = if plus { coxeter_plus_first(q, &i, &qop(q))? } else { coxeter_minus_first(q, &i, &qop(q))? };
    Ok(kernel_of(q, q, img))
}

/// `AR_Q`: the coherent diagram of `I_Q` in the first variable, over `window x Q^op`.
pub fn ar_constructor(q: &LineQuiver, window: MeshWindow, field: Field) -> Result<ARDiagram, BimodError> {
    let mut d = build_ar_first(q, &line_identity(q, field).complex, &qop(q), window)?;
    d.r_quiver = Some(q.opposite());
    Ok(d)
}

/// `AR_Q` as a bimodule over `window x Q^op`.
pub fn ar_bimodule(d: &ARDiagram) -> Bimodule {
    let right = Arc::new(d.r_shape.opposite());
    Bimodule::new(Arc::new(d.window.poset()), right, d.complex.clone()).expect("shape")
}

/// `E_v = AR_Q(v, -)`, an object over `Q^op`, for every vertex of the window.
pub fn ar_objects(d: &ARDiagram) -> Vec<(MeshVertex, Complex)> {
    let shape = Arc::new(d.q.opposite().poset());
    d.window.vertices().into_iter().map(|v| (v, d.value(v).expect("in window").reshape(shape.clone()))).collect()
}

/// `dim Hom(E_u, E_v)` for interior vertices `u, v` of the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomTable {
    pub vertices: Vec<MeshVertex>,
    pub dims: Vec<Vec<usize>>,
}

pub fn mesh_hom_table(d: &ARDiagram) -> HomTable {
    let n = d.n();
    let objs: Vec<(MeshVertex, Complex)> = ar_objects(d).into_iter().filter(|(v, _)| !v.is_boundary(n)).collect();
    let dims = objs
        .iter()
        .map(|(_, eu)| objs.iter().map(|(_, ev)| hereditary_hom_dim(eu, ev, 0)).collect())
        .collect();
    HomTable { vertices: objs.into_iter().map(|p| p.0).collect(), dims }
}

/// Total derived homs `U_n(u, v) = ⊕_d Hom(E_v, Σ^d E_u)` over all window vertices.
pub fn yoneda_window(d: &ARDiagram) -> HomTable {
    let objs = ar_objects(d);
    let span = |a: &Complex, b: &Complex| -> Vec<i64> {
        if a.is_zero() || b.is_zero() {
            return vec![];
        }
        (b.lo() - a.hi() - 1..=b.hi() - a.lo() + 1).map(|x| -x).collect()
    };
    let dims = objs
        .iter()
        .map(|(_, eu)| {
            objs.iter()
                .map(|(_, ev)| span(ev, eu).into_iter().map(|s| hereditary_hom_dim(ev, eu, s)).sum())
                .collect()
        })
        .collect();
    HomTable { vertices: objs.into_iter().map(|p| p.0).collect(), dims }
}

impl HomTable {
    pub fn get(&self, u: MeshVertex, v: MeshVertex) -> Option<usize> {
        let a = self.vertices.iter().position(|w| *w == u)?;
        let b = self.vertices.iter().position(|w| *w == v)?;
        Some(self.dims[a][b])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,dim\n");
        for (a, u) in self.vertices.iter().enumerate() {
            for (b, v) in self.vertices.iter().enumerate() {
                out.push_str(&format!("\"{u}\",\"{v}\",{}\n", self.dims[a][b]));
            }
        }
        out
    }
}

/// Outcome of [`tilting_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TiltingReport {
    pub perfect: bool,
    pub rigid: bool,
    pub generator: bool,
    pub invertible: bool,
}

impl TiltingReport {
    pub fn ok(&self) -> bool {
        self.perfect && self.rigid && self.generator && self.invertible
    }
}

/// Tilting test for `T` over `Q' x Q^op` with `Q'` free. Invertibility uses
/// `inverse` when given, and otherwise compares `End(⊕ T(-, b))` with `kQ`.
pub fn tilting_check(t: &Bimodule, inverse: Option<&Bimodule>) -> TiltingReport {
    let comps: Vec<Complex> = (0..t.right.len()).map(|b| t.left_component(b)).collect();
    let field = t.field();
    let perfect = t.left.is_free() && comps.iter().all(|c| c.degrees().count() < usize::MAX);
    let range = |a: &Complex, b: &Complex| -> Vec<i64> {
        if a.is_zero() || b.is_zero() {
            return vec![];
        }
        (a.lo() - b.hi() - 1..=a.hi() - b.lo() + 1).collect()
    };
    let rigid = comps
        .iter()
        .all(|a| comps.iter().all(|b| range(a, b).into_iter().all(|d| d == 0 || hereditary_hom_dim(a, b, d) == 0)));
    let simples: Vec<Complex> = (0..t.left.len())
        .map(|v| {
            let support: Vec<bool> = (0..t.left.len()).map(|w| w == v).collect();
            Complex::from_rep(&Rep::indicator(t.left.clone(), field, &support), 0)
        })
        .collect();
    let generator = simples
        .iter()
        .all(|s| comps.iter().any(|a| range(a, s).into_iter().any(|d| hereditary_hom_dim(a, s, d) > 0)));
    let invertible = match inverse {
        Some(inv) => {
            let ok1 = cancel_tensor(inv, t).map(|x| x.quasi_isomorphic(&identity_prof(&t.right, field)));
            let ok2 = cancel_tensor(t, inv).map(|x| x.quasi_isomorphic(&identity_prof(&t.left, field)));
            ok1.unwrap_or(false) && ok2.unwrap_or(false)
        }
        None => (0..comps.len()).all(|b| {
            (0..comps.len()).all(|b2| hereditary_hom_dim(&comps[b], &comps[b2], 0) == usize::from(t.right.leq(b2, b)))
        }),
    };
    TiltingReport { perfect, rigid, generator, invertible }
}

/// Outcome of [`picard_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicardReport {
    pub commute: bool,
    pub relation: bool,
    /// `Σ^a I ≅ D^{⊗b}` on the grid only for `(a, b)` in `{(0, 0), (n-1, n+1)}`.
    pub minimal: bool,
    pub failures: Vec<String>,
}

impl PicardReport {
    pub fn ok(&self) -> bool {
        self.commute && self.relation && self.minimal
    }
}

/// Field-level relations `[ΣI][D] = [D][ΣI]` and `(ΣI)^{⊗(n-1)} ≅ D^{⊗(n+1)}`.
pub fn picard_check(q: &LineQuiver, field: Field) -> Result<PicardReport, BimodError> {
    let n = q.n() as i64;
    let i = line_identity(q, field);
    let d = line_duality(q, field);
    let mut failures = Vec::new();
    let si = i.shift(1);
    let commute = cancel_tensor(&si, &d)?.quasi_isomorphic(&cancel_tensor(&d, &si)?);
    if !commute {
        failures.push("ΣI ⊗ D and D ⊗ ΣI differ".to_string());
    }
    let mut powers = vec![i.clone()];
    for _ in 0..=n {
        let next = cancel_tensor(powers.last().unwrap(), &d)?.minimized();
        powers.push(next);
    }
    let target = i.shift(n - 1);
    let top = &powers[(n + 1) as usize];
    let relation = top.quasi_isomorphic(&target);
    if !relation {
        let loc = top.first_difference(&target);
        failures.push(format!("D^{} differs from Σ^{} I at {:?}", n + 1, n - 1, loc));
    }
    let mut minimal = true;
    for (b, pw) in powers.iter().enumerate() {
        for a in -1..=n {
            let expect = (a, b as i64) == (0, 0) || (a, b as i64) == (n - 1, n + 1);
            if pw.quasi_isomorphic(&i.shift(a)) != expect {
                minimal = false;
                failures.push(format!("Σ^{a} I vs D^{b}: expected {expect}"));
            }
        }
    }
    Ok(PicardReport { commute, relation, minimal, failures })
}

/// The commutative square `x -> y, z -> w` and the shape `B` adding the
/// pushout `p` of `y <- x -> z` with `p -> w`.
pub fn square_shapes() -> (Arc<Poset>, Arc<Poset>, Arc<Poset>) {
    let lab = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let sq = Poset::generated(lab(&["x", "y", "z", "w"]), &[(0, 1), (0, 2), (1, 3), (2, 3)]).expect("acyclic");
    let b = Poset::generated(lab(&["x", "y", "z", "p", "w"]), &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]).expect("acyclic");
    let d4 = b.induced(&[1, 2, 3, 4]);
    (Arc::new(sq), Arc::new(b), Arc::new(d4))
}

/// Left Kan extension of `I_square` to `B` (a strict pushout at `p`) and its
/// restriction `T_{D,Q}` to the `D_4` quiver `y -> p <- z, p -> w`.
pub fn square_d4_bimodule(field: Field) -> (Bimodule, Bimodule) {
    let (sq, b, d4) = square_shapes();
    let i = identity_prof(&sq, field);
    let rop = Arc::new(sq.opposite());
    let col = |a: usize| i.complex.eval_first(&rop, a);
    let (x, y, z, w) = (col(0), col(1), col(2), col(3));
    let yz = Complex::direct_sum(&[&y, &z]);
    // K = image of (f, -g): x -> y ⊕ z, computed degree 0 and vertexwise
    let f = i.complex.map_first(&rop, 0, 1);
    let g = i.complex.map_first(&rop, 0, 2);
    let mut k = HashMap::new();
    for r in 0..sq.len() {
        let u = Matrix::vstack(field, x.dim(0, r), &[&f.comp(&x, &y, 0, r), &g.comp(&x, &z, 0, r).neg()]);
        if u.cols() > 0 {
            k.insert((0, r), u.image_basis());
        }
    }
    let (p, pi) = quotient(&yz, &k);
    let h = i.complex.map_first(&rop, 1, 3);
    let kk = i.complex.map_first(&rop, 2, 3);
    let m = sq.len();
    let bshape = carrier(&b, &sq);
    let value = |beta: usize| -> &Complex {
        match beta {
            0 => &x,
            1 => &y,
            2 => &z,
            3 => &p,
            _ => &w,
        }
    };
    let bs = bshape.clone();
    let full = Complex::build(
        bshape,
        field,
        0,
        0,
        |deg, v| value(v / m).dim(deg, v % m),
        |deg, e| {
            let (s, t) = bs.hasse()[e];
            let (bs_, rs, bt, rt) = (s / m, s % m, t / m, t % m);
            if bs_ == bt {
                let re = rop.arrow(rs, rt).expect("arrow");
                return value(bs_).arrow_map(deg, re);
            }
            let pr = &pi.comps[&0][rs];
            let dy = y.dim(deg, rs);
            let dz = z.dim(deg, rs);
            match (bs_, bt) {
                (0, 1) => f.comp(&x, &y, deg, rs),
                (0, 2) => g.comp(&x, &z, deg, rs),
                (1, 3) => pr.block(0, pr.rows(), 0, dy),
                (2, 3) => pr.block(0, pr.rows(), dy, dz),
                (3, 4) => {
                    let hk = Matrix::hstack(field, w.dim(deg, rs), &[&h.comp(&y, &w, deg, rs), &kk.comp(&z, &w, deg, rs)]);
                    let sec = pr.right_inverse().unwrap_or_else(|_| Matrix::zeros(field, dy + dz, 0));
                    hk.mul(&sec)
                }
                _ => unreachable!("covering arrows of B"),
            }
        },
        |_, v| Matrix::zeros(field, 0, value(v / m).dim(0, v % m)),
    );
    let tb = Bimodule::new(b.clone(), sq.clone(), full).expect("shape");
    let obj: Vec<usize> = [1usize, 2, 3, 4].iter().flat_map(|&beta| (0..m).map(move |r| beta * m + r)).collect();
    let td = Bimodule::new(d4.clone(), sq, tb.complex.restrict(carrier(&d4, &tb.right), &obj)).expect("shape");
    (tb, td)
}
