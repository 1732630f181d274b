//! Finite-dimensional representations of finite posets.
//!
//! A [`Rep`] stores one matrix per covering arrow; composites along longer
//! paths are products, and [`Rep::new`] rejects data whose parallel paths
//! disagree.

mod line;

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{Field, Matrix};
use crate::shapes::Poset;

pub use line::{
    decompose, euler_form, ext1, injective, interval_module, interval_sum, interval_sum_rep, projective,
    random_interval_sum, random_line_rep, rank_invariant, simple, Interval, Multiset,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("expected {expected} dimensions, got {got}")]
    DimCount { expected: usize, got: usize },
    #[error("arrow {arrow}: matrix is {rows}x{cols}, expected {er}x{ec}")]
    ArrowShape { arrow: usize, rows: usize, cols: usize, er: usize, ec: usize },
    #[error("parallel paths from {from} to {to} disagree")]
    NotCommutative { from: String, to: String },
    #[error("shapes differ")]
    ShapeMismatch,
    #[error("fields differ")]
    FieldMismatch,
    #[error("bad interval [{0},{1}] for n = {2}")]
    BadInterval(usize, usize, usize),
    #[error("not a morphism: {0}")]
    NotMorphism(String),
}

pub(crate) fn same_shape(a: &Arc<Poset>, b: &Arc<Poset>) -> bool {
    Arc::ptr_eq(a, b) || a.as_ref() == b.as_ref()
}

/// A representation: a vector space per element and a matrix per covering arrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rep {
    shape: Arc<Poset>,
    field: Field,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

/// A family of matrices, one per element, between two representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepMap {
    pub comps: Vec<Matrix>,
}

impl Rep {
    pub fn new(shape: Arc<Poset>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Rep, RepError> {
        let r = Rep::new_unchecked(shape, field, dims, maps)?;
        r.check_commutative()?;
        Ok(r)
    }

    /// Checks shapes of the arrow matrices but not commutativity.
    pub fn new_unchecked(shape: Arc<Poset>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Rep, RepError> {
        if dims.len() != shape.len() {
            return Err(RepError::DimCount { expected: shape.len(), got: dims.len() });
        }
        if maps.len() != shape.hasse().len() {
            return Err(RepError::DimCount { expected: shape.hasse().len(), got: maps.len() });
        }
        for (i, (&(s, t), m)) in shape.hasse().iter().zip(maps.iter()).enumerate() {
            if m.rows() != dims[t] || m.cols() != dims[s] {
                return Err(RepError::ArrowShape { arrow: i, rows: m.rows(), cols: m.cols(), er: dims[t], ec: dims[s] });
            }
            if m.field() != field {
                return Err(RepError::FieldMismatch);
            }
        }
        Ok(Rep { shape, field, dims, maps })
    }

    pub fn zero(shape: Arc<Poset>, field: Field) -> Rep {
        let dims = vec![0; shape.len()];
        let maps = shape.hasse().iter().map(|_| Matrix::zeros(field, 0, 0)).collect();
        Rep { shape, field, dims, maps }
    }

    /// Dimension 1 on the convex set `support`, identity maps inside, zero elsewhere.
    pub fn indicator(shape: Arc<Poset>, field: Field, support: &[bool]) -> Rep {
        let dims: Vec<usize> = support.iter().map(|&b| b as usize).collect();
        let maps = shape
            .hasse()
            .iter()
            .map(|&(s, t)| {
                let mut m = Matrix::zeros(field, dims[t], dims[s]);
                if support[s] && support[t] {
                    m.set(0, 0, 1);
                }
                m
            })
            .collect();
        Rep { shape, field, dims, maps }
    }

    /// `k` on the up-set of `x`.
    pub fn poset_projective(shape: Arc<Poset>, field: Field, x: usize) -> Rep {
        let support: Vec<bool> = (0..shape.len()).map(|u| shape.leq(x, u)).collect();
        Rep::indicator(shape, field, &support)
    }

    pub fn shape(&self) -> &Arc<Poset> {
        &self.shape
    }
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn dim(&self, v: usize) -> usize {
        self.dims[v]
    }
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }
    pub fn arrow_map(&self, e: usize) -> &Matrix {
        &self.maps[e]
    }
    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// The structure map `a -> b` for `a <= b` (identity when equal).
    pub fn map_between(&self, a: usize, b: usize) -> Option<Matrix> {
        let path = self.shape.path(a, b)?;
        let mut m = Matrix::identity(self.field, self.dims[a]);
        for e in path {
            m = self.maps[e].mul(&m);
        }
        Some(m)
    }

    pub fn check_commutative(&self) -> Result<(), RepError> {
        let p = &self.shape;
        let order = p.topological_order();
        for a in 0..p.len() {
            // composite from a to each b, set on first arrival
            let mut comp: Vec<Option<Matrix>> = vec![None; p.len()];
            comp[a] = Some(Matrix::identity(self.field, self.dims[a]));
            for &v in &order {
                let Some(cv) = comp[v].clone() else { continue };
                for &e in p.out_arrows(v) {
                    let t = p.hasse()[e].1;
                    let m = self.maps[e].mul(&cv);
                    match &comp[t] {
                        None => comp[t] = Some(m),
                        Some(old) => {
                            if *old != m {
                                return Err(RepError::NotCommutative {
                                    from: p.label(a).to_string(),
                                    to: p.label(t).to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn direct_sum(parts: &[&Rep]) -> Rep {
        let first = parts.first().expect("nonempty sum");
        let shape = first.shape.clone();
        let field = first.field;
        let n = shape.len();
        let dims = (0..n).map(|v| parts.iter().map(|r| r.dims[v]).sum()).collect();
        let maps = (0..shape.hasse().len())
            .map(|e| Matrix::block_diag(field, &parts.iter().map(|r| &r.maps[e]).collect::<Vec<_>>()))
            .collect();
        Rep { shape, field, dims, maps }
    }

    /// Conjugates by invertible `p[v]`: new arrow map `p[t] X p[s]^{-1}`.
    pub fn base_change(&self, p: &[Matrix]) -> Rep {
        let inv: Vec<Matrix> = p.iter().map(|m| m.inverse().expect("invertible base change")).collect();
        let maps = self
            .shape
            .hasse()
            .iter()
            .zip(self.maps.iter())
            .map(|(&(s, t), m)| p[t].mul(m).mul(&inv[s]))
            .collect();
        Rep { shape: self.shape.clone(), field: self.field, dims: self.dims.clone(), maps }
    }

    /// Pullback along an order-preserving map `obj: new shape -> self.shape`.
    pub fn restrict(&self, shape: Arc<Poset>, obj: &[usize]) -> Rep {
        assert_eq!(obj.len(), shape.len());
        let dims = obj.iter().map(|&o| self.dims[o]).collect();
        let maps = shape
            .hasse()
            .iter()
            .map(|&(s, t)| self.map_between(obj[s], obj[t]).expect("restriction map must be monotone"))
            .collect();
        Rep { shape, field: self.field, dims, maps }
    }

    /// Same data on the opposite shape is not a representation in general; this
    /// transposes every matrix, giving the dual representation on `shape^op`.
    pub fn dual(&self, op_shape: Arc<Poset>) -> Rep {
        // the arrows of op_shape are the reversed arrows, in the same order
        let maps = self.maps.iter().map(|m| m.transpose()).collect();
        Rep { shape: op_shape, field: self.field, dims: self.dims.clone(), maps }
    }

    pub fn identity_map(&self) -> RepMap {
        RepMap { comps: self.dims.iter().map(|&d| Matrix::identity(self.field, d)).collect() }
    }

    pub fn zero_map(&self, to: &Rep) -> RepMap {
        RepMap { comps: (0..self.dims.len()).map(|v| Matrix::zeros(self.field, to.dims[v], self.dims[v])).collect() }
    }

    pub fn is_morphism(&self, to: &Rep, f: &RepMap) -> bool {
        if f.comps.len() != self.dims.len() {
            return false;
        }
        for v in 0..self.dims.len() {
            if f.comps[v].rows() != to.dims[v] || f.comps[v].cols() != self.dims[v] {
                return false;
            }
        }
        self.shape
            .hasse()
            .iter()
            .enumerate()
            .all(|(e, &(s, t))| to.maps[e].mul(&f.comps[s]) == f.comps[t].mul(&self.maps[e]))
    }

    /// Basis of `Hom(self, to)`.
    pub fn hom_space(&self, to: &Rep) -> Result<Vec<RepMap>, RepError> {
        if !same_shape(&self.shape, &to.shape) {
            return Err(RepError::ShapeMismatch);
        }
        if self.field != to.field {
            return Err(RepError::FieldMismatch);
        }
        Ok(hom_basis(self.field, &self.dims, &to.dims, self.shape.hasse(), &self.maps, &to.maps))
    }

    pub fn hom_dim(&self, to: &Rep) -> Result<usize, RepError> {
        if !same_shape(&self.shape, &to.shape) {
            return Err(RepError::ShapeMismatch);
        }
        let (a, _) = hom_system(self.field, &self.dims, &to.dims, self.shape.hasse(), &self.maps, &to.maps);
        Ok(a.cols() - a.rank())
    }

    /// Searches for an isomorphism `self -> to`.
    pub fn isomorphism(&self, to: &Rep) -> Option<RepMap> {
        if !same_shape(&self.shape, &to.shape) || self.dims != to.dims {
            return None;
        }
        if self.is_zero() {
            return Some(self.zero_map(to));
        }
        let basis = self.hom_space(to).ok()?;
        find_invertible(self.field, &basis)
    }

    pub fn is_isomorphic(&self, to: &Rep) -> bool {
        self.isomorphism(to).is_some()
    }
}

impl RepMap {
    pub fn compose(&self, first: &RepMap) -> RepMap {
        RepMap { comps: self.comps.iter().zip(first.comps.iter()).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn is_invertible(&self) -> bool {
        self.comps.iter().all(|m| m.is_invertible())
    }

    pub fn add(&self, other: &RepMap) -> RepMap {
        RepMap { comps: self.comps.iter().zip(other.comps.iter()).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, s: i64) -> RepMap {
        RepMap { comps: self.comps.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn neg(&self) -> RepMap {
        self.scale(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| m.is_zero())
    }
}

/// Linear system whose kernel is the hom space; also returns block offsets of the unknowns.
pub(crate) fn hom_system(
    field: Field,
    xd: &[usize],
    yd: &[usize],
    arrows: &[(usize, usize)],
    xm: &[Matrix],
    ym: &[Matrix],
) -> (Matrix, Vec<usize>) {
    let mut offs = Vec::with_capacity(xd.len() + 1);
    let mut acc = 0;
    for v in 0..xd.len() {
        offs.push(acc);
        acc += xd[v] * yd[v];
    }
    offs.push(acc);
    let eq_rows: usize = arrows.iter().map(|&(s, t)| yd[t] * xd[s]).sum();
    let mut a = Matrix::zeros(field, eq_rows, acc);
    let mut r0 = 0;
    for (e, &(s, t)) in arrows.iter().enumerate() {
        let rows = yd[t] * xd[s];
        if rows == 0 {
            continue;
        }
        // vec(Y_e phi_s) = (Y_e kron I) vec(phi_s), row-major vectorization
        if xd[s] * yd[s] > 0 {
            a.add_block(r0, offs[s], &ym[e].kron(&Matrix::identity(field, xd[s])));
        }
        // vec(phi_t X_e) = (I kron X_e^T) vec(phi_t)
        if xd[t] * yd[t] > 0 {
            a.add_block(r0, offs[t], &Matrix::identity(field, yd[t]).kron(&xm[e].transpose()).neg());
        }
        r0 += rows;
    }
    (a, offs)
}

pub(crate) fn hom_basis(
    field: Field,
    xd: &[usize],
    yd: &[usize],
    arrows: &[(usize, usize)],
    xm: &[Matrix],
    ym: &[Matrix],
) -> Vec<RepMap> {
    let (a, offs) = hom_system(field, xd, yd, arrows, xm, ym);
    let k = a.kernel_basis();
    (0..k.cols())
        .map(|c| RepMap {
            comps: (0..xd.len())
                .map(|v| {
                    let mut m = Matrix::zeros(field, yd[v], xd[v]);
                    for i in 0..yd[v] {
                        for j in 0..xd[v] {
                            let idx = offs[v] + i * xd[v] + j;
                            m.set_block(i, j, &k.block(idx, 1, c, 1));
                        }
                    }
                    m
                })
                .collect(),
        })
        .collect()
}

/// Finds an invertible element in the span of `basis`: seeded random
/// combinations first, then a bounded deterministic enumeration.
pub(crate) fn find_invertible(field: Field, basis: &[RepMap]) -> Option<RepMap> {
    let Some(first) = basis.first() else {
        return None;
    };
    if first.comps.iter().all(|m| m.rows() == 0) {
        return Some(first.clone());
    }
    let combine = |coeffs: &[Matrix]| -> RepMap {
        let comps = (0..first.comps.len())
            .map(|v| {
                let mut m = Matrix::zeros(field, first.comps[v].rows(), first.comps[v].cols());
                for (b, c) in basis.iter().zip(coeffs) {
                    if !c.is_zero() {
                        m = m.add(&b.comps[v].scale_by(c));
                    }
                }
                m
            })
            .collect();
        RepMap { comps }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1505);
    for _ in 0..48 {
        let coeffs: Vec<Matrix> = basis.iter().map(|_| Matrix::random(field, 1, 1, &mut rng)).collect();
        let f = combine(&coeffs);
        if f.is_invertible() {
            return Some(f);
        }
    }
    // deterministic fallback over coefficients {0, 1, -1, 2}
    let k = basis.len().min(8);
    let vals = [0i64, 1, -1, 2];
    let total = 4usize.pow(k as u32);
    for code in 1..total {
        let mut c = code;
        let coeffs: Vec<Matrix> = (0..basis.len())
            .map(|i| {
                let v = if i < k {
                    let d = vals[c % 4];
                    c /= 4;
                    d
                } else {
                    0
                };
                Matrix::from_i64(field, 1, 1, &[v])
            })
            .collect();
        let f = combine(&coeffs);
        if f.is_invertible() {
            return Some(f);
        }
    }
    None
}

/// A random change of basis. Over `Q` it is a product of unitriangular
/// integer matrices with entries in `-1..=1`, so coordinates stay small.
pub fn random_basis_change<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Matrix {
    if field != Field::Rationals {
        return random_invertible(field, n, rng);
    }
    let mut l = Matrix::identity(field, n);
    let mut u = Matrix::identity(field, n);
    for i in 0..n {
        for j in 0..i {
            l.set(i, j, rng.gen_range(-1i64..=1));
            u.set(j, i, rng.gen_range(-1i64..=1));
        }
    }
    l.mul(&u)
}

/// Uniform random invertible matrix.
pub fn random_invertible<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Matrix {
    loop {
        let m = Matrix::random(field, n, n, rng);
        if m.is_invertible() {
            return m;
        }
    }
}
