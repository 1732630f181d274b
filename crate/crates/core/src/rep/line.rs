//! Interval modules over line quivers and the rank-invariant decomposition.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_basis_change, Rep, RepError};
use crate::linalg::{Field, Matrix};
use crate::shapes::{LineQuiver, Poset};

/// The interval `[i, j]` of vertices, `1 <= i <= j <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub i: usize,
    pub j: usize,
}

impl Interval {
    pub fn new(i: usize, j: usize) -> Interval {
        Interval { i, j }
    }

    pub fn all(n: usize) -> Vec<Interval> {
        (1..=n).flat_map(|i| (i..=n).map(move |j| Interval { i, j })).collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.i <= v && v <= self.j
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M[{},{}]", self.i, self.j)
    }
}

/// Multiplicities of interval summands.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiset(pub BTreeMap<Interval, usize>);

impl Multiset {
    pub fn new() -> Multiset {
        Multiset(BTreeMap::new())
    }

    pub fn single(iv: Interval) -> Multiset {
        let mut m = Multiset::new();
        m.add(iv, 1);
        m
    }

    pub fn add(&mut self, iv: Interval, mult: usize) {
        if mult > 0 {
            *self.0.entry(iv).or_insert(0) += mult;
        }
    }

    pub fn merge(&mut self, other: &Multiset) {
        for (&iv, &m) in &other.0 {
            self.add(iv, m);
        }
    }

    pub fn get(&self, iv: Interval) -> usize {
        self.0.get(&iv).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Interval, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    /// Single summand and multiplicity one.
    pub fn as_single(&self) -> Option<Interval> {
        match self.0.iter().next() {
            Some((&iv, &1)) if self.0.len() == 1 => Some(iv),
            _ => None,
        }
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(iv, &m)| if m == 1 { iv.to_string() } else { format!("{iv}^{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn line_shape(q: &LineQuiver) -> Arc<Poset> {
    Arc::new(q.poset())
}

/// The interval module `M[i, j]`: `k` on `[i, j]` with identity maps.
pub fn interval_module(q: &LineQuiver, field: Field, iv: Interval) -> Result<Rep, RepError> {
    let n = q.n();
    if iv.i < 1 || iv.i > iv.j || iv.j > n {
        return Err(RepError::BadInterval(iv.i, iv.j, n));
    }
    let support: Vec<bool> = (1..=n).map(|v| iv.contains(v)).collect();
    Ok(Rep::indicator(line_shape(q), field, &support))
}

fn reach(q: &LineQuiver, v: usize, down: bool) -> Interval {
    let n = q.n();
    let ok = |u: usize| if down { q.leq(u, v) } else { q.leq(v, u) };
    let mut i = v;
    while i > 1 && ok(i - 1) {
        i -= 1;
    }
    let mut j = v;
    while j < n && ok(j + 1) {
        j += 1;
    }
    Interval { i, j }
}

/// `P_v`, supported on the vertices reachable from `v`.
pub fn projective(q: &LineQuiver, v: usize) -> Interval {
    reach(q, v, false)
}

/// `I_v`, supported on the vertices with a path to `v`.
pub fn injective(q: &LineQuiver, v: usize) -> Interval {
    reach(q, v, true)
}

pub fn simple(v: usize) -> Interval {
    Interval { i: v, j: v }
}

pub fn interval_sum_rep(q: &LineQuiver, field: Field, ms: &Multiset) -> Rep {
    let shape = line_shape(q);
    let mut parts = Vec::new();
    for (iv, m) in ms.iter() {
        let r = interval_module(q, field, iv).expect("valid interval");
        for _ in 0..m {
            parts.push(r.clone());
        }
    }
    if parts.is_empty() {
        return Rep::zero(shape, field);
    }
    let parts: Vec<Rep> = parts.into_iter().map(|p| Rep { shape: shape.clone(), ..p }).collect();
    Rep::direct_sum(&parts.iter().collect::<Vec<_>>())
}

/// Same as [`interval_sum_rep`], for a plain list of summands.
pub fn interval_sum(q: &LineQuiver, field: Field, ivs: &[Interval]) -> Rep {
    let mut ms = Multiset::new();
    for &iv in ivs {
        ms.add(iv, 1);
    }
    interval_sum_rep(q, field, &ms)
}

/// Rank of `lim X|[a,b] -> colim X|[a,b]` on 1-based `a <= b`.
pub fn rank_invariant(x: &Rep, a: usize, b: usize) -> usize {
    let field = x.field();
    let verts: Vec<usize> = (a..=b).collect();
    let mut offs = Vec::new();
    let mut tot = 0;
    for &v in &verts {
        offs.push(tot);
        tot += x.dim(v - 1);
    }
    if tot == 0 {
        return 0;
    }
    let off = |v: usize| offs[v - a];
    let arrows: Vec<(usize, usize, usize)> = x
        .shape()
        .hasse()
        .iter()
        .enumerate()
        .filter(|(_, &(s, t))| (a..=b).contains(&(s + 1)) && (a..=b).contains(&(t + 1)))
        .map(|(e, &(s, t))| (e, s + 1, t + 1))
        .collect();
    // limit: X_e x_s - x_t = 0 for each arrow
    let eq_rows: usize = arrows.iter().map(|&(_, _, t)| x.dim(t - 1)).sum();
    let mut cons = Matrix::zeros(field, eq_rows, tot);
    let mut r0 = 0;
    for &(e, s, t) in &arrows {
        let dt = x.dim(t - 1);
        if dt == 0 {
            continue;
        }
        cons.add_block(r0, off(s), x.arrow_map(e));
        cons.add_block(r0, off(t), &Matrix::identity(field, dt).neg());
        r0 += dt;
    }
    let lim = cons.kernel_basis();
    // colimit relations: iota_s v - iota_t X_e v
    let rel_cols: usize = arrows.iter().map(|&(_, s, _)| x.dim(s - 1)).sum();
    let mut rel = Matrix::zeros(field, tot, rel_cols);
    let mut c0 = 0;
    for &(e, s, t) in &arrows {
        let ds = x.dim(s - 1);
        if ds == 0 {
            continue;
        }
        rel.add_block(off(s), c0, &Matrix::identity(field, ds));
        rel.add_block(off(t), c0, &x.arrow_map(e).neg());
        c0 += ds;
    }
    let da = x.dim(a - 1);
    let mut la = Matrix::zeros(field, tot, lim.cols());
    if da > 0 && lim.cols() > 0 {
        la.set_block(off(a), 0, &lim.block(off(a), da, 0, lim.cols()));
    }
    let both = Matrix::hstack(field, tot, &[&rel, &la]);
    both.rank() - rel.rank()
}

/// Interval multiplicities of a representation of a line quiver.
pub fn decompose(q: &LineQuiver, x: &Rep) -> Multiset {
    let n = q.n();
    let mut rk = vec![vec![0i64; n + 2]; n + 2];
    for a in 1..=n {
        for b in a..=n {
            rk[a][b] = rank_invariant(x, a, b) as i64;
        }
    }
    let at = |a: usize, b: usize| -> i64 {
        if a == 0 || b > n || a > b {
            0
        } else {
            rk[a][b]
        }
    };
    let mut ms = Multiset::new();
    for iv in Interval::all(n) {
        let m = at(iv.i, iv.j) - at(iv.i - 1, iv.j) - at(iv.i, iv.j + 1) + at(iv.i - 1, iv.j + 1);
        debug_assert!(m >= 0);
        ms.add(iv, m.max(0) as usize);
    }
    ms
}

/// `sum dim X_v dim Y_v - sum_{s->t} dim X_s dim Y_t`.
pub fn euler_form(q: &LineQuiver, x: &Rep, y: &Rep) -> i64 {
    let n = q.n();
    let mut e: i64 = (0..n).map(|v| (x.dim(v) * y.dim(v)) as i64).sum();
    for (s, t) in q.arrows() {
        e -= (x.dim(s - 1) * y.dim(t - 1)) as i64;
    }
    e
}

pub fn ext1(q: &LineQuiver, x: &Rep, y: &Rep) -> Result<usize, RepError> {
    let h = x.hom_dim(y)? as i64;
    Ok((h - euler_form(q, x, y)) as usize)
}

/// A random direct sum of intervals hidden by a random change of basis.
pub fn random_interval_sum<R: Rng + ?Sized>(
    q: &LineQuiver,
    field: Field,
    max_mult: usize,
    rng: &mut R,
) -> (Rep, Multiset) {
    let mut ms = Multiset::new();
    for iv in Interval::all(q.n()) {
        ms.add(iv, rng.gen_range(0..=max_mult));
    }
    let r = interval_sum_rep(q, field, &ms);
    let p: Vec<Matrix> = r.dims().iter().map(|&d| random_basis_change(field, d, rng)).collect();
    (r.base_change(&p), ms)
}

/// Random dimensions in `0..=max_dim` and random arrow matrices.
pub fn random_line_rep<R: Rng + ?Sized>(q: &LineQuiver, field: Field, max_dim: usize, rng: &mut R) -> Rep {
    let shape = line_shape(q);
    let dims: Vec<usize> = (0..q.n()).map(|_| rng.gen_range(0..=max_dim)).collect();
    let maps = shape.hasse().iter().map(|&(s, t)| Matrix::random(field, dims[t], dims[s], rng)).collect();
    Rep::new_unchecked(shape, field, dims, maps).expect("shapes match")
}
