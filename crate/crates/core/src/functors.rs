//! Reflection, Coxeter, Serre and transport functors at chain level.
//!
//! Every functor acts on complexes over `Q x R` in the first variable, with
//! element index `q * |R| + r`. Plain complexes of `kQ`-modules use the
//! one-point `R` (see [`point`]); kernels are obtained by applying the same
//! code to the identity bimodule.

use std::sync::Arc;

use thiserror::Error;

use crate::derived::Complex;
use crate::linalg::Matrix;
use crate::shapes::{Embedding, LineQuiver, Poset, ShapeError, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("complex shape does not match {0} x R")]
    ShapeMismatch(String),
    #[error("sequence {0:?} is not admissible")]
    NotAdmissible(Vec<usize>),
}

/// The one-element shape.
pub fn point() -> Arc<Poset> {
    Arc::new(Poset::point())
}

fn check_shape(q: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Result<(), FunctorError> {
    if x.shape().len() != q.n() * r.len() {
        return Err(FunctorError::ShapeMismatch(q.to_string()));
    }
    Ok(())
}

/// Which new Hasse arrow is which: `(q_s, r_s, q_t, r_t)` in 0-based coordinates.
fn decode(shape: &Poset, m: usize, e: usize) -> (usize, usize, usize, usize) {
    let (s, t) = shape.hasse()[e];
    (s / m, s % m, t / m, t % m)
}

/// `s^+_a` (fiber at the sink `a`) on a complex over `Q x R`; returns the
/// reflected quiver and a complex over `σ_a Q x R`.
pub fn reflect_plus_first(
    q: &LineQuiver,
    a: usize,
    x: &Complex,
    r: &Arc<Poset>,
) -> Result<(LineQuiver, Complex), FunctorError> {
    check_shape(q, x, r)?;
    if !q.is_sink(a) {
        return Err(ShapeError::NotSink(a).into());
    }
    let q2 = q.reflect(a)?;
    Ok((q2.clone(), reflect_impl(q, &q2, a, x, r, true)))
}

/// `s^-_a` (cofiber at the source `a`).
pub fn reflect_minus_first(
    q: &LineQuiver,
    a: usize,
    x: &Complex,
    r: &Arc<Poset>,
) -> Result<(LineQuiver, Complex), FunctorError> {
    check_shape(q, x, r)?;
    if !q.is_source(a) {
        return Err(ShapeError::NotSource(a).into());
    }
    let q2 = q.reflect(a)?;
    Ok((q2.clone(), reflect_impl(q, &q2, a, x, r, false)))
}

fn reflect_impl(q: &LineQuiver, q2: &LineQuiver, a: usize, x: &Complex, r: &Arc<Poset>, plus: bool) -> Complex {
    let field = x.field();
    let m = r.len();
    let shape = Arc::new(q2.poset().product(r));
    let a0 = a - 1;
    let nbrs: Vec<usize> = q.neighbours(a).into_iter().map(|b| b - 1).collect();
    let at = |qv: usize, rv: usize| qv * m + rv;
    // degree offset of the X_a summand: fiber uses X_{i+1}, cofiber X_{i-1}
    let off: i64 = if plus { 1 } else { -1 };
    let nsum = |i: i64, rv: usize| -> usize { nbrs.iter().map(|&b| x.dim(i, at(b, rv))).sum() };
    let dim = |i: i64, v: usize| -> usize {
        let (qv, rv) = (v / m, v % m);
        if qv == a0 {
            nsum(i, rv) + x.dim(i + off, at(a0, rv))
        } else {
            x.dim(i, v)
        }
    };
    // the map ⊕ X_b -> X_a (plus) or X_a -> ⊕ X_b (minus) at degree i
    let link = |i: i64, rv: usize| -> Matrix {
        let parts: Vec<Matrix> = nbrs
            .iter()
            .map(|&b| {
                if plus {
                    x.map_between(i, at(b, rv), at(a0, rv))
                } else {
                    x.map_between(i, at(a0, rv), at(b, rv))
                }
            })
            .collect();
        if plus {
            Matrix::hstack(field, x.dim(i, at(a0, rv)), &parts.iter().collect::<Vec<_>>())
        } else {
            Matrix::vstack(field, x.dim(i, at(a0, rv)), &parts.iter().collect::<Vec<_>>())
        }
    };
    let lo = x.lo() - 1;
    let hi = x.hi() + 1;
    let shape2 = shape.clone();
    Complex::build(
        shape,
        field,
        lo,
        hi,
        dim,
        |i, e| {
            let (qs, rs, qt, rt) = decode(&shape2, m, e);
            if qs == qt {
                let old_e = |qv: usize| x.map_between(i, at(qv, rs), at(qv, rt));
                if qs != a0 {
                    return old_e(qs);
                }
                let mut blocks: Vec<Matrix> = nbrs.iter().map(|&b| old_e(b)).collect();
                let am = x.map_between(i + off, at(a0, rs), at(a0, rt));
                if plus {
                    blocks.push(am);
                } else {
                    blocks.insert(0, am);
                }
                return Matrix::block_diag(field, &blocks.iter().collect::<Vec<_>>());
            }
            let rv = rs;
            if qs != a0 && qt != a0 {
                return x.map_between(i, at(qs, rv), at(qt, rv));
            }
            // arrow adjacent to a in the reflected quiver
            let b = if qs == a0 { qt } else { qs };
            let rows = dim(i, at(qt, rv));
            let cols = dim(i, at(qs, rv));
            let mut mat = Matrix::zeros(field, rows, cols);
            let mut pos = if plus { 0 } else { x.dim(i - 1, at(a0, rv)) };
            for &c in &nbrs {
                let dc = x.dim(i, at(c, rv));
                if c == b {
                    if plus {
                        // projection fib(a) -> X_b
                        mat.set_block(0, pos, &Matrix::identity(field, dc));
                    } else {
                        // inclusion X_b -> cof(a)
                        mat.set_block(pos, 0, &Matrix::identity(field, dc));
                    }
                }
                pos += dc;
            }
            mat
        },
        |i, v| {
            let (qv, rv) = (v / m, v % m);
            if qv != a0 {
                return x.diff(i, v);
            }
            let nd: Vec<Matrix> = nbrs.iter().map(|&b| x.diff(i, at(b, rv))).collect();
            let dn = Matrix::block_diag(field, &nd.iter().collect::<Vec<_>>());
            let (n_src, n_tgt) = (nsum(i, rv), nsum(i - 1, rv));
            let (a_src, a_tgt) = (x.dim(i + off, at(a0, rv)), x.dim(i - 1 + off, at(a0, rv)));
            let mut mat = Matrix::zeros(field, n_tgt + a_tgt, n_src + a_src);
            if plus {
                // fib_i = N_i ⊕ X_a,i+1 ; d = [[d_N, 0], [-f, -d_a]]
                mat.set_block(0, 0, &dn);
                mat.set_block(n_tgt, 0, &link(i, rv).neg());
                mat.set_block(n_tgt, n_src, &x.diff(i + 1, at(a0, rv)).neg());
            } else {
                // cof_i = X_a,i-1 ⊕ N_i ; d = [[-d_a, 0], [f, d_N]]
                let mut m2 = Matrix::zeros(field, a_tgt + n_tgt, a_src + n_src);
                m2.set_block(0, 0, &x.diff(i - 1, at(a0, rv)).neg());
                m2.set_block(a_tgt, 0, &link(i - 1, rv));
                m2.set_block(a_tgt, a_src, &dn);
                mat = m2;
            }
            mat
        },
    )
}

pub fn reflect_plus(q: &LineQuiver, a: usize, x: &Complex) -> Result<(LineQuiver, Complex), FunctorError> {
    reflect_plus_first(q, a, x, &point())
}

pub fn reflect_minus(q: &LineQuiver, a: usize, x: &Complex) -> Result<(LineQuiver, Complex), FunctorError> {
    reflect_minus_first(q, a, x, &point())
}

/// `Φ^+` along a given admissible sequence of sinks, in the first variable.
pub fn coxeter_plus_seq_first(q: &LineQuiver, seq: &[usize], x: &Complex, r: &Arc<Poset>) -> Result<Complex, FunctorError> {
    if !q.is_admissible(seq) {
        return Err(FunctorError::NotAdmissible(seq.to_vec()));
    }
    let mut cur = (q.clone(), x.clone());
    for &a in seq {
        cur = reflect_plus_first(&cur.0, a, &cur.1, r)?;
    }
    Ok(cur.1)
}

pub fn coxeter_plus_first(q: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Result<Complex, FunctorError> {
    coxeter_plus_seq_first(q, &q.admissible_sequence(), x, r)
}

/// `Φ^-`: source reflections along the reversed admissible sequence.
pub fn coxeter_minus_first(q: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Result<Complex, FunctorError> {
    let mut cur = (q.clone(), x.clone());
    for &a in q.admissible_sequence().iter().rev() {
        cur = reflect_minus_first(&cur.0, a, &cur.1, r)?;
    }
    Ok(cur.1)
}

pub fn coxeter_plus(q: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
    coxeter_plus_first(q, x, &point())
}

pub fn coxeter_plus_seq(q: &LineQuiver, seq: &[usize], x: &Complex) -> Result<Complex, FunctorError> {
    coxeter_plus_seq_first(q, seq, x, &point())
}

pub fn coxeter_minus(q: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
    coxeter_minus_first(q, x, &point())
}

/// `S = Σ Φ^+`.
pub fn serre_first(q: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Result<Complex, FunctorError> {
    Ok(coxeter_plus_first(q, x, r)?.shift(1))
}

pub fn serre_inv_first(q: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Result<Complex, FunctorError> {
    coxeter_minus_first(q, &x.shift(-1), r)
}

pub fn serre(q: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
    serre_first(q, x, &point())
}

pub fn serre_inv(q: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
    serre_inv_first(q, x, &point())
}

/// `τ = Φ^+`.
pub fn tau(q: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
    coxeter_plus(q, x)
}

pub fn tau_inv(q: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
    coxeter_minus(q, x)
}

/// Reflection steps from the canonical embedding of `from` to that of `to`.
pub fn transport_steps(from: &LineQuiver, to: &LineQuiver) -> Result<Vec<Step>, FunctorError> {
    if from.n() != to.n() {
        return Err(ShapeError::CountMismatch(from.n(), to.n()).into());
    }
    Ok(Embedding::canonical(from).transport_path(&Embedding::canonical(to))?)
}

/// Applies a list of reflection steps in the first variable.
pub fn apply_steps_first(q: &LineQuiver, steps: &[Step], x: &Complex, r: &Arc<Poset>) -> Result<(LineQuiver, Complex), FunctorError> {
    let mut cur = (q.clone(), x.clone());
    for st in steps {
        cur = match *st {
            Step::Plus(a) => reflect_plus_first(&cur.0, a, &cur.1, r)?,
            Step::Minus(a) => reflect_minus_first(&cur.0, a, &cur.1, r)?,
        };
    }
    Ok(cur)
}

/// `i_{Q'}^* F_Q`, realized by the reflections of [`transport_steps`].
pub fn transport_first(from: &LineQuiver, to: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Result<Complex, FunctorError> {
    let steps = transport_steps(from, to)?;
    let (q, c) = apply_steps_first(from, &steps, x, r)?;
    debug_assert_eq!(&q, to);
    Ok(c)
}

pub fn transport(from: &LineQuiver, to: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
    transport_first(from, to, x, &point())
}

/// A functor on complexes over `Q x R`, with its source and target quivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorTag {
    ReflectPlus(usize),
    ReflectMinus(usize),
    CoxeterPlus,
    CoxeterMinus,
    Tau,
    TauInv,
    Serre,
    Sigma(i64),
    Transport(LineQuiver),
}

impl FunctorTag {
    /// Quiver of the output, for input over `q`.
    pub fn target(&self, q: &LineQuiver) -> Result<LineQuiver, FunctorError> {
        Ok(match self {
            FunctorTag::ReflectPlus(a) | FunctorTag::ReflectMinus(a) => q.reflect(*a)?,
            FunctorTag::Transport(to) => to.clone(),
            _ => q.clone(),
        })
    }

    pub fn apply_first(&self, q: &LineQuiver, x: &Complex, r: &Arc<Poset>) -> Result<Complex, FunctorError> {
        match self {
            FunctorTag::ReflectPlus(a) => Ok(reflect_plus_first(q, *a, x, r)?.1),
            FunctorTag::ReflectMinus(a) => Ok(reflect_minus_first(q, *a, x, r)?.1),
            FunctorTag::CoxeterPlus | FunctorTag::Tau => coxeter_plus_first(q, x, r),
            FunctorTag::CoxeterMinus | FunctorTag::TauInv => coxeter_minus_first(q, x, r),
            FunctorTag::Serre => serre_first(q, x, r),
            FunctorTag::Sigma(k) => Ok(x.shift(*k)),
            FunctorTag::Transport(to) => transport_first(q, to, x, r),
        }
    }

    pub fn apply(&self, q: &LineQuiver, x: &Complex) -> Result<Complex, FunctorError> {
        self.apply_first(q, x, &point())
    }

    /// Every functor applicable to `q`, for exhaustive suites.
    pub fn all_for(q: &LineQuiver) -> Vec<FunctorTag> {
        let mut v: Vec<FunctorTag> = q.sinks().into_iter().map(FunctorTag::ReflectPlus).collect();
        v.extend(q.sources().into_iter().map(FunctorTag::ReflectMinus));
        v.extend([FunctorTag::CoxeterPlus, FunctorTag::CoxeterMinus, FunctorTag::Serre, FunctorTag::Sigma(1)]);
        for q2 in LineQuiver::all_orientations(q.n()) {
            v.push(FunctorTag::Transport(q2));
        }
        v
    }
}

impl std::fmt::Display for FunctorTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctorTag::ReflectPlus(a) => write!(f, "reflect+({a})"),
            FunctorTag::ReflectMinus(a) => write!(f, "reflect-({a})"),
            FunctorTag::CoxeterPlus => write!(f, "coxeter+"),
            FunctorTag::CoxeterMinus => write!(f, "coxeter-"),
            FunctorTag::Tau => write!(f, "tau"),
            FunctorTag::TauInv => write!(f, "tau-"),
            FunctorTag::Serre => write!(f, "serre"),
            FunctorTag::Sigma(k) => write!(f, "sigma^{k}"),
            FunctorTag::Transport(q) => write!(f, "transport({})", q.code()),
        }
    }
}
