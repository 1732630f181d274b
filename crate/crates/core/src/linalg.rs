//! Exact dense matrices over the rationals or a prime field.
//!
//! Every matrix carries its [`Field`]; mixing fields is an error. Elimination
//! always pivots on the first nonzero entry in column order, so bases returned
//! by [`Matrix::kernel_basis`] and friends are reproducible.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("matrix is singular")]
    Singular,
    #[error("cannot parse field '{0}'")]
    BadField(String),
}

/// Ground field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    /// F_32003, the default for randomized work.
    pub const DEFAULT: Field = Field::Prime(32003);

    pub fn prime(p: u64) -> Result<Field, LinalgError> {
        if p < 2 || p >= 1 << 31 {
            return Err(LinalgError::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(LinalgError::NotPrime(p));
            }
            d += 1;
        }
        Ok(Field::Prime(p))
    }

    /// Characteristic (0 for the rationals).
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }

    /// Accepts `Q`, `rationals`, `F5`, `F_5`, `GF(5)` or a bare prime.
    pub fn parse(s: &str) -> Result<Field, LinalgError> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if lower == "q" || lower == "rationals" || lower == "rational" {
            return Ok(Field::Rationals);
        }
        let digits = lower
            .trim_start_matches("gf(")
            .trim_end_matches(')')
            .trim_start_matches("f_")
            .trim_start_matches('f')
            .trim_start_matches('p');
        let p: u64 = digits.parse().map_err(|_| LinalgError::BadField(t.to_string()))?;
        Field::prime(p)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

/// A single field element, as handed out by [`Matrix::get`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Q(BigRational),
    P { value: u64, p: u64 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::P { value, .. } => *value == 0,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{q}"),
            Scalar::P { value, p } => {
                // print the symmetric representative, easier to read
                if *value > p / 2 {
                    write!(f, "-{}", p - value)
                } else {
                    write!(f, "{value}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Data {
    Q(Vec<BigRational>),
    P(Vec<u64>),
}

trait Arith {
    type E: Clone + PartialEq;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn wrap(v: Vec<Self::E>) -> Data;
}

struct QA;
struct PA(u64);

impl Arith for QA {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn wrap(v: Vec<BigRational>) -> Data {
        Data::Q(v)
    }
}

impl Arith for PA {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.0 - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        // extended Euclid
        let (mut t, mut nt) = (0i64, 1i64);
        let (mut r, mut nr) = (self.0 as i64, *a as i64);
        while nr != 0 {
            let q = r / nr;
            (t, nt) = (nt, t - q * nt);
            (r, nr) = (nr, r - q * nr);
        }
        debug_assert_eq!(r, 1, "inverse of zero");
        t.rem_euclid(self.0 as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn wrap(v: Vec<u64>) -> Data {
        Data::P(v)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref_in<A: Arith>(a: &A, m: &mut [A::E], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.is_zero(&m[i * cols + c])) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a.inv(&m[r * cols + c]);
        for j in c..cols {
            m[r * cols + j] = a.mul(&m[r * cols + j], &inv);
        }
        for i in 0..rows {
            if i == r || a.is_zero(&m[i * cols + c]) {
                continue;
            }
            let f = m[i * cols + c].clone();
            for j in c..cols {
                if a.is_zero(&m[r * cols + j]) {
                    continue;
                }
                let t = a.mul(&f, &m[r * cols + j]);
                m[i * cols + j] = a.sub(&m[i * cols + j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Fraction-free elimination on the rows cleared of denominators.
fn bareiss_rank(d: &[BigRational], rows: usize, cols: usize) -> usize {
    let mut m: Vec<BigInt> = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let row = &d[i * cols..(i + 1) * cols];
        let lcm = row.iter().fold(BigInt::one(), |acc, x| num::integer::lcm(acc, x.denom().clone()));
        m.extend(row.iter().map(|x| x.numer() * (&lcm / x.denom())));
    }
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.swap(p * cols + j, r * cols + j);
            }
        }
        let piv = m[r * cols + c].clone();
        for i in r + 1..rows {
            let a = m[i * cols + c].clone();
            for j in c..cols {
                let v = (&piv * &m[i * cols + j] - &a * &m[r * cols + j]) / &prev;
                m[i * cols + j] = v;
            }
        }
        prev = piv;
        r += 1;
    }
    r
}

fn matmul<A: Arith>(a: &A, x: &[A::E], y: &[A::E], n: usize, k: usize, m: usize) -> Vec<A::E> {
    let mut out = vec![a.zero(); n * m];
    for i in 0..n {
        for l in 0..k {
            let xv = &x[i * k + l];
            if a.is_zero(xv) {
                continue;
            }
            for j in 0..m {
                let yv = &y[l * m + j];
                if a.is_zero(yv) {
                    continue;
                }
                let t = a.mul(xv, yv);
                out[i * m + j] = a.add(&out[i * m + j], &t);
            }
        }
    }
    out
}

fn kernel_from_rref<A: Arith>(a: &A, m: &[A::E], cols: usize, pivots: &[usize]) -> Vec<A::E> {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let k = free.len();
    let mut out = vec![a.zero(); cols * k];
    for (fi, &fc) in free.iter().enumerate() {
        out[fc * k + fi] = a.one();
        for (r, &pc) in pivots.iter().enumerate() {
            out[pc * k + fi] = a.neg(&m[r * cols + fc]);
        }
    }
    out
}

macro_rules! unary {
    ($m:expr, |$a:ident, $d:ident| $body:expr) => {
        match &$m.data {
            Data::Q($d) => {
                let $a = &QA;
                $body
            }
            Data::P($d) => {
                let $a = &PA($m.field.characteristic());
                $body
            }
        }
    };
}

macro_rules! binary {
    ($x:expr, $y:expr, |$a:ident, $d:ident, $e:ident| $body:expr) => {
        match (&$x.data, &$y.data) {
            (Data::Q($d), Data::Q($e)) => {
                let $a = &QA;
                $body
            }
            (Data::P($d), Data::P($e)) => {
                let $a = &PA($x.field.characteristic());
                $body
            }
            _ => unreachable!("field checked by caller"),
        }
    };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Data,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        let data = match field {
            Field::Rationals => Data::Q(vec![BigRational::zero(); rows * cols]),
            Field::Prime(_) => Data::P(vec![0; rows * cols]),
        };
        Matrix { field, rows, cols, data }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Row-major integer entries, reduced into the field.
    pub fn from_i64(field: Field, rows: usize, cols: usize, entries: &[i64]) -> Matrix {
        assert_eq!(entries.len(), rows * cols, "entry count");
        let mut m = Matrix::zeros(field, rows, cols);
        for (idx, &v) in entries.iter().enumerate() {
            m.set(idx / cols.max(1), idx % cols.max(1), v);
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let flat: Vec<i64> = rows.iter().flat_map(|x| x.iter().copied()).collect();
        Matrix::from_i64(field, r, c, &flat)
    }

    /// Rational entries given as (numerator, denominator) pairs.
    pub fn from_ratios(rows: usize, cols: usize, entries: &[(i64, i64)]) -> Matrix {
        assert_eq!(entries.len(), rows * cols);
        let v = entries
            .iter()
            .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect();
        Matrix { field: Field::Rationals, rows, cols, data: Data::Q(v) }
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols);
        match &mut m.data {
            Data::Q(v) => {
                for x in v.iter_mut() {
                    *x = BigRational::from_integer(BigInt::from(rng.gen_range(-3i64..=3)));
                }
            }
            Data::P(v) => {
                let p = field.characteristic();
                for x in v.iter_mut() {
                    *x = rng.gen_range(0..p);
                }
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index out of range");
        match &self.data {
            Data::Q(v) => Scalar::Q(v[i * self.cols + j].clone()),
            Data::P(v) => Scalar::P { value: v[i * self.cols + j], p: self.field.characteristic() },
        }
    }

    pub fn is_entry_zero(&self, i: usize, j: usize) -> bool {
        match &self.data {
            Data::Q(v) => v[i * self.cols + j].is_zero(),
            Data::P(v) => v[i * self.cols + j] == 0,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let c = self.cols;
        match &mut self.data {
            Data::Q(d) => d[i * c + j] = BigRational::from_integer(BigInt::from(v)),
            Data::P(d) => d[i * c + j] = PA(self.field.characteristic()).from_i64(v),
        }
    }

    /// Entry as an integer when it is one (rationals) or its symmetric representative (F_p).
    pub fn entry_i64(&self, i: usize, j: usize) -> Option<i64> {
        match self.get(i, j) {
            Scalar::Q(q) => {
                if q.is_integer() {
                    num::ToPrimitive::to_i64(&q.to_integer())
                } else {
                    None
                }
            }
            Scalar::P { value, p } => Some(if value > p / 2 { value as i64 - p as i64 } else { value as i64 }),
        }
    }

    /// Copies `block` into position (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert_eq!(self.field, block.field);
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        let (c, bc) = (self.cols, block.cols);
        match (&mut self.data, &block.data) {
            (Data::Q(d), Data::Q(b)) => {
                for i in 0..block.rows {
                    for j in 0..bc {
                        d[(r0 + i) * c + c0 + j] = b[i * bc + j].clone();
                    }
                }
            }
            (Data::P(d), Data::P(b)) => {
                for i in 0..block.rows {
                    d[(r0 + i) * c + c0..(r0 + i) * c + c0 + bc].copy_from_slice(&b[i * bc..(i + 1) * bc]);
                }
            }
            _ => unreachable!(),
        }
    }

    /// Adds `block` into position (r0, c0).
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert_eq!(self.field, block.field);
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        let (c, bc) = (self.cols, block.cols);
        let p = self.field.characteristic();
        match (&mut self.data, &block.data) {
            (Data::Q(d), Data::Q(b)) => {
                for i in 0..block.rows {
                    for j in 0..bc {
                        let x = &b[i * bc + j];
                        if !x.is_zero() {
                            d[(r0 + i) * c + c0 + j] += x;
                        }
                    }
                }
            }
            (Data::P(d), Data::P(b)) => {
                let a = PA(p);
                for i in 0..block.rows {
                    for j in 0..bc {
                        let idx = (r0 + i) * c + c0 + j;
                        d[idx] = a.add(&d[idx], &b[i * bc + j]);
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn block(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let c = self.cols;
        let data = match &self.data {
            Data::Q(d) => {
                Data::Q((0..rows).flat_map(|i| d[(r0 + i) * c + c0..(r0 + i) * c + c0 + cols].to_vec()).collect())
            }
            Data::P(d) => {
                Data::P((0..rows).flat_map(|i| d[(r0 + i) * c + c0..(r0 + i) * c + c0 + cols].to_vec()).collect())
            }
        };
        Matrix { field: self.field, rows, cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            out.set_block(0, k, &self.block(0, self.rows, j, 1));
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            out.set_block(k, 0, &self.block(i, 1, 0, self.cols));
        }
        out
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.block(0, self.rows, j, 1)
    }

    fn check_field(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.field != other.field {
            Err(LinalgError::FieldMismatch(self.field, other.field))
        } else {
            Ok(())
        }
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let data = binary!(self, other, |a, x, y| wrap_of(a, matmul(a, x, y, n, k, m)));
        Ok(Matrix { field: self.field, rows: n, cols: m, data })
    }

    /// Product; panics on shape mismatch (internal use where shapes are invariant).
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("matrix product")
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape");
        self.check_field(other).expect("add field");
        let data = binary!(self, other, |a, x, y| wrap_of(
            a,
            x.iter().zip(y.iter()).map(|(p, q)| a.add(p, q)).collect()
        ));
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        let data = unary!(self, |a, x| wrap_of(a, x.iter().map(|p| a.neg(p)).collect()));
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: i64) -> Matrix {
        let data = unary!(self, |a, x| {
            let f = a.from_i64(s);
            wrap_of(a, x.iter().map(|p| a.mul(p, &f)).collect())
        });
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    /// The same entries read row by row into a `rows x cols` matrix.
    pub fn reshape(&self, rows: usize, cols: usize) -> Matrix {
        assert_eq!(rows * cols, self.rows * self.cols, "reshape size");
        Matrix { field: self.field, rows, cols, data: self.data.clone() }
    }

    pub fn transpose(&self) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        let data = match &self.data {
            Data::Q(d) => Data::Q((0..c).flat_map(|j| (0..r).map(move |i| d[i * c + j].clone())).collect()),
            Data::P(d) => Data::P((0..c).flat_map(|j| (0..r).map(move |i| d[i * c + j])).collect()),
        };
        Matrix { field: self.field, rows: c, cols: r, data }
    }

    pub fn is_zero(&self) -> bool {
        unary!(self, |a, x| x.iter().all(|p| a.is_zero(p)))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(self.field, self.rows)
    }

    pub fn hstack(field: Field, rows: usize, parts: &[&Matrix]) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut c0 = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack rows");
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        out
    }

    pub fn vstack(field: Field, cols: usize, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut r0 = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack cols");
            out.set_block(r0, 0, m);
            r0 += m.rows;
        }
        out
    }

    pub fn block_diag(field: Field, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for m in parts {
            out.set_block(r0, c0, m);
            r0 += m.rows;
            c0 += m.cols;
        }
        out
    }

    /// Kronecker product: (i*rb + k, j*cb + l) = A[i,j] B[k,l].
    pub fn kron(&self, other: &Matrix) -> Matrix {
        self.check_field(other).expect("kron field");
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Matrix::zeros(self.field, ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                if self.is_entry_zero(i, j) {
                    continue;
                }
                let s = self.block(i, 1, j, 1);
                out.set_block(i * rb, j * cb, &other.scale_by(&s));
            }
        }
        out
    }

    /// Multiplies every entry by the single entry of the 1x1 matrix `s`.
    pub fn scale_by(&self, s: &Matrix) -> Matrix {
        assert_eq!((s.rows, s.cols), (1, 1));
        let data = binary!(self, s, |a, x, y| wrap_of(a, x.iter().map(|p| a.mul(p, &y[0])).collect()));
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form together with pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let (r, c) = (self.rows, self.cols);
        let piv = match &mut m.data {
            Data::Q(d) => rref_in(&QA, d, r, c),
            Data::P(d) => rref_in(&PA(self.field.characteristic()), d, r, c),
        };
        (m, piv)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        match &self.data {
            Data::Q(d) => bareiss_rank(d, self.rows, self.cols),
            Data::P(_) => self.rref().1.len(),
        }
    }

    /// Columns spanning the kernel; there are `cols - rank` of them.
    pub fn kernel_basis(&self) -> Matrix {
        let (m, piv) = self.rref();
        let cols = self.cols;
        let free = cols - piv.len();
        let data = unary!(m, |a, x| wrap_of(a, kernel_from_rref(a, x, cols, &piv)));
        Matrix { field: self.field, rows: cols, cols: free, data }
    }

    /// Solves `self * x = b`; `Ok(None)` when no solution exists.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>, LinalgError> {
        self.check_field(b)?;
        if self.rows != b.rows {
            return Err(LinalgError::Dimension(format!("{} equations, {} right-hand rows", self.rows, b.rows)));
        }
        let aug = Matrix::hstack(self.field, self.rows, &[self, b]);
        let (r, piv) = aug.rref();
        if piv.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (row, &pc) in piv.iter().enumerate() {
            x.set_block(pc, 0, &r.block(row, 1, self.cols, b.cols));
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Dimension(format!("inverse of {}x{}", self.rows, self.cols)));
        }
        if self.rank() != self.rows {
            return Err(LinalgError::Singular);
        }
        Ok(self.solve(&Matrix::identity(self.field, self.rows))?.expect("invertible"))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// A maximal independent subset of the columns, as a matrix.
    pub fn image_basis(&self) -> Matrix {
        let (_, piv) = self.rref();
        self.select_cols(&piv)
    }

    /// Standard basis vectors completing the (independent) columns of `self` to a basis.
    pub fn complement_basis(&self) -> Matrix {
        let (_, piv) = self.transpose().rref();
        let free: Vec<usize> = (0..self.rows).filter(|i| !piv.contains(i)).collect();
        Matrix::identity(self.field, self.rows).select_cols(&free)
    }

    /// `L` with `L * self = I`, for a matrix of full column rank.
    pub fn left_inverse(&self) -> Result<Matrix, LinalgError> {
        let (_, rows) = self.transpose().rref();
        if rows.len() != self.cols {
            return Err(LinalgError::Singular);
        }
        let sub = self.select_rows(&rows).inverse()?;
        let mut l = Matrix::zeros(self.field, self.cols, self.rows);
        for (k, &r) in rows.iter().enumerate() {
            l.set_block(0, r, &sub.block(0, self.cols, k, 1));
        }
        Ok(l)
    }

    /// `R` with `self * R = I`, for a matrix of full row rank.
    pub fn right_inverse(&self) -> Result<Matrix, LinalgError> {
        Ok(self.transpose().left_inverse()?.transpose())
    }

    /// Rows spanning the left null space: `C * self = 0` and `C` has full row rank.
    pub fn cokernel_projection(&self) -> Matrix {
        self.transpose().kernel_basis().transpose()
    }

    /// Human-readable entries as strings, row-major.
    pub fn entry_strings(&self) -> Vec<String> {
        (0..self.rows).flat_map(|i| (0..self.cols).map(move |j| (i, j))).map(|(i, j)| self.get(i, j).to_string()).collect()
    }

    /// Inverse of [`Matrix::entry_strings`].
    pub fn from_strings(field: Field, rows: usize, cols: usize, entries: &[String]) -> Result<Matrix, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Dimension(format!("{} entries for {}x{}", entries.len(), rows, cols)));
        }
        let mut m = Matrix::zeros(field, rows, cols);
        for (idx, s) in entries.iter().enumerate() {
            let q: BigRational = s
                .trim()
                .parse()
                .map_err(|_| LinalgError::Dimension(format!("bad entry '{s}'")))?;
            let (i, j) = (idx / cols, idx % cols);
            match &mut m.data {
                Data::Q(d) => d[i * cols + j] = q,
                Data::P(d) => {
                    let a = PA(field.characteristic());
                    let p = BigInt::from(field.characteristic());
                    let num = (q.numer() % &p + &p) % &p;
                    let den = (q.denom() % &p + &p) % &p;
                    let n: u64 = num::ToPrimitive::to_u64(&num).unwrap_or(0);
                    let dd: u64 = num::ToPrimitive::to_u64(&den).unwrap_or(0);
                    if dd == 0 {
                        return Err(LinalgError::Dimension(format!("denominator vanishes mod p in '{s}'")));
                    }
                    d[i * cols + j] = a.mul(&n, &a.inv(&dd));
                }
            }
        }
        Ok(m)
    }

    /// Largest absolute numerator/denominator size, a rough growth gauge for rationals.
    pub fn height(&self) -> u64 {
        match &self.data {
            Data::Q(d) => d
                .iter()
                .map(|q| q.numer().abs().bits().max(q.denom().bits()))
                .max()
                .unwrap_or(0),
            Data::P(_) => 0,
        }
    }
}

fn wrap_of<A: Arith>(_a: &A, v: Vec<A::E>) -> Data {
    A::wrap(v)
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl Matrix {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MatrixWire { rows: self.rows, cols: self.cols, entries: self.entry_strings() })
            .expect("matrix json")
    }

    pub fn from_json(field: Field, v: &serde_json::Value) -> Result<Matrix, LinalgError> {
        let w: MatrixWire =
            serde_json::from_value(v.clone()).map_err(|e| LinalgError::Dimension(e.to_string()))?;
        Matrix::from_strings(field, w.rows, w.cols, &w.entries)
    }
}
