//! Exact integer and rational matrices, normal forms and lattice utilities.
//!
//! Matrices act on column vectors. Every routine here is exact; nothing in
//! this module touches floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;
pub type RatVec = Vec<Rat>;
pub type IntMat = Matrix<Int>;
pub type RatMat = Matrix<Rat>;

/// Scalars that can live in a [`Matrix`] and round-trip through JSON.
pub trait Scalar: Clone + Num + Signed + PartialEq + fmt::Display + fmt::Debug {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> std::result::Result<Self, String>;
}

impl Scalar for Int {
    fn to_json(&self) -> Value {
        match self.to_i64() {
            Some(x) => Value::from(x),
            None => Value::String(self.to_string()),
        }
    }

    fn from_json(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::Number(n) => n.as_i64().map(Int::from).ok_or_else(|| format!("not an integer: {n}")),
            Value::String(s) => s.trim().parse::<Int>().map_err(|_| format!("not an integer: {s:?}")),
            other => Err(format!("expected integer, found {other}")),
        }
    }
}

impl Scalar for Rat {
    fn to_json(&self) -> Value {
        Value::String(rat_to_string(self))
    }

    fn from_json(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::String(s) => parse_rat(s),
            Value::Number(n) => n
                .as_i64()
                .map(|x| Rat::from_integer(Int::from(x)))
                .ok_or_else(|| format!("not a rational: {n}")),
            other => Err(format!("expected rational string, found {other}")),
        }
    }
}

/// `"num/den"`, with the denominator omitted when it is 1.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> std::result::Result<Rat, String> {
    let s = s.trim();
    let bad = || format!("not a rational: {s:?}");
    match s.split_once('/') {
        None => s.parse::<Int>().map(Rat::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n = n.trim().parse::<Int>().map_err(|_| bad())?;
            let d = d.trim().parse::<Int>().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rat::new(n, d))
        }
    }
}

pub fn int(x: i64) -> Int {
    Int::from(x)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn int_vec(xs: &[i64]) -> IntVec {
    xs.iter().map(|&x| Int::from(x)).collect()
}

pub fn to_rat_vec(v: &[Int]) -> RatVec {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

/// Integer vector when every entry has denominator 1.
pub fn try_int_vec(v: &[Rat]) -> Option<IntVec> {
    v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
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

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let v = out[(i, j)].clone() + a.clone() * b.clone();
                        out[(i, j)] = v;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    /// `self - I`.
    pub fn minus_identity(&self) -> Self {
        self.sub(&Self::identity(self.rows))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Sub-block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut b = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        b
    }

    /// `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Self {
        assert_eq!(tl.rows, tr.rows);
        assert_eq!(bl.rows, br.rows);
        assert_eq!(tl.cols, bl.cols);
        assert_eq!(tr.cols, br.cols);
        let mut m = Self::zeros(tl.rows + bl.rows, tl.cols + tr.cols);
        for (blk, r0, c0) in [(tl, 0, 0), (tr, 0, tl.cols), (bl, tl.rows, 0), (br, tl.rows, tl.cols)] {
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    m[(r0 + i, c0 + j)] = blk[(i, j)].clone();
                }
            }
        }
        m
    }

    pub fn vstack(mats: &[Self], cols: usize) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for m in mats {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            rows += m.rows;
            data.extend(m.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    pub fn hstack(mats: &[Self], rows: usize) -> Self {
        Self::vstack(&mats.iter().map(Matrix::transpose).collect::<Vec<_>>(), rows).transpose()
    }

    /// Column-major flattening.
    pub fn vectorize(&self) -> Vec<T> {
        (0..self.cols).flat_map(|j| self.col(j)).collect()
    }

    pub fn from_vectorized(rows: usize, cols: usize, v: &[T]) -> Self {
        assert_eq!(v.len(), rows * cols);
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = v[j * rows + i].clone();
            }
        }
        m
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a.clone() * other[(k, l)].clone();
                    }
                }
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &T) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self[(dst, j)].clone() + f.clone() * self[(src, j)].clone();
            self[(dst, j)] = v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, f: &T) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, dst)].clone() + f.clone() * self[(i, src)].clone();
            self[(i, dst)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// Replace rows (a, b) by (x·a + y·b, z·a + w·b).
    fn combine_rows(&mut self, a: usize, b: usize, [x, y, z, w]: [&T; 4]) {
        for j in 0..self.cols {
            let ra = self[(a, j)].clone();
            let rb = self[(b, j)].clone();
            self[(a, j)] = x.clone() * ra.clone() + y.clone() * rb.clone();
            self[(b, j)] = z.clone() * ra + w.clone() * rb;
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Value>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_json()).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Value>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(T::from_json).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Matrix::from_rows(parsed).map_err(D::Error::custom)
    }
}

impl IntMat {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Int>> = rows.iter().map(|r| int_vec(r)).collect();
        Matrix::from_rows(rows).expect("ragged literal")
    }

    pub fn to_rat(&self) -> RatMat {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        }
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn det(&self) -> Int {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v =
                        (m[(i, j)].clone() * m[(k, k)].clone() - m[(i, k)].clone() * m[(k, j)].clone()) / prev.clone();
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMat> {
        if !self.is_unimodular() {
            return Err(Error::NotUnimodular(format!("{self:?}")));
        }
        let inv = self
            .to_rat()
            .inverse()
            .ok_or_else(|| Error::NotUnimodular(format!("{self:?}")))?;
        inv.try_to_int()
            .ok_or_else(|| Error::NotUnimodular(format!("{self:?}")))
    }

    pub fn rank(&self) -> usize {
        rref_transform(&self.to_rat()).pivots.len()
    }
}

impl RatMat {
    pub fn try_to_int(&self) -> Option<IntMat> {
        let data = try_int_vec(&self.data)?;
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn inverse(&self) -> Option<RatMat> {
        if !self.is_square() {
            return None;
        }
        let r = rref_transform(self);
        (r.pivots.len() == self.rows).then_some(r.transform)
    }

    /// Scale every row by the lcm of its denominators, giving an integer
    /// matrix with the same rational row space and kernel.
    pub fn clear_row_denominators(&self) -> IntMat {
        let mut out = IntMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let l = (0..self.cols).fold(Int::one(), |acc, j| acc.lcm(self[(i, j)].denom()));
            for j in 0..self.cols {
                out[(i, j)] = (self[(i, j)].clone() * Rat::from_integer(l.clone())).to_integer();
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref_transform(self).pivots.len()
    }
}

/// Serde adapter for `Vec<T>` of scalars.
pub mod vec_json {
    use super::*;

    pub fn serialize<T: Scalar, S: Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(Scalar::to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<T>, D::Error> {
        let raw: Vec<Value> = Vec::deserialize(d)?;
        raw.iter()
            .map(T::from_json)
            .collect::<std::result::Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Vec<T>>` of scalars.
pub mod vecs_json {
    use super::*;

    pub fn serialize<T: Scalar, S: Serializer>(v: &[Vec<T>], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter()
            .map(|r| r.iter().map(Scalar::to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<T>>, D::Error> {
        let raw: Vec<Vec<Value>> = Vec::deserialize(d)?;
        raw.iter()
            .map(|r| r.iter().map(T::from_json).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Integer helpers

/// Extended Euclid: returns `(g, x, y)` with `x·a + y·b = g ≥ 0`.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = old_r - q.clone() * r.clone();
        old_r = std::mem::replace(&mut r, nr);
        let ns = old_s - q.clone() * s.clone();
        old_s = std::mem::replace(&mut s, ns);
        let nt = old_t - q * t.clone();
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd_all(xs: &[Int]) -> Int {
    xs.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

// ---------------------------------------------------------------------------
// Normal forms

/// Row Hermite normal form: returns `(H, U)` with `U·M = H`, `U` unimodular,
/// pivots positive and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(m: &IntMat) -> (IntMat, IntMat) {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.rows);
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        for i in r + 1..m.rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(i, c)].clone();
            let (g, x, y) = ext_gcd(&a, &b);
            let z = -(b / g.clone());
            let w = a / g;
            h.combine_rows(r, i, [&x, &y, &z, &w]);
            u.combine_rows(r, i, [&x, &y, &z, &w]);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let pivot = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&pivot);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &-q.clone());
                u.add_row_multiple(i, r, &-q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `U·M·V = S`, `U` and `V`
/// unimodular, `S` diagonal with non-negative entries `d₁ | d₂ | …`.
pub fn snf(m: &IntMat) -> (IntMat, IntMat, IntMat) {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (s, u, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = s[(i, t)].div_floor(&s[(t, t)]);
                if !q.is_zero() {
                    s.add_row_multiple(i, t, &-q.clone());
                    u.add_row_multiple(i, t, &-q);
                }
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                let q = s[(t, j)].div_floor(&s[(t, t)]);
                if !q.is_zero() {
                    s.add_col_multiple(j, t, &-q.clone());
                    v.add_col_multiple(j, t, &-q);
                }
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let pivot = s[(t, t)].clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    s.add_row_multiple(t, i, &Int::one());
                    u.add_row_multiple(t, i, &Int::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

/// Diagonal of a Smith form, up to `min(rows, cols)`.
pub fn invariant_factors(m: &IntMat) -> Vec<Int> {
    let (s, _, _) = snf(m);
    (0..m.rows.min(m.cols)).map(|i| s[(i, i)].clone()).collect()
}

// ---------------------------------------------------------------------------
// Rational elimination

/// Reduced row echelon form together with the row transform `E`
/// (`E·M = R`, `E` invertible).
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: RatMat,
    pub transform: RatMat,
    pub pivots: Vec<usize>,
}

pub fn rref_transform(m: &RatMat) -> Rref {
    let mut r = m.clone();
    let mut e = RatMat::identity(m.rows);
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&i| !r[(i, c)].is_zero()) else {
            continue;
        };
        r.swap_rows(row, p);
        e.swap_rows(row, p);
        let inv = r[(row, c)].recip();
        for j in 0..m.cols {
            let v = r[(row, j)].clone() * inv.clone();
            r[(row, j)] = v;
        }
        for j in 0..m.rows {
            let v = e[(row, j)].clone() * inv.clone();
            e[(row, j)] = v;
        }
        for i in 0..m.rows {
            if i != row && !r[(i, c)].is_zero() {
                let f = -r[(i, c)].clone();
                r.add_row_multiple(i, row, &f);
                e.add_row_multiple(i, row, &f);
            }
        }
        pivots.push(c);
        row += 1;
    }
    Rref {
        reduced: r,
        transform: e,
        pivots,
    }
}

/// Particular solution plus a basis of the homogeneous solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSolution {
    pub particular: RatVec,
    pub nullspace: Vec<RatVec>,
}

/// Solve `M·x = b` over Q. Free variables are set to zero in the particular
/// solution.
pub fn solve_rational(m: &RatMat, b: &[Rat]) -> Option<RationalSolution> {
    assert_eq!(m.rows, b.len(), "right-hand side length mismatch");
    let rr = rref_transform(m);
    let c = rr.transform.mul_vec(b);
    let rank = rr.pivots.len();
    if c[rank..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); m.cols];
    for (i, &pc) in rr.pivots.iter().enumerate() {
        x[pc] = c[i].clone();
    }
    let free: Vec<usize> = (0..m.cols).filter(|j| !rr.pivots.contains(j)).collect();
    let nullspace = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); m.cols];
            v[f] = Rat::one();
            for (i, &pc) in rr.pivots.iter().enumerate() {
                v[pc] = -rr.reduced[(i, f)].clone();
            }
            v
        })
        .collect();
    Some(RationalSolution {
        particular: x,
        nullspace,
    })
}

/// Integer solution of `M·x = b` via the Smith form, if one exists.
pub fn solve_diophantine(m: &IntMat, b: &[Int]) -> Option<IntVec> {
    assert_eq!(m.rows, b.len(), "right-hand side length mismatch");
    let (s, u, v) = snf(m);
    let c = u.mul_vec(b);
    let mut y = vec![Int::zero(); m.cols];
    for (i, ci) in c.iter().enumerate() {
        let d = if i < m.cols { s[(i, i)].clone() } else { Int::zero() };
        if d.is_zero() {
            if !ci.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ci.div_mod_floor(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(v.mul_vec(&y))
}

// ---------------------------------------------------------------------------
// Lattices

/// A saturated sublattice of `Z^ambient`, stored by a basis in row Hermite
/// normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Lattice {
    pub ambient: usize,
    #[serde(with = "vecs_json")]
    pub basis: Vec<IntVec>,
}

impl Lattice {
    pub fn zero(ambient: usize) -> Self {
        Lattice {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Lattice {
            ambient,
            basis: IntMat::identity(ambient).to_rows(),
        }
    }

    /// Saturation `(span ⊗ Q) ∩ Z^ambient` of the given vectors.
    pub fn saturated_span(ambient: usize, vectors: &[IntVec]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let rows = IntMat::from_rows(vectors.to_vec()).expect("vectors of equal length");
        assert_eq!(rows.cols, ambient);
        let annihilator = kernel_saturated(&rows);
        if annihilator.basis.is_empty() {
            return Self::full(ambient);
        }
        let ann = IntMat::from_rows(annihilator.basis).unwrap();
        kernel_saturated(&ann)
    }

    /// Wraps a basis after checking that it spans a saturated lattice.
    pub fn from_basis(ambient: usize, basis: Vec<IntVec>) -> Result<Self> {
        if basis.iter().any(|v| v.len() != ambient) {
            return Err(Error::Dimension("lattice vector length".into()));
        }
        if basis.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let m = IntMat::from_rows(basis).unwrap();
        if m.rank() != m.rows || !invariant_factors(&m).iter().all(One::is_one) {
            return Err(Error::NotSaturated);
        }
        Ok(Self::canonical(ambient, &m))
    }

    fn canonical(ambient: usize, rows: &IntMat) -> Self {
        let (h, _) = hnf(rows);
        Lattice {
            ambient,
            basis: h
                .to_rows()
                .into_iter()
                .filter(|r| r.iter().any(|x| !x.is_zero()))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Basis vectors as matrix columns (`ambient × rank`).
    pub fn basis_matrix(&self) -> IntMat {
        IntMat::from_cols(self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        if self.basis.is_empty() {
            return v.iter().all(Zero::is_zero);
        }
        solve_diophantine(&self.basis_matrix(), v).is_some()
    }

    /// True when `Z^ambient / L` is torsion-free.
    pub fn is_saturated(&self) -> bool {
        self.basis.is_empty() || invariant_factors(&self.basis_matrix()).iter().all(One::is_one)
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient, other.ambient);
        let mut ann = kernel_rows(self);
        ann.extend(kernel_rows(other));
        if ann.is_empty() {
            return Self::full(self.ambient);
        }
        kernel_saturated(&IntMat::from_rows(ann).unwrap())
    }
}

fn kernel_rows(l: &Lattice) -> Vec<IntVec> {
    if l.basis.is_empty() {
        return IntMat::identity(l.ambient).to_rows();
    }
    kernel_saturated(&IntMat::from_rows(l.basis.clone()).unwrap()).basis
}

/// Saturated basis of `{v ∈ Z^n : M·v = 0}`.
pub fn kernel_saturated(m: &IntMat) -> Lattice {
    let n = m.cols;
    let (h, u) = hnf(&m.transpose());
    let basis: Vec<IntVec> = (0..n)
        .filter(|&i| (0..h.cols).all(|j| h[(i, j)].is_zero()))
        .map(|i| u.row(i))
        .collect();
    if basis.is_empty() {
        return Lattice::zero(n);
    }
    Lattice::canonical(n, &IntMat::from_rows(basis).unwrap())
}

pub fn kernel_saturated_rat(m: &RatMat) -> Lattice {
    kernel_saturated(&m.clear_row_denominators())
}

/// Unimodular `Q` whose last `rank(L)` columns are the basis of `L`.
pub fn complete_to_unimodular(l: &Lattice) -> Result<IntMat> {
    if !l.is_saturated() {
        return Err(Error::NotSaturated);
    }
    let q = l.ambient;
    let r = l.rank();
    let saturated = |cols: &[IntVec]| {
        let m = IntMat::from_cols(q, cols);
        invariant_factors(&m).iter().all(One::is_one)
    };
    // prefer standard basis vectors as the complement
    let mut complement: Vec<IntVec> = Vec::new();
    for j in 0..q {
        if complement.len() == q - r {
            break;
        }
        let mut e = vec![Int::zero(); q];
        e[j] = Int::one();
        let mut trial = complement.clone();
        trial.push(e.clone());
        trial.extend(l.basis.iter().cloned());
        if saturated(&trial) {
            complement.push(e);
        }
    }
    if complement.len() < q - r {
        let (_, u, _) = snf(&l.basis_matrix());
        let uinv = u.inverse_unimodular()?;
        complement = (r..q).map(|j| uinv.col(j)).collect();
    }
    let mut cols = complement;
    cols.extend(l.basis.iter().cloned());
    let mut out = IntMat::from_cols(q, &cols);
    if out.det().is_negative() && q > r {
        out.negate_col(0);
    }
    debug_assert!(out.is_unimodular());
    Ok(out)
}
