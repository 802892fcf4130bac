//! Exact linear algebra over Euclidean rings: echelon forms, saturated
//! kernels, Smith normal form and quotient decompositions.
//!
//! Vectors are rows and matrices act on the right, matching the right group
//! actions used everywhere else in the crate.

mod dense;
mod modular;
pub mod sparse;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ring::{arith, Fq, QuadInt, ResidueField, RingId, Z};

pub use dense::{echelon, hermite, kernel_basis, quotient_decomposition, rank, smith_form, snf, solve_in_span};
pub use modular::integer_cokernel;

/// A Euclidean ring together with the operations the elimination kernels need.
pub trait EuclideanRing: Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    /// Euclidean size; zero only for zero.
    fn size(&self, x: &Self::Elem) -> Z;
    /// `x = q*y + r` with `size(r) < size(y)`.
    fn div_rem(&self, x: &Self::Elem, y: &Self::Elem) -> (Self::Elem, Self::Elem);
    fn is_unit(&self, x: &Self::Elem) -> bool;
    /// `(c, u)` with `u` a unit and `c = u*x` the chosen associate of `x`.
    fn normalize(&self, x: &Self::Elem) -> (Self::Elem, Self::Elem);
    /// The norm reported for an elementary divisor (cardinality of `R/(x)`).
    fn divisor_norm(&self, x: &Self::Elem) -> Z;

    fn div_exact(&self, x: &Self::Elem, y: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(y) {
            return if self.is_zero(x) { Some(self.zero()) } else { None };
        }
        let (q, r) = self.div_rem(x, y);
        if self.is_zero(&r) {
            Some(q)
        } else {
            None
        }
    }

    fn divides(&self, y: &Self::Elem, x: &Self::Elem) -> bool {
        self.div_exact(x, y).is_some()
    }

    /// `(g, s, t)` with `s*x + t*y = g` a gcd (not normalized).
    fn xgcd(&self, x: &Self::Elem, y: &Self::Elem) -> (Self::Elem, Self::Elem, Self::Elem) {
        let (mut r0, mut r1) = (x.clone(), y.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !self.is_zero(&r1) {
            let (q, r) = self.div_rem(&r0, &r1);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            let t = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        (r0, s0, t0)
    }
}

/// The rational integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

impl EuclideanRing for Integers {
    type Elem = Z;
    fn zero(&self) -> Z {
        Z::ZERO
    }
    fn one(&self) -> Z {
        Z::ONE
    }
    fn is_zero(&self, x: &Z) -> bool {
        x.is_zero()
    }
    fn add(&self, x: &Z, y: &Z) -> Z {
        x + y
    }
    fn sub(&self, x: &Z, y: &Z) -> Z {
        x - y
    }
    fn mul(&self, x: &Z, y: &Z) -> Z {
        x * y
    }
    fn neg(&self, x: &Z) -> Z {
        -x
    }
    fn size(&self, x: &Z) -> Z {
        x.abs()
    }
    fn div_rem(&self, x: &Z, y: &Z) -> (Z, Z) {
        // symmetric remainder keeps entries small
        let q = x.div_round(y);
        let r = x - &(&q * y);
        (q, r)
    }
    fn is_unit(&self, x: &Z) -> bool {
        x.abs().is_one()
    }
    fn normalize(&self, x: &Z) -> (Z, Z) {
        if x.is_negative() {
            (-x, Z::from(-1))
        } else {
            (x.clone(), Z::ONE)
        }
    }
    fn divisor_norm(&self, x: &Z) -> Z {
        x.abs()
    }
}

impl EuclideanRing for RingId {
    type Elem = QuadInt;
    fn zero(&self) -> QuadInt {
        RingId::zero(*self)
    }
    fn one(&self) -> QuadInt {
        RingId::one(*self)
    }
    fn is_zero(&self, x: &QuadInt) -> bool {
        x.is_zero()
    }
    fn add(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x + y
    }
    fn sub(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x - y
    }
    fn mul(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x * y
    }
    fn neg(&self, x: &QuadInt) -> QuadInt {
        -x
    }
    fn size(&self, x: &QuadInt) -> Z {
        x.norm()
    }
    fn div_rem(&self, x: &QuadInt, y: &QuadInt) -> (QuadInt, QuadInt) {
        x.div_rem(y).expect("division by zero")
    }
    fn is_unit(&self, x: &QuadInt) -> bool {
        x.is_unit()
    }
    fn normalize(&self, x: &QuadInt) -> (QuadInt, QuadInt) {
        if x.is_zero() {
            return (x.clone(), RingId::one(*self));
        }
        x.canonical_with_unit()
    }
    fn divisor_norm(&self, x: &QuadInt) -> Z {
        x.norm()
    }
    fn div_exact(&self, x: &QuadInt, y: &QuadInt) -> Option<QuadInt> {
        x.div_exact(y)
    }
}

impl EuclideanRing for ResidueField {
    type Elem = Fq;
    fn zero(&self) -> Fq {
        ResidueField::zero(self)
    }
    fn one(&self) -> Fq {
        ResidueField::one(self)
    }
    fn is_zero(&self, x: &Fq) -> bool {
        ResidueField::is_zero(self, x)
    }
    fn add(&self, x: &Fq, y: &Fq) -> Fq {
        ResidueField::add(self, x, y)
    }
    fn sub(&self, x: &Fq, y: &Fq) -> Fq {
        ResidueField::sub(self, x, y)
    }
    fn mul(&self, x: &Fq, y: &Fq) -> Fq {
        ResidueField::mul(self, x, y)
    }
    fn neg(&self, x: &Fq) -> Fq {
        ResidueField::neg(self, x)
    }
    fn size(&self, x: &Fq) -> Z {
        if ResidueField::is_zero(self, x) {
            Z::ZERO
        } else {
            Z::ONE
        }
    }
    fn div_rem(&self, x: &Fq, y: &Fq) -> (Fq, Fq) {
        let inv = self.inv(y).expect("division by zero");
        (ResidueField::mul(self, x, &inv), ResidueField::zero(self))
    }
    fn is_unit(&self, x: &Fq) -> bool {
        !ResidueField::is_zero(self, x)
    }
    fn normalize(&self, x: &Fq) -> (Fq, Fq) {
        match self.inv(x) {
            Some(inv) => (ResidueField::one(self), inv),
            None => (*x, ResidueField::one(self)),
        }
    }
    fn divisor_norm(&self, x: &Fq) -> Z {
        if ResidueField::is_zero(self, x) {
            Z::ZERO
        } else {
            Z::ONE
        }
    }
}

/// The prime field F_p, used for rank shortcuts over large primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn reduce(&self, x: &Z) -> u64 {
        arith::to_residue(x, self.p)
    }
}

impl EuclideanRing for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }
    fn add(&self, x: &u64, y: &u64) -> u64 {
        ((*x as u128 + *y as u128) % self.p as u128) as u64
    }
    fn sub(&self, x: &u64, y: &u64) -> u64 {
        ((*x as u128 + (self.p - *y) as u128) % self.p as u128) as u64
    }
    fn mul(&self, x: &u64, y: &u64) -> u64 {
        arith::mul_mod(*x, *y, self.p)
    }
    fn neg(&self, x: &u64) -> u64 {
        (self.p - *x) % self.p
    }
    fn size(&self, x: &u64) -> Z {
        if *x == 0 {
            Z::ZERO
        } else {
            Z::ONE
        }
    }
    fn div_rem(&self, x: &u64, y: &u64) -> (u64, u64) {
        (arith::mul_mod(*x, arith::inv_mod(*y, self.p), self.p), 0)
    }
    fn is_unit(&self, x: &u64) -> bool {
        *x != 0
    }
    fn normalize(&self, x: &u64) -> (u64, u64) {
        if *x == 0 {
            (0, 1)
        } else {
            (1, arith::inv_mod(*x, self.p))
        }
    }
    fn divisor_norm(&self, x: &u64) -> Z {
        Z::from(if *x == 0 { 0i64 } else { 1 })
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn zeros<R: EuclideanRing<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, ring.zero())
    }

    pub fn identity<R: EuclideanRing<Elem = E>>(ring: &R, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<E>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [E] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (i.min(j), i.max(j));
        let (a, b) = self.data.split_at_mut(hi * c);
        a[lo * c..(lo + 1) * c].swap_with_slice(&mut b[..c]);
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<F: Clone>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Rows `r0..r1`.
    pub fn row_range(&self, r0: usize, r1: usize) -> Self {
        Matrix { rows: r1 - r0, cols: self.cols, data: self.data[r0 * self.cols..r1 * self.cols].to_vec() }
    }

    /// Columns `c0..c1`.
    pub fn col_range(&self, c0: usize, c1: usize) -> Self {
        Matrix::from_fn(self.rows, c1 - c0, |i, j| self.get(i, c0 + j).clone())
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        Matrix { rows: self.rows, cols, data }
    }

    pub fn push_row(&mut self, row: Vec<E>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    /// Write `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &E> {
        self.data.iter()
    }
}

impl<E: Clone> Matrix<E> {
    pub fn mul<R: EuclideanRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let v = ring.add(out.get(i, j), &ring.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add<R: EuclideanRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        }
    }

    pub fn sub<R: EuclideanRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.sub(a, b)).collect(),
        }
    }

    pub fn neg<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> Self {
        self.map(|x| ring.neg(x))
    }

    pub fn is_zero<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    /// Kronecker product with `self` as the outer factor.
    pub fn kron<R: EuclideanRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Matrix::from_fn(r, c, |i, j| {
            let a = self.get(i / other.rows, j / other.cols);
            if ring.is_zero(a) {
                return ring.zero();
            }
            ring.mul(a, other.get(i % other.rows, j % other.cols))
        })
    }
}

impl<E: fmt::Debug> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.data[i * self.cols + j])).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Structure of a finitely generated module `R/(a_1) + ... + R/(a_m) + R^rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianDecomposition<E> {
    /// Non-unit elementary divisors in the chosen associate form, each dividing the next.
    pub divisors: Vec<E>,
    /// Norms of the divisors (orders of the cyclic factors).
    pub divisor_norms: Vec<Z>,
    pub rank: usize,
}

impl<E> AbelianDecomposition<E> {
    pub fn torsion_free(rank: usize) -> Self {
        AbelianDecomposition { divisors: Vec::new(), divisor_norms: Vec::new(), rank }
    }

    pub fn is_torsion_free(&self) -> bool {
        self.divisors.is_empty()
    }

    /// Order of the torsion submodule.
    pub fn torsion_order(&self) -> Z {
        self.divisor_norms.iter().fold(Z::ONE, |acc, n| &acc * n)
    }

    /// Decomposition from a full list of nonzero SNF diagonal entries.
    pub fn from_diagonal<R: EuclideanRing<Elem = E>>(ring: &R, diag: Vec<E>, rank: usize) -> Self {
        let mut divisors = Vec::new();
        let mut divisor_norms = Vec::new();
        for x in diag {
            if ring.is_zero(&x) || ring.is_unit(&x) {
                continue;
            }
            divisor_norms.push(ring.divisor_norm(&x));
            divisors.push(x);
        }
        AbelianDecomposition { divisors, divisor_norms, rank }
    }
}
