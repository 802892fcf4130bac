//! The five Euclidean imaginary quadratic rings, their residue fields and
//! 2x2 matrices over them.
//!
//! Elements are stored as `a + b*w` where `w = sqrt(-d)` for d = 1, 2 and
//! `w = (1 + sqrt(-d))/2` for d = 3, 7, 11. In both cases `w` satisfies
//! `w^2 - t*w + n = 0` with `(t, n) = (0, d)` or `(1, (d+1)/4)`.

pub mod arith;
mod int;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use int::Z;

/// One of the rings of integers of Q(sqrt(-d)), d in {1, 2, 3, 7, 11}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct RingId {
    d: u32,
}

impl RingId {
    pub const SUPPORTED: [u32; 5] = [1, 2, 3, 7, 11];

    pub fn new(d: u32) -> Result<RingId> {
        if Self::SUPPORTED.contains(&d) {
            Ok(RingId { d })
        } else {
            Err(Error::UnsupportedRing(d))
        }
    }

    pub fn all() -> impl Iterator<Item = RingId> {
        Self::SUPPORTED.into_iter().map(|d| RingId { d })
    }

    pub fn d(self) -> u32 {
        self.d
    }

    /// Trace of `w`.
    pub fn t(self) -> i64 {
        if self.d % 4 == 3 {
            1
        } else {
            0
        }
    }

    /// Norm of `w`.
    pub fn n(self) -> i64 {
        if self.d % 4 == 3 {
            (self.d as i64 + 1) / 4
        } else {
            self.d as i64
        }
    }

    /// Field discriminant.
    pub fn discriminant(self) -> i64 {
        if self.d % 4 == 3 {
            -(self.d as i64)
        } else {
            -4 * self.d as i64
        }
    }

    pub fn elem(self, a: impl Into<Z>, b: impl Into<Z>) -> QuadInt {
        QuadInt { a: a.into(), b: b.into(), ring: self }
    }

    pub fn int(self, a: impl Into<Z>) -> QuadInt {
        self.elem(a, 0)
    }

    pub fn zero(self) -> QuadInt {
        self.int(0)
    }

    pub fn one(self) -> QuadInt {
        self.int(1)
    }

    pub fn omega(self) -> QuadInt {
        self.elem(0, 1)
    }

    pub fn units(self) -> Vec<QuadInt> {
        match self.d {
            1 => vec![self.int(1), self.elem(0, 1), self.int(-1), self.elem(0, -1)],
            // powers of w, a primitive sixth root of unity
            3 => vec![
                self.int(1),
                self.elem(0, 1),
                self.elem(-1, 1),
                self.int(-1),
                self.elem(0, -1),
                self.elem(1, -1),
            ],
            _ => vec![self.int(1), self.int(-1)],
        }
    }

    /// A unit that is not a square of a unit: generates the unit group modulo squares.
    pub fn nonsquare_unit(self) -> QuadInt {
        match self.d {
            1 => self.elem(0, 1),
            3 => self.elem(0, 1),
            _ => self.int(-1),
        }
    }
}

impl TryFrom<u32> for RingId {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        RingId::new(d)
    }
}

impl From<RingId> for u32 {
    fn from(r: RingId) -> u32 {
        r.d
    }
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

impl fmt::Debug for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O_{}", self.d)
    }
}

/// `a + b*w` in the ring `ring`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    pub a: Z,
    pub b: Z,
    #[serde(rename = "d")]
    pub ring: RingId,
}

impl QuadInt {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn norm(&self) -> Z {
        let r = self.ring;
        let ab = &self.a * &self.b;
        &(&(&self.a * &self.a) + &(&ab * &Z::from(r.t()))) + &(&(&self.b * &self.b) * &Z::from(r.n()))
    }

    pub fn conj(&self) -> QuadInt {
        let t = Z::from(self.ring.t());
        QuadInt { a: &self.a + &(&t * &self.b), b: -&self.b, ring: self.ring }
    }

    pub fn trace(&self) -> Z {
        let t = Z::from(self.ring.t());
        &(&self.a + &self.a) + &(&t * &self.b)
    }

    pub fn scale(&self, k: &Z) -> QuadInt {
        QuadInt { a: &self.a * k, b: &self.b * k, ring: self.ring }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self) -> Option<QuadInt> {
        if self.is_unit() {
            Some(self.conj())
        } else {
            None
        }
    }

    pub fn pow(&self, e: u32) -> QuadInt {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The lexicographically largest `(a, b)` among the unit multiples of `self`,
    /// together with the unit that produces it.
    pub fn canonical_with_unit(&self) -> (QuadInt, QuadInt) {
        let mut best: Option<(QuadInt, QuadInt)> = None;
        for u in self.ring.units() {
            let cand = &u * self;
            let better = match &best {
                None => true,
                Some((b, _)) => (&cand.a, &cand.b) > (&b.a, &b.b),
            };
            if better {
                best = Some((cand, u));
            }
        }
        best.unwrap()
    }

    pub fn canonical(&self) -> QuadInt {
        self.canonical_with_unit().0
    }

    pub fn is_associate(&self, other: &QuadInt) -> bool {
        self.canonical() == other.canonical()
    }

    /// Euclidean division: `self = q*y + r` with `N(r) < N(y)`.
    ///
    /// The exact quotient `self*conj(y)/N(y)` is rounded coordinatewise and the
    /// surrounding lattice points are compared; the remainder of smallest norm
    /// wins, ties going to the lexicographically smallest remainder.
    pub fn div_rem(&self, y: &QuadInt) -> Result<(QuadInt, QuadInt)> {
        if y.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ring = self.ring;
        let ny = y.norm();
        let num = self * &y.conj();
        let qa0 = num.a.div_round(&ny);
        let qb0 = num.b.div_round(&ny);
        let mut best: Option<(QuadInt, QuadInt, Z)> = None;
        for da in -1i64..=1 {
            for db in -1i64..=1 {
                let q = ring.elem(&qa0 + &Z::from(da), &qb0 + &Z::from(db));
                let r = self - &(&q * y);
                let nr = r.norm();
                let better = match &best {
                    None => true,
                    Some((_, br, bn)) => nr < *bn || (nr == *bn && (&r.a, &r.b) < (&br.a, &br.b)),
                };
                if better {
                    best = Some((q, r, nr));
                }
            }
        }
        let (q, r, nr) = best.unwrap();
        debug_assert!(nr < ny);
        Ok((q, r))
    }

    /// Exact quotient, or `None` when `y` does not divide `self`.
    pub fn div_exact(&self, y: &QuadInt) -> Option<QuadInt> {
        if y.is_zero() {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        let ny = y.norm();
        let num = self * &y.conj();
        let (qa, ra) = num.a.div_mod_floor(&ny);
        let (qb, rb) = num.b.div_mod_floor(&ny);
        if ra.is_zero() && rb.is_zero() {
            Some(self.ring.elem(qa, qb))
        } else {
            None
        }
    }

    pub fn divides(&self, x: &QuadInt) -> bool {
        x.div_exact(self).is_some()
    }

    /// Canonical generator of the ideal `(self, y)`.
    pub fn gcd(&self, y: &QuadInt) -> Result<QuadInt> {
        Ok(self.xgcd(y)?.0)
    }

    /// `(g, u, v)` with `u*self + v*y = g`, `g` canonical.
    pub fn xgcd(&self, y: &QuadInt) -> Result<(QuadInt, QuadInt, QuadInt)> {
        if self.is_zero() && y.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let ring = self.ring;
        let (mut r0, mut r1) = (self.clone(), y.clone());
        let (mut u0, mut u1) = (ring.one(), ring.zero());
        let (mut v0, mut v1) = (ring.zero(), ring.one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let u = &u0 - &(&q * &u1);
            let v = &v0 - &(&q * &v1);
            r0 = std::mem::replace(&mut r1, r);
            u0 = std::mem::replace(&mut u1, u);
            v0 = std::mem::replace(&mut v1, v);
        }
        let (g, unit) = r0.canonical_with_unit();
        Ok((g, &unit * &u0, &unit * &v0))
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let w = "w";
        let bpart = if self.b.is_one() {
            w.to_string()
        } else if self.b == Z::from(-1) {
            format!("-{w}")
        } else {
            format!("{}{w}", self.b)
        };
        if self.a.is_zero() {
            write!(f, "{bpart}")
        } else if self.b.is_negative() {
            write!(f, "{}{bpart}", self.a)
        } else {
            write!(f, "{}+{bpart}", self.a)
        }
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn add(self, o: &'a QuadInt) -> QuadInt {
        debug_assert_eq!(self.ring, o.ring);
        QuadInt { a: &self.a + &o.a, b: &self.b + &o.b, ring: self.ring }
    }
}

impl<'a> Sub<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn sub(self, o: &'a QuadInt) -> QuadInt {
        debug_assert_eq!(self.ring, o.ring);
        QuadInt { a: &self.a - &o.a, b: &self.b - &o.b, ring: self.ring }
    }
}

impl<'a> Mul<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn mul(self, o: &'a QuadInt) -> QuadInt {
        debug_assert_eq!(self.ring, o.ring);
        let r = self.ring;
        let be = &self.b * &o.b;
        let a = &(&self.a * &o.a) - &(&be * &Z::from(r.n()));
        let mut b = &(&self.a * &o.b) + &(&self.b * &o.a);
        if r.t() != 0 {
            b += &be;
        }
        QuadInt { a, b, ring: r }
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt { a: -&self.a, b: -&self.b, ring: self.ring }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $m(self, o: QuadInt) -> QuadInt {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}

/// 2x2 matrix `(a b; c d)` over one ring.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: QuadInt,
    pub b: QuadInt,
    pub c: QuadInt,
    pub d: QuadInt,
}

impl Mat2 {
    pub fn new(a: QuadInt, b: QuadInt, c: QuadInt, d: QuadInt) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn identity(ring: RingId) -> Mat2 {
        Mat2::scalar(ring.one())
    }

    pub fn scalar(s: QuadInt) -> Mat2 {
        let z = s.ring.zero();
        Mat2 { a: s.clone(), b: z.clone(), c: z, d: s }
    }

    pub fn ring(&self) -> RingId {
        self.a.ring
    }

    pub fn det(&self) -> QuadInt {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn conj(&self) -> Mat2 {
        Mat2 { a: self.a.conj(), b: self.b.conj(), c: self.c.conj(), d: self.d.conj() }
    }

    pub fn trace(&self) -> QuadInt {
        &self.a + &self.d
    }

    /// Inverse, defined when the determinant is a unit.
    pub fn inverse(&self) -> Option<Mat2> {
        let inv = self.det().unit_inverse()?;
        Some(Mat2 {
            a: &self.d * &inv,
            b: &(-&self.b) * &inv,
            c: &(-&self.c) * &inv,
            d: &self.a * &inv,
        })
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Scalar matrix by a unit, i.e. trivial in PGL.
    pub fn is_unit_scalar(&self) -> bool {
        self.is_scalar() && self.a.is_unit()
    }

    /// Plus or minus the identity, i.e. trivial in PSL.
    pub fn is_pm_identity(&self) -> bool {
        self.is_scalar() && (self.a.is_one() || (-&self.a).is_one())
    }

    pub fn pow(&self, e: i64) -> Option<Mat2> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Mat2::identity(self.ring());
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    pub fn scale(&self, s: &QuadInt) -> Mat2 {
        Mat2 { a: s * &self.a, b: s * &self.b, c: s * &self.c, d: s * &self.d }
    }

    /// Representative of the class of `self` modulo unit scalars: the unit
    /// multiple whose first nonzero entry is canonical.
    pub fn projective_normal_form(&self) -> Mat2 {
        let lead = [&self.a, &self.b, &self.c, &self.d].into_iter().find(|x| !x.is_zero()).unwrap();
        let (_, u) = lead.canonical_with_unit();
        self.scale(&u)
    }

    /// Representative modulo +-1.
    pub fn sign_normal_form(&self) -> Mat2 {
        let lead = [&self.a, &self.b, &self.c, &self.d].into_iter().find(|x| !x.is_zero()).unwrap();
        if (&lead.a, &lead.b) < (&Z::ZERO, &Z::ZERO) {
            self.scale(&self.ring().int(-1))
        } else {
            self.clone()
        }
    }

    pub fn entries(&self) -> [&QuadInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

impl<'a> Mul<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;
    fn mul(self, o: &'a Mat2) -> Mat2 {
        Mat2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }
}

impl Mul<Mat2> for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        &self * &o
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

/// Roots of `x^2 - t x + n` modulo the prime `p`, ascending.
fn minpoly_roots(ring: RingId, p: u64) -> Vec<u64> {
    let t = ring.t().rem_euclid(p as i64) as u64;
    let n = ring.n().rem_euclid(p as i64) as u64;
    if p == 2 {
        return (0..2).filter(|&x| (x * x + (p - t) * x + n).is_multiple_of(2)).collect();
    }
    let disc = (arith::mul_mod(t, t, p) + p - arith::mul_mod(4, n, p)) % p;
    let Some(s) = arith::sqrt_mod(disc, p) else {
        return Vec::new();
    };
    let half = arith::inv_mod(2, p);
    let mut roots = vec![arith::mul_mod((t + s) % p, half, p), arith::mul_mod((t + p - s) % p, half, p)];
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Decomposition type of the rational prime `p` and a prime element above it.
pub fn split_type(p: u64, ring: RingId) -> Result<(SplitKind, QuadInt)> {
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let roots = minpoly_roots(ring, p);
    let kind = match roots.len() {
        0 => SplitKind::Inert,
        1 => SplitKind::Ramified,
        _ => SplitKind::Split,
    };
    let pi = match roots.first() {
        None => ring.int(p),
        Some(&r) => ring.int(p).gcd(&ring.elem(-(r as i64), 1))?,
    };
    Ok((kind, pi))
}

/// Element `c0 + c1*w` of a residue field; `c1 = 0` for residue degree one.
pub type Fq = [u64; 2];

/// The residue field of a prime element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueField {
    pub pi: QuadInt,
    pub p: u64,
    pub kind: SplitKind,
    /// Image of `w` for residue degree one.
    root: Option<u64>,
}

impl ResidueField {
    /// The residue field of the prime element `pi`.
    pub fn new(pi: &QuadInt) -> Result<ResidueField> {
        let ring = pi.ring;
        let norm = pi.norm();
        let nv = norm.as_i64().filter(|v| *v > 1).ok_or_else(|| {
            Error::InvalidArgument(format!("{pi} is not a prime element"))
        })? as u64;
        if arith::is_prime_u64(nv) {
            let (kind, _) = split_type(nv, ring)?;
            // pi = a + b w with p not dividing b, so w = -a/b mod pi
            let a = arith::to_residue(&pi.a, nv);
            let b = arith::to_residue(&pi.b, nv);
            let root = arith::mul_mod(nv - a, arith::inv_mod(b, nv), nv) % nv;
            Ok(ResidueField { pi: pi.clone(), p: nv, kind, root: Some(root) })
        } else {
            let p = (nv as f64).sqrt().round() as u64;
            if p * p != nv || !arith::is_prime_u64(p) {
                return Err(Error::InvalidArgument(format!("{pi} is not a prime element")));
            }
            let (kind, _) = split_type(p, ring)?;
            if kind != SplitKind::Inert || !pi.is_associate(&ring.int(p)) {
                return Err(Error::InvalidArgument(format!("{pi} is not a prime element")));
            }
            Ok(ResidueField { pi: pi.clone(), p, kind, root: None })
        }
    }

    /// Residue field of the prime above `p` returned by [`split_type`].
    pub fn above(p: u64, ring: RingId) -> Result<ResidueField> {
        let (_, pi) = split_type(p, ring)?;
        ResidueField::new(&pi)
    }

    pub fn ring(&self) -> RingId {
        self.pi.ring
    }

    pub fn degree(&self) -> u32 {
        if self.root.is_some() {
            1
        } else {
            2
        }
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.degree())
    }

    /// Image of `w` in the field (degree one only).
    pub fn root(&self) -> Option<u64> {
        self.root
    }

    pub fn reduce(&self, x: &QuadInt) -> Fq {
        let p = self.p;
        let a = arith::to_residue(&x.a, p);
        let b = arith::to_residue(&x.b, p);
        match self.root {
            Some(r) => [(a + arith::mul_mod(b, r, p)) % p, 0],
            None => [a, b],
        }
    }

    pub fn from_int(&self, v: i64) -> Fq {
        [v.rem_euclid(self.p as i64) as u64, 0]
    }

    pub fn zero(&self) -> Fq {
        [0, 0]
    }

    pub fn one(&self) -> Fq {
        [1 % self.p, 0]
    }

    pub fn add(&self, x: &Fq, y: &Fq) -> Fq {
        let p = self.p;
        [(x[0] + y[0]) % p, (x[1] + y[1]) % p]
    }

    pub fn neg(&self, x: &Fq) -> Fq {
        let p = self.p;
        [(p - x[0]) % p, (p - x[1]) % p]
    }

    pub fn sub(&self, x: &Fq, y: &Fq) -> Fq {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Fq, y: &Fq) -> Fq {
        let p = self.p;
        if self.root.is_some() {
            return [arith::mul_mod(x[0], y[0], p), 0];
        }
        let ring = self.ring();
        let t = ring.t() as u64 % p;
        let n = ring.n() as u64 % p;
        // w^2 = t w - n
        let x1y1 = arith::mul_mod(x[1], y[1], p);
        let c0 = (arith::mul_mod(x[0], y[0], p) + p - arith::mul_mod(x1y1, n, p)) % p;
        let c1 = (arith::mul_mod(x[0], y[1], p) + arith::mul_mod(x[1], y[0], p) + arith::mul_mod(x1y1, t, p)) % p;
        [c0, c1]
    }

    /// Frobenius `x -> x^p`; on F_{p^2} this is induced by complex conjugation.
    pub fn frobenius(&self, x: &Fq) -> Fq {
        if self.root.is_some() {
            return *x;
        }
        let p = self.p;
        let t = self.ring().t() as u64 % p;
        [(x[0] + arith::mul_mod(t, x[1], p)) % p, (p - x[1]) % p]
    }

    pub fn is_zero(&self, x: &Fq) -> bool {
        x[0] == 0 && x[1] == 0
    }

    pub fn inv(&self, x: &Fq) -> Option<Fq> {
        if self.is_zero(x) {
            return None;
        }
        let p = self.p;
        if self.root.is_some() {
            return Some([arith::inv_mod(x[0], p), 0]);
        }
        let c = self.frobenius(x);
        let nrm = self.mul(x, &c)[0];
        Some(self.mul(&c, &[arith::inv_mod(nrm, p), 0]))
    }

    pub fn pow(&self, x: &Fq, mut e: u64) -> Fq {
        let mut acc = self.one();
        let mut base = *x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> RingId {
        RingId::new(1).unwrap()
    }

    #[test]
    fn omega_conventions() {
        for r in RingId::all() {
            let w = r.omega();
            // w^2 - t w + n = 0
            let lhs = &(&(&w * &w) - &w.scale(&Z::from(r.t()))) + &r.int(r.n());
            assert!(lhs.is_zero(), "d = {r}");
            assert_eq!(w.norm(), Z::from(r.n()));
            assert_eq!((&w * &w.conj()).b, Z::ZERO);
        }
        assert!(RingId::new(5).is_err());
    }

    #[test]
    fn units_have_norm_one() {
        for r in RingId::all() {
            let us = r.units();
            assert!(us.iter().all(|u| u.is_unit()));
            for u in &us {
                for v in &us {
                    assert!(us.contains(&(u * v)));
                }
            }
        }
    }

    #[test]
    fn division_of_five_by_two_plus_i() {
        let z = gauss();
        let (q, r) = z.int(5).div_rem(&z.elem(2, 1)).unwrap();
        assert_eq!(q, z.elem(2, -1));
        assert!(r.is_zero());
        let (q, r) = z.elem(3, 4).div_rem(&z.elem(3, 4)).unwrap();
        assert!(q.is_one() && r.is_zero());
        let (q, r) = z.zero().div_rem(&z.elem(7, 3)).unwrap();
        assert!(q.is_zero() && r.is_zero());
        assert!(z.one().div_rem(&z.zero()).is_err());
    }

    #[test]
    fn gcd_examples() {
        let z = gauss();
        let g = z.elem(1, 1).gcd(&z.int(2)).unwrap();
        assert!(g.is_associate(&z.elem(1, 1)));
        assert_eq!(g.norm(), Z::from(2));
        assert_eq!(z.elem(3, -4).gcd(&z.zero()).unwrap(), z.elem(3, -4).canonical());
        assert!(z.int(3).gcd(&z.int(5)).unwrap().is_one());
        assert!(z.zero().gcd(&z.zero()).is_err());
    }

    #[test]
    fn canonical_form_is_positive() {
        for r in RingId::all() {
            for a in -4..=4 {
                for b in -4..=4 {
                    let x = r.elem(a, b);
                    let c = x.canonical();
                    if !x.is_zero() {
                        assert!(c.a.signum() > 0 || (c.a.is_zero() && c.b.signum() > 0));
                    }
                    assert!(c.is_associate(&x));
                }
            }
        }
    }

    #[test]
    fn split_types() {
        let z = gauss();
        let (k, pi) = split_type(5, z).unwrap();
        assert_eq!(k, SplitKind::Split);
        assert_eq!(pi.norm(), Z::from(5));
        assert!(pi.is_associate(&z.elem(2, 1)) || pi.is_associate(&z.elem(2, -1)));
        let (k, pi) = split_type(2, z).unwrap();
        assert_eq!(k, SplitKind::Ramified);
        assert_eq!(pi, z.elem(1, 1));
        let (k, pi) = split_type(3, z).unwrap();
        assert_eq!(k, SplitKind::Inert);
        assert_eq!(pi, z.int(3));
        assert!(split_type(9, z).is_err());
        // 2 splits in O_7, is inert in O_3 and O_11, ramifies in O_2
        assert_eq!(split_type(2, RingId::new(7).unwrap()).unwrap().0, SplitKind::Split);
        assert_eq!(split_type(2, RingId::new(3).unwrap()).unwrap().0, SplitKind::Inert);
        assert_eq!(split_type(2, RingId::new(11).unwrap()).unwrap().0, SplitKind::Inert);
        assert_eq!(split_type(2, RingId::new(2).unwrap()).unwrap().0, SplitKind::Ramified);
        assert_eq!(split_type(11, RingId::new(11).unwrap()).unwrap().0, SplitKind::Ramified);
    }

    #[test]
    fn reduction_examples() {
        let z = gauss();
        let f = ResidueField::new(&z.elem(2, 1)).unwrap();
        assert_eq!(f.size(), 5);
        assert_eq!(f.reduce(&z.elem(0, 1)), [3, 0]);
        assert_eq!(f.reduce(&z.elem(2, 1)), [0, 0]);
        assert_eq!(f.reduce(&z.one()), [1, 0]);
        let f3 = ResidueField::new(&z.int(3)).unwrap();
        assert_eq!(f3.size(), 9);
        let i = f3.reduce(&z.omega());
        assert_eq!(f3.mul(&i, &i), f3.from_int(-1));
        assert_eq!(f3.frobenius(&i), f3.pow(&i, 3));
    }

    #[test]
    fn matrix_inverse() {
        let r = RingId::new(2).unwrap();
        let w = r.omega();
        let a = Mat2::new(r.one(), w.clone(), w.clone(), r.int(-1));
        assert_eq!(a.det(), r.one());
        let ai = a.inverse().unwrap();
        assert_eq!(&a * &ai, Mat2::identity(r));
    }

    #[test]
    fn json_shape() {
        let r = RingId::new(7).unwrap();
        let x = r.elem(3, -2);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"a":"3","b":"-2","d":7}"#);
        let back: QuadInt = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<QuadInt>(r#"{"a":"1","b":"0","d":5}"#).is_err());
    }
}
