//! Matrices of group elements acting on the modules E_{k,l}.
//!
//! E_k is the space of homogeneous degree-k polynomials in x, y with basis
//! x^{k-i} y^i, i = 0..k. A matrix (a b; c d) acts on the right by
//! P(x, y) -> P(ax + by, cx + dy), so the row for x^{k-i} y^i holds the
//! coefficients of (ax + by)^{k-i} (cx + dy)^i. E_{k,l} = E_k (x) conj(E_l),
//! basis ordered lexicographically in (i, j).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{EuclideanRing, Integers, Matrix};
use crate::ring::{Mat2, ResidueField, RingId, Z};

/// Group whose elements act on E_{k,l}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GroupKind {
    Psl,
    Pgl,
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GroupKind::Psl => "PSL",
            GroupKind::Pgl => "PGL",
        })
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PSL" => Ok(GroupKind::Psl),
            "PGL" => Ok(GroupKind::Pgl),
            _ => Err(Error::InvalidArgument(format!("unknown group kind {s:?}"))),
        }
    }
}

/// The weights (k, l) of E_{k,l}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub k: u32,
    pub l: u32,
}

impl Weight {
    pub fn new(k: u32, l: u32) -> Weight {
        Weight { k, l }
    }

    pub fn parallel(n: u32) -> Weight {
        Weight { k: n, l: n }
    }

    pub fn dim(self) -> usize {
        ((self.k + 1) * (self.l + 1)) as usize
    }

    /// -Id (and for PGL, every unit scalar) must act trivially.
    pub fn check_for(self, ring: RingId, kind: GroupKind) -> Result<()> {
        if !(self.k + self.l).is_multiple_of(2) {
            return Err(Error::InvalidModule(format!(
                "k + l = {} is odd, so -Id acts nontrivially on E_{{{},{}}}",
                self.k + self.l,
                self.k,
                self.l
            )));
        }
        if kind == GroupKind::Pgl {
            for u in ring.units() {
                let scalar = Mat2::scalar(u.clone());
                let m = act_ekl(ring, &scalar, self);
                if m != Matrix::identity(&ring, self.dim()) {
                    return Err(Error::InvalidModule(format!(
                        "the scalar {u} acts nontrivially on E_{{{},{}}}",
                        self.k, self.l
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Coefficient rings over which group elements can act on E_{k,l}.
pub trait Coefficients: EuclideanRing + Sized {
    fn ring_id(&self) -> RingId;

    /// Matrix of `m` on E_k.
    fn sym(&self, m: &Mat2, k: u32) -> Matrix<Self::Elem>;

    /// Matrix of `m` on E_{k,l}: E_k(m) tensor E_l(conj m).
    fn act(&self, m: &Mat2, w: Weight) -> Matrix<Self::Elem> {
        let left = self.sym(m, w.k);
        if w.l == 0 {
            return left;
        }
        let right = self.sym(&m.conj(), w.l);
        left.kron(self, &right)
    }
}

/// Coefficients of `(a x + b y)^{k-i} (c x + d y)^i` for i = 0..k, as rows.
pub fn sym_power<R: EuclideanRing>(ring: &R, a: &R::Elem, b: &R::Elem, c: &R::Elem, d: &R::Elem, k: u32) -> Matrix<R::Elem> {
    let k = k as usize;
    // powers[j] = coefficients (in y-degree) of (a x + b y)^j, likewise for (c x + d y)
    let power_table = |p: &R::Elem, q: &R::Elem| {
        let mut table: Vec<Vec<R::Elem>> = vec![vec![ring.one()]];
        for j in 1..=k {
            let prev = &table[j - 1];
            let mut next = vec![ring.zero(); j + 1];
            for (e, coef) in prev.iter().enumerate() {
                next[e] = ring.add(&next[e], &ring.mul(coef, p));
                next[e + 1] = ring.add(&next[e + 1], &ring.mul(coef, q));
            }
            table.push(next);
        }
        table
    };
    let first = power_table(a, b);
    let second = power_table(c, d);
    let mut out = Matrix::zeros(ring, k + 1, k + 1);
    for i in 0..=k {
        let f = &first[k - i];
        let s = &second[i];
        for (e1, x) in f.iter().enumerate() {
            if ring.is_zero(x) {
                continue;
            }
            for (e2, y) in s.iter().enumerate() {
                let v = ring.add(out.get(i, e1 + e2), &ring.mul(x, y));
                out.set(i, e1 + e2, v);
            }
        }
    }
    out
}

impl Coefficients for RingId {
    fn ring_id(&self) -> RingId {
        *self
    }

    fn sym(&self, m: &Mat2, k: u32) -> Matrix<Self::Elem> {
        sym_power(self, &m.a, &m.b, &m.c, &m.d, k)
    }
}

impl Coefficients for ResidueField {
    fn ring_id(&self) -> RingId {
        self.ring()
    }

    /// Entries are reduced mod pi before expanding, so the twisted factor
    /// `sym(conj m)` is the reduction mod pi-bar (split case) or the Frobenius
    /// twist (inert case) of the integral factor.
    fn sym(&self, m: &Mat2, k: u32) -> Matrix<Self::Elem> {
        let [a, b, c, d] = m.entries().map(|x| self.reduce(x));
        sym_power(self, &a, &b, &c, &d, k)
    }
}

/// Matrix of `m` on E_{k,l}(O).
pub fn act_ekl(ring: RingId, m: &Mat2, w: Weight) -> Matrix<crate::ring::QuadInt> {
    ring.act(m, w)
}

/// Matrix of `m` on E_k(O).
pub fn act_ek(ring: RingId, m: &Mat2, k: u32) -> Matrix<crate::ring::QuadInt> {
    ring.sym(m, k)
}

/// Matrix of `m` on E_{k,l}(kappa_pi).
pub fn act_ekl_mod(field: &ResidueField, m: &Mat2, w: Weight) -> Matrix<crate::ring::Fq> {
    field.act(m, w)
}

/// Gram matrix of the product of the determinant pairings on E_k and E_l,
/// scaled by k! l! so that it is integral. The pairing itself is this matrix
/// divided by `k! l!`; it is invertible once k! is.
pub fn pairing_gram(w: Weight) -> Result<(Matrix<Z>, Z)> {
    if w.k < w.l {
        return Err(Error::InvalidModule(format!("pairing needs k >= l, got k = {}, l = {}", w.k, w.l)));
    }
    let gram_k = sym_pairing(w.k);
    let gram_l = sym_pairing(w.l);
    let scale = &factorial(w.k) * &factorial(w.l);
    Ok((gram_k.kron(&Integers, &gram_l), scale))
}

/// k! times the determinant pairing on E_k: <x^{k-i} y^i, x^{k-j} y^j> = (-1)^i / C(k, i) if i + j = k.
fn sym_pairing(k: u32) -> Matrix<Z> {
    let k = k as usize;
    Matrix::from_fn(k + 1, k + 1, |i, j| {
        if i + j != k {
            return Z::ZERO;
        }
        let v = &factorial(i as u32) * &factorial((k - i) as u32);
        if i % 2 == 1 {
            -v
        } else {
            v
        }
    })
}

/// Coinduced action of one generator: block `(c, perm[c])` is `block(c)`, the
/// action of the return element `t_c g t_{c g}^{-1}`.
pub fn coinduce<R: EuclideanRing>(
    ring: &R,
    dim: usize,
    perm: &[usize],
    block: impl Fn(usize) -> Matrix<R::Elem>,
) -> Matrix<R::Elem> {
    let n = perm.len();
    let mut out = Matrix::zeros(ring, n * dim, n * dim);
    for (c, &target) in perm.iter().enumerate() {
        let b = block(c);
        debug_assert_eq!((b.rows(), b.cols()), (dim, dim));
        out.set_block(c * dim, target * dim, &b);
    }
    out
}

pub fn factorial(n: u32) -> Z {
    (1..=n as i64).fold(Z::ONE, |acc, x| &acc * &Z::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unipotent_on_e2() {
        let r = RingId::new(1).unwrap();
        let m = Mat2::new(r.one(), r.one(), r.zero(), r.one());
        let a = act_ek(r, &m, 2);
        let expect = Matrix::from_rows(
            3,
            vec![
                vec![r.int(1), r.int(2), r.int(1)],
                vec![r.int(0), r.int(1), r.int(1)],
                vec![r.int(0), r.int(0), r.int(1)],
            ],
        );
        assert_eq!(a, expect);
        assert_eq!(act_ek(r, &m, 0), Matrix::identity(&r, 1));
        assert_eq!(act_ekl(r, &Mat2::identity(r), Weight::new(3, 2)), Matrix::identity(&r, 12));
    }

    #[test]
    fn diagonal_twisted_action() {
        let r = RingId::new(1).unwrap();
        let i = r.omega();
        let m = Mat2::new(i.clone(), r.zero(), r.zero(), -&i);
        let a = act_ekl(r, &m, Weight::new(1, 1));
        // basis x(x)x', x(x)y', y(x)x', y(x)y'; conj(m) = diag(-i, i)
        let diag: Vec<_> = (0..4).map(|j| a.get(j, j).clone()).collect();
        assert_eq!(diag, vec![r.int(1), r.int(-1), r.int(-1), r.int(1)]);
    }

    #[test]
    fn parity_rule() {
        let r = RingId::new(2).unwrap();
        assert!(Weight::new(1, 0).check_for(r, GroupKind::Psl).is_err());
        assert!(Weight::new(2, 2).check_for(r, GroupKind::Psl).is_ok());
        let r1 = RingId::new(1).unwrap();
        assert!(Weight::new(2, 0).check_for(r1, GroupKind::Pgl).is_err());
        assert!(Weight::new(3, 3).check_for(r1, GroupKind::Pgl).is_ok());
    }

    #[test]
    fn gram_small_cases() {
        let (g, s) = pairing_gram(Weight::new(0, 0)).unwrap();
        assert_eq!(g, Matrix::identity(&Integers, 1));
        assert!(s.is_one());
        let (g, _) = pairing_gram(Weight::new(1, 0)).unwrap();
        assert_eq!(g, Matrix::from_rows(2, vec![vec![Z::ZERO, Z::ONE], vec![Z::from(-1), Z::ZERO]]));
        assert!(pairing_gram(Weight::new(1, 2)).is_err());
    }
}
