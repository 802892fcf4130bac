//! H^2(G, M) from the equivariant cochain complex of a fundamental 2-cell
//! with finite cell stabilizers:
//!
//! 0 -> (+)_v M^{G_v} --d0--> (+)_e M^{G_e} --d1--> M -> 0.
//!
//! Equivariant cochains satisfy phi(h c) = phi(c) h^{-1}. A vertex written
//! as `h * rep` takes the value `m_rep h^{-1}`, and a boundary side
//! `sign * h * e` of the 2-cell contributes `sign * m_e h^{-1}`, so
//! H^2 = M / (sum of the images of the M^{G_e}).

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{hermite, kernel_basis, quotient_decomposition, rank, AbelianDecomposition, EuclideanRing, Matrix};
use crate::polymod::{Coefficients, Weight};
use crate::presentations::{load_cellcomplex, CellComplex, FiniteGroup};
use crate::presentations::GroupId;
use crate::ring::arith::{factor, is_prime_u64};
use crate::ring::{split_type, Fq, Mat2, QuadInt, ResidueField, RingId, SplitKind, Z};

/// Primes whose torsion the collapsed spectral sequence does not control.
pub const UNRELIABLE_PRIMES: [u64; 2] = [2, 3];

/// Invariant bases and differentials of the cochain complex.
#[derive(Clone, Debug)]
pub struct EquivariantChainData<E> {
    pub dim: usize,
    /// Rows span M^{G_v}, one matrix per vertex orbit.
    pub vertex_bases: Vec<Matrix<E>>,
    /// Rows span M^{G_e}, one matrix per edge orbit.
    pub edge_bases: Vec<Matrix<E>>,
    /// Vertex invariants (stacked bases) to edge values, in coordinates of M per edge.
    pub d0: Matrix<E>,
    /// Edge values in coordinates of M per edge, to M.
    pub d1: Matrix<E>,
}

/// Saturated basis of the vectors fixed by every generator.
pub fn invariant_basis<R: Coefficients>(ring: &R, generators: &[Mat2], w: Weight) -> Matrix<R::Elem> {
    let dim = w.dim();
    if generators.is_empty() {
        return Matrix::identity(ring, dim);
    }
    let id = Matrix::identity(ring, dim);
    let mut stacked = Matrix::zeros(ring, dim, 0);
    for g in generators {
        stacked = stacked.hstack(&ring.act(g, w).sub(ring, &id));
    }
    kernel_basis(ring, &stacked)
}

/// Coefficient rings that can compute fixed lattices of finite stabilizers.
pub trait InvariantLattice: Coefficients {
    fn invariants(&self, group: &FiniteGroup, w: Weight) -> Matrix<Self::Elem>;
}

impl InvariantLattice for ResidueField {
    fn invariants(&self, group: &FiniteGroup, w: Weight) -> Matrix<Fq> {
        invariant_basis(self, &group.generators, w)
    }
}

impl InvariantLattice for RingId {
    /// |G| M^G lies in the image of the norm map, so M^G is the saturation
    /// of that image at the primes dividing |G|. This avoids the coefficient
    /// growth of a direct integral kernel.
    fn invariants(&self, group: &FiniteGroup, w: Weight) -> Matrix<QuadInt> {
        let dim = w.dim();
        let mut norm = Matrix::zeros(self, dim, dim);
        for g in group.iter() {
            norm = norm.add(self, &self.act(g, w));
        }
        let n = norm.cols();
        let r = hermite(self, &mut norm, n).len();
        let mut basis = norm.row_range(0, r);
        let order = group.order() as u64;
        for p in (2..=order).filter(|p| order.is_multiple_of(*p) && is_prime_u64(*p)) {
            for field in fields_above(*self, p) {
                saturate_at(self, &field, &mut basis);
            }
        }
        basis
    }
}

/// Residue fields of the primes of O above `p`.
fn fields_above(ring: RingId, p: u64) -> Vec<ResidueField> {
    let (kind, pi) = split_type(p, ring).expect("small prime");
    let mut out = vec![ResidueField::new(&pi).expect("prime element")];
    if kind == SplitKind::Split {
        out.push(ResidueField::new(&pi.conj()).expect("prime element"));
    }
    out
}

fn lift(field: &ResidueField, x: &Fq) -> QuadInt {
    field.ring().elem(x[0] as i64, x[1] as i64)
}

/// Enlarge the row lattice of `basis` (full row rank) until it is saturated at `field.pi`.
fn saturate_at(ring: &RingId, field: &ResidueField, basis: &mut Matrix<QuadInt>) {
    loop {
        let reduced = basis.map(|x| field.reduce(x));
        let kernel = kernel_basis(field, &reduced);
        if kernel.rows() == 0 {
            return;
        }
        let x = kernel.row(0);
        let i = x.iter().position(|c| !field.is_zero(c)).expect("nonzero kernel vector");
        let scale = field.inv(&x[i]).expect("nonzero");
        let coeffs: Vec<QuadInt> = x.iter().map(|c| lift(field, &field.mul(c, &scale))).collect();
        // coeffs[i] = 1, so replacing row i by the combination divided by pi keeps a basis
        let mut v = vec![ring.zero(); basis.cols()];
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, e) in basis.row(j).iter().enumerate() {
                v[t] = &v[t] + &(c * e);
            }
        }
        let v: Vec<QuadInt> = v.iter().map(|e| e.div_exact(&field.pi).expect("combination vanishes mod pi")).collect();
        basis.row_mut(i).clone_from_slice(&v);
        let n = basis.cols();
        hermite(ring, basis, n);
    }
}

/// Assemble the complex for `cells` with coefficients E_{k,l} over `ring`.
pub fn assemble<R: InvariantLattice>(ring: &R, cells: &CellComplex, w: Weight) -> Result<EquivariantChainData<R::Elem>> {
    w.check_for(cells.id.ring, cells.id.kind)?;
    let dim = w.dim();
    let act_inv = |h: &Mat2| ring.act(&h.inverse().expect("group element"), w);
    let vertex_bases: Vec<_> =
        cells.vertices.iter().map(|v| ring.invariants(&v.stabilizer, w)).collect();
    let edge_bases: Vec<_> =
        cells.edges.iter().map(|e| ring.invariants(&e.stabilizer, w)).collect();
    let nedges = cells.edges.len();

    let vrows: usize = vertex_bases.iter().map(|b| b.rows()).sum();
    let mut offsets = Vec::new();
    let mut acc = 0;
    for b in &vertex_bases {
        offsets.push(acc);
        acc += b.rows();
    }
    let mut d0 = Matrix::zeros(ring, vrows, nedges * dim);
    for (j, e) in cells.edges.iter().enumerate() {
        for (vref, sign) in [(&e.to, 1), (&e.from, -1)] {
            let block = vertex_bases[vref.rep].mul(ring, &act_inv(&vref.element));
            let block = if sign > 0 { block } else { block.neg(ring) };
            let r0 = offsets[vref.rep];
            for i in 0..block.rows() {
                for c in 0..dim {
                    let v = ring.add(d0.get(r0 + i, j * dim + c), block.get(i, c));
                    d0.set(r0 + i, j * dim + c, v);
                }
            }
        }
    }

    let mut d1 = Matrix::zeros(ring, nedges * dim, dim);
    for side in &cells.face.sides {
        let a = act_inv(&side.element);
        let a = if side.sign > 0 { a } else { a.neg(ring) };
        let r0 = side.edge * dim;
        let current = d1.row_range(r0, r0 + dim).add(ring, &a);
        d1.set_block(r0, 0, &current);
    }

    let data = EquivariantChainData { dim, vertex_bases, edge_bases, d0, d1 };
    if !data.d0.mul(ring, &data.d1).is_zero(ring) {
        return Err(Error::Inconsistent(format!("d1 d0 != 0 for {}", cells.id)));
    }
    Ok(data)
}

impl<E: Clone + PartialEq + std::fmt::Debug + Send + Sync> EquivariantChainData<E> {
    /// Images in M of the edge invariants, one row per basis vector.
    pub fn edge_images<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> Matrix<E> {
        let mut out = Matrix::zeros(ring, 0, self.dim);
        for (j, b) in self.edge_bases.iter().enumerate() {
            let block = self.d1.row_range(j * self.dim, (j + 1) * self.dim);
            out = out.vstack(&b.mul(ring, &block));
        }
        out
    }

    /// H^2 = M / Im(d1).
    pub fn h2<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> Result<AbelianDecomposition<E>> {
        quotient_decomposition(ring, &Matrix::identity(ring, self.dim), &self.edge_images(ring))
    }

    /// Rank of H^1 = Ker d1 / Im d0 over the fraction field.
    pub fn h1_rank<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> usize {
        let edge_dim: usize = self.edge_bases.iter().map(|b| b.rows()).sum();
        let kernel = edge_dim - rank(ring, &self.edge_images(ring));
        kernel - rank(ring, &self.d0)
    }

    /// Rank of H^0 = Ker d0 over the fraction field.
    pub fn h0_rank<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> usize {
        self.d0.rows() - rank(ring, &self.d0)
    }
}

/// A rational prime dividing the order of the torsion of H^2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionPrime {
    pub p: Z,
    /// 2 or 3: outside what the method controls.
    pub unreliable: bool,
    /// Unramified and larger than both weights.
    pub large: bool,
}

/// H^2(G, E_{k,l}(O)) with its torsion primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H2Result {
    pub group: GroupId,
    pub weight: Weight,
    pub decomposition: AbelianDecomposition<QuadInt>,
    pub rank: usize,
    pub torsion_primes: Vec<TorsionPrime>,
    pub unfactored: Vec<Z>,
}

impl H2Result {
    pub fn primes(&self) -> Vec<Z> {
        self.torsion_primes.iter().map(|t| t.p.clone()).collect()
    }

    pub fn large_primes(&self) -> Vec<Z> {
        self.torsion_primes.iter().filter(|t| t.large).map(|t| t.p.clone()).collect()
    }
}

/// Whether a torsion prime `p` counts as large for weight `w`.
pub fn is_large(ring: RingId, p: &Z, w: Weight) -> bool {
    let disc = Z::from(ring.discriminant().abs());
    p > &Z::from(w.k.max(w.l) as i64) && !disc.div_mod_floor(p).1.is_zero()
}

pub fn h2(id: GroupId, w: Weight) -> Result<H2Result> {
    let cells = load_cellcomplex(id)?;
    h2_cells(&cells, w, Duration::from_secs(10))
}

pub fn h2_cells(cells: &CellComplex, w: Weight, factor_budget: Duration) -> Result<H2Result> {
    let ring = cells.id.ring;
    let data = assemble(&ring, cells, w)?;
    let decomposition = data.h2(&ring)?;
    let mut primes = Vec::new();
    let mut unfactored = Vec::new();
    for n in &decomposition.divisor_norms {
        let f = factor(n, factor_budget);
        primes.extend(f.distinct_primes());
        unfactored.extend(f.unfactored);
    }
    primes.sort();
    primes.dedup();
    let torsion_primes = primes
        .into_iter()
        .map(|p| TorsionPrime {
            unreliable: UNRELIABLE_PRIMES.iter().any(|u| p == Z::from(*u as i64)),
            large: is_large(ring, &p, w),
            p,
        })
        .collect();
    Ok(H2Result { group: cells.id, weight: w, rank: decomposition.rank, decomposition, torsion_primes, unfactored })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{smith_form, Integers};

    #[test]
    fn trivial_stabilizer_basis() {
        let r = RingId::new(2).unwrap();
        let b = invariant_basis(&r, &[], Weight::new(1, 1));
        assert_eq!(b, Matrix::identity(&r, 4));
        let minus = Mat2::scalar(r.int(-1));
        assert_eq!(invariant_basis(&r, &[minus], Weight::new(1, 1)).rows(), 4);
    }

    #[test]
    fn involution_fixed_space() {
        // (I + a) has rank dim M^a over Z[1/2]; compare ranks mod a large prime
        let cells = load_cellcomplex(GroupId::psl(2).unwrap()).unwrap();
        let r = cells.id.ring;
        let w = Weight::new(1, 1);
        let a = &cells.edges[0].stabilizer.generators[0];
        let fixed = invariant_basis(&r, std::slice::from_ref(a), w);
        let avg = Matrix::identity(&r, 4).add(&r, &r.act(a, w));
        assert_eq!(fixed.rows(), rank(&r, &avg));
        assert!(fixed.mul(&r, &r.act(a, w)).sub(&r, &fixed).is_zero(&r));
        let _ = Integers;
    }

    #[test]
    fn saturated_norm_image_is_the_kernel() {
        for id in GroupId::all() {
            let Ok(cells) = load_cellcomplex(id) else { continue };
            let r = id.ring;
            for n in 1..4 {
                let w = Weight::parallel(n);
                for v in &cells.vertices {
                    // both saturated and of the same rank inside the fixed space
                    let fast = r.invariants(&v.stabilizer, w);
                    let slow = invariant_basis(&r, &v.stabilizer.generators, w);
                    assert_eq!(fast.rows(), slow.rows(), "{id} {w:?}");
                    for g in &v.stabilizer.generators {
                        assert_eq!(fast.mul(&r, &r.act(g, w)), fast);
                    }
                    assert!(smith_form(&r, &fast).iter().all(|x| x.is_unit()), "{id} {w:?}");
                }
            }
        }
    }

    #[test]
    fn complexes_are_complexes() {
        for id in GroupId::all() {
            let Ok(cells) = load_cellcomplex(id) else { continue };
            for n in 0..3 {
                assemble(&id.ring, &cells, Weight::parallel(n)).unwrap();
            }
        }
    }

    #[test]
    fn psl_o2_weight_one() {
        let r = h2(GroupId::psl(2).unwrap(), Weight::parallel(1)).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.torsion_primes.is_empty());
    }

    #[test]
    fn largeness() {
        let r = RingId::new(7).unwrap();
        assert!(!is_large(r, &Z::from(7), Weight::parallel(3)));
        assert!(is_large(r, &Z::from(127), Weight::parallel(12)));
        assert!(!is_large(r, &Z::from(11), Weight::parallel(12)));
    }
}
