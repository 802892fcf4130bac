//! H^1(G, M) for a finitely presented G by Fox calculus, and H^1 of finite
//! index subgroups through the coinduced module.
//!
//! A cocycle is determined by its values `f(g_1), ..., f(g_n)` on the
//! generators. The relators impose `sum_i f(g_i) D_{r,i} = 0`, where `D_{r,i}`
//! is the Fox derivative of `r` in `g_i` evaluated in the module. With row
//! vectors this is `x F = 0` for the `(n dim) x (r dim)` relator matrix `F`,
//! so Z^1 is its left kernel. B^1 is spanned by the rows of the coboundary
//! matrix `C`, row `m` giving `(m g_i - m)_i`.

use crate::congruence::CosetTable;
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, quotient_decomposition, rank, smith_form, AbelianDecomposition, EuclideanRing, Integers, Matrix};
use crate::polymod::{coinduce, Coefficients, Weight};
use crate::presentations::{load_presentation, GroupId, GroupPresentation, Word};
use crate::ring::{QuadInt, ResidueField, RingId, Z};

/// Matrices of each generator and of its inverse on one module.
#[derive(Clone, Debug)]
pub struct Actions<E> {
    pub dim: usize,
    pub forward: Vec<Matrix<E>>,
    pub inverse: Vec<Matrix<E>>,
}

impl<E: Clone + PartialEq + std::fmt::Debug + Send + Sync> Actions<E> {
    /// Matrix of a word, as a product of generator matrices.
    pub fn evaluate<R: EuclideanRing<Elem = E>>(&self, ring: &R, w: &Word) -> Matrix<E> {
        let mut acc = Matrix::identity(ring, self.dim);
        for (g, s) in w.expanded() {
            let m = if s > 0 { &self.forward[g] } else { &self.inverse[g] };
            acc = acc.mul(ring, m);
        }
        acc
    }
}

/// Generator actions on E_{k,l} over `ring`.
pub fn module_actions<R: Coefficients>(ring: &R, p: &GroupPresentation, w: Weight) -> Result<Actions<R::Elem>> {
    w.check_for(p.ring(), p.id.kind)?;
    let forward = p.matrices.iter().map(|m| ring.act(m, w)).collect();
    let inverse = p.matrices.iter().map(|m| ring.act(&m.inverse().expect("group element"), w)).collect();
    Ok(Actions { dim: w.dim(), forward, inverse })
}

/// Actions on the module coinduced from E_{k,l} on the subgroup of `table`.
pub fn coinduced_actions<R: Coefficients>(
    ring: &R,
    p: &GroupPresentation,
    table: &CosetTable,
    w: Weight,
) -> Result<Actions<R::Elem>> {
    w.check_for(p.ring(), p.id.kind)?;
    let dim = w.dim();
    let mut forward = Vec::new();
    let mut inverse = Vec::new();
    for g in 0..p.ngens() {
        for (dir, out) in [(1i32, &mut forward), (-1, &mut inverse)] {
            let perm = table.perm(g, dir);
            let gm = p.letter_matrix(g, dir);
            let block = |c: usize| {
                let r = table.return_element(c, &gm, perm[c]);
                ring.act(&r, w)
            };
            out.push(coinduce(ring, dim, perm, block));
        }
    }
    Ok(Actions { dim: dim * table.index(), forward, inverse })
}

/// Fox derivatives of `word` in every generator, evaluated in the module.
pub fn fox_blocks<R: EuclideanRing>(ring: &R, word: &Word, actions: &Actions<R::Elem>) -> Vec<Matrix<R::Elem>> {
    let n = actions.forward.len();
    let mut blocks = vec![Matrix::zeros(ring, actions.dim, actions.dim); n];
    // suffix = action of the part of the word right of the current letter
    let mut suffix = Matrix::identity(ring, actions.dim);
    let letters: Vec<(usize, i32)> = word.expanded().collect();
    for &(g, s) in letters.iter().rev() {
        if s > 0 {
            blocks[g] = blocks[g].add(ring, &suffix);
            suffix = actions.forward[g].mul(ring, &suffix);
        } else {
            suffix = actions.inverse[g].mul(ring, &suffix);
            blocks[g] = blocks[g].sub(ring, &suffix);
        }
    }
    blocks
}

/// The linear system for Z^1 and the generators of B^1.
#[derive(Clone, Debug)]
pub struct CocycleSystem<E> {
    pub dim: usize,
    pub ngens: usize,
    pub nrels: usize,
    /// `(ngens dim) x (nrels dim)`; Z^1 is its left kernel.
    pub relator_matrix: Matrix<E>,
    /// `dim x (ngens dim)`; its rows span B^1.
    pub coboundary_matrix: Matrix<E>,
}

pub fn relator_matrix<R: EuclideanRing>(ring: &R, relators: &[Word], actions: &Actions<R::Elem>) -> Matrix<R::Elem> {
    let (n, dim) = (actions.forward.len(), actions.dim);
    let mut f = Matrix::zeros(ring, n * dim, relators.len() * dim);
    for (j, r) in relators.iter().enumerate() {
        for (i, b) in fox_blocks(ring, r, actions).iter().enumerate() {
            f.set_block(i * dim, j * dim, b);
        }
    }
    f
}

pub fn coboundary_matrix<R: EuclideanRing>(ring: &R, actions: &Actions<R::Elem>) -> Matrix<R::Elem> {
    let (n, dim) = (actions.forward.len(), actions.dim);
    let mut c = Matrix::zeros(ring, dim, n * dim);
    let id = Matrix::identity(ring, dim);
    for (i, a) in actions.forward.iter().enumerate() {
        c.set_block(0, i * dim, &a.sub(ring, &id));
    }
    c
}

impl<E: Clone + PartialEq + std::fmt::Debug + Send + Sync> CocycleSystem<E> {
    pub fn new<R: EuclideanRing<Elem = E>>(ring: &R, relators: &[Word], actions: &Actions<E>) -> Self {
        CocycleSystem {
            dim: actions.dim,
            ngens: actions.forward.len(),
            nrels: relators.len(),
            relator_matrix: relator_matrix(ring, relators, actions),
            coboundary_matrix: coboundary_matrix(ring, actions),
        }
    }

    /// B^1 inside Z^1, checked exactly.
    pub fn check_coboundaries<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> Result<()> {
        if self.coboundary_matrix.mul(ring, &self.relator_matrix).is_zero(ring) {
            Ok(())
        } else {
            Err(Error::Inconsistent("a coboundary violates the relator equations".into()))
        }
    }

    /// H^1 = Z^1 / B^1. Z^1 is saturated in the cochains and contains B^1,
    /// so the torsion of H^1 is that of `cochains / B^1`, read off the Smith
    /// form of the coboundary matrix; no basis of Z^1 is needed.
    pub fn cohomology<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> Result<AbelianDecomposition<E>> {
        self.check_coboundaries(ring)?;
        let z1 = self.relator_matrix.rows() - rank(ring, &self.relator_matrix);
        let diag = smith_form(ring, &self.coboundary_matrix);
        let free = z1 - diag.len();
        Ok(AbelianDecomposition::from_diagonal(ring, diag, free))
    }

    /// H^1 through an explicit saturated basis of Z^1.
    pub fn cohomology_via_kernel<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> Result<AbelianDecomposition<E>> {
        self.check_coboundaries(ring)?;
        let z1 = kernel_basis(ring, &self.relator_matrix);
        quotient_decomposition(ring, &z1, &self.coboundary_matrix)
    }

    /// H_1 of the transposed complex, ker(C^T) / rowspan(F^T). For a module
    /// whose dual is isomorphic to itself (permutation modules) this is the
    /// group homology H_1(G, M). As for H^1, the torsion comes from the
    /// Smith form of F^T alone.
    pub fn homology<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> Result<AbelianDecomposition<E>> {
        self.check_coboundaries(ring)?;
        let cycles = self.coboundary_matrix.cols() - rank(ring, &self.coboundary_matrix);
        let diag = smith_form(ring, &self.relator_matrix);
        let free = cycles - diag.len();
        Ok(AbelianDecomposition::from_diagonal(ring, diag, free))
    }

    /// dim Z^1 - dim B^1 over a field.
    pub fn cohomology_dim<R: EuclideanRing<Elem = E>>(&self, ring: &R) -> usize {
        let z = self.relator_matrix.rows() - rank(ring, &self.relator_matrix);
        z - rank(ring, &self.coboundary_matrix)
    }
}

/// H^1(G, E_{k,l}(O)) for one of the supported groups.
pub fn h1(id: GroupId, w: Weight) -> Result<AbelianDecomposition<QuadInt>> {
    let p = load_presentation(id)?;
    h1_presentation(&p, w)
}

pub fn h1_presentation(p: &GroupPresentation, w: Weight) -> Result<AbelianDecomposition<QuadInt>> {
    let ring = p.ring();
    let actions = module_actions(&ring, p, w)?;
    CocycleSystem::new(&ring, &p.relators, &actions).cohomology(&ring)
}

/// dim over the residue field kappa_pi of H^1(G, E_{k,l}(kappa_pi)).
pub fn h1_mod(p: &GroupPresentation, field: &ResidueField, w: Weight) -> Result<usize> {
    let actions = module_actions(field, p, w)?;
    let sys = CocycleSystem::new(field, &p.relators, &actions);
    sys.check_coboundaries(field)?;
    Ok(sys.cohomology_dim(field))
}

/// Rank of H^1(G, E_{k,l}(O)) from three residue fields of large split
/// primes, which agree with the rank over the fraction field unless a prime
/// divides some minor; an exact computation settles disagreements.
pub fn h1_rank_mod_p(p: &GroupPresentation, w: Weight, seed: u64) -> Result<usize> {
    let ring = p.ring();
    let mut ranks = Vec::new();
    for prime in large_split_primes(ring, seed, 3) {
        let field = ResidueField::above(prime, ring)?;
        ranks.push(h1_mod(p, &field, w)?);
    }
    if ranks.iter().all(|r| *r == ranks[0]) {
        Ok(ranks[0])
    } else {
        Ok(h1_presentation(p, w)?.rank)
    }
}

/// `count` primes near 2^61 that split in the ring, drawn from a seeded RNG.
pub fn large_split_primes(ring: RingId, seed: u64, count: usize) -> Vec<u64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let disc = ring.discriminant();
    let mut out = Vec::new();
    while out.len() < count {
        let c = rng.gen_range((1u64 << 60)..(1u64 << 61)) | 1;
        if crate::ring::arith::is_prime_u64(c) && crate::ring::arith::kronecker(disc, c) == 1 {
            out.push(c);
        }
    }
    out
}

/// H^1 of the subgroup described by `table`, via H^1(G, Coind E).
pub fn h1_subgroup(p: &GroupPresentation, table: &CosetTable, w: Weight) -> Result<AbelianDecomposition<QuadInt>> {
    let ring = p.ring();
    let actions = coinduced_actions(&ring, p, table, w)?;
    CocycleSystem::new(&ring, &p.relators, &actions).cohomology(&ring)
}

/// H_1(Gamma, Z) = Gamma^ab for the subgroup of `table`, as H_1 of G with
/// coefficients in the permutation module on the cosets.
pub fn homology_subgroup_trivial(p: &GroupPresentation, table: &CosetTable) -> Result<AbelianDecomposition<Z>> {
    let n = table.index();
    let perm_matrix = |perm: &[usize]| {
        let mut m = Matrix::zeros(&Integers, n, n);
        for (c, &t) in perm.iter().enumerate() {
            m.set(c, t, Z::ONE);
        }
        m
    };
    let forward = (0..p.ngens()).map(|g| perm_matrix(table.perm(g, 1))).collect();
    let inverse = (0..p.ngens()).map(|g| perm_matrix(table.perm(g, -1))).collect();
    let actions = Actions { dim: n, forward, inverse };
    CocycleSystem::new(&Integers, &p.relators, &actions).homology(&Integers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::GroupKind;

    fn trivial_actions(n: usize) -> Actions<Z> {
        let one = Matrix::identity(&Integers, 1);
        Actions { dim: 1, forward: vec![one.clone(); n], inverse: vec![one; n] }
    }

    fn names() -> Vec<String> {
        ["A", "B", "U"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fox_trivial_module() {
        let a = trivial_actions(3);
        let b2 = Word::parse("B^2", &names()).unwrap();
        let blocks = fox_blocks(&Integers, &b2, &a);
        assert_eq!(*blocks[1].get(0, 0), Z::from(2));
        assert!(blocks[0].is_zero(&Integers) && blocks[2].is_zero(&Integers));
        let comm = Word::parse("[A, U]", &names()).unwrap();
        assert!(fox_blocks(&Integers, &comm, &a).iter().all(|b| b.is_zero(&Integers)));
    }

    #[test]
    fn fox_abu() {
        let p = load_presentation(GroupId::psl(2).unwrap()).unwrap();
        let ring = p.ring();
        let w = Weight::new(1, 1);
        let act = module_actions(&ring, &p, w).unwrap();
        let word = p.parse_word("A B U").unwrap();
        let blocks = fox_blocks(&ring, &word, &act);
        let bu = act.forward[1].mul(&ring, &act.forward[2]);
        assert_eq!(blocks[0], bu);
        assert_eq!(blocks[1], act.forward[2]);
        assert_eq!(blocks[2], Matrix::identity(&ring, 4));
    }

    #[test]
    fn coboundary_examples() {
        let a = trivial_actions(2);
        assert!(coboundary_matrix(&Integers, &a).is_zero(&Integers));
        let two = Matrix::from_rows(1, vec![vec![Z::from(2)]]);
        let a = Actions { dim: 1, forward: vec![two], inverse: vec![Matrix::identity(&Integers, 1)] };
        assert_eq!(*coboundary_matrix(&Integers, &a).get(0, 0), Z::ONE);
    }

    #[test]
    fn coboundaries_are_cocycles() {
        let p = load_presentation(GroupId::psl(2).unwrap()).unwrap();
        let ring = p.ring();
        let act = module_actions(&ring, &p, Weight::new(1, 1)).unwrap();
        let sys = CocycleSystem::new(&ring, &p.relators, &act);
        assert!(sys.coboundary_matrix.mul(&ring, &sys.relator_matrix).is_zero(&ring));
    }

    #[test]
    fn small_h1_values() {
        let d = h1(GroupId::psl(1).unwrap(), Weight::parallel(0)).unwrap();
        assert_eq!((d.divisor_norms.len(), d.rank), (0, 0));
        let d = h1(GroupId::psl(1).unwrap(), Weight::parallel(1)).unwrap();
        assert_eq!(d.divisor_norms, vec![Z::from(4)]);
        assert_eq!(d.rank, 1);
    }

    #[test]
    fn odd_weight_rejected() {
        assert!(h1(GroupId::psl(2).unwrap(), Weight::new(1, 0)).is_err());
        let _ = GroupKind::Psl;
    }
}
