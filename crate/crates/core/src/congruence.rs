//! Hecke congruence subgroups Gamma_0(a) of PSL2(O_d): coset tables on the
//! projective line over O/a, abelianizations by abelianized
//! Reidemeister-Schreier, and the rank predicates built on them.
//!
//! G acts on the right of row vectors (x : y). The base point is (0 : 1),
//! whose stabilizer is Gamma_0(a), so the coset Gamma_0(a) g corresponds to
//! the bottom row (c : d) of g.

use std::collections::VecDeque;
use std::sync::OnceLock;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::sparse::SparseRelations;
use crate::exactla::AbelianDecomposition;
use crate::polymod::GroupKind;
use crate::presentations::{load_presentation, GroupId, GroupPresentation, Word};
use crate::ring::arith::{self, factor};
use crate::ring::{split_type, Fq, Mat2, QuadInt, ResidueField, RingId, SplitKind, Z};

/// A prime element dividing a level, with its residue field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFactor {
    pub pi: QuadInt,
    pub field: ResidueField,
}

impl PrimeFactor {
    pub fn norm(&self) -> u64 {
        self.field.size()
    }

    pub fn residue_degree(&self) -> u32 {
        self.field.degree()
    }
}

/// A square-free principal level ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelIdeal {
    pub ring: RingId,
    /// Canonical associate of the generator.
    pub generator: QuadInt,
    pub factors: Vec<PrimeFactor>,
}

impl LevelIdeal {
    /// The unit ideal (1).
    pub fn unit(ring: RingId) -> LevelIdeal {
        LevelIdeal { ring, generator: ring.one(), factors: Vec::new() }
    }

    /// Product of pairwise non-associate prime elements.
    pub fn from_primes(ring: RingId, primes: &[QuadInt]) -> Result<LevelIdeal> {
        let mut factors: Vec<PrimeFactor> = Vec::new();
        let mut generator = ring.one();
        for pi in primes {
            if pi.ring != ring {
                return Err(Error::InvalidLevel(format!("{pi} is not in O_{ring}")));
            }
            let field = ResidueField::new(pi).map_err(|_| Error::InvalidLevel(format!("{pi} is not prime")))?;
            if factors.iter().any(|f| f.pi.is_associate(pi)) {
                return Err(Error::InvalidLevel(format!("level is not square-free: {pi} repeats")));
            }
            generator = &generator * pi;
            factors.push(PrimeFactor { pi: pi.canonical(), field });
        }
        factors.sort_by_key(|f| (f.norm(), f.pi.a.clone(), f.pi.b.clone()));
        Ok(LevelIdeal { ring, generator: generator.canonical(), factors })
    }

    /// The level generated by `x`, factored through its norm.
    pub fn from_generator(x: &QuadInt) -> Result<LevelIdeal> {
        let ring = x.ring;
        if x.is_zero() {
            return Err(Error::InvalidLevel("the zero ideal".into()));
        }
        let norm = x.norm();
        let fac = factor(&norm, Duration::from_secs(5));
        if !fac.unfactored.is_empty() {
            return Err(Error::InvalidLevel(format!("could not factor the norm {norm}")));
        }
        let mut primes = Vec::new();
        let mut rest = x.clone();
        for (p, _) in &fac.primes {
            let p = p.as_i64().ok_or_else(|| Error::InvalidLevel(format!("norm prime {p} too large")))? as u64;
            let (kind, pi) = split_type(p, ring)?;
            let candidates = match kind {
                SplitKind::Split => vec![pi.clone(), pi.conj()],
                SplitKind::Ramified => vec![pi.clone()],
                SplitKind::Inert => vec![ring.int(p)],
            };
            for c in candidates {
                if let Some(q) = rest.div_exact(&c) {
                    if c.divides(&q) {
                        return Err(Error::InvalidLevel(format!("{x} is not square-free: {c}^2 divides it")));
                    }
                    rest = q;
                    primes.push(c);
                }
            }
        }
        if !rest.is_unit() {
            return Err(Error::Inconsistent(format!("factoring {x} left {rest}")));
        }
        LevelIdeal::from_primes(ring, &primes)
    }

    /// Absolute norm N(a).
    pub fn norm(&self) -> u64 {
        self.factors.iter().map(|f| f.norm()).product()
    }

    /// Index of Gamma_0(a) in PSL2(O), the number of points of P^1(O/a).
    pub fn index(&self) -> usize {
        self.factors.iter().map(|f| f.norm() as usize + 1).product()
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1
    }

    /// Prime of residue degree one.
    pub fn is_degree_one_prime(&self) -> bool {
        self.is_prime() && self.factors[0].residue_degree() == 1
    }

    /// Whether `x` lies in the ideal.
    pub fn contains(&self, x: &QuadInt) -> bool {
        self.generator.divides(x)
    }
}

impl std::fmt::Display for LevelIdeal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.generator)
    }
}

/// Prime elements of residue degree one with norm in `[lo, hi]`, one per
/// conjugate pair (the one returned by [`split_type`]), ordered by norm.
pub fn degree_one_primes(ring: RingId, lo: u64, hi: u64) -> Vec<QuadInt> {
    let mut out = Vec::new();
    if hi < 2 {
        return out;
    }
    for p in arith::primes_up_to(hi) {
        if p < lo {
            continue;
        }
        let (kind, pi) = split_type(p, ring).expect("p is prime");
        if kind != SplitKind::Inert {
            out.push(pi.canonical());
        }
    }
    out
}

/// How each transversal element was reached in the Schreier tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: usize,
    pub gen: usize,
    pub exp: i32,
}

/// Right action of the generators of G on the cosets Gamma_0(a) \ G.
#[derive(Debug, Serialize, Deserialize)]
pub struct CosetTable {
    pub group: GroupId,
    pub level: LevelIdeal,
    matrices_g: Vec<Mat2>,
    forward: Vec<Vec<usize>>,
    inverse: Vec<Vec<usize>>,
    /// `tree[c]` is `None` for the base coset.
    tree: Vec<Option<TreeEdge>>,
    #[serde(skip)]
    transversal: OnceLock<Vec<Mat2>>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.forward.first().map_or(1, |p| p.len())
    }

    pub fn ngens(&self) -> usize {
        self.forward.len()
    }

    /// Permutation `c -> c g^dir` of the cosets, `dir = +-1`.
    pub fn perm(&self, g: usize, dir: i32) -> &[usize] {
        if dir > 0 {
            &self.forward[g]
        } else {
            &self.inverse[g]
        }
    }

    pub fn tree_edge(&self, c: usize) -> Option<TreeEdge> {
        self.tree[c]
    }

    /// Word for the transversal element t_c, with Gamma_0(a) t_c = c.
    pub fn transversal_word(&self, c: usize) -> Word {
        let mut letters = Vec::new();
        let mut x = c;
        while let Some(e) = self.tree[x] {
            letters.push((e.gen, e.exp));
            x = e.parent;
        }
        letters.reverse();
        Word::from_letters(letters)
    }

    /// Matrix of t_c.
    pub fn transversal(&self, c: usize) -> &Mat2 {
        &self.transversal_matrices()[c]
    }

    fn transversal_matrices(&self) -> &Vec<Mat2> {
        self.transversal.get_or_init(|| {
            let ring = self.level.ring;
            let n = self.index();
            let mut out: Vec<Option<Mat2>> = vec![None; n];
            out[0] = Some(Mat2::identity(ring));
            // parents precede children in BFS order, but not in index order
            for c in self.bfs_order() {
                if let Some(e) = self.tree[c] {
                    let parent = out[e.parent].clone().expect("parent visited first");
                    let g = if e.exp > 0 { self.matrices_g[e.gen].clone() } else { self.matrices_g[e.gen].inverse().expect("invertible") };
                    out[c] = Some(&parent * &g);
                }
            }
            out.into_iter().map(|m| m.expect("every coset is reached")).collect()
        })
    }

    fn bfs_order(&self) -> Vec<usize> {
        let n = self.index();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (c, e) in self.tree.iter().enumerate() {
            if let Some(e) = e {
                children[e.parent].push(c);
            }
        }
        let mut order = vec![0];
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            order.extend_from_slice(&children[c]);
            i += 1;
        }
        order
    }

    /// The element `t_c g t_target^{-1}` of Gamma_0(a), where `target = c g`.
    pub fn return_element(&self, c: usize, g: &Mat2, target: usize) -> Mat2 {
        let t = self.transversal(c);
        let u = self.transversal(target).inverse().expect("invertible");
        &(t * g) * &u
    }

    /// Whether the Schreier generator (g, c) is trivial by the choice of tree.
    pub fn is_tree_column(&self, g: usize, c: usize) -> bool {
        let target = self.forward[g][c];
        matches!(self.tree[target], Some(e) if e.parent == c && e.gen == g && e.exp > 0)
            || matches!(self.tree[c], Some(e) if e.parent == target && e.gen == g && e.exp < 0)
    }
}

/// Point of P^1(O/a) as its per-factor coordinates.
struct Projective<'a> {
    level: &'a LevelIdeal,
    strides: Vec<usize>,
}

impl<'a> Projective<'a> {
    fn new(level: &'a LevelIdeal) -> Self {
        let mut strides = Vec::new();
        let mut s = 1;
        for f in &level.factors {
            strides.push(s);
            s *= f.norm() as usize + 1;
        }
        Projective { level, strides }
    }

    /// Normalize (x : y) over one residue field and number it: (x : 1) is
    /// `x0 + x1 p`, (1 : 0) is `q`.
    fn encode_one(field: &ResidueField, x: Fq, y: Fq) -> usize {
        if field.is_zero(&y) {
            return field.size() as usize;
        }
        let v = field.mul(&x, &field.inv(&y).expect("nonzero"));
        (v[0] + v[1] * field.p) as usize
    }

    fn decode_one(field: &ResidueField, idx: usize) -> (Fq, Fq) {
        let q = field.size() as usize;
        if idx == q {
            return (field.one(), field.zero());
        }
        let p = field.p as usize;
        ([(idx % p) as u64, (idx / p) as u64], field.one())
    }

    /// Image of point `c` under the right action of `g`.
    fn act(&self, c: usize, g: &Mat2) -> usize {
        let mut out = 0;
        for (f, stride) in self.level.factors.iter().zip(&self.strides) {
            let field = &f.field;
            let local = (c / stride) % (f.norm() as usize + 1);
            let (x, y) = Self::decode_one(field, local);
            let [a, b, cc, d] = g.entries().map(|e| field.reduce(e));
            let nx = field.add(&field.mul(&x, &a), &field.mul(&y, &cc));
            let ny = field.add(&field.mul(&x, &b), &field.mul(&y, &d));
            out += Self::encode_one(field, nx, ny) * stride;
        }
        out
    }

    /// The point (c : d) given by a bottom row.
    fn point_of_row(&self, c: &QuadInt, d: &QuadInt) -> usize {
        let mut out = 0;
        for (f, stride) in self.level.factors.iter().zip(&self.strides) {
            out += Self::encode_one(&f.field, f.field.reduce(c), f.field.reduce(d)) * stride;
        }
        out
    }
}

/// Coset table of Gamma_0(a) in a PSL group, with a breadth-first Schreier
/// tree as transversal.
pub fn coset_table(p: &GroupPresentation, level: &LevelIdeal) -> Result<CosetTable> {
    coset_table_with_order(p, level, None)
}

/// As [`coset_table`], but the tree explores generators in an order shuffled
/// by `seed`, giving a different transversal.
pub fn coset_table_seeded(p: &GroupPresentation, level: &LevelIdeal, seed: u64) -> Result<CosetTable> {
    coset_table_with_order(p, level, Some(seed))
}

fn coset_table_with_order(p: &GroupPresentation, level: &LevelIdeal, seed: Option<u64>) -> Result<CosetTable> {
    if p.id.kind != GroupKind::Psl {
        return Err(Error::InvalidArgument(format!("congruence subgroups are only built in PSL groups, not {}", p.id)));
    }
    if level.ring != p.ring() {
        return Err(Error::InvalidLevel(format!("level {level} is not an ideal of O_{}", p.ring())));
    }
    let space = Projective::new(level);
    let n = level.index();
    let ngens = p.ngens();
    let mut forward = Vec::with_capacity(ngens);
    let mut inverse = Vec::with_capacity(ngens);
    for m in &p.matrices {
        let perm: Vec<usize> = (0..n).map(|c| space.act(c, m)).collect();
        let mut inv = vec![usize::MAX; n];
        for (c, &t) in perm.iter().enumerate() {
            if inv[t] != usize::MAX {
                return Err(Error::Inconsistent(format!("generator {m} does not act bijectively on P^1(O/a)")));
            }
            inv[t] = c;
        }
        forward.push(perm);
        inverse.push(inv);
    }
    let mut moves: Vec<(usize, i32)> = (0..ngens).flat_map(|g| [(g, 1), (g, -1)]).collect();
    if let Some(s) = seed {
        moves.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(s));
    }
    let mut tree: Vec<Option<TreeEdge>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for &(g, exp) in &moves {
            let t = if exp > 0 { forward[g][c] } else { inverse[g][c] };
            if !seen[t] {
                seen[t] = true;
                tree[t] = Some(TreeEdge { parent: c, gen: g, exp });
                queue.push_back(t);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Inconsistent("the generators do not act transitively on P^1(O/a)".into()));
    }
    let table = CosetTable {
        group: p.id,
        level: level.clone(),
        matrices_g: p.matrices.clone(),
        forward,
        inverse,
        tree,
        transversal: OnceLock::new(),
    };
    for r in &p.relators {
        for c in 0..n {
            let mut x = c;
            for (g, s) in r.expanded() {
                x = table.perm(g, s)[x];
            }
            if x != c {
                return Err(Error::Inconsistent(format!("relator {} moves coset {c}", r.display(&p.names))));
            }
        }
    }
    debug_assert_eq!(space.point_of_row(&level.ring.zero(), &level.ring.one()), 0);
    Ok(table)
}

/// The point of P^1(O/a) for the coset of `g`: its bottom row.
pub fn coset_of(level: &LevelIdeal, g: &Mat2) -> usize {
    Projective::new(level).point_of_row(&g.c, &g.d)
}

/// Abelianized Reidemeister-Schreier relations for Gamma_0(a): one column per
/// Schreier generator (g, c) off the tree, one row per (relator, coset).
pub fn schreier_relations(p: &GroupPresentation, table: &CosetTable) -> SparseRelations {
    let n = table.index();
    let ngens = p.ngens();
    let mut column = vec![usize::MAX; ngens * n];
    let mut cols = 0;
    for g in 0..ngens {
        for c in 0..n {
            if !table.is_tree_column(g, c) {
                column[g * n + c] = cols;
                cols += 1;
            }
        }
    }
    let mut rel = SparseRelations::new(cols);
    for r in &p.relators {
        let letters: Vec<(usize, i32)> = r.expanded().collect();
        for start in 0..n {
            let mut x = start;
            let mut entries = Vec::with_capacity(letters.len());
            for &(g, s) in &letters {
                if s > 0 {
                    let col = column[g * n + x];
                    if col != usize::MAX {
                        entries.push((col, Z::ONE));
                    }
                    x = table.perm(g, 1)[x];
                } else {
                    x = table.perm(g, -1)[x];
                    let col = column[g * n + x];
                    if col != usize::MAX {
                        entries.push((col, Z::from(-1)));
                    }
                }
            }
            rel.push(entries);
        }
    }
    rel
}

/// Outcome of abelianizing one congruence subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianizationReport {
    pub d: u32,
    pub level: LevelIdeal,
    pub norm: u64,
    pub index: usize,
    pub decomposition: AbelianDecomposition<Z>,
    pub rank: usize,
    /// Distinct primes dividing the torsion, ascending.
    pub torsion_primes: Vec<Z>,
    /// Cofactors that could not be factored within the budget.
    pub unfactored: Vec<Z>,
    /// Only for prime levels of residue degree one.
    pub cuspidal_rank: Option<usize>,
    /// Torsion primes above (N p + 1) / 2; prime levels only.
    pub gs_violations: Vec<Z>,
}

/// Gamma_0(a)^ab for Gamma_0(a) in PSL2(O_d).
pub fn abelianization(id: GroupId, level: &LevelIdeal, factor_budget: Duration) -> Result<AbelianizationReport> {
    let p = load_presentation(id)?;
    abelianization_with(&p, level, factor_budget)
}

pub fn abelianization_with(p: &GroupPresentation, level: &LevelIdeal, factor_budget: Duration) -> Result<AbelianizationReport> {
    let table = coset_table(p, level)?;
    let decomposition = schreier_relations(p, &table).cokernel();
    report_from(p.ring(), level, decomposition, factor_budget)
}

fn report_from(ring: RingId, level: &LevelIdeal, decomposition: AbelianDecomposition<Z>, budget: Duration) -> Result<AbelianizationReport> {
    let mut primes: Vec<Z> = Vec::new();
    let mut unfactored = Vec::new();
    let deadline = std::time::Instant::now() + budget;
    for v in &decomposition.divisor_norms {
        let left = deadline.saturating_duration_since(std::time::Instant::now());
        let f = factor(v, left);
        primes.extend(f.distinct_primes());
        unfactored.extend(f.unfactored);
    }
    primes.sort();
    primes.dedup();
    unfactored.sort();
    unfactored.dedup();
    let rank = decomposition.rank;
    let mut report = AbelianizationReport {
        d: ring.d(),
        level: level.clone(),
        norm: level.norm(),
        index: level.index(),
        decomposition,
        rank,
        torsion_primes: primes,
        unfactored,
        cuspidal_rank: None,
        gs_violations: Vec::new(),
    };
    if level.is_degree_one_prime() {
        report.cuspidal_rank = Some(cuspidal_rank(&report)?);
    }
    if level.is_prime() {
        report.gs_violations = gs_check(&report)?;
    }
    Ok(report)
}

/// Free rank of Gamma_0(a)^ab alone, by elimination modulo large primes.
pub fn abelianization_rank(p: &GroupPresentation, level: &LevelIdeal) -> Result<usize> {
    let table = coset_table(p, level)?;
    Ok(schreier_relations(p, &table).cokernel_rank())
}

/// Number of cusps that the rank correction removes for a prime level of
/// residue degree one: 2 for d not in {1, 3}, none otherwise.
fn cusp_correction(d: u32) -> usize {
    if d == 1 || d == 3 {
        0
    } else {
        2
    }
}

/// Cuspidal rank from the rank of the abelianization at a prime level of
/// residue degree one.
pub fn cuspidal_rank(report: &AbelianizationReport) -> Result<usize> {
    if !report.level.is_degree_one_prime() {
        return Err(Error::InvalidLevel(format!("{} is not a prime of residue degree one", report.level)));
    }
    cuspidal_rank_from(report.d, report.rank)
}

pub fn cuspidal_rank_from(d: u32, rank: usize) -> Result<usize> {
    rank.checked_sub(cusp_correction(d))
        .ok_or_else(|| Error::Inconsistent(format!("rank {rank} is below the {} cusp classes for d = {d}", cusp_correction(d))))
}

/// Torsion primes p with p > (N p + 1) / 2.
pub fn gs_check(report: &AbelianizationReport) -> Result<Vec<Z>> {
    if !report.level.is_prime() {
        return Err(Error::InvalidLevel(format!("{} is not prime", report.level)));
    }
    let bound = Z::from(report.norm as i64 + 1);
    Ok(report.torsion_primes.iter().filter(|p| &Z::from(2) * *p > bound).cloned().collect())
}

/// For d = 1 and a prime q with N q = 1 mod 12: whether Gamma_0((1+i) q)^ab
/// has rank zero.
pub fn lmr_predicate(p: &GroupPresentation, q: &QuadInt) -> Result<bool> {
    if p.ring().d() != 1 || p.id.kind != GroupKind::Psl {
        return Err(Error::InvalidArgument("the predicate is defined for PSL2(O_1) only".into()));
    }
    let level = lmr_level(q)?;
    Ok(abelianization_rank(p, &level)? == 0)
}

/// The level (1+i) q, checking N q = 1 mod 12.
pub fn lmr_level(q: &QuadInt) -> Result<LevelIdeal> {
    let ring = q.ring;
    let n = q.norm().as_i64().unwrap_or(0);
    if n % 12 != 1 {
        return Err(Error::InvalidLevel(format!("N({q}) = {n} is not 1 mod 12")));
    }
    LevelIdeal::from_primes(ring, &[ring.elem(1, 1), q.clone()])
}

/// Prime elements q of O_1 with N q = 1 mod 12, one per conjugate pair, ascending.
pub fn lmr_primes(count: usize) -> Vec<QuadInt> {
    let ring = RingId::new(1).expect("d = 1");
    let mut out = Vec::new();
    let mut hi = 1000;
    while out.len() < count {
        out = degree_one_primes(ring, 2, hi)
            .into_iter()
            .filter(|q| q.norm().as_i64().is_some_and(|n| n % 12 == 1))
            .take(count)
            .collect();
        hi *= 2;
    }
    out
}
