//! Sparse integer relation matrices: cokernels `Z^cols / rowspan` by unit-pivot
//! elimination followed by a dense Smith form of what is left.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{rank, AbelianDecomposition, Integers, Matrix, PrimeField};
use crate::ring::{arith, Z};

/// Relations over `Z`, one sorted sparse row per relation.
#[derive(Clone, Debug, Default)]
pub struct SparseRelations {
    cols: usize,
    rows: Vec<Vec<(usize, Z)>>,
}

impl SparseRelations {
    pub fn new(cols: usize) -> Self {
        SparseRelations { cols, rows: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Add a relation given as (column, coefficient) pairs; repeated columns accumulate.
    pub fn push(&mut self, entries: impl IntoIterator<Item = (usize, Z)>) {
        let mut row: Vec<(usize, Z)> = entries.into_iter().collect();
        row.sort_by_key(|(c, _)| *c);
        let mut merged: Vec<(usize, Z)> = Vec::with_capacity(row.len());
        for (c, v) in row {
            assert!(c < self.cols, "column {c} out of range");
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += &v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|(_, v)| !v.is_zero());
        self.rows.push(merged);
    }

    pub fn to_dense(&self) -> Matrix<Z> {
        let mut m = Matrix::zeros(&Integers, self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m.set(i, *c, v.clone());
            }
        }
        m
    }

    /// Eliminate every generator that some relation expresses with a unit
    /// coefficient. The returned core presents the same cokernel.
    pub fn eliminate_units(&self) -> Core {
        let mut rows = self.rows.clone();
        let mut alive = vec![true; rows.len()];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); self.cols];
        for (i, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_rows[*c].push(i);
            }
        }
        let mut col_dead = vec![false; self.cols];
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
            rows.iter().enumerate().map(|(i, r)| Reverse((r.len(), i))).collect();
        let mut eliminated = 0;
        while let Some(Reverse((len, i))) = heap.pop() {
            if !alive[i] || rows[i].len() != len {
                continue;
            }
            if len == 0 {
                alive[i] = false;
                continue;
            }
            // unit entry of this row in the sparsest column
            let mut pick: Option<(usize, usize)> = None;
            for (k, (c, v)) in rows[i].iter().enumerate() {
                if v.abs().is_one() {
                    let count = col_rows[*c].len();
                    if pick.is_none_or(|(_, best)| count < best) {
                        pick = Some((k, count));
                    }
                }
            }
            let Some((k, _)) = pick else { continue };
            let (pc, pv) = rows[i][k].clone();
            let pivot_row = std::mem::take(&mut rows[i]);
            alive[i] = false;
            let others = std::mem::take(&mut col_rows[pc]);
            for j in others {
                if !alive[j] || j == i {
                    continue;
                }
                let Ok(pos) = rows[j].binary_search_by_key(&pc, |(c, _)| *c) else { continue };
                // row_j -= (a / pv) * pivot_row, with 1/pv = pv
                let factor = &rows[j][pos].1 * &pv;
                let merged = axpy_sparse(&rows[j], &pivot_row, &factor);
                for (c, _) in &merged {
                    if rows[j].binary_search_by_key(c, |(cc, _)| *cc).is_err() {
                        col_rows[*c].push(j);
                    }
                }
                rows[j] = merged;
                heap.push(Reverse((rows[j].len(), j)));
            }
            col_dead[pc] = true;
            eliminated += 1;
        }
        let live_cols: Vec<usize> = (0..self.cols).filter(|c| !col_dead[*c]).collect();
        let mut index = vec![usize::MAX; self.cols];
        for (k, c) in live_cols.iter().enumerate() {
            index[*c] = k;
        }
        let mut core = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            if alive[i] && !row.is_empty() {
                core.push(row.into_iter().map(|(c, v)| (index[c], v)).collect());
            }
        }
        Core { cols: live_cols.len(), rows: core, eliminated }
    }

    /// Structure of `Z^cols / rowspan`.
    pub fn cokernel(&self) -> AbelianDecomposition<Z> {
        self.eliminate_units().cokernel()
    }

    /// Free rank of the cokernel.
    pub fn cokernel_rank(&self) -> usize {
        self.eliminate_units().cokernel_rank()
    }
}

/// `a - f * b` for sorted sparse rows.
fn axpy_sparse(a: &[(usize, Z)], b: &[(usize, Z)], f: &Z) -> Vec<(usize, Z)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |x| x.0);
        let cb = b.get(j).map_or(usize::MAX, |x| x.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, -&(f * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - &(f * &b[j].1);
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Cores with more columns than this use the modular Smith form.
pub const MODULAR_THRESHOLD: usize = 100;

/// What remains after unit elimination.
#[derive(Clone, Debug)]
pub struct Core {
    pub cols: usize,
    pub rows: Vec<Vec<(usize, Z)>>,
    pub eliminated: usize,
}

impl Core {
    pub fn to_dense(&self) -> Matrix<Z> {
        let mut m = Matrix::zeros(&Integers, self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m.set(i, *c, v.clone());
            }
        }
        m
    }

    pub fn cokernel(&self) -> AbelianDecomposition<Z> {
        if self.cols == 0 {
            return AbelianDecomposition::torsion_free(0);
        }
        // plain elimination is faster on small cores but its entries blow up on big ones
        if self.cols <= MODULAR_THRESHOLD {
            super::snf(&Integers, &self.to_dense())
        } else {
            super::integer_cokernel(&self.to_dense())
        }
    }

    /// Rank over three random large primes; an exact elimination settles disagreements.
    pub fn cokernel_rank(&self) -> usize {
        if self.cols == 0 {
            return 0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.rows.len() as u64 ^ ((self.cols as u64) << 32));
        let ranks: Vec<usize> = (0..3)
            .map(|_| {
                let p = loop {
                    let c = rng.gen_range((1u64 << 61)..(1u64 << 62)) | 1;
                    if arith::is_prime_u64(c) {
                        break c;
                    }
                };
                self.rank_mod(p)
            })
            .collect();
        let r = if ranks.iter().all(|r| *r == ranks[0]) { ranks[0] } else { rank(&Integers, &self.to_dense()) };
        self.cols - r
    }

    pub fn rank_mod(&self, p: u64) -> usize {
        let f = PrimeField { p };
        let m = self.to_dense().map(|x| f.reduce(x));
        rank(&f, &m)
    }
}
