use super::{AbelianDecomposition, EuclideanRing, Matrix};
use crate::error::{Error, Result};

/// `row[dst] -= q * row[src]` across the whole width.
fn row_axpy<R: EuclideanRing>(ring: &R, m: &mut Matrix<R::Elem>, dst: usize, src: usize, q: &R::Elem) {
    let cols = m.cols();
    for j in 0..cols {
        let s = m.get(src, j);
        if ring.is_zero(s) {
            continue;
        }
        let v = ring.sub(m.get(dst, j), &ring.mul(q, s));
        m.set(dst, j, v);
    }
}

/// `col[dst] -= q * col[src]`.
fn col_axpy<R: EuclideanRing>(ring: &R, m: &mut Matrix<R::Elem>, dst: usize, src: usize, q: &R::Elem) {
    for i in 0..m.rows() {
        let s = m.get(i, src);
        if ring.is_zero(s) {
            continue;
        }
        let v = ring.sub(m.get(i, dst), &ring.mul(q, s));
        m.set(i, dst, v);
    }
}

fn swap_cols<E: Clone>(m: &mut Matrix<E>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

/// Row echelon form by unimodular row operations, pivoting only in the first
/// `ncols` columns (later columns ride along, e.g. an identity block that
/// records the transform). Returns the pivot columns; rows past their count
/// vanish in the first `ncols` columns.
pub fn echelon<R: EuclideanRing>(ring: &R, m: &mut Matrix<R::Elem>, ncols: usize) -> Vec<usize> {
    echelon_with(ring, m, ncols, false)
}

fn echelon_with<R: EuclideanRing>(ring: &R, m: &mut Matrix<R::Elem>, ncols: usize, reduce_above: bool) -> Vec<usize> {
    let rows = m.rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols.min(m.cols()) {
        if r == rows {
            break;
        }
        loop {
            let mut best: Option<(usize, _)> = None;
            for i in r..rows {
                let x = m.get(i, c);
                if ring.is_zero(x) {
                    continue;
                }
                let s = ring.size(x);
                if best.as_ref().is_none_or(|(_, bs)| s < *bs) {
                    best = Some((i, s));
                }
            }
            let Some((bi, _)) = best else { break };
            m.swap_rows(r, bi);
            let mut clear = true;
            for i in r + 1..rows {
                if ring.is_zero(m.get(i, c)) {
                    continue;
                }
                let (q, rem) = ring.div_rem(m.get(i, c), m.get(r, c));
                row_axpy(ring, m, i, r, &q);
                if !ring.is_zero(&rem) {
                    clear = false;
                }
            }
            if clear {
                if reduce_above {
                    for i in 0..r {
                        if ring.is_zero(m.get(i, c)) {
                            continue;
                        }
                        let (q, _) = ring.div_rem(m.get(i, c), m.get(r, c));
                        if !ring.is_zero(&q) {
                            row_axpy(ring, m, i, r, &q);
                        }
                    }
                }
                pivots.push(c);
                r += 1;
                break;
            }
        }
    }
    pivots
}

/// Echelon form with every entry above a pivot reduced modulo it and pivots
/// normalized: a Hermite form of the row lattice when `ncols` is the width.
pub fn hermite<R: EuclideanRing>(ring: &R, m: &mut Matrix<R::Elem>, ncols: usize) -> Vec<usize> {
    let pivots = echelon_with(ring, m, ncols, true);
    for (r, &c) in pivots.iter().enumerate() {
        let (_, u) = ring.normalize(m.get(r, c));
        if !ring.is_zero(&ring.sub(&u, &ring.one())) {
            for j in 0..m.cols() {
                let v = ring.mul(&u, m.get(r, j));
                m.set(r, j, v);
            }
        }
        for i in 0..r {
            if ring.is_zero(m.get(i, c)) {
                continue;
            }
            let (q, _) = ring.div_rem(m.get(i, c), m.get(r, c));
            if !ring.is_zero(&q) {
                row_axpy(ring, m, i, r, &q);
            }
        }
    }
    pivots
}

pub fn rank<R: EuclideanRing>(ring: &R, a: &Matrix<R::Elem>) -> usize {
    let mut m = a.clone();
    let n = m.cols();
    echelon(ring, &mut m, n).len()
}

/// Rows spanning `{x : x * a = 0}`; the span is saturated in `R^rows`.
pub fn kernel_basis<R: EuclideanRing>(ring: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let n = a.rows();
    // Hermite form of a^T: when every pivot is a unit the pivot block is the
    // identity and each free coordinate gives one kernel vector directly.
    let mut h = a.transpose();
    let pivots = hermite(ring, &mut h, n);
    if pivots.iter().enumerate().all(|(r, &c)| ring.is_unit(h.get(r, c))) {
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|c| !is_pivot[*c]).collect();
        let mut k = Matrix::zeros(ring, free.len(), n);
        for (i, &f) in free.iter().enumerate() {
            k.set(i, f, ring.one());
            for (r, &c) in pivots.iter().enumerate() {
                let v = ring.div_exact(&ring.neg(h.get(r, f)), h.get(r, c)).expect("unit pivot");
                k.set(i, c, v);
            }
        }
        return k;
    }
    // same kernel, from the smaller triangular Hermite rows
    let ht = h.row_range(0, pivots.len()).transpose();
    let mut m = ht.hstack(&Matrix::identity(ring, n));
    let r = echelon(ring, &mut m, ht.cols()).len();
    let mut k = m.row_range(r, n).col_range(ht.cols(), ht.cols() + n);
    let w = k.cols();
    hermite(ring, &mut k, w);
    k
}

/// Nonzero Smith diagonal of `a`: normalized, each entry dividing the next.
/// The number of entries is the rank of `a`.
pub fn smith_form<R: EuclideanRing>(ring: &R, a: &Matrix<R::Elem>) -> Vec<R::Elem> {
    // Alternate Hermite forms of rows and columns; entries stay reduced
    // modulo the pivots and the matrix usually becomes monomial quickly.
    let mut m = a.clone();
    for _ in 0..12 {
        let n = m.cols();
        let r = hermite(ring, &mut m, n).len();
        m = m.row_range(0, r);
        if is_monomial(ring, &m) {
            break;
        }
        m = m.transpose();
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize, _)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = m.get(i, j);
                if ring.is_zero(x) {
                    continue;
                }
                let s = ring.size(x);
                if best.as_ref().is_none_or(|(_, _, bs)| s < *bs) {
                    best = Some((i, j, s));
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        m.swap_rows(t, bi);
        swap_cols(&mut m, t, bj);
        loop {
            let mut settled = true;
            for i in t + 1..rows {
                if ring.is_zero(m.get(i, t)) {
                    continue;
                }
                let (q, _) = ring.div_rem(m.get(i, t), m.get(t, t));
                row_axpy(ring, &mut m, i, t, &q);
                if !ring.is_zero(m.get(i, t)) {
                    settled = false;
                }
            }
            for j in t + 1..cols {
                if ring.is_zero(m.get(t, j)) {
                    continue;
                }
                let (q, _) = ring.div_rem(m.get(t, j), m.get(t, t));
                col_axpy(ring, &mut m, j, t, &q);
                if !ring.is_zero(m.get(t, j)) {
                    settled = false;
                }
            }
            if !settled {
                // move the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t, ring.size(m.get(t, t)));
                for i in t + 1..rows {
                    let x = m.get(i, t);
                    if !ring.is_zero(x) && ring.size(x) < best.2 {
                        best = (i, t, ring.size(x));
                    }
                }
                for j in t + 1..cols {
                    let x = m.get(t, j);
                    if !ring.is_zero(x) && ring.size(x) < best.2 {
                        best = (t, j, ring.size(x));
                    }
                }
                m.swap_rows(t, best.0);
                swap_cols(&mut m, t, best.1);
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    let x = m.get(i, j);
                    if !ring.is_zero(x) && !ring.divides(m.get(t, t), x) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let minus_one = ring.neg(&ring.one());
                    row_axpy(ring, &mut m, t, i, &minus_one);
                }
                None => break,
            }
        }
        diag.push(ring.normalize(m.get(t, t)).0);
        t += 1;
    }
    diag
}

fn is_monomial<R: EuclideanRing>(ring: &R, m: &Matrix<R::Elem>) -> bool {
    let mut col_used = vec![false; m.cols()];
    for i in 0..m.rows() {
        let mut count = 0;
        for (j, x) in m.row(i).iter().enumerate() {
            if !ring.is_zero(x) {
                if col_used[j] {
                    return false;
                }
                col_used[j] = true;
                count += 1;
            }
        }
        if count > 1 {
            return false;
        }
    }
    true
}

/// Smith decomposition of the cokernel `R^cols / rowspan(a)`.
pub fn snf<R: EuclideanRing>(ring: &R, a: &Matrix<R::Elem>) -> AbelianDecomposition<R::Elem> {
    let diag = smith_form(ring, a);
    let rank = a.cols() - diag.len();
    AbelianDecomposition::from_diagonal(ring, diag, rank)
}

/// Coordinates `c` with `c * basis = b`; `basis` must have independent rows and
/// every row of `b` must lie in their integral span.
pub fn solve_in_span<R: EuclideanRing>(
    ring: &R,
    basis: &Matrix<R::Elem>,
    b: &Matrix<R::Elem>,
) -> Result<Matrix<R::Elem>> {
    let (k, n, m) = (basis.rows(), basis.cols(), b.rows());
    if b.cols() != n && m > 0 {
        return Err(Error::Contract(format!("width mismatch {} vs {}", b.cols(), n)));
    }
    if k == 0 {
        return if b.is_zero(ring) {
            Ok(Matrix::zeros(ring, m, 0))
        } else {
            Err(Error::Contract("relations outside the zero lattice".into()))
        };
    }
    let bt = if m == 0 { Matrix::zeros(ring, n, 0) } else { b.transpose() };
    let mut aug = basis.transpose().hstack(&bt);
    let pivots = echelon(ring, &mut aug, k);
    if pivots.len() != k {
        return Err(Error::Contract("basis rows are dependent".into()));
    }
    for i in k..n {
        for j in k..k + m {
            if !ring.is_zero(aug.get(i, j)) {
                return Err(Error::Contract("relation outside the span of the basis".into()));
            }
        }
    }
    // upper triangular R * y = x, back substitution
    let mut y: Vec<Vec<R::Elem>> = vec![Vec::new(); k];
    for i in (0..k).rev() {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let mut acc = aug.get(i, k + j).clone();
            for l in i + 1..k {
                let r = aug.get(i, l);
                if !ring.is_zero(r) {
                    acc = ring.sub(&acc, &ring.mul(r, &y[l][j]));
                }
            }
            let v = ring
                .div_exact(&acc, aug.get(i, i))
                .ok_or_else(|| Error::Contract("relation not in the integral span of the basis".into()))?;
            row.push(v);
        }
        y[i] = row;
    }
    Ok(Matrix::from_fn(m, k, |i, j| y[j][i].clone()))
}

/// Coordinates of the rows of `b` against a basis in echelon form with
/// pivot columns `pivots`, by substitution.
fn solve_echelon<R: EuclideanRing>(
    ring: &R,
    basis: &Matrix<R::Elem>,
    pivots: &[usize],
    b: &Matrix<R::Elem>,
) -> Result<Matrix<R::Elem>> {
    let k = pivots.len();
    let mut out = Matrix::zeros(ring, b.rows(), k);
    for i in 0..b.rows() {
        let mut rest = b.row(i).to_vec();
        for (r, &c) in pivots.iter().enumerate() {
            if ring.is_zero(&rest[c]) {
                continue;
            }
            let y = ring
                .div_exact(&rest[c], basis.get(r, c))
                .ok_or_else(|| Error::Contract("relation not in the integral span of the basis".into()))?;
            for (j, x) in basis.row(r).iter().enumerate() {
                if !ring.is_zero(x) {
                    rest[j] = ring.sub(&rest[j], &ring.mul(&y, x));
                }
            }
            out.set(i, r, y);
        }
        if rest.iter().any(|x| !ring.is_zero(x)) {
            return Err(Error::Contract("relation outside the span of the basis".into()));
        }
    }
    Ok(out)
}

/// Structure of `span(basis) / span(relations)`; the rows of `basis` must be
/// independent.
pub fn quotient_decomposition<R: EuclideanRing>(
    ring: &R,
    basis: &Matrix<R::Elem>,
    relations: &Matrix<R::Elem>,
) -> Result<AbelianDecomposition<R::Elem>> {
    let mut h = basis.clone();
    let w = h.cols();
    let pivots = hermite(ring, &mut h, w);
    if pivots.len() != basis.rows() {
        return Err(Error::Contract("basis rows are dependent".into()));
    }
    if relations.rows() > 0 && relations.cols() != w {
        return Err(Error::Contract(format!("width mismatch {} vs {}", relations.cols(), w)));
    }
    let c = solve_echelon(ring, &h, &pivots, relations)?;
    let diag = smith_form(ring, &c);
    let rank = basis.rows() - diag.len();
    Ok(AbelianDecomposition::from_diagonal(ring, diag, rank))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Integers;
    use crate::ring::{RingId, Z};

    fn zm(rows: Vec<Vec<i64>>) -> Matrix<Z> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(cols, rows.into_iter().map(|r| r.into_iter().map(Z::from).collect()).collect())
    }

    #[test]
    fn classical_snf() {
        let d = smith_form(&Integers, &zm(vec![vec![2, 0], vec![0, 3]]));
        assert_eq!(d, vec![Z::from(1), Z::from(6)]);
        let zero = zm(vec![vec![0, 0], vec![0, 0]]);
        assert!(smith_form(&Integers, &zero).is_empty());
    }

    #[test]
    fn gaussian_snf() {
        let r = RingId::new(1).unwrap();
        let a = Matrix::from_rows(2, vec![vec![r.elem(1, 1), r.zero()], vec![r.zero(), r.int(2)]]);
        let norms: Vec<Z> = smith_form(&r, &a).iter().map(|x| x.norm()).collect();
        assert_eq!(norms, vec![Z::from(2), Z::from(4)]);
    }

    #[test]
    fn kernels() {
        let id = zm(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(kernel_basis(&Integers, &id).rows(), 0);
        let z = zm(vec![vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(kernel_basis(&Integers, &z), zm(vec![vec![1, 0], vec![0, 1]]));
        assert_eq!(kernel_basis(&Integers, &zm(vec![vec![2]])).rows(), 0);
        let a = zm(vec![vec![2, 4], vec![3, 6], vec![1, 1]]);
        let k = kernel_basis(&Integers, &a);
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&Integers, &a).is_zero(&Integers));
        // saturated: (3, -2, 0) generates, not a multiple of it
        let g = k.row(0).iter().fold(Z::ZERO, |g, x| g.gcd(x));
        assert!(g.is_one());
    }

    #[test]
    fn quotients() {
        let id = zm(vec![vec![1, 0], vec![0, 1]]);
        let q = quotient_decomposition(&Integers, &id, &zm(vec![vec![2, 0]])).unwrap();
        assert_eq!(q.divisor_norms, vec![Z::from(2)]);
        assert_eq!(q.rank, 1);
        let empty = Matrix::filled(0, 2, Z::ZERO);
        let q = quotient_decomposition(&Integers, &id, &empty).unwrap();
        assert!(q.divisors.is_empty() && q.rank == 2);
        let r = RingId::new(1).unwrap();
        let idr = Matrix::identity(&r, 2);
        let b = Matrix::from_rows(2, vec![vec![r.elem(1, 1), r.zero()], vec![r.zero(), r.int(3)]]);
        let q = quotient_decomposition(&r, &idr, &b).unwrap();
        // Z[i]/(1+i) + Z[i]/(3) is cyclic: the chain form is a single divisor 3(1+i)
        assert_eq!(q.divisor_norms, vec![Z::from(18)]);
        assert_eq!(q.torsion_order(), Z::from(2 * 9));
        assert_eq!(q.rank, 0);
        // relation outside the lattice
        let half = zm(vec![vec![2, 0]]);
        assert!(quotient_decomposition(&Integers, &half, &zm(vec![vec![1, 0]])).is_err());
        assert!(quotient_decomposition(&Integers, &half, &zm(vec![vec![0, 1]])).is_err());
    }
}
