//! Integer cokernels by elimination modulo a multiple of the torsion order.
//!
//! If `D` is a multiple of every Smith divisor of `A`, then `Z^n / (L + 2D Z^n)`
//! has the same nonzero divisors as `Z^n / L`, while free summands show up as
//! `Z/2D`. Working modulo `2D` keeps entries bounded, which plain integer
//! elimination does not. `D` is the gcd of two nonsingular maximal minors,
//! each computed by CRT up to its Hadamard bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{AbelianDecomposition, Integers, Matrix};
use crate::ring::{arith, Z};

/// Structure of `Z^cols / rowspan(a)`.
pub fn integer_cokernel(a: &Matrix<Z>) -> AbelianDecomposition<Z> {
    let n = a.cols();
    let primes = small_primes(3);
    // short rows first keep the minors, and so the CRT work, small
    let norm = |i: usize| a.row(i).iter().filter(|x| !x.is_zero()).map(|x| x.ln_abs() + 1.0).sum::<f64>();
    let mut forward: Vec<usize> = (0..a.rows()).collect();
    forward.sort_by(|x, y| norm(*x).total_cmp(&norm(*y)));
    let mut backward = forward.clone();
    backward.rotate_left(forward.len() / 3);
    // ranks mod p never exceed the true rank; agreement across primes and
    // row orders settles it, otherwise fall back to exact elimination
    let minors: Vec<(Vec<usize>, Vec<usize>)> = [(&forward, primes[0]), (&backward, primes[1]), (&forward, primes[2])]
        .into_iter()
        .map(|(order, p)| {
            let reduced: Vec<Vec<u64>> = (0..a.rows()).map(|i| a.row(i).iter().map(|x| arith::to_residue(x, p)).collect()).collect();
            independent_minor(&reduced, order, p)
        })
        .collect();
    let r = minors[0].0.len();
    if minors.iter().any(|(rows, _)| rows.len() != r) {
        return super::snf(&Integers, a);
    }
    if r == 0 {
        return AbelianDecomposition::torsion_free(n);
    }
    let mut multiple = BigInt::zero();
    for (rows, cols) in &minors[..2] {
        let minor = Matrix::from_fn(r, r, |i, j| a.get(rows[i], cols[j]).clone());
        multiple = multiple.gcd(&determinant(&minor));
        if multiple.is_one() {
            return AbelianDecomposition::torsion_free(n - r);
        }
    }
    let modulus: BigInt = &multiple * 2;
    let diag = smith_mod(a, &modulus);
    let mut divisors = Vec::new();
    let mut free = n - diag.len();
    for d in diag {
        if d == modulus {
            free += 1;
        } else if !d.is_one() {
            divisors.push(Z::from_big(d));
        }
    }
    debug_assert_eq!(free, n - r);
    AbelianDecomposition::from_diagonal(&Integers, divisors, free)
}

/// Primes just below 2^31, so products of residues fit in a u64.
fn small_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = (1u64 << 31) - 1;
    while out.len() < count {
        if arith::is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// Rows (taken greedily in `order`) and pivot columns of a maximal
/// nonsingular submatrix modulo `p < 2^31`.
fn independent_minor(a: &[Vec<u64>], order: &[usize], p: u64) -> (Vec<usize>, Vec<usize>) {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut rows = Vec::new();
    let cols = a.first().map_or(0, |r| r.len());
    for &i in order {
        if basis.len() == cols {
            break;
        }
        let mut v = a[i].clone();
        for (c, b) in &basis {
            let f = v[*c];
            if f != 0 {
                let f = p - f;
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x + f * *y) % p;
                }
            }
        }
        let Some(c) = v.iter().position(|x| *x != 0) else { continue };
        let inv = arith::inv_mod(v[c], p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        basis.push((c, v));
        rows.push(i);
    }
    (rows, basis.iter().map(|(c, _)| *c).collect())
}

fn det_mod(a: &Matrix<Z>, p: u64) -> u64 {
    // p < 2^31, so every update fits in a u64 before reduction
    let n = a.rows();
    let mut m: Vec<Vec<u64>> = (0..n).map(|i| a.row(i).iter().map(|x| arith::to_residue(x, p)).collect()).collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|i| m[*i][c] != 0) else { return 0 };
        if piv != c {
            m.swap(piv, c);
            det = (p - det) % p;
        }
        det = det * m[c][c] % p;
        let inv = arith::inv_mod(m[c][c], p);
        let (top, bottom) = m.split_at_mut(c + 1);
        let pivot_row = &top[c];
        for row in bottom.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = p - row[c] * inv % p;
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = (*x + f * *y) % p;
            }
        }
    }
    det
}

/// Exact determinant by CRT over 31-bit primes up to the Hadamard bound.
fn determinant(a: &Matrix<Z>) -> BigInt {
    let bits: f64 = (0..a.rows())
        .map(|i| {
            let s: f64 = a.row(i).iter().map(|x| x.to_f64().powi(2)).sum();
            0.5 * s.log2()
        })
        .sum::<f64>()
        + 2.0;
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    let mut covered = 0.0;
    let mut c = (1u64 << 31) - 1;
    while covered < bits {
        while !arith::is_prime_u64(c) {
            c -= 2;
        }
        let p = c;
        c -= 2;
        let d = det_mod(a, p);
        let current = (&value % p).to_u64_digits().1.first().copied().unwrap_or(0);
        let m_mod = (&modulus % p).to_u64_digits().1.first().copied().unwrap_or(0);
        let diff = (d + p - current) % p;
        let t = diff * arith::inv_mod(m_mod, p) % p;
        value += &modulus * t;
        modulus *= p;
        covered += (p as f64).log2();
    }
    if &value * 2 > modulus {
        value -= &modulus;
    }
    value.abs()
}

fn reduce(x: &BigInt, n: &BigInt) -> BigInt {
    x.mod_floor(n)
}

fn mod_inverse(x: &BigInt, n: &BigInt) -> BigInt {
    reduce(&x.extended_gcd(n).x, n)
}

/// Unimodular 2x2 combination making `x[piv]` the gcd and `y[piv]` zero, mod `n`.
fn combine(x: &mut [BigInt], y: &mut [BigInt], piv: usize, n: &BigInt) {
    let (a, b) = (x[piv].clone(), y[piv].clone());
    let e = a.extended_gcd(&b);
    let (g, s, t) = (e.gcd, e.x, e.y);
    let (ag, bg) = (&a / &g, &b / &g);
    for (u, v) in x.iter_mut().zip(y.iter_mut()) {
        if u.is_zero() && v.is_zero() {
            continue;
        }
        let nu = reduce(&(&s * &*u + &t * &*v), n);
        let nv = reduce(&(&bg * &*u - &ag * &*v), n);
        *u = nu;
        *v = nv;
    }
}

/// Diagonal of the Smith form of `Z^n / (rowspan(a) + n Z^n)`, as divisors
/// of `n` in chain order; `n` itself marks a free summand. Columns that
/// never receive a pivot are omitted.
fn smith_mod(a: &Matrix<Z>, n: &BigInt) -> Vec<BigInt> {
    let cols = a.cols();
    let mut m: Vec<Vec<BigInt>> = (0..a.rows()).map(|i| a.row(i).iter().map(|x| reduce(&x.to_big(), n)).collect()).collect();
    // row echelon form modulo n, preferring pivots that are units mod n
    let mut t = 0;
    for c in 0..cols {
        let candidates: Vec<usize> = (t..m.len()).filter(|i| !m[*i][c].is_zero()).collect();
        let Some(&first) = candidates.first() else { continue };
        let unit = candidates.iter().copied().find(|i| m[*i][c].gcd(n).is_one());
        m.swap(t, unit.unwrap_or(first));
        if unit.is_some() {
            let inv = mod_inverse(&m[t][c], n);
            for x in m[t].iter_mut().skip(c) {
                if !x.is_zero() {
                    *x = reduce(&(&*x * &inv), n);
                }
            }
            let support: Vec<usize> = (c..cols).filter(|j| !m[t][*j].is_zero()).collect();
            let (top, bottom) = m.split_at_mut(t + 1);
            let pivot = &top[t];
            for row in bottom.iter_mut() {
                if row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for &j in &support {
                    row[j] = reduce(&(&row[j] - &f * &pivot[j]), n);
                }
            }
        } else {
            for i in t + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let (top, bottom) = m.split_at_mut(i);
                combine(&mut top[t], &mut bottom[0], c, n);
            }
        }
        t += 1;
    }
    m.truncate(t);
    // full Smith elimination on the echelon rows
    let rows = m.len();
    let mut diag = Vec::new();
    let mut k = 0;
    while k < rows {
        // a unit pivot with nothing below it clears its row for free, since
        // the column operations touch no other row
        if let Some(j) = (k..cols).find(|j| !m[k][*j].is_zero()) {
            if m[k][j].gcd(n).is_one() && (k + 1..rows).all(|i| m[i][j].is_zero()) {
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
                for x in m[k].iter_mut().skip(k + 1) {
                    *x = BigInt::zero();
                }
                diag.push(BigInt::one());
                k += 1;
                continue;
            }
        }
        let Some((pi, pj)) = (k..rows).flat_map(|i| (k..cols).map(move |j| (i, j))).find(|(i, j)| !m[*i][*j].is_zero()) else {
            break;
        };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        loop {
            for i in k + 1..rows {
                if !m[i][k].is_zero() {
                    let (top, bottom) = m.split_at_mut(i);
                    combine(&mut top[k], &mut bottom[0], k, n);
                }
            }
            let mut dirty = false;
            for j in k + 1..cols {
                if m[k][j].is_zero() {
                    continue;
                }
                let mut x: Vec<BigInt> = m.iter().map(|r| r[k].clone()).collect();
                let mut y: Vec<BigInt> = m.iter().map(|r| r[j].clone()).collect();
                combine(&mut x, &mut y, k, n);
                for (i, r) in m.iter_mut().enumerate() {
                    if i > k && !x[i].is_zero() {
                        dirty = true;
                    }
                    r[k] = x[i].clone();
                    r[j] = y[i].clone();
                }
            }
            if !dirty {
                break;
            }
        }
        diag.push(m[k][k].gcd(n));
        k += 1;
    }
    // divisibility chain
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            if g != diag[i] {
                let l = diag[i].lcm(&diag[j]);
                diag[i] = g;
                diag[j] = l;
            }
        }
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::snf;
    use proptest::prelude::*;

    fn matrix(rows: usize, cols: usize, entries: &[i64]) -> Matrix<Z> {
        Matrix::from_fn(rows, cols, |i, j| Z::from(entries[i * cols + j]))
    }

    #[test]
    fn determinant_by_crt() {
        let a = matrix(3, 3, &[2, -1, 0, 7, 3, 5, -4, 8, 9]);
        // 2(27 - 40) + 1(63 + 20) = 57
        assert_eq!(determinant(&a), BigInt::from(57));
        let big = Matrix::from_fn(6, 6, |i, j| Z::from(((i * 7 + j * 13) as i64 % 11 - 5) * 1_000_000_007));
        let exact = crate::exactla::smith_form(&Integers, &big).iter().fold(Z::ONE, |acc, d| &acc * d);
        let det = determinant(&big);
        assert!(det.is_zero() || Z::from_big(det) == exact.abs());
    }

    #[test]
    fn free_and_torsion_parts() {
        // Z^3 / <(2, 4, 0), (0, 6, 0)> = Z/2 + Z/6 + Z
        let a = matrix(2, 3, &[2, 4, 0, 0, 6, 0]);
        let c = integer_cokernel(&a);
        assert_eq!(c.rank, 1);
        assert_eq!(c.divisor_norms, vec![Z::from(2), Z::from(6)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn agrees_with_dense_smith(rows in 1usize..9, cols in 1usize..9, seed in prop::collection::vec(-40i64..40, 81)) {
            let a = Matrix::from_fn(rows, cols, |i, j| {
                let v = seed[i * 9 + j];
                // sparse-ish with occasional large entries
                Z::from(if v.abs() < 15 { 0 } else { v * if v % 7 == 0 { 1009 } else { 1 } })
            });
            prop_assert_eq!(integer_cokernel(&a), snf(&Integers, &a));
        }
    }
}
