//! Rational-integer helpers: modular arithmetic, primality, square roots mod p,
//! Kronecker symbols and budgeted factorisation.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::Z;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    s0.rem_euclid(p as i128) as u64
}

/// Reduce a signed value into `[0, p)`.
pub fn to_residue(x: &Z, p: u64) -> u64 {
    match x {
        Z::Small(v) => v.rem_euclid(p as i64) as u64,
        Z::Big(b) => b.mod_floor(&BigInt::from(p)).to_u64().unwrap(),
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with fixed bases; deterministic below 3.3e24, probabilistic above.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigInt::one();
    let two = BigInt::from(2);
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

/// Kronecker symbol (D / n) for n > 0.
pub fn kronecker(d: i64, n: u64) -> i32 {
    assert!(n > 0);
    let mut n = n;
    let mut result = 1i32;
    while n.is_multiple_of(2) {
        n /= 2;
        let r = d.rem_euclid(8);
        if r == 0 || r == 2 || r == 4 || r == 6 {
            return 0;
        }
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    result * jacobi(d.rem_euclid(n as i64) as u64, n)
}

/// Jacobi symbol (a / n) for odd n > 0.
pub fn jacobi(mut a: u64, mut n: u64) -> i32 {
    assert!(n % 2 == 1);
    a %= n;
    let mut result = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli-Shanks), if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Outcome of factoring one positive integer under a time budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// Prime factors with multiplicity, ascending.
    pub primes: Vec<(Z, u32)>,
    /// Composite cofactors the budget ran out on.
    pub unfactored: Vec<Z>,
}

impl Factorization {
    pub fn distinct_primes(&self) -> Vec<Z> {
        self.primes.iter().map(|(p, _)| p.clone()).collect()
    }
}

const TRIAL_BOUND: u64 = 1 << 16;

/// Factor |n| by trial division, then Pollard-Brent rho until `budget` expires.
pub fn factor(n: &Z, budget: Duration) -> Factorization {
    let start = Instant::now();
    let mut n = n.abs().to_big();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut unfactored = Vec::new();
    if n.is_zero() {
        return Factorization { primes: Vec::new(), unfactored: vec![Z::ZERO] };
    }
    let mut p = 2u64;
    while p <= TRIAL_BOUND {
        let bp = BigInt::from(p);
        if (&bp * &bp) > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            primes.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = Vec::new();
    if !n.is_one() {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if is_probable_prime(&m) {
            push_prime(&mut primes, m);
            continue;
        }
        match pollard_brent(&m, start, budget) {
            Some(f) => {
                let other = &m / &f;
                stack.push(f);
                stack.push(other);
            }
            None => unfactored.push(Z::from_big(m)),
        }
    }
    primes.sort();
    let primes = primes.into_iter().map(|(p, e)| (Z::from_big(p), e)).collect();
    unfactored.sort();
    Factorization { primes, unfactored }
}

fn push_prime(primes: &mut Vec<(BigInt, u32)>, p: BigInt) {
    if let Some(entry) = primes.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += 1;
    } else {
        primes.push((p, 1));
    }
}

fn pollard_brent(n: &BigInt, start: Instant, budget: Duration) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let one = BigInt::one();
    for c in 1u32.. {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 128u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
            if start.elapsed() > budget {
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
        if start.elapsed() > budget {
            return None;
        }
    }
    None
}
