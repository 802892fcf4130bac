//! Volumes of the Bianchi orbifolds and the torsion and rank statistics built
//! on them.
//!
//! V_d = |D|^{3/2} zeta_K(2) / (4 pi^2) with zeta_K(2) = zeta(2) L(2, chi_D)
//! and zeta(2) = pi^2 / 6, so V_d = |D|^{3/2} L(2, chi_D) / 24. The L-value
//! is a finite sum of Hurwitz zeta values evaluated by Euler-Maclaurin in
//! fixed-point integer arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::congruence::{degree_one_primes, AbelianizationReport};
use crate::error::{Error, Result};
use crate::ring::arith::kronecker;
use crate::ring::{QuadInt, RingId};

/// Working precision in decimal digits.
const DIGITS: u32 = 60;
/// Exact terms before the Euler-Maclaurin tail.
const EM_TERMS: u64 = 64;
/// Bernoulli corrections in the tail.
const EM_ORDER: usize = 20;

/// A real number `mantissa / 10^scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    pub mantissa: BigInt,
    pub scale: u32,
}

impl Fixed {
    fn unit(scale: u32) -> BigInt {
        BigInt::from(10u32).pow(scale)
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.scientific(17);
        s.parse().unwrap_or(f64::NAN)
    }

    /// Decimal exponent of the leading digit.
    fn exponent(&self) -> i64 {
        let digits = self.mantissa.abs().to_string().len() as i64;
        digits - 1 - self.scale as i64
    }

    /// `n` significant digits, rounded half up, in scientific notation.
    pub fn scientific(&self, n: u32) -> String {
        if self.mantissa.is_zero() {
            return "0".into();
        }
        let e = self.exponent();
        let s = self.round_to(n);
        let digits = s.abs().to_string();
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        // rounding may carry into an extra digit
        let shift = digits.len() as i64 - n as i64;
        let (head, tail) = digits.split_at(1);
        format!("{sign}{head}.{}e{}", &tail[..tail.len().min(n as usize - 1)], e + shift)
    }

    /// Mantissa rounded to `n` significant digits, as an integer.
    fn round_to(&self, n: u32) -> BigInt {
        let e = self.exponent();
        let drop = self.scale as i64 + e - (n as i64 - 1);
        if drop <= 0 {
            return &self.mantissa * BigInt::from(10u32).pow((-drop) as u32);
        }
        let p = BigInt::from(10u32).pow(drop as u32);
        let (q, r) = self.mantissa.abs().div_rem(&p);
        let q = if &r * 2 >= p { q + 1 } else { q };
        if self.mantissa.is_negative() {
            -q
        } else {
            q
        }
    }

    /// Parse a plain decimal such as `0.3053`.
    pub fn parse(s: &str, scale: u32) -> Option<Fixed> {
        let s = s.trim();
        let (neg, s) = s.strip_prefix('-').map_or((false, s), |r| (true, r));
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > scale as usize || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let padded = format!("{int}{frac}{}", "0".repeat(scale as usize - frac.len()));
        let m: BigInt = padded.parse().ok()?;
        Some(Fixed { mantissa: if neg { -m } else { m }, scale })
    }

    /// Whether `printed` agrees with this value to `n` significant digits:
    /// the difference is at most half a unit in the `n`-th digit.
    pub fn agrees_to(&self, printed: &str, n: u32) -> bool {
        let Some(other) = Fixed::parse(printed, self.scale) else { return false };
        let diff = (&self.mantissa - &other.mantissa).abs();
        let e = self.exponent();
        let ulp_exp = self.scale as i64 + e - (n as i64 - 1);
        if ulp_exp < 0 {
            return diff.is_zero();
        }
        diff * 2 <= BigInt::from(10u32).pow(ulp_exp as u32)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = Fixed::unit(self.scale);
        let (q, r) = self.mantissa.abs().div_rem(&unit);
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        write!(f, "{sign}{q}.{:0>width$}", r.to_string(), width = self.scale as usize)
    }
}

/// V_d = vol(PSL2(O_d) \ H^3) with a bound on its error.
#[derive(Clone, Debug)]
pub struct VolumeConstant {
    pub d: u32,
    pub value: Fixed,
    /// Absolute error bound.
    pub error_bound: f64,
}

impl VolumeConstant {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Bernoulli numbers B_0..=B_n as reduced fractions (numerator, denominator).
fn bernoulli(n: usize) -> Vec<(BigInt, BigInt)> {
    // sum_{k=0}^{m} C(m+1, k) B_k = 0
    let mut b: Vec<(BigInt, BigInt)> = vec![(BigInt::one(), BigInt::one())];
    for m in 1..=n {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        let mut binom = BigInt::one();
        for (k, (bn, bd)) in b.iter().enumerate() {
            // num/den += C(m+1, k) * bn/bd
            let t = &binom * bn;
            num = &num * bd + &t * &den;
            den *= bd;
            let g = num.gcd(&den);
            num /= &g;
            den /= &g;
            binom = binom * (m + 1 - k) / (k + 1);
        }
        // B_m = -num / (den * (m + 1))
        let mut d = den * (m + 1);
        let mut nn = -num;
        let g = nn.gcd(&d);
        nn /= &g;
        d /= &g;
        if d.is_negative() {
            nn = -nn;
            d = -d;
        }
        b.push((nn, d));
    }
    b
}

/// Rounded quotient of integers.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r * 2 >= *b {
        q + 1
    } else {
        q
    }
}

/// sum_{k >= 0} 1 / (k m + a)^2 in fixed point, with an error bound in ulps.
fn periodic_square_sum(m: u64, a: u64, unit: &BigInt, bern: &[(BigInt, BigInt)]) -> (BigInt, f64) {
    let mut sum = BigInt::zero();
    for k in 0..EM_TERMS {
        let x = BigInt::from(k * m + a);
        sum += div_round(unit, &(&x * &x));
    }
    let x = BigInt::from(EM_TERMS * m + a);
    let mb = BigInt::from(m);
    // integral and half end term
    sum += div_round(unit, &(&mb * &x));
    sum += div_round(unit, &(&x * &x * 2));
    // B_{2j} m^{2j-1} / x^{2j+1}
    for j in 1..=EM_ORDER {
        let (bn, bd) = &bern[2 * j];
        let num = unit * bn * mb.pow(2 * j as u32 - 1);
        let den = bd * x.pow(2 * j as u32 + 1);
        let q = div_round(&num.abs(), &den);
        if bn.is_negative() {
            sum -= q;
        } else {
            sum += q;
        }
    }
    // first omitted correction, converted to ulps
    let j = EM_ORDER + 1;
    let (bn, bd) = &bern[2 * j];
    let omitted = unit * bn.abs() * mb.pow(2 * j as u32 - 1) / (bd * x.pow(2 * j as u32 + 1));
    let ulps = (EM_TERMS as usize + EM_ORDER + 3) as f64;
    (sum, omitted.to_f64().unwrap_or(f64::INFINITY) + ulps)
}

/// L(2, chi_D) for the quadratic character of discriminant D of O_d.
pub fn l_two(ring: RingId) -> (Fixed, f64) {
    let disc = ring.discriminant();
    let m = disc.unsigned_abs();
    let unit = Fixed::unit(DIGITS);
    let bern = bernoulli(2 * EM_ORDER + 2);
    let mut total = BigInt::zero();
    let mut err = 0.0;
    for a in 1..m {
        let chi = kronecker(disc, a);
        if chi == 0 {
            continue;
        }
        let (s, e) = periodic_square_sum(m, a, &unit, &bern);
        if chi > 0 {
            total += s;
        } else {
            total -= s;
        }
        err += e;
    }
    (Fixed { mantissa: total, scale: DIGITS }, err * 10f64.powi(-(DIGITS as i32)))
}

/// V_d = |D|^{3/2} L(2, chi_D) / 24.
pub fn volume(ring: RingId) -> VolumeConstant {
    let (l, l_err) = l_two(ring);
    let m = BigInt::from(ring.discriminant().unsigned_abs());
    let unit = Fixed::unit(DIGITS);
    // |D|^{3/2} in fixed point, floor of the square root
    let root = (&m * &unit * &unit).sqrt();
    let factor = &m * root;
    let value = div_round(&(&factor * &l.mantissa), &(&unit * 24));
    let factor_f = factor.to_f64().unwrap_or(f64::INFINITY) / unit.to_f64().unwrap_or(f64::INFINITY);
    let error_bound = factor_f * l_err / 24.0 + 4.0 * 10f64.powi(-(DIGITS as i32));
    VolumeConstant { d: ring.d(), value: Fixed { mantissa: value, scale: DIGITS }, error_bound }
}

/// arctan(1/x) in fixed point.
fn arctan_inv(x: u64, unit: &BigInt) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = unit / &x;
    let mut sum = power.clone();
    let mut k = 1u64;
    while !power.is_zero() {
        power /= &x2;
        let term = &power / (2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

pub fn pi() -> Fixed {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239), with guard digits
    let guard = 10;
    let unit = Fixed::unit(DIGITS + guard);
    let v = arctan_inv(5, &unit) * 16 - arctan_inv(239, &unit) * 4;
    Fixed { mantissa: div_round(&v, &Fixed::unit(guard)), scale: DIGITS }
}

/// 1 / (6 pi), the limit predicted for log-torsion over volume.
pub fn bv_constant() -> Fixed {
    let p = pi();
    let unit = Fixed::unit(DIGITS);
    Fixed { mantissa: div_round(&(&unit * &unit), &(p.mantissa * 6)), scale: DIGITS }
}

/// log of the torsion order against the covolume of Gamma_0(p).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionStat {
    pub d: u32,
    pub norm: u64,
    /// Natural log of the order of the torsion subgroup.
    pub t: f64,
    /// (N p + 1) V_d.
    pub v: f64,
    pub ratio: f64,
}

/// Torsion statistic of a prime level of residue degree one.
pub fn bv_ratio(report: &AbelianizationReport, volume: &VolumeConstant) -> Result<TorsionStat> {
    if !report.level.is_degree_one_prime() {
        return Err(Error::InvalidLevel(format!("{} is not a prime of residue degree one", report.level)));
    }
    if report.d != volume.d {
        return Err(Error::InvalidArgument(format!("volume for d = {} used with d = {}", volume.d, report.d)));
    }
    let t: f64 = report.decomposition.divisor_norms.iter().map(|n| n.ln_abs()).sum();
    let v = (report.norm + 1) as f64 * volume.to_f64();
    Ok(TorsionStat { d: report.d, norm: report.norm, t, v, ratio: t / v })
}

pub fn mean_ratio(stats: &[TorsionStat]) -> Option<f64> {
    if stats.is_empty() {
        return None;
    }
    Some(stats.iter().map(|s| s.ratio).sum::<f64>() / stats.len() as f64)
}

/// Cuspidal rank of one prime level from a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    pub d: u32,
    pub norm: u64,
    pub generator: QuadInt,
    pub cuspidal_rank: usize,
}

/// N_r(x): number of degree-one prime levels of norm < x with cuspidal rank r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankHistogram {
    pub d: u32,
    pub x: u64,
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
}

impl RankHistogram {
    pub fn count(&self, r: usize) -> usize {
        self.counts.get(&r).copied().unwrap_or(0)
    }

    pub fn percentage(&self, r: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.count(r) as f64 / self.total as f64
        }
    }

    pub fn positive(&self) -> usize {
        self.total - self.count(0)
    }
}

/// Histogram over every degree-one prime of norm below `x`; levels missing
/// from `records` are reported as an error.
pub fn nr_histogram(ring: RingId, records: &[RankRecord], x: u64) -> Result<RankHistogram> {
    let by_level: BTreeMap<(u64, String), usize> = records
        .iter()
        .filter(|r| r.d == ring.d())
        .map(|r| ((r.norm, r.generator.to_string()), r.cuspidal_rank))
        .collect();
    let mut counts = BTreeMap::new();
    let mut missing = Vec::new();
    let primes = if x > 2 { degree_one_primes(ring, 2, x - 1) } else { Vec::new() };
    for pi in &primes {
        let norm = pi.norm().as_i64().expect("small norm") as u64;
        match by_level.get(&(norm, pi.to_string())) {
            Some(r) => *counts.entry(*r).or_insert(0) += 1,
            None => missing.push(norm),
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteSweep { d: ring.d(), x, missing });
    }
    Ok(RankHistogram { d: ring.d(), x, counts, total: primes.len() })
}

/// R(x) = x^{5/6} / log x.
pub fn r_of_x(x: f64) -> f64 {
    x.powf(5.0 / 6.0) / x.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LxRow {
    pub x: u64,
    pub r: f64,
    /// Sum of cuspidal ranks over levels of norm at most x.
    pub l: usize,
    /// R(x) / L(x); absent while L(x) = 0.
    pub ratio: Option<f64>,
}

pub fn lx_rx_table(records: &[RankRecord], checkpoints: &[u64]) -> Vec<LxRow> {
    checkpoints
        .iter()
        .map(|&x| {
            let l: usize = records.iter().filter(|r| r.norm <= x).map(|r| r.cuspidal_rank).sum();
            let r = r_of_x(x as f64);
            LxRow { x, r, l, ratio: (l > 0).then(|| r / l as f64) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(12);
        assert_eq!(b[1], (BigInt::from(-1), BigInt::from(2)));
        assert_eq!(b[2], (BigInt::from(1), BigInt::from(6)));
        assert_eq!(b[4], (BigInt::from(-1), BigInt::from(30)));
        assert_eq!(b[12], (BigInt::from(-691), BigInt::from(2730)));
        assert!(b[7].0.is_zero());
    }

    #[test]
    fn zeta_two_from_the_same_sum() {
        // m = 1, a = 1 gives zeta(2) = pi^2 / 6
        let unit = Fixed::unit(DIGITS);
        let bern = bernoulli(2 * EM_ORDER + 2);
        let (s, err) = periodic_square_sum(1, 1, &unit, &bern);
        let p = pi().mantissa;
        let expected = div_round(&(&p * &p), &(&unit * 6));
        assert!(((s - expected).abs().to_f64().unwrap()) <= err + 2.0);
    }

    #[test]
    fn catalan_constant() {
        // L(2, chi_{-4}) is Catalan's constant
        let (g, err) = l_two(RingId::new(1).unwrap());
        assert!(g.agrees_to("0.915965594177219015054603514932384110774", 38));
        assert!(err < 1e-50);
    }

    #[test]
    fn volumes_to_thirty_digits() {
        let printed = [
            (1, "0.305321864725739671684867838311"),
            (2, "1.00384100334119813727236488577"),
            (3, "0.169156934401608937503533759046"),
            (7, "0.888914927816353263598904154202"),
            (11, "1.38260830790264587367165334450"),
        ];
        for (d, v) in printed {
            let vol = volume(RingId::new(d).unwrap());
            assert!(vol.value.agrees_to(v, 29), "d = {d}: {}", vol.value);
            assert!(vol.error_bound < 1e-40);
        }
    }

    #[test]
    fn pi_digits() {
        assert!(pi().agrees_to("3.14159265358979323846264338327950288419716939937510", 50));
        assert!(bv_constant().agrees_to("0.0530516476972984452562945877908", 30));
    }

    #[test]
    fn fixed_formatting() {
        let x = Fixed::parse("0.0530516", 10).unwrap();
        assert_eq!(x.scientific(3), "5.31e-2");
        assert_eq!(x.to_string(), "0.0530516000");
        assert!(x.agrees_to("0.05305", 4));
        assert!(!x.agrees_to("0.05315", 4));
        assert!((x.to_f64() - 0.0530516).abs() < 1e-15);
    }

    #[test]
    fn empty_histogram() {
        let r = RingId::new(1).unwrap();
        let h = nr_histogram(r, &[], 2).unwrap();
        assert_eq!(h.total, 0);
        assert!(h.counts.is_empty());
        assert!(matches!(nr_histogram(r, &[], 20), Err(Error::IncompleteSweep { .. })));
    }

    #[test]
    fn r_of_x_values() {
        assert!((r_of_x(3000.0) - 98.665545).abs() < 1e-5);
        let rows = lx_rx_table(&[], &[3000]);
        assert_eq!(rows[0].ratio, None);
    }

    #[test]
    fn torsion_stat_of_a_real_level() {
        use crate::congruence::{abelianization, LevelIdeal};
        use crate::presentations::GroupId;
        let ring = RingId::new(1).unwrap();
        let vol = volume(ring);
        for pi in degree_one_primes(ring, 2, 500) {
            let level = LevelIdeal::from_generator(&pi).unwrap();
            let rep = abelianization(GroupId::psl(1).unwrap(), &level, std::time::Duration::from_secs(5)).unwrap();
            let s = bv_ratio(&rep, &vol).unwrap();
            assert!((s.t - rep.decomposition.torsion_order().ln_abs()).abs() < 1e-9 * (1.0 + s.t));
            if rep.decomposition.is_torsion_free() {
                assert_eq!((s.t, s.ratio), (0.0, 0.0));
            }
            assert!((s.ratio * s.v - s.t).abs() < 1e-9 * (1.0 + s.t));
        }
        let wrong = volume(RingId::new(2).unwrap());
        let level = LevelIdeal::from_generator(&ring.elem(2, 1)).unwrap();
        let rep = abelianization(GroupId::psl(1).unwrap(), &level, std::time::Duration::from_secs(1)).unwrap();
        assert!(bv_ratio(&rep, &wrong).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sweep(d: u32, hi: u64, ranks: &[usize]) -> Vec<RankRecord> {
            let ring = RingId::new(d).unwrap();
            degree_one_primes(ring, 2, hi)
                .into_iter()
                .zip(ranks.iter().cycle())
                .map(|(pi, &r)| RankRecord { d, norm: pi.norm().as_i64().unwrap() as u64, generator: pi, cuspidal_rank: r })
                .collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn histogram_partitions_the_levels(
                d in prop::sample::select(vec![1u32, 2, 3, 7, 11]),
                ranks in prop::collection::vec(0usize..4, 1..20),
                x in 3u64..400,
            ) {
                let ring = RingId::new(d).unwrap();
                let recs = sweep(d, 400, &ranks);
                let h = nr_histogram(ring, &recs, x).unwrap();
                prop_assert_eq!(h.total, degree_one_primes(ring, 2, x - 1).len());
                prop_assert_eq!(h.counts.values().sum::<usize>(), h.total);
                prop_assert_eq!(h.positive() + h.count(0), h.total);
                if h.total > 0 {
                    let pct: f64 = h.counts.keys().map(|r| h.percentage(*r)).sum();
                    prop_assert!((pct - 100.0).abs() < 1e-9);
                }
                let below: usize = recs.iter().filter(|r| r.norm < x).map(|r| r.cuspidal_rank).sum();
                let weighted: usize = h.counts.iter().map(|(r, c)| r * c).sum();
                prop_assert_eq!(weighted, below);
            }

            #[test]
            fn dropping_a_level_is_detected(
                d in prop::sample::select(vec![1u32, 2, 3, 7, 11]),
                drop in any::<prop::sample::Index>(),
            ) {
                let ring = RingId::new(d).unwrap();
                let mut recs = sweep(d, 300, &[0, 1]);
                let gone = recs.remove(drop.index(recs.len()));
                match nr_histogram(ring, &recs, 301) {
                    Err(Error::IncompleteSweep { missing, .. }) => prop_assert_eq!(missing, vec![gone.norm]),
                    other => prop_assert!(false, "{:?}", other),
                }
            }

            #[test]
            fn l_is_monotone(ranks in prop::collection::vec(0usize..4, 1..20), step in 10u64..100) {
                let recs = sweep(1, 600, &ranks);
                let cps: Vec<u64> = (1..=6).map(|i| i * step).collect();
                let rows = lx_rx_table(&recs, &cps);
                for pair in rows.windows(2) {
                    prop_assert!(pair[0].l <= pair[1].l);
                    prop_assert!(pair[0].r < pair[1].r);
                }
            }
        }
    }
}
