//! Exact rational and p-adic arithmetic, divisor sums with their Euler
//! factorization, and modified Bessel functions K of integer and
//! half-integer order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{domain, Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Serializes as "p/q", or "p" when the denominator is 1.
pub fn fmt_rat(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rat(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Domain(format!("not a rational number: {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return domain(format!("zero denominator in {s:?}"));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        domain(format!("{p} is not prime"))
    }
}

/// A place of Q: a finite prime or the archimedean place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PAdicPlace {
    Finite(u64),
    Infinity,
}

impl PAdicPlace {
    pub fn finite(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(PAdicPlace::Finite(p))
    }
}

impl fmt::Display for PAdicPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PAdicPlace::Finite(p) => write!(f, "{p}"),
            PAdicPlace::Infinity => write!(f, "inf"),
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// v_p(x) for nonzero rational x.
pub fn padic_valuation(x: &Rational, p: u64) -> Result<i64> {
    check_prime(p)?;
    if x.is_zero() {
        return domain("p-adic valuation of zero");
    }
    let pb = BigInt::from(p);
    Ok(int_valuation(x.numer(), &pb) - int_valuation(x.denom(), &pb))
}

pub fn rat_pow(base: &Rational, e: i64) -> Rational {
    let r = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

/// |x|_p = p^(-v_p(x)) exactly, |0|_p = 0; at infinity the ordinary absolute value.
pub fn padic_abs(x: &Rational, place: PAdicPlace) -> Result<Rational> {
    match place {
        PAdicPlace::Infinity => Ok(x.abs()),
        PAdicPlace::Finite(p) => {
            check_prime(p)?;
            if x.is_zero() {
                return Ok(Rational::zero());
            }
            let v = padic_valuation(x, p)?;
            Ok(rat_pow(&int(p as i64), -v))
        }
    }
}

/// The representative a/p^k in [0,1) of the class of x in Q_p/Z_p.
pub fn fractional_part_p(x: &Rational, p: u64) -> Result<Rational> {
    check_prime(p)?;
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    let pb = BigInt::from(p);
    let k = int_valuation(x.denom(), &pb);
    if k == 0 {
        return Ok(Rational::zero());
    }
    let pk = num_traits::pow(pb.clone(), k as usize);
    let d = x.denom() / &pk;
    // a * d = n (mod p^k)
    let inv = mod_inverse(&d.mod_floor(&pk), &pk)
        .ok_or_else(|| Error::Invariant("denominator part not invertible mod p^k".into()))?;
    let a = (x.numer() * inv).mod_floor(&pk);
    Ok(Rational::new(a, pk))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn positive(m: i64) -> Result<u64> {
    if m <= 0 {
        return domain(format!("m must be a positive integer, got {m}"));
    }
    Ok(m as u64)
}

/// sigma_s(m) = sum of d^s over the divisors d of m.
pub fn divisor_sigma(s: u32, m: i64) -> Result<BigInt> {
    let m = positive(m)?;
    let mut divisors = vec![BigInt::one()];
    for (p, e) in factorize(m) {
        let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
        for d in &divisors {
            let mut pk = d.clone();
            next.push(pk.clone());
            for _ in 0..e {
                pk *= p;
                next.push(pk.clone());
            }
        }
        divisors = next;
    }
    Ok(divisors.iter().map(|d| num_traits::pow(d.clone(), s as usize)).sum())
}

/// prod over p | m of (1 - p^s |m|_p^(-s)) / (1 - p^s).
pub fn euler_sigma_product(s: u32, m: i64) -> Result<Rational> {
    if s == 0 {
        return domain("euler_sigma_product needs s >= 1 (the local factor is 0/0 at s = 0)");
    }
    let mr = int(positive(m)? as i64);
    let mut acc = Rational::one();
    for (p, _) in factorize(m as u64) {
        let ps = rat_pow(&int(p as i64), s as i64);
        let abs = padic_abs(&mr, PAdicPlace::Finite(p))?;
        let num = Rational::one() - &ps * rat_pow(&abs, -(s as i64));
        let den = Rational::one() - ps;
        acc *= num / den;
    }
    Ok(acc)
}

/// Integer or half-integer order, stored as twice the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub fn integer(n: u32) -> Self {
        BesselOrder { twice: 2 * n }
    }

    pub fn half_odd(twice: u32) -> Result<Self> {
        if twice % 2 == 0 {
            return domain(format!("{twice}/2 is not a half-odd-integer"));
        }
        Ok(BesselOrder { twice })
    }

    pub fn from_twice(twice: u32) -> Self {
        BesselOrder { twice }
    }

    pub fn from_rational(r: &Rational) -> Result<Self> {
        let t = r * int(2);
        if !t.is_integer() || t.is_negative() {
            return domain(format!("Bessel order {r} is not a nonnegative (half-)integer"));
        }
        let twice = t
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::Domain(format!("Bessel order {r} too large")))?;
        Ok(BesselOrder { twice })
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    pub fn to_rational(&self) -> Rational {
        rat(self.twice as i64, 2)
    }

    pub fn to_f64(&self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rat(&self.to_rational()))
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// e^x K_0(x), e^x K_1(x).
fn k01_scaled(x: f64) -> (f64, f64) {
    if x < 2.0 {
        let (k0, k1) = k01_series(x);
        (k0 * x.exp(), k1 * x.exp())
    } else {
        k01_steed(x)
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let ln = (0.5 * x).ln();
    let mut term = 1.0; // y^k / (k!)^2
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut harmonic = 0.0; // H_k
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term *= y / (kf * kf);
            harmonic += 1.0 / kf;
        }
        let t1 = term / (kf + 1.0); // y^k / (k! (k+1)!)
        i0 += term;
        i1 += t1;
        s0 += harmonic * term;
        // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
        s1 += (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * t1;
        if term < 1e-18 * i0 && k > 2 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(ln + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + ln * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction CF2 with the Temme normalization sum, order 0.
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// e^x K_order(x) for x > 0.
pub fn bessel_k_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("Bessel K needs x > 0, got {x}"));
    }
    let twice = order.twice();
    let (mut prev, mut cur, mut nu) = if twice % 2 == 1 {
        // K_{-1/2} = K_{1/2} = sqrt(pi/2x) e^-x
        let k = (std::f64::consts::PI / (2.0 * x)).sqrt();
        (k, k, 0.5)
    } else {
        let (k0, k1) = k01_scaled(x);
        if twice == 0 {
            return Ok(k0);
        }
        (k0, k1, 1.0)
    };
    let target = order.to_f64();
    while nu < target {
        let next = prev + 2.0 * nu / x * cur;
        prev = cur;
        cur = next;
        nu += 1.0;
    }
    Ok(cur)
}

/// K_order(x); fails with `Error::Underflow` when the value is not a normal double.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    let scaled = bessel_k_scaled(order, x)?;
    let v = scaled * (-x).exp();
    if !v.is_normal() {
        return Err(Error::Underflow { scaled });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&int(12), 2).unwrap(), 2);
        assert_eq!(padic_valuation(&int(1), 5).unwrap(), 0);
        assert_eq!(padic_valuation(&rat(7, 8), 2).unwrap(), -3);
        assert!(padic_valuation(&int(0), 2).is_err());
        assert!(padic_valuation(&int(3), 4).is_err());
    }

    #[test]
    fn abs_examples() {
        assert_eq!(padic_abs(&int(12), PAdicPlace::Finite(2)).unwrap(), rat(1, 4));
        assert_eq!(padic_abs(&int(0), PAdicPlace::Finite(3)).unwrap(), int(0));
        assert_eq!(padic_abs(&rat(-5, 9), PAdicPlace::Finite(3)).unwrap(), int(9));
        assert_eq!(padic_abs(&rat(-5, 9), PAdicPlace::Infinity).unwrap(), rat(5, 9));
    }

    #[test]
    fn fractional_examples() {
        assert_eq!(fractional_part_p(&rat(7, 8), 2).unwrap(), rat(7, 8));
        assert_eq!(fractional_part_p(&rat(3, 5), 2).unwrap(), int(0));
        assert_eq!(fractional_part_p(&rat(1, 6), 2).unwrap(), rat(1, 2));
        assert_eq!(fractional_part_p(&rat(-1, 4), 2).unwrap(), rat(3, 4));
        assert!(fractional_part_p(&rat(1, 6), 6).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(divisor_sigma(2, 6).unwrap(), BigInt::from(50));
        assert_eq!(divisor_sigma(7, 1).unwrap(), BigInt::from(1));
        assert_eq!(divisor_sigma(4, 2).unwrap(), BigInt::from(17));
        assert!(divisor_sigma(1, 0).is_err());
        assert_eq!(euler_sigma_product(2, 4).unwrap(), int(21));
        assert_eq!(euler_sigma_product(3, 1).unwrap(), int(1));
        assert_eq!(euler_sigma_product(2, 6).unwrap(), int(50));
        assert!(euler_sigma_product(0, 6).is_err());
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn bessel_closed_forms() {
        let v = bessel_k(BesselOrder::from_twice(1), 1.0).unwrap();
        assert!((v - 0.461_068_504_447_894_2).abs() < 1e-15);
        let v = bessel_k(BesselOrder::from_twice(3), 2.0).unwrap();
        let expect = (std::f64::consts::PI / 4.0).sqrt() * (-2.0f64).exp() * 1.5;
        assert!((v / expect - 1.0).abs() < 1e-14);
        assert!(bessel_k(BesselOrder::integer(0), 0.0).is_err());
        assert!(matches!(
            bessel_k(BesselOrder::integer(1), 800.0),
            Err(Error::Underflow { .. })
        ));
    }

    #[test]
    fn bessel_reference_values() {
        // A&S table values
        let k0 = bessel_k(BesselOrder::integer(0), 1.0).unwrap();
        let k1 = bessel_k(BesselOrder::integer(1), 1.0).unwrap();
        assert!((k0 / 0.421_024_438_240_708_3 - 1.0).abs() < 1e-13);
        assert!((k1 / 0.601_907_230_197_234_6 - 1.0).abs() < 1e-13);
        let k0 = bessel_k(BesselOrder::integer(0), 5.0).unwrap();
        assert!((k0 / 3.691_098_334_042_594e-3 - 1.0).abs() < 1e-13);
    }
}
