//! Local spherical vectors of minimal representations, the SL(2) Casselman–Shalika
//! Whittaker function, degenerate global Whittaker values of E6/E7/E8 at s = 3/2, and
//! the exact Euler-product checks tying them together.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::exactnum::{
    divisor_sigma, factorize, fmt_rat, int, padic_abs, rat, rat_pow, bessel_k, BesselOrder, PAdicPlace, Rational,
};
use crate::orbits::ExceptionalGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Realization {
    Abelian,
    Heisenberg,
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Realization::Abelian => "abelian",
            Realization::Heisenberg => "heisenberg",
        })
    }
}

impl FromStr for Realization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abelian" => Ok(Realization::Abelian),
            "heisenberg" => Ok(Realization::Heisenberg),
            _ => domain(format!("unknown realization {s:?} (expected abelian or heisenberg)")),
        }
    }
}

/// The five supported (group, realization) pairs.
pub const PAIRS: [(ExceptionalGroup, Realization); 5] = [
    (ExceptionalGroup::E6, Realization::Abelian),
    (ExceptionalGroup::E7, Realization::Abelian),
    (ExceptionalGroup::E6, Realization::Heisenberg),
    (ExceptionalGroup::E7, Realization::Heisenberg),
    (ExceptionalGroup::E8, Realization::Heisenberg),
];

fn check_pair(group: ExceptionalGroup, realization: Realization) -> Result<()> {
    if group == ExceptionalGroup::E8 && realization == Realization::Abelian {
        return Err(Error::Unsupported("E8 does not exhibit a 3-grading, so it has no abelian realization".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphericalSpec {
    pub group: ExceptionalGroup,
    pub realization: Realization,
    pub place: PAdicPlace,
}

impl SphericalSpec {
    pub fn new(group: ExceptionalGroup, realization: Realization, place: PAdicPlace) -> Result<Self> {
        check_pair(group, realization)?;
        if let PAdicPlace::Finite(p) = place {
            PAdicPlace::finite(p)?;
        }
        Ok(SphericalSpec { group, realization, place })
    }
}

/// Exact at finite places, a double where a Bessel function appears.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalValue {
    Exact(Rational),
    Real(f64),
}

impl LocalValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            LocalValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            LocalValue::Real(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            LocalValue::Exact(r) => Some(r),
            LocalValue::Real(_) => None,
        }
    }
}

impl fmt::Display for LocalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalValue::Exact(r) => f.write_str(&fmt_rat(r)),
            LocalValue::Real(x) => write!(f, "{x:e}"),
        }
    }
}

impl Serialize for LocalValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LocalValue::Exact(r) => s.serialize_str(&fmt_rat(r)),
            LocalValue::Real(x) => s.serialize_f64(*x),
        }
    }
}

/// p^e for an exponent that is either an integer (exact) or not (double).
fn p_pow(p: u64, e: &Rational) -> Pow {
    if e.is_integer() {
        Pow::Exact(rat_pow(&int(p as i64), e.to_integer().to_i64().expect("small exponent")))
    } else {
        Pow::Real((p as f64).powf(e.to_f64().expect("finite exponent")))
    }
}

enum Pow {
    Exact(Rational),
    Real(f64),
}

/// The Casselman–Shalika formula for SL(2, Q_p), with gamma_p the indicator of Z_p.
pub fn cs_whittaker_sl2(s: &Rational, v: &Rational, m: &Rational, p: u64) -> Result<LocalValue> {
    let place = PAdicPlace::finite(p)?;
    if v.is_zero() || m.is_zero() {
        return domain("cs_whittaker_sl2 needs nonzero v and m");
    }
    let two_s = s * int(2);
    if two_s.is_one() {
        return domain("1 - p^(1-2s) vanishes at s = 1/2");
    }
    let y = m * v * v;
    let abs_y = padic_abs(&y, place)?;
    if abs_y > Rational::one() {
        return Ok(LocalValue::Exact(Rational::zero()));
    }
    // |v|_p = p^-a and |mv^2|_p = p^-k with k >= 0
    let a = int(crate::exactnum::padic_valuation(v, p)?);
    let k = int(crate::exactnum::padic_valuation(&y, p)?);
    let one = Rational::one();
    let exps = [
        &a * (&two_s - int(2)),
        -two_s.clone(),
        &one - &two_s,
        &one - &two_s + -(&k * (&two_s - &one)),
    ];
    let pows: Vec<Pow> = exps.iter().map(|e| p_pow(p, e)).collect();
    if let [Pow::Exact(pv), Pow::Exact(q), Pow::Exact(r), Pow::Exact(t)] = &pows[..] {
        return Ok(LocalValue::Exact(pv * (&one - q) * (&one - t) / (&one - r)));
    }
    let f = |x: &Pow| match x {
        Pow::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
        Pow::Real(x) => *x,
    };
    let (pv, q, r, t) = (f(&pows[0]), f(&pows[1]), f(&pows[2]), f(&pows[3]));
    Ok(LocalValue::Real(pv * (1.0 - q) * (1.0 - t) / (1.0 - r)))
}

/// (Bessel order, power of x) of the archimedean spherical vector.
pub fn archimedean_symbol(group: ExceptionalGroup, realization: Realization) -> Result<(BesselOrder, Rational)> {
    use ExceptionalGroup::*;
    use Realization::*;
    check_pair(group, realization)?;
    Ok(match (group, realization) {
        (E6, Abelian) => (BesselOrder::integer(1), int(-1)),
        (E7, Abelian) => (BesselOrder::from_twice(3), rat(-3, 2)),
        (E6, Heisenberg) => (BesselOrder::from_twice(1), rat(-5, 2)),
        (E7, Heisenberg) => (BesselOrder::integer(1), int(-4)),
        (E8, Heisenberg) => (BesselOrder::integer(2), int(-7)),
        (E8, Abelian) => unreachable!("rejected by check_pair"),
    })
}

/// (a, b) with the finite-place vector of the form |x|^(-a) (1 - p^b |x|^(-b)) / (1 - p^b).
fn finite_exponents(group: ExceptionalGroup, realization: Realization) -> Result<(i64, i64)> {
    use ExceptionalGroup::*;
    use Realization::*;
    check_pair(group, realization)?;
    Ok(match (group, realization) {
        (E6, Abelian) => (0, 2),
        (E7, Abelian) => (0, 3),
        (E6, Heisenberg) => (2, 1),
        (E7, Heisenberg) => (3, 2),
        (E8, Heisenberg) => (5, 4),
        (E8, Abelian) => unreachable!("rejected by check_pair"),
    })
}

pub fn local_spherical(spec: &SphericalSpec, x: &Rational) -> Result<LocalValue> {
    check_pair(spec.group, spec.realization)?;
    if x.is_zero() {
        return domain("spherical vector evaluated at x = 0");
    }
    match spec.place {
        PAdicPlace::Finite(p) => {
            let (a, b) = finite_exponents(spec.group, spec.realization)?;
            let abs = padic_abs(x, spec.place)?;
            let pb = rat_pow(&int(p as i64), b);
            let one = Rational::one();
            Ok(LocalValue::Exact(rat_pow(&abs, -a) * (&one - &pb * rat_pow(&abs, -b)) / (&one - &pb)))
        }
        PAdicPlace::Infinity => {
            if !x.is_positive() {
                return domain("the archimedean spherical vector is evaluated at x > 0");
            }
            let (order, power) = archimedean_symbol(spec.group, spec.realization)?;
            let xf = x.to_f64().expect("finite rational");
            let power = power.to_f64().expect("small exponent");
            Ok(LocalValue::Real(xf.powf(power) * bessel_k(order, xf)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalWhittakerValue {
    pub group: ExceptionalGroup,
    pub node: usize,
    pub m: i64,
    pub prefactor_label: String,
    #[serde(serialize_with = "ser_rat")]
    pub arithmetic_part: Rational,
    pub sigma_index: u32,
    #[serde(serialize_with = "ser_order")]
    pub bessel_order: BesselOrder,
    #[serde(serialize_with = "ser_rat")]
    pub bessel_power: Rational,
}

fn ser_rat<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

fn ser_order<S: Serializer>(o: &BesselOrder, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(&o.to_rational()))
}

/// (prefactor, sigma index, Bessel order, power of |m|) of the degenerate Whittaker
/// vector at s = 3/2 charged on a single node.
fn global_data(group: ExceptionalGroup, node: usize) -> Result<(&'static str, u32, BesselOrder, Rational)> {
    use ExceptionalGroup::*;
    Ok(match (group, node) {
        (E6, 1) => ("2/ξ(3)", 2, BesselOrder::integer(1), int(-1)),
        (E6, 2) => ("2/ξ(3)", 1, BesselOrder::from_twice(1), rat(-1, 2)),
        (E7, 7) => ("2/ξ(4)", 3, BesselOrder::from_twice(3), rat(-3, 2)),
        (E7, 1) => ("2/ξ(3)", 2, BesselOrder::integer(1), int(-1)),
        (E8, 8) => ("2ξ(4)/(ξ(3)ξ(5))", 4, BesselOrder::integer(2), int(-2)),
        _ => return domain(format!("no degenerate Whittaker formula for {group} node {node}")),
    })
}

/// The node whose degenerate Whittaker vector the realization describes.
pub fn node_of(group: ExceptionalGroup, realization: Realization) -> Result<usize> {
    use ExceptionalGroup::*;
    use Realization::*;
    check_pair(group, realization)?;
    Ok(match (group, realization) {
        (E6, Abelian) => 1,
        (E6, Heisenberg) => 2,
        (E7, Abelian) => 7,
        (E7, Heisenberg) => 1,
        (E8, _) => 8,
    })
}

pub fn global_degenerate_whittaker(group: ExceptionalGroup, node: usize, m: i64) -> Result<GlobalWhittakerValue> {
    let (label, b, order, power) = global_data(group, node)?;
    if m < 1 {
        return domain(format!("charge m = {m} must be a positive integer"));
    }
    Ok(GlobalWhittakerValue {
        group,
        node,
        m,
        prefactor_label: label.to_string(),
        arithmetic_part: Rational::from(divisor_sigma(b, m)?),
        sigma_index: b,
        bessel_order: order,
        bessel_power: power,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub pair: String,
    pub m: i64,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    pub detail: String,
}

/// Exact check of the Euler factorization for one charge: the finite-place product
/// against m^a sigma_b(m), and the archimedean symbols against the global formula.
pub fn verify_factorization(group: ExceptionalGroup, realization: Realization, m: i64) -> Result<FactorizationReport> {
    check_pair(group, realization)?;
    if m < 1 {
        return domain(format!("charge m = {m} must be a positive integer"));
    }
    let x = int(m);
    let mut lhs = Rational::one();
    for (p, _) in factorize(m as u64) {
        let spec = SphericalSpec::new(group, realization, PAdicPlace::Finite(p))?;
        lhs *= local_spherical(&spec, &x)?.exact().expect("finite places are exact").clone();
    }
    let (a, _) = finite_exponents(group, realization)?;
    let g = global_degenerate_whittaker(group, node_of(group, realization)?, m)?;
    let rhs = rat_pow(&x, a) * &g.arithmetic_part;
    let (order, power) = archimedean_symbol(group, realization)?;
    let mut problems = Vec::new();
    if lhs != rhs {
        problems.push(format!("finite product {} != m^{a} sigma_{}(m) = {}", fmt_rat(&lhs), g.sigma_index, fmt_rat(&rhs)));
    }
    if order != g.bessel_order {
        problems.push(format!(
            "Bessel order {} != {}",
            fmt_rat(&order.to_rational()),
            fmt_rat(&g.bessel_order.to_rational())
        ));
    }
    if &power + int(a) != g.bessel_power {
        problems.push(format!(
            "m-power {} + {a} != {}",
            fmt_rat(&power),
            fmt_rat(&g.bessel_power)
        ));
    }
    let pass = problems.is_empty();
    Ok(FactorizationReport {
        pair: format!("{group}/{realization}"),
        m,
        lhs: fmt_rat(&lhs),
        rhs: fmt_rat(&rhs),
        pass,
        detail: if pass {
            format!("K_{} with |m|^{}", fmt_rat(&order.to_rational()), fmt_rat(&g.bessel_power))
        } else {
            problems.join("; ")
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExceptionalGroup::*;

    fn fin(g: ExceptionalGroup, r: Realization, p: u64) -> SphericalSpec {
        SphericalSpec::new(g, r, PAdicPlace::Finite(p)).unwrap()
    }

    #[test]
    fn local_examples() {
        let v = local_spherical(&fin(E6, Realization::Abelian, 2), &int(2)).unwrap();
        assert_eq!(v, LocalValue::Exact(int(5)));
        let v = local_spherical(&fin(E8, Realization::Heisenberg, 2), &int(2)).unwrap();
        assert_eq!(v, LocalValue::Exact(int(544)));
        let v = local_spherical(&fin(E7, Realization::Abelian, 5), &int(3)).unwrap();
        assert_eq!(v, LocalValue::Exact(int(1)));
        assert!(matches!(
            SphericalSpec::new(E8, Realization::Abelian, PAdicPlace::Infinity),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn casselman_shalika_examples() {
        let s = int(2);
        let one = Rational::one();
        let p4 = rat(1, 16);
        assert_eq!(cs_whittaker_sl2(&s, &one, &one, 2).unwrap(), LocalValue::Exact(&one - &p4));
        assert_eq!(cs_whittaker_sl2(&s, &one, &rat(1, 2), 2).unwrap(), LocalValue::Exact(Rational::zero()));
        let got = cs_whittaker_sl2(&s, &one, &int(2), 2).unwrap();
        assert_eq!(got, LocalValue::Exact((&one - &p4) * (&one + rat(1, 8))));
        assert!(cs_whittaker_sl2(&rat(1, 2), &one, &one, 3).is_err());
        assert!(matches!(cs_whittaker_sl2(&rat(1, 3), &one, &one, 3).unwrap(), LocalValue::Real(_)));
    }

    #[test]
    fn factorization_examples() {
        let r = verify_factorization(E6, Realization::Abelian, 6).unwrap();
        assert!(r.pass && r.lhs == "50", "{r:?}");
        let r = verify_factorization(E8, Realization::Heisenberg, 2).unwrap();
        assert!(r.pass && r.lhs == "544", "{r:?}");
        let r = verify_factorization(E6, Realization::Abelian, 1).unwrap();
        assert!(r.pass && r.lhs == "1");
        let g = global_degenerate_whittaker(E7, 7, 1).unwrap();
        assert_eq!((g.arithmetic_part, g.bessel_order.twice(), g.bessel_power), (int(1), 3, rat(-3, 2)));
        assert_eq!(global_degenerate_whittaker(E8, 8, 2).unwrap().arithmetic_part, int(17));
        assert!(global_degenerate_whittaker(E6, 3, 1).is_err());
    }
}
