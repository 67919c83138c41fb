//! Multivariate Laurent polynomials over Q with named symbols.

use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, Error, Result};
use crate::exactnum::{fmt_rat, Rational};

/// Sorted (symbol, exponent) pairs with nonzero exponents.
pub type Monomial = Vec<(String, i32)>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m: BTreeMap<String, i32> = a.iter().cloned().collect();
    for (v, e) in b {
        *m.entry(v.clone()).or_insert(0) += e;
    }
    m.into_iter().filter(|(_, e)| *e != 0).collect()
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(Rational::one(), vec![(name.to_string(), 1)])
    }

    pub fn monomial(c: Rational, mut m: Monomial) -> Self {
        m.retain(|(_, e)| *e != 0);
        m.sort();
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_monomial(&self) -> Option<(Rational, Monomial)> {
        if self.terms.len() != 1 {
            return None;
        }
        self.terms.iter().next().map(|(m, c)| (c.clone(), m.clone()))
    }

    /// Single symbol with coefficient one.
    pub fn as_var(&self) -> Option<String> {
        match self.as_monomial() {
            Some((c, m)) if c.is_one() && m.len() == 1 && m[0].1 == 1 => Some(m[0].0.clone()),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.terms.keys().any(|m| m.iter().any(|(x, _)| x == v))
    }

    /// (min, max) exponent of `v` over all terms, (0, 0) when absent.
    pub fn degree_range(&self, v: &str) -> (i32, i32) {
        let mut lo = 0;
        let mut hi = 0;
        for m in self.terms.keys() {
            let e = m.iter().find(|(x, _)| x == v).map_or(0, |(_, e)| *e);
            lo = lo.min(e);
            hi = hi.max(e);
        }
        (lo, hi)
    }

    /// Coefficient of v^k as a polynomial in the remaining symbols.
    pub fn coeff(&self, v: &str, k: i32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.iter().find(|(x, _)| x == v).map_or(0, |(_, e)| *e);
            if e == k {
                let rest: Monomial = m.iter().filter(|(x, _)| x != v).cloned().collect();
                out.terms.insert(rest, c.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Inverse of a monomial.
    pub fn inverse(&self) -> Result<Poly> {
        let (c, m) = self
            .as_monomial()
            .ok_or_else(|| Error::Unsupported(format!("cannot invert non-monomial {self}")))?;
        Ok(Poly::monomial(c.recip(), m.into_iter().map(|(v, e)| (v, -e)).collect()))
    }

    /// Replace `v` by `value`; negative powers of `v` require a monomial value.
    pub fn substitute(&self, v: &str, value: &Poly) -> Result<Poly> {
        let (lo, hi) = self.degree_range(v);
        if lo == 0 && hi == 0 {
            return Ok(self.clone());
        }
        let inv = if lo < 0 { Some(value.inverse()?) } else { None };
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.iter().find(|(x, _)| x == v).map_or(0, |(_, e)| *e);
            let rest = Poly::monomial(c.clone(), m.iter().filter(|(x, _)| x != v).cloned().collect());
            let factor = if e >= 0 { value.pow(e as u32) } else { inv.as_ref().unwrap().pow((-e) as u32) };
            out = &out + &(&rest * &factor);
        }
        Ok(out)
    }

    pub fn substitute_all(&self, map: &BTreeMap<String, Poly>) -> Result<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in m {
                let f = match map.get(v) {
                    Some(p) if *e >= 0 => p.pow(*e as u32),
                    Some(p) => p.inverse()?.pow((-e) as u32),
                    None => Poly::monomial(Rational::one(), vec![(v.clone(), *e)]),
                };
                t = &t * &f;
            }
            out = &out + &t;
        }
        Ok(out)
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let nm: Monomial = m.iter().map(|(v, e)| (map.get(v).cloned().unwrap_or_else(|| v.clone()), *e)).collect();
            out = &out + &Poly::monomial(c.clone(), nm);
        }
        out
    }

    pub fn parse(s: &str) -> Result<Poly> {
        let mut p = Parser { chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
        let out = p.expr()?;
        if p.pos != p.chars.len() {
            return domain(format!("unexpected input in polynomial '{s}'"));
        }
        Ok(out)
    }

    /// Evaluate to a rational with all symbols assigned.
    pub fn eval(&self, values: &BTreeMap<String, Rational>) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let x = values.get(v).ok_or_else(|| Error::Domain(format!("unbound symbol {v}")))?;
                if x.is_zero() && *e < 0 {
                    return domain(format!("division by zero symbol {v}"));
                }
                let f = crate::exactnum::rat_pow(x, *e as i64);
                t *= f;
            }
            acc += t;
        }
        Ok(acc)
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            let e = out.terms.entry(m.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out = &out + &Poly::monomial(ca * cb, mono_mul(ma, mb));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let num: Vec<String> = m
                .iter()
                .filter(|(_, e)| *e > 0)
                .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            let den: Vec<String> = m
                .iter()
                .filter(|(_, e)| *e < 0)
                .map(|(v, e)| if *e == -1 { v.clone() } else { format!("{v}^{}", -e) })
                .collect();
            let mut parts = Vec::new();
            if !a.is_one() || num.is_empty() {
                parts.push(fmt_rat(&a));
            }
            parts.extend(num);
            write!(f, "{}", parts.join("*"))?;
            for d in den {
                write!(f, "/{d}")?;
            }
        }
        Ok(())
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?.inverse()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = self.peek() == Some('-');
            if neg {
                self.pos += 1;
            }
            let k = self.digits()?;
            let k: u32 = k.parse().map_err(|_| Error::Domain("bad exponent".into()))?;
            let p = base.pow(k);
            return if neg { p.inverse() } else { Ok(p) };
        }
        Ok(base)
    }

    fn digits(&mut self) -> Result<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return domain("expected digits in polynomial");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return domain("unbalanced parenthesis in polynomial");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                Ok(Poly::constant(d.parse::<num_bigint::BigInt>().map(Rational::from_integer).unwrap()))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
                    self.pos += 1;
                }
                Ok(Poly::var(&self.chars[start..self.pos].iter().collect::<String>()))
            }
            _ => domain("unexpected end of polynomial"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn parse_roundtrip() {
        for s in ["x13 + u4*x12", "-m2/m1'", "m3 - m2*m5/m4'", "1/2*a^2 - 3", "0"] {
            let p = Poly::parse(s).unwrap();
            assert_eq!(Poly::parse(&p.to_string()).unwrap(), p, "{s} -> {p}");
        }
        assert_eq!(Poly::parse("(a+b)*(a-b)").unwrap(), Poly::parse("a^2 - b^2").unwrap());
        assert!(Poly::parse("1/(a+b)").is_err());
    }

    #[test]
    fn substitution() {
        let p = Poly::parse("m3 - m2*m5/m4'").unwrap();
        let q = p.substitute("m3", &Poly::parse("s + m2*m5/m4'").unwrap()).unwrap();
        assert_eq!(q, Poly::var("s"));
        let r = Poly::parse("x/m").unwrap().substitute("m", &Poly::parse("2*k").unwrap()).unwrap();
        assert_eq!(r, Poly::parse("1/2*x/k").unwrap());
        assert!(Poly::parse("x/m").unwrap().substitute("m", &Poly::parse("a+b").unwrap()).is_err());
        assert_eq!(Poly::parse("a*x^2 + x").unwrap().coeff("x", 2), Poly::var("a"));
        let vals = [("a".to_string(), rat(1, 2))].into_iter().collect();
        assert_eq!(Poly::parse("4*a^2 + 1").unwrap().eval(&vals).unwrap(), rat(2, 1));
    }
}
