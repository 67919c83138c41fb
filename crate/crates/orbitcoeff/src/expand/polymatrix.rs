//! Square matrices with Laurent polynomial entries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::poly::Poly;
use crate::error::{domain, Result};
use crate::exactnum::Rational;
use crate::matrix::RationalMatrix;
use crate::orbits::Pos;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyMatrix {
    n: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(n: usize) -> Self {
        PolyMatrix { n, data: vec![Poly::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Poly::one();
        }
        m
    }

    /// Identity plus `entry` at the 1-indexed position.
    pub fn elementary(n: usize, pos: Pos, entry: Poly) -> Self {
        let mut m = Self::identity(n);
        m.set(pos.0 - 1, pos.1 - 1, entry);
        m
    }

    /// Unipotent element I + sum of var * E_pos.
    pub fn unipotent(n: usize, coords: &[(Pos, Poly)]) -> Self {
        let mut m = Self::identity(n);
        for ((i, j), p) in coords {
            m.set(i - 1, j - 1, p.clone());
        }
        m
    }

    pub fn from_rational(r: &RationalMatrix) -> Self {
        let n = r.size();
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, Poly::constant(r.get(i, j).clone()));
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rational(&RationalMatrix::from_i64(rows))
    }

    /// Rows separated by ';', entries by ','; entries are polynomials.
    pub fn parse(spec: &str) -> Result<Self> {
        let rows: Vec<Vec<Poly>> = spec
            .split(';')
            .map(|r| r.split(',').map(Poly::parse).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return domain(format!("matrix '{spec}' is not square"));
        }
        Ok(PolyMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.data[i * self.n + j] = p;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        self.data.iter().enumerate().map(move |(k, p)| (k / self.n, k % self.n, p))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.data.iter().flat_map(|p| p.vars()).collect()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.data.iter().any(|p| p.contains(v))
    }

    pub fn to_rational(&self) -> Option<RationalMatrix> {
        let rows: Option<Vec<Vec<Rational>>> =
            self.data.chunks(self.n).map(|r| r.iter().map(Poly::as_constant).collect()).collect();
        rows.and_then(|r| RationalMatrix::from_rows(r).ok())
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Result<Poly>) -> Result<Self> {
        Ok(PolyMatrix { n: self.n, data: self.data.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn substitute(&self, v: &str, value: &Poly) -> Result<Self> {
        self.map(|p| p.substitute(v, value))
    }

    pub fn substitute_all(&self, map: &BTreeMap<String, Poly>) -> Result<Self> {
        self.map(|p| p.substitute_all(map))
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        PolyMatrix { n: self.n, data: self.data.iter().map(|p| p.rename(map)).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.n);
        for (i, j, p) in self.entries() {
            t.set(j, i, p.clone());
        }
        t
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n - 1;
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let si = if i < row { i } else { i + 1 };
                let sj = if j < col { j } else { j + 1 };
                m.set(i, j, self.get(si, sj).clone());
            }
        }
        m
    }

    /// Laplace expansion; sizes here are at most 4.
    pub fn determinant(&self) -> Poly {
        match self.n {
            0 => Poly::one(),
            1 => self.data[0].clone(),
            _ => {
                let mut acc = Poly::zero();
                for j in 0..self.n {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let t = a * &self.minor(0, j).determinant();
                    acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
                }
                acc
            }
        }
    }

    /// Inverse through the adjugate; the determinant must be a monomial.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.determinant();
        if d.is_zero() {
            return domain("polynomial matrix is singular");
        }
        let dinv = d.inverse()?;
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let c = self.minor(j, i).determinant();
                let c = if (i + j) % 2 == 0 { c } else { -&c };
                out.set(i, j, &c * &dinv);
            }
        }
        Ok(out)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.data.chunks(self.n).map(|r| r.iter().map(|p| p.to_string()).collect()).collect()
    }

    pub fn to_spec(&self) -> String {
        self.to_strings().iter().map(|r| r.join(",")).collect::<Vec<_>>().join(";")
    }
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        let n = self.n;
        assert_eq!(n, rhs.n, "size mismatch");
        let mut out = PolyMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let v = &out.data[i * n + j] + &(a * b);
                        out.data[i * n + j] = v;
                    }
                }
            }
        }
        out
    }
}

impl Serialize for PolyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.n))?;
        for row in self.to_strings() {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_spec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_levi_family() {
        let l = PolyMatrix::parse("0,1,0,0;1,a,0,0;0,0,0,1;0,0,1,b").unwrap();
        assert_eq!(l.determinant(), Poly::one());
        let li = l.inverse().unwrap();
        assert!((&l * &li).is_identity());
        let l = PolyMatrix::parse("1,m3/m1',0,0;0,1,0,0;0,0,1,0;0,0,-m2/m1',1").unwrap();
        assert!((&l * &l.inverse().unwrap()).is_identity());
    }
}
