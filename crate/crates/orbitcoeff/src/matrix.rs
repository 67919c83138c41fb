//! Dense square matrices over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{domain, Result};
use crate::exactnum::{fmt_rat, int, parse_rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zero(n: usize) -> Self {
        RationalMatrix { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Matrix unit E_{ij} with 0-based indices.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.data[i * n + j] = Rational::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return domain("matrix is not square");
        }
        Ok(RationalMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix is not square");
        RationalMatrix { n, data: rows.iter().flat_map(|r| r.iter().map(|&v| int(v))).collect() }
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zero(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    /// Parses "a,b;c,d" (rows separated by ';').
    pub fn parse(spec: &str) -> Result<Self> {
        let rows = spec
            .split(';')
            .map(|row| row.split(',').map(parse_rat).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalMatrix { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn determinant(&self) -> Rational {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if piv != col {
                for k in 0..n {
                    a.swap(piv * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                let f = &a[r * n + col] / &p;
                if f.is_zero() {
                    continue;
                }
                for k in col..n {
                    let v = &a[col * n + k] * &f;
                    a[r * n + k] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return domain("matrix is not invertible");
            };
            if piv != col {
                for k in 0..n {
                    a.swap(piv * n + k, col * n + k);
                    inv.swap(piv * n + k, col * n + k);
                }
            }
            let p = a[col * n + col].clone();
            for k in 0..n {
                a[col * n + k] /= &p;
                inv[col * n + k] /= &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for k in 0..n {
                    let va = &a[col * n + k] * &f;
                    a[r * n + k] -= va;
                    let vi = &inv[col * n + k] * &f;
                    inv[r * n + k] -= vi;
                }
            }
        }
        Ok(RationalMatrix { n, data: inv })
    }

    /// Rank via fraction-free (Bareiss) elimination on an integer rescaling.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut a: Vec<BigInt> = Vec::with_capacity(n * n);
        for row in self.data.chunks(n) {
            let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            a.extend(row.iter().map(|v| v.numer() * (&l / v.denom())));
        }
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| !a[r * n + col].is_zero()) else {
                continue;
            };
            if piv != rank {
                for k in 0..n {
                    a.swap(piv * n + k, rank * n + k);
                }
            }
            let p = a[rank * n + col].clone();
            for r in rank + 1..n {
                let f = a[r * n + col].clone();
                for k in 0..n {
                    let v = (&a[r * n + k] * &p - &a[rank * n + k] * &f) / &prev;
                    a[r * n + k] = v;
                }
            }
            prev = p.abs();
            if prev.is_zero() {
                prev = BigInt::one();
            }
            rank += 1;
            if rank == n {
                break;
            }
        }
        rank
    }

    /// Basis of the right kernel {v : A v = 0}.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let n = self.n;
        let mut a = self.rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let pv = a[r][c].clone();
            for k in 0..n {
                a[r][k] = &a[r][k] / &pv;
            }
            for i in 0..n {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for k in 0..n {
                        let v = &a[r][k] * &f;
                        a[i][k] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); n];
                v[f] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[row][f].clone();
                }
                v
            })
            .collect()
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        let n = cols.len();
        if cols.iter().any(|c| c.len() != n) {
            return domain("column set does not form a square matrix");
        }
        let mut m = Self::zero(n);
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn to_spec(&self) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl<'a> Mul for &'a RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        let n = self.n;
        assert_eq!(n, rhs.n, "size mismatch");
        let mut out = RationalMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add for &'a RationalMatrix {
    type Output = RationalMatrix;
    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        RationalMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub for &'a RationalMatrix {
    type Output = RationalMatrix;
    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        RationalMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.n))?;
        for row in self.rows() {
            seq.serialize_element(&row.iter().map(fmt_rat).collect::<Vec<_>>())?;
        }
        seq.end()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_spec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_inverse() {
        let m = RationalMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        assert!(m.determinant().is_zero());
        let g = RationalMatrix::from_i64(&[&[2, 1, 0], &[0, 1, 0], &[1, 0, 1]]);
        let gi = g.inverse().unwrap();
        assert!((&g * &gi).is_identity());
        assert_eq!(g.determinant(), int(2));
        assert!(m.inverse().is_err());
    }

    #[test]
    fn kernel_basis() {
        let m = RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let k = m.kernel();
        assert_eq!(k, vec![vec![int(1), int(0), int(0)]]);
    }

    #[test]
    fn parse_rows() {
        let m = RationalMatrix::parse("0,1/2;0,0").unwrap();
        assert_eq!(m.get(0, 1), &crate::exactnum::rat(1, 2));
        assert!(RationalMatrix::parse("1,2;3").is_err());
        assert_eq!(m.to_spec(), "0,1/2;0,0");
    }
}
