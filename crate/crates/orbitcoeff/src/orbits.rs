//! Nilpotent orbits of sl(n) labelled by partitions.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::exactnum::{int, Rational};
use crate::matrix::RationalMatrix;

/// Matrix position, 1-indexed.
pub type Pos = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return domain("partition parts must be positive");
        }
        if parts.is_empty() {
            return domain("empty partition");
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn of(parts: &[usize]) -> Self {
        Partition::new(parts.to_vec()).expect("valid partition")
    }

    pub fn trivial(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn conjugate(&self) -> Partition {
        let m = self.parts[0];
        let parts = (1..=m).map(|k| self.parts.iter().filter(|&&p| p >= k).count()).collect();
        Partition { parts }
    }

    /// All partitions of n in reverse lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(n, n, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = if body.contains(',') {
            body.split(',').map(|t| t.trim().parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>()
        } else {
            body.chars().map(|c| c.to_string().parse::<usize>()).collect()
        }
        .map_err(|_| Error::Domain(format!("cannot parse partition {s:?}")))?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The sorted H-eigenvalues: the multiset of {p-1, p-3, ..., 1-p} over parts p, descending.
pub fn h_eigenvalues(lambda: &Partition) -> Vec<i64> {
    let mut h: Vec<i64> = lambda
        .parts()
        .iter()
        .flat_map(|&p| (0..p).map(move |i| p as i64 - 1 - 2 * i as i64))
        .collect();
    h.sort_unstable_by(|a, b| b.cmp(a));
    h
}

pub fn weighted_dynkin(lambda: &Partition) -> Vec<i64> {
    let h = h_eigenvalues(lambda);
    h.windows(2).map(|w| w[0] - w[1]).collect()
}

/// Grading of gl(n) positions by ad(H); the diagonal sits in piece 0.
pub fn grading_pieces(lambda: &Partition) -> BTreeMap<i64, BTreeSet<Pos>> {
    let h = h_eigenvalues(lambda);
    let n = h.len();
    let mut pieces: BTreeMap<i64, BTreeSet<Pos>> = BTreeMap::new();
    for j in 0..n {
        for k in 0..n {
            pieces.entry(h[j] - h[k]).or_default().insert((j + 1, k + 1));
        }
    }
    pieces
}

/// Positions spanning V = U_{i>=2}.
pub fn v_mask(lambda: &Partition) -> BTreeSet<Pos> {
    grading_pieces(lambda)
        .into_iter()
        .filter(|(i, _)| *i >= 2)
        .flat_map(|(_, s)| s)
        .collect()
}

/// dim O = dim g - dim g(0) - dim g(1), cross-checked against n^2 - sum (lambda^T_j)^2.
pub fn orbit_dimension(lambda: &Partition) -> Result<usize> {
    let n = lambda.n();
    let pieces = grading_pieces(lambda);
    let size = |i: i64| pieces.get(&i).map_or(0, |s| s.len());
    // g(0) of sl(n) drops the trace direction
    let graded = (n * n - 1) - (size(0) - 1) - size(1);
    let conj = lambda.conjugate();
    let by_conjugate = n * n - conj.parts().iter().map(|c| c * c).sum::<usize>();
    if graded != by_conjugate {
        return Err(Error::Invariant(format!(
            "dimension of {lambda}: grading gives {graded}, conjugate partition gives {by_conjugate}"
        )));
    }
    Ok(graded)
}

pub fn dominance_leq(lambda: &Partition, mu: &Partition) -> Result<bool> {
    if lambda.n() != mu.n() {
        return domain(format!("{lambda} and {mu} partition different integers"));
    }
    let len = lambda.parts().len().max(mu.parts().len());
    let (mut a, mut b) = (0usize, 0usize);
    for k in 0..len {
        a += lambda.parts().get(k).copied().unwrap_or(0);
        b += mu.parts().get(k).copied().unwrap_or(0);
        if a > b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cover relations (lower, upper) of the dominance order on partitions of n.
pub fn hasse_cover_edges(n: usize) -> Result<Vec<(Partition, Partition)>> {
    if !(2..=8).contains(&n) {
        return domain(format!("hasse_cover_edges supports 2 <= n <= 8, got {n}"));
    }
    let all = Partition::all(n);
    let lt = |a: &Partition, b: &Partition| a != b && dominance_leq(a, b).unwrap();
    let mut edges = Vec::new();
    for lo in &all {
        for hi in &all {
            if lt(lo, hi) && !all.iter().any(|m| lt(lo, m) && lt(m, hi)) {
                edges.push((lo.clone(), hi.clone()));
            }
        }
    }
    edges.sort();
    Ok(edges)
}

/// Ranks of X^0, X^1, ..., X^n; fails if X is not nilpotent.
fn power_ranks(x: &RationalMatrix) -> Result<Vec<usize>> {
    let n = x.size();
    let mut ranks = vec![n];
    let mut p = RationalMatrix::identity(n);
    for k in 1..=n {
        p = &p * x;
        let r = p.rank();
        if r == *ranks.last().unwrap() && r > 0 {
            return domain(format!("matrix is not nilpotent: rank(X^{k}) = rank(X^{}) = {r}", k - 1));
        }
        ranks.push(r);
        if r == 0 {
            break;
        }
    }
    if *ranks.last().unwrap() != 0 {
        return domain(format!("matrix is not nilpotent: X^{n} != 0"));
    }
    Ok(ranks)
}

pub fn jordan_type(x: &RationalMatrix) -> Result<Partition> {
    let ranks = power_ranks(x)?;
    // number of blocks of size >= k is r_{k-1} - r_k
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    Partition::new(at_least).map(|p| p.conjugate())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JMTriple {
    #[serde(rename = "X")]
    pub x: RationalMatrix,
    #[serde(rename = "H")]
    pub h: RationalMatrix,
    #[serde(rename = "Y")]
    pub y: RationalMatrix,
}

impl JMTriple {
    pub fn check(&self) -> bool {
        self.x.commutator(&self.y) == self.h
            && self.h.commutator(&self.x) == self.x.scale(&int(2))
            && self.h.commutator(&self.y) == self.y.scale(&int(-2))
    }
}

fn span_rank(vectors: &[Vec<Rational>], n: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    // rank of the n x k matrix padded to square
    let size = n.max(vectors.len());
    let mut m = RationalMatrix::zero(size);
    for (j, v) in vectors.iter().enumerate() {
        for (i, e) in v.iter().enumerate() {
            m.set(i, j, e.clone());
        }
    }
    m.rank()
}

/// Jordan chains as (top vector, length), longest first.
fn jordan_chains(x: &RationalMatrix) -> Result<Vec<(Vec<Rational>, usize)>> {
    let n = x.size();
    let ranks = power_ranks(x)?;
    let index = ranks.len() - 1;
    let kernels: Vec<Vec<Vec<Rational>>> = (0..=index).map(|s| x.pow(s as u32).kernel()).collect();
    let mut chains: Vec<(Vec<Rational>, usize)> = Vec::new();
    for s in (1..=index).rev() {
        let mut span: Vec<Vec<Rational>> = kernels[s - 1].clone();
        for (top, len) in &chains {
            let mut v = top.clone();
            for _ in 0..(len - s) {
                v = x.apply(&v);
            }
            span.push(v);
        }
        let mut r = span_rank(&span, n);
        for cand in &kernels[s] {
            span.push(cand.clone());
            let r2 = span_rank(&span, n);
            if r2 > r {
                r = r2;
                chains.push((cand.clone(), s));
            } else {
                span.pop();
            }
        }
    }
    Ok(chains)
}

/// A Jacobson-Morozov triple through X built from a Jordan basis.
pub fn jm_triple(x: &RationalMatrix) -> Result<JMTriple> {
    let n = x.size();
    let chains = jordan_chains(x)?;
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut h_std = vec![Rational::zero(); n];
    let mut y_std = RationalMatrix::zero(n);
    for (top, k) in &chains {
        let start = cols.len();
        let mut block = vec![top.clone()];
        for _ in 1..*k {
            let next = x.apply(block.last().unwrap());
            block.push(next);
        }
        // b_i = X^{k-i} v so that X b_i = b_{i-1}
        block.reverse();
        cols.extend(block);
        for i in 0..*k {
            h_std[start + i] = int(*k as i64 - 1 - 2 * i as i64);
            if i + 1 < *k {
                let c = (i as i64 + 1) * (*k as i64 - 1 - i as i64);
                y_std.set(start + i + 1, start + i, int(c));
            }
        }
    }
    let p = RationalMatrix::from_columns(&cols)?;
    let pinv = p.inverse().map_err(|_| Error::Invariant("Jordan basis is singular".into()))?;
    let h = &(&p * &RationalMatrix::diagonal(&h_std)) * &pinv;
    let y = &(&p * &y_std) * &pinv;
    let triple = JMTriple { x: x.clone(), h, y };
    if !triple.check() {
        return Err(Error::Invariant("constructed triple fails the sl(2) relations".into()));
    }
    Ok(triple)
}

/// Block-diagonal nilpotent with superdiagonal Jordan blocks of the given sizes.
pub fn jordan_representative(lambda: &Partition) -> RationalMatrix {
    let n = lambda.n();
    let mut m = RationalMatrix::zero(n);
    let mut start = 0;
    for &p in lambda.parts() {
        for i in 0..p.saturating_sub(1) {
            m.set(start + i, start + i + 1, Rational::one());
        }
        start += p;
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub partition: Partition,
    pub bala_carter: String,
    pub dimension: usize,
    pub dynkin_weights: Vec<i64>,
    pub stabilizer_type: String,
    pub v_mask: BTreeSet<Pos>,
}

struct CatalogRow {
    parts: &'static [usize],
    bala_carter: &'static str,
    stabilizer: &'static str,
    dimension: usize,
    weights: &'static [i64],
}

const SL3_ROWS: &[CatalogRow] = &[
    CatalogRow { parts: &[3], bala_carter: "A2", stabilizer: "1", dimension: 6, weights: &[2, 2] },
    CatalogRow { parts: &[2, 1], bala_carter: "A1", stabilizer: "T1", dimension: 4, weights: &[1, 1] },
    CatalogRow { parts: &[1, 1, 1], bala_carter: "0", stabilizer: "A2", dimension: 0, weights: &[0, 0] },
];

const SL4_ROWS: &[CatalogRow] = &[
    CatalogRow { parts: &[4], bala_carter: "A3", stabilizer: "1", dimension: 12, weights: &[2, 2, 2] },
    CatalogRow { parts: &[3, 1], bala_carter: "A2", stabilizer: "T1", dimension: 10, weights: &[2, 0, 2] },
    CatalogRow { parts: &[2, 2], bala_carter: "2A1", stabilizer: "A1", dimension: 8, weights: &[0, 2, 0] },
    CatalogRow { parts: &[2, 1, 1], bala_carter: "A1", stabilizer: "A1xT1", dimension: 6, weights: &[1, 0, 1] },
    CatalogRow { parts: &[1, 1, 1, 1], bala_carter: "0", stabilizer: "A3", dimension: 0, weights: &[0, 0, 0] },
];

/// Orbit records for sl(3) or sl(4); labels are stored, dimensions and diagrams computed.
pub fn orbit_catalog(n: usize) -> Result<Vec<OrbitRecord>> {
    let rows = match n {
        3 => SL3_ROWS,
        4 => SL4_ROWS,
        _ => return Err(Error::Unsupported(format!("orbit catalog only for n = 3, 4 (got {n})"))),
    };
    rows.iter()
        .map(|row| {
            let partition = Partition::of(row.parts);
            let dimension = orbit_dimension(&partition)?;
            let dynkin_weights = weighted_dynkin(&partition);
            if dimension != row.dimension || dynkin_weights != row.weights {
                return Err(Error::Invariant(format!("computed data for {partition} disagrees with the table")));
            }
            Ok(OrbitRecord {
                v_mask: v_mask(&partition),
                partition,
                bala_carter: row.bala_carter.to_string(),
                dimension,
                dynkin_weights,
                stabilizer_type: row.stabilizer.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExceptionalGroup {
    E6,
    E7,
    E8,
}

impl fmt::Display for ExceptionalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ExceptionalGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e6" => Ok(ExceptionalGroup::E6),
            "e7" => Ok(ExceptionalGroup::E7),
            "e8" => Ok(ExceptionalGroup::E8),
            _ => domain(format!("unknown group {s:?} (expected e6, e7 or e8)")),
        }
    }
}

/// GK dimension of the minimal representation, i.e. half the minimal orbit dimension,
/// computed from the Heisenberg grading dim g - dim g(0) - dim g(1).
pub fn gkdim_minimal(group: ExceptionalGroup) -> Result<usize> {
    let (dim_g, dim_g0, dim_g1, expected) = match group {
        // g(0) = sl(6)+gl(1), g(1) = 20
        ExceptionalGroup::E6 => (78, 36, 20, 11),
        // g(0) = so(6,6)+gl(1), g(1) = 32
        ExceptionalGroup::E7 => (133, 67, 32, 17),
        // g(0) = e7+gl(1), g(1) = 56
        ExceptionalGroup::E8 => (248, 134, 56, 29),
    };
    let orbit = dim_g - dim_g0 - dim_g1;
    if orbit % 2 != 0 || orbit / 2 != expected {
        return Err(Error::Invariant(format!("{group}: grading gives orbit dimension {orbit}")));
    }
    Ok(expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan_type(&RationalMatrix::zero(4)).unwrap(), Partition::of(&[1, 1, 1, 1]));
        let mut x = RationalMatrix::zero(4);
        x.set(0, 1, int(1));
        x.set(2, 3, int(1));
        assert_eq!(jordan_type(&x).unwrap(), Partition::of(&[2, 2]));
        let full = jordan_representative(&Partition::of(&[4]));
        assert_eq!(jordan_type(&full).unwrap(), Partition::of(&[4]));
        assert!(jordan_type(&RationalMatrix::identity(2)).is_err());
    }

    #[test]
    fn table_one() {
        assert_eq!(weighted_dynkin(&Partition::of(&[2, 2])), vec![0, 2, 0]);
        assert_eq!(weighted_dynkin(&Partition::of(&[3, 1])), vec![2, 0, 2]);
        assert_eq!(weighted_dynkin(&Partition::of(&[1, 1, 1, 1])), vec![0, 0, 0]);
        assert_eq!(orbit_dimension(&Partition::of(&[2, 2])).unwrap(), 8);
        assert_eq!(orbit_dimension(&Partition::of(&[4])).unwrap(), 12);
        assert_eq!(orbit_dimension(&Partition::of(&[1, 1, 1, 1])).unwrap(), 0);
        let v: Vec<Pos> = v_mask(&Partition::of(&[2, 1, 1])).into_iter().collect();
        assert_eq!(v, vec![(1, 4)]);
        let v: Vec<Pos> = v_mask(&Partition::of(&[2, 2])).into_iter().collect();
        assert_eq!(v, vec![(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert!(v_mask(&Partition::of(&[1, 1, 1, 1])).is_empty());
    }

    #[test]
    fn dominance_examples() {
        let p = |s: &[usize]| Partition::of(s);
        assert!(dominance_leq(&p(&[2, 1, 1]), &p(&[2, 2])).unwrap());
        assert!(dominance_leq(&p(&[2, 2]), &p(&[3, 1])).unwrap());
        assert!(!dominance_leq(&p(&[3, 1]), &p(&[2, 2])).unwrap());
        assert!(!dominance_leq(&p(&[3, 1, 1, 1]), &p(&[2, 2, 2])).unwrap());
        assert!(!dominance_leq(&p(&[2, 2, 2]), &p(&[3, 1, 1, 1])).unwrap());
        assert!(dominance_leq(&p(&[2, 2]), &p(&[3])).is_err());
    }

    #[test]
    fn hasse_chains() {
        assert_eq!(hasse_cover_edges(4).unwrap().len(), 4);
        assert_eq!(hasse_cover_edges(3).unwrap().len(), 2);
        assert_eq!(
            hasse_cover_edges(2).unwrap(),
            vec![(Partition::of(&[1, 1]), Partition::of(&[2]))]
        );
        assert!(hasse_cover_edges(9).is_err());
    }

    #[test]
    fn jm_examples() {
        let t = jm_triple(&RationalMatrix::unit(2, 0, 1)).unwrap();
        assert_eq!(t.h, RationalMatrix::from_i64(&[&[1, 0], &[0, -1]]));
        assert_eq!(t.y, RationalMatrix::unit(2, 1, 0));
        let t = jm_triple(&RationalMatrix::unit(4, 0, 1)).unwrap();
        assert!(t.check());
        let mut eig: Vec<i64> = (0..4).map(|i| t.h.get(i, i).to_integer().try_into().unwrap()).collect();
        eig.sort();
        assert_eq!(eig, vec![-1, 0, 0, 1]);
    }

    #[test]
    fn catalogs() {
        let c4 = orbit_catalog(4).unwrap();
        let dims: Vec<usize> = c4.iter().map(|r| r.dimension).collect();
        assert_eq!(dims, vec![12, 10, 8, 6, 0]);
        assert_eq!(c4[2].stabilizer_type, "A1");
        let c3 = orbit_catalog(3).unwrap();
        assert_eq!(c3[1].dimension, 4);
        assert!(orbit_catalog(5).is_err());
        assert_eq!(gkdim_minimal(ExceptionalGroup::E7).unwrap(), 17);
    }
}
