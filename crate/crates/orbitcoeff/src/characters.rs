//! Character matrices on unipotent radicals and their Levi conjugation.

use num_traits::{One, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{domain, Error, Result};
use crate::exactnum::{fmt_rat, int, Rational};
use crate::matrix::RationalMatrix;
use crate::orbits::{jordan_type, v_mask, weighted_dynkin, Partition, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicDescriptor {
    pub n: usize,
    pub levi_roots: BTreeSet<usize>,
    pub radical_mask: BTreeSet<Pos>,
    pub abelianization_mask: BTreeSet<Pos>,
}

fn commutator_positions(mask: &BTreeSet<Pos>) -> BTreeSet<Pos> {
    let mut out = BTreeSet::new();
    for &(i, j) in mask {
        for &(j2, k) in mask {
            if j == j2 {
                out.insert((i, k));
            }
        }
    }
    out
}

impl ParabolicDescriptor {
    pub fn new(n: usize, levi_roots: BTreeSet<usize>, radical_mask: BTreeSet<Pos>) -> Result<Self> {
        if radical_mask.iter().any(|&(i, j)| i >= j || j > n || i == 0) {
            return domain("radical positions must be strictly upper triangular");
        }
        let comm = commutator_positions(&radical_mask);
        if !comm.is_subset(&radical_mask) {
            return domain("radical mask is not closed under brackets");
        }
        let abelianization_mask = radical_mask.difference(&comm).copied().collect();
        Ok(ParabolicDescriptor { n, levi_roots, radical_mask, abelianization_mask })
    }

    /// Maximal parabolic whose radical contains the simple root alpha.
    pub fn maximal(n: usize, alpha: usize) -> Result<Self> {
        if alpha == 0 || alpha >= n {
            return domain(format!("alpha{alpha} is not a simple root of sl({n})"));
        }
        let levi = (1..n).filter(|&a| a != alpha).collect();
        let mask = (1..=alpha).flat_map(|i| (alpha + 1..=n).map(move |j| (i, j))).collect();
        Self::new(n, levi, mask)
    }

    /// The subgroup V = U_{i>=2} of an orbit, with Levi from the zero nodes of its diagram.
    pub fn orbit_v(lambda: &Partition) -> Result<Self> {
        let levi = weighted_dynkin(lambda)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w == 0)
            .map(|(i, _)| i + 1)
            .collect();
        Self::new(lambda.n(), levi, v_mask(lambda))
    }

    /// Abelianization positions in row-major order; this is the charge slot order.
    pub fn slots(&self) -> Vec<Pos> {
        self.abelianization_mask.iter().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterMatrix {
    pub parabolic: ParabolicDescriptor,
    pub charges: BTreeMap<Pos, Rational>,
}

impl CharacterMatrix {
    pub fn new(parabolic: ParabolicDescriptor, charges: BTreeMap<Pos, Rational>) -> Result<Self> {
        if let Some(p) = charges.keys().find(|p| !parabolic.abelianization_mask.contains(p)) {
            return domain(format!("charge at {p:?} is outside U/[U,U]"));
        }
        let charges = charges.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(CharacterMatrix { parabolic, charges })
    }

    /// Charges given in slot order.
    pub fn from_slots(parabolic: ParabolicDescriptor, values: &[Rational]) -> Result<Self> {
        let slots = parabolic.slots();
        if slots.len() != values.len() {
            return domain(format!("expected {} charges, got {}", slots.len(), values.len()));
        }
        let charges = slots.into_iter().zip(values.iter().cloned()).collect();
        Self::new(parabolic, charges)
    }

    pub fn slot_values(&self) -> Vec<Rational> {
        self.parabolic
            .slots()
            .iter()
            .map(|p| self.charges.get(p).cloned().unwrap_or_else(Rational::zero))
            .collect()
    }

    pub fn charge(&self, p: Pos) -> Rational {
        self.charges.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_trivial(&self) -> bool {
        self.charges.is_empty()
    }

    /// The matrix M with charges at their positions.
    pub fn to_matrix(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zero(self.parabolic.n);
        for (&(i, j), v) in &self.charges {
            m.set(i - 1, j - 1, v.clone());
        }
        m
    }
}

impl Serialize for CharacterMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            pos: Pos,
            value: String,
        }
        let entries: Vec<Entry> = self
            .parabolic
            .slots()
            .into_iter()
            .map(|p| Entry { pos: p, value: fmt_rat(&self.charge(p)) })
            .collect();
        let mut st = s.serialize_struct("CharacterMatrix", 3)?;
        st.serialize_field("n", &self.parabolic.n)?;
        st.serialize_field("radical", &self.parabolic.radical_mask)?;
        st.serialize_field("charges", &entries)?;
        st.end()
    }
}

/// M' = (l^T)^{-1} M l^T, so that psi_{M'}(l u l^{-1}) = psi_M(u).
pub fn conjugate_character(m: &CharacterMatrix, l: &RationalMatrix) -> Result<CharacterMatrix> {
    let par = &m.parabolic;
    if l.size() != par.n {
        return domain("conjugator has the wrong size");
    }
    let lt = l.transpose();
    let lt_inv = lt.inverse().map_err(|_| Error::Domain("conjugator is not invertible".into()))?;
    let linv = l.inverse()?;
    let mp = &(&lt_inv * &m.to_matrix()) * &lt;
    let mut charges = BTreeMap::new();
    for i in 0..par.n {
        for j in 0..par.n {
            let v = mp.get(i, j);
            if v.is_zero() {
                continue;
            }
            let p = (i + 1, j + 1);
            if !par.abelianization_mask.contains(&p) {
                return domain(format!("conjugated character has support at {p:?} outside U/[U,U]"));
            }
            charges.insert(p, v.clone());
        }
    }
    let out = CharacterMatrix::new(par.clone(), charges)?;
    // pairing tr(M'^T l u l^-1) = tr(M^T u) on the radical basis
    let mpt = out.to_matrix().transpose();
    let mt = m.to_matrix().transpose();
    for &(i, j) in &par.radical_mask {
        let u = RationalMatrix::unit(par.n, i - 1, j - 1);
        let lhs = (&mpt * &(&(l * &u) * &linv)).trace();
        let rhs = (&mt * &u).trace();
        if lhs != rhs {
            return domain("conjugator does not normalize the radical".to_string());
        }
    }
    Ok(out)
}

/// The five V-subgroup shapes of SL(4) with their charge predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table2Shape {
    Regular,
    Subregular,
    NextToMinimal,
    Minimal,
    Trivial,
}

impl Table2Shape {
    pub const ALL: [Table2Shape; 5] = [
        Table2Shape::Regular,
        Table2Shape::Subregular,
        Table2Shape::NextToMinimal,
        Table2Shape::Minimal,
        Table2Shape::Trivial,
    ];

    pub fn partition(&self) -> Partition {
        match self {
            Table2Shape::Regular => Partition::of(&[4]),
            Table2Shape::Subregular => Partition::of(&[3, 1]),
            Table2Shape::NextToMinimal => Partition::of(&[2, 2]),
            Table2Shape::Minimal => Partition::of(&[2, 1, 1]),
            Table2Shape::Trivial => Partition::of(&[1, 1, 1, 1]),
        }
    }

    pub fn parabolic(&self) -> ParabolicDescriptor {
        ParabolicDescriptor::orbit_v(&self.partition()).expect("orbit V subgroup")
    }

    pub fn from_parabolic(p: &ParabolicDescriptor) -> Option<Self> {
        if p.n != 4 {
            return None;
        }
        Self::ALL.into_iter().find(|s| v_mask(&s.partition()) == p.radical_mask)
    }

    /// The condition on slot-ordered charges for the coefficient to be attached to the orbit.
    pub fn predicate(&self, m: &[Rational]) -> bool {
        match self {
            Table2Shape::Regular => !(&m[0] * &m[1] * &m[2]).is_zero(),
            Table2Shape::Subregular => !(&m[0] * &m[2] + &m[1] * &m[3]).is_zero(),
            Table2Shape::NextToMinimal => !(&m[0] * &m[3] - &m[1] * &m[2]).is_zero(),
            Table2Shape::Minimal => !m[0].is_zero(),
            Table2Shape::Trivial => true,
        }
    }
}

/// Jordan type of the nilpotent carrying the charges; on the five V-subgroup shapes the explicit
/// predicate is evaluated as well and must agree.
pub fn attach_orbit(m: &CharacterMatrix) -> Result<Partition> {
    let orbit = jordan_type(&m.to_matrix())?;
    if let Some(shape) = Table2Shape::from_parabolic(&m.parabolic) {
        let pred = shape.predicate(&m.slot_values());
        if pred != (orbit == shape.partition()) {
            return Err(Error::Invariant(format!(
                "shape {}: predicate {pred} but Jordan type {orbit}",
                shape.partition()
            )));
        }
    }
    Ok(orbit)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub orbit: Partition,
    pub conjugator: RationalMatrix,
    pub canonical_charges: CharacterMatrix,
    pub weyl_prefix: RationalMatrix,
}

fn signed_perm(n: usize, entries: &[(usize, usize, i64)]) -> RationalMatrix {
    let mut w = RationalMatrix::zero(n);
    for &(i, j, s) in entries {
        w.set(i - 1, j - 1, int(s));
    }
    w
}

/// Weyl element of L_alpha moving the charge at `from` to the distinguished slot.
fn weyl_for(alpha: usize, from: Pos) -> RationalMatrix {
    let id = |rest: &[(usize, usize, i64)]| signed_perm(4, rest);
    match (alpha, from) {
        (1, (1, 3)) | (2, (1, 3)) => id(&[(1, 1, 1), (2, 2, 1), (4, 3, 1), (3, 4, -1)]),
        (1, (1, 2)) => id(&[(1, 1, 1), (3, 3, 1), (4, 2, 1), (2, 4, -1)]),
        (3, (2, 4)) | (2, (2, 4)) => id(&[(1, 2, 1), (2, 1, -1), (3, 3, 1), (4, 4, 1)]),
        (3, (3, 4)) => id(&[(1, 3, 1), (3, 1, -1), (2, 2, 1), (4, 4, 1)]),
        (2, (2, 3)) => id(&[(1, 2, 1), (2, 1, -1), (4, 3, 1), (3, 4, -1)]),
        _ => RationalMatrix::identity(4),
    }
}

/// Case analysis for the maximal parabolics of SL(4).
pub fn classify_maximal_parabolic(alpha: usize, m: &CharacterMatrix) -> Result<ClassificationResult> {
    if !(1..=3).contains(&alpha) {
        return domain(format!("alpha must be 1, 2 or 3 for SL(4), got {alpha}"));
    }
    let expected = ParabolicDescriptor::maximal(4, alpha)?;
    if m.parabolic != expected {
        return domain(format!("character is not on the radical of the alpha{alpha} parabolic"));
    }
    if m.is_trivial() {
        return domain("the character must be non-trivial");
    }
    let id = RationalMatrix::identity(4);
    if alpha == 2 {
        let c = m.slot_values();
        if !(&c[0] * &c[3] - &c[1] * &c[2]).is_zero() {
            let result = ClassificationResult {
                orbit: Partition::of(&[2, 2]),
                conjugator: id.clone(),
                canonical_charges: m.clone(),
                weyl_prefix: id,
            };
            return finish(m, result);
        }
    }
    let (target, order): (Pos, &[Pos]) = match alpha {
        1 => ((1, 4), &[(1, 4), (1, 3), (1, 2)]),
        2 => ((1, 4), &[(1, 4), (1, 3), (2, 4), (2, 3)]),
        _ => ((1, 4), &[(1, 4), (2, 4), (3, 4)]),
    };
    let from = *order.iter().find(|p| !m.charge(**p).is_zero()).expect("nonzero charge");
    let w = weyl_for(alpha, from);
    let mw = conjugate_character(m, &w)?;
    let lead = mw.charge(target);
    let mut l = id.clone();
    match alpha {
        1 => {
            l.set(1, 3, -mw.charge((1, 2)) / &lead);
            l.set(2, 3, -mw.charge((1, 3)) / &lead);
        }
        2 => {
            l.set(0, 1, mw.charge((2, 4)) / &lead);
            l.set(2, 3, -mw.charge((1, 3)) / &lead);
        }
        _ => {
            l.set(0, 1, mw.charge((2, 4)) / &lead);
            l.set(0, 2, mw.charge((3, 4)) / &lead);
        }
    }
    let canonical = conjugate_character(&mw, &l)?;
    let result = ClassificationResult {
        orbit: Partition::of(&[2, 1, 1]),
        conjugator: l,
        canonical_charges: canonical,
        weyl_prefix: w,
    };
    finish(m, result)
}

fn finish(m: &CharacterMatrix, r: ClassificationResult) -> Result<ClassificationResult> {
    let d = r.conjugator.determinant().abs_sign();
    if !d || !r.weyl_prefix.determinant().is_one() {
        return Err(Error::Invariant("conjugator or Weyl prefix has the wrong determinant".into()));
    }
    let back = conjugate_character(m, &(&r.conjugator * &r.weyl_prefix))?;
    if back != r.canonical_charges {
        return Err(Error::Invariant("conjugation does not reproduce the canonical charges".into()));
    }
    let attached = attach_orbit(m)?;
    if attached != r.orbit {
        return Err(Error::Invariant(format!("case analysis gives {} but Jordan type is {attached}", r.orbit)));
    }
    if r.orbit != Partition::of(&[2, 2]) && r.canonical_charges.charges.len() != 1 {
        return Err(Error::Invariant("canonical form is not a single charge".into()));
    }
    Ok(r)
}

trait AbsSign {
    fn abs_sign(&self) -> bool;
}

impl AbsSign for Rational {
    fn abs_sign(&self) -> bool {
        self.is_one() || (-self).is_one()
    }
}

/// Canonical form of the SL(3) first-row character (m1, m2): returns (m', l_U).
pub fn sl3_parabolic_reduce(m1: &Rational, m2: &Rational) -> Result<(Rational, RationalMatrix)> {
    if m1.is_zero() && m2.is_zero() {
        return domain("both charges are zero");
    }
    if !m2.is_zero() {
        let mut l = RationalMatrix::identity(3);
        l.set(1, 2, -(m1 / m2));
        Ok((m2.clone(), l))
    } else {
        Ok((m1.clone(), RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 0, -1], &[0, -1, 0]])))
    }
}

/// The SL(3) parabolic with first-row radical {(1,2),(1,3)}.
pub fn sl3_first_row() -> ParabolicDescriptor {
    ParabolicDescriptor::maximal(3, 1).expect("alpha1 of sl(3)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn chars(alpha: usize, v: &[i64]) -> CharacterMatrix {
        let vals: Vec<Rational> = v.iter().map(|&x| int(x)).collect();
        let par = ParabolicDescriptor::maximal(4, alpha).unwrap();
        CharacterMatrix::from_slots(par, &vals).unwrap()
    }

    #[test]
    fn identity_conjugation() {
        let m = chars(2, &[1, 2, 3, 4]);
        assert_eq!(conjugate_character(&m, &RationalMatrix::identity(4)).unwrap(), m);
    }

    #[test]
    fn sl3_reduce_examples() {
        let (mp, l) = sl3_parabolic_reduce(&int(3), &int(6)).unwrap();
        assert_eq!(mp, int(6));
        assert_eq!(l.get(1, 2), &rat(-1, 2));
        let (mp, l) = sl3_parabolic_reduce(&int(7), &int(0)).unwrap();
        assert_eq!(mp, int(7));
        assert_eq!(l, RationalMatrix::from_i64(&[&[-1, 0, 0], &[0, 0, -1], &[0, -1, 0]]));
        let (mp, l) = sl3_parabolic_reduce(&int(0), &int(5)).unwrap();
        assert_eq!(mp, int(5));
        assert!(l.is_identity());
        assert!(sl3_parabolic_reduce(&int(0), &int(0)).is_err());
        let m = CharacterMatrix::from_slots(sl3_first_row(), &[int(2), int(4)]).unwrap();
        let (_, l) = sl3_parabolic_reduce(&int(2), &int(4)).unwrap();
        let c = conjugate_character(&m, &l).unwrap();
        assert_eq!(c.slot_values(), vec![int(0), int(4)]);
    }

    #[test]
    fn attach_examples() {
        let ntm = Table2Shape::NextToMinimal.parabolic();
        let m = CharacterMatrix::from_slots(ntm.clone(), &[int(1), int(0), int(0), int(1)]).unwrap();
        assert_eq!(attach_orbit(&m).unwrap(), Partition::of(&[2, 2]));
        let m = CharacterMatrix::from_slots(ntm, &[int(1), int(0), int(0), int(0)]).unwrap();
        assert_eq!(attach_orbit(&m).unwrap(), Partition::of(&[2, 1, 1]));
        let sub = Table2Shape::Subregular.parabolic();
        let m = CharacterMatrix::from_slots(sub, &[int(1), int(0), int(1), int(0)]).unwrap();
        assert_eq!(attach_orbit(&m).unwrap(), Partition::of(&[3, 1]));
    }

    #[test]
    fn maximal_examples() {
        let r = classify_maximal_parabolic(2, &chars(2, &[1, 0, 0, 1])).unwrap();
        assert_eq!(r.orbit, Partition::of(&[2, 2]));
        assert!(r.conjugator.is_identity());
        let r = classify_maximal_parabolic(1, &chars(1, &[0, 0, 5])).unwrap();
        assert_eq!(r.orbit, Partition::of(&[2, 1, 1]));
        assert!(r.conjugator.is_identity());
        let r = classify_maximal_parabolic(2, &chars(2, &[0, 1, 0, 0])).unwrap();
        assert_eq!(r.orbit, Partition::of(&[2, 1, 1]));
        assert_eq!(r.canonical_charges.slot_values(), vec![int(0), int(1), int(0), int(0)]);
        assert!(classify_maximal_parabolic(3, &chars(3, &[0, 0, 0])).is_err());
        for alpha in 1..=3 {
            let n = if alpha == 2 { 4 } else { 3 };
            for k in 0..n {
                let mut v = vec![0; n];
                v[k] = 3;
                let r = classify_maximal_parabolic(alpha, &chars(alpha, &v)).unwrap();
                assert_eq!(r.orbit, Partition::of(&[2, 1, 1]));
            }
        }
    }
}
