//! Formal Whittaker and orbit-coefficient terms with canonical forms.

use itertools::Itertools;
use num_traits::Zero;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::poly::Poly;
use super::polymatrix::PolyMatrix;
use crate::characters::ParabolicDescriptor;
use crate::error::{domain, Error, Result};
use crate::exactnum::{fmt_rat, Rational};
use crate::orbits::{v_mask, Partition, Pos};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    /// Summation over Q.
    Free,
    /// Summation over Q minus zero.
    NonZero,
}

impl Domain {
    pub fn label(&self) -> &'static str {
        match self {
            Domain::Free => "free",
            Domain::NonZero => "nonzero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    WN4,
    WNprime4,
    Forbit(Partition),
    FpartialSum22,
    WN3,
    WZ3,
    Fmin3,
    Freg3,
    /// SL(3) coefficient on the first-row parabolic radical.
    FU3,
    ConstantTerm(usize),
}

fn all_upper(n: usize) -> Vec<Pos> {
    (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

impl Kind {
    pub fn n(&self) -> usize {
        match self {
            Kind::WN4 | Kind::WNprime4 | Kind::FpartialSum22 => 4,
            Kind::Forbit(p) => p.n(),
            Kind::WN3 | Kind::WZ3 | Kind::Fmin3 | Kind::Freg3 | Kind::FU3 => 3,
            Kind::ConstantTerm(n) => *n,
        }
    }

    /// Integration coordinates of the defining integral, row-major.
    pub fn coordinates(&self) -> Vec<Pos> {
        match self {
            Kind::WN4 | Kind::WN3 | Kind::Freg3 => all_upper(self.n()),
            Kind::ConstantTerm(n) => all_upper(*n),
            Kind::WNprime4 | Kind::FpartialSum22 => vec![(1, 3), (1, 4), (2, 4)],
            Kind::Forbit(p) => v_mask(p).into_iter().collect(),
            Kind::WZ3 | Kind::Fmin3 => vec![(1, 3)],
            Kind::FU3 => vec![(1, 2), (1, 3)],
        }
    }

    /// Coordinates carrying the charge slots, in slot order.
    pub fn charge_positions(&self) -> Vec<Pos> {
        match self {
            Kind::WN4 => vec![(1, 2), (2, 3), (3, 4)],
            Kind::WN3 | Kind::Freg3 => vec![(1, 2), (2, 3)],
            Kind::WNprime4 => vec![(1, 3), (1, 4), (2, 4)],
            Kind::FpartialSum22 => vec![(1, 3), (2, 4)],
            Kind::Forbit(p) => ParabolicDescriptor::orbit_v(p).map(|d| d.slots()).unwrap_or_default(),
            Kind::WZ3 | Kind::Fmin3 => vec![(1, 3)],
            Kind::FU3 => vec![(1, 2), (1, 3)],
            Kind::ConstantTerm(_) => vec![],
        }
    }

    pub fn slot_count(&self) -> usize {
        self.charge_positions().len()
    }

    pub fn is_whittaker(&self) -> bool {
        matches!(self, Kind::WN4 | Kind::WNprime4 | Kind::WN3 | Kind::WZ3)
    }

    pub fn label(&self) -> String {
        match self {
            Kind::WN4 => "WN4".into(),
            Kind::WNprime4 => "WNprime4".into(),
            Kind::Forbit(p) => format!("Forbit{p}"),
            Kind::FpartialSum22 => "FpartialSum22".into(),
            Kind::WN3 => "WN3".into(),
            Kind::WZ3 => "WZ3".into(),
            Kind::Fmin3 => "Fmin3".into(),
            Kind::Freg3 => "Freg3".into(),
            Kind::FU3 => "FU3".into(),
            Kind::ConstantTerm(n) => format!("ConstantTerm{n}"),
        }
    }

    pub fn forbit(parts: &[usize]) -> Result<Kind> {
        let p = Partition::new(parts.to_vec())?;
        if p.n() != 4 {
            return domain("orbit coefficients are indexed by partitions of 4");
        }
        if p == Partition::trivial(4) {
            return Ok(Kind::ConstantTerm(4));
        }
        Ok(Kind::Forbit(p))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Zero,
    NonZeroSym(String),
    FreeSym(String),
    Value(Rational),
    /// A derived charge such as m4 - m2*m3/m1' with its known-nonzero flag.
    Expr { poly: Poly, nonzero: bool },
}

impl Slot {
    pub fn nz(name: &str) -> Slot {
        Slot::NonZeroSym(name.to_string())
    }

    pub fn free(name: &str) -> Slot {
        Slot::FreeSym(name.to_string())
    }

    pub fn value(&self) -> Poly {
        match self {
            Slot::Zero => Poly::zero(),
            Slot::NonZeroSym(s) | Slot::FreeSym(s) => Poly::var(s),
            Slot::Value(v) => Poly::constant(v.clone()),
            Slot::Expr { poly, .. } => poly.clone(),
        }
    }

    /// Some(true) when known nonzero, Some(false) when zero, None when undetermined.
    pub fn is_nonzero(&self) -> Option<bool> {
        match self {
            Slot::Zero => Some(false),
            Slot::NonZeroSym(_) => Some(true),
            Slot::FreeSym(_) => None,
            Slot::Value(v) => Some(!v.is_zero()),
            Slot::Expr { poly, nonzero } => {
                if poly.is_zero() {
                    Some(false)
                } else if *nonzero || poly.as_constant().is_some() {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }

    /// Build a slot from a polynomial value, keeping the nonzero flag.
    pub fn from_poly(p: Poly, nonzero: bool, sums: &BTreeMap<String, Domain>) -> Slot {
        if let Some(c) = p.as_constant() {
            return if c.is_zero() { Slot::Zero } else { Slot::Value(c) };
        }
        if let Some(v) = p.as_var() {
            let nz = nonzero || sums.get(&v) == Some(&Domain::NonZero);
            return if nz { Slot::NonZeroSym(v) } else { Slot::FreeSym(v) };
        }
        Slot::Expr { poly: p, nonzero }
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> Slot {
        let r = |s: &String| map.get(s).cloned().unwrap_or_else(|| s.clone());
        match self {
            Slot::NonZeroSym(s) => Slot::NonZeroSym(r(s)),
            Slot::FreeSym(s) => Slot::FreeSym(r(s)),
            Slot::Expr { poly, nonzero } => Slot::Expr { poly: poly.rename(map), nonzero: *nonzero },
            other => other.clone(),
        }
    }

    fn vars(&self) -> BTreeSet<String> {
        self.value().vars()
    }
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Slot", 2)?;
        match self {
            Slot::Zero => {
                st.serialize_field("kind", "zero")?;
                st.serialize_field("value", "0")?;
            }
            Slot::NonZeroSym(n) => {
                st.serialize_field("kind", "nonzero")?;
                st.serialize_field("value", n)?;
            }
            Slot::FreeSym(n) => {
                st.serialize_field("kind", "free")?;
                st.serialize_field("value", n)?;
            }
            Slot::Value(v) => {
                st.serialize_field("kind", "value")?;
                st.serialize_field("value", &fmt_rat(v))?;
            }
            Slot::Expr { poly, nonzero } => {
                st.serialize_field("kind", if *nonzero { "expr_nonzero" } else { "expr" })?;
                st.serialize_field("value", &poly.to_string())?;
            }
        }
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormalTerm {
    pub kind: Kind,
    pub slots: Vec<Slot>,
    /// Left factors applied to g, outermost first.
    pub translate: Vec<PolyMatrix>,
    pub sums: BTreeMap<String, Domain>,
    /// Residual integration variables over Q\A.
    pub integrals: BTreeSet<String>,
}

impl FormalTerm {
    pub fn new(kind: Kind, slots: Vec<Slot>) -> Result<Self> {
        if slots.len() != kind.slot_count() {
            return domain(format!("{kind} takes {} charge slots, got {}", kind.slot_count(), slots.len()));
        }
        Ok(FormalTerm { kind, slots, translate: vec![], sums: BTreeMap::new(), integrals: BTreeSet::new() })
    }

    pub fn with_translate(mut self, factors: Vec<PolyMatrix>) -> Self {
        self.translate = factors;
        self
    }

    pub fn summed(mut self, name: &str, d: Domain) -> Self {
        self.sums.insert(name.to_string(), d);
        self
    }

    pub fn integrated(mut self, name: &str) -> Self {
        self.integrals.insert(name.to_string());
        self
    }

    pub fn residual_integrations(&self) -> usize {
        self.integrals.len()
    }

    pub fn summed_symbols(&self) -> BTreeSet<String> {
        self.sums.keys().cloned().collect()
    }

    pub fn bound(&self) -> BTreeSet<String> {
        self.sums.keys().chain(self.integrals.iter()).cloned().collect()
    }

    /// All symbols, bound or free.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut s: BTreeSet<String> = self.slots.iter().flat_map(|x| x.vars()).collect();
        for t in &self.translate {
            s.extend(t.vars());
        }
        s.extend(self.bound());
        s
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let b = self.bound();
        self.symbols().into_iter().filter(|s| !b.contains(s)).collect()
    }

    /// Known-nonzero symbols: NonZero sums plus symbols in NonZeroSym slots.
    pub fn nonzero_symbols(&self) -> BTreeSet<String> {
        let mut s: BTreeSet<String> =
            self.sums.iter().filter(|(_, d)| **d == Domain::NonZero).map(|(k, _)| k.clone()).collect();
        for sl in &self.slots {
            if let Slot::NonZeroSym(n) = sl {
                s.insert(n.clone());
            }
        }
        s
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> FormalTerm {
        let r = |s: &String| map.get(s).cloned().unwrap_or_else(|| s.clone());
        FormalTerm {
            kind: self.kind.clone(),
            slots: self.slots.iter().map(|s| s.rename(map)).collect(),
            translate: self.translate.iter().map(|t| t.rename(map)).collect(),
            sums: self.sums.iter().map(|(k, d)| (r(k), *d)).collect(),
            integrals: self.integrals.iter().map(r).collect(),
        }
    }

    /// Substitute free symbols by polynomials.
    pub fn substitute(&self, map: &BTreeMap<String, Poly>) -> Result<FormalTerm> {
        let mut out = self.clone();
        for s in out.slots.iter_mut() {
            let nz = s.is_nonzero() == Some(true);
            let p = s.value().substitute_all(map)?;
            *s = Slot::from_poly(p, nz, &self.sums);
        }
        out.translate = out.translate.iter().map(|t| t.substitute_all(map)).collect::<Result<_>>()?;
        Ok(out)
    }

    /// Charges as polynomials in slot order.
    pub fn charge_values(&self) -> Vec<Poly> {
        self.slots.iter().map(Slot::value).collect()
    }

    pub fn orbit(&self) -> Result<Partition> {
        orbit_of_term(self)
    }

    pub fn canonical(&self) -> Result<FormalTerm> {
        canonicalize(self)
    }

    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("serializable term")
    }
}

impl Serialize for FormalTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Bound<'a> {
            symbol: &'a str,
            domain: &'static str,
        }
        let sums: Vec<Bound> = self.sums.iter().map(|(k, d)| Bound { symbol: k, domain: d.label() }).collect();
        let mut st = s.serialize_struct("FormalTerm", 7)?;
        st.serialize_field("kind", &self.kind.label())?;
        st.serialize_field("orbit", &orbit_of_term(self).map(|p| p.to_string()).unwrap_or_else(|_| "?".into()))?;
        st.serialize_field("slots", &self.slots)?;
        st.serialize_field("translate", &self.translate)?;
        st.serialize_field("summed", &sums)?;
        st.serialize_field("integrated", &self.integrals)?;
        st.serialize_field("residual_integrations", &self.integrals.len())?;
        st.end()
    }
}

/// Orbit of a Whittaker charge pattern (true = nonzero).
pub fn orbit_of_whittaker_charges(kind: &Kind, pattern: &[bool]) -> Result<Partition> {
    let p = |v: &[usize]| Partition::of(v);
    match (kind, pattern) {
        (Kind::WN4, [a, b, c]) => Ok(match (a, b, c) {
            (true, true, true) => p(&[4]),
            (true, true, false) | (false, true, true) => p(&[3, 1]),
            (true, false, true) => p(&[2, 2]),
            (false, false, false) => p(&[1, 1, 1, 1]),
            _ => p(&[2, 1, 1]),
        }),
        (Kind::WNprime4, [a, b, c]) => Ok(match (a, b, c) {
            (false, false, false) => p(&[1, 1, 1, 1]),
            (true, false, true) => p(&[2, 2]),
            _ => p(&[2, 1, 1]),
        }),
        (Kind::WN3, [a, b]) => Ok(match (a, b) {
            (true, true) => p(&[3]),
            (false, false) => p(&[1, 1, 1]),
            _ => p(&[2, 1]),
        }),
        (Kind::WZ3, [a]) => Ok(if *a { p(&[2, 1]) } else { p(&[1, 1, 1]) }),
        _ => domain(format!("{kind} with {} charges is not a Whittaker pattern", pattern.len())),
    }
}

pub fn orbit_of_term(t: &FormalTerm) -> Result<Partition> {
    match &t.kind {
        Kind::Forbit(p) => Ok(p.clone()),
        Kind::FpartialSum22 => Ok(Partition::of(&[2, 2])),
        Kind::ConstantTerm(n) => Ok(Partition::trivial(*n)),
        Kind::Fmin3 => Ok(Partition::of(&[2, 1])),
        Kind::Freg3 => Ok(Partition::of(&[3])),
        Kind::FU3 => Ok(Partition::of(&[2, 1])),
        k => {
            let pattern: Option<Vec<bool>> = t.slots.iter().map(Slot::is_nonzero).collect();
            let pattern = pattern.ok_or_else(|| Error::Domain(format!("{k} charge pattern is not fully specified")))?;
            orbit_of_whittaker_charges(k, &pattern)
        }
    }
}

/// Name-independent description of where a bound symbol occurs.
fn occurrence_key(t: &FormalTerm, v: &str) -> Vec<(usize, usize, usize, i32, i32)> {
    let mut key = Vec::new();
    for (k, s) in t.slots.iter().enumerate() {
        let p = s.value();
        if p.contains(v) {
            let (lo, hi) = p.degree_range(v);
            key.push((0, k, 0, lo, hi));
        }
    }
    for (f, m) in t.translate.iter().enumerate() {
        for (i, j, p) in m.entries() {
            if p.contains(v) {
                let (lo, hi) = p.degree_range(v);
                key.push((f + 1, i, j, lo, hi));
            }
        }
    }
    key
}

fn bound_class(t: &FormalTerm, v: &str) -> u8 {
    match t.sums.get(v) {
        Some(Domain::Free) => 0,
        Some(Domain::NonZero) => 1,
        None => 2,
    }
}

fn canonical_names(class: u8, count: usize, avoid: &BTreeSet<String>) -> Vec<String> {
    let stem = match class {
        0 => "s",
        1 => "n",
        _ => "u",
    };
    let mut out = Vec::new();
    let mut k = 1;
    while out.len() < count {
        let name = if class == 1 { format!("_{stem}{k}'") } else { format!("_{stem}{k}") };
        if !avoid.contains(&name) {
            out.push(name);
        }
        k += 1;
    }
    out
}

/// Canonical form: slot normalisation, translate merging, Levi parameter rescaling,
/// and deterministic renaming of bound symbols.
pub fn canonicalize(t: &FormalTerm) -> Result<FormalTerm> {
    let mut t = t.clone();
    // drop bound symbols that no longer occur anywhere, integrals over a trivial integrand
    let used: BTreeSet<String> = {
        let mut s: BTreeSet<String> = t.slots.iter().flat_map(|x| x.vars()).collect();
        for m in &t.translate {
            s.extend(m.vars());
        }
        s
    };
    t.integrals.retain(|v| used.contains(v));
    if let Some(v) = t.sums.keys().find(|v| !used.contains(*v)) {
        return Err(Error::Invariant(format!("summed symbol {v} does not occur in the term")));
    }
    let sums = t.sums.clone();
    t.slots = t
        .slots
        .iter()
        .map(|s| Slot::from_poly(s.value(), s.is_nonzero() == Some(true), &sums))
        .collect();
    // merge adjacent factors free of integration variables
    let mut merged: Vec<PolyMatrix> = Vec::new();
    for f in t.translate.drain(..) {
        let const_f = f.vars().is_disjoint(&t.integrals);
        if let Some(last) = merged.last_mut() {
            if const_f && last.vars().is_disjoint(&t.integrals) {
                *last = &*last * &f;
                continue;
            }
        }
        merged.push(f);
    }
    merged.retain(|m| !m.is_identity());
    t.translate = merged;
    rescale_levi_parameters(&mut t)?;
    rename_bound(&t)
}

fn rescale_levi_parameters(t: &mut FormalTerm) -> Result<()> {
    let nonzero = t.nonzero_symbols();
    let slot_vars: BTreeSet<String> = t.slots.iter().flat_map(|s| s.vars()).collect();
    let free: Vec<String> = t
        .sums
        .iter()
        .filter(|(k, d)| **d == Domain::Free && !slot_vars.contains(*k))
        .map(|(k, _)| k.clone())
        .collect();
    for s in free {
        let mut first: Option<Poly> = None;
        let mut ok = true;
        for m in &t.translate {
            for (_, _, p) in m.entries() {
                if !p.contains(&s) {
                    continue;
                }
                if p.degree_range(&s) != (0, 1) {
                    ok = false;
                    break;
                }
                let c = p.coeff(&s, 1);
                let mono = c.as_monomial().is_some_and(|(_, m)| m.iter().all(|(v, _)| nonzero.contains(v)));
                if !mono {
                    ok = false;
                    break;
                }
                if first.is_none() {
                    first = Some(c);
                }
            }
        }
        let Some(c) = first.filter(|c| ok && !c.is_one()) else { continue };
        let value = &Poly::var(&s) * &c.inverse()?;
        let map = BTreeMap::from([(s.clone(), value)]);
        t.translate = t.translate.iter().map(|m| m.substitute_all(&map)).collect::<Result<_>>()?;
    }
    Ok(())
}

fn rename_bound(t: &FormalTerm) -> Result<FormalTerm> {
    let free = t.free_symbols();
    let mut groups: BTreeMap<(u8, Vec<(usize, usize, usize, i32, i32)>), Vec<String>> = BTreeMap::new();
    for v in t.bound() {
        groups.entry((bound_class(t, &v), occurrence_key(t, &v))).or_default().push(v);
    }
    let mut counters = [0usize; 3];
    let mut fixed: Vec<(Vec<String>, Vec<String>)> = Vec::new();
    let mut totals = [0usize; 3];
    for ((c, _), vs) in &groups {
        totals[*c as usize] += vs.len();
    }
    let names: Vec<Vec<String>> = (0..3).map(|c| canonical_names(c as u8, totals[c], &free)).collect();
    for ((c, _), vs) in &groups {
        let c = *c as usize;
        let target = names[c][counters[c]..counters[c] + vs.len()].to_vec();
        counters[c] += vs.len();
        fixed.push((vs.clone(), target));
    }
    // first pass: assign tied groups in sorted order, then brute force ties
    let mut best: Option<(String, FormalTerm)> = None;
    let tied: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].0.len() > 1).collect();
    let perms: Vec<Vec<Vec<String>>> = tied
        .iter()
        .map(|&i| fixed[i].0.iter().cloned().permutations(fixed[i].0.len()).collect())
        .collect();
    let total: usize = perms.iter().map(|p| p.len()).product();
    if total > 50_000 {
        return Err(Error::Unsupported("too many symmetric bound symbols to canonicalize".into()));
    }
    for choice in perms.iter().map(|p| p.iter()).multi_cartesian_product().chain(
        // multi_cartesian_product of an empty list yields nothing; add one empty choice
        std::iter::once(vec![]).filter(|_| tied.is_empty()),
    ) {
        let mut map = BTreeMap::new();
        for (i, (vs, target)) in fixed.iter().enumerate() {
            let order: &Vec<String> = match tied.iter().position(|&k| k == i) {
                Some(pos) => choice[pos],
                None => vs,
            };
            for (v, n) in order.iter().zip(target) {
                map.insert(v.clone(), n.clone());
            }
        }
        let r = t.rename(&map);
        let key = r.key();
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, r));
        }
    }
    Ok(best.expect("at least one renaming").1)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalExpansion {
    pub terms: Vec<FormalTerm>,
}

impl FormalExpansion {
    pub fn new(terms: Vec<FormalTerm>) -> Result<Self> {
        let mut terms = terms.iter().map(canonicalize).collect::<Result<Vec<_>>>()?;
        terms.sort_by_key(|t| t.key());
        Ok(FormalExpansion { terms })
    }

    pub fn empty() -> Self {
        FormalExpansion::default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn canonical(&self) -> Result<Self> {
        Self::new(self.terms.clone())
    }

    /// Multiset equality up to renaming of bound symbols.
    pub fn alpha_eq(&self, other: &FormalExpansion) -> Result<bool> {
        Ok(self.canonical()? == other.canonical()?)
    }

    pub fn extend(&mut self, other: FormalExpansion) -> Result<()> {
        self.terms.extend(other.terms);
        *self = self.canonical()?;
        Ok(())
    }
}

impl Serialize for FormalExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FormalExpansion", 1)?;
        st.serialize_field("terms", &self.terms)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l22(a: &str, b: &str) -> PolyMatrix {
        PolyMatrix::parse(&format!("0,1,0,0;1,{a},0,0;0,0,0,1;0,0,1,{b}")).unwrap()
    }

    #[test]
    fn alpha_equivalence() {
        let t1 = FormalTerm::new(Kind::WN4, vec![Slot::Zero, Slot::nz("m'"), Slot::Zero])
            .unwrap()
            .with_translate(vec![l22("a", "b")])
            .summed("a", Domain::Free)
            .summed("b", Domain::Free);
        let t2 = FormalTerm::new(Kind::WN4, vec![Slot::Zero, Slot::nz("m'"), Slot::Zero])
            .unwrap()
            .with_translate(vec![l22("p/m'", "q")])
            .summed("p", Domain::Free)
            .summed("q", Domain::Free);
        let c1 = canonicalize(&t1).unwrap();
        assert_eq!(c1, canonicalize(&t2).unwrap());
        assert_eq!(canonicalize(&c1).unwrap(), c1);
        assert_eq!(orbit_of_term(&c1).unwrap(), Partition::of(&[2, 1, 1]));
    }

    #[test]
    fn whittaker_orbits() {
        let o = |k: &Kind, p: &[bool]| orbit_of_whittaker_charges(k, p).unwrap().to_string();
        assert_eq!(o(&Kind::WN4, &[true, false, true]), "(2,2)");
        assert_eq!(o(&Kind::WNprime4, &[true, true, true]), "(2,1,1)");
        assert_eq!(o(&Kind::WN3, &[true, false]), "(2,1)");
        assert_eq!(Kind::Forbit(Partition::of(&[3, 1])).charge_positions(), vec![(1, 2), (1, 3), (2, 4), (3, 4)]);
        assert_eq!(Kind::Forbit(Partition::of(&[2, 1, 1])).coordinates(), vec![(1, 4)]);
    }
}
