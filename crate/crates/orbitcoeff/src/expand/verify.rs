//! Machine checker for rewrite rules.
//!
//! A rule is verified by rewriting the integrand of its left-hand side with a list of
//! elementary steps, each of which is checked exactly, and comparing every leaf of the
//! derivation with the integrand of a distinct right-hand-side term.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

use super::poly::Poly;
use super::polymatrix::PolyMatrix;
use super::term::{Domain, FormalTerm, Slot};
use crate::error::{domain, Error, Result};
use crate::orbits::Pos;

/// Integrand of a formal term: E(elem * g) * conj(e(chr)), integrated over `ints`
/// and summed over `sums`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub elem: PolyMatrix,
    pub chr: Poly,
    pub ints: BTreeSet<String>,
    pub sums: BTreeMap<String, Domain>,
    pub params: BTreeMap<String, Domain>,
}

#[derive(Clone, Debug)]
pub enum Step {
    /// Left translation by a rational matrix of determinant one.
    LeftMul(PolyMatrix),
    /// Simultaneous change of integration variables, old name to expression in new names.
    Subst(Vec<(String, Poly)>),
    /// x to -x on a coordinate carrying no charge.
    SignFlip(String),
    /// Fourier expansion along a root subgroup: new integral `var`, new free sum `sum`.
    Expand { pos: Pos, var: String, sum: String },
    /// Inverse of Expand.
    Collapse { pos: Pos, var: String, sum: String },
    /// Sum over `sum` of an integral of e(c*sum*var) with `var` absent from the integrand.
    OrthoCollapse { var: String, sum: String },
    OrthoIntro { var: String, sum: String, coeff: Poly },
    /// old = scale*new + shift.
    Reparam { old: String, new: String, scale: Poly, shift: Poly },
    /// Free sum split into its zero term and the nonzero remainder.
    Split { sum: String, nonzero: String, zero_branch: Vec<Step>, nonzero_branch: Vec<Step> },
    DropTrivial(String),
    Claim { elem: Option<PolyMatrix>, chr: Option<Poly> },
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::LeftMul(_) => "left-mul",
            Step::Subst(_) => "subst",
            Step::SignFlip(_) => "sign-flip",
            Step::Expand { .. } => "expand",
            Step::Collapse { .. } => "collapse",
            Step::OrthoCollapse { .. } => "ortho-collapse",
            Step::OrthoIntro { .. } => "ortho-intro",
            Step::Reparam { .. } => "reparam",
            Step::Split { .. } => "split",
            Step::DropTrivial(_) => "drop-trivial",
            Step::Claim { .. } => "claim",
        }
    }

    pub fn subst(pairs: &[(&str, &str)]) -> Result<Step> {
        Ok(Step::Subst(pairs.iter().map(|(o, e)| Ok((o.to_string(), Poly::parse(e)?))).collect::<Result<_>>()?))
    }

    pub fn expand(pos: Pos, var: &str, sum: &str) -> Step {
        Step::Expand { pos, var: var.into(), sum: sum.into() }
    }

    pub fn collapse(pos: Pos, var: &str, sum: &str) -> Step {
        Step::Collapse { pos, var: var.into(), sum: sum.into() }
    }

    pub fn reparam(old: &str, new: &str, scale: &str, shift: &str) -> Result<Step> {
        Ok(Step::Reparam { old: old.into(), new: new.into(), scale: Poly::parse(scale)?, shift: Poly::parse(shift)? })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub rule: String,
    pub pass: bool,
    pub detail: String,
    pub residual: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleFamily {
    /// A Whittaker vector written through orbit coefficients.
    WhittakerToOrbit,
    /// An orbit coefficient expanded through smaller or larger ones.
    OrbitExpansion,
    /// Maximal-parabolic coefficients of SL(3).
    Parabolic,
}

#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub name: String,
    pub family: RuleFamily,
    pub description: String,
    pub params: BTreeMap<String, Domain>,
    pub lhs: FormalTerm,
    pub rhs: Vec<FormalTerm>,
    pub derivation: Vec<Step>,
}

pub(crate) struct Failure {
    step: String,
    msg: String,
    residual: Option<Poly>,
}

impl Failure {
    pub(crate) fn into_error(self) -> Error {
        let r = self.residual.map(|r| format!(" (residual {r})")).unwrap_or_default();
        Error::Invariant(format!("{}: {}{r}", self.step, self.msg))
    }

    fn new(step: &str, msg: impl Into<String>, residual: Option<Poly>) -> Self {
        Failure { step: step.into(), msg: msg.into(), residual }
    }
}

fn err_fail(step: &str, e: Error) -> Failure {
    Failure::new(step, e.to_string(), None)
}

const COORD_STEM: &str = "x";

/// Integrand of a term: leading unipotent factor over the kind's coordinates,
/// then the translate factors.
pub fn standard_integrand(t: &FormalTerm, params: &BTreeMap<String, Domain>) -> Result<State> {
    let n = t.kind.n();
    let coords = t.kind.coordinates();
    let syms = t.symbols();
    let names: Vec<String> = coords.iter().map(|(i, j)| format!("{COORD_STEM}{i}{j}")).collect();
    if let Some(c) = names.iter().find(|c| syms.contains(*c)) {
        return domain(format!("symbol {c} is reserved for integration coordinates"));
    }
    let mut elem = PolyMatrix::unipotent(
        n,
        &coords.iter().zip(&names).map(|(p, v)| (*p, Poly::var(v))).collect::<Vec<_>>(),
    );
    for f in &t.translate {
        if f.size() != n {
            return domain("translate factor has the wrong size");
        }
        elem = &elem * f;
    }
    let mut chr = Poly::zero();
    for (pos, slot) in t.kind.charge_positions().iter().zip(&t.slots) {
        chr = &chr + &(&slot.value() * &Poly::var(&format!("{COORD_STEM}{}{}", pos.0, pos.1)));
    }
    let mut ints: BTreeSet<String> = names.into_iter().collect();
    ints.extend(t.integrals.iter().cloned());
    Ok(State { elem, chr, ints, sums: t.sums.clone(), params: params.clone() })
}

impl State {
    fn nonzero(&self) -> BTreeSet<String> {
        self.params
            .iter()
            .chain(self.sums.iter())
            .filter(|(_, d)| **d == Domain::NonZero)
            .map(|(k, _)| k.clone())
            .collect()
    }

    fn symbols(&self) -> BTreeSet<String> {
        self.params.keys().chain(self.sums.keys()).cloned().collect()
    }

    fn all_names(&self) -> BTreeSet<String> {
        let mut s = self.symbols();
        s.extend(self.ints.iter().cloned());
        s.extend(self.elem.vars());
        s.extend(self.chr.vars());
        s
    }

    fn check_fresh(&self, step: &str, v: &str) -> std::result::Result<(), Failure> {
        if self.all_names().contains(v) {
            return Err(Failure::new(step, format!("name {v} is not fresh"), None));
        }
        Ok(())
    }

    /// Negative exponents only on known-nonzero symbols, no integration variables.
    fn check_rational(&self, step: &str, p: &Poly) -> std::result::Result<(), Failure> {
        let nz = self.nonzero();
        if let Some(v) = p.vars().iter().find(|v| self.ints.contains(*v)) {
            return Err(Failure::new(step, format!("coefficient depends on integration variable {v}"), Some(p.clone())));
        }
        self.check_denominators(step, p, &nz)
    }

    fn check_denominators(&self, step: &str, p: &Poly, nz: &BTreeSet<String>) -> std::result::Result<(), Failure> {
        for (m, _) in p.terms() {
            if let Some((v, _)) = m.iter().find(|(v, e)| *e < 0 && !nz.contains(v)) {
                return Err(Failure::new(step, format!("division by {v}, which may vanish"), Some(p.clone())));
            }
        }
        Ok(())
    }

    fn nonzero_monomial(&self, p: &Poly) -> bool {
        let nz = self.nonzero();
        p.as_monomial().is_some_and(|(c, m)| !num_traits::Zero::is_zero(&c) && m.iter().all(|(v, _)| nz.contains(v)))
    }

    fn map_all(&mut self, map: &BTreeMap<String, Poly>, step: &str) -> std::result::Result<(), Failure> {
        self.elem = self.elem.substitute_all(map).map_err(|e| err_fail(step, e))?;
        self.chr = self.chr.substitute_all(map).map_err(|e| err_fail(step, e))?;
        Ok(())
    }

    pub(crate) fn apply(&mut self, step: &Step) -> std::result::Result<(), Failure> {
        let name = step.name();
        match step {
            Step::LeftMul(g) => {
                if g.size() != self.elem.size() {
                    return Err(Failure::new(name, "size mismatch", None));
                }
                for (_, _, p) in g.entries() {
                    self.check_rational(name, p)?;
                }
                let d = g.determinant();
                if !d.is_one() {
                    return Err(Failure::new(name, "translation is not in SL(n,Q)", Some(&d - &Poly::one())));
                }
                self.elem = g * &self.elem;
            }
            Step::Subst(pairs) => self.subst(pairs)?,
            Step::SignFlip(v) => {
                if !self.ints.contains(v) {
                    return Err(Failure::new(name, format!("{v} is not integrated"), None));
                }
                if self.chr.contains(v) {
                    return Err(Failure::new(name, format!("charge on {v} is not zero"), Some(self.chr.coeff(v, 1))));
                }
                let map = BTreeMap::from([(v.clone(), -&Poly::var(v))]);
                self.map_all(&map, name)?;
            }
            Step::Expand { pos, var, sum } => {
                self.check_fresh(name, var)?;
                self.check_fresh(name, sum)?;
                let n = self.elem.size();
                self.elem = &PolyMatrix::elementary(n, *pos, Poly::var(var)) * &self.elem;
                self.chr = &self.chr + &(&Poly::var(sum) * &Poly::var(var));
                self.ints.insert(var.clone());
                self.sums.insert(sum.clone(), Domain::Free);
            }
            Step::Collapse { pos, var, sum } => {
                if !self.ints.contains(var) || self.sums.get(sum) != Some(&Domain::Free) {
                    return Err(Failure::new(name, format!("{var}/{sum} are not an integral and a free sum"), None));
                }
                let n = self.elem.size();
                let rest = &PolyMatrix::elementary(n, *pos, -&Poly::var(var)) * &self.elem;
                if let Some((_, _, p)) = rest.entries().find(|(_, _, p)| p.contains(var) || p.contains(sum)) {
                    return Err(Failure::new(name, format!("integrand does not factor through x{pos:?}({var})"), Some(p.clone())));
                }
                let other = &self.chr - &(&Poly::var(sum) * &Poly::var(var));
                if other.contains(var) || other.contains(sum) {
                    return Err(Failure::new(name, format!("charge on {var} is not {sum}"), Some(other)));
                }
                self.elem = rest;
                self.chr = other;
                self.ints.remove(var);
                self.sums.remove(sum);
            }
            Step::OrthoCollapse { var, sum } => {
                if !self.ints.contains(var) || self.sums.get(sum) != Some(&Domain::Free) {
                    return Err(Failure::new(name, format!("{var}/{sum} are not an integral and a free sum"), None));
                }
                if self.elem.contains(var) {
                    return Err(Failure::new(name, format!("integrand depends on {var}"), None));
                }
                if self.chr.degree_range(var) != (0, 1) {
                    return Err(Failure::new(name, format!("charge is not linear in {var}"), Some(self.chr.clone())));
                }
                let c = self.chr.coeff(var, 1);
                let cofactor = match c.as_monomial() {
                    Some((k, m)) if m.iter().any(|(v, e)| v == sum && *e == 1) => Poly::monomial(
                        k,
                        m.into_iter().filter(|(v, _)| v != sum).collect(),
                    ),
                    _ => return Err(Failure::new(name, format!("charge on {var} is not a multiple of {sum}"), Some(c))),
                };
                if !self.nonzero_monomial(&cofactor) {
                    return Err(Failure::new(name, "charge cofactor may vanish", Some(cofactor)));
                }
                let map = BTreeMap::from([(var.clone(), Poly::zero())]);
                self.chr = self.chr.substitute_all(&map).map_err(|e| err_fail(name, e))?;
                let map = BTreeMap::from([(sum.clone(), Poly::zero())]);
                self.map_all(&map, name)?;
                self.ints.remove(var);
                self.sums.remove(sum);
            }
            Step::OrthoIntro { var, sum, coeff } => {
                self.check_fresh(name, var)?;
                self.check_fresh(name, sum)?;
                if !self.nonzero_monomial(coeff) {
                    return Err(Failure::new(name, "charge cofactor may vanish", Some(coeff.clone())));
                }
                self.chr = &self.chr + &(&(coeff * &Poly::var(sum)) * &Poly::var(var));
                self.ints.insert(var.clone());
                self.sums.insert(sum.clone(), Domain::Free);
            }
            Step::Reparam { old, new, scale, shift } => {
                let Some(d) = self.sums.get(old).copied() else {
                    return Err(Failure::new(name, format!("{old} is not summed"), None));
                };
                self.check_fresh(name, new)?;
                if !self.nonzero_monomial(scale) || scale.contains(old) {
                    return Err(Failure::new(name, "scale may vanish", Some(scale.clone())));
                }
                self.check_rational(name, shift)?;
                if shift.contains(old) {
                    return Err(Failure::new(name, "shift depends on the old index", Some(shift.clone())));
                }
                if d == Domain::NonZero && !shift.is_zero() {
                    return Err(Failure::new(name, "shifting a nonzero sum", Some(shift.clone())));
                }
                let value = &(scale * &Poly::var(new)) + shift;
                let map = BTreeMap::from([(old.clone(), value)]);
                self.map_all(&map, name)?;
                self.sums.remove(old);
                self.sums.insert(new.clone(), d);
            }
            Step::DropTrivial(v) => {
                if !self.ints.contains(v) || self.elem.contains(v) || self.chr.contains(v) {
                    return Err(Failure::new(name, format!("{v} is not a trivial integral"), None));
                }
                self.ints.remove(v);
            }
            Step::Claim { elem, chr } => {
                if let Some(e) = elem {
                    if let Some(r) = matrix_residual(&self.elem, e) {
                        return Err(Failure::new(name, "integrand differs from the claim", Some(r)));
                    }
                }
                if let Some(c) = chr {
                    if *c != self.chr {
                        return Err(Failure::new(name, "charge differs from the claim", Some(&self.chr - c)));
                    }
                }
            }
            Step::Split { .. } => unreachable!("split is handled by the driver"),
        }
        Ok(())
    }

    pub(crate) fn split(&self, step: &str, sum: &str, nonzero: &str) -> std::result::Result<(State, State), Failure> {
        if self.sums.get(sum) != Some(&Domain::Free) {
            return Err(Failure::new(step, format!("{sum} is not a free sum"), None));
        }
        self.check_fresh(step, nonzero)?;
        let mut zero = self.clone();
        zero.sums.remove(sum);
        zero.map_all(&BTreeMap::from([(sum.to_string(), Poly::zero())]), step)?;
        let mut nz = self.clone();
        nz.sums.remove(sum);
        nz.sums.insert(nonzero.to_string(), Domain::NonZero);
        let ren = BTreeMap::from([(sum.to_string(), nonzero.to_string())]);
        nz.elem = nz.elem.rename(&ren);
        nz.chr = nz.chr.rename(&ren);
        Ok((zero, nz))
    }

    fn subst(&mut self, pairs: &[(String, Poly)]) -> std::result::Result<(), Failure> {
        let name = "subst";
        let olds: BTreeSet<String> = pairs.iter().map(|(o, _)| o.clone()).collect();
        if olds.len() != pairs.len() {
            return Err(Failure::new(name, "repeated variable", None));
        }
        if let Some(o) = olds.iter().find(|o| !self.ints.contains(*o)) {
            return Err(Failure::new(name, format!("{o} is not an integration variable"), None));
        }
        let untouched: BTreeSet<String> = self.ints.difference(&olds).cloned().collect();
        let symbols = self.symbols();
        let news: BTreeSet<String> = pairs
            .iter()
            .flat_map(|(_, e)| e.vars())
            .filter(|v| !untouched.contains(v) && !symbols.contains(v))
            .collect();
        if news.len() != olds.len() {
            return Err(Failure::new(name, format!("{} variables replaced by {}", olds.len(), news.len()), None));
        }
        if let Some(v) = news.iter().find(|v| !olds.contains(*v) && self.all_names().contains(*v)) {
            return Err(Failure::new(name, format!("new variable {v} clashes"), None));
        }
        let nz = self.nonzero();
        for (_, e) in pairs {
            self.check_denominators(name, e, &nz)?;
        }
        // peel variables occurring in exactly one remaining expression with unit coefficient
        let mut remaining: Vec<(String, Poly)> = pairs.to_vec();
        let mut free_news = news.clone();
        while !remaining.is_empty() {
            let mut found = None;
            'search: for (k, (_, e)) in remaining.iter().enumerate() {
                for y in free_news.iter().filter(|y| e.contains(y)) {
                    if remaining.iter().enumerate().any(|(l, (_, f))| l != k && f.contains(y)) {
                        continue;
                    }
                    if e.degree_range(y) != (0, 1) {
                        continue;
                    }
                    let c = e.coeff(y, 1);
                    let Some(c) = c.as_constant() else { continue };
                    if c == num_rational::BigRational::from_integer(1.into()) {
                        found = Some((k, y.clone()));
                        break 'search;
                    }
                    if c == num_rational::BigRational::from_integer((-1).into()) {
                        found = Some((k, y.clone()));
                        break 'search;
                    }
                }
            }
            let Some((k, y)) = found else {
                let residual = remaining.first().map(|(_, e)| e.clone());
                return Err(Failure::new(name, "substitution is not unit triangular", residual));
            };
            remaining.remove(k);
            free_news.remove(&y);
        }
        let map: BTreeMap<String, Poly> = pairs.iter().cloned().collect();
        self.map_all(&map, name)?;
        self.ints = untouched.union(&news).cloned().collect();
        Ok(())
    }
}

/// Sum over entries of (a - b) weighted by distinct marker symbols, or None if equal.
fn matrix_residual(a: &PolyMatrix, b: &PolyMatrix) -> Option<Poly> {
    if a.size() != b.size() {
        return Some(Poly::one());
    }
    let mut r = Poly::zero();
    for ((i, j, p), (_, _, q)) in a.entries().zip(b.entries()) {
        if p != q {
            r = &r + &(&(p - q) * &Poly::var(&format!("E{}{}", i + 1, j + 1)));
        }
    }
    (!r.is_zero()).then_some(r)
}

type Profile = (u8, Vec<(usize, usize, i32, i32)>, (i32, i32));

fn profile(s: &State, v: &str) -> Profile {
    let class = match s.sums.get(v) {
        Some(Domain::Free) => 0,
        Some(Domain::NonZero) => 1,
        None => 2,
    };
    let places = s.elem.entries().filter(|(_, _, p)| p.contains(v)).map(|(i, j, p)| {
        let (lo, hi) = p.degree_range(v);
        (i, j, lo, hi)
    });
    let c = if s.chr.contains(v) { s.chr.degree_range(v) } else { (0, 0) };
    (class, places.collect(), c)
}

fn bound_names(s: &State) -> Vec<String> {
    s.ints.iter().chain(s.sums.keys()).cloned().collect()
}

/// Find a renaming of the bound names of `a` to those of `b` making the integrands equal.
fn alpha_match(a: &State, b: &State) -> std::result::Result<(), Option<Poly>> {
    let an = bound_names(a);
    let bn = bound_names(b);
    if an.len() != bn.len() || a.ints.len() != b.ints.len() {
        return Err(None);
    }
    let bprof: Vec<(String, Profile)> = bn.iter().map(|v| (v.clone(), profile(b, v))).collect();
    let cands: Vec<Vec<String>> = an
        .iter()
        .map(|v| {
            let p = profile(a, v);
            bprof.iter().filter(|(_, q)| *q == p).map(|(n, _)| n.clone()).collect()
        })
        .collect();
    let mut best: Option<Poly> = None;
    let mut budget = 20_000usize;
    let mut assign: Vec<String> = Vec::new();
    fn go(
        k: usize,
        an: &[String],
        cands: &[Vec<String>],
        assign: &mut Vec<String>,
        a: &State,
        b: &State,
        best: &mut Option<Poly>,
        budget: &mut usize,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        if k == an.len() {
            *budget -= 1;
            let map: BTreeMap<String, String> = an.iter().cloned().zip(assign.iter().cloned()).collect();
            let e = a.elem.rename(&map);
            let c = a.chr.rename(&map);
            let r = match matrix_residual(&e, &b.elem) {
                Some(r) => Some(r),
                None if c != b.chr => Some(&c - &b.chr),
                None => None,
            };
            match r {
                None => return true,
                Some(r) => {
                    if best.as_ref().is_none_or(|x| r.terms().count() < x.terms().count()) {
                        *best = Some(r);
                    }
                }
            }
            return false;
        }
        for c in &cands[k] {
            if assign.contains(c) {
                continue;
            }
            assign.push(c.clone());
            if go(k + 1, an, cands, assign, a, b, best, budget) {
                return true;
            }
            assign.pop();
        }
        false
    }
    if go(0, &an, &cands, &mut assign, a, b, &mut best, &mut budget) {
        return Ok(());
    }
    if best.is_none() {
        // no profile-compatible renaming: compare under the sorted renaming
        let map: BTreeMap<String, String> = an.iter().cloned().zip(bn.iter().cloned()).collect();
        let e = a.elem.rename(&map);
        best = matrix_residual(&e, &b.elem).or_else(|| Some(&a.chr.rename(&map) - &b.chr)).filter(|p| !p.is_zero());
    }
    Err(best)
}

fn run(
    mut state: State,
    steps: &[Step],
    path: &str,
    leaves: &mut Vec<(String, State)>,
) -> std::result::Result<(), Failure> {
    for (k, step) in steps.iter().enumerate() {
        let here = format!("{path}{}#{}", step.name(), k + 1);
        if let Step::Split { sum, nonzero, zero_branch, nonzero_branch } = step {
            if k + 1 != steps.len() {
                return Err(Failure::new(&here, "split must end its step list", None));
            }
            let (zero, nz) = state.split(&here, sum, nonzero)?;
            run(zero, zero_branch, &format!("{here}/zero:"), leaves)?;
            run(nz, nonzero_branch, &format!("{here}/nonzero:"), leaves)?;
            return Ok(());
        }
        state.apply(step).map_err(|f| Failure { step: format!("{here}: {}", f.step), ..f })?;
    }
    leaves.push((path.to_string(), state));
    Ok(())
}

fn fail(rule: &RewriteRule, f: Failure) -> CheckReport {
    CheckReport {
        rule: rule.name.clone(),
        pass: false,
        detail: format!("{}: {}", f.step, f.msg),
        residual: f.residual.map(|r| r.to_string()),
    }
}

pub fn verify_rewrite_rule(rule: &RewriteRule) -> CheckReport {
    match verify_inner(rule) {
        Ok(detail) => CheckReport { rule: rule.name.clone(), pass: true, detail, residual: None },
        Err(f) => fail(rule, f),
    }
}

fn verify_inner(rule: &RewriteRule) -> std::result::Result<String, Failure> {
    let start = standard_integrand(&rule.lhs, &rule.params).map_err(|e| err_fail("lhs", e))?;
    for t in &rule.rhs {
        if let Some(v) = t.free_symbols().iter().find(|v| !rule.params.contains_key(*v)) {
            return Err(Failure::new("rhs", format!("unbound symbol {v}"), None));
        }
    }
    let mut leaves = Vec::new();
    run(start, &rule.derivation, "", &mut leaves)?;
    if leaves.len() != rule.rhs.len() {
        return Err(Failure::new(
            "leaves",
            format!("{} derivation leaves for {} right-hand terms", leaves.len(), rule.rhs.len()),
            None,
        ));
    }
    let targets: Vec<State> = rule
        .rhs
        .iter()
        .map(|t| standard_integrand(t, &rule.params))
        .collect::<Result<_>>()
        .map_err(|e| err_fail("rhs", e))?;
    let mut used = vec![false; targets.len()];
    for (path, leaf) in &leaves {
        let mut best: Option<Poly> = None;
        let mut hit = None;
        for (k, t) in targets.iter().enumerate() {
            if used[k] {
                continue;
            }
            match alpha_match(leaf, t) {
                Ok(()) => {
                    hit = Some(k);
                    break;
                }
                Err(Some(r)) => {
                    if best.as_ref().is_none_or(|b| r.terms().count() < b.terms().count()) {
                        best = Some(r);
                    }
                }
                Err(None) => {}
            }
        }
        match hit {
            Some(k) => used[k] = true,
            None => {
                let at = if path.is_empty() { "leaf".to_string() } else { format!("leaf {path}") };
                return Err(Failure::new(&at, "no right-hand term matches the rewritten integrand", best));
            }
        }
    }
    let n: usize = rule.derivation.iter().map(count_steps).sum();
    Ok(format!("{n} steps, {} leaves matched", leaves.len()))
}

fn count_steps(s: &Step) -> usize {
    match s {
        Step::Split { zero_branch, nonzero_branch, .. } => {
            1 + zero_branch.iter().map(count_steps).sum::<usize>() + nonzero_branch.iter().map(count_steps).sum::<usize>()
        }
        _ => 1,
    }
}

impl RewriteRule {
    /// Copy with one witness entry moved by +1: the first translation matrix of the
    /// derivation if there is one, otherwise the first right-hand translate.
    pub fn mutated(&self) -> RewriteRule {
        fn bump(m: &PolyMatrix) -> PolyMatrix {
            let mut m = m.clone();
            let (i, j) = (0, m.size() - 1);
            let v = m.get(i, j) + &Poly::one();
            m.set(i, j, v);
            m
        }
        fn walk(steps: &mut [Step]) -> bool {
            for s in steps.iter_mut() {
                match s {
                    Step::LeftMul(g) => {
                        *g = bump(g);
                        return true;
                    }
                    Step::Split { zero_branch, nonzero_branch, .. } => {
                        if walk(nonzero_branch) || walk(zero_branch) {
                            return true;
                        }
                    }
                    _ => {}
                }
            }
            false
        }
        let mut r = self.clone();
        r.name = format!("{}~mutated", self.name);
        if !walk(&mut r.derivation) {
            if let Some(t) = r.rhs.iter_mut().find(|t| !t.translate.is_empty()) {
                t.translate[0] = bump(&t.translate[0]);
            } else if let Some(t) = r.rhs.first_mut() {
                let n = t.kind.n();
                t.translate.push(bump(&PolyMatrix::identity(n)));
            }
        }
        r
    }

    /// Match `term` against the left-hand side; returns parameter bindings, the bound
    /// names the left-hand sums take in the term, and the number of consumed factors.
    fn match_lhs(&self, term: &FormalTerm) -> Option<(BTreeMap<String, Poly>, BTreeMap<String, String>, usize)> {
        if term.kind != self.lhs.kind {
            return None;
        }
        let mut bind: BTreeMap<String, Poly> = BTreeMap::new();
        for (p, s) in self.lhs.slots.iter().zip(&term.slots) {
            match p {
                Slot::Zero => {
                    if s.is_nonzero() != Some(false) {
                        return None;
                    }
                }
                Slot::Value(v) => {
                    if s.value().as_constant().as_ref() != Some(v) {
                        return None;
                    }
                }
                Slot::NonZeroSym(name) | Slot::FreeSym(name) => {
                    if matches!(p, Slot::NonZeroSym(_)) && s.is_nonzero() != Some(true) {
                        return None;
                    }
                    if let Some(prev) = bind.get(name) {
                        if *prev != s.value() {
                            return None;
                        }
                    }
                    bind.insert(name.clone(), s.value());
                }
                Slot::Expr { .. } => return None,
            }
        }
        let k = self.lhs.translate.len();
        if term.translate.len() < k {
            return None;
        }
        let lhs_bound: BTreeSet<String> = self.lhs.bound();
        let mut sums_map: BTreeMap<String, String> = BTreeMap::new();
        for (tpl, actual) in self.lhs.translate.iter().zip(&term.translate) {
            for (i, j, p) in tpl.entries() {
                if let Some(v) = p.as_var() {
                    if lhs_bound.contains(&v) {
                        let a = actual.get(i, j).as_var()?;
                        if term.sums.get(&a) != self.lhs.sums.get(&v) {
                            return None;
                        }
                        sums_map.insert(v, a);
                    } else if !bind.contains_key(&v) && self.params.contains_key(&v) {
                        bind.insert(v, actual.get(i, j).clone());
                    }
                }
            }
        }
        let mut full: BTreeMap<String, Poly> = bind.clone();
        for (k2, v) in &sums_map {
            full.insert(k2.clone(), Poly::var(v));
        }
        for (tpl, actual) in self.lhs.translate.iter().zip(&term.translate) {
            if tpl.substitute_all(&full).ok()? != *actual {
                return None;
            }
        }
        // the consumed sums must not occur outside the consumed factors
        let consumed: BTreeSet<&String> = sums_map.values().collect();
        let outside = term.slots.iter().any(|s| s.value().vars().iter().any(|v| consumed.contains(v)))
            || term.translate[k..].iter().any(|m| m.vars().iter().any(|v| consumed.contains(v)));
        if outside || consumed.len() != sums_map.len() {
            return None;
        }
        Some((bind, sums_map, k))
    }

    /// Rewrite `term` with this rule, or None if the left-hand side does not match.
    pub fn apply(&self, term: &FormalTerm) -> Result<Option<Vec<FormalTerm>>> {
        let Some((bind, sums_map, k)) = self.match_lhs(term) else { return Ok(None) };
        let mut taken = term.symbols();
        let mut out = Vec::new();
        for r in &self.rhs {
            let mut fresh: BTreeMap<String, String> = BTreeMap::new();
            for b in r.bound() {
                let mut i = 1;
                let mut name = format!("{b}_{i}");
                while taken.contains(&name) {
                    i += 1;
                    name = format!("{b}_{i}");
                }
                taken.insert(name.clone());
                fresh.insert(b, name);
            }
            let r = r.rename(&fresh);
            let mut t = r.substitute(&bind)?;
            // slots declared nonzero in the template stay nonzero after substitution
            for (slot, tpl) in t.slots.iter_mut().zip(&r.slots) {
                if matches!(tpl, Slot::NonZeroSym(_)) {
                    if let Slot::Expr { nonzero, .. } = slot {
                        *nonzero = true;
                    }
                }
            }
            t.translate.extend(term.translate[k..].iter().cloned());
            for (name, d) in &term.sums {
                if !sums_map.values().any(|v| v == name) {
                    t.sums.insert(name.clone(), *d);
                }
            }
            t.integrals.extend(term.integrals.iter().filter(|v| !sums_map.values().any(|c| c == *v)).cloned());
            out.push(t.canonical()?);
        }
        Ok(Some(out))
    }
}
