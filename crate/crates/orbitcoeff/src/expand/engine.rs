//! Expansion pipelines built from the rule registry, and representation filters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::rules::{find_rule, registry, term, TermExt};
use super::term::{Domain, FormalExpansion, FormalTerm, Kind, Slot};
use super::verify::{RewriteRule, RuleFamily};
use crate::error::{domain, Error, Result};
use crate::orbits::{dominance_leq, Partition};

/// Representation class used to filter expansions by wavefront set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rep {
    Generic,
    Wavefront(Partition),
}

impl Rep {
    pub fn minimal(n: usize) -> Result<Rep> {
        match n {
            3 => Ok(Rep::Wavefront(Partition::of(&[2, 1]))),
            4 => Ok(Rep::Wavefront(Partition::of(&[2, 1, 1]))),
            _ => domain(format!("no minimal representation registered for SL({n})")),
        }
    }

    pub fn next_to_minimal(n: usize) -> Result<Rep> {
        match n {
            4 => Ok(Rep::Wavefront(Partition::of(&[2, 2]))),
            _ => domain(format!("no next-to-minimal representation registered for SL({n})")),
        }
    }

    /// "generic", "min", "ntm", or a partition such as "2,1,1" or "(2,1,1)".
    pub fn parse(s: &str, n: usize) -> Result<Rep> {
        match s.trim() {
            "generic" => Ok(Rep::Generic),
            "min" => Rep::minimal(n),
            "ntm" => Rep::next_to_minimal(n),
            other => {
                let p: Partition = other.parse()?;
                if p.n() != n {
                    return domain(format!("partition {p} is not a partition of {n}"));
                }
                Ok(Rep::Wavefront(p))
            }
        }
    }

    pub fn admits(&self, orbit: &Partition) -> Result<bool> {
        match self {
            Rep::Generic => Ok(true),
            Rep::Wavefront(w) => dominance_leq(orbit, w),
        }
    }
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Generic => write!(f, "generic"),
            Rep::Wavefront(p) => write!(f, "{p}"),
        }
    }
}

/// Which simple root the maximally degenerate Whittaker vectors end up on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Alpha1,
    Alpha2,
    Alpha3,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Alpha1, Strategy::Alpha2, Strategy::Alpha3];

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::Alpha1 => "alpha1",
            Strategy::Alpha2 => "alpha2",
            Strategy::Alpha3 => "alpha3",
        }
    }

    fn rule(&self) -> String {
        format!("f211-expand-{}", self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha1" => Ok(Strategy::Alpha1),
            "alpha2" => Ok(Strategy::Alpha2),
            "alpha3" => Ok(Strategy::Alpha3),
            _ => domain(format!("unknown strategy '{s}' (expected alpha1, alpha2 or alpha3)")),
        }
    }
}

fn apply_rule(rule: &RewriteRule, t: &FormalTerm) -> Result<Vec<FormalTerm>> {
    rule.apply(t)?
        .ok_or_else(|| Error::Domain(format!("rule {} does not apply to {}", rule.name, t.key())))
}

/// Rewrite every term the rule matches; other terms pass through.
pub fn rewrite(exp: &FormalExpansion, rule_name: &str) -> Result<FormalExpansion> {
    let rule = find_rule(rule_name)?;
    let mut out = Vec::new();
    for t in &exp.terms {
        match rule.apply(t)? {
            Some(ts) => out.extend(ts),
            None => out.push(t.clone()),
        }
    }
    FormalExpansion::new(out)
}

/// Table row lookup for a Whittaker vector.
pub fn whittaker_to_orbit(t: &FormalTerm) -> Result<FormalExpansion> {
    if !t.kind.is_whittaker() {
        return domain(format!("{} is not a Whittaker vector", t.kind));
    }
    for rule in registry().iter().filter(|r| r.family == RuleFamily::WhittakerToOrbit) {
        if let Some(ts) = rule.apply(t)? {
            return FormalExpansion::new(ts);
        }
    }
    if t.slots.iter().any(|s| s.is_nonzero().is_none()) {
        return domain(format!("{} charge pattern is not fully specified", t.kind));
    }
    Err(Error::Exhaustiveness(format!("no table row matches {}", t.key())))
}

/// F_(211)(charge) expanded along the chosen strategy.
pub fn expand_f212(charge: &Slot, strategy: Strategy) -> Result<FormalExpansion> {
    if !matches!(charge, Slot::NonZeroSym(_)) {
        return domain("F_(211) expansion needs a nonzero symbolic charge");
    }
    let lhs = FormalTerm::new(Kind::Forbit(Partition::of(&[2, 1, 1])), vec![charge.clone()])?;
    FormalExpansion::new(apply_rule(find_rule(&strategy.rule())?, &lhs)?)
}

/// F_(22) in partially summed form.
pub fn partial_sum_form(charges: &[Slot]) -> Result<FormalExpansion> {
    let lhs = FormalTerm::new(Kind::Forbit(Partition::of(&[2, 2])), charges.to_vec())?;
    let name = if charges[0].is_nonzero() == Some(true) {
        "f22-partial-sum"
    } else if charges[2].is_nonzero() == Some(true) {
        "f22-partial-sum-swapped"
    } else {
        return domain("F_(22) needs a nonzero charge in the first or third slot");
    };
    let out = apply_rule(find_rule(name)?, &lhs)?;
    if out.iter().any(|t| t.slots.iter().any(|s| s.is_nonzero() == Some(false))) {
        return domain("charges violate the (2,2) condition m1*m4 - m2*m3 != 0");
    }
    FormalExpansion::new(out)
}

pub fn expand_f22_partial(m1: &Slot, m6: &Slot) -> Result<FormalExpansion> {
    if !matches!(m1, Slot::NonZeroSym(_)) || !matches!(m6, Slot::NonZeroSym(_)) {
        return domain("partially summed F_(22) expansion needs nonzero symbolic charges");
    }
    let lhs = FormalTerm::new(Kind::FpartialSum22, vec![m1.clone(), m6.clone()])?;
    FormalExpansion::new(apply_rule(find_rule("f22-partial-expand")?, &lhs)?)
}

/// Splits the first Whittaker slot that is a free summed symbol into its zero and
/// nonzero parts.
fn split_free_sum(t: &FormalTerm) -> Result<Option<(FormalTerm, FormalTerm)>> {
    if !t.kind.is_whittaker() {
        return Ok(None);
    }
    let Some((k, s)) = t.slots.iter().enumerate().find_map(|(k, s)| match s {
        Slot::FreeSym(v) if t.sums.get(v) == Some(&Domain::Free) => Some((k, v.clone())),
        _ => None,
    }) else {
        return Ok(None);
    };
    let mut zero = t.substitute(&BTreeMap::from([(s.clone(), super::poly::Poly::zero())]))?;
    zero.sums.remove(&s);
    let mut nz = t.clone();
    nz.sums.insert(s.clone(), Domain::NonZero);
    nz.slots[k] = Slot::NonZeroSym(s);
    Ok(Some((zero, nz)))
}

fn split_all(t: &FormalTerm, out: &mut Vec<FormalTerm>) -> Result<()> {
    match split_free_sum(t)? {
        Some((a, b)) => {
            split_all(&a, out)?;
            split_all(&b, out)
        }
        None => {
            out.push(t.clone());
            Ok(())
        }
    }
}

/// Whether some completion of the undetermined slots lands inside the wavefront set.
fn admitted(t: &FormalTerm, rep: &Rep) -> Result<bool> {
    if !t.kind.is_whittaker() {
        return rep.admits(&t.orbit()?);
    }
    let pattern: Vec<Option<bool>> = t.slots.iter().map(Slot::is_nonzero).collect();
    let open: Vec<usize> = (0..pattern.len()).filter(|&i| pattern[i].is_none()).collect();
    for mask in 0..(1u32 << open.len()) {
        let mut p: Vec<bool> = pattern.iter().map(|x| x.unwrap_or(false)).collect();
        for (b, &i) in open.iter().enumerate() {
            p[i] = mask >> b & 1 == 1;
        }
        if rep.admits(&super::term::orbit_of_whittaker_charges(&t.kind, &p)?)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Drop every term whose orbit lies outside the closure of the wavefront orbit.
/// Free summed Whittaker charges are split into zero and nonzero parts first; other
/// undetermined charges keep the term when any assignment would.
pub fn apply_representation_filter(exp: &FormalExpansion, rep: &Rep) -> Result<FormalExpansion> {
    if *rep == Rep::Generic {
        return exp.canonical();
    }
    let mut pieces = Vec::new();
    for t in &exp.terms {
        split_all(t, &mut pieces)?;
    }
    let mut kept = Vec::new();
    for t in pieces {
        if admitted(&t, rep)? {
            kept.push(t);
        }
    }
    FormalExpansion::new(kept)
}

fn whittaker_groups(n: usize) -> Result<Vec<(Partition, Vec<FormalTerm>)>> {
    let w4 = |s: &[&str], sums: &[&str]| term(Kind::WN4, s).map(|t| t.sum(sums));
    let wp = |s: &[&str], sums: &[&str]| term(Kind::WNprime4, s).map(|t| t.sum(sums));
    let w3 = |s: &[&str], sums: &[&str]| term(Kind::WN3, s).map(|t| t.sum(sums));
    Ok(match n {
        3 => vec![
            (Partition::of(&[1, 1, 1]), vec![w3(&["0", "0"], &[])?]),
            (
                Partition::of(&[2, 1]),
                vec![
                    w3(&["m'", "0"], &["m'"])?,
                    w3(&["0", "m'"], &["m'"])?,
                    term(Kind::WZ3, &["k'"])?.sum(&["k'"]),
                ],
            ),
            (Partition::of(&[3]), vec![w3(&["m'", "n'"], &["m'", "n'"])?]),
        ],
        4 => vec![
            (Partition::of(&[1, 1, 1, 1]), vec![w4(&["0", "0", "0"], &[])?]),
            (
                Partition::of(&[2, 1, 1]),
                vec![
                    w4(&["m'", "0", "0"], &["m'"])?,
                    w4(&["0", "m'", "0"], &["m'"])?,
                    w4(&["0", "0", "m'"], &["m'"])?,
                    wp(&["m'", "0", "0"], &["m'"])?,
                    wp(&["0", "0", "m'"], &["m'"])?,
                    wp(&["n", "m'", "k"], &["n", "m'", "k"])?,
                ],
            ),
            (
                Partition::of(&[2, 2]),
                vec![w4(&["m'", "0", "n'"], &["m'", "n'"])?, wp(&["m'", "0", "n'"], &["m'", "n'"])?],
            ),
            (
                Partition::of(&[3, 1]),
                vec![w4(&["m'", "n'", "0"], &["m'", "n'"])?, w4(&["0", "m'", "n'"], &["m'", "n'"])?],
            ),
            (Partition::of(&[4]), vec![w4(&["m'", "n'", "k'"], &["m'", "n'", "k'"])?]),
        ],
        _ => return domain(format!("Eisenstein expansion is implemented for n = 3, 4, not {n}")),
    })
}

/// The orbit-grouped expansion of the Eisenstein series, each group rewritten through
/// the table and filtered by `rep`.
pub fn expand_eisenstein(n: usize, rep: &Rep) -> Result<BTreeMap<Partition, FormalExpansion>> {
    let mut out = BTreeMap::new();
    for (orbit, ws) in whittaker_groups(n)? {
        let mut group = FormalExpansion::empty();
        for w in &ws {
            group.extend(whittaker_to_orbit(w)?)?;
        }
        out.insert(orbit, apply_representation_filter(&group, rep)?);
    }
    Ok(out)
}

/// F_min of SL(3) in the minimal representation.
pub fn sl3_fmin_min_rep(charge: &Slot) -> Result<FormalExpansion> {
    let lhs = FormalExpansion::new(vec![FormalTerm::new(Kind::Fmin3, vec![charge.clone()])?])?;
    apply_representation_filter(&rewrite(&lhs, "sl3-fmin-orbit-sum")?, &Rep::minimal(3)?)
}

/// F_(211) of SL(4) in the minimal representation.
pub fn sl4_min_rep(charge: &Slot, strategy: Strategy) -> Result<FormalExpansion> {
    apply_representation_filter(&expand_f212(charge, strategy)?, &Rep::minimal(4)?)
}

/// F_(211) of SL(4) in the next-to-minimal representation: the surviving F_(22) terms
/// are summed over the Levi family, put in partially summed form and expanded again.
pub fn sl4_ntm(charge: &Slot) -> Result<FormalExpansion> {
    let ntm = Rep::next_to_minimal(4)?;
    let e = apply_representation_filter(&expand_f212(charge, Strategy::Alpha2)?, &ntm)?;
    let e = rewrite(&e, "f22-levi-sum")?;
    let e = rewrite(&e, "f22-partial-expand")?;
    apply_representation_filter(&e, &ntm)
}

/// The SL(3) maximal parabolic coefficient F_U(m1, m2) in the minimal representation,
/// reduced to a single Whittaker vector.
pub fn sl3_fu_min_rep(m1: &Slot, m2: &Slot) -> Result<FormalExpansion> {
    let t = FormalTerm::new(Kind::FU3, vec![m1.clone(), m2.clone()])?;
    let first = if m2.is_nonzero() == Some(true) {
        "sl3-fu-reduce"
    } else if m1.is_nonzero() == Some(true) {
        "sl3-fu-reduce-swap"
    } else {
        return domain("F_U needs a nonzero charge");
    };
    let mut e = FormalExpansion::new(vec![t])?;
    for r in [first, "sl3-fu-canonical", "sl3-fmin-orbit-sum"] {
        e = rewrite(&e, r)?;
    }
    let e = apply_representation_filter(&e, &Rep::minimal(3)?)?;
    rewrite(&e, "sl3-fu-whittaker")
}

/// Coefficients exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    F211,
    F22,
    Fmin3,
}

impl FromStr for Coefficient {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F212" | "F211" => Ok(Coefficient::F211),
            "F22" => Ok(Coefficient::F22),
            "Fmin3" => Ok(Coefficient::Fmin3),
            _ => domain(format!("unknown coefficient '{s}' (expected F212, F22 or Fmin3)")),
        }
    }
}

impl Coefficient {
    pub fn n(&self) -> usize {
        match self {
            Coefficient::Fmin3 => 3,
            _ => 4,
        }
    }
}

/// Expansion of a coefficient with generic symbolic charges under a representation.
pub fn expand_coefficient(c: Coefficient, rep: &Rep, strategy: Strategy) -> Result<FormalExpansion> {
    match c {
        Coefficient::F211 => {
            let charge = Slot::nz(match strategy {
                Strategy::Alpha1 => "m1'",
                Strategy::Alpha2 => "m4'",
                Strategy::Alpha3 => "m6'",
            });
            if strategy == Strategy::Alpha2 && *rep == Rep::next_to_minimal(4)? {
                return sl4_ntm(&charge);
            }
            apply_representation_filter(&expand_f212(&charge, strategy)?, rep)
        }
        Coefficient::F22 => {
            let e = partial_sum_form(&[Slot::nz("m1'"), Slot::free("m2"), Slot::free("m3"), Slot::free("m4")])?;
            apply_representation_filter(&rewrite(&e, "f22-partial-expand")?, rep)
        }
        Coefficient::Fmin3 => {
            let lhs = FormalExpansion::new(vec![FormalTerm::new(Kind::Fmin3, vec![Slot::nz("m1'")])?])?;
            apply_representation_filter(&rewrite(&lhs, "sl3-fmin-orbit-sum")?, rep)
        }
    }
}
