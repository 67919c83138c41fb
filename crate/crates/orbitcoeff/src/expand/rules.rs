//! The rewrite-rule registry with derivations.
//!
//! Derivations are assembled with a small builder that tracks the integrand while the
//! steps are written down; the coordinate substitutions it emits are solved from the
//! target shape. The stored steps are then checked from scratch by the verifier.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use super::poly::Poly;
use super::polymatrix::PolyMatrix;
use super::term::{Domain, FormalTerm, Kind, Slot};
use super::verify::{standard_integrand, RewriteRule, RuleFamily, State, Step};
use crate::error::{Error, Result};
use crate::orbits::{Partition, Pos};

fn domain_of(name: &str) -> Domain {
    if name.ends_with('\'') {
        Domain::NonZero
    } else {
        Domain::Free
    }
}

/// "0" is Zero, a primed name is NonZeroSym, a bare name FreeSym, anything else an
/// expression; expressions that are monomials in primed names count as nonzero.
pub(crate) fn slot(s: &str) -> Result<Slot> {
    let p = Poly::parse(s)?;
    if p.is_zero() {
        return Ok(Slot::Zero);
    }
    if let Some(c) = p.as_constant() {
        return Ok(Slot::Value(c));
    }
    if let Some(v) = p.as_var() {
        return Ok(if v.ends_with('\'') { Slot::NonZeroSym(v) } else { Slot::FreeSym(v) });
    }
    let nonzero = p.as_monomial().is_some_and(|(_, m)| m.iter().all(|(v, _)| v.ends_with('\'')));
    Ok(Slot::Expr { poly: p, nonzero })
}

pub(crate) fn term(kind: Kind, slots: &[&str]) -> Result<FormalTerm> {
    FormalTerm::new(kind, slots.iter().map(|s| slot(s)).collect::<Result<_>>()?)
}

/// Slot from the naming convention: "0", a primed name (nonzero), a bare name (free),
/// a number, or an expression.
pub fn parse_slot(s: &str) -> Result<Slot> {
    slot(s)
}

/// Term with slots written in the `parse_slot` convention.
pub fn parse_term(kind: Kind, slots: &[&str]) -> Result<FormalTerm> {
    term(kind, slots)
}

pub(crate) trait TermExt: Sized {
    fn tr(self, m: &PolyMatrix) -> Self;
    fn sum(self, names: &[&str]) -> Self;
    fn int(self, names: &[&str]) -> Self;
}

impl TermExt for FormalTerm {
    fn tr(mut self, m: &PolyMatrix) -> Self {
        self.translate.push(m.clone());
        self
    }

    fn sum(mut self, names: &[&str]) -> Self {
        for n in names {
            self.sums.insert(n.to_string(), domain_of(n));
        }
        self
    }

    fn int(mut self, names: &[&str]) -> Self {
        for n in names {
            self.integrals.insert(n.to_string());
        }
        self
    }
}

pub(crate) fn mat(spec: &str) -> PolyMatrix {
    PolyMatrix::parse(spec).expect("well-formed matrix literal")
}

/// Unipotent I + sum name*E_pos.
pub(crate) fn uni(n: usize, coords: &[(Pos, &str)]) -> PolyMatrix {
    PolyMatrix::unipotent(n, &coords.iter().map(|(p, v)| (*p, Poly::var(v))).collect::<Vec<_>>())
}

enum F<'a> {
    C(&'a [Pos]),
    M(PolyMatrix),
    Right,
}

struct Deriv {
    state: State,
    steps: Vec<Step>,
    right: PolyMatrix,
    counter: usize,
}

fn build_err(e: super::verify::Failure) -> Error {
    e.into_error()
}

impl Deriv {
    fn new(lhs: &FormalTerm, params: &BTreeMap<String, Domain>) -> Result<Self> {
        let state = standard_integrand(lhs, params)?;
        let n = lhs.kind.n();
        let right = lhs.translate.iter().fold(PolyMatrix::identity(n), |acc, m| &acc * m);
        Ok(Deriv { state, steps: vec![], right, counter: 0 })
    }

    fn fresh(&mut self, stem: &str, pos: Pos) -> String {
        self.counter += 1;
        format!("{stem}{}_{}{}", self.counter, pos.0, pos.1)
    }

    fn step(&mut self, s: Step) -> Result<()> {
        self.state.apply(&s).map_err(build_err)?;
        self.steps.push(s);
        Ok(())
    }

    fn expand(&mut self, pos: Pos, sum: &str) -> Result<String> {
        let var = self.fresh("e", pos);
        self.step(Step::expand(pos, &var, sum))?;
        Ok(var)
    }

    fn reparam(&mut self, old: &str, new: &str, scale: &str, shift: &str) -> Result<()> {
        self.step(Step::reparam(old, new, scale, shift)?)
    }

    /// Bring the integrand to the product of `factors` after translating by `gamma`;
    /// returns the fresh names of every coordinate factor.
    fn reach(&mut self, gamma: Option<PolyMatrix>, factors: Vec<F>) -> Result<Vec<BTreeMap<Pos, String>>> {
        let n = self.state.elem.size();
        let mut names = Vec::new();
        let mut mats = Vec::new();
        for f in factors {
            match f {
                F::C(ps) => {
                    let map: BTreeMap<Pos, String> = ps.iter().map(|p| (*p, self.fresh("c", *p))).collect();
                    let coords: Vec<(Pos, &str)> = map.iter().map(|(p, v)| (*p, v.as_str())).collect();
                    mats.push(uni(n, &coords));
                    names.push(map);
                }
                F::M(m) => mats.push(m),
                F::Right => mats.push(self.right.clone()),
            }
        }
        let target = mats.iter().fold(PolyMatrix::identity(n), |acc, m| &acc * m);
        let g = gamma.clone().unwrap_or_else(|| PolyMatrix::identity(n));
        let rinv = self.right.inverse()?;
        let goal = &(&g.inverse()? * &target) * &rinv;
        let cur = &self.state.elem * &rinv;
        let sigma = solve(&cur, &goal, &self.state.ints)?;
        self.step(Step::Subst(sigma))?;
        if let Some(g) = gamma {
            self.step(Step::LeftMul(g))?;
        }
        self.right = mats[1..].iter().fold(PolyMatrix::identity(n), |acc, m| &acc * m);
        Ok(names)
    }

    fn split(
        &mut self,
        sum: &str,
        nonzero: &str,
        zero: impl FnOnce(&mut Deriv) -> Result<()>,
        nz: impl FnOnce(&mut Deriv) -> Result<()>,
    ) -> Result<()> {
        let (zs, ns) = self.state.split("split", sum, nonzero).map_err(build_err)?;
        let mut zd = Deriv { state: zs, steps: vec![], right: self.right.clone(), counter: self.counter };
        zero(&mut zd)?;
        let mut nd = Deriv { state: ns, steps: vec![], right: self.right.clone(), counter: zd.counter };
        nz(&mut nd)?;
        self.steps.push(Step::Split {
            sum: sum.into(),
            nonzero: nonzero.into(),
            zero_branch: zd.steps,
            nonzero_branch: nd.steps,
        });
        Ok(())
    }
}

/// Solve sigma(cur) = goal for the integration variables of `cur`, peeling entries that
/// contain a single unsolved variable linearly.
fn solve(cur: &PolyMatrix, goal: &PolyMatrix, ints: &BTreeSet<String>) -> Result<Vec<(String, Poly)>> {
    let mut unsolved: BTreeSet<String> = cur.vars().intersection(ints).cloned().collect();
    let mut sigma: BTreeMap<String, Poly> = BTreeMap::new();
    while !unsolved.is_empty() {
        let mut progress = false;
        for (i, j, e) in cur.entries() {
            let open: Vec<&String> = unsolved.iter().filter(|v| e.contains(v)).collect();
            if open.len() != 1 {
                continue;
            }
            let v = open[0].clone();
            if e.degree_range(&v) != (0, 1) {
                continue;
            }
            let c = e.coeff(&v, 1);
            if c.as_constant().is_none() {
                continue;
            }
            let rest = (e - &(&c * &Poly::var(&v))).substitute_all(&sigma)?;
            let value = &(goal.get(i, j) - &rest) * &c.inverse()?;
            sigma.insert(v.clone(), value);
            unsolved.remove(&v);
            progress = true;
        }
        if !progress {
            return Err(Error::Invariant(format!("cannot solve for {unsolved:?}")));
        }
    }
    let got = cur.substitute_all(&sigma)?;
    if got != *goal {
        return Err(Error::Invariant(format!("target shape unreachable: {got} vs {goal}")));
    }
    Ok(sigma.into_iter().collect())
}

fn params_of(lhs: &FormalTerm) -> BTreeMap<String, Domain> {
    lhs.free_symbols().into_iter().map(|s| { let d = domain_of(&s); (s, d) }).collect()
}

fn rule(
    name: &str,
    family: RuleFamily,
    description: &str,
    lhs: FormalTerm,
    rhs: Vec<FormalTerm>,
    derive: impl FnOnce(&mut Deriv) -> Result<()>,
) -> Result<RewriteRule> {
    let params = params_of(&lhs);
    let mut d = Deriv::new(&lhs, &params)?;
    derive(&mut d).map_err(|e| Error::Invariant(format!("rule {name}: {e}")))?;
    Ok(RewriteRule {
        name: name.into(),
        family,
        description: description.into(),
        params,
        lhs,
        rhs,
        derivation: d.steps,
    })
}

fn p(parts: &[usize]) -> Kind {
    Kind::Forbit(Partition::of(parts))
}

const N4: [Pos; 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
const V22: [Pos; 4] = [(1, 3), (1, 4), (2, 3), (2, 4)];
const V31: [Pos; 5] = [(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)];
const NPRIME: [Pos; 3] = [(1, 3), (1, 4), (2, 4)];

/// Levi family summed in the (2,1,1) expansion along the (2,2) parabolic.
pub fn levi_22(a: &str, b: &str) -> PolyMatrix {
    mat(&format!("0,1,0,0;1,{a},0,0;0,0,0,1;0,0,1,{b}"))
}

/// Levi family summed in the partially summed (2,2) expansion.
pub fn levi_31(a: &str) -> PolyMatrix {
    mat(&format!("-1,0,0,0;0,0,1,0;0,1,{a},0;0,0,0,1"))
}

/// SL(3) family l(n) of the minimal-orbit expansion.
pub fn levi_sl3(n: &str) -> PolyMatrix {
    mat(&format!("-1,0,0;0,0,-1;0,-1,{n}"))
}

fn table_rules() -> Result<Vec<RewriteRule>> {
    use RuleFamily::WhittakerToOrbit as W;
    let mut out = Vec::new();

    out.push(rule(
        "sl4-wn-generic",
        W,
        "W_N(m1',m4',m6') is the regular orbit coefficient",
        term(Kind::WN4, &["m1'", "m4'", "m6'"])?,
        vec![term(p(&[4]), &["m1'", "m4'", "m6'"])?],
        |_| Ok(()),
    )?);
    out.push(rule(
        "sl4-wn-constant",
        W,
        "W_N(0,0,0) is the constant term",
        term(Kind::WN4, &["0", "0", "0"])?,
        vec![term(Kind::ConstantTerm(4), &[])?],
        |_| Ok(()),
    )?);

    let w = mat("1,0,0,0;0,0,0,-1;0,0,1,0;0,1,0,0");
    let trail = [(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    out.push(rule(
        "sl4-wn-m1",
        W,
        "W_N(m1',0,0) through F_(211)",
        term(Kind::WN4, &["m1'", "0", "0"])?,
        vec![term(p(&[2, 1, 1]), &["m1'"])?
            .tr(&w)
            .tr(&uni(4, &[((1, 3), "u2"), ((1, 4), "u3"), ((2, 3), "u4"), ((2, 4), "u5"), ((3, 4), "u6")]))
            .int(&["u2", "u3", "u4", "u5", "u6"])],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 4)]), F::M(w.clone()), F::C(&trail)]).map(|_| ()),
    )?);

    let w = mat("0,1,0,0;1,0,0,0;0,0,0,1;0,0,1,0");
    let trail = [(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)];
    out.push(rule(
        "sl4-wn-m4",
        W,
        "W_N(0,m4',0) through F_(211)",
        term(Kind::WN4, &["0", "m4'", "0"])?,
        vec![term(p(&[2, 1, 1]), &["m4'"])?
            .tr(&w)
            .tr(&uni(4, &[((1, 2), "u1"), ((1, 3), "u2"), ((1, 4), "u3"), ((2, 4), "u5"), ((3, 4), "u6")]))
            .int(&["u1", "u2", "u3", "u5", "u6"])],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 4)]), F::M(w.clone()), F::C(&trail)]).map(|_| ()),
    )?);

    let w = mat("0,0,1,0;0,1,0,0;-1,0,0,0;0,0,0,1");
    let trail = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)];
    out.push(rule(
        "sl4-wn-m6",
        W,
        "W_N(0,0,m6') through F_(211)",
        term(Kind::WN4, &["0", "0", "m6'"])?,
        vec![term(p(&[2, 1, 1]), &["m6'"])?
            .tr(&w)
            .tr(&uni(4, &[((1, 2), "u1"), ((1, 3), "u2"), ((1, 4), "u3"), ((2, 3), "u4"), ((2, 4), "u5")]))
            .int(&["u1", "u2", "u3", "u4", "u5"])],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 4)]), F::M(w.clone()), F::C(&trail)]).map(|_| ()),
    )?);

    let w = mat("1,0,0,0;0,1,0,0;0,0,0,-1;0,0,1,0");
    out.push(rule(
        "sl4-wn-m1-m4",
        W,
        "W_N(m1',m4',0) through a sum of F_(31)",
        term(Kind::WN4, &["m1'", "m4'", "0"])?,
        vec![term(p(&[3, 1]), &["m1'", "0", "m4'", "m"])?
            .tr(&w)
            .tr(&uni(4, &[((2, 4), "u5"), ((3, 4), "u6")]))
            .sum(&["m"])
            .int(&["u5", "u6"])],
        |d| {
            d.step(Step::SignFlip("x14".into()))?;
            d.reach(Some(w.clone()), vec![F::C(&[(1, 2), (1, 3), (1, 4), (2, 4)]), F::M(w.clone()), F::C(&[(2, 4), (3, 4)])])?;
            d.expand((3, 4), "m")?;
            Ok(())
        },
    )?);

    let w = mat("0,1,0,0;-1,0,0,0;0,0,1,0;0,0,0,1");
    out.push(rule(
        "sl4-wn-m4-m6",
        W,
        "W_N(0,m4',m6') through a sum of F_(31)",
        term(Kind::WN4, &["0", "m4'", "m6'"])?,
        vec![term(p(&[3, 1]), &["m", "m4'", "0", "m6'"])?
            .tr(&w)
            .tr(&uni(4, &[((1, 2), "u1"), ((1, 3), "u2")]))
            .sum(&["m"])
            .int(&["u1", "u2"])],
        |d| {
            d.reach(Some(w.clone()), vec![F::C(&[(1, 3), (1, 4), (2, 4), (3, 4)]), F::M(w.clone()), F::C(&[(1, 2), (1, 3)])])?;
            d.expand((1, 2), "m")?;
            d.reach(None, vec![F::C(&V31), F::Right])?;
            Ok(())
        },
    )?);

    let w = mat("-1,0,0,0;0,0,1,0;0,1,0,0;0,0,0,1");
    out.push(rule(
        "sl4-wn-m1-m6",
        W,
        "W_N(m1',0,m6') through a sum of F_(22)",
        term(Kind::WN4, &["m1'", "0", "m6'"])?,
        vec![term(p(&[2, 2]), &["-m1'", "0", "m", "m6'"])?
            .tr(&w)
            .tr(&uni(4, &[((1, 3), "u2"), ((2, 3), "u4"), ((2, 4), "u5")]))
            .sum(&["m"])
            .int(&["u2", "u4", "u5"])],
        |d| {
            d.reach(Some(w.clone()), vec![F::C(&[(1, 3), (1, 4), (2, 4)]), F::M(w.clone()), F::C(&[(1, 3), (2, 3), (2, 4)])])?;
            d.expand((2, 3), "m")?;
            Ok(())
        },
    )?);

    let w = mat("1,0,0,0;0,1,0,0;0,0,0,-1;0,0,1,0");
    out.push(rule(
        "sl4-wnprime-m1",
        W,
        "W_N'(m1',0,0) through F_(211)",
        term(Kind::WNprime4, &["m1'", "0", "0"])?,
        vec![term(p(&[2, 1, 1]), &["m1'"])?
            .tr(&w)
            .tr(&uni(4, &[((1, 4), "u2"), ((2, 4), "u3")]))
            .int(&["u2", "u3"])],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 4)]), F::M(w.clone()), F::C(&[(1, 4), (2, 4)])]).map(|_| ()),
    )?);

    let w = mat("0,1,0,0;-1,0,0,0;0,0,1,0;0,0,0,1");
    out.push(rule(
        "sl4-wnprime-m3",
        W,
        "W_N'(0,0,m3') through F_(211)",
        term(Kind::WNprime4, &["0", "0", "m3'"])?,
        vec![term(p(&[2, 1, 1]), &["m3'"])?
            .tr(&w)
            .tr(&uni(4, &[((1, 3), "u1"), ((1, 4), "u2")]))
            .int(&["u1", "u2"])],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 4)]), F::M(w.clone()), F::C(&[(1, 3), (1, 4)])]).map(|_| ()),
    )?);

    out.push(rule(
        "sl4-wnprime-m1-m3",
        W,
        "W_N'(m1',0,m3') as a sum of F_(22)",
        term(Kind::WNprime4, &["m1'", "0", "m3'"])?,
        vec![term(p(&[2, 2]), &["m1'", "0", "m", "m3'"])?.sum(&["m"])],
        |d| d.expand((2, 3), "m").map(|_| ()),
    )?);

    let l = mat("1,m3/m2',0,0;0,1,0,0;0,0,1,-m1/m2';0,0,0,1");
    out.push(rule(
        "sl4-wnprime-m2",
        W,
        "W_N'(m1,m2',m3) through F_(211) with a Levi translate",
        term(Kind::WNprime4, &["m1", "m2'", "m3"])?,
        vec![term(p(&[2, 1, 1]), &["m2'"])?
            .tr(&uni(4, &[((1, 3), "u1"), ((2, 4), "u3")]))
            .tr(&l)
            .int(&["u1", "u3"])],
        |d| d.reach(Some(l.clone()), vec![F::C(&[(1, 4)]), F::C(&[(1, 3), (2, 4)]), F::M(l.clone())]).map(|_| ()),
    )?);

    // SL(3)
    out.push(rule(
        "sl3-w-regular",
        W,
        "W(m',n') is the regular orbit coefficient",
        term(Kind::WN3, &["m'", "n'"])?,
        vec![term(Kind::Freg3, &["m'", "n'"])?],
        |_| Ok(()),
    )?);
    let w = mat("-1,0,0;0,0,-1;0,-1,0");
    out.push(rule(
        "sl3-w-other-min",
        W,
        "W(m',0) through F_min with a unipotent integral",
        term(Kind::WN3, &["m'", "0"])?,
        vec![term(Kind::Fmin3, &["m'"])?
            .tr(&w)
            .tr(&uni(3, &[((1, 3), "u2"), ((2, 3), "u3")]))
            .int(&["u2", "u3"])],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 3)]), F::M(w.clone()), F::C(&[(1, 3), (2, 3)])]).map(|_| ()),
    )?);
    let w = mat("0,-1,0;-1,0,0;0,0,-1");
    out.push(rule(
        "sl3-w-other-min-second",
        W,
        "W(0,n') through F_min with a unipotent integral",
        term(Kind::WN3, &["0", "n'"])?,
        vec![term(Kind::Fmin3, &["n'"])?
            .tr(&w)
            .tr(&uni(3, &[((1, 2), "u1"), ((1, 3), "u2")]))
            .int(&["u1", "u2"])],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 3)]), F::M(w.clone()), F::C(&[(1, 2), (1, 3)])]).map(|_| ()),
    )?);
    out.push(rule(
        "sl3-wz",
        W,
        "the non-abelian coefficient W_Z(k') is F_min(k')",
        term(Kind::WZ3, &["k'"])?,
        vec![term(Kind::Fmin3, &["k'"])?],
        |_| Ok(()),
    )?);
    out.push(rule(
        "sl3-w-constant",
        W,
        "W(0,0) is the constant term",
        term(Kind::WN3, &["0", "0"])?,
        vec![term(Kind::ConstantTerm(3), &[])?],
        |_| Ok(()),
    )?);
    Ok(out)
}

fn expansion_rules() -> Result<Vec<RewriteRule>> {
    use RuleFamily::OrbitExpansion as O;
    let mut out = Vec::new();

    let l22 = levi_22("a", "b");
    out.push(rule(
        "f211-expand-alpha2",
        O,
        "F_(211) expanded along the (2,2) parabolic",
        term(p(&[2, 1, 1]), &["m4'"])?,
        vec![
            term(p(&[2, 2]), &["0", "m3'", "m4'", "0"])?.tr(&l22).sum(&["a", "b", "m3'"]),
            term(Kind::WN4, &["m1", "m4'", "m6"])?.tr(&l22).sum(&["a", "b", "m1", "m6"]),
        ],
        |d| {
            d.expand((1, 3), "m5")?;
            d.expand((2, 3), "m3")?;
            d.expand((2, 4), "m2")?;
            d.reparam("m2", "a", "m4'", "0")?;
            d.reparam("m5", "b", "-m4'", "0")?;
            d.reach(Some(l22.clone()), vec![F::C(&V22), F::M(l22.clone())])?;
            d.reparam("m3", "m3''", "1", "-m4'*a*b")?;
            d.split(
                "m3''",
                "m3'",
                |z| {
                    z.expand((1, 2), "m1")?;
                    z.expand((3, 4), "m6")?;
                    z.reach(None, vec![F::C(&N4), F::Right]).map(|_| ())
                },
                |_| Ok(()),
            )
        },
    )?);

    let l1 = mat("1,0,0,0;0,0,0,1;0,0,1,b;0,-1,0,a");
    let l2 = mat("1,0,0,0;0,1,0,0;0,0,1,0;0,0,c,1");
    let w = mat("1,0,0,0;0,1,0,0;0,0,0,1;0,0,-1,0");
    let y5 = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)];
    out.push(rule(
        "f211-expand-alpha1",
        O,
        "F_(211) expanded along the first maximal parabolic",
        term(p(&[2, 1, 1]), &["m1'"])?,
        vec![
            term(Kind::WN4, &["m1'", "m4'", "m6"])?.tr(&(&l2 * &l1)).sum(&["a", "b", "c", "m4'", "m6"]),
            term(Kind::WN4, &["m1'", "m5", "m6"])?.tr(&(&w * &l1)).sum(&["a", "b", "m5", "m6"]),
        ],
        |d| {
            d.expand((1, 3), "m2")?;
            d.expand((1, 2), "m3")?;
            d.reparam("m3", "a", "m1'", "0")?;
            d.reparam("m2", "b", "-m1'", "0")?;
            d.reach(Some(l1.clone()), vec![F::C(&[(1, 2), (1, 3), (1, 4)]), F::M(l1.clone())])?;
            d.expand((2, 3), "m4")?;
            d.expand((2, 4), "m5")?;
            d.split(
                "m4",
                "m4'",
                |z| {
                    z.reach(Some(w.clone()), vec![F::C(&y5), F::M(w.clone()), F::Right])?;
                    z.expand((3, 4), "m6")?;
                    z.reach(None, vec![F::C(&N4), F::Right]).map(|_| ())
                },
                |nz| {
                    nz.reparam("m5", "c", "-m4'", "0")?;
                    nz.reach(Some(l2.clone()), vec![F::C(&y5), F::M(l2.clone()), F::Right])?;
                    nz.expand((3, 4), "m6")?;
                    nz.reach(None, vec![F::C(&N4), F::Right]).map(|_| ())
                },
            )
        },
    )?);

    let d3 = mat("0,-1,0,0;0,0,-1,0;1,a,b,0;0,0,0,1");
    let wp = mat("0,-1,0,0;1,0,0,0;0,0,1,0;0,0,0,1");
    let l = &wp.inverse()? * &d3;
    let k = mat("1,0,0,0;c,1,0,0;0,0,1,0;0,0,0,1");
    let y5 = [(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    out.push(rule(
        "f211-expand-alpha3",
        O,
        "F_(211) expanded along the last maximal parabolic",
        term(p(&[2, 1, 1]), &["m6'"])?,
        vec![
            term(Kind::WN4, &["m1", "m4'", "m6'"])?.tr(&(&k * &l)).sum(&["a", "b", "c", "m4'", "m1"]),
            term(Kind::WN4, &["m1", "m5", "m6'"])?.tr(&d3).sum(&["a", "b", "m5", "m1"]),
        ],
        |d| {
            d.expand((2, 4), "m2")?;
            d.expand((3, 4), "m3")?;
            d.reparam("m2", "a", "m6'", "0")?;
            d.reparam("m3", "b", "m6'", "0")?;
            d.reach(Some(l.clone()), vec![F::C(&[(1, 4), (2, 4), (3, 4)]), F::M(l.clone())])?;
            d.expand((2, 3), "m4")?;
            d.expand((1, 3), "m5")?;
            d.split(
                "m4",
                "m4'",
                |z| {
                    z.reach(Some(wp.clone()), vec![F::C(&y5), F::M(wp.clone()), F::Right])?;
                    z.expand((1, 2), "m1")?;
                    z.reach(None, vec![F::C(&N4), F::Right]).map(|_| ())
                },
                |nz| {
                    nz.reparam("m5", "c", "m4'", "0")?;
                    nz.reach(Some(k.clone()), vec![F::C(&y5), F::M(k.clone()), F::Right])?;
                    nz.expand((1, 2), "m1")?;
                    nz.reach(None, vec![F::C(&N4), F::Right]).map(|_| ())
                },
            )
        },
    )?);

    let l = mat("1,m3/m1',0,0;0,1,0,0;0,0,1,0;0,0,-m2/m1',1");
    let n23 = uni(4, &[((2, 3), "u")]);
    out.push(rule(
        "f22-partial-sum",
        O,
        "F_(22) in partially summed form",
        term(p(&[2, 2]), &["m1'", "m2", "m3", "m4"])?,
        vec![FormalTerm::new(
            Kind::FpartialSum22,
            vec![Slot::nz("m1'"), Slot::Expr { poly: Poly::parse("m4 - m2*m3/m1'")?, nonzero: true }],
        )?
        .tr(&n23)
        .tr(&l)
        .int(&["u"])],
        |d| d.reach(Some(l.clone()), vec![F::C(&NPRIME), F::C(&[(2, 3)]), F::M(l.clone())]).map(|_| ()),
    )?);

    let s = mat("0,1,0,0;-1,0,0,0;0,0,1,0;0,0,0,1");
    let l = &mat("1,-m1/m3',0,0;0,1,0,0;0,0,1,0;0,0,-m4/m3',1") * &s;
    out.push(rule(
        "f22-partial-sum-swapped",
        O,
        "F_(22) in partially summed form after interchanging the first two rows",
        term(p(&[2, 2]), &["m1", "m2", "m3'", "m4"])?,
        vec![FormalTerm::new(
            Kind::FpartialSum22,
            vec![Slot::nz("m3'"), Slot::Expr { poly: Poly::parse("m1*m4/m3' - m2")?, nonzero: true }],
        )?
        .tr(&n23)
        .tr(&l)
        .int(&["u"])],
        |d| d.reach(Some(l.clone()), vec![F::C(&NPRIME), F::C(&[(2, 3)]), F::M(l.clone())]).map(|_| ()),
    )?);

    let a = mat("0,1,0,0;-1,a,0,0;0,0,1,0;0,0,0,1");
    let dmat = mat("-1,0,0,0;0,1,0,0;0,0,0,1;0,0,1,b");
    out.push(rule(
        "f22-levi-sum",
        O,
        "the sum over a of F_(22)(0,p',q',0; l(a,b) g) collapses to a partially summed coefficient",
        term(p(&[2, 2]), &["0", "p'", "q'", "0"])?.tr(&levi_22("a", "b")).sum(&["a"]),
        vec![term(Kind::FpartialSum22, &["-q'", "p'"])?.tr(&dmat)],
        |d| {
            let names = d.reach(Some(a.inverse()?), vec![F::C(&V22), F::M(dmat.clone())])?;
            d.reparam("a", "m", "1/q'", "0")?;
            let v = names[0][&(2, 3)].clone();
            d.step(Step::collapse((2, 3), &v, "m"))
        },
    )?);

    let l31 = levi_31("a");
    out.push(rule(
        "f22-partial-expand",
        O,
        "partially summed F_(22) expanded along the (3,1) parabolic",
        term(Kind::FpartialSum22, &["m1'", "m6'"])?,
        vec![
            term(p(&[3, 1]), &["-m1'", "0", "m5'", "m6'"])?.tr(&l31).sum(&["a", "m5'"]),
            term(Kind::WN4, &["-m1'", "m4", "m6'"])?.tr(&l31).sum(&["a", "m4"]),
        ],
        |d| {
            d.expand((1, 2), "m2")?;
            d.expand((3, 4), "m5")?;
            d.reparam("m2", "a", "-m1'", "0")?;
            d.reach(Some(l31.clone()), vec![F::C(&V31), F::M(l31.clone())])?;
            d.reparam("m5", "m5''", "1", "a*m6'")?;
            d.split(
                "m5''",
                "m5'",
                |z| {
                    z.expand((2, 3), "m4")?;
                    z.reach(None, vec![F::C(&N4), F::Right]).map(|_| ())
                },
                |_| Ok(()),
            )
        },
    )?);

    let w = mat("-1,0,0;0,0,-1;0,-1,0");
    let ln = levi_sl3("n");
    let kk = mat("1,0,0;0,1,0;0,-n,1");
    out.push(rule(
        "sl3-fmin-orbit-sum",
        O,
        "F_min expanded into regular coefficients and Whittaker vectors over l(n)",
        term(Kind::Fmin3, &["m1'"])?,
        vec![
            term(Kind::Freg3, &["m1'", "m3'"])?.tr(&ln).sum(&["n", "m3'"]),
            term(Kind::WN3, &["m1'", "0"])?.tr(&ln).sum(&["n"]),
        ],
        |d| {
            d.reach(Some(w.clone()), vec![F::C(&[(1, 2)]), F::M(w.clone())])?;
            d.expand((1, 3), "m2")?;
            d.reparam("m2", "n", "m1'", "0")?;
            d.reach(Some(kk.clone()), vec![F::C(&[(1, 2), (1, 3)]), F::M(kk.clone()), F::Right])?;
            d.expand((2, 3), "m3")?;
            d.split("m3", "m3'", |_| Ok(()), |_| Ok(()))
        },
    )?);
    Ok(out)
}

fn parabolic_rules() -> Result<Vec<RewriteRule>> {
    use RuleFamily::Parabolic as P;
    let mut out = Vec::new();
    out.push(rule(
        "sl3-fu-canonical",
        P,
        "F_U(0,m') as an integral of F_min",
        term(Kind::FU3, &["0", "m'"])?,
        vec![term(Kind::Fmin3, &["m'"])?.tr(&uni(3, &[((1, 2), "u1")])).int(&["u1"])],
        |_| Ok(()),
    )?);
    let l = mat("1,0,0;0,1,-m1/m2';0,0,1");
    out.push(rule(
        "sl3-fu-reduce",
        P,
        "F_U(m1,m2') moved to the canonical character",
        term(Kind::FU3, &["m1", "m2'"])?,
        vec![term(Kind::FU3, &["0", "m2'"])?.tr(&l)],
        |d| d.reach(Some(l.clone()), vec![F::C(&[(1, 2), (1, 3)]), F::M(l.clone())]).map(|_| ()),
    )?);
    let w = mat("-1,0,0;0,0,-1;0,-1,0");
    out.push(rule(
        "sl3-fu-reduce-swap",
        P,
        "F_U(m1',0) moved to the canonical character",
        term(Kind::FU3, &["m1'", "0"])?,
        vec![term(Kind::FU3, &["0", "m1'"])?.tr(&w)],
        |d| d.reach(Some(w.clone()), vec![F::C(&[(1, 2), (1, 3)]), F::M(w.clone())]).map(|_| ()),
    )?);
    out.push(rule(
        "sl3-fu-whittaker",
        P,
        "the u1 integral over Whittaker vectors keeps only n = 0",
        term(Kind::WN3, &["m'", "0"])?
            .tr(&levi_sl3("n"))
            .tr(&uni(3, &[((1, 2), "u1")]))
            .sum(&["n"])
            .int(&["u1"]),
        vec![term(Kind::WN3, &["m'", "0"])?.tr(&w)],
        |d| {
            d.step(Step::subst(&[("x12", "x12 - n*u1"), ("x13", "x13 - u1")])?)?;
            d.step(Step::OrthoCollapse { var: "u1".into(), sum: "n".into() })
        },
    )?);
    Ok(out)
}

fn build_registry() -> Result<Vec<RewriteRule>> {
    let mut all = table_rules()?;
    all.extend(expansion_rules()?);
    all.extend(parabolic_rules()?);
    Ok(all)
}

/// All registered rules; built once.
pub fn registry() -> &'static [RewriteRule] {
    static REG: OnceLock<Vec<RewriteRule>> = OnceLock::new();
    REG.get_or_init(|| build_registry().expect("rule registry derivations are consistent"))
}

pub fn find_rule(name: &str) -> Result<&'static RewriteRule> {
    registry()
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::Domain(format!("no rule named {name}")))
}

#[cfg(test)]
mod tests {
    use super::super::verify::verify_rewrite_rule;
    use super::*;

    #[test]
    fn every_rule_verifies() {
        let all = build_registry().unwrap();
        for r in &all {
            let rep = verify_rewrite_rule(r);
            assert!(rep.pass, "{}: {} {:?}", r.name, rep.detail, rep.residual);
        }
    }
}
