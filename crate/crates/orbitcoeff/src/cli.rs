//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or domain error.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::{classify_maximal_parabolic, sl3_parabolic_reduce, CharacterMatrix, ParabolicDescriptor};
use crate::error::{Error, Result};
use crate::exactnum::{divisor_sigma, euler_sigma_product, fmt_rat, is_prime, parse_rat, PAdicPlace, Rational};
use crate::expand::{
    expand_coefficient, expansion_latex, registry, verify_rewrite_rule, CheckReport, Coefficient,
    FormalExpansion, FormalTerm, Rep, Strategy,
};
use crate::matrix::RationalMatrix;
use crate::orbits::{jordan_type, orbit_catalog, orbit_dimension, weighted_dynkin, ExceptionalGroup};
use crate::spherical::{local_spherical, verify_factorization, Realization, SphericalSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Latex,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "orbitcoeff", version, about = "Orbit Fourier coefficients of SL(3)/SL(4) and E-series spherical vectors")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Seed for the randomized parts of sweeps.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nilpotent orbit catalog of sl(n).
    Orbits {
        #[arg(long)]
        n: usize,
    },
    /// Jordan type and orbit data of a nilpotent matrix.
    ClassifyNilpotent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        matrix: String,
    },
    /// Orbit attached to a character on a maximal parabolic.
    ClassifyCharacter(ClassifyCharacter),
    /// Symbolic expansion of an orbit coefficient.
    Expand {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        coefficient: String,
        #[arg(long, default_value = "generic")]
        rep: String,
        #[arg(long, default_value = "alpha2")]
        strategy: String,
    },
    /// Check every registered rewrite rule.
    VerifyRules {
        #[arg(long)]
        n: Option<usize>,
        /// Check copies with one witness entry perturbed instead.
        #[arg(long)]
        mutated: bool,
    },
    /// Evaluate a local spherical vector.
    Spherical {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        place: String,
        #[arg(long)]
        charge: String,
    },
    /// Sweep the Euler factorization over m = 1..mmax.
    VerifyProp {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        mmax: i64,
    },
    /// Compare sigma_s(m) with its Euler product.
    Euler {
        #[arg(long)]
        s: u32,
        #[arg(long, conflicts_with = "mmax", required_unless_present = "mmax")]
        m: Option<i64>,
        #[arg(long)]
        mmax: Option<i64>,
    },
}

#[derive(Args, Debug)]
struct ClassifyCharacter {
    #[arg(long, required_unless_present = "group")]
    alpha: Option<String>,
    #[arg(long, conflicts_with = "alpha")]
    group: Option<String>,
    #[arg(long)]
    charges: String,
    /// Include the conjugator and canonical charges.
    #[arg(long)]
    full: bool,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    realization: String,
}

impl PairArgs {
    fn parse(&self) -> Result<(ExceptionalGroup, Realization)> {
        Ok((flag("--group", self.group.parse())?, flag("--realization", self.realization.parse())?))
    }
}

/// Output of a subcommand before formatting.
struct Output {
    json: Value,
    text: String,
    latex: Option<String>,
    pass: bool,
}

impl Output {
    fn new(value: impl Serialize, text: String) -> Self {
        Output { json: serde_json::to_value(value).expect("serializable output"), text, latex: None, pass: true }
    }

    fn latex(mut self, l: String) -> Self {
        self.latex = Some(l);
        self
    }

    fn pass(mut self, p: bool) -> Self {
        self.pass = p;
        self
    }
}

fn flag<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Domain(m) => Error::Domain(format!("{name}: {m}")),
        other => Error::Domain(format!("{name}: {other}")),
    })
}

fn parse_charges(name: &str, s: &str) -> Result<Vec<Rational>> {
    flag(name, s.split(',').map(|x| parse_rat(x.trim())).collect())
}

fn term_text(t: &FormalTerm) -> String {
    let slots: Vec<String> = t.slots.iter().map(|s| s.value().to_string()).collect();
    let mut s = format!("{}({})", t.kind.label(), slots.join(", "));
    for m in &t.translate {
        s.push_str(&format!(" [{}]", m.to_spec()));
    }
    if !t.sums.is_empty() {
        let names: Vec<String> = t.sums.iter().map(|(k, d)| format!("{k}:{}", d.label())).collect();
        s.push_str(&format!("  sum {}", names.join(" ")));
    }
    if !t.integrals.is_empty() {
        s.push_str(&format!("  int {}", t.integrals.iter().cloned().collect::<Vec<_>>().join(" ")));
    }
    s
}

fn expansion_text(e: &FormalExpansion) -> String {
    if e.is_empty() {
        return "0".into();
    }
    e.terms.iter().map(term_text).collect::<Vec<_>>().join("\n")
}

fn cmd_orbits(n: usize) -> Result<Output> {
    let cat = orbit_catalog(n)?;
    let text = cat
        .iter()
        .map(|r| {
            format!(
                "{:<10} {:<4} dim {:>2}  weights {:?}  stabilizer {}",
                r.partition.to_string(),
                r.bala_carter,
                r.dimension,
                r.dynkin_weights,
                r.stabilizer_type
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let rows: Vec<String> = cat
        .iter()
        .map(|r| {
            let w: Vec<String> = r.dynkin_weights.iter().map(|x| x.to_string()).collect();
            format!("{} & {} & {} & [{}] \\\\", r.partition, r.bala_carter, r.dimension, w.join(","))
        })
        .collect();
    let latex = format!(
        "\\begin{{tabular}}{{llll}}\nOrbit & Bala--Carter & dim & weights \\\\\n{}\n\\end{{tabular}}",
        rows.join("\n")
    );
    Ok(Output::new(&cat, text).latex(latex))
}

fn cmd_classify_nilpotent(n: usize, spec: &str) -> Result<Output> {
    let m = flag("--matrix", RationalMatrix::parse(spec))?;
    if m.size() != n {
        return Err(Error::Domain(format!("--matrix: expected a {n}x{n} matrix, got {0}x{0}", m.size())));
    }
    let p = flag("--matrix", jordan_type(&m))?;
    let v = json!({
        "partition": p,
        "dimension": orbit_dimension(&p)?,
        "dynkin_weights": weighted_dynkin(&p),
    });
    let text = format!("{p}");
    Ok(Output::new(v, text))
}

fn cmd_classify_character(a: &ClassifyCharacter) -> Result<Output> {
    let charges = parse_charges("--charges", &a.charges)?;
    if let Some(g) = &a.group {
        if g != "sl3" {
            return Err(Error::Domain(format!("--group: only sl3 takes a group flag here, got {g:?}")));
        }
        let [m1, m2] = charges.as_slice() else {
            return Err(Error::Domain("--charges: sl3 takes two charges m1,m2".into()));
        };
        let (m, l) = flag("--charges", sl3_parabolic_reduce(m1, m2))?;
        let mut v = json!({ "orbit": "(2,1)" });
        if a.full {
            v["canonical_charge"] = json!(fmt_rat(&m));
            v["conjugator"] = serde_json::to_value(&l).expect("serializable");
        }
        return Ok(Output::new(v, "(2,1)".into()));
    }
    let alpha = a.alpha.as_deref().expect("clap requires --alpha without --group");
    let k: usize = alpha
        .strip_prefix("alpha")
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::Domain(format!("--alpha: expected alpha1, alpha2 or alpha3, got {alpha:?}")))?;
    let par = flag("--alpha", ParabolicDescriptor::maximal(4, k))?;
    let m = flag("--charges", CharacterMatrix::from_slots(par, &charges))?;
    let r = flag("--charges", classify_maximal_parabolic(k, &m))?;
    let mut v = json!({ "orbit": r.orbit });
    if a.full {
        v = serde_json::to_value(&r).expect("serializable");
    }
    Ok(Output::new(v, r.orbit.to_string()))
}

fn cmd_expand(n: usize, coefficient: &str, rep: &str, strategy: &str) -> Result<Output> {
    let c: Coefficient = flag("--coefficient", coefficient.parse())?;
    if c.n() != n {
        return Err(Error::Domain(format!("--n: {coefficient} lives on SL({}), not SL({n})", c.n())));
    }
    let rep = flag("--rep", Rep::parse(rep, n))?;
    let strategy: Strategy = flag("--strategy", strategy.parse())?;
    let e = expand_coefficient(c, &rep, strategy)?;
    Ok(Output::new(&e, expansion_text(&e)).latex(expansion_latex(&e)))
}

fn cmd_verify_rules(n: Option<usize>, mutated: bool) -> Result<Output> {
    if let Some(n) = n {
        if n != 3 && n != 4 {
            return Err(Error::Domain(format!("--n: rules exist for n = 3, 4, got {n}")));
        }
    }
    let rules: Vec<_> = registry().iter().filter(|r| n.map_or(true, |n| r.lhs.kind.n() == n)).collect();
    let reports: Vec<CheckReport> = rules
        .par_iter()
        .map(|r| if mutated { verify_rewrite_rule(&r.mutated()) } else { verify_rewrite_rule(r) })
        .collect();
    let pass = reports.iter().all(|r| r.pass);
    let text = reports
        .iter()
        .map(|r| format!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.rule, r.detail))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output::new(json!({ "pass": pass, "rules": reports }), text).pass(pass))
}

fn parse_place(s: &str) -> Result<PAdicPlace> {
    if s == "inf" {
        return Ok(PAdicPlace::Infinity);
    }
    let p: u64 = s.parse().map_err(|_| Error::Domain(format!("--place: expected a prime or inf, got {s:?}")))?;
    flag("--place", PAdicPlace::finite(p))
}

fn cmd_spherical(pair: &PairArgs, place: &str, charge: &str) -> Result<Output> {
    let (g, r) = pair.parse()?;
    let place = parse_place(place)?;
    let x = flag("--charge", parse_rat(charge))?;
    let spec = SphericalSpec::new(g, r, place)?;
    let v = local_spherical(&spec, &x)?;
    let out = json!({
        "group": g.to_string(),
        "realization": r.to_string(),
        "place": place.to_string(),
        "charge": fmt_rat(&x),
        "value": v,
    });
    Ok(Output::new(out, v.to_string()))
}

/// Local vectors at finite places equal 1 on p-adic units.
fn unit_checks(g: ExceptionalGroup, r: Realization, seed: u64, count: usize) -> Result<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes: Vec<u64> = (2..60).filter(|&p| is_prime(p)).collect();
    let mut bad = Vec::new();
    for _ in 0..count {
        let p = primes[rng.gen_range(0..primes.len())];
        let unit = loop {
            let (a, b) = (rng.gen_range(1..10_000i64), rng.gen_range(1..10_000i64));
            if a % p as i64 != 0 && b % p as i64 != 0 {
                break Rational::new(a.into(), b.into());
            }
        };
        let v = local_spherical(&SphericalSpec::new(g, r, PAdicPlace::Finite(p))?, &unit)?;
        if v.exact() != Some(&Rational::from_integer(1.into())) {
            bad.push(format!("p = {p}, x = {}: {v}", fmt_rat(&unit)));
        }
    }
    Ok(bad)
}

fn cmd_verify_prop(pair: &PairArgs, mmax: i64, seed: u64) -> Result<Output> {
    let (g, r) = pair.parse()?;
    if mmax < 1 {
        return Err(Error::Domain(format!("--mmax: must be at least 1, got {mmax}")));
    }
    let reports = (1..=mmax).into_par_iter().map(|m| verify_factorization(g, r, m)).collect::<Result<Vec<_>>>()?;
    let failures: Vec<_> = reports.iter().filter(|x| !x.pass).collect();
    let units = unit_checks(g, r, seed, 100)?;
    let pass = failures.is_empty() && units.is_empty();
    let v = json!({
        "pair": format!("{g}/{r}"),
        "mmax": mmax,
        "checked": reports.len(),
        "failures": failures,
        "unit_checks": 100,
        "unit_failures": units,
        "pass": pass,
    });
    let text = format!(
        "{} {g}/{r}: {} charges, {} failures, {} unit failures",
        if pass { "PASS" } else { "FAIL" },
        reports.len(),
        failures.len(),
        units.len()
    );
    Ok(Output::new(v, text).pass(pass))
}

fn euler_one(s: u32, m: i64) -> Result<(String, String, bool)> {
    let sigma = Rational::from(divisor_sigma(s, m)?);
    let prod = euler_sigma_product(s, m)?;
    Ok((fmt_rat(&sigma), fmt_rat(&prod), sigma == prod))
}

fn cmd_euler(s: u32, m: Option<i64>, mmax: Option<i64>) -> Result<Output> {
    if let Some(m) = m {
        let (a, b, pass) = flag("--m", euler_one(s, m))?;
        let v = json!({ "s": s, "m": m, "sigma": a, "product": b, "pass": pass });
        return Ok(Output::new(v, format!("sigma_{s}({m}) = {a}, product = {b}")).pass(pass));
    }
    let mmax = mmax.expect("clap requires --m or --mmax");
    if mmax < 1 {
        return Err(Error::Domain(format!("--mmax: must be at least 1, got {mmax}")));
    }
    let rows = (1..=mmax).into_par_iter().map(|m| euler_one(s, m).map(|r| (m, r))).collect::<Result<Vec<_>>>()?;
    let failures: Vec<i64> = rows.iter().filter(|(_, r)| !r.2).map(|(m, _)| *m).collect();
    let pass = failures.is_empty();
    let v = json!({ "s": s, "mmax": mmax, "checked": rows.len(), "failures": failures, "pass": pass });
    let text = format!("{} s = {s}: {} charges, {} failures", if pass { "PASS" } else { "FAIL" }, rows.len(), failures.len());
    Ok(Output::new(v, text).pass(pass))
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Orbits { n } => cmd_orbits(*n),
        Command::ClassifyNilpotent { n, matrix } => cmd_classify_nilpotent(*n, matrix),
        Command::ClassifyCharacter(a) => cmd_classify_character(a),
        Command::Expand { n, coefficient, rep, strategy } => cmd_expand(*n, coefficient, rep, strategy),
        Command::VerifyRules { n, mutated } => cmd_verify_rules(*n, *mutated),
        Command::Spherical { pair, place, charge } => cmd_spherical(pair, place, charge),
        Command::VerifyProp { pair, mmax } => cmd_verify_prop(pair, *mmax, cli.seed),
        Command::Euler { s, m, mmax } => cmd_euler(*s, *m, *mmax),
    }
}

/// Run with argv (program name first), writing to the given streams.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&o.json).expect("json output"),
                Format::Text => o.text,
                Format::Latex => o.latex.unwrap_or(o.text),
            };
            let _ = writeln!(out, "{body}");
            if o.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn run(argv: &[String]) -> i32 {
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
