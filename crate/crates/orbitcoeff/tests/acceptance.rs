use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbitcoeff::characters::{CharacterMatrix, Table2Shape};
use orbitcoeff::exactnum::{self, int, rat, rat_pow, BesselOrder};
use orbitcoeff::expand::*;
use orbitcoeff::orbits::{grading_pieces, jordan_representative, jordan_type, orbit_dimension};
use orbitcoeff::spherical::{self, LocalValue, PAIRS};
use orbitcoeff::{cli, Partition, Rational, RationalMatrix};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn table1() -> Check {
    let argv: Vec<String> = ["orbitcoeff", "orbits", "--n", "4"].iter().map(|s| s.to_string()).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run_with(&argv, &mut out, &mut err);
    ensure(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    let v: serde_json::Value = e(serde_json::from_slice(&out))?;
    let rows = v.as_array().ok_or("not an array")?;
    let got: Vec<(String, u64, Vec<i64>)> = rows
        .iter()
        .map(|r| {
            let w = r["dynkin_weights"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
            (r["partition"].as_str().unwrap().to_string(), r["dimension"].as_u64().unwrap(), w)
        })
        .collect();
    let want = vec![
        ("(4)".to_string(), 12, vec![2, 2, 2]),
        ("(3,1)".to_string(), 10, vec![2, 0, 2]),
        ("(2,2)".to_string(), 8, vec![0, 2, 0]),
        ("(2,1,1)".to_string(), 6, vec![1, 0, 1]),
        ("(1,1,1,1)".to_string(), 0, vec![0, 0, 0]),
    ];
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("5 orbits of sl4".into())
}

fn dual_dimensions() -> Check {
    let mut count = 0;
    for n in 1..=8 {
        for p in Partition::all(n) {
            let pieces = grading_pieces(&p);
            let len = |k: i64| pieces.get(&k).map_or(0, |s| s.len());
            // dim g - dim g_0 - dim g_1, with g_0 counted in sl_n
            let graded = n * n - 1 - (len(0) - 1) - len(1);
            let conj: usize = p.conjugate().parts().iter().map(|c| c * c).sum();
            let by_parts = n * n - conj;
            let lib = e(orbit_dimension(&p))?;
            ensure(graded == by_parts && lib == by_parts, || {
                format!("{p}: graded {graded}, conjugate {by_parts}, library {lib}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} partitions"))
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> RationalMatrix {
    // product of random elementary matrices, determinant 1
    let mut g = RationalMatrix::identity(n);
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = int(rng.gen_range(-3..=3));
        let mut el = RationalMatrix::identity(n);
        el.set(i, j, c);
        g = &g * &el;
    }
    g
}

fn planted_jordan() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let shapes: Vec<Partition> = (1..=5).flat_map(Partition::all).collect();
    let mut nontrivial = 0;
    for k in 0..200 {
        let lambda = &shapes[k % shapes.len()];
        let j = jordan_representative(lambda);
        let g = random_unimodular(lambda.n(), &mut rng);
        let x = &(&g * &j) * &e(g.inverse())?;
        if !g.is_identity() {
            nontrivial += 1;
        }
        let got = e(jordan_type(&x))?;
        ensure(&got == lambda, || format!("planted {lambda}, got {got} for {}", x.to_spec()))?;
    }
    Ok(format!("200 conjugates, {nontrivial} with g != 1"))
}

fn table2() -> Check {
    let mut total = 0usize;
    for shape in Table2Shape::ALL {
        let par = shape.parabolic();
        let k = par.slots().len();
        let target = shape.partition();
        let mut values = vec![-2i64; k];
        loop {
            let charges: Vec<Rational> = values.iter().map(|&v| int(v)).collect();
            let m = e(CharacterMatrix::from_slots(par.clone(), &charges))?;
            let jordan = e(jordan_type(&m.to_matrix()))? == target;
            ensure(shape.predicate(&charges) == jordan, || {
                format!("{target}: charges {values:?} predicate {} jordan {jordan}", !jordan)
            })?;
            total += 1;
            let mut i = 0;
            while i < k && values[i] == 2 {
                values[i] = -2;
                i += 1;
            }
            if i == k {
                break;
            }
            values[i] += 1;
        }
    }
    // (4) again over all of N, charges m1..m6 at (1,2),(1,3),(1,4),(2,3),(2,4),(3,4)
    let upper = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let regular = Partition::of(&[4]);
    for code in 0..5usize.pow(6) {
        let mut x = RationalMatrix::zero(4);
        let mut c = code;
        let mut m = [0i64; 6];
        for (k, &(i, j)) in upper.iter().enumerate() {
            m[k] = (c % 5) as i64 - 2;
            c /= 5;
            x.set(i, j, int(m[k]));
        }
        let predicate = m[0] * m[3] * m[5] != 0;
        let jordan = e(jordan_type(&x))? == regular;
        ensure(predicate == jordan, || format!("(4) on N: charges {m:?} predicate {predicate} jordan {jordan}"))?;
        total += 1;
    }
    Ok(format!("{total} charge tuples, 0 disagreements"))
}

fn rewrite_rules() -> Check {
    let rules = registry();
    for r in rules {
        let rep = verify_rewrite_rule(r);
        ensure(rep.pass, || format!("{}: {}", rep.rule, rep.detail))?;
        let bad = verify_rewrite_rule(&r.mutated());
        ensure(!bad.pass, || format!("mutated {} still verifies", r.name))?;
    }
    Ok(format!("{} rules verify, {} mutants rejected", rules.len(), rules.len()))
}

fn term(kind: Kind, slots: &[&str], tr: &str, sums: &[(&str, Domain)]) -> Result<FormalTerm, String> {
    let mut t = e(parse_term(kind, slots))?;
    if !tr.is_empty() {
        t = t.with_translate(vec![e(PolyMatrix::parse(tr))?]);
    }
    for (s, d) in sums {
        t = t.summed(s, *d);
    }
    Ok(t)
}

fn same(label: &str, got: &FormalExpansion, want: Vec<FormalTerm>) -> Result<(), String> {
    let want = e(FormalExpansion::new(want))?;
    ensure(e(got.alpha_eq(&want))?, || format!("{label}: got {}", expansion_latex(got)))
}

fn endpoints() -> Check {
    use Domain::{Free, NonZero};
    let got = e(sl3_fmin_min_rep(&Slot::nz("m1'")))?;
    same("sl3 min", &got, vec![term(Kind::WN3, &["m1'", "0"], "-1,0,0;0,0,-1;0,-1,n", &[("n", Free)])?])?;

    let cases = [
        (Strategy::Alpha1, ["m'", "0", "0"], "1,0,0,0;0,0,0,1;0,-1,0,a;0,0,-1,b"),
        (Strategy::Alpha2, ["0", "m'", "0"], "0,1,0,0;1,a,0,0;0,0,0,1;0,0,1,b"),
        (Strategy::Alpha3, ["0", "0", "m'"], "0,-1,0,0;0,0,-1,0;1,a,b,0;0,0,0,1"),
    ];
    for (s, slots, l) in cases {
        let got = e(sl4_min_rep(&Slot::nz("m'"), s))?;
        same(s.label(), &got, vec![term(Kind::WN4, &slots, l, &[("a", Free), ("b", Free)])?])?;
    }

    let got = e(sl4_ntm(&Slot::nz("m4'")))?;
    same(
        "sl4 ntm",
        &got,
        vec![
            term(
                Kind::WN4,
                &["m4'", "0", "m3'"],
                "1,0,0,0;0,0,0,1;0,1,0,a;0,0,1,b",
                &[("m3'", NonZero), ("a", Free), ("b", Free)],
            )?,
            term(Kind::WN4, &["0", "m4'", "0"], "0,1,0,0;1,a,0,0;0,0,0,1;0,0,1,b", &[("a", Free), ("b", Free)])?,
        ],
    )?;
    Ok("sl3 min, sl4 min under 3 strategies, sl4 ntm".into())
}

fn euler() -> Check {
    for s in 1..=4 {
        for m in 1..=10_000 {
            let lhs = Rational::from(e(exactnum::divisor_sigma(s, m))?);
            let rhs = e(exactnum::euler_sigma_product(s, m))?;
            ensure(lhs == rhs, || format!("s={s} m={m}: {lhs} vs {rhs}"))?;
        }
    }
    Ok("40000 cases".into())
}

fn factorization() -> Check {
    for (g, r) in PAIRS {
        for m in 1..=500 {
            let rep = e(spherical::verify_factorization(g, r, m))?;
            ensure(rep.pass, || format!("{g} {r} m={m}: {}", rep.detail))?;
        }
    }
    Ok("5 pairs, m <= 500".into())
}

fn close(a: &LocalValue, b: &LocalValue, tol: f64) -> bool {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => x == y,
        _ => {
            let (x, y) = (a.to_f64(), b.to_f64());
            (x - y).abs() <= tol * x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
        }
    }
}

fn random_unit(p: u64, rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let a: i64 = rng.gen_range(-60..=60);
        let b: i64 = rng.gen_range(1..=60);
        if a != 0 && a % p as i64 != 0 && b % p as i64 != 0 {
            return rat(a, b);
        }
    }
}

fn random_power_times_unit(p: u64, rng: &mut ChaCha8Rng) -> Rational {
    let k = rng.gen_range(-3..=3);
    rat_pow(&int(p as i64), k) * random_unit(p, rng)
}

fn casselman_shalika() -> Check {
    let ss = [int(1), int(2), rat(3, 2), rat(7, 10), rat(5, 3)];
    let tol = 1e-12;
    for p in [2u64, 3, 5, 7] {
        for s in &ss {
            let v = e(spherical::cs_whittaker_sl2(s, &int(1), &int(1), p))?;
            let ps = (p as f64).powf(-2.0 * s.to_f64().unwrap());
            let want = match s.denom().is_one() {
                true => LocalValue::Exact(Rational::one() - rat_pow(&int(p as i64), -2 * s.to_integer().to_i64().unwrap())),
                false => LocalValue::Real(1.0 - ps),
            };
            ensure(close(&v, &want, tol), || format!("p={p} s={s}: {v} vs {want}"))?;
            // |m v^2|_p = p
            let m = rat(1, p as i64);
            let z = e(spherical::cs_whittaker_sl2(s, &int(1), &m, p))?;
            ensure(z.exact().is_some_and(Zero::is_zero), || format!("p={p} s={s}: {z} at |m|_p = p"))?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        let mut nonzero = 0;
        for i in 0..100 {
            let s = &ss[i % ss.len()];
            let v = random_power_times_unit(p, &mut rng);
            let m = random_power_times_unit(p, &mut rng);
            let u = random_unit(p, &mut rng);
            let base = e(spherical::cs_whittaker_sl2(s, &v, &m, p))?;
            let by_v = e(spherical::cs_whittaker_sl2(s, &(&v * &u), &m, p))?;
            let by_m = e(spherical::cs_whittaker_sl2(s, &v, &(&m * &u), p))?;
            ensure(close(&base, &by_v, tol) && close(&base, &by_m, tol), || {
                format!("p={p} s={s} v={v} m={m} u={u}: {base} {by_v} {by_m}")
            })?;
            if base.to_f64() != 0.0 {
                nonzero += 1;
            }
        }
        ensure(nonzero > 0, || format!("p={p}: every sample vanished"))?;
    }
    Ok("p in {2,3,5,7}, 100 unit triples each".into())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn bessel() -> Check {
    let grid = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
    };
    let k = |twice: u32, x: f64| e(exactnum::bessel_k(BesselOrder::from_twice(twice), x));
    let mut worst: f64 = 0.0;
    for x in grid(0.01, 50.0, 400) {
        let base = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
        let r1 = rel(k(1, x)?, base);
        let r3 = rel(k(3, x)?, base * (1.0 + 1.0 / x));
        ensure(r1 <= 1e-12 && r3 <= 1e-12, || format!("x={x}: K1/2 rel {r1:e}, K3/2 rel {r3:e}"))?;
        worst = worst.max(r1).max(r3);
    }
    for x in grid(0.1, 50.0, 400) {
        let lhs = k(4, x)?;
        let rhs = k(0, x)? + 2.0 / x * k(2, x)?;
        let r = rel(lhs, rhs);
        ensure(r <= 1e-10, || format!("x={x}: K2 recurrence rel {r:e}"))?;
    }
    Ok(format!("worst half-odd relative error {worst:.1e}"))
}

fn main() {
    let checks: [(&str, Duration, fn() -> Check); 10] = [
        ("1 orbit table for n = 4", Duration::from_secs(1), table1),
        ("2 dual dimension formulas, n <= 8", Duration::from_secs(1), dual_dimensions),
        ("3 planted Jordan conjugates", Duration::from_secs(5), planted_jordan),
        ("4 character predicate vs Jordan attachment", Duration::from_secs(30), table2),
        ("5 rewrite rule verification and mutation", Duration::from_secs(10), rewrite_rules),
        ("6 expansion endpoints", Duration::from_secs(10), endpoints),
        ("7 divisor sums vs Euler products", Duration::from_secs(10), euler),
        ("8 spherical vector factorization", Duration::from_secs(5), factorization),
        ("9 Casselman-Shalika for SL(2)", Duration::from_secs(10), casselman_shalika),
        ("10 Bessel K accuracy", Duration::from_secs(10), bessel),
    ];
    let mut failed = BTreeSet::new();
    for (name, budget, f) in checks {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        match r {
            Ok(msg) if dt <= budget => println!("PASS {name} ({msg}; {:.3}s)", dt.as_secs_f64()),
            Ok(msg) => {
                println!("FAIL {name} ({msg}; {:.3}s exceeds {}s)", dt.as_secs_f64(), budget.as_secs());
                failed.insert(name);
            }
            Err(msg) => {
                println!("FAIL {name}: {msg} ({:.3}s)", dt.as_secs_f64());
                failed.insert(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("{} of 10 criteria failed", failed.len());
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
