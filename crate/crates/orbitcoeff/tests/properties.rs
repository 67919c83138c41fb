use std::collections::BTreeMap;

use num_traits::One;
use proptest::prelude::*;

use orbitcoeff::exactnum::{self, int, rat, rat_pow, BesselOrder, PAdicPlace};
use orbitcoeff::expand::*;
use orbitcoeff::expand::Strategy;
use orbitcoeff::orbits::{dominance_leq, orbit_dimension};
use orbitcoeff::spherical::{self, LocalValue, SphericalSpec, PAIRS};
use orbitcoeff::{Partition, Rational};

fn sl4_partitions() -> Vec<Partition> {
    Partition::all(4)
}

/// Expansions with summed, undetermined Whittaker slots for the filter to act on.
fn filter_inputs() -> Vec<FormalExpansion> {
    let mut out: Vec<FormalExpansion> =
        Strategy::ALL.iter().map(|&s| expand_f212(&Slot::nz("m4'"), s).unwrap()).collect();
    out.push(expand_f22_partial(&Slot::nz("m1'"), &Slot::nz("m6'")).unwrap());
    out.push(partial_sum_form(&[Slot::nz("m1'"), Slot::free("m2"), Slot::free("m3"), Slot::free("m4")]).unwrap());
    out
}

fn orbit_keys(e: &FormalExpansion) -> Vec<String> {
    let mut k: Vec<String> = e.canonical().unwrap().terms.iter().map(|t| t.key()).collect();
    k.sort();
    k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filter_is_monotone_and_idempotent(e in 0..5usize, a in 0..5usize, b in 0..5usize) {
        let exp = &filter_inputs()[e];
        let ps = sl4_partitions();
        let (mu, nu) = (&ps[a], &ps[b]);
        let small = apply_representation_filter(exp, &Rep::Wavefront(mu.clone())).unwrap();
        let again = apply_representation_filter(&small, &Rep::Wavefront(mu.clone())).unwrap();
        prop_assert!(small.alpha_eq(&again).unwrap());
        if dominance_leq(mu, nu).unwrap() {
            let big = apply_representation_filter(exp, &Rep::Wavefront(nu.clone())).unwrap();
            let inner = apply_representation_filter(&big, &Rep::Wavefront(mu.clone())).unwrap();
            prop_assert!(inner.alpha_eq(&small).unwrap());
            prop_assert!(small.len() <= big.len());
        }
        let generic = apply_representation_filter(exp, &Rep::Generic).unwrap();
        prop_assert_eq!(orbit_keys(&generic), orbit_keys(exp));
    }

    #[test]
    fn canonical_form_is_stable_under_renaming(r in 0..29usize, salt in "[a-k]{1,3}") {
        let rules = registry();
        let rule = &rules[r % rules.len()];
        for t in std::iter::once(&rule.lhs).chain(rule.rhs.iter()) {
            let c = t.canonical().unwrap();
            prop_assert_eq!(c.canonical().unwrap(), c.clone());
            let map: BTreeMap<String, String> =
                t.bound().into_iter().map(|s| (s.clone(), format!("q{salt}_{}", s.len()) + &s.replace('\'', "p"))).collect();
            let renamed = t.rename(&map);
            let x = FormalExpansion::new(vec![t.clone()]).unwrap();
            let y = FormalExpansion::new(vec![renamed]).unwrap();
            prop_assert!(x.alpha_eq(&y).unwrap(), "{} vs renamed", term_latex(t));
        }
    }

    #[test]
    fn every_mutated_rule_fails(r in 0..29usize) {
        let rules = registry();
        let rule = &rules[r % rules.len()];
        prop_assert!(verify_rewrite_rule(rule).pass);
        prop_assert!(!verify_rewrite_rule(&rule.mutated()).pass);
    }

    #[test]
    fn conjugation_is_an_involution_reversing_dominance(n in 1..9usize, a in 0..30usize, b in 0..30usize) {
        let ps = Partition::all(n);
        let (p, q) = (&ps[a % ps.len()], &ps[b % ps.len()]);
        prop_assert_eq!(&p.conjugate().conjugate(), p);
        prop_assert_eq!(dominance_leq(p, q).unwrap(), dominance_leq(&q.conjugate(), &p.conjugate()).unwrap());
        if dominance_leq(p, q).unwrap() && p != q {
            prop_assert!(orbit_dimension(p).unwrap() < orbit_dimension(q).unwrap());
        }
    }

    #[test]
    fn divisor_sigma_is_multiplicative(s in 1..5u32, a in 1..300i64, b in 1..300i64) {
        if num_integer::Integer::gcd(&a, &b) == 1 {
            let ab = exactnum::divisor_sigma(s, a * b).unwrap();
            let prod = exactnum::divisor_sigma(s, a).unwrap() * exactnum::divisor_sigma(s, b).unwrap();
            prop_assert_eq!(ab, prod);
        }
    }
}

/// e^x K_nu(x) = int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt by the trapezoid rule,
/// which converges geometrically for this integrand.
fn k_scaled_quadrature(nu: f64, x: f64) -> f64 {
    let h: f64 = 0.01;
    let mut sum = 0.5;
    let mut t = h;
    loop {
        let f = (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += f;
        if f < 1e-18 * sum {
            break;
        }
        t += h;
    }
    sum * h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bessel_matches_quadrature(twice in 0..9u32, lx in -2.3f64..3.9) {
        let x = lx.exp();
        let order = BesselOrder::from_twice(twice);
        let got = exactnum::bessel_k_scaled(order, x).unwrap();
        let want = k_scaled_quadrature(order.to_f64(), x);
        prop_assert!(((got - want) / want).abs() < 1e-10, "K_{}({x}): {got} vs {want}", order.to_f64());
    }

    #[test]
    fn finite_local_vectors_are_normalized_on_units(pair in 0..5usize, pi in 0..4usize, a in 1..200i64, b in 1..200i64) {
        let p = [2u64, 3, 5, 7][pi];
        let pp = p as i64;
        prop_assume!(a % pp != 0 && b % pp != 0);
        let (g, r) = PAIRS[pair];
        let spec = SphericalSpec::new(g, r, PAdicPlace::finite(p).unwrap()).unwrap();
        let u = rat(a, b);
        let v = spherical::local_spherical(&spec, &u).unwrap();
        prop_assert_eq!(v.exact(), Some(&Rational::one()));
        // depends on x only through |x|_p
        for k in 0..3 {
            let x = rat_pow(&int(pp), k);
            let lhs = spherical::local_spherical(&spec, &x).unwrap();
            let rhs = spherical::local_spherical(&spec, &(&x * &u)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn casselman_shalika_is_unit_invariant(
        pi in 0..4usize,
        num in 1..12i64,
        den in 1..6i64,
        kv in -2..3i64,
        km in -3..4i64,
        ua in 1..100i64,
        ub in 1..100i64,
    ) {
        let p = [2u64, 3, 5, 7][pi];
        let pp = p as i64;
        prop_assume!(ua % pp != 0 && ub % pp != 0);
        let s = rat(num, den);
        prop_assume!(s != rat(1, 2));
        let u = rat(ua, ub);
        let v = rat_pow(&int(pp), kv);
        let m = rat_pow(&int(pp), km);
        let base = spherical::cs_whittaker_sl2(&s, &v, &m, p).unwrap();
        for (v2, m2) in [(&v * &u, m.clone()), (v.clone(), &m * &u), (-&v, -&m)] {
            let other = spherical::cs_whittaker_sl2(&s, &v2, &m2, p).unwrap();
            match (&base, &other) {
                (LocalValue::Exact(x), LocalValue::Exact(y)) => prop_assert_eq!(x, y),
                _ => {
                    let (x, y) = (base.to_f64(), other.to_f64());
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()));
                }
            }
        }
    }
}
