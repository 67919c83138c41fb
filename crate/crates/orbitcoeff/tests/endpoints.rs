use orbitcoeff::expand::*;
use orbitcoeff::{Error, Partition};

fn mat(s: &str) -> PolyMatrix {
    PolyMatrix::parse(s).unwrap()
}

fn w(kind: Kind, slots: &[&str], tr: &[&str], sums: &[(&str, Domain)]) -> FormalTerm {
    let mut t = parse_term(kind, slots).unwrap().with_translate(tr.iter().map(|m| mat(m)).collect());
    for (s, d) in sums {
        t = t.summed(s, *d);
    }
    t
}

fn expansion(ts: Vec<FormalTerm>) -> FormalExpansion {
    FormalExpansion::new(ts).unwrap()
}

use Domain::{Free, NonZero};

#[test]
fn sl3_min_rep_leaves_degenerate_whittaker_vectors() {
    let got = sl3_fmin_min_rep(&Slot::nz("m1'")).unwrap();
    let want = expansion(vec![w(Kind::WN3, &["m1'", "0"], &["-1,0,0;0,0,-1;0,-1,n"], &[("n", Free)])]);
    assert!(got.alpha_eq(&want).unwrap(), "{}", serde_json::to_string(&got).unwrap());
}

#[test]
fn sl4_min_rep_under_each_strategy() {
    let cases = [
        (Strategy::Alpha1, ["m'", "0", "0"], "1,0,0,0;0,0,0,1;0,-1,0,a;0,0,-1,b"),
        (Strategy::Alpha2, ["0", "m'", "0"], "0,1,0,0;1,a,0,0;0,0,0,1;0,0,1,b"),
        (Strategy::Alpha3, ["0", "0", "m'"], "0,-1,0,0;0,0,-1,0;1,a,b,0;0,0,0,1"),
    ];
    for (s, slots, l) in cases {
        let got = sl4_min_rep(&Slot::nz("m'"), s).unwrap();
        let want = expansion(vec![w(Kind::WN4, &slots, &[l], &[("a", Free), ("b", Free)])]);
        assert!(got.alpha_eq(&want).unwrap(), "{}: {}", s.label(), serde_json::to_string(&got).unwrap());
    }
}

#[test]
fn sl4_ntm_two_sum_display() {
    let got = sl4_ntm(&Slot::nz("m4'")).unwrap();
    let want = expansion(vec![
        w(
            Kind::WN4,
            &["m4'", "0", "m3'"],
            &["1,0,0,0;0,0,0,1;0,1,0,a;0,0,1,b"],
            &[("m3'", NonZero), ("a", Free), ("b", Free)],
        ),
        w(Kind::WN4, &["0", "m4'", "0"], &["0,1,0,0;1,a,0,0;0,0,0,1;0,0,1,b"], &[("a", Free), ("b", Free)]),
    ]);
    assert!(got.alpha_eq(&want).unwrap(), "{}", serde_json::to_string(&got).unwrap());
}

#[test]
fn parabolic_coefficient_agrees_with_whittaker_vector() {
    let got = sl3_fu_min_rep(&Slot::nz("m1'"), &Slot::Zero).unwrap();
    let want = expansion(vec![w(Kind::WN3, &["m1'", "0"], &[], &[])]);
    assert_eq!(got, want);
    let got = sl3_fu_min_rep(&Slot::free("m1"), &Slot::nz("m2'")).unwrap();
    assert_eq!(got.len(), 1);
    assert_eq!(got.terms[0].slots, vec![Slot::nz("m2'"), Slot::Zero]);
}

#[test]
fn parabolic_expansions_before_filtering() {
    let e = expand_f212(&Slot::nz("m4'"), Strategy::Alpha2).unwrap();
    let l = "0,1,0,0;1,a,0,0;0,0,0,1;0,0,1,b";
    let want = expansion(vec![
        w(
            Kind::Forbit(Partition::of(&[2, 2])),
            &["0", "m3'", "m4'", "0"],
            &[l],
            &[("a", Free), ("b", Free), ("m3'", NonZero)],
        ),
        w(Kind::WN4, &["m1", "m4'", "m6"], &[l], &[("a", Free), ("b", Free), ("m1", Free), ("m6", Free)]),
    ]);
    assert!(e.alpha_eq(&want).unwrap());

    let e = expand_f22_partial(&Slot::nz("m1'"), &Slot::nz("m6'")).unwrap();
    let l = "-1,0,0,0;0,0,1,0;0,1,a,0;0,0,0,1";
    let want = expansion(vec![
        w(Kind::Forbit(Partition::of(&[3, 1])), &["-m1'", "0", "m5'", "m6'"], &[l], &[("a", Free), ("m5'", NonZero)]),
        w(Kind::WN4, &["-m1'", "m4", "m6'"], &[l], &[("a", Free), ("m4", Free)]),
    ]);
    assert!(e.alpha_eq(&want).unwrap());
    let ntm = apply_representation_filter(&e, &Rep::next_to_minimal(4).unwrap()).unwrap();
    assert_eq!(ntm.len(), 1);
    assert_eq!(ntm.terms[0].orbit().unwrap(), Partition::of(&[2, 2]));
    assert!(apply_representation_filter(&e, &Rep::minimal(4).unwrap()).unwrap().is_empty());
}

#[test]
fn partial_sum_cases() {
    let e = partial_sum_form(&[Slot::nz("m1'"), Slot::Zero, Slot::Zero, Slot::nz("m4'")]).unwrap();
    let t = &e.terms[0];
    assert_eq!(t.kind, Kind::FpartialSum22);
    assert_eq!(t.residual_integrations(), 1);
    assert_eq!(t.slots, vec![Slot::nz("m1'"), Slot::nz("m4'")]);

    let e = partial_sum_form(&[Slot::nz("m1'"), Slot::free("m2"), Slot::free("m3"), Slot::free("m4")]).unwrap();
    let l = &e.terms[0].translate.last().unwrap().to_spec();
    assert!(l.contains("m3/m1'") && l.contains("-m2/m1'"), "{l}");

    let e = partial_sum_form(&[Slot::Zero, Slot::nz("m2'"), Slot::nz("m3'"), Slot::Zero]).unwrap();
    assert_eq!(e.terms[0].slots[0], Slot::nz("m3'"));
    assert_eq!(e.terms[0].slots[1].is_nonzero(), Some(true));

    assert!(matches!(
        partial_sum_form(&[Slot::nz("m1'"), Slot::Zero, Slot::Zero, Slot::Zero]),
        Err(Error::Domain(_))
    ));
    assert!(matches!(partial_sum_form(&[Slot::Zero, Slot::nz("m2'"), Slot::Zero, Slot::Zero]), Err(Error::Domain(_))));
}

#[test]
fn table_rows() {
    let e = whittaker_to_orbit(&parse_term(Kind::WN4, &["0", "0", "0"]).unwrap()).unwrap();
    assert_eq!(e.terms[0].kind, Kind::ConstantTerm(4));
    let e = whittaker_to_orbit(&parse_term(Kind::WN4, &["m1'", "0", "m6'"]).unwrap()).unwrap();
    let t = &e.terms[0];
    assert_eq!(t.kind, Kind::Forbit(Partition::of(&[2, 2])));
    assert_eq!(t.slots[0].value().to_string(), "-m1'");
    assert_eq!(t.sums.len(), 1);
    let e = whittaker_to_orbit(&parse_term(Kind::WN3, &["m'", "n'"]).unwrap()).unwrap();
    assert_eq!(e.terms[0].kind, Kind::Freg3);
    assert!(e.terms[0].translate.is_empty());
    assert!(matches!(whittaker_to_orbit(&parse_term(Kind::WN4, &["m1", "0", "0"]).unwrap()), Err(Error::Domain(_))));
}

#[test]
fn eisenstein_groups() {
    let g = expand_eisenstein(3, &Rep::Generic).unwrap();
    assert_eq!(g.len(), 3);
    let g = expand_eisenstein(4, &Rep::Generic).unwrap();
    assert_eq!(g.len(), 5);
    assert!(g.values().all(|e| !e.is_empty()));
    let min = expand_eisenstein(4, &Rep::minimal(4).unwrap()).unwrap();
    let nonempty: Vec<String> = min.iter().filter(|(_, e)| !e.is_empty()).map(|(k, _)| k.to_string()).collect();
    assert_eq!(nonempty, vec!["(1,1,1,1)", "(2,1,1)"]);
}
