"""Smoke test for the orbitcoeff_py extension.

Install with `pip install -e . --no-build-isolation` from crates/orbitcoeff-py, then run
`python python/smoke_test.py`.
"""

import json

import orbitcoeff_py as oc


def main():
    cat = json.loads(oc.orbit_catalog(4))
    assert [r["dimension"] for r in cat] == [12, 10, 8, 6, 0]

    p = oc.Partition([2, 1, 1])
    assert str(p) == "(2,1,1)" and p.dimension() == 6
    assert p.leq(oc.Partition.parse("(2,2)"))
    assert str(oc.jordan_type([["0", "1", "0"], ["0", "0", "0"], ["0", "0", "0"]])) == "(2,1)"

    reports = oc.verify_rules()
    assert reports and all(ok for _, ok, _ in reports), [r for r in reports if not r[1]]

    ntm = oc.sl4_ntm()
    assert len(ntm) == 2 and sorted(ntm.orbits()) == ["(2,1,1)", "(2,2)"]
    assert len(oc.sl4_min_rep("m'", "alpha1")) == 1
    assert len(oc.expand_coefficient("F212", "min", "alpha2").filter("(2,1,1)")) == 1

    assert oc.divisor_sigma(4, 2) == oc.euler_sigma_product(4, 2) == "17"
    assert oc.local_spherical("e8", "heisenberg", "2", "2") == "544"
    assert isinstance(oc.local_spherical("e6", "abelian", "inf", "3/2"), float)
    assert oc.cs_whittaker_sl2("2", "1", "1/2", 2) == "0"
    assert json.loads(oc.verify_factorization("e6", "abelian", 6))["pass"]
    try:
        oc.local_spherical("e8", "abelian", "2", "1")
    except NotImplementedError:
        pass
    else:
        raise AssertionError("E8 abelian must be rejected")
    print("orbitcoeff_py smoke test: ok")


if __name__ == "__main__":
    main()
