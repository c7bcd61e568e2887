"""Smoke test for the pyhdi extension: `python python/smoke_test.py` after `maturin develop`."""

import math
import random

import pyhdi

SIZES = [1, 1, 1, 1]
RATES = [0.5, 0.4, 0.3, 0.1]


def test_baseline_values():
    mld = pyhdi.index(SIZES, RATES, family="ri", alpha=1.0)
    ti = pyhdi.index(SIZES, RATES, family="ri", alpha=0.0)
    assert math.isclose(mld, 0.15506885578612095, rel_tol=1e-12)
    assert math.isclose(ti, 0.12043760924715338, rel_tol=1e-12)
    assert math.isclose(pyhdi.index(SIZES, RATES), 0.12868632289767213, rel_tol=1e-12)


def test_reference_invariance():
    a = pyhdi.index(SIZES, RATES, family="sri", alpha=2.0, reference="avg")
    b = pyhdi.index(SIZES, RATES, family="sri", alpha=2.0, reference="target:0.8")
    assert math.isclose(a, b, rel_tol=1e-12)


def test_divergences_and_errors():
    p, q = [0.25, 0.75], [0.5, 0.5]
    assert pyhdi.renyi(p, p, 2.0) == 0.0
    assert 0.0 <= pyhdi.ssri(p, q, 3.0) < 1.0
    assert math.isclose(pyhdi.sri(p, q, 0.3), pyhdi.sri(p, q, 0.7), rel_tol=1e-12)
    assert "ssri" in pyhdi.families()
    try:
        pyhdi.index(SIZES, RATES, family="nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown family accepted")


def test_variance():
    rng = random.Random(3)
    cols = {k: [] for k in ("strata", "psus", "weights", "groups", "outcomes")}
    for h in range(6):
        for c in range(2):
            for _ in range(40):
                g = rng.choice("ABC")
                cols["strata"].append(f"s{h}")
                cols["psus"].append(f"p{c}")
                cols["weights"].append(rng.uniform(0.5, 2.0))
                cols["groups"].append(g)
                cols["outcomes"].append(float(rng.random() < {"A": 0.1, "B": 0.2, "C": 0.3}[g]))
    t = pyhdi.variance(**cols, alpha=2.0, method="taylor")
    b = pyhdi.variance(**cols, alpha=2.0, method="boot", reps=200, seed=7)
    assert t[0] == b[0] and t[1] > 0 and b[1] > 0
    assert b == pyhdi.variance(**cols, alpha=2.0, method="boot", reps=200, seed=7)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")
