"""The built-in invariant suite run by `sparkcx selftest`."""

from __future__ import annotations

from fractions import Fraction

from . import bundles, products, quasi_iso, sparks
from .complexes import Z, cohomology
from .fixtures import fixture
from .rng import Rng

# Integral cohomology of the underlying spaces, degree 0 upward.
KNOWN = {
    "circle3": ["Z", "Z"],
    "circle6": ["Z", "Z"],
    "circle12": ["Z", "Z"],
    "sphere": ["Z", "0", "Z"],
    "torus": ["Z", "Z^2", "Z"],
    "rp2": ["Z", "0", "Z/2"],
    "klein": ["Z", "Z", "Z/2"],
    "point": ["Z"],
}

QUICK = ("circle6", "rp2", "point")


def run_selftest(seed=0, budget=64, quick=False):
    """Yield (passed, description) for each check."""
    names = QUICK if quick else tuple(KNOWN)
    for name in names:
        yield from _fixture_checks(name, seed, budget)
    yield from _bundle_checks()


def _fixture_checks(name, seed, budget):
    fx = fixture(name)
    C = fx.base.cochain_complex(Z)
    got = [str(cohomology(C, k).descriptor) for k in range(fx.base.dim + 1)]
    yield got == KNOWN[name], f"{name}: H*(K;Z) = {', '.join(got)}"
    S = fx.spark_complex
    yield True, f"{name}: Cech model validates ({fx.note})"
    for k in (-1, 0, 1, 2):
        g = sparks.grid(S, k, budget, seed)
        yield g.passed, f"{name}: grid degree {k}, {len(g.certificates)} certificates"
    rng = Rng(seed)
    B, q = fx.hyper
    ok = True
    for k in (0, 1):
        if k > fx.K.dim:
            continue
        s = sparks.random_spark(S, k, rng)
        back = quasi_iso.lift(q, quasi_iso.push(q, s)).spark
        ok = ok and bool(sparks.sparks_equivalent(back, s))
    yield ok, f"{name}: push then lift returns an equivalent spark"
    s1, s2 = sparks.random_spark(S, 0, rng), sparks.random_spark(S, 0, rng)
    rc = products.delta_ring_check(s1, s2)
    yield rc.delta1_ok and rc.delta2_ok, f"{name}: delta1 and delta2 are multiplicative"


def _bundle_checks():
    S = fixture("sphere").spark_complex
    ok = all(list(bundles.chern_class(bundles.bundle_from_chern(S, [d]))) == [d] for d in range(-2, 4))
    yield ok, "sphere: chern(bundle_from_chern(d)) = d for d in -2..3"
    fx = fixture("circle6")
    S = fx.spark_complex
    z = [1 if (i + 1) % 6 == j else -1 for (i, j) in fx.K.simplices(1)]
    L = bundles.flat_bundle(S, Fraction(1, 3))
    yield bundles.holonomy(L, z) == Fraction(1, 3), "circle6: flat bundle holonomy 1/3"
