"""Quasi-isomorphisms of spark complexes and two-way transport of spark classes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import ChainMap, ValidationError, induced_map
from .linalg import InputError, IntegerMatrix, IntegerSolver, RationalSolver, hstack, quotient_descriptor, solve_integer
from .sparks import Spark, check_witness, make_spark, spark_from_data


@dataclass
class SparkQuasiIso:
    """small -> big: an F-inclusion, the same E, and psi on I inducing H(I) isomorphisms."""

    small: object
    big: object
    incl: ChainMap
    psi: ChainMap

    def __post_init__(self):
        self._cache = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]


def validate_quasi_iso(small, big, incl, psi):
    """Check chain maps, psi_* isomorphisms, the commuting square and the shared E."""
    if incl.source is not small.F or incl.target is not big.F:
        raise InputError("F-inclusion must map small.F to big.F")
    if psi.source is not small.I or psi.target is not big.I:
        raise InputError("psi must map small.I to big.I")
    incl.check()
    psi.check()
    degs = sorted(set(small.I.ranks) | set(big.I.ranks))
    for k in degs:
        m = induced_map(psi, k, small.H_I(k), big.H_I(k))
        if not m.isomorphism:
            tt = big.H_I(k).size
            orders = big.H_I(k).orders
            rel = [[orders[i] if i == j else 0 for j in range(tt)] for i in range(tt)]
            cols = [list(m.matrix[i]) + rel[i] for i in range(tt)]
            coker = quotient_descriptor(tt, IntegerMatrix(cols, len(m.matrix[0]) + tt if tt else 0)) if tt else None
            raise ValidationError(f"psi_* is not an isomorphism on H^{k}(I)",
                                  witness={"degree": k, "injective": m.injective,
                                           "cokernel": str(coker) if coker is not None else "0"})
    for k in sorted(set(small.I.ranks) | set(small.F.ranks)):
        lhs = incl.f(k) @ small.psi.f(k)
        rhs = big.psi.f(k) @ psi.f(k).to_rational()
        if not (lhs - rhs).is_zero():
            raise ValidationError(f"square F-incl o Psi = Psi o psi fails in degree {k}", witness=k)
    if set(small.E.ranks) != set(big.E.ranks):
        raise ValidationError("E differs between the two spark complexes")
    for k in small.E.ranks:
        if small.E.rank(k) != big.E.rank(k) or not (small.E.d(k) - big.E.d(k)).is_zero():
            raise ValidationError(f"E differs in degree {k}", witness=k)
        if not (incl.f(k) @ small.iota.f(k) - big.iota.f(k)).is_zero():
            raise ValidationError(f"iota does not factor through the F-inclusion in degree {k}", witness=k)
    return SparkQuasiIso(small, big, incl, psi)


def push(q, s):
    """(incl(a), psi(r)); the curvature is unchanged."""
    if s.complex is not q.small:
        raise InputError("spark does not belong to the small complex")
    k = s.degree
    a = q.incl.apply(k, list(s.a)) if s.a else [Fraction(0)] * q.big.F.rank(k)
    r = q.psi.apply(k + 1, list(s.r)) if s.r else [0] * q.big.I.rank(k + 1)
    out = make_spark(q.big, k, a, r)
    if out.e != s.e:
        raise AssertionError("push changed the curvature")
    return out


@dataclass
class Lift:
    spark: Spark
    b: list  # in big F^(k-1)
    s: list  # in big I^k; t - push(spark) = (D b + Psi(s), -d s)


def lift(q, t):
    """A small spark whose push is equivalent to t, with the equivalence witness.

    Solve rbar = psi(r) - d sbar over Z through the H(I) isomorphism, move to
    abar - Psibar(sbar), take a small spark with the same data, and absorb
    the remaining closed difference by incl(y) + D bbar.
    """
    if t.complex is not q.big:
        raise InputError("spark does not belong to the big complex")
    S, B, k = q.small, q.big, t.degree
    # step 1: r with psi_*[r] = [rbar], then sbar
    HIs, HIb = S.H_I(k + 1), B.H_I(k + 1)
    c = HIb.coordinates(list(t.r))
    r = [0] * S.I.rank(k + 1)
    if HIb.size:
        m = q._get(("psi*", k + 1), lambda: induced_map(q.psi, k + 1, HIs, HIb))
        tt, ts = HIb.size, HIs.size
        rows = [[int(x) for x in m.matrix[i]] + [HIb.orders[i] if i == j else 0 for j in range(tt)]
                for i in range(tt)]
        sol = solve_integer(IntegerMatrix(rows, ts + tt), list(c))
        if sol is None:
            raise AssertionError("psi_* is not surjective")
        r = HIs.element(sol[0][:ts])
    target = [x - y for x, y in zip(q.psi.apply(k + 1, r), t.r)]
    if B.I.rank(k):
        sbar = q._get(("dIbar", k), lambda: IntegerSolver(B.I.d(k))).solve(target)
        if sbar is None:
            raise AssertionError("psi(r) - rbar is not an integral coboundary")
    else:
        if any(target):
            raise AssertionError("psi(r) differs from rbar with no room to correct")
        sbar = []
    # step 2: abar' = abar - Psibar(sbar)
    Ps = B.psi.apply(k, sbar) if sbar else [Fraction(0)] * B.F.rank(k)
    abar = [x - y for x, y in zip(t.a, Ps)]
    # step 3: small spark with curvature e and integral part r
    s0 = spark_from_data(S, k, list(t.e), r)
    if not abar:
        out = s0
        bbar = []
    else:
        diff = [x - y for x, y in zip(abar, q.incl.apply(k, list(s0.a)) if s0.a else [0] * len(abar))]
        solver = q._get(("absorb", k), lambda: RationalSolver(hstack(q.incl.f(k), B.F.d(k - 1))))
        sol = solver.solve(diff)
        if sol is None:
            raise AssertionError("closed difference is not in incl(F) + D Fbar")
        nf = S.F.rank(k)
        y, bbar = sol[:nf], list(sol[nf:])
        out = make_spark(S, k, [u + v for u, v in zip(s0.a, y)], r)
    if B.F.rank(k - 1) == 0:
        bbar = []
    res = Lift(out, bbar, list(sbar))
    if not check_witness(t, push(q, out), res.b, res.s):
        raise AssertionError("lift witness does not verify")
    return res
