"""Cup products and the spark product on the Cech-simplicial models."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import InputError
from .sparks import e_spark, make_spark, sparks_equivalent


def cup_simplicial(K, x, q, y, qq):
    """(x cup y)(v0..v_{q+q'}) = x(v0..vq) y(vq..v_{q+q'})."""
    ix, iy = K.index.get(q, {}), K.index.get(qq, {})
    out = []
    for s in K.simplices(q + qq):
        out.append(x[ix[s[:q + 1]]] * y[iy[s[q:]]])
    return out


def cup_nerve(cover, x, p, y, pp):
    """Cech cup on the nerve with the same front/back-face rule."""
    ix = {s: i for i, s in enumerate(cover.nerve.get(p, []))}
    iy = {s: i for i, s in enumerate(cover.nerve.get(pp, []))}
    return [x[ix[s[:p + 1]]] * y[iy[s[p:]]] for s in cover.nerve.get(p + pp, [])]


def cup_total(model, total, x, k, y, l):
    """Total cup: sign (-1)^(p q') times the Cech front face and simplicial cup.

    (x cup y)_{a0..a(p+p')}(tau) = (-1)^(p q') x_{a0..ap}(front) y_{ap..}(back)
    on the common intersection.  With D = (-1)^q delta + d this satisfies
    D(x y) = Dx y + (-1)^k x Dy.
    """
    out = [0] * total.complex.rank(k + l)
    xs = [(p, q, off) for (p, q, off, _) in total.layout.get(k, ())]
    for (P, Qd, toff, _) in total.layout.get(k + l, ()):
        basis = model.basis[(P, Qd)]
        for (p, q, xoff) in xs:
            pp, qq = P - p, Qd - q
            if pp < 0 or qq < 0:
                continue
            yblock = total.block(l, pp, qq)
            if yblock is None:
                continue
            yoff = yblock[0]
            xi, yi = model.index[(p, q)], model.index[(pp, qq)]
            sign = -1 if (p * qq) % 2 else 1
            for t, (sigma, tau) in enumerate(basis):
                xv = x[xoff + xi[(sigma[:p + 1], tau[:q + 1])]]
                if not xv:
                    continue
                yv = y[yoff + yi[(sigma[p:], tau[q:])]]
                if yv:
                    out[toff + t] += sign * xv * yv
    return out


def _check_same(s1, s2):
    if s1.complex is not s2.complex:
        raise InputError("sparks live in different complexes")
    if s1.complex.model is None:
        raise InputError("products need a Cech model spark complex")


def spark_product(s1, s2, form="psi"):
    """Degree k + l + 1 product.

    psi-form: (a1 cup iota(e2) + (-1)^(k+1) Psi(r1) cup a2, r1 cup r2)
    s-form:   (a1 cup Psi(r2) + (-1)^(k+1) iota(e1) cup a2, r1 cup r2)
    """
    _check_same(s1, s2)
    S = s1.complex
    M, T = S.model, S.total
    k, l = s1.degree, s2.degree
    n = k + l + 1
    sign = -1 if (k + 1) % 2 else 1
    a = [Fraction(0)] * S.F.rank(n)
    if form == "psi":
        ie2 = S.iota.apply(l + 1, list(s2.e)) if s2.e else [0] * S.F.rank(l + 1)
        pr1 = S.psi.apply(k + 1, list(s1.r)) if s1.r else [0] * S.F.rank(k + 1)
        if s1.a:
            a = _addv(a, cup_total(M, T, s1.a, k, ie2, l + 1))
        if s2.a:
            a = _addv(a, [sign * v for v in cup_total(M, T, pr1, k + 1, s2.a, l)])
    elif form == "s":
        pr2 = S.psi.apply(l + 1, list(s2.r)) if s2.r else [0] * S.F.rank(l + 1)
        ie1 = S.iota.apply(k + 1, list(s1.e)) if s1.e else [0] * S.F.rank(k + 1)
        if s1.a:
            a = _addv(a, cup_total(M, T, s1.a, k, pr2, l + 1))
        if s2.a:
            a = _addv(a, [sign * v for v in cup_total(M, T, ie1, k + 1, s2.a, l)])
    else:
        raise InputError(f"unknown product form {form!r}")
    r = cup_nerve(M.cover, s1.r, k + 1, s2.r, l + 1) if S.I.rank(n + 1) else []
    out = make_spark(S, n, a, r)
    e = cup_simplicial(M.K, s1.e, k + 1, s2.e, l + 1) if S.E.rank(n + 1) else []
    if list(out.e) != [Fraction(v) for v in e]:
        raise AssertionError("product curvature differs from the cup of curvatures")
    return out


def _addv(u, v):
    return [x + y for x, y in zip(u, v)]


def unit_spark(S):
    """The degree -1 spark (0, 1) with 1 the constant nerve 0-cochain."""
    return make_spark(S, -1, [], [1] * S.I.rank(0))


@dataclass
class RingCheck:
    delta1_ok: bool
    delta2_ok: bool
    commutation: str  # "+1", "-1", "both" or "none"


def commutation_sign(s1, s2):
    p, q = spark_product(s1, s2), spark_product(s2, s1)
    plus = bool(sparks_equivalent(p, q))
    minus = bool(sparks_equivalent(p, -q))
    if plus and minus:
        return "both"
    return "+1" if plus else "-1" if minus else "none"


def delta_ring_check(s1, s2):
    """delta1 and delta2 are multiplicative; also record the commutation sign."""
    _check_same(s1, s2)
    S = s1.complex
    k, l = s1.degree, s2.degree
    p = spark_product(s1, s2)
    e = cup_simplicial(S.model.K, s1.e, k + 1, s2.e, l + 1) if S.E.rank(k + l + 2) else []
    d1 = list(p.e) == [Fraction(v) for v in e]
    H = S.H_I(k + l + 2)
    H1, H2 = S.H_I(k + 1), S.H_I(l + 1)
    g1 = H1.element(H1.coordinates(list(s1.r)))
    g2 = H2.element(H2.coordinates(list(s2.r)))
    cupped = cup_nerve(S.model.cover, g1, k + 1, g2, l + 1) if S.I.rank(k + l + 2) else []
    d2 = H.coordinates(list(p.r)) == H.coordinates(cupped) if S.I.rank(k + l + 2) else True
    return RingCheck(d1, d2, commutation_sign(s1, s2))


def truncation_push(level, s1, s2):
    """Pi(s1 * s2) against the projected product of lifts of Pi(s1), Pi(s2).

    Returns (equivalent, Pi(s1*s2), the product computed through lifts).
    """
    if s1.complex is not level.full or s2.complex is not level.full:
        raise InputError("sparks are not from the full model of this level")
    direct = level.project(spark_product(s1, s2))
    l1 = level.lift(level.project(s1))
    l2 = level.lift(level.project(s2))
    via = level.project(spark_product(l1, l2))
    return bool(sparks_equivalent(direct, via)), direct, via


def kernel_spark(level, k, x):
    """(iota(x), 0) in the full model, which projects to zero when k >= level."""
    return e_spark(level.full, k, x)
