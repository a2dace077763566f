"""Discrete line bundles with connection in the additive (log) model."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cech import total_chain
from .linalg import InputError, RationalSolver
from .sparks import evaluate, make_spark, sparks_equivalent


class BundleError(InputError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class DiscreteLineBundle:
    """g on bidegree (1,0) and A on bidegree (0,1) of a Cech spark complex.

    g[(alpha, beta)] is a 0-cochain on the intersection and A[alpha] a
    1-cochain on the member, flattened in the model's basis order.
    Invariants: delta g is an integer constant on each nerve triangle and
    A_alpha - A_beta = d g_alpha_beta on each overlap.
    """

    complex: object
    g: tuple
    A: tuple

    def __post_init__(self):
        _validate(self)


def _validate(L):
    S = L.complex
    M = S.model
    D = M.double()
    if len(L.g) != M.rank(1, 0) or len(L.A) != M.rank(0, 1):
        raise BundleError("g or A has the wrong length")
    dg = D.delta(1, 0).apply(list(L.g)) if M.rank(2, 0) else []
    consts = {}
    for (sigma, tau), v in zip(M.basis.get((2, 0), []), dg):
        if Fraction(v).denominator != 1:
            raise BundleError(f"delta g is not integral on {sigma}", witness=sigma)
        if consts.setdefault(sigma, v) != v:
            raise BundleError(f"delta g is not constant on {sigma}", witness=sigma)
    # A_alpha - A_beta = d g_alpha_beta, that is delta A = -d g
    lhs = D.delta(0, 1).apply(list(L.A)) if M.rank(1, 1) and L.A else [0] * M.rank(1, 1)
    rhs = D.dv(1, 0).apply(list(L.g)) if M.rank(1, 1) else []
    for (sigma, tau), x, y in zip(M.basis.get((1, 1), []), lhs, rhs):
        if x != -y:
            raise BundleError(f"A_a - A_b != d g_ab on overlap {sigma} at edge {tau}", witness=(sigma, tau))


def bundle(S, g, A):
    return DiscreteLineBundle(S, tuple(Fraction(x) for x in g), tuple(Fraction(x) for x in A))


def trivial_bundle(S):
    return bundle(S, [0] * S.model.rank(1, 0), [0] * S.model.rank(0, 1))


def transition_r(L):
    """delta g as an integer nerve 2-cochain."""
    S = L.complex
    M = S.model
    out = [0] * S.I.rank(2)
    if not M.rank(2, 0):
        return out
    dg = M.double().delta(1, 0).apply(list(L.g))
    nidx = {s: i for i, s in enumerate(M.cover.nerve.get(2, []))}
    for (sigma, _), v in zip(M.basis[(2, 0)], dg):
        out[nidx[sigma]] = int(v)
    return out


def bundle_to_spark(L):
    """Degree-1 spark a = (A in (0,1), -g in (1,0)), r = delta g."""
    S = L.complex
    T = S.total
    a = T.embed(1, {(0, 1): list(L.A), (1, 0): [-x for x in L.g]}) if S.F.rank(1) else []
    return make_spark(S, 1, a, transition_r(L))


def curvature(L):
    return list(bundle_to_spark(L).e)


def chern_class(L):
    return L.complex.H_I(2).coordinates(transition_r(L))


def bundle_from_chern(S, c):
    """Solve delta g = Psi(r) in row 0, then delta A = -d g in row 1."""
    M = S.model
    D = M.double()
    H = S.H_I(2)
    c = list(c)
    if len(c) != H.size:
        raise BundleError(f"class has {len(c)} coordinates, H^2(I) has {H.size} generators")
    for x, o in zip(c, H.orders):
        if Fraction(x).denominator != 1:
            raise BundleError("class coordinates must be integers")
    r = H.element([int(x) for x in c])
    target = []
    nidx = {s: i for i, s in enumerate(M.cover.nerve.get(2, []))}
    for (sigma, _) in M.basis.get((2, 0), []):
        target.append(r[nidx[sigma]])
    if target:
        g = RationalSolver(D.delta(1, 0)).solve(target)
        if g is None:
            raise AssertionError("function-valued Cech row is not exact")
    else:
        g = [Fraction(0)] * M.rank(1, 0)
    if M.rank(1, 1):
        dg = D.dv(1, 0).apply(list(g))
        A = RationalSolver(D.delta(0, 1)).solve([-x for x in dg])
        if A is None:
            raise AssertionError("delta A = -d g has no solution")
    else:
        A = [Fraction(0)] * M.rank(0, 1)
    return bundle(S, g, A)


def flat_bundle(S, h, cocycle=None):
    """g = -h psi(gamma), A = 0 for an integer Cech 1-cocycle gamma.

    gamma defaults to the first generator of H^1(I).  The sign makes the
    holonomy along a cycle dual to gamma equal to +h.
    """
    M = S.model
    if cocycle is None:
        H = S.H_I(1)
        if not H.size:
            raise BundleError("H^1 of the nerve is zero; no flat bundle to build")
        cocycle = H.generators[0]
    nidx = {s: i for i, s in enumerate(M.cover.nerve.get(1, []))}
    g = [-Fraction(h) * cocycle[nidx[sigma]] for (sigma, _) in M.basis.get((1, 0), [])]
    return bundle(S, g, [0] * M.rank(0, 1))


def tensor(L1, L2):
    if L1.complex is not L2.complex:
        raise BundleError("bundles live over different models")
    return bundle(L1.complex, [x + y for x, y in zip(L1.g, L2.g)], [x + y for x, y in zip(L1.A, L2.A)])


def gauge_equivalent(L1, L2):
    if L1.complex is not L2.complex:
        raise BundleError("bundles live over different models")
    return sparks_equivalent(bundle_to_spark(L1), bundle_to_spark(L2))


def holonomy(L, z):
    """Evaluation of the bundle spark on the total chain of a simplicial 1-cycle z."""
    S = L.complex
    K = S.model.K
    if len(z) != K.count(1):
        raise BundleError("cycle has the wrong length")
    if any(K.coboundary(0).T.apply(list(z))):
        raise BundleError("z is not a cycle")
    return evaluate(bundle_to_spark(L), total_chain(S.model, S.total, z, 1))
