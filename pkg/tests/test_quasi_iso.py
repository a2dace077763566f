from fractions import Fraction

import pytest

from sparkcx.complexes import ChainMap, ValidationError
from sparkcx.fixtures import fixture
from sparkcx.linalg import InputError, IntegerMatrix
from sparkcx.quasi_iso import lift, push, validate_quasi_iso
from sparkcx.rng import Rng
from sparkcx.sparks import (
    check_witness,
    delta1,
    delta2,
    make_spark,
    random_spark,
    sparks_equivalent,
    validate_spark_complex,
)


def test_identity_is_a_quasi_isomorphism():
    S = fixture("circle6").spark_complex
    q = validate_quasi_iso(S, S, ChainMap.identity(S.F), ChainMap.identity(S.I))
    s = random_spark(S, 0, Rng(1))
    assert push(q, s) == s
    assert sparks_equivalent(lift(q, s).spark, s)


def test_doubling_on_I_is_refused_with_cokernel():
    S = fixture("circle6").spark_complex
    half = ChainMap(S.I, S.F, {k: S.psi.f(k).scale(Fraction(1, 2)) for k in S.I.ranks})
    big = validate_spark_complex(S.F, S.iota, S.I, half)
    two = ChainMap(S.I, S.I, {k: IntegerMatrix.identity(S.I.rank(k)).scale(2) for k in S.I.ranks})
    with pytest.raises(ValidationError) as err:
        validate_quasi_iso(S, big, ChainMap.identity(S.F), two)
    assert err.value.witness["degree"] == 0
    assert err.value.witness["cokernel"] == "Z/2"


@pytest.mark.parametrize("name", ["circle6", "rp2"])
def test_push_lift_round_trip(name):
    fx = fixture(name)
    B, q = fx.hyper
    rng = Rng(2)
    for k in (-1, 0, 1):
        s = random_spark(q.small, k, rng)
        t = push(q, s)
        assert delta1(t) == delta1(s)
        L = lift(q, t)
        assert check_witness(t, push(q, L.spark), L.b, L.s)
        assert sparks_equivalent(L.spark, s)


def test_delta2_intertwined_by_psi():
    fx = fixture("rp2")
    B, q = fx.hyper
    rng = Rng(3)
    s = random_spark(q.small, 1, rng)
    t = push(q, s)
    image = q.psi.apply(2, list(s.r))
    assert delta2(t) == B.H_I(2).coordinates(image)


def test_push_refuses_foreign_spark():
    fx = fixture("circle6")
    B, q = fx.hyper
    other = fixture("rp2").spark_complex
    s = make_spark(other, 0, [0] * other.F.rank(0), [0] * other.I.rank(1))
    with pytest.raises(InputError):
        push(q, s)
