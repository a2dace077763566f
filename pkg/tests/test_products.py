from fractions import Fraction

import pytest

from sparkcx.fixtures import fixture
from sparkcx.linalg import InputError
from sparkcx.products import (
    commutation_sign,
    cup_nerve,
    cup_simplicial,
    cup_total,
    delta_ring_check,
    kernel_spark,
    spark_product,
    truncation_push,
    unit_spark,
)
from sparkcx.rng import Rng
from sparkcx.sparks import check_witness, random_spark, sparks_equivalent


def rand_vec(rng, n):
    return [Fraction(rng.integer(-3, 3), rng.integer(1, 3)) for _ in range(n)]


def equivalent(s, t):
    eq = sparks_equivalent(s, t)
    return bool(eq) and check_witness(s, t, eq.b, eq.s)


def test_cup_with_constant_one_is_identity():
    K = fixture("sphere").K
    rng = Rng(1)
    x = rand_vec(rng, K.count(1))
    one = [1] * K.count(0)
    assert cup_simplicial(K, one, 0, x, 1) == x
    assert cup_simplicial(K, x, 1, one, 0) == x


def test_circle_one_by_one_cup_is_empty():
    K = fixture("circle6").K
    x = [1] * K.count(1)
    assert cup_simplicial(K, x, 1, x, 1) == []


def test_cup_by_hand_on_one_triangle():
    K = fixture("sphere").K
    t = K.simplices(2)[0]
    x = [0] * K.count(1)
    y = [0] * K.count(1)
    x[K.index[1][t[:2]]] = 3
    y[K.index[1][t[1:]]] = 5
    out = cup_simplicial(K, x, 1, y, 1)
    assert out[K.index[2][t]] == 15
    assert sum(1 for v in out if v) == 1


@pytest.mark.parametrize("name", ["circle6", "rp2"])
def test_leibniz_on_total_complex(name):
    S = fixture(name).spark_complex
    M, T = S.model, S.total
    rng = Rng(7)
    for k in range(0, 2):
        for l in range(0, 2):
            if not (S.F.rank(k) and S.F.rank(l) and S.F.rank(k + l + 1)):
                continue
            x, y = rand_vec(rng, S.F.rank(k)), rand_vec(rng, S.F.rank(l))
            lhs = S.F.apply_d(k + l, cup_total(M, T, x, k, y, l))
            dx, dy = S.F.apply_d(k, x), S.F.apply_d(l, y)
            sign = -1 if k % 2 else 1
            rhs = [u + sign * v for u, v in zip(cup_total(M, T, dx, k + 1, y, l),
                                                cup_total(M, T, x, k, dy, l + 1))]
            assert lhs == rhs


def test_psi_and_iota_are_multiplicative():
    S = fixture("rp2").spark_complex
    M, T = S.model, S.total
    rng = Rng(3)
    for p, pp in ((0, 1), (1, 1), (0, 2)):
        r, s = rng.vector(S.I.rank(p)), rng.vector(S.I.rank(pp))
        lhs = cup_total(M, T, S.psi.apply(p, r), p, S.psi.apply(pp, s), pp)
        assert lhs == S.psi.apply(p + pp, cup_nerve(M.cover, r, p, s, pp))
    for q, qq in ((0, 1), (1, 1)):
        e, f = rand_vec(rng, S.E.rank(q)), rand_vec(rng, S.E.rank(qq))
        lhs = cup_total(M, T, S.iota.apply(q, e), q, S.iota.apply(qq, f), qq)
        assert lhs == S.iota.apply(q + qq, cup_simplicial(M.K, e, q, f, qq))


@pytest.fixture(scope="module")
def torus():
    return fixture("torus").spark_complex


def test_unit_law(torus):
    u = unit_spark(torus)
    rng = Rng(5)
    for k in (-1, 0, 1):
        s = random_spark(torus, k, rng)
        assert equivalent(spark_product(u, s), s)
        assert equivalent(spark_product(s, u), s)


def test_bilinearity_and_associativity(torus):
    rng = Rng(6)
    a, b = random_spark(torus, 0, rng), random_spark(torus, 0, rng)
    c = random_spark(torus, -1, rng)
    assert equivalent(spark_product(a + b, c), spark_product(a, c) + spark_product(b, c))
    assert equivalent(spark_product(c, a + b), spark_product(c, a) + spark_product(c, b))
    x, y, z = random_spark(torus, -1, rng), random_spark(torus, 0, rng), random_spark(torus, 0, rng)
    assert equivalent(spark_product(spark_product(x, y), z), spark_product(x, spark_product(y, z)))


def test_product_is_well_defined_on_classes(torus):
    rng = Rng(8)
    s, t = random_spark(torus, 0, rng), random_spark(torus, 0, rng)
    s2 = s.perturb([], rng.vector(torus.I.rank(0)))
    t2 = t.perturb([], rng.vector(torus.I.rank(0)))
    assert equivalent(spark_product(s, t), spark_product(s2, t2))


def test_both_product_forms_agree(torus):
    rng = Rng(9)
    s, t = random_spark(torus, 0, rng), random_spark(torus, 0, rng)
    assert equivalent(spark_product(s, t, "psi"), spark_product(s, t, "s"))
    with pytest.raises(InputError):
        spark_product(s, t, "x")


def test_delta_maps_are_ring_homomorphisms(torus):
    rng = Rng(10)
    for k, l in ((-1, 0), (0, 0), (0, 1)):
        rc = delta_ring_check(random_spark(torus, k, rng), random_spark(torus, l, rng))
        assert rc.delta1_ok and rc.delta2_ok


def test_degree_minus_one_pairs_commute(torus):
    rng = Rng(11)
    assert commutation_sign(random_spark(torus, -1, rng), random_spark(torus, -1, rng)) == "+1"
    assert commutation_sign(random_spark(torus, -1, rng), random_spark(torus, 0, rng)) == "+1"


def test_truncation_is_multiplicative():
    lv = fixture("circle6").level(1)
    rng = Rng(12)
    for _ in range(3):
        s, t = random_spark(lv.full, -1, rng), random_spark(lv.full, 0, rng)
        ok, _, _ = truncation_push(lv, s, t)
        assert ok


def test_kernel_spark_projects_to_zero_and_is_an_ideal():
    fx = fixture("circle6")
    lv = fx.level(1)
    S = lv.full
    rng = Rng(13)
    x = rand_vec(rng, S.E.rank(1))
    ks = kernel_spark(lv, 1, x)
    assert lv.kernel_representative(ks) is not None
    t = random_spark(S, -1, rng)
    prod = spark_product(t, ks)
    assert lv.kernel_representative(prod) is not None
