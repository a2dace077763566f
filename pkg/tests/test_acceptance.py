"""The ten acceptance criteria, one test each.

Every test records a single pass/fail line (tolerance, elapsed time and
time budget) that is printed in the pytest terminal summary.  All
comparisons are exact; the tolerance column says so explicitly.
"""

import time
from fractions import Fraction
from itertools import product

import conftest
from oracles.snf_oracle import determinantal_diagonal, integral_cohomology, qz_cohomology, rank
from sparkcx import bundles, products, sparks
from sparkcx.cech import pullback
from sparkcx.complexes import Z, cohomology, cone_cohomology, induced_map
from sparkcx.fixtures import NAMES, fixture, violation_duplicate_index, violation_full_e
from sparkcx.linalg import (
    IntegerMatrix,
    hermite_normal_form,
    smith_normal_form,
    solve_integer,
    solve_rational,
)
from sparkcx.quasi_iso import lift, push
from sparkcx.rng import Rng
from sparkcx.simplicial import SimplicialMap, homology
from sparkcx.sparks import (
    SparkAxiomError,
    check_witness,
    delta1,
    delta2,
    random_spark,
    sparks_equivalent,
    validate_spark_complex,
)

DEGREES = (-1, 0, 1, 2)


class Criterion:
    def __init__(self, number, title, tolerance, budget):
        self.number, self.title, self.tolerance, self.budget = number, title, tolerance, budget
        self.failures = []
        self.start = time.perf_counter()

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def finish(self, detail):
        elapsed = time.perf_counter() - self.start
        in_time = elapsed < self.budget
        ok = not self.failures and in_time
        line = (f"criterion {self.number:2d} {'PASS' if ok else 'FAIL'}: {self.title}; {detail}; "
                f"tolerance {self.tolerance}; {elapsed:.1f} s of {self.budget} s")
        if self.failures:
            line += f"; first failure: {self.failures[0]}"
        conftest.ACCEPTANCE[self.number] = line
        print(line)
        assert not self.failures, self.failures[:5]
        assert in_time, f"took {elapsed:.1f} s, budget {self.budget} s"


def equivalent(s, t):
    eq = sparks_equivalent(s, t)
    return bool(eq) and check_witness(s, t, eq.b, eq.s)


def generator_sparks(S, k):
    """Sparks built from the Z_I lattice generators and the H^(k+1)(I) generators."""
    out = []
    Zk = S.zi_subgroup(k + 1)
    for g, rho in zip(Zk.generators, Zk.rhos):
        out.append(sparks.spark_from_data(S, k, g, rho))
    for g in S.H_I(k + 1).generators:
        out.append(sparks._spark_with_r(S, k, g))
    return out


# ---------------------------------------------------------------------------
# 1. exact kernels

def _oracle_integer_solvable(rows, b):
    """Ax = b has an integer solution iff A and [A|b] share rank and minor gcds."""
    aug = [list(r) + [x] for r, x in zip(rows, b)]
    ra, rb = rank(rows), rank(aug)
    if ra != rb:
        return False
    if ra == 0:
        return True
    da, db = determinantal_diagonal(rows), determinantal_diagonal(aug)
    prod_a, prod_b = 1, 1
    for x in da[:ra]:
        prod_a *= x
    for x in db[:ra]:
        prod_b *= x
    return prod_a == prod_b


def _check_matrix(c, M, rows):
    U, D, V = smith_normal_form(M)
    c.check(U @ M @ V == D, f"SNF recomposition {rows}")
    c.check(abs(U.det()) == 1 and abs(V.det()) == 1, f"SNF transforms unimodular {rows}")
    diag = [D.tolist()[i][i] for i in range(min(M.nrows, M.ncols))]
    nz = [d for d in diag if d]
    c.check(all(b % a == 0 for a, b in zip(nz, nz[1:])), f"divisibility chain {rows}")
    c.check(nz == determinantal_diagonal(rows), f"SNF vs determinantal divisors {rows}")
    off = [(i, j) for i in range(M.nrows) for j in range(M.ncols) if i != j and D.tolist()[i][j]]
    c.check(not off, f"SNF off-diagonal entries {rows}")
    H, Hm = hermite_normal_form(M)
    c.check(H @ M == Hm and abs(H.det()) == 1, f"HNF recomposition {rows}")


def test_criterion_01_exact_kernels():
    c = Criterion(1, "SNF/HNF identities and solver equivalence", "exact", 30)
    rng = Rng(0)
    n_solve = 0
    for _ in range(500):
        m, n = rng.integer(1, 3), rng.integer(1, 3)
        rows = [[rng.integer(-3, 3) for _ in range(n)] for _ in range(m)]
        M = IntegerMatrix(rows, n)
        _check_matrix(c, M, rows)
        for b in (M.apply(rng.vector(n, -3, 3)), rng.vector(m, -3, 3)):
            n_solve += 1
            got = solve_integer(M, b)
            c.check((got is not None) == _oracle_integer_solvable(rows, b), f"integer solvability {rows} {b}")
            if got is not None:
                c.check(M.apply(got[0]) == b, f"integer solution {rows} {b}")
                c.check(all(not any(M.apply(k)) for k in got[1]), f"integer kernel {rows}")
            aug = [r + [x] for r, x in zip(rows, b)]
            rgot = solve_rational(M.to_rational(), b)
            c.check((rgot is not None) == (rank(rows) == rank(aug)), f"rational solvability {rows} {b}")
            if rgot is not None:
                c.check(M.to_rational().apply(rgot[0]) == b, f"rational solution {rows} {b}")
    count = 0
    for a, b_, cc, d in product(range(-2, 3), repeat=4):
        rows = [[a, b_], [cc, d]]
        _check_matrix(c, IntegerMatrix(rows, 2), rows)
        count += 1
    c.finish(f"500 seeded matrices, {n_solve} solves, {count} exhaustive 2x2")


# ---------------------------------------------------------------------------
# 2. fixture cohomology

def test_criterion_02_fixture_cohomology():
    c = Criterion(2, "H*(K;Z) of every fixture against the oracle", "exact string equality", 30)
    table = []
    for name in NAMES:
        fx = fixture(name)
        for K in (fx.base, fx.K):
            got = [str(cohomology(K.cochain_complex(Z), q).descriptor) for q in range(K.dim + 1)]
            want = integral_cohomology(K.maximal_simplices())
            c.check(got == want, f"{name} ({K.n_vertices} vertices): {got} != {want}")
        table.append(f"{name}=" + ",".join(want))
    c.finish(" ".join(table))


# ---------------------------------------------------------------------------
# 3. spark axioms

def test_criterion_03_spark_axioms():
    c = Criterion(3, "Cech models validate, violations rejected with witnesses", "exact", 30)
    for name in NAMES:
        S = fixture(name).spark_complex
        c.check(validate_spark_complex(S.F, S.iota, S.I, S.psi) is not None, f"{name} model")
    S = fixture("circle6").spark_complex
    try:
        validate_spark_complex(*violation_full_e(S))
        c.check(False, "full-e accepted")
    except SparkAxiomError as e:
        w = e.witness
        F, iota, I, psi = violation_full_e(S)
        s = [int(x) for x in w["s"]]
        c.check(e.axiom == "i" and e.degree == 1, f"full-e axiom {e.axiom} degree {e.degree}")
        c.check(any(s) and psi.apply(1, s) == iota.apply(1, w["x"]), "full-e witness Psi(s) = iota(x)")
    try:
        validate_spark_complex(*violation_duplicate_index(S))
        c.check(False, "duplicate-index accepted")
    except SparkAxiomError as e:
        F, iota, I, psi = violation_duplicate_index(S)
        w = list(e.witness)
        c.check(e.axiom == "iii", f"duplicate-index axiom {e.axiom}")
        c.check(any(w) and not any(psi.apply(0, w)), "duplicate-index witness in ker Psi")
    c.finish(f"{len(NAMES)} models valid, 2 violations rejected")


# ---------------------------------------------------------------------------
# 4. grid

def test_criterion_04_grid():
    c = Criterion(4, "fundamental sequences and the 3 x 3 grid", "exact", 180)
    n_certs = 0
    for name in NAMES:
        S = fixture(name).spark_complex
        for k in DEGREES:
            g = sparks.grid(S, k, budget=64, seed=0)
            n_certs += len(g.certificates)
            for cert in g.certificates:
                c.check(cert.passed, f"{name} k={k} {cert.node}: {cert.detail}")
    c.finish(f"{len(NAMES)} fixtures x k in {DEGREES}, budget 64, seed 0, {n_certs} certificates")


# ---------------------------------------------------------------------------
# 5. cone cohomology

def test_criterion_05_cone_cohomology():
    c = Criterion(5, "H^k(G) against the Q/Z universal-coefficient oracle", "exact string equality", 30)
    shown = []
    for name in NAMES:
        fx = fixture(name)
        S = fx.spark_complex
        for k in range(-1, fx.K.dim + 2):
            got = str(cone_cohomology(S.psi, k))
            want = qz_cohomology(fx.base.maximal_simplices(), k)
            c.check(got == want, f"{name} k={k}: {got} != {want}")
        shown.append(f"{name}:" + ",".join(str(cone_cohomology(S.psi, k)) for k in range(fx.K.dim + 1)))
    c.finish(" ".join(shown))


# ---------------------------------------------------------------------------
# 6. quasi-isomorphism transport

def test_criterion_06_quasi_iso_transport():
    c = Criterion(6, "push/lift through the hyperspark quasi-isomorphism", "exact", 60)
    total = 0
    for name in NAMES:
        fx = fixture(name)
        B, q = fx.hyper
        S = q.small
        rng = Rng(0)
        degs = [k for k in (-1, 0, 1) if k <= fx.K.dim]
        for i in range(32):
            k = degs[i % len(degs)]
            s = random_spark(S, k, rng)
            t = push(q, s)
            c.check(delta1(t) == delta1(s), f"{name}: delta1 changed")
            m = induced_map(q.psi, k + 1, S.H_I(k + 1), B.H_I(k + 1))
            d2 = delta2(s)
            img = [sum(row[j] * d2[j] for j in range(len(d2))) for row in m.matrix]
            orders = B.H_I(k + 1).orders
            got = delta2(t)
            c.check(all((x - y) % o == 0 if o else x == y for x, y, o in zip(img, got, orders)),
                    f"{name}: delta2 not intertwined")
            L = lift(q, t)
            c.check(check_witness(t, push(q, L.spark), L.b, L.s), f"{name}: lift witness")
            c.check(equivalent(L.spark, s), f"{name}: lift(push(s)) not equivalent to s")
            u = random_spark(B, k, rng)
            Lu = lift(q, u)
            c.check(equivalent(u, push(q, Lu.spark)), f"{name}: push(lift(t)) not equivalent to t")
            total += 1
    c.finish(f"{total} sparks (32 per fixture), both round trips")


# ---------------------------------------------------------------------------
# 7. ring structure

RING_FIXTURES = ("circle6", "sphere", "torus", "rp2", "klein", "point")


def _leibniz(c, S, name, pairs):
    M, T = S.model, S.total
    for k, i, l, j in pairs:
        x = [0] * S.F.rank(k)
        y = [0] * S.F.rank(l)
        x[i], y[j] = 1, 1
        lhs = S.F.apply_d(k + l, products.cup_total(M, T, x, k, y, l)) if S.F.rank(k + l + 1) else []
        sign = -1 if k % 2 else 1
        dx = S.F.apply_d(k, x) if S.F.rank(k + 1) else []
        dy = S.F.apply_d(l, y) if S.F.rank(l + 1) else []
        a = products.cup_total(M, T, dx, k + 1, y, l) if dx else [0] * len(lhs)
        b = products.cup_total(M, T, x, k, dy, l + 1) if dy else [0] * len(lhs)
        c.check(list(lhs) == [u + sign * v for u, v in zip(a, b)], f"{name}: Leibniz at {(k, i, l, j)}")


def _combine(outcomes):
    """The sign that holds for every sampled pair: "+1", "-1", "both" or "none"."""
    plus = all(o in ("+1", "both") for o in outcomes)
    minus = all(o in ("-1", "both") for o in outcomes)
    return "both" if plus and minus else "+1" if plus else "-1" if minus else "none"


def test_criterion_07_ring_structure():
    c = Criterion(7, "product laws, delta ring maps and the commutation table", "exact", 120)
    table = {}
    n_leib = 0
    for name in RING_FIXTURES:
        S = fixture(name).spark_complex
        rng = Rng(0)
        top = max(S.F.ranks)
        pairs = [(k, i, l, j) for k in range(top + 1) for l in range(top + 1 - k)
                 for i in range(S.F.rank(k)) for j in range(S.F.rank(l))]
        if len(pairs) > 400:
            pairs = [pairs[rng.below(len(pairs))] for _ in range(400)]
        _leibniz(c, S, name, pairs)
        n_leib += len(pairs)
        u = products.unit_spark(S)
        gens = {k: generator_sparks(S, k)[:2] + [random_spark(S, k, rng)] for k in (-1, 0, 1)}
        for k in (-1, 0, 1):
            for s in gens[k]:
                c.check(equivalent(products.spark_product(u, s), s), f"{name}: left unit in degree {k}")
                c.check(equivalent(products.spark_product(s, u), s), f"{name}: right unit in degree {k}")
        for k, l in product((-1, 0, 1), repeat=2):
            s1, s2 = gens[k][-1], gens[l][-1]
            for g1 in gens[k][:1]:
                c.check(equivalent(products.spark_product(s1 + g1, s2),
                                   products.spark_product(s1, s2) + products.spark_product(g1, s2)),
                        f"{name}: left additivity {(k, l)}")
            moved = s1.perturb([], rng.vector(S.I.rank(k))) if S.I.rank(k) else s1
            c.check(equivalent(products.spark_product(moved, s2), products.spark_product(s1, s2)),
                    f"{name}: well-definedness {(k, l)}")
            rc = products.delta_ring_check(s1, s2)
            c.check(rc.delta1_ok and rc.delta2_ok, f"{name}: delta ring maps {(k, l)}")
            pairs = [(x, y) for x in gens[k][:2] for y in gens[l][:2]]
            pairs += [(random_spark(S, k, rng), random_spark(S, l, rng)) for _ in range(3)]
            signs = {rc.commutation} | {products.commutation_sign(x, y) for x, y in pairs}
            table.setdefault((k, l), {})[name] = _combine(signs)
        x, y, z = gens[-1][-1], gens[0][-1], gens[-1][0] if gens[-1][:1] else gens[-1][-1]
        c.check(equivalent(products.spark_product(products.spark_product(x, y), z),
                           products.spark_product(x, products.spark_product(y, z))),
                f"{name}: associativity")
    # consistency: "both" (target group trivial there) is compatible with any sign
    summary = []
    for (k, l), per in sorted(table.items()):
        definite = {v for v in per.values() if v != "both"}
        c.check(len(definite) <= 1, f"commutation {(k, l)} differs across fixtures: {per}")
        summary.append(f"({k},{l}):{definite.pop() if definite else 'both'}")
    c.check(table[(-1, -1)]["circle6"] == "+1", "unit-degree pair does not commute")
    c.finish(f"{n_leib} Leibniz basis pairs; commutation table " + " ".join(summary))


# ---------------------------------------------------------------------------
# 8. truncation

def test_criterion_08_truncation():
    c = Criterion(8, "level-p projection onto and kernel ideal", "exact", 60)
    runs = 0
    for name, p in (("circle6", 1), ("sphere", 1), ("sphere", 2), ("torus", 1), ("torus", 2), ("rp2", 2)):
        lv = fixture(name).level(p)
        Sp = lv.truncated
        rng = Rng(0)
        for k in (-1, 0, 1):
            for t in generator_sparks(Sp, k) + [random_spark(Sp, k, rng)]:
                s = lv.lift(t)
                c.check(equivalent(lv.project(s), t), f"{name} p={p}: lift does not project back")
        k = p
        x = [Fraction(rng.integer(-3, 3), rng.integer(1, 4)) for _ in range(lv.full.E.rank(k))]
        ks = products.kernel_spark(lv, k, x)
        c.check(equivalent(lv.project(ks), sparks.zero_spark(Sp, k)), f"{name} p={p}: kernel spark survives")
        for i in range(8):
            t = random_spark(lv.full, -1 if i % 2 else 0, rng)
            for prod in (products.spark_product(t, ks), products.spark_product(ks, t)):
                c.check(equivalent(lv.project(prod), sparks.zero_spark(Sp, prod.degree)),
                        f"{name} p={p}: product leaves the kernel")
                c.check(lv.kernel_representative(prod) is not None, f"{name} p={p}: no kernel representative")
        runs += 1
    c.finish(f"{runs} level models, generators lifted, kernel times 8 sparks on both sides")


# ---------------------------------------------------------------------------
# 9. line bundles

def loop(K):
    return [1 if (i + 1) % K.n_vertices == j else -1 for (i, j) in K.simplices(1)]


def test_criterion_09_line_bundles():
    c = Criterion(9, "chern classes, flat holonomy and tensor additivity", "exact", 60)
    S = fixture("sphere").spark_complex
    for d in range(-2, 4):
        L = bundles.bundle_from_chern(S, [d])
        c.check(list(bundles.chern_class(L)) == [d], f"sphere chern {d}")
        c.check(list(bundles.chern_class(bundles.tensor(L, bundles.bundle_from_chern(S, [1])))) == [d + 1],
                f"sphere chern additivity {d} + 1")
    S = fixture("circle6").spark_complex
    z = loop(S.model.K)
    hs = [Fraction(n, 6) for n in range(-6, 7)]
    for h1 in hs:
        L1 = bundles.flat_bundle(S, h1)
        c.check(bundles.holonomy(L1, z) == h1 % 1, f"circle holonomy {h1}")
        for h2 in hs[::3]:
            L2 = bundles.flat_bundle(S, h2)
            c.check(bool(bundles.gauge_equivalent(L1, L2)) == ((h1 - h2) % 1 == 0),
                    f"circle classification {h1} {h2}")
            c.check(bundles.holonomy(bundles.tensor(L1, L2), z) == (h1 + h2) % 1, f"circle tensor {h1} {h2}")
    fx = fixture("torus")
    S = fx.spark_complex
    cycles = homology(fx.K, 1).generators
    gens = S.H_I(1).generators
    pairing = [[bundles.holonomy(bundles.flat_bundle(S, Fraction(1, 7), g), zz) * 7 for zz in cycles] for g in gens]
    pairing = [[x if x < Fraction(7, 2) else x - 7 for x in row] for row in pairing]
    det = pairing[0][0] * pairing[1][1] - pairing[0][1] * pairing[1][0]
    c.check(abs(det) == 1, f"torus holonomy pairing {pairing} is not unimodular")
    rng = Rng(0)
    for _ in range(6):
        h = [Fraction(rng.integer(-5, 5), 5) for _ in range(2)]
        hh = [Fraction(rng.integer(-5, 5), 5) for _ in range(2)]
        L = bundles.tensor(bundles.flat_bundle(S, h[0], gens[0]), bundles.flat_bundle(S, h[1], gens[1]))
        LL = bundles.tensor(bundles.flat_bundle(S, hh[0], gens[0]), bundles.flat_bundle(S, hh[1], gens[1]))
        hol = [bundles.holonomy(L, zz) for zz in cycles]
        hol2 = [bundles.holonomy(LL, zz) for zz in cycles]
        c.check(bool(bundles.gauge_equivalent(L, LL)) == (hol == hol2), f"torus classification {h} {hh}")
        both = [bundles.holonomy(bundles.tensor(L, LL), zz) for zz in cycles]
        c.check(both == [(x + y) % 1 for x, y in zip(hol, hol2)], "torus tensor holonomy")
    shown = "[" + "; ".join(" ".join(str(x) for x in row) for row in pairing) + "]"
    c.finish(f"sphere d in -2..3, circle {len(hs)} holonomies, torus pairing {shown}")


# ---------------------------------------------------------------------------
# 10. functoriality

def test_criterion_10_functoriality():
    c = Criterion(10, "pullback along circle12 -> circle6 -> point", "exact", 30)
    A, B, P = fixture("circle12"), fixture("circle6"), fixture("point")
    SA, SB, SP = A.spark_complex, B.spark_complex, P.spark_complex
    f = SimplicialMap(A.K, B.K, [v % 6 for v in range(12)])  # wraps twice
    g = SimplicialMap(B.K, P.K, [0] * 6)
    gf = g.compose(f)
    rng = Rng(0)
    n = 0
    for k in (-1, 0):
        for _ in range(8):
            s = random_spark(SP, k, rng)
            one = pullback(gf, SA, SP, s)
            two = pullback(f, SA, SB, pullback(g, SB, SP, s))
            c.check(one.a == two.a and one.r == two.r, f"(g f)* != f* g* in degree {k}")
            n += 1
    for k in (-1, 0, 1):
        for _ in range(8):
            s, t = random_spark(SB, k, rng), random_spark(SB, k, rng)
            c.check(equivalent(pullback(f, SA, SB, s + t), pullback(f, SA, SB, s) + pullback(f, SA, SB, t)),
                    f"f* not additive in degree {k}")
            moved = s.perturb([], rng.vector(SB.I.rank(k))) if SB.I.rank(k) else s
            c.check(equivalent(pullback(f, SA, SB, moved), pullback(f, SA, SB, s)),
                    f"f* not defined on classes in degree {k}")
            n += 1
    L = bundles.flat_bundle(SB, Fraction(1, 3))
    zb = loop(B.K)
    c.check(bundles.holonomy(L, zb) == Fraction(1, 3), "circle6 flat holonomy")
    pulled = pullback(f, SA, SB, bundles.bundle_to_spark(L))
    za = loop(A.K)
    from sparkcx.cech import total_chain
    hol = sparks.evaluate(pulled, total_chain(SA.model, SA.total, za, 1))
    c.check(hol == Fraction(2, 3), f"pulled-back holonomy {hol}")
    c.finish(f"{n} sampled sparks, pulled-back holonomy {hol}")
