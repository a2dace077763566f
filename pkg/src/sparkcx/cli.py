"""Command-line interface.  Every command prints a deterministic report.

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import bundles, formats, products, quasi_iso, sparks
from .cech import CoverError, cech_spark_complex, good_cover, pullback, star_cover
from .complexes import Q, Z, ValidationError, cohomology
from .fixtures import NAMES, fixture, raw, violation_duplicate_index, violation_full_e
from .linalg import InputError
from .simplicial import SimplicialMap, homology, subdivide_map


class Report:
    def __init__(self, argv, seed):
        self.lines = ["command: sparkcx " + " ".join(argv), f"seed: {seed}"]
        self.status = 0

    def section(self, title):
        self.lines.append(f"[{title}]")

    def add(self, text):
        self.lines.append(text)

    def kv(self, key, value):
        self.lines.append(f"{key}: {value}")

    def fail(self, text):
        self.lines.append(f"FAIL {text}")
        self.status = max(self.status, 1)

    def render(self):
        status = {0: "ok", 1: "check failed", 2: "input error"}[self.status]
        return "\n".join(self.lines + [f"status: {status}"]) + "\n"


def fmt(x):
    """Exact, stable text for numbers, vectors and witness dictionaries."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return formats.fmt_number(x)
    if isinstance(x, (list, tuple)):
        return "[" + " ".join(fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {fmt(v)}" for k, v in x.items()) + "}"
    return str(x)


# ---------------------------------------------------------------------------
# Loading inputs.

# Raw triangulations that are not fixtures but can be named on the command line.
EXTRA = ("octahedron", "icosahedron")


class Source:
    """A base complex with its good cover and lazily built models."""

    def __init__(self, arg):
        self.arg = arg
        stem = os.path.basename(arg)
        stem = stem[:-4] if stem.endswith(".scx") else stem
        if os.path.isfile(arg) or stem in EXTRA:
            self.base = formats.parse_scx(_read(arg), name=stem) if os.path.isfile(arg) else raw(stem)
            self._fixture = None
            self.K, self.cover, self.note = good_cover(self.base)
            self._S = None
            self._hyper = None
        elif stem in NAMES:
            fx = fixture(stem)
            self._fixture = fx
            self.base, self.K, self.cover, self.note = fx.base, fx.K, fx.cover, fx.note
        else:
            raise InputError(f"{arg!r} is neither a file nor a built-in complex "
                             f"({', '.join(NAMES + EXTRA)})")

    @property
    def S(self):
        if self._fixture is not None:
            return self._fixture.spark_complex
        if self._S is None:
            self._S = cech_spark_complex(self.K, self.cover)
        return self._S

    @property
    def hyper(self):
        if self._fixture is not None:
            return self._fixture.hyper
        if self._hyper is None:
            from .cech import hyperspark_complex
            self._hyper = hyperspark_complex(self.K, self.cover, self.S)
        return self._hyper

    def level(self, p):
        if self._fixture is not None:
            return self._fixture.level(p)
        from .cech import level_p_spark_complex
        return level_p_spark_complex(self.K, self.cover, p, self.S)

    @property
    def subdivided(self):
        return self.K is not self.base


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from None


def load_spark(S, arg):
    """A .spk file, or const:c for the degree-0 spark with a = c on every member vertex."""
    if arg.startswith("const:"):
        c = formats.parse_number(arg[len("const:"):])
        return sparks.make_spark(S, 0, [c] * S.F.rank(0), [0] * S.I.rank(1))
    d = formats.parse_spk(_read(arg))
    return sparks.make_spark(S, d.degree, d.a, d.r)


def load_bundle(S, arg):
    g, A = formats.parse_lbd(_read(arg))
    return bundles.bundle(S, g, A)


def _ints(text, what):
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"{what} must be a list of integers") from None


def _spark_lines(rep, name, s):
    rep.kv(f"{name}.degree", s.degree)
    rep.kv(f"{name}.a", fmt(s.a))
    rep.kv(f"{name}.r", fmt(s.r))
    rep.kv(f"{name}.e", fmt(s.e))


# ---------------------------------------------------------------------------
# Commands.

def cmd_cohomology(args, rep):
    src = Source(args.complex)
    coeff = Z if args.coeff == "z" else Q
    C = src.base.cochain_complex(coeff)
    rep.section(f"cohomology {src.base.name} coeff {coeff}")
    for k in range(src.base.dim + 1):
        rep.kv(f"H^{k}", cohomology(C, k).text())


def cmd_check_cover(args, rep):
    src = Source(args.complex)
    cov = star_cover(src.base)
    rep.section(f"star cover of {src.base.name}")
    rep.kv("members", cov.size)
    rep.kv("nerve", " ".join(f"{len(cov.nerve.get(p, []))}" for p in sorted(cov.nerve)))
    if cov.is_good:
        rep.add("good: every nonempty intersection is acyclic")
    else:
        for sigma, desc in cov.failures[:5]:
            rep.fail(f"intersection {fmt(list(sigma))} has cohomology {fmt(desc)}")
        rep.section("fallback")
        rep.kv("model", src.note)
        rep.kv("members", src.cover.size)
        rep.kv("good", src.cover.is_good)


def _spark_complex_lines(rep, S):
    for name, C in (("F", S.F), ("E", S.E), ("I", S.I)):
        rep.kv(f"{name} ranks", " ".join(f"{k}:{C.rank(k)}" for k in sorted(C.ranks)) or "0")
    for k in sorted(S.F.ranks):
        rep.kv(f"H^{k}(F)", S.H_F(k).text())
    for k in sorted(S.I.ranks):
        rep.kv(f"H^{k}(I)", S.H_I(k).descriptor)


def cmd_build_model(args, rep):
    src = Source(args.complex)
    rep.section(f"model {args.kind} on {src.base.name} ({src.note})")
    if args.kind == "cech":
        S = src.S
    elif args.kind == "hyper":
        S, q = src.hyper
        rep.kv("quasi-isomorphism", "validated")
    else:
        if args.level is None:
            raise InputError("build-model level-p needs --level")
        S = src.level(args.level).truncated
    rep.kv("axioms", "i ii iii hold")
    _spark_complex_lines(rep, S)
    if args.out:
        _write(args.out, formats.dump_spc(S))
        rep.kv("wrote", args.out)


def cmd_check_axioms(args, rep):
    if args.complex.endswith(".spc") and os.path.isfile(args.complex):
        data = formats.build_spark_data(formats.parse_spc(_read(args.complex)))
        rep.section(f"axioms of {args.complex}")
    else:
        src = Source(args.complex)
        S = src.S
        data = {"none": lambda S: (S.F, S.iota, S.I, S.psi), "full-e": violation_full_e,
                "duplicate-index": violation_duplicate_index}[args.violation](S)
        rep.section(f"axioms of the Cech model on {src.base.name}"
                    + (f" with violation {args.violation}" if args.violation != "none" else ""))
    try:
        S = sparks.validate_spark_complex(*data)
    except sparks.SparkAxiomError as e:
        rep.fail(str(e))
        rep.kv("witness", fmt(e.witness))
        return
    rep.add("axioms (i), (ii), (iii) hold")
    _spark_complex_lines(rep, S)


def cmd_grid(args, rep):
    src = Source(args.complex)
    S = src.S
    degrees = [args.degree] if args.degree is not None else [-1, 0, 1, 2]
    for k in degrees:
        g = sparks.grid(S, k, args.budget, args.seed)
        rep.section(f"grid degree {k}")
        for line in g.lines()[1:]:
            rep.add(line.strip())
        if not g.passed:
            rep.fail(f"grid degree {k} has failing certificates")


def cmd_spark_eq(args, rep):
    S = Source(args.complex).S
    s1, s2 = load_spark(S, args.first), load_spark(S, args.second)
    eq = sparks.sparks_equivalent(s1, s2)
    rep.section("spark equivalence")
    rep.kv("decision", "equivalent" if eq else "not equivalent")
    if eq:
        rep.kv("witness.b", fmt(eq.b))
        rep.kv("witness.s", fmt(eq.s))
        if not sparks.check_witness(s1, s2, eq.b, eq.s):
            rep.fail("witness does not re-verify")
        else:
            rep.add("witness re-verified: a1 - a2 = D b + Psi(s), r1 - r2 = -d s")


def cmd_product(args, rep):
    S = Source(args.complex).S
    s1, s2 = load_spark(S, args.first), load_spark(S, args.second)
    p = products.spark_product(s1, s2, form=args.form)
    rep.section(f"product ({args.form}-form)")
    _spark_lines(rep, "product", p)
    if args.out:
        _write(args.out, formats.dump_spk(p))
        rep.kv("wrote", args.out)


def cmd_push(args, rep):
    src = Source(args.complex)
    B, q = src.hyper
    s = load_spark(src.S, args.spark)
    t = quasi_iso.push(q, s)
    rep.section("push to the hyperspark model")
    _spark_lines(rep, "pushed", t)
    if args.out:
        _write(args.out, formats.dump_spk(t))
        rep.kv("wrote", args.out)


def cmd_lift(args, rep):
    src = Source(args.complex)
    B, q = src.hyper
    # const:c names the push of the constant Cech spark, the constant in the big model
    t = quasi_iso.push(q, load_spark(src.S, args.spark)) if args.spark.startswith("const:") \
        else load_spark(B, args.spark)
    res = quasi_iso.lift(q, t)
    rep.section("lift to the Cech model")
    _spark_lines(rep, "lifted", res.spark)
    rep.kv("witness.b", fmt(res.b))
    rep.kv("witness.s", fmt(res.s))
    if args.out:
        _write(args.out, formats.dump_spk(res.spark))
        rep.kv("wrote", args.out)


def cmd_pullback(args, rep):
    src, tgt = Source(args.source), Source(args.target)
    f = SimplicialMap(src.base, tgt.base, _ints(args.vertex_map, "--vertex-map"))
    if src.subdivided != tgt.subdivided:
        raise InputError("pullback needs both models subdivided or both unsubdivided")
    if src.subdivided:
        f = subdivide_map(f, src.K, tgt.K)
    s = load_spark(tgt.S, args.spark)
    out = pullback(f, src.S, tgt.S, s)
    rep.section(f"pullback {tgt.base.name} -> {src.base.name}")
    _spark_lines(rep, "pulled", out)
    if args.out:
        _write(args.out, formats.dump_spk(out))
        rep.kv("wrote", args.out)


def cmd_bundle(args, rep):
    src = Source(args.complex)
    S = src.S
    op = args.op
    rep.section(f"bundle {op}")
    if op == "from-chern":
        L = bundles.bundle_from_chern(S, _ints(args.chern or "", "--class"))
        rep.kv("chern", fmt(bundles.chern_class(L)))
        rep.kv("g", fmt(L.g))
        rep.kv("A", fmt(L.A))
        if args.out:
            _write(args.out, formats.dump_lbd(L))
            rep.kv("wrote", args.out)
        return
    if op == "flat":
        L = bundles.flat_bundle(S, formats.parse_number(args.holonomy or "0"))
        rep.kv("g", fmt(L.g))
        if args.out:
            _write(args.out, formats.dump_lbd(L))
            rep.kv("wrote", args.out)
        return
    if not args.bundles:
        raise InputError(f"bundle {op} needs a .lbd file")
    L = load_bundle(S, args.bundles[0])
    if op == "to-spark":
        _spark_lines(rep, "spark", bundles.bundle_to_spark(L))
    elif op == "chern":
        rep.kv("H^2(I)", S.H_I(2).descriptor)
        rep.kv("chern", fmt(bundles.chern_class(L)))
    elif op == "curvature":
        rep.kv("curvature", fmt(bundles.curvature(L)))
    elif op in ("tensor", "gauge-eq"):
        if len(args.bundles) != 2:
            raise InputError(f"bundle {op} needs two .lbd files")
        L2 = load_bundle(S, args.bundles[1])
        if op == "tensor":
            T = bundles.tensor(L, L2)
            rep.kv("chern", fmt(bundles.chern_class(T)))
            rep.kv("g", fmt(T.g))
            rep.kv("A", fmt(T.A))
            if args.out:
                _write(args.out, formats.dump_lbd(T))
                rep.kv("wrote", args.out)
        else:
            eq = bundles.gauge_equivalent(L, L2)
            rep.kv("decision", "gauge equivalent" if eq else "not gauge equivalent")
            if eq:
                rep.kv("witness.b", fmt(eq.b))
                rep.kv("witness.s", fmt(eq.s))
    elif op == "holonomy":
        if args.cycle:
            cycles = [_ints(args.cycle, "--cycle")]
        else:
            H = homology(src.K, 1)
            cycles = [g for g, o in zip(H.generators, H.orders) if o == 0]
        for i, z in enumerate(cycles):
            rep.kv(f"cycle {i}", fmt(z))
            rep.kv(f"holonomy {i}", fmt(bundles.holonomy(L, z)))


def cmd_selftest(args, rep):
    from .selftest import run_selftest

    if args.dump_fixtures:
        os.makedirs(args.dump_fixtures, exist_ok=True)
        rep.section("fixtures")
        for name in NAMES:
            path = os.path.join(args.dump_fixtures, f"{name}.scx")
            _write(path, formats.dump_scx(fixture(name).base))
            rep.kv(name, path)
        return
    for ok, line in run_selftest(args.seed, args.budget, quick=args.quick):
        if ok:
            rep.add(f"ok {line}")
        else:
            rep.fail(line)


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="sparkcx", description="Exact spark complexes on simplicial complexes.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=64)
    common.add_argument("--coeff", choices=("z", "q"), default="z")
    common.add_argument("--level", type=int)
    common.add_argument("--out")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *positionals):
        sp = sub.add_parser(name, parents=[common])
        for pos in positionals:
            sp.add_argument(pos)
        sp.set_defaults(func=func)
        return sp

    add("cohomology", cmd_cohomology, "complex")
    add("check-cover", cmd_check_cover, "complex")
    sp = sub.add_parser("build-model", parents=[common])
    sp.add_argument("kind", choices=("cech", "hyper", "level-p"))
    sp.add_argument("complex")
    sp.set_defaults(func=cmd_build_model)
    sp = add("check-axioms", cmd_check_axioms, "complex")
    sp.add_argument("--violation", choices=("none", "full-e", "duplicate-index"), default="none")
    sp = add("grid", cmd_grid, "complex")
    sp.add_argument("--degree", type=int)
    add("spark-eq", cmd_spark_eq, "complex", "first", "second")
    sp = add("product", cmd_product, "complex", "first", "second")
    sp.add_argument("--form", choices=("psi", "s"), default="psi")
    add("push", cmd_push, "complex", "spark")
    add("lift", cmd_lift, "complex", "spark")
    sp = add("pullback", cmd_pullback, "source", "target", "spark")
    sp.add_argument("--vertex-map", required=True)
    sp = sub.add_parser("bundle", parents=[common])
    sp.add_argument("op", choices=("to-spark", "chern", "curvature", "tensor", "holonomy",
                                   "from-chern", "gauge-eq", "flat"))
    sp.add_argument("complex")
    sp.add_argument("bundles", nargs="*")
    sp.add_argument("--class", dest="chern")
    sp.add_argument("--cycle")
    sp.add_argument("--holonomy")
    sp.set_defaults(func=cmd_bundle)
    sp = sub.add_parser("selftest", parents=[common])
    sp.add_argument("--dump-fixtures", metavar="DIR")
    sp.add_argument("--quick", action="store_true")
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None, stdout=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    rep = Report(argv, args.seed)
    try:
        if args.seed < 0:
            raise InputError("--seed must be non-negative")
        if args.budget < 0:
            raise InputError("--budget must be non-negative")
        args.func(args, rep)
    except (ValidationError, AssertionError) as e:
        rep.fail(str(e) or type(e).__name__)
        witness = getattr(e, "witness", None)
        if witness is not None:
            rep.kv("witness", fmt(witness))
    except CoverError as e:
        rep.add(f"error: {e}")
        if e.witness is not None:
            rep.kv("witness", fmt(e.witness))
        rep.status = 2
    except InputError as e:
        rep.add(f"error: {e}")
        rep.status = 2
    stdout.write(rep.render())
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
