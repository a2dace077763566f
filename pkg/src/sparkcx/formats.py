"""Text formats: .scx complexes, .spc spark complexes, .spk sparks, .lbd bundles.

All four are line based.  Blank lines and lines starting with '#' are
ignored.  Numbers are integers or exact rationals written p/q.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import Q, Z, ChainMap, CochainComplex
from .linalg import InputError, IntegerMatrix, RationalMatrix
from .simplicial import SimplicialComplex

_NUMBER = re.compile(r"[+-]?\d+(?:/\d+)?")


class ParseError(InputError):
    """Malformed input; carries the 1-based line number and the block name."""

    def __init__(self, message, line=None, block=None):
        where = []
        if block:
            where.append(f"block {block}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.block = block


def _lines(text):
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s and not s.startswith("#"):
            yield n, s.split()


def _int(tok, line, block=None):
    if not re.fullmatch(r"[+-]?\d+", tok):
        raise ParseError(f"expected an integer, got {tok!r}", line, block)
    return int(tok)


def parse_number(tok, line=None, block=None):
    if not _NUMBER.fullmatch(tok):
        raise ParseError(f"expected an integer or p/q, got {tok!r}", line, block)
    if "/" in tok:
        p, q = tok.split("/")
        if int(q) == 0:
            raise ParseError(f"zero denominator in {tok!r}", line, block)
        x = Fraction(int(p), int(q))
        return x.numerator if x.denominator == 1 else x
    return int(tok)


def fmt_number(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vector(v):
    return " ".join(fmt_number(x) for x in v)


def _header(lines, tag):
    try:
        n, toks = next(lines)
    except StopIteration:
        raise ParseError(f"empty input, expected header '{tag} v1'") from None
    if toks != [tag, "v1"]:
        raise ParseError(f"expected header '{tag} v1'", n)


# ---------------------------------------------------------------------------
# .scx

def parse_scx(text, name=None):
    lines = _lines(text)
    _header(lines, "scx")
    try:
        n, toks = next(lines)
    except StopIteration:
        raise ParseError("missing 'vertices N' line") from None
    if len(toks) != 2 or toks[0] != "vertices":
        raise ParseError("expected 'vertices N'", n)
    nv = _int(toks[1], n)
    if nv < 0:
        raise ParseError("vertex count must be nonnegative", n)
    seen = {}
    for n, toks in lines:
        if toks[0] != "simplex":
            raise ParseError(f"unknown keyword {toks[0]!r}", n)
        if len(toks) < 2:
            raise ParseError("simplex needs at least one vertex", n)
        s = tuple(_int(t, n) for t in toks[1:])
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ParseError(f"indices {s} are not strictly increasing", n)
        if s[0] < 0 or s[-1] >= nv:
            raise ParseError(f"vertex index outside 0..{nv - 1}", n)
        if s in seen:
            raise ParseError(f"duplicate simplex {s} (first on line {seen[s]})", n)
        seen[s] = n
    return SimplicialComplex(nv, list(seen), name=name)


def dump_scx(K):
    """Canonical form: maximal simplices in (dimension, lexicographic) order."""
    out = ["scx v1", f"vertices {K.n_vertices}"]
    for s in K.maximal_simplices():
        out.append("simplex " + " ".join(str(v) for v in s))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# .spc

@dataclass
class MatrixBlock:
    degree: int
    rows: list
    nrows: int
    ncols: int
    line: int


@dataclass
class ComplexData:
    name: str
    coeff: str
    ranks: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)


@dataclass
class SpcData:
    """Raw matrices of a spark complex; building defers validation to sparks."""

    complexes: dict
    maps: dict


_COMPLEXES = ("F", "E", "I")
_MAPS = {"iota": ("E", "F"), "psi": ("I", "F")}


def _read_rows(lines, count, width, block, start):
    rows = []
    for _ in range(count):
        try:
            n, toks = next(lines)
        except StopIteration:
            raise ParseError(f"expected {count} rows, got {len(rows)}", start, block) from None
        if len(toks) != width:
            raise ParseError(f"row has {len(toks)} entries, expected {width}", n, block)
        rows.append([parse_number(t, n, block) for t in toks])
    return rows


def parse_spc(text):
    """Grammar:

        spc v1
        complex F q | complex E q | complex I z
        rank k n
        deg k rows R cols C      (followed by R rows; d_k for a complex,
                                  the degree-k component for a map)
        map iota | map psi

    Omitted complexes and maps are zero.
    """
    lines = _lines(text)
    _header(lines, "spc")
    complexes = {c: ComplexData(c, Z if c == "I" else Q) for c in _COMPLEXES}
    maps = {m: [] for m in _MAPS}
    current = None
    for n, toks in lines:
        key = toks[0]
        if key == "complex":
            if len(toks) != 3 or toks[1] not in complexes:
                raise ParseError("expected 'complex F|E|I q|z'", n)
            want = "z" if toks[1] == "I" else "q"
            if toks[2] != want:
                raise ParseError(f"complex {toks[1]} must have coefficients {want}", n)
            current = ("complex", toks[1])
        elif key == "map":
            if len(toks) != 2 or toks[1] not in maps:
                raise ParseError("expected 'map iota|psi'", n)
            current = ("map", toks[1])
        elif key == "rank":
            if current is None or current[0] != "complex" or len(toks) != 3:
                raise ParseError("'rank k n' belongs inside a complex block", n)
            k, r = _int(toks[1], n, current[1]), _int(toks[2], n, current[1])
            if r < 0:
                raise ParseError("rank must be nonnegative", n, current[1])
            complexes[current[1]].ranks[k] = r
        elif key == "deg":
            if current is None:
                raise ParseError("'deg' outside a complex or map block", n)
            block = current[1]
            if len(toks) != 6 or toks[2] != "rows" or toks[4] != "cols":
                raise ParseError("expected 'deg k rows R cols C'", n, block)
            k, R, C = (_int(toks[i], n, block) for i in (1, 3, 5))
            if R < 0 or C < 0:
                raise ParseError("negative matrix size", n, block)
            mb = MatrixBlock(k, _read_rows(lines, R, C, block, n), R, C, n)
            (complexes[block].blocks if current[0] == "complex" else maps[block]).append(mb)
        else:
            raise ParseError(f"unknown keyword {key!r}", n, current[1] if current else None)
    for c in complexes.values():
        _settle_ranks(c)
    for name, blocks in maps.items():
        src, tgt = (complexes[x] for x in _MAPS[name])
        for b in blocks:
            want = (tgt.ranks.get(b.degree, 0), src.ranks.get(b.degree, 0))
            if (b.nrows, b.ncols) != want:
                raise ParseError(f"degree {b.degree} block is {b.nrows}x{b.ncols}, expected "
                                 f"{want[0]}x{want[1]}", b.line, name)
    return SpcData(complexes, maps)


def _settle_ranks(c):
    """Ranks from 'rank' lines and differential shapes, which must agree."""
    def put(k, r, line):
        old = c.ranks.setdefault(k, r)
        if old != r:
            raise ParseError(f"rank of degree {k} is both {old} and {r}", line, c.name)

    seen = set()
    for b in c.blocks:
        if b.degree in seen:
            raise ParseError(f"second differential for degree {b.degree}", b.line, c.name)
        seen.add(b.degree)
        put(b.degree, b.ncols, b.line)
        put(b.degree + 1, b.nrows, b.line)


def _matrix(b, coeff):
    if coeff == Z:
        return IntegerMatrix(b.rows, b.ncols)
    return RationalMatrix(b.rows, b.ncols)


def build_spark_data(data):
    """(F, iota, I, psi) ready for validate_spark_complex; errors are input errors."""
    cx = {}
    for name, c in data.complexes.items():
        try:
            cx[name] = CochainComplex(c.coeff, c.ranks, {b.degree: _matrix(b, c.coeff) for b in c.blocks})
        except InputError as e:
            raise ParseError(str(e), block=name) from None
    out = {}
    for name, (src, tgt) in _MAPS.items():
        mats = {b.degree: _matrix(b, Q) for b in data.maps[name]}
        out[name] = ChainMap(cx[src], cx[tgt], mats, check=False)
    return cx["F"], out["iota"], cx["I"], out["psi"]


def _dump_matrix(lines, k, m):
    lines.append(f"deg {k} rows {m.nrows} cols {m.ncols}")
    for r in m.tolist():
        lines.append(fmt_vector(r))


def dump_spc(S):
    lines = ["spc v1"]
    for name, C in (("F", S.F), ("E", S.E), ("I", S.I)):
        lines.append(f"complex {name} {'z' if name == 'I' else 'q'}")
        for k in sorted(C.ranks):
            lines.append(f"rank {k} {C.rank(k)}")
        for k in sorted(C.ranks):
            if C.rank(k + 1):
                _dump_matrix(lines, k, C.d(k))
    for name, f in (("iota", S.iota), ("psi", S.psi)):
        lines.append(f"map {name}")
        for k in sorted(f.source.ranks):
            if f.target.rank(k):
                _dump_matrix(lines, k, f.f(k))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# .spk and .lbd

@dataclass
class SpkData:
    degree: int
    a: list
    r: list


def _vector_lines(lines, tag, keys):
    got = {}
    for n, toks in lines:
        key = toks[0]
        if key not in keys:
            raise ParseError(f"unknown keyword {key!r}", n, tag)
        if key in got:
            raise ParseError(f"second '{key}' line", n, tag)
        if key == "degree":
            if len(toks) != 2:
                raise ParseError("expected 'degree k'", n, tag)
            got[key] = _int(toks[1], n, tag)
        else:
            got[key] = [parse_number(t, n, tag) for t in toks[1:]]
    missing = [k for k in keys if k not in got]
    if missing:
        raise ParseError(f"missing line(s): {', '.join(missing)}", block=tag)
    return got


def parse_spk(text):
    """spk v1 / degree k / a <F^k coordinates> / r <I^(k+1) coordinates>."""
    lines = _lines(text)
    _header(lines, "spk")
    got = _vector_lines(lines, "spk", ("degree", "a", "r"))
    return SpkData(got["degree"], got["a"], got["r"])


def dump_spk(s):
    return f"spk v1\ndegree {s.degree}\na {fmt_vector(s.a)}".rstrip() + \
        f"\nr {fmt_vector(s.r)}".rstrip() + "\n"


def parse_lbd(text):
    """lbd v1 / g <(1,0) coordinates> / A <(0,1) coordinates>; returns (g, A)."""
    lines = _lines(text)
    _header(lines, "lbd")
    got = _vector_lines(lines, "lbd", ("g", "A"))
    return got["g"], got["A"]


def dump_lbd(L):
    return f"lbd v1\ng {fmt_vector(L.g)}".rstrip() + f"\nA {fmt_vector(L.A)}".rstrip() + "\n"
