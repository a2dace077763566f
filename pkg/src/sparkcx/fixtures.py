"""Built-in triangulations and their verified good covers."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .cech import CechModel, good_cover, star_cover
from .complexes import Z, ChainMap, CochainComplex
from .linalg import InputError, IntegerMatrix, RationalMatrix
from .simplicial import SimplicialComplex

NAMES = ("circle3", "circle6", "circle12", "sphere", "torus", "rp2", "klein", "point")


def circle(n):
    return SimplicialComplex(n, [tuple(sorted((i, (i + 1) % n))) for i in range(n)], name=f"circle{n}")


def point():
    return SimplicialComplex(1, [(0,)], name="point")


def octahedron():
    tris = [tuple(sorted(t)) for t in product((0, 1), (2, 3), (4, 5))]
    return SimplicialComplex(6, tris, name="octahedron")


def icosahedron():
    """Apex 0, upper ring 1..5, lower ring 6..10, apex 11."""
    tris = []
    for i in range(5):
        u, u1 = 1 + i, 1 + (i + 1) % 5
        l, l1 = 6 + i, 6 + (i + 1) % 5
        tris += [(0, u, u1), (11, l, l1), (u, u1, l), (u1, l, l1)]
    return SimplicialComplex(12, [tuple(sorted(t)) for t in tris], name="icosahedron")


def torus7():
    """The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    tris = []
    for i in range(7):
        tris.append(tuple(sorted((i, (i + 1) % 7, (i + 3) % 7))))
        tris.append(tuple(sorted((i, (i + 2) % 7, (i + 3) % 7))))
    return SimplicialComplex(7, tris, name="torus")


def rp2_6():
    """The 6-vertex projective plane."""
    tris = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
            (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4)]
    return SimplicialComplex(6, [tuple(sorted(v - 1 for v in t)) for t in tris], name="rp2")


def klein(a=3, b=4):
    """Klein bottle from an a x b grid; the top edge is glued to the bottom flipped."""
    def label(i, j):
        if j % b == 0 and j != 0:
            i = -i
        return (i % a) * b + (j % b)

    tris = set()
    for i in range(a):
        for j in range(b):
            v00, v10 = label(i, j), label(i + 1, j)
            v01, v11 = label(i, j + 1), label(i + 1, j + 1)
            for t in ((v00, v10, v11), (v00, v01, v11)):
                if len(set(t)) != 3:
                    raise InputError("degenerate Klein bottle grid")
                tris.add(tuple(sorted(t)))
    return SimplicialComplex(a * b, tris, name="klein")


def raw(name):
    """The triangulation behind a fixture name, before any subdivision."""
    if name == "point":
        return point()
    if name.startswith("circle"):
        return circle(int(name[len("circle"):]))
    if name == "sphere":
        ico = icosahedron()
        return ico if star_cover(ico).is_good else octahedron()
    table = {"torus": torus7, "rp2": rp2_6, "klein": klein, "octahedron": octahedron,
             "icosahedron": icosahedron}
    if name not in table:
        raise InputError(f"unknown fixture {name!r}")
    return table[name]()


@dataclass
class Fixture:
    name: str
    base: SimplicialComplex
    K: SimplicialComplex
    cover: object
    note: str
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def model(self):
        if "model" not in self._cache:
            self._cache["model"] = CechModel(self.K, self.cover)
        return self._cache["model"]

    @property
    def spark_complex(self):
        from .cech import cech_spark_complex
        if "S" not in self._cache:
            self._cache["S"] = cech_spark_complex(self.K, self.cover, self.model)
        return self._cache["S"]

    @property
    def hyper(self):
        from .cech import hyperspark_complex
        if "hyper" not in self._cache:
            self._cache["hyper"] = hyperspark_complex(self.K, self.cover, self.spark_complex)
        return self._cache["hyper"]

    def level(self, p):
        from .cech import level_p_spark_complex
        key = ("level", p)
        if key not in self._cache:
            self._cache[key] = level_p_spark_complex(self.K, self.cover, p, self.spark_complex)
        return self._cache[key]


@lru_cache(maxsize=None)
def fixture(name):
    """A fixture with a verified good cover, subdividing when the star cover fails."""
    base = raw(name)
    K, cover, note = good_cover(base)
    if name == "sphere":
        note = f"{base.name}, {note}"
    return Fixture(name, base, K, cover, note)


# ---------------------------------------------------------------------------
# Spark-complex data that must be refused, as (F, iota, I, psi) tuples.

def violation_full_e(S):
    """E replaced by all of F: integer bottom-row cocycles lie in both images."""
    return S.F, ChainMap.identity(S.F), S.I, S.psi


def violation_duplicate_index(S):
    """I^0 gains a copy of cover index 0 with d = 0 and Psi = 0."""
    I = S.I
    ranks = dict(I.ranks)
    ranks[0] = I.rank(0) + 1
    diffs = {k: I.d(k) for k in I.ranks if k != 0}
    diffs[0] = IntegerMatrix.from_columns(I.d(0).columns() + [[0] * I.rank(1)], I.rank(1))
    I2 = CochainComplex(Z, ranks, diffs)
    maps = {k: S.psi.f(k) for k in I.ranks if k != 0}
    maps[0] = RationalMatrix.from_columns(S.psi.f(0).columns() + [[0] * S.F.rank(0)], S.F.rank(0))
    return S.F, S.iota, I2, ChainMap(I2, S.F, maps)
