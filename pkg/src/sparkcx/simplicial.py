"""Finite simplicial complexes and simplicial maps."""

from __future__ import annotations

from itertools import combinations, permutations

from .complexes import CochainComplex, Z
from .linalg import InputError, IntegerMatrix


def faces_of(simplex):
    """All nonempty faces of a sorted tuple, including itself."""
    out = []
    for r in range(1, len(simplex) + 1):
        out.extend(combinations(simplex, r))
    return out


def coboundary_matrix(lower, upper):
    """Simplicial coboundary from cochains on `lower` to cochains on `upper`.

    (dc)(v0..vq+1) = sum_i (-1)^i c(v0..^vi..vq+1).  Faces missing from
    `lower` are skipped, which never happens for subcomplexes.
    """
    lower_index = {s: i for i, s in enumerate(lower)}
    rows = []
    for tau in upper:
        row = {}
        for i in range(len(tau)):
            face = tau[:i] + tau[i + 1:]
            j = lower_index.get(face)
            if j is not None:
                row[j] = row.get(j, 0) + (-1 if i % 2 else 1)
        rows.append(row)
    return IntegerMatrix.from_sparse(len(upper), len(lower), rows)


def cochain_complex_of(by_dim, coeff=Z):
    """Simplicial cochain complex of a face-closed family {q: sorted simplices}."""
    ranks = {q: len(s) for q, s in by_dim.items() if s}
    diffs = {}
    for q in ranks:
        if q + 1 in ranks:
            m = coboundary_matrix(by_dim[q], by_dim[q + 1])
            diffs[q] = m if coeff == Z else m.to_rational()
    return CochainComplex(coeff, ranks, diffs, check=False)


def group_by_dim(simplices):
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    return {q: sorted(v) for q, v in sorted(by_dim.items())}


class SimplicialComplex:
    """Vertices 0..n-1 and a face-closed set of strictly increasing tuples."""

    def __init__(self, n_vertices, simplices, name=None, labels=None):
        self.n_vertices = int(n_vertices)
        self.name = name
        self.labels = labels
        closed = set()
        for s in simplices:
            s = tuple(s)
            if not s:
                continue
            if any(b <= a for a, b in zip(s, s[1:])):
                raise InputError(f"simplex {s} is not strictly increasing")
            if s[0] < 0 or s[-1] >= self.n_vertices:
                raise InputError(f"simplex {s} uses a vertex outside 0..{self.n_vertices - 1}")
            if s in closed:
                continue
            closed.update(faces_of(s))
        for v in range(self.n_vertices):
            closed.add((v,))
        self.simplex_set = frozenset(closed)
        self.by_dim = group_by_dim(closed)
        self.index = {q: {s: i for i, s in enumerate(ss)} for q, ss in self.by_dim.items()}

    @property
    def dim(self):
        return max(self.by_dim) if self.by_dim else -1

    def simplices(self, q):
        return self.by_dim.get(q, [])

    def count(self, q):
        return len(self.by_dim.get(q, ()))

    def maximal_simplices(self):
        out = []
        for s in self.simplex_set:
            if not any(len(t) == len(s) + 1 and set(s) <= set(t) for t in self.by_dim.get(len(s), ())):
                out.append(s)
        return sorted(out, key=lambda s: (len(s), s))

    def coboundary(self, q):
        return coboundary_matrix(self.simplices(q), self.simplices(q + 1))

    def cochain_complex(self, coeff=Z):
        return cochain_complex_of(self.by_dim, coeff)

    def closed_star(self, v):
        """All faces of simplices containing v."""
        out = set()
        for s in self.simplex_set:
            if v in s:
                out.update(faces_of(s))
        return frozenset(out)

    def euler_characteristic(self):
        return sum((-1) ** q * len(s) for q, s in self.by_dim.items())

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.n_vertices == other.n_vertices \
            and self.simplex_set == other.simplex_set

    def __hash__(self):
        return hash((self.n_vertices, self.simplex_set))

    def __repr__(self):
        counts = [self.count(q) for q in range(self.dim + 1)]
        return f"SimplicialComplex({self.name or ''} f-vector {counts})"


def barycentric_subdivision(K):
    """First barycentric subdivision.

    Vertices are the simplices of K ordered by (dimension, vertices), so
    the original vertices keep their indices.  labels[i] is the simplex of
    K whose barycenter is vertex i.
    """
    labels = sorted(K.simplex_set, key=lambda s: (len(s), s))
    idx = {s: i for i, s in enumerate(labels)}
    tops = set()
    for sigma in K.maximal_simplices():
        for perm in permutations(sigma):
            chain = tuple(sorted(idx[tuple(sorted(perm[:r]))] for r in range(1, len(perm) + 1)))
            tops.add(chain)
    name = f"sd({K.name})" if K.name else None
    return SimplicialComplex(len(labels), tops, name=name, labels=labels)


def _sort_sign(seq):
    """Sorted tuple and permutation sign; sign 0 when an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return tuple(sorted(seq)), 0
    sign = 1
    arr = seq[:]
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return tuple(arr), sign


class SimplicialMap:
    """A vertex map K' -> K sending simplices to simplices."""

    def __init__(self, source, target, vertex_map):
        self.source, self.target = source, target
        self.vmap = tuple(int(v) for v in vertex_map)
        if len(self.vmap) != source.n_vertices:
            raise InputError("vertex map length differs from the source vertex count")
        for s in source.simplex_set:
            img = tuple(sorted(set(self.vmap[v] for v in s)))
            if img not in target.simplex_set:
                raise InputError(f"image of {s} is {img}, not a simplex of the target")

    def image(self, simplex):
        """(sorted image, sign), with sign 0 for a degenerate image."""
        return _sort_sign(self.vmap[v] for v in simplex)

    def cochain_pullback(self, q, c, source_simplices=None, target_index=None):
        """Pull back a q-cochain given on target simplices of dimension q."""
        src = source_simplices if source_simplices is not None else self.source.simplices(q)
        tidx = target_index if target_index is not None else self.target.index.get(q, {})
        out = []
        for s in src:
            img, sg = self.image(s)
            out.append(sg * c[tidx[img]] if sg else 0)
        return out

    def compose(self, other):
        """self after other (other : K'' -> K', self : K' -> K)."""
        return SimplicialMap(other.source, self.target, [self.vmap[v] for v in other.vmap])


def subdivide_map(f, sd_source, sd_target):
    """sd(f): the barycenter of sigma goes to the barycenter of f(sigma)."""
    if sd_source.labels is None or sd_target.labels is None:
        raise InputError("subdivide_map needs barycentric subdivisions")
    tidx = {s: i for i, s in enumerate(sd_target.labels)}
    vmap = [tidx[tuple(sorted(set(f.vmap[v] for v in s)))] for s in sd_source.labels]
    return SimplicialMap(sd_source, sd_target, vmap)


def homology(K, q):
    """H_q(K; Z) presented through the chain complex placed in degrees -dim..0.

    Generators are integer q-cycles on K.simplices(q); orders follow the
    cohomology presentation convention (0 = free).
    """
    from .complexes import cohomology

    top = K.dim
    ranks = {-j: K.count(j) for j in range(top + 1)}
    diffs = {-j: K.coboundary(j - 1).T for j in range(1, top + 1)}
    return cohomology(CochainComplex(Z, ranks, diffs), -q)
