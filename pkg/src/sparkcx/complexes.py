"""Cochain complexes, chain maps, cohomology, cones and double complexes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import (
    GroupDescriptor,
    InputError,
    IntegerMatrix,
    MixedGroupDescriptor,
    RationalMatrix,
    RationalSolver,
    hstack,
    integer_kernel,
    quotient_descriptor,
    rational_kernel,
    rref_rows,
    smith_rows,
)

Z = "Z"
Q = "Q"


class ValidationError(ValueError):
    """A structural identity (d*d = 0, commuting squares, ...) failed."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _matrix_cls(coeff):
    return IntegerMatrix if coeff == Z else RationalMatrix


def _zero_vec(coeff, n):
    return [0] * n if coeff == Z else [Fraction(0)] * n


class CochainComplex:
    """A bounded cochain complex over Z or Q.

    ranks maps degree -> rank; diffs maps degree k -> matrix d_k of shape
    rank(k+1) x rank(k).  Degrees outside the ranks table are zero.
    """

    def __init__(self, coeff, ranks, diffs=None, check=True):
        if coeff not in (Z, Q):
            raise InputError(f"unknown coefficient tag {coeff!r}")
        self.coeff = coeff
        self.ranks = {k: int(r) for k, r in ranks.items() if r}
        self._d = {}
        for k, m in (diffs or {}).items():
            if m.shape != (self.rank(k + 1), self.rank(k)):
                raise InputError(f"d_{k} has shape {m.shape}, expected {(self.rank(k + 1), self.rank(k))}")
            if coeff == Q and isinstance(m, IntegerMatrix):
                m = m.to_rational()
            if coeff == Z and not isinstance(m, IntegerMatrix):
                m = m.to_integer()
            if m.nrows and m.ncols and not m.is_zero():
                self._d[k] = m
        if check:
            self.check()

    @property
    def degrees(self):
        return sorted(self.ranks)

    @property
    def lo(self):
        return min(self.ranks) if self.ranks else 0

    @property
    def hi(self):
        return max(self.ranks) if self.ranks else 0

    def rank(self, k):
        return self.ranks.get(k, 0)

    def d(self, k):
        m = self._d.get(k)
        if m is None:
            return _matrix_cls(self.coeff).zeros(self.rank(k + 1), self.rank(k))
        return m

    def apply_d(self, k, v):
        m = self._d.get(k)
        if m is None:
            return _zero_vec(self.coeff, self.rank(k + 1))
        return m.apply(v)

    def check(self):
        for k in self._d:
            if (k + 1) in self._d:
                prod = self._d[k + 1] @ self._d[k]
                if not prod.is_zero():
                    raise ValidationError(f"d_{k + 1} d_{k} != 0")

    def zero(self, k):
        return _zero_vec(self.coeff, self.rank(k))

    def to_rational(self):
        if self.coeff == Q:
            return self
        return CochainComplex(Q, self.ranks, {k: m.to_rational() for k, m in self._d.items()}, check=False)

    def __repr__(self):
        return f"CochainComplex({self.coeff}, ranks={dict(sorted(self.ranks.items()))})"


class ChainMap:
    """Per-degree matrices f_k : source^k -> target^k commuting with d."""

    def __init__(self, source, target, maps, check=True):
        self.source, self.target = source, target
        self._f = {}
        for k, m in maps.items():
            if m.shape != (target.rank(k), source.rank(k)):
                raise InputError(f"f_{k} has shape {m.shape}, expected {(target.rank(k), source.rank(k))}")
            if m.nrows and m.ncols and not m.is_zero():
                self._f[k] = m
        self.rational = target.coeff == Q or source.coeff == Q
        if check:
            self.check()

    def f(self, k):
        m = self._f.get(k)
        if m is None:
            cls = RationalMatrix if self.rational else IntegerMatrix
            return cls.zeros(self.target.rank(k), self.source.rank(k))
        return m

    def apply(self, k, v):
        m = self._f.get(k)
        if m is None:
            return _zero_vec(self.target.coeff, self.target.rank(k))
        return m.apply(v)

    def check(self):
        degs = set(self.source.ranks) | set(self.target.ranks)
        for k in degs:
            lhs = self.f(k + 1) @ self.source.d(k)
            rhs = self.target.d(k) @ self.f(k)
            if not (lhs - rhs).is_zero():
                raise ValidationError(f"chain map fails to commute in degree {k}", witness=k)

    @classmethod
    def identity(cls, C):
        M = _matrix_cls(C.coeff)
        return cls(C, C, {k: M.identity(C.rank(k)) for k in C.ranks}, check=False)

    def compose(self, other):
        """self after other."""
        degs = set(other.source.ranks)
        return ChainMap(other.source, self.target, {k: self.f(k) @ other.f(k) for k in degs}, check=False)


# ---------------------------------------------------------------------------
# Cohomology.

class CohomologyPresentation:
    """H^k as generators with orders: 0 for a free generator, d >= 2 for Z/d.

    Generators are cocycles in ambient coordinates.  coordinates(v) maps
    a cocycle to its class, with torsion coordinates reduced mod d.
    """

    def __init__(self, complex_, degree):
        C = complex_
        self.complex = C
        self.degree = k = degree
        self.coeff = C.coeff
        n = C.rank(k)
        self.ambient = n
        dk = C.d(k)
        dprev = C.d(k - 1)
        if C.coeff == Q:
            self._init_rational(dk, dprev)
            return
        basis = integer_kernel(dk) if n else []
        self._basis = basis
        z = len(basis)
        self._zsolve = RationalSolver(IntegerMatrix.from_columns(basis, n)) if z else None
        rels = [self._zcoords(col) for col in dprev.columns()] if z else []
        self._init_integer(z, rels)

    def _zcoords(self, v):
        y = self._zsolve.solve(list(v))
        if y is None:
            raise InputError("vector is not a cocycle")
        return y

    def _init_integer(self, z, rels):
        rows = [dict() for _ in range(z)]
        for j, y in enumerate(rels):
            for i, v in enumerate(y):
                if v:
                    rows[i][j] = int(v)
        P, diag, _, Wt = smith_rows(rows, z, len(rels), inverse=True)
        self._P = P
        nonzero = len(diag)
        free_idx = list(range(nonzero, z))
        tors_idx = [i for i, d in enumerate(diag) if d > 1]
        self._index = free_idx + tors_idx
        self.orders = tuple([0] * len(free_idx) + [diag[i] for i in tors_idx])
        gens = []
        for i in self._index:
            col = Wt[i]  # column i of P^-1
            v = [0] * self.ambient
            for j, c in col.items():
                for t, b in enumerate(self._basis[j]):
                    if b:
                        v[t] += c * b
            gens.append(v)
        self.generators = gens
        self.descriptor = GroupDescriptor(len(free_idx), tuple(diag[i] for i in tors_idx))
        self.relation_matrix = IntegerMatrix([[self.orders[i] if i == j else 0 for j in range(len(self.orders))]
                                              for i in range(len(self.orders))], len(self.orders))

    def _init_rational(self, dk, dprev):
        # leftmost pivot columns of [d_(k-1) | kernel basis]: the kernel
        # pivots are a complement of the image, and one solver gives coordinates
        n = self.ambient
        basis = rational_kernel(dk) if n else []
        m = dprev.ncols
        self._zsolve = None
        if basis:
            self._solver = RationalSolver(hstack(dprev, RationalMatrix.from_columns(basis, n)))
            self._index = [p for p in self._solver.pivots if p >= m]
        else:
            self._solver, self._index = None, []
        self.orders = tuple(0 for _ in self._index)
        self.generators = [list(basis[p - m]) for p in self._index]
        self.descriptor = GroupDescriptor(len(self._index), ())
        self.relation_matrix = IntegerMatrix.zeros(len(self._index), len(self._index))

    @property
    def size(self):
        return len(self.generators)

    def text(self):
        """The descriptor, written over Q for rational complexes."""
        if self.coeff == Q:
            n = self.size
            return "0" if n == 0 else "Q" if n == 1 else f"Q^{n}"
        return str(self.descriptor)

    def coordinates(self, v):
        """Class of the cocycle v in generator coordinates."""
        if len(v) != self.ambient:
            raise InputError("vector length does not match the cochain group")
        if not self.generators:
            if any(self.complex.apply_d(self.degree, v)):
                raise InputError("vector is not a cocycle")
            return ()
        if self.coeff == Q:
            y = self._solver.solve(list(v))
            if y is None:
                raise InputError("vector is not a cocycle")
            return tuple(y[p] for p in self._index)
        y = self._zcoords(v)
        out = []
        for i, order in zip(self._index, self.orders):
            c = sum(int(y[j]) * p for j, p in self._P[i].items())
            out.append(c % order if order else c)
        return tuple(out)

    def element(self, coords):
        """A cocycle representing the class with the given coordinates."""
        v = _zero_vec(self.coeff, self.ambient)
        for c, g in zip(coords, self.generators):
            if c:
                for t, x in enumerate(g):
                    if x:
                        v[t] += c * x
        return v

    def is_zero_class(self, v):
        return not any(self.coordinates(v))

    def __repr__(self):
        return f"H^{self.degree} = {self.descriptor}"


def cohomology(C, k):
    """Presentation of H^k(C); degrees outside the complex give the zero group."""
    if not isinstance(k, int):
        raise InputError("degree must be an integer")
    return CohomologyPresentation(C, k)


@dataclass
class InducedMap:
    degree: int
    matrix: list
    injective: bool
    surjective: bool

    @property
    def isomorphism(self):
        return self.injective and self.surjective


def induced_map(f, k, source_pres=None, target_pres=None):
    """The map f_* on H^k in generator coordinates, with exact flags."""
    if not isinstance(f, ChainMap):
        raise InputError("induced_map expects a ChainMap")
    Ps = source_pres or cohomology(f.source, k)
    Pt = target_pres or cohomology(f.target, k)
    cols = [Pt.coordinates(f.apply(k, g)) for g in Ps.generators]
    ts, tt = Ps.size, Pt.size
    matrix = [[cols[j][i] for j in range(ts)] for i in range(tt)]
    if Pt.coeff == Q:
        M = RationalMatrix(matrix, ts) if tt else RationalMatrix.zeros(0, ts)
        # torsion of the source dies in a Q-vector space
        free_src = [j for j in range(ts) if Ps.orders[j] == 0]
        rk = _rank_q(M, tt, ts)
        rk_free = _rank_q(M.submatrix(range(tt), free_src), tt, len(free_src)) if tt else 0
        surj = rk == tt
        inj = all(o == 0 for o in Ps.orders) and rk_free == len(free_src)
        return InducedMap(k, matrix, inj, surj)
    # integer target: work in Z^tt / diag(orders)
    rel = [[Pt.orders[i] if i == j else 0 for j in range(tt)] for i in range(tt)]
    big = IntegerMatrix([[int(x) for x in matrix[i]] + rel[i] for i in range(tt)], ts + tt) \
        if tt else IntegerMatrix.zeros(0, ts + tt)
    surj = quotient_descriptor(tt, big).is_trivial if tt else True
    inj = True
    for vec in integer_kernel(big) if ts else []:
        x = vec[:ts]
        for xi, o in zip(x, Ps.orders):
            if (o == 0 and xi) or (o and xi % o):
                inj = False
                break
        if not inj:
            break
    return InducedMap(k, matrix, inj, surj)


def _rank_q(M, m, n):
    if m == 0 or n == 0:
        return 0
    _, pivots, _ = rref_rows(M.sparse_rows(), n)
    return len(pivots)


# ---------------------------------------------------------------------------
# Cones.

class ConeComplex:
    """Cone of f : S -> T with G^k = T^k + S^{k+1} and D(a, r) = (da + f(r), -dr).

    When S and T share a coefficient ring the cone is an ordinary
    CochainComplex (see cone()).  For f from Z to Q it is kept as a pair
    of blocks: vectors are (rational part, integer part).
    """

    def __init__(self, f):
        self.f = f
        self.S, self.T = f.source, f.target
        degs = set(self.T.ranks) | {k - 1 for k in self.S.ranks}
        self.ranks = {k: (self.T.rank(k), self.S.rank(k + 1)) for k in degs}

    def split(self, k):
        return self.T.rank(k), self.S.rank(k + 1)

    def D(self, k, a, r):
        da = self.T.apply_d(k, a)
        fr = self.f.apply(k + 1, r)
        top = [x + y for x, y in zip(da, fr)]
        bottom = [-x for x in self.S.apply_d(k + 1, r)]
        return top, bottom

    def matrix(self, k):
        """D_k as a rational block matrix."""
        t0, s0 = self.split(k)
        t1, s1 = self.split(k + 1)
        dT = self.T.d(k).to_rational() if t0 and t1 else None
        fk = self.f.f(k + 1)
        dS = self.S.d(k + 1)
        rows = []
        for i in range(t1):
            row = [Fraction(0)] * (t0 + s0)
            if dT is not None:
                for j in range(t0):
                    row[j] = dT[i, j]
            for j in range(s0):
                row[t0 + j] = Fraction(fk[i, j])
            rows.append(row)
        for i in range(s1):
            row = [Fraction(0)] * (t0 + s0)
            for j in range(s0):
                row[t0 + j] = -Fraction(dS[i, j])
            rows.append(row)
        return RationalMatrix._make(rows, t0 + s0)


def cone(f):
    """The cone of a chain map, following the (da + f(r), -dr) convention."""
    if f.source.coeff == f.target.coeff:
        S, T = f.source, f.target
        degs = set(T.ranks) | {k - 1 for k in S.ranks}
        ranks = {k: T.rank(k) + S.rank(k + 1) for k in degs}
        cls = _matrix_cls(T.coeff)
        diffs = {}
        for k in degs:
            if (k + 1) not in degs:
                continue
            t0, s0 = T.rank(k), S.rank(k + 1)
            t1, s1 = T.rank(k + 1), S.rank(k + 2)
            dT, fk, dS = T.d(k), f.f(k + 1), S.d(k + 1)
            rows = []
            for i in range(t1):
                rows.append(list(dT.row(i)) + list(fk.row(i)))
            for i in range(s1):
                rows.append([0] * t0 + [-x for x in dS.row(i)])
            diffs[k] = cls(rows, t0 + s0) if rows else cls.zeros(0, t0 + s0)
        return CochainComplex(T.coeff, ranks, diffs)
    if f.source.coeff == Z and f.target.coeff == Q:
        return ConeComplex(f)
    raise InputError("cone of a map from Q to Z is not supported")


def cone_cohomology(f, k, pres=None):
    """H^k of the cone of f : (Z-complex) -> (Q-complex) as a mixed descriptor.

    Assembled from 0 -> coker(f* on H^k) -> H^k(G) -> ker(f* on H^{k+1}) -> 0.
    The cokernel is a Q-vector space modulo a lattice of rank rho, giving
    (Q/Z)^rho + Q^(b - rho); the sequence splits because that group is
    divisible.
    """
    if f.source.coeff != Z or f.target.coeff != Q:
        raise InputError("cone_cohomology expects a map from a Z-complex to a Q-complex")
    pres = pres if pres is not None else {}

    def P(C, j):
        key = (id(C), j)
        if key not in pres:
            pres[key] = cohomology(C, j)
        return pres[key]

    Sk, Tk = P(f.source, k), P(f.target, k)
    imgs = [Tk.coordinates(f.apply(k, g)) for g, o in zip(Sk.generators, Sk.orders) if o == 0]
    rho = _rank_q(RationalMatrix.from_columns(imgs, Tk.size), Tk.size, len(imgs)) if imgs and Tk.size else 0
    S1, T1 = P(f.source, k + 1), P(f.target, k + 1)
    free_imgs = [T1.coordinates(f.apply(k + 1, g)) for g, o in zip(S1.generators, S1.orders) if o == 0]
    rk = _rank_q(RationalMatrix.from_columns(free_imgs, T1.size), T1.size, len(free_imgs)) \
        if free_imgs and T1.size else 0
    fg = GroupDescriptor(len(free_imgs) - rk, S1.descriptor.torsion)
    return MixedGroupDescriptor(rho, Tk.size - rho, fg)


def two_step_hypercohomology(f, degrees, shift=0):
    """Hypercohomology of a two-step complex A -> B from resolutions f : I -> J.

    With the target placed in degrees >= shift, H^n equals H^(n - shift) of
    the cone; shift 0 is cone_cohomology itself.  Returns {n: descriptor}.
    """
    pres = {}
    out = {}
    for n in degrees:
        if f.source.coeff == Z and f.target.coeff == Q:
            out[n] = cone_cohomology(f, n - shift, pres)
        else:
            C = cone(f)
            d = cohomology(C, n - shift).descriptor
            out[n] = MixedGroupDescriptor(0, d.free_rank if C.coeff == Q else 0,
                                          GroupDescriptor() if C.coeff == Q else d)
    return out


# ---------------------------------------------------------------------------
# Double complexes.

class DoubleComplex:
    """Bigraded groups C^{p,q} with commuting delta (p+1) and d (q+1).

    The total differential is (-1)^q delta + d on C^{p,q}.  With commuting
    raw differentials this is the sign that makes D*D vanish, and it is
    the sign pattern of the k = 1 line bundle equations.
    """

    def __init__(self, coeff, ranks, delta, dvert, labels=None, check=True):
        self.coeff = coeff
        self.ranks = {pq: r for pq, r in ranks.items() if r}
        self._delta = {pq: m for pq, m in delta.items() if m.nrows and m.ncols and not m.is_zero()}
        self._dv = {pq: m for pq, m in dvert.items() if m.nrows and m.ncols and not m.is_zero()}
        self.labels = labels or {}
        if check:
            self.check()

    def rank(self, p, q):
        return self.ranks.get((p, q), 0)

    def delta(self, p, q):
        m = self._delta.get((p, q))
        return m if m is not None else _matrix_cls(self.coeff).zeros(self.rank(p + 1, q), self.rank(p, q))

    def dv(self, p, q):
        m = self._dv.get((p, q))
        return m if m is not None else _matrix_cls(self.coeff).zeros(self.rank(p, q + 1), self.rank(p, q))

    def check(self):
        for (p, q) in self.ranks:
            if not (self.delta(p + 1, q) @ self.delta(p, q)).is_zero():
                raise ValidationError(f"delta^2 != 0 at {(p, q)}")
            if not (self.dv(p, q + 1) @ self.dv(p, q)).is_zero():
                raise ValidationError(f"d^2 != 0 at {(p, q)}")
            if not (self.delta(p, q + 1) @ self.dv(p, q) - self.dv(p + 1, q) @ self.delta(p, q)).is_zero():
                raise ValidationError(f"delta and d do not commute at {(p, q)}")

    @property
    def p_extent(self):
        return max((p for p, _ in self.ranks), default=-1) + 1

    @property
    def q_extent(self):
        return max((q for _, q in self.ranks), default=-1) + 1


@dataclass
class Total:
    """Totalization with its bigrade bookkeeping.

    layout[k] lists (p, q, offset, size) for the summands of degree k.
    """

    complex: CochainComplex
    layout: dict = field(default_factory=dict)

    def block(self, k, p, q):
        for (pp, qq, off, size) in self.layout.get(k, ()):
            if (pp, qq) == (p, q):
                return off, size
        return None

    def component(self, k, v, p, q):
        b = self.block(k, p, q)
        if b is None:
            return []
        off, size = b
        return list(v[off:off + size])

    def embed(self, k, parts):
        """Assemble a total vector from {(p, q): component}."""
        v = self.complex.zero(k)
        for (p, q), comp in parts.items():
            b = self.block(k, p, q)
            if b is None:
                if any(comp):
                    raise InputError(f"bidegree {(p, q)} is not part of degree {k}")
                continue
            off, size = b
            if len(comp) != size:
                raise InputError(f"component {(p, q)} has length {len(comp)}, expected {size}")
            v[off:off + size] = list(comp)
        return v

    def bidegrees(self, k):
        return [(p, q) for (p, q, _, _) in self.layout.get(k, ())]


def totalize(D, keep=None):
    """Total complex of a double complex with differential (-1)^q delta + d.

    keep optionally restricts to bidegrees satisfying a predicate, with the
    differential projected onto the kept summands.
    """
    kept = sorted((pq for pq in D.ranks if keep is None or keep(*pq)), key=lambda pq: (pq[0] + pq[1], pq[0]))
    layout = {}
    for (p, q) in kept:
        k = p + q
        lst = layout.setdefault(k, [])
        off = sum(s for (_, _, _, s) in lst)
        lst.append((p, q, off, D.rank(p, q)))
    ranks = {k: sum(s for (_, _, _, s) in lst) for k, lst in layout.items()}
    total = Total(None, layout)
    diffs = {}
    cls = _matrix_cls(D.coeff)
    for k in layout:
        if k + 1 not in layout:
            continue
        rows = [dict() for _ in range(ranks[k + 1])]
        for (p, q, off, size) in layout[k]:
            sign = -1 if q % 2 else 1
            targets = ((p + 1, q, D._delta.get((p, q)), sign), (p, q + 1, D._dv.get((p, q)), 1))
            for (tp, tq, M, sg) in targets:
                if M is None:
                    continue
                b = total.block(k + 1, tp, tq)
                if b is None:
                    continue
                toff, _ = b
                for i, row in enumerate(M.sparse_rows()):
                    for j, v in row.items():
                        rows[toff + i][off + j] = sg * v
        diffs[k] = cls.from_sparse(ranks[k + 1], ranks[k], rows)
    total.complex = CochainComplex(D.coeff, ranks, diffs)
    return total


@dataclass
class Truncation:
    """A level-p truncation: the truncated total complex and the projection."""

    level: int
    axis: str
    full: Total
    truncated: Total
    projection: ChainMap

    def project(self, k, v):
        return self.projection.apply(k, v)

    def extend(self, k, v):
        """Zero-extension of a truncated vector back to the full total complex."""
        parts = {}
        for (p, q, off, size) in self.truncated.layout.get(k, ()):
            parts[(p, q)] = v[off:off + size]
        return self.full.embed(k, parts)


def truncate(D, p, axis="horizontal", full=None):
    """Keep bidegrees (r, s) with r < p (horizontal) or s < p (vertical).

    The discarded summands form a subcomplex, so the coordinate projection
    is a chain map onto the truncation with the projected differential.
    """
    if p < 1:
        raise InputError("truncation level must be at least 1")
    if axis not in ("horizontal", "vertical"):
        raise InputError(f"unknown truncation axis {axis!r}")
    keep = (lambda r, s: r < p) if axis == "horizontal" else (lambda r, s: s < p)
    full = full or totalize(D)
    trunc = totalize(D, keep)
    maps = {}
    cls = _matrix_cls(D.coeff)
    for k, lst in full.layout.items():
        rows = [dict() for _ in range(trunc.complex.rank(k))]
        for (r, s, off, size) in lst:
            b = trunc.block(k, r, s)
            if b is None:
                continue
            toff, _ = b
            for i in range(size):
                rows[toff + i][off + i] = 1
        maps[k] = cls.from_sparse(trunc.complex.rank(k), full.complex.rank(k), rows)
    proj = ChainMap(full.complex, trunc.complex, maps)
    return Truncation(p, axis, full, trunc, proj)
