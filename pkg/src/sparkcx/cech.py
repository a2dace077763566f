"""Covers by subcomplexes, Cech-simplicial double complexes and model spark complexes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import (
    ChainMap,
    CochainComplex,
    DoubleComplex,
    Q,
    Z,
    cohomology,
    totalize,
    truncate,
)
from .linalg import InputError, IntegerMatrix, RationalMatrix, RationalSolver
from .simplicial import (
    SimplicialComplex,
    SimplicialMap,
    _sort_sign,
    barycentric_subdivision,
    cochain_complex_of,
    group_by_dim,
)


class CoverError(InputError):
    """The cover does not cover, or an intersection is not acyclic."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class CoverData:
    """A finite cover of K by subcomplexes with its nerve.

    members[i] is a face-closed frozenset of simplices of K; centers[i] is
    the vertex whose closed star it is.  nerve[p] lists the p-simplices of
    the nerve as increasing index tuples.  acyclic maps each nerve simplex
    to whether its intersection has the cohomology of a point, and
    failures keeps (nerve simplex, descriptors) for the ones that do not.
    """

    K: SimplicialComplex
    centers: list
    members: list
    nerve: dict
    intersections: dict
    acyclic: dict
    failures: list = field(default_factory=list)

    @property
    def size(self):
        return len(self.members)

    @property
    def is_good(self):
        return not self.failures

    def intersection_by_dim(self, sigma):
        return group_by_dim(self.intersections[sigma])

    def nerve_simplices(self, p):
        return self.nerve.get(p, [])

    def nerve_complex(self):
        return SimplicialComplex(self.size, [s for ss in self.nerve.values() for s in ss], name="nerve")

    def require_good(self):
        if self.failures:
            sigma, descr = self.failures[0]
            raise CoverError(f"cover not good: intersection over {sigma} has cohomology {descr}",
                             witness=(sigma, descr))


def _is_point_like(simplices):
    by_dim = group_by_dim(simplices)
    C = cochain_complex_of(by_dim, Z)
    out = []
    ok = True
    for q in range(max(by_dim) + 1):
        d = cohomology(C, q).descriptor
        out.append(str(d))
        expect = (1, ()) if q == 0 else (0, ())
        if (d.free_rank, tuple(d.torsion)) != expect:
            ok = False
    return ok, out


def cover_from_members(K, members, centers=None):
    """Build the nerve and run the acyclicity check on every intersection."""
    members = [frozenset(m) for m in members]
    covered = set().union(*members) if members else set()
    missing = sorted(K.simplex_set - covered, key=lambda s: (len(s), s))
    if missing:
        raise CoverError(f"cover misses simplex {missing[0]}", witness=missing[0])
    nerve = {}
    inter = {}
    level = [((i,), m) for i, m in enumerate(members) if m]
    p = 0
    while level:
        nerve[p] = [s for s, _ in level]
        for s, m in level:
            inter[s] = m
        nxt = []
        for s, m in level:
            for j in range(s[-1] + 1, len(members)):
                x = m & members[j]
                if x:
                    nxt.append((s + (j,), x))
        level = nxt
        p += 1
    acyclic, failures = {}, []
    for p in sorted(nerve):
        for s in nerve[p]:
            ok, descr = _is_point_like(inter[s])
            acyclic[s] = ok
            if not ok:
                failures.append((s, descr))
    return CoverData(K, list(centers) if centers is not None else list(range(len(members))),
                     members, nerve, inter, acyclic, failures)


def star_cover(K, centers=None):
    """Closed vertex stars, of every vertex or of the given centers."""
    centers = list(range(K.n_vertices)) if centers is None else list(centers)
    return cover_from_members(K, [K.closed_star(v) for v in centers], centers)


def good_cover(K):
    """(model complex, cover, note): the star cover of K if it is good.

    Otherwise K is barycentrically subdivided and covered by the closed
    stars of the original vertices, whose intersections are cones.
    """
    cov = star_cover(K)
    if cov.is_good:
        return K, cov, "star cover"
    sd = barycentric_subdivision(K)
    cov = star_cover(sd, range(K.n_vertices))
    cov.require_good()
    return sd, cov, "original-vertex stars in the barycentric subdivision"


# ---------------------------------------------------------------------------
# The double complex.

class CechModel:
    """Bigraded bases and differentials of the Cech-simplicial double complex.

    C^{p,q} has basis pairs (sigma, tau): sigma a nerve p-simplex, tau a
    q-simplex of the intersection over sigma.
    """

    def __init__(self, K, cover):
        self.K, self.cover = K, cover
        self.basis = {}
        for p, sigmas in cover.nerve.items():
            for sigma in sigmas:
                for q, taus in cover.intersection_by_dim(sigma).items():
                    self.basis.setdefault((p, q), []).extend((sigma, tau) for tau in taus)
        self.index = {pq: {b: i for i, b in enumerate(bs)} for pq, bs in self.basis.items()}
        self._double = {}
        self._total = {}

    def rank(self, p, q):
        return len(self.basis.get((p, q), ()))

    def double(self, coeff=Q):
        if coeff not in self._double:
            ranks = {pq: len(b) for pq, b in self.basis.items()}
            delta, dv = {}, {}
            for (p, q) in ranks:
                if (p + 1, q) in ranks:
                    delta[(p, q)] = self._delta_matrix(p, q)
                if (p, q + 1) in ranks:
                    dv[(p, q)] = self._d_matrix(p, q)
            if coeff == Q:
                delta = {k: m.to_rational() for k, m in delta.items()}
                dv = {k: m.to_rational() for k, m in dv.items()}
            self._double[coeff] = DoubleComplex(coeff, ranks, delta, dv, labels=self.basis)
        return self._double[coeff]

    def _delta_matrix(self, p, q):
        src = self.index[(p, q)]
        rows = []
        for (sigma, tau) in self.basis[(p + 1, q)]:
            row = {}
            for i in range(len(sigma)):
                j = src[(sigma[:i] + sigma[i + 1:], tau)]
                row[j] = row.get(j, 0) + (-1 if i % 2 else 1)
            rows.append(row)
        return IntegerMatrix.from_sparse(len(rows), len(src), rows)

    def _d_matrix(self, p, q):
        src = self.index[(p, q)]
        rows = []
        for (sigma, tau) in self.basis[(p, q + 1)]:
            row = {}
            for i in range(len(tau)):
                j = src[(sigma, tau[:i] + tau[i + 1:])]
                row[j] = row.get(j, 0) + (-1 if i % 2 else 1)
            rows.append(row)
        return IntegerMatrix.from_sparse(len(rows), len(src), rows)

    def total(self, coeff=Q):
        if coeff not in self._total:
            self._total[coeff] = totalize(self.double(coeff))
        return self._total[coeff]

    def global_complex(self, coeff=Q):
        return self.K.cochain_complex(coeff)

    def nerve_complex(self):
        """C*(N; Z), the integer Cech cochains of the nerve."""
        by_dim = {p: list(s) for p, s in self.cover.nerve.items()}
        return cochain_complex_of(by_dim, Z)

    def iota_matrix(self, q, total=None):
        """Global q-cochains restricted into bidegree (0, q)."""
        T = total or self.total(Q)
        n = T.complex.rank(q)
        kidx = self.K.index.get(q, {})
        rows = [dict() for _ in range(n)]
        b = T.block(q, 0, q)
        if b is not None:
            off, _ = b
            for i, (_, tau) in enumerate(self.basis[(0, q)]):
                rows[off + i][kidx[tau]] = 1
        return RationalMatrix.from_sparse(n, len(kidx), rows)

    def psi_matrix(self, p, total=None, cls=RationalMatrix):
        """Integer nerve p-cochains as constants in bidegree (p, 0)."""
        T = total or self.total(Q)
        n = T.complex.rank(p)
        nidx = {s: i for i, s in enumerate(self.cover.nerve.get(p, []))}
        rows = [dict() for _ in range(n)]
        b = T.block(p, p, 0)
        if b is not None:
            off, _ = b
            for i, (sigma, _) in enumerate(self.basis[(p, 0)]):
                rows[off + i][nidx[sigma]] = 1
        return cls.from_sparse(n, len(nidx), rows)


def cech_double_complex(K, cover, coeff=Q):
    """The double complex C^{p,q} of the cover with the given coefficients."""
    return CechModel(K, cover).double(coeff)


# ---------------------------------------------------------------------------
# Model spark complexes.

def cech_spark_complex(K, cover, model=None):
    """F = total Q complex, E = global cochains in column 0, I = C*(N; Z)."""
    from .sparks import validate_spark_complex

    cover.require_good()
    M = model or CechModel(K, cover)
    T = M.total(Q)
    F = T.complex
    E = M.global_complex(Q)
    iota = ChainMap(E, F, {q: M.iota_matrix(q) for q in E.ranks})
    I = M.nerve_complex()
    psi = ChainMap(I, F, {p: M.psi_matrix(p) for p in I.ranks})
    S = validate_spark_complex(F, iota, I, psi)
    S.model = M
    S.total = T
    S.kind = "cech"
    return S


class Pushout:
    """Coordinates on (F + Ibar_Q) / {(Psi n, -psi n)} as F + W.

    W drops, for every bottom-row nerve simplex, the slot of its base
    vertex (the first vertex of the intersection).  An Ibar vector x maps
    to (Psi c(x), x - psi c(x)) with c(x) read off the base slots.
    """

    def __init__(self, M, T):
        self.M, self.T = M, T
        self.keep = {}
        self.base = {}
        for k, lst in T.layout.items():
            drop = {}
            if T.block(k, k, 0) is not None:
                off, _ = T.block(k, k, 0)
                seen = set()
                for i, (sigma, _) in enumerate(M.basis[(k, 0)]):
                    if sigma not in seen:
                        seen.add(sigma)
                        drop[off + i] = sigma
            self.base[k] = drop
            self.keep[k] = [i for i in range(T.complex.rank(k)) if i not in drop]

    def c_of(self, k, x):
        """Base-slot values as a nerve k-cochain."""
        nidx = {s: i for i, s in enumerate(self.M.cover.nerve.get(k, []))}
        out = [0] * len(nidx)
        for pos, sigma in self.base.get(k, {}).items():
            out[nidx[sigma]] = x[pos]
        return out


def hyperspark_complex(K, cover, small=None):
    """(hyperspark complex, quasi-iso from the Cech spark complex).

    Ibar is the integer total complex; Fbar is the pushout of F and Ibar_Q
    over the nerve cochains, which keeps iota(E) and Psibar(Ibar) apart.
    """
    from .quasi_iso import validate_quasi_iso
    from .sparks import validate_spark_complex

    S = small or cech_spark_complex(K, cover)
    M = S.model
    T = S.total
    TZ = M.total(Z)
    Ibar = TZ.complex
    F = S.F
    P = Pushout(M, T)
    nf = {k: F.rank(k) for k in F.ranks}
    nw = {k: len(P.keep[k]) for k in T.layout}
    ranks = {k: nf.get(k, 0) + nw.get(k, 0) for k in set(nf) | set(nw)}
    psi_cols = {k: M.psi_matrix(k, T) for k in T.layout}

    def psibar_columns(k):
        """Sparse columns of x -> (Psi c(x), x - psi c(x)) on Ibar^k."""
        nidx = {sg: i for i, sg in enumerate(M.cover.nerve.get(k, []))}
        kpos = {pos: jj for jj, pos in enumerate(P.keep.get(k, []))}
        pcols = psi_cols[k].T.sparse_rows() if k in psi_cols else []
        off = nf.get(k, 0)
        out = []
        for j in range(Ibar.rank(k)):
            if j in P.base.get(k, {}):
                pc = pcols[nidx[P.base[k][j]]]
                col = dict(pc)
                for pos, jj in kpos.items():
                    v = pc.get(pos)
                    if v:
                        col[off + jj] = -v
            else:
                col = {off + kpos[j]: 1}
            out.append(col)
        return out

    def from_sparse_columns(cols, nrows):
        rows = [dict() for _ in range(nrows)]
        for j, col in enumerate(cols):
            for i, v in col.items():
                rows[i][j] = v
        return RationalMatrix.from_sparse(nrows, len(cols), rows)

    pcols = {k: psibar_columns(k) for k in Ibar.ranks}
    diffs = {}
    for k in ranks:
        if k + 1 not in ranks:
            continue
        rows = [dict() for _ in range(ranks[k + 1])]
        for i, row in enumerate(F.d(k).sparse_rows()):
            rows[i].update(row)
        # (0, w) -> image of D w in Ibar, pushed through the quotient
        dIcols = Ibar.d(k).T.sparse_rows() if Ibar.rank(k) and Ibar.rank(k + 1) else []
        target = pcols.get(k + 1, [])
        for jj, pos in enumerate(P.keep[k]):
            if pos >= len(dIcols):
                continue
            img = {}
            for i, v in dIcols[pos].items():
                for r, w in target[i].items():
                    img[r] = img.get(r, 0) + v * w
            for r, v in img.items():
                if v:
                    rows[r][nf.get(k, 0) + jj] = v
        diffs[k] = RationalMatrix.from_sparse(ranks[k + 1], ranks[k], rows)
    Fbar = CochainComplex(Q, ranks, diffs)
    incl = ChainMap(F, Fbar, {k: _embed_first(nf.get(k, 0), ranks[k]) for k in F.ranks})
    iota_bar = incl.compose(S.iota)
    psibar = ChainMap(Ibar, Fbar, {k: from_sparse_columns(pcols[k], ranks.get(k, 0)) for k in Ibar.ranks})
    B = validate_spark_complex(Fbar, iota_bar, Ibar, psibar)
    B.model = M
    B.total = T
    B.kind = "hyper"
    B.pushout = P
    psi_small = ChainMap(S.I, Ibar, {p: M.psi_matrix(p, TZ, IntegerMatrix) for p in S.I.ranks})
    q = validate_quasi_iso(S, B, incl, psi_small)
    return B, q


def _embed_first(n, m):
    rows = [{i: 1} for i in range(n)] + [dict() for _ in range(m - n)]
    return RationalMatrix.from_sparse(m, n, rows)


@dataclass
class LevelModel:
    """A level-p spark complex with its projection from the full model."""

    level: int
    full: object
    truncated: object
    truncation: object

    def project_vector(self, k, v):
        return self.truncation.project(k, v)

    def project(self, s):
        """Pi_p on sparks: project a, keep r, truncate e."""
        from .sparks import make_spark

        if s.complex is not self.full:
            raise InputError("spark is not from the full model of this level")
        a = self.truncation.project(s.degree, list(s.a)) if s.a else []
        return make_spark(self.truncated, s.degree, a, s.r)

    def lift(self, t):
        """A full spark whose projection is exactly t.

        Start from a full spark with the same integral part (and the same
        curvature when it survives truncation), then write the difference
        as iota_p(x) + D_p y and add iota(x) + D(y extended by zero).
        """
        from .sparks import _spark_with_r, make_spark, spark_from_data

        S, Sp, k = self.full, self.truncated, t.degree
        if t.complex is not Sp:
            raise InputError("spark is not from this level model")
        if k + 1 < self.level:
            s0 = spark_from_data(S, k, list(t.e), list(t.r))
        else:
            s0 = _spark_with_r(S, k, list(t.r))
        if not t.a:
            return s0
        diff = [x - y for x, y in zip(t.a, self.truncation.project(k, list(s0.a)))]
        sol = Sp.iota_d_solver(k).solve(diff)
        if sol is None:
            raise AssertionError("truncated difference is not iota_p(x) + D_p y")
        nE = Sp.E.rank(k)
        x, y = sol[:nE], sol[nE:]
        a = list(s0.a)
        if nE:
            a = [u + v for u, v in zip(a, S.iota.apply(k, x))]
        if y:
            Dy = S.F.apply_d(k - 1, self.truncation.extend(k - 1, y))
            a = [u + v for u, v in zip(a, Dy)]
        out = make_spark(S, k, a, list(t.r))
        if self.project(out).a != t.a:
            raise AssertionError("lift does not project back")
        return out

    def kernel_representative(self, s):
        """For s with Pi_p(s) ~ 0: x in E^k with s ~ (iota(x), 0), else None.

        The projection witness moves s to a representative supported in
        rows q >= p; exact Cech rows then push each top component one
        column left until only column 0 remains, which is a global cochain.
        """
        from .sparks import make_spark, sparks_equivalent, zero_spark

        S, k = self.full, s.degree
        t = self.project(s)
        eq = sparks_equivalent(t, zero_spark(self.truncated, k))
        if not eq:
            return None
        M, T = S.model, S.total
        b = self.truncation.extend(k - 1, eq.b) if eq.b else []
        w = s.perturb([-x for x in b], [-x for x in eq.s]) if (b or eq.s) else s
        a = list(w.a)
        D = M.double(Q)
        top = max((p for (p, q, _, _) in T.layout.get(k, ())), default=0)
        for P in range(top, 0, -1):
            q = k - P
            comp = T.component(k, a, P, q)
            if not any(comp):
                continue
            sg = -1 if q % 2 else 1
            u = RationalSolver(D.delta(P - 1, q)).solve([sg * c for c in comp])
            if u is None:
                raise AssertionError("Cech row is not exact")
            uu = T.embed(k - 1, {(P - 1, q): u})
            Du = S.F.apply_d(k - 1, uu)
            a = [x - y for x, y in zip(a, Du)]
        col0 = T.component(k, a, 0, k)
        if a != T.embed(k, {(0, k): col0}):
            raise AssertionError("zig-zag left components outside column 0")
        x = [Fraction(0)] * M.K.count(k)
        kidx = M.K.index.get(k, {})
        for (alpha, tau), v in zip(M.basis.get((0, k), []), col0):
            x[kidx[tau]] = v
        cand = make_spark(S, k, a, [0] * S.I.rank(k + 1))
        if not sparks_equivalent(s, cand):
            raise AssertionError("kernel representative is not equivalent")
        return x


def level_p_spark_complex(K, cover, p, full=None):
    """Level-p model: keep the Cech-simplicial summands with q < p.

    E becomes the global cochains of degree < p, the image of E under the
    projection; I and the bottom-row Psi are unchanged.
    """
    from .sparks import validate_spark_complex

    if p < 1:
        raise InputError("level must be at least 1")
    S = full or cech_spark_complex(K, cover)
    M = S.model
    tr = truncate(M.double(Q), p, axis="vertical", full=S.total)
    Tp = tr.truncated
    Fp = Tp.complex
    Ep_ranks = {q: r for q, r in S.E.ranks.items() if q < p}
    Ep = CochainComplex(Q, Ep_ranks, {q: S.E.d(q) for q in Ep_ranks if q + 1 in Ep_ranks})
    iota = ChainMap(Ep, Fp, {q: M.iota_matrix(q, Tp) for q in Ep_ranks})
    psi = ChainMap(S.I, Fp, {k: M.psi_matrix(k, Tp) for k in S.I.ranks})
    Sp = validate_spark_complex(Fp, iota, S.I, psi)
    Sp.model = M
    Sp.total = Tp
    Sp.kind = f"level-{p}"
    Sp.level = p
    return LevelModel(p, S, Sp, tr)


# ---------------------------------------------------------------------------
# Pullback.

def cover_index_map(f, cover_src, cover_tgt):
    """For each source cover member, a target member containing its image."""
    out = []
    for a, mem in enumerate(cover_src.members):
        images = {tuple(sorted(set(f.vmap[v] for v in s))) for s in mem}
        guess = None
        c = cover_src.centers[a]
        fc = f.vmap[c]
        if fc in cover_tgt.centers:
            guess = cover_tgt.centers.index(fc)
        candidates = ([guess] if guess is not None else []) + list(range(cover_tgt.size))
        for b in candidates:
            if images <= cover_tgt.members[b]:
                out.append(b)
                break
        else:
            raise CoverError(f"image of cover member {a} lies in no target member", witness=a)
    return out


class Pullback:
    """Cochain pullback along f on E, I and the total complex."""

    def __init__(self, f, src, tgt, index_map=None):
        if not isinstance(f, SimplicialMap):
            raise InputError("pullback expects a SimplicialMap")
        self.f, self.src, self.tgt = f, src, tgt
        Ms, Mt = src.model, tgt.model
        if f.source != Ms.K or f.target != Mt.K:
            raise InputError("simplicial map does not match the models")
        self.phi = index_map or cover_index_map(f, Ms.cover, Mt.cover)
        for a, b in enumerate(self.phi):
            img = {tuple(sorted(set(f.vmap[v] for v in s))) for s in Ms.cover.members[a]}
            if not img <= Mt.cover.members[b]:
                raise CoverError(f"cover member {a} does not map into member {b}", witness=(a, b))

    def total(self, k, v):
        Ts, Tt = self.src.total, self.tgt.total
        Ms, Mt = self.src.model, self.tgt.model
        parts = {}
        for (p, q, off, size) in Ts.layout.get(k, ()):
            comp = [0] * size
            tb = Tt.block(k, p, q)
            if tb is not None:
                toff, _ = tb
                tidx = Mt.index[(p, q)]
                for i, (sigma, tau) in enumerate(Ms.basis[(p, q)]):
                    s1, e1 = _sort_sign(self.phi[a] for a in sigma)
                    if not e1:
                        continue
                    t1, e2 = self.f.image(tau)
                    if not e2:
                        continue
                    comp[i] = e1 * e2 * v[toff + tidx[(s1, t1)]]
            parts[(p, q)] = comp
        return Ts.embed(k, parts)

    def nerve(self, p, r):
        nidx = {s: i for i, s in enumerate(self.tgt.model.cover.nerve.get(p, []))}
        out = []
        for sigma in self.src.model.cover.nerve.get(p, []):
            s1, e1 = _sort_sign(self.phi[a] for a in sigma)
            out.append(e1 * r[nidx[s1]] if e1 else 0)
        return out

    def globals(self, q, e):
        return self.f.cochain_pullback(q, e)


def pullback(f, src, tgt, s, index_map=None):
    """Pull the spark s on tgt back along f : src.K -> tgt.K."""
    from .sparks import make_spark

    P = Pullback(f, src, tgt, index_map)
    k = s.degree
    a = P.total(k, s.a) if k >= 0 else []
    r = P.nerve(k + 1, s.r)
    out = make_spark(src, k, a, r)
    expect = P.globals(k + 1, s.e) if s.e else [0] * src.E.rank(k + 1)
    if list(out.e) != [Fraction(x) for x in expect]:
        raise AssertionError("pulled-back curvature differs from the curvature pullback")
    return out


# ---------------------------------------------------------------------------
# Integral cycles as total chains.

def forward_index(cover):
    """phi(v): the first cover member containing every simplex whose least vertex is v."""
    K = cover.K
    fwd = {v: set() for v in range(K.n_vertices)}
    for s in K.simplex_set:
        fwd[s[0]].add(s)
    out = []
    for v in range(K.n_vertices):
        for a, mem in enumerate(cover.members):
            if fwd[v] <= mem:
                out.append(a)
                break
        else:
            raise CoverError(f"no cover member contains the forward star of vertex {v}", witness=v)
    return out


def total_chain(model, total, z, k):
    """Integer total k-chain T(z) for a simplicial k-chain z on K.

    T(v0..vk) = sum_p (-1)^(p(k-p)) [phi(v0)..phi(vp) ; vp..vk] with Cech
    tuples sorted with sign and repeated indices dropped.  T commutes with boundaries and
    restricts to z on column 0, so it pairs a spark with a cycle.
    """
    phi = forward_index(model.cover)
    simplices = model.K.simplices(k)
    out = [0] * total.complex.rank(k)
    for coef, sigma in zip(z, simplices):
        if not coef:
            continue
        for p in range(k + 1):
            tup, sg = _sort_sign(phi[v] for v in sigma[:p + 1])
            if not sg:
                continue
            b = total.block(k, p, k - p)
            idx = model.index[(p, k - p)].get((tup, sigma[p:]))
            if b is None or idx is None:
                raise AssertionError("chain lands outside the double complex")
            out[b[0] + idx] += _chain_sign(p, k) * sg * coef
    return out


def _chain_sign(p, k):
    return -1 if (p * (k - p)) % 2 else 1
