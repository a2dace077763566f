"""Exact integer and rational linear algebra.

Matrices are immutable dense values.  The elimination routines convert
rows to dictionaries internally because coboundary matrices are mostly
zero; the algorithms themselves are the ordinary dense ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm


class InputError(ValueError):
    """Raised when arguments have the wrong shape or type."""


def _as_int(x):
    if type(x) is int:
        return x
    if isinstance(x, int):
        return int(x)
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    raise TypeError(f"not an integer: {x!r}")


def _as_fraction(x):
    t = type(x)
    if t is int:
        return x
    if t is Fraction:
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    return _exact(Fraction(x))


class _Matrix:
    __slots__ = ("nrows", "ncols", "_rows", "_cols")
    _coerce = staticmethod(_as_int)

    def __init__(self, rows=(), ncols=None):
        rows = [tuple(self._coerce(x) for x in r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise InputError(f"row {i} has length {len(r)}, expected {ncols}")
        self.nrows = len(rows)
        self.ncols = ncols
        self._rows = tuple(rows)
        self._cols = None

    @classmethod
    def _make(cls, rows, ncols):
        m = object.__new__(cls)
        m._rows = tuple(tuple(r) for r in rows)
        m.nrows = len(m._rows)
        m.ncols = ncols
        m._cols = None
        return m

    @classmethod
    def zeros(cls, nrows, ncols):
        z = cls._coerce(0)
        return cls._make([(z,) * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n):
        z, one = cls._coerce(0), cls._coerce(1)
        return cls._make([tuple(one if i == j else z for j in range(n)) for i in range(n)], n)

    @classmethod
    def from_sparse(cls, nrows, ncols, rows):
        """Build from a list of {column: value} dictionaries."""
        z = cls._coerce(0)
        out = []
        for i in range(nrows):
            r = [z] * ncols
            for j, v in rows[i].items():
                r[j] = cls._coerce(v)
            out.append(r)
        return cls._make(out, ncols)

    @classmethod
    def from_columns(cls, columns, nrows):
        cols = [list(c) for c in columns]
        for c in cols:
            if len(c) != nrows:
                raise InputError("column length mismatch")
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def entries(self):
        return tuple(x for r in self._rows for x in r)

    def row(self, i):
        return self._rows[i]

    def col(self, j):
        return tuple(r[j] for r in self._rows)

    def columns(self):
        return [self.col(j) for j in range(self.ncols)]

    def tolist(self):
        return [list(r) for r in self._rows]

    def sparse_rows(self):
        return [{j: v for j, v in enumerate(r) if v} for r in self._rows]

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, self._rows))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"{type(self).__name__}({self.nrows}x{self.ncols}: [{body}])"

    @property
    def T(self):
        if self.nrows == 0:
            return type(self)._make([()] * self.ncols, 0)
        return type(self)._make(list(zip(*self._rows)), self.nrows)

    def is_zero(self):
        return all(not x for r in self._rows for x in r)

    def _result_type(self, other):
        if isinstance(self, RationalMatrix) or isinstance(other, RationalMatrix):
            return RationalMatrix
        return IntegerMatrix

    def __matmul__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise InputError(f"cannot multiply {self.shape} by {other.shape}")
        cls = self._result_type(other)
        right = other.sparse_rows()
        z = cls._coerce(0)
        out = []
        for r in self._rows:
            acc = {}
            for k, a in enumerate(r):
                if a:
                    for j, b in right[k].items():
                        acc[j] = acc.get(j, 0) + a * b
            row = [z] * other.ncols
            for j, v in acc.items():
                row[j] = v
            out.append(row)
        return cls._make(out, other.ncols)

    def apply(self, vec):
        """Matrix times a vector given as a sequence."""
        if len(vec) != self.ncols:
            raise InputError(f"vector of length {len(vec)} for {self.shape} matrix")
        if self._cols is None:
            cols = [[] for _ in range(self.ncols)]
            for i, r in enumerate(self._rows):
                for j, a in enumerate(r):
                    if a:
                        cols[j].append((i, a))
            self._cols = cols
        out = [0] * self.nrows
        for k, v in enumerate(vec):
            if v:
                for i, a in self._cols[k]:
                    out[i] += a * v
        return out

    def _binary(self, other, op):
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} vs {other.shape}")
        cls = self._result_type(other)
        return cls._make([[op(a, b) for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                         self.ncols)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return type(self)._make([[-x for x in r] for r in self._rows], self.ncols)

    def scale(self, c):
        cls = RationalMatrix if isinstance(c, Fraction) and c.denominator != 1 else type(self)
        return cls._make([[cls._coerce(c * x) for x in r] for r in self._rows], self.ncols)

    def submatrix(self, rows, cols):
        return type(self)._make([[self._rows[i][j] for j in cols] for i in rows], len(cols))

    def to_rational(self):
        return RationalMatrix._make(self._rows, self.ncols)

    def det(self):
        if self.nrows != self.ncols:
            raise InputError("determinant of a non-square matrix")
        return _det_fraction(self._rows)


def _det_fraction(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det.numerator if det.denominator == 1 else det


class IntegerMatrix(_Matrix):
    """Dense matrix of Python integers."""

    __slots__ = ()
    _coerce = staticmethod(_as_int)


class RationalMatrix(_Matrix):
    """Dense matrix of Fractions, canonical because Fraction always is."""

    __slots__ = ()
    _coerce = staticmethod(_as_fraction)

    def to_integer(self):
        return IntegerMatrix([[_as_int(x) for x in r] for r in self._rows], self.ncols)


def hstack(*ms):
    ms = [m for m in ms]
    nrows = ms[0].nrows
    if any(m.nrows != nrows for m in ms):
        raise InputError("hstack row mismatch")
    cls = RationalMatrix if any(isinstance(m, RationalMatrix) for m in ms) else IntegerMatrix
    rows = [sum((m.row(i) for m in ms), ()) for i in range(nrows)]
    return cls._make(rows, sum(m.ncols for m in ms))


def vstack(*ms):
    ncols = ms[0].ncols
    if any(m.ncols != ncols for m in ms):
        raise InputError("vstack column mismatch")
    cls = RationalMatrix if any(isinstance(m, RationalMatrix) for m in ms) else IntegerMatrix
    rows = [r for m in ms for r in m._rows]
    return cls._make(rows, ncols)


# ---------------------------------------------------------------------------
# Sparse row helpers shared by the eliminations below.

def _axpy(dst, src, q):
    """dst -= q * src for dictionary rows."""
    for k, v in src.items():
        nv = dst.get(k, 0) - q * v
        if nv:
            dst[k] = _exact(nv)
        else:
            dst.pop(k, None)


def _exact(v):
    """Integral Fractions become ints, which keeps +-1 eliminations in int arithmetic."""
    if type(v) is Fraction and v.denominator == 1:
        return v.numerator
    return v


def _dense(row, n, zero=0):
    out = [zero] * n
    for j, v in row.items():
        out[j] = v
    return out


class _ColumnIndex:
    """Tracks which rows are nonzero in each column of a dict-row matrix."""

    def __init__(self, rows):
        self.cols = {}
        for i, r in enumerate(rows):
            for j in r:
                self.cols.setdefault(j, set()).add(i)

    def update(self, i, old_keys, row):
        new_keys = row.keys()
        for j in old_keys - new_keys:
            self.cols[j].discard(i)
        for j in new_keys - old_keys:
            self.cols.setdefault(j, set()).add(i)

    def rows_in(self, j):
        return self.cols.get(j, ())


def _row_op(rows, index, dst, src, q, transform=None):
    old = set(rows[dst])
    _axpy(rows[dst], rows[src], q)
    index.update(dst, old, rows[dst])
    if transform is not None:
        _axpy(transform[dst], transform[src], q)


def hermite_rows(rows, ncols, track=True):
    """Row-style Hermite normal form of a list of integer dict rows.

    Returns (H, U, pivots) where U is unimodular with U*A = H, the nonzero
    rows of H come first, pivots are positive and the entries above each
    pivot lie in [0, pivot).
    """
    H = [dict(r) for r in rows]
    m = len(H)
    U = [{i: 1} for i in range(m)] if track else None
    index = _ColumnIndex(H)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            cand = [i for i in index.rows_in(c) if i >= r]
            if not cand:
                break
            p = min(cand, key=lambda i: (abs(H[i][c]), i))
            if p != r:
                _swap(H, index, U, p, r)
            if len(cand) == 1:
                break
            pv = H[r][c]
            for i in list(index.rows_in(c)):
                if i > r:
                    _row_op(H, index, i, r, H[i][c] // pv, U)
        if not any(i >= r for i in index.rows_in(c)):
            continue
        if H[r][c] < 0:
            H[r] = {k: -v for k, v in H[r].items()}
            if track:
                U[r] = {k: -v for k, v in U[r].items()}
        pv = H[r][c]
        for i in list(index.rows_in(c)):
            if i < r:
                q = H[i][c] // pv
                if q:
                    _row_op(H, index, i, r, q, U)
        pivots.append(c)
        r += 1
    return H, U, pivots


def _swap(rows, index, transform, a, b):
    ka, kb = set(rows[a]), set(rows[b])
    rows[a], rows[b] = rows[b], rows[a]
    index.update(a, ka, rows[a])
    index.update(b, kb, rows[b])
    if transform is not None:
        transform[a], transform[b] = transform[b], transform[a]


def rref_rows(rows, ncols, track=False, stop_col=None):
    """Reduced row echelon form over Q with leftmost pivots.

    Returns (R, pivots, T) with T*A = R when track is set.  Pivot search
    stops at stop_col (exclusive) when given, which is how augmented
    systems keep their right-hand side out of the pivot set.
    """
    R = [{j: _exact(Fraction(v)) for j, v in r.items()} for r in rows]
    m = len(R)
    T = [{i: 1} for i in range(m)] if track else None
    index = _ColumnIndex(R)
    pivots = []
    r = 0
    last = ncols if stop_col is None else stop_col
    for c in range(last):
        if r == m:
            break
        cand = [i for i in index.rows_in(c) if i >= r]
        if not cand:
            continue
        p = min(cand)
        if p != r:
            _swap(R, index, T, p, r)
        pv = R[r][c]
        if pv != 1:
            inv = -1 if pv == -1 else Fraction(1) / pv
            R[r] = {k: _exact(v * inv) for k, v in R[r].items()}
            if track:
                T[r] = {k: _exact(v * inv) for k, v in T[r].items()}
        for i in list(index.rows_in(c)):
            if i != r:
                _row_op(R, index, i, r, R[i][c], T)
        pivots.append(c)
        r += 1
    return R, pivots, T


# ---------------------------------------------------------------------------
# Normal forms.

def smith_normal_form(M):
    """Return (U, D, V) with U*M*V = D in Smith form, U and V unimodular.

    Each stage moves a nonzero entry of minimal absolute value to the
    pivot position.  Any pivot strategy gives the same D, since the
    divisibility chain makes the diagonal canonical; the choice only
    keeps intermediate coefficients small.
    """
    if not isinstance(M, IntegerMatrix):
        raise InputError("smith_normal_form expects an IntegerMatrix")
    m, n = M.shape
    U, diag, Vt, _ = smith_rows(M.sparse_rows(), m, n)
    D = [dict() for _ in range(m)]
    for i, d in enumerate(diag):
        D[i][i] = d
    return (IntegerMatrix.from_sparse(m, m, U), IntegerMatrix.from_sparse(m, n, D),
            IntegerMatrix.from_sparse(n, n, Vt).T)


def smith_rows(rows, m, n, inverse=False):
    """Smith form on dict rows.

    Returns (U, diag, Vt, UinvT): U as dict rows, the nonzero diagonal,
    V transposed as dict rows, and (when asked) the inverse of U
    transposed, also as dict rows.
    """
    A = [dict(r) for r in rows]
    U = [{i: 1} for i in range(m)]
    Vt = [{j: 1} for j in range(n)]  # V transposed, so column ops are row ops
    Wt = [{i: 1} for i in range(m)] if inverse else None  # U^-1 transposed
    cols = _ColumnIndex(A)

    def add_row(dst, src, q):  # row_dst -= q row_src
        _row_op(A, cols, dst, src, q, U)
        if inverse:
            _axpy(Wt[src], Wt[dst], -q)

    def swap_rows(a, b):
        _swap(A, cols, U, a, b)
        if inverse:
            Wt[a], Wt[b] = Wt[b], Wt[a]

    def add_col(dst, src, q):  # col_dst -= q col_src
        for i in list(cols.rows_in(src)):
            old = set(A[i])
            nv = A[i].get(dst, 0) - q * A[i][src]
            if nv:
                A[i][dst] = nv
            else:
                A[i].pop(dst, None)
            cols.update(i, old, A[i])
        _axpy(Vt[dst], Vt[src], q)

    def swap_cols(a, b):
        touched = set(cols.rows_in(a)) | set(cols.rows_in(b))
        for i in touched:
            old = set(A[i])
            va, vb = A[i].pop(a, 0), A[i].pop(b, 0)
            if va:
                A[i][b] = va
            if vb:
                A[i][a] = vb
            cols.update(i, old, A[i])
        Vt[a], Vt[b] = Vt[b], Vt[a]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j, v in A[i].items():
                if best is None or abs(v) < best[0]:
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            pv = A[t][t]
            for i in list(cols.rows_in(t)):
                if i != t:
                    add_row(i, t, A[i][t] // pv)
            for j in list(A[t]):
                if j != t:
                    add_col(j, t, A[t][j] // pv)
            rest_c = [i for i in cols.rows_in(t) if i != t]
            rest_r = [j for j in A[t] if j != t]
            if not rest_c and not rest_r:
                break
            # a remainder smaller than the pivot survived; move it in
            if rest_c:
                swap_rows(min(rest_c, key=lambda i: abs(A[i][t])), t)
            else:
                swap_cols(min(rest_r, key=lambda j: abs(A[t][j])), t)
        if A[t][t] < 0:
            A[t] = {k: -v for k, v in A[t].items()}
            U[t] = {k: -v for k, v in U[t].items()}
            if inverse:
                Wt[t] = {k: -v for k, v in Wt[t].items()}
        t += 1

    diag = [A[i][i] for i in range(t)]
    for i in range(t):
        for j in range(i + 1, t):
            a, b = diag[i], diag[j]
            if b % a == 0:
                continue
            g, x, y = _xgcd(a, b)
            # add column j to column i, then rows (i, j) <- [[x, y], [-b/g, a/g]]
            _axpy(Vt[i], Vt[j], -1)
            ri, rj = U[i], U[j]
            new_i, new_j = {}, {}
            _axpy(new_i, ri, -x)
            _axpy(new_i, rj, -y)
            _axpy(new_j, ri, b // g)
            _axpy(new_j, rj, -(a // g))
            U[i], U[j] = new_i, new_j
            if inverse:
                # columns of U^-1 transform by [[a/g, -y], [b/g, x]]
                wi, wj = Wt[i], Wt[j]
                new_i, new_j = {}, {}
                _axpy(new_i, wi, -(a // g))
                _axpy(new_i, wj, -(b // g))
                _axpy(new_j, wi, y)
                _axpy(new_j, wj, -x)
                Wt[i], Wt[j] = new_i, new_j
            # clear the (i, j) entry y*b/g with a column operation
            _axpy(Vt[j], Vt[i], y * b // g)
            diag[i], diag[j] = g, a // g * b
    return U, diag, Vt, Wt


def _xgcd(a, b):
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_diagonal(M):
    """Diagonal of the Smith form, including zeros up to min(m, n)."""
    _, D, _ = smith_normal_form(M)
    return [D[i, i] for i in range(min(D.shape))]


def hermite_normal_form(M):
    """Return (U, H) with U*M = H in row Hermite form and U unimodular."""
    if not isinstance(M, IntegerMatrix):
        raise InputError("hermite_normal_form expects an IntegerMatrix")
    H, U, _ = hermite_rows(M.sparse_rows(), M.ncols)
    return (IntegerMatrix.from_sparse(M.nrows, M.nrows, U),
            IntegerMatrix.from_sparse(M.nrows, M.ncols, H))


# ---------------------------------------------------------------------------
# Solvers.

def _check_rhs(M, b):
    if len(b) != M.nrows:
        raise InputError(f"right-hand side has length {len(b)}, matrix has {M.nrows} rows")


def integer_kernel(M):
    """A Z-basis of {x : M x = 0}, as a list of integer lists."""
    H, U, pivots = hermite_rows(M.T.sparse_rows(), M.nrows)
    r = len(pivots)
    return [_dense(U[i], M.ncols) for i in range(r, M.ncols)]


def solve_integer(M, b):
    """Solve M x = b over Z.

    Returns (x0, K) with K a Z-basis of the kernel lattice, or None.
    """
    if not isinstance(M, IntegerMatrix):
        raise InputError("solve_integer expects an IntegerMatrix")
    _check_rhs(M, b)
    b = [_as_int(v) for v in b]
    n = M.ncols
    # U M^T = H, so x = U^T c turns M x = b into H^T c = b
    H, U, pivots = hermite_rows(M.T.sparse_rows(), M.nrows)
    r = len(pivots)
    resid = list(b)
    c = [0] * r
    for i, p in enumerate(pivots):
        v = resid[p]
        if v % H[i][p]:
            return None
        c[i] = v // H[i][p]
        if c[i]:
            for j, h in H[i].items():
                resid[j] -= c[i] * h
    if any(resid):
        return None
    x0 = [0] * n
    for i in range(r):
        if c[i]:
            for j, u in U[i].items():
                x0[j] += c[i] * u
    K = [_dense(U[i], n) for i in range(r, n)]
    return x0, K


def solve_rational(M, b):
    """Solve M x = b over Q; returns (x0, K) or None.

    x0 has its free coordinates set to zero; K is the standard kernel
    basis read off the reduced echelon form.
    """
    _check_rhs(M, b)
    n = M.ncols
    rows = M.sparse_rows()
    for i, v in enumerate(b):
        v = _as_fraction(v)
        if v:
            rows[i][n] = v
    R, pivots, _ = rref_rows(rows, n + 1, stop_col=n)
    for i in range(len(pivots), len(R)):
        if R[i].get(n):
            return None
    x0 = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x0[p] = R[i].get(n, Fraction(0))
    return x0, _kernel_from_rref(R, pivots, n)


def _kernel_from_rref(R, pivots, n):
    pivset = set(pivots)
    K = []
    for f in range(n):
        if f in pivset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x = R[i].get(f)
            if x:
                v[p] = -x
        K.append(v)
    return K


def rational_kernel(M):
    R, pivots, _ = rref_rows(M.sparse_rows(), M.ncols)
    return _kernel_from_rref(R, pivots, M.ncols)


def rank(M):
    _, pivots, _ = rref_rows(M.sparse_rows(), M.ncols)
    return len(pivots)


def left_kernel_rows(M):
    """Rows w (as dicts) spanning {w : w M = 0}, from the echelon transform.

    These are the non-pivot rows of the transform in the leftmost-pivot
    convention, so they give a deterministic complement coordinate system
    for the column span of M.
    """
    R, pivots, T = rref_rows(M.sparse_rows(), M.ncols, track=True)
    return [T[i] for i in range(len(pivots), M.nrows)]


def solve_mixed(A, L, b):
    """Find rational x and integer y with A x + L y = b, or None.

    The rational block is eliminated first: both b and the columns of L
    are projected off the column span of A using the left kernel of A.
    Integer solvability of the projected system is then settled by the
    Hermite form, and x is recovered by a rational solve.
    """
    if A.nrows != L.nrows:
        raise InputError("A and L must have the same number of rows")
    _check_rhs(A, b)
    b = [_as_fraction(v) for v in b]
    W = left_kernel_rows(A) if A.ncols else [{i: Fraction(1)} for i in range(A.nrows)]
    Lrows = L.sparse_rows()
    Lcols = L.ncols
    int_rows, rhs = [], []
    for w in W:
        coeffs = {}
        beta = Fraction(0)
        for i, wi in w.items():
            for j, v in Lrows[i].items():
                coeffs[j] = coeffs.get(j, 0) + wi * v
            beta += wi * b[i]
        coeffs = {j: Fraction(v) for j, v in coeffs.items() if v}
        den = beta.denominator
        for v in coeffs.values():
            den = lcm(den, v.denominator)
        int_rows.append({j: int(v * den) for j, v in coeffs.items()})
        rhs.append(int(beta * den))
    if int_rows:
        N = IntegerMatrix.from_sparse(len(int_rows), Lcols, int_rows)
        sol = solve_integer(N, rhs)
        if sol is None:
            return None
        y = sol[0]
    else:
        y = [0] * Lcols
    Ly = L.apply(y)
    rest = [bi - li for bi, li in zip(b, Ly)]
    if A.ncols == 0:
        return ([], y) if not any(rest) else None
    xs = solve_rational(A, rest)
    if xs is None:
        raise AssertionError("projected system solvable but rational back-substitution failed")
    return xs[0], y


# ---------------------------------------------------------------------------
# Cached solvers for repeated right-hand sides.

class RationalSolver:
    """Solves A x = b over Q for many b, reusing one echelon form."""

    def __init__(self, A):
        self.A = A
        self.m, self.n = A.shape
        R, pivots, T = rref_rows(A.sparse_rows(), A.ncols, track=True)
        self.pivots = pivots
        self.rank = len(pivots)
        self._T = T
        self._R = R
        self._kernel = None
        self._Tcols = None

    @property
    def kernel(self):
        if self._kernel is None:
            self._kernel = _kernel_from_rref(self._R, self.pivots, self.n)
        return self._kernel

    def _reduce(self, b):
        if len(b) != self.m:
            raise InputError(f"right-hand side has length {len(b)}, expected {self.m}")
        if self._Tcols is None:
            cols = [[] for _ in range(self.m)]
            for r, row in enumerate(self._T):
                for i, t in row.items():
                    cols[i].append((r, t))
            self._Tcols = cols
        out = [0] * len(self._T)
        for i, v in enumerate(b):
            if v:
                for r, t in self._Tcols[i]:
                    out[r] += t * v
        return out

    def in_span(self, b):
        c = self._reduce(b)
        return not any(c[self.rank:])

    def solve(self, b):
        """A particular solution (free coordinates zero) or None."""
        c = self._reduce(b)
        if any(c[self.rank:]):
            return None
        x = [Fraction(0)] * self.n
        for i, p in enumerate(self.pivots):
            x[p] = Fraction(c[i])
        return x


class IntegerSolver:
    """Solves M x = b over Z for many b, reusing one Hermite form."""

    def __init__(self, M):
        self.M = M
        self.m, self.n = M.shape
        H, U, pivots = hermite_rows(M.T.sparse_rows(), M.nrows)
        self._H, self._U, self.pivots = H, U, pivots
        self.rank = len(pivots)
        self.kernel = [_dense(U[i], self.n) for i in range(self.rank, self.n)]

    def solve(self, b):
        if len(b) != self.m:
            raise InputError(f"right-hand side has length {len(b)}, expected {self.m}")
        resid = [_as_int(v) for v in b]
        c = []
        for i, p in enumerate(self.pivots):
            h = self._H[i]
            v = resid[p]
            if v % h[p]:
                return None
            ci = v // h[p]
            c.append(ci)
            if ci:
                for j, hv in h.items():
                    resid[j] -= ci * hv
        if any(resid):
            return None
        x = [0] * self.n
        for i, ci in enumerate(c):
            if ci:
                for j, u in self._U[i].items():
                    x[j] += ci * u
        return x


class MixedSolver:
    """Finds rational x and integer y with A x + L y = b for many b.

    Same elimination order as solve_mixed: project off the column span of
    A through its left kernel, settle the integer part by Hermite form,
    then back-substitute.
    """

    def __init__(self, A, L):
        if A.nrows != L.nrows:
            raise InputError("A and L must have the same number of rows")
        self.A, self.L = A, L
        self.m = A.nrows
        self._W = left_kernel_rows(A) if A.ncols else [{i: Fraction(1)} for i in range(A.nrows)]
        Lrows = L.sparse_rows()
        int_rows, self._scale = [], []
        for w in self._W:
            coeffs = {}
            for i, wi in w.items():
                for j, v in Lrows[i].items():
                    coeffs[j] = coeffs.get(j, 0) + wi * v
            coeffs = {j: Fraction(v) for j, v in coeffs.items() if v}
            den = 1
            for v in coeffs.values():
                den = lcm(den, v.denominator)
            int_rows.append({j: int(v * den) for j, v in coeffs.items()})
            self._scale.append(den)
        self._N = IntegerMatrix.from_sparse(len(int_rows), L.ncols, int_rows)
        self._int = IntegerSolver(self._N) if int_rows else None
        self._rat = RationalSolver(A) if A.ncols else None

    def solve(self, b):
        if len(b) != self.m:
            raise InputError(f"right-hand side has length {len(b)}, expected {self.m}")
        b = [_as_fraction(v) for v in b]
        rhs = []
        for w, den in zip(self._W, self._scale):
            beta = sum((wi * b[i] for i, wi in w.items()), Fraction(0)) * den
            if beta.denominator != 1:
                return None
            rhs.append(beta.numerator)
        if self._int is not None:
            y = self._int.solve(rhs)
            if y is None:
                return None
        else:
            y = [0] * self.L.ncols
        Ly = self.L.apply(y)
        rest = [bi - li for bi, li in zip(b, Ly)]
        if self._rat is None:
            return ([], y) if not any(rest) else None
        x = self._rat.solve(rest)
        if x is None:
            raise AssertionError("projected system solvable but rational back-substitution failed")
        return x, y


def unimodular_inverse(U):
    """Inverse of a unimodular integer matrix."""
    n = U.nrows
    R, pivots, T = rref_rows(U.sparse_rows(), n, track=True)
    if len(pivots) != n:
        raise InputError("matrix is singular")
    # T U = I up to row order, which is the identity here since pivots are 0..n-1
    return IntegerMatrix.from_sparse(n, n, [{j: _as_int(v) for j, v in r.items()} for r in T])


# ---------------------------------------------------------------------------
# Group descriptors.

def _fmt_power(name, k, wrap=False):
    if k == 0:
        return None
    base = f"({name})" if wrap and k > 1 else name
    return base if k == 1 else f"{base}^{k}"


@dataclass(frozen=True)
class GroupDescriptor:
    """Isomorphism type Z^free_rank + Z/d1 + ... + Z/dt with d1 | d2 | ... ."""

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise InputError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise InputError(f"torsion divisor {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise InputError(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def from_divisors(cls, free_rank, divisors):
        """Normalize an arbitrary list of cyclic orders to invariant factors."""
        ds = [abs(int(d)) for d in divisors if abs(int(d)) > 1]
        if not ds:
            return cls(free_rank, ())
        M = IntegerMatrix([[d if i == j else 0 for j in range(len(ds))] for i, d in enumerate(ds)])
        diag = smith_diagonal(M)
        return cls(free_rank, tuple(d for d in diag if d > 1))

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def order(self):
        """Order of the group, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def parts(self):
        out = []
        p = _fmt_power("Z", self.free_rank)
        if p:
            out.append(p)
        out.extend(f"Z/{d}" for d in self.torsion)
        return out

    def __str__(self):
        return " + ".join(self.parts()) or "0"


@dataclass(frozen=True)
class MixedGroupDescriptor:
    """(Q/Z)^qz_rank + Q^q_rank + a finitely generated part.

    Groups of this shape arise as extensions of a finitely generated group
    by a divisible group.  Divisible groups are injective Z-modules, so
    every such extension splits and the three pieces are well defined up
    to isomorphism; recording them separately loses nothing.
    """

    qz_rank: int = 0
    q_rank: int = 0
    fg_part: GroupDescriptor = GroupDescriptor()

    def __post_init__(self):
        if self.qz_rank < 0 or self.q_rank < 0:
            raise InputError("negative rank")

    @property
    def is_trivial(self):
        return self.qz_rank == 0 and self.q_rank == 0 and self.fg_part.is_trivial

    def __str__(self):
        out = self.fg_part.parts()
        for name, k in (("Q/Z", self.qz_rank), ("Q", self.q_rank)):
            p = _fmt_power(name, k, wrap=True)
            if p:
                out.append(p)
        return " + ".join(out) or "0"


def quotient_descriptor(ambient_rank, relations):
    """Isomorphism type of Z^ambient_rank modulo the column span of relations."""
    if relations.nrows != ambient_rank and not (relations.ncols == 0):
        raise InputError("relations must have ambient_rank rows")
    if relations.ncols == 0 or ambient_rank == 0:
        return GroupDescriptor(ambient_rank, ())
    diag = smith_diagonal(relations)
    nonzero = [d for d in diag if d]
    return GroupDescriptor(ambient_rank - len(nonzero), tuple(d for d in nonzero if d > 1))
