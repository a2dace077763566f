"""Independent oracle: a minimal dense Smith form and derived group invariants.

Shares no code with the package.  The Smith diagonal comes from the
textbook pivot-and-reduce loop; for small matrices it is cross-checked
against determinantal divisors (d1...dk = gcd of the k x k minors).
"""

from fractions import Fraction
from itertools import combinations
from math import gcd


def smith_diagonal(rows):
    """Nonzero invariant factors of an integer matrix given as a list of rows."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for r in a:
            r[t], r[pj] = r[pj], r[t]
        while True:
            done = True
            for i in range(t + 1, m):
                q = a[i][t] // a[t][t]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    done = False
            if done:
                bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]]
                if not bad:
                    break
                i, _ = bad[0]
                a[t] = [x + y for x, y in zip(a[t], a[i])]
                continue
            nz = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            nz += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, pi, pj = min(nz)
            a[t], a[pi] = a[pi], a[t]
            for r in a:
                r[t], r[pj] = r[pj], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def _det(rows):
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
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return int(det)


def determinantal_diagonal(rows):
    """Invariant factors from gcds of minors; only for small matrices."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    ds = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for I in combinations(range(m), k):
            for J in combinations(range(n), k):
                g = gcd(g, _det([[rows[i][j] for j in J] for i in I]))
        if g == 0:
            break
        ds.append(g)
    return [ds[i] // ds[i - 1] for i in range(1, len(ds))]


def rank(rows):
    return len(smith_diagonal(rows)) if rows and rows[0] else 0


def closure(maximal):
    out = set()
    for s in maximal:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


def boundary(simplices, q):
    """Matrix of the boundary C_q -> C_(q-1), rows indexed by (q-1)-simplices."""
    lo = sorted(s for s in simplices if len(s) == q)
    hi = sorted(s for s in simplices if len(s) == q + 1)
    idx = {s: i for i, s in enumerate(lo)}
    M = [[0] * len(hi) for _ in lo]
    for j, s in enumerate(hi):
        for i in range(len(s)):
            M[idx[s[:i] + s[i + 1:]]][j] = (-1) ** i
    return M


def describe(free, torsion):
    parts = []
    if free:
        parts.append("Z" if free == 1 else f"Z^{free}")
    parts += [f"Z/{d}" for d in torsion]
    return " + ".join(parts) or "0"


def _homology_data(simplices):
    top = max(len(s) for s in simplices) - 1
    counts = [sum(1 for s in simplices if len(s) == q + 1) for q in range(top + 1)]
    diags = {q: smith_diagonal(boundary(simplices, q)) for q in range(1, top + 1)}
    return top, counts, diags


def integral_cohomology(maximal):
    """H^q(K;Z) for q = 0..dim as descriptor strings.

    H^q has free rank b_q and torsion equal to the torsion of H_(q-1),
    which is read off the boundary C_q -> C_(q-1).
    """
    top, counts, diags = _homology_data(closure(maximal))
    out = []
    for q in range(top + 1):
        r_in = len(diags.get(q + 1, []))
        r_out = len(diags.get(q, []))
        b = counts[q] - r_out - r_in
        tors = [d for d in diags.get(q, []) if d > 1]
        out.append(describe(b, sorted(tors)))
    return out


def qz_cohomology(maximal, q):
    """H^q(K;Q/Z) = Hom(H_q, Q/Z) = (Q/Z)^(b_q) + torsion of H_q."""
    top, counts, diags = _homology_data(closure(maximal))
    if q < 0 or q > top:
        return "0"
    b = counts[q] - len(diags.get(q, [])) - len(diags.get(q + 1, []))
    tors = sorted(d for d in diags.get(q + 1, []) if d > 1)
    parts = [f"Z/{d}" for d in tors]
    if b:
        parts.append("Q/Z" if b == 1 else f"(Q/Z)^{b}")
    return " + ".join(parts) or "0"
