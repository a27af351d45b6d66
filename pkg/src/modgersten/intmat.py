"""Exact integer and rational matrix routines.

Matrices are lists of rows.  Entries are ``int`` or ``fractions.Fraction``;
nothing here ever touches floating point except where noted as a search
bound (and such bounds are always re-checked exactly).
"""

from fractions import Fraction
from math import gcd


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def transpose(A):
    return [list(r) for r in zip(*A)] if A else []


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def bilinear(G, x, y):
    """x^T G y."""
    return dot(x, matvec(G, y))


def column(A, j):
    return [row[j] for row in A]


def from_columns(cols, nrows=None):
    if not cols:
        return [[] for _ in range(nrows or 0)]
    return [list(r) for r in zip(*cols)]


def columns(A):
    return [list(c) for c in zip(*A)] if A and A[0] else []


def content(v):
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def is_integral(v):
    return all(Fraction(x).denominator == 1 for x in v)


def as_int_vec(v):
    out = []
    for x in v:
        x = Fraction(x)
        if x.denominator != 1:
            raise ValueError("non-integral entry %s" % x)
        out.append(int(x))
    return out


def common_denominator(entries):
    d = 1
    for x in entries:
        d = d * Fraction(x).denominator // gcd(d, Fraction(x).denominator)
    return d


# ---------------------------------------------------------------------------
# rational elimination


def rref(A):
    """Reduced row echelon form over Q.  Returns (R, pivot_columns)."""
    R = [[Fraction(x) for x in row] for row in A]
    m = len(R)
    n = len(R[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def rank(A):
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def nullspace(A, ncols=None):
    """Basis (list of vectors) of {x : A x = 0} over Q."""
    if not A:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref(A)
    n = len(A[0])
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -R[i][f]
        basis.append(x)
    return basis


def solve(A, b):
    """One solution x of A x = b over Q (free variables zero), or None."""
    m = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(m)]
    R, piv = rref(aug)
    n = len(A[0]) if m else 0
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return x


def inverse(A):
    n = len(A)
    aug = [list(A[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def det(A):
    """Exact determinant (Fraction-valued Gaussian elimination)."""
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] / M[c][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


def signature(G):
    """(n_plus, n_minus) of a symmetric rational matrix by LDL^T pivoting."""
    M = [[Fraction(x) for x in row] for row in G]
    n = len(M)
    pos = neg = 0
    active = list(range(n))
    while active:
        i = next((k for k in active if M[k][k] != 0), None)
        if i is None:
            # all remaining diagonal entries vanish: e_i <- e_i + e_j
            pair = next(((a, b) for a in active for b in active if a != b and M[a][b] != 0), None)
            if pair is None:
                break
            a, b = pair
            for k in range(n):
                M[a][k] += M[b][k]
            for k in range(n):
                M[k][a] += M[k][b]
            continue
        piv = M[i][i]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        active.remove(i)
        for a in active:
            if M[a][i]:
                f = M[a][i] / piv
                for k in range(n):
                    M[a][k] -= f * M[i][k]
        for a in active:
            M[a][i] = M[i][a] = Fraction(0)
    return pos, neg


# ---------------------------------------------------------------------------
# integer normal forms


def smith(A):
    """Smith normal form with transforms: returns (D, U, V), U A V = D.

    U (m x m) and V (n x n) are unimodular; the nonzero diagonal entries of
    D are positive and each divides the next.
    """
    D = [[int(x) for x in row] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(i, t, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(j, t, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return D, U, V


def invariant_factors(A):
    D, _, _ = smith(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def hnf_rows(R):
    """Row Hermite normal form: echelon rows, positive pivots, entries above
    each pivot reduced into [0, pivot).  Zero rows are dropped.  Canonical."""
    rows = [[int(x) for x in r] for r in R if any(r)]
    n = len(R[0]) if R else 0
    out = []
    col = 0
    while rows and col < n:
        live = [r for r in rows if r[col]]
        dead = [r for r in rows if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            keep = [p]
            for r in live[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                if r[col]:
                    keep.append(r)
                elif any(r):
                    dead.append(r)
            live = keep
        if live:
            p = live[0]
            if p[col] < 0:
                p = [-x for x in p]
            out.append((col, p))
        rows = [r for r in dead if any(r)]
        col += 1
    result = [p for _, p in out]
    for k, (c, p) in enumerate(out):
        for j in range(k):
            q = result[j][c] // p[c]
            result[j] = [a - q * b for a, b in zip(result[j], p)]
    return result


def hnf_columns(B):
    """Canonical generating columns for the lattice spanned by the columns of B."""
    return transpose(hnf_rows(transpose(B))) if B and B[0] else []


def hnf_rational_columns(vectors):
    """Canonical basis (as column list) for the Z-span of rational vectors."""
    if not vectors:
        return []
    d = common_denominator([x for v in vectors for x in v])
    ints = [[int(Fraction(x) * d) for x in v] for v in vectors]
    return [[Fraction(x, d) for x in r] for r in hnf_rows(ints)]


def integer_kernel(A, n=None):
    """Z-basis (list of vectors) of {x in Z^n : A x = 0}.  Always primitive."""
    if not A:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    D, U, V = smith(A)
    n = len(A[0])
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [column(V, j) for j in range(r, n)]


def saturate(vectors, n):
    """Z-basis of (span_Q vectors) ∩ Z^n."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return []
    d = common_denominator([x for v in vecs for x in v])
    M = from_columns([[int(Fraction(x) * d) for x in v] for v in vecs], n)
    D, U, V = smith(M)
    r = sum(1 for i in range(min(n, len(vecs))) if D[i][i])
    Uinv = [[int(x) for x in row] for row in inverse(U)]
    return [column(Uinv, j) for j in range(r)]


def lattice_index(sub_vectors, n):
    """Index of the Z-span of integer vectors inside its saturation."""
    M = from_columns(sub_vectors, n)
    f = invariant_factors(M)
    out = 1
    for x in f:
        out *= x
    return out
