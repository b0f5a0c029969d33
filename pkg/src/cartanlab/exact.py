"""Exact dense linear algebra over Fraction and quadratic-field scalars.

Matrices are tuples of tuples of exact scalars (Fraction, int, or
QuadElement).  Everything here is plain Gaussian elimination over a
field: pivots are exact, divisions are exact, no tolerance anywhere.
Sizes are desk scale (n <= 8 or so), so O(n^3) with big rationals is
plenty.
"""

from __future__ import annotations

from fractions import Fraction

from .fields import as_exact


def mat_from_rows(rows):
    return tuple(tuple(as_exact(x) for x in row) for row in rows)


def identity(n, one=Fraction(1)):
    zero = one - one
    return tuple(
        tuple(one if i == j else zero for j in range(n)) for i in range(n)
    )


def mat_mul(A, B):
    n, k = len(A), len(B)
    m = len(B[0])
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_vec(A, v):
    return tuple(sum(A[i][j] * v[j] for j in range(len(v))) for i in range(len(A)))


def mat_add(A, B):
    return tuple(
        tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def mat_sub(A, B):
    return tuple(
        tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def mat_scale(c, A):
    return tuple(tuple(c * x for x in row) for row in A)


def transpose(A):
    return tuple(zip(*A))


def mat_eq(A, B):
    return all(
        all(x == y for x, y in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def mat_trace(A):
    t = A[0][0]
    for i in range(1, len(A)):
        t = t + A[i][i]
    return t


def _zero_of(A):
    x = A[0][0]
    return x - x


def det(A):
    """Determinant by fraction-free-ish Gaussian elimination (exact)."""
    n = len(A)
    M = [list(row) for row in A]
    zero = _zero_of(A)
    result_sign = 1
    d = zero + 1
    for k in range(n):
        pivot_row = None
        for i in range(k, n):
            if M[i][k] != zero:
                pivot_row = i
                break
        if pivot_row is None:
            return zero
        if pivot_row != k:
            M[k], M[pivot_row] = M[pivot_row], M[k]
            result_sign = -result_sign
        piv = M[k][k]
        d = d * piv
        for i in range(k + 1, n):
            f = M[i][k] / piv
            if f != zero:
                for j in range(k, n):
                    M[i][j] = M[i][j] - f * M[k][j]
    return d if result_sign == 1 else -d


def inverse(A):
    n = len(A)
    zero = _zero_of(A)
    one = zero + 1
    M = [list(row) + [one if i == j else zero for j in range(n)]
         for i, row in enumerate(A)]
    for k in range(n):
        pivot_row = None
        for i in range(k, n):
            if M[i][k] != zero:
                pivot_row = i
                break
        if pivot_row is None:
            raise ZeroDivisionError("singular matrix")
        M[k], M[pivot_row] = M[pivot_row], M[k]
        piv = M[k][k]
        M[k] = [x / piv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != zero:
                f = M[i][k]
                M[i] = [x - f * y for x, y in zip(M[i], M[k])]
    return tuple(tuple(row[n:]) for row in M)


def rank(A):
    if not A:
        return 0
    zero = _zero_of(A)
    M = [list(row) for row in A]
    nrows, ncols = len(M), len(M[0])
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if M[i][c] != zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        M[r], M[pivot_row] = M[pivot_row], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c] != zero:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
        if r == nrows:
            break
    return r


def nullspace(A):
    """Basis of the right kernel (list of tuples), exact."""
    if not A:
        return []
    zero = _zero_of(A)
    one = zero + 1
    M = [list(row) for row in A]
    nrows, ncols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if M[i][c] != zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        M[r], M[pivot_row] = M[pivot_row], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c] != zero:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc]
        basis.append(tuple(v))
    return basis


def solve(A, b):
    """One exact solution of A x = b, or None if inconsistent."""
    zero = _zero_of(A)
    M = [list(row) + [bv] for row, bv in zip(A, b)]
    nrows, ncols = len(M), len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if M[i][c] != zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        M[r], M[pivot_row] = M[pivot_row], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c] != zero:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if M[i][ncols] != zero:
            return None
    x = [zero] * ncols
    for i, c in enumerate(pivots):
        x[c] = M[i][ncols]
    return tuple(x)


def charpoly(A):
    """Coefficients [c_0, ..., c_n] of det(X*I - A), exact.

    Faddeev-LeVerrier: the only divisions are by the step index, which
    Fractions and quadratic elements both support exactly.
    """
    n = len(A)
    zero = _zero_of(A)
    one = zero + 1
    coeffs = [zero] * (n + 1)
    coeffs[n] = one
    M = identity(n, one)
    for k in range(1, n + 1):
        M = mat_mul(A, M)
        c = -mat_trace(M) / k
        coeffs[n - k] = c
        M = mat_add(M, mat_scale(c, identity(n, one)))
    return coeffs


def in_span(vectors, v):
    """Whether v lies in the exact span of the given vectors."""
    if not vectors:
        return all(x == (x - x) for x in v)
    A = transpose(tuple(tuple(w) for w in vectors))
    return solve(A, v) is not None


def span_rank(vectors):
    if not vectors:
        return 0
    return rank(tuple(tuple(v) for v in vectors))
