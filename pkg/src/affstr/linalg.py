"""Tiny exact linear algebra toolkit over ``fractions.Fraction``.

Everything downstream needs exact answers: Coxeter matrices must come out
integral, Hom spaces are solved over Q, and Euler characteristics are plain
integers.  Matrices are lists of lists of Fractions; vectors are tuples.
numpy is deliberately not used here.
"""

from fractions import Fraction


def mat(rows):
    """Deep-copy ``rows`` into a Fraction matrix."""
    return [[Fraction(x) for x in row] for row in rows]


def zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n):
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def mat_mul(a, b):
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    bt = list(zip(*b))
    out = []
    for i in range(n):
        row_a = a[i]
        out.append([sum(row_a[t] * bt[j][t] for t in range(k)) for j in range(m)])
    return out


def mat_vec(a, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in a)


def vec_mat_vec(u, a, v):
    """u^T A v for tuples u, v."""
    return sum(u[i] * sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(u)))


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a):
    return [[-x for x in row] for row in a]


def mat_eq(a, b):
    return len(a) == len(b) and all(ra == rb for ra, rb in zip(a, b))


def is_integral(a):
    return all(x.denominator == 1 for row in a for x in row)


def rref(a):
    """Reduced row echelon form.  Returns (rref_matrix, pivot_columns)."""
    m = [row[:] for row in a]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a):
    return len(rref(a)[1])


def inverse(a):
    """Exact inverse; raises ValueError on singular or non-square input."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    aug = [list(row) + list(identity(n)[i]) for i, row in enumerate(mat(a))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def nullspace(a):
    """Basis of the right kernel, as a list of Fraction tuples."""
    if not a:
        return []
    cols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(tuple(v))
    return basis


def column_space_contains(a, v):
    """Whether vector v lies in the column space of a."""
    if all(x == 0 for x in v):
        return True
    if not a or not a[0]:
        return False
    aug = [row[:] + [v[i]] for i, row in enumerate(a)]
    return rank(a) == rank(aug)
