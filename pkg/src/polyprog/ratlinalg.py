"""Exact linear algebra over the rationals, plus integer lattice utilities.

Kernels of the large integer matrices produced by relation solving are
computed with a modular pre-pass (numpy, word-sized prime) that guesses the
pivot structure, followed by an exact fraction-free solve restricted to the
pivot submatrix.  Every candidate kernel vector is re-verified against the
full matrix with exact arithmetic, and the rank certificate (a nonzero
pivot-minor determinant mod p) bounds the kernel dimension from above, so
the result is exact, not probabilistic.  A plain textbook RREF over
`Fraction` is kept as the independent slow route; tests compare the two.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

# Word-sized primes for the modular pre-pass; products of two residues fit
# comfortably in int64.  On a structure mismatch (prime divides a pivot
# minor) we fall through to the next prime; exact verification makes a
# silently wrong result impossible.
_PRIMES = (2147483629, 2147483587, 2147483563, 2147483549, 2147483543)


def _as_int_rows(rows):
    """Clear denominators row by row, returning lists of ints."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) if isinstance(x, Fraction) else int(x) * den
                    for x in row])
    return out


def _mod_echelon(mat, p):
    """Row echelon mod p.  Returns (pivot_rows, pivot_cols) in original
    row indices; `mat` is destroyed."""
    nrows, ncols = mat.shape
    perm = np.arange(nrows)
    pivot_rows, pivot_cols = [], []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            mat[[r, k]] = mat[[k, r]]
            perm[[r, k]] = perm[[k, r]]
        piv = int(mat[r, c])
        below = mat[r + 1:, c]
        sel = np.nonzero(below)[0]
        if sel.size:
            factors = below[sel]
            mat[r + 1 + sel] = (mat[r + 1 + sel] * piv - np.outer(factors, mat[r])) % p
        pivot_rows.append(int(perm[r]))
        pivot_cols.append(c)
        r += 1
    return pivot_rows, pivot_cols


def _bareiss_solve(aug, npiv):
    """Fraction-free forward elimination on an integer matrix whose left
    npiv columns are nonsingular, then exact back-substitution.

    Returns the solution block X (as Fractions) of A X = B where
    aug = [A | B].  Raises ZeroDivisionError if a pivot vanishes (caller
    retries with another prime)."""
    n = npiv
    m = len(aug[0])
    a = [list(map(int, row)) for row in aug]
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                raise ZeroDivisionError("singular pivot block")
            a[k], a[swap] = a[swap], a[k]
        for i in range(k + 1, n):
            for j in range(k + 1, m):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    nrhs = m - n
    sols = [[Fraction(0)] * nrhs for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for j in range(nrhs):
            s = Fraction(a[i][n + j])
            for k in range(i + 1, n):
                s -= a[i][k] * sols[k][j]
            sols[i][j] = s / a[i][i]
    return sols


def kernel_basis(rows, ncols=None):
    """Exact basis of {v : A v = 0} for A given as integer/Fraction rows.

    The basis is in reduced form relative to the modular pivot choice:
    vector j has value 1 at the j-th free column and 0 at the others.
    Deterministic (fixed prime sequence); when a prescan prime divides a
    leading minor the free columns can differ from the leftmost-pivot RREF
    convention, but the span and the exactness guarantee do not.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    int_rows = [r for r in _as_int_rows(rows) if any(r)]
    if not int_rows or ncols == 0:
        return [_unit_vector(ncols, j) for j in range(ncols)]
    for p in _PRIMES:
        result = _kernel_attempt(int_rows, ncols, p)
        if result is not None:
            return result
    raise ArithmeticError("kernel: all moduli failed structure checks")


def _unit_vector(n, j):
    v = [Fraction(0)] * n
    v[j] = Fraction(1)
    return tuple(v)


def _kernel_attempt(int_rows, ncols, p):
    mat = np.array([[x % p for x in row] for row in int_rows], dtype=np.int64)
    pivot_rows, pivot_cols = _mod_echelon(mat, p)
    rank = len(pivot_cols)
    free_cols = [c for c in range(ncols) if c not in set(pivot_cols)]
    if not free_cols:
        return []
    # Exact solve on the pivot submatrix: A_piv * X = -A_free.
    aug = [[int_rows[ri][c] for c in pivot_cols] +
           [-int_rows[ri][c] for c in free_cols]
           for ri in pivot_rows]
    try:
        sols = _bareiss_solve(aug, rank) if rank else []
    except ZeroDivisionError:
        return None
    basis = []
    for j, fc in enumerate(free_cols):
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivot_cols):
            v[pc] = sols[i][j]
        basis.append(tuple(v))
    # Exact verification against every original row; mod-p structure errors
    # surface here and trigger a retry.
    for row in int_rows:
        for v in basis:
            if sum(row[c] * v[c] for c in range(ncols) if v[c]) != 0:
                return None
    return basis


def rank(rows, ncols=None):
    """Exact rank via the certified kernel."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return ncols - len(kernel_basis(rows, ncols))


def rref(rows):
    """Textbook reduced row echelon form over Fraction.

    Returns (reduced_rows, pivot_cols); zero rows are dropped.  This is the
    independent slow route used for oracles and small presentation work.
    """
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if k is None:
            continue
        mat[r], mat[k] = mat[k], mat[r]
        inv = mat[r][c]
        mat[r] = [x / inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def rref_with_transform(rows):
    """RREF plus the transform T with T . rows = reduced (zero rows kept).

    Needed when coordinates with respect to the *original* rows matter.
    """
    n = len(rows)
    if n == 0:
        return [], [], []
    ncols = len(rows[0])
    aug = [[Fraction(x) for x in row] + [Fraction(1 if j == i else 0) for j in range(n)]
           for i, row in enumerate(rows)]
    red, _ = rref(aug)
    # rref drops zero rows of the *augmented* matrix; augmentation keeps all.
    out_rows, transform, pivots = [], [], []
    for row in red:
        left, right = row[:ncols], row[ncols:]
        if any(left):
            pivots.append(next(i for i, x in enumerate(left) if x != 0))
            out_rows.append(tuple(left))
            transform.append(tuple(right))
    return out_rows, pivots, transform


def primitive_integer_row(row):
    """Scale a rational vector to coprime integers with positive lead."""
    den = 1
    for x in row:
        f = Fraction(x)
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(Fraction(x) * den) for x in row]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def canonical_basis(rows):
    """Deterministic basis of the row space: RREF then primitive integers."""
    red, _ = rref(rows)
    return [primitive_integer_row(r) for r in red]


def coordinates_in_rows(target, rows):
    """Write `target` as a rational combination of `rows`, or None.

    When `rows` are linearly dependent the combination is the RREF-pivot
    one (deterministic)."""
    red, pivots, transform = rref_with_transform(rows)
    ncols = len(target)
    residual = [Fraction(x) for x in target]
    coeffs_red = [Fraction(0)] * len(red)
    for i, pc in enumerate(pivots):
        if residual[pc] != 0:
            f = residual[pc]
            coeffs_red[i] = f
            residual = [a - f * b for a, b in zip(residual, red[i])]
    if any(residual):
        return None
    coeffs = [Fraction(0)] * len(rows)
    for i, t_row in enumerate(transform):
        if coeffs_red[i]:
            coeffs = [c + coeffs_red[i] * t for c, t in zip(coeffs, t_row)]
    return tuple(coeffs)


def in_row_space(target, rows):
    return coordinates_in_rows(target, rows) is not None


def same_row_space(rows_a, rows_b):
    return canonical_basis(rows_a) == canonical_basis(rows_b)


def intersect_row_spaces(rows_a, rows_b):
    """Canonical basis of rowspace(A) ∩ rowspace(B)."""
    if not rows_a or not rows_b:
        return []
    stacked = [list(r) for r in rows_a] + [list(r) for r in rows_b]
    # (u, -v) with u.A = v.B  <=>  (u, v) in the left kernel of the stack.
    ker = kernel_basis(_transpose(stacked), ncols=len(stacked))
    na = len(rows_a)
    members = []
    for vec in ker:
        u = vec[:na]
        combo = [Fraction(0)] * len(rows_a[0])
        for ui, row in zip(u, rows_a):
            if ui:
                combo = [c + ui * x for c, x in zip(combo, row)]
        if any(combo):
            members.append(combo)
    return canonical_basis(members)


def _transpose(rows):
    return [list(col) for col in zip(*rows)]


def extend_basis(sub_rows, ambient_rows):
    """Extend a basis of a subspace by ambient rows; returns the added rows
    (elements of `ambient_rows`, in order)."""
    current = [list(r) for r in sub_rows]
    added = []
    for row in ambient_rows:
        if not in_row_space(row, current):
            current.append(list(row))
            added.append(tuple(row))
    return added


# ---------------------------------------------------------------------------
# Integer lattice utilities (Hermite normal form based)

def hnf_rows(mat):
    """Row-style Hermite normal form of the lattice spanned by integer rows.

    Pivots positive, entries above a pivot reduced to [0, pivot).  Zero rows
    dropped.  Deterministic canonical form."""
    m = [list(map(int, row)) for row in mat]
    if not m:
        return []
    nrows, ncols = len(m), len(m[0])
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, nrows) if m[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
            done = True
            for i in range(r + 1, nrows):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < nrows and m[r][c] != 0:
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
            r += 1
            if r == nrows:
                break
    return [tuple(row) for row in m[:r] if any(row)]


def left_kernel_int(mat):
    """Basis of the saturated lattice {v in Z^m : v . mat = 0}."""
    m = [list(map(int, row)) for row in mat]
    nrows = len(m)
    if nrows == 0:
        return []
    ncols = len(m[0])
    aug = [row + [1 if j == i else 0 for j in range(nrows)] for i, row in enumerate(m)]
    h = _hnf_in_place(aug, ncols)
    return [tuple(row[ncols:]) for row in h if not any(row[:ncols])]


def _hnf_in_place(m, ncols_reduce):
    """HNF row reduction touching only the first ncols_reduce columns for
    pivot selection; full rows carried along (keeps transforms)."""
    nrows = len(m)
    r = 0
    for c in range(ncols_reduce):
        while True:
            nz = [i for i in range(r, nrows) if m[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
            done = True
            for i in range(r + 1, nrows):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < nrows and any(mi[c] != 0 for mi in m[r:r + 1]):
            r += 1
            if r == nrows:
                break
    return m


def integer_annihilator(rational_rows):
    """Basis of {eta in Z^n : eta . row = 0 for every row} (saturated)."""
    if not rational_rows:
        return []
    int_rows = _as_int_rows(rational_rows)
    cols = _transpose(int_rows)
    return left_kernel_int(cols)


def solve_integer_combination(target, lattice_rows):
    """Integer coefficients writing `target` over HNF rows, or None."""
    coeffs = []
    residual = list(map(int, target))
    for row in lattice_rows:
        pc = next((i for i, x in enumerate(row) if x != 0), None)
        if pc is None:
            coeffs.append(0)
            continue
        if residual[pc] % row[pc] != 0:
            return None
        q = residual[pc] // row[pc]
        coeffs.append(q)
        if q:
            residual = [a - q * b for a, b in zip(residual, row)]
    if any(residual):
        return None
    return coeffs
