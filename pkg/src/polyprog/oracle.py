"""Brute-force reference computations, kept independent of the main path.

The relation solver in `progression` works in binomial coordinates via
Vandermonde convolutions and a modular-prescan kernel.  The oracle here
does none of that: unknowns are plain monomial coefficients, expansions
use its own dict-based polynomial powers, and the kernel is a textbook
reduced-row-echelon elimination over Fraction.  Agreement between the two
is an end-to-end check of both (acceptance criterion and tests call it).
"""

from __future__ import annotations

from fractions import Fraction

from .polycore import to_binomial_basis
from .progression import Progression


def _poly_mul(a, b):
    out = {}
    for (ax, ay), ac in a.items():
        for (bx, by), bc in b.items():
            key = (ax + bx, ay + by)
            out[key] = out.get(key, Fraction(0)) + ac * bc
    return {k: v for k, v in out.items() if v}


def _shift_power(p_coeffs, k):
    """(x + P(y))^k as a monomial dict, by repeated multiplication."""
    base = {(1, 0): Fraction(1)}
    for deg, c in enumerate(p_coeffs):
        if c:
            base[(0, deg)] = base.get((0, deg), Fraction(0)) + Fraction(c)
    acc = {(0, 0): Fraction(1)}
    for _ in range(k):
        acc = _poly_mul(acc, base)
    return acc


def _rref_kernel(rows, ncols):
    """Kernel basis by textbook RREF over Fraction (the slow route)."""
    mat = [list(map(Fraction, row)) for row in rows]
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
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        basis.append(v)
    return basis


def relation_kernel_dense(prog: Progression, cap: int):
    """All relations with degrees <= cap, solved over monomial-coefficient
    unknowns on the dense x^a y^b grid; returned as binomial-coordinate
    rows (b_{ik} layout) for comparison with the main path."""
    t = prog.t
    unknowns = [(i, k) for i in range(t + 1) for k in range(1, cap + 1)]
    expansions = []
    all_coeffs = [()] + [tuple(p.coeffs) for p in prog.polys]
    for i, k in unknowns:
        expansions.append(_shift_power(all_coeffs[i], k))
    cells = sorted({cell for exp in expansions for cell in exp})
    rows = []
    for cell in cells:
        rows.append([exp.get(cell, Fraction(0)) for exp in expansions])
    kernel = _rref_kernel(rows, len(unknowns))
    out = []
    for vec in kernel:
        row = []
        for i in range(t + 1):
            # monomial coefficients of Q_i ...
            mono = [Fraction(0)] + [vec[i * cap + (k - 1)] for k in range(1, cap + 1)]
            from .polycore import UniPoly
            bs = list(to_binomial_basis(UniPoly(mono)))
            bs = bs + [Fraction(0)] * (cap + 1 - len(bs))
            row.extend(bs[1:cap + 1])
        out.append(row)
    return out


def count_by_enumeration(mask, prog: Progression):
    """E_{x,y} prod 1_A(x + P_i(y)) by a plain double loop."""
    n = len(mask)
    total = 0
    for x in range(n):
        for y in range(n):
            term = 1 if mask[x] else 0
            if not term:
                continue
            for p in prog.polys:
                val = p(y)
                assert val.denominator == 1
                if not mask[(x + val.numerator) % n]:
                    term = 0
                    break
            total += term
    return total / n ** 2


def popdiff_by_enumeration(mask, prog: Progression, epsilon):
    """Qualifying set recomputed with an independent double loop."""
    n = len(mask)
    alpha = sum(1 for v in mask if v) / n
    qualifying = []
    for shift in range(n):
        vals = []
        for p in prog.polys:
            v = p(shift)
            assert v.denominator == 1
            vals.append(v.numerator % n)
        count = 0
        for x in range(n):
            if mask[x] and all(mask[(x - v) % n] for v in vals):
                count += 1
        if count > (alpha ** (prog.t + 1) - epsilon) * n:
            qualifying.append(shift)
    return qualifying
