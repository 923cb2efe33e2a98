import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from polyprog import ratlinalg as rl


def _textbook_kernel(rows, ncols):
    """Independent reference: kernel from a plain Fraction RREF."""
    mat = [list(map(Fraction, r)) for r in rows]
    pivots, r = [], 0
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
    out = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        out.append(tuple(v))
    return out


matrices = st.integers(min_value=1, max_value=6).flatmap(
    lambda m: st.integers(min_value=1, max_value=6).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(min_value=-9, max_value=9),
                     min_size=n, max_size=n),
            min_size=m, max_size=m)))


@given(matrices)
@settings(max_examples=200, deadline=None)
def test_kernel_matches_textbook(rows):
    ncols = len(rows[0])
    fast = rl.kernel_basis(rows, ncols)
    slow = _textbook_kernel(rows, ncols)
    assert fast == slow


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_kernel_vectors_annihilate(rows):
    ncols = len(rows[0])
    for v in rl.kernel_basis(rows, ncols):
        for row in rows:
            assert sum(a * b for a, b in zip(row, v)) == 0


def test_rank_plus_nullity():
    rng = random.Random(11)
    for _ in range(50):
        m, n = rng.randint(1, 7), rng.randint(1, 7)
        rows = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)]
        assert rl.rank(rows, n) + len(rl.kernel_basis(rows, n)) == n


def test_rref_transform_identity():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1], [1, 0, 2]]
    red, pivots, transform = rl.rref_with_transform(rows)
    for i, out in enumerate(red):
        rebuilt = [sum(Fraction(transform[i][j]) * rows[j][c] for j in range(len(rows)))
                   for c in range(3)]
        assert tuple(rebuilt) == out


def test_coordinates_roundtrip():
    basis = [[1, 1, 1, 1], [0, 1, 2, 0], [0, 0, 0, 1]]
    target = [3, 5, 7, 4]
    coords = rl.coordinates_in_rows(target, basis)
    rebuilt = [sum(c * row[j] for c, row in zip(coords, basis)) for j in range(4)]
    assert rebuilt == target
    assert rl.coordinates_in_rows([1, 0, 0, 0], [[0, 1, 0, 0]]) is None


def test_intersection_contained_in_both():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(2, 6)
        a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(1, 3))]
        b = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(1, 3))]
        inter = rl.intersect_row_spaces(a, b)
        for v in inter:
            assert rl.in_row_space(v, a)
            assert rl.in_row_space(v, b)
        # dimension formula
        dim_sum = rl.rank([*a, *b], n)
        assert len(inter) == rl.rank(a, n) + rl.rank(b, n) - dim_sum


def test_extend_basis_covers():
    sub = [[1, 0, 0]]
    added = rl.extend_basis(sub, [[1, 1, 0], [0, 1, 0], [0, 0, 5]])
    assert added == [(1, 1, 0), (0, 0, 5)]


def test_primitive_row():
    assert rl.primitive_integer_row([Fraction(-2, 3), Fraction(4, 3)]) == (1, -2)
    assert rl.primitive_integer_row([0, Fraction(0), Fraction(5)]) == (0, 0, 1)


def test_hnf_preserves_lattice():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 5)
        rows = [[rng.randint(-6, 6) for _ in range(n)]
                for _ in range(rng.randint(1, 5))]
        h = rl.hnf_rows(rows)
        # every original row is an integer combination of the HNF rows
        for row in rows:
            assert rl.solve_integer_combination(row, h) is not None
        # and conversely
        for hrow in h:
            coords = rl.coordinates_in_rows(list(hrow), [list(r) for r in rows])
            assert coords is not None


def test_integer_annihilator_saturated():
    basis = [[1, 1, 1, 1], [0, 1, 2, 0], [0, 0, 0, 1]]
    ann = rl.integer_annihilator(basis)
    assert ann == [(1, -2, 1, 0)]
    # scaled spans give the same saturated lattice
    scaled = [[2 * v for v in row] for row in basis]
    assert rl.integer_annihilator(scaled) == ann


def test_integer_annihilator_orthogonal():
    rng = random.Random(9)
    for _ in range(20):
        n = rng.randint(2, 6)
        rows = [[rng.randint(-3, 3) for _ in range(n)]
                for _ in range(rng.randint(1, n - 1))]
        ann = rl.integer_annihilator(rows)
        for eta in ann:
            for row in rows:
                assert sum(a * b for a, b in zip(eta, row)) == 0
        assert len(ann) == n - rl.rank(rows, n)


def test_kernel_survives_prime_divisible_entries():
    # entries built from the prescan primes skew the modular pivot choice;
    # the result must still be an exact kernel basis of the right span
    # (the normalization may differ from the leftmost-pivot form)
    p1 = rl._PRIMES[0]
    cases = [
        [[p1, 1], [0, 1]],
        [[p1, 1, 1], [p1, 1, 1]],
        [[p1, p1], [1, 1]],
        [[2 * p1, 4 * p1, 1], [p1, 2 * p1, 0], [0, 0, 1]],
    ]
    for rows in cases:
        n = len(rows[0])
        fast = rl.kernel_basis(rows, n)
        slow = _textbook_kernel(rows, n)
        assert len(fast) == len(slow)
        for v in fast:
            for row in rows:
                assert sum(a * b for a, b in zip(row, v)) == 0
        if fast:
            assert rl.same_row_space([list(v) for v in fast],
                                     [list(v) for v in slow])


def test_kernel_of_zero_and_empty():
    assert rl.kernel_basis([[0, 0]], 2) == _textbook_kernel([[0, 0]], 2)
    assert rl.kernel_basis([], 3) == [
        (1, 0, 0), (0, 1, 0), (0, 0, 1)]
