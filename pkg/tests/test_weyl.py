import math
from fractions import Fraction

import numpy as np
import pytest

from polyprog import ratlinalg as rl, weyl
from polyprog.polycore import UniPoly
from polyprog.progression import Relation, progression
from polyprog.weyl import (
    Irrational,
    TorusCharacter,
    WeylSystem,
    binom_int,
    closure_subspaces,
    coset_confinement,
    equidistribution_test,
    factor_projection,
    lower_bound_witness,
    multiple_average,
    orbit_point,
    orbit_point_floats,
    step,
    torus_distance,
)

Y = UniPoly((0, 1))
Y2 = UniPoly((0, 0, 1))
Y3 = UniPoly((0, 0, 0, 1))
INH = progression(Y, Y * 2, Y2)
HOM = progression(Y, Y * 2, Y3)
DEGREE2 = Relation(qs=(UniPoly((0, 2, 1)), UniPoly((0, 0, -2)),
                       UniPoly((0, 0, 1)), UniPoly((0, -2))))

SQRT2 = Irrational("sqrt2")
STD2 = WeylSystem.standard(2, SQRT2, (Irrational("sqrt3"), Irrational("sqrt5")))


def test_catalog_values():
    assert abs(float(Irrational("sqrt2")) - math.sqrt(2)) < 1e-15
    assert abs(float(Irrational("golden")) - (1 + math.sqrt(5)) / 2) < 1e-15
    assert abs(float(Irrational("e")) - math.e) < 1e-15
    assert abs(float(Irrational("sqrt2", Fraction(1, 3)))
               - (math.sqrt(2) + 1 / 3)) < 1e-15
    with pytest.raises(ValueError):
        Irrational("pi")


def test_binom_int_negative_arguments():
    for n in range(-6, 7):
        for k in range(0, 5):
            assert binom_int(n, k) == round(
                math.prod(n - i for i in range(k)) / math.factorial(k))


def test_orbit_point_examples():
    w1 = WeylSystem.standard(1, SQRT2, (Fraction(0),))
    assert orbit_point_floats(w1, 0) == (0.0,)
    assert abs(orbit_point_floats(w1, 3)[0] - (3 * math.sqrt(2)) % 1) < 1e-12
    w2 = WeylSystem.standard(2, SQRT2, (Fraction(0), Fraction(0)))
    pt = orbit_point_floats(w2, 2)
    assert abs(pt[0] - (2 * math.sqrt(2)) % 1) < 1e-12
    assert abs(pt[1] - math.sqrt(2) % 1) < 1e-12    # C(2,2) a_0


def test_orbit_closed_form_equals_iteration_exactly():
    pt = orbit_point(STD2, 0)
    for n in range(1, 51):
        pt = step(STD2, pt)
        assert pt == orbit_point(STD2, n)   # fixed point arithmetic is exact


def test_orbit_cocycle_identity():
    rng = np.random.default_rng(3)
    for _ in range(100):
        m = int(rng.integers(-50, 50))
        n = int(rng.integers(0, 50))
        pt = orbit_point(STD2, m)
        for _ in range(n):
            pt = step(STD2, pt)
        assert torus_distance(
            tuple(v / weyl._SCALE for v in pt),
            orbit_point_floats(STD2, m + n)) < 1e-12


def test_generator_validation():
    with pytest.raises(ValueError):
        WeylSystem.from_generators(2, [(SQRT2, 0), (SQRT2, SQRT2)])  # level-1 leak
    with pytest.raises(ValueError):
        WeylSystem.from_generators(2, [(Fraction(1, 2), 0), (0, SQRT2)])


def test_factor_projection():
    assert factor_projection(TorusCharacter((1, 0)), 1) is not None
    assert factor_projection(TorusCharacter((0, 1)), 1) is None
    assert factor_projection(TorusCharacter((3, -2)), 2) is not None
    with pytest.raises(ValueError):
        factor_projection(TorusCharacter((1, 0)), 3)


def test_factor_projection_idempotent_multiplicative():
    chars = [TorusCharacter(f) for f in ((1, 0), (0, 2), (1, 1), (0, 0))]
    for c in chars:
        first = factor_projection(c, 1)
        if first is not None:
            assert factor_projection(first, 1) == first
    # products of characters add frequencies
    for a in chars:
        for b in chars:
            prod = TorusCharacter(tuple(x + y for x, y in
                                        zip(a.frequencies, b.frequencies)))
            pa, pb = factor_projection(a, 1), factor_projection(b, 1)
            if pa is not None and pb is not None:
                assert factor_projection(prod, 1) is not None


def test_multiple_average_trivial():
    triv = [TorusCharacter((0, 0))] * 3
    val = multiple_average(STD2, triv, progression(Y, Y * 2), 40)
    assert abs(val - 1.0) < 1e-12


def test_multiple_average_rotation_decay():
    w1 = WeylSystem.standard(1, SQRT2, (Fraction(0),))
    val = multiple_average(w1, [TorusCharacter((0,)), TorusCharacter((1,))],
                           progression(Y), 10 ** 4, two_parameter=False)
    dist = abs(math.sqrt(2) % 1 - round(math.sqrt(2) % 1))
    assert abs(val) <= 1 / (2 * dist * 10 ** 4) * 1.01


def test_multiple_average_two_parameter_matches_direct():
    chars = [TorusCharacter((1, 0)), TorusCharacter((0, 1)),
             TorusCharacter((1, -1))]
    prog = progression(Y, Y2)
    n = 30
    fast = multiple_average(STD2, chars, prog, n)
    direct = 0j
    for m in range(n):
        for y in range(n):
            term = 1 + 0j
            for char, p in zip(chars, prog.all_polys()):
                u = m + int(p(y))
                term *= char.evaluate(orbit_point(STD2, u))
            direct += term
    direct /= n * n
    assert abs(fast - direct) < 1e-9


def test_lower_bound_witness_degree_two_relation():
    record = lower_bound_witness(INH, DEGREE2, Irrational("golden"), STD2,
                                 samples=500, seed=7)
    assert record.product_max_deviation < 1e-9
    assert record.projection_killed == [True, True, True, False]


def test_lower_bound_witness_ap_on_rotation():
    w1 = WeylSystem.standard(1, SQRT2, (Irrational("sqrt3"),))
    rel = Relation(qs=(UniPoly((0, 1)), UniPoly((0, -2)), UniPoly((0, 1))))
    record = lower_bound_witness(progression(Y, Y * 2), rel,
                                 Irrational("sqrt5"), w1, samples=300, seed=1)
    assert record.product_max_deviation < 1e-9
    assert record.projection_killed == [True, True, True]


def test_lower_bound_witness_zero_relation():
    zero = Relation(qs=(UniPoly.zero(),) * 4)
    record = lower_bound_witness(INH, zero, SQRT2, STD2, samples=50, seed=2)
    assert record.product_max_deviation < 1e-12
    assert record.projection_killed == [False] * 4


def test_lower_bound_witness_degree_guard():
    w1 = WeylSystem.standard(1, SQRT2, (Irrational("sqrt3"),))
    with pytest.raises(ValueError):
        lower_bound_witness(INH, DEGREE2, SQRT2, w1)


EXPECTED_SPAN_6 = [
    (1, 1, 1, 1, 0, 0, 0, 0),
    (0, 1, 2, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 1, 0),
    (0, 0, 0, 0, 1, 1, 1, 1),
    (0, 0, 0, 0, 0, 1, 2, 0),
    (0, 0, 0, 0, 0, 0, 0, 1),
]


def test_closure_dependent_six_dimensional_three_cosets():
    system = WeylSystem.from_generators(
        2, [(SQRT2, 0), (0, Irrational("sqrt2", Fraction(1, 3)))])
    closure = closure_subspaces(INH, system)
    assert closure.dim == 6
    assert rl.same_row_space([list(v) for v in closure.subspace_basis],
                             [list(v) for v in EXPECTED_SPAN_6])
    shifts = sorted(tuple(s) for s in closure.coset_shifts)
    third = Fraction(1, 3)
    assert len(shifts) == 3
    assert (0,) * 8 in [tuple(s) for s in closure.coset_shifts]
    nonzero = [s for s in closure.coset_shifts if any(s)]
    for s in nonzero:
        assert [i for i, v in enumerate(s) if v] == [6]
        assert s[6] in (third, 2 * third)


def test_closure_independent_is_seven_dimensional():
    system = WeylSystem.from_generators(2, [(SQRT2, 0), (0, Irrational("sqrt3"))])
    closure = closure_subspaces(INH, system)
    assert closure.dim == 7 and len(closure.coset_shifts) == 1
    full7 = [list(v) for v in EXPECTED_SPAN_6] + [[0, 0, 0, 0, 0, 0, 1, 0]]
    assert rl.same_row_space([list(v) for v in closure.subspace_basis], full7)


def test_closure_homogeneous_single_coset():
    closure = closure_subspaces(HOM, STD2)
    assert closure.dim == 7 and len(closure.coset_shifts) == 1
    assert closure.annihilator() == [(1, -2, 1, 0, 0, 0, 0, 0)]


def test_closure_contains_complexity_blocks():
    # for complexity s' at index i, the block {0}^i x (levels > s') x {0}
    # sits inside the closure span of the standard system
    closure = closure_subspaces(HOM, STD2)
    span = [list(v) for v in closure.subspace_basis]
    ncomp = 4

    def ambient_unit(level, comp):
        v = [0] * 8
        v[(level - 1) * ncomp + comp] = 1
        return v

    # index 3 has complexity 0: both levels of its block are inside
    assert rl.in_row_space(ambient_unit(1, 3), span)
    assert rl.in_row_space(ambient_unit(2, 3), span)
    # index 0 has complexity 1: level 2 inside, level 1 outside
    assert rl.in_row_space(ambient_unit(2, 0), span)
    assert not rl.in_row_space(ambient_unit(1, 0), span)


def test_closure_rejects_reused_symbol_in_generator():
    with pytest.raises(ValueError):
        bad = WeylSystem.from_generators(
            2, [(SQRT2, Irrational("sqrt2", Fraction(1, 2))), (0, Irrational("sqrt3"))])
        closure_subspaces(INH, bad)


def test_dependency_aliases():
    plain = WeylSystem.from_generators(
        2, [(SQRT2, 0), (0, Irrational("sqrt2", Fraction(1, 3)))])
    aliased = WeylSystem.from_generators(
        2, [(SQRT2, 0), (0, Irrational("sqrt3"))])
    via_dep = closure_subspaces(INH, aliased,
                                deps=[("sqrt3", "sqrt2", Fraction(1, 3))])
    direct = closure_subspaces(INH, plain)
    assert rl.same_row_space([list(v) for v in via_dep.subspace_basis],
                             [list(v) for v in direct.subspace_basis])
    assert len(via_dep.coset_shifts) == len(direct.coset_shifts)


def test_equidistribution_classification_and_constants():
    closure = closure_subspaces(HOM, STD2)
    table = equidistribution_test(STD2, HOM, closure, 250, radius=1,
                                  extra_characters=[(1, -2, 1, 0, 0, 0, 0, 0)])
    ap_row = next(r for r in table.rows
                  if r.frequencies == (1, -2, 1, 0, 0, 0, 0, 0))
    assert ap_row.kind == "constant"
    assert abs(ap_row.magnitude - 1.0) < 1e-9
    for row in table.rows:
        if row.kind == "generic":
            assert row.magnitude < 0.9


def test_equidistribution_threads_deterministic():
    closure = closure_subspaces(HOM, STD2)
    t1 = equidistribution_test(STD2, HOM, closure, 120, radius=1)
    t2 = equidistribution_test(STD2, HOM, closure, 120, radius=1, threads=2)
    assert [(r.frequencies, r.magnitude) for r in t1.rows] == \
        [(r.frequencies, r.magnitude) for r in t2.rows]


def test_coset_confinement_small():
    system = WeylSystem.from_generators(
        2, [(SQRT2, 0), (0, Irrational("sqrt2", Fraction(1, 3)))])
    closure = closure_subspaces(INH, system)
    assert coset_confinement(system, INH, closure, 250) < 1e-9
    # independent case: the lone annihilating phase vanishes identically
    ind = WeylSystem.from_generators(2, [(SQRT2, 0), (0, Irrational("sqrt3"))])
    cl2 = closure_subspaces(INH, ind)
    assert coset_confinement(ind, INH, cl2, 250) < 1e-9


def test_torus_distance_wraparound():
    assert abs(torus_distance((0.99,), (0.01,)) - 0.02) < 1e-12
    assert torus_distance((0.25, 0.5), (0.25, 0.5)) == 0.0


def test_trivial_character_row_is_exactly_one():
    closure = closure_subspaces(HOM, STD2)
    table = equidistribution_test(STD2, HOM, closure, 60, radius=1,
                                  extra_characters=[(0,) * 8])
    zero_row = next(r for r in table.rows if not any(r.frequencies))
    assert zero_row.kind == "constant"
    assert abs(zero_row.magnitude - 1.0) < 1e-12


def test_character_average_matches_direct_orbit_evaluation():
    # the tail-table + ladder route against literal pointwise evaluation,
    # on a generator-form system with a nontrivial base point
    system = WeylSystem.from_generators(
        2, [(SQRT2, 0), (0, Irrational("sqrt2", Fraction(1, 3)))],
        base=(Irrational("sqrt5"), Fraction(1, 7)))
    n = 40
    tails = weyl._orbit_tail_tables(system, INH, n)
    cx = weyl._binom_columns(n, 2)
    freqs = (2, -1, 0, 3, 1, 0, -2, 1)
    fast = weyl.character_average(tails, cx, freqs, 4)
    total = 0j
    for x in range(n):
        for y in range(n):
            phase = 0.0
            for c, p in enumerate(INH.all_polys()):
                pt = orbit_point(system, x + int(p(y)))
                for l in (0, 1):
                    f = freqs[l * 4 + c]
                    if f:
                        phase += f * (pt[l] / weyl._SCALE)
            total += np.exp(2j * np.pi * phase)
    assert abs(fast - total / n ** 2) < 1e-9


def test_confinement_rejects_false_closure():
    ind = WeylSystem.from_generators(2, [(SQRT2, 0), (0, Irrational("sqrt3"))])
    true_closure = closure_subspaces(INH, ind)
    lie = weyl.AffineClosure(
        offset=true_closure.offset,
        subspace_basis=true_closure.subspace_basis[:-1],
        coset_shifts=(tuple(Fraction(0) for _ in range(8)),),
        ambient_dim=8, order=2, components=4, dependencies=())
    assert coset_confinement(ind, INH, true_closure, 150) < 1e-9
    assert coset_confinement(ind, INH, lie, 150) > 0.05
