"""Relation spaces and complexity classification of polynomial progressions.

A progression (x, x+P_1(y), ..., x+P_t(y)) of distinct nonzero integral
polynomials satisfies algebraic relations: tuples (Q_0, ..., Q_t) with
Q_0(x) + Q_1(x+P_1(y)) + ... + Q_t(x+P_t(y)) identically zero.  This module
computes, with exact rational arithmetic throughout:

  * a basis of all relations up to a degree cap (relation_space),
  * per-index algebraic complexity (largest degree a relation forces at a
    slot) with a stabilization flag for the cap heuristic,
  * the graded layers: for each degree k, the span of the shifted binomial
    monomials C(x+P_i(y), k), the part shared with the other degrees, and
    representatives of the quotient,
  * homogeneity (no relation mixes degrees, equivalently the shared parts
    are trivial) with an explicit witness when it fails,
  * the coefficient spaces in Q^{t+1} with the decomposition pairs tying
    layer bases to coefficient vectors,
  * stability of all of the above under affine reparametrizations
    y -> (r(y-1)+j) (eligibility up to a finite r bound).

Degree caps: relation degrees are provably finite but no effective bound is
available in general, so every answer carries the cap it was computed at
and a `stabilized` flag (same result at cap and cap+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import ratlinalg as rl
from .polycore import (
    BiPoly,
    UniPoly,
    binom_of_shift,
    binomial_compose,
    binomial_poly,
    bipoly_to_binomial_grid,
    compose_shift,
    from_binomial_basis,
    is_integral,
    poly_text,
    substitute_affine,
    to_binomial_basis,
)


@dataclass(frozen=True)
class Progression:
    """The tuple (x, x+P_1(y), ..., x+P_t(y)); P_0 = 0 is implicit."""

    polys: tuple

    def __post_init__(self):
        ps = tuple(self.polys)
        object.__setattr__(self, "polys", ps)
        if not ps:
            raise ValueError("progression needs at least one polynomial")
        seen = set()
        for p in ps:
            if p.is_zero:
                raise ValueError("progression polynomials must be nonzero")
            if not is_integral(p):
                raise ValueError(f"not integral: {poly_text(p)}")
            if p in seen:
                raise ValueError(f"duplicate term: x + {poly_text(p)}")
            seen.add(p)

    @property
    def t(self):
        return len(self.polys)

    def all_polys(self):
        """P_0 = 0 followed by P_1..P_t."""
        return (UniPoly.zero(),) + self.polys

    def max_degree(self):
        return max(int(p.degree) for p in self.polys)

    def default_cap(self):
        """Heuristic relation-degree cap: max(t-1, max deg + t)."""
        return max(self.t - 1, self.max_degree() + self.t)

    def text(self):
        return ", ".join(["x"] + [f"x + {poly_text(p)}" for p in self.polys])

    def __repr__(self):
        return f"Progression({self.text()!r})"


def progression(*polys):
    """Convenience constructor from coefficient sequences or UniPoly."""
    ps = [p if isinstance(p, UniPoly) else UniPoly(p) for p in polys]
    return Progression(tuple(ps))


@dataclass(frozen=True)
class Relation:
    """(Q_0, ..., Q_t) with sum Q_i(x + P_i(y)) = 0; constants normalized
    to zero (forced once Q_i(0) = 0 for i >= 1, since all P_i(0) = 0)."""

    qs: tuple

    @property
    def degree_profile(self):
        return tuple(q.degree for q in self.qs)

    @property
    def is_zero(self):
        return all(q.is_zero for q in self.qs)

    def expand(self, prog: Progression):
        acc = BiPoly.zero()
        for q, p in zip(self.qs, prog.all_polys()):
            acc = acc + compose_shift(q, p)
        return acc

    def holds_for(self, prog: Progression):
        return self.expand(prog).is_zero

    def text(self):
        return "(" + ", ".join(poly_text(q, var="u") for q in self.qs) + ")"


@dataclass(frozen=True)
class RelationSpace:
    basis: tuple
    degree_cap: int
    stabilized: bool

    @property
    def dim(self):
        return len(self.basis)

    def max_degree_at(self, i):
        """Largest deg Q_i over the space (attained on the basis); 0 if the
        index never participates."""
        degs = [r.qs[i].degree for r in self.basis if not r.qs[i].is_zero]
        return max((int(d) for d in degs), default=0)


# ---------------------------------------------------------------------------
# Shifted-binomial expansions over the C(x,a)C(y,b) grid

@lru_cache(maxsize=256)
def _expansions(prog: Progression, cap: int):
    """For each index i and degree k <= cap, the monomial coordinates
    {(a, b): coeff of x^a y^b} of C(x + P_i(y), k).

    Computed once per (progression, cap) by the Vandermonde convolution
    C(x + P, k) = sum_j C(x, k-j) C(P, j); the monomial grid is what makes
    the canonical layer bases come out in the expected small form (x, y,
    y^3, ... rather than binomial recombinations)."""
    table = {}
    for i, p in enumerate(prog.all_polys()):
        comp = {0: UniPoly((1,))}
        for j in range(1, cap + 1):
            comp[j] = binomial_compose(p, j)
        for k in range(1, cap + 1):
            grid = {}
            for j in range(0, k + 1):
                xpart = binomial_poly(k - j)
                for a, ca in enumerate(xpart.coeffs):
                    if not ca:
                        continue
                    for b, cb in enumerate(comp[j].coeffs):
                        if cb:
                            key = (a, b)
                            grid[key] = grid.get(key, Fraction(0)) + ca * cb
            table[(i, k)] = {key: v for key, v in grid.items() if v}
    return table


def _grid_columns(grids):
    cols = set()
    for g in grids:
        cols.update(g.keys())
    return sorted(cols, key=lambda ab: (ab[0] + ab[1], ab[1], ab[0]))


def _rows_over_columns(grids, columns):
    index = {c: j for j, c in enumerate(columns)}
    rows = []
    for g in grids:
        row = [0] * len(columns)
        for key, v in g.items():
            row[index[key]] = int(v) if isinstance(v, int) else v
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Relation space

def relation_space(prog: Progression, cap: int) -> RelationSpace:
    """Basis of all relations with component degrees <= cap.

    Unknowns are the binomial coordinates b_{ik} (no constant terms, which
    kills the trivial constants-summing-to-zero kernel); the linear system
    says every grid coordinate of sum_i Q_i(x+P_i(y)) vanishes."""
    if cap < 1:
        raise ValueError("relation cap must be >= 1")
    basis = _relation_vectors(prog, cap)
    basis_next = _relation_vectors(prog, cap + 1)
    space = RelationSpace(
        basis=tuple(_relation_from_vector(prog, cap, v) for v in basis),
        degree_cap=cap,
        stabilized=(len(basis_next) == len(basis)),
    )
    for rel in space.basis:
        if not rel.holds_for(prog):
            raise AssertionError("relation basis element fails exact expansion")
    return space


@lru_cache(maxsize=512)
def _relation_vectors(prog: Progression, cap: int):
    table = _expansions(prog, cap)
    unknowns = [(i, k) for i in range(prog.t + 1) for k in range(1, cap + 1)]
    grids = [table[u] for u in unknowns]
    columns = _grid_columns(grids)
    if not columns:
        return tuple()
    index = {c: j for j, c in enumerate(columns)}
    # Equation matrix: one row per grid cell, one column per unknown.
    rows = [[0] * len(unknowns) for _ in columns]
    for uj, g in enumerate(grids):
        for key, v in g.items():
            rows[index[key]][uj] = v
    kernel = rl.kernel_basis(rows, ncols=len(unknowns))
    return tuple(tuple(v) for v in kernel)


def _relation_from_vector(prog: Progression, cap: int, vec):
    qs = []
    for i in range(prog.t + 1):
        bs = (Fraction(0),) + tuple(vec[i * cap + (k - 1)] for k in range(1, cap + 1))
        qs.append(from_binomial_basis(bs))
    return Relation(qs=tuple(qs))


def homogeneous_relations(prog: Progression, k: int):
    """Basis of {a in Q^{t+1} : sum_i a_i (x + P_i(y))^k = 0} (monomial
    form; the binomial form gives the same space and is cross-checked in
    tests)."""
    if k < 1:
        raise ValueError("degree must be >= 1")
    grids = []
    for p in prog.all_polys():
        power = compose_shift(UniPoly.monomial(k), p)
        grids.append(dict(power.terms))
    columns = sorted({c for g in grids for c in g},
                     key=lambda ab: (ab[0] + ab[1], ab[1], ab[0]))
    index = {c: j for j, c in enumerate(columns)}
    rows = [[Fraction(0)] * (prog.t + 1) for _ in columns]
    for i, g in enumerate(grids):
        for key, v in g.items():
            rows[index[key]][i] = v
    return [tuple(v) for v in rl.kernel_basis(rows, ncols=prog.t + 1)]


def homogeneous_relation_dims(prog: Progression, cap: int):
    return [len(homogeneous_relations(prog, k)) for k in range(1, cap + 1)]


# ---------------------------------------------------------------------------
# Complexity

def _profile_from_vectors(vectors, t, cap):
    prof = []
    for i in range(t + 1):
        best = 0
        for v in vectors:
            for k in range(cap, 0, -1):
                if v[i * cap + (k - 1)]:
                    best = max(best, k)
                    break
        prof.append(best)
    return tuple(prof)


def complexity_profile(prog: Progression, cap: int | None = None):
    """(s_0, ..., s_t) and a stabilization flag (same profile at cap+1)."""
    if cap is None:
        cap = prog.default_cap()
    prof = _profile_from_vectors(_relation_vectors(prog, cap), prog.t, cap)
    prof_next = _profile_from_vectors(_relation_vectors(prog, cap + 1), prog.t, cap + 1)
    return prof, prof == prof_next


def algebraic_complexity(prog: Progression, i: int, cap: int | None = None):
    """Largest deg Q_i over relations of degree <= cap, with stabilization."""
    if not 0 <= i <= prog.t:
        raise IndexError(f"index {i} out of range 0..{prog.t}")
    prof, stab = complexity_profile(prog, cap)
    return prof[i], stab


class VandermondeViolation(AssertionError):
    def __init__(self, prog, profile, witness):
        self.profile = profile
        self.witness = witness
        super().__init__(
            f"complexity bound t-1 violated for {prog.text()}: profile {profile}; "
            f"witness relation {witness.text() if witness else 'n/a'}"
        )


def vandermonde_bound_check(prog: Progression, cap: int | None = None):
    """For homogeneous progressions, max_i complexity <= t-1.

    The bound is forced by the invertibility of Vandermonde matrices, so a
    violation indicates an implementation bug; it is reported with the
    witness relation."""
    homog, _ = is_homogeneous(prog, cap)
    if not homog:
        raise ValueError("bound check requires a homogeneous progression")
    if cap is None:
        cap = prog.default_cap()
    prof, _ = complexity_profile(prog, cap)
    if max(prof) <= prog.t - 1:
        return True
    space = relation_space(prog, cap)
    witness = next((r for r in space.basis
                    if any(int(q.degree) > prog.t - 1 for q in r.qs if not q.is_zero)),
                   None)
    raise VandermondeViolation(prog, prof, witness)


# ---------------------------------------------------------------------------
# Graded layers

@dataclass(frozen=True)
class DegreeLayer:
    """Degree-k data: basis of the layer span, the part shared with other
    degrees, and quotient representatives (shared + proper spans the layer)."""

    k: int
    basis: tuple          # BiPoly, canonical integral basis of the layer
    shared: tuple         # BiPoly, basis of (layer ∩ sum of other layers)
    proper: tuple         # BiPoly, representatives completing shared

    @property
    def dim(self):
        return len(self.basis)

    @property
    def proper_dim(self):
        return len(self.proper)


@dataclass(frozen=True)
class GradedSpaces:
    layers: tuple
    cap: int

    def layer(self, k):
        return self.layers[k - 1]

    def shared_total(self):
        """All shared polynomials across degrees (spanning set)."""
        return [w for layer in self.layers for w in layer.shared]


def graded_spaces(prog: Progression, k_max: int, cap: int | None = None) -> GradedSpaces:
    if cap is None:
        cap = max(prog.default_cap(), k_max)
    if k_max < 1 or cap < k_max:
        raise ValueError("need 1 <= k_max <= cap")
    table = _expansions(prog, cap)
    all_grids = {k: [table[(i, k)] for i in range(prog.t + 1)] for k in range(1, cap + 1)}
    columns = _grid_columns([g for gs in all_grids.values() for g in gs])
    rows_by_k = {k: _rows_over_columns(all_grids[k], columns) for k in range(1, cap + 1)}
    layers = []
    for k in range(1, k_max + 1):
        basis_rows = rl.canonical_basis(rows_by_k[k])
        other = [row for j in range(1, cap + 1) if j != k for row in rows_by_k[j]]
        other_basis = rl.canonical_basis(other)
        shared_rows = rl.intersect_row_spaces(basis_rows, other_basis) if other_basis else []
        proper_rows = rl.extend_basis(shared_rows, basis_rows)
        layers.append(DegreeLayer(
            k=k,
            basis=tuple(_row_to_bipoly(r, columns) for r in basis_rows),
            shared=tuple(_row_to_bipoly(r, columns) for r in shared_rows),
            proper=tuple(_row_to_bipoly(r, columns) for r in proper_rows),
        ))
        if len(shared_rows) + len(proper_rows) != len(basis_rows):
            raise AssertionError("layer dimensions inconsistent")
    return GradedSpaces(layers=tuple(layers), cap=cap)


def _row_to_bipoly(row, columns):
    return BiPoly({col: v for col, v in zip(columns, row) if v})


# ---------------------------------------------------------------------------
# Homogeneity

@dataclass(frozen=True)
class InhomogeneityWitness:
    k: int
    shared_poly: BiPoly
    relation: Relation


def is_homogeneous(prog: Progression, cap: int | None = None):
    """True iff every degree layer is disjoint from the span of the others
    (shared parts trivial) for k <= cap.

    Decision by dimension comparison: the relation space equals the span of
    the single-degree relations exactly in the homogeneous case, and the two
    computations share no code path.  On failure the witness carries a
    nonzero shared polynomial and a reconstructed degree-mixing relation.
    """
    if cap is None:
        cap = prog.default_cap()
    decision = _homogeneous_decision(prog, cap)
    if decision:
        return True, None
    # Slow path: locate a nonzero shared element and rebuild a relation.
    graded = graded_spaces(prog, k_max=cap, cap=cap)
    for layer in graded.layers:
        if layer.shared:
            witness = _witness_from_shared(prog, cap, layer.k, layer.shared[0])
            return False, witness
    raise AssertionError("dimension test and layer intersection disagree")


@lru_cache(maxsize=512)
def _homogeneous_decision(prog: Progression, cap: int):
    space_dim = len(_relation_vectors(prog, cap))
    homog_dim = sum(homogeneous_relation_dims(prog, cap))
    if space_dim < homog_dim:
        raise AssertionError("homogeneous relations must embed in the relation space")
    return space_dim == homog_dim


def homogeneity_report(prog: Progression, cap: int | None = None):
    if cap is None:
        cap = prog.default_cap()
    homog, witness = is_homogeneous(prog, cap)
    stab = _homogeneous_decision(prog, cap) == _homogeneous_decision(prog, cap + 1)
    return {"homogeneous": homog, "cap": cap, "stabilized": stab, "witness": witness}


def _witness_from_shared(prog: Progression, cap: int, k: int, shared_poly: BiPoly):
    """Rebuild a degree-mixing relation from a nonzero shared polynomial:
    express it inside the degree-k layer and inside the other layers, then
    subtract."""
    table = _expansions(prog, cap)
    grids_k = [table[(i, k)] for i in range(prog.t + 1)]
    other_keys = [(i, j) for j in range(1, cap + 1) if j != k for i in range(prog.t + 1)]
    grids_other = [table[key] for key in other_keys]
    columns = _grid_columns(grids_k + grids_other)
    target = [shared_poly.terms.get(c, Fraction(0)) for c in columns]
    in_k = rl.coordinates_in_rows(target, _rows_over_columns(grids_k, columns))
    in_other = rl.coordinates_in_rows(target, _rows_over_columns(grids_other, columns))
    if in_k is None or in_other is None:
        raise AssertionError("shared polynomial must lie in both spans")
    qs = [UniPoly.zero()] * (prog.t + 1)
    for i, b in enumerate(in_k):
        if b:
            qs[i] = qs[i] + binomial_poly(k).scale(b)
    for (i, j), c in zip(other_keys, in_other):
        if c:
            qs[i] = qs[i] - binomial_poly(j).scale(c)
    rel = Relation(qs=tuple(qs))
    if not rel.holds_for(prog):
        raise AssertionError("reconstructed witness relation fails expansion")
    return InhomogeneityWitness(k=k, shared_poly=shared_poly, relation=rel)


# ---------------------------------------------------------------------------
# Coefficient spaces and decomposition pairs

@dataclass(frozen=True)
class CoeffSpace:
    """Span in Q^{t+1} of the coefficient tuples (C(x,k), ..., C(x+P_t,k))
    sweeps out, together with the exact decomposition of that tuple over a
    layer basis."""

    k: int
    basis: tuple          # vectors in Q^{t+1} (the decomposition vectors)
    decomposition: tuple  # (BiPoly layer basis element, vector) pairs

    @property
    def dim(self):
        return len(self.basis)


def coeff_space(prog: Progression, k: int, cap: int | None = None) -> CoeffSpace:
    if k < 1:
        raise ValueError("degree must be >= 1")
    if cap is None:
        cap = max(prog.default_cap(), k)
    table = _expansions(prog, cap)
    grids = [table[(i, k)] for i in range(prog.t + 1)]
    columns = _grid_columns(grids)
    comp_rows = _rows_over_columns(grids, columns)
    basis_rows = rl.canonical_basis(comp_rows)
    # Components over the layer basis; columns of the coordinate matrix are
    # the decomposition vectors.
    coord_matrix = []
    for row in comp_rows:
        coords = rl.coordinates_in_rows(row, basis_rows)
        if coords is None:
            raise AssertionError("layer component must lie in the layer span")
        coord_matrix.append(coords)
    vectors = [tuple(coord_matrix[i][j] for i in range(prog.t + 1))
               for j in range(len(basis_rows))]
    if rl.rank([list(v) for v in vectors], ncols=prog.t + 1) != len(basis_rows):
        raise AssertionError("decomposition vectors must be independent")
    _verify_coeff_space_definitions(prog, k, vectors)
    pairs = tuple((_row_to_bipoly(r, columns), v) for r, v in zip(basis_rows, vectors))
    return CoeffSpace(k=k, basis=tuple(vectors), decomposition=pairs)


def _verify_coeff_space_definitions(prog, k, vectors):
    """The four equivalent descriptions (power/binomial, single degree /
    degrees up to k) must give the same span."""
    span = [list(v) for v in vectors]
    for rows in (_power_coeff_rows(prog, k, k), _power_coeff_rows(prog, 1, k),
                 _binom_coeff_rows(prog, 1, k)):
        if not rl.same_row_space(rows, span):
            raise AssertionError("equivalent coefficient-space definitions disagree")


def _power_coeff_rows(prog, k_min, k_max):
    rows = []
    for k in range(k_min, k_max + 1):
        grids = [dict(compose_shift(UniPoly.monomial(k), p).terms)
                 for p in prog.all_polys()]
        columns = sorted({c for g in grids for c in g})
        for col in columns:
            rows.append([g.get(col, Fraction(0)) for g in grids])
    return rows


def _binom_coeff_rows(prog, k_min, k_max):
    rows = []
    for k in range(k_min, k_max + 1):
        grids = [bipoly_to_binomial_grid(binom_of_shift(p, k)) for p in prog.all_polys()]
        columns = sorted({c for g in grids for c in g})
        for col in columns:
            rows.append([g.get(col, Fraction(0)) for g in grids])
    return rows


# ---------------------------------------------------------------------------
# Eligibility under affine reparametrization

def reparametrized_family(prog: Progression, r: int, j: int) -> Progression:
    """The progression built from (P_i(r(y-1)+j) - P_i(j)) / r, normalized
    to an integral progression.

    Normalization: constant terms are dropped and a common denominator is
    scaled away.  Both steps preserve homogeneity and the complexity profile
    (constant shifts substitute into the relation polynomials; a common
    integer scaling u -> L u reparametrizes x exactly)."""
    subs = [substitute_affine(p, r, j) for p in prog.polys]
    subs = [q - UniPoly([q(0)]) for q in subs]
    den = 1
    for q in subs:
        for b in to_binomial_basis(q):
            den = den * b.denominator // gcd(den, b.denominator)
    return Progression(tuple(q.scale(den) for q in subs))


@dataclass(frozen=True)
class EligibilityReport:
    eligible: bool
    r_max: int
    cap: int
    failure: tuple | None = None   # (r, j, reason)
    checked: int = 0


def is_eligible(prog: Progression, r_max: int = 6, cap: int | None = None):
    """Homogeneity and complexity profile stable under all reparametrizations
    y -> r(y-1)+j with r <= r_max; certifies up to r_max only."""
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    homog, _ = is_homogeneous(prog, cap)
    if not homog:
        raise ValueError("eligibility is defined for homogeneous progressions")
    base_profile, _ = complexity_profile(prog, cap)
    checked = 0
    for r in range(1, r_max + 1):
        for j in range(r):
            fam = reparametrized_family(prog, r, j)
            sub_homog, _ = is_homogeneous(fam, cap)
            if not sub_homog:
                return EligibilityReport(False, r_max, cap or prog.default_cap(),
                                         (r, j, "inhomogeneous"), checked)
            prof, _ = complexity_profile(fam, cap)
            if prof != base_profile:
                return EligibilityReport(False, r_max, cap or prog.default_cap(),
                                         (r, j, f"profile {prof} != {base_profile}"),
                                         checked)
            checked += 1
    return EligibilityReport(True, r_max, cap or prog.default_cap(), None, checked)


# ---------------------------------------------------------------------------
# Aggregate report

def complexity_report(prog: Progression, cap: int | None = None,
                      eligibility_r_max: int = 4):
    """One serializable document with everything the classification knows."""
    if cap is None:
        cap = prog.default_cap()
    space = relation_space(prog, cap)
    prof, prof_stable = complexity_profile(prog, cap)
    homog = homogeneity_report(prog, cap)
    k_report = min(cap, max(2, max(prof) + 1))
    graded = graded_spaces(prog, k_max=k_report, cap=cap)
    from .polycore import bipoly_text
    report = {
        "schema": "polyprog-report/1",
        "progression": prog.text(),
        "t": prog.t,
        "cap": cap,
        "homogeneous": homog["homogeneous"],
        "homogeneity_stabilized": homog["stabilized"],
        "complexity": list(prof),
        "complexity_stabilized": prof_stable,
        "relation_space_dim": space.dim,
        "relation_basis": [r.text() for r in space.basis],
        "layer_dims": {str(layer.k): layer.dim for layer in graded.layers},
        "proper_dims": {str(layer.k): layer.proper_dim for layer in graded.layers},
        "shared_dims": {str(layer.k): len(layer.shared) for layer in graded.layers},
        "shared_polys": [bipoly_text(w) for layer in graded.layers for w in layer.shared],
        "coeff_space_dims": {str(k): coeff_space(prog, k, cap).dim
                             for k in range(1, k_report + 1)},
    }
    if homog["witness"] is not None:
        report["inhomogeneity_witness"] = {
            "k": homog["witness"].k,
            "shared_poly": bipoly_text(homog["witness"].shared_poly),
            "relation": homog["witness"].relation.text(),
        }
    if homog["homogeneous"]:
        elig = is_eligible(prog, r_max=eligibility_r_max, cap=cap)
        report[f"eligible_upto_{eligibility_r_max}"] = elig.eligible
    return report
