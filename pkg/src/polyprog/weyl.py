"""Torus systems driven by unipotent affine maps, and orbit-closure checks.

The order-s standard system rotates T^s by T(a_1,...,a_s) = (a_1 + a_0,
a_2 + a_1, ..., a_s + a_{s-1}) with an irrational a_0; iterating gives the
closed form T^n a with binomial-coefficient weights, so orbits are integer
binomial combinations of a handful of real generators.  Everything numeric
rides on 256-bit fixed-point integers: frac(m * alpha) is an exact integer
multiply and mask, so orbit coordinates at heights ~1e13 still carry ~1e-60
absolute error, far below every tolerance used here.

Irrational inputs come from a small symbolic catalog (sqrt2, sqrt3, sqrt5,
golden, e) plus exact rational offsets.  Rational dependence between
coefficients is *declared* through shared symbols (e.g. sqrt2 + 1/3), never
detected numerically; the closure of an orbit changes discontinuously with
such dependencies, so detection would be meaningless at fixed precision.
Do not mix `sqrt5` and `golden` in one system: the catalog treats distinct
symbols as rationally independent and that pair is not.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlinalg as rl
from .polycore import BiPoly, bipoly_to_binomial_grid, to_binomial_basis
from .progression import Progression, Relation, graded_spaces, _expansions, \
    _grid_columns, _rows_over_columns

FRAC_BITS = 256
_SCALE = 1 << FRAC_BITS
TWO_PI = 2.0 * np.pi


def _fp_sqrt(n: int) -> int:
    return math.isqrt(n << (2 * FRAC_BITS))


def _fp_e() -> int:
    # sum 1/k! to k = 60: error < 1/60! ~ 2^-270, below one fixed-point ulp.
    acc = Fraction(0)
    term = Fraction(1)
    for k in range(1, 61):
        term /= k
        acc += term
    # fractional part of e = e - 2
    acc -= 1
    return (acc.numerator << FRAC_BITS) // acc.denominator


_CATALOG = {
    "sqrt2": _fp_sqrt(2),
    "sqrt3": _fp_sqrt(3),
    "sqrt5": _fp_sqrt(5),
    "golden": ((1 << FRAC_BITS) + _fp_sqrt(5)) >> 1,
    "e": _fp_e() + (2 << FRAC_BITS),
}


@dataclass(frozen=True)
class Irrational:
    """A catalog irrational plus an exact rational offset.

    The symbol is the declaration of rational (in)dependence: two values
    sharing a symbol differ by an exact rational, values with distinct
    symbols are treated as rationally independent."""

    symbol: str
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        if self.symbol not in _CATALOG:
            raise ValueError(f"unknown irrational symbol {self.symbol!r}; "
                             f"catalog: {sorted(_CATALOG)}")
        object.__setattr__(self, "offset", Fraction(self.offset))

    @property
    def fp(self) -> int:
        off = self.offset
        return _CATALOG[self.symbol] + (off.numerator * _SCALE) // off.denominator

    def __float__(self):
        return self.fp / _SCALE

    def text(self):
        if self.offset == 0:
            return self.symbol
        sign = "+" if self.offset > 0 else "-"
        return f"{self.symbol} {sign} {abs(self.offset)}"


def _coeff_fp(value) -> int:
    if isinstance(value, Irrational):
        return value.fp
    f = Fraction(value)
    return (f.numerator * _SCALE) // f.denominator


def binom_int(n: int, k: int) -> int:
    """C(n, k) for any integer n (falling factorial; exact division)."""
    if k < 0:
        return 0
    num = 1
    for i in range(k):
        num *= (n - i)
    return num // math.factorial(k)


@dataclass(frozen=True)
class WeylSystem:
    """A torus T^order with a polynomial orbit n -> base + sum_i gens_i C(n,i).

    `standard` builds the affine-map orbit (gens_i read off the rotation
    and base point); `from_generators` accepts arbitrary per-degree
    generator vectors (entries: Irrational, Fraction, or 0), each gens_i
    supported on levels >= i.
    """

    order: int
    rotation: Irrational
    base: tuple
    gens: tuple   # gens[i-1][l-1] for degree i, level l

    @classmethod
    def standard(cls, order: int, rotation: Irrational, base: tuple):
        if order < 1:
            raise ValueError("order must be >= 1")
        base = tuple(base)
        if len(base) != order:
            raise ValueError(f"base point needs {order} coordinates")
        levels = list(base)
        gens = []
        for i in range(1, order + 1):
            # degree-i generator: (a_{1-i}, ..., a_{s-i}) with a_0 the
            # rotation and negative indices zero.
            vec = []
            for l in range(1, order + 1):
                idx = l - i
                if idx < 0:
                    vec.append(Fraction(0))
                elif idx == 0:
                    vec.append(rotation)
                else:
                    vec.append(levels[idx - 1])
            gens.append(tuple(vec))
        return cls(order=order, rotation=rotation, base=base, gens=tuple(gens))

    @classmethod
    def from_generators(cls, order: int, gens, base=None):
        if base is None:
            base = tuple(Fraction(0) for _ in range(order))
        base = tuple(base)
        gens = tuple(tuple(v) for v in gens)
        if len(gens) != order or any(len(v) != order for v in gens):
            raise ValueError("need order generator vectors of length order")
        for i, vec in enumerate(gens, start=1):
            for l, entry in enumerate(vec, start=1):
                if l < i and _coeff_fp(entry) != 0:
                    raise ValueError(f"generator {i} must vanish on level {l}")
        rot = next((v for v in gens[0] if isinstance(v, Irrational)), None)
        if rot is None:
            raise ValueError("the degree-1 generator needs an irrational entry")
        return cls(order=order, rotation=rot, base=base, gens=gens)

    def base_fp(self):
        return tuple(_coeff_fp(b) % _SCALE for b in self.base)

    def gens_fp(self):
        return tuple(tuple(_coeff_fp(v) for v in vec) for vec in self.gens)


def orbit_point(w: WeylSystem, n: int):
    """The torus point at time n, as fixed-point coordinates mod 1."""
    gens = w.gens_fp()
    out = []
    for l in range(w.order):
        acc = _coeff_fp(w.base[l])
        for i in range(1, w.order + 1):
            g = gens[i - 1][l]
            if g:
                acc += binom_int(n, i) * g
        out.append(acc % _SCALE)
    return tuple(out)


def orbit_point_floats(w: WeylSystem, n: int):
    return tuple(v / _SCALE for v in orbit_point(w, n))


def orbit_lift(w: WeylSystem, n: int):
    """Unreduced fixed-point coordinates (no mod 1); exact integers."""
    gens = w.gens_fp()
    out = []
    for l in range(w.order):
        acc = _coeff_fp(w.base[l])
        for i in range(1, w.order + 1):
            g = gens[i - 1][l]
            if g:
                acc += binom_int(n, i) * g
        out.append(acc)
    return tuple(out)


def step(w: WeylSystem, point_fp):
    """One application of the standard affine map, exact in fixed point."""
    rot = w.rotation.fp
    out = []
    prev = rot
    for l in range(w.order):
        out.append((point_fp[l] + prev) % _SCALE)
        prev = point_fp[l]
    return tuple(out)


def torus_distance(p, q):
    """Max over coordinates of the wraparound distance (floats in [0,1))."""
    d = 0.0
    for a, b in zip(p, q):
        delta = abs(a - b) % 1.0
        d = max(d, min(delta, 1.0 - delta))
    return d


# ---------------------------------------------------------------------------
# Characters and factors

@dataclass(frozen=True)
class TorusCharacter:
    frequencies: tuple

    def __post_init__(self):
        object.__setattr__(self, "frequencies",
                           tuple(int(f) for f in self.frequencies))

    @property
    def is_trivial(self):
        return not any(self.frequencies)

    def phase_fp(self, point_fp):
        acc = 0
        for f, v in zip(self.frequencies, point_fp):
            if f:
                acc += f * v
        return acc % _SCALE

    def evaluate(self, point_fp):
        return complex(np.exp(TWO_PI * 1j * (self.phase_fp(point_fp) / _SCALE)))


def factor_projection(char: TorusCharacter, k: int):
    """Projection of a character onto the depth-k factor (functions of the
    first k coordinates): the character itself if its frequencies beyond
    coordinate k vanish, otherwise zero."""
    if not 0 <= k <= len(char.frequencies):
        raise ValueError("factor depth out of range")
    retained = all(f == 0 for f in char.frequencies[k:])
    return (char if retained else None)


# ---------------------------------------------------------------------------
# Multiple averages along a progression

def multiple_average(w: WeylSystem, chars, prog: Progression, n_samples: int,
                     two_parameter: bool = True):
    """E over the sample window of prod_i chi_i at the progression times.

    Two-parameter form (default): E_{m,n<N} prod_i chi_i(orbit(m + P_i(n))).
    Single-parameter: E_{n<N} prod_i chi_i(orbit(P_i(n))).
    """
    chars = list(chars)
    if len(chars) != prog.t + 1:
        raise ValueError(f"need {prog.t + 1} characters")
    if any(len(c.frequencies) != w.order for c in chars):
        raise ValueError("characters must live on the single system")
    polys = prog.all_polys()
    if not two_parameter:
        acc = 0j
        for n in range(n_samples):
            term = 1.0 + 0j
            for char, p in zip(chars, polys):
                val = p(n)
                term *= char.evaluate(orbit_point(w, int(val)))
            acc += term
        return acc / n_samples
    # Split orbit(m + u) over C(m, kappa) tails so the m-average vectorizes.
    tails = _tail_tables(w, chars, polys, n_samples)
    m = np.arange(n_samples, dtype=np.float64)
    cm = np.ones((w.order + 1, n_samples))
    for kappa in range(1, w.order + 1):
        cm[kappa] = cm[kappa - 1] * (m - (kappa - 1)) / kappa
    phases = cm.T @ tails      # (m, n)
    return complex(np.exp(TWO_PI * 1j * phases).mean())


def _tail_tables(w: WeylSystem, chars, polys, n_samples):
    """B[kappa, n] = sum_{i,l} freq_{i,l} * tail_{kappa,l}(P_i(n)) mod 1,
    where tail_{kappa,l}(u) = sum_d C(u,d) gens_{d+kappa}[l] (gens_0 = base).
    Exact fixed point per entry, returned as floats."""
    gens = w.gens_fp()
    base = [_coeff_fp(b) for b in w.base]
    s = w.order
    out = np.zeros((s + 1, n_samples))
    for n in range(n_samples):
        acc = [0] * (s + 1)
        for char, p in zip(chars, polys):
            u = int(p(n))
            binoms = [binom_int(u, d) for d in range(s + 1)]
            for l in range(s):
                f = char.frequencies[l]
                if not f:
                    continue
                for kappa in range(s + 1):
                    tail = base[l] if kappa == 0 else 0
                    for d in range(s - kappa + 1):
                        gi = d + kappa
                        if 1 <= gi <= s and gens[gi - 1][l]:
                            tail += binoms[d] * gens[gi - 1][l]
                    acc[kappa] += f * tail
        for kappa in range(s + 1):
            out[kappa, n] = (acc[kappa] % _SCALE) / _SCALE
    return out


# ---------------------------------------------------------------------------
# Lower-bound witness from a relation

@dataclass
class WitnessRecord:
    characters: list          # per index: binomial coefficient rows b_{i,*}
    alpha: Irrational
    product_max_deviation: float
    samples: int
    projection_killed: list   # per index: True when the top coefficient is nonzero

    def to_json(self):
        return {
            "schema": "polyprog-witness/1",
            "alpha": self.alpha.text(),
            "max_product_deviation": self.product_max_deviation,
            "samples": self.samples,
            "projection_killed": self.projection_killed,
            "coefficient_rows": [[str(b) for b in row] for row in self.characters],
        }


def lower_bound_witness(prog: Progression, rel: Relation, alpha: Irrational,
                        w: WeylSystem, samples: int = 1000, seed: int = 20259):
    """Phase functions along the orbit whose product telescopes to 1.

    From a relation (Q_0,...,Q_t) with top degree equal to the system
    order, set f_k = e(alpha * (b_k . lift)) with b_k the binomial
    coefficients of Q_k.  The relation identity forces
    prod_k f_k(orbit lift at x + P_k(y)) = 1 pointwise exactly; each index
    whose top coefficient b_{k,s} is nonzero has zero conditional
    expectation on the depth-(s-1) factor (its last-coordinate frequency
    alpha * b_{k,s} is nonzero).
    """
    if not rel.holds_for(prog):
        raise ValueError("relation does not hold for the progression")
    s = w.order
    rows = []
    for q in rel.qs:
        bs = list(to_binomial_basis(q))
        if len(bs) > s + 1:
            raise ValueError(
                f"relation degree {len(bs) - 1} exceeds system order {s}")
        bs = bs + [Fraction(0)] * (s + 1 - len(bs))
        if bs[0] != 0:
            raise ValueError("relation components must vanish at 0")
        rows.append(bs[1:])
    polys = prog.all_polys()
    rng = np.random.default_rng(seed)
    alpha_fp = alpha.fp
    max_dev = 0.0
    for _ in range(samples):
        x = int(rng.integers(0, 10 ** 6))
        y = int(rng.integers(0, 10 ** 4))
        prod = 1.0 + 0j
        for row, p in zip(rows, polys):
            u = int(x + p(y))
            lift = orbit_lift(w, u)
            comb = Fraction(0)
            for b, coord in zip(row, lift):
                if b:
                    comb += b * coord
            phase_fp = (alpha_fp * comb.numerator) // (comb.denominator * _SCALE)
            prod *= np.exp(TWO_PI * 1j * ((phase_fp % _SCALE) / _SCALE))
        max_dev = max(max_dev, abs(prod - 1.0))
    killed = [row[s - 1] != 0 for row in rows]
    return WitnessRecord(characters=rows, alpha=alpha,
                         product_max_deviation=max_dev, samples=samples,
                         projection_killed=killed)


# ---------------------------------------------------------------------------
# Orbit closures

@dataclass
class AffineClosure:
    """offset + span(subspace_basis) translated by coset_shifts, inside
    T^(order * (t+1)); ambient coordinate (level l, component c) sits at
    index (l-1)*(t+1) + c."""

    offset: tuple             # fixed-point ambient point
    subspace_basis: tuple     # primitive integer/rational ambient vectors
    coset_shifts: tuple       # rational ambient vectors; first is zero
    ambient_dim: int
    order: int
    components: int
    dependencies: tuple       # textual record of the symbol declarations

    @property
    def dim(self):
        return len(self.subspace_basis)

    def offset_floats(self):
        return tuple(v / _SCALE for v in self.offset)

    def annihilator(self):
        """Basis of the saturated integer lattice orthogonal to the span."""
        if not self.subspace_basis:
            return [tuple(int(i == j) for j in range(self.ambient_dim))
                    for i in range(self.ambient_dim)]
        return rl.integer_annihilator([list(v) for v in self.subspace_basis])

    def to_json(self):
        return {
            "schema": "polyprog-closure/1",
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "cosets": len(self.coset_shifts),
            "basis": [[str(x) for x in v] for v in self.subspace_basis],
            "coset_shifts": [[str(x) for x in v] for v in self.coset_shifts],
            "dependencies": list(self.dependencies),
        }


def _ambient_index(level, comp, ncomp):
    return (level - 1) * ncomp + comp


class _SymbolicVector:
    """Ambient vector with entries sum_sym coeff * sym + rational."""

    def __init__(self, dim):
        self.sym = {}
        self.rat = [Fraction(0)] * dim

    def add(self, index, value, weight):
        if weight == 0:
            return
        if isinstance(value, Irrational):
            vec = self.sym.setdefault(value.symbol, [Fraction(0)] * len(self.rat))
            vec[index] += weight
            if value.offset:
                self.rat[index] += weight * value.offset
        else:
            f = Fraction(value)
            if f:
                self.rat[index] += weight * f


def closure_decomposition(prog: Progression, s: int, cap=None):
    """Per degree i <= s: (proper layer polys, their coefficient vectors),
    plus the cross-degree shared basis and its per-degree vectors.

    The shifted binomial tuple at degree i decomposes uniquely over
    [proper_i | shared]; independence is asserted."""
    if cap is None:
        cap = max(prog.default_cap(), s)
    graded = graded_spaces(prog, k_max=s, cap=cap)
    table = _expansions(prog, cap)
    all_grids = [table[(i, k)] for k in range(1, cap + 1) for i in range(prog.t + 1)]
    columns = _grid_columns(all_grids)

    def poly_row(bp):
        return [bp.terms.get(c, Fraction(0)) for c in columns]

    shared_rows = []
    for layer in graded.layers:
        shared_rows.extend(poly_row(w) for w in layer.shared)
    shared_basis_rows = rl.canonical_basis(shared_rows) if shared_rows else []
    shared_polys = [BiPoly({c: v for c, v in zip(columns, row) if v})
                    for row in shared_basis_rows]
    per_degree = {}
    shared_vectors = {}
    for i in range(1, s + 1):
        layer = graded.layer(i)
        proper_rows = [poly_row(q) for q in layer.proper]
        combined = proper_rows + [list(r) for r in shared_basis_rows]
        if combined and rl.rank([list(r) for r in combined]) != len(combined):
            raise AssertionError(
                "proper representatives and shared basis must be independent")
        comp_rows = _rows_over_columns(
            [table[(c, i)] for c in range(prog.t + 1)], columns)
        vmat, wmat = [], []
        for row in comp_rows:
            coords = rl.coordinates_in_rows(row, combined) if combined else None
            if coords is None:
                raise AssertionError("component must decompose over the layer")
            vmat.append(coords[:len(proper_rows)])
            wmat.append(coords[len(proper_rows):])
        vvecs = [tuple(vmat[c][j] for c in range(prog.t + 1))
                 for j in range(len(proper_rows))]
        wvecs = [tuple(wmat[c][j] for c in range(prog.t + 1))
                 for j in range(len(shared_basis_rows))]
        per_degree[i] = (tuple(layer.proper), tuple(vvecs))
        shared_vectors[i] = tuple(wvecs)
    return per_degree, (tuple(shared_polys), shared_vectors)


def _poly_content(bp: BiPoly) -> int:
    """gcd of the integer binomial-grid coordinates (1 for nonintegral)."""
    grid = bipoly_to_binomial_grid(bp)
    g = 0
    for v in grid.values():
        if v.denominator != 1:
            return 1
        g = math.gcd(g, abs(v.numerator))
    return max(g, 1)


def closure_subspaces(prog: Progression, w: WeylSystem, deps=None, cap=None):
    """The affine closure of the progression orbit tuple.

    The orbit splits into a sum of (integral polynomial) x (real ambient
    coefficient vector) terms.  Each coefficient vector is symbolic over
    the catalog atoms: its irrational components contribute full rational
    directions to the subspace, its rational component contributes a cyclic
    family of coset shifts (at most the declared denominator many).  For a
    homogeneous progression there is no shared part, every coefficient is
    purely irrational, and the closure is the full expected subgroup with a
    single coset.

    `deps` may list extra symbol declarations as (symbol, base_symbol,
    offset) aliases; shared symbols with rational offsets already encode
    the dependencies, so this is normally None.
    """
    s, t = w.order, prog.t
    ncomp = t + 1
    dim = s * ncomp
    alias = {}
    dep_records = []
    if deps:
        for name, base_sym, off in deps:
            alias[name] = (base_sym, Fraction(off))
            dep_records.append(f"{name} = {base_sym} + {Fraction(off)}")

    def resolve(value):
        if isinstance(value, Irrational) and value.symbol in alias:
            base_sym, off = alias[value.symbol]
            return Irrational(base_sym, value.offset + off)
        return value

    per_degree, (shared_polys, shared_vectors) = closure_decomposition(prog, s, cap)
    gens = [[resolve(v) for v in vec] for vec in w.gens]
    for vec in gens:
        syms = [v.symbol for v in vec if isinstance(v, Irrational)]
        if len(set(syms)) != len(syms):
            raise ValueError("a generator vector reuses a symbol; the closure "
                             "of its line would be smaller than computed")

    terms = []   # (polynomial, symbolic ambient coefficient)
    for i in range(1, s + 1):
        polys, vvecs = per_degree[i]
        for q, v in zip(polys, vvecs):
            coeff = _SymbolicVector(dim)
            for l in range(i, s + 1):
                entry = gens[i - 1][l - 1]
                for c in range(ncomp):
                    coeff.add(_ambient_index(l, c, ncomp), entry, v[c])
            terms.append((q, coeff))
    for j, r_poly in enumerate(shared_polys):
        coeff = _SymbolicVector(dim)
        for i in range(1, s + 1):
            wv = shared_vectors[i][j]
            for l in range(i, s + 1):
                entry = gens[i - 1][l - 1]
                for c in range(ncomp):
                    coeff.add(_ambient_index(l, c, ncomp), entry, wv[c])
        terms.append((r_poly, coeff))

    directions = []
    for _, coeff in terms:
        for vec in coeff.sym.values():
            if any(vec):
                directions.append(list(vec))
    basis = rl.canonical_basis(directions) if directions else []
    # Rational parts parallel to the subspace are absorbed by it (the
    # irrational sweep already covers them); only the residual mod the
    # span shifts cosets.
    span_rref, span_pivots = rl.rref(basis) if basis else ([], [])
    shift_gens = []
    for q, coeff in terms:
        if not any(coeff.rat):
            continue
        residual = _reduce_mod_span(coeff.rat, span_rref, span_pivots)
        if any(residual):
            content = _poly_content(q)
            shift_gens.append([content * v for v in residual])
    shifts = _shift_group(shift_gens, dim)
    base_fp = w.base_fp()
    offset = tuple(base_fp[l - 1] for l in range(1, s + 1) for _ in range(ncomp))
    for vec in w.gens:
        for entry in vec:
            if isinstance(entry, Irrational) and entry.offset:
                dep_records.append(f"{entry.symbol} offset {entry.offset}")
    return AffineClosure(offset=offset, subspace_basis=tuple(tuple(v) for v in basis),
                         coset_shifts=tuple(shifts), ambient_dim=dim, order=s,
                         components=ncomp, dependencies=tuple(dep_records))


def _reduce_mod_span(vec, span_rref, span_pivots):
    residual = [Fraction(v) for v in vec]
    for row, pc in zip(span_rref, span_pivots):
        if residual[pc]:
            f = residual[pc]
            residual = [a - f * b for a, b in zip(residual, row)]
    return residual


def _shift_group(shift_gens, dim, limit=10000):
    """All integer combinations of the generators mod 1 (finite group)."""
    zero = tuple(Fraction(0) for _ in range(dim))
    group = {zero}
    frontier = [zero]
    gens = [tuple(Fraction(v) % 1 for v in g) for g in shift_gens]
    while frontier:
        nxt = []
        for pt in frontier:
            for g in gens:
                cand = tuple((a + b) % 1 for a, b in zip(pt, g))
                if cand not in group:
                    group.add(cand)
                    nxt.append(cand)
                    if len(group) > limit:
                        raise RuntimeError("coset group too large")
        frontier = nxt
    ordered = sorted(group, key=lambda v: (v != zero, v))
    return ordered


# ---------------------------------------------------------------------------
# Discrepancy tables and confinement

@dataclass
class DiscrepancyRow:
    frequencies: tuple
    kind: str        # "constant" | "confined" | "generic"
    magnitude: float


@dataclass
class DiscrepancyTable:
    n: int
    radius: int
    rows: list

    def worst_generic(self):
        vals = [r.magnitude for r in self.rows if r.kind == "generic"]
        return max(vals) if vals else 0.0

    def constant_rows(self):
        return [r for r in self.rows if r.kind == "constant"]

    def to_json(self):
        return {
            "schema": "polyprog-discrepancy/1",
            "N": self.n,
            "radius": self.radius,
            "worst_generic": self.worst_generic(),
            "rows": [{"freq": list(r.frequencies), "kind": r.kind,
                      "magnitude": r.magnitude} for r in self.rows],
        }


def _orbit_tail_tables(w: WeylSystem, prog: Progression, n: int):
    """tails[kappa][l][c][y] = frac(tail_{kappa,l}(P_c(y))) as floats, where
    the coordinate of the orbit tuple splits as
    coord(l, c)(x, y) = sum_kappa C(x, kappa) * tail_{kappa,l}(P_c(y))."""
    s = w.order
    gens = w.gens_fp()
    base = [_coeff_fp(b) for b in w.base]
    polys = prog.all_polys()
    shift_vals = [[int(p(y)) for y in range(n)] for p in polys]
    tails = np.zeros((s + 1, s, len(polys), n))
    for c, vals in enumerate(shift_vals):
        for y in range(n):
            u = vals[y]
            binoms = [binom_int(u, d) for d in range(s + 1)]
            for kappa in range(s + 1):
                for l in range(s):
                    acc = base[l] if kappa == 0 else 0
                    for d in range(s - kappa + 1):
                        gi = d + kappa
                        if 1 <= gi <= s and gens[gi - 1][l]:
                            acc += binoms[d] * gens[gi - 1][l]
                    tails[kappa, l, c, y] = (acc % _SCALE) / _SCALE
    return tails


def _binom_columns(n, s):
    x = np.arange(n, dtype=np.float64)
    cx = np.ones((s + 1, n))
    for kappa in range(1, s + 1):
        cx[kappa] = cx[kappa - 1] * (x - (kappa - 1)) / kappa
    return cx


def character_average(tails, cx, freqs, ncomp):
    """E_{x,y} e(eta . orbit tuple) via the split phase
    sum_kappa C(x,kappa) * B_kappa(y).

    The x sum runs as a multiplicative difference ladder: with
    u_j(x) = e(sum_kappa C(x, kappa - j) B_kappa), the binomial recurrence
    gives u_j(x+1) = u_j(x) u_{j+1}(x), so each x step costs a few vector
    multiplies instead of a fresh 4M-point exponential.  Unit-modulus drift
    over the walk is ~n*eps, far below the thresholds in play."""
    s1, s, _, n = tails.shape
    b = np.zeros((s1, n))
    for l in range(s):
        for c in range(ncomp):
            f = freqs[l * ncomp + c]
            if f:
                b += f * tails[:, l, c, :]
    ladder = [np.exp(TWO_PI * 1j * b[j]) for j in range(s1)]
    acc = np.zeros(n, dtype=np.complex128)
    for _ in range(n):
        acc += ladder[0]
        for j in range(s1 - 1):
            ladder[j] = ladder[j] * ladder[j + 1]
    return complex(acc.sum() / (n * n))


def enumerate_characters(dim, radius):
    """Nonzero integer frequency vectors with L1 norm <= radius, first
    nonzero entry positive (sign dedup)."""
    out = []

    def rec(prefix, remaining):
        if len(prefix) == dim:
            if any(prefix):
                out.append(tuple(prefix))
            return
        for v in range(-remaining, remaining + 1):
            rec(prefix + [v], remaining - abs(v))

    rec([], radius)
    dedup = []
    for v in out:
        lead = next(x for x in v if x)
        if lead > 0:
            dedup.append(v)
    return dedup


def classify_character(freqs, closure: AffineClosure):
    if closure.subspace_basis:
        for vec in closure.subspace_basis:
            if sum(Fraction(f) * x for f, x in zip(freqs, vec)) != 0:
                return "generic"
    for shift in closure.coset_shifts:
        val = sum(Fraction(f) * x for f, x in zip(freqs, shift))
        if val.denominator != 1:
            return "confined"
    return "constant"


def equidistribution_test(w: WeylSystem, prog: Progression,
                          closure: AffineClosure, n: int, radius: int = 3,
                          extra_characters=(), threads: int = 1):
    """Character averages over the orbit tuple for x, y < n.

    Characters orthogonal to the closure (subspace and coset lattice) must
    track the offset with modulus ~1; characters orthogonal to the subspace
    only are reported as confined; everything else must decay.  Worker
    threads (numpy releases the GIL on the big exponentials) change nothing
    in the output: rows are merged in enumeration order.
    """
    tails = _orbit_tail_tables(w, prog, n)
    cx = _binom_columns(n, w.order)
    ncomp = closure.components
    freq_list = enumerate_characters(closure.ambient_dim, radius)
    for extra in extra_characters:
        extra = tuple(int(v) for v in extra)
        if extra not in freq_list:
            freq_list.append(extra)

    def one(freqs):
        avg = character_average(tails, cx, freqs, ncomp)
        return DiscrepancyRow(frequencies=tuple(freqs),
                              kind=classify_character(freqs, closure),
                              magnitude=abs(avg))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, freq_list))
    else:
        rows = [one(freqs) for freqs in freq_list]
    return DiscrepancyTable(n=n, radius=radius, rows=rows)


def coset_confinement(w: WeylSystem, prog: Progression,
                      closure: AffineClosure, n: int):
    """Largest Euclidean torus distance from an orbit tuple to the coset
    union, over all x, y < n.

    With A the annihilator basis matrix, the subgroup cut out by A is
    {v : A v in A Z^D}, and the distance from q to a coset is
    min |A^T (A A^T)^{-1} r| over residuals r = A(q - offset - shift) - z
    with z in the image lattice A Z^D.  Rounding is done over that image
    lattice (not blindly over Z^k), so the reported value is a true
    distance; coordinatewise rounding of lattice coefficients keeps it an
    upper bound, which is the safe direction for a confinement check.
    """
    ann = closure.annihilator()
    if not ann:
        return 0.0
    k = len(ann)
    a = np.array([[float(x) for x in row] for row in ann])
    gram_inv = np.linalg.inv(a @ a.T)
    # Image lattice A . Z^D, as HNF rows in Z^k.
    image = rl.hnf_rows([[row[j] for row in ann] for j in range(closure.ambient_dim)])
    if len(image) != k:
        raise AssertionError("annihilator image lattice must have full rank")
    h = np.array([[float(x) for x in row] for row in image])  # rows generate
    h_inv = np.linalg.inv(h.T)
    neighborhood = np.array(list(itertools.product((-1, 0, 1), repeat=k)))
    tails = _orbit_tail_tables(w, prog, n)
    cx = _binom_columns(n, w.order)
    ncomp = closure.components
    offset_f = np.array(closure.offset_floats())
    phases = np.stack([character_phases(tails, cx, row, ncomp) for row in ann])
    best = None
    for shift in closure.coset_shifts:
        target = np.array([
            float(sum(Fraction(f) * x for f, x in zip(row, shift)))
            + float(np.dot([float(f) for f in row], offset_f))
            for row in ann])
        resid = phases - target[:, None, None]          # (k, x, y)
        coeff = np.tensordot(h_inv, resid, axes=(1, 0))  # lattice coords
        base_round = np.round(coeff)
        dist = None
        for offs in neighborhood:
            z = np.tensordot(h.T, base_round + offs[:, None, None], axes=(1, 0))
            r = resid - z
            d = np.sqrt(np.einsum("kxy,kl,lxy->xy", r, gram_inv, r))
            dist = d if dist is None else np.minimum(dist, d)
        best = dist if best is None else np.minimum(best, dist)
    return float(best.max())


def character_phases(tails, cx, freqs, ncomp):
    """eta . orbit tuple as real phases (x, y), up to integers."""
    s1, s, _, n = tails.shape
    b = np.zeros((s1, n))
    for l in range(s):
        for c in range(ncomp):
            f = freqs[l * ncomp + c]
            if f:
                b += float(f) * tails[:, l, c, :]
    return cx.T @ b
