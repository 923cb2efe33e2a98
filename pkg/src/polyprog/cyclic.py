"""Finitary engine on Z/NZ: uniformity norms, pattern counting, and the
comparison of polynomial configurations against their linear models.

Everything here is double-precision numerics over exact integer shift
tables; the linear algebra that justifies the comparisons (complexity
checks, integral bases) is delegated to the exact `progression` module.
Summation error is kept below 1e-9 relative by compensated accumulation,
which is all the stated tolerances need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlinalg as rl
from .polycore import UniPoly, from_binomial_basis, poly_text, to_binomial_basis
from .progression import Progression, Relation, complexity_profile, relation_space

TWO_PI = 2.0 * np.pi


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass
class Signal:
    """A complex-valued function on Z/NZ."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("signal must be a nonempty vector")

    @property
    def modulus(self):
        return self.values.size

    def one_bounded(self, tol=1e-12):
        return bool(np.max(np.abs(self.values)) <= 1.0 + tol)

    def assert_one_bounded(self, tol=1e-12):
        if not self.one_bounded(tol):
            raise ValueError("signal exceeds the unit bound")

    @classmethod
    def ones(cls, n):
        return cls(np.ones(n))

    @classmethod
    def from_subset(cls, mask):
        return cls(np.asarray(mask, dtype=np.float64))

    @classmethod
    def character(cls, n, xi):
        x = np.arange(n)
        return cls(np.exp(TWO_PI * 1j * (xi * x % n) / n))

    @classmethod
    def quadratic_phase(cls, n):
        x = np.arange(n)
        return cls(np.exp(TWO_PI * 1j * (x * x % n) / n))


def bernoulli_subset(n, density, seed):
    rng = np.random.default_rng(seed)
    return rng.random(n) < density


def read_subset(path, n):
    mask = np.zeros(n, dtype=bool)
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                mask[int(line) % n] = True
    return mask


def poly_shift_table(p: UniPoly, n: int):
    """P(y) mod n for y = 0..n-1, via exact integer evaluation."""
    out = np.empty(n, dtype=np.int64)
    for y in range(n):
        val = Fraction(0)
        for k in reversed(range(len(p.coeffs))):
            val = val * y + p.coeffs[k]
        if val.denominator != 1:
            raise ValueError("shift polynomial must be integer valued")
        out[y] = val.numerator % n
    return out


# ---------------------------------------------------------------------------
# Gowers uniformity norms

def gowers_norm(f: Signal, s: int) -> float:
    """The degree-s uniformity norm, by the multiplicative-derivative
    recursion; the s = 1 base is |mean|."""
    if s < 1:
        raise ValueError("norm degree must be >= 1")
    power = _gowers_power(f.values, s)
    return max(power, 0.0) ** (1.0 / (1 << s))


def _gowers_power(vals, s):
    """||f||_{U^s}^{2^s}.  The s = 2 case averages |autocorrelation|^2 over
    shifts (FFT-accelerated; still the recursion, not the Fourier identity)."""
    n = vals.size
    if s == 1:
        m = vals.mean()
        return float(m.real * m.real + m.imag * m.imag)
    if s == 2:
        fhat = np.fft.fft(vals)
        corr = np.fft.ifft(fhat * np.conj(fhat)) / n  # corr[h] = E_x f(x+h) conj f(x)
        return float(np.mean(np.abs(corr) ** 2))
    parts = []
    for h in range(n):
        delta = np.roll(vals, -h) * np.conj(vals)
        parts.append(_gowers_power(delta, s - 1))
    return math.fsum(parts) / n


def gowers_norm_u2_fourier(f: Signal) -> float:
    """Independent route for the degree-2 norm: fourth moment of the
    Fourier coefficients."""
    fhat = np.fft.fft(f.values) / f.modulus
    return float(np.sum(np.abs(fhat) ** 4)) ** 0.25


def gowers_norms_upto(f: Signal, s_max: int):
    return [gowers_norm(f, s) for s in range(1, s_max + 1)]


# ---------------------------------------------------------------------------
# Counting operators

def count_operator(signals, prog: Progression) -> complex:
    """E_{x,y} f_0(x) f_1(x+P_1(y)) ... f_t(x+P_t(y)), shifts exact mod N."""
    if len(signals) != prog.t + 1:
        raise ValueError(f"need {prog.t + 1} signals, got {len(signals)}")
    n = signals[0].modulus
    if any(f.modulus != n for f in signals):
        raise ValueError("signals must share a modulus")
    tables = [poly_shift_table(p, n) for p in prog.polys]
    f0 = signals[0].values
    partials = []
    for y in range(n):
        prod = f0.copy()
        for f, tab in zip(signals[1:], tables):
            prod *= np.roll(f.values, -int(tab[y]))
        partials.append(prod.sum())
    total = math.fsum(p.real for p in partials) + 1j * math.fsum(p.imag for p in partials)
    return total / n ** 2


class BudgetExceeded(RuntimeError):
    pass


def linear_count_operator(signals, coeffs, d: int, budget: int = 2 ** 31) -> complex:
    """E_{x, y_1..y_d} prod_i f_i(x + sum_j a_ij y_j); direct summation.

    `coeffs` is the (t+1) x d integer matrix of the linear forms (row 0 is
    normally zero).  Cost is N^{d+1} evaluations; the budget guard refuses
    blowups rather than silently running for hours."""
    if d < 1:
        raise ValueError("need at least one linear variable")
    n = signals[0].modulus
    if any(f.modulus != n for f in signals):
        raise ValueError("signals must share a modulus")
    if n ** (d + 1) > budget:
        raise BudgetExceeded(f"N^(d+1) = {n ** (d + 1)} exceeds budget {budget}")
    coeffs = [[int(a) % n for a in row] for row in coeffs]
    if len(coeffs) != len(signals):
        raise ValueError("one coefficient row per signal")
    vals = [f.values for f in signals]
    if d == 1:
        partials = []
        for y in range(n):
            prod = vals[0] if coeffs[0][0] == 0 else np.roll(vals[0], -(coeffs[0][0] * y) % n)
            for i in range(1, len(vals)):
                prod = prod * np.roll(vals[i], -(coeffs[i][0] * y) % n)
            partials.append(prod.sum())
        total = math.fsum(p.real for p in partials) + 1j * math.fsum(p.imag for p in partials)
        return total / n ** 2
    # General d: python loop over the first d-1 variables, the last variable
    # and x vectorized as a 2D gather.
    import itertools
    x = np.arange(n)
    yd = np.arange(n)
    partials = []
    for head in itertools.product(range(n), repeat=d - 1):
        prod = None
        for row, f in zip(coeffs, vals):
            base = sum(a * y for a, y in zip(row[:-1], head)) % n
            shift = (base + row[-1] * yd) % n           # shape (n,)
            idx = (x[None, :] + shift[:, None]) % n     # (yd, x)
            term = f[idx]
            prod = term if prod is None else prod * term
        partials.append(prod.sum())
    total = math.fsum(p.real for p in partials) + 1j * math.fsum(p.imag for p in partials)
    return total / n ** (d + 1)


# ---------------------------------------------------------------------------
# Polynomial count vs. linear model

@dataclass
class CountReport:
    poly_count: complex
    linear_count: complex
    n: int
    d: int
    basis: list
    coeffs: list

    @property
    def difference(self):
        return abs(self.poly_count - self.linear_count)

    def to_json(self):
        return {
            "schema": "polyprog-count/1",
            "N": self.n,
            "poly_count": [self.poly_count.real, self.poly_count.imag],
            "linear_count": [self.linear_count.real, self.linear_count.imag],
            "difference": self.difference,
            "d": self.d,
            "basis": self.basis,
            "coeffs": self.coeffs,
        }


class ComplexityTooHigh(ValueError):
    def __init__(self, profile, witness):
        self.profile = profile
        self.witness = witness
        super().__init__(
            f"count comparison needs complexity <= 1 at every index; profile {profile}"
            + (f"; witness relation {witness.text()}" if witness else ""))


def integral_span_basis(prog: Progression):
    """Basis Q_1..Q_d of the group of integer combinations of the P_i, as
    the Hermite form of their binomial coordinate rows; the decomposition
    coefficients are integers by construction."""
    width = max(len(to_binomial_basis(p)) for p in prog.polys)
    rows = []
    for p in prog.polys:
        bs = to_binomial_basis(p)
        rows.append([int(b) for b in bs] + [0] * (width - len(bs)))
    lattice = rl.hnf_rows(rows)
    basis = [from_binomial_basis([Fraction(v) for v in row]) for row in lattice]
    coeffs = []
    for row in rows:
        combo = rl.solve_integer_combination(row, lattice)
        if combo is None:
            raise AssertionError("every P_i must decompose over the lattice basis")
        coeffs.append(combo)
    return basis, coeffs


def compare_poly_vs_linear(mask, prog: Progression, cap=None,
                           budget: int = 2 ** 31) -> CountReport:
    """Count the progression pattern in A and in its linear model.

    Requires complexity <= 1 at every index (rejected with the witness
    relation otherwise) and prime N."""
    n = len(mask)
    if not is_prime(n):
        raise ValueError("modulus must be prime")
    profile, _ = complexity_profile(prog, cap)
    if max(profile) > 1:
        space = relation_space(prog, cap or prog.default_cap())
        witness = next((r for r in space.basis
                        if any(int(q.degree) > 1 for q in r.qs if not q.is_zero)), None)
        raise ComplexityTooHigh(profile, witness)
    basis, coeffs = integral_span_basis(prog)
    d = len(basis)
    f = Signal.from_subset(mask)
    signals = [f] * (prog.t + 1)
    poly = count_operator(signals, prog)
    linear = linear_count_operator(signals, [[0] * d] + coeffs, d, budget=budget)
    return CountReport(poly_count=poly, linear_count=linear, n=n, d=d,
                       basis=[poly_text(q) for q in basis], coeffs=coeffs)


# ---------------------------------------------------------------------------
# Popular common differences

@dataclass
class PopDiffReport:
    alpha: float
    epsilon: float
    n: int
    tuple_len: int
    qualifying: np.ndarray
    counts: np.ndarray

    @property
    def fraction(self):
        return float(len(self.qualifying)) / self.n

    @property
    def threshold(self):
        return (self.alpha ** self.tuple_len - self.epsilon) * self.n

    def to_json(self):
        return {
            "schema": "polyprog-popdiff/1",
            "N": self.n,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "qualifying_count": int(len(self.qualifying)),
            "fraction": self.fraction,
            "threshold": self.threshold,
            "qualifying": [int(v) for v in self.qualifying],
        }


def popular_differences(mask, prog: Progression, epsilon: float) -> PopDiffReport:
    """For each n, the size of A ∩ (A+P_1(n)) ∩ ... ∩ (A+P_t(n)) by direct
    intersection; qualifying n beat the random-set benchmark strictly."""
    n = len(mask)
    chi = np.asarray(mask, dtype=np.int64)
    alpha = float(chi.mean())
    tables = [poly_shift_table(p, n) for p in prog.polys]
    counts = np.empty(n, dtype=np.int64)
    for shift_idx in range(n):
        inter = chi
        for tab in tables:
            inter = inter * np.roll(chi, int(tab[shift_idx]))
        counts[shift_idx] = inter.sum()
    report = PopDiffReport(alpha=alpha, epsilon=epsilon, n=n,
                           tuple_len=prog.t + 1,
                           qualifying=np.empty(0, dtype=np.int64), counts=counts)
    report.qualifying = np.nonzero(counts > report.threshold)[0]
    return report


# ---------------------------------------------------------------------------
# Structured obstructions from relations

def build_obstruction(prog: Progression, rel: Relation, n: int, m: int):
    """Phase signals f_i(u) = e(m (L Q_i(u) mod N) / N) from a relation.

    L clears the binomial-coordinate denominators so L*Q_i is integer
    valued; the relation identity makes the product over the progression
    exactly 1 pointwise, while each f_i with deg Q_i = k >= 1 is a
    degree-k phase: uniform at degree k, trivial at degree k+1."""
    if not is_prime(n):
        raise ValueError("modulus must be prime")
    if m % n == 0:
        raise ValueError("phase multiplier must be nonzero mod N")
    if not rel.holds_for(prog):
        raise ValueError("relation does not hold for the progression")
    lcm = 1
    for q in rel.qs:
        for b in to_binomial_basis(q):
            lcm = lcm * b.denominator // math.gcd(lcm, b.denominator)
    if math.gcd(lcm, n) != 1:
        raise ValueError(f"denominator lcm {lcm} shares a factor with N = {n}")
    max_deg = max((int(q.degree) for q in rel.qs if not q.is_zero), default=0)
    if max_deg >= n:
        raise ValueError("relation degree must be below N")
    signals = []
    for q in rel.qs:
        scaled = q.scale(lcm)
        phases = np.empty(n, dtype=np.float64)
        for u in range(n):
            v = scaled(u)
            assert v.denominator == 1
            phases[u] = (m * (v.numerator % n)) % n
        signals.append(Signal(np.exp(TWO_PI * 1j * phases / n)))
    return signals


def best_obstruction_relation(prog: Progression, i: int, cap=None):
    """A relation maximizing deg Q_i, or None if the index is free."""
    space = relation_space(prog, cap or prog.default_cap())
    best, best_deg = None, 0
    for rel in space.basis:
        if not rel.qs[i].is_zero and int(rel.qs[i].degree) > best_deg:
            best, best_deg = rel, int(rel.qs[i].degree)
    return best


def true_complexity_probe(prog: Progression, i: int, s: int, trials: int,
                          n: int, seed: int):
    """Diagnostic table pairing ||f_i||_{U^{s+1}} against |count| with the
    other slots held at structured worst cases.

    Rows: random sign signals in slot i, the all-zero signal, and (when the
    progression carries a relation at slot i) the structured phase signal
    that keeps the count at 1 despite a small norm."""
    rng = np.random.default_rng(seed)
    rel = best_obstruction_relation(prog, i)
    if rel is not None:
        structured = build_obstruction(prog, rel, n, 1)
    else:
        structured = [Signal.ones(n) for _ in range(prog.t + 1)]
    rows = []
    for trial in range(trials):
        f_i = Signal(rng.choice([-1.0, 1.0], size=n).astype(np.complex128))
        signals = list(structured)
        signals[i] = f_i
        rows.append({
            "kind": "random_signs",
            "trial": trial,
            "norm": gowers_norm(f_i, s + 1),
            "count": abs(count_operator(signals, prog)),
        })
    zero = list(structured)
    zero[i] = Signal(np.zeros(n))
    rows.append({"kind": "zero", "trial": None, "norm": 0.0,
                 "count": abs(count_operator(zero, prog))})
    if rel is not None:
        k = int(rel.qs[i].degree)
        rows.append({
            "kind": "structured",
            "trial": None,
            "norm": gowers_norm(structured[i], max(k, 1)),
            "count": abs(count_operator(structured, prog)),
        })
    return rows
