"""Prime fields and dense bounded-degree multivariate polynomials.

Polynomials are stored densely: a fixed graded-lexicographic list of all
exponent vectors of total degree <= d, and one int64 coefficient per
monomial.  At the parameter scales this package targets (q <= 13ish,
up to 8 variables, d in the low tens) the monomial count stays in the
tens of thousands, which keeps evaluation branch-free and lets the hot
loops run through the kernels in ``_accel``.

Uniform sampling of such a polynomial is the randomness source for the
random edge-colouring construction, and the empirical vanishing
probability of a random polynomial on a fixed point set is exactly
q**-m whenever d >= m - 1 (the evaluation map on degree-<=d polynomials
is linear and surjective onto the m point values).
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

from . import _accel
from .errors import (
    BudgetExceededError,
    DegenerateInputError,
    DimensionMismatchError,
    InvalidFieldError,
    ParameterError,
)
from .rng import rng_for

DEFAULT_MONOMIAL_BUDGET = 200_000


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (moduli here are tiny)."""
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


class PrimeField:
    """The field of integers mod q, q prime.  Elements are plain ints in [0, q)."""

    def __init__(self, q: int):
        if not is_prime(q):
            raise InvalidFieldError(f"modulus {q} is not prime")
        self.q = int(q)

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))


@lru_cache(maxsize=None)
def monomial_exponents(nvars: int, degree_bound: int) -> np.ndarray:
    """All exponent vectors with total degree <= degree_bound, graded-lex order.

    Returned array has shape (comb(nvars + d, d), nvars) and is read-only;
    it is the shared monomial index for every polynomial with these
    parameters.
    """
    if nvars < 1:
        raise ParameterError("nvars must be >= 1")
    if degree_bound < 0:
        raise ParameterError("degree bound must be >= 0")

    def gen(k: int, budget: int):
        if k == 0:
            yield ()
            return
        for e in range(budget + 1):
            for rest in gen(k - 1, budget - e):
                yield (e,) + rest

    rows = sorted(gen(nvars, degree_bound), key=lambda t: (sum(t), t))
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), nvars)
    arr.setflags(write=False)
    return arr


def monomial_count(nvars: int, degree_bound: int) -> int:
    return comb(nvars + degree_bound, degree_bound)


class MultiPoly:
    """Dense multivariate polynomial over F_q with total degree <= degree_bound."""

    def __init__(self, q: int, nvars: int, degree_bound: int, coeffs: np.ndarray):
        if not is_prime(q):
            raise InvalidFieldError(f"modulus {q} is not prime")
        exps = monomial_exponents(nvars, degree_bound)
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.shape != (exps.shape[0],):
            raise DimensionMismatchError(
                f"expected {exps.shape[0]} coefficients, got {coeffs.shape}")
        if coeffs.min(initial=0) < 0 or coeffs.max(initial=0) >= q:
            coeffs = coeffs % q
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        self.q = q
        self.nvars = nvars
        self.degree_bound = degree_bound
        self.coeffs = coeffs

    @property
    def exponents(self) -> np.ndarray:
        return monomial_exponents(self.nvars, self.degree_bound)

    @classmethod
    def zero(cls, q: int, nvars: int, degree_bound: int) -> "MultiPoly":
        n = monomial_count(nvars, degree_bound)
        return cls(q, nvars, degree_bound, np.zeros(n, dtype=np.int64))

    @classmethod
    def from_coeff_map(cls, q: int, nvars: int, degree_bound: int,
                       coeff_map: dict) -> "MultiPoly":
        """Build from {exponent tuple: value}; absent monomials are zero."""
        exps = monomial_exponents(nvars, degree_bound)
        index = {tuple(int(e) for e in row): i for i, row in enumerate(exps)}
        coeffs = np.zeros(exps.shape[0], dtype=np.int64)
        for exp, val in coeff_map.items():
            key = tuple(int(e) for e in exp)
            if key not in index:
                raise DimensionMismatchError(
                    f"exponent {key} outside degree bound {degree_bound} "
                    f"on {nvars} variables")
            coeffs[index[key]] = int(val) % q
        return cls(q, nvars, degree_bound, coeffs)

    def coeff_map(self) -> dict:
        """Nonzero coefficients as {exponent tuple: value}."""
        exps = self.exponents
        nz = np.nonzero(self.coeffs)[0]
        return {tuple(int(e) for e in exps[i]): int(self.coeffs[i]) for i in nz}

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultiPoly)
                and (self.q, self.nvars, self.degree_bound)
                == (other.q, other.nvars, other.degree_bound)
                and np.array_equal(self.coeffs, other.coeffs))

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if (self.q, self.nvars, self.degree_bound) != (
                other.q, other.nvars, other.degree_bound):
            raise DimensionMismatchError("polynomial parameter mismatch in addition")
        return MultiPoly(self.q, self.nvars, self.degree_bound,
                         (self.coeffs + other.coeffs) % self.q)

    def evaluate(self, point) -> int:
        """Value at a single point (entries reduced mod q)."""
        pt = [int(x) for x in point]
        if len(pt) != self.nvars:
            raise DimensionMismatchError(
                f"point has {len(pt)} entries, polynomial has {self.nvars} variables")
        arr = np.array([pt], dtype=np.int64) % self.q
        return int(_accel.poly_eval_batch(self.exponents, self.coeffs, arr, self.q)[0])

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        """Values at each row of ``points`` (shape (npts, nvars))."""
        points = np.asarray(points, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.nvars:
            raise DimensionMismatchError(
                f"points must have shape (npts, {self.nvars}), got {points.shape}")
        return _accel.poly_eval_batch(self.exponents, self.coeffs,
                                      points % self.q, self.q)

    def to_dict(self) -> dict:
        """JSON form: {q, nvars, d, coeffs: [[exponent vector, value], ...]}."""
        return {
            "q": self.q,
            "nvars": self.nvars,
            "d": self.degree_bound,
            "coeffs": [[list(exp), val] for exp, val in sorted(self.coeff_map().items())],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MultiPoly":
        cmap = {tuple(exp): val for exp, val in data["coeffs"]}
        return cls.from_coeff_map(data["q"], data["nvars"], data["d"], cmap)


class VectorPoly:
    """An ordered tuple of polynomials sharing (q, nvars, degree bound)."""

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ParameterError("VectorPoly needs at least one component")
        sig = (components[0].q, components[0].nvars, components[0].degree_bound)
        for p in components[1:]:
            if (p.q, p.nvars, p.degree_bound) != sig:
                raise DimensionMismatchError(
                    "VectorPoly components disagree on (q, nvars, d)")
        self.components = components
        self.q, self.nvars, self.degree_bound = sig

    def __len__(self) -> int:
        return len(self.components)

    def evaluate(self, point):
        return tuple(p.evaluate(point) for p in self.components)

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        """Shape (npts, len(self)) array of component values."""
        return np.stack([p.evaluate_batch(points) for p in self.components], axis=1)

    def to_dict(self) -> dict:
        return {"components": [p.to_dict() for p in self.components]}

    @classmethod
    def from_dict(cls, data: dict) -> "VectorPoly":
        return cls(MultiPoly.from_dict(d) for d in data["components"])


def sample_poly(field: PrimeField, nvars: int, d: int, rng_seed: int, *,
                monomial_budget: int = DEFAULT_MONOMIAL_BUDGET) -> MultiPoly:
    """Uniformly random polynomial of total degree <= d in ``nvars`` variables.

    Every dense coefficient is drawn independently and uniformly from
    [0, q).  Deterministic given ``rng_seed``.
    """
    if nvars < 1:
        raise ParameterError("nvars must be >= 1")
    if d < 0:
        raise ParameterError("degree bound must be >= 0")
    n = monomial_count(nvars, d)
    if n > monomial_budget:
        raise BudgetExceededError(
            f"dense polynomial would need {n} monomials "
            f"(budget {monomial_budget}); lower d or raise the budget")
    rng = rng_for(rng_seed, "poly")
    coeffs = rng.integers(0, field.q, size=n, dtype=np.int64)
    return MultiPoly(field.q, nvars, d, coeffs)


def sample_vector_poly(field: PrimeField, nvars: int, d: int, count: int,
                       rng_seed: int, *,
                       monomial_budget: int = DEFAULT_MONOMIAL_BUDGET) -> VectorPoly:
    """``count`` independent uniform polynomials, sub-seeded per component."""
    if count < 1:
        raise ParameterError("component count must be >= 1")
    from .rng import subseed
    return VectorPoly(
        sample_poly(field, nvars, d, subseed(rng_seed, "component", i),
                    monomial_budget=monomial_budget)
        for i in range(count))


def _monomial_value_matrix(exps: np.ndarray, points: np.ndarray, q: int) -> np.ndarray:
    """V[k, j] = value of monomial k at point j, shape (nmono, m)."""
    nmono, nvars = exps.shape
    m = points.shape[0]
    dmax = int(exps.max(initial=0))
    pw = np.empty((m, nvars, dmax + 1), dtype=np.int64)
    pw[:, :, 0] = 1 % q
    for e in range(1, dmax + 1):
        pw[:, :, e] = pw[:, :, e - 1] * points % q
    vals = np.ones((m, nmono), dtype=np.int64)
    for v in range(nvars):
        vals = vals * pw[:, v, :][:, exps[:, v]] % q
    return vals.T.copy()


def vanishing_probability_trial(field: PrimeField, points, d: int, trials: int,
                                rng_seed: int, *,
                                monomial_budget: int = DEFAULT_MONOMIAL_BUDGET) -> float:
    """Fraction of ``trials`` random degree-<=d polynomials vanishing on all points.

    The exact probability is q**-m for m distinct points once d >= m - 1,
    so the returned estimate should sit within Monte Carlo error of that.
    Raises DegenerateInputError when points repeat or d < m - 1.
    """
    pts = [tuple(int(x) for x in p) for p in points]
    if not pts:
        raise DegenerateInputError("need at least one point")
    m = len(pts)
    nvars = len(pts[0])
    if nvars < 1 or any(len(p) != nvars for p in pts):
        raise DegenerateInputError("points must be nonempty vectors of equal length")
    if len(set(pts)) != m:
        raise DegenerateInputError("points must be pairwise distinct")
    if d < m - 1:
        raise DegenerateInputError(f"degree bound {d} < m - 1 = {m - 1}")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    q = field.q
    nmono = monomial_count(nvars, d)
    if nmono > monomial_budget:
        raise BudgetExceededError(
            f"dense polynomial would need {nmono} monomials (budget {monomial_budget})")
    exps = monomial_exponents(nvars, d)
    mono_values = _monomial_value_matrix(exps, np.array(pts, dtype=np.int64) % q, q)
    rng = rng_for(rng_seed, "vanishing")
    hits = 0
    chunk = max(1, min(trials, 4_000_000 // max(1, nmono)))
    done = 0
    while done < trials:
        batch = min(chunk, trials - done)
        rows = rng.integers(0, q, size=(batch, nmono), dtype=np.int64)
        hits += _accel.count_vanishing(rows, mono_values, q)
        done += batch
    return hits / trials


def default_degree(r: int, b: int, *, nvars: int | None = None,
                   monomial_budget: int = DEFAULT_MONOMIAL_BUDGET) -> int:
    """Default degree knob for the colouring construction.

    Starts at 2*r*b**2 + b + 1 and walks down until the dense monomial
    count fits the budget (never below 1).
    """
    if nvars is None:
        nvars = 2 * b
    d = 2 * r * b * b + b + 1
    while d > 1 and monomial_count(nvars, d) > monomial_budget:
        d -= 1
    return d
