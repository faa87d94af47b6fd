"""Edge colourings of the complete graph K_n.

Three things live here:

* the random-polynomial colouring: identify [n] with vectors over F_q,
  point each edge {i, j} at the concatenated coordinates of its smaller
  and larger endpoint, and colour it with the tuple of values of 2a
  independent uniform polynomials (encoded as a single base-q integer);
* exact properness and boundedness checks (a colouring is C-bounded when
  every colour class has maximum degree <= C; proper means C = 1);
* properization of a C-bounded colouring: each colour class is a graph
  of maximum degree <= C, so fan recolouring with alternating-path flips
  edge-colours it with at most C + 1 indices, and the refined colour
  (original colour, index) is proper with palette at most (C+1) times
  the original.  The refinement never merges colours, so any structure
  that is monochromatic afterwards was monochromatic before.

Vertices are labelled 1..n everywhere, including the CSV format
(header ``u,v,colour``, one row per edge with u < v).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    FormatError,
    ParameterError,
    SizeError,
)
from .field_poly import (
    DEFAULT_MONOMIAL_BUDGET,
    PrimeField,
    VectorPoly,
    default_degree,
    sample_vector_poly,
)

DEFAULT_MAX_VERTICES = 1024


class EdgeColouring:
    """Total colour assignment on the edges of K_n, vertices 1..n."""

    def __init__(self, n: int, colour_of: dict):
        if n < 1:
            raise ParameterError("need at least one vertex")
        expected = n * (n - 1) // 2
        cleaned = {}
        for (u, v), col in colour_of.items():
            u, v = int(u), int(v)
            if not (1 <= u < v <= n):
                raise ParameterError(f"bad edge ({u}, {v}) for n={n}")
            cleaned[(u, v)] = col
        if len(cleaned) != expected:
            raise ParameterError(
                f"colouring must cover all {expected} edges, got {len(cleaned)}")
        self.n = n
        self._colour = cleaned
        self._cache = {}

    def colour(self, u: int, v: int):
        if u == v:
            raise ParameterError("no loops in K_n")
        return self._colour[(u, v) if u < v else (v, u)]

    @property
    def palette(self) -> frozenset:
        if "palette" not in self._cache:
            self._cache["palette"] = frozenset(self._colour.values())
        return self._cache["palette"]

    def edges(self):
        return self._colour.items()

    def classes(self) -> dict:
        if "classes" not in self._cache:
            out = {}
            for e, col in self._colour.items():
                out.setdefault(col, []).append(e)
            self._cache["classes"] = out
        return self._cache["classes"]

    def incident_by_colour(self) -> list:
        """For each vertex, a dict colour -> list of other endpoints.

        Index 0 is unused (vertices are 1-based).  This is the lookup
        structure the witness searches prune with.
        """
        if "incident" not in self._cache:
            inc = [dict() for _ in range(self.n + 1)]
            for (u, v), col in self._colour.items():
                inc[u].setdefault(col, []).append(v)
                inc[v].setdefault(col, []).append(u)
            self._cache["incident"] = inc
        return self._cache["incident"]

    def __eq__(self, other) -> bool:
        return (isinstance(other, EdgeColouring) and other.n == self.n
                and other._colour == self._colour)


def rainbow_colouring(n: int) -> EdgeColouring:
    """Every edge its own colour."""
    colour_of = {}
    idx = 0
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            colour_of[(u, v)] = idx
            idx += 1
    return EdgeColouring(n, colour_of)


def round_robin_colouring(n: int) -> EdgeColouring:
    """Proper (n-1)-colouring of K_n for even n via the circle method.

    Round r (0-based) pins vertex n and rotates the rest; the matching
    of round r gets colour r.
    """
    if n % 2 != 0 or n < 2:
        raise ParameterError("round-robin 1-factorization needs even n >= 2")
    colour_of = {}
    for r in range(n - 1):
        others = [(r + i) % (n - 1) + 1 for i in range(n - 1)]
        pairs = [(n, others[0])]
        for i in range(1, (n - 1 + 1) // 2):
            pairs.append((others[i], others[n - 1 - i]))
        for u, v in pairs:
            colour_of[(min(u, v), max(u, v))] = r
    return EdgeColouring(n, colour_of)


# ---------------------------------------------------------------------------
# random-polynomial construction
# ---------------------------------------------------------------------------

@dataclass
class ConstructionParams:
    """Knobs for the random colouring of K_{q**b} (or its first n vertices).

    ``tree_r`` enters only through the default degree bound
    2*r*b**2 + b + 1; it defaults to ``tree_b`` (the all-leaf star case).
    """
    tree_a: int
    tree_b: int
    q: int
    seed: int
    d: int | None = None
    n: int | None = None
    tree_r: int | None = None
    max_vertices: int = DEFAULT_MAX_VERTICES
    monomial_budget: int = DEFAULT_MONOMIAL_BUDGET

    def resolved(self) -> "ConstructionParams":
        if self.tree_a < 1 or self.tree_b < 1:
            raise ParameterError("tree_a and tree_b must be >= 1")
        field = PrimeField(self.q)  # raises InvalidFieldError on non-prime
        full = field.q ** self.tree_b
        n = full if self.n is None else int(self.n)
        if n > full:
            raise SizeError(f"n={n} exceeds q**b={full}")
        if n > self.max_vertices:
            raise SizeError(f"n={n} exceeds the size budget {self.max_vertices}")
        if n < 2:
            raise ParameterError("need at least two vertices")
        r = self.tree_b if self.tree_r is None else int(self.tree_r)
        d = self.d if self.d is not None else default_degree(
            r, self.tree_b, nvars=2 * self.tree_b,
            monomial_budget=self.monomial_budget)
        if d < 1:
            raise ParameterError("degree bound must be >= 1")
        return ConstructionParams(self.tree_a, self.tree_b, self.q, self.seed,
                                  d, n, r, self.max_vertices, self.monomial_budget)


def phi_embed(n: int, q: int, b: int) -> np.ndarray:
    """Ordered bijection {1..n} -> F_q**b; row i-1 holds the image of i.

    Vertex i maps to the base-q digits of i - 1, most significant first,
    so the vertex order matches the lexicographic order on vectors.
    """
    PrimeField(q)
    if b < 1:
        raise ParameterError("b must be >= 1")
    if n > q ** b:
        raise SizeError(f"n={n} exceeds q**b={q ** b}")
    out = np.empty((n, b), dtype=np.int64)
    idx = np.arange(n, dtype=np.int64)
    for pos in range(b - 1, -1, -1):
        out[:, pos] = idx % q
        idx //= q
    return out


def encode_colour(values, q: int) -> int:
    """Canonical integer id of a colour tuple over F_q (little-endian base q)."""
    code = 0
    for k, val in enumerate(values):
        code += int(val) * q ** k
    return code


def construction_polynomials(params: ConstructionParams) -> VectorPoly:
    """The 2a random polynomials of a construction, reproducible from the seed."""
    p = params.resolved()
    field = PrimeField(p.q)
    return sample_vector_poly(field, 2 * p.tree_b, p.d, 2 * p.tree_a, p.seed,
                              monomial_budget=p.monomial_budget)


def construct_random_colouring(params: ConstructionParams) -> EdgeColouring:
    """Colour K_n by the tuple of polynomial values at each edge's point.

    The point of edge {i, j} is (phi(min), phi(max)) concatenated; the
    colour is the 2a-tuple of component values, encoded in base q.
    Deterministic given the seed; palette size is at most q**(2a).
    """
    p = params.resolved()
    polys = construction_polynomials(p)
    phi = phi_embed(p.n, p.q, p.tree_b)
    iu, iv = np.triu_indices(p.n, k=1)
    points = np.concatenate([phi[iu], phi[iv]], axis=1)
    values = polys.evaluate_batch(points)  # (n*(n-1)/2, 2a)
    weights = np.array([p.q ** k for k in range(2 * p.tree_a)], dtype=np.int64)
    codes = values @ weights
    colour_of = {}
    for e in range(iu.shape[0]):
        colour_of[(int(iu[e]) + 1, int(iv[e]) + 1)] = int(codes[e])
    return EdgeColouring(p.n, colour_of)


# ---------------------------------------------------------------------------
# properness, boundedness, properization
# ---------------------------------------------------------------------------

def is_proper(c: EdgeColouring):
    """(True, None) or (False, (vertex, edge, edge)) for the first clash."""
    seen = [dict() for _ in range(c.n + 1)]
    for (u, v), col in sorted(c.edges()):
        for x, y in ((u, v), (v, u)):
            if col in seen[x]:
                return False, (x, seen[x][col], (u, v))
            seen[x][col] = (u, v)
    return True, None


def boundedness(c: EdgeColouring) -> int:
    """Smallest C such that every colour class has maximum degree <= C."""
    best = 0
    counts = [dict() for _ in range(c.n + 1)]
    for (u, v), col in c.edges():
        for x in (u, v):
            cnt = counts[x].get(col, 0) + 1
            counts[x][col] = cnt
            if cnt > best:
                best = cnt
    return best


def _fan_recolour_class(edges) -> dict:
    """Proper index assignment for one colour class with <= Delta+1 indices.

    Fan recolouring: for each uncoloured edge grow a maximal fan, free a
    shared index by flipping one alternating path, rotate the fan prefix.
    Returns {(u, v): index}.
    """
    adj = {}
    colour = {}

    def ensure(v):
        adj.setdefault(v, {})

    def set_col(x, y, idx):
        colour[frozenset((x, y))] = idx
        adj[x][idx] = y
        adj[y][idx] = x

    def unset_col(x, y):
        idx = colour.pop(frozenset((x, y)))
        del adj[x][idx]
        del adj[y][idx]
        return idx

    deg = {}
    for u, v in edges:
        ensure(u)
        ensure(v)
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    ncolours = max(deg.values()) + 1

    def first_free(v):
        for i in range(ncolours):
            if i not in adj[v]:
                return i
        raise AssertionError("no free index below Delta+1")  # pragma: no cover

    def invert_path(start, c_free, d_want):
        # Maximal path from start alternating d_want, c_free; swap the two.
        path = []
        cur, want = start, d_want
        while want in adj[cur]:
            nxt = adj[cur][want]
            path.append((cur, nxt))
            cur, want = nxt, (c_free if want == d_want else d_want)
        flipped = [(x, y, unset_col(x, y)) for x, y in path]
        for x, y, old in flipped:
            set_col(x, y, c_free if old == d_want else d_want)

    for u, v in sorted(edges):
        # maximal fan of u starting at v
        fan = [v]
        in_fan = {v}
        while True:
            last = fan[-1]
            ext = None
            for idx in sorted(adj[u]):
                w = adj[u][idx]
                if w not in in_fan and idx not in adj[last]:
                    ext = w
                    break
            if ext is None:
                break
            fan.append(ext)
            in_fan.add(ext)
        c_free = first_free(u)
        d_free = first_free(fan[-1])
        if c_free != d_free:
            invert_path(u, c_free, d_free)
        # d_free is now free on u; find a fan prefix ending where it is free
        w_idx = None
        for i in range(len(fan)):
            if d_free in adj[fan[i]]:
                continue
            ok = True
            for j in range(1, i + 1):
                cj = colour.get(frozenset((u, fan[j])))
                if cj is None or cj in adj[fan[j - 1]]:
                    ok = False
                    break
            if ok:
                w_idx = i
                break
        assert w_idx is not None, "fan recolouring failed to find a rotation"
        for j in range(w_idx):
            cj = unset_col(u, fan[j + 1])
            set_col(u, fan[j], cj)
        set_col(u, fan[w_idx], d_free)

    return {tuple(sorted(e)): idx for e, idx in colour.items()}


def vizing_properize(c: EdgeColouring) -> EdgeColouring:
    """Refine a bounded colouring into a proper one.

    Output colours are pairs (original colour, index); each class of
    maximum degree D is split into at most D + 1 <= C + 1 matchings, so
    the palette grows by a factor of at most C + 1 and equal output
    colours always came from equal input colours.
    """
    colour_of = {}
    for col, edges in c.classes().items():
        deg = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        if max(deg.values()) <= 1:
            for e in edges:
                colour_of[e] = (col, 0)
        else:
            indices = _fan_recolour_class(edges)
            for e in edges:
                colour_of[e] = (col, indices[tuple(sorted(e))])
    return EdgeColouring(c.n, colour_of)


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

def _colour_to_str(col) -> str:
    if isinstance(col, tuple):
        return ".".join(_colour_to_str(part) for part in col)
    s = str(col)
    if "," in s or "\n" in s:
        raise FormatError(f"colour id {col!r} contains reserved characters")
    return s


def _str_to_colour(s: str):
    return int(s) if s.isdigit() and str(int(s)) == s else s


def store_csv(c: EdgeColouring, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "colour"])
        for (u, v) in sorted(c._colour):
            writer.writerow([u, v, _colour_to_str(c._colour[(u, v)])])


def load_csv(path) -> EdgeColouring:
    colour_of = {}
    vmax = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["u", "v", "colour"]:
            raise FormatError(f"{path}:1: expected header u,v,colour")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                u, v = int(row[0]), int(row[1])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad vertex ids") from exc
            if not u < v:
                raise FormatError(f"{path}:{lineno}: rows must have u < v")
            colour_of[(u, v)] = _str_to_colour(row[2])
            vmax = max(vmax, v)
    try:
        return EdgeColouring(vmax, colour_of)
    except ParameterError as exc:
        raise FormatError(f"{path}: {exc}") from exc
